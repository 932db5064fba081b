//! Lower bounds on `sum_i K(A_i)` and `sum_i sqrt(K(A_i))` for `N` observables.
//!
//! Every bound is a norm inequality applied to the vectors
//! `u_i = W [M, A_i]`, so all of them hold for commuting inputs too; they just
//! degenerate to `0 >= 0` or to equalities. Sums run in index order so results
//! are bit-stable.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use num_integer::binomial;
use serde::Serialize;

use crate::error::{Result, SkewError};
use crate::matcore::{herm_eig, hs_norm_sq, ComplexMatrix};
use crate::skew::SkewContext;

/// Images with HS norm at or below this are treated as zero in the Gram matrix.
pub const ZERO_IMAGE_TOL: f64 = 1e-12;
/// Slack at or below `EQUALITY_TOL * (1 + lhs)` in magnitude is reported as an equality.
pub const EQUALITY_TOL: f64 = 1e-9;

/// `N >= 2` Hermitian observables of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    obs: Vec<ComplexMatrix>,
}

impl ObservableSet {
    pub fn new(obs: Vec<ComplexMatrix>) -> Result<Self> {
        if obs.len() < 2 {
            return Err(SkewError::TooFewMembers { needed: 2, got: obs.len() });
        }
        for a in &obs {
            obs[0].ensure_same_dim(a)?;
            a.ensure_hermitian()?;
        }
        Ok(Self { obs })
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.obs[0].dim()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.obs
    }

    fn sum_of(&self, idx: impl IntoIterator<Item = usize>) -> ComplexMatrix {
        idx.into_iter().fold(ComplexMatrix::zeros(self.dim()), |acc, i| &acc + &self.obs[i])
    }

    /// `sum_i A_i`.
    pub fn total(&self) -> ComplexMatrix {
        self.sum_of(0..self.len())
    }

    /// Conjugates every member by the same unitary.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let obs = self.obs.iter().map(|a| a.conjugate_by(u).map(|m| m.hermitian_part())).collect::<Result<_>>()?;
        Self::new(obs)
    }
}

/// Which of the `A_i + A_j` / `A_i - A_j` families a bound uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `K(A_i +- A_j)` for `i < j`, lexicographic pair order.
fn pair_skews(ctx: &SkewContext, set: &ObservableSet, sign: Sign) -> Result<Vec<f64>> {
    let obs = set.members();
    (0..set.len())
        .tuple_combinations()
        .map(|(i, j)| {
            let m = match sign {
                Sign::Plus => &obs[i] + &obs[j],
                Sign::Minus => &obs[i] - &obs[j],
            };
            ctx.observable(&m)
        })
        .collect()
}

fn root_sum(values: &[f64]) -> f64 {
    values.iter().map(|k| k.max(0.0).sqrt()).sum()
}

fn needs_more_than_two(set: &ObservableSet) -> Result<()> {
    if set.len() > 2 {
        Ok(())
    } else {
        Err(SkewError::NeedsNGreaterThan2 { n: set.len() })
    }
}

/// `(plus, minus)` branches: `sum_{i<j} K(A_i +- A_j) / (2(N-1))`.
pub fn lb_thm1_branches(ctx: &SkewContext, set: &ObservableSet) -> Result<(f64, f64)> {
    let scale = 1.0 / (2.0 * (set.len() as f64 - 1.0));
    let plus: f64 = pair_skews(ctx, set, Sign::Plus)?.iter().sum();
    let minus: f64 = pair_skews(ctx, set, Sign::Minus)?.iter().sum();
    Ok((scale * plus, scale * minus))
}

/// Larger of the two [`lb_thm1_branches`]; bounds `sum K(A_i)`.
pub fn lb_thm1(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    let (p, m) = lb_thm1_branches(ctx, set)?;
    Ok(p.max(m))
}

/// `(sqrt K(sum_i A_i), sqrt K(sum_{i<N} A_i - A_N))`.
pub fn lb_thm2_branches(ctx: &SkewContext, set: &ObservableSet) -> Result<(f64, f64)> {
    let n = set.len();
    let all = ctx.observable(&set.total())?;
    let alternating = &set.sum_of(0..n - 1) - &set.members()[n - 1];
    let alt = ctx.observable(&alternating)?;
    Ok((all.sqrt(), alt.sqrt()))
}

/// Bounds `sum sqrt K(A_i)`.
pub fn lb_thm2(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    let (a, b) = lb_thm2_branches(ctx, set)?;
    Ok(a.max(b))
}

/// `[sum K(A_i+A_j) - (sum sqrt K(A_i+A_j))^2 / (N-1)^2] / (N-2)`, for `N > 2`.
pub fn lb_thm3(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    needs_more_than_two(set)?;
    let n = set.len() as f64;
    let plus = pair_skews(ctx, set, Sign::Plus)?;
    let s: f64 = plus.iter().sum();
    let r = root_sum(&plus);
    Ok((s - r * r / ((n - 1.0) * (n - 1.0))) / (n - 2.0))
}

/// `[sum sqrt K(A_i+A_j) - sqrt K(sum A_i)] / (N-2)`, for `N > 2`; bounds `sum sqrt K(A_i)`.
pub fn lb_thm4(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    needs_more_than_two(set)?;
    let n = set.len() as f64;
    let r = root_sum(&pair_skews(ctx, set, Sign::Plus)?);
    let all = ctx.observable(&set.total())?;
    Ok((r - all.sqrt()) / (n - 2.0))
}

/// `K(sum A_i) / N + 2 (sum sqrt K(A_i-A_j))^2 / (N^2 (N-1))`.
pub fn lb_thm5(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    let n = set.len() as f64;
    let all = ctx.observable(&set.total())?;
    let r = root_sum(&pair_skews(ctx, set, Sign::Minus)?);
    Ok(all / n + 2.0 * r * r / (n * n * (n - 1.0)))
}

/// `[2 (sum sqrt K(A_i s A_j))^2 / (N(N-1)) + sum K(A_i -s A_j)] / (2(N-1))` with `s = sign`.
pub fn lb_thm6(ctx: &SkewContext, set: &ObservableSet, sign: Sign) -> Result<f64> {
    let n = set.len() as f64;
    let rooted = root_sum(&pair_skews(ctx, set, sign)?);
    let squared: f64 = pair_skews(ctx, set, sign.flip())?.iter().sum();
    Ok((2.0 * rooted * rooted / (n * (n - 1.0)) + squared) / (2.0 * (n - 1.0)))
}

/// Gram matrix `G_jk = Tr(X_j X_k^dagger)` of the normalized images
/// `X_j = i W [M, A_j] / ||W [M, A_j]||`.
pub fn gram_matrix(ctx: &SkewContext, set: &ObservableSet) -> Result<ComplexMatrix> {
    let dirs = set
        .members()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let img = ctx.left_image(a)?;
            let norm = hs_norm_sq(&img).sqrt();
            if norm <= ZERO_IMAGE_TOL {
                return Err(SkewError::ZeroSkew { index: j });
            }
            Ok(img.scale(Complex64::new(0.0, 1.0 / norm)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gram_of(&dirs))
}

pub(crate) fn gram_of(dirs: &[ComplexMatrix]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dirs.len(), |j, k| dirs[k].hs_inner(&dirs[j]))
}

/// Theorem-7 style bound with its Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GramBound {
    pub bound: f64,
    pub gram: ComplexMatrix,
    pub lambda_max: f64,
}

pub fn lb_thm7_detail(ctx: &SkewContext, set: &ObservableSet) -> Result<GramBound> {
    let gram = gram_matrix(ctx, set)?;
    let lambda_max = herm_eig(&gram)?.max_eigenvalue();
    let bound = ctx.observable(&set.total())? / lambda_max;
    Ok(GramBound { bound, gram, lambda_max })
}

/// `K(sum A_j) / lambda_max(G)`; fails with [`SkewError::ZeroSkew`] if some image vanishes.
pub fn lb_thm7(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    lb_thm7_detail(ctx, set).map(|g| g.bound)
}

/// Subset-sum bound over all `k`-subsets, `2 <= k < N`. Equals [`lb_thm3`] at `k = 2`.
pub fn lb_thm8(ctx: &SkewContext, set: &ObservableSet, k: usize) -> Result<f64> {
    let n = set.len();
    if k < 2 || k >= n {
        return Err(SkewError::BadSubsetSize { k, n });
    }
    let values = (0..n)
        .combinations(k)
        .map(|subset| ctx.observable(&set.sum_of(subset)))
        .collect::<Result<Vec<_>>>()?;
    let s: f64 = values.iter().sum();
    let r = root_sum(&values);
    let lead = binomial(n as u64 - 2, k as u64 - 1) as f64;
    let mid = binomial(n as u64 - 2, k as u64 - 2) as f64;
    let tail = binomial(n as u64 - 1, k as u64 - 1) as f64;
    Ok((s - mid / (tail * tail) * r * r) / lead)
}

/// `sum over (N-1)-subsets of sqrt K(subset sum) - (N-2) sqrt K(sum A_i)`; bounds `sum sqrt K(A_i)`.
pub fn lb_thm9(ctx: &SkewContext, set: &ObservableSet) -> Result<f64> {
    let n = set.len();
    let mut r = 0.0;
    for subset in (0..n).combinations(n - 1) {
        r += ctx.observable(&set.sum_of(subset))?.sqrt();
    }
    let all = ctx.observable(&set.total())?;
    Ok(r - (n as f64 - 2.0) * all.sqrt())
}

/// Which side of the uncertainty relation a named bound applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundTarget {
    /// `sum_i K(A_i)`
    Sum,
    /// `sum_i sqrt K(A_i)`
    RootSum,
}

/// Target of a stable bound name (`thm1` .. `thm9`, `thm6_plus`, `thm8_k{k}`).
pub fn bound_target(name: &str) -> BoundTarget {
    match name {
        "thm2" | "thm4" | "thm9" => BoundTarget::RootSum,
        _ => BoundTarget::Sum,
    }
}

/// Every applicable bound for one `(rho, {A_i}, params)` instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n_observables: usize,
    /// `sum_i K(A_i)`
    pub lhs_sum: f64,
    /// `sum_i sqrt K(A_i)`
    pub lhs_root_sum: f64,
    pub bounds: BTreeMap<String, f64>,
    /// `lhs - bound`, against the matching left-hand side.
    pub slack: BTreeMap<String, f64>,
    /// Bounds that did not apply, with the reason.
    pub skipped: BTreeMap<String, String>,
    /// Bounds attained with equality (within tolerance).
    pub equalities: Vec<String>,
    /// `max{thm1, thm3, thm5, thm6, thm7, thm8}` over the evaluated ones.
    pub max_sum_bound: f64,
    /// `max{thm2, thm4, thm9}` over the evaluated ones.
    pub max_root_bound: f64,
}

impl BoundReport {
    /// Lowest `slack / (1 + lhs)` across all bounds; negative values beyond
    /// round-off would mean a violated inequality.
    pub fn min_relative_slack(&self) -> f64 {
        self.slack
            .iter()
            .map(|(name, s)| s / (1.0 + self.lhs_for(name)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn lhs_for(&self, name: &str) -> f64 {
        match bound_target(name) {
            BoundTarget::Sum => self.lhs_sum,
            BoundTarget::RootSum => self.lhs_root_sum,
        }
    }
}

/// Evaluates every bound that applies to `set`.
///
/// Bounds whose preconditions fail for structural reasons (`N = 2` for
/// theorems 3, 4, 8; a vanishing image for theorem 7) are listed in
/// `skipped`. Numerical failures propagate as errors.
pub fn best_bounds(ctx: &SkewContext, set: &ObservableSet) -> Result<BoundReport> {
    let n = set.len();
    let singles = set.members().iter().map(|a| ctx.observable(a)).collect::<Result<Vec<_>>>()?;
    let lhs_sum: f64 = singles.iter().sum();
    let lhs_root_sum = root_sum(&singles);

    let mut bounds = BTreeMap::new();
    let mut skipped = BTreeMap::new();

    bounds.insert("thm1".to_string(), lb_thm1(ctx, set)?);
    bounds.insert("thm2".to_string(), lb_thm2(ctx, set)?);
    if n > 2 {
        bounds.insert("thm3".to_string(), lb_thm3(ctx, set)?);
        bounds.insert("thm4".to_string(), lb_thm4(ctx, set)?);
        for k in 2..n {
            bounds.insert(format!("thm8_k{k}"), lb_thm8(ctx, set, k)?);
        }
    } else {
        for name in ["thm3", "thm4", "thm8"] {
            skipped.insert(name.to_string(), "requires N > 2".to_string());
        }
    }
    bounds.insert("thm5".to_string(), lb_thm5(ctx, set)?);
    bounds.insert("thm6_plus".to_string(), lb_thm6(ctx, set, Sign::Plus)?);
    bounds.insert("thm6_minus".to_string(), lb_thm6(ctx, set, Sign::Minus)?);
    match lb_thm7(ctx, set) {
        Ok(v) => {
            bounds.insert("thm7".to_string(), v);
        }
        Err(SkewError::ZeroSkew { index }) => {
            skipped.insert("thm7".to_string(), format!("commutator image of observable {index} vanishes"));
        }
        Err(e) => return Err(e),
    }
    bounds.insert("thm9".to_string(), lb_thm9(ctx, set)?);

    let mut slack = BTreeMap::new();
    let mut equalities = Vec::new();
    let mut max_sum_bound = f64::NEG_INFINITY;
    let mut max_root_bound = f64::NEG_INFINITY;
    for (name, &b) in &bounds {
        let lhs = match bound_target(name) {
            BoundTarget::Sum => {
                max_sum_bound = max_sum_bound.max(b);
                lhs_sum
            }
            BoundTarget::RootSum => {
                max_root_bound = max_root_bound.max(b);
                lhs_root_sum
            }
        };
        let s = lhs - b;
        if s.abs() <= EQUALITY_TOL * (1.0 + lhs) {
            equalities.push(name.clone());
        }
        slack.insert(name.clone(), s);
    }

    Ok(BoundReport {
        n_observables: n,
        lhs_sum,
        lhs_root_sum,
        bounds,
        slack,
        skipped,
        equalities,
        max_sum_bound,
        max_root_bound,
    })
}
