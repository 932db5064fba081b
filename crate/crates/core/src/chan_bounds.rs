//! Sum uncertainty bounds for `N` quantum channels.
//!
//! The channel bounds pair up Kraus operators across channels: for an
//! [`Assignment`] `(pi_1, ..., pi_N)` the `i`-th "slot" combines
//! `E^1_{pi_1(i)}, ..., E^N_{pi_N(i)}`, and the observable-style inequalities
//! are applied slot by slot. Any assignment gives a valid bound, so the best one
//! is found by search. The first channel's permutation is fixed to the identity
//! since relabelling every channel by the same permutation does not change any
//! value.
//!
//! Channels with fewer Kraus operators are padded with zero operators.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkewError};
use crate::matcore::{herm_eig, hs_norm_sq, ComplexMatrix};
use crate::obs_bounds::{gram_of, BoundTarget, ZERO_IMAGE_TOL};
use crate::skew::SkewContext;

/// Allowed `||sum E_i^dagger E_i - I||_HS`.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Default limit on `(n!)^(N-1)` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;
/// Default number of local-search restarts.
pub const DEFAULT_RESTARTS: usize = 16;

/// Tables of `K(sum_t E^t)` up to this many entries are precomputed.
const SLOT_TABLE_LIMIT: usize = 1 << 16;

/// A channel given by its Kraus operators, `Phi(rho) = sum_i E_i rho E_i^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::unchecked(kraus)?;
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(SkewError::IncompleteKraus { residual });
        }
        Ok(ch)
    }

    fn unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(SkewError::EmptyChannel)?;
        for e in &kraus {
            first.ensure_same_dim(e)?;
        }
        Ok(Self { kraus })
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// `||sum_i E_i^dagger E_i - I||_HS`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self.kraus.iter().fold(ComplexMatrix::zeros(d), |acc, e| &acc + &(&e.adjoint() * e));
        sum.hs_distance(&ComplexMatrix::identity(d))
    }

    /// `Phi(rho)`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.kraus[0].ensure_same_dim(rho)?;
        Ok(self.kraus.iter().fold(ComplexMatrix::zeros(self.dim()), |acc, e| &acc + &(&(e * rho) * &e.adjoint())))
    }

    /// Appends zero operators up to `n` Kraus operators.
    pub fn padded(&self, n: usize) -> Self {
        let mut kraus = self.kraus.clone();
        while kraus.len() < n {
            kraus.push(ComplexMatrix::zeros(self.dim()));
        }
        Self { kraus }
    }

    /// Another Kraus representation of the same channel: `E'_j = sum_i U_ji E_i`
    /// for an `n x n` unitary `U`.
    pub fn remix(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.len() {
            return Err(SkewError::DimMismatch { left: self.len(), right: u.dim() });
        }
        let kraus = (0..self.len())
            .map(|j| {
                self.kraus
                    .iter()
                    .enumerate()
                    .fold(ComplexMatrix::zeros(self.dim()), |acc, (i, e)| &acc + &e.scale(u.get(j, i)))
            })
            .collect();
        Self::new(kraus)
    }
}

/// One permutation of the Kraus indices per channel (0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub perms: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn identity(channels: usize, n: usize) -> Self {
        Self { perms: vec![(0..n).collect(); channels] }
    }

    pub fn validate(&self, channels: usize, n: usize) -> Result<()> {
        if self.perms.len() != channels {
            return Err(SkewError::BadAssignment(format!(
                "expected {channels} permutations, got {}",
                self.perms.len()
            )));
        }
        for (t, p) in self.perms.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n || !p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true)) {
                return Err(SkewError::BadAssignment(format!("entry {t} is not a permutation of 0..{n}")));
            }
        }
        Ok(())
    }
}

/// The channel theorems that take an assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelTheorem {
    /// Larger of the `+` and `-` pair sums; `N > 2`.
    Thm10,
    /// `N > 2`.
    Thm11,
    /// Bounds `sum_t sqrt K(Phi_t)`; `N > 2`.
    Thm12,
    Thm13,
    Thm14Plus,
    Thm14Minus,
}

impl ChannelTheorem {
    pub const ALL: [ChannelTheorem; 6] = [
        ChannelTheorem::Thm10,
        ChannelTheorem::Thm11,
        ChannelTheorem::Thm12,
        ChannelTheorem::Thm13,
        ChannelTheorem::Thm14Plus,
        ChannelTheorem::Thm14Minus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelTheorem::Thm10 => "thm10",
            ChannelTheorem::Thm11 => "thm11",
            ChannelTheorem::Thm12 => "thm12",
            ChannelTheorem::Thm13 => "thm13",
            ChannelTheorem::Thm14Plus => "thm14_plus",
            ChannelTheorem::Thm14Minus => "thm14_minus",
        }
    }

    pub fn target(self) -> BoundTarget {
        match self {
            ChannelTheorem::Thm12 => BoundTarget::RootSum,
            _ => BoundTarget::Sum,
        }
    }

    pub fn needs_more_than_two(self) -> bool {
        matches!(self, ChannelTheorem::Thm10 | ChannelTheorem::Thm11 | ChannelTheorem::Thm12)
    }
}

/// Channels sharing a state and parameters, with pairwise skew tables precomputed.
#[derive(Clone, Debug)]
pub struct ChannelProblem<'a> {
    ctx: &'a SkewContext,
    channels: Vec<KrausChannel>,
    n_kraus: usize,
    /// `K(E^t_i + E^s_j)` at `pair_index(t, s, i, j)`.
    plus: Vec<f64>,
    /// `K(E^t_i - E^s_j)`.
    minus: Vec<f64>,
    /// `K(sum_t E^t_{k_t})` by mixed-radix index, when small enough.
    slot_table: Option<Vec<f64>>,
    per_channel: Vec<f64>,
}

impl<'a> ChannelProblem<'a> {
    pub fn new(ctx: &'a SkewContext, channels: &[KrausChannel]) -> Result<Self> {
        if channels.len() < 2 {
            return Err(SkewError::TooFewMembers { needed: 2, got: channels.len() });
        }
        for ch in channels {
            if ch.dim() != ctx.dim() {
                return Err(SkewError::DimMismatch { left: ctx.dim(), right: ch.dim() });
            }
        }
        let n_kraus = channels.iter().map(KrausChannel::len).max().unwrap_or(0);
        let channels: Vec<_> = channels.iter().map(|c| c.padded(n_kraus)).collect();
        let per_channel = channels.iter().map(|c| ctx.channel(c)).collect::<Result<Vec<_>>>()?;

        let big_n = channels.len();
        let mut plus = vec![0.0; big_n * big_n * n_kraus * n_kraus];
        let mut minus = plus.clone();
        for (t, s) in (0..big_n).tuple_combinations() {
            for i in 0..n_kraus {
                for j in 0..n_kraus {
                    let (a, b) = (&channels[t].kraus[i], &channels[s].kraus[j]);
                    let idx = Self::index(big_n, n_kraus, t, s, i, j);
                    plus[idx] = ctx.operator(&(a + b))?;
                    minus[idx] = ctx.operator(&(a - b))?;
                }
            }
        }

        let mut problem = Self { ctx, channels, n_kraus, plus, minus, slot_table: None, per_channel };
        let slots = n_kraus.checked_pow(big_n as u32).filter(|&s| s <= SLOT_TABLE_LIMIT);
        if let Some(slots) = slots {
            let table = (0..slots)
                .map(|code| {
                    let picks = problem.decode(code);
                    problem.slot_sum_live(&picks)
                })
                .collect::<Result<Vec<_>>>()?;
            problem.slot_table = Some(table);
        }
        Ok(problem)
    }

    fn index(big_n: usize, n: usize, t: usize, s: usize, i: usize, j: usize) -> usize {
        ((t * big_n + s) * n + i) * n + j
    }

    fn decode(&self, mut code: usize) -> Vec<usize> {
        let mut picks = vec![0; self.channels.len()];
        for p in picks.iter_mut().rev() {
            *p = code % self.n_kraus;
            code /= self.n_kraus;
        }
        picks
    }

    fn encode(&self, picks: &[usize]) -> usize {
        picks.iter().fold(0, |acc, &k| acc * self.n_kraus + k)
    }

    fn slot_sum_live(&self, picks: &[usize]) -> Result<f64> {
        let sum = picks
            .iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(self.ctx.dim()), |acc, (t, &k)| &acc + &self.channels[t].kraus[k]);
        self.ctx.operator(&sum)
    }

    /// `K(sum_t E^t_{picks[t]})`.
    fn slot_sum(&self, picks: &[usize]) -> Result<f64> {
        match &self.slot_table {
            Some(table) => Ok(table[self.encode(picks)]),
            None => self.slot_sum_live(picks),
        }
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Kraus operators per channel after padding.
    pub fn n_kraus(&self) -> usize {
        self.n_kraus
    }

    pub fn channels(&self) -> &[KrausChannel] {
        &self.channels
    }

    pub fn context(&self) -> &SkewContext {
        self.ctx
    }

    /// `K(Phi_t)` per channel.
    pub fn per_channel(&self) -> &[f64] {
        &self.per_channel
    }

    /// `sum_t K(Phi_t)`.
    pub fn lhs(&self) -> f64 {
        self.per_channel.iter().sum()
    }

    /// `sum_t sqrt K(Phi_t)`.
    pub fn lhs_root(&self) -> f64 {
        self.per_channel.iter().map(|k| k.sqrt()).sum()
    }

    /// `sum_t sum_i sqrt K(E^t_i)`, the quantity the slot-wise root inequality actually bounds.
    pub fn kraus_root_sum(&self) -> Result<f64> {
        let mut total = 0.0;
        for ch in &self.channels {
            for e in &ch.kraus {
                total += self.ctx.operator(e)?.sqrt();
            }
        }
        Ok(total)
    }

    /// The left-hand side a theorem is compared against.
    pub fn lhs_for(&self, theorem: ChannelTheorem) -> f64 {
        match theorem.target() {
            BoundTarget::Sum => self.lhs(),
            BoundTarget::RootSum => self.lhs_root(),
        }
    }

    /// `(n!)^(N-1)`, as a float so it cannot overflow.
    pub fn search_space_size(&self) -> f64 {
        let fact: f64 = (1..=self.n_kraus).map(|k| k as f64).product();
        fact.powi(self.n_channels() as i32 - 1)
    }

    /// The bracketed expression of `theorem` for one fixed assignment.
    pub fn assignment_value(&self, theorem: ChannelTheorem, a: &Assignment) -> Result<f64> {
        let big_n = self.n_channels();
        if theorem.needs_more_than_two() && big_n <= 2 {
            return Err(SkewError::NeedsNGreaterThan2 { n: big_n });
        }
        a.validate(big_n, self.n_kraus)?;
        let n = self.n_kraus;
        let nf = big_n as f64;
        let pair = |table: &[f64], t: usize, s: usize, i: usize| {
            table[Self::index(big_n, n, t, s, a.perms[t][i], a.perms[s][i])]
        };
        // per-slot sums over channel pairs t < s
        let slot_pairs = |table: &[f64], rooted: bool| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    (0..big_n)
                        .tuple_combinations()
                        .map(|(t, s)| {
                            let k = pair(table, t, s, i);
                            if rooted {
                                k.sqrt()
                            } else {
                                k
                            }
                        })
                        .sum()
                })
                .collect()
        };
        let total = |v: &[f64]| v.iter().sum::<f64>();
        let squares = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let slot_totals = || -> Result<Vec<f64>> {
            (0..n)
                .map(|i| {
                    let picks: Vec<usize> = (0..big_n).map(|t| a.perms[t][i]).collect();
                    self.slot_sum(&picks)
                })
                .collect()
        };

        let value = match theorem {
            ChannelTheorem::Thm10 => {
                let p = total(&slot_pairs(&self.plus, false));
                let m = total(&slot_pairs(&self.minus, false));
                p.max(m) / (2.0 * (nf - 1.0))
            }
            ChannelTheorem::Thm11 => {
                let s = total(&slot_pairs(&self.plus, false));
                let r = squares(&slot_pairs(&self.plus, true));
                (s - r / ((nf - 1.0) * (nf - 1.0))) / (nf - 2.0)
            }
            ChannelTheorem::Thm12 => {
                let r = total(&slot_pairs(&self.plus, true));
                let all: f64 = slot_totals()?.iter().map(|k| k.sqrt()).sum();
                (r - all) / (nf - 2.0)
            }
            ChannelTheorem::Thm13 => {
                let all: f64 = slot_totals()?.iter().sum();
                let r = squares(&slot_pairs(&self.minus, true));
                all / nf + 2.0 * r / (nf * nf * (nf - 1.0))
            }
            ChannelTheorem::Thm14Plus | ChannelTheorem::Thm14Minus => {
                let (rooted, squared) = if theorem == ChannelTheorem::Thm14Plus {
                    (&self.plus, &self.minus)
                } else {
                    (&self.minus, &self.plus)
                };
                let r = squares(&slot_pairs(rooted, true));
                let s = total(&slot_pairs(squared, false));
                (2.0 * r / (nf * (nf - 1.0)) + s) / (2.0 * (nf - 1.0))
            }
        };
        Ok(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    Exhaustive,
    LocalSearch,
    /// Exhaustive when under the cap, local search otherwise.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest `(n!)^(N-1)` exhaustive search will enumerate.
    pub cap: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { cap: DEFAULT_EXHAUSTIVE_CAP, restarts: DEFAULT_RESTARTS, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub assignment: Assignment,
    pub value: f64,
    /// Number of assignments evaluated.
    pub evaluated: u64,
    /// `Exhaustive` or `LocalSearch`; never `Auto`.
    pub strategy: SearchStrategy,
}

fn improves(candidate: f64, best: f64) -> bool {
    candidate > best + 1e-12 * (1.0 + best.abs())
}

/// Maximizes [`ChannelProblem::assignment_value`] over assignments with the
/// first permutation fixed to the identity.
///
/// Exhaustive search returns the lexicographically smallest maximizer; local
/// search is coordinate ascent over adjacent transpositions with seeded
/// restarts (restart 0 starts at the identity) and always returns a valid bound.
pub fn optimize_assignment(
    problem: &ChannelProblem<'_>,
    theorem: ChannelTheorem,
    strategy: SearchStrategy,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    let size = problem.search_space_size();
    match strategy {
        SearchStrategy::Exhaustive => {
            if size > config.cap as f64 {
                return Err(SkewError::SearchSpaceTooLarge { size, cap: config.cap });
            }
            exhaustive(problem, theorem)
        }
        SearchStrategy::LocalSearch => local_search(problem, theorem, config),
        SearchStrategy::Auto if size <= config.cap as f64 => exhaustive(problem, theorem),
        SearchStrategy::Auto => local_search(problem, theorem, config),
    }
}

fn exhaustive(problem: &ChannelProblem<'_>, theorem: ChannelTheorem) -> Result<SearchOutcome> {
    let n = problem.n_kraus();
    let identity: Vec<usize> = (0..n).collect();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut best: Option<(Assignment, f64)> = None;
    let mut evaluated = 0;
    for rest in itertools::repeat_n(perms.iter(), problem.n_channels() - 1).multi_cartesian_product() {
        let mut all = vec![identity.clone()];
        all.extend(rest.into_iter().cloned());
        let a = Assignment { perms: all };
        let v = problem.assignment_value(theorem, &a)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b)| improves(v, *b)) {
            best = Some((a, v));
        }
    }
    let (assignment, value) = best.expect("at least the identity assignment exists");
    Ok(SearchOutcome { assignment, value, evaluated, strategy: SearchStrategy::Exhaustive })
}

fn local_search(problem: &ChannelProblem<'_>, theorem: ChannelTheorem, config: &SearchConfig) -> Result<SearchOutcome> {
    let n = problem.n_kraus();
    let big_n = problem.n_channels();
    let mut best: Option<(Assignment, f64)> = None;
    let mut evaluated = 0;
    for restart in 0..config.restarts.max(1) {
        let mut a = Assignment::identity(big_n, n);
        if restart > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            for p in a.perms.iter_mut().skip(1) {
                p.shuffle(&mut rng);
            }
        }
        let mut current = problem.assignment_value(theorem, &a)?;
        evaluated += 1;
        loop {
            let mut moved = false;
            for t in 1..big_n {
                for j in 0..n.saturating_sub(1) {
                    a.perms[t].swap(j, j + 1);
                    let v = problem.assignment_value(theorem, &a)?;
                    evaluated += 1;
                    if improves(v, current) {
                        current = v;
                        moved = true;
                    } else {
                        a.perms[t].swap(j, j + 1);
                    }
                }
            }
            if !moved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| improves(current, *b)) {
            best = Some((a, current));
        }
    }
    let (assignment, value) = best.expect("at least one restart runs");
    Ok(SearchOutcome { assignment, value, evaluated, strategy: SearchStrategy::LocalSearch })
}

/// Normalized Gram ("covariance") matrix of commutator images `i [M, E_j] W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covariance {
    pub gram: ComplexMatrix,
    /// Indices of the operators that entered `gram`, in order.
    pub kept: Vec<usize>,
    /// Indices whose image norm was at most `ZERO_IMAGE_TOL`.
    pub dropped: Vec<usize>,
}

pub fn covariance_matrix(ctx: &SkewContext, ops: &[ComplexMatrix]) -> Result<Covariance> {
    let mut dirs = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (j, e) in ops.iter().enumerate() {
        let img = ctx.right_image(e)?;
        let norm = hs_norm_sq(&img).sqrt();
        if norm <= ZERO_IMAGE_TOL {
            dropped.push(j);
        } else {
            dirs.push(img.scale(Complex64::new(0.0, 1.0 / norm)));
            kept.push(j);
        }
    }
    if dirs.is_empty() {
        return Err(SkewError::AllZeroSkew);
    }
    Ok(Covariance { gram: gram_of(&dirs), kept, dropped })
}

/// `K(sum_i sum_t E_i^t) / lambda_max(G)` with `G` the covariance matrix of all Kraus operators.
///
/// Returns 0 when every image vanishes, since the pooled image is then zero too.
pub fn lb_thm15(ctx: &SkewContext, channels: &[KrausChannel]) -> Result<f64> {
    if channels.len() < 2 {
        return Err(SkewError::TooFewMembers { needed: 2, got: channels.len() });
    }
    let ops: Vec<ComplexMatrix> = channels.iter().flat_map(|c| c.kraus().iter().cloned()).collect();
    let pooled = ops.iter().fold(ComplexMatrix::zeros(ctx.dim()), |acc, e| &acc + e);
    let k = ctx.operator(&pooled)?;
    match covariance_matrix(ctx, &ops) {
        Ok(cov) => Ok(k / herm_eig(&cov.gram)?.max_eigenvalue()),
        Err(SkewError::AllZeroSkew) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// One line of a [`ChannelBoundReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelBoundEntry {
    pub name: String,
    pub value: f64,
    pub target: BoundTarget,
    /// The left-hand side `value` is compared with.
    pub lhs: f64,
    pub slack: f64,
    /// `value <= lhs` within `1e-9 (1 + lhs)`.
    pub holds: bool,
    pub assignment: Option<Assignment>,
    pub strategy: Option<SearchStrategy>,
    pub evaluated: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelBoundReport {
    pub n_channels: usize,
    pub n_kraus: usize,
    /// `sum_t K(Phi_t)`
    pub lhs: f64,
    /// `sum_t sqrt K(Phi_t)`
    pub lhs_root: f64,
    pub entries: Vec<ChannelBoundEntry>,
    pub skipped: BTreeMap<String, String>,
}

impl ChannelBoundReport {
    pub fn entry(&self, name: &str) -> Option<&ChannelBoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

const HOLDS_TOL: f64 = 1e-9;

fn entry(name: &str, value: f64, target: BoundTarget, lhs: f64) -> ChannelBoundEntry {
    ChannelBoundEntry {
        name: name.to_string(),
        value,
        target,
        lhs,
        slack: lhs - value,
        holds: value <= lhs + HOLDS_TOL * (1.0 + lhs),
        assignment: None,
        strategy: None,
        evaluated: 0,
    }
}

/// Runs every applicable channel bound. Theorems 10-12 are skipped for `N = 2`.
pub fn channel_bounds(
    problem: &ChannelProblem<'_>,
    strategy: SearchStrategy,
    config: &SearchConfig,
) -> Result<ChannelBoundReport> {
    let mut entries = Vec::new();
    let mut skipped = BTreeMap::new();
    for theorem in ChannelTheorem::ALL {
        if theorem.needs_more_than_two() && problem.n_channels() <= 2 {
            skipped.insert(theorem.name().to_string(), "requires N > 2".to_string());
            continue;
        }
        let found = optimize_assignment(problem, theorem, strategy, config)?;
        let mut e = entry(theorem.name(), found.value, theorem.target(), problem.lhs_for(theorem));
        e.assignment = Some(found.assignment);
        e.strategy = Some(found.strategy);
        e.evaluated = found.evaluated;
        entries.push(e);
    }
    let thm15 = lb_thm15(problem.context(), problem.channels())?;
    entries.push(entry("thm15", thm15, BoundTarget::Sum, problem.lhs()));
    Ok(ChannelBoundReport {
        n_channels: problem.n_channels(),
        n_kraus: problem.n_kraus(),
        lhs: problem.lhs(),
        lhs_root: problem.lhs_root(),
        entries,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::DensityMatrix;
    use crate::modelzoo::{
        pauli, qubit_from_bloch, random_channel, random_density, random_params, random_unitary, standard_channel,
        BlochVector, ChannelKind,
    };
    use crate::skew::SkewParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn f1_ctx() -> SkewContext {
        let rho = qubit_from_bloch(&BlochVector::new(0.3, 0.4, 0.5).unwrap());
        SkewContext::new(&rho, SkewParams::wigner_yanase(0.3).unwrap()).unwrap()
    }

    fn damping_pair() -> Vec<KrausChannel> {
        vec![
            standard_channel(ChannelKind::AmplitudeDamping, 0.3).unwrap(),
            standard_channel(ChannelKind::PhaseDamping, 0.4).unwrap(),
        ]
    }

    fn rotation(theta: f64, axis: usize) -> ComplexMatrix {
        &pauli(0).scale_real(theta.cos()) + &pauli(axis).scale(Complex64::new(0.0, -theta.sin()))
    }

    #[test]
    fn damping_pair_pinned() {
        let ctx = f1_ctx();
        let chans = damping_pair();
        let problem = ChannelProblem::new(&ctx, &chans).unwrap();
        assert_abs_diff_eq!(problem.per_channel()[0], 0.033_927_284_058_343_51, epsilon = 1e-12);
        assert_abs_diff_eq!(problem.per_channel()[1], 0.016_504_776_769_283_795, epsilon = 1e-12);
        let lhs = 0.050_432_060_827_627_3;
        assert_abs_diff_eq!(problem.lhs(), lhs, epsilon = 1e-12);
        let swapped = Assignment { perms: vec![vec![0, 1], vec![1, 0]] };
        for a in [Assignment::identity(2, 2), swapped] {
            for th in [ChannelTheorem::Thm13, ChannelTheorem::Thm14Plus, ChannelTheorem::Thm14Minus] {
                assert_abs_diff_eq!(problem.assignment_value(th, &a).unwrap(), lhs, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(lb_thm15(&ctx, &chans).unwrap(), 0.012_005_593_958_653_558, epsilon = 1e-12);
        let report = channel_bounds(&problem, SearchStrategy::Exhaustive, &SearchConfig::default()).unwrap();
        assert!(report.entries.iter().all(|e| e.holds));
        assert_eq!(report.entries.len(), 4);
        assert_eq!(report.skipped.len(), 3);
        assert_eq!(report.entry("thm13").unwrap().evaluated, 2);
    }

    #[test]
    fn damping_pair_covariance() {
        let ctx = f1_ctx();
        let ops: Vec<ComplexMatrix> = damping_pair().iter().flat_map(|c| c.kraus().to_vec()).collect();
        let cov = covariance_matrix(&ctx, &ops).unwrap();
        assert_eq!(cov.kept, vec![0, 1, 2, 3]);
        assert_abs_diff_eq!(cov.gram.get(0, 1).re, -0.346_410_161_513_775_4, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.gram.get(0, 1).im, 0.461_880_215_351_700_5, epsilon = 1e-12);
        assert_abs_diff_eq!(herm_eig(&cov.gram).unwrap().max_eigenvalue(), 3.414_213_562_373_094_5, epsilon = 1e-10);
    }

    #[test]
    fn covariance_edge_cases() {
        let ctx = f1_ctx();
        let single = covariance_matrix(&ctx, &[pauli(1)]).unwrap();
        assert_abs_diff_eq!(single.gram.get(0, 0).re, 1.0, epsilon = 1e-14);
        let prop = covariance_matrix(&ctx, &[pauli(2), pauli(2).scale_real(-3.0)]).unwrap();
        assert_abs_diff_eq!(prop.gram.get(0, 1).norm(), 1.0, epsilon = 1e-12);
        let zero = covariance_matrix(&ctx, &[pauli(0), pauli(1)]).unwrap();
        assert_eq!(zero.dropped, vec![0]);
        assert_eq!(covariance_matrix(&ctx, &[pauli(0)]).unwrap_err(), SkewError::AllZeroSkew);
    }

    #[test]
    fn unitary_pair_thm15() {
        let ctx = f1_ctx();
        let chans = vec![
            KrausChannel::new(vec![rotation(0.3, 1)]).unwrap(),
            KrausChannel::new(vec![rotation(0.7, 2)]).unwrap(),
        ];
        assert_abs_diff_eq!(lb_thm15(&ctx, &chans).unwrap(), 0.058_171_000_011_013_34, epsilon = 1e-12);
        let problem = ChannelProblem::new(&ctx, &chans).unwrap();
        assert_abs_diff_eq!(problem.lhs(), 0.103_632_524_104_619_75, epsilon = 1e-12);
        let t13 = problem.assignment_value(ChannelTheorem::Thm13, &Assignment::identity(2, 1)).unwrap();
        assert_abs_diff_eq!(t13, 0.103_632_524_104_619_76, epsilon = 1e-12);
    }

    #[test]
    fn unitary_trio_matches_observable_formulas() {
        let ctx = f1_ctx();
        let us = [rotation(0.3, 1), rotation(0.7, 2), rotation(1.1, 3)];
        let chans: Vec<_> = us.iter().map(|u| KrausChannel::new(vec![u.clone()]).unwrap()).collect();
        let problem = ChannelProblem::new(&ctx, &chans).unwrap();
        let k = |m: &ComplexMatrix| ctx.operator(m).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let plus: Vec<f64> = pairs.iter().map(|&(i, j)| k(&(&us[i] + &us[j]))).collect();
        let minus: Vec<f64> = pairs.iter().map(|&(i, j)| k(&(&us[i] - &us[j]))).collect();
        let root = |v: &[f64]| v.iter().map(|x| x.sqrt()).sum::<f64>();
        let total = k(&(&(&us[0] + &us[1]) + &us[2]));
        let a = Assignment::identity(3, 1);
        let val = |t| problem.assignment_value(t, &a).unwrap();
        let sp: f64 = plus.iter().sum();
        let sm: f64 = minus.iter().sum();
        assert_abs_diff_eq!(val(ChannelTheorem::Thm10), sp.max(sm) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(val(ChannelTheorem::Thm11), sp - root(&plus).powi(2) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(val(ChannelTheorem::Thm12), root(&plus) - total.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(val(ChannelTheorem::Thm13), total / 3.0 + root(&minus).powi(2) / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            val(ChannelTheorem::Thm14Plus),
            (root(&plus).powi(2) / 3.0 + sm) / 4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn thm12_counterexample() {
        let rho = qubit_from_bloch(&BlochVector::new(0.0, 0.6, 0.0).unwrap());
        let ctx = SkewContext::new(&rho, SkewParams::wigner_yanase(0.3).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ch = KrausChannel::new(vec![pauli(1).scale_real(s), pauli(3).scale_real(s)]).unwrap();
        let problem = ChannelProblem::new(&ctx, &[ch.clone(), ch.clone(), ch]).unwrap();
        let v = problem.assignment_value(ChannelTheorem::Thm12, &Assignment::identity(3, 2)).unwrap();
        assert_abs_diff_eq!(v, 1.897_366_596_101_027, epsilon = 1e-12);
        assert_abs_diff_eq!(problem.lhs_root(), 1.341_640_786_499_873_4, epsilon = 1e-12);
        assert_abs_diff_eq!(problem.kraus_root_sum().unwrap(), v, epsilon = 1e-12);
        let report = channel_bounds(&problem, SearchStrategy::Exhaustive, &SearchConfig::default()).unwrap();
        let e = report.entry("thm12").unwrap();
        assert!(!e.holds);
        assert!(report.entries.iter().filter(|e| e.name != "thm12").all(|e| e.holds));
    }

    #[test]
    fn identity_channels_give_zero() {
        let ctx = f1_ctx();
        let id = KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let problem = ChannelProblem::new(&ctx, &[id.clone(), id.clone(), id]).unwrap();
        let report = channel_bounds(&problem, SearchStrategy::Exhaustive, &SearchConfig::default()).unwrap();
        assert_eq!(report.lhs, 0.0);
        assert!(report.entries.iter().all(|e| e.value.abs() < 1e-15));
        assert_eq!(report.entry("thm10").unwrap().evaluated, 1);
    }

    #[test]
    fn padding_and_validation() {
        let ctx = f1_ctx();
        let dep = standard_channel(ChannelKind::Depolarizing, 0.5).unwrap();
        let ad = standard_channel(ChannelKind::AmplitudeDamping, 0.2).unwrap();
        let problem = ChannelProblem::new(&ctx, &[dep, ad.clone()]).unwrap();
        assert_eq!(problem.n_kraus(), 4);
        assert_eq!(problem.search_space_size(), 24.0);
        let bad = Assignment { perms: vec![vec![0, 1, 2, 3], vec![0, 0, 1, 2]] };
        assert!(matches!(problem.assignment_value(ChannelTheorem::Thm13, &bad), Err(SkewError::BadAssignment(_))));
        assert_eq!(
            problem.assignment_value(ChannelTheorem::Thm10, &Assignment::identity(2, 4)).unwrap_err(),
            SkewError::NeedsNGreaterThan2 { n: 2 }
        );
        assert!(KrausChannel::new(vec![pauli(1).scale_real(0.5)]).is_err());
        assert_eq!(KrausChannel::new(vec![]).unwrap_err(), SkewError::EmptyChannel);
        assert!(ChannelProblem::new(&ctx, &[ad]).is_err());
    }

    #[test]
    fn exhaustive_cap() {
        let ctx = f1_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chans: Vec<_> = (0..4).map(|_| random_channel(2, 6, &mut rng).unwrap()).collect();
        let problem = ChannelProblem::new(&ctx, &chans).unwrap();
        let err = optimize_assignment(&problem, ChannelTheorem::Thm13, SearchStrategy::Exhaustive, &SearchConfig::default())
            .unwrap_err();
        assert_eq!(err, SkewError::SearchSpaceTooLarge { size: 720f64.powi(3), cap: DEFAULT_EXHAUSTIVE_CAP });
        let cfg = SearchConfig { restarts: 3, ..SearchConfig::default() };
        let auto = optimize_assignment(&problem, ChannelTheorem::Thm13, SearchStrategy::Auto, &cfg).unwrap();
        assert_eq!(auto.strategy, SearchStrategy::LocalSearch);
        assert!(auto.value <= problem.lhs() + 1e-9 * (1.0 + problem.lhs()));
        let again = optimize_assignment(&problem, ChannelTheorem::Thm13, SearchStrategy::Auto, &cfg).unwrap();
        assert_eq!(auto, again);
    }

    #[test]
    fn single_kraus_has_one_assignment() {
        let ctx = f1_ctx();
        let chans = vec![
            KrausChannel::new(vec![rotation(0.3, 1)]).unwrap(),
            KrausChannel::new(vec![rotation(0.7, 2)]).unwrap(),
        ];
        let problem = ChannelProblem::new(&ctx, &chans).unwrap();
        let out = optimize_assignment(&problem, ChannelTheorem::Thm13, SearchStrategy::Exhaustive, &SearchConfig::default())
            .unwrap();
        assert_eq!(out.evaluated, 1);
        assert_eq!(out.assignment, Assignment::identity(2, 1));
    }

    struct Random {
        ctx: SkewContext,
        channels: Vec<KrausChannel>,
        rng: ChaCha8Rng,
    }

    fn random_problem(seed: u64, dim: usize, big_n: usize, n: usize) -> Random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_params(&mut rng);
        let rho: DensityMatrix = random_density(dim, &mut rng);
        let channels = (0..big_n).map(|_| random_channel(dim, n, &mut rng).unwrap()).collect();
        Random { ctx: SkewContext::new(&rho, p).unwrap(), channels, rng }
    }

    fn all_assignments(big_n: usize, n: usize) -> Vec<Assignment> {
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        itertools::repeat_n(perms.iter(), big_n - 1)
            .multi_cartesian_product()
            .map(|rest| {
                let mut all = vec![(0..n).collect::<Vec<_>>()];
                all.extend(rest.into_iter().cloned());
                Assignment { perms: all }
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sound_for_every_assignment(seed in any::<u64>(), big_n in 2usize..4, n in 1usize..4) {
            let r = random_problem(seed, 2, big_n, n);
            let problem = ChannelProblem::new(&r.ctx, &r.channels).unwrap();
            let lhs = problem.lhs();
            for a in all_assignments(big_n, n) {
                for th in ChannelTheorem::ALL.into_iter().filter(|t| *t != ChannelTheorem::Thm12) {
                    if th.needs_more_than_two() && big_n <= 2 {
                        continue;
                    }
                    let v = problem.assignment_value(th, &a).unwrap();
                    prop_assert!(v <= lhs + 1e-9 * (1.0 + lhs), "{th:?} {v} > {lhs}");
                }
                if big_n > 2 {
                    let v = problem.assignment_value(ChannelTheorem::Thm12, &a).unwrap();
                    let root = problem.kraus_root_sum().unwrap();
                    prop_assert!(v <= root + 1e-9 * (1.0 + root));
                }
            }
            prop_assert!(lb_thm15(&r.ctx, &r.channels).unwrap() <= lhs + 1e-9 * (1.0 + lhs));
        }

        #[test]
        fn gauge_invariance(seed in any::<u64>(), big_n in 2usize..5, n in 2usize..4) {
            let mut r = random_problem(seed, 2, big_n, n);
            let problem = ChannelProblem::new(&r.ctx, &r.channels).unwrap();
            let mut a = Assignment::identity(big_n, n);
            for p in a.perms.iter_mut().skip(1) {
                p.shuffle(&mut r.rng);
            }
            let mut common: Vec<usize> = (0..n).collect();
            common.shuffle(&mut r.rng);
            let relabelled = Assignment { perms: a.perms.iter().map(|p| common.iter().map(|&i| p[i]).collect()).collect() };
            for th in ChannelTheorem::ALL {
                if th.needs_more_than_two() && big_n <= 2 {
                    continue;
                }
                let x = problem.assignment_value(th, &a).unwrap();
                let y = problem.assignment_value(th, &relabelled).unwrap();
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn local_search_never_beats_exhaustive(seed in any::<u64>(), big_n in 2usize..4, n in 2usize..4) {
            let r = random_problem(seed, 2, big_n, n);
            let problem = ChannelProblem::new(&r.ctx, &r.channels).unwrap();
            let cfg = SearchConfig { seed, ..SearchConfig::default() };
            for th in [ChannelTheorem::Thm13, ChannelTheorem::Thm14Plus, ChannelTheorem::Thm14Minus] {
                let ex = optimize_assignment(&problem, th, SearchStrategy::Exhaustive, &cfg).unwrap();
                let ls = optimize_assignment(&problem, th, SearchStrategy::LocalSearch, &cfg).unwrap();
                prop_assert!(ls.value <= ex.value + 1e-12);
                prop_assert_eq!(ex.assignment.perms[0].clone(), (0..n).collect::<Vec<_>>());
            }
        }

        #[test]
        fn lhs_is_representation_independent(seed in any::<u64>(), n in 1usize..4) {
            let mut r = random_problem(seed, 2, 2, n);
            let ch = &r.channels[0];
            let k = r.ctx.channel(ch).unwrap();
            for _ in 0..5 {
                let u = random_unitary(n, &mut r.rng);
                let remixed = ch.remix(&u).unwrap();
                prop_assert!((r.ctx.channel(&remixed).unwrap() - k).abs() <= 1e-10);
                let problem = ChannelProblem::new(&r.ctx, &[remixed, r.channels[1].clone()]).unwrap();
                let report = channel_bounds(&problem, SearchStrategy::Exhaustive, &SearchConfig::default()).unwrap();
                prop_assert!(report.entries.iter().all(|e| e.holds));
            }
        }

        #[test]
        fn covariance_properties(seed in any::<u64>(), dim in 2usize..4, n in 1usize..4) {
            let r = random_problem(seed, dim, 2, n);
            let ops: Vec<ComplexMatrix> = r.channels.iter().flat_map(|c| c.kraus().to_vec()).collect();
            let cov = covariance_matrix(&r.ctx, &ops).unwrap();
            let spec = herm_eig(&cov.gram).unwrap();
            let size = cov.kept.len() as f64;
            prop_assert!(spec.min_eigenvalue() >= -1e-9);
            prop_assert!(spec.max_eigenvalue() >= 1.0 - 1e-9 && spec.max_eigenvalue() <= size + 1e-9);
            for i in 0..cov.kept.len() {
                prop_assert!((cov.gram.get(i, i).re - 1.0).abs() <= 1e-10);
            }
        }
    }
}
