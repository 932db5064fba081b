//! Randomized soundness audit of the observable bounds.
//!
//! Each `(dim, N)` configuration runs `trials` independent instances. An
//! instance draws its own seed from the run seed, so any failure can be
//! replayed from the recipe alone.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, SkewError};
use crate::io::MatrixFile;
use crate::matcore::{herm_eig, ComplexMatrix, DensityMatrix};
use crate::modelzoo::{random_density, random_hermitian, random_params, random_pure};
use crate::obs_bounds::{
    best_bounds, gram_matrix, lb_thm1_branches, lb_thm2_branches, lb_thm3, lb_thm4, lb_thm5, lb_thm6, lb_thm8,
    ObservableSet, Sign,
};
use crate::skew::{two_param_skew, wy_skew, SkewContext, SkewParams};

/// Relative tolerance on `lhs - bound`.
pub const SOUNDNESS_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const DOMINANCE_TOL: f64 = 1e-10;
pub const GRAM_TOL: f64 = 1e-9;
pub const WY_TOL: f64 = 1e-12;
pub const TWO_PARAM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub n_obs: Vec<usize>,
    /// Compares every bound against `-lhs`; used to prove the harness reports failures.
    #[serde(skip)]
    pub flip_sign: bool,
}

impl AuditConfig {
    pub fn new(trials: usize, seed: u64, dims: Vec<usize>, n_obs: Vec<usize>) -> Result<Self> {
        if trials == 0 {
            return Err(SkewError::BadParameter("trials must be >= 1".into()));
        }
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(SkewError::BadParameter(format!("dims must be a non-empty list of values >= 2, got {dims:?}")));
        }
        if n_obs.is_empty() || n_obs.iter().any(|&n| n < 2) {
            return Err(SkewError::BadParameter(format!(
                "n-obs must be a non-empty list of values >= 2, got {n_obs:?}"
            )));
        }
        Ok(Self { trials, seed, dims, n_obs, flip_sign: false })
    }
}

/// SplitMix64 finalizer over the run seed and instance coordinates.
pub fn instance_seed(seed: u64, dim: usize, n_obs: usize, index: usize) -> u64 {
    let mut z = seed;
    for v in [dim as u64, n_obs as u64, index as u64] {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(v);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// One randomized instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub params: SkewParams,
    pub state: DensityMatrix,
    pub observables: ObservableSet,
}

impl Instance {
    /// A quarter of the states are pure, the rest full-rank Ginibre draws.
    pub fn generate(seed: u64, dim: usize, n_obs: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng);
        let state = if rng.random_bool(0.25) { random_pure(dim, &mut rng) } else { random_density(dim, &mut rng) };
        let obs = (0..n_obs).map(|_| random_hermitian(dim, &mut rng)).collect();
        let observables = ObservableSet::new(obs).expect("random Hermitian members");
        Self { seed, params, state, observables }
    }
}

/// Everything needed to rebuild a failing instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recipe {
    pub run_seed: u64,
    pub instance_index: usize,
    pub instance_seed: u64,
    pub dim: usize,
    pub n_obs: usize,
    pub params: SkewParams,
    pub state: MatrixFile,
    pub observables: Vec<MatrixFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    /// Signed amount by which the check failed.
    pub excess: f64,
    pub recipe: Recipe,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub trials: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub n_obs: Vec<usize>,
    pub instances: usize,
    pub violations: usize,
    /// Largest `(bound - lhs) / (1 + lhs)` seen, floored at 0.
    pub max_relative_slack_deficit: f64,
    pub max_agreement_residual: f64,
    /// Number of evaluations of each check.
    pub checks: BTreeMap<String, usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub failures: Vec<Violation>,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally<'a> {
    checks: &'a mut BTreeMap<String, usize>,
    found: Vec<(String, f64)>,
}

impl Tally<'_> {
    /// Records a check that passes when `excess <= 0`.
    fn check(&mut self, name: &str, excess: f64) {
        *self.checks.entry(name.to_string()).or_default() += 1;
        if excess > 0.0 || excess.is_nan() {
            self.found.push((name.to_string(), excess));
        }
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    x / (1.0 + scale.abs())
}

/// Runs every check on one instance. Returns the failed checks and
/// `(max relative deficit, max agreement residual)`.
fn check_instance(
    inst: &Instance,
    flip_sign: bool,
    checks: &mut BTreeMap<String, usize>,
) -> Result<(Vec<(String, f64)>, f64, f64)> {
    let mut tally = Tally { checks, found: Vec::new() };
    let ctx = SkewContext::new(&inst.state, inst.params)?;
    let set = &inst.observables;
    let n = set.len();

    let mut agreement: f64 = 0.0;
    for a in set.members().iter().chain(std::iter::once(&set.total())) {
        match ctx.evaluate_observable(a) {
            Ok(v) => {
                agreement = agreement.max(v.agreement);
                tally.check("trace_norm_agreement", v.agreement - 1e-9 * (1.0 + v.value));
            }
            Err(_) => tally.check("trace_norm_agreement", f64::INFINITY),
        }
    }

    let report = best_bounds(&ctx, set)?;
    let mut deficit: f64 = 0.0;
    for (name, bound) in &report.bounds {
        let lhs = if flip_sign { -report.lhs_for(name) } else { report.lhs_for(name) };
        let d = rel(bound - lhs, lhs);
        deficit = deficit.max(d);
        tally.check(&format!("soundness_{name}"), d - SOUNDNESS_TOL);
    }

    if n > 2 {
        let t3 = lb_thm3(&ctx, set)?;
        let t8 = lb_thm8(&ctx, set, 2)?;
        tally.check("thm8_k2_equals_thm3", rel((t8 - t3).abs(), t3) - IDENTITY_TOL);
        let (eq12, _) = lb_thm2_branches(&ctx, set)?;
        tally.check("thm4_dominates_thm2", rel(eq12 - lb_thm4(&ctx, set)?, eq12) - DOMINANCE_TOL);
        let (plus, _) = lb_thm1_branches(&ctx, set)?;
        tally.check("thm3_dominates_thm1", rel(plus - t3, plus) - DOMINANCE_TOL);
    } else {
        let t5 = lb_thm5(&ctx, set)?;
        for sign in [Sign::Plus, Sign::Minus] {
            let t6 = lb_thm6(&ctx, set, sign)?;
            tally.check("thm5_equals_thm6_at_n2", rel((t5 - t6).abs(), t5) - IDENTITY_TOL);
        }
    }

    if let Ok(g) = gram_matrix(&ctx, set) {
        check_gram(&mut tally, &g)?;
    }

    let a = &set.members()[0];
    let wy = wy_skew(&inst.state, a)?;
    for gamma in [0.0, inst.params.gamma, 1.0] {
        let k = SkewContext::new(&inst.state, SkewParams::wigner_yanase(gamma)?)?.observable(a)?;
        tally.check("wy_reduction", rel((k - wy).abs(), wy) - WY_TOL);
    }
    let alpha = inst.params.alpha;
    let direct = two_param_skew(&inst.state, a, alpha, inst.params.gamma)?;
    let general = SkewContext::new(&inst.state, SkewParams::new(alpha, 1.0 - alpha, inst.params.gamma)?)?.observable(a)?;
    tally.check("two_param_reduction", rel((general - direct).abs(), direct) - TWO_PARAM_TOL);

    Ok((tally.found, deficit, agreement))
}

/// Hermitian, PSD, unit diagonal, `lambda_max in [1, size]`; each within [`GRAM_TOL`].
fn check_gram(tally: &mut Tally, g: &ComplexMatrix) -> Result<()> {
    let size = g.dim() as f64;
    tally.check("gram_hermitian", g.hermiticity_residual() - GRAM_TOL);
    let diag = (0..g.dim()).map(|i| (g.get(i, i) - 1.0).norm()).fold(0.0, f64::max);
    tally.check("gram_unit_diagonal", diag - GRAM_TOL);
    let spec = herm_eig(&g.hermitian_part())?;
    tally.check("gram_psd", -spec.min_eigenvalue() - GRAM_TOL);
    let lmax = spec.max_eigenvalue();
    tally.check("gram_lambda_max_range", (1.0 - lmax).max(lmax - size) - GRAM_TOL);
    Ok(())
}

/// Public entry point for the Gram checks on an arbitrary Gram matrix;
/// returns the names of failed properties.
pub fn gram_failures(g: &ComplexMatrix) -> Result<Vec<String>> {
    let mut checks = BTreeMap::new();
    let mut tally = Tally { checks: &mut checks, found: Vec::new() };
    check_gram(&mut tally, g)?;
    Ok(tally.found.into_iter().map(|(name, _)| name).collect())
}

fn recipe(cfg: &AuditConfig, index: usize, dim: usize, inst: &Instance) -> Recipe {
    Recipe {
        run_seed: cfg.seed,
        instance_index: index,
        instance_seed: inst.seed,
        dim,
        n_obs: inst.observables.len(),
        params: inst.params,
        state: MatrixFile::from_matrix(inst.state.matrix()),
        observables: inst.observables.members().iter().map(MatrixFile::from_matrix).collect(),
    }
}

/// Runs the audit. Configurations run on separate threads and are merged in
/// a fixed order, so the summary depends only on `cfg`.
pub fn run_audit(cfg: &AuditConfig) -> Result<AuditSummary> {
    let configs: Vec<(usize, usize)> =
        cfg.dims.iter().flat_map(|&d| cfg.n_obs.iter().map(move |&n| (d, n))).collect();

    type Partial = (BTreeMap<String, usize>, Vec<Violation>, f64, f64);
    let run_one = |(dim, n_obs): (usize, usize)| -> Result<Partial> {
        let mut checks = BTreeMap::new();
        let mut failures = Vec::new();
        let (mut deficit, mut agreement): (f64, f64) = (0.0, 0.0);
        for index in 0..cfg.trials {
            let inst = Instance::generate(instance_seed(cfg.seed, dim, n_obs, index), dim, n_obs);
            let (found, d, a) = check_instance(&inst, cfg.flip_sign, &mut checks)?;
            deficit = deficit.max(d);
            agreement = agreement.max(a);
            for (check, excess) in found {
                failures.push(Violation { check, excess, recipe: recipe(cfg, index, dim, &inst) });
            }
        }
        Ok((checks, failures, deficit, agreement))
    };

    let partials: Vec<Result<Partial>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|&c| s.spawn(move || run_one(c))).collect();
        handles.into_iter().map(|h| h.join().expect("audit worker panicked")).collect()
    });

    let mut summary = AuditSummary {
        trials: cfg.trials,
        seed: cfg.seed,
        dims: cfg.dims.clone(),
        n_obs: cfg.n_obs.clone(),
        instances: configs.len() * cfg.trials,
        violations: 0,
        max_relative_slack_deficit: 0.0,
        max_agreement_residual: 0.0,
        checks: BTreeMap::new(),
        tolerances: BTreeMap::from([
            ("soundness".to_string(), SOUNDNESS_TOL),
            ("identity".to_string(), IDENTITY_TOL),
            ("dominance".to_string(), DOMINANCE_TOL),
            ("gram".to_string(), GRAM_TOL),
            ("wy_reduction".to_string(), WY_TOL),
            ("two_param_reduction".to_string(), TWO_PARAM_TOL),
        ]),
        failures: Vec::new(),
    };
    for partial in partials {
        let (checks, failures, deficit, agreement) = partial?;
        for (k, v) in checks {
            *summary.checks.entry(k).or_default() += v;
        }
        summary.failures.extend(failures);
        summary.max_relative_slack_deficit = summary.max_relative_slack_deficit.max(deficit);
        summary.max_agreement_residual = summary.max_agreement_residual.max(agreement);
    }
    summary.violations = summary.failures.len();
    Ok(summary)
}
