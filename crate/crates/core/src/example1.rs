//! Qubit example with the three Pauli observables.
//!
//! At `alpha = beta = 1/2` the skew sum of `sigma_1, sigma_2, sigma_3` is
//! `2 (1 - sqrt(1 - t))`, and the gaps between the theorem 6 and theorem 3/5
//! bounds factor as `(1 - sqrt(1 - t))` times angular surfaces. This module
//! evaluates the bounds with the general operations from [`crate::obs_bounds`]
//! on a `(theta, phi)` grid and checks them against those closed forms.

use serde::Serialize;

use crate::error::{Result, SkewError};
use crate::modelzoo::{pauli, qubit_from_bloch, BlochVector};
use crate::obs_bounds::{lb_thm3, lb_thm5, lb_thm6, ObservableSet, Sign};
use crate::skew::{SkewContext, SkewParams};

pub const EQ21_TOL: f64 = 1e-10;
pub const DIFFERENCE_TOL: f64 = 1e-9;
pub const SLACK_TOL: f64 = 1e-9;

/// One grid point. Field order is the CSV column order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Example1Row {
    pub theta: f64,
    pub phi: f64,
    pub gamma_surface: f64,
    pub gamma1_surface: f64,
    pub lb0: f64,
    pub lb1: f64,
    pub lb2: f64,
    pub lb3: f64,
    pub lhs: f64,
}

pub const CSV_HEADER: [&str; 9] =
    ["theta", "phi", "gamma_surface", "gamma1_surface", "lb0", "lb1", "lb2", "lb3", "lhs"];

/// `(sigma_1, sigma_2, sigma_3)`.
pub fn pauli_set() -> ObservableSet {
    ObservableSet::new(vec![pauli(1), pauli(2), pauli(3)]).expect("Pauli matrices are Hermitian")
}

/// Shared angular pieces: `q = (xy + xz + yz) / t` and the two radical sums.
struct Angular {
    q: f64,
    minus_roots: f64,
    plus_roots: f64,
}

fn angular(theta: f64, phi: f64) -> Angular {
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let xy = s * s * sp * cp;
    let xz = s * c * cp;
    let yz = s * c * sp;
    let roots = |sign: f64| {
        (1.0 + c * c + sign * 2.0 * xy).max(0.0).sqrt()
            + (1.0 + s * s * sp * sp + sign * 2.0 * xz).max(0.0).sqrt()
            + (1.0 + s * s * cp * cp + sign * 2.0 * yz).max(0.0).sqrt()
    };
    Angular { q: xy + xz + yz, minus_roots: roots(-1.0), plus_roots: roots(1.0) }
}

/// `gamma(theta, phi)`: `(LB2 - LB0) / (1 - sqrt(1 - t))`.
pub fn gamma_surface(theta: f64, phi: f64) -> f64 {
    let a = angular(theta, phi);
    -3.0 + 2.5 * a.q + a.minus_roots * a.minus_roots / 3.0
}

/// `gamma_1(theta, phi)`: `(LB3 - LB1) / (1 - sqrt(1 - t))`.
///
/// Vanishes exactly along the directions `+-(1, 1, 1) / sqrt(3)`.
pub fn gamma1_surface(theta: f64, phi: f64) -> f64 {
    let a = angular(theta, phi);
    1.0 / 3.0 + a.q / 6.0 - a.plus_roots * a.plus_roots / 36.0
}

fn cartesian_roots(r: &BlochVector, sign: f64) -> f64 {
    let t = r.t();
    let (x, y, z) = (r.x, r.y, r.z);
    (1.0 + (z * z + sign * 2.0 * x * y) / t).sqrt()
        + (1.0 + (y * y + sign * 2.0 * x * z) / t).sqrt()
        + (1.0 + (x * x + sign * 2.0 * y * z) / t).sqrt()
}

/// Same surface written in Bloch coordinates.
pub fn gamma_cartesian(r: &BlochVector) -> f64 {
    let q = (r.x * r.y + r.x * r.z + r.y * r.z) / r.t();
    let s = cartesian_roots(r, -1.0);
    -3.0 + 2.5 * q + s * s / 3.0
}

pub fn gamma1_cartesian(r: &BlochVector) -> f64 {
    let q = (r.x * r.y + r.x * r.z + r.y * r.z) / r.t();
    let s = cartesian_roots(r, 1.0);
    1.0 / 3.0 + q / 6.0 - s * s / 36.0
}

/// `sqrt(1 - sqrt(1 - t))` times the `+` radical sum; enters the expanded LB1 and LB3.
pub fn a_plus(r: &BlochVector) -> f64 {
    (1.0 - (1.0 - r.t()).sqrt()).sqrt() * cartesian_roots(r, 1.0)
}

/// `sqrt(1 - sqrt(1 - t))` times the `-` radical sum; enters the expanded LB0 and LB2.
pub fn b_minus(r: &BlochVector) -> f64 {
    (1.0 - (1.0 - r.t()).sqrt()).sqrt() * cartesian_roots(r, -1.0)
}

/// Closed-form expansions of `(LB0, LB1, LB2, LB3)` at `alpha = beta = 1/2`.
pub fn expanded_bounds(r: &BlochVector) -> [f64; 4] {
    let t = r.t();
    let c = 1.0 - (1.0 - t).sqrt();
    let q = (r.x * r.y + r.x * r.z + r.y * r.z) / t;
    let (a, b) = (a_plus(r), b_minus(r));
    [
        c * (4.0 - 2.0 * q) - b * b / 4.0,
        2.0 / 3.0 * c * (1.0 - q) + a * a / 9.0,
        c * (1.0 + q / 2.0) + b * b / 12.0,
        c * (1.0 - q / 2.0) + a * a / 12.0,
    ]
}

/// Evaluates one grid point with the general bound operations.
pub fn example1_row(t: f64, theta: f64, phi: f64, params: SkewParams) -> Result<Example1Row> {
    let rho = qubit_from_bloch(&BlochVector::from_angles(t, theta, phi)?);
    let ctx = SkewContext::new(&rho, params)?;
    let set = pauli_set();
    let lhs = set.members().iter().map(|a| ctx.observable(a)).sum::<Result<f64>>()?;
    Ok(Example1Row {
        theta,
        phi,
        gamma_surface: gamma_surface(theta, phi),
        gamma1_surface: gamma1_surface(theta, phi),
        lb0: lb_thm3(&ctx, &set)?,
        lb1: lb_thm5(&ctx, &set)?,
        lb2: lb_thm6(&ctx, &set, Sign::Plus)?,
        lb3: lb_thm6(&ctx, &set, Sign::Minus)?,
        lhs,
    })
}

/// `n_theta x n_phi` grid with `theta_i = pi (i + 1) / (n_theta + 1)` (open interval)
/// and `phi_j = 2 pi j / n_phi` (half-open).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub t: f64,
}

impl GridSpec {
    pub fn new(n_theta: usize, n_phi: usize, t: f64) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(SkewError::BadParameter(format!(
                "grid dimensions must be >= 2, got {n_theta}x{n_phi}"
            )));
        }
        if !(t > 0.0) {
            return Err(SkewError::BadParameter("t must be positive".into()));
        }
        if t > 1.0 {
            return Err(SkewError::BadParameter(format!("t must be <= 1, got {t}")));
        }
        Ok(Self { n_theta, n_phi, t })
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_theta).map(|i| std::f64::consts::PI * (i + 1) as f64 / (self.n_theta + 1) as f64)
    }

    pub fn phis(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_phi).map(|j| 2.0 * std::f64::consts::PI * j as f64 / self.n_phi as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Violation {
    pub theta: f64,
    pub phi: f64,
    pub check: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Summary {
    pub rows: usize,
    pub t: f64,
    pub min_gamma_surface: f64,
    pub min_gamma1_surface: f64,
    /// Largest `|lhs - 2(1 - sqrt(1-t))|`; only meaningful when `identities_checked`.
    pub max_eq21_residual: f64,
    /// Largest residual of the two difference identities.
    pub max_difference_residual: f64,
    /// Smallest `lhs - lb_k` over all rows and `k`.
    pub min_slack: f64,
    /// The closed forms only hold at `alpha = beta = 1/2`.
    pub identities_checked: bool,
    pub violations: Vec<Example1Violation>,
}

impl Example1Summary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates the whole grid and checks every identity on it.
pub fn run_grid(grid: &GridSpec, params: SkewParams) -> Result<(Vec<Example1Row>, Example1Summary)> {
    let identities_checked = params.alpha == 0.5 && params.beta == 0.5;
    let c = 1.0 - (1.0 - grid.t).sqrt();
    let eq21 = 2.0 * c;
    let mut rows = Vec::with_capacity(grid.n_theta * grid.n_phi);
    let mut s = Example1Summary {
        rows: 0,
        t: grid.t,
        min_gamma_surface: f64::INFINITY,
        min_gamma1_surface: f64::INFINITY,
        max_eq21_residual: 0.0,
        max_difference_residual: 0.0,
        min_slack: f64::INFINITY,
        identities_checked,
        violations: Vec::new(),
    };
    for theta in grid.thetas() {
        for phi in grid.phis() {
            let row = example1_row(grid.t, theta, phi, params)?;
            let mut flag = |check: &str, residual: f64| {
                s.violations.push(Example1Violation { theta, phi, check: check.to_string(), residual });
            };
            if row.gamma_surface <= 0.0 {
                flag("gamma_surface > 0", row.gamma_surface);
            }
            if row.gamma1_surface <= 0.0 {
                flag("gamma1_surface > 0", row.gamma1_surface);
            }
            let slack = [row.lb0, row.lb1, row.lb2, row.lb3].iter().map(|lb| row.lhs - lb).fold(f64::INFINITY, f64::min);
            if slack < -SLACK_TOL {
                flag("lhs >= lb_k", slack);
            }
            if identities_checked {
                let r21 = (row.lhs - eq21).abs();
                if r21 > EQ21_TOL {
                    flag("sum K(sigma_k) = 2(1 - sqrt(1 - t))", r21);
                }
                let d0 = (row.lb2 - row.lb0 - c * row.gamma_surface).abs();
                let d1 = (row.lb3 - row.lb1 - c * row.gamma1_surface).abs();
                if d0 > DIFFERENCE_TOL {
                    flag("lb2 - lb0 = (1 - sqrt(1 - t)) gamma", d0);
                }
                if d1 > DIFFERENCE_TOL {
                    flag("lb3 - lb1 = (1 - sqrt(1 - t)) gamma1", d1);
                }
                s.max_eq21_residual = s.max_eq21_residual.max(r21);
                s.max_difference_residual = s.max_difference_residual.max(d0).max(d1);
            }
            s.min_gamma_surface = s.min_gamma_surface.min(row.gamma_surface);
            s.min_gamma1_surface = s.min_gamma1_surface.min(row.gamma1_surface);
            s.min_slack = s.min_slack.min(slack);
            rows.push(row);
        }
    }
    s.rows = rows.len();
    Ok((rows, s))
}
