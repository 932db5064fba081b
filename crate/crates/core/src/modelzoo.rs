//! States, observables and channels for fixtures and randomized audits.
//!
//! Random generators draw from [`ChaCha8Rng`], so a `(seed, spec)` pair fully
//! determines the output on every platform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chan_bounds::KrausChannel;
use crate::error::{Result, SkewError};
use crate::matcore::{ComplexMatrix, DensityMatrix};
use crate::skew::SkewParams;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix `sigma_k` for `k` in 1..=3; `k = 0` gives the identity.
///
/// # Panics
/// If `k > 3`.
pub fn pauli(k: usize) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let entries = match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [one, z, z, -one],
        _ => panic!("no Pauli matrix with index {k}"),
    };
    ComplexMatrix::from_row_major(2, entries.to_vec()).expect("2x2 Pauli")
}

/// Qubit Bloch vector with `|r| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = Self { x, y, z };
        let t = r.t();
        if !t.is_finite() || t.sqrt() > 1.0 + 1e-12 {
            return Err(SkewError::OutsideBlochBall { t });
        }
        Ok(r)
    }

    /// Spherical parametrization `sqrt(t) (sin th cos ph, sin th sin ph, cos th)`.
    pub fn from_angles(t: f64, theta: f64, phi: f64) -> Result<Self> {
        let s = t.sqrt();
        Self::new(s * theta.sin() * phi.cos(), s * theta.sin() * phi.sin(), s * theta.cos())
    }

    /// `t = |r|^2`.
    pub fn t(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// `(I + x sigma_1 + y sigma_2 + z sigma_3) / 2`.
pub fn qubit_from_bloch(r: &BlochVector) -> DensityMatrix {
    let m = &(&pauli(0) + &pauli(1).scale_real(r.x)) + &(&pauli(2).scale_real(r.y) + &pauli(3).scale_real(r.z));
    DensityMatrix::new(m.scale_real(0.5)).expect("Bloch ball states are valid")
}

/// `(Tr(rho sigma_1), Tr(rho sigma_2), Tr(rho sigma_3))`.
pub fn bloch_from_state(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(SkewError::DimMismatch { left: 2, right: rho.dim() });
    }
    let comp = |k| (rho.matrix() * &pauli(k)).trace().re;
    BlochVector::new(comp(1), comp(2), comp(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Density,
    Hermitian,
    Unitary,
    Pure,
}

/// A seeded request for one random matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub dim: usize,
    pub seed: u64,
    pub kind: RandomKind,
}

impl RandomSpec {
    pub fn new(dim: usize, seed: u64, kind: RandomKind) -> Result<Self> {
        if dim < 2 {
            return Err(SkewError::BadParameter(format!("random dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim, seed, kind })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn generate(&self) -> ComplexMatrix {
        let mut rng = self.rng();
        match self.kind {
            RandomKind::Density => random_density(self.dim, &mut rng).matrix().clone(),
            RandomKind::Pure => random_pure(self.dim, &mut rng).matrix().clone(),
            RandomKind::Hermitian => random_hermitian(self.dim, &mut rng),
            RandomKind::Unitary => random_unitary(self.dim, &mut rng),
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    // row-major fill so the stream order is independent of nalgebra's storage layout
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for col in 0..cols {
            m[(r, col)] = gaussian(rng);
        }
    }
    m
}

/// `G G^dagger / Tr(G G^dagger)` for a square Ginibre `G`: full rank almost surely.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let m = ComplexMatrix::wrap(gg / c(tr, 0.0)).hermitian_part();
    DensityMatrix::new(m).expect("Ginibre state is valid")
}

/// `|psi><psi|` for a normalized Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    let m = ComplexMatrix::outer(&psi, &psi).expect("same length").hermitian_part();
    DensityMatrix::new(m).expect("pure state is valid")
}

/// `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    ComplexMatrix::wrap((&g + g.adjoint()) * c(0.5, 0.0))
}

/// Unitary from the QR factorization of a Ginibre sample, with the phases of
/// `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    ComplexMatrix::wrap(q)
}

/// Random channel with `n` Kraus operators: blocks of the first `dim` columns of
/// a random `n*dim` unitary, so `sum E_i^dagger E_i = I` exactly up to round-off.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<KrausChannel> {
    if n == 0 || dim == 0 {
        return Err(SkewError::BadParameter("channel needs dim >= 1 and n >= 1".into()));
    }
    let u = random_unitary(dim * n, rng);
    let u = u.as_nalgebra();
    let kraus = (0..n)
        .map(|i| ComplexMatrix::wrap(u.view((i * dim, 0), (dim, dim)).into_owned()))
        .collect();
    KrausChannel::new(kraus)
}

/// Uniform draw from the valid `(alpha, beta, gamma)` domain.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> SkewParams {
    let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
    if a + b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    SkewParams::new(a, b, rng.random()).expect("reflected draw lies in the simplex")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
    BitFlip,
}

/// Textbook qubit Kraus sets.
///
/// * amplitude damping: `diag(1, sqrt(1-eta))`, `sqrt(eta) |0><1|`
/// * phase damping: `diag(1, sqrt(1-eta))`, `diag(0, sqrt(eta))`
/// * depolarizing: `sqrt(1 - 3 eta/4) I`, `sqrt(eta/4) sigma_k`
/// * bit flip: `sqrt(1-eta) I`, `sqrt(eta) sigma_1`
pub fn standard_channel(kind: ChannelKind, eta: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(SkewError::BadParameter(format!("eta must lie in [0, 1], got {eta}")));
    }
    let kraus = match kind {
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::diag(&[1.0, (1.0 - eta).sqrt()]),
            ComplexMatrix::from_real_rows(&[&[0.0, eta.sqrt()], &[0.0, 0.0]])?,
        ],
        ChannelKind::PhaseDamping => vec![
            ComplexMatrix::diag(&[1.0, (1.0 - eta).sqrt()]),
            ComplexMatrix::diag(&[0.0, eta.sqrt()]),
        ],
        ChannelKind::Depolarizing => {
            let mut ops = vec![pauli(0).scale_real((1.0 - 0.75 * eta).sqrt())];
            ops.extend((1..=3).map(|k| pauli(k).scale_real((eta / 4.0).sqrt())));
            ops
        }
        ChannelKind::BitFlip => vec![pauli(0).scale_real((1.0 - eta).sqrt()), pauli(1).scale_real(eta.sqrt())],
    };
    KrausChannel::new(kraus)
}
