//! State families: the one-parameter Werner family and the general
//! diagonally-invariant partial-transpose family (the twelve-parameter
//! family in 3x3, defined here for every d >= 2).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{HermitianOperator, Side, StateVector, Subsystem};
use crate::{Error, Result};

/// Threshold below which a correlated-block eigenvalue counts as negative.
pub const NPPT_EIG_TOL: f64 = 1e-10;

fn one_copy_dims(d: usize) -> Vec<Subsystem> {
    vec![
        Subsystem::new(Side::A, 1, d),
        Subsystem::new(Side::B, 1, d),
    ]
}

/// |Psi> = (1/sqrt d) sum_k |k,k>.
pub fn max_entangled(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::InvalidArgument("max_entangled requires d >= 2".into()));
    }
    let mut v = DVector::<Complex64>::zeros(d * d);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        v[k * d + k] = amp;
    }
    StateVector::new(one_copy_dims(d), v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerParams {
    d: usize,
    alpha: f64,
}

impl WernerParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("Werner family requires d >= 2".into()));
        }
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} outside [-1, 1]"
            )));
        }
        Ok(WernerParams { d, alpha })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WernerRegion {
    PptSeparable,
    NpptOneCopyUndistillable,
    NpptOneCopyDistillable,
}

impl std::fmt::Display for WernerRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WernerRegion::PptSeparable => "PPT_SEPARABLE",
            WernerRegion::NpptOneCopyUndistillable => "NPPT_ONE_COPY_UNDISTILLABLE",
            WernerRegion::NpptOneCopyDistillable => "NPPT_ONE_COPY_DISTILLABLE",
        };
        f.write_str(s)
    }
}

/// Region boundaries sit at alpha = 1/d (closed on the PPT side) and
/// alpha = 1/2 (closed on the undistillable side).
pub fn classify_werner(p: &WernerParams) -> WernerRegion {
    if p.alpha <= 1.0 / p.d as f64 {
        WernerRegion::PptSeparable
    } else if p.alpha <= 0.5 {
        WernerRegion::NpptOneCopyUndistillable
    } else {
        WernerRegion::NpptOneCopyDistillable
    }
}

/// The Werner partial transpose Id - d*alpha*P, built entrywise exactly:
/// <ii|W|ii> = 1-alpha, <ij|W|ij> = 1 (i != j), <ii|W|jj> = -alpha.
pub fn werner_pt(p: &WernerParams) -> HermitianOperator {
    let d = p.d;
    let n = d * d;
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let idx = i * d + j;
            mat[(idx, idx)] = Complex64::new(if i == j { 1.0 - p.alpha } else { 1.0 }, 0.0);
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                mat[(i * d + i, j * d + j)] = Complex64::new(-p.alpha, 0.0);
            }
        }
    }
    HermitianOperator::new(one_copy_dims(d), mat).expect("construction is Hermitian")
}

/// The Werner state itself, Id - alpha*V, obtained as the partial
/// transpose of `werner_pt`.
pub fn werner_state(p: &WernerParams) -> HermitianOperator {
    werner_pt(p)
        .partial_transpose(Side::B)
        .expect("one-copy operator has a B side")
}

/// Which predicates a sampled family member must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub valid: bool,
    pub nppt: bool,
    pub two_positive: bool,
}

impl ConstraintSet {
    pub fn parse(names: &[String]) -> Result<Self> {
        let mut cs = ConstraintSet::default();
        for name in names {
            match name.as_str() {
                "valid" => cs.valid = true,
                "nppt" => cs.nppt = true,
                "two_positive" | "two-positive" => cs.two_positive = true,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown constraint {other:?}"
                    )))
                }
            }
        }
        Ok(cs)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    d: usize,
    rho: Vec<f64>,
    z: Vec<ZEntry>,
}

#[derive(Serialize, Deserialize)]
struct ZEntry {
    i: usize,
    j: usize,
    re: f64,
    im: f64,
}

/// Parameters of the diagonally-invariant partial transpose: real weights
/// rho_ij on the basis states |i,j> plus the correlated block acting on
/// span{|i,i>} with off-diagonal entries -z_ij.
///
/// Indices are 0-based; `z` holds z_ij for i < j, with z_ji = conj(z_ij).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct DiagonalInvariantPT {
    d: usize,
    rho: Vec<f64>,
    z: Vec<Complex64>,
}

impl TryFrom<FamilyJson> for DiagonalInvariantPT {
    type Error = Error;

    fn try_from(j: FamilyJson) -> Result<Self> {
        let mut z = vec![Complex64::new(0.0, 0.0); j.d.saturating_sub(1) * j.d / 2];
        for e in &j.z {
            if e.i >= e.j || e.j >= j.d {
                return Err(Error::InvalidArgument(format!(
                    "z entry ({}, {}) out of range for d = {}",
                    e.i, e.j, j.d
                )));
            }
            z[upper_index(j.d, e.i, e.j)] = Complex64::new(e.re, e.im);
        }
        DiagonalInvariantPT::new(j.d, j.rho, z)
    }
}

impl From<DiagonalInvariantPT> for FamilyJson {
    fn from(fp: DiagonalInvariantPT) -> FamilyJson {
        let mut z = Vec::new();
        for i in 0..fp.d {
            for j in (i + 1)..fp.d {
                let v = fp.z[upper_index(fp.d, i, j)];
                z.push(ZEntry {
                    i,
                    j,
                    re: v.re,
                    im: v.im,
                });
            }
        }
        FamilyJson {
            d: fp.d,
            rho: fp.rho,
            z,
        }
    }
}

fn upper_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

impl DiagonalInvariantPT {
    pub fn new(d: usize, rho: Vec<f64>, z: Vec<Complex64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("family requires d >= 2".into()));
        }
        if rho.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "rho has {} entries, expected {}",
                rho.len(),
                d * d
            )));
        }
        if z.len() != d * (d - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "z has {} entries, expected {}",
                z.len(),
                d * (d - 1) / 2
            )));
        }
        if rho.iter().any(|x| !x.is_finite())
            || z.iter().any(|x| !x.re.is_finite() || !x.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite parameter".into()));
        }
        Ok(DiagonalInvariantPT { d, rho, z })
    }

    /// Werner embedding: rho_ii = 1-alpha, rho_ij = 1, z_ij = alpha.
    pub fn werner_embedding(d: usize, alpha: f64) -> Result<Self> {
        let mut rho = vec![1.0; d * d];
        for i in 0..d {
            rho[i * d + i] = 1.0 - alpha;
        }
        let z = vec![Complex64::new(alpha, 0.0); d * (d - 1) / 2];
        DiagonalInvariantPT::new(d, rho, z)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.d + j]
    }

    /// z_ij for i != j; below the diagonal this is conj(z_ji).
    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        if i < j {
            self.z[upper_index(self.d, i, j)]
        } else {
            self.z[upper_index(self.d, j, i)].conj()
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho.iter().sum()
    }

    pub fn normalized(&self) -> Self {
        let t = self.trace();
        DiagonalInvariantPT {
            d: self.d,
            rho: self.rho.iter().map(|x| x / t).collect(),
            z: self.z.iter().map(|x| x / t).collect(),
        }
    }

    /// The d x d block acting on span{|i,i>}: M_ii = rho_ii, M_ij = -z_ij.
    /// For d = 3 this is the 3x3 NPPT submatrix acting on span{|ii>}.
    pub fn corr_block(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.d, self.d, |i, j| {
            if i == j {
                Complex64::new(self.rho(i, i), 0.0)
            } else {
                -self.z(i, j)
            }
        })
    }

    /// Assemble the full d^2 x d^2 invariant operator.
    pub fn family_pt(&self) -> HermitianOperator {
        let d = self.d;
        let n = d * d;
        let mut mat = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                mat[(i * d + j, i * d + j)] = Complex64::new(self.rho(i, j), 0.0);
            }
        }
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    mat[(i * d + i, j * d + j)] = -self.z(i, j);
                }
            }
        }
        HermitianOperator::new(one_copy_dims(d), mat).expect("block structure is Hermitian")
    }

    /// PSD of the reconstructed state: all rho_ij >= 0 and
    /// rho_ij * rho_ji >= |z_ij|^2 for every i != j.
    pub fn is_valid_state(&self) -> (bool, Vec<String>) {
        let mut violated = Vec::new();
        for i in 0..self.d {
            for j in 0..self.d {
                if self.rho(i, j) < 0.0 {
                    violated.push(format!("rho_{}{} >= 0", i + 1, j + 1));
                }
            }
        }
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                if self.rho(i, j) * self.rho(j, i) < self.z(i, j).norm_sqr() {
                    violated.push(format!(
                        "rho_{i1}{j1} rho_{j1}{i1} >= |z_{i1}{j1}|^2",
                        i1 = i + 1,
                        j1 = j + 1
                    ));
                }
            }
        }
        (violated.is_empty(), violated)
    }

    /// True iff the correlated block has an eigenvalue below -1e-10.
    /// Given validity, the diagonal part never contributes negativity.
    pub fn is_nppt(&self) -> bool {
        let block = self.corr_block();
        let eigs = block.symmetric_eigen().eigenvalues;
        eigs.iter().any(|&x| x < -NPPT_EIG_TOL)
    }

    /// rho_ii * rho_jj >= |z_ij|^2 for all i < j, with nonnegative weights.
    pub fn two_positive(&self) -> bool {
        if self.rho.iter().any(|&x| x < 0.0) {
            return false;
        }
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                if self.rho(i, i) * self.rho(j, j) < self.z(i, j).norm_sqr() {
                    return false;
                }
            }
        }
        true
    }

    /// Local phase change: z_ij -> z_ij * exp(i(phi_i - phi_j)).
    pub fn gauge_transform(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for d = {}",
                phases.len(),
                self.d
            )));
        }
        let mut z = self.z.clone();
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                let phase = Complex64::from_polar(1.0, phases[i] - phases[j]);
                z[upper_index(self.d, i, j)] *= phase;
            }
        }
        Ok(DiagonalInvariantPT {
            d: self.d,
            rho: self.rho.clone(),
            z,
        })
    }

    /// arg of the product of z around the cycle 1 -> 2 -> ... -> d -> 1;
    /// for d = 3 this is arg(z_12 z_23 z_31), the gauge invariant.
    pub fn cyclic_phase(&self) -> f64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..self.d {
            prod *= self.z(i, (i + 1) % self.d);
        }
        prod.arg()
    }

    /// Rejection sampler: uniform weights in [0, 1), z with modulus uniform
    /// in [0, sqrt(rho_ij rho_ji)] and uniform phase, normalized to unit
    /// trace. Deterministic given the seed.
    pub fn sample(d: usize, seed: u64, constraints: ConstraintSet) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample_with_rng(d, &mut rng, constraints)
    }

    pub fn sample_with_rng(
        d: usize,
        rng: &mut ChaCha8Rng,
        constraints: ConstraintSet,
    ) -> Result<Self> {
        const BUDGET: usize = 100_000;
        for _ in 0..BUDGET {
            let rho: Vec<f64> = (0..d * d).map(|_| rng.random::<f64>()).collect();
            let mut z = Vec::with_capacity(d * (d - 1) / 2);
            for i in 0..d {
                for j in (i + 1)..d {
                    let bound = (rho[i * d + j] * rho[j * d + i]).sqrt();
                    let modulus = rng.random::<f64>() * bound;
                    let phase = rng.random::<f64>() * std::f64::consts::TAU;
                    z.push(Complex64::from_polar(modulus, phase));
                }
            }
            let fp = DiagonalInvariantPT { d, rho, z }.normalized();
            if constraints.valid && !fp.is_valid_state().0 {
                continue;
            }
            if constraints.nppt && !fp.is_nppt() {
                continue;
            }
            if constraints.two_positive && !fp.two_positive() {
                continue;
            }
            return Ok(fp);
        }
        Err(Error::SamplerExhausted(BUDGET))
    }
}
