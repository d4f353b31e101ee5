//! The diagonal twirl (group average over U_theta (x) U_theta*) as an
//! exact pinching map, its n-copy extension, a discrete-grid oracle for
//! it, and the full isotropic twirl.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{HermitianOperator, Side, Subsystem};
use crate::states::max_entangled;
use crate::{Error, Result};

/// Positions of the copy pairs, after validating the A,B,A,B,... layout
/// with equal local dimensions inside each pair.
fn copy_pairs(dims: &[Subsystem]) -> Result<Vec<(usize, usize)>> {
    if dims.is_empty() || dims.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(
            "expected an even number of subsystems (copy pairs)".into(),
        ));
    }
    let mut pairs = Vec::with_capacity(dims.len() / 2);
    for m in 0..dims.len() / 2 {
        let a = dims[2 * m];
        let b = dims[2 * m + 1];
        if a.side != Side::A || b.side != Side::B || a.copy != b.copy {
            return Err(Error::DimensionMismatch(
                "expected alternating A,B subsystems paired by copy".into(),
            ));
        }
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(format!(
                "copy {} has unequal local dimensions {} and {}",
                a.copy, a.dim, b.dim
            )));
        }
        pairs.push((2 * m, 2 * m + 1));
    }
    Ok(pairs)
}

fn multi_strides(dims: &[Subsystem]) -> Vec<usize> {
    let mut st = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * dims[k + 1].dim;
    }
    st
}

fn components(mut idx: usize, st: &[usize]) -> Vec<usize> {
    st.iter()
        .map(|&s| {
            let c = idx / s;
            idx %= s;
            c
        })
        .collect()
}

/// Pinching over one copy pair: the entry <ij|X|kl> survives iff
/// (i = k and j = l) or (i = j and k = l).
pub fn diagonal_twirl(x: &HermitianOperator) -> Result<HermitianOperator> {
    if x.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "diagonal_twirl expects a single copy pair".into(),
        ));
    }
    n_copy_diagonal_twirl(x)
}

/// Pinching applied independently in each copy slot: an entry survives iff
/// the single-copy survival rule holds for every copy.
pub fn n_copy_diagonal_twirl(x: &HermitianOperator) -> Result<HermitianOperator> {
    let pairs = copy_pairs(x.dims())?;
    let st = multi_strides(x.dims());
    let n = x.total_dim();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for r in 0..n {
        let rc = components(r, &st);
        'col: for c in 0..n {
            let cc = components(c, &st);
            for &(pa, pb) in &pairs {
                let (i, j, k, l) = (rc[pa], rc[pb], cc[pa], cc[pb]);
                let survives = (i == k && j == l) || (i == j && k == l);
                if !survives {
                    continue 'col;
                }
            }
            mat[(r, c)] = x.matrix()[(r, c)];
        }
    }
    HermitianOperator::new(x.dims().to_vec(), mat)
}

/// Discrete-grid average of U_theta (x) U_theta* conjugations with each
/// angle on the q-point grid {2 pi t / q}. Every phase exponent carries
/// per-angle integer coefficients in {-2,...,2}, so for q >= 5 the grid
/// average equals the continuous average exactly.
///
/// The average factorizes over the independent angles, so each entry is
/// scaled by a product of d numerically summed geometric phase factors.
pub fn diagonal_twirl_oracle(x: &HermitianOperator, q: usize) -> Result<HermitianOperator> {
    if q < 5 {
        return Err(Error::InvalidArgument(format!(
            "grid size q = {q} < 5 would alias nonzero exponents"
        )));
    }
    if x.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "diagonal_twirl_oracle expects a single copy pair".into(),
        ));
    }
    copy_pairs(x.dims())?;
    let d = x.dims()[0].dim;
    // grid_factor[c+4]: (1/q) sum_t exp(2 pi i t c / q) for c in -4..=4;
    // per-entry coefficients stay in -2..=2 but products never need more.
    let grid_factor = |c: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..q {
            let angle = std::f64::consts::TAU * (t as f64) * (c as f64) / (q as f64);
            acc += Complex64::from_polar(1.0, angle);
        }
        acc / q as f64
    };
    let factors: Vec<Complex64> = (-2i64..=2).map(grid_factor).collect();
    let factor = |c: i64| factors[(c + 2) as usize];
    let n = x.total_dim();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for r in 0..n {
        let (i, j) = (r / d, r % d);
        for c in 0..n {
            let (k, l) = (c / d, c % d);
            let mut weight = Complex64::new(1.0, 0.0);
            for m in 0..d {
                let coeff = (m == i) as i64 - (m == j) as i64 - (m == k) as i64 + (m == l) as i64;
                weight *= factor(coeff);
            }
            mat[(r, c)] = x.matrix()[(r, c)] * weight;
        }
    }
    // Tiny imaginary residue from the trig sums can break the strict
    // Hermiticity gate, so symmetrize the roundoff away explicitly.
    let sym = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(x.dims().to_vec(), sym)
}

/// Projection onto span{Id, P}: the average over the full local group
/// U(d) (x) U(d)*.
pub fn isotropic_twirl(x: &HermitianOperator) -> Result<HermitianOperator> {
    if x.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "isotropic_twirl expects a single copy pair".into(),
        ));
    }
    copy_pairs(x.dims())?;
    let d = x.dims()[0].dim;
    let psi = max_entangled(d)?;
    let tr = x.trace();
    let tr_xp = x.expectation(&psi)?;
    let denom = (d * d - 1) as f64;
    let a = (tr - tr_xp) / denom;
    let b = ((d * d) as f64 * tr_xp - tr) / denom;
    let p = HermitianOperator::projector(&psi);
    let mat = DMatrix::<Complex64>::identity(d * d, d * d) * Complex64::new(a, 0.0)
        + p.matrix() * Complex64::new(b, 0.0);
    HermitianOperator::new(x.dims().to_vec(), mat)
}

/// Random Hermitian operator with entries of order one; test and harness
/// plumbing.
pub fn random_hermitian(
    dims: Vec<Subsystem>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<HermitianOperator> {
    use rand::Rng;
    let n: usize = dims.iter().map(|s| s.dim).product();
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(dims, h)
}
