//! Dense complex linear algebra over labeled tensor-product spaces.
//!
//! Operators and state vectors carry an ordered list of [`Subsystem`] labels.
//! The canonical ordering is copy-major, side-minor: A1, B1, A2, B2, ...
//! Anything that needs the A^n|B^n cut permutes explicitly through
//! [`HermitianOperator::permute_copies`] or a [`BipartiteCut`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Largest supported product dimension (desk scale only).
pub const MAX_PRODUCT_DIM: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// One tensor factor: which side it lives on, which copy it belongs to,
/// and its local dimension.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Subsystem {
    pub side: Side,
    pub copy: usize,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(side: Side, copy: usize, dim: usize) -> Self {
        Subsystem { side, copy, dim }
    }
}

pub(crate) fn product_dim(dims: &[Subsystem]) -> usize {
    dims.iter().map(|s| s.dim).product()
}

/// Row-major strides: the first subsystem is the most significant index.
fn strides(dims: &[Subsystem]) -> Vec<usize> {
    let mut st = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * dims[k + 1].dim;
    }
    st
}

fn decompose(mut idx: usize, st: &[usize]) -> Vec<usize> {
    let mut comps = Vec::with_capacity(st.len());
    for &s in st {
        comps.push(idx / s);
        idx %= s;
    }
    comps
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// A dense complex self-adjoint matrix over a labeled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<Subsystem>,
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Rejects non-square, wrong-size, non-Hermitian, or oversized input.
    pub fn new(dims: Vec<Subsystem>, mat: DMatrix<Complex64>) -> Result<Self> {
        let n = product_dim(&dims);
        if n > MAX_PRODUCT_DIM {
            return Err(Error::TooLarge(n));
        }
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, labels give product dimension {}",
                mat.nrows(),
                mat.ncols(),
                n
            )));
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianOperator { dims, mat })
    }

    pub fn identity(dims: Vec<Subsystem>) -> Result<Self> {
        let n = product_dim(&dims);
        if n > MAX_PRODUCT_DIM {
            return Err(Error::TooLarge(n));
        }
        Ok(HermitianOperator {
            dims,
            mat: DMatrix::identity(n, n),
        })
    }

    /// Projector |v><v| onto a state vector, inheriting its labels.
    pub fn projector(v: &StateVector) -> Self {
        let mat = &v.vec * v.vec.adjoint();
        HermitianOperator {
            dims: v.dims.clone(),
            mat,
        }
    }

    pub fn dims(&self) -> &[Subsystem] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Frobenius norm of the entrywise difference.
    pub fn max_entry_diff(&self, other: &HermitianOperator) -> f64 {
        let mut worst = 0.0f64;
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            let d = (a - b).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Kronecker product; the right factor's copy labels are shifted past
    /// the left factor's so that labels stay unique.
    pub fn tensor_product(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        let offset = self.dims.iter().map(|s| s.copy).max().unwrap_or(0);
        let mut dims = self.dims.clone();
        dims.extend(other.dims.iter().map(|s| Subsystem {
            side: s.side,
            copy: s.copy + offset,
            dim: s.dim,
        }));
        let n = product_dim(&dims);
        if n > MAX_PRODUCT_DIM {
            return Err(Error::TooLarge(n));
        }
        Ok(HermitianOperator {
            dims,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// n-fold tensor product with copy indices 1..n.
    pub fn tensor_power(&self, n: usize) -> Result<HermitianOperator> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor_power requires n >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor_product(self)?;
        }
        Ok(out)
    }

    /// Transpose the indices of every subsystem on the chosen side.
    pub fn partial_transpose(&self, side: Side) -> Result<HermitianOperator> {
        let positions: Vec<usize> = self
            .dims
            .iter()
            .enumerate()
            .filter(|(_, s)| s.side == side)
            .map(|(k, _)| k)
            .collect();
        if positions.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no subsystem on side {side:?}"
            )));
        }
        let st = strides(&self.dims);
        let n = self.total_dim();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for r in 0..n {
            let rc = decompose(r, &st);
            for c in 0..n {
                let cc = decompose(c, &st);
                let mut r2 = r;
                let mut c2 = c;
                for &p in &positions {
                    r2 = r2 - rc[p] * st[p] + cc[p] * st[p];
                    c2 = c2 - cc[p] * st[p] + rc[p] * st[p];
                }
                out[(r2, c2)] = self.mat[(r, c)];
            }
        }
        Ok(HermitianOperator {
            dims: self.dims.clone(),
            mat: out,
        })
    }

    /// Reorder the subsystem labels; `new_order[k]` names the old position
    /// that becomes position `k`. The entries are moved, never recomputed,
    /// so the inverse permutation restores the operator bit-exactly.
    pub fn permute_copies(&self, new_order: &[usize]) -> Result<HermitianOperator> {
        let m = self.dims.len();
        let mut seen = vec![false; m];
        if new_order.len() != m || new_order.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{new_order:?} is not a permutation of 0..{m}"
            )));
        }
        let new_dims: Vec<Subsystem> = new_order.iter().map(|&p| self.dims[p]).collect();
        let old_st = strides(&self.dims);
        let new_st = strides(&new_dims);
        let n = self.total_dim();
        // old flat index -> new flat index
        let mut map = vec![0usize; n];
        for (idx, slot) in map.iter_mut().enumerate() {
            let comps = decompose(idx, &old_st);
            *slot = new_order
                .iter()
                .enumerate()
                .map(|(k, &p)| comps[p] * new_st[k])
                .sum();
        }
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(map[r], map[c])] = self.mat[(r, c)];
            }
        }
        Ok(HermitianOperator {
            dims: new_dims,
            mat: out,
        })
    }

    /// Eigendecomposition, eigenvalues ascending, eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let se = self.mat.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let n = self.total_dim();
        let mut vecs = DMatrix::<Complex64>::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            vecs.set_column(k, &se.eigenvectors.column(i));
        }
        (vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().0[0]
    }

    /// <v|X|v>, which must be real up to a 1e-10 residue.
    pub fn expectation(&self, v: &StateVector) -> Result<f64> {
        if self.dims != v.dims {
            return Err(Error::DimensionMismatch(
                "operator and vector labels differ".into(),
            ));
        }
        let val = (v.vec.adjoint() * &self.mat * &v.vec)[(0, 0)];
        debug_assert!(val.im.abs() <= 1e-10 * (1.0 + val.re.abs()));
        Ok(val.re)
    }
}

/// A unit vector over a labeled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<Subsystem>,
    vec: DVector<Complex64>,
}

impl StateVector {
    pub fn new(dims: Vec<Subsystem>, vec: DVector<Complex64>) -> Result<Self> {
        let n = product_dim(&dims);
        if n > MAX_PRODUCT_DIM {
            return Err(Error::TooLarge(n));
        }
        if vec.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, labels give {}",
                vec.len(),
                n
            )));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "vector norm {norm} is not 1 within 1e-12"
            )));
        }
        Ok(StateVector { dims, vec })
    }

    pub fn dims(&self) -> &[Subsystem] {
        &self.dims
    }

    pub fn entries(&self) -> &DVector<Complex64> {
        &self.vec
    }

    /// Computational basis state with the given component per subsystem.
    pub fn basis(dims: Vec<Subsystem>, comps: &[usize]) -> Result<Self> {
        if comps.len() != dims.len() || comps.iter().zip(&dims).any(|(&c, s)| c >= s.dim) {
            return Err(Error::InvalidArgument("bad basis components".into()));
        }
        let st = strides(&dims);
        let idx: usize = comps.iter().zip(&st).map(|(&c, &s)| c * s).sum();
        let n = product_dim(&dims);
        let mut v = DVector::<Complex64>::zeros(n);
        v[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { dims, vec: v })
    }

    /// Schmidt decomposition across the cut: singular values descending,
    /// then the A-side and B-side orthonormal vectors.
    pub fn schmidt_decompose(
        &self,
        cut: &BipartiteCut,
    ) -> (Vec<f64>, Vec<DVector<Complex64>>, Vec<DVector<Complex64>>) {
        let mut m = DMatrix::<Complex64>::zeros(cut.a_dim, cut.b_dim);
        for a in 0..cut.a_dim {
            for b in 0..cut.b_dim {
                m[(a, b)] = self.vec[cut.global_index(a, b)];
            }
        }
        let svd = m.svd(true, true);
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let k = svd.singular_values.len();
        let values: Vec<f64> = svd.singular_values.iter().copied().collect();
        let a_basis: Vec<DVector<Complex64>> =
            (0..k).map(|i| u.column(i).clone_owned()).collect();
        // b_k[b] = (V^H)[k, b], so the reconstruction needs no extra conjugation:
        // v[(a,b)] = sum_k s_k a_k[a] b_k[b].
        let b_basis: Vec<DVector<Complex64>> =
            (0..k).map(|i| vt.row(i).transpose().clone_owned()).collect();
        (values, a_basis, b_basis)
    }

    /// Number of Schmidt coefficients above the tolerance.
    pub fn schmidt_rank(&self, cut: &BipartiteCut, tol: f64) -> usize {
        self.schmidt_decompose(cut).0.iter().filter(|&&s| s > tol).count()
    }
}

/// Partition of the subsystem labels into an A-group and a B-group, with
/// precomputed flat index maps for both groups.
#[derive(Clone, Debug)]
pub struct BipartiteCut {
    a_positions: Vec<usize>,
    b_positions: Vec<usize>,
    a_dim: usize,
    b_dim: usize,
    // global[a * b_dim + b] = flat index in the original ordering
    global: Vec<usize>,
}

impl BipartiteCut {
    pub fn new(dims: &[Subsystem], a_positions: Vec<usize>) -> Result<Self> {
        let m = dims.len();
        let mut in_a = vec![false; m];
        for &p in &a_positions {
            if p >= m || std::mem::replace(&mut in_a[p], true) {
                return Err(Error::InvalidArgument(
                    "cut positions must be distinct and in range".into(),
                ));
            }
        }
        let b_positions: Vec<usize> = (0..m).filter(|&p| !in_a[p]).collect();
        if a_positions.is_empty() || b_positions.is_empty() {
            return Err(Error::InvalidArgument("both cut groups must be nonempty".into()));
        }
        let st = strides(dims);
        let a_dims: Vec<usize> = a_positions.iter().map(|&p| dims[p].dim).collect();
        let b_dims: Vec<usize> = b_positions.iter().map(|&p| dims[p].dim).collect();
        let a_dim: usize = a_dims.iter().product();
        let b_dim: usize = b_dims.iter().product();
        let group_offsets = |positions: &[usize], group_dims: &[usize], flat: usize| -> usize {
            let mut idx = flat;
            let mut off = 0usize;
            // row-major within the group, most significant first
            let mut gst = vec![1usize; group_dims.len()];
            for k in (0..group_dims.len().saturating_sub(1)).rev() {
                gst[k] = gst[k + 1] * group_dims[k + 1];
            }
            for (k, &p) in positions.iter().enumerate() {
                let c = idx / gst[k];
                idx %= gst[k];
                off += c * st[p];
            }
            off
        };
        let mut global = vec![0usize; a_dim * b_dim];
        for a in 0..a_dim {
            let ao = group_offsets(&a_positions, &a_dims, a);
            for b in 0..b_dim {
                global[a * b_dim + b] = ao + group_offsets(&b_positions, &b_dims, b);
            }
        }
        Ok(BipartiteCut {
            a_positions,
            b_positions,
            a_dim,
            b_dim,
            global,
        })
    }

    /// The A-group collects every side-A subsystem, in label order.
    pub fn across_sides(dims: &[Subsystem]) -> Result<Self> {
        let a_positions = dims
            .iter()
            .enumerate()
            .filter(|(_, s)| s.side == Side::A)
            .map(|(k, _)| k)
            .collect();
        Self::new(dims, a_positions)
    }

    pub fn a_dim(&self) -> usize {
        self.a_dim
    }

    pub fn b_dim(&self) -> usize {
        self.b_dim
    }

    pub fn a_positions(&self) -> &[usize] {
        &self.a_positions
    }

    pub fn b_positions(&self) -> &[usize] {
        &self.b_positions
    }

    pub fn global_index(&self, a: usize, b: usize) -> usize {
        self.global[a * self.b_dim + b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, werner_pt, WernerParams};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pair(d: usize) -> Vec<Subsystem> {
        vec![
            Subsystem::new(Side::A, 1, d),
            Subsystem::new(Side::B, 1, d),
        ]
    }

    fn diag_op(vals: &[f64]) -> HermitianOperator {
        let n = vals.len();
        let mat = DMatrix::from_fn(n, n, |i, j| if i == j { c(vals[i]) } else { c(0.0) });
        HermitianOperator::new(vec![Subsystem::new(Side::A, 1, n)], mat).unwrap()
    }

    /// Swap operator V|k,l> = |l,k> on d x d.
    fn swap(d: usize) -> HermitianOperator {
        let n = d * d;
        let mat = DMatrix::from_fn(n, n, |r, c_| {
            let (k, l) = (r / d, r % d);
            let (k2, l2) = (c_ / d, c_ % d);
            if k == l2 && l == k2 { c(1.0) } else { c(0.0) }
        });
        HermitianOperator::new(pair(d), mat).unwrap()
    }

    fn max_ent_projector(d: usize) -> HermitianOperator {
        HermitianOperator::projector(&max_entangled(d).unwrap())
    }

    #[test]
    fn rejects_non_hermitian() {
        let mat = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert!(matches!(
            HermitianOperator::new(vec![Subsystem::new(Side::A, 1, 2)], mat),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn rejects_oversized() {
        let dims = vec![Subsystem::new(Side::A, 1, 5000)];
        assert!(matches!(
            HermitianOperator::identity(dims),
            Err(Error::TooLarge(5000))
        ));
    }

    #[test]
    fn tensor_product_of_identities() {
        let id3 = HermitianOperator::identity(vec![Subsystem::new(Side::A, 1, 3)]).unwrap();
        let prod = id3.tensor_product(&id3).unwrap();
        assert_eq!(prod.total_dim(), 9);
        assert_eq!(prod.matrix(), &DMatrix::<Complex64>::identity(9, 9));
    }

    #[test]
    fn tensor_product_of_diagonals() {
        let x = diag_op(&[1.0, 2.0]);
        let y = diag_op(&[3.0, 4.0]);
        let p = x.tensor_product(&y).unwrap();
        let expect = [3.0, 4.0, 6.0, 8.0];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(p.matrix()[(i, i)], c(e));
        }
    }

    #[test]
    fn tensor_product_trace_multiplicative() {
        let p3 = max_ent_projector(3);
        let pp = p3.tensor_product(&p3).unwrap();
        assert!((pp.trace() - 1.0).abs() < 1e-12);
        // copy labels got shifted
        let copies: Vec<usize> = pp.dims().iter().map(|s| s.copy).collect();
        assert_eq!(copies, vec![1, 1, 2, 2]);
    }

    #[test]
    fn tensor_power_basics() {
        let x = diag_op(&[1.0, 2.0]);
        assert_eq!(x.tensor_power(1).unwrap().matrix(), x.matrix());
        assert!(x.tensor_power(0).is_err());
        let sq = x.tensor_power(2).unwrap();
        for (i, &e) in [1.0, 2.0, 2.0, 4.0].iter().enumerate() {
            assert_eq!(sq.matrix()[(i, i)], c(e));
        }
    }

    #[test]
    fn tensor_power_trace_of_werner_pt() {
        let w = werner_pt(&WernerParams::new(3, 0.4).unwrap());
        let w2 = w.tensor_power(2).unwrap();
        assert_eq!(w2.total_dim(), 81);
        let expected = (9.0 - 3.0 * 0.4f64) * (9.0 - 3.0 * 0.4);
        assert!((w2.trace() - expected).abs() < 1e-8 * expected);
        assert!((expected - 60.84).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_identity() {
        let id = HermitianOperator::identity(pair(3)).unwrap();
        let pt = id.partial_transpose(Side::B).unwrap();
        assert_eq!(pt.matrix(), id.matrix());
    }

    #[test]
    fn partial_transpose_of_max_entangled_projector_is_swap_over_d() {
        for d in [2, 3, 4] {
            let p = max_ent_projector(d);
            let pt = p.partial_transpose(Side::B).unwrap();
            let v = swap(d);
            let mut worst = 0.0f64;
            for r in 0..d * d {
                for c_ in 0..d * d {
                    let diff = (pt.matrix()[(r, c_)] - v.matrix()[(r, c_)] / d as f64).norm();
                    worst = worst.max(diff);
                }
            }
            assert!(worst < 1e-14, "d={d}: worst={worst}");
        }
    }

    #[test]
    fn partial_transpose_of_werner_pt_is_id_minus_alpha_swap() {
        let d = 3;
        for alpha in [-1.0, -0.5, 0.0, 0.3, 0.7, 1.0] {
            let w = werner_pt(&WernerParams::new(d, alpha).unwrap());
            let rho = w.partial_transpose(Side::B).unwrap();
            let v = swap(d);
            let id = HermitianOperator::identity(pair(d)).unwrap();
            let expect = id.matrix() - v.matrix() * c(alpha);
            let mut worst = 0.0f64;
            for (a, b) in rho.matrix().iter().zip(expect.iter()) {
                worst = worst.max((a - b).norm());
            }
            assert!(worst < 1e-14);
            // Id - alpha V is PSD exactly on -1 <= alpha <= 1
            assert!(rho.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn partial_transpose_is_involutive_bit_exact() {
        let w = werner_pt(&WernerParams::new(3, 0.37).unwrap());
        let back = w
            .partial_transpose(Side::B)
            .unwrap()
            .partial_transpose(Side::B)
            .unwrap();
        assert_eq!(back.matrix(), w.matrix());
    }

    #[test]
    fn permute_identity_and_swap() {
        let x = diag_op(&[1.0, 2.0]);
        let y = diag_op(&[3.0, 4.0]);
        let xy = x.tensor_product(&y).unwrap();
        let same = xy.permute_copies(&[0, 1]).unwrap();
        assert_eq!(same.matrix(), xy.matrix());
        let yx = xy.permute_copies(&[1, 0]).unwrap();
        let expect = y.tensor_product(&x).unwrap();
        assert_eq!(yx.matrix(), expect.matrix());
        assert!(xy.permute_copies(&[0, 0]).is_err());
        assert!(xy.permute_copies(&[0]).is_err());
    }

    #[test]
    fn permute_preserves_spectrum_and_inverts_bit_exact() {
        let w = werner_pt(&WernerParams::new(3, 0.41).unwrap());
        let w2 = w.tensor_power(2).unwrap();
        // A1,B1,A2,B2 -> A1,A2,B1,B2
        let perm = [0usize, 2, 1, 3];
        let p = w2.permute_copies(&perm).unwrap();
        // inverse of [0,2,1,3] is itself
        let back = p.permute_copies(&perm).unwrap();
        assert_eq!(back.matrix(), w2.matrix());
        let (mut ev1, _) = w2.eigh();
        let (mut ev2, _) = p.eigh();
        ev1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ev1.iter().zip(ev2.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn eigh_diag() {
        let x = diag_op(&[3.0, 1.0, 2.0]);
        let (vals, _) = x.eigh();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigh_swap_spectrum() {
        let v = swap(3);
        let (vals, _) = v.eigh();
        let neg = vals.iter().filter(|&&x| (x + 1.0).abs() < 1e-10).count();
        let pos = vals.iter().filter(|&&x| (x - 1.0).abs() < 1e-10).count();
        assert_eq!((neg, pos), (3, 6));
    }

    #[test]
    fn eigh_residuals_and_orthonormality() {
        let w = werner_pt(&WernerParams::new(3, 0.45).unwrap());
        let (vals, vecs) = w.eigh();
        let norm = w.matrix().norm();
        for k in 0..w.total_dim() {
            let v = vecs.column(k);
            let residual = (w.matrix() * v - v * c(vals[k])).norm();
            assert!(residual <= 1e-9 * norm);
        }
        let gram = vecs.adjoint() * &vecs;
        let id = DMatrix::<Complex64>::identity(9, 9);
        assert!((gram - id).norm() < 1e-9);
    }

    #[test]
    fn correlated_block_spectrum_matches_ppt_boundary() {
        // block of werner_pt at d=3 is I - alpha J with eigenvalues {1-3a, 1, 1}
        let d = 3;
        for alpha in [0.2, 1.0 / 3.0, 0.4] {
            let w = werner_pt(&WernerParams::new(d, alpha).unwrap());
            let min = w.min_eigenvalue();
            assert!((min - (1.0 - 3.0 * alpha).min(1.0)).abs() < 1e-10);
            if alpha > 1.0 / 3.0 {
                assert!(min < 0.0);
            } else {
                assert!(min > -1e-10);
            }
        }
    }

    #[test]
    fn schmidt_of_max_entangled() {
        let v = max_entangled(3).unwrap();
        let cut = BipartiteCut::across_sides(v.dims()).unwrap();
        let (s, _, _) = v.schmidt_decompose(&cut);
        for &x in &s {
            assert!((x - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
        }
        let sq: f64 = s.iter().map(|x| x * x).sum();
        assert!((sq - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_of_product_state() {
        let dims = pair(3);
        let v = StateVector::basis(dims, &[0, 1]).unwrap();
        let cut = BipartiteCut::across_sides(v.dims()).unwrap();
        assert_eq!(v.schmidt_rank(&cut, 1e-8), 1);
    }

    #[test]
    fn schmidt_of_rank2_state_and_reconstruction() {
        let dims = pair(3);
        let mut entries = DVector::<Complex64>::zeros(9);
        entries[0] = c(1.0 / 2.0f64.sqrt()); // |11>
        entries[4] = c(1.0 / 2.0f64.sqrt()); // |22>
        let v = StateVector::new(dims, entries).unwrap();
        let cut = BipartiteCut::across_sides(v.dims()).unwrap();
        let (s, a, b) = v.schmidt_decompose(&cut);
        assert!((s[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((s[1] - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        // reconstruction
        let mut recon = DVector::<Complex64>::zeros(9);
        for k in 0..s.len() {
            for ai in 0..3 {
                for bi in 0..3 {
                    recon[cut.global_index(ai, bi)] += c(s[k]) * a[k][ai] * b[k][bi];
                }
            }
        }
        assert!((recon - v.entries()).norm() < 1e-10);
    }

    #[test]
    fn expectation_examples() {
        let id = HermitianOperator::identity(pair(3)).unwrap();
        let psi = max_entangled(3).unwrap();
        assert!((id.expectation(&psi).unwrap() - 1.0).abs() < 1e-12);
        for alpha in [0.2, 0.5, 0.8] {
            let w = werner_pt(&WernerParams::new(3, alpha).unwrap());
            let got = w.expectation(&psi).unwrap();
            assert!((got - (1.0 - 3.0 * alpha)).abs() < 1e-12);
            // (|11> + |22>)/sqrt(2)
            let mut entries = DVector::<Complex64>::zeros(9);
            entries[0] = c(1.0 / 2.0f64.sqrt());
            entries[4] = c(1.0 / 2.0f64.sqrt());
            let v = StateVector::new(pair(3), entries).unwrap();
            assert!((w.expectation(&v).unwrap() - (1.0 - 2.0 * alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_dim_mismatch() {
        let id = HermitianOperator::identity(pair(2)).unwrap();
        let psi = max_entangled(3).unwrap();
        assert!(id.expectation(&psi).is_err());
    }

    #[test]
    fn state_vector_rejects_unnormalized() {
        let mut v = DVector::<Complex64>::zeros(9);
        v[0] = c(0.9);
        assert!(StateVector::new(pair(3), v).is_err());
    }
}
