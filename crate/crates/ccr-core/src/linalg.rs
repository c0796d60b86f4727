//! Dense complex linear algebra for small multi-qubit operators.
//!
//! Everything here is sized for operators on at most a handful of
//! qubits (dimension 32 for five), so storage is dense row-major and
//! the eigensolver is a direct self-adjoint decomposition.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{CcrError, Result};
use crate::tol;

pub type C64 = Complex<f64>;

/// Dense complex matrix, entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major slice; length must equal rows * cols.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(CcrError::Usage(format!(
                "matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries: entries.to_vec(),
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Max |a(i,j) - conj(a(j,i))| over all entry pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_defect() <= tol::HERMITIAN
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(CcrError::Usage(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// self += factor * other; dimensions must match.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, factor: C64) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CcrError::Usage(format!(
                "cannot add {}x{} into {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| factor * e).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Single-qubit Pauli operator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const NONTRIVIAL: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn symbol(self) -> char {
        match self {
            PauliLabel::I => 'I',
            PauliLabel::X => 'X',
            PauliLabel::Y => 'Y',
            PauliLabel::Z => 'Z',
        }
    }
}

/// Standard 2x2 matrix for a Pauli label.
pub fn pauli(label: PauliLabel) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let entries = match label {
        PauliLabel::I => [l, o, o, l],
        PauliLabel::X => [o, l, l, o],
        PauliLabel::Y => [o, -i, i, o],
        PauliLabel::Z => [l, o, o, -l],
    };
    ComplexMatrix {
        rows: 2,
        cols: 2,
        entries: entries.to_vec(),
    }
}

fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let f = a.get(i1, j1);
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out.set(i1 * b.rows + i2, j1 * b.cols + j2, f * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// Kronecker product of the factors, left to right.
pub fn kron(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| CcrError::Usage("kron needs at least one factor".into()))?;
    let mut acc = first.clone();
    for f in rest {
        acc = kron2(&acc, f);
    }
    Ok(acc)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; column k pairs with eigenvalues[k].
    pub eigenvectors: ComplexMatrix,
}

impl SpectralResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column k as a vector.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.eigenvectors.rows)
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }

    /// Projector onto span{v_k : k in indices}.
    pub fn eigenspace_projector(&self, indices: &[usize]) -> ComplexMatrix {
        let n = self.eigenvectors.rows;
        let mut p = ComplexMatrix::zeros(n, n);
        for &k in indices {
            let v = self.eigenvector(k);
            for i in 0..n {
                for j in 0..n {
                    let add = v[i] * v[j].conj();
                    p.set(i, j, p.get(i, j) + add);
                }
            }
        }
        p
    }
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralResult> {
    if !m.is_square() {
        return Err(CcrError::Validation(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let defect = m.hermitian_defect();
    if defect > tol::HERMITIAN {
        return Err(CcrError::Validation(format!(
            "matrix is not Hermitian: defect {defect:.3e} exceeds {:.0e}",
            tol::HERMITIAN
        )));
    }
    let n = m.rows;
    let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let eig = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, eig.eigenvectors[(row, k)]);
        }
    }
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// trace(density * op) for a Hermitian observable; the imaginary residue
/// must stay below the tolerance and is then discarded.
pub fn expectation(density: &ComplexMatrix, op: &ComplexMatrix) -> Result<f64> {
    if !density.is_square() || !op.is_square() || density.rows != op.rows {
        return Err(CcrError::Usage(format!(
            "expectation needs equal square matrices, got {}x{} and {}x{}",
            density.rows, density.cols, op.rows, op.cols
        )));
    }
    if !op.is_hermitian() {
        return Err(CcrError::Validation(
            "expectation needs a Hermitian observable".into(),
        ));
    }
    let n = density.rows;
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += density.get(i, j) * op.get(j, i);
        }
    }
    if tr.im.abs() > tol::IMAG_RESIDUE {
        return Err(CcrError::Numerical(format!(
            "expectation has imaginary residue {:.3e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_matrices_match_definitions() {
        let x = pauli(PauliLabel::X);
        assert_eq!(x.entries, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let z = pauli(PauliLabel::Z);
        assert_eq!(z.entries, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let i = pauli(PauliLabel::I);
        assert_eq!(i.entries, ComplexMatrix::identity(2).entries);
        let y = pauli(PauliLabel::Y);
        assert_eq!(y.get(0, 1), c(0., -1.));
        assert_eq!(y.get(1, 0), c(0., 1.));
    }

    #[test]
    fn nontrivial_paulis_traceless_and_self_inverse() {
        for label in PauliLabel::NONTRIVIAL {
            let p = pauli(label);
            assert_eq!(p.trace(), c(0., 0.));
            let sq = p.mul(&p).unwrap();
            assert!(sq.max_abs_diff(&ComplexMatrix::identity(2)) == 0.0);
        }
    }

    #[test]
    fn kron_single_factor_is_identity_map() {
        let x = pauli(PauliLabel::X);
        assert_eq!(kron(std::slice::from_ref(&x)).unwrap(), x);
    }

    #[test]
    fn kron_five_identities_is_identity_32() {
        let i = pauli(PauliLabel::I);
        let m = kron(&vec![i; 5]).unwrap();
        assert_eq!(m, ComplexMatrix::identity(32));
    }

    #[test]
    fn kron_zz_is_diagonal_signs() {
        let z = pauli(PauliLabel::Z);
        let m = kron(&[z.clone(), z]).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        for (i, s) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            want.set(i, i, c(*s, 0.));
        }
        assert_eq!(m, want);
    }

    #[test]
    fn kron_empty_is_usage_error() {
        assert!(matches!(kron(&[]), Err(CcrError::Usage(_))));
    }

    #[test]
    fn kron_is_associative() {
        let x = pauli(PauliLabel::X);
        let y = pauli(PauliLabel::Y);
        let z = pauli(PauliLabel::Z);
        let left = kron(&[kron(&[x.clone(), y.clone()]).unwrap(), z.clone()]).unwrap();
        let right = kron(&[x, kron(&[y, z]).unwrap()]).unwrap();
        assert!(left.max_abs_diff(&right) == 0.0);
    }

    #[test]
    fn eig_diag_and_pauli_x() {
        let mut d = ComplexMatrix::zeros(2, 2);
        d.set(0, 0, c(1., 0.));
        d.set(1, 1, c(-1., 0.));
        let r = hermitian_eig(&d).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-12);

        let r = hermitian_eig(&pauli(PauliLabel::X)).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, c(1., 0.));
        assert!(matches!(hermitian_eig(&m), Err(CcrError::Validation(_))));
    }

    #[test]
    fn eig_contract_on_a_dense_hermitian_matrix() {
        // fixed non-trivial Hermitian 4x4
        let mut m = ComplexMatrix::zeros(4, 4);
        let vals = [
            (0, 0, c(2.0, 0.0)),
            (1, 1, c(-1.0, 0.0)),
            (2, 2, c(0.5, 0.0)),
            (3, 3, c(0.0, 0.0)),
            (0, 1, c(0.3, 0.7)),
            (0, 2, c(-0.2, 0.1)),
            (1, 3, c(0.9, -0.4)),
            (2, 3, c(0.0, 1.1)),
        ];
        for (i, j, v) in vals {
            m.set(i, j, v);
            if i != j {
                m.set(j, i, v.conj());
            }
        }
        let r = hermitian_eig(&m).unwrap();
        let norm = r
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &l| a.max(l.abs()));

        // ascending order
        for k in 1..4 {
            assert!(r.eigenvalues[k] >= r.eigenvalues[k - 1]);
        }
        // eigenpair residuals
        for k in 0..4 {
            let v = r.eigenvector(k);
            let mut res = 0.0f64;
            for i in 0..4 {
                let mut mv = c(0., 0.);
                for j in 0..4 {
                    mv += m.get(i, j) * v[j];
                }
                res += (mv - v[i] * r.eigenvalues[k]).norm_sqr();
            }
            assert!(res.sqrt() <= crate::tol::EIG_RESIDUAL_REL * norm.max(1.0));
        }
        // orthonormality
        for a in 0..4 {
            for b in 0..4 {
                let va = r.eigenvector(a);
                let vb = r.eigenvector(b);
                let dot: C64 = va.iter().zip(vb.iter()).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot.norm() - want).abs() < crate::tol::ORTHONORMAL);
            }
        }
        // eigenvalue sum equals trace
        let sum: f64 = r.eigenvalues.iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-9);
        // reconstruction
        let mut rec = ComplexMatrix::zeros(4, 4);
        for k in 0..4 {
            let v = r.eigenvector(k);
            for i in 0..4 {
                for j in 0..4 {
                    let add = v[i] * v[j].conj() * r.eigenvalues[k];
                    rec.set(i, j, rec.get(i, j) + add);
                }
            }
        }
        assert!(rec.max_abs_diff(&m) < crate::tol::RECONSTRUCTION);
    }

    #[test]
    fn kron_spectrum_is_product_of_spectra() {
        for (a, b) in [
            (PauliLabel::X, PauliLabel::Z),
            (PauliLabel::Z, PauliLabel::Z),
            (PauliLabel::Y, PauliLabel::X),
        ] {
            let m = kron(&[pauli(a), pauli(b)]).unwrap();
            let mut got = hermitian_eig(&m).unwrap().eigenvalues;
            let mut want = vec![1.0 * 1.0, 1.0 * -1.0, -1.0 * 1.0, -1.0 * -1.0];
            want.sort_by(f64::total_cmp);
            got.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(want.iter()) {
                assert!((g - w).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn expectation_basics() {
        let z = pauli(PauliLabel::Z);
        let mixed = ComplexMatrix::identity(2).scaled(c(0.5, 0.));
        assert_eq!(expectation(&mixed, &z).unwrap(), 0.0);

        let mut ket0 = ComplexMatrix::zeros(2, 2);
        ket0.set(0, 0, c(1., 0.));
        assert_eq!(expectation(&ket0, &z).unwrap(), 1.0);

        let i32x = ComplexMatrix::identity(4);
        assert!(matches!(
            expectation(&ket0, &i32x),
            Err(CcrError::Usage(_))
        ));
    }

    #[test]
    fn eigenspace_projector_is_idempotent() {
        let r = hermitian_eig(&pauli(PauliLabel::X)).unwrap();
        let p = r.eigenspace_projector(&[1]);
        let pp = p.mul(&p).unwrap();
        assert!(pp.max_abs_diff(&p) < 1e-12);
        assert!((p.trace().re - 1.0).abs() < 1e-12);
    }
}
