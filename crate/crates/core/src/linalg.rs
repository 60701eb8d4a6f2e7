//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SpectraError};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false).singular_values.max()
}

/// Positive square root of a Hermitian positive semidefinite matrix, with
/// its eigen-decomposition (eigenvalues of the input clamped at zero).
pub struct HermitianRoot {
    pub root: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

pub fn hermitian_sqrt(a: &CMatrix) -> HermitianRoot {
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let n = vals.len();
    let s = DMatrix::from_diagonal(&DVector::from_iterator(n, vals.iter().map(|l| C64::new(l.sqrt(), 0.0))));
    let v = eig.eigenvectors;
    HermitianRoot {
        root: &v * s * v.adjoint(),
        eigenvalues: vals,
        eigenvectors: v,
    }
}

/// Columns of `v` whose eigenvalue exceeds `tol`, as an orthonormal basis.
pub fn range_basis(root: &HermitianRoot, tol: f64) -> CMatrix {
    let keep: Vec<usize> = (0..root.eigenvalues.len())
        .filter(|&i| root.eigenvalues[i] > tol)
        .collect();
    let cols: Vec<CVector> = keep.iter().map(|&i| root.eigenvectors.column(i).into_owned()).collect();
    if cols.is_empty() {
        CMatrix::zeros(root.eigenvectors.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralAtom {
    pub point: C64,
    pub w: f64,
}

/// Spectral measure of a (numerically) normal matrix with respect to `v`:
/// eigenvalues from a complex Schur form and weights `|⟨q_k, v⟩|²`, with
/// eigenvalues closer than `merge_tol` combined. Also returns the
/// normality defect `‖T - diag T‖` of the Schur factor.
pub fn spectral_measure(a: &CMatrix, v: &CVector, merge_tol: f64) -> Result<(Vec<SpectralAtom>, f64)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| SpectraError::InvalidMatrix("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += t[(i, j)].norm_sqr();
            }
        }
    }
    let c = q.adjoint() * v;
    let mut atoms: Vec<SpectralAtom> = Vec::new();
    for k in 0..n {
        let point = t[(k, k)];
        let w = c[k].norm_sqr();
        match atoms.iter_mut().find(|a| (a.point - point).norm() < merge_tol) {
            Some(a) => a.w += w,
            None => atoms.push(SpectralAtom { point, w }),
        }
    }
    atoms.sort_by(|x, y| x.point.arg().total_cmp(&y.point.arg()));
    Ok((atoms, off.sqrt()))
}

/// Row-major `[re, im]` nesting for JSON output.
pub fn to_rows(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(SpectraError::InvalidMatrix("ragged rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_projection_is_itself() {
        let p = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.5),
                C64::new(0.0, -0.5),
                C64::new(0.5, 0.0),
            ],
        );
        let r = hermitian_sqrt(&p);
        assert!((&r.root - &p).norm() < 1e-14);
        assert_eq!(range_basis(&r, 1e-10).ncols(), 1);
    }

    #[test]
    fn spectral_measure_of_reflection() {
        let s = 0.5f64.sqrt();
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let (atoms, off) = spectral_measure(&a, &v, 1e-10).unwrap();
        assert!(off < 1e-12);
        assert_eq!(atoms.len(), 2);
        for at in &atoms {
            assert!((at.w - s * s).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_of_diagonal() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(0.0, 2.0), C64::new(-3.0, 0.0)]));
        assert!((op_norm(&a) - 3.0).abs() < 1e-14);
    }
}
