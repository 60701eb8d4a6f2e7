//! Matrix contractions, their defect spaces and characteristic functions.

use nalgebra::LU;
use num_complex::Complex64 as C64;

use crate::error::{Result, SpectraError};
use crate::linalg::{hermitian_sqrt, op_norm, range_basis, CMatrix};

/// Allowed excess of `‖U‖` over 1.
pub const NORM_SLACK: f64 = 1e-12;
/// Eigenvalues of `I - U*U` above this span the defect space.
pub const DEFECT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ContractionMatrix {
    u: CMatrix,
    d: CMatrix,
    d_star: CMatrix,
    /// Orthonormal basis of the range of `D`.
    e: CMatrix,
    /// Orthonormal basis of the range of `D_*`.
    e_star: CMatrix,
}

impl ContractionMatrix {
    pub fn new(u: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(SpectraError::InvalidMatrix(
                "contraction must be a nonempty square matrix".into(),
            ));
        }
        if u.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(SpectraError::InvalidMatrix("non-finite entry".into()));
        }
        let norm = op_norm(&u);
        if norm > 1.0 + NORM_SLACK {
            return Err(SpectraError::InvalidMatrix(format!("spectral norm {norm} exceeds 1")));
        }
        let n = u.nrows();
        let id = CMatrix::identity(n, n);
        let dr = hermitian_sqrt(&(&id - u.adjoint() * &u));
        let dsr = hermitian_sqrt(&(&id - &u * u.adjoint()));
        let e = range_basis(&dr, DEFECT_TOL);
        let e_star = range_basis(&dsr, DEFECT_TOL);
        if e.ncols() == 0 || e_star.ncols() == 0 {
            return Err(SpectraError::NotProperContraction);
        }
        Ok(Self {
            u,
            d: dr.root,
            d_star: dsr.root,
            e,
            e_star,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `D = (I - U*U)^{1/2}`.
    pub fn defect(&self) -> &CMatrix {
        &self.d
    }

    /// `D_* = (I - UU*)^{1/2}`.
    pub fn defect_star(&self) -> &CMatrix {
        &self.d_star
    }

    pub fn defect_basis(&self) -> &CMatrix {
        &self.e
    }

    pub fn defect_star_basis(&self) -> &CMatrix {
        &self.e_star
    }

    /// `(rank D, rank D_*)`.
    pub fn defect_ranks(&self) -> (usize, usize) {
        (self.e.ncols(), self.e_star.ncols())
    }

    /// `Θ(z) = -U + zD_*(I - zU*)⁻¹D` as a map from the range of `D` to the
    /// range of `D_*`, for `|z| < 1`.
    pub fn characteristic(&self, z: C64) -> Result<CMatrix> {
        if !(z.norm() < 1.0) {
            return Err(SpectraError::OnCircle);
        }
        self.characteristic_any(z)
    }

    /// Same expression at any `z` where the resolvent exists (boundary
    /// values in particular).
    pub fn characteristic_any(&self, z: C64) -> Result<CMatrix> {
        let n = self.dim();
        let r = CMatrix::identity(n, n) - self.u.adjoint() * z;
        let lu = LU::new(r);
        let min_pivot = {
            let (_, l_u) = (lu.p(), lu.u());
            (0..n).map(|i| l_u[(i, i)].norm()).fold(f64::INFINITY, f64::min)
        };
        if !(min_pivot > 1e-14) {
            return Err(SpectraError::ResolventFailure);
        }
        let sol = lu.solve(&self.d).ok_or(SpectraError::ResolventFailure)?;
        let full = -&self.u + (&self.d_star * sol) * z;
        Ok(self.e_star.adjoint() * full * &self.e)
    }
}

/// `Θ(z)` for the contraction `U`.
pub fn characteristic_of_contraction(u: &ContractionMatrix, z: C64) -> Result<CMatrix> {
    u.characteristic(z)
}

/// `N × N` nilpotent Jordan block: `e_k ↦ e_{k+1}`.
pub fn truncated_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
