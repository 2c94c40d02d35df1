//! Closed-form output-weight solvers.
//!
//! The ridge problem `min ½‖B‖² + (C/2)‖T − HB‖²` has the stationarity
//! condition `B − C·Hᵀ(T − HB) = 0`. Depending on the shape of `H`
//! (`N × n_h`) it is solved either through the `n_h × n_h` system
//! `(HᵀH + I/C) B = HᵀT` or, with `B = Hᵀα`, through the `N × N` system
//! `(HHᵀ + I/C) α = T`. Neither path forms an explicit inverse. When the
//! regularized system is singular in floating point (duplicate samples at
//! very large `C`), the solution is taken from the SVD of `H` instead.

use nalgebra::{DMatrix, SVD};

use crate::error::{Error, Result};
use crate::matrix::{dims, ensure_finite};

/// Singular values below this make the Procrustes solution non-unique.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Cholesky factorization of the regularized Gram matrix.
    Cholesky,
    /// Full-pivot LU, used when Cholesky breaks down numerically.
    PivotedLu,
    /// Spectral filter `σ / (σ² + 1/C)` on the SVD of `H`; last resort.
    Svd,
    /// SVD-based nearest orthogonal matrix.
    Procrustes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub method: SolveMethod,
    /// Smallest singular value of `HᵀT` (Procrustes only).
    pub min_singular_value: Option<f64>,
    /// Set when the minimizer is not unique.
    pub non_unique: bool,
}

/// Output weights `B` (`n_h × q`) plus how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputWeights {
    pub matrix: DMatrix<f64>,
    pub diagnostics: SolveDiagnostics,
}

impl OutputWeights {
    /// Wraps externally supplied weights.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            diagnostics: SolveDiagnostics {
                method: SolveMethod::Cholesky,
                min_singular_value: None,
                non_unique: false,
            },
        }
    }
}

fn validate(h: &DMatrix<f64>, t: &DMatrix<f64>, c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "regularization C must be finite and > 0, got {c}"
        )));
    }
    if h.nrows() != t.nrows() {
        return Err(Error::shape(
            "ridge targets",
            format!("{} rows", h.nrows()),
            dims(t),
        ));
    }
    if h.is_empty() || t.ncols() == 0 {
        return Err(Error::shape("ridge inputs", "non-empty H and T", dims(h)));
    }
    ensure_finite(h, "H")?;
    ensure_finite(t, "T")
}

/// Solves `A X = rhs` for symmetric positive-definite `A`.
fn spd_solve(a: DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<(DMatrix<f64>, SolveMethod)> {
    if let Some(chol) = a.clone().cholesky() {
        let x = chol.solve(rhs);
        if x.iter().all(|v| v.is_finite()) {
            return Ok((x, SolveMethod::Cholesky));
        }
    }
    let x = a
        .full_piv_lu()
        .solve(rhs)
        .ok_or_else(|| Error::Numeric("regularized system is singular".into()))?;
    ensure_finite(&x, "ridge solution")
        .map_err(|_| Error::Numeric("ridge solution overflowed".into()))?;
    Ok((x, SolveMethod::PivotedLu))
}

fn add_ridge(mut a: DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let r = 1.0 / c;
    for i in 0..a.nrows() {
        a[(i, i)] += r;
    }
    a
}

fn ridge_weights(matrix: DMatrix<f64>, method: SolveMethod) -> OutputWeights {
    OutputWeights {
        matrix,
        diagnostics: SolveDiagnostics {
            method,
            min_singular_value: None,
            non_unique: false,
        },
    }
}

/// `B = V diag(σ / (σ² + 1/C)) Uᵀ T` from the thin SVD `H = UΣVᵀ`.
fn svd_ridge(h: &DMatrix<f64>, t: &DMatrix<f64>, c: f64) -> Result<OutputWeights> {
    let svd = SVD::try_new(h.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Numeric("SVD returned no singular vectors".into()));
    };
    let r = 1.0 / c;
    let mut projected = u.tr_mul(t);
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        let filter = if sigma == 0.0 {
            0.0
        } else {
            sigma / (sigma * sigma + r)
        };
        projected.row_mut(i).scale_mut(filter);
    }
    let b = v_t.tr_mul(&projected);
    ensure_finite(&b, "ridge solution")
        .map_err(|_| Error::Numeric("ridge solution overflowed".into()))?;
    Ok(ridge_weights(b, SolveMethod::Svd))
}

/// `B = (HᵀH + I/C)⁻¹ HᵀT`, the natural form when `N ≥ n_h`.
pub fn solve_ridge_overdetermined(
    h: &DMatrix<f64>,
    t: &DMatrix<f64>,
    c: f64,
) -> Result<OutputWeights> {
    validate(h, t, c)?;
    let gram = add_ridge(h.tr_mul(h), c);
    let rhs = h.tr_mul(t);
    match spd_solve(gram, &rhs) {
        Ok((b, method)) => Ok(ridge_weights(b, method)),
        Err(_) => svd_ridge(h, t, c),
    }
}

/// `B = Hᵀ(HHᵀ + I/C)⁻¹ T`, the natural form when `N < n_h`.
pub fn solve_ridge_underdetermined(
    h: &DMatrix<f64>,
    t: &DMatrix<f64>,
    c: f64,
) -> Result<OutputWeights> {
    validate(h, t, c)?;
    let gram = add_ridge(h * h.transpose(), c);
    match spd_solve(gram, t) {
        Ok((alpha, method)) => Ok(ridge_weights(h.tr_mul(&alpha), method)),
        Err(_) => svd_ridge(h, t, c),
    }
}

/// Picks the smaller of the two normal systems.
pub fn solve_ridge(h: &DMatrix<f64>, t: &DMatrix<f64>, c: f64) -> Result<OutputWeights> {
    if h.nrows() >= h.ncols() {
        solve_ridge_overdetermined(h, t, c)
    } else {
        solve_ridge_underdetermined(h, t, c)
    }
}

/// `argmin ‖HB − T‖_F` subject to `BᵀB = I`, via the SVD `HᵀT = UΣVᵀ`,
/// giving `B = UVᵀ`.
pub fn solve_orthogonal_procrustes(h: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<OutputWeights> {
    if h.shape() != t.shape() {
        return Err(Error::shape("procrustes targets", dims(h), dims(t)));
    }
    if h.is_empty() {
        return Err(Error::shape("procrustes inputs", "non-empty H", dims(h)));
    }
    ensure_finite(h, "H")?;
    ensure_finite(t, "T")?;

    let m = h.tr_mul(t);
    let svd = SVD::try_new(m, true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let min_sv = svd.singular_values.min();
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Numeric("SVD returned no singular vectors".into()));
    };
    Ok(OutputWeights {
        matrix: u * v_t,
        diagnostics: SolveDiagnostics {
            method: SolveMethod::Procrustes,
            min_singular_value: Some(min_sv),
            non_unique: min_sv < RANK_TOLERANCE,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(b: &DMatrix<f64>) -> f64 {
        let n = b.ncols();
        (b.tr_mul(b) - DMatrix::<f64>::identity(n, n)).amax()
    }

    #[test]
    fn identity_system() {
        let i = DMatrix::<f64>::identity(4, 4);
        let b = solve_ridge_overdetermined(&i, &i, 1e12).unwrap();
        assert!((b.matrix - &i).amax() < 1e-10);
    }

    #[test]
    fn minimum_norm_interpolant() {
        let h = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let t = DMatrix::from_element(1, 1, 1.0);
        let b = solve_ridge_underdetermined(&h, &t, 1e12).unwrap().matrix;
        assert!((b[(0, 0)] - 1.0).abs() < 1e-6);
        assert!(b[(1, 0)].abs() < 1e-6 && b[(2, 0)].abs() < 1e-6);
    }

    #[test]
    fn duplicate_samples_at_huge_c_fall_back_to_svd() {
        let row = [0.2, 0.7, 0.4, 0.9];
        let h = DMatrix::from_fn(3, 4, |i, j| if i < 2 { row[j] } else { row[3 - j] });
        let t = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 0.5]);
        let b = solve_ridge(&h, &t, 1e18).unwrap();
        assert!((&h * &b.matrix - &t).amax() < 1e-8);
        // the SVD path matches the normal equations where both apply
        let tame = svd_ridge(&h, &t, 10.0).unwrap().matrix;
        let direct = solve_ridge_underdetermined(&h, &t, 10.0).unwrap().matrix;
        assert!((tame - direct).amax() < 1e-12);
    }

    #[test]
    fn heavy_regularization_shrinks_to_zero() {
        let h = DMatrix::from_fn(20, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
        let t = DMatrix::from_fn(20, 2, |i, j| ((i + 2 * j) % 5) as f64);
        let b1 = solve_ridge(&h, &t, 1.0).unwrap().matrix;
        let b0 = solve_ridge(&h, &t, 1e-12).unwrap().matrix;
        assert!(b0.norm() <= 1e-6 * b1.norm());
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            solve_ridge(&h, &h, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_ridge(&h, &h, -1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_ridge(&h, &h, f64::NAN),
            Err(Error::InvalidParameter(_))
        ));
        let mut bad = h.clone();
        bad[(0, 1)] = f64::INFINITY;
        assert!(matches!(
            solve_ridge(&bad, &h, 1.0),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            solve_ridge(&h, &DMatrix::zeros(2, 3), 1.0),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn dispatch_follows_shape() {
        let tall = DMatrix::from_fn(20, 5, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let t = DMatrix::from_fn(20, 2, |i, j| (i + j) as f64 / 10.0);
        assert_eq!(
            solve_ridge(&tall, &t, 3.0).unwrap(),
            solve_ridge_overdetermined(&tall, &t, 3.0).unwrap()
        );
        let wide = tall.transpose().rows(0, 4).into_owned();
        let tw = t.rows(0, 4).into_owned();
        assert_eq!(
            solve_ridge(&wide, &tw, 3.0).unwrap(),
            solve_ridge_underdetermined(&wide, &tw, 3.0).unwrap()
        );
    }

    #[test]
    fn procrustes_identity() {
        let i = DMatrix::<f64>::identity(3, 3);
        let b = solve_orthogonal_procrustes(&i, &i).unwrap();
        assert!((b.matrix - &i).amax() < 1e-12);
        assert!(!b.diagnostics.non_unique);
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let (s, c) = (30f64.to_radians().sin(), 30f64.to_radians().cos());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let b = solve_orthogonal_procrustes(&DMatrix::identity(2, 2), &rot).unwrap();
        assert!((b.matrix - rot).amax() < 1e-12);
    }

    #[test]
    fn procrustes_flags_rank_deficiency() {
        let h = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let t = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = solve_orthogonal_procrustes(&h, &t).unwrap();
        assert!(b.diagnostics.non_unique);
        assert!(orthogonality_error(&b.matrix) < 1e-10);

        let z = DMatrix::<f64>::zeros(4, 3);
        let b = solve_orthogonal_procrustes(&z, &z).unwrap();
        assert!(b.diagnostics.non_unique);
        assert!(orthogonality_error(&b.matrix) < 1e-10);
    }

    #[test]
    fn procrustes_rejects_shape_mismatch() {
        let h = DMatrix::<f64>::zeros(4, 3);
        let t = DMatrix::<f64>::zeros(4, 2);
        assert!(solve_orthogonal_procrustes(&h, &t).is_err());
    }
}
