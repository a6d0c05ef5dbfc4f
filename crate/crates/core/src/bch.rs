//! Displacement matrix of the decoupled quadratic/linear Gaussian unitary.
//!
//! `exp(i(RᵀAR + Rᵀb)) = exp(iRᵀAR) · exp(iRᵀMb)` with
//! `M = ∫₀¹ exp(4θAΩ) dθ`, which for invertible `A` equals
//! `¼ Ω A⁻¹ (1 − exp(4AΩ))`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::symplectic::SymplecticForm;
use crate::TOL_SYM;

/// Largest accepted condition number for the closed form.
pub const MAX_CONDITION: f64 = 1e12;

fn generator(a: &DMatrix<f64>) -> Result<(SymplecticForm, DMatrix<f64>)> {
    let (r, c) = a.shape();
    if r != c || r == 0 || r % 2 != 0 {
        return invalid(format!("generator must be 2n x 2n, got {r}x{c}"));
    }
    let asym = (a - a.transpose()).amax();
    if asym > TOL_SYM {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    let omega = SymplecticForm::new(r / 2)?;
    let b = a * omega.matrix() * 4.0;
    Ok((omega, b))
}

/// Closed-form `M = ¼ Ω A⁻¹ (1 − e^{4AΩ})` via a Padé scaling-and-squaring exponential.
///
/// Fails with [`Error::Singular`] when `A` is singular or its condition number
/// exceeds [`MAX_CONDITION`]; use [`displacement_quadrature`] in that case.
pub fn bch_displacement_matrix(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (omega, b) = generator(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let largest = eig.eigenvalues.amax();
    let smallest = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let condition = if smallest == 0.0 {
        f64::INFINITY
    } else {
        largest / smallest
    };
    if !(condition < MAX_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { condition })?;
    let dim = a.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    Ok(omega.apply_left(&(inv * (id - b.exp()))) * 0.25)
}

/// `exp(hB)` by a truncated Taylor series; only used for small steps.
fn taylor_exp(b: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let dim = b.nrows();
    let mut result = DMatrix::<f64>::identity(dim, dim);
    let mut term = result.clone();
    for k in 1..60 {
        term = &term * b * (h / k as f64);
        result += &term;
        if term.amax() <= 1e-18 * result.amax() {
            break;
        }
    }
    result
}

/// `∫₀^θ exp(4sAΩ) ds` by composite Simpson quadrature with `panels` sub-intervals.
///
/// The integrand is propagated node to node with a short-step Taylor
/// exponential, so this route shares nothing with the closed form.
pub fn displacement_integral(a: &DMatrix<f64>, theta: f64, panels: usize) -> Result<DMatrix<f64>> {
    if panels == 0 || !panels.is_multiple_of(2) {
        return invalid("Simpson quadrature needs an even, positive panel count");
    }
    if !theta.is_finite() {
        return invalid("integration limit must be finite");
    }
    let (_, b) = generator(a)?;
    let h = theta / panels as f64;
    let step = taylor_exp(&b, h);
    let dim = a.nrows();
    let mut node = DMatrix::<f64>::identity(dim, dim);
    let mut acc = node.clone();
    for k in 1..=panels {
        node = &node * &step;
        let w = if k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += &node * w;
    }
    Ok(acc * (h / 3.0))
}

/// `M = ∫₀¹ exp(4θAΩ) dθ`; valid for singular `A` as well.
pub fn displacement_quadrature(a: &DMatrix<f64>, panels: usize) -> Result<DMatrix<f64>> {
    displacement_integral(a, 1.0, panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    #[test]
    fn zero_generator_is_singular_but_quadrature_gives_identity() {
        let a = DMatrix::<f64>::zeros(4, 4);
        assert!(matches!(
            bch_displacement_matrix(&a),
            Err(Error::Singular { .. })
        ));
        let m = displacement_quadrature(&a, 100).unwrap();
        assert_eq!(m, DMatrix::identity(4, 4));
    }

    #[test]
    fn small_generator_tends_to_identity() {
        let a = diag(&[1e-6, 2e-6, -1e-6, 3e-6]);
        let m = bch_displacement_matrix(&a).unwrap();
        assert!((m - DMatrix::<f64>::identity(4, 4)).amax() < 1e-4);
    }

    #[test]
    fn single_mode_matches_quadrature() {
        let a = DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.1, -0.2]);
        let closed = bch_displacement_matrix(&a).unwrap();
        let quad = displacement_quadrature(&a, 10_000).unwrap();
        assert!((closed - quad).amax() < 1e-10);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(bch_displacement_matrix(&DMatrix::zeros(3, 3)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(bch_displacement_matrix(&asym).is_err());
        assert!(displacement_quadrature(&DMatrix::identity(2, 2), 3).is_err());
    }
}
