//! Haar-random orthogonal symplectics and pure-state assembly.
//!
//! `U = X + iY ∈ U(n)` maps to `O = [[X, Y], [−Y, X]] ∈ K(n)`, the compact
//! subgroup of `Sp(2n, ℝ)`. A pure state with per-mode energies `E_j` is
//! `σ = Oᵀ Z² O` with `Z² = diag(z², z⁻²)` and `z_j² + z_j⁻² = E_j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::measures::EnergyVector;
use crate::symplectic::{CovarianceMatrix, SymplecticForm};

/// Tolerance on unitarity and symplectic-orthogonality defects.
pub const TOL_GROUP: f64 = 1e-9;

/// An element of `U(n)` stored by its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarUnitary {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl HaarUnitary {
    /// Checks `XᵀX + YᵀY = 1` and `XᵀY − YᵀX = 0`.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        if n == 0 || !x.is_square() {
            return invalid("unitary must be a non-empty square matrix");
        }
        if y.shape() != x.shape() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.nrows(),
            });
        }
        let u = Self { x, y };
        let defect = u.unitarity_defect();
        if !(defect <= TOL_GROUP) {
            return invalid(format!("matrix is not unitary (defect {defect:e})"));
        }
        Ok(u)
    }

    pub fn from_complex(u: &DMatrix<Complex64>) -> Result<Self> {
        Self::new(u.map(|c| c.re), u.map(|c| c.im))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: DMatrix::identity(n, n),
            y: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.x.zip_map(&self.y, Complex64::new)
    }

    /// Max-norm of the two unitarity conditions.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let xt = self.x.transpose();
        let yt = self.y.transpose();
        let a = &xt * &self.x + &yt * &self.y - DMatrix::<f64>::identity(n, n);
        let b = &xt * &self.y - &yt * &self.x;
        a.amax().max(b.amax())
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &HaarUnitary) -> Result<HaarUnitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        HaarUnitary::new(
            &self.x * &other.x - &self.y * &other.y,
            &self.x * &other.y + &self.y * &other.x,
        )
    }
}

/// The first `m` columns of a Haar unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarColumns {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl HaarColumns {
    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n × m` matrix of i.i.d. standard complex normals, drawn column by column.
pub fn sample_ginibre_columns<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> DMatrix<Complex64> {
    let data: Vec<Complex64> = (0..n * m).map(|_| complex_normal(rng)).collect();
    DMatrix::from_vec(n, m, data)
}

/// Orthonormalises the columns of `g` by QR, multiplying each column of `Q`
/// by the phase of the matching diagonal entry of `R`.
pub fn orthonormalize_with_phase(g: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Haar-distributed `U ∈ U(n)`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarUnitary> {
    if n == 0 {
        return invalid("unitary dimension must be positive");
    }
    let q = orthonormalize_with_phase(sample_ginibre_columns(n, n, rng));
    Ok(HaarUnitary {
        x: q.map(|c| c.re),
        y: q.map(|c| c.im),
    })
}

/// First `m` columns of a Haar unitary of size `n`.
///
/// Continuing the same stream with `sample_haar_completion` yields the full
/// unitary whose leading columns these are.
pub fn sample_haar_columns<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<(HaarColumns, DMatrix<Complex64>)> {
    if n == 0 || m == 0 || m > n {
        return invalid(format!("need 1 <= m <= n, got m={m}, n={n}"));
    }
    let g = sample_ginibre_columns(n, m, rng);
    let q = orthonormalize_with_phase(g.clone());
    Ok((
        HaarColumns {
            x: q.map(|c| c.re),
            y: q.map(|c| c.im),
        },
        g,
    ))
}

/// Draws the remaining `n − m` Ginibre columns and returns the full Haar unitary.
pub fn sample_haar_completion<R: Rng + ?Sized>(
    leading: &DMatrix<Complex64>,
    rng: &mut R,
) -> HaarUnitary {
    let (n, m) = leading.shape();
    let rest = sample_ginibre_columns(n, n - m, rng);
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    g.columns_mut(0, m).copy_from(leading);
    g.columns_mut(m, n - m).copy_from(&rest);
    let q = orthonormalize_with_phase(g);
    HaarUnitary {
        x: q.map(|c| c.re),
        y: q.map(|c| c.im),
    }
}

/// An element of `K(n) = Sp(2n, ℝ) ∩ SO(2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoSymplectic {
    matrix: DMatrix<f64>,
}

impl OrthoSymplectic {
    /// Checks `OᵀO = 1` and `OᵀΩO = Ω`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return invalid(format!(
                "orthogonal symplectic must be 2n x 2n, got {r}x{c}"
            ));
        }
        let o = Self { matrix };
        let (orth, sympl) = o.defects();
        if !(orth <= TOL_GROUP && sympl <= TOL_GROUP) {
            return invalid(format!(
                "matrix is not orthogonal symplectic (defects {orth:e}, {sympl:e})"
            ));
        }
        Ok(o)
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Max-norm of `OᵀO − 1` and of `OᵀΩO − Ω`.
    pub fn defects(&self) -> (f64, f64) {
        let dim = self.matrix.nrows();
        let omega = SymplecticForm::new(dim / 2).expect("non-empty");
        let ot = self.matrix.transpose();
        let orth = (&ot * &self.matrix - DMatrix::<f64>::identity(dim, dim)).amax();
        let sympl = (&ot * omega.apply_left(&self.matrix) - omega.matrix()).amax();
        (orth, sympl)
    }
}

/// `U = X + iY ↦ [[X, Y], [−Y, X]]`.
pub fn unitary_to_ortho_symplectic(u: &HaarUnitary) -> Result<OrthoSymplectic> {
    let defect = u.unitarity_defect();
    if !(defect <= TOL_GROUP) {
        return invalid(format!("matrix is not unitary (defect {defect:e})"));
    }
    let n = u.dim();
    let mut o = DMatrix::<f64>::zeros(2 * n, 2 * n);
    o.view_mut((0, 0), (n, n)).copy_from(&u.x);
    o.view_mut((0, n), (n, n)).copy_from(&u.y);
    o.view_mut((n, 0), (n, n)).copy_from(&(-&u.y));
    o.view_mut((n, n), (n, n)).copy_from(&u.x);
    Ok(OrthoSymplectic { matrix: o })
}

/// `z² = (E + √(E² − 4))/2` from the excess `x = E − 2`, without cancellation.
fn z_squared_from_excess(x: f64) -> f64 {
    1.0 + 0.5 * x + 0.5 * (x * (x + 4.0)).sqrt()
}

/// The root `z ≥ 1` of `z² + z⁻² = E_j`.
pub fn squeezing_from_energy(e_j: f64) -> Result<f64> {
    if !(e_j >= 2.0) || !e_j.is_finite() {
        return invalid(format!("mode energy {e_j} is below the vacuum value 2"));
    }
    Ok(z_squared_from_excess(e_j - 2.0).sqrt())
}

/// Per-mode squeezing factors `z_j ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingVector {
    z: Vec<f64>,
}

impl SqueezingVector {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if let Some(v) = z.iter().find(|v| !(**v >= 1.0)) {
            return invalid(format!("squeezing factor {v} is below 1"));
        }
        Ok(Self { z })
    }

    pub fn from_energies(e: &EnergyVector) -> Self {
        Self {
            z: e.excess()
                .iter()
                .map(|&x| z_squared_from_excess(x).sqrt())
                .collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    /// Diagonal of `Z² = diag(z₁², …, z_n², z₁⁻², …, z_n⁻²)`.
    pub fn z_squared_diagonal(&self) -> DVector<f64> {
        let n = self.z.len();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                self.z[i] * self.z[i]
            } else {
                1.0 / (self.z[i - n] * self.z[i - n])
            }
        })
    }
}

fn z_squared_diagonal(e: &EnergyVector) -> DVector<f64> {
    let n = e.len();
    let zz: Vec<f64> = e
        .excess()
        .iter()
        .map(|&x| z_squared_from_excess(x))
        .collect();
    DVector::from_fn(2 * n, |i, _| if i < n { zz[i] } else { 1.0 / zz[i - n] })
}

/// `CᵀDC` for a `2n × k` matrix `C` and diagonal `D`.
fn congruence(c: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut dc = c.clone();
    for (i, mut row) in dc.row_iter_mut().enumerate() {
        row *= d[i];
    }
    c.transpose() * dc
}

/// `σ = Oᵀ Z² O`.
pub fn assemble_pure_cm(e: &EnergyVector, o: &OrthoSymplectic) -> Result<CovarianceMatrix> {
    if e.len() != o.modes() {
        return Err(Error::DimensionMismatch {
            expected: o.modes(),
            found: e.len(),
        });
    }
    Ok(CovarianceMatrix::from_trusted(congruence(
        o.matrix(),
        &z_squared_diagonal(e),
    )))
}

/// The reduction of `Oᵀ Z² O` to the first `m` modes, using only the first
/// `m` columns of `U`.
pub fn assemble_reduced_cm(e: &EnergyVector, cols: &HaarColumns) -> Result<CovarianceMatrix> {
    let (n, m) = (cols.rows(), cols.cols());
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.len(),
        });
    }
    let mut c = DMatrix::<f64>::zeros(2 * n, 2 * m);
    c.view_mut((0, 0), (n, m)).copy_from(&cols.x);
    c.view_mut((0, m), (n, m)).copy_from(&cols.y);
    c.view_mut((n, 0), (n, m)).copy_from(&(-&cols.y));
    c.view_mut((n, m), (n, m)).copy_from(&cols.x);
    Ok(CovarianceMatrix::from_trusted(congruence(
        &c,
        &z_squared_diagonal(e),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::symplectic::{energy, purity, reduce, symplectic_eigenvalues};

    #[test]
    fn sampled_unitaries_are_unitary() {
        for n in 1..8 {
            let u = sample_haar_unitary(n, &mut stream(1, n as u64)).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn identity_and_i_map_to_identity_and_omega() {
        let o = unitary_to_ortho_symplectic(&HaarUnitary::identity(3)).unwrap();
        assert_eq!(o.matrix(), &DMatrix::<f64>::identity(6, 6));
        let iu = HaarUnitary::new(DMatrix::zeros(3, 3), DMatrix::identity(3, 3)).unwrap();
        let o = unitary_to_ortho_symplectic(&iu).unwrap();
        assert_eq!(o.matrix(), &SymplecticForm::new(3).unwrap().matrix());
    }

    #[test]
    fn map_is_a_homomorphism() {
        let u = sample_haar_unitary(4, &mut stream(2, 0)).unwrap();
        let v = sample_haar_unitary(4, &mut stream(2, 1)).unwrap();
        let ouv = unitary_to_ortho_symplectic(&u.compose(&v).unwrap()).unwrap();
        let ou = unitary_to_ortho_symplectic(&u).unwrap();
        let ov = unitary_to_ortho_symplectic(&v).unwrap();
        assert!((ouv.matrix() - ou.matrix() * ov.matrix()).amax() < 1e-12);
        let (orth, sympl) = ou.defects();
        assert!(orth < 1e-12 && sympl < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(HaarUnitary::new(DMatrix::identity(2, 2) * 1.1, DMatrix::zeros(2, 2)).is_err());
        assert!(OrthoSymplectic::new(DMatrix::identity(3, 3)).is_err());
        // orthogonal but not symplectic
        let flip = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(OrthoSymplectic::new(flip).is_err());
    }

    #[test]
    fn squeezing_values() {
        assert_eq!(squeezing_from_energy(2.0).unwrap(), 1.0);
        assert!((squeezing_from_energy(17.0 / 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(squeezing_from_energy(1.99).is_err());
        for &e in &[2.0 + 1e-12, 2.5, 10.0, 1e4] {
            let z = squeezing_from_energy(e).unwrap();
            assert!(z >= 1.0);
            assert!((z * z + 1.0 / (z * z) - e).abs() < 1e-10 * e.max(1.0));
        }
    }

    #[test]
    fn vacuum_energies_give_identity() {
        let o = unitary_to_ortho_symplectic(&sample_haar_unitary(4, &mut stream(3, 0)).unwrap())
            .unwrap();
        let s = assemble_pure_cm(&EnergyVector::vacuum(4), &o).unwrap();
        assert!((s.matrix() - DMatrix::<f64>::identity(8, 8)).amax() < 1e-14);
    }

    #[test]
    fn single_mode_squeezed() {
        let e = EnergyVector::from_energies(&[17.0 / 4.0]).unwrap();
        let o = unitary_to_ortho_symplectic(&HaarUnitary::identity(1)).unwrap();
        let s = assemble_pure_cm(&e, &o).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]);
        assert!((s.matrix() - expect).amax() < 1e-14);
    }

    #[test]
    fn assembled_state_is_pure_with_right_energy() {
        let e = EnergyVector::from_energies(&[3.0, 7.5, 2.0, 12.0, 2.2]).unwrap();
        let o = unitary_to_ortho_symplectic(&sample_haar_unitary(5, &mut stream(4, 0)).unwrap())
            .unwrap();
        let s = assemble_pure_cm(&e, &o).unwrap();
        s.check_invariants().unwrap();
        assert!((purity(&s).unwrap() - 1.0).abs() < 1e-6);
        assert!((energy(&s) - e.total()).abs() < 1e-10);
        assert!(symplectic_eigenvalues(&s)
            .unwrap()
            .values()
            .iter()
            .all(|&v| (v - 1.0).abs() < 1e-7));
    }

    #[test]
    fn thin_path_matches_full_reduction() {
        let e = EnergyVector::from_energies(&[3.0, 7.5, 2.0, 12.0, 2.2, 4.0]).unwrap();
        for m in 1..=6 {
            let mut rng = stream(5, m as u64);
            let (cols, lead) = sample_haar_columns(6, m, &mut rng).unwrap();
            let u = sample_haar_completion(&lead, &mut rng);
            let o = unitary_to_ortho_symplectic(&u).unwrap();
            let full = assemble_pure_cm(&e, &o).unwrap();
            let modes: Vec<usize> = (0..m).collect();
            let red = reduce(&full, &modes).unwrap();
            let thin = assemble_reduced_cm(&e, &cols).unwrap();
            assert!((red.matrix() - thin.matrix()).amax() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn completion_equals_direct_sample() {
        let mut a = stream(6, 0);
        let mut b = stream(6, 0);
        let direct = sample_haar_unitary(4, &mut a).unwrap();
        let (_, lead) = sample_haar_columns(4, 2, &mut b).unwrap();
        let completed = sample_haar_completion(&lead, &mut b);
        assert!((direct.x() - completed.x()).amax() < 1e-12);
        assert!((direct.y() - completed.y()).amax() < 1e-12);
    }
}
