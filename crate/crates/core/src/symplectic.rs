//! Covariance matrices, the symplectic form and symplectic spectra.
//!
//! Covariance matrices are stored in `xxpp` ordering, i.e. rows and columns run
//! over `(x_1, …, x_n, p_1, …, p_n)`. With this ordering the symplectic form is
//! the block matrix `Ω = [[0, 1], [−1, 0]]`.
//!
//! Symplectic eigenvalues are obtained from a symmetric eigenproblem: with the
//! Cholesky factor `Σ = L Lᵀ`, the antisymmetric matrix `A = Lᵀ Ω L` is similar
//! to `ΩΣ`, so the eigenvalues of the symmetric matrix `AᵀA = −A²` are the
//! squared symplectic eigenvalues, each appearing twice.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::{TOL_SYM, TOL_UNC};

/// The symplectic form `Ω` on `n` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("symplectic form needs at least one mode");
        }
        Ok(Self { n })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    /// Dense `2n × 2n` representation.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if j == i + n {
                1.0
            } else if i == j + n {
                -1.0
            } else {
                0.0
            }
        })
    }

    /// `Ω M` without forming `Ω`: rows are permuted and the lower block negated.
    pub fn apply_left(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            if i < n {
                m[(i + n, j)]
            } else {
                -m[(i - n, j)]
            }
        })
    }
}

/// Convenience constructor for [`SymplecticForm`].
pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    SymplecticForm::new(n)
}

/// Real symmetric positive-definite `2n × 2n` second-moment matrix in `xxpp` ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CovarianceFile", try_from = "CovarianceFile")]
pub struct CovarianceMatrix {
    n: usize,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry, positive definiteness and the uncertainty principle.
    ///
    /// The stored matrix is the symmetrised input `(σ + σᵀ)/2`.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let cm = Self::checked_shape(data)?;
        cm.check_invariants()?;
        Ok(cm)
    }

    /// Builds from a row-major slice of `4n²` entries.
    pub fn from_row_major(n: usize, data: &[f64]) -> Result<Self> {
        if n == 0 {
            return invalid("covariance matrix needs at least one mode");
        }
        if data.len() != 4 * n * n {
            return Err(Error::DimensionMismatch {
                expected: 4 * n * n,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(2 * n, 2 * n, data))
    }

    /// Vacuum covariance matrix `1_{2n}`.
    pub fn vacuum(n: usize) -> Self {
        Self {
            n,
            data: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Skips the spectral checks; symmetry and shape are still enforced.
    ///
    /// Used on matrices that are physical by construction, such as assembled
    /// pure states and their reductions.
    pub(crate) fn from_trusted(data: DMatrix<f64>) -> Self {
        let n = data.nrows() / 2;
        let data = (&data + data.transpose()) * 0.5;
        Self { n, data }
    }

    fn checked_shape(data: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return invalid(format!(
                "covariance matrix must be square, got {rows}x{cols}"
            ));
        }
        if rows == 0 || rows % 2 != 0 {
            return invalid(format!(
                "covariance matrix dimension must be even and positive, got {rows}"
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return invalid("covariance matrix has non-finite entries");
        }
        let asym = max_asymmetry(&data);
        if asym > TOL_SYM {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        Ok(Self::from_trusted(data))
    }

    /// Positive definiteness and `ν_j ≥ 1 − TOL_UNC`.
    pub fn check_invariants(&self) -> Result<()> {
        let asym = max_asymmetry(&self.data);
        if asym > TOL_SYM {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        symplectic_eigenvalues(self).map(|_| ())
    }

    /// Number of modes `n`.
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// `det Σ`, computed from the Cholesky factor.
    pub fn determinant(&self) -> Result<f64> {
        let chol = self
            .data
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        Ok(chol.l_dirty().diagonal().iter().map(|d| d * d).product())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// On-disk layout: `{n, ordering: "xxpp", data: [row-major 4n² doubles]}`.
#[derive(Serialize, Deserialize)]
struct CovarianceFile {
    n: usize,
    ordering: String,
    data: Vec<f64>,
}

impl From<CovarianceMatrix> for CovarianceFile {
    fn from(cm: CovarianceMatrix) -> Self {
        let dim = 2 * cm.n;
        let data = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| cm.data[(i, j)])
            .collect();
        Self {
            n: cm.n,
            ordering: "xxpp".to_string(),
            data,
        }
    }
}

impl TryFrom<CovarianceFile> for CovarianceMatrix {
    type Error = Error;

    fn try_from(f: CovarianceFile) -> Result<Self> {
        if f.ordering != "xxpp" {
            return invalid(format!(
                "unsupported ordering {:?}, expected \"xxpp\"",
                f.ordering
            ));
        }
        CovarianceMatrix::from_row_major(f.n, &f.data)
    }
}

/// Symplectic eigenvalues `ν_j`, sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Π ν_j = √det Σ`.
    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

/// Clamps jitter below 1 and rejects genuine violations of `ν ≥ 1`.
pub(crate) fn clamp_symplectic(nu: f64) -> Result<f64> {
    if nu >= 1.0 {
        Ok(nu)
    } else if nu >= 1.0 - TOL_UNC {
        Ok(1.0)
    } else {
        Err(Error::Unphysical(format!(
            "symplectic eigenvalue {nu} violates the uncertainty principle"
        )))
    }
}

/// Symplectic eigenvalues of `Σ`, i.e. the moduli of the eigenvalues of `iΩΣ`.
pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let n = cm.n;
    let chol = cm
        .data
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let omega = SymplecticForm { n };
    let a = l.transpose() * omega.apply_left(&l);
    let gram = a.transpose() * &a;
    let gram = (&gram + gram.transpose()) * 0.5;

    let eig = SymmetricEigen::try_new(gram, f64::EPSILON, 0).ok_or(Error::EigenSolver)?;
    let mut squares: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    squares.sort_by(|x, y| y.total_cmp(x));

    let values = squares
        .chunks_exact(2)
        .map(|pair| clamp_symplectic((0.5 * (pair[0] + pair[1])).max(0.0).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymplecticSpectrum { values })
}

/// Purity `μ = tr ρ² = 1/√det Σ`.
pub fn purity(cm: &CovarianceMatrix) -> Result<f64> {
    let det = cm.determinant()?;
    let floor = (1.0 - TOL_UNC).powi(2 * cm.n as i32);
    if det < floor {
        return Err(Error::Unphysical(format!("det Σ = {det} is below 1")));
    }
    Ok((1.0 / det.sqrt()).min(1.0))
}

/// Energy `tr Σ` (first moments are zero throughout).
pub fn energy(cm: &CovarianceMatrix) -> f64 {
    cm.data.trace()
}

/// Principal submatrix on the given modes (0-based), re-indexed to `xxpp` on `m` modes.
pub fn reduce(cm: &CovarianceMatrix, modes: &[usize]) -> Result<CovarianceMatrix> {
    if modes.is_empty() {
        return invalid("reduction needs at least one mode");
    }
    let n = cm.n;
    let mut seen = vec![false; n];
    for &k in modes {
        if k >= n {
            return invalid(format!("mode {k} out of range for {n} modes"));
        }
        if std::mem::replace(&mut seen[k], true) {
            return invalid(format!("mode {k} selected twice"));
        }
    }
    let idx: Vec<usize> = modes
        .iter()
        .copied()
        .chain(modes.iter().map(|k| k + n))
        .collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cm.data[(idx[i], idx[j])]);
    Ok(CovarianceMatrix::from_trusted(sub))
}

/// Symplectic invariants `Δ_1..Δ_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    values: Vec<f64>,
}

impl InvariantVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("invariant vector must be non-empty");
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Subsystem mode count `m`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Elementary symmetric polynomials `e_1..e_k` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (count, &v) in values.iter().enumerate() {
        for d in (1..=count + 1).rev() {
            e[d] += v * e[d - 1];
        }
    }
    e.remove(0);
    e
}

/// `Δ_d` as the `d`-th elementary symmetric polynomial of the squared symplectic eigenvalues.
pub fn symplectic_invariants(cm: &CovarianceMatrix) -> Result<InvariantVector> {
    let spectrum = symplectic_eigenvalues(cm)?;
    Ok(invariants_of_spectrum(&spectrum))
}

pub fn invariants_of_spectrum(spectrum: &SymplecticSpectrum) -> InvariantVector {
    let squares: Vec<f64> = spectrum.values.iter().map(|v| v * v).collect();
    InvariantVector {
        values: elementary_symmetric(&squares),
    }
}

/// `Δ_d` read off the characteristic polynomial of `Ωγ`.
///
/// `det(λ − Ωγ) = Π (λ² + ν_j²)`, so `Δ_d` is the coefficient of `λ^{2m−2d}`.
/// Coefficients come from the Faddeev–LeVerrier recursion, which is accurate
/// for the small subsystems this is used on.
pub fn invariants_from_charpoly(cm: &CovarianceMatrix) -> InvariantVector {
    let dim = 2 * cm.n;
    let omega = SymplecticForm { n: cm.n };
    let a = omega.apply_left(&cm.data);
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..=dim {
        m = &a * &m;
        for i in 0..dim {
            m[(i, i)] += coeffs[k - 1];
        }
        let c = -(&a * &m).trace() / k as f64;
        coeffs.push(c);
    }
    InvariantVector {
        values: (1..=cm.n).map(|d| coeffs[2 * d]).collect(),
    }
}
