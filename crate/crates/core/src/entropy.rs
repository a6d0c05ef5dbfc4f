//! Entropic functionals of Gaussian states.
//!
//! The von Neumann entropy of a Gaussian state is `S = Σ_j h(ν_j)` with
//!
//! ```text
//! h(x) = (x+1)/2 · log((x+1)/2) − (x−1)/2 · log((x−1)/2),   h(1) = 0.
//! ```
//!
//! All entropies are reported in a configurable [`LogBase`].

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symplectic::{
    symplectic_eigenvalues, CovarianceMatrix, InvariantVector, SymplecticSpectrum,
};
use crate::TOL_UNC;

/// Below this distance from 1 `h` is evaluated from its expansion around `x = 1`.
const SERIES_CUTOFF: f64 = 1e-8;

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    /// Bits.
    #[default]
    #[serde(rename = "2")]
    Two,
    /// Nats.
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// Multiplier converting nats into this base.
    pub fn from_nats(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LOG2_E,
            LogBase::E => 1.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Two => "bits",
            LogBase::E => "nats",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => invalid(format!("log base must be \"2\" or \"e\", got {other:?}")),
        }
    }
}

fn h_nats(x: f64) -> f64 {
    let t = 0.5 * (x - 1.0);
    if t <= 0.0 {
        0.0
    } else if x - 1.0 < SERIES_CUTOFF {
        // (1+t)ln(1+t) = t + t²/2 + O(t³)
        t - t * t.ln() + 0.5 * t * t
    } else {
        (1.0 + t) * t.ln_1p() - t * t.ln()
    }
}

/// The entropic function `h(x)` for `x ≥ 1`.
pub fn entropic_h(x: f64, base: LogBase) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return invalid(format!("entropic function needs x >= 1, got {x}"));
    }
    Ok(h_nats(x) * base.from_nats())
}

/// `Σ h(ν_j)` over a symplectic spectrum.
pub fn spectrum_entropy(spectrum: &SymplecticSpectrum, base: LogBase) -> f64 {
    spectrum.values().iter().map(|&nu| h_nats(nu)).sum::<f64>() * base.from_nats()
}

/// Von Neumann entropy of the Gaussian state with covariance matrix `γ`.
pub fn von_neumann_entropy(cm: &CovarianceMatrix, base: LogBase) -> Result<f64> {
    Ok(spectrum_entropy(&symplectic_eigenvalues(cm)?, base))
}

fn h_complex(x: Complex64) -> Complex64 {
    let a = (x + 1.0) * 0.5;
    let b = (x - 1.0) * 0.5;
    a * a.ln() - b * b.ln()
}

/// Entropy recovered from the symplectic invariants alone.
///
/// The squared symplectic eigenvalues are the roots of
/// `p(y) = Σ_d (−1)^d Δ_d y^{m−d}`. Roots at `y = 1` (pure modes) are split off
/// exactly after shifting to `t = y − 1`; the rest come from the companion
/// matrix. The entropy is summed as an analytic function of the roots, which
/// keeps clusters of repeated roots (e.g. thermal reductions) accurate even
/// though the individual roots are only known to `ε^{1/k}`.
pub fn entropy_from_invariants(inv: &InvariantVector, base: LogBase) -> Result<f64> {
    let m = inv.len();
    if inv.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InconsistentInvariants("non-finite invariant".into()));
    }
    // descending coefficients of p
    let mut coeffs: Vec<f64> = std::iter::once(1.0)
        .chain(
            inv.values()
                .iter()
                .enumerate()
                .map(|(i, &d)| if (i + 1) % 2 == 0 { d } else { -d }),
        )
        .collect();
    // Taylor shift p(y) -> q(t) = p(1 + t)
    for i in 0..m {
        for j in 1..=(m - i) {
            coeffs[j] += coeffs[j - 1];
        }
    }
    let scale = 1.0 + coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= 1e-12 * scale {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(0.0);
    }

    let roots: Vec<Complex64> = if degree == 1 {
        vec![Complex64::new(-coeffs[1], 0.0)]
    } else {
        let companion = DMatrix::from_fn(degree, degree, |i, j| {
            if i == 0 {
                -coeffs[j + 1]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion.complex_eigenvalues().iter().copied().collect()
    };

    let cluster_tol = 100.0 * f64::EPSILON.powf(1.0 / degree as f64);
    let mut total = Complex64::new(0.0, 0.0);
    for t in roots {
        let mag = t.norm().max(1.0);
        if t.im.abs() > cluster_tol * mag {
            return Err(Error::InconsistentInvariants(format!(
                "complex squared symplectic eigenvalue 1 + ({t})"
            )));
        }
        if t.re < -(2.0 * TOL_UNC).max(cluster_tol * mag) {
            return Err(Error::InconsistentInvariants(format!(
                "squared symplectic eigenvalue {} below 1",
                1.0 + t.re
            )));
        }
        if t.norm() <= 1e-6 {
            total += h_nats((1.0 + t.re.max(0.0)).sqrt());
        } else {
            total += h_complex((t + 1.0).sqrt());
        }
    }
    Ok(total.re * base.from_nats())
}
