//! Parameter scans over the number of modes.

use serde::{Deserialize, Serialize};

use crate::ensemble::{run_ensemble, EnsembleConfig, Validation};
use crate::entropy::LogBase;
use crate::error::{invalid, Result};
use crate::measures::{CanonicalConfig, Measure, MicrocanonicalConfig};
use crate::rng::mix_seed;
use crate::stats::{jackknife_moments, linear_fit, LinearFit};

/// Energy scale that grows with the number of modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "lowercase")]
pub enum EnergyScale {
    /// Energy cap `E = ratio · n`.
    Microcanonical { energy_per_mode: f64 },
    /// Fixed temperature.
    Canonical { temperature: f64 },
}

impl EnergyScale {
    pub fn measure(&self, n: usize) -> Result<Measure> {
        Ok(match *self {
            EnergyScale::Microcanonical { energy_per_mode } => {
                Measure::Microcanonical(MicrocanonicalConfig::new(n, energy_per_mode * n as f64)?)
            }
            EnergyScale::Canonical { temperature } => {
                Measure::Canonical(CanonicalConfig::new(n, temperature)?)
            }
        })
    }
}

/// Size of the reduced subsystem along a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsystemSize {
    Fixed(usize),
    /// `m = max(1, round(fraction · n))`.
    Fraction(f64),
}

impl SubsystemSize {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            SubsystemSize::Fixed(m) => m,
            SubsystemSize::Fraction(f) => ((f * n as f64).round() as usize).clamp(1, n),
        }
    }
}

/// Settings shared by every point of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub scale: EnergyScale,
    pub samples: u64,
    pub seed: u64,
    pub log_base: LogBase,
}

impl ScanSettings {
    fn ensemble(&self, n: usize, m: usize) -> Result<EnsembleConfig> {
        let seed = mix_seed(self.seed, ((n as u64) << 32) | m as u64);
        Ok(
            EnsembleConfig::new(self.scale.measure(n)?, m, self.samples, seed)?
                .with_log_base(self.log_base)
                .with_validation(Validation::Spot),
        )
    }
}

/// Entropy spread at one system size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationPoint {
    pub n: usize,
    pub m: usize,
    pub mean: f64,
    pub variance: f64,
    /// `var S / mean S`.
    pub var_over_mean: f64,
    pub var_over_mean_se: f64,
    /// `var S / (mean S)²`.
    pub var_over_mean_sq: f64,
    pub var_over_mean_sq_se: f64,
}

/// Points of a concentration scan and the log-log fit of `var/mean` against `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationScan {
    pub points: Vec<ConcentrationPoint>,
    pub fit: Option<LinearFit>,
}

pub fn concentration_scan(
    ns: &[usize],
    m: SubsystemSize,
    settings: &ScanSettings,
) -> Result<ConcentrationScan> {
    if ns.is_empty() {
        return invalid("scan needs at least one system size");
    }
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let m = m.resolve(n);
        let run = run_ensemble(&settings.ensemble(n, m)?)?;
        let s: Vec<f64> = run.samples.iter().map(|x| x.entropy).collect();
        let vm = jackknife_moments(&s, |mean, var| var / mean)?;
        let vm2 = jackknife_moments(&s, |mean, var| var / (mean * mean))?;
        let summary = &run.summary;
        points.push(ConcentrationPoint {
            n,
            m,
            mean: summary.entropy.mean,
            variance: summary.entropy.std * summary.entropy.std,
            var_over_mean: vm.estimate,
            var_over_mean_se: vm.std_error,
            var_over_mean_sq: vm2.estimate,
            var_over_mean_sq_se: vm2.std_error,
        });
    }
    let fit = if points.len() >= 3 {
        let x: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
        let y: Vec<f64> = points.iter().map(|p| p.var_over_mean.ln()).collect();
        Some(linear_fit(&x, &y)?)
    } else {
        None
    };
    Ok(ConcentrationScan { points, fit })
}

/// Entropy statistics of an `m`-mode reduction of `n` modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdepPoint {
    pub n: usize,
    pub m: usize,
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
    pub max_entropy: Option<f64>,
}

/// Entropy against subsystem size; pairs with `m > n` are skipped.
pub fn mdep_scan(ns: &[usize], ms: &[usize], settings: &ScanSettings) -> Result<Vec<MdepPoint>> {
    if ns.is_empty() || ms.is_empty() {
        return invalid("scan needs at least one system size and one subsystem size");
    }
    let mut points = Vec::new();
    for &n in ns {
        for &m in ms.iter().filter(|&&m| m >= 1 && m <= n) {
            let cfg = settings.ensemble(n, m)?;
            let run = run_ensemble(&cfg)?;
            points.push(MdepPoint {
                n,
                m,
                mean: run.summary.entropy.mean,
                std: run.summary.entropy.std,
                std_error: run.summary.entropy.std_error,
                max_entropy: run.summary.max_entropy,
            });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(samples: u64) -> ScanSettings {
        ScanSettings {
            scale: EnergyScale::Microcanonical {
                energy_per_mode: 10.0,
            },
            samples,
            seed: 3,
            log_base: LogBase::Two,
        }
    }

    #[test]
    fn subsystem_sizes() {
        assert_eq!(SubsystemSize::Fixed(2).resolve(10), 2);
        assert_eq!(SubsystemSize::Fraction(0.25).resolve(16), 4);
        assert_eq!(SubsystemSize::Fraction(0.25).resolve(2), 1);
    }

    #[test]
    fn concentration_scan_shape() {
        let scan =
            concentration_scan(&[4, 8, 16], SubsystemSize::Fixed(1), &settings(300)).unwrap();
        assert_eq!(scan.points.len(), 3);
        let fit = scan.fit.unwrap();
        assert!(fit.slope < 0.0);
    }

    #[test]
    fn mdep_skips_and_full_state_is_pure() {
        let pts = mdep_scan(&[3], &[1, 3, 4], &settings(50)).unwrap();
        assert_eq!(pts.iter().map(|p| p.m).collect::<Vec<_>>(), vec![1, 3]);
        assert!(pts[1].mean.abs() < 1e-9);
    }
}
