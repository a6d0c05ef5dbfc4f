//! Monte Carlo ensembles of reduced states.
//!
//! Sample `i` is drawn from stream `(seed, i)`: energies first, then the
//! leading `m` columns of a Haar unitary, from which the reduced covariance
//! matrix of the first `m` modes follows directly. Validated samples keep
//! drawing from the same stream to complete the unitary and rebuild the full
//! pure state, so validation never changes the reported values.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::max_subsystem_entropy;
use crate::entropy::{spectrum_entropy, LogBase};
use crate::error::{invalid, Error, Result};
use crate::haar::{
    assemble_pure_cm, assemble_reduced_cm, sample_haar_columns, sample_haar_completion,
    unitary_to_ortho_symplectic, HaarUnitary, TOL_GROUP,
};
use crate::measures::{EnergyVector, Measure};
use crate::rng::stream;
use crate::stats::{histogram, jackknife_std_distance, Histogram, Jackknife, Moments};
use crate::symplectic::{
    energy, invariants_from_charpoly, invariants_of_spectrum, purity, reduce,
    symplectic_eigenvalues, CovarianceMatrix,
};

/// Default number of histogram bins.
pub const DEFAULT_BINS: usize = 50;

/// Samples accumulated per chunk before merging.
const CHUNK: usize = 1024;

/// How many samples get the full structural audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    /// Every hundredth sample.
    #[default]
    Spot,
    All,
}

impl Validation {
    fn applies(self, index: u64) -> bool {
        match self {
            Validation::Spot => index.is_multiple_of(100),
            Validation::All => true,
        }
    }
}

/// One Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub measure: Measure,
    /// Number of leading modes kept in the reduction.
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    pub log_base: LogBase,
    pub validation: Validation,
    pub bins: usize,
}

impl EnsembleConfig {
    pub fn new(measure: Measure, m: usize, samples: u64, seed: u64) -> Result<Self> {
        let cfg = Self {
            measure,
            m,
            samples,
            seed,
            log_base: LogBase::default(),
            validation: Validation::default(),
            bins: DEFAULT_BINS,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    pub fn with_validation(mut self, validation: Validation) -> Self {
        self.validation = validation;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }

    pub fn modes(&self) -> usize {
        self.measure.modes()
    }

    fn check(&self) -> Result<()> {
        let n = self.modes();
        if self.m == 0 || self.m > n {
            return invalid(format!("need 1 <= m <= n, got m={}, n={n}", self.m));
        }
        if self.samples == 0 {
            return invalid("need at least one sample");
        }
        if self.bins == 0 {
            return invalid("need at least one histogram bin");
        }
        Ok(())
    }

    /// Largest entropy of the reduction, if the measure caps the energy.
    pub fn max_entropy(&self) -> Option<f64> {
        match self.measure {
            Measure::Microcanonical(c) => {
                max_subsystem_entropy(self.m, c.modes(), c.energy(), self.log_base).ok()
            }
            Measure::Canonical(_) => None,
        }
    }
}

/// Statistics of one drawn state's reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub index: u64,
    /// Symplectic spectrum of the reduction, descending.
    pub nu: Vec<f64>,
    /// `μ⁻² = det γ`.
    pub inv_purity: f64,
    pub entropy: f64,
    /// `Δ_1, …, Δ_m`.
    pub invariants: Vec<f64>,
    /// `Σ_j E_j` of the global state.
    pub total_energy: f64,
}

/// Mean, standard deviation and standard error of one observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
}

impl From<&Moments> for Estimate {
    fn from(m: &Moments) -> Self {
        Self {
            mean: m.mean(),
            std: m.std(),
            std_error: m.std_error(),
        }
    }
}

/// Aggregated results of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub config: EnsembleConfig,
    pub entropy: Estimate,
    pub inv_purity: Estimate,
    /// Statistics of `μ⁻⁴`.
    pub inv_purity_squared: Estimate,
    pub invariants: Vec<Estimate>,
    /// Largest attainable entropy (energy-capped measures only).
    pub max_entropy: Option<f64>,
    /// `(S_max − mean S)/std S`, jackknifed.
    pub std_distance_to_max: Option<Jackknife>,
    pub histogram: Histogram,
}

impl EnsembleSummary {
    /// `var S / mean S`.
    pub fn variance_over_mean(&self) -> f64 {
        self.entropy.std * self.entropy.std / self.entropy.mean
    }
}

/// Samples and summary of a run.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub samples: Vec<EnsembleSample>,
    pub summary: EnsembleSummary,
}

fn violation(index: u64) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::InvariantViolation { .. } => e,
        other => Error::InvariantViolation {
            sample: index,
            reason: other.to_string(),
        },
    }
}

fn audit(index: u64, e: &EnergyVector, u: &HaarUnitary, reduced: &CovarianceMatrix) -> Result<()> {
    let fail = |reason: String| {
        Err(Error::InvariantViolation {
            sample: index,
            reason,
        })
    };
    let o = unitary_to_ortho_symplectic(u)?;
    let (orth, sympl) = o.defects();
    if orth > TOL_GROUP || sympl > TOL_GROUP {
        return fail(format!("orthogonal symplectic defects {orth:e}, {sympl:e}"));
    }
    let sigma = assemble_pure_cm(e, &o)?;
    sigma.check_invariants()?;
    let mu = purity(&sigma)?;
    if (mu - 1.0).abs() > 1e-6 {
        return fail(format!("global purity {mu}"));
    }
    let trace = energy(&sigma);
    if (trace - e.total()).abs() > 1e-10 * e.total().max(1.0) {
        return fail(format!("trace {trace} differs from energy {}", e.total()));
    }
    let m = reduced.modes();
    let modes: Vec<usize> = (0..m).collect();
    let direct = reduce(&sigma, &modes)?;
    let scale = direct.matrix().amax().max(1.0);
    let diff = (direct.matrix() - reduced.matrix()).amax();
    if diff > 1e-8 * scale {
        return fail(format!("reduced state mismatch {diff:e}"));
    }
    if m <= 4 {
        let a = invariants_of_spectrum(&symplectic_eigenvalues(reduced)?);
        let b = invariants_from_charpoly(reduced);
        for (x, y) in a.values().iter().zip(b.values()) {
            if (x - y).abs() > 1e-8 * x.abs().max(1.0) {
                return fail(format!("invariant mismatch {x} vs {y}"));
            }
        }
    }
    Ok(())
}

/// Draws sample `index` of the run.
pub fn draw_sample(cfg: &EnsembleConfig, index: u64) -> Result<EnsembleSample> {
    draw(cfg, index, cfg.validation.applies(index))
}

fn draw(cfg: &EnsembleConfig, index: u64, validate: bool) -> Result<EnsembleSample> {
    let mut rng = stream(cfg.seed, index);
    let e = cfg.measure.sample_energies(&mut rng);
    let (cols, lead) = sample_haar_columns(cfg.modes(), cfg.m, &mut rng)?;
    let gamma = assemble_reduced_cm(&e, &cols)?;
    let tag = violation(index);
    let spectrum = symplectic_eigenvalues(&gamma).map_err(&tag)?;
    let inv_purity = gamma.determinant().map_err(&tag)?;
    if validate {
        let u = sample_haar_completion(&lead, &mut rng);
        audit(index, &e, &u, &gamma).map_err(&tag)?;
    }
    Ok(EnsembleSample {
        index,
        entropy: spectrum_entropy(&spectrum, cfg.log_base),
        invariants: invariants_of_spectrum(&spectrum).values().to_vec(),
        nu: spectrum.values().to_vec(),
        inv_purity,
        total_energy: e.total(),
    })
}

fn accumulate(samples: &[EnsembleSample], m: usize) -> (Moments, Moments, Moments, Vec<Moments>) {
    let chunk_stats: Vec<_> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s = Moments::new();
            let mut a = Moments::new();
            let mut a2 = Moments::new();
            let mut inv = vec![Moments::new(); m];
            for x in chunk {
                s.push(x.entropy);
                a.push(x.inv_purity);
                a2.push(x.inv_purity * x.inv_purity);
                for (acc, v) in inv.iter_mut().zip(&x.invariants) {
                    acc.push(*v);
                }
            }
            (s, a, a2, inv)
        })
        .collect();
    let mut total = (
        Moments::new(),
        Moments::new(),
        Moments::new(),
        vec![Moments::new(); m],
    );
    for (s, a, a2, inv) in &chunk_stats {
        total.0.merge(s);
        total.1.merge(a);
        total.2.merge(a2);
        for (acc, v) in total.3.iter_mut().zip(inv) {
            acc.merge(v);
        }
    }
    total
}

/// Summarises samples drawn under `cfg`.
pub fn summarize(cfg: &EnsembleConfig, samples: &[EnsembleSample]) -> Result<EnsembleSummary> {
    if samples.is_empty() {
        return invalid("cannot summarise an empty ensemble");
    }
    let (s, a, a2, inv) = accumulate(samples, cfg.m);
    let entropies: Vec<f64> = samples.iter().map(|x| x.entropy).collect();
    let max_entropy = cfg.max_entropy();
    let std_distance_to_max = match max_entropy {
        Some(smax) if samples.len() >= 3 && s.std() > 0.0 => {
            Some(jackknife_std_distance(&entropies, smax)?)
        }
        _ => None,
    };
    let observed_max = entropies.iter().cloned().fold(0.0f64, f64::max);
    let hi = max_entropy
        .filter(|v| *v > 0.0)
        .unwrap_or(if observed_max > 0.0 {
            observed_max
        } else {
            1.0
        });
    Ok(EnsembleSummary {
        config: *cfg,
        entropy: (&s).into(),
        inv_purity: (&a).into(),
        inv_purity_squared: (&a2).into(),
        invariants: inv.iter().map(Estimate::from).collect(),
        max_entropy,
        std_distance_to_max,
        histogram: histogram(&entropies, 0.0, hi, cfg.bins)?,
    })
}

/// Runs the ensemble in parallel; results are ordered by sample index and
/// independent of the thread count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<Ensemble> {
    cfg.check()?;
    let drawn: Vec<Result<EnsembleSample>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| draw_sample(cfg, i))
        .collect();
    let samples = drawn.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = summarize(cfg, &samples)?;
    Ok(Ensemble { samples, summary })
}

/// Energies and unitary of one drawn global state, for audit replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub index: u64,
    pub energies: Vec<f64>,
    /// Rows of `X = Re U`.
    pub x: Vec<Vec<f64>>,
    /// Rows of `Y = Im U`.
    pub y: Vec<Vec<f64>>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// The full global state behind sample `index`.
pub fn sample_state(cfg: &EnsembleConfig, index: u64) -> Result<StateRecord> {
    let mut rng = stream(cfg.seed, index);
    let e = cfg.measure.sample_energies(&mut rng);
    let (_, lead) = sample_haar_columns(cfg.modes(), cfg.m, &mut rng)?;
    let u = sample_haar_completion(&lead, &mut rng);
    Ok(StateRecord {
        index,
        energies: e.energies(),
        x: rows(u.x()),
        y: rows(u.y()),
    })
}

/// Rebuilds `σ = Oᵀ Z² O` from a record.
pub fn replay_state(record: &StateRecord) -> Result<CovarianceMatrix> {
    let n = record.energies.len();
    let matrix = |r: &[Vec<f64>]| -> Result<DMatrix<f64>> {
        if r.len() != n || r.iter().any(|row| row.len() != n) {
            return invalid("unitary in record does not match the number of modes");
        }
        Ok(DMatrix::from_row_iterator(
            n,
            n,
            r.iter().flatten().copied(),
        ))
    };
    let u = HaarUnitary::new(matrix(&record.x)?, matrix(&record.y)?)?;
    let e = EnergyVector::from_energies(&record.energies)?;
    assemble_pure_cm(&e, &unitary_to_ortho_symplectic(&u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{CanonicalConfig, MicrocanonicalConfig};

    fn mc(n: usize, e: f64) -> Measure {
        Measure::Microcanonical(MicrocanonicalConfig::new(n, e).unwrap())
    }

    #[test]
    fn validation_does_not_change_values() {
        let cfg = EnsembleConfig::new(mc(6, 60.0), 2, 20, 11).unwrap();
        for i in 0..20 {
            let a = draw(&cfg, i, false).unwrap();
            let b = draw(&cfg, i, true).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_mode_system_has_zero_entropy() {
        for measure in [
            mc(1, 30.0),
            Measure::Canonical(CanonicalConfig::new(1, 5.0).unwrap()),
        ] {
            let cfg = EnsembleConfig::new(measure, 1, 200, 1)
                .unwrap()
                .with_validation(Validation::All);
            let run = run_ensemble(&cfg).unwrap();
            assert!(run.samples.iter().all(|s| s.entropy.abs() < 1e-10));
        }
    }

    #[test]
    fn full_reduction_is_pure() {
        let cfg = EnsembleConfig::new(mc(5, 50.0), 5, 50, 2)
            .unwrap()
            .with_validation(Validation::All);
        let run = run_ensemble(&cfg).unwrap();
        assert!(run.samples.iter().all(|s| s.entropy.abs() < 1e-9));
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = EnsembleConfig::new(mc(4, 40.0), 1, 300, 5).unwrap();
        let a = run_ensemble(&cfg).unwrap();
        let b = run_ensemble(&cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.summary.histogram.total(), 300);
        let smax = a.summary.max_entropy.unwrap();
        assert!(a.summary.entropy.mean > 0.0 && a.summary.entropy.mean < smax);
    }

    #[test]
    fn replay_reproduces_reduction() {
        let cfg = EnsembleConfig::new(mc(5, 40.0), 2, 10, 8).unwrap();
        let rec = sample_state(&cfg, 3).unwrap();
        let sigma = replay_state(&rec).unwrap();
        let red = reduce(&sigma, &[0, 1]).unwrap();
        let s = draw_sample(&cfg, 3).unwrap();
        assert!((red.determinant().unwrap() - s.inv_purity).abs() < 1e-9 * s.inv_purity);
        let json = serde_json::to_string(&rec).unwrap();
        let back: StateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn config_validation() {
        assert!(EnsembleConfig::new(mc(3, 20.0), 4, 10, 0).is_err());
        assert!(EnsembleConfig::new(mc(3, 20.0), 0, 10, 0).is_err());
        assert!(EnsembleConfig::new(mc(3, 20.0), 1, 0, 0).is_err());
    }
}
