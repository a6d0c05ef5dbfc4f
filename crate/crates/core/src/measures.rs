//! Distributions of the per-mode energies `E_j = z_j² + z_j⁻²`.
//!
//! * Micro-canonical: `(E_1, …, E_n)` uniform on `{E_j ≥ 2, Σ E_j ≤ E}`.
//! * Canonical: `E_j − 2` i.i.d. exponential with mean `T`.
//!
//! Energies are kept shifted by the vacuum value (`x_j = E_j − 2`) so that
//! near-vacuum modes do not lose precision.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Flat measure on the energy simplex below a total energy `E` (units `ħω/4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MicrocanonicalRaw")]
pub struct MicrocanonicalConfig {
    n: usize,
    #[serde(rename = "E")]
    energy: f64,
}

#[derive(Deserialize)]
struct MicrocanonicalRaw {
    n: usize,
    #[serde(rename = "E")]
    energy: f64,
}

impl TryFrom<MicrocanonicalRaw> for MicrocanonicalConfig {
    type Error = Error;
    fn try_from(raw: MicrocanonicalRaw) -> Result<Self> {
        Self::new(raw.n, raw.energy)
    }
}

impl MicrocanonicalConfig {
    pub fn new(n: usize, energy: f64) -> Result<Self> {
        if n == 0 {
            return invalid("micro-canonical measure needs at least one mode");
        }
        if !energy.is_finite() || energy < 2.0 * n as f64 {
            return invalid(format!(
                "total energy {energy} is below the vacuum energy {}",
                2 * n
            ));
        }
        Ok(Self { n, energy })
    }

    /// Builds from the excess energy `Ẽ = E − 2n`.
    pub fn from_excess(n: usize, excess: f64) -> Result<Self> {
        Self::new(n, excess + 2.0 * n as f64)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `Ẽ = E − 2n`.
    pub fn excess(&self) -> f64 {
        (self.energy - 2.0 * self.n as f64).max(0.0)
    }
}

/// I.i.d. Boltzmann energies at temperature `T` (`k_B = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CanonicalRaw")]
pub struct CanonicalConfig {
    n: usize,
    #[serde(rename = "T")]
    temperature: f64,
}

#[derive(Deserialize)]
struct CanonicalRaw {
    n: usize,
    #[serde(rename = "T")]
    temperature: f64,
}

impl TryFrom<CanonicalRaw> for CanonicalConfig {
    type Error = Error;
    fn try_from(raw: CanonicalRaw) -> Result<Self> {
        Self::new(raw.n, raw.temperature)
    }
}

impl CanonicalConfig {
    pub fn new(n: usize, temperature: f64) -> Result<Self> {
        if n == 0 {
            return invalid("canonical measure needs at least one mode");
        }
        if !(temperature > 0.0) || !temperature.is_finite() {
            return invalid(format!("temperature must be positive, got {temperature}"));
        }
        Ok(Self { n, temperature })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// Either energy measure, as read from `{"measure": "...", "n": …, "E"|"T": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "lowercase")]
pub enum Measure {
    Microcanonical(MicrocanonicalConfig),
    Canonical(CanonicalConfig),
}

impl Measure {
    pub fn modes(&self) -> usize {
        match self {
            Measure::Microcanonical(c) => c.modes(),
            Measure::Canonical(c) => c.modes(),
        }
    }

    pub fn sample_energies<R: Rng + ?Sized>(&self, rng: &mut R) -> EnergyVector {
        match self {
            Measure::Microcanonical(c) => sample_mc_energies(c, rng),
            Measure::Canonical(c) => sample_can_energies(c, rng),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Microcanonical(_) => "microcanonical",
            Measure::Canonical(_) => "canonical",
        }
    }
}

/// A measure together with the seed of the run, i.e. the JSON config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    #[serde(flatten)]
    pub measure: Measure,
    pub seed: u64,
}

/// Per-mode energies `E_j ≥ 2`, stored as excesses `E_j − 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyVector {
    excess: Vec<f64>,
}

impl EnergyVector {
    pub fn from_energies(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return invalid("energy vector must be non-empty");
        }
        if let Some(e) = energies.iter().find(|e| !(**e >= 2.0) || !e.is_finite()) {
            return invalid(format!("mode energy {e} is below the vacuum value 2"));
        }
        Ok(Self {
            excess: energies.iter().map(|e| e - 2.0).collect(),
        })
    }

    pub fn from_excess(excess: Vec<f64>) -> Result<Self> {
        if excess.is_empty() {
            return invalid("energy vector must be non-empty");
        }
        if let Some(x) = excess.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return invalid(format!("energy excess {x} is negative"));
        }
        Ok(Self { excess })
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            excess: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.excess.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excess.is_empty()
    }

    /// `E_j − 2`.
    pub fn excess(&self) -> &[f64] {
        &self.excess
    }

    /// `E_j`.
    pub fn energies(&self) -> Vec<f64> {
        self.excess.iter().map(|x| x + 2.0).collect()
    }

    /// `|E| = Σ E_j`.
    pub fn total(&self) -> f64 {
        self.excess.iter().sum::<f64>() + 2.0 * self.excess.len() as f64
    }
}

/// Uniform point of the solid simplex `{x ≥ 0, Σ x ≤ Ẽ}` via `n + 1` exponentials.
pub fn sample_mc_energies<R: Rng + ?Sized>(
    cfg: &MicrocanonicalConfig,
    rng: &mut R,
) -> EnergyVector {
    let n = cfg.n;
    let g: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = g.iter().sum();
    let excess = cfg.excess();
    EnergyVector {
        excess: g[..n].iter().map(|gj| excess * gj / total).collect(),
    }
}

/// `E_j = 2 + T · Exp(1)` independently.
pub fn sample_can_energies<R: Rng + ?Sized>(cfg: &CanonicalConfig, rng: &mut R) -> EnergyVector {
    EnergyVector {
        excess: (0..cfg.n)
            .map(|_| cfg.temperature * rng.sample::<f64, _>(Exp1))
            .collect(),
    }
}

/// Marginal density of a single mode energy under the micro-canonical measure.
///
/// `P_n(E_j) = n/Ẽ · (1 − (E_j − 2)/Ẽ)^{n−1}` on `[2, E − 2(n−1)]`, zero beyond.
pub fn mc_marginal_density(e_j: f64, cfg: &MicrocanonicalConfig) -> Result<f64> {
    if !(e_j >= 2.0) {
        return invalid(format!("mode energy {e_j} is below the vacuum value 2"));
    }
    let excess = cfg.excess();
    if excess == 0.0 {
        return invalid("marginal density is a point mass when E = 2n");
    }
    let u = (e_j - 2.0) / excess;
    if u > 1.0 {
        return Ok(0.0);
    }
    let n = cfg.n as f64;
    Ok(n / excess * (1.0 - u).powi(cfg.n as i32 - 1))
}

/// Normalisation `𝒩 = n!/(E − 2n)^n`, the inverse simplex volume.
pub fn mc_normalization(cfg: &MicrocanonicalConfig) -> Result<f64> {
    let excess = cfg.excess();
    if excess == 0.0 {
        return invalid("normalisation diverges for E = 2n (degenerate simplex)");
    }
    // n!/Ẽ^n as a running product to avoid overflow
    Ok((1..=cfg.n).map(|k| k as f64 / excess).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn config_validation() {
        assert!(MicrocanonicalConfig::new(3, 5.9).is_err());
        assert!(MicrocanonicalConfig::new(0, 5.0).is_err());
        assert!(CanonicalConfig::new(3, 0.0).is_err());
        assert!(CanonicalConfig::new(3, f64::NAN).is_err());
        assert_eq!(MicrocanonicalConfig::new(3, 18.0).unwrap().excess(), 12.0);
    }

    #[test]
    fn json_config_round_trip() {
        let s = r#"{"measure":"microcanonical","n":5,"E":50.0,"seed":42}"#;
        let cfg: MeasureConfig = serde_json::from_str(s).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(
            cfg.measure,
            Measure::Microcanonical(MicrocanonicalConfig::new(5, 50.0).unwrap())
        );
        assert_eq!(serde_json::to_string(&cfg).unwrap(), s);

        let s = r#"{"measure":"canonical","n":3,"T":4.0,"seed":1}"#;
        let cfg: MeasureConfig = serde_json::from_str(s).unwrap();
        assert_eq!(
            cfg.measure,
            Measure::Canonical(CanonicalConfig::new(3, 4.0).unwrap())
        );

        assert!(serde_json::from_str::<MeasureConfig>(
            r#"{"measure":"canonical","n":3,"T":-1,"seed":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<MeasureConfig>(
            r#"{"measure":"microcanonical","n":3,"E":1,"seed":1}"#
        )
        .is_err());
    }

    #[test]
    fn degenerate_simplex_is_vacuum() {
        let cfg = MicrocanonicalConfig::new(4, 8.0).unwrap();
        let e = sample_mc_energies(&cfg, &mut stream(1, 0));
        assert_eq!(e.energies(), vec![2.0; 4]);
    }

    #[test]
    fn mc_draws_respect_the_cap() {
        let cfg = MicrocanonicalConfig::new(6, 40.0).unwrap();
        for i in 0..2000 {
            let e = sample_mc_energies(&cfg, &mut stream(3, i));
            assert!(e.energies().iter().all(|&x| x >= 2.0));
            assert!(e.total() <= 40.0 + 1e-12);
        }
    }

    #[test]
    fn marginal_density_cases() {
        let one = MicrocanonicalConfig::new(1, 10.0).unwrap();
        for &e in &[2.0, 5.0, 9.9] {
            assert!((mc_marginal_density(e, &one).unwrap() - 1.0 / 8.0).abs() < 1e-15);
        }
        let three = MicrocanonicalConfig::new(3, 18.0).unwrap();
        assert_eq!(mc_marginal_density(18.0 - 4.0, &three).unwrap(), 0.0);
        assert_eq!(mc_marginal_density(17.0, &three).unwrap(), 0.0);
        assert!(mc_marginal_density(1.5, &three).is_err());
    }

    #[test]
    fn marginal_density_integrates_to_one() {
        for &(n, e) in &[(1usize, 7.0), (3, 18.0), (7, 30.0)] {
            let cfg = MicrocanonicalConfig::new(n, e).unwrap();
            let hi = e - 2.0 * (n as f64 - 1.0);
            let panels = 20_000;
            let h = (hi - 2.0) / panels as f64;
            let mut acc = 0.0;
            for k in 0..=panels {
                let w = if k == 0 || k == panels {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * mc_marginal_density(2.0 + k as f64 * h, &cfg).unwrap();
            }
            assert!((acc * h / 3.0 - 1.0).abs() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn thermodynamic_limit_of_marginal() {
        let n = 10_000;
        let t = 3.0;
        let cfg = MicrocanonicalConfig::new(n, n as f64 * (t + 2.0)).unwrap();
        for &e in &[2.0, 3.0, 6.0, 10.0] {
            let p = mc_marginal_density(e, &cfg).unwrap();
            let boltz = (-(e - 2.0) / t).exp() / t;
            assert!((p / boltz - 1.0).abs() < 0.01, "E={e}: {p} vs {boltz}");
        }
    }

    #[test]
    fn normalization_values() {
        let a = MicrocanonicalConfig::new(1, 4.0).unwrap();
        assert!((mc_normalization(&a).unwrap() - 0.5).abs() < 1e-15);
        let b = MicrocanonicalConfig::from_excess(2, 1.0).unwrap();
        assert!((mc_normalization(&b).unwrap() - 2.0).abs() < 1e-15);
        assert!(mc_normalization(&MicrocanonicalConfig::new(2, 4.0).unwrap()).is_err());
    }

    #[test]
    fn normalization_times_volume_is_one() {
        // volume of {x ≥ 0, Σx ≤ Ẽ} by nested midpoint quadrature, n ≤ 3
        for &(n, excess) in &[(1usize, 3.0), (2, 2.5), (3, 1.5)] {
            let cfg = MicrocanonicalConfig::from_excess(n, excess).unwrap();
            let k = 400;
            let h = excess / k as f64;
            let vol = match n {
                1 => excess,
                2 => (0..k).map(|i| excess - (i as f64 + 0.5) * h).sum::<f64>() * h,
                _ => {
                    let mut v = 0.0;
                    for i in 0..k {
                        let x = (i as f64 + 0.5) * h;
                        let rest = excess - x;
                        v += 0.5 * rest * rest * h;
                    }
                    v
                }
            };
            assert!(
                (mc_normalization(&cfg).unwrap() * vol - 1.0).abs() < 1e-5,
                "n={n}"
            );
        }
    }

    #[test]
    fn canonical_vacuum_limit() {
        let cfg = CanonicalConfig::new(5, 1e-12).unwrap();
        let e = sample_can_energies(&cfg, &mut stream(9, 0));
        assert!(e.energies().iter().all(|&x| (x - 2.0).abs() < 1e-9));
    }

    #[test]
    fn energy_vector_validation() {
        assert!(EnergyVector::from_energies(&[2.0, 1.9]).is_err());
        assert!(EnergyVector::from_energies(&[]).is_err());
        let e = EnergyVector::from_energies(&[2.0, 5.0]).unwrap();
        assert_eq!(e.excess(), &[0.0, 3.0]);
        assert_eq!(e.total(), 7.0);
    }
}
