//! Closed-form statistics of single-mode reductions and extremal entropies.
//!
//! For a single-mode reduction `a = μ⁻² = det γ`. Its first two moments are
//! known in closed form over the Haar measure (for fixed energies) and over
//! the canonical and micro-canonical energy measures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::entropy::{entropic_h, LogBase};
use crate::error::{invalid, Result};
use crate::measures::{CanonicalConfig, EnergyVector, MicrocanonicalConfig};

/// First and second moments of the inverse squared purity `a = μ⁻²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    /// `E[a]`.
    pub mean_a: f64,
    /// `E[a²]`.
    pub mean_a2: f64,
}

impl MomentPair {
    pub fn variance(&self) -> f64 {
        (self.mean_a2 - self.mean_a * self.mean_a).max(0.0)
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Distance of `value` from the mean in units of the standard deviation.
    pub fn std_distance(&self, value: f64) -> f64 {
        (value - self.mean_a) / self.std()
    }
}

/// Page's mean entanglement entropy (nats) of an `m`-dimensional subsystem
/// of a random pure state in `ℂ^m ⊗ ℂ^n`.
pub fn page_entropy(m: usize, n: usize) -> Result<f64> {
    if m == 0 || m > n {
        return invalid(format!("need 1 <= m <= n, got m={m}, n={n}"));
    }
    let harmonic: f64 = (n + 1..=m * n).map(|k| 1.0 / k as f64).sum();
    Ok(harmonic - (m as f64 - 1.0) / (2.0 * n as f64))
}

/// Sums over ordered tuples of distinct indices, from power sums.
struct DistinctSums {
    /// `Σ_{j≠k} E_j E_k`.
    s11: f64,
    /// `Σ_{j≠k} E_j² E_k²`.
    s22: f64,
    /// `Σ_{j≠k≠l} E_j² E_k E_l`.
    s211: f64,
    /// `Σ_{j≠k≠l≠m} E_j E_k E_l E_m`.
    s1111: f64,
    /// `Σ_j E_j²`.
    p2: f64,
}

impl DistinctSums {
    fn new(e: &[f64]) -> Self {
        let n = e.len();
        let p = |k: i32| e.iter().map(|x| x.powi(k)).sum::<f64>();
        let (p1, p2, p3, p4) = (p(1), p(2), p(3), p(4));
        let s11 = if n >= 2 { p1 * p1 - p2 } else { 0.0 };
        let s22 = if n >= 2 { p2 * p2 - p4 } else { 0.0 };
        let s211 = if n >= 3 {
            p2 * p1 * p1 - 2.0 * p3 * p1 - p2 * p2 + 2.0 * p4
        } else {
            0.0
        };
        let s1111 = if n >= 4 {
            p1.powi(4) - 6.0 * p2 * p1 * p1 + 3.0 * p2 * p2 + 8.0 * p3 * p1 - 6.0 * p4
        } else {
            0.0
        };
        Self {
            s11,
            s22,
            s211,
            s1111,
            p2,
        }
    }
}

/// Haar averages of `a` and `a²` for a single-mode reduction at fixed energies.
pub fn haar_invpurity_moments(e: &EnergyVector) -> MomentPair {
    let energies = e.energies();
    let n = energies.len() as f64;
    let s = DistinctSums::new(&energies);
    let mean_a = s.s11 / (4.0 * (n + 1.0) * n) + 2.0 / (n + 1.0);
    // (n−1)!/(n+3)!
    let ratio = 1.0 / (n * (n + 1.0) * (n + 2.0) * (n + 3.0));
    let bracket = s.s1111 + 8.0 * s.s211 + 12.0 * s.s22 + (96.0 + 16.0 * (n - 2.0)) * s.s11
        - 32.0 * (n - 1.0) * s.p2
        + 128.0 * n * (n - 1.0)
        + 384.0 * n;
    MomentPair {
        mean_a,
        mean_a2: ratio * bracket / 16.0,
    }
}

/// Canonical averages of `a` and `a²` at temperature `T`.
pub fn canonical_invpurity_moments(cfg: &CanonicalConfig) -> MomentPair {
    let n = cfg.modes() as f64;
    let t = cfg.temperature();
    let mean_a = 0.25 * (n - 1.0) / (n + 1.0) * (t * t + 4.0 * t) + 1.0;
    // n!/(n+3)!
    let ratio = 1.0 / ((n + 1.0) * (n + 2.0) * (n + 3.0));
    let poly = (n * n + 11.0 * n + 22.0) * t.powi(4)
        + 8.0 * (n + 1.0) * (n + 6.0) * t.powi(3)
        + 8.0 * (3.0 * n * n + 15.0 * n + 10.0) * t * t
        + 32.0 * (n + 3.0) * (n + 2.0) * t;
    MomentPair {
        mean_a,
        mean_a2: ratio * (n - 1.0) * poly / 16.0 + 1.0,
    }
}

/// Micro-canonical averages of `a` and `a²` under the total-energy cap `E`.
pub fn microcanonical_invpurity_moments(cfg: &MicrocanonicalConfig) -> MomentPair {
    let n = cfg.modes() as f64;
    let x = cfg.excess();
    let mean_a =
        (n - 1.0) / (4.0 * (n + 2.0) * (n + 1.0) * (n + 1.0)) * (x * x + 4.0 * (n + 2.0) * x) + 1.0;
    // (n!)²/((n+4)!(n+3)!)
    let r3 = (n + 1.0) * (n + 2.0) * (n + 3.0);
    let ratio = 1.0 / (r3 * r3 * (n + 4.0));
    let poly = (n * n + 11.0 * n + 22.0) * x.powi(4)
        + 8.0 * (n + 6.0) * (n + 4.0) * (n + 1.0) * x.powi(3)
        + 8.0 * (n + 4.0) * (n + 3.0) * (3.0 * n * n + 15.0 * n + 10.0) * x * x
        + 32.0 * (n + 4.0) * (n + 3.0).powi(2) * (n + 2.0).powi(2) * x;
    MomentPair {
        mean_a,
        mean_a2: ratio * (n - 1.0) * poly / 16.0 + 1.0,
    }
}

/// The micro-canonical moments in exact rational arithmetic, `Ẽ` taken as the
/// exact binary value of the configured excess energy.
pub fn microcanonical_invpurity_moments_exact(
    cfg: &MicrocanonicalConfig,
) -> (BigRational, BigRational) {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let n = cfg.modes() as i64;
    let x = BigRational::from_float(cfg.excess()).unwrap_or_else(BigRational::zero);
    let x2 = &x * &x;
    let x3 = &x2 * &x;
    let x4 = &x3 * &x;
    let mean_a = int(n - 1) / int(4 * (n + 2) * (n + 1) * (n + 1)) * (&x2 + int(4 * (n + 2)) * &x)
        + BigRational::one();
    let r3 = int((n + 1) * (n + 2) * (n + 3));
    let denom = &r3 * &r3 * int(16 * (n + 4));
    let poly = int(n * n + 11 * n + 22) * &x4
        + int(8 * (n + 6) * (n + 4) * (n + 1)) * &x3
        + int(8 * (n + 4) * (n + 3) * (3 * n * n + 15 * n + 10)) * &x2
        + int(32 * (n + 4) * (n + 3) * (n + 3) * (n + 2) * (n + 2)) * &x;
    let mean_a2 = int(n - 1) * poly / denom + BigRational::one();
    (mean_a, mean_a2)
}

/// Smallest `f64` interval `[lo, hi]` containing the exact rational `q`.
pub fn enclose(q: &BigRational) -> (f64, f64) {
    let approx = q.to_f64().unwrap_or(f64::NAN);
    match BigRational::from_float(approx) {
        Some(r) if &r == q => (approx, approx),
        Some(r) if &r < q => (approx, approx.next_up()),
        Some(_) => (approx.next_down(), approx),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

/// Largest `a = μ⁻²` of a single mode for a total excess energy `Ẽ`.
pub fn max_inv_purity(excess: f64) -> Result<f64> {
    if !(excess >= 0.0) || !excess.is_finite() {
        return invalid(format!("excess energy must be non-negative, got {excess}"));
    }
    Ok((excess + 4.0) * (excess + 4.0) / 16.0)
}

/// Largest entropy of `m` modes entangled with `n ≥ m` further modes at total energy `E`.
///
/// Attained by `m` two-mode squeezed pairs with equal symplectic eigenvalue
/// `ν = (E − 2(n − m))/(4m)`, the remaining `n − m` modes in the vacuum.
pub fn max_entropy(m: usize, n: usize, energy: f64, base: LogBase) -> Result<f64> {
    if m == 0 || m > n {
        return invalid(format!("need 1 <= m <= n, got m={m}, n={n}"));
    }
    let nu = (energy - 2.0 * (n as f64 - m as f64)) / (4.0 * m as f64);
    if !(nu >= 1.0) {
        return invalid(format!(
            "energy {energy} is below the vacuum energy {}",
            2 * (n + m)
        ));
    }
    Ok(m as f64 * entropic_h(nu, base)?)
}

/// Largest entropy of an `m`-mode subsystem of a pure state of `total` modes with energy `E`.
pub fn max_subsystem_entropy(m: usize, total: usize, energy: f64, base: LogBase) -> Result<f64> {
    if m == 0 || m > total {
        return invalid(format!("need 1 <= m <= N, got m={m}, N={total}"));
    }
    let k = m.min(total - m);
    if k == 0 {
        if energy < 2.0 * total as f64 {
            return invalid(format!(
                "energy {energy} is below the vacuum energy {}",
                2 * total
            ));
        }
        return Ok(0.0);
    }
    max_entropy(k, total - k, energy, base)
}

/// Thermodynamic-limit mean entropy `m·h(1 + T/2)` of `m` modes at temperature `T`.
pub fn asymptotic_entropy(m: usize, temperature: f64, base: LogBase) -> Result<f64> {
    if !(temperature >= 0.0) {
        return invalid(format!(
            "temperature must be non-negative, got {temperature}"
        ));
    }
    Ok(m as f64 * entropic_h(1.0 + 0.5 * temperature, base)?)
}

fn binomial(m: usize, d: usize) -> f64 {
    (1..=d).fold(1.0, |acc, k| acc * (m + 1 - k) as f64 / k as f64)
}

/// Thermodynamic-limit mean of the invariant `Δ_d` of `m` modes: `C(m,d)(1 + T/2)^{2d}`.
pub fn asymptotic_invariant(d: usize, m: usize, temperature: f64) -> Result<f64> {
    if d == 0 || d > m {
        return invalid(format!("need 1 <= d <= m, got d={d}, m={m}"));
    }
    if !(temperature >= 0.0) {
        return invalid(format!(
            "temperature must be non-negative, got {temperature}"
        ));
    }
    Ok(binomial(m, d) * (1.0 + 0.5 * temperature).powi(2 * d as i32))
}

/// Single-mode entropy `h(μ⁻¹)` as a function of the purity `μ`.
pub fn entropy_from_purity(mu: f64, base: LogBase) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return invalid(format!("purity must lie in (0, 1], got {mu}"));
    }
    if mu == 1.0 {
        return Ok(0.0);
    }
    entropic_h(1.0 / mu, base)
}

/// Single-mode entropy as a function of `a = μ⁻²`, i.e. `h(√a)`.
pub fn entropy_from_inv_purity(a: f64, base: LogBase) -> Result<f64> {
    if !(a >= 1.0) {
        return invalid(format!("inverse squared purity must be >= 1, got {a}"));
    }
    entropic_h(a.sqrt(), base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_haar(e: &[f64]) -> MomentPair {
        let n = e.len();
        let nf = n as f64;
        let mut s11 = 0.0;
        let mut s22 = 0.0;
        let mut s211 = 0.0;
        let mut s1111 = 0.0;
        for j in 0..n {
            for k in 0..n {
                if k == j {
                    continue;
                }
                s11 += e[j] * e[k];
                s22 += e[j] * e[j] * e[k] * e[k];
                for l in 0..n {
                    if l == j || l == k {
                        continue;
                    }
                    s211 += e[j] * e[j] * e[k] * e[l];
                    for q in 0..n {
                        if q == j || q == k || q == l {
                            continue;
                        }
                        s1111 += e[j] * e[k] * e[l] * e[q];
                    }
                }
            }
        }
        let p2: f64 = e.iter().map(|x| x * x).sum();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        MomentPair {
            mean_a: s11 / (4.0 * (nf + 1.0) * nf) + 2.0 / (nf + 1.0),
            mean_a2: fact(n - 1) / fact(n + 3) / 16.0
                * (s1111 + 8.0 * s211 + 12.0 * s22 + (96.0 + 16.0 * (nf - 2.0)) * s11
                    - 32.0 * (nf - 1.0) * p2
                    + 128.0 * nf * (nf - 1.0)
                    + 384.0 * nf),
        }
    }

    #[test]
    fn power_sums_match_naive_loops() {
        let pool = [2.0, 3.5, 7.25, 2.0, 11.0, 4.4];
        for n in 1..=6 {
            let e = &pool[..n];
            let fast = haar_invpurity_moments(&EnergyVector::from_energies(e).unwrap());
            let slow = naive_haar(e);
            assert!(
                (fast.mean_a - slow.mean_a).abs() < 1e-12 * slow.mean_a,
                "n={n}"
            );
            assert!(
                (fast.mean_a2 - slow.mean_a2).abs() < 1e-11 * slow.mean_a2,
                "n={n}"
            );
        }
    }

    #[test]
    fn haar_vacuum_is_pure() {
        for n in 1..10 {
            let m = haar_invpurity_moments(&EnergyVector::vacuum(n));
            assert!((m.mean_a - 1.0).abs() < 1e-13);
            assert!((m.mean_a2 - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn page_values() {
        assert_eq!(page_entropy(1, 7).unwrap(), 0.0);
        assert!((page_entropy(2, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let m = 400;
        let approx = (m as f64).ln() - 0.5;
        assert!((page_entropy(m, m).unwrap() - approx).abs() < 1e-2);
        assert!(page_entropy(3, 2).is_err());
    }

    #[test]
    fn canonical_single_mode_and_limit() {
        let m = canonical_invpurity_moments(&CanonicalConfig::new(1, 5.0).unwrap());
        assert_eq!((m.mean_a, m.mean_a2), (1.0, 1.0));
        let t = 3.0;
        let big = canonical_invpurity_moments(&CanonicalConfig::new(1_000_000, t).unwrap());
        assert!((big.mean_a - (1.0 + t / 2.0).powi(2)).abs() < 1e-4);
        // the variance vanishes in the limit
        assert!(big.variance() / big.mean_a.powi(2) < 1e-4);
    }

    #[test]
    fn microcanonical_vacuum() {
        let m = microcanonical_invpurity_moments(&MicrocanonicalConfig::new(6, 12.0).unwrap());
        assert_eq!((m.mean_a, m.mean_a2), (1.0, 1.0));
    }

    #[test]
    fn exact_and_float_agree() {
        for &(n, x) in &[(3usize, 12.0), (5, 50.0), (20, 200.0), (32, 64.0)] {
            let cfg = MicrocanonicalConfig::from_excess(n, x).unwrap();
            let f = microcanonical_invpurity_moments(&cfg);
            let (a, a2) = microcanonical_invpurity_moments_exact(&cfg);
            let (lo, hi) = enclose(&a);
            assert!(lo <= hi && hi - lo <= 2.0 * f64::EPSILON * hi);
            assert!((f.mean_a - lo).abs() < 1e-12 * lo);
            let (lo2, _) = enclose(&a2);
            assert!((f.mean_a2 - lo2).abs() < 1e-12 * lo2);
        }
    }

    #[test]
    fn enclose_brackets() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let (lo, hi) = enclose(&third);
        assert!(BigRational::from_float(lo).unwrap() < third);
        assert!(BigRational::from_float(hi).unwrap() > third);
        assert_eq!(enclose(&BigRational::from_float(0.5).unwrap()), (0.5, 0.5));
    }

    #[test]
    fn concentration_distances_from_closed_forms() {
        for &(n, expect) in &[(5usize, 16.5), (20, 257.1)] {
            let x = 10.0 * n as f64;
            let m =
                microcanonical_invpurity_moments(&MicrocanonicalConfig::from_excess(n, x).unwrap());
            let d = m.std_distance(max_inv_purity(x).unwrap());
            assert!((d - expect).abs() < 0.1, "n={n}: {d}");
        }
    }

    #[test]
    fn max_inv_purity_values() {
        assert_eq!(max_inv_purity(0.0).unwrap(), 1.0);
        assert_eq!(max_inv_purity(4.0).unwrap(), 4.0);
        assert!(max_inv_purity(-1.0).is_err());
    }

    #[test]
    fn max_entropy_cases() {
        assert_eq!(max_entropy(2, 5, 14.0, LogBase::Two).unwrap(), 0.0);
        assert!(max_entropy(2, 5, 13.0, LogBase::Two).is_err());
        // single mode: agrees with the maximal inverse purity
        let (n, e) = (4usize, 30.0);
        let excess = e - 2.0 * (n + 1) as f64;
        let via_purity = entropic_h(max_inv_purity(excess).unwrap().sqrt(), LogBase::Two).unwrap();
        assert!((max_entropy(1, n, e, LogBase::Two).unwrap() - via_purity).abs() < 1e-12);
        // the complement convention is symmetric for a pure global state
        assert_eq!(
            max_subsystem_entropy(7, 10, 60.0, LogBase::E).unwrap(),
            max_subsystem_entropy(3, 10, 60.0, LogBase::E).unwrap()
        );
        assert_eq!(max_subsystem_entropy(4, 4, 20.0, LogBase::E).unwrap(), 0.0);
    }

    #[test]
    fn asymptotics() {
        assert_eq!(asymptotic_entropy(3, 0.0, LogBase::Two).unwrap(), 0.0);
        assert!((asymptotic_entropy(2, 4.0, LogBase::Two).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(asymptotic_invariant(1, 1, 2.0).unwrap(), 4.0);
        assert_eq!(asymptotic_invariant(2, 4, 0.0).unwrap(), 6.0);
        assert!(asymptotic_invariant(3, 2, 1.0).is_err());
    }

    #[test]
    fn purity_entropy_link() {
        assert_eq!(entropy_from_purity(1.0, LogBase::Two).unwrap(), 0.0);
        assert_eq!(
            entropy_from_purity(0.5, LogBase::Two).unwrap(),
            entropic_h(2.0, LogBase::Two).unwrap()
        );
        assert!(entropy_from_purity(0.0, LogBase::Two).is_err());
        assert!(entropy_from_purity(1.1, LogBase::Two).is_err());
        assert_eq!(
            entropy_from_inv_purity(4.0, LogBase::Two).unwrap(),
            entropy_from_purity(0.5, LogBase::Two).unwrap()
        );
    }
}
