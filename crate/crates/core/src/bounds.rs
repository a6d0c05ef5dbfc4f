//! Linear-programming bounds on the micro-canonical mean entropy of one mode.
//!
//! The unknown distribution of `a = μ⁻²` on `[a_min, a_max]` is replaced by
//! its masses `ν_k` on `M` equal bins `[l(k), l(k+1)]`. Any such
//! distribution with the known first two moments satisfies
//!
//! ```text
//! Σ l(k) ν_k ≤ E[a] ≤ Σ l(k+1) ν_k,     Σ l(k)² ν_k ≤ E[a²] ≤ Σ l(k+1)² ν_k,
//! ```
//!
//! and, as `S(a) = h(√a)` is increasing, `Σ S(l(k)) ν_k ≤ E[S] ≤ Σ S(l(k+1)) ν_k`.
//! Optimising over all feasible `ν` therefore brackets `E[S]` for every `M`.
//! The moments enter as outward-rounded intervals so the brackets survive
//! floating-point evaluation of the closed forms.

use serde::{Deserialize, Serialize};

use crate::analytics::{
    enclose, entropy_from_inv_purity, max_inv_purity, microcanonical_invpurity_moments_exact,
};
use crate::entropy::LogBase;
use crate::error::{invalid, Result};
use crate::measures::MicrocanonicalConfig;
use crate::simplex::{LinearProgram, Relation, Sense, Solution};

/// Equal-width binning of `[a_min, a_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    bins: usize,
    a_min: f64,
    a_max: f64,
}

impl Discretization {
    pub fn new(bins: usize, a_min: f64, a_max: f64) -> Result<Self> {
        if bins < 2 {
            return invalid(format!("need at least 2 bins, got {bins}"));
        }
        if !(a_max > a_min) || !a_min.is_finite() || !a_max.is_finite() {
            return invalid(format!("need a_min < a_max, got [{a_min}, {a_max}]"));
        }
        Ok(Self { bins, a_min, a_max })
    }

    /// `[1, (Ẽ + 4)²/16]` for a single mode under the given energy cap.
    pub fn for_config(bins: usize, cfg: &MicrocanonicalConfig) -> Result<Self> {
        Self::new(bins, 1.0, max_inv_purity(cfg.excess())?)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// Left edge `l(k)` of bin `k`; `l(M) = a_max`.
    pub fn edge(&self, k: usize) -> f64 {
        if k == self.bins {
            self.a_max
        } else {
            self.a_min + k as f64 * (self.a_max - self.a_min) / self.bins as f64
        }
    }
}

/// Enclosures `[lo, hi]` of `E[a]` and `E[a²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentConstraints {
    pub a: (f64, f64),
    pub a2: (f64, f64),
}

impl MomentConstraints {
    pub fn new(a: (f64, f64), a2: (f64, f64)) -> Result<Self> {
        if !(a.0 <= a.1) || !(a2.0 <= a2.1) {
            return invalid("moment intervals must satisfy lo <= hi");
        }
        if !(a.0 >= 1.0) {
            return invalid(format!("E[a] must be at least 1, got {}", a.0));
        }
        if a2.1 < a.0 * a.0 {
            return invalid("E[a²] must be at least E[a]²");
        }
        Ok(Self { a, a2 })
    }

    /// Exactly known moments.
    pub fn point(a: f64, a2: f64) -> Result<Self> {
        Self::new((a, a), (a2, a2))
    }

    /// Closed-form micro-canonical moments, evaluated exactly and rounded outward.
    pub fn microcanonical(cfg: &MicrocanonicalConfig) -> Result<Self> {
        let (a, a2) = microcanonical_invpurity_moments_exact(cfg);
        Self::new(enclose(&a), enclose(&a2))
    }
}

/// Bracket on the mean entropy of a single-mode reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
    pub bins: usize,
    /// Bins carrying weight at the maximiser.
    pub active_bins_upper: Vec<usize>,
    /// Bins carrying weight at the minimiser.
    pub active_bins_lower: Vec<usize>,
    /// Largest primal/dual objective mismatch of the two programs.
    pub duality_gap: f64,
    pub log_base: LogBase,
}

impl BoundResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn program(
    disc: &Discretization,
    moments: &MomentConstraints,
    sense: Sense,
    objective: Vec<f64>,
) -> Result<Solution> {
    let m = disc.bins();
    let left: Vec<f64> = (0..m).map(|k| disc.edge(k)).collect();
    let right: Vec<f64> = (1..=m).map(|k| disc.edge(k)).collect();
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let mut lp = LinearProgram::new(sense, objective)?;
    lp.add_constraint(right.clone(), Relation::Ge, moments.a.0)?;
    lp.add_constraint(left.clone(), Relation::Le, moments.a.1)?;
    lp.add_constraint(sq(&right), Relation::Ge, moments.a2.0)?;
    lp.add_constraint(sq(&left), Relation::Le, moments.a2.1)?;
    lp.add_constraint(vec![1.0; m], Relation::Eq, 1.0)?;
    lp.solve()
}

/// Solves the upper (maximisation) and lower (minimisation) programs.
pub fn solve_moment_program(
    disc: &Discretization,
    moments: &MomentConstraints,
    base: LogBase,
) -> Result<BoundResult> {
    let m = disc.bins();
    let entropies: Vec<f64> = (0..=m)
        .map(|k| entropy_from_inv_purity(disc.edge(k), base))
        .collect::<Result<_>>()?;
    let upper = program(disc, moments, Sense::Maximize, entropies[1..].to_vec())?;
    let lower = program(disc, moments, Sense::Minimize, entropies[..m].to_vec())?;
    Ok(BoundResult {
        lower: lower.objective.max(0.0),
        upper: upper.objective,
        bins: m,
        active_bins_upper: upper.support(),
        active_bins_lower: lower.support(),
        duality_gap: upper.duality_gap().max(lower.duality_gap()),
        log_base: base,
    })
}

/// Bracket on the micro-canonical mean entropy of one mode out of `n > 2`.
pub fn solve_entropy_bounds(
    cfg: &MicrocanonicalConfig,
    bins: usize,
    base: LogBase,
) -> Result<BoundResult> {
    if cfg.modes() <= 2 {
        return invalid(format!(
            "entropy bounds need n > 2 modes, got {}",
            cfg.modes()
        ));
    }
    if cfg.excess() == 0.0 {
        return invalid("entropy bounds need E > 2n");
    }
    let disc = Discretization::for_config(bins, cfg)?;
    solve_moment_program(&disc, &MomentConstraints::microcanonical(cfg)?, base)
}
