//! Dense revised simplex for linear programs with few constraints.
//!
//! Solves `optimise cᵀx` subject to `a_iᵀx {≤, ≥, =} b_i` and `x ≥ 0`. The
//! basis has one column per constraint, so every iteration refactorises a
//! tiny matrix from the original data and prices all columns against the
//! simplex multipliers. The multipliers at the optimum are returned as a
//! dual certificate.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Feasibility tolerance on (scaled) constraints.
pub const TOL_FEAS: f64 = 1e-9;
/// Pricing tolerance on reduced costs.
const TOL_PRICE: f64 = 1e-12;
/// Pivot tolerance in the ratio test.
const TOL_PIVOT: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// A linear program over non-negative variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    rows: Vec<Row>,
    max_iterations: usize,
}

/// Optimal vertex together with its dual certificate.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers of the constraints, in the original row scaling.
    pub duals: Vec<f64>,
    /// `bᵀy`.
    pub dual_objective: f64,
    /// Largest violation of dual feasibility over all columns.
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl Solution {
    /// `|cᵀx − bᵀy|`.
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }

    /// Indices of the non-zero variables.
    pub fn support(&self) -> Vec<usize> {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Result<Self> {
        if objective.is_empty() {
            return invalid("linear program needs at least one variable");
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return invalid("objective coefficients must be finite");
        }
        Ok(Self {
            sense,
            objective,
            rows: Vec::new(),
            max_iterations: 100_000,
        })
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.objective.len() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) || !rhs.is_finite() {
            return invalid("constraint coefficients must be finite");
        }
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<Solution> {
        if self.rows.is_empty() {
            return invalid("linear program needs at least one constraint");
        }
        Tableau::build(self).run(self)
    }
}

/// Standard form `Ax = b, x ≥ 0, b ≥ 0` with columns
/// `[structural | slack | artificial]`.
struct Tableau {
    rows: usize,
    structural: usize,
    /// Column-major `A`; slack and artificial columns are implicit.
    a: Vec<f64>,
    slack_sign: Vec<f64>,
    b: Vec<f64>,
    /// Multiplier turning a scaled row back into the original one.
    row_factor: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let rows = lp.rows.len();
        let structural = lp.objective.len();
        let mut a = vec![0.0; rows * structural];
        let mut slack_sign = vec![0.0; rows];
        let mut b = vec![0.0; rows];
        let mut row_factor = vec![1.0; rows];
        for (i, row) in lp.rows.iter().enumerate() {
            let scale = row
                .coeffs
                .iter()
                .fold(row.rhs.abs(), |acc, c| acc.max(c.abs()));
            let mut f = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            let mut sign = match row.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => 0.0,
            };
            if row.rhs < 0.0 {
                f = -f;
                sign = -sign;
            }
            for (j, c) in row.coeffs.iter().enumerate() {
                a[j * rows + i] = c * f;
            }
            slack_sign[i] = sign;
            b[i] = row.rhs * f;
            row_factor[i] = f;
        }
        Self {
            rows,
            structural,
            a,
            slack_sign,
            b,
            row_factor,
        }
    }

    fn total_columns(&self) -> usize {
        self.structural + 2 * self.rows
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.structural + self.rows
    }

    fn column(&self, j: usize) -> DVector<f64> {
        let m = self.rows;
        if j < self.structural {
            DVector::from_column_slice(&self.a[j * m..(j + 1) * m])
        } else if j < self.structural + m {
            let i = j - self.structural;
            let mut v = DVector::zeros(m);
            v[i] = self.slack_sign[i];
            v
        } else {
            let mut v = DVector::zeros(m);
            v[j - self.structural - m] = 1.0;
            v
        }
    }

    /// `yᵀA_j`.
    fn price(&self, y: &DVector<f64>, j: usize) -> f64 {
        let m = self.rows;
        if j < self.structural {
            self.a[j * m..(j + 1) * m]
                .iter()
                .zip(y.iter())
                .map(|(a, y)| a * y)
                .sum()
        } else if j < self.structural + m {
            let i = j - self.structural;
            self.slack_sign[i] * y[i]
        } else {
            y[j - self.structural - m]
        }
    }

    fn basis_inverse(&self, basis: &[usize]) -> Result<DMatrix<f64>> {
        let m = self.rows;
        let mut bm = DMatrix::zeros(m, m);
        for (k, &j) in basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        bm.try_inverse()
            .ok_or_else(|| Error::Infeasible("basis matrix became singular".into()))
    }

    /// Optimises `cost` from `basis`; columns with `allowed[j] == false` never enter.
    fn optimise(
        &self,
        basis: &mut [usize],
        cost: &dyn Fn(usize) -> f64,
        allowed: &dyn Fn(usize) -> bool,
        iterations: &mut usize,
        limit: usize,
    ) -> Result<()> {
        let m = self.rows;
        let b = DVector::from_column_slice(&self.b);
        let mut degenerate = 0usize;
        let mut in_basis = vec![false; self.total_columns()];
        for &j in basis.iter() {
            in_basis[j] = true;
        }
        loop {
            if *iterations >= limit {
                return invalid(format!("simplex did not converge in {limit} iterations"));
            }
            let binv = self.basis_inverse(basis)?;
            let xb = &binv * &b;
            let cb = DVector::from_fn(m, |k, _| cost(basis[k]));
            let y = binv.tr_mul(&cb);

            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -TOL_PRICE;
            for (j, &basic) in in_basis.iter().enumerate() {
                if basic || !allowed(j) {
                    continue;
                }
                let d = cost(j) - self.price(&y, j);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };

            let w = &binv * self.column(q);
            let mut leaving: Option<(usize, f64)> = None;
            for k in 0..m {
                if w[k] > TOL_PIVOT {
                    let ratio = xb[k].max(0.0) / w[k];
                    let better = match leaving {
                        None => true,
                        Some((l, r)) => {
                            ratio < r - 1e-15 || (ratio <= r + 1e-15 && basis[k] < basis[l])
                        }
                    };
                    if better {
                        leaving = Some((k, ratio));
                    }
                }
            }
            let Some((r, step)) = leaving else {
                return invalid("linear program is unbounded");
            };
            degenerate = if step <= 1e-15 { degenerate + 1 } else { 0 };
            in_basis[basis[r]] = false;
            in_basis[q] = true;
            basis[r] = q;
            *iterations += 1;
        }
    }

    fn run(&self, lp: &LinearProgram) -> Result<Solution> {
        let m = self.rows;
        let s = self.structural;
        let mut basis: Vec<usize> = (0..m).map(|i| s + m + i).collect();
        let mut iterations = 0;

        // phase I: drive the artificials to zero
        let phase1 = |j: usize| if self.is_artificial(j) { 1.0 } else { 0.0 };
        self.optimise(
            &mut basis,
            &phase1,
            &|_| true,
            &mut iterations,
            lp.max_iterations,
        )?;
        let binv = self.basis_inverse(&basis)?;
        let xb = &binv * DVector::from_column_slice(&self.b);
        let infeasibility: f64 = basis
            .iter()
            .zip(xb.iter())
            .filter(|(j, _)| self.is_artificial(**j))
            .map(|(_, v)| v.max(0.0))
            .sum();
        if infeasibility > TOL_FEAS {
            return Err(Error::Infeasible(format!(
                "constraints cannot be met (residual {infeasibility:e})"
            )));
        }
        // pivot basic artificials out where possible
        for k in 0..m {
            if !self.is_artificial(basis[k]) {
                continue;
            }
            let binv = self.basis_inverse(&basis)?;
            let row = binv.row(k);
            let replacement = (0..s + m)
                .filter(|j| !basis.contains(j))
                .map(|j| (j, (row * self.column(j))[0].abs()))
                .filter(|(_, v)| *v > 1e-9)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = replacement {
                basis[k] = j;
            }
        }

        // phase II
        let sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let cost = |j: usize| if j < s { sign * lp.objective[j] } else { 0.0 };
        let allowed = |j: usize| !self.is_artificial(j);
        self.optimise(
            &mut basis,
            &cost,
            &allowed,
            &mut iterations,
            lp.max_iterations,
        )?;

        let binv = self.basis_inverse(&basis)?;
        let xb = &binv * DVector::from_column_slice(&self.b);
        let mut x = vec![0.0; s];
        for (k, &j) in basis.iter().enumerate() {
            if j < s {
                x[j] = xb[k].max(0.0);
            }
        }
        let cb = DVector::from_fn(m, |k, _| cost(basis[k]));
        let y = binv.tr_mul(&cb);
        let dual_infeasibility = (0..s + m)
            .map(|j| -(cost(j) - self.price(&y, j)))
            .fold(0.0f64, f64::max);

        let objective: f64 = x.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
        let duals: Vec<f64> = (0..m).map(|i| sign * y[i] * self.row_factor[i]).collect();
        let dual_objective: f64 = duals.iter().zip(&lp.rows).map(|(y, r)| y * r.rhs).sum();
        Ok(Solution {
            x,
            objective,
            duals,
            dual_objective,
            dual_infeasibility,
            iterations,
        })
    }
}
