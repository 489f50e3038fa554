use rayon::prelude::*;
use serde::Serialize;

use crate::error::SolverError;
use crate::solver::{solve, Scenario, Trajectory};

/// Errors below this are treated as exact and produce no order estimate.
pub const EXACT_ERROR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum EmpiricalOrder {
    Value(f64),
    #[serde(serialize_with = "exact_str")]
    Exact,
}

fn exact_str<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("exact")
}

impl EmpiricalOrder {
    pub fn value(self) -> Option<f64> {
        match self {
            EmpiricalOrder::Value(p) => Some(p),
            EmpiricalOrder::Exact => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub h: f64,
    pub error: f64,
    /// `e_{k-1} / e_k`; absent on the first row.
    pub ratio: Option<f64>,
    /// `log₂(e_{k-1} / e_k)`; absent on the first row.
    pub order: Option<EmpiricalOrder>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub reference_steps: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<EmpiricalOrder> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// Smallest numeric order, `None` when every pair was exact.
    pub fn min_order(&self) -> Option<f64> {
        self.orders()
            .into_iter()
            .filter_map(EmpiricalOrder::value)
            .reduce(f64::min)
    }

    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.error < EXACT_ERROR)
    }

    /// Errors never grow by more than `tol` from one level to the next.
    pub fn errors_monotone(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= w[0].error + tol)
    }
}

/// The same solve on a grid `refine_factor` times finer.
pub fn fine_grid_oracle(sc: &Scenario, refine_factor: usize) -> Result<Trajectory, SolverError> {
    if refine_factor < 2 {
        return Err(SolverError::RefineFactor(refine_factor));
    }
    solve(&sc.refined(refine_factor))
}

/// Sup over the coarse nodes of the distance to the reference, taking the
/// larger of the state and (for second order) position discrepancies.
pub fn compare_with_oracle(traj: &Trajectory, oracle: &Trajectory) -> Result<f64, SolverError> {
    let (coarse, fine) = (traj.grid().steps(), oracle.grid().steps());
    if fine % coarse != 0 || traj.grid().horizon() != oracle.grid().horizon() {
        return Err(SolverError::Incompatible(format!(
            "reference with {fine} steps does not contain a {coarse}-step grid"
        )));
    }
    if traj.order() != oracle.order() {
        return Err(SolverError::Incompatible("trajectory orders differ".into()));
    }
    let stride = fine / coarse;
    let sup = |a: &[crate::geometry::Point], b: &[crate::geometry::Point]| {
        a.iter()
            .enumerate()
            .map(|(i, p)| (p - &b[i * stride]).norm())
            .fold(0.0, f64::max)
    };
    let mut err = sup(traj.states(), oracle.states());
    if let (Some(x), Some(y)) = (traj.positions(), oracle.positions()) {
        err = err.max(sup(x, y));
    }
    Ok(err)
}

/// Solves at `n, 2n, …, 2^(levels-1) n` steps and measures each against a
/// reference with `2^levels · refine_factor · n` steps.
pub fn convergence_study(
    sc: &Scenario,
    levels: usize,
    refine_factor_for_reference: usize,
) -> Result<ConvergenceTable, SolverError> {
    if levels < 3 {
        return Err(SolverError::TooFewLevels(levels));
    }
    if refine_factor_for_reference == 0 {
        return Err(SolverError::RefineFactor(0));
    }
    let base = sc.grid().steps();
    let reference_steps = base << levels;
    let reference_steps = reference_steps * refine_factor_for_reference;
    let mut jobs: Vec<usize> = (0..levels).map(|k| base << k).collect();
    jobs.push(reference_steps);
    let solved: Vec<Trajectory> = jobs
        .par_iter()
        .map(|&steps| solve(&sc.with_steps(steps)))
        .collect::<Result<_, _>>()?;
    let (reference, levels_solved) = solved.split_last().expect("at least one job");
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    for tr in levels_solved {
        let error = compare_with_oracle(tr, reference)?;
        let (ratio, order) = match rows.last() {
            None => (None, None),
            Some(prev) => {
                let ratio = prev.error / error;
                let order = if error < EXACT_ERROR {
                    EmpiricalOrder::Exact
                } else {
                    EmpiricalOrder::Value(ratio.log2())
                };
                (Some(ratio), Some(order))
            }
        };
        rows.push(ConvergenceRow {
            steps: tr.grid().steps(),
            h: tr.grid().step_size(),
            error,
            ratio,
            order,
        });
    }
    Ok(ConvergenceTable {
        reference_steps,
        rows,
    })
}
