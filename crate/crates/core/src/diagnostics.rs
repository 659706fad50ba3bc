//! Error norms over the reporting grid and convergence-order estimation.
//!
//! Errors are measured on G = {x_j} x {t_k} x {s_m} with j = 0..L and
//! k, m = 1..M, so |G| = (L+1) M^2 — the initial-data slices are excluded,
//! the spatial endpoints included. The discrete l2 norm is the root mean
//! square over G; linf is the maximum. A convergence study runs the same
//! problem over an increasing list of M and reports the pairwise observed
//! order, which for doubled M is log2(e_M / e_2M).

use crate::error::SolverError;
use crate::grid::TimeGrid;
use crate::nonlinear::{picard_solve, NonlinearProblem};
use crate::ProfileFn;
use ndarray::Array3;

/// Error norms of one run, with the parameters that produced them.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    /// |G| = (L+1) M^2.
    pub grid_points: usize,
    pub m_steps: usize,
    pub l_intervals: usize,
    /// Picard sweeps, for nonlinear runs.
    pub q: Option<usize>,
    /// State-rule index (point count minus one), for nonlinear runs.
    pub j0: Option<usize>,
}

/// Discrete l2 and max norms of approx - exact over the reporting grid.
/// Both sample sets must have the layout (L+1, M, M) produced by
/// `SpectralField::sample_on_grid` / `exact_on_grid`.
pub fn discrete_norms(
    approx: &Array3<f64>,
    exact: &Array3<f64>,
) -> Result<ErrorReport, SolverError> {
    if approx.dim() != exact.dim() {
        return Err(SolverError::DimensionMismatch(format!(
            "sample grids differ: {:?} vs {:?}",
            approx.dim(),
            exact.dim()
        )));
    }
    let (l_plus_1, m_steps, m_other) = approx.dim();
    if l_plus_1 == 0 || m_steps == 0 || m_steps != m_other {
        return Err(SolverError::DimensionMismatch(format!(
            "not a (L+1, M, M) reporting grid: {:?}",
            approx.dim()
        )));
    }
    let mut sum_sq = 0.0_f64;
    let mut max_abs = 0.0_f64;
    for (a, e) in approx.iter().zip(exact.iter()) {
        let err = (a - e).abs();
        sum_sq += err * err;
        max_abs = max_abs.max(err);
    }
    let grid_points = l_plus_1 * m_steps * m_steps;
    Ok(ErrorReport {
        l2: (sum_sq / grid_points as f64).sqrt(),
        linf: max_abs,
        grid_points,
        m_steps,
        l_intervals: l_plus_1 - 1,
        q: None,
        j0: None,
    })
}

/// Exact-solution samples on the reporting grid, layout (L+1, M, M),
/// matching `SpectralField::sample_on_grid`.
pub fn exact_on_grid(exact: &ProfileFn, grid: &TimeGrid, l_intervals: usize) -> Array3<f64> {
    let m_steps = grid.steps;
    let mut out = Array3::zeros((l_intervals + 1, m_steps, m_steps));
    for j in 0..=l_intervals {
        let x = std::f64::consts::PI * j as f64 / l_intervals as f64;
        for k in 1..=m_steps {
            let t = grid.node(k);
            for m in 1..=m_steps {
                out[(j, k - 1, m - 1)] = exact(x, t, grid.node(m));
            }
        }
    }
    out
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy)]
pub struct StudyRow {
    pub m_steps: usize,
    pub l2: f64,
    pub linf: f64,
    /// Observed order against the previous row, absent on the first row or
    /// when an error vanishes: log(e_prev / e_cur) / log(M_cur / M_prev).
    pub order_l2: Option<f64>,
    pub order_linf: Option<f64>,
}

/// Observed convergence order from one lattice refinement, `None` when either
/// error is zero or non-finite.
pub fn pairwise_order(err_prev: f64, err_cur: f64, m_prev: usize, m_cur: usize) -> Option<f64> {
    if !(err_prev > 0.0 && err_cur > 0.0 && err_prev.is_finite() && err_cur.is_finite()) {
        return None;
    }
    Some((err_prev / err_cur).ln() / (m_cur as f64 / m_prev as f64).ln())
}

/// Run `run` once per lattice size in `m_list` (strictly increasing, at
/// least two entries) and tabulate both norms with pairwise observed orders.
pub fn convergence_study(
    run: impl Fn(usize) -> Result<ErrorReport, SolverError>,
    m_list: &[usize],
) -> Result<Vec<StudyRow>, SolverError> {
    if m_list.len() < 2 {
        return Err(SolverError::InvalidParameter(
            "convergence study needs at least two lattice sizes".into(),
        ));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolverError::InvalidParameter(
            "lattice sizes must be strictly increasing".into(),
        ));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let report = run(m)?;
        let (order_l2, order_linf) = match rows.last() {
            Some(prev) => (
                pairwise_order(prev.l2, report.l2, prev.m_steps, m),
                pairwise_order(prev.linf, report.linf, prev.m_steps, m),
            ),
            None => (None, None),
        };
        rows.push(StudyRow {
            m_steps: m,
            l2: report.l2,
            linf: report.linf,
            order_l2,
            order_linf,
        });
    }
    Ok(rows)
}

/// How much the state-rule quadrature moves the converged field: reruns the
/// Picard solve with `reference_points` state nodes and returns the sup
/// field difference. Meaningful when it comes out below the run's reported
/// error.
pub fn state_rule_sensitivity(
    problem: &NonlinearProblem,
    n_max: usize,
    q_max: usize,
    reference_points: usize,
) -> Result<f64, SolverError> {
    let coarse = picard_solve(problem, n_max, q_max, 0.0)?;
    let mut refined = problem.clone();
    refined.state_rule_points = reference_points;
    let fine = picard_solve(&refined, n_max, q_max, 0.0)?;
    Ok(coarse.field.sup_increment(&fine.field))
}
