//! Uniform two-time lattice and the characteristic-diagonal recurrence.
//!
//! The transport part u_t + u_s propagates information along diagonals
//! t - s = const. On a uniform lattice with the same step omega on both time
//! axes, the one-step relation
//!
//! ```text
//! y[i] = omega * F[i] + y[i - 1]        (1 subtracted on every axis)
//! ```
//!
//! telescopes into the closed form
//!
//! ```text
//! y[start] = omega * sum_{l=1..p} F[start - (p - l) * 1] + y[foot]
//! ```
//!
//! after p steps. `roll_back_diagonal` evaluates that closed form for any
//! lattice dimension d >= 2 (the solver itself only uses d = 2, but the
//! recurrence is dimension-agnostic and tested as such), and
//! `characteristic_trace` does the d = 2 index arithmetic: depth p = min(k,m)
//! and the boundary foot where one time index hits zero.

use crate::error::SolverError;

/// Uniform lattice with M steps of width omega = T / M on each time axis.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
    pub omega: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, SolverError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "time horizon must be finite and positive, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(SolverError::InvalidParameter(
                "time grid needs at least one step".into(),
            ));
        }
        Ok(TimeGrid {
            horizon,
            steps,
            omega: horizon / steps as f64,
        })
    }

    /// Node t_k = k * omega, for 0 <= k <= M.
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.omega
    }
}

/// Where the diagonal through (k, m) meets the data boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalTrace {
    pub k: usize,
    pub m: usize,
    /// Diagonal depth min(k, m): number of interior steps to the boundary.
    pub p: usize,
    /// (k - m, 0) if k > m, (0, m - k) if m > k, (0, 0) on the main diagonal.
    pub foot: (usize, usize),
}

impl DiagonalTrace {
    /// Interior lattice points (k - p + l, m - p + l) for l = 1..p, in the
    /// order the recurrence visits them (ascending, ending at (k, m)).
    pub fn visited(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (fk, fm) = self.foot;
        (1..=self.p).map(move |l| (fk + l, fm + l))
    }
}

/// Index arithmetic for the diagonal through (k, m).
pub fn characteristic_trace(k: usize, m: usize) -> DiagonalTrace {
    let p = k.min(m);
    DiagonalTrace {
        k,
        m,
        p,
        foot: (k - p, m - p),
    }
}

/// Closed form of p applications of the one-step diagonal relation on a
/// d-dimensional lattice: omega * sum_{l=1..p} F[start - (p-l)*1] + boundary.
///
/// `boundary` is the value already known at `start - p*1` (where at least one
/// coordinate is on the data boundary in the solver's usage). The sum runs in
/// ascending l, so results are bit-for-bit reproducible.
pub fn roll_back_diagonal(
    step_sources: impl Fn(&[usize]) -> f64,
    start: &[usize],
    p: usize,
    omega: f64,
    boundary: f64,
) -> Result<f64, SolverError> {
    if start.len() < 2 {
        return Err(SolverError::InvalidParameter(format!(
            "diagonal recurrence needs a lattice of dimension >= 2, got {}",
            start.len()
        )));
    }
    if let Some(&short) = start.iter().find(|&&c| c < p) {
        return Err(SolverError::InvalidParameter(format!(
            "depth {p} exceeds start coordinate {short}"
        )));
    }
    let mut index = vec![0usize; start.len()];
    let mut acc = 0.0;
    for l in 1..=p {
        for (slot, &c) in index.iter_mut().zip(start) {
            *slot = c - (p - l);
        }
        acc += step_sources(&index);
    }
    Ok(omega * acc + boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_construction_and_nodes() {
        let grid = TimeGrid::new(0.25, 50).unwrap();
        assert_eq!(grid.omega, 0.005);
        assert_eq!(grid.node(0), 0.0);
        assert_abs_diff_eq!(grid.node(50), 0.25, epsilon = 1e-15 * 0.25);
        for (horizon, steps) in [(1.0, 400), (0.1, 100), (3.0, 7)] {
            let grid = TimeGrid::new(horizon, steps).unwrap();
            assert!(
                (grid.omega * steps as f64 - horizon).abs() <= 1e-15 * horizon,
                "omega * M != T for T = {horizon}, M = {steps}"
            );
        }
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-2.0, 10).is_err());
        assert!(TimeGrid::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn trace_branches() {
        let above = characteristic_trace(5, 2);
        assert_eq!((above.p, above.foot), (2, (3, 0)));
        let below = characteristic_trace(2, 5);
        assert_eq!((below.p, below.foot), (2, (0, 3)));
        let diag = characteristic_trace(4, 4);
        assert_eq!((diag.p, diag.foot), (4, (0, 0)));
        let origin = characteristic_trace(0, 0);
        assert_eq!((origin.p, origin.foot), (0, (0, 0)));
    }

    #[test]
    fn trace_visits_ascending_and_ends_at_start() {
        let trace = characteristic_trace(7, 4);
        let visited: Vec<_> = trace.visited().collect();
        assert_eq!(visited.len(), trace.p);
        assert_eq!(visited.first(), Some(&(4, 1)));
        assert_eq!(visited.last(), Some(&(7, 4)));
        for pair in visited.windows(2) {
            assert_eq!(pair[1].0, pair[0].0 + 1);
            assert_eq!(pair[1].1, pair[0].1 + 1);
        }
    }

    proptest! {
        #[test]
        fn trace_symmetry(k in 0usize..=400, m in 0usize..=400) {
            let ab = characteristic_trace(k, m);
            let ba = characteristic_trace(m, k);
            prop_assert_eq!(ab.p, ba.p);
            prop_assert_eq!(ab.foot.0, ba.foot.1);
            prop_assert_eq!(ab.foot.1, ba.foot.0);
            // Exactly one foot coordinate is zero away from the corner.
            prop_assert!(ab.foot.0 == 0 || ab.foot.1 == 0);
        }
    }

    /// Step-by-step application of the one-step relation, as an oracle for
    /// the closed form.
    fn march(
        f: &impl Fn(&[usize]) -> f64,
        start: &[usize],
        p: usize,
        omega: f64,
        boundary: f64,
    ) -> f64 {
        let mut value = boundary;
        for l in 1..=p {
            let index: Vec<usize> = start.iter().map(|&c| c - (p - l)).collect();
            value = omega * f(&index) + value;
        }
        value
    }

    #[test]
    fn depth_one_is_the_one_step_relation() {
        let f = |idx: &[usize]| (idx[0] * 10 + idx[1]) as f64;
        let value = roll_back_diagonal(f, &[3, 7], 1, 0.25, 2.0).unwrap();
        assert_abs_diff_eq!(value, 0.25 * 37.0 + 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_sources_return_boundary() {
        for p in [0, 1, 4] {
            let value = roll_back_diagonal(|_| 0.0, &[5, 6, 4], p, 0.1, -3.5).unwrap();
            assert_eq!(value, -3.5);
        }
    }

    #[test]
    fn rejects_shallow_lattices_and_deep_rolls() {
        assert!(roll_back_diagonal(|_| 1.0, &[5], 1, 0.1, 0.0).is_err());
        assert!(roll_back_diagonal(|_| 1.0, &[], 0, 0.1, 0.0).is_err());
        assert!(roll_back_diagonal(|_| 1.0, &[5, 3], 4, 0.1, 0.0).is_err());
        assert!(roll_back_diagonal(|_| 1.0, &[2, 9, 5], 3, 0.1, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_marching_on_plane() {
        // Deterministic "random" lattice values from the index.
        let f = |idx: &[usize]| {
            let mut h = 0.618_f64;
            for &c in idx {
                h = (h * 97.0 + c as f64 * 13.7).sin();
            }
            h
        };
        let start = [5usize, 4];
        let value = roll_back_diagonal(f, &start, 4, 0.02, 1.25).unwrap();
        let oracle = march(&f, &start, 4, 0.02, 1.25);
        assert!((value - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
    }

    #[test]
    fn closed_form_matches_marching_in_higher_dimensions() {
        let f = |idx: &[usize]| {
            let mut h = 1.0_f64;
            for (axis, &c) in idx.iter().enumerate() {
                h *= ((axis + 2) as f64 * 0.31 + c as f64 * 0.57).cos();
            }
            h
        };
        for start in [vec![6usize, 3], vec![4, 5, 6], vec![3, 7, 3, 5]] {
            let p = *start.iter().min().unwrap();
            for depth in [0, 1, p] {
                let value = roll_back_diagonal(&f, &start, depth, 0.125, 0.7).unwrap();
                let oracle = march(&f, &start, depth, 0.125, 0.7);
                assert!(
                    (value - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
                    "dimension {} depth {depth}",
                    start.len()
                );
            }
        }
    }
}
