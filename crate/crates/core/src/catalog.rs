//! Registry of the four manufactured-solution test problems.
//!
//! Each entry fixes an operator from the basis catalog, a time horizon, a
//! closed-form exact solution, and the data/source derived from it, so a run
//! can report real errors. Entries 1-2 are linear with midpoint-sampled
//! sources; entries 3-4 are nonlinear (Lipschitz and product form) solved by
//! Picard iteration with the manufactured right-hand side split as
//! N(u) - N(u_exact) + forcing.
//!
//! Each entry also embeds the published reference error tables it is
//! expected to reproduce (four lattice sizes, both norms) and the figure
//! slice that visualizes it. The `table_truncation` is the mode count used
//! for table reproduction: the reference tables for entries 3-4 were
//! computed with only the excited mode present, and matching them requires a
//! truncation that does not carry the early iterates' high-mode transients
//! (the default n_max = 8 is fine for ad-hoc runs, where those transients
//! decay by the tabulated q anyway).

use crate::basis::{make_basis, BasisKind};
use crate::diagnostics::{discrete_norms, exact_on_grid, ErrorReport};
use crate::error::SolverError;
use crate::field::SpectralField;
use crate::grid::TimeGrid;
use crate::linear::{solve_linear, stability_bound_check, BoundCheck, LinearProblem};
use crate::nonlinear::{
    a_priori_bound_check, picard_solve, IterationReport, NonlinearProblem, SourceForm,
};
use crate::{BoundaryFn, ProfileFn};
use std::sync::Arc;

/// Reference error values for one published table: four lattice sizes, both
/// norms.
#[derive(Debug, Clone, Copy)]
pub struct PublishedTable {
    pub l2: [f64; 4],
    pub linf: [f64; 4],
}

/// Whether an entry solves the linear scheme directly or iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Linear,
    Nonlinear,
}

/// Axis held fixed when emitting a figure-style slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    X,
    T,
    S,
}

impl std::fmt::Display for SliceAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SliceAxis::X => "x",
            SliceAxis::T => "t",
            SliceAxis::S => "s",
        })
    }
}

impl std::str::FromStr for SliceAxis {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" => Ok(SliceAxis::X),
            "t" => Ok(SliceAxis::T),
            "s" => Ok(SliceAxis::S),
            other => Err(SolverError::InvalidParameter(format!(
                "slice axis must be x, t, or s, got {other:?}"
            ))),
        }
    }
}

/// A figure slice: one coordinate frozen at `value`.
#[derive(Debug, Clone, Copy)]
pub struct SliceSpec {
    pub axis: SliceAxis,
    pub value: f64,
}

enum Definition {
    Linear {
        alpha: BoundaryFn,
        beta: BoundaryFn,
        source: ProfileFn,
    },
    Nonlinear {
        alpha: BoundaryFn,
        beta: BoundaryFn,
        source_form: SourceForm,
        forcing: ProfileFn,
    },
}

/// One registry entry.
pub struct Example {
    pub id: usize,
    pub title: &'static str,
    pub basis_kind: BasisKind,
    pub horizon: f64,
    /// Lattice sizes of the published table columns.
    pub table_m: [usize; 4],
    /// Picard sweep counts per column (nonlinear entries).
    pub table_q: Option<[usize; 4]>,
    /// Mode count used when reproducing the published table.
    pub table_truncation: usize,
    pub published: PublishedTable,
    pub slice: SliceSpec,
    exact: ProfileFn,
    definition: Definition,
}

/// Solve parameters for a single catalog run.
#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    pub m_steps: usize,
    pub l_intervals: usize,
    pub n_max: usize,
    /// Fixed Picard sweep count; `None` stops on increment <= 1e-10
    /// (capped at 16 sweeps). Ignored by linear entries.
    pub q: Option<usize>,
    /// State-rule point count (index j0 corresponds to j0 + 1 points).
    pub state_rule_points: usize,
    /// Horizon override; `None` keeps the entry's T.
    pub horizon: Option<f64>,
}

impl RunParams {
    pub fn new(m_steps: usize) -> Self {
        RunParams {
            m_steps,
            l_intervals: 20,
            n_max: 8,
            q: None,
            state_rule_points: 6,
            horizon: None,
        }
    }
}

/// Everything a catalog run produces.
pub struct RunOutput {
    pub params: RunParams,
    pub basis: crate::basis::EigenBasis,
    pub field: SpectralField,
    /// The iterate before the last sweep (nonlinear runs).
    pub previous: Option<SpectralField>,
    pub iteration: Option<IterationReport>,
    pub report: ErrorReport,
    /// Stability inequality (linear) or a-priori inequality (nonlinear).
    pub bound: BoundCheck,
}

impl Example {
    pub fn kind(&self) -> ProblemKind {
        match self.definition {
            Definition::Linear { .. } => ProblemKind::Linear,
            Definition::Nonlinear { .. } => ProblemKind::Nonlinear,
        }
    }

    /// The entry's closed-form exact solution.
    pub fn exact(&self) -> ProfileFn {
        self.exact.clone()
    }

    /// Column labels of the published table ("M=50" or "q=2,M=50").
    pub fn column_labels(&self) -> [String; 4] {
        let mut labels: [String; 4] = Default::default();
        for (i, label) in labels.iter_mut().enumerate() {
            *label = match self.table_q {
                Some(qs) => format!("q={},M={}", qs[i], self.table_m[i]),
                None => format!("M={}", self.table_m[i]),
            };
        }
        labels
    }

    /// Run parameters reproducing published table column `col` (0..4).
    pub fn table_cell(&self, col: usize) -> RunParams {
        let mut params = RunParams::new(self.table_m[col]);
        params.n_max = self.table_truncation;
        params.q = self.table_q.map(|qs| qs[col]);
        params
    }

    /// The linear problem on a chosen grid, for entries of linear kind.
    pub fn linear_problem(
        &self,
        grid: TimeGrid,
        n_max: usize,
    ) -> Result<LinearProblem, SolverError> {
        match &self.definition {
            Definition::Linear {
                alpha,
                beta,
                source,
            } => Ok(LinearProblem {
                basis: make_basis(self.basis_kind, n_max)?,
                grid,
                alpha: alpha.clone(),
                beta: beta.clone(),
                source: source.clone(),
            }),
            Definition::Nonlinear { .. } => Err(SolverError::InvalidParameter(format!(
                "entry {} is nonlinear",
                self.id
            ))),
        }
    }

    /// The nonlinear problem on a chosen grid, for entries of nonlinear kind.
    pub fn nonlinear_problem(
        &self,
        grid: TimeGrid,
        n_max: usize,
        state_rule_points: usize,
    ) -> Result<NonlinearProblem, SolverError> {
        match &self.definition {
            Definition::Nonlinear {
                alpha,
                beta,
                source_form,
                forcing,
            } => Ok(NonlinearProblem {
                basis: make_basis(self.basis_kind, n_max)?,
                grid,
                alpha: alpha.clone(),
                beta: beta.clone(),
                source_form: source_form.clone(),
                reference: Some(self.exact.clone()),
                forcing: Some(forcing.clone()),
                midpoint_forcing: false,
                exact: Some(self.exact.clone()),
                state_rule_points,
            }),
            Definition::Linear { .. } => Err(SolverError::InvalidParameter(format!(
                "entry {} is linear",
                self.id
            ))),
        }
    }

    /// Solve, measure errors against the exact solution, and evaluate the
    /// entry's bound check.
    pub fn run(&self, params: &RunParams) -> Result<RunOutput, SolverError> {
        if params.l_intervals == 0 {
            return Err(SolverError::InvalidParameter(
                "spatial sampling needs at least one interval".into(),
            ));
        }
        let horizon = params.horizon.unwrap_or(self.horizon);
        let grid = TimeGrid::new(horizon, params.m_steps)?;
        let basis = make_basis(self.basis_kind, params.n_max)?;

        let (field, previous, iteration, bound) = match self.kind() {
            ProblemKind::Linear => {
                let problem = self.linear_problem(grid, params.n_max)?;
                let field = solve_linear(&problem, params.n_max)?;
                let bound = stability_bound_check(&field, &problem);
                (field, None, None, bound)
            }
            ProblemKind::Nonlinear => {
                let problem =
                    self.nonlinear_problem(grid, params.n_max, params.state_rule_points)?;
                let (q_max, tol) = match params.q {
                    Some(q) => (q, 0.0),
                    None => (16, 1e-10),
                };
                let outcome = picard_solve(&problem, params.n_max, q_max, tol)?;
                let bound = a_priori_bound_check(&outcome.field, &outcome.previous, &problem);
                (
                    outcome.field,
                    Some(outcome.previous),
                    Some(outcome.report),
                    bound,
                )
            }
        };

        let approx = field.sample_on_grid(&basis, params.l_intervals);
        let exact = exact_on_grid(&self.exact, &grid, params.l_intervals);
        let mut report = discrete_norms(&approx, &exact)?;
        if let Some(iter) = &iteration {
            report.q = Some(iter.q);
            report.j0 = Some(params.state_rule_points.saturating_sub(1));
        }
        Ok(RunOutput {
            params: *params,
            basis,
            field,
            previous,
            iteration,
            report,
            bound,
        })
    }
}

/// Look up one registry entry by its 1-based id.
pub fn example(id: usize) -> Result<Example, SolverError> {
    match id {
        1 => Ok(example_1()),
        2 => Ok(example_2()),
        3 => Ok(example_3()),
        4 => Ok(example_4()),
        other => Err(SolverError::InvalidParameter(format!(
            "no catalog entry {other}; valid ids are 1-4"
        ))),
    }
}

/// All four registry entries, in order.
pub fn all_examples() -> Vec<Example> {
    (1..=4).map(|id| example(id).expect("catalog ids")).collect()
}

fn example_1() -> Example {
    let exact: ProfileFn = Arc::new(|x: f64, t: f64, s: f64| (-2.0 * t - s).exp() * x.sin());
    Example {
        id: 1,
        title: "decaying sine, homogeneous Dirichlet",
        basis_kind: BasisKind::DirichletDirichlet,
        horizon: 1.0,
        table_m: [50, 100, 200, 400],
        table_q: None,
        table_truncation: 8,
        published: PublishedTable {
            l2: [1.51608045e-3, 7.55346287e-4, 3.85041789e-4, 1.88342949e-4],
            linf: [3.84188903e-3, 1.92287169e-3, 9.61845810e-4, 4.81024266e-4],
        },
        slice: SliceSpec {
            axis: SliceAxis::T,
            value: 0.5,
        },
        exact,
        definition: Definition::Linear {
            alpha: Arc::new(|x: f64, s: f64| (-s).exp() * x.sin()),
            beta: Arc::new(|x: f64, t: f64| (-2.0 * t).exp() * x.sin()),
            source: Arc::new(|x: f64, t: f64, s: f64| -2.0 * (-2.0 * t - s).exp() * x.sin()),
        },
    }
}

fn example_2() -> Example {
    let exact: ProfileFn =
        Arc::new(|x: f64, t: f64, s: f64| (t * t + s * s + 32.0) * (0.5 * x).cos());
    Example {
        id: 2,
        title: "quadratic growth, Neumann-Dirichlet",
        basis_kind: BasisKind::NeumannDirichlet,
        horizon: 1.0,
        table_m: [50, 100, 200, 400],
        table_q: None,
        table_truncation: 8,
        published: PublishedTable {
            l2: [6.53270883e-3, 3.26622222e-3, 1.63312276e-3, 8.16570001e-4],
            linf: [2.26666504e-2, 1.13406619e-2, 5.67215954e-3, 2.83653620e-3],
        },
        slice: SliceSpec {
            axis: SliceAxis::X,
            value: std::f64::consts::FRAC_PI_4,
        },
        exact,
        definition: Definition::Linear {
            alpha: Arc::new(|x: f64, s: f64| (s * s + 32.0) * (0.5 * x).cos()),
            beta: Arc::new(|x: f64, t: f64| (t * t + 32.0) * (0.5 * x).cos()),
            source: Arc::new(|x: f64, t: f64, s: f64| {
                let a = 0.5 * t + 2.0;
                let b = 0.5 * s + 2.0;
                (a * a + b * b) * (0.5 * x).cos()
            }),
        },
    }
}

fn example_3() -> Example {
    let exact: ProfileFn =
        Arc::new(|x: f64, t: f64, s: f64| 0.25 * ((-t).exp() + (-s).exp()) * (3.5 * x).sin());
    Example {
        id: 3,
        title: "sine nonlinearity, Lipschitz form",
        basis_kind: BasisKind::DirichletNeumannShift1,
        horizon: 0.25,
        table_m: [50, 100, 200, 400],
        table_q: Some([2, 3, 4, 5]),
        table_truncation: 3,
        published: PublishedTable {
            l2: [5.82730398e-3, 2.90030629e-3, 1.44171369e-3, 7.18708022e-4],
            linf: [1.16425665e-2, 5.85110603e-3, 2.91848574e-3, 1.45728672e-3],
        },
        slice: SliceSpec {
            axis: SliceAxis::T,
            value: 0.25,
        },
        exact: exact.clone(),
        definition: Definition::Nonlinear {
            alpha: Arc::new(|x: f64, s: f64| 0.25 * (1.0 + (-s).exp()) * (3.5 * x).sin()),
            beta: Arc::new(|x: f64, t: f64| 0.25 * ((-t).exp() + 1.0) * (3.5 * x).sin()),
            source_form: SourceForm::Lipschitz {
                f: Arc::new(|u: f64, _, _, _| 0.25 * u.sin()),
                lipschitz: 0.25,
            },
            // The manufactured right-hand side is
            // (1/4) sin u - (1/4) sin u_exact + (49/4) u_exact; the sine
            // difference is handled through the reference subtraction.
            forcing: Arc::new(move |x: f64, t: f64, s: f64| {
                (49.0 / 4.0) * 0.25 * ((-t).exp() + (-s).exp()) * (3.5 * x).sin()
            }),
        },
    }
}

fn example_4() -> Example {
    let exact: ProfileFn =
        Arc::new(|x: f64, t: f64, s: f64| (t.sin() + 1.0 + (-s).exp()) * (3.0 * x).cos());
    Example {
        id: 4,
        title: "self-product nonlinearity, Neumann-Neumann",
        basis_kind: BasisKind::NeumannNeumannShift2,
        horizon: 0.1,
        table_m: [50, 100, 200, 400],
        table_q: Some([2, 3, 4, 5]),
        table_truncation: 3,
        published: PublishedTable {
            l2: [5.45295363e-3, 2.69804976e-3, 1.34196386e-3, 6.69222399e-4],
            linf: [1.48732036e-2, 7.42289652e-3, 3.70802189e-3, 1.85315435e-3],
        },
        slice: SliceSpec {
            axis: SliceAxis::X,
            value: std::f64::consts::FRAC_PI_2,
        },
        exact,
        definition: Definition::Nonlinear {
            alpha: Arc::new(|x: f64, s: f64| (1.0 + (-s).exp()) * (3.0 * x).cos()),
            beta: Arc::new(|x: f64, t: f64| (t.sin() + 2.0) * (3.0 * x).cos()),
            source_form: SourceForm::Product {
                g: Arc::new(|u: f64, _, _, _| (0.5 * u).sin()),
                h: Arc::new(|u: f64, _, _, _| u),
                g_bound: 1.0,
                h_lipschitz: 1.0,
            },
            // u sin(u/2) evaluated at u_exact is subtracted via the
            // reference; the remaining analytic part of the source is this.
            forcing: Arc::new(|x: f64, t: f64, s: f64| {
                (11.0 * t.sin() + t.cos() + 10.0 * (-s).exp() + 11.0) * (3.0 * x).cos()
            }),
        },
    }
}
