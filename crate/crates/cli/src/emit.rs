//! CSV emission and number formatting.
//!
//! All writers are deterministic: fixed iteration order, fixed formats, LF
//! line endings. Grid and slice output share one schema so downstream
//! plotting reads either; values carry 17 significant digits, enough for a
//! parse to reproduce the written f64 bit-for-bit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use upsolve_core::{exact_on_grid, ProfileFn, RunOutput, SliceAxis, SliceSpec};

/// Shared header of grid and slice CSVs. The first column holds the spatial
/// coordinate x (or a mode number, for coefficient-level dumps sharing the
/// schema).
pub const GRID_HEADER: &str = "n_or_x,k,m,t,s,u_approx,u_exact,abs_err";

/// 9-significant-digit scientific notation with signed two-digit exponent,
/// e.g. `1.51608045E-03` — the format of the published reference tables.
pub fn sci(value: f64) -> String {
    let raw = format!("{value:.8E}");
    match raw.split_once('E') {
        Some((mantissa, exponent)) => {
            let (sign, digits) = match exponent.strip_prefix('-') {
                Some(rest) => ('-', rest),
                None => ('+', exponent),
            };
            format!("{mantissa}E{sign}{digits:0>2}")
        }
        None => raw, // infinities and NaN carry no exponent
    }
}

/// 17 significant digits: round-trips f64 exactly.
fn csv17(value: f64) -> String {
    format!("{value:.16e}")
}

/// One column of an error table.
pub struct TableColumn {
    pub label: String,
    pub l2: f64,
    pub linf: f64,
    /// Published reference (l2, linf) when the column reproduces one.
    pub published: Option<(f64, f64)>,
}

/// Error-table CSV: one row per norm, then published values and relative
/// deviations when any column carries a reference. Labels are quoted — the
/// nonlinear ones contain commas.
pub fn render_table_csv(w: &mut impl Write, columns: &[TableColumn]) -> io::Result<()> {
    write!(w, "norm")?;
    for column in columns {
        write!(w, ",\"{}\"", column.label)?;
    }
    writeln!(w)?;
    let row = |w: &mut dyn Write, name: &str, value: &dyn Fn(&TableColumn) -> Option<String>| {
        write!(w, "{name}")?;
        for column in columns {
            write!(w, ",{}", value(column).unwrap_or_default())?;
        }
        writeln!(w)
    };
    row(w, "l2", &|c| Some(csv17(c.l2)))?;
    row(w, "linf", &|c| Some(csv17(c.linf)))?;
    if columns.iter().any(|c| c.published.is_some()) {
        let dev = |computed: f64, reference: f64| (computed - reference).abs() / reference;
        row(w, "l2_published", &|c| c.published.map(|(l2, _)| csv17(l2)))?;
        row(w, "l2_rel_dev", &|c| {
            c.published.map(|(l2, _)| format!("{:.3e}", dev(c.l2, l2)))
        })?;
        row(w, "linf_published", &|c| {
            c.published.map(|(_, linf)| csv17(linf))
        })?;
        row(w, "linf_rel_dev", &|c| {
            c.published.map(|(_, linf)| format!("{:.3e}", dev(c.linf, linf)))
        })?;
    }
    Ok(())
}

/// Full sample grid: (L+1) * M^2 data rows ordered by x, then k, then m.
pub fn render_grid_csv(w: &mut impl Write, output: &RunOutput, exact: &ProfileFn) -> io::Result<()> {
    let l_intervals = output.params.l_intervals;
    let grid = output.field.grid;
    let samples = output.field.sample_on_grid(&output.basis, l_intervals);
    let reference = exact_on_grid(exact, &grid, l_intervals);
    writeln!(w, "{GRID_HEADER}")?;
    for j in 0..=l_intervals {
        let x = std::f64::consts::PI * j as f64 / l_intervals as f64;
        for k in 1..=grid.steps {
            for m in 1..=grid.steps {
                data_row(
                    w,
                    x,
                    k,
                    m,
                    &grid,
                    samples[(j, k - 1, m - 1)],
                    reference[(j, k - 1, m - 1)],
                )?;
            }
        }
    }
    Ok(())
}

/// One coordinate frozen at the nearest grid value; returns the spec after
/// snapping. Rows keep the grid schema and iteration order.
pub fn render_slice_csv(
    w: &mut impl Write,
    output: &RunOutput,
    exact: &ProfileFn,
    spec: SliceSpec,
) -> io::Result<SliceSpec> {
    let l_intervals = output.params.l_intervals;
    let grid = output.field.grid;
    let samples = output.field.sample_on_grid(&output.basis, l_intervals);
    let reference = exact_on_grid(exact, &grid, l_intervals);
    writeln!(w, "{GRID_HEADER}")?;
    let x_of = |j: usize| std::f64::consts::PI * j as f64 / l_intervals as f64;
    let snapped = match spec.axis {
        SliceAxis::X => {
            let j = snap_index(spec.value * l_intervals as f64 / std::f64::consts::PI, 0, l_intervals);
            for k in 1..=grid.steps {
                for m in 1..=grid.steps {
                    data_row(
                        w,
                        x_of(j),
                        k,
                        m,
                        &grid,
                        samples[(j, k - 1, m - 1)],
                        reference[(j, k - 1, m - 1)],
                    )?;
                }
            }
            x_of(j)
        }
        SliceAxis::T => {
            let k = snap_index(spec.value / grid.omega, 1, grid.steps);
            for j in 0..=l_intervals {
                for m in 1..=grid.steps {
                    data_row(
                        w,
                        x_of(j),
                        k,
                        m,
                        &grid,
                        samples[(j, k - 1, m - 1)],
                        reference[(j, k - 1, m - 1)],
                    )?;
                }
            }
            grid.node(k)
        }
        SliceAxis::S => {
            let m = snap_index(spec.value / grid.omega, 1, grid.steps);
            for j in 0..=l_intervals {
                for k in 1..=grid.steps {
                    data_row(
                        w,
                        x_of(j),
                        k,
                        m,
                        &grid,
                        samples[(j, k - 1, m - 1)],
                        reference[(j, k - 1, m - 1)],
                    )?;
                }
            }
            grid.node(m)
        }
    };
    Ok(SliceSpec {
        axis: spec.axis,
        value: snapped,
    })
}

fn data_row(
    w: &mut impl Write,
    x: f64,
    k: usize,
    m: usize,
    grid: &upsolve_core::TimeGrid,
    u_approx: f64,
    u_exact: f64,
) -> io::Result<()> {
    writeln!(
        w,
        "{},{k},{m},{},{},{},{},{}",
        csv17(x),
        csv17(grid.node(k)),
        csv17(grid.node(m)),
        csv17(u_approx),
        csv17(u_exact),
        csv17((u_approx - u_exact).abs()),
    )
}

fn snap_index(raw: f64, lo: usize, hi: usize) -> usize {
    let rounded = raw.round();
    if rounded <= lo as f64 {
        lo
    } else if rounded >= hi as f64 {
        hi
    } else {
        rounded as usize
    }
}

/// Open `path` and write through a buffered writer, flushing at the end.
pub fn to_file<T>(
    path: &Path,
    render: impl FnOnce(&mut BufWriter<File>) -> io::Result<T>,
) -> io::Result<T> {
    let mut writer = BufWriter::new(File::create(path)?);
    let value = render(&mut writer)?;
    writer.flush()?;
    Ok(value)
}
