//! Trajectory and convergence-table CSV.

use std::path::Path;

use nalgebra::DVector;

use crate::analysis::{ConvergenceTable, EmpiricalOrder};
use crate::error::ScenarioError;
use crate::geometry::Point;
use crate::grid::TimeGrid;
use crate::solver::Trajectory;

/// Node times read back from a file may differ from `i·T/n` by at most this, relatively.
const NODE_TIME_TOL: f64 = 1e-12;

/// Scientific notation with 17 significant digits: enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: csv::Error) -> ScenarioError {
    ScenarioError::Syntax(format!("csv: {e}"))
}

fn writer() -> csv::WriterBuilder {
    let mut b = csv::WriterBuilder::new();
    b.terminator(csv::Terminator::Any(b'\n'));
    b
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer never fails");
    String::from_utf8(bytes).expect("csv output is ascii")
}

/// Header `t, x_1..x_d` (order 2 only), `u_1..u_d`, then one row per node.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.states().first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string()];
    if traj.positions().is_some() {
        header.extend((1..=d).map(|k| format!("x_{k}")));
    }
    header.extend((1..=d).map(|k| format!("u_{k}")));
    let mut w = writer().from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for (i, u) in traj.states().iter().enumerate() {
        let mut row = vec![format_f64(traj.grid().node(i))];
        if let Some(xs) = traj.positions() {
            row.extend(xs[i].iter().copied().map(format_f64));
        }
        row.extend(u.iter().copied().map(format_f64));
        w.write_record(&row).expect("in-memory write");
    }
    into_string(w)
}

pub fn write_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    write_text(path.as_ref(), &trajectory_csv(traj))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, text).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_trajectory_csv(&text)
}

/// Inverse of [`trajectory_csv`]. The grid is recovered from the time column.
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, ScenarioError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("t") {
        return Err(ScenarioError::invalid("header", "first column must be `t`"));
    }
    let n_x = header.iter().filter(|h| h.starts_with("x_")).count();
    let n_u = header.iter().filter(|h| h.starts_with("u_")).count();
    if n_x + n_u + 1 != header.len() || (n_x != 0 && n_x != n_u) {
        return Err(ScenarioError::invalid(
            "header",
            format!("unexpected columns {header:?}"),
        ));
    }
    let mut times = Vec::new();
    let mut xs: Vec<Point> = Vec::new();
    let mut us: Vec<Point> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|e| {
                    ScenarioError::invalid(format!("row {}", line + 1), format!("`{s}`: {e}"))
                })
            })
            .collect::<Result<_, _>>()?;
        times.push(vals[0]);
        if n_x > 0 {
            xs.push(DVector::from_column_slice(&vals[1..1 + n_x]));
        }
        us.push(DVector::from_column_slice(&vals[1 + n_x..]));
    }
    if times.len() < 2 {
        return Err(ScenarioError::invalid("rows", "need at least two nodes"));
    }
    let steps = times.len() - 1;
    let grid = TimeGrid::new(times[steps], steps)
        .map_err(|e| ScenarioError::invalid("t", e.to_string()))?;
    for (i, t) in times.iter().enumerate() {
        if (t - grid.node(i)).abs() > NODE_TIME_TOL * grid.horizon() {
            return Err(ScenarioError::invalid(
                format!("row {}", i + 1),
                format!("time {t} is not the uniform node {}", grid.node(i)),
            ));
        }
    }
    let traj = if n_x > 0 {
        Trajectory::second_order(grid, us, xs)
    } else {
        Trajectory::first_order(grid, us)
    };
    traj.map_err(|e| ScenarioError::invalid("rows", e.to_string()))
}

/// Columns `steps, h, error, ratio, order`; the first row leaves ratio and order empty,
/// and an order is written as `exact` when the finer error is at rounding level.
pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut w = writer().from_writer(Vec::new());
    w.write_record(["steps", "h", "error", "ratio", "order"])
        .expect("in-memory write");
    for row in &table.rows {
        let ratio = row.ratio.map(format_f64).unwrap_or_default();
        let order = match row.order {
            None => String::new(),
            Some(EmpiricalOrder::Exact) => "exact".into(),
            Some(EmpiricalOrder::Value(p)) => format_f64(p),
        };
        w.write_record([
            row.steps.to_string(),
            format_f64(row.h),
            format_f64(row.error),
            ratio,
            order,
        ])
        .expect("in-memory write");
    }
    into_string(w)
}

pub fn write_convergence_table(
    table: &ConvergenceTable,
    path: impl AsRef<Path>,
) -> Result<(), ScenarioError> {
    write_text(path.as_ref(), &convergence_csv(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ConvergenceRow;
    use nalgebra::dvector;

    fn second_order() -> Trajectory {
        let grid = TimeGrid::new(1.0, 3).unwrap();
        let us = grid.nodes().map(|t| dvector![t, -t / 3.0]).collect();
        let xs = grid
            .nodes()
            .map(|t| dvector![0.1 + t * t, 1e-300])
            .collect();
        Trajectory::second_order(grid, us, xs).unwrap()
    }

    #[test]
    fn layout() {
        let text = trajectory_csv(&second_order());
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "t,x_1,x_2,u_1,u_2");
        assert_eq!(lines.len(), 4 + 1 + 1);
        assert_eq!(lines[5], "");
        assert!(!text.contains('\r'));
        assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000001e-1,"));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let tr = second_order();
        let back = parse_trajectory_csv(&trajectory_csv(&tr)).unwrap();
        assert_eq!(back, tr);
        for v in [0.1, 1.0 / 3.0, f64::MIN_POSITIVE, -2.5e300, 5e-324] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn first_order_header() {
        let grid = TimeGrid::new(2.0, 2).unwrap();
        let tr = Trajectory::first_order(grid, vec![dvector![1.0]; 3]).unwrap();
        let text = trajectory_csv(&tr);
        assert!(text.starts_with("t,u_1\n"));
        assert_eq!(parse_trajectory_csv(&text).unwrap(), tr);
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(parse_trajectory_csv("t,u_1\n0,1\n").is_err());
        assert!(parse_trajectory_csv("t,u_1\n0,1\n1,x\n").is_err());
        assert!(parse_trajectory_csv("s,u_1\n0,1\n1,2\n").is_err());
        assert!(parse_trajectory_csv("t,u_1\n0,1\n0.7,2\n1,2\n").is_err());
    }

    #[test]
    fn convergence_layout() {
        let table = ConvergenceTable {
            reference_steps: 80,
            rows: vec![
                ConvergenceRow {
                    steps: 10,
                    h: 0.1,
                    error: 0.5,
                    ratio: None,
                    order: None,
                },
                ConvergenceRow {
                    steps: 20,
                    h: 0.05,
                    error: 0.25,
                    ratio: Some(2.0),
                    order: Some(EmpiricalOrder::Value(1.0)),
                },
                ConvergenceRow {
                    steps: 40,
                    h: 0.025,
                    error: 0.0,
                    ratio: Some(f64::INFINITY),
                    order: Some(EmpiricalOrder::Exact),
                },
            ],
        };
        let text = convergence_csv(&table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "steps,h,error,ratio,order");
        assert!(lines[1].ends_with(",,"));
        assert!(lines[2].ends_with("2.0000000000000000e0,1.0000000000000000e0"));
        assert!(lines[3].ends_with(",inf,exact"));
    }
}
