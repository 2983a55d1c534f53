//! Solution CSV and JSON reports.
//!
//! The CSV has columns `t, x, x_left, x_right, dx, dx_left, dx_right`. A
//! breakpoint of the grid takes three rows with the same `t`: the left
//! limit, the point value and the right limit, each in the `x`/`dx`
//! columns. So the row count is `grid points + 2 × breakpoints`, and a
//! plotting tool draws the jump of `Dx` as a vertical segment. Numbers use
//! 17 significant digits, which round-trips every `f64`.

use std::io::{Read, Write};
use std::sync::Arc;

use distbvp::{Grid, Interpolation, Profile, SolutionProfile};

use crate::CliError;

pub const CSV_HEADER: [&str; 7] = ["t", "x", "x_left", "x_right", "dx", "dx_left", "dx_right"];

/// Full-precision decimal: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("solution CSV: {e}"))
}

pub fn write_csv<W: Write>(out: W, sol: &SolutionProfile) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    let grid = sol.grid();
    let (x, dx) = (sol.x.values(), sol.dx.values());
    for (i, &t) in grid.points().iter().enumerate() {
        let (xl, xr, dl, dr) = match grid.break_slot(i) {
            Some(k) => {
                let (xl, xr) = sol.x.sides()[k];
                let (dl, dr) = sol.dx.sides()[k];
                (xl, xr, dl, dr)
            }
            None => (x[i], x[i], dx[i], dx[i]),
        };
        let mut row = |xv: f64, dv: f64| {
            w.write_record([t, xv, xl, xr, dv, dl, dr].map(fmt_f64)).map_err(csv_error)
        };
        if grid.break_slot(i).is_some() {
            row(xl, dl)?;
            row(x[i], dx[i])?;
            row(xr, dr)?;
        } else {
            row(x[i], dx[i])?;
        }
    }
    w.flush().map_err(csv_error)
}

/// Rebuilds a solution from [`write_csv`] output. The point value at a
/// breakpoint is the middle row of its triple.
pub fn read_csv<R: Read>(input: R) -> Result<SolutionProfile, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(csv_error(format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let mut row = [0.0; 7];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.trim().parse().map_err(|_| csv_error(format!("row {}: bad number `{field}`", n + 2)))?;
        }
        rows.push(row);
    }

    let (mut points, mut breaks) = (Vec::new(), Vec::new());
    let (mut x, mut dx, mut xs, mut dxs) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut i = 0;
    while i < rows.len() {
        let row = rows[i];
        let triple = i + 2 < rows.len() && rows[i + 1][0] == row[0] && rows[i + 2][0] == row[0];
        let mid = if triple { rows[i + 1] } else { row };
        points.push(row[0]);
        x.push(mid[1]);
        dx.push(mid[4]);
        if triple {
            breaks.push(row[0]);
            xs.push((row[2], row[3]));
            dxs.push((row[5], row[6]));
            i += 3;
        } else {
            i += 1;
        }
    }
    if points.len() < 2 {
        return Err(csv_error("fewer than two grid points"));
    }
    let grid = Arc::new(Grid::from_points(points, &[], &breaks).map_err(csv_error)?);
    let x0 = x[0];
    let dx0 = dx[0];
    Ok(SolutionProfile {
        x: Profile::new(Arc::clone(&grid), x, xs).map_err(csv_error)?,
        dx: Profile::new(grid, dx, dxs).map_err(csv_error)?,
        dx0,
        x0,
        interpolation: Interpolation::Hermite,
    })
}

pub fn write_json<W: Write, T: serde::Serialize>(mut out: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Input(format!("JSON: {e}")))?;
    writeln!(out).map_err(|e| CliError::Input(format!("JSON: {e}")))
}
