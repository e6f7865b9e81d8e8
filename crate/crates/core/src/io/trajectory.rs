use super::IoError;
use crate::geom::Vec2;
use crate::sim::Trajectory;
use crate::stl::{Signal, SignalError};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const TRAJECTORY_HEADER: &str =
    "t,x,y,fx,fy,ux_nom,uy_nom,V,gx,gy,lhs,rhs,violated,ux_out,uy_out,flags,epoch";

/// Write the per-step record. Floats print in shortest round-trip form, so
/// identical runs produce identical bytes.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| IoError::file(path, e);
    writeln!(w, "{TRAJECTORY_HEADER}").map_err(io)?;
    for s in &traj.steps {
        let d = &s.decision;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.position.x,
            s.position.y,
            s.nominal_force.x,
            s.nominal_force.y,
            s.nominal_u.x,
            s.nominal_u.y,
            d.v,
            d.grad.x,
            d.grad.y,
            d.lhs,
            d.rhs,
            d.violated as u8,
            d.output_u.x,
            d.output_u.y,
            d.flags,
            s.epoch,
        )
        .map_err(io)?;
    }
    Ok(())
}

fn split_header(line: &str) -> Vec<&str> {
    line.trim().split(',').map(str::trim).collect()
}

fn find_columns(path: &Path, header: &str, names: &[&str]) -> Result<Vec<usize>, IoError> {
    let cols = split_header(header);
    names
        .iter()
        .map(|name| {
            cols.iter().position(|c| c == name).ok_or_else(|| IoError::Csv {
                path: path.display().to_string(),
                what: "header",
                line: 1,
                detail: format!("missing column '{name}'"),
            })
        })
        .collect()
}

fn parse_f64(path: &Path, line_no: usize, field: &str) -> Result<f64, IoError> {
    field.trim().parse().map_err(|_| IoError::Csv {
        path: path.display().to_string(),
        what: "number",
        line: line_no,
        detail: format!("'{field}'"),
    })
}

/// Read the `(t, x, y)` columns of a trajectory CSV back as a signal.
pub fn read_signal_csv(path: &Path) -> Result<Signal, IoError> {
    let rows = read_columns(path, &["t", "x", "y"])?;
    let samples = rows
        .into_iter()
        .map(|r| (r[0], Vec2::new(r[1], r[2])))
        .collect();
    Signal::new(samples).map_err(|e: SignalError| IoError::Csv {
        path: path.display().to_string(),
        what: "signal",
        line: 0,
        detail: e.to_string(),
    })
}

/// Read per-step forces from any CSV with `fx`/`fy` columns; a recorded
/// trajectory file works directly as a replay source.
pub fn read_forces_csv(path: &Path) -> Result<Vec<Vec2>, IoError> {
    let rows = read_columns(path, &["fx", "fy"])?;
    Ok(rows.into_iter().map(|r| Vec2::new(r[0], r[1])).collect())
}

fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>, IoError> {
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| IoError::file(path, e))?,
        None => {
            return Err(IoError::Csv {
                path: path.display().to_string(),
                what: "header",
                line: 1,
                detail: "empty file".into(),
            })
        }
    };
    let indices = find_columns(path, &header, names)?;
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| IoError::file(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let mut row = Vec::with_capacity(indices.len());
        for &idx in &indices {
            let field = fields.get(idx).ok_or_else(|| IoError::Csv {
                path: path.display().to_string(),
                what: "row",
                line: k + 2,
                detail: format!("expected at least {} fields, got {}", idx + 1, fields.len()),
            })?;
            row.push(parse_f64(path, k + 2, field)?);
        }
        rows.push(row);
    }
    Ok(rows)
}
