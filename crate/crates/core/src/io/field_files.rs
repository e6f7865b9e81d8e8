use super::IoError;
use crate::field::{EpochField, PotentialField};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
struct FieldMeta<'a> {
    dims: Dims,
    bounds: &'a crate::geom::Rect,
    epoch: EpochMeta,
    stats: crate::field::SolveStats,
    values_csv: String,
    gradient_csv: Option<(String, String)>,
}

#[derive(Debug, Serialize)]
struct Dims {
    width: usize,
    height: usize,
}

#[derive(Debug, Serialize)]
struct EpochMeta {
    index: usize,
    t_start: f64,
    t_end: f64,
}

/// Paths written by [`export_field`].
#[derive(Debug, Clone)]
pub struct FieldExport {
    pub meta: PathBuf,
    pub values: PathBuf,
    pub gradients: Option<(PathBuf, PathBuf)>,
}

/// Write one epoch's field as a JSON header plus a CSV body of `V` values,
/// row-major (row `j = 0` first, `width` comma-separated values per row).
/// With `gradients` set, the two gradient components go to their own CSVs in
/// the same layout.
pub fn export_field(
    epoch_field: &EpochField,
    out_stem: &Path,
    gradients: bool,
) -> Result<FieldExport, IoError> {
    let field = &epoch_field.field;
    let stem = out_stem.display();
    let meta_path = PathBuf::from(format!("{stem}_epoch{}.json", epoch_field.epoch_index));
    let values_path = PathBuf::from(format!("{stem}_epoch{}.csv", epoch_field.epoch_index));
    let grad_paths = gradients.then(|| {
        (
            PathBuf::from(format!("{stem}_epoch{}_gradx.csv", epoch_field.epoch_index)),
            PathBuf::from(format!("{stem}_epoch{}_grady.csv", epoch_field.epoch_index)),
        )
    });

    write_grid_csv(&values_path, field, |f, idx| f.values()[idx])?;
    if let Some((gx, gy)) = &grad_paths {
        write_grid_csv(gx, field, |f, idx| f.gradients()[idx].x)?;
        write_grid_csv(gy, field, |f, idx| f.gradients()[idx].y)?;
    }

    let meta = FieldMeta {
        dims: Dims { width: field.transform().dims.width, height: field.transform().dims.height },
        bounds: &field.transform().bounds,
        epoch: EpochMeta {
            index: epoch_field.epoch_index,
            t_start: epoch_field.t_start,
            t_end: epoch_field.t_end,
        },
        stats: field.stats(),
        values_csv: values_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        gradient_csv: grad_paths.as_ref().map(|(a, b)| {
            (
                a.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                b.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            )
        }),
    };
    let file = File::create(&meta_path).map_err(|e| IoError::file(&meta_path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &meta)
        .map_err(|e| IoError::Json { path: meta_path.display().to_string(), source: e })?;
    w.write_all(b"\n").map_err(|e| IoError::file(&meta_path, e))?;

    Ok(FieldExport { meta: meta_path, values: values_path, gradients: grad_paths })
}

fn write_grid_csv(
    path: &Path,
    field: &PotentialField,
    value: impl Fn(&PotentialField, usize) -> f64,
) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    let mut w = BufWriter::new(file);
    let (width, height) = (field.transform().dims.width, field.transform().dims.height);
    for j in 0..height {
        for i in 0..width {
            if i > 0 {
                write!(w, ",").map_err(|e| IoError::file(path, e))?;
            }
            write!(w, "{}", value(field, j * width + i)).map_err(|e| IoError::file(path, e))?;
        }
        writeln!(w).map_err(|e| IoError::file(path, e))?;
    }
    Ok(())
}
