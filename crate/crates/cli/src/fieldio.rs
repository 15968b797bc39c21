//! CSV interchange for sampled fields.
//!
//! Two layouts: `r,theta,re,im` for values on the standard product grid
//! (re-importable onto the reconstructed grid for any solve), and
//! `x,y,re,im` for free points, which only support the dense least-squares
//! path. Values are written with 17 significant digits so a round trip is
//! exact.

use meanapprox::grid::{DiskGrid, Field};
use meanapprox::{Complex64, Error, Result};
use std::path::Path;

pub enum IngestedField {
    /// Values aligned with a reconstructed product grid.
    OnGrid { grid: DiskGrid, field: Field },
    /// Free points with uniform weights; dense p = 2 solves only.
    FreePoints {
        points: Vec<Complex64>,
        values: Vec<Complex64>,
    },
}

pub fn export_field(path: &Path, grid: &DiskGrid, field: &Field) -> Result<()> {
    grid.check_alignment(field)?;
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}")))?;
    w.write_record(["r", "theta", "re", "im"])
        .map_err(|e| Error::InvalidParameter(format!("csv write: {e}")))?;
    for (&z, &v) in grid.points().iter().zip(&field.values) {
        w.write_record([
            format!("{:.16e}", z.norm()),
            format!("{:.16e}", z.arg().rem_euclid(2.0 * std::f64::consts::PI)),
            format!("{:.16e}", v.re),
            format!("{:.16e}", v.im),
        ])
        .map_err(|e| Error::InvalidParameter(format!("csv write: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParameter(format!("csv flush: {e}")))?;
    Ok(())
}

pub fn import_field(path: &Path) -> Result<IngestedField> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path:?}: {e}")))?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::InvalidParameter(format!("csv header: {e}")))?
        .clone();
    let cols: Vec<&str> = headers.iter().map(|h| h.trim()).collect();
    let polar = match cols.as_slice() {
        ["r", "theta", "re", "im"] => true,
        ["x", "y", "re", "im"] => false,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unsupported sample header {other:?}; expected r,theta,re,im or x,y,re,im"
            )))
        }
    };
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::InvalidParameter(format!("csv row: {e}")))?;
        let mut row = [0.0; 4];
        for (i, cell) in rec.iter().enumerate().take(4) {
            row[i] = cell
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{cell}' in {path:?}")))?;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty samples file".into()));
    }

    if polar {
        if let Some(on_grid) = try_reconstruct_product(&rows) {
            return Ok(on_grid);
        }
    }
    // fall back to free points
    let (points, values) = rows
        .iter()
        .map(|row| {
            let z = if polar {
                Complex64::from_polar(row[0], row[1])
            } else {
                Complex64::new(row[0], row[1])
            };
            (z, Complex64::new(row[2], row[3]))
        })
        .unzip();
    Ok(IngestedField::FreePoints { points, values })
}

/// Rebuild the product grid the rows came from: distinct radii and angles
/// determine the candidate, which must match the file's nodes to 1e-9.
fn try_reconstruct_product(rows: &[[f64; 4]]) -> Option<IngestedField> {
    let mut radii: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut thetas: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let n_theta = thetas.len();
    let n_r = radii.len();
    if n_theta < 4 || n_r < 1 || n_r * n_theta != rows.len() {
        return None;
    }
    let grid = DiskGrid::product(n_r, n_theta).ok()?;
    let grid_radii: Vec<f64> = grid.radial_nodes().iter().map(|&(r, _)| r).collect();
    for (&a, &b) in grid_radii.iter().zip(&radii) {
        if (a - b).abs() > 1e-9 {
            return None;
        }
    }
    // index rows by (radius rank, theta rank)
    let mut values = vec![Complex64::ZERO; rows.len()];
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    for row in rows {
        let i = radii
            .binary_search_by(|probe| probe.partial_cmp(&(row[0] - 1e-12)).unwrap())
            .unwrap_or_else(|e| e);
        let j = (row[1] / dtheta).round() as usize % n_theta;
        if i >= n_r || ((row[1] - j as f64 * dtheta).abs() > 1e-9) {
            return None;
        }
        values[i * n_theta + j] = Complex64::new(row[2], row[3]);
    }
    Some(IngestedField::OnGrid {
        grid,
        field: Field::labeled(values, "ingested"),
    })
}
