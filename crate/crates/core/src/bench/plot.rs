use std::path::Path;

use super::ModelDocument;
use crate::error::{config, Result};

/// Regular grid over the model's input box with predictions, in raw units.
/// Columns are `x` (or `x1, x2`) followed by `y_pred`.
pub fn plot_grid(doc: &ModelDocument, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if resolution < 2 {
        return config("plot resolution must be >= 2");
    }
    let scaler = &doc.scaler;
    let dim = scaler.feature_min.len();
    let step = |i: usize| i as f64 / (resolution - 1) as f64;
    let points: Vec<Vec<f64>> = match dim {
        1 => (0..resolution).map(|i| vec![step(i)]).collect(),
        2 => (0..resolution)
            .flat_map(|i| (0..resolution).map(move |j| vec![step(i), step(j)]))
            .collect(),
        _ => return config(format!("plot export supports 1 or 2 inputs, model has {dim}")),
    };
    let rows: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let preds = doc.model.predict_rows(&rows)?;
    Ok(points
        .iter()
        .zip(preds)
        .map(|(u, y)| {
            let mut row: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(j, v)| scaler.feature_min[j] + v * (scaler.feature_max[j] - scaler.feature_min[j]))
                .collect();
            row.push(scaler.denormalize_target(y));
            row
        })
        .collect())
}

pub fn write_plot_csv(rows: &[Vec<f64>], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let header: &[&str] = match rows.first().map(|r| r.len()) {
        Some(2) => &["x", "y_pred"],
        _ => &["x1", "x2", "y_pred"],
    };
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
