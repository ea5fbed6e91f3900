//! Training-curve CSV emission for external plotting.

use std::path::Path;

use crate::error::{Error, Result};
use crate::meta::record::MetaEpochRecord;

/// One plotted point; `test_acc` stays empty in the CSV when absent.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurvePoint {
    pub meta_epoch: usize,
    pub val_acc: f64,
    pub test_acc: Option<f64>,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, 0, format!("{other:?}")),
    }
}

/// Writes `meta_epoch,val_acc,test_acc` rows, one per record, in order.
/// Floats print in shortest round-trip form, so reading the file back
/// recovers the exact values.
pub fn emit_curves(records: &[MetaEpochRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Input("no records to plot".into()));
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in records {
        writer
            .serialize(CurvePoint {
                meta_epoch: r.meta_epoch,
                val_acc: r.val_acc,
                test_acc: r.test_acc,
            })
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_curves(path: &Path) -> Result<Vec<CurvePoint>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut points = Vec::new();
    for row in reader.deserialize() {
        points.push(row.map_err(|e| csv_error(path, e))?);
    }
    Ok(points)
}
