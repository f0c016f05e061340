//! JSON summaries and CSV traces written by the command-line tool.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{FourierStar, Shape};
use crate::optimizer::{Certification, HistoryEntry, ObstacleResult, RunStatus, SymmetryMetrics};
use crate::spectral::EigenResult;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSummary {
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub h: f64,
    pub n_interior: usize,
    pub n_components: usize,
}

impl From<&EigenResult> for EigenSummary {
    fn from(r: &EigenResult) -> Self {
        Self {
            lambda1: r.lambda1,
            residual: r.residual,
            iterations: r.iterations,
            h: r.h,
            n_interior: r.n_interior,
            n_components: r.n_components,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub lambda1: f64,
    pub perimeter: f64,
    pub mu: f64,
    pub optimality_residual: f64,
    pub symmetry: SymmetryMetrics,
    pub coeffs: FourierStar,
    pub cutouts: Vec<Shape>,
    pub status: RunStatus,
    pub center_offset: f64,
    pub certification: Option<Certification>,
    pub history: Vec<HistoryEntry>,
}

impl From<&ObstacleResult> for RunSummary {
    fn from(r: &ObstacleResult) -> Self {
        Self {
            lambda1: r.lambda1,
            perimeter: r.perimeter,
            mu: r.mu,
            optimality_residual: r.optimality_residual,
            symmetry: r.symmetry,
            coeffs: r.obstacle.star.clone(),
            cutouts: r.obstacle.cutouts.clone(),
            status: r.status,
            center_offset: r.center_offset,
            certification: r.certification,
            history: r.history.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `iter,lambda1,perimeter,step`, one row per accepted iteration.
pub fn write_trace<W: Write>(history: &[HistoryEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in history {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}
