//! Long-format CSV tables. Floats carry 17 significant digits so that runs
//! can be compared byte for byte.

use crate::error::{Error, Result};
use crate::mc::{DecayReport, McEstimate};
use crate::operators::droplet_band;
use crate::spectral::{EnergyWindow, SpectralData};

/// `{:.16e}`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header and string rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Export(format!(
                "row of {} cells for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Export(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Export(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Export(e.to_string()))
    }
}

fn estimate_cells(e: &McEstimate) -> Vec<String> {
    vec![fmt_f64(e.mean), fmt_f64(e.stderr), e.count.to_string()]
}

/// Columns `index, energy`.
pub fn spectrum_table(sd: &SpectralData<f64>) -> Result<Table> {
    let mut t = Table::new(&["index", "energy"]);
    for (k, &e) in sd.values().iter().enumerate() {
        t.push(vec![k.to_string(), fmt_f64(e)])?;
    }
    Ok(t)
}

/// Columns `seed, x_index, y_index, window_lo, window_hi, value` with
/// `value = Q(x, y, I)`.
pub fn correlator_table(
    sd: &SpectralData<f64>,
    pairs: &[(usize, usize)],
    window: &EnergyWindow<f64>,
    seed: u64,
) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "x_index",
        "y_index",
        "window_lo",
        "window_hi",
        "value",
    ]);
    for &(x, y) in pairs {
        t.push(vec![
            seed.to_string(),
            x.to_string(),
            y.to_string(),
            fmt_f64(window.lo()),
            fmt_f64(window.hi()),
            fmt_f64(sd.eigenfunction_correlator(x, y, window)),
        ])?;
    }
    Ok(t)
}

/// Decay curve: `separation, mean, stderr, count`.
pub fn decay_table(report: &DecayReport) -> Result<Table> {
    let mut t = Table::new(&["separation", "mean", "stderr", "count"]);
    for r in &report.rows {
        let mut row = vec![r.separation.to_string()];
        row.extend(estimate_cells(&r.estimate));
        t.push(row)?;
    }
    Ok(t)
}

/// λ sweep: `lambda, mean, stderr, count`, sorted by `λ`.
pub fn sweep_table(points: &[(f64, McEstimate)]) -> Result<Table> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut t = Table::new(&["lambda", "mean", "stderr", "count"]);
    for (l, e) in &sorted {
        let mut row = vec![fmt_f64(*l)];
        row.extend(estimate_cells(e));
        t.push(row)?;
    }
    Ok(t)
}

/// Droplet band endpoints: `g, n, lo, hi`.
pub fn band_table(gs: &[f64], ns: &[usize]) -> Result<Table> {
    let mut t = Table::new(&["g", "n", "lo", "hi"]);
    for &g in gs {
        for &n in ns {
            let b = droplet_band(g, n)?;
            t.push(vec![
                fmt_f64(g),
                n.to_string(),
                fmt_f64(b.lo()),
                fmt_f64(b.hi()),
            ])?;
        }
    }
    Ok(t)
}
