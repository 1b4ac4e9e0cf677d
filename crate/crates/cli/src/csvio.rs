//! CSV schemas for the experiment outputs (RFC 4180, LF line endings).

use std::path::Path;

/// One table row of the method-comparison experiment.
///
/// Wall times are carried alongside but serialized into a separate timings
/// file so the data CSV stays byte-reproducible across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub j: usize,
    pub gmres_iters_none: usize,
    pub gmres_iters_ad: usize,
    pub gmres_iters_hy: usize,
    pub mult_iters: usize,
    pub kappa_a_ad: f64,
    pub kappa_a_hy: f64,
    pub e_mu_norm_a: f64,
    pub rho_e_mu: f64,
    /// Seconds per method: none, additive, hybrid, multiplicative.
    pub wall_times: [f64; 4],
}

pub const TABLE_HEADER: [&str; 9] = [
    "J",
    "gmres_iters_none",
    "gmres_iters_ad",
    "gmres_iters_hy",
    "mult_iters",
    "kappa_A_ad",
    "kappa_A_hy",
    "E_mu_norm_A",
    "rho_E_mu",
];

impl TableRow {
    pub fn data_record(&self) -> Vec<String> {
        vec![
            self.j.to_string(),
            self.gmres_iters_none.to_string(),
            self.gmres_iters_ad.to_string(),
            self.gmres_iters_hy.to_string(),
            self.mult_iters.to_string(),
            self.kappa_a_ad.to_string(),
            self.kappa_a_hy.to_string(),
            self.e_mu_norm_a.to_string(),
            self.rho_e_mu.to_string(),
        ]
    }

    /// Parse a data record back; wall times are not part of the schema.
    pub fn from_record(fields: &[String]) -> Result<Self, String> {
        if fields.len() != TABLE_HEADER.len() {
            return Err(format!(
                "expected {} fields, got {}",
                TABLE_HEADER.len(),
                fields.len()
            ));
        }
        let us = |i: usize| {
            fields[i]
                .parse::<usize>()
                .map_err(|e| format!("field {i}: {e}"))
        };
        let fl = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|e| format!("field {i}: {e}"))
        };
        Ok(Self {
            j: us(0)?,
            gmres_iters_none: us(1)?,
            gmres_iters_ad: us(2)?,
            gmres_iters_hy: us(3)?,
            mult_iters: us(4)?,
            kappa_a_ad: fl(5)?,
            kappa_a_hy: fl(6)?,
            e_mu_norm_a: fl(7)?,
            rho_e_mu: fl(8)?,
            wall_times: [0.0; 4],
        })
    }
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    writer.write_record(header).map_err(|e| e.to_string())?;
    for row in rows {
        writer.write_record(&row).map_err(|e| e.to_string())?;
    }
    writer.flush().map_err(|e| e.to_string())
}

pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let header = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        rows.push(record.iter().map(String::from).collect());
    }
    Ok((header, rows))
}
