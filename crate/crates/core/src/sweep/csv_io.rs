use std::io::{Read, Write};

use super::SweepError;

pub const HEADER: [&str; 18] = [
    "model_id",
    "m",
    "n",
    "snr_db",
    "gamma",
    "r",
    "target_rate_nats",
    "p_mc",
    "ci_low",
    "ci_high",
    "p_low_snr",
    "p_low_outage_approx",
    "p_piecewise",
    "p_scalar_exact",
    "d_dmt",
    "gamma_high_boundary",
    "trials",
    "seed",
];

/// One (model, SNR, r) cell. `None` columns are written blank.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model_id: String,
    pub m: usize,
    pub n: usize,
    pub snr_db: f64,
    pub gamma: f64,
    pub r: f64,
    pub target_rate_nats: f64,
    pub p_mc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_low_snr: f64,
    pub p_low_outage_approx: Option<f64>,
    pub p_piecewise: Option<f64>,
    pub p_scalar_exact: Option<f64>,
    pub d_dmt: Option<f64>,
    pub gamma_high_boundary: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Nine significant digits, scientific notation.
fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl SweepRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.model_id.clone(),
            self.m.to_string(),
            self.n.to_string(),
            num(self.snr_db),
            num(self.gamma),
            num(self.r),
            num(self.target_rate_nats),
            num(self.p_mc),
            num(self.ci_low),
            num(self.ci_high),
            num(self.p_low_snr),
            opt(self.p_low_outage_approx),
            opt(self.p_piecewise),
            opt(self.p_scalar_exact),
            opt(self.d_dmt),
            opt(self.gamma_high_boundary),
            self.trials.to_string(),
            self.seed.to_string(),
        ]
    }

    fn from_record(rec: &csv::StringRecord, row: usize) -> Result<Self, SweepError> {
        let field = |i: usize| rec.get(i).unwrap_or("");
        let err = |i: usize, msg: String| SweepError::Schema {
            row,
            msg: format!("column {}: {msg}", HEADER[i]),
        };
        let f = |i: usize| -> Result<f64, SweepError> {
            field(i).parse::<f64>().map_err(|e| err(i, e.to_string()))
        };
        let o = |i: usize| -> Result<Option<f64>, SweepError> {
            match field(i) {
                "" => Ok(None),
                s => s.parse::<f64>().map(Some).map_err(|e| err(i, e.to_string())),
            }
        };
        let u = |i: usize| -> Result<u64, SweepError> {
            field(i).parse::<u64>().map_err(|e| err(i, e.to_string()))
        };
        if rec.len() != HEADER.len() {
            return Err(SweepError::Schema {
                row,
                msg: format!("{} fields, expected {}", rec.len(), HEADER.len()),
            });
        }
        Ok(Self {
            model_id: field(0).to_string(),
            m: u(1)? as usize,
            n: u(2)? as usize,
            snr_db: f(3)?,
            gamma: f(4)?,
            r: f(5)?,
            target_rate_nats: f(6)?,
            p_mc: f(7)?,
            ci_low: f(8)?,
            ci_high: f(9)?,
            p_low_snr: f(10)?,
            p_low_outage_approx: o(11)?,
            p_piecewise: o(12)?,
            p_scalar_exact: o(13)?,
            d_dmt: o(14)?,
            gamma_high_boundary: o(15)?,
            trials: u(16)?,
            seed: u(17)?,
        })
    }
}

/// Writes an optional `#` comment line, the header and the rows.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow], comment: Option<&str>) -> Result<(), SweepError> {
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}").map_err(|e| SweepError::Csv(e.into()))?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush().map_err(|e| SweepError::Csv(e.into()))?;
    Ok(())
}

/// Reads rows written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, SweepError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = rdr.headers()?.clone();
    for (i, name) in HEADER.iter().enumerate() {
        if header.get(i) != Some(*name) {
            return Err(SweepError::Schema {
                row: 0,
                msg: format!(
                    "missing column `{name}` at position {i} (found `{}`)",
                    header.get(i).unwrap_or("")
                ),
            });
        }
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| SweepRow::from_record(&rec?, i + 1))
        .collect()
}
