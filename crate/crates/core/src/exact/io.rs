//! CSV and JSON forms of a [`MomentTable`].
//!
//! CSV layout: an optional `# config: ...` line, the header line
//! [`CSV_HEADER`], then one row per `n` from 0 to `n_max`. Floats use the
//! shortest representation that round-trips. The correlation columns are
//! empty for `n < 2`, where both variances vanish.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::MomentTable;
use crate::error::Result;

pub const CSV_HEADER: &str = "n,ES,EK,EN,VarS,VarK,VarN,CovSK,CovSN,RhoSK,RhoSN";

/// One row of the exported table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
pub struct MomentRow {
    #[serde(rename = "n")]
    pub n: usize,
    #[serde(rename = "ES")]
    pub es: f64,
    #[serde(rename = "EK")]
    pub ek: f64,
    #[serde(rename = "EN")]
    pub en: f64,
    pub var_s: f64,
    pub var_k: f64,
    pub var_n: f64,
    #[serde(rename = "CovSK")]
    pub cov_sk: f64,
    #[serde(rename = "CovSN")]
    pub cov_sn: f64,
    #[serde(rename = "RhoSK")]
    pub rho_sk: Option<f64>,
    #[serde(rename = "RhoSN")]
    pub rho_sn: Option<f64>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    p: f64,
    n_max: usize,
    precision: super::Precision,
    rows: &'a [MomentRow],
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl MomentTable {
    pub fn row(&self, n: usize) -> Result<MomentRow> {
        Ok(MomentRow {
            n,
            es: self.mean_s(n)?,
            ek: self.mean_k(n)?,
            en: self.mean_n(n)?,
            var_s: self.var_s(n)?,
            var_k: self.var_k(n)?,
            var_n: self.var_n(n)?,
            cov_sk: self.cov_sk(n)?,
            cov_sn: self.cov_sn(n)?,
            rho_sk: if n < 2 { None } else { Some(self.rho_sk(n)?) },
            rho_sn: if n < 2 { None } else { Some(self.rho_sn(n)?) },
        })
    }

    pub fn rows(&self) -> Vec<MomentRow> {
        (0..=self.n_max())
            .map(|n| self.row(n).expect("index in range"))
            .collect()
    }

    /// Writes the CSV form; `config` becomes the `# config:` line when given.
    pub fn write_csv<W: Write>(&self, mut out: W, config: Option<&str>) -> Result<()> {
        if let Some(c) = config {
            writeln!(out, "# config: {c}")?;
        }
        writeln!(out, "{CSV_HEADER}")?;
        for r in self.rows() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.es,
                r.ek,
                r.en,
                r.var_s,
                r.var_k,
                r.var_n,
                r.cov_sk,
                r.cov_sn,
                opt(r.rho_sk),
                opt(r.rho_sn)
            )?;
        }
        Ok(())
    }

    /// JSON object `{p, n_max, precision, rows: [...]}` with the CSV column
    /// names as row fields and `null` correlations for `n < 2`.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let rows = self.rows();
        Ok(serde_json::to_value(TableJson {
            p: self.p(),
            n_max: self.n_max(),
            precision: self.precision(),
            rows: &rows,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Precision;

    #[test]
    fn csv_layout() {
        let t = MomentTable::compute(0.5, 4, Precision::Standard).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, Some("p=0.5")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config: p=0.5");
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines.len(), 2 + 5);
        assert_eq!(lines[2], "0,0,0,0,0,0,0,0,0,,");
        let row2: Vec<&str> = lines[4].split(',').collect();
        assert_eq!(row2.len(), 11);
        assert_eq!(row2[1].parse::<f64>().unwrap(), 2.0);
        assert_eq!(row2[2].parse::<f64>().unwrap(), 4.0);
        assert!((row2[9].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_floats_round_trip() {
        let t = MomentTable::compute(0.3, 50, Precision::Standard).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[3], t.mean_n(50).unwrap());
        assert_eq!(cols[7], t.cov_sk(50).unwrap());
    }

    #[test]
    fn json_mirrors_csv_columns() {
        let t = MomentTable::compute(0.5, 3, Precision::Extended).unwrap();
        let v = t.to_json().unwrap();
        assert_eq!(v["precision"], "extended");
        assert_eq!(v["rows"][2]["ES"], 2.0);
        assert_eq!(v["rows"][2]["VarS"], 2.0);
        assert!(v["rows"][1]["RhoSK"].is_null());
        let back: MomentRow = serde_json::from_value(v["rows"][3].clone()).unwrap();
        assert_eq!(back, t.row(3).unwrap());
    }
}
