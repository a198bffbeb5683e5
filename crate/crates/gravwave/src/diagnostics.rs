//! The diagnostics time series and its CSV form.
//!
//! Columns, in order: `t, linf_h, linf_lambda_phi, zprime, z_profile,
//! energy_e0, l2_u, weighted_profile`, then `absf_p, argf_p, phase_H_p,
//! absg_p` for each probe `p = 0, 1, ...`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

pub const BASE_COLUMNS: [&str; 8] = [
    "t",
    "linf_h",
    "linf_lambda_phi",
    "zprime",
    "z_profile",
    "energy_e0",
    "l2_u",
    "weighted_profile",
];

const PROBE_COLUMNS: [&str; 4] = ["absf", "argf", "phase_H", "absg"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSample {
    pub absf: f64,
    /// arg f̂ in (−π, π]
    pub argf: f64,
    pub phase_h: f64,
    pub absg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub t: f64,
    pub linf_h: f64,
    pub linf_lambda_phi: f64,
    pub zprime: f64,
    pub z_profile: f64,
    pub energy_e0: f64,
    pub l2_u: f64,
    pub weighted_profile: f64,
    pub probes: Vec<ProbeSample>,
}

impl Record {
    fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.linf_h,
            self.linf_lambda_phi,
            self.zprime,
            self.z_profile,
            self.energy_e0,
            self.l2_u,
            self.weighted_profile,
        ];
        for p in &self.probes {
            v.extend([p.absf, p.argf, p.phase_h, p.absg]);
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

pub fn header(probes: usize) -> Vec<String> {
    let mut h: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for p in 0..probes {
        h.extend(PROBE_COLUMNS.iter().map(|c| format!("{c}_{p}")));
    }
    h
}

/// Row-at-a-time CSV writer; every row is flushed so an aborted run still
/// leaves a readable prefix.
pub struct DiagnosticsWriter<W: Write> {
    inner: csv::Writer<W>,
    probes: usize,
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(sink: W, probes: usize) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(header(probes)).map_err(csv_err)?;
        inner.flush()?;
        Ok(DiagnosticsWriter { inner, probes })
    }

    pub fn write(&mut self, r: &Record) -> Result<()> {
        if r.probes.len() != self.probes {
            return Err(Error::Diagnostics(format!(
                "record has {} probes, header has {}",
                r.probes.len(),
                self.probes
            )));
        }
        // Debug formatting of f64 is the shortest round-trip representation
        let fields: Vec<String> = r.values().iter().map(|v| format!("{v:?}")).collect();
        self.inner.write_record(&fields).map_err(csv_err)?;
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Diagnostics(e.to_string())
}

/// Parsed diagnostics file.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub probes: usize,
    pub records: Vec<Record>,
}

impl Diagnostics {
    pub fn series(&self, column: &str) -> Option<Vec<(f64, f64)>> {
        let pick: fn(&Record) -> f64 = match column {
            "linf_h" => |r| r.linf_h,
            "linf_lambda_phi" => |r| r.linf_lambda_phi,
            "zprime" => |r| r.zprime,
            "z_profile" => |r| r.z_profile,
            "energy_e0" => |r| r.energy_e0,
            "l2_u" => |r| r.l2_u,
            "weighted_profile" => |r| r.weighted_profile,
            _ => return None,
        };
        Some(self.records.iter().map(|r| (r.t, pick(r))).collect())
    }
}

/// Parse a diagnostics CSV, checking the header contract, the field count of
/// every row, the numeric fields and that time strictly increases.
pub fn read_diagnostics(bytes: &[u8]) -> Result<Diagnostics> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let head: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if head.len() < BASE_COLUMNS.len() || !(head.len() - BASE_COLUMNS.len()).is_multiple_of(PROBE_COLUMNS.len()) {
        return Err(Error::Diagnostics(format!("unexpected column count {}", head.len())));
    }
    let probes = (head.len() - BASE_COLUMNS.len()) / PROBE_COLUMNS.len();
    let want = header(probes);
    if let Some((i, (got, exp))) = head.iter().zip(&want).enumerate().find(|(_, (g, e))| g != e) {
        return Err(Error::Diagnostics(format!(
            "column {i} is '{got}', expected '{exp}'"
        )));
    }
    let mut records = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = row + 2;
        if rec.len() != want.len() {
            return Err(Error::Diagnostics(format!(
                "line {line}: expected {} fields, found {}",
                want.len(),
                rec.len()
            )));
        }
        let mut v = Vec::with_capacity(rec.len());
        for (j, field) in rec.iter().enumerate() {
            let x: f64 = field.trim().parse().map_err(|_| {
                Error::Diagnostics(format!("line {line}: {} is not a number: '{field}'", want[j]))
            })?;
            if !x.is_finite() {
                return Err(Error::Diagnostics(format!("line {line}: {} is not finite", want[j])));
            }
            v.push(x);
        }
        if !(v[0] > prev) {
            return Err(Error::NonMonotoneTime { prev, next: v[0] });
        }
        prev = v[0];
        let probes_v = v[BASE_COLUMNS.len()..]
            .chunks_exact(PROBE_COLUMNS.len())
            .map(|c| ProbeSample {
                absf: c[0],
                argf: c[1],
                phase_h: c[2],
                absg: c[3],
            })
            .collect();
        records.push(Record {
            t: v[0],
            linf_h: v[1],
            linf_lambda_phi: v[2],
            zprime: v[3],
            z_profile: v[4],
            energy_e0: v[5],
            l2_u: v[6],
            weighted_profile: v[7],
            probes: probes_v,
        });
    }
    Ok(Diagnostics { probes, records })
}
