//! Spectrum snapshot files.
//!
//! Binary layout, little endian: the 7-byte magic `GWSPEC1`, `n` as u64,
//! period and time as f64, then `n` (re, im) f64 pairs in ascending
//! frequency order.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::spectrum::Spectrum;

pub const MAGIC: &[u8; 7] = b"GWSPEC1";
const HEADER: usize = 7 + 8 + 8 + 8;
/// Largest grid written with a JSON mirror.
pub const JSON_MIRROR_MAX_N: usize = 256;
/// Largest point count accepted when decoding.
pub const MAX_N: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub period: f64,
    pub t: f64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct JsonSnapshot {
    magic: String,
    n: u64,
    period: f64,
    t: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn check_header(n: u64, period: f64, t: f64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() || n > MAX_N {
        return Err(Error::Snapshot(format!("bad point count {n}")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::Snapshot(format!("bad period {period}")));
    }
    if !t.is_finite() {
        return Err(Error::Snapshot("non-finite time".into()));
    }
    Ok(())
}

impl Snapshot {
    pub fn from_spectrum(s: &Spectrum, t: f64) -> Self {
        Snapshot {
            period: s.grid().period(),
            t,
            coeffs: s.coeffs().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let grid = FourierGrid::new(self.n(), self.period)?;
        Spectrum::from_coeffs(&grid, self.coeffs.clone())
    }

    /// Rebuild on an existing grid, which must match.
    pub fn to_spectrum_on(&self, grid: &FourierGrid) -> Result<Spectrum> {
        if grid.n() != self.n() || grid.period() != self.period {
            return Err(Error::GridMismatch);
        }
        Spectrum::from_coeffs(grid, self.coeffs.clone())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 16 * self.n());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.n() as u64).to_le_bytes());
        out.extend_from_slice(&self.period.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for c in &self.coeffs {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER {
            return Err(Error::Snapshot(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[..7] != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let word = |at: usize| -> [u8; 8] { bytes[at..at + 8].try_into().expect("8 bytes") };
        let n = u64::from_le_bytes(word(7));
        let period = f64::from_le_bytes(word(15));
        let t = f64::from_le_bytes(word(23));
        check_header(n, period, t)?;
        let body = &bytes[HEADER..];
        let want = (n as usize)
            .checked_mul(16)
            .ok_or_else(|| Error::Snapshot("size overflow".into()))?;
        if body.len() != want {
            return Err(Error::Snapshot(format!(
                "expected {want} payload bytes, found {}",
                body.len()
            )));
        }
        let coeffs = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect::<Vec<_>>();
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Snapshot("non-finite coefficient".into()));
        }
        Ok(Snapshot { period, t, coeffs })
    }

    pub fn to_json(&self) -> String {
        let js = JsonSnapshot {
            magic: String::from_utf8_lossy(MAGIC).into_owned(),
            n: self.n() as u64,
            period: self.period,
            t: self.t,
            re: self.coeffs.iter().map(|c| c.re).collect(),
            im: self.coeffs.iter().map(|c| c.im).collect(),
        };
        serde_json::to_string(&js).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let js: JsonSnapshot = serde_json::from_str(text)?;
        if js.magic.as_bytes() != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        check_header(js.n, js.period, js.t)?;
        if js.re.len() as u64 != js.n || js.im.len() as u64 != js.n {
            return Err(Error::Snapshot("coefficient arrays do not match n".into()));
        }
        let coeffs: Vec<Complex64> = js
            .re
            .iter()
            .zip(&js.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Snapshot("non-finite coefficient".into()));
        }
        Ok(Snapshot {
            period: js.period,
            t: js.t,
            coeffs,
        })
    }

    /// Write `<stem>.gwspec`, plus `<stem>.json` when the grid is small.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}.gwspec")), self.encode())?;
        if self.n() <= JSON_MIRROR_MAX_N {
            std::fs::write(dir.join(format!("{stem}.json")), self.to_json())?;
        }
        Ok(())
    }

    /// Read a `.json` mirror or a binary file, chosen by extension.
    pub fn read(path: &Path) -> Result<Self> {
        if path.extension().is_some_and(|e| e == "json") {
            return Self::from_json(&std::fs::read_to_string(path)?);
        }
        Self::decode(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        Snapshot {
            period: 400.0,
            t: 12.5,
            coeffs: (0..8).map(|i| Complex64::new(i as f64, -0.5 * i as f64)).collect(),
        }
    }

    #[test]
    fn binary_round_trip() {
        let s = sample();
        let bytes = s.encode();
        assert_eq!(bytes.len(), 31 + 128);
        assert_eq!(&bytes[..7], b"GWSPEC1");
        assert_eq!(Snapshot::decode(&bytes).unwrap(), s);
    }

    #[test]
    fn json_round_trip() {
        let s = sample();
        assert_eq!(Snapshot::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = sample().encode();
        assert!(Snapshot::decode(&bytes[..20]).is_err());
        assert!(Snapshot::decode(&bytes[..bytes.len() - 1]).is_err());
        bytes[0] = b'X';
        assert!(Snapshot::decode(&bytes).is_err());
        let mut bad_n = sample().encode();
        bad_n[7] = 9;
        assert!(Snapshot::decode(&bad_n).is_err());
        assert!(Snapshot::from_json("{}").is_err());
    }
}
