//! Flat `key=value` run configuration.
//!
//! One assignment per line, dotted keys, `#` starts a comment line. Unknown
//! and repeated keys are errors, so a typo never silently falls back to a
//! default.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::norms::NormConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitProfile {
    Gaussian,
    Wavepacket,
}

impl FromStr for InitProfile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gaussian" => Ok(InitProfile::Gaussian),
            "wavepacket" => Ok(InitProfile::Wavepacket),
            _ => Err(format!("expected gaussian or wavepacket, got '{s}'")),
        }
    }
}

impl InitProfile {
    fn name(self) -> &'static str {
        match self {
            InitProfile::Gaussian => "gaussian",
            InitProfile::Wavepacket => "wavepacket",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub n: usize,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitConfig {
    pub profile: InitProfile,
    /// sup|h₀|
    pub amplitude: f64,
    /// Standard deviation of the Gaussian envelope.
    pub width: f64,
    /// Carrier wavenumber of the wavepacket (ignored for gaussian).
    pub carrier: f64,
    pub seed: u64,
    /// Relative size of the seeded random perturbation added to the envelope.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub order: usize,
    pub dno_order: usize,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Steps between snapshot files.
    pub snapshot_every: usize,
    /// Steps between diagnostics rows.
    pub diagnostics_every: usize,
    /// Probe frequencies, already snapped to the lattice.
    pub probe_frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub init: InitConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
    pub norms: NormConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid: GridConfig { n: 512, period: 400.0 },
            init: InitConfig {
                profile: InitProfile::Gaussian,
                amplitude: 0.01,
                width: 5.0,
                carrier: 1.0,
                seed: 0,
                noise: 0.0,
            },
            evolution: EvolutionConfig {
                dt: 0.05,
                t_end: 100.0,
                order: 3,
                dno_order: 4,
                dealias: true,
            },
            output: OutputConfig {
                dir: PathBuf::from("out"),
                snapshot_every: 100,
                diagnostics_every: 10,
                probe_frequencies: vec![1.0],
            },
            norms: NormConfig::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "grid.n",
    "grid.period",
    "init.profile",
    "init.amplitude",
    "init.width",
    "init.carrier",
    "init.seed",
    "init.noise",
    "evolution.dt",
    "evolution.t_end",
    "evolution.order",
    "evolution.dno_order",
    "evolution.dealias",
    "output.dir",
    "output.snapshot_every",
    "output.diagnostics_every",
    "output.probe_frequencies",
    "norms.sobolev_index",
    "norms.z_beta",
    "norms.z_weight",
    "norms.zprime_index",
];

const REQUIRED: &[&str] = &["grid.n", "init.amplitude"];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn get<T: FromStr>(&self, key: &str, into: &mut T, what: &str) -> Result<()> {
        if let Some((line, raw)) = self.map.get(key) {
            *into = raw.parse().map_err(|_| Error::Config {
                line: *line,
                key: key.into(),
                msg: format!("expects {what}, got '{raw}'"),
            })?;
        }
        Ok(())
    }

    fn fail(&self, key: &str, msg: impl Into<String>) -> Error {
        let msg = msg.into();
        match self.line(key) {
            Some(line) => Error::Config {
                line,
                key: key.into(),
                msg,
            },
            None => Error::ConfigValue { key: key.into(), msg },
        }
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Config {
                line,
                key: body.into(),
                msg: "is not a key=value assignment".into(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::Config {
                line,
                key: k.into(),
                msg: "is not a known key".into(),
            });
        }
        if let Some((first, _)) = map.get(k) {
            return Err(Error::DuplicateKey {
                key: k.into(),
                first: *first,
                second: line,
            });
        }
        map.insert(k.into(), (line, v.into()));
    }
    Ok(Entries { map })
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

/// Parse and validate configuration text.
pub fn parse_config_str(text: &str) -> Result<SimConfig> {
    let e = tokenize(text)?;
    for key in REQUIRED {
        if e.line(key).is_none() {
            return Err(Error::ConfigValue {
                key: (*key).into(),
                msg: "is required".into(),
            });
        }
    }
    let mut c = SimConfig::default();
    e.get("grid.n", &mut c.grid.n, "an integer")?;
    e.get("grid.period", &mut c.grid.period, "a number")?;
    e.get("init.profile", &mut c.init.profile, "gaussian or wavepacket")?;
    e.get("init.amplitude", &mut c.init.amplitude, "a number")?;
    e.get("init.width", &mut c.init.width, "a number")?;
    e.get("init.carrier", &mut c.init.carrier, "a number")?;
    e.get("init.seed", &mut c.init.seed, "an unsigned integer")?;
    e.get("init.noise", &mut c.init.noise, "a number")?;
    e.get("evolution.dt", &mut c.evolution.dt, "a number")?;
    e.get("evolution.t_end", &mut c.evolution.t_end, "a number")?;
    e.get("evolution.order", &mut c.evolution.order, "an integer")?;
    e.get("evolution.dno_order", &mut c.evolution.dno_order, "an integer")?;
    if let Some((line, raw)) = e.map.get("evolution.dealias") {
        c.evolution.dealias = parse_bool(raw).ok_or_else(|| Error::Config {
            line: *line,
            key: "evolution.dealias".into(),
            msg: format!("expects true or false, got '{raw}'"),
        })?;
    }
    if let Some((_, raw)) = e.map.get("output.dir") {
        c.output.dir = PathBuf::from(raw);
    }
    e.get("output.snapshot_every", &mut c.output.snapshot_every, "an integer")?;
    c.output.diagnostics_every = c.output.snapshot_every.min(10);
    e.get("output.diagnostics_every", &mut c.output.diagnostics_every, "an integer")?;
    if let Some((line, raw)) = e.map.get("output.probe_frequencies") {
        c.output.probe_frequencies = parse_list(raw).ok_or_else(|| Error::Config {
            line: *line,
            key: "output.probe_frequencies".into(),
            msg: format!("expects a comma separated list of numbers, got '{raw}'"),
        })?;
    }
    e.get("norms.sobolev_index", &mut c.norms.sobolev_index, "a number")?;
    e.get("norms.z_beta", &mut c.norms.z_beta, "a number")?;
    e.get("norms.z_weight", &mut c.norms.z_weight, "a number")?;
    e.get("norms.zprime_index", &mut c.norms.zprime_index, "an integer")?;
    validate(&mut c, Some(&e))?;
    Ok(c)
}

pub fn parse_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Check the invariants of a configuration built in code.
pub fn validate_config(cfg: &mut SimConfig) -> Result<()> {
    validate(cfg, None)
}

fn validate(c: &mut SimConfig, e: Option<&Entries>) -> Result<()> {
    let fail = |key: &str, msg: &str| match e {
        Some(e) => e.fail(key, msg),
        None => Error::ConfigValue {
            key: key.into(),
            msg: msg.into(),
        },
    };
    if c.grid.n < 8 {
        return Err(fail("grid.n", "must be at least 8"));
    }
    if !c.grid.n.is_power_of_two() {
        return Err(fail("grid.n", "must be a power of two"));
    }
    if !(c.grid.period.is_finite() && c.grid.period > 0.0) {
        return Err(fail("grid.period", "must be positive"));
    }
    if !(c.init.amplitude.is_finite() && c.init.amplitude > 0.0) {
        return Err(fail("init.amplitude", "must be positive"));
    }
    if !(c.init.width.is_finite() && c.init.width > 0.0) {
        return Err(fail("init.width", "must be positive"));
    }
    if !c.init.carrier.is_finite() {
        return Err(fail("init.carrier", "must be finite"));
    }
    if !(c.init.noise.is_finite() && c.init.noise >= 0.0) {
        return Err(fail("init.noise", "must be a finite value >= 0"));
    }
    let ev = &c.evolution;
    if !(ev.dt.is_finite() && ev.dt > 0.0) {
        return Err(fail("evolution.dt", "must be positive"));
    }
    // t_end = 0 is allowed and records the initial state only
    if !(ev.t_end.is_finite() && (ev.t_end == 0.0 || ev.t_end >= ev.dt)) {
        return Err(fail("evolution.t_end", "must be 0 or at least evolution.dt"));
    }
    if !(1..=4).contains(&ev.order) {
        return Err(fail("evolution.order", "must be 1, 2, 3 or 4"));
    }
    if ev.order == 4 && ev.dno_order < 4 {
        return Err(fail("evolution.dno_order", "must be at least 4 when evolution.order is 4"));
    }
    if ev.dno_order > crate::dno::MAX_ORDER {
        return Err(fail("evolution.dno_order", "exceeds the supported series length"));
    }
    let max_xi = std::f64::consts::PI * c.grid.n as f64 / c.grid.period;
    if ev.dt * max_xi.sqrt() > std::f64::consts::FRAC_PI_4 {
        return Err(fail(
            "evolution.dt",
            "violates dt*max|xi|^(1/2) <= pi/4 for this grid",
        ));
    }
    if c.output.snapshot_every == 0 {
        return Err(fail("output.snapshot_every", "must be at least 1"));
    }
    if c.output.diagnostics_every == 0 {
        return Err(fail("output.diagnostics_every", "must be at least 1"));
    }
    let grid = FourierGrid::new(c.grid.n, c.grid.period)?;
    let mut snapped = Vec::with_capacity(c.output.probe_frequencies.len());
    for &p in &c.output.probe_frequencies {
        match grid.snap_frequency(p) {
            Some((_, xi)) => snapped.push(xi),
            None => {
                return Err(fail(
                    "output.probe_frequencies",
                    &format!("contains {p}, outside the resolved band"),
                ))
            }
        }
    }
    c.output.probe_frequencies = snapped;
    if let Err(err) = c.norms.validate() {
        if let (Error::ConfigValue { key, msg }, Some(e)) = (&err, e) {
            return Err(e.fail(key, msg.clone()));
        }
        return Err(err);
    }
    Ok(())
}

/// Full `key=value` listing of a configuration, every default spelled out.
/// Parsing the output reproduces the configuration.
pub fn render_config(c: &SimConfig) -> String {
    let mut s = String::new();
    let probes = c
        .output
        .probe_frequencies
        .iter()
        .map(|p| format!("{p:?}"))
        .collect::<Vec<_>>()
        .join(",");
    let rows: Vec<(&str, String)> = vec![
        ("grid.n", c.grid.n.to_string()),
        ("grid.period", format!("{:?}", c.grid.period)),
        ("init.profile", c.init.profile.name().into()),
        ("init.amplitude", format!("{:?}", c.init.amplitude)),
        ("init.width", format!("{:?}", c.init.width)),
        ("init.carrier", format!("{:?}", c.init.carrier)),
        ("init.seed", c.init.seed.to_string()),
        ("init.noise", format!("{:?}", c.init.noise)),
        ("evolution.dt", format!("{:?}", c.evolution.dt)),
        ("evolution.t_end", format!("{:?}", c.evolution.t_end)),
        ("evolution.order", c.evolution.order.to_string()),
        ("evolution.dno_order", c.evolution.dno_order.to_string()),
        ("evolution.dealias", c.evolution.dealias.to_string()),
        ("output.dir", c.output.dir.display().to_string()),
        ("output.snapshot_every", c.output.snapshot_every.to_string()),
        ("output.diagnostics_every", c.output.diagnostics_every.to_string()),
        ("output.probe_frequencies", probes),
        ("norms.sobolev_index", format!("{:?}", c.norms.sobolev_index)),
        ("norms.z_beta", format!("{:?}", c.norms.z_beta)),
        ("norms.z_weight", format!("{:?}", c.norms.z_weight)),
        ("norms.zprime_index", c.norms.zprime_index.to_string()),
    ];
    s.push_str("# resolved configuration\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_filled() {
        let c = parse_config_str("grid.n=256\ninit.amplitude=0.01\n").unwrap();
        assert_eq!(c.grid.n, 256);
        assert_eq!(c.grid.period, 400.0);
        assert_eq!(c.evolution.dt, 0.05);
        assert_eq!(c.evolution.order, 3);
        assert_eq!(c.evolution.dno_order, 4);
    }

    #[test]
    fn power_of_two() {
        let err = parse_config_str("grid.n=100\ninit.amplitude=0.01").unwrap_err();
        assert!(err.to_string().contains("grid.n must be a power of two"), "{err}");
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn duplicates_report_both_lines() {
        let err = parse_config_str("grid.n=256\n# c\ninit.amplitude=0.01\ngrid.n=512").unwrap_err();
        match err {
            Error::DuplicateKey { first, second, .. } => assert_eq!((first, second), (1, 4)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_and_mistyped() {
        let err = parse_config_str("grid.n=256\ninit.amplitud=0.01").unwrap_err();
        assert!(err.to_string().contains("init.amplitud"));
        assert!(err.to_string().contains("line 2"));
        let err = parse_config_str("grid.n=2x6\ninit.amplitude=0.01").unwrap_err();
        assert!(err.to_string().contains("grid.n expects an integer"));
        assert!(parse_config_str("grid.n=256").is_err());
    }

    #[test]
    fn probes_snapped() {
        let c = parse_config_str("grid.n=256\ninit.amplitude=0.01\noutput.probe_frequencies=1.0, 0.5").unwrap();
        let dxi = 2.0 * std::f64::consts::PI / 400.0;
        for p in &c.output.probe_frequencies {
            assert!(((p / dxi).round() - p / dxi).abs() < 1e-9);
        }
    }

    #[test]
    fn render_round_trips() {
        let c = parse_config_str("grid.n=256\ninit.amplitude=0.02\ninit.profile=wavepacket").unwrap();
        assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c);
    }
}
