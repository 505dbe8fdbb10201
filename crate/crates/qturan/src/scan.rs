//! Grid scans over (q, n, z), CSV emission/parsing, and exit-code policy.
//!
//! Grid points are independent; the scan evaluates them in parallel and
//! restores deterministic q-major, then n, then z order, so identical
//! invocations produce byte-identical CSV. Reals are serialized with 17
//! significant digits, which round-trips every f64 exactly.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::QDomain;
use crate::tails::RemainderKind;
use crate::turan::{sharpness_probe, verify_alzer, verify_turan, Outcome};

/// Which family a scan record belongs to: the two q-kinds, or the classical
/// exponential check (where the z column holds x and the q column holds 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanKind {
    I,
    E,
    Alzer,
}

impl From<RemainderKind> for ScanKind {
    fn from(k: RemainderKind) -> ScanKind {
        match k {
            RemainderKind::TailI => ScanKind::I,
            RemainderKind::TailJ => ScanKind::E,
        }
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanKind::I => "I",
            ScanKind::E => "E",
            ScanKind::Alzer => "alzer",
        })
    }
}

impl FromStr for ScanKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ScanKind> {
        match s {
            "I" => Ok(ScanKind::I),
            "E" => Ok(ScanKind::E),
            "alzer" => Ok(ScanKind::Alzer),
            other => Err(Error::Parse(format!("unknown kind {other:?}"))),
        }
    }
}

/// Rectangular scan description over (q, n, z).
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub kind: RemainderKind,
    pub q_min: f64,
    pub q_max: f64,
    pub q_steps: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub z_min: f64,
    pub z_max: f64,
    pub z_steps: u32,
    pub tol: f64,
    /// Geometric z spacing instead of linear.
    pub log_z: bool,
}

impl GridSpec {
    /// The desk-scale default grid exercising the full stated domain of the
    /// kind: q in 0.05..0.95 (19), n in 1..10, and z in 0.05..0.95 (19,
    /// linear) for kind I or z in 0.1..10 (25, geometric) for kind E.
    pub fn default_for(kind: RemainderKind) -> GridSpec {
        let (z_min, z_max, z_steps, log_z) = match kind {
            RemainderKind::TailI => (0.05, 0.95, 19, false),
            RemainderKind::TailJ => (0.1, 10.0, 25, true),
        };
        GridSpec {
            kind,
            q_min: 0.05,
            q_max: 0.95,
            q_steps: 19,
            n_min: 1,
            n_max: 10,
            z_min,
            z_max,
            z_steps,
            tol: 1e-12,
            log_z,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Argument(m));
        if !(self.q_min.is_finite() && self.q_max.is_finite() && self.q_min < self.q_max) {
            return bad(format!("empty q range: {}..{}", self.q_min, self.q_max));
        }
        if !(self.q_min > 0.0 && self.q_max < 1.0) {
            return bad(format!("q range must lie inside (0,1): {}..{}", self.q_min, self.q_max));
        }
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_min < self.z_max) {
            return bad(format!("empty z range: {}..{}", self.z_min, self.z_max));
        }
        if self.z_min <= 0.0 {
            return bad(format!("z range must be positive, got z_min={}", self.z_min));
        }
        if self.kind == RemainderKind::TailI && self.z_max >= 1.0 {
            return bad(format!("kind I needs z < 1, got z_max={}", self.z_max));
        }
        if self.n_min < 1 {
            return bad(format!("n_min must be >= 1, got {}", self.n_min));
        }
        if self.n_min > self.n_max {
            return bad(format!("empty n range: {}..{}", self.n_min, self.n_max));
        }
        if self.q_steps < 1 || self.z_steps < 1 {
            return bad("q_steps and z_steps must be >= 1".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        Ok(())
    }

    pub fn q_values(&self) -> Vec<f64> {
        linspace(self.q_min, self.q_max, self.q_steps, false)
    }

    pub fn z_values(&self) -> Vec<f64> {
        linspace(self.z_min, self.z_max, self.z_steps, self.log_z)
    }
}

fn linspace(lo: f64, hi: f64, steps: u32, geometric: bool) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let m = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if geometric {
                lo * (hi / lo).powf(i as f64 / m)
            } else {
                lo + (hi - lo) * (i as f64 / m)
            }
        })
        .collect()
}

/// One grid point's verdict, as serialized to CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRecord {
    pub kind: ScanKind,
    pub q: f64,
    pub n: u32,
    pub z: f64,
    pub ratio: f64,
    pub lower_constant: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub error_budget: f64,
    pub outcome: Outcome,
}

/// Outcome counts plus the locations of the thinnest margins.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub certified: usize,
    pub violated: usize,
    pub indeterminate: usize,
    /// (margin, q, n, z) of the smallest lower margin.
    pub min_lower_margin: Option<(f64, f64, u32, f64)>,
    /// (margin, q, n, z) of the smallest upper margin.
    pub min_upper_margin: Option<(f64, f64, u32, f64)>,
}

impl ScanSummary {
    fn from_records(records: &[ScanRecord]) -> ScanSummary {
        let mut s = ScanSummary {
            certified: 0,
            violated: 0,
            indeterminate: 0,
            min_lower_margin: None,
            min_upper_margin: None,
        };
        for r in records {
            match r.outcome {
                Outcome::Certified => s.certified += 1,
                Outcome::Violated => s.violated += 1,
                Outcome::Indeterminate => s.indeterminate += 1,
            }
            if s.min_lower_margin.map_or(true, |(m, ..)| r.lower_margin < m) {
                s.min_lower_margin = Some((r.lower_margin, r.q, r.n, r.z));
            }
            if s.min_upper_margin.map_or(true, |(m, ..)| r.upper_margin < m) {
                s.min_upper_margin = Some((r.upper_margin, r.q, r.n, r.z));
            }
        }
        s
    }
}

impl fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "certified={} violated={} indeterminate={}",
            self.certified, self.violated, self.indeterminate
        )?;
        if let Some((m, q, n, z)) = self.min_lower_margin {
            write!(f, " min_lower_margin={m:.3e} at (q={q}, n={n}, z={z})")?;
        }
        if let Some((m, q, n, z)) = self.min_upper_margin {
            write!(f, " min_upper_margin={m:.3e} at (q={q}, n={n}, z={z})")?;
        }
        Ok(())
    }
}

fn scan_points(spec: &GridSpec) -> Result<Vec<(f64, u32, f64)>> {
    spec.validate()?;
    let qs = spec.q_values();
    let zs = spec.z_values();
    let mut pts = Vec::with_capacity(qs.len() * zs.len() * (spec.n_max - spec.n_min + 1) as usize);
    for &q in &qs {
        for n in spec.n_min..=spec.n_max {
            for &z in &zs {
                pts.push((q, n, z));
            }
        }
    }
    Ok(pts)
}

fn verdict_record(kind: RemainderKind, q: f64, n: u32, z: f64, tol: f64) -> Result<ScanRecord> {
    let dom = QDomain::new(q, z, n)?;
    let v = verify_turan(kind, &dom, tol)?;
    Ok(ScanRecord {
        kind: kind.into(),
        q,
        n,
        z,
        ratio: v.ratio,
        lower_constant: v.lower_constant,
        lower_margin: v.lower_margin,
        upper_margin: v.upper_margin,
        error_budget: v.error_budget,
        outcome: v.outcome,
    })
}

/// Run one verdict per grid point, in parallel, in deterministic record order
/// (q-major, then n, then z).
pub fn scan(spec: &GridSpec) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    let pts = scan_points(spec)?;
    let records: Vec<ScanRecord> = pts
        .par_iter()
        .map(|&(q, n, z)| verdict_record(spec.kind, q, n, z, spec.tol))
        .collect::<Result<_>>()?;
    let summary = ScanSummary::from_records(&records);
    Ok((records, summary))
}

/// Single-threaded variant; produces the identical record sequence.
pub fn scan_serial(spec: &GridSpec) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    let pts = scan_points(spec)?;
    let records: Vec<ScanRecord> = pts
        .iter()
        .map(|&(q, n, z)| verdict_record(spec.kind, q, n, z, spec.tol))
        .collect::<Result<_>>()?;
    let summary = ScanSummary::from_records(&records);
    Ok((records, summary))
}

/// Classical-mode scan over an x grid (the z columns carry x; q is 1).
#[derive(Clone, Debug, PartialEq)]
pub struct AlzerSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub x_steps: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub log_x: bool,
}

impl AlzerSpec {
    pub fn default_grid() -> AlzerSpec {
        AlzerSpec { x_min: 0.1, x_max: 10.0, x_steps: 25, n_min: 1, n_max: 10, log_x: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::Argument(format!("empty x range: {}..{}", self.x_min, self.x_max)));
        }
        if self.x_min <= 0.0 {
            return Err(Error::Argument(format!("x must be positive, got {}", self.x_min)));
        }
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(Error::Argument(format!("bad n range: {}..{}", self.n_min, self.n_max)));
        }
        if self.x_steps < 1 {
            return Err(Error::Argument("x_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Verdicts for the classical exponential-remainder inequality over an
/// x-by-n grid.
pub fn scan_alzer(spec: &AlzerSpec) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    spec.validate()?;
    let xs = linspace(spec.x_min, spec.x_max, spec.x_steps, spec.log_x);
    let mut pts = Vec::new();
    for n in spec.n_min..=spec.n_max {
        for &x in &xs {
            pts.push((n, x));
        }
    }
    let records: Vec<ScanRecord> = pts
        .par_iter()
        .map(|&(n, x)| {
            let v = verify_alzer(x, n)?;
            Ok(ScanRecord {
                kind: ScanKind::Alzer,
                q: 1.0,
                n,
                z: x,
                ratio: v.ratio,
                lower_constant: v.lower_constant,
                lower_margin: v.lower_margin,
                upper_margin: v.upper_margin,
                error_budget: v.error_budget,
                outcome: v.outcome,
            })
        })
        .collect::<Result<_>>()?;
    let summary = ScanSummary::from_records(&records);
    Ok((records, summary))
}

pub const CSV_HEADER: &str =
    "kind,q,n,z,ratio,lower_constant,lower_margin,upper_margin,error_budget,outcome";

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(field: &str, name: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad {name} field {field:?}: {e}")))
}

impl ScanRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.kind,
            fmt_real(self.q),
            self.n,
            fmt_real(self.z),
            fmt_real(self.ratio),
            fmt_real(self.lower_constant),
            fmt_real(self.lower_margin),
            fmt_real(self.upper_margin),
            fmt_real(self.error_budget),
            self.outcome
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<ScanRecord> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Parse(format!(
                "expected 10 fields, got {} in {line:?}",
                fields.len()
            )));
        }
        Ok(ScanRecord {
            kind: fields[0].parse()?,
            q: parse_real(fields[1], "q")?,
            n: fields[2]
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad n field {:?}: {e}", fields[2])))?,
            z: parse_real(fields[3], "z")?,
            ratio: parse_real(fields[4], "ratio")?,
            lower_constant: parse_real(fields[5], "lower_constant")?,
            lower_margin: parse_real(fields[6], "lower_margin")?,
            upper_margin: parse_real(fields[7], "upper_margin")?,
            error_budget: parse_real(fields[8], "error_budget")?,
            outcome: fields[9].parse()?,
        })
    }
}

/// Write records to any sink, header first, in scan order.
pub fn write_csv<W: Write>(records: &[ScanRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.to_csv_row())?;
    }
    w.flush()
}

/// Write records to a file at `path`.
pub fn emit_csv(records: &[ScanRecord], path: &Path) -> std::io::Result<()> {
    let f = File::create(path)?;
    write_csv(records, BufWriter::new(f))
}

/// Parse a whole CSV document (header line plus records).
pub fn parse_csv_str(text: &str) -> Result<Vec<ScanRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("unexpected header {h:?}"))),
        None => return Err(Error::Parse("empty document".into())),
    }
    lines.map(ScanRecord::parse_csv_row).collect()
}

/// Read records back from a CSV file produced by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ScanRecord>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_csv_str(&text)
}

/// Write a sharpness-probe trace: columns z, ratio, best_constant, deviation.
pub fn emit_sharpness(
    kind: RemainderKind,
    q: f64,
    n: u32,
    z_sequence: &[f64],
    path: &Path,
) -> Result<()> {
    let pts = sharpness_probe(kind, q, n, z_sequence)?;
    let f = File::create(path)?;
    let mut w = BufWriter::new(f);
    writeln!(w, "z,ratio,best_constant,deviation")?;
    for p in &pts {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_real(p.z),
            fmt_real(p.ratio),
            fmt_real(p.best_constant),
            fmt_real(p.deviation)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Exit-code policy: 0 when everything certified, 1 when anything violated,
/// 2 when nothing violated but some points indeterminate.
pub fn exit_code(summary: &ScanSummary) -> i32 {
    if summary.violated > 0 {
        1
    } else if summary.indeterminate > 0 {
        2
    } else {
        0
    }
}
