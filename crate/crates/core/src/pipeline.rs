//! Day-indexed event data: ingestion, per-day estimation, averaging over
//! days, Poisson normalization and heatmap artifacts.
//!
//! Frequencies enter and leave this module in Hz; the estimators work in
//! rad/s (`ω = 2π f`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    estimate_mean_density_grid, estimate_tf_grid, EstimatorConfig, Feasibility, GridKind, TFGrid,
};
use crate::events::EventSeries;
use crate::kernels::{FreqKernel, TimeKernel};
use crate::model::LsHawkesModel;
use crate::simulate::{derive_seed, simulate_ls_hawkes, SimulationConfig};

/// Trading session of 8.5 hours, in seconds.
pub const DEFAULT_SESSION: f64 = 30600.0;

/// Duplicate timestamps are separated by gaps drawn uniformly from
/// `[JITTER_MIN, JITTER_MAX)` seconds.
pub const JITTER_MIN: f64 = 1e-6;
pub const JITTER_MAX: f64 = 1e-4;
const JITTER_STREAM: u64 = 0x6a69_7474_6572; // "jitter"

pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Treatment of timestamps outside `[0, session]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ClockPolicy {
    /// Reject the file, naming the offending line.
    #[default]
    Strict,
    /// Drop the row and count it.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    pub session: f64,
    pub clock: ClockPolicy,
    /// Separate repeated timestamps instead of rejecting them.
    pub jitter_duplicates: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            session: DEFAULT_SESSION,
            clock: ClockPolicy::Strict,
            jitter_duplicates: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaySeries {
    pub day_id: i64,
    pub events: EventSeries,
    /// Events moved to break a tie with an earlier timestamp.
    pub jittered: usize,
    /// Rows dropped under [`ClockPolicy::Clip`].
    pub clipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    pub days: Vec<DaySeries>,
    pub session: f64,
}

impl EventTable {
    pub fn day(&self, day_id: i64) -> Option<&DaySeries> {
        self.days.iter().find(|d| d.day_id == day_id)
    }

    pub fn counts(&self) -> Vec<(i64, usize)> {
        self.days
            .iter()
            .map(|d| (d.day_id, d.events.len()))
            .collect()
    }

    /// Writes `day_id,time_s` rows with `decimals` digits after the point.
    pub fn write_csv(&self, out: impl Write, decimals: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["day_id", "time_s"])?;
        for d in &self.days {
            for t in d.events.times() {
                w.write_record([d.day_id.to_string(), format!("{t:.decimals$}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>, decimals: usize) -> Result<()> {
        self.write_csv(
            std::io::BufWriter::new(std::fs::File::create(path)?),
            decimals,
        )
    }
}

/// Sorts and de-duplicates one day's raw times. Each timestamp not strictly
/// after its predecessor is moved to `previous + g`, with `g` drawn from a
/// ChaCha8 stream seeded by `derive_seed(JITTER_STREAM, &[day_id])`, so the
/// result is reproducible and every gap introduced is below 0.1 ms.
fn simplify(
    day_id: i64,
    mut times: Vec<f64>,
    session: f64,
    jitter: bool,
) -> Result<(Vec<f64>, usize)> {
    times.sort_by(f64::total_cmp);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(JITTER_STREAM, &[day_id as u64]));
    let mut moved = 0;
    for i in 1..times.len() {
        if times[i] > times[i - 1] {
            continue;
        }
        if !jitter {
            return Err(Error::InvalidEvents(format!(
                "day {day_id}: duplicate timestamp {} (jitter disabled)",
                times[i]
            )));
        }
        let gap = JITTER_MIN + (JITTER_MAX - JITTER_MIN) * rng.random::<f64>();
        times[i] = times[i - 1] + gap;
        moved += 1;
    }
    if let Some(&last) = times.last() {
        if last > session {
            return Err(Error::InvalidEvents(format!(
                "day {day_id}: separating duplicates pushed an event past the session end"
            )));
        }
    }
    Ok((times, moved))
}

/// Reads `day_id,time_s` rows (header required) into per-day series on
/// `[0, session]`.
pub fn ingest_reader(input: impl Read, opts: &IngestOptions) -> Result<EventTable> {
    if !(opts.session >= 1.0 && opts.session.is_finite()) {
        return Err(Error::Domain(format!(
            "session length must be >= 1, got {}",
            opts.session
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "day_id" || &headers[1] != "time_s" {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header `day_id,time_s`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut raw: BTreeMap<i64, (Vec<f64>, usize)> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let err = |msg: String| Error::Parse { line, msg };
        if record.len() != 2 {
            return Err(err(format!("expected 2 columns, got {}", record.len())));
        }
        let day: i64 = record[0]
            .parse()
            .map_err(|e| err(format!("bad day_id `{}`: {e}", &record[0])))?;
        let t: f64 = record[1]
            .parse()
            .map_err(|e| err(format!("bad time `{}`: {e}", &record[1])))?;
        if !t.is_finite() {
            return Err(err(format!("time `{}` is not finite", &record[1])));
        }
        let entry = raw.entry(day).or_default();
        if !(0.0..=opts.session).contains(&t) {
            match opts.clock {
                ClockPolicy::Strict => {
                    return Err(err(format!(
                        "time {t} lies outside the session [0, {}]",
                        opts.session
                    )))
                }
                ClockPolicy::Clip => {
                    entry.1 += 1;
                    continue;
                }
            }
        }
        entry.0.push(t);
    }
    let mut days = Vec::with_capacity(raw.len());
    for (day_id, (times, clipped)) in raw {
        let (times, jittered) = simplify(day_id, times, opts.session, opts.jitter_duplicates)?;
        if times.is_empty() {
            log::warn!("day {day_id} has no events in the session");
        }
        if jittered > 0 {
            log::info!("day {day_id}: separated {jittered} duplicate timestamps");
        }
        days.push(DaySeries {
            day_id,
            events: EventSeries::new(times, opts.session)?,
            jittered,
            clipped,
        });
    }
    Ok(EventTable {
        days,
        session: opts.session,
    })
}

pub fn ingest_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<EventTable> {
    ingest_reader(std::fs::File::open(path)?, opts)
}

/// Estimation outcome for one day. A failed day keeps its error message and
/// is excluded from averages.
#[derive(Debug, Clone, PartialEq)]
pub struct DayAnalysis {
    pub day_id: i64,
    pub n_events: usize,
    pub mean_density: Option<TFGrid>,
    pub bartlett: Option<TFGrid>,
    pub error: Option<String>,
}

/// Mean-density curve and spectral grid for every day, in parallel.
/// `freqs` are in rad/s.
pub fn analyze_days(
    table: &EventTable,
    times: &[f64],
    freqs: &[f64],
    cfg: &EstimatorConfig,
    k: &TimeKernel,
    q: &FreqKernel,
) -> Vec<DayAnalysis> {
    table
        .days
        .par_iter()
        .map(|day| {
            let run = || -> Result<(TFGrid, TFGrid)> {
                let m = estimate_mean_density_grid(&day.events, times, cfg.b1, k, cfg.feasibility)?;
                let g = estimate_tf_grid(&day.events, times, freqs, cfg, k, q)?;
                Ok((m, g))
            };
            match run() {
                Ok((m, g)) => DayAnalysis {
                    day_id: day.day_id,
                    n_events: day.events.len(),
                    mean_density: Some(m),
                    bartlett: Some(g),
                    error: None,
                },
                Err(e) => {
                    log::warn!("day {} failed: {e}", day.day_id);
                    DayAnalysis {
                        day_id: day.day_id,
                        n_events: day.events.len(),
                        mean_density: None,
                        bartlett: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect()
}

/// Pointwise mean over the grids with a value at each point, together with
/// the number of contributing grids. Points with no contribution stay
/// missing.
pub fn average_days(grids: &[&TFGrid]) -> Result<(TFGrid, Vec<Vec<usize>>)> {
    let first = grids
        .first()
        .ok_or_else(|| Error::InsufficientData("no grids to average".into()))?;
    if grids
        .iter()
        .any(|g| g.times != first.times || g.freqs != first.freqs || g.kind != first.kind)
    {
        return Err(Error::Domain(
            "grids to average must share axes and kind".into(),
        ));
    }
    let (nt, nf) = (first.times.len(), first.freqs.len());
    let mut counts = vec![vec![0usize; nf]; nt];
    let mut values = vec![vec![None; nf]; nt];
    for i in 0..nt {
        for j in 0..nf {
            let mut sum = 0.0;
            for g in grids {
                if let Some(v) = g.values[i][j] {
                    sum += v;
                    counts[i][j] += 1;
                }
            }
            if counts[i][j] > 0 {
                values[i][j] = Some(sum / counts[i][j] as f64);
            }
        }
    }
    Ok((
        TFGrid::new(first.times.clone(), first.freqs.clone(), values, first.kind)?,
        counts,
    ))
}

/// Mean densities at or below this are refused as normalizers.
pub const MIN_NORMALIZER: f64 = 1e-12;

/// `2π γ(u, ω) / m(u)`; a Poisson process maps to 1 everywhere. `m_avg` is a
/// single-column mean-density grid on the same times.
pub fn poisson_normalize(gamma_avg: &TFGrid, m_avg: &TFGrid) -> Result<TFGrid> {
    if m_avg.times != gamma_avg.times || m_avg.freqs.len() != 1 {
        return Err(Error::Domain(
            "normalizer must be a one-column curve on the spectrum's time axis".into(),
        ));
    }
    let mut values = gamma_avg.values.clone();
    for (i, row) in values.iter_mut().enumerate() {
        let m = m_avg.values[i][0];
        for cell in row.iter_mut() {
            *cell = match (*cell, m) {
                (Some(g), Some(m)) => {
                    if !(m > MIN_NORMALIZER) {
                        return Err(Error::Domain(format!(
                            "mean density {m} at u = {} is too small to normalize by",
                            gamma_avg.times[i]
                        )));
                    }
                    Some(2.0 * PI * g / m)
                }
                _ => None,
            };
        }
    }
    TFGrid::new(
        gamma_avg.times.clone(),
        gamma_avg.freqs.clone(),
        values,
        GridKind::PoissonNormalized,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayCount {
    pub day_id: i64,
    pub events: usize,
    pub jittered: usize,
    pub clipped: usize,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapMetadata {
    pub kind: GridKind,
    pub time_kernel: String,
    pub freq_kernel: String,
    pub b1: f64,
    pub b2_hz: f64,
    pub b2_rad_per_s: f64,
    pub session_s: f64,
    pub n_days: usize,
    pub days: Vec<DayCount>,
}

/// Grid values with the time axis in absolute time and the frequency axis in
/// Hz. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapArtifact {
    pub times: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<HeatmapMetadata>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl HeatmapArtifact {
    /// `freqs_hz` is the frequency axis as the user gave it; the grid's own
    /// axis (rad/s) is not converted back, which keeps the Hz values exact.
    pub fn from_grid(
        grid: &TFGrid,
        freqs_hz: &[f64],
        metadata: Option<HeatmapMetadata>,
    ) -> Result<Self> {
        if freqs_hz.len() != grid.freqs.len() {
            return Err(Error::Domain("frequency axis length mismatch".into()));
        }
        Ok(Self {
            times: grid.times.clone(),
            freqs_hz: freqs_hz.to_vec(),
            values: grid.values.clone(),
            metadata,
        })
    }

    /// CSV: header row `u\f_hz, f₁, f₂, …`; each following row starts with
    /// the absolute time; missing cells are empty.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["u\\f_hz".to_string()];
        header.extend(self.freqs_hz.iter().map(f64::to_string));
        w.write_record(&header)?;
        for (u, row) in self.times.iter().zip(&self.values) {
            let mut rec = vec![u.to_string()];
            rec.extend(
                row.iter()
                    .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(input);
        let mut rows = r.records();
        let parse = |s: &str, line: usize| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad number `{s}`: {e}"),
            })
        };
        let header = rows.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty heatmap file".into(),
        })??;
        let freqs_hz = header
            .iter()
            .skip(1)
            .map(|s| parse(s, 1))
            .collect::<Result<Vec<_>>>()?;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in rows {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if rec.len() != freqs_hz.len() + 1 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} cells, got {}", freqs_hz.len() + 1, rec.len()),
                });
            }
            times.push(parse(&rec[0], line)?);
            values.push(
                rec.iter()
                    .skip(1)
                    .map(|s| {
                        if s.trim().is_empty() {
                            Ok(None)
                        } else {
                            parse(s, line).map(Some)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Self {
            times,
            freqs_hz,
            values,
            metadata: None,
        })
    }

    pub fn export(&self, path: impl AsRef<Path>, format: ExportFormat) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        match format {
            ExportFormat::Csv => self.write_csv(&mut f)?,
            ExportFormat::Json => {
                serde_json::to_writer_pretty(&mut f, self)?;
                writeln!(f)?;
            }
        }
        f.flush()?;
        Ok(())
    }

    pub fn import(path: impl AsRef<Path>, format: ExportFormat) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        match format {
            ExportFormat::Csv => Self::read_csv(f),
            ExportFormat::Json => Ok(serde_json::from_reader(f)?),
        }
    }
}

/// Inputs of the day-averaged analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub times: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    pub b1: f64,
    pub b2_hz: f64,
    pub feasibility: Feasibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub mean_density: HeatmapArtifact,
    pub bartlett: HeatmapArtifact,
    pub poisson_normalized: HeatmapArtifact,
    pub days: Vec<DayAnalysis>,
}

/// Per-day estimation, averaging over the days that succeeded, and Poisson
/// normalization.
pub fn analyze(
    table: &EventTable,
    cfg: &AnalysisConfig,
    k: &TimeKernel,
    q: &FreqKernel,
) -> Result<AnalysisOutput> {
    let b2 = hz_to_rad(cfg.b2_hz);
    let freqs: Vec<f64> = cfg.freqs_hz.iter().map(|&f| hz_to_rad(f)).collect();
    let est = EstimatorConfig {
        feasibility: cfg.feasibility,
        ..EstimatorConfig::new(cfg.b1, b2)
    };
    let days = analyze_days(table, &cfg.times, &freqs, &est, k, q);
    let ok: Vec<&DayAnalysis> = days.iter().filter(|d| d.error.is_none()).collect();
    if ok.is_empty() {
        let reason = days
            .iter()
            .find_map(|d| d.error.clone())
            .unwrap_or_else(|| "the table has no days".into());
        return Err(Error::InsufficientData(format!(
            "no day could be analysed: {reason}"
        )));
    }
    let means: Vec<&TFGrid> = ok.iter().filter_map(|d| d.mean_density.as_ref()).collect();
    let grids: Vec<&TFGrid> = ok.iter().filter_map(|d| d.bartlett.as_ref()).collect();
    let (m_avg, _) = average_days(&means)?;
    let (g_avg, _) = average_days(&grids)?;
    let normalized = poisson_normalize(&g_avg, &m_avg)?;

    let day_counts: Vec<DayCount> = table
        .days
        .iter()
        .zip(&days)
        .map(|(d, a)| DayCount {
            day_id: d.day_id,
            events: d.events.len(),
            jittered: d.jittered,
            clipped: d.clipped,
            failed: a.error.is_some(),
        })
        .collect();
    let meta = |kind| HeatmapMetadata {
        kind,
        time_kernel: k.name().to_string(),
        freq_kernel: q.name().to_string(),
        b1: cfg.b1,
        b2_hz: cfg.b2_hz,
        b2_rad_per_s: b2,
        session_s: table.session,
        n_days: ok.len(),
        days: day_counts.clone(),
    };
    Ok(AnalysisOutput {
        mean_density: HeatmapArtifact::from_grid(
            &m_avg,
            &[0.0],
            Some(meta(GridKind::MeanDensity)),
        )?,
        bartlett: HeatmapArtifact::from_grid(
            &g_avg,
            &cfg.freqs_hz,
            Some(meta(GridKind::Bartlett)),
        )?,
        poisson_normalized: HeatmapArtifact::from_grid(
            &normalized,
            &cfg.freqs_hz,
            Some(meta(GridKind::PoissonNormalized)),
        )?,
        days,
    })
}

/// `n_days` independent sessions of `model`, day `i` (numbered from 1)
/// simulated with seed `derive_seed(master_seed, &[i])`.
pub fn synthetic_sessions(
    model: &LsHawkesModel,
    session: f64,
    n_days: usize,
    master_seed: u64,
) -> Result<EventTable> {
    let days = (1..=n_days as i64)
        .into_par_iter()
        .map(|day_id| {
            let cfg = SimulationConfig::with_seed(derive_seed(master_seed, &[day_id as u64]));
            Ok(DaySeries {
                day_id,
                events: simulate_ls_hawkes(model, session, &cfg)?,
                jittered: 0,
                clipped: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EventTable { days, session })
}

/// Parses an axis spec `start:stop:count` (inclusive, evenly spaced) or a
/// comma-separated list.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Domain(format!("axis `{spec}`: {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| bad(format!("count: {e}")))?;
            match n {
                0 => Err(bad("count must be positive".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..n)
                    .map(|i| {
                        if i + 1 == n {
                            b
                        } else {
                            a + (b - a) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()),
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad("expected start:stop:count or a comma list".into())),
    }
}
