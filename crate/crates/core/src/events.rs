//! Realizations of a point process on `[0, T]`.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Strictly increasing event times inside the observation window `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries {
    times: Vec<f64>,
    horizon: f64,
    seed: Option<u64>,
}

impl EventSeries {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 1.0) {
            return Err(Error::InvalidEvents(format!(
                "horizon must be >= 1, got {horizon}"
            )));
        }
        if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && **t <= horizon)) {
            return Err(Error::InvalidEvents(format!(
                "event time {t} lies outside [0, {horizon}]"
            )));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidEvents(format!(
                "times must be strictly increasing: {} then {}",
                times[i],
                times[i + 1]
            )));
        }
        Ok(Self {
            times,
            horizon,
            seed: None,
        })
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), horizon)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Events with `a ≤ t ≤ b`, located by binary search.
    pub fn window(&self, a: f64, b: f64) -> &[f64] {
        let lo = self.times.partition_point(|&t| t < a);
        let hi = self.times.partition_point(|&t| t <= b);
        &self.times[lo..hi.max(lo)]
    }

    /// Number of events in `[a, b]`.
    pub fn count(&self, a: f64, b: f64) -> usize {
        self.window(a, b).len()
    }

    /// Same events seen on a longer (or equal) horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let mut s = Self::new(self.times.clone(), horizon)?;
        s.seed = self.seed;
        Ok(s)
    }

    /// Writes `# horizon=…` and optional `# seed=…` header lines followed by
    /// one time per line in shortest round-trip decimal form.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# horizon={}", self.horizon)?;
        if let Some(seed) = self.seed {
            writeln!(out, "# seed={seed}")?;
        }
        for t in &self.times {
            writeln!(out, "{t}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Reads the format written by [`EventSeries::write_to`]. An explicit
    /// `horizon` overrides the header; one of the two must be present.
    pub fn read_from(input: impl BufRead, horizon: Option<f64>) -> Result<Self> {
        let mut header_horizon = None;
        let mut seed = None;
        let mut times = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.trim().split_once('=') {
                    match key.trim() {
                        "horizon" => {
                            header_horizon = Some(
                                value
                                    .trim()
                                    .parse::<f64>()
                                    .map_err(|e| parse_err(e.to_string()))?,
                            )
                        }
                        "seed" => {
                            seed = Some(
                                value
                                    .trim()
                                    .parse::<u64>()
                                    .map_err(|e| parse_err(e.to_string()))?,
                            )
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let t = line
                .parse::<f64>()
                .map_err(|e| parse_err(format!("bad event time `{line}`: {e}")))?;
            times.push(t);
        }
        let horizon = horizon.or(header_horizon).ok_or_else(|| {
            Error::InvalidEvents("no horizon given and no `# horizon=` header".into())
        })?;
        let mut s = Self::new(times, horizon)?;
        s.seed = seed;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>, horizon: Option<f64>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f), horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_are_enforced() {
        assert!(EventSeries::new(vec![1.0, 2.0], 10.0).is_ok());
        assert!(EventSeries::new(vec![2.0, 1.0], 10.0).is_err());
        assert!(EventSeries::new(vec![1.0, 1.0], 10.0).is_err());
        assert!(EventSeries::new(vec![11.0], 10.0).is_err());
        assert!(EventSeries::new(vec![-0.1], 10.0).is_err());
        assert!(EventSeries::new(vec![], 0.5).is_err());
        assert!(EventSeries::new(vec![f64::NAN], 10.0).is_err());
    }

    #[test]
    fn window_is_inclusive() {
        let s = EventSeries::new(vec![1.0, 2.0, 3.0, 4.0], 10.0).unwrap();
        assert_eq!(s.window(2.0, 3.0), &[2.0, 3.0]);
        assert_eq!(s.window(2.5, 2.6), &[] as &[f64]);
        assert_eq!(s.count(0.0, 10.0), 4);
        assert_eq!(s.window(5.0, 1.0).len(), 0);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = EventSeries::new(vec![0.1, 1.0 / 3.0, 7.123456789012345], 10.0)
            .unwrap()
            .with_seed(42);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# horizon=10\n# seed=42\n"));
        let back = EventSeries::read_from(&buf[..], None).unwrap();
        assert_eq!(back, s);
        let longer = EventSeries::read_from(&buf[..], Some(20.0)).unwrap();
        assert_eq!(longer.horizon(), 20.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = EventSeries::read_from("# horizon=5\n1.0\nabc\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(EventSeries::read_from("1.0\n".as_bytes(), None).is_err());
    }
}
