// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant control amplitudes on `intervals` equal slices of
/// `[0, total_time]`. Amplitudes are stored interval-major: the value of
/// control `c` on interval `j` is `amplitudes[j * n_controls + c]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    total_time: f64,
    intervals: usize,
    n_controls: usize,
    amplitudes: Vec<f64>,
    amplitude_cap: f64,
}

impl Schedule {
    pub fn new(total_time: f64, amplitudes: Vec<Vec<f64>>, amplitude_cap: f64) -> Result<Self> {
        let intervals = amplitudes.len();
        let n_controls = amplitudes.first().map_or(0, Vec::len);
        if amplitudes.iter().any(|row| row.len() != n_controls) {
            return Err(Error::InvalidSchedule("every interval needs the same number of amplitudes".into()));
        }
        let flat = amplitudes.into_iter().flatten().collect();
        Self::from_flat(total_time, intervals, n_controls, flat, amplitude_cap)
    }

    pub fn from_flat(
        total_time: f64,
        intervals: usize,
        n_controls: usize,
        amplitudes: Vec<f64>,
        amplitude_cap: f64,
    ) -> Result<Self> {
        let s = Self { total_time, intervals, n_controls, amplitudes, amplitude_cap };
        s.validate()?;
        Ok(s)
    }

    /// All amplitudes zero.
    pub fn zero(total_time: f64, intervals: usize, n_controls: usize, amplitude_cap: f64) -> Result<Self> {
        Self::from_flat(total_time, intervals, n_controls, vec![0.0; intervals * n_controls], amplitude_cap)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.total_time.is_finite() || self.total_time < 0.0 {
            return Err(Error::InvalidSchedule(format!("total time {} must be finite and non-negative", self.total_time)));
        }
        if self.intervals == 0 {
            return Err(Error::InvalidSchedule("at least one interval is required".into()));
        }
        if !(self.amplitude_cap.is_finite() && self.amplitude_cap > 0.0) {
            return Err(Error::InvalidSchedule(format!("amplitude cap {} must be positive", self.amplitude_cap)));
        }
        if self.amplitudes.len() != self.intervals * self.n_controls {
            return Err(Error::InvalidSchedule(format!(
                "expected {} amplitudes, got {}",
                self.intervals * self.n_controls,
                self.amplitudes.len()
            )));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !a.is_finite() || a.abs() > self.amplitude_cap) {
            return Err(Error::InvalidSchedule(format!("amplitude {a} exceeds cap {}", self.amplitude_cap)));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn amplitude_cap(&self) -> f64 {
        self.amplitude_cap
    }

    /// Interval length `T / n`.
    pub fn dt(&self) -> f64 {
        self.total_time / self.intervals as f64
    }

    pub fn amplitude(&self, interval: usize, control: usize) -> f64 {
        self.amplitudes[interval * self.n_controls + control]
    }

    pub fn interval_amplitudes(&self, interval: usize) -> &[f64] {
        let start = interval * self.n_controls;
        &self.amplitudes[start..start + self.n_controls]
    }

    pub fn flat(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.intervals).map(|j| self.interval_amplitudes(j).to_vec()).collect()
    }

    /// Same amplitudes, different total time.
    pub fn with_total_time(&self, total_time: f64) -> Result<Self> {
        let mut s = self.clone();
        s.total_time = total_time;
        s.validate()?;
        Ok(s)
    }

    /// Splits after interval `k` into schedules on `[0, kΔt]` and `[kΔt, T]`.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.intervals {
            return Err(Error::InvalidSchedule(format!("split index {k} must lie strictly inside 1..{}", self.intervals)));
        }
        let dt = self.dt();
        let cut = k * self.n_controls;
        let head = Self::from_flat(dt * k as f64, k, self.n_controls, self.amplitudes[..cut].to_vec(), self.amplitude_cap)?;
        let tail = Self::from_flat(
            dt * (self.intervals - k) as f64,
            self.intervals - k,
            self.n_controls,
            self.amplitudes[cut..].to_vec(),
            self.amplitude_cap,
        )?;
        Ok((head, tail))
    }

    /// Largest `|amplitude|` over all intervals and controls.
    pub fn peak_amplitude(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_schedules() {
        assert!(Schedule::new(1.0, vec![], 1.0).is_err());
        assert!(Schedule::new(-1.0, vec![vec![0.0]], 1.0).is_err());
        assert!(Schedule::new(1.0, vec![vec![2.0]], 1.0).is_err());
        assert!(Schedule::new(1.0, vec![vec![0.0], vec![0.0, 1.0]], 1.0).is_err());
        assert!(Schedule::new(1.0, vec![vec![f64::NAN]], 1.0).is_err());
        assert!(Schedule::new(1.0, vec![vec![0.5]], 0.0).is_err());
    }

    #[test]
    fn indexing_and_split() {
        let s = Schedule::new(2.0, vec![vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6], vec![0.7, 0.8]], 1.0).unwrap();
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.amplitude(2, 1), 0.6);
        let (a, b) = s.split_at(1).unwrap();
        assert_eq!(a.total_time(), 0.5);
        assert_eq!(b.total_time(), 1.5);
        assert_eq!(b.interval_amplitudes(0), &[0.3, 0.4]);
        assert!(s.split_at(4).is_err());
    }
}
