use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled scalar signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    sample_rate: f64,
    samples: Vec<f64>,
    start_time: f64,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, samples: Vec<f64>, start_time: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::Domain(format!(
                "sample rate must be > 0, got {sample_rate}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::Arity(format!(
                "a time series needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::Domain("start time must be finite".into()));
        }
        Ok(Self {
            sample_rate,
            samples,
            start_time,
        })
    }

    /// Builds a series from `(time, value)` pairs, checking that spacing is uniform
    /// to within a thousandth of the mean step.
    pub fn from_timestamped(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Arity(format!(
                "a time series needs at least 2 samples, got {}",
                points.len()
            )));
        }
        let n = points.len();
        let span = points[n - 1].0 - points[0].0;
        let dt = span / (n - 1) as f64;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain("timestamps must be strictly increasing".into()));
        }
        for (i, (t, _)) in points.iter().enumerate() {
            let expected = points[0].0 + i as f64 * dt;
            if (t - expected).abs() > 1e-3 * dt {
                return Err(Error::Domain(format!(
                    "non-uniform sampling at row {i}: t = {t}, expected {expected}"
                )));
            }
        }
        Self::new(1.0 / dt, points.iter().map(|p| p.1).collect(), points[0].0)
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start_time + i as f64 / self.sample_rate
    }

    /// Time between the first and last sample.
    pub fn span(&self) -> f64 {
        (self.samples.len() - 1) as f64 / self.sample_rate
    }

    /// Number of complete periods of `freq` covered by the record.
    pub fn whole_cycles(&self, freq: f64) -> usize {
        let c = self.span() * freq;
        let r = c.round();
        if (c - r).abs() < 1e-9 * c.max(1.0) {
            r as usize
        } else {
            c.floor() as usize
        }
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Fractional sample position of time offset `t` (seconds from the start).
pub(crate) fn position(fs: f64, t: f64) -> f64 {
    let p = t * fs;
    let r = p.round();
    if (p - r).abs() < 1e-9 * p.abs().max(1.0) {
        r
    } else {
        p
    }
}

/// Linearly interpolated value at fractional index `p`.
pub(crate) fn interp(x: &[f64], p: f64) -> f64 {
    let i = p.floor() as usize;
    if i + 1 >= x.len() {
        return x[x.len() - 1];
    }
    let frac = p - i as f64;
    if frac == 0.0 {
        x[i]
    } else {
        x[i] + frac * (x[i + 1] - x[i])
    }
}

/// Integral (in index units) of the piecewise-linear interpolant of `x` over `[a, b]`.
pub(crate) fn integrate_linear(x: &[f64], a: f64, b: f64) -> f64 {
    debug_assert!(b >= a);
    let first = a.ceil() as usize;
    let last = b.floor() as usize;
    if first > last {
        return 0.5 * (interp(x, a) + interp(x, b)) * (b - a);
    }
    let mut acc = 0.5 * (interp(x, a) + x[first]) * (first as f64 - a);
    for i in first..last {
        acc += 0.5 * (x[i] + x[i + 1]);
    }
    acc + 0.5 * (x[last] + interp(x, b)) * (b - last as f64)
}
