use super::lockin::check_pair;
use super::series::{integrate_linear, position, TimeSeries};
use crate::error::{Error, Result};

/// Energy dissipated per cycle, `∮ T dθ / n_cycles`, by trapezoidal contour
/// integration over the whole cycles in the record.
pub fn hysteresis_loop_area(theta: &TimeSeries, torque: &TimeSeries, drive_freq: f64) -> Result<f64> {
    let cycles = check_pair(theta, torque, drive_freq)?;
    let fs = theta.sample_rate();
    let th = theta.samples();
    let tq = torque.samples();
    let end = position(fs, cycles as f64 / drive_freq);

    let last = end.floor() as usize;
    let mut work = 0.0;
    for i in 0..last {
        work += 0.5 * (tq[i] + tq[i + 1]) * (th[i + 1] - th[i]);
    }
    let frac = end - last as f64;
    if frac > 0.0 {
        // close the contour on the interpolated end point
        let th_end = th[last] + frac * (th[last + 1] - th[last]);
        let tq_end = tq[last] + frac * (tq[last + 1] - tq[last]);
        work += 0.5 * (tq[last] + tq_end) * (th_end - th[last]);
    }
    Ok(work / cycles as f64)
}

/// Time-average of the signal over each whole drive cycle in the record.
pub fn cycle_average(signal: &TimeSeries, drive_freq: f64) -> Result<Vec<f64>> {
    if !(drive_freq > 0.0 && drive_freq.is_finite()) {
        return Err(Error::Domain(format!(
            "drive frequency must be > 0, got {drive_freq}"
        )));
    }
    let cycles = signal.whole_cycles(drive_freq);
    if cycles < 1 {
        return Err(Error::InsufficientRecord {
            needed: 1,
            available: signal.span() * drive_freq,
        });
    }
    let fs = signal.sample_rate();
    let x = signal.samples();
    Ok((0..cycles)
        .map(|k| {
            let a = position(fs, k as f64 / drive_freq);
            let b = position(fs, (k + 1) as f64 / drive_freq);
            integrate_linear(x, a, b) / (b - a)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn record(fs: f64, n: usize, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries::new(fs, (0..n).map(|i| f(i as f64 / fs)).collect(), 0.0).unwrap()
    }

    #[test]
    fn spring_encloses_no_area() {
        let (fs, f, th0, k) = (200.0, 3.0, 0.157, 2.0);
        let w = 2.0 * PI * f;
        let th = record(fs, 668, |t| th0 * (w * t).sin());
        let tq = record(fs, 668, |t| k * th0 * (w * t).sin());
        let area = hysteresis_loop_area(&th, &tq, f).unwrap();
        assert!(area.abs() < 1e-9 * k * th0 * th0, "{area}");
    }

    #[test]
    fn constant_signal_cycle_means() {
        let s = record(200.0, 1001, |_| 0.7);
        let means = cycle_average(&s, 3.0).unwrap();
        assert_eq!(means.len(), 15);
        assert!(means.iter().all(|m| (m - 0.7).abs() < 1e-12));
    }

    #[test]
    fn sine_cycle_means_vanish() {
        let (fs, f, a) = (200.0, 2.0, 1.3);
        let s = record(fs, 1001, |t| a * (2.0 * PI * f * t).sin());
        let means = cycle_average(&s, f).unwrap();
        assert_eq!(means.len(), 10);
        assert!(means.iter().all(|m| m.abs() < 1e-12 * a));
    }

    #[test]
    fn sine_with_offset() {
        let (fs, f) = (200.0, 2.5);
        let s = record(fs, 1001, |t| 0.3 + (2.0 * PI * f * t).sin());
        let means = cycle_average(&s, f).unwrap();
        assert!(means.iter().all(|m| (m - 0.3).abs() < 1e-12));
    }

    #[test]
    fn short_record_rejected() {
        let s = record(200.0, 50, |t| t);
        assert!(matches!(
            cycle_average(&s, 1.0),
            Err(Error::InsufficientRecord { needed: 1, .. })
        ));
    }
}
