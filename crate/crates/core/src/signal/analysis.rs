use super::PulseTrace;
use crate::error::{Error, Result, Side};

/// Trapezoidal integral of the trace over its time axis.
pub fn pulse_energy_numeric(trace: &PulseTrace) -> Result<f64> {
    if trace.len() < 2 {
        return Err(Error::ShortTrace {
            found: trace.len(),
            needed: 2,
        });
    }
    let (t, v) = (trace.times(), trace.values());
    Ok(t.windows(2)
        .zip(v.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum())
}

/// Largest sample.
pub fn pulse_peak(trace: &PulseTrace) -> Result<f64> {
    trace
        .values()
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(Error::ShortTrace { found: 0, needed: 1 })
}

/// Full width at half maximum, from linear interpolation of the two
/// half-maximum crossings nearest the global peak.
///
/// On ringing traces this is the width of the lobe holding the peak.
pub fn pulse_fwhm(trace: &PulseTrace) -> Result<f64> {
    let (t, v) = (trace.times(), trace.values());
    let (ipk, &peak) = v
        .iter()
        .enumerate()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .ok_or(Error::ShortTrace { found: 0, needed: 3 })?;
    if !(peak > 0.0) {
        return Err(Error::invalid("trace", "pulse has no positive maximum"));
    }
    let half = 0.5 * peak;
    let cross = |i: usize, j: usize| t[i] + (half - v[i]) * (t[j] - t[i]) / (v[j] - v[i]);

    let left = (1..=ipk)
        .rev()
        .find(|&i| v[i - 1] < half)
        .map(|i| cross(i - 1, i))
        .ok_or(Error::TruncatedPulse { side: Side::Leading })?;
    let right = (ipk..v.len() - 1)
        .find(|&i| v[i + 1] < half)
        .map(|i| cross(i, i + 1))
        .ok_or(Error::TruncatedPulse {
            side: Side::Trailing,
        })?;
    Ok(right - left)
}

/// First-order low-pass detector response with time constant `tau`,
/// expressed in the time unit of the traces it is applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub tau: f64,
}

impl DetectorModel {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("tau", "detector time constant must be > 0"));
        }
        Ok(DetectorModel { tau })
    }

    /// Filters the trace, integrating `dy/dt = (x − y)/τ` exactly for
    /// piecewise-linear input and `y(t0) = 0`.
    pub fn apply(&self, trace: &PulseTrace) -> PulseTrace {
        let (t, x) = (trace.times(), trace.values());
        let mut out = Vec::with_capacity(x.len());
        let mut y = 0.0;
        for i in 0..x.len() {
            if i > 0 {
                let h = t[i] - t[i - 1];
                let slope = (x[i] - x[i - 1]) / h;
                let decay = (-h / self.tau).exp();
                y = x[i] - slope * self.tau + (y - x[i - 1] + slope * self.tau) * decay;
            }
            // rounding can leave tiny negatives on the tail
            out.push(y.max(0.0));
        }
        trace.map_values(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::TimeUnit;

    fn trace(t: Vec<f64>, v: Vec<f64>) -> PulseTrace {
        PulseTrace::new(t, v, TimeUnit::Gamma12).unwrap()
    }

    fn triangle(n: usize) -> PulseTrace {
        let t: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
        let v = t.iter().map(|&t| 1.0 - (t - 1.0).abs()).collect();
        trace(t, v)
    }

    #[test]
    fn constant_trace_energy() {
        let t: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let tr = trace(t, vec![2.0; 11]);
        assert!((pulse_energy_numeric(&tr).unwrap() - 6.0).abs() < 1e-14);
        let zero = trace(vec![0.0, 1.0, 2.0], vec![0.0; 3]);
        assert_eq!(pulse_energy_numeric(&zero).unwrap(), 0.0);
        assert_eq!(pulse_peak(&zero).unwrap(), 0.0);
    }

    #[test]
    fn short_traces_are_rejected() {
        let one = trace(vec![0.0], vec![1.0]);
        assert!(matches!(
            pulse_energy_numeric(&one),
            Err(Error::ShortTrace { found: 1, .. })
        ));
        let empty = trace(vec![], vec![]);
        assert!(pulse_peak(&empty).is_err());
    }

    #[test]
    fn triangle_fwhm() {
        assert!((pulse_fwhm(&triangle(200)).unwrap() - 1.0).abs() < 1e-12);
        assert!((pulse_fwhm(&triangle(8)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_pulses_report_the_side() {
        let t: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let rising: Vec<f64> = t.clone();
        assert!(matches!(
            pulse_fwhm(&trace(t.clone(), rising)),
            Err(Error::TruncatedPulse {
                side: Side::Trailing
            })
        ));
        let falling: Vec<f64> = t.iter().map(|&t| 10.0 - t).collect();
        assert!(matches!(
            pulse_fwhm(&trace(t, falling)),
            Err(Error::TruncatedPulse {
                side: Side::Leading
            })
        ));
    }

    #[test]
    fn multimodal_uses_lobe_around_global_peak() {
        // small first lobe, large second lobe
        let t: Vec<f64> = (0..=8).map(|i| i as f64).collect();
        let v = vec![0.0, 0.3, 0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0];
        assert!((pulse_fwhm(&trace(t, v)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn detector_step_response() {
        let t: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let v = vec![1.0; t.len()];
        let det = DetectorModel::new(2.0).unwrap();
        let out = det.apply(&trace(t.clone(), v));
        for (ti, yi) in t.iter().zip(out.values()) {
            let exact = 1.0 - (-ti / 2.0).exp();
            assert!((yi - exact).abs() < 1e-12, "t = {ti}");
        }
        assert!(DetectorModel::new(0.0).is_err());
    }

    #[test]
    fn detector_preserves_area_and_broadens() {
        let t: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let v: Vec<f64> = t.iter().map(|&t| (-(t - 5.0) * (t - 5.0)).exp()).collect();
        let tr = trace(t, v);
        let out = DetectorModel::new(0.5).unwrap().apply(&tr);
        let (e0, e1) = (pulse_energy_numeric(&tr).unwrap(), pulse_energy_numeric(&out).unwrap());
        assert!((e1 / e0 - 1.0).abs() < 1e-6);
        assert!(pulse_fwhm(&out).unwrap() > pulse_fwhm(&tr).unwrap());
        assert!(pulse_peak(&out).unwrap() < pulse_peak(&tr).unwrap());
    }
}
