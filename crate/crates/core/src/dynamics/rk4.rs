use std::ops::{Add, Mul};

/// One classical fourth-order Runge–Kutta step of an autonomous system.
pub(crate) fn rk4_step<S, F>(f: &F, y: S, h: f64) -> S
where
    S: Copy + Add<Output = S> + Mul<f64, Output = S>,
    F: Fn(&S) -> S,
{
    let k1 = f(&y);
    let k2 = f(&(y + k1 * (0.5 * h)));
    let k3 = f(&(y + k2 * (0.5 * h)));
    let k4 = f(&(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Number of equal steps covering `span` with a step no larger than `dt`.
pub(crate) fn step_count(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let f = |y: &f64| -*y;
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = 1.0;
            for _ in 0..n {
                y = rk4_step(&f, y, h);
            }
            (y - (-1.0f64).exp()).abs()
        };
        let ratio = err(10) / err(20);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn step_count_covers_span() {
        assert_eq!(step_count(1.0, 0.1), 10);
        assert_eq!(step_count(1.0, 0.3), 4);
        assert_eq!(step_count(0.05, 0.1), 1);
    }
}
