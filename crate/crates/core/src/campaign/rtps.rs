use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub const SECONDS_PER_YEAR: f64 = 365.0 * 86_400.0;
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Exponential moving average of running time per setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtpsEstimator {
    /// Seconds per setting; meaningless until `samples > 0`.
    pub current: f64,
    pub samples: u64,
    pub alpha: f64,
}

impl RtpsEstimator {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        Self {
            current: 0.0,
            samples: 0,
            alpha,
        }
    }

    /// Estimator primed with a first observation.
    pub fn seeded(alpha: f64, seconds: f64) -> Self {
        let mut e = Self::new(alpha);
        e.update(seconds);
        e
    }

    pub fn update(&mut self, observed: f64) {
        self.current = if self.samples == 0 {
            observed
        } else {
            self.alpha * observed + (1.0 - self.alpha) * self.current
        };
        self.samples += 1;
    }

    pub fn is_primed(&self) -> bool {
        self.samples > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalTime {
    /// `pool * rtps`, rounded down to whole seconds.
    pub seconds: BigUint,
    pub hours: f64,
    pub years: f64,
}

/// Running time of an exhaustive search over `pool` settings.
pub fn estimate_total_time(pool: &BigUint, rtps: f64) -> TotalTime {
    assert!(rtps > 0.0, "rtps must be positive");
    // exact product on a millisecond grid keeps big pools precise
    let millis = (rtps * 1000.0).round() as u64;
    let exact_seconds = if (millis as f64 / 1000.0 - rtps).abs() < 1e-12 {
        pool * millis / 1000u32
    } else {
        BigUint::from((pool.to_f64().unwrap_or(f64::INFINITY) * rtps) as u128)
    };
    let seconds_f = pool.to_f64().unwrap_or(f64::INFINITY) * rtps;
    TotalTime {
        seconds: exact_seconds,
        hours: seconds_f / 3600.0,
        years: seconds_f / SECONDS_PER_YEAR,
    }
}

/// Number of settings that fit a budget, never less than one.
pub fn cap_settings(budget_seconds: f64, rtps: f64) -> u64 {
    assert!(budget_seconds > 0.0 && rtps > 0.0, "budget and rtps must be positive");
    ((budget_seconds / rtps).floor() as u64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ema_fixed_points() {
        let mut e = RtpsEstimator::new(0.1);
        for _ in 0..50 {
            e.update(2.0);
        }
        assert!((e.current - 2.0).abs() < 1e-9);
        let mut last = RtpsEstimator::new(1.0);
        for x in [3.0, 9.0, 4.5] {
            last.update(x);
        }
        assert_eq!(last.current, 4.5);
        let mut e = RtpsEstimator::seeded(0.1, 10.0);
        e.update(20.0);
        assert!((e.current - 11.0).abs() < 1e-12);
    }

    #[test]
    fn total_time_arithmetic() {
        let t = estimate_total_time(&BigUint::from(1u32), 3600.0);
        assert_eq!(t.hours, 1.0);
        assert_eq!(t.seconds, BigUint::from(3600u32));
        let t = estimate_total_time(&BigUint::from(52_042u32), 42.42);
        assert!((t.hours - 613.23).abs() / 613.23 < 0.005);
    }

    #[test]
    fn cap_is_floored_and_clamped() {
        assert_eq!(cap_settings(3600.0, 117.0), 30);
        assert_eq!(cap_settings(5.0, 117.0), 1);
    }
}
