//! Seeded synthetic minute-resolution traffic flow.
//!
//! Flow is `max(0, (base + peaks + noise) * dip)` where the peaks are
//! day-periodic Gaussian bumps, the noise is a stationary AR(1) process with
//! marginal standard deviation `noise_std`, and `dip` is `1 - depth` inside a
//! congestion event and 1 elsewhere.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha) with
//! standard normal draws from `rand_distr::StandardNormal`, one draw per
//! minute. Both are portable, so a scenario reproduces bit-for-bit everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const MINUTES_PER_DAY: usize = 1440;

/// 2014-06-01T00:00 in epoch minutes.
pub const REFERENCE_START_MINUTE: i64 = 23_359_680;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Peak {
    /// Minute of day of the bump's center.
    pub center: f64,
    /// Standard deviation of the bump, minutes.
    pub width: f64,
    /// veh/min.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongestionEvent {
    /// Sample index where the dip begins.
    pub start: usize,
    /// Minutes.
    pub duration: usize,
    /// Fraction of flow removed, in (0, 1].
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficScenario {
    pub days: usize,
    pub seed: u64,
    pub base_flow: f64,
    #[serde(default)]
    pub peaks: Vec<Peak>,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub noise_ar1: f64,
    #[serde(default)]
    pub congestion_events: Vec<CongestionEvent>,
}

impl TrafficScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Param(msg));
        if self.days == 0 {
            return bad("days must be positive".into());
        }
        if !(self.base_flow.is_finite() && self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return bad("base_flow and noise_std must be finite, noise_std non-negative".into());
        }
        if !(0.0..1.0).contains(&self.noise_ar1) {
            return bad(format!("noise_ar1 must lie in [0, 1), got {}", self.noise_ar1));
        }
        for p in &self.peaks {
            if !(p.width > 0.0 && p.width.is_finite() && p.center.is_finite() && p.amplitude.is_finite()) {
                return bad(format!("invalid peak {p:?}"));
            }
        }
        for e in &self.congestion_events {
            if e.duration == 0 || !(e.depth > 0.0 && e.depth <= 1.0) {
                return bad(format!("invalid congestion event {e:?}"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Input(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialization");
        s.push('\n');
        s
    }

    /// Deterministic day-periodic part at minute of day `m`.
    fn profile(&self, m: usize) -> f64 {
        let day = MINUTES_PER_DAY as f64;
        let m = m as f64;
        self.base_flow
            + self
                .peaks
                .iter()
                .map(|p| {
                    let d = (m - p.center).rem_euclid(day);
                    let d = d.min(day - d);
                    p.amplitude * (-d * d / (2.0 * p.width * p.width)).exp()
                })
                .sum::<f64>()
    }
}

/// The pinned month standing in for a real detector feed.
pub fn reference_scenario() -> TrafficScenario {
    TrafficScenario {
        days: 30,
        seed: 20_140_601,
        base_flow: 8.0,
        peaks: vec![
            Peak { center: 480.0, width: 60.0, amplitude: 25.0 },
            Peak { center: 1050.0, width: 75.0, amplitude: 30.0 },
        ],
        noise_std: 3.0,
        noise_ar1: 0.6,
        congestion_events: vec![
            CongestionEvent { start: 8 * MINUTES_PER_DAY + 450, duration: 90, depth: 0.5 },
            CongestionEvent { start: 19 * MINUTES_PER_DAY + 1020, duration: 120, depth: 0.6 },
        ],
    }
}

pub fn generate(scenario: &TrafficScenario) -> Result<TimeSeries> {
    scenario.validate()?;
    let len = scenario.days * MINUTES_PER_DAY;
    let profile: Vec<f64> = (0..MINUTES_PER_DAY).map(|m| scenario.profile(m)).collect();
    let mut dip = vec![1.0; len];
    for e in &scenario.congestion_events {
        let end = (e.start + e.duration).min(len);
        for d in dip.iter_mut().take(end).skip(e.start) {
            *d *= 1.0 - e.depth;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let phi = scenario.noise_ar1;
    let innovation = scenario.noise_std * (1.0 - phi * phi).sqrt();
    let mut noise = 0.0;
    let values = (0..len)
        .map(|t| {
            let z: f64 = rng.sample(StandardNormal);
            noise = if t == 0 {
                scenario.noise_std * z
            } else {
                phi * noise + innovation * z
            };
            ((profile[t % MINUTES_PER_DAY] + noise) * dip[t]).max(0.0)
        })
        .collect();
    TimeSeries::new(REFERENCE_START_MINUTE, 1, values, "veh/min")
}

pub fn reference_dataset() -> TimeSeries {
    generate(&reference_scenario()).expect("reference scenario is valid")
}
