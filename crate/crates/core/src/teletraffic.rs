//! LTE resource-block arithmetic and Erlang-B blocking.
//!
//! A resource block lasts 0.5 ms and, with normal cyclic prefix, carries 7
//! OFDM symbols per subcarrier. At 2 bits per symbol (QPSK) that is 14 bits
//! per 0.5 ms, i.e. 28 kbps per subcarrier; 16-QAM doubles it to 56 kbps.
//!
//! A link carrying `C` kbps per subcarrier holds `N = floor(C / rate)` RBs at
//! once. With `m` RBs booked per call there are `k = floor(N / m)` channels.
//! `M` users each placing `s` calls/min of `t_h` minutes offer
//! `A = s * m * t_h * M` Erlangs, and calls are blocked with probability
//! `B(A, k)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::CapacityKbps;

/// OFDM symbols per 0.5 ms slot with normal cyclic prefix.
pub const SYMBOLS_PER_RB: u64 = 7;
/// Resource block duration in microseconds.
pub const RB_DURATION_US: u64 = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrafficError {
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("offered traffic must be a finite non-negative number, got {0}")]
    InvalidOffered(f64),
    #[error("RB per call must be at least 1")]
    ZeroRbPerCall,
    #[error("`{0}` is not a number or ratio like 1/60")]
    InvalidRatio(String),
    #[error("unknown modulation `{0}` (expected qpsk or qam16)")]
    UnknownModulation(String),
    #[error("halving RB/call needs an even value, got {0}")]
    OddRbPerCall(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    #[default]
    Qpsk,
    Qam16,
}

impl Modulation {
    pub const fn bits_per_symbol(self) -> u64 {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "qam16",
        })
    }
}

impl FromStr for Modulation {
    type Err = TrafficError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Modulation::Qpsk),
            "qam16" | "16qam" | "16-qam" => Ok(Modulation::Qam16),
            _ => Err(TrafficError::UnknownModulation(s.to_string())),
        }
    }
}

/// Bit rate of one RB on one subcarrier, in kbps (28 for QPSK, 56 for 16-QAM).
pub const fn rb_bitrate(modulation: Modulation) -> u64 {
    // bits per RB / 0.5 ms; bits per millisecond is kbps.
    modulation.bits_per_symbol() * SYMBOLS_PER_RB * 1000 / RB_DURATION_US
}

/// RBs carried simultaneously: `floor(C / rb_bitrate)`.
pub fn simultaneous_rb(capacity: CapacityKbps, modulation: Modulation) -> u64 {
    capacity.kbps() / rb_bitrate(modulation)
}

/// Channels of `rb_per_call` RBs each: `floor(N / m)`.
pub fn channel_count(simultaneous_rb: u64, rb_per_call: u32) -> Result<u64, TrafficError> {
    if rb_per_call == 0 {
        return Err(TrafficError::ZeroRbPerCall);
    }
    Ok(simultaneous_rb / u64::from(rb_per_call))
}

/// Aggregate RB arrival process at the sink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbArrival {
    /// RBs per millisecond.
    pub lambda_t: f64,
    /// Mean service time of an RB in milliseconds.
    pub holding_ms: f64,
}

impl RbArrival {
    pub fn new(lambda_t: f64, holding_ms: f64) -> Result<Self, TrafficError> {
        if !(lambda_t >= 0.0 && lambda_t.is_finite()) {
            return Err(TrafficError::InvalidOffered(lambda_t));
        }
        if !(holding_ms >= 0.0 && holding_ms.is_finite()) {
            return Err(TrafficError::InvalidOffered(holding_ms));
        }
        Ok(RbArrival {
            lambda_t,
            holding_ms,
        })
    }
}

/// `A = lambda_T * t_h` in Erlangs.
pub fn aggregate_offered_rb_traffic(arrival: &RbArrival) -> f64 {
    arrival.lambda_t * arrival.holding_ms
}

/// User-level traffic description of one network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficScenario {
    /// Number of users `M`.
    pub users: u32,
    /// RBs booked per call `m`.
    pub rb_per_call: u32,
    /// Calls per minute per user `s`.
    pub call_rate: f64,
    /// Mean call duration `t_h` in minutes.
    pub holding: f64,
    pub modulation: Modulation,
    /// Network capacity `C` per subcarrier.
    pub capacity: CapacityKbps,
}

impl TrafficScenario {
    pub fn new(
        users: u32,
        rb_per_call: u32,
        call_rate: f64,
        holding: f64,
        modulation: Modulation,
        capacity: CapacityKbps,
    ) -> Result<Self, TrafficError> {
        let sc = TrafficScenario {
            users,
            rb_per_call,
            call_rate,
            holding,
            modulation,
            capacity,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.users == 0 {
            return Err(TrafficError::NonPositive("users"));
        }
        if self.rb_per_call == 0 {
            return Err(TrafficError::ZeroRbPerCall);
        }
        if !positive(self.call_rate) {
            return Err(TrafficError::NonPositive("call rate"));
        }
        if !positive(self.holding) {
            return Err(TrafficError::NonPositive("holding time"));
        }
        if self.capacity.kbps() == 0 {
            return Err(TrafficError::NonPositive("capacity"));
        }
        Ok(())
    }

    /// The 16-QAM scenario with the same per-call throughput: each call needs
    /// half as many of the larger RBs.
    pub fn throughput_equivalent_qam16(&self) -> Result<Self, TrafficError> {
        if !self.rb_per_call.is_multiple_of(2) {
            return Err(TrafficError::OddRbPerCall(self.rb_per_call));
        }
        Ok(TrafficScenario {
            rb_per_call: self.rb_per_call / 2,
            modulation: Modulation::Qam16,
            ..*self
        })
    }
}

/// Total offered traffic `A = s * m * t_h * M` in Erlangs.
pub fn offered_traffic(sc: &TrafficScenario) -> f64 {
    // Multiplying the integer-valued factors first keeps inputs such as
    // 200 * 3 * 1.5 / 60 exact.
    f64::from(sc.users) * f64::from(sc.rb_per_call) * sc.holding * sc.call_rate
}

/// Erlang-B blocking probability for `offered` Erlangs on `channels` servers.
///
/// Runs the recurrence `B_0 = 1`, `B_j = A B_{j-1} / (j + A B_{j-1})` with
/// the running value held as a mantissa and a separate binary exponent, so
/// the result is accurate even when it falls below the normal `f64` range.
pub fn erlang_b(offered: f64, channels: u64) -> Result<f64, TrafficError> {
    if !(offered >= 0.0 && offered.is_finite()) {
        return Err(TrafficError::InvalidOffered(offered));
    }
    if channels == 0 {
        return Ok(1.0);
    }
    if offered == 0.0 {
        return Ok(0.0);
    }
    // B = mantissa * 2^exponent, mantissa in [0.5, 1).
    let mut mantissa = 1.0f64;
    let mut exponent: i64 = 0;
    for j in 1..=channels {
        let scaled = offered * mantissa;
        let product = scale(scaled, exponent);
        let next = scaled / (j as f64 + product);
        let (m, e) = libm::frexp(next);
        mantissa = m;
        exponent += i64::from(e);
    }
    Ok(scale(mantissa, exponent))
}

fn scale(mantissa: f64, exponent: i64) -> f64 {
    libm::scalbn(mantissa, exponent.clamp(-4000, 4000) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingRule {
    /// A call fails if it is blocked or its symbols are corrupted.
    #[default]
    ComplementProduct,
}

/// Combines blocking with a symbol error rate: `1 - (1 - B)(1 - SER)`.
pub fn weighted_blocking(blocking: f64, ser: f64, rule: WeightingRule) -> f64 {
    debug_assert!((0.0..=1.0).contains(&blocking) && (0.0..=1.0).contains(&ser));
    match rule {
        // Expanded form keeps B exact when SER is zero and vice versa.
        WeightingRule::ComplementProduct => blocking + ser - blocking * ser,
    }
}

/// Symbol error rate of Gray-coded square QAM/QPSK on an AWGN channel at
/// `es_n0_db` symbol SNR. Extension; not part of the blocking model proper.
pub fn awgn_ser(modulation: Modulation, es_n0_db: f64) -> f64 {
    let snr = 10f64.powf(es_n0_db / 10.0);
    let q = |x: f64| 0.5 * libm::erfc(x / std::f64::consts::SQRT_2);
    match modulation {
        Modulation::Qpsk => {
            let p = q(snr.sqrt());
            2.0 * p - p * p
        }
        Modulation::Qam16 => {
            let p = q((snr / 5.0).sqrt());
            3.0 * p - 2.25 * p * p
        }
    }
}

/// Everything `blocking` reports for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockingReport {
    pub offered_erlangs: f64,
    pub simultaneous_rb: u64,
    pub channels: u64,
    pub blocking: f64,
}

pub fn evaluate(sc: &TrafficScenario) -> Result<BlockingReport, TrafficError> {
    sc.validate()?;
    evaluate_with_rb(sc, simultaneous_rb(sc.capacity, sc.modulation))
}

/// Like [`evaluate`] but with the simultaneous RB count `N` given directly
/// instead of derived from capacity.
pub fn evaluate_with_rb(
    sc: &TrafficScenario,
    simultaneous_rb: u64,
) -> Result<BlockingReport, TrafficError> {
    let offered = offered_traffic(sc);
    let channels = channel_count(simultaneous_rb, sc.rb_per_call)?;
    Ok(BlockingReport {
        offered_erlangs: offered,
        simultaneous_rb,
        channels,
        blocking: erlang_b(offered, channels)?,
    })
}

/// Parses `0.25`, `15` or a ratio like `1/60`.
pub fn parse_ratio(text: &str) -> Result<f64, TrafficError> {
    let bad = || TrafficError::InvalidRatio(text.to_string());
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_scenario() -> TrafficScenario {
        TrafficScenario::new(
            200,
            3,
            1.0 / 60.0,
            1.5,
            Modulation::Qpsk,
            CapacityKbps::from_kbps(700),
        )
        .unwrap()
    }

    #[test]
    fn rb_bitrates() {
        assert_eq!(rb_bitrate(Modulation::Qpsk), 28);
        assert_eq!(rb_bitrate(Modulation::Qam16), 56);
        assert_eq!(
            rb_bitrate(Modulation::Qam16) / rb_bitrate(Modulation::Qpsk),
            2
        );
    }

    #[test]
    fn rb_traffic() {
        assert_eq!(
            aggregate_offered_rb_traffic(&RbArrival::new(0.0, 3.0).unwrap()),
            0.0
        );
        assert_eq!(
            aggregate_offered_rb_traffic(&RbArrival::new(0.5, 2.0).unwrap()),
            1.0
        );
        assert_eq!(
            aggregate_offered_rb_traffic(&RbArrival::new(1.0, 1.0).unwrap()),
            1.0
        );
        assert!(RbArrival::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn simultaneous_rbs() {
        let c = CapacityKbps::from_kbps(2200);
        assert_eq!(simultaneous_rb(c, Modulation::Qpsk), 78);
        assert_eq!(simultaneous_rb(c, Modulation::Qam16), 39);
        assert_eq!(simultaneous_rb(CapacityKbps::ZERO, Modulation::Qpsk), 0);
    }

    #[test]
    fn channels() {
        assert_eq!(channel_count(25, 3).unwrap(), 8);
        assert_eq!(channel_count(7, 7).unwrap(), 1);
        assert_eq!(channel_count(78, 5).unwrap(), 15);
        assert_eq!(channel_count(5, 0), Err(TrafficError::ZeroRbPerCall));
    }

    #[test]
    fn offered() {
        assert_eq!(offered_traffic(&reference_scenario()), 15.0);
        let sc = TrafficScenario {
            users: 100,
            rb_per_call: 5,
            ..reference_scenario()
        };
        assert_eq!(offered_traffic(&sc), 12.5);
        let zero = TrafficScenario {
            users: 0,
            ..reference_scenario()
        };
        assert_eq!(offered_traffic(&zero), 0.0);
        assert!(zero.validate().is_err());
    }

    #[test]
    fn erlang_b_small_cases() {
        assert_eq!(erlang_b(3.0, 0).unwrap(), 1.0);
        assert_eq!(erlang_b(1.0, 1).unwrap(), 0.5);
        assert_eq!(erlang_b(0.0, 4).unwrap(), 0.0);
        assert!((erlang_b(15.0, 8).unwrap() - 0.51926).abs() < 5e-6);
        assert!(erlang_b(-1.0, 3).is_err());
        assert!(erlang_b(f64::NAN, 3).is_err());
    }

    #[test]
    fn erlang_b_far_tail_stays_positive() {
        let b = erlang_b(1.0, 171).unwrap();
        assert!(b > 0.0 && b < f64::MIN_POSITIVE);
        assert_eq!(erlang_b(0.5, 2000).unwrap(), 0.0);
        // Heavy overload approaches 1 - k/A.
        let b = erlang_b(1000.0, 10).unwrap();
        assert!((b - 0.99).abs() < 1e-3);
    }

    #[test]
    fn reference_scenario_report() {
        let report = evaluate_with_rb(&reference_scenario(), 25).unwrap();
        assert_eq!(report.offered_erlangs, 15.0);
        assert_eq!(report.channels, 8);
        assert_eq!(evaluate(&reference_scenario()).unwrap(), report);
    }

    #[test]
    fn weighting() {
        let r = WeightingRule::ComplementProduct;
        assert_eq!(weighted_blocking(0.3, 0.0, r), 0.3);
        assert_eq!(weighted_blocking(0.0, 0.1, r), 0.1);
        assert!((weighted_blocking(0.5, 0.1, r) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn ser_curves_decrease_with_snr() {
        for modulation in [Modulation::Qpsk, Modulation::Qam16] {
            let mut last = 1.0;
            for db in 0..20 {
                let ser = awgn_ser(modulation, f64::from(db));
                assert!(ser < last && ser >= 0.0);
                last = ser;
            }
        }
        assert!(awgn_ser(Modulation::Qam16, 10.0) > awgn_ser(Modulation::Qpsk, 10.0));
    }

    #[test]
    fn qam16_halves_rb_up_to_flooring() {
        for kbps in 0..5000u64 {
            let c = CapacityKbps::from_kbps(kbps);
            assert_eq!(
                simultaneous_rb(c, Modulation::Qam16),
                simultaneous_rb(c, Modulation::Qpsk) / 2
            );
        }
    }

    #[test]
    fn throughput_equivalent_channels_match() {
        for m in (2..=20).step_by(2) {
            for kbps in (28..20_000).step_by(97) {
                let sc = TrafficScenario {
                    rb_per_call: m,
                    capacity: CapacityKbps::from_kbps(kbps),
                    ..reference_scenario()
                };
                let q16 = sc.throughput_equivalent_qam16().unwrap();
                let kq = evaluate(&sc).unwrap().channels;
                let k16 = evaluate(&q16).unwrap().channels;
                assert!(kq.abs_diff(k16) <= 1, "m={m} C={kbps}: {kq} vs {k16}");
                if simultaneous_rb(sc.capacity, Modulation::Qpsk).is_multiple_of(2) {
                    assert_eq!(kq, k16);
                }
            }
        }
        assert!(reference_scenario().throughput_equivalent_qam16().is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/60").unwrap(), 1.0 / 60.0);
        assert_eq!(parse_ratio("0.25").unwrap(), 0.25);
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
