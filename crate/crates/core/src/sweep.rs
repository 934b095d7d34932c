//! Parameter sweeps of the blocking model and their tabular output.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{self, ChartOptions};
use crate::teletraffic::{self, Modulation, TrafficError, TrafficScenario};
use crate::units::CapacityKbps;

/// A scenario field a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "rb_per_call_m")]
    RbPerCall,
    #[serde(rename = "simultaneous_rb_N")]
    SimultaneousRb,
    #[serde(rename = "users_M")]
    Users,
    #[serde(rename = "holding_th")]
    Holding,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::RbPerCall => "rb_per_call_m",
            SweepAxis::SimultaneousRb => "simultaneous_rb_N",
            SweepAxis::Users => "users_M",
            SweepAxis::Holding => "holding_th",
        }
    }

    fn integral(self) -> bool {
        !matches!(self, SweepAxis::Holding)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A call rate given as a number or as a ratio string such as `"1/60"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Value(f64),
    Ratio(String),
}

impl Rate {
    pub fn value(&self) -> Result<f64, TrafficError> {
        match self {
            Rate::Value(v) => Ok(*v),
            Rate::Ratio(s) => teletraffic::parse_ratio(s),
        }
    }
}

/// Scenario fields held fixed across a sweep. The varied field and the
/// series field must be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(rename = "users_M", default, skip_serializing_if = "Option::is_none")]
    pub users: Option<u32>,
    #[serde(
        rename = "rb_per_call_m",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub rb_per_call: Option<u32>,
    #[serde(
        rename = "call_rate_s",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub call_rate: Option<Rate>,
    #[serde(
        rename = "holding_th",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub holding: Option<f64>,
    #[serde(default)]
    pub modulation: Modulation,
    /// Per-subcarrier capacity in Mbps; decides `N` unless `N` is given or swept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_mbps: Option<f64>,
    #[serde(
        rename = "simultaneous_rb_N",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub simultaneous_rb: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub vary: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Field that distinguishes curves; each value in `series` is one curve.
    pub series_param: SweepAxis,
    pub series: Vec<f64>,
    #[serde(default)]
    pub fixed: FixedParams,
}

/// One evaluated sweep sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub series_label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("series {series}, x = {x}: {source}")]
    At {
        series: String,
        x: f64,
        #[source]
        source: TrafficError,
    },
    #[error("svg output needs at least one point")]
    EmptyChart,
    #[error("could not read sweep spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(SweepError::Invalid(format!(
                "unknown output format `{other}`"
            ))),
        }
    }
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        toml::from_str(text).map_err(|e| SweepError::Spec(e.to_string()))
    }

    /// The x values, `start, start + step, ...` up to and including `stop`.
    pub fn xs(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let invalid = |m: String| Err(SweepError::Invalid(m));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return invalid(format!("step must be positive, got {}", self.step));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return invalid(format!("empty range {}..={}", self.start, self.stop));
        }
        if self.series.is_empty() {
            return invalid("at least one series value is required".into());
        }
        if self.vary == self.series_param {
            return invalid(format!(
                "`{}` cannot be both varied and the series parameter",
                self.vary
            ));
        }
        for axis in [self.vary, self.series_param] {
            if self.fixed.has(axis) {
                return invalid(format!("`{axis}` is swept and must not appear in fixed"));
            }
        }
        for (axis, values) in [
            (self.vary, self.xs()),
            (self.series_param, self.series.clone()),
        ] {
            for v in values {
                if v.is_nan() || v <= 0.0 || (axis.integral() && v.fract() != 0.0) {
                    return invalid(format!(
                        "`{axis}` value {v} must be a positive{}",
                        if axis.integral() {
                            " integer"
                        } else {
                            " number"
                        }
                    ));
                }
            }
        }
        let rb_given = self.fixed.simultaneous_rb.is_some()
            || self.vary == SweepAxis::SimultaneousRb
            || self.series_param == SweepAxis::SimultaneousRb;
        if rb_given == self.fixed.capacity_mbps.is_some() {
            return invalid("give exactly one of capacity_mbps or simultaneous_rb_N".into());
        }
        for (axis, present) in [
            (SweepAxis::Users, self.fixed.users.is_some()),
            (SweepAxis::RbPerCall, self.fixed.rb_per_call.is_some()),
            (SweepAxis::Holding, self.fixed.holding.is_some()),
        ] {
            if !present && self.vary != axis && self.series_param != axis {
                return invalid(format!("`{axis}` is neither swept nor fixed"));
            }
        }
        if self.fixed.call_rate.is_none() {
            return invalid("`call_rate_s` is required".into());
        }
        Ok(())
    }
}

impl FixedParams {
    fn has(&self, axis: SweepAxis) -> bool {
        match axis {
            SweepAxis::RbPerCall => self.rb_per_call.is_some(),
            SweepAxis::SimultaneousRb => self.simultaneous_rb.is_some(),
            SweepAxis::Users => self.users.is_some(),
            SweepAxis::Holding => self.holding.is_some(),
        }
    }
}

fn series_label(axis: SweepAxis, value: f64) -> String {
    format!("{}={}", axis.name(), value)
}

fn evaluate_point(spec: &SweepSpec, series: f64, x: f64) -> Result<f64, TrafficError> {
    let f = &spec.fixed;
    let mut users = f.users.unwrap_or(0);
    let mut rb_per_call = f.rb_per_call.unwrap_or(0);
    let mut holding = f.holding.unwrap_or(0.0);
    let mut rb = f.simultaneous_rb;
    for (axis, value) in [(spec.series_param, series), (spec.vary, x)] {
        match axis {
            SweepAxis::Users => users = value as u32,
            SweepAxis::RbPerCall => rb_per_call = value as u32,
            SweepAxis::Holding => holding = value,
            SweepAxis::SimultaneousRb => rb = Some(value as u64),
        }
    }
    let call_rate = f
        .call_rate
        .as_ref()
        .map(Rate::value)
        .transpose()?
        .unwrap_or(0.0);
    let capacity = match f.capacity_mbps {
        Some(mbps) => CapacityKbps::from_kbps((mbps * 1000.0).round() as u64),
        // Only N matters when it is given directly.
        None => CapacityKbps::from_kbps(u64::MAX),
    };
    let sc = TrafficScenario::new(
        users,
        rb_per_call,
        call_rate,
        holding,
        f.modulation,
        capacity,
    )?;
    let report = match rb {
        Some(n) => teletraffic::evaluate_with_rb(&sc, n)?,
        None => teletraffic::evaluate(&sc)?,
    };
    Ok(report.blocking)
}

/// Evaluates every (series, x) pair. Rows come out sorted by series value,
/// then x, regardless of evaluation order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CurvePoint>, SweepError> {
    spec.validate()?;
    let mut series = spec.series.clone();
    series.sort_by(f64::total_cmp);
    series.dedup();
    let xs = spec.xs();
    let grid: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|&s| xs.iter().map(move |&x| (s, x)))
        .collect();
    grid.par_iter()
        .map(|&(s, x)| {
            let label = series_label(spec.series_param, s);
            evaluate_point(spec, s, x)
                .map(|y| CurvePoint {
                    series_label: label.clone(),
                    x,
                    y,
                })
                .map_err(|source| SweepError::At {
                    series: label,
                    x,
                    source,
                })
        })
        .collect()
}

/// Groups points into curves, keeping first-seen series order.
pub fn curves(points: &[CurvePoint]) -> Vec<(&str, Vec<(f64, f64)>)> {
    let mut out: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for p in points {
        match out.iter_mut().find(|(label, _)| *label == p.series_label) {
            Some((_, pts)) => pts.push((p.x, p.y)),
            None => out.push((&p.series_label, vec![(p.x, p.y)])),
        }
    }
    out
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("series,x,y\n");
    for p in points {
        // Debug formatting is shortest round-trip and switches to exponent
        // notation for tiny blocking values.
        out.push_str(&format!("{},{},{:?}\n", p.series_label, p.x, p.y));
    }
    out
}

pub fn from_json(bytes: &[u8]) -> Result<Vec<CurvePoint>, SweepError> {
    serde_json::from_slice(bytes).map_err(|e| SweepError::Spec(e.to_string()))
}

/// Renders points as CSV (`series,x,y`), a JSON array, or an SVG line chart.
pub fn emit(
    points: &[CurvePoint],
    format: OutputFormat,
    chart: &ChartOptions,
) -> Result<Vec<u8>, SweepError> {
    match format {
        OutputFormat::Csv => Ok(to_csv(points).into_bytes()),
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(points).expect("serializable");
            bytes.push(b'\n');
            Ok(bytes)
        }
        OutputFormat::Svg => {
            if points.is_empty() {
                return Err(SweepError::EmptyChart);
            }
            Ok(chart::render(&curves(points), chart).into_bytes())
        }
    }
}
