use std::collections::BTreeSet;

use meshplan_core::chart::ChartOptions;
use meshplan_core::dimension::{DimensionError, Dimensioner, DEFAULT_GRANULARITY};
use meshplan_core::format::Format;
use meshplan_core::maxflow::max_flow_with_stats;
use meshplan_core::sim::{
    self, ArrivalMode, HoldingDistribution, DEFAULT_TOTAL_CALLS, DEFAULT_WARMUP_CALLS,
};
use meshplan_core::sweep::{self, OutputFormat};
use meshplan_core::teletraffic::{
    self, awgn_ser, weighted_blocking, BlockingReport, WeightingRule,
};
use meshplan_core::{
    feasible, parse_mesh, parse_network, run_sweep, CapacityKbps, LossSystem, Modulation, NodeId,
    SimConfig, SimResult, SolverEngine, SweepSpec, TrafficScenario,
};
use serde::Serialize;

use crate::args::{
    BlockingArgs, DimensionArgs, MaxflowArgs, ScenarioArgs, SimulateArgs, SweepArgs,
};
use crate::config::{BlockingConfig, DimensionConfig, MaxflowConfig, SimulateConfig, SweepConfig};
use crate::error::CliError;
use crate::{read_file, TOOL_VERSION};

const DEFAULT_SEED: u64 = 1;

fn json(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

fn engine(flag: Option<String>, config: &Option<String>) -> Result<SolverEngine, CliError> {
    match flag.or_else(|| config.clone()) {
        Some(name) => name.parse().map_err(CliError::input),
        None => Ok(SolverEngine::default()),
    }
}

fn input_format(
    flag: Option<String>,
    config: &Option<String>,
    text: &str,
) -> Result<Format, CliError> {
    match flag.or_else(|| config.clone()) {
        Some(name) => name.parse().map_err(CliError::input),
        None => Ok(Format::sniff(text)),
    }
}

fn node_ids(nodes: &BTreeSet<NodeId>) -> Vec<usize> {
    nodes.iter().map(|n| n.0).collect()
}

#[derive(Serialize)]
struct ArcReport {
    from: usize,
    to: usize,
    capacity_kbps: CapacityKbps,
    flow_kbps: CapacityKbps,
}

#[derive(Serialize)]
struct MaxflowReport {
    tool_version: &'static str,
    engine: &'static str,
    nodes: usize,
    source: usize,
    sink: usize,
    max_flow_kbps: CapacityKbps,
    min_cut_capacity_kbps: CapacityKbps,
    /// Source side of the minimum cut.
    min_cut: Vec<usize>,
    augmentations: u64,
    phases: u64,
    arcs: Vec<ArcReport>,
}

pub fn maxflow(args: MaxflowArgs, config: &MaxflowConfig) -> Result<Vec<u8>, CliError> {
    let engine = engine(args.engine, &config.engine)?;
    let text = read_file(&args.graph_file)?;
    let format = input_format(args.input_format, &config.input_format, &text)?;
    let net = parse_network(&text, format).map_err(CliError::input)?;
    let (flow, stats) = max_flow_with_stats(&net, engine);
    let report = MaxflowReport {
        tool_version: TOOL_VERSION,
        engine: engine.short_name(),
        nodes: net.node_count(),
        source: net.source().0,
        sink: net.sink().0,
        max_flow_kbps: flow.total(),
        min_cut_capacity_kbps: net.cut_capacity(flow.min_cut()),
        min_cut: node_ids(flow.min_cut()),
        augmentations: stats.augmentations,
        phases: stats.phases,
        arcs: net
            .arcs()
            .iter()
            .zip(flow.flows())
            .map(|(arc, &f)| ArcReport {
                from: arc.from.0,
                to: arc.to.0,
                capacity_kbps: arc.capacity,
                flow_kbps: f,
            })
            .collect(),
    };
    Ok(json(&report))
}

#[derive(Serialize)]
struct LinkReport {
    a: usize,
    b: usize,
    capacity_kbps: CapacityKbps,
}

#[derive(Serialize)]
struct StepReport {
    lower_kbps: CapacityKbps,
    upper_kbps: CapacityKbps,
    probe_kbps: CapacityKbps,
    flow_kbps: CapacityKbps,
    feasible: bool,
}

#[derive(Serialize)]
struct DimensionReport {
    tool_version: &'static str,
    engine: &'static str,
    granularity_kbps: CapacityKbps,
    demand_kbps: CapacityKbps,
    optimal_m_kbps: CapacityKbps,
    achieved_flow_kbps: CapacityKbps,
    /// Source side of the minimum cut at the optimum; node 0 is the super-source.
    min_cut: Vec<usize>,
    min_cut_capacity_kbps: CapacityKbps,
    iterations: usize,
    exit_adjusted: bool,
    load_balance_ratio: Option<f64>,
    link_capacities: Vec<LinkReport>,
    trace: Vec<StepReport>,
}

pub fn dimension(args: DimensionArgs, config: &DimensionConfig) -> Result<Vec<u8>, CliError> {
    let engine = engine(args.engine, &config.engine)?;
    let granularity = args
        .granularity_kbps
        .or(config.granularity_kbps)
        .map_or(DEFAULT_GRANULARITY, CapacityKbps::from_kbps);
    let text = read_file(&args.mesh_file)?;
    let format = input_format(args.input_format, &config.input_format, &text)?;
    let spec = parse_mesh(&text, format).map_err(CliError::input)?;
    let result = Dimensioner {
        granularity,
        engine,
    }
    .dimension(&spec)
    .map_err(|e| match e {
        DimensionError::InfeasibleAtY(_) => CliError::Infeasible(e.to_string()),
        other => CliError::input(other),
    })?;
    let net = meshplan_core::build_augmented(&spec, result.optimal_m);
    let (_, flow) = feasible(&spec, result.optimal_m, engine);
    let report = DimensionReport {
        tool_version: TOOL_VERSION,
        engine: engine.short_name(),
        granularity_kbps: result.granularity,
        demand_kbps: result.demand,
        optimal_m_kbps: result.optimal_m,
        achieved_flow_kbps: result.achieved_flow,
        min_cut: node_ids(flow.min_cut()),
        min_cut_capacity_kbps: net.cut_capacity(flow.min_cut()),
        iterations: result.iterations,
        exit_adjusted: result.exit_adjusted,
        load_balance_ratio: result.load_balance_ratio,
        link_capacities: result
            .link_capacities
            .iter()
            .map(|l| LinkReport {
                a: l.a.0,
                b: l.b.0,
                capacity_kbps: l.capacity,
            })
            .collect(),
        trace: result
            .trace
            .iter()
            .map(|s| StepReport {
                lower_kbps: s.lower,
                upper_kbps: s.upper,
                probe_kbps: s.probe,
                flow_kbps: s.flow,
                feasible: s.feasible,
            })
            .collect(),
    };
    Ok(json(&report))
}

/// A scenario assembled from flags over the `[blocking]` config section.
struct Scenario {
    traffic: TrafficScenario,
    simultaneous_rb: Option<u64>,
}

impl Scenario {
    fn resolve(args: ScenarioArgs, config: &BlockingConfig) -> Result<Scenario, CliError> {
        let missing = |name: &str| {
            CliError::Input(format!(
                "missing --{name} (or `{}` in [blocking])",
                name.replace('-', "_")
            ))
        };
        let users = args
            .users
            .or(config.users)
            .ok_or_else(|| missing("users"))?;
        let rb_per_call = args
            .rb_per_call
            .or(config.rb_per_call)
            .ok_or_else(|| missing("rb-per-call"))?;
        let rate = match (args.rate, &config.rate) {
            (Some(text), _) => teletraffic::parse_ratio(&text).map_err(CliError::input)?,
            (None, Some(rate)) => rate.value().map_err(CliError::input)?,
            (None, None) => return Err(missing("rate")),
        };
        let holding = args
            .holding
            .or(config.holding)
            .ok_or_else(|| missing("holding"))?;
        let modulation: Modulation = match args.modulation.or_else(|| config.modulation.clone()) {
            Some(name) => name.parse().map_err(CliError::input)?,
            None => Modulation::default(),
        };
        let simultaneous_rb = args.simultaneous_rb.or(config.simultaneous_rb);
        let capacity = match (args.capacity_mbps, config.capacity_mbps) {
            (Some(text), _) => CapacityKbps::parse_mbps(&text).map_err(CliError::input)?,
            (None, Some(v)) => CapacityKbps::parse_mbps(&v.to_string()).map_err(CliError::input)?,
            // Only N enters the model; pick the capacity that yields it.
            (None, None) if simultaneous_rb.is_some() => CapacityKbps::from_kbps(
                simultaneous_rb
                    .unwrap_or(0)
                    .saturating_mul(teletraffic::rb_bitrate(modulation))
                    .max(1),
            ),
            (None, None) => return Err(missing("capacity-mbps")),
        };
        let traffic = TrafficScenario::new(users, rb_per_call, rate, holding, modulation, capacity)
            .map_err(CliError::input)?;
        Ok(Scenario {
            traffic,
            simultaneous_rb,
        })
    }

    fn report(&self) -> Result<BlockingReport, CliError> {
        match self.simultaneous_rb {
            Some(n) => teletraffic::evaluate_with_rb(&self.traffic, n),
            None => teletraffic::evaluate(&self.traffic),
        }
        .map_err(CliError::input)
    }
}

#[derive(Serialize)]
struct ScenarioReport {
    users: u32,
    rb_per_call: u32,
    call_rate_per_min: f64,
    holding_min: f64,
    modulation: Modulation,
    capacity_kbps: CapacityKbps,
}

impl From<&TrafficScenario> for ScenarioReport {
    fn from(sc: &TrafficScenario) -> Self {
        ScenarioReport {
            users: sc.users,
            rb_per_call: sc.rb_per_call,
            call_rate_per_min: sc.call_rate,
            holding_min: sc.holding,
            modulation: sc.modulation,
            capacity_kbps: sc.capacity,
        }
    }
}

#[derive(Serialize)]
struct BlockingOutput {
    tool_version: &'static str,
    scenario: ScenarioReport,
    offered_erlangs: f64,
    simultaneous_rb: u64,
    channels: u64,
    blocking: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ser: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weighted_blocking: Option<f64>,
}

fn probability(p: f64) -> String {
    if p == 0.0 || p >= 1e-3 {
        format!("{p:.6}")
    } else {
        format!("{p:.6e}")
    }
}

pub fn blocking(args: BlockingArgs, config: &BlockingConfig) -> Result<Vec<u8>, CliError> {
    let scenario = Scenario::resolve(args.scenario, config)?;
    let report = scenario.report()?;
    let ser = match (args.ser, args.ser_snr_db) {
        (Some(p), _) => Some(p),
        (None, Some(db)) => Some(awgn_ser(scenario.traffic.modulation, db)),
        (None, None) => config.ser.or_else(|| {
            config
                .ser_snr_db
                .map(|db| awgn_ser(scenario.traffic.modulation, db))
        }),
    };
    if let Some(p) = ser {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Input(format!("SER {p} is not a probability")));
        }
    }
    let weighted =
        ser.map(|p| weighted_blocking(report.blocking, p, WeightingRule::ComplementProduct));
    match args
        .format
        .or_else(|| config.format.clone())
        .as_deref()
        .unwrap_or("table")
    {
        "table" => {
            let mut line = format!(
                "A={} N={} k={} B={}",
                report.offered_erlangs,
                report.simultaneous_rb,
                report.channels,
                probability(report.blocking)
            );
            if let (Some(p), Some(w)) = (ser, weighted) {
                line.push_str(&format!(
                    " SER={} B_weighted={}",
                    probability(p),
                    probability(w)
                ));
            }
            line.push('\n');
            Ok(line.into_bytes())
        }
        "json" => Ok(json(&BlockingOutput {
            tool_version: TOOL_VERSION,
            scenario: ScenarioReport::from(&scenario.traffic),
            offered_erlangs: report.offered_erlangs,
            simultaneous_rb: report.simultaneous_rb,
            channels: report.channels,
            blocking: report.blocking,
            ser,
            weighted_blocking: weighted,
        })),
        other => Err(CliError::Input(format!(
            "unknown format `{other}`; use table or json"
        ))),
    }
}

#[derive(Serialize)]
struct PooledReport {
    #[serde(flatten)]
    result: SimResult,
    z_score: f64,
}

#[derive(Serialize)]
struct SimulateOutput {
    tool_version: &'static str,
    seed: u64,
    replications: u64,
    calls_per_replication: u64,
    warmup_calls: u64,
    holding_distribution: HoldingDistribution,
    arrivals: ArrivalMode,
    offered_erlangs: f64,
    channels: u64,
    erlang_b: f64,
    runs: Vec<SimResult>,
    pooled: PooledReport,
}

pub fn simulate(
    args: SimulateArgs,
    scenario_cfg: &BlockingConfig,
    config: &SimulateConfig,
) -> Result<Vec<u8>, CliError> {
    let system = match (args.offered, args.channels) {
        (Some(a), Some(k)) => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(CliError::Input(format!(
                    "offered load {a} must be positive"
                )));
            }
            LossSystem::with_offered(a, k)
        }
        _ => {
            let scenario = Scenario::resolve(args.scenario, scenario_cfg)?;
            let report = scenario.report()?;
            LossSystem {
                channels: report.channels,
                ..LossSystem::from_scenario(&scenario.traffic).map_err(CliError::input)?
            }
        }
    };
    let holding = match args
        .holding_dist
        .or_else(|| config.holding_dist.clone())
        .as_deref()
    {
        None | Some("exponential") => HoldingDistribution::Exponential,
        Some("deterministic") => HoldingDistribution::Deterministic,
        Some(other) => {
            return Err(CliError::Input(format!(
                "unknown holding distribution `{other}`"
            )))
        }
    };
    let per_user = args.per_user || config.per_user.unwrap_or(false);
    let cfg = SimConfig {
        system,
        total_calls: args.calls.or(config.calls).unwrap_or(DEFAULT_TOTAL_CALLS),
        warmup_calls: args
            .warmup
            .or(config.warmup)
            .unwrap_or(DEFAULT_WARMUP_CALLS),
        seed: args.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        holding,
        arrivals: if per_user {
            ArrivalMode::PerUser
        } else {
            ArrivalMode::Aggregate
        },
    };
    let replications = args.replications.or(config.replications).unwrap_or(1);
    if replications == 0 {
        return Err(CliError::Input("--replications must be at least 1".into()));
    }
    let expected =
        meshplan_core::erlang_b(system.offered(), system.channels).map_err(CliError::input)?;
    let outcome = sim::simulate_replications(&cfg, replications).map_err(CliError::input)?;
    let z_score = outcome.pooled.z_score(expected);
    Ok(json(&SimulateOutput {
        tool_version: TOOL_VERSION,
        seed: cfg.seed,
        replications,
        calls_per_replication: cfg.total_calls,
        warmup_calls: cfg.warmup_calls,
        holding_distribution: cfg.holding,
        arrivals: cfg.arrivals,
        offered_erlangs: system.offered(),
        channels: system.channels,
        erlang_b: expected,
        runs: outcome.runs,
        pooled: PooledReport {
            result: SimResult {
                seed: cfg.seed,
                ..outcome.pooled
            },
            z_score,
        },
    }))
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    tool_version: &'static str,
    spec: &'a SweepSpec,
    points: &'a [meshplan_core::CurvePoint],
}

pub fn sweep(args: SweepArgs, config: &SweepConfig) -> Result<Vec<u8>, CliError> {
    let text = read_file(&args.spec_file)?;
    let spec = SweepSpec::from_toml(&text).map_err(CliError::input)?;
    let format: OutputFormat = args
        .format
        .or_else(|| config.format.clone())
        .as_deref()
        .unwrap_or("csv")
        .parse()
        .map_err(CliError::input)?;
    let points = run_sweep(&spec).map_err(CliError::input)?;
    let chart = ChartOptions {
        title: args
            .title
            .or_else(|| config.title.clone())
            .unwrap_or_default(),
        x_label: spec.vary.name().to_string(),
        log_y: args.log_y || config.log_y.unwrap_or(false),
        ..ChartOptions::default()
    };
    let bytes = match format {
        OutputFormat::Json => json(&SweepOutput {
            tool_version: TOOL_VERSION,
            spec: &spec,
            points: &points,
        }),
        other => sweep::emit(&points, other, &chart).map_err(CliError::input)?,
    };
    match args.output {
        Some(path) => {
            std::fs::write(&path, &bytes)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(Vec::new())
        }
        None => Ok(bytes),
    }
}
