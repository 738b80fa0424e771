//! Command implementations. Each returns what should go to stdout.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use semctx::codec::{
    rate_sweep, run_trials, CodebookConfig, RatePoint, SimResult, SweepSpec, SweepTable, TrialOptions,
    DEFAULT_MEM_BUDGET, SIM_CSV_HEADER,
};
use semctx::oracle::{exhaustive_capacity, exhaustive_scheme_search, GridSpec};
use semctx::prob::mutual_information;
use semctx::solver::{capacity_full_csi, optimize_rate, Argmax};
use semctx::{induced_joint, validate_scenario, AuxiliaryScheme, RateReport, Scenario};

use crate::catalog;
use crate::config::{Model, ScenarioConfig};
use crate::error::{CliError, EXIT_PARSE, EXIT_SCENARIO};

pub const MEM_BUDGET_ENV: &str = "SEMCTX_MEM_BUDGET";
/// Prefix that loads a built-in scenario instead of a file.
pub const CATALOG_PREFIX: &str = "catalog:";
/// Default codec slack when a scenario carries no codec block.
pub const DEFAULT_EPSILON: f64 = 0.2;
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Error rate below which a sweep cell counts as decodable in the summary.
pub const THRESHOLD_ERROR_RATE: f64 = 0.1;

/// Options shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Globals {
    pub seed: Option<u64>,
    pub mem_budget: u64,
}

impl Default for Globals {
    fn default() -> Self {
        Self {
            seed: None,
            mem_budget: DEFAULT_MEM_BUDGET,
        }
    }
}

impl Globals {
    /// Read the memory budget from the environment, if set.
    pub fn from_env(seed: Option<u64>) -> Result<Self, CliError> {
        let mem_budget = match std::env::var(MEM_BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::parse(format!("{MEM_BUDGET_ENV} must be a positive integer, got `{v}`")))?,
            Err(_) => DEFAULT_MEM_BUDGET,
        };
        Ok(Self { seed, mem_budget })
    }

    fn seed_for(&self, cfg: &ScenarioConfig) -> u64 {
        self.seed
            .or_else(|| cfg.codec.as_ref().and_then(|c| c.seed))
            .unwrap_or(0)
    }
}

/// Load a scenario from a file path or `catalog:<id>`.
pub fn load(source: &str) -> Result<ScenarioConfig, CliError> {
    match source.strip_prefix(CATALOG_PREFIX) {
        Some(id) => catalog::entry(id).ok_or_else(|| CliError::parse(format!("no catalog entry `{id}`"))),
        None => ScenarioConfig::load(Path::new(source)),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn build(cfg: &ScenarioConfig, scenario: Scenario) -> Result<Model, CliError> {
    let model = cfg.build()?;
    let check = validate_scenario(&model.ctx, scenario);
    if !check.ok {
        return Err(CliError::new(EXIT_SCENARIO, check.diagnostics.join("; ")));
    }
    model.channel.check_against(&model.ctx)?;
    if let Some(s) = &model.scheme {
        s.check_against(&model.channel, &model.ctx)?;
    }
    Ok(model)
}

pub fn validate(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let model = build(cfg, cfg.scenario)?;
    let mut out = format!("valid: {} ({})\n", cfg.id, cfg.scenario);
    out.push_str(&format!(
        "contexts: |Q0|={} |Q1t|={} |Q2t|={}; |S|={} |X|={}\n",
        model.ctx.q0().size(),
        model.ctx.q1_extra().size(),
        model.ctx.q2_extra().size(),
        model.channel.s().size(),
        model.channel.x().size()
    ));
    if let Some(s) = &model.scheme {
        out.push_str(&format!("scheme: |U|={}\n", s.u().size()));
    }
    if let Some(m) = &model.semantic_map {
        let d = m.verify_context_disambiguation();
        out.push_str(&format!(
            "semantic map: H(W|M)={:.6} H(W|M,Q)={:.3e} disambiguated={}\n",
            m.ambiguity(),
            d.residual_bits,
            d.ok
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateArgs {
    pub scenario: Option<Scenario>,
    pub u_size: Option<usize>,
    pub oracle: bool,
    /// Lattice resolution for the oracle; defaults to 201 for capacity and 7 for scheme searches.
    pub resolution: Option<usize>,
}

/// The solver's answer for a scenario: full-CSI capacity or the best scheme found.
pub fn solve(cfg: &ScenarioConfig, model: &Model, scenario: Scenario, u_size: Option<usize>, seed: u64) -> Result<RateReport, CliError> {
    if scenario == Scenario::FullShared && u_size.is_none() {
        return Ok(capacity_full_csi(&model.channel, &model.ctx)?);
    }
    let mut search = cfg.search_config();
    search.seed = seed;
    if u_size.is_some() {
        search.u_size = u_size;
    }
    Ok(optimize_rate(&model.channel, &model.ctx, scenario, &search)?)
}

pub fn rate(cfg: &ScenarioConfig, args: &RateArgs, g: &Globals) -> Result<String, CliError> {
    let scenario = args.scenario.unwrap_or(cfg.scenario);
    let model = build(cfg, scenario)?;
    let report = solve(cfg, &model, scenario, args.u_size, g.seed_for(cfg))?;
    if !args.oracle {
        return Ok(to_json(&json!({ "id": cfg.id, "report": report })));
    }
    let oracle = if scenario == Scenario::FullShared && args.u_size.is_none() {
        let grid = GridSpec::new(args.resolution.unwrap_or(201), model.channel.s().size());
        let o = exhaustive_capacity(&model.channel, &model.ctx, &grid)?;
        json!({
            "method": "exhaustive_capacity",
            "resolution": grid.resolution,
            "rate_bits": o.rate,
            "gap_bound": o.gap,
            "evaluations": o.points_evaluated,
        })
    } else {
        let u = args
            .u_size
            .or(cfg.search.as_ref().and_then(|s| s.u_size))
            .unwrap_or_else(|| semctx::solver::default_u_size(&model.channel, &model.ctx));
        let grid = GridSpec::new(args.resolution.unwrap_or(7), u);
        let o = exhaustive_scheme_search(&model.channel, &model.ctx, scenario, &grid)?;
        json!({
            "method": "exhaustive_scheme_search",
            "resolution": grid.resolution,
            "u_size": u,
            "rate_bits": o.report.rate_bits,
            "gap_bound": o.gap,
            "evaluations": o.evaluations,
        })
    };
    let diff = (report.rate_bits - oracle["rate_bits"].as_f64().unwrap_or(f64::NAN)).abs();
    Ok(to_json(&json!({
        "id": cfg.id,
        "report": report,
        "oracle": oracle,
        "solver_oracle_difference": diff,
    })))
}

/// The shipped scheme, or the optimizer's best one when the scenario has none.
pub fn scheme_for(cfg: &ScenarioConfig, model: &Model, seed: u64) -> Result<(AuxiliaryScheme, bool), CliError> {
    if let Some(s) = &model.scheme {
        return Ok((s.clone(), false));
    }
    let mut search = cfg.search_config();
    search.seed = seed;
    let report = optimize_rate(&model.channel, &model.ctx, model.scenario, &search)?;
    match report.argmax {
        Argmax::Scheme(s) => Ok((s, true)),
        Argmax::InputLaw(_) => unreachable!("the scheme search always returns a scheme"),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulateArgs {
    pub n: Option<usize>,
    pub rate: Option<f64>,
    pub rate_tilde: Option<f64>,
    pub epsilon: Option<f64>,
    pub trials: Option<u64>,
    pub block_size: Option<usize>,
    pub ml: bool,
    pub json: bool,
}

pub fn simulate(cfg: &ScenarioConfig, args: &SimulateArgs, g: &Globals) -> Result<String, CliError> {
    let model = build(cfg, cfg.scenario)?;
    let seed = g.seed_for(cfg);
    let codec = cfg.codec.as_ref();
    let n = args.n.or(codec.map(|c| c.n)).ok_or_else(|| missing("n"))?;
    let rate = args.rate.or(codec.map(|c| c.rate)).ok_or_else(|| missing("rate"))?;
    let rate_tilde = args.rate_tilde.or(codec.map(|c| c.rate_tilde)).unwrap_or(rate);
    let epsilon = args.epsilon.or(codec.map(|c| c.epsilon)).unwrap_or(DEFAULT_EPSILON);
    let trials = args.trials.or(codec.map(|c| c.trials)).unwrap_or(DEFAULT_TRIALS);
    let mut cc = CodebookConfig::new(n, rate, rate_tilde, epsilon, seed);
    cc.mem_budget = g.mem_budget;
    cc.validate()?;
    let (scheme, optimized) = scheme_for(cfg, &model, seed)?;
    let opts = trial_options(cfg, args.block_size, args.ml);
    let result = run_trials(&model.channel, &model.ctx, &scheme, model.scenario, &cc, trials, &opts)?;
    if args.json {
        let mut out = json!({
            "id": cfg.id,
            "scheme_source": if optimized { "optimized" } else { "config" },
            "result": result,
        });
        if optimized {
            out["scheme"] = serde_json::to_value(&scheme).expect("serializable scheme");
        }
        Ok(to_json(&out))
    } else {
        Ok(sim_csv(&result))
    }
}

fn missing(what: &str) -> CliError {
    CliError::new(
        crate::error::EXIT_VALIDATION,
        format!("`{what}` is neither given on the command line nor in the scenario's codec block"),
    )
}

fn trial_options(cfg: &ScenarioConfig, block_size: Option<usize>, ml: bool) -> TrialOptions {
    let mut opts = TrialOptions {
        ml_baseline: ml,
        ..TrialOptions::default()
    };
    if let Some(b) = block_size.or(cfg.codec.as_ref().and_then(|c| c.block_size)) {
        opts.block_size = b;
    }
    opts
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepArgs {
    pub block_lengths: Vec<usize>,
    /// Absolute message rates in bits per use.
    pub rates: Option<Vec<f64>>,
    /// Message rates as multiples of the computed rate.
    pub rate_fractions: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub epsilon: Option<f64>,
    pub block_size: Option<usize>,
    pub ml: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub table: SweepTable,
    pub csv: String,
    pub summary: String,
    pub rate_bits: f64,
    pub i_u_q1_bits: f64,
}

/// Codebook rates use `R̃ = R + 1.1 I(U; Q0, Q1t)` so the encoder has slack over the binning condition.
pub fn sweep(cfg: &ScenarioConfig, args: &SweepArgs, g: &Globals) -> Result<SweepOutput, CliError> {
    let model = build(cfg, cfg.scenario)?;
    let seed = g.seed_for(cfg);
    if args.block_lengths.is_empty() {
        return Err(CliError::parse("sweep needs at least one block length"));
    }
    let (scheme, _) = scheme_for(cfg, &model, seed)?;
    let joint = induced_joint(&model.channel, &model.ctx, &scheme)?;
    let i_u_q1 = mutual_information(&joint, &["u"], &["q0", "q1t"])?;
    let rate_bits = solve(cfg, &model, model.scenario, None, seed)?.rate_bits;
    let rates: Vec<f64> = match (&args.rates, &args.rate_fractions) {
        (Some(r), None) => r.clone(),
        (None, Some(f)) => f.iter().map(|x| x * rate_bits).collect(),
        _ => return Err(CliError::parse("give exactly one of --rates and --rate-fractions")),
    };
    let points: Vec<RatePoint> = rates
        .iter()
        .map(|r| RatePoint {
            rate: *r,
            rate_tilde: r + 1.1 * i_u_q1,
        })
        .collect();
    let codec = cfg.codec.as_ref();
    let epsilon = args.epsilon.or(codec.map(|c| c.epsilon)).unwrap_or(DEFAULT_EPSILON);
    let trials = args.trials.or(codec.map(|c| c.trials)).unwrap_or(DEFAULT_TRIALS);
    let mut spec = SweepSpec::new(args.block_lengths.clone(), points, trials, epsilon, seed);
    spec.mem_budget = g.mem_budget;
    spec.options = trial_options(cfg, args.block_size, args.ml);
    let table = rate_sweep(&model.channel, &model.ctx, &scheme, model.scenario, &spec)?;
    let csv = table.to_csv();
    let n_max = args.block_lengths.iter().max().copied().unwrap_or(0);
    let threshold = table.threshold_estimate(THRESHOLD_ERROR_RATE);
    let skipped = table.cells.iter().filter(|c| c.skipped.is_some()).count();
    let summary = format!(
        "scenario: {} ({})\nrate_bits: {}\ni_u_q1_bits: {}\ncells: {} ({} skipped)\nthreshold_estimate (largest R with error_rate < {} at n = {}): {}\n",
        cfg.id,
        cfg.scenario,
        rate_bits,
        i_u_q1,
        table.cells.len(),
        skipped,
        THRESHOLD_ERROR_RATE,
        n_max,
        threshold.map_or("none".to_string(), |t| t.to_string())
    );
    Ok(SweepOutput {
        table,
        csv,
        summary,
        rate_bits,
        i_u_q1_bits: i_u_q1,
    })
}

pub fn catalog_list() -> String {
    catalog::entries()
        .iter()
        .map(|e| format!("{}\t{}\t{}\n", e.id, e.scenario, e.description))
        .collect()
}

pub fn catalog_show(id: &str) -> Result<String, CliError> {
    let e = catalog::entry(id).ok_or_else(|| CliError::new(EXIT_PARSE, format!("no catalog entry `{id}`")))?;
    let model = e.build()?;
    let mut checks = serde_json::Map::new();
    if let Some(m) = &model.semantic_map {
        let d = m.verify_context_disambiguation();
        checks.insert("verify_context_disambiguation".into(), json!(d.ok));
        checks.insert("ambiguity_bits".into(), json!(m.ambiguity()));
        checks.insert("residual_ambiguity_bits".into(), json!(d.residual_bits));
    }
    checks.insert("scenario_valid".into(), json!(validate_scenario(&model.ctx, e.scenario).ok));
    Ok(to_json(&json!({
        "id": e.id,
        "description": e.description,
        "scenario": e.scenario,
        "expected": e.expected,
        "checks": checks,
        "config": e.to_toml(),
    })))
}

pub fn catalog_export(id: &str, path: &Path) -> Result<String, CliError> {
    let e = catalog::entry(id).ok_or_else(|| CliError::new(EXIT_PARSE, format!("no catalog entry `{id}`")))?;
    std::fs::write(path, e.to_toml()).map_err(|err| CliError::parse(format!("cannot write {}: {err}", path.display())))?;
    Ok(format!("wrote {} to {}\n", id, path.display()))
}

/// Rows of a simulation result in CSV form, header included.
pub fn sim_csv(result: &SimResult) -> String {
    format!("{SIM_CSV_HEADER}\n{}\n", result.csv_row())
}
