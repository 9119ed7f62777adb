//! Configuration, Monte Carlo sweeps, figure presets and CSV/JSON output.
//!
//! A config file is TOML. System constants sit at the top level (dBm where
//! the name says so), followed by optional `[topology]`, `[sweep]` and
//! `[es]` tables. Anything left out takes its default; unknown keys are
//! rejected with their full path.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aobws::{reflection_at, run_aobws_detailed, run_ocetp_solution, Solution};
use crate::error::{Constraint, Error, Result};
use crate::es_oracle::{es_search, EsConfig};
use crate::params::{dbm_to_watts, SystemParams};
use crate::scenario::{place_sensors_bpp, ScenarioChannel, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ocetp,
    Aobws,
    Es,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ocetp => "ocetp",
            Algorithm::Aobws => "aobws",
            Algorithm::Es => "es",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    /// Fixed CE transmit power in dBm; only the reflection coefficients
    /// are optimized.
    PCeDbm,
    Rho,
    RMin,
    /// Sensor-to-reader distance of sensor 1; sensor 2 keeps its configured
    /// offset.
    DB,
    /// CE-to-sensor distance of sensor 1; sensor 2 keeps its configured
    /// offset. Forces a fixed topology.
    DF,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::PCeDbm => "p_ce_dbm",
            SweepVar::Rho => "rho",
            SweepVar::RMin => "r_min",
            SweepVar::DB => "d_b",
            SweepVar::DF => "d_f",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyMode {
    Fixed,
    /// Sensor positions drawn uniformly in a disc around the CE; `d_b`
    /// stays at its configured value.
    Bpp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologySpec {
    pub mode: TopologyMode,
    pub d_f: [f64; 2],
    pub d_b: [f64; 2],
    pub radius_m: f64,
}

impl Default for TopologySpec {
    fn default() -> Self {
        TopologySpec {
            mode: TopologyMode::Fixed,
            d_f: [4.0, 3.0],
            d_b: [50.0, 30.0],
            radius_m: 5.0,
        }
    }
}

impl TopologySpec {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: [f64; 2]| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !pos(self.d_f) {
            return Err(config_err("topology.d_f", "distances must be > 0"));
        }
        if !pos(self.d_b) {
            return Err(config_err("topology.d_b", "distances must be > 0"));
        }
        if !(self.radius_m.is_finite() && self.radius_m > 0.0) {
            return Err(config_err("topology.radius_m", "must be > 0"));
        }
        Ok(())
    }

    pub fn realize(&self, seed: u64) -> Result<Topology> {
        match self.mode {
            TopologyMode::Fixed => Topology::fixed(self.d_f, self.d_b),
            TopologyMode::Bpp => {
                let field = place_sensors_bpp(2, self.radius_m, [0.0, 0.0], seed)?;
                Topology::fixed([field.d_f(0), field.d_f(1)], self.d_b)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            variable: SweepVar::PCeDbm,
            start: 0.0,
            stop: 40.0,
            step: 2.0,
            trials: 500,
            seed: 0,
            algorithms: vec![Algorithm::Ocetp, Algorithm::Aobws],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !(finite && self.step > 0.0 && self.start <= self.stop) {
            return Err(config_err("sweep.step", "need start <= stop and step > 0"));
        }
        if self.trials == 0 {
            return Err(config_err("sweep.trials", "must be >= 1"));
        }
        if self.algorithms.is_empty() {
            return Err(config_err(
                "sweep.algorithms",
                "select at least one algorithm",
            ));
        }
        Ok(())
    }

    /// `start, start + step, …` up to `stop`, each computed from its index.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }

    /// Seed of trial `trial`. The same trial sees the same fading at every
    /// sweep value.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

/// ES grid resolution. Power steps are `P_max / power_points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EsSettings {
    pub power_points: usize,
    pub gamma_step: f64,
}

impl Default for EsSettings {
    fn default() -> Self {
        EsSettings {
            power_points: 400,
            gamma_step: 0.005,
        }
    }
}

impl EsSettings {
    /// Resolution used by figure presets unless the config sets `[es]`.
    pub fn figure_default() -> Self {
        EsSettings {
            power_points: 100,
            gamma_step: 0.02,
        }
    }

    pub fn to_config(self, params: &SystemParams, p_fixed_w: Option<f64>) -> EsConfig {
        EsConfig {
            p_fixed_w,
            ..EsConfig::with_resolution(params, self.power_points, self.gamma_step)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Config {
    pub params: SystemParams,
    pub topology: TopologySpec,
    pub sweep: SweepSpec,
    /// `None` when the file has no `[es]` table.
    pub es: Option<EsSettings>,
}

fn config_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

#[derive(Default, Deserialize)]
struct RawConfig {
    bw_hz: Option<f64>,
    noise_dbm: Option<f64>,
    p_max_dbm: Option<f64>,
    xi: Option<f64>,
    kappa: Option<[f64; 2]>,
    p_c_ce_w: Option<f64>,
    p_c_rsu_w: Option<f64>,
    p_c_rs_dbm: Option<f64>,
    r_min: Option<f64>,
    alpha: Option<f64>,
    rho: Option<f64>,
    t_t: Option<[f64; 2]>,
    t_h: Option<[f64; 2]>,
    gamma_init: Option<[f64; 2]>,
    theta: Option<f64>,
    p_gap_w: Option<f64>,
    nu: Option<f64>,
    step_sizes: Option<[f64; 5]>,
    i_max: Option<usize>,
    delta_max: Option<f64>,
    ao_rounds: Option<usize>,
    topology: Option<RawTopology>,
    sweep: Option<RawSweep>,
    es: Option<RawEs>,
}

#[derive(Default, Deserialize)]
struct RawTopology {
    mode: Option<TopologyMode>,
    d_f: Option<[f64; 2]>,
    d_b: Option<[f64; 2]>,
    radius_m: Option<f64>,
}

#[derive(Default, Deserialize)]
struct RawSweep {
    variable: Option<SweepVar>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    algorithms: Option<Vec<Algorithm>>,
}

#[derive(Default, Deserialize)]
struct RawEs {
    power_points: Option<usize>,
    gamma_step: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Parses config text; see the module docs for the layout.
pub fn parse_config(text: &str) -> Result<Config> {
    let de = toml::Deserializer::parse(text).map_err(|e| config_err("", e.to_string().trim()))?;
    let mut unknown = Vec::new();
    // optional tables show up as `?` segments in the path
    let raw: RawConfig =
        serde_ignored::deserialize(de, |path| unknown.push(path.to_string().replace(".?", "")))
            .map_err(|e: toml::de::Error| config_err("", e.to_string().trim()))?;
    if let Some(key) = unknown.into_iter().next() {
        return Err(config_err(&key, "unknown key"));
    }

    let mut p = SystemParams::default();
    set(&mut p.bw_hz, raw.bw_hz);
    if let Some(n) = raw.noise_dbm {
        p.sigma2_n_w = dbm_to_watts(n);
        p.p_gap_w = 10.0 * p.sigma2_n_w;
    }
    set(&mut p.p_max_w, raw.p_max_dbm.map(dbm_to_watts));
    set(&mut p.xi, raw.xi);
    set(&mut p.kappa, raw.kappa);
    set(&mut p.p_c_ce_w, raw.p_c_ce_w);
    set(&mut p.p_c_rsu_w, raw.p_c_rsu_w);
    set(&mut p.p_c_rs_w, raw.p_c_rs_dbm.map(dbm_to_watts));
    set(&mut p.r_min, raw.r_min);
    set(&mut p.alpha, raw.alpha);
    set(&mut p.rho, raw.rho);
    set(&mut p.t_t, raw.t_t);
    set(&mut p.t_h, raw.t_h);
    set(&mut p.gamma_init, raw.gamma_init);
    p.theta = raw.theta.or(p.theta);
    set(&mut p.p_gap_w, raw.p_gap_w);
    set(&mut p.nu, raw.nu);
    set(&mut p.step_sizes, raw.step_sizes);
    set(&mut p.i_max, raw.i_max);
    set(&mut p.delta_max, raw.delta_max);
    set(&mut p.ao_rounds, raw.ao_rounds);
    p.validate()?;

    let mut topology = TopologySpec::default();
    if let Some(t) = raw.topology {
        set(&mut topology.mode, t.mode);
        set(&mut topology.d_f, t.d_f);
        set(&mut topology.d_b, t.d_b);
        set(&mut topology.radius_m, t.radius_m);
    }
    topology.validate()?;

    let mut sweep = SweepSpec::default();
    if let Some(s) = raw.sweep {
        set(&mut sweep.variable, s.variable);
        set(&mut sweep.start, s.start);
        set(&mut sweep.stop, s.stop);
        set(&mut sweep.step, s.step);
        set(&mut sweep.trials, s.trials);
        set(&mut sweep.seed, s.seed);
        set(&mut sweep.algorithms, s.algorithms);
    }
    sweep.validate()?;

    let es = match raw.es {
        None => None,
        Some(e) => {
            let mut es = EsSettings::default();
            set(&mut es.power_points, e.power_points);
            set(&mut es.gamma_step, e.gamma_step);
            if es.power_points == 0 {
                return Err(config_err("es.power_points", "must be >= 1"));
            }
            es.to_config(&p, None)
                .validate()
                .map_err(|e| config_err("es.gamma_step", e.to_string()))?;
            Some(es)
        }
    };

    Ok(Config {
        params: p,
        topology,
        sweep,
        es,
    })
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// One aggregated line of a sweep. Means cover feasible trials only and are
/// `None` when no trial was feasible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_var: String,
    pub sweep_value: f64,
    /// Algorithm name, followed by `/series` for multi-series figures.
    pub algorithm: String,
    pub mean_ee_bits_hz_j: Option<f64>,
    pub mean_rate: Option<f64>,
    pub mean_pce_w: Option<f64>,
    pub mean_gamma1: Option<f64>,
    pub mean_gamma2: Option<f64>,
    pub feasible_frac: f64,
    pub trials: usize,
    pub mean_iters: Option<f64>,
}

/// Runs one algorithm on one scenario. `p_fixed_w` pins the CE power.
pub fn run_algorithm(
    algorithm: Algorithm,
    channel: &ScenarioChannel,
    params: &SystemParams,
    es: EsSettings,
    p_fixed_w: Option<f64>,
) -> Result<Solution> {
    let sol = match (algorithm, p_fixed_w) {
        (Algorithm::Ocetp, None) => run_ocetp_solution(channel, params)?.1,
        (Algorithm::Ocetp, Some(p)) => Solution::at(p, params.gamma_init, channel, params),
        (Algorithm::Aobws, None) => run_aobws_detailed(channel, params)?.aobws,
        (Algorithm::Aobws, Some(p)) => reflection_at(p, channel, params)?,
        (Algorithm::Es, p) => es_search(channel, params, &es.to_config(params, p))?,
    };
    if !sol.feasible {
        return Err(Error::infeasible(Constraint::NoFeasiblePoint));
    }
    Ok(sol)
}

/// Applies one sweep value to copies of the parameters and topology.
/// Returns the fixed CE power for power sweeps.
fn apply_sweep_value(
    var: SweepVar,
    value: f64,
    params: &SystemParams,
    topology: &TopologySpec,
) -> Result<(SystemParams, TopologySpec, Option<f64>)> {
    let mut p = params.clone();
    let mut t = topology.clone();
    let mut fixed = None;
    match var {
        SweepVar::PCeDbm => {
            let w = dbm_to_watts(value);
            if w > p.p_max_w * (1.0 + 1e-12) {
                return Err(config_err("sweep.stop", "CE power above p_max_dbm"));
            }
            fixed = Some(w.min(p.p_max_w));
        }
        SweepVar::Rho => p.rho = value,
        SweepVar::RMin => p.r_min = value,
        SweepVar::DB => t.d_b = [value, value - (topology.d_b[0] - topology.d_b[1])],
        SweepVar::DF => {
            t.mode = TopologyMode::Fixed;
            t.d_f = [value, value - (topology.d_f[0] - topology.d_f[1])];
        }
    }
    p.validate()
        .map_err(|e| config_err(&format!("sweep ({var} = {value})"), e.to_string()))?;
    t.validate()
        .map_err(|e| config_err(&format!("sweep ({var} = {value})"), e.to_string()))?;
    Ok((p, t, fixed))
}

/// Sum by recursive halving, so rounding grows with `log n`.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn mean_of(sols: &[&Solution], f: impl Fn(&Solution) -> f64) -> Option<f64> {
    if sols.is_empty() {
        return None;
    }
    let xs: Vec<f64> = sols.iter().map(|s| f(s)).collect();
    Some(pairwise_sum(&xs) / xs.len() as f64)
}

fn aggregate(
    var: SweepVar,
    value: f64,
    label: String,
    results: &[Option<Solution>],
    iterative: bool,
) -> SweepRow {
    let ok: Vec<&Solution> = results.iter().flatten().collect();
    SweepRow {
        sweep_var: var.to_string(),
        sweep_value: value,
        algorithm: label,
        mean_ee_bits_hz_j: mean_of(&ok, |s| s.ee),
        mean_rate: mean_of(&ok, |s| s.rate),
        mean_pce_w: mean_of(&ok, |s| s.p_ce_w),
        mean_gamma1: mean_of(&ok, |s| s.gamma[0]),
        mean_gamma2: mean_of(&ok, |s| s.gamma[1]),
        feasible_frac: ok.len() as f64 / results.len() as f64,
        trials: results.len(),
        mean_iters: if iterative {
            mean_of(&ok, |s| s.iterations as f64)
        } else {
            None
        },
    }
}

/// Monte Carlo sweep. Trials run in parallel; rows come out ordered by
/// sweep value, then algorithm name, and do not depend on the thread count.
/// Infeasible trials are counted, not averaged; other errors abort.
pub fn run_sweep(
    spec: &SweepSpec,
    params: &SystemParams,
    topology: &TopologySpec,
    es: EsSettings,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let values = spec.values();
    let setups = values
        .iter()
        .map(|&v| apply_sweep_value(spec.variable, v, params, topology))
        .collect::<Result<Vec<_>>>()?;
    let mut algorithms = spec.algorithms.clone();
    algorithms.sort_by_key(|a| a.to_string());
    algorithms.dedup();

    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|i| (0..spec.trials).map(move |t| (i, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(i, t)| {
            let (p, topo, fixed) = &setups[i];
            let seed = spec.trial_seed(t);
            let channel = ScenarioChannel::draw(&topo.realize(seed)?, p, seed)?;
            algorithms
                .iter()
                .map(|&a| match run_algorithm(a, &channel, p, es, *fixed) {
                    Ok(s) => Ok(Some(s)),
                    Err(e) if e.is_infeasible() => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(values.len() * algorithms.len());
    for (i, &value) in values.iter().enumerate() {
        let block = &outcomes[i * spec.trials..(i + 1) * spec.trials];
        for (j, &a) in algorithms.iter().enumerate() {
            let results: Vec<Option<Solution>> = block.iter().map(|r| r[j].clone()).collect();
            let iterative = a != Algorithm::Es && setups[i].2.is_none();
            rows.push(aggregate(
                spec.variable,
                value,
                a.to_string(),
                &results,
                iterative,
            ));
        }
    }
    Ok(rows)
}

/// One curve family of a figure preset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    /// Appended to the algorithm column as `algorithm/label`; empty for
    /// single-series figures.
    pub label: String,
    pub params: SystemParams,
    pub topology: TopologySpec,
    pub spec: SweepSpec,
}

pub const FIGURES: [u8; 6] = [3, 4, 5, 6, 7, 8];

/// Sweep recipes behind each figure, built on top of `base`. Trial count
/// and seed come from `base.sweep`.
pub fn figure_series(figure: u8, base: &Config) -> Result<Vec<Series>> {
    let sweep = |variable, start, stop, step, algorithms: &[Algorithm]| SweepSpec {
        variable,
        start,
        stop,
        step,
        trials: base.sweep.trials,
        seed: base.sweep.seed,
        algorithms: algorithms.to_vec(),
    };
    let one = |spec: SweepSpec, topology: TopologySpec| Series {
        label: String::new(),
        params: base.params.clone(),
        topology,
        spec,
    };
    let fixed = TopologySpec {
        mode: TopologyMode::Fixed,
        ..base.topology.clone()
    };
    let rhos = [0.001, 0.005, 0.009];
    let rho_series = |spec: &SweepSpec, topology: &TopologySpec| {
        rhos.iter()
            .map(|&rho| Series {
                label: format!("rho={rho}"),
                params: SystemParams {
                    rho,
                    ..base.params.clone()
                },
                topology: topology.clone(),
                spec: spec.clone(),
            })
            .collect::<Vec<_>>()
    };
    use Algorithm::*;
    use SweepVar::*;
    let p_top = crate::params::watts_to_dbm(base.params.p_max_w);
    Ok(match figure {
        3 => vec![one(sweep(PCeDbm, 0.0, p_top, 2.0, &[Ocetp, Aobws]), fixed)],
        4 => vec![one(sweep(Rho, 0.001, 0.009, 0.004, &[Ocetp]), fixed)],
        5 => rho_series(&sweep(PCeDbm, 0.0, p_top, 2.0, &[Aobws]), &fixed),
        6 => [[50.0, 30.0], [40.0, 20.0]]
            .iter()
            .map(|&d_b| Series {
                label: format!("d_b={}/{}", d_b[0], d_b[1]),
                params: base.params.clone(),
                topology: TopologySpec {
                    d_b,
                    ..fixed.clone()
                },
                spec: sweep(Rho, 0.001, 0.009, 0.001, &[Aobws, Es]),
            })
            .collect(),
        7 => [[3.0, 2.0], [5.0, 4.0]]
            .iter()
            .map(|&d_f| Series {
                label: format!("d_f={}/{}", d_f[0], d_f[1]),
                params: base.params.clone(),
                topology: TopologySpec {
                    d_f,
                    ..fixed.clone()
                },
                spec: sweep(Rho, 0.001, 0.009, 0.001, &[Aobws, Es]),
            })
            .collect(),
        8 => {
            let topology = TopologySpec {
                d_f: [10.0, 5.0],
                d_b: [50.0, 30.0],
                ..fixed.clone()
            };
            rho_series(&sweep(RMin, 0.1, 1.0, 0.1, &[Aobws]), &topology)
        }
        _ => {
            return Err(Error::invalid(format!(
                "unknown figure {figure}; expected one of {FIGURES:?}"
            )))
        }
    })
}

/// Runs every series of a figure preset and merges the rows, ordered by
/// sweep value and then by the algorithm column.
pub fn run_figure(figure: u8, base: &Config) -> Result<Vec<SweepRow>> {
    let es = base.es.unwrap_or_else(EsSettings::figure_default);
    let mut rows = Vec::new();
    for series in figure_series(figure, base)? {
        for mut row in run_sweep(&series.spec, &series.params, &series.topology, es)? {
            if !series.label.is_empty() {
                row.algorithm = format!("{}/{}", row.algorithm, series.label);
            }
            rows.push(row);
        }
    }
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then_with(|| a.algorithm.cmp(&b.algorithm))
    });
    Ok(rows)
}

/// `x` rounded to 9 significant digits, printed without trailing zeros.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

pub const CSV_HEADER: [&str; 11] = [
    "sweep_var",
    "sweep_value",
    "algorithm",
    "mean_ee_bits_hz_j",
    "mean_rate",
    "mean_pce_w",
    "mean_gamma1",
    "mean_gamma2",
    "feasible_frac",
    "trials",
    "mean_iters",
];

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let opt = |x: Option<f64>| x.map(format_sig9).unwrap_or_default();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.sweep_var.clone(),
            format_sig9(r.sweep_value),
            r.algorithm.clone(),
            opt(r.mean_ee_bits_hz_j),
            opt(r.mean_rate),
            opt(r.mean_pce_w),
            opt(r.mean_gamma1),
            opt(r.mean_gamma2),
            format_sig9(r.feasible_frac),
            r.trials.to_string(),
            opt(r.mean_iters),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Scenario used by the single-shot commands.
pub fn draw_scenario(config: &Config, seed: u64) -> Result<ScenarioChannel> {
    let topology = config.topology.realize(seed)?;
    ScenarioChannel::draw(&topology, &config.params, seed)
}
