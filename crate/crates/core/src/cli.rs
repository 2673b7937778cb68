//! Command line front end. Every command writes one CSV table.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::{evolve, mc_evolve, negativity_at, trajectory, EnvTopology, EvolutionParams};
use crate::error::Error;
use crate::processes::{ProcessSpec, SeededRng, TimeGrid};
use crate::states::BellMixture;
use crate::timescales::{
    preserving_time, scatter_study, survival_time, SurvivalOutcome, ThresholdRatio,
};

#[derive(Debug, Parser)]
#[command(
    name = "dephasing",
    version,
    about = "Two-qubit dephasing under classical Gaussian noise; all output is CSV"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Negativity against time: `t,negativity`.
    Curve(RunConfig),
    /// Bloch coordinates and negativity against time: `t,a1,a2,a3,negativity`.
    Trajectory(RunConfig),
    /// Entanglement-preserving time: `N0,value,outcome`.
    Tstar(RunConfig),
    /// Entanglement-survival time: `N0,value,outcome`.
    Tes(RunConfig),
    /// Timescales and their lower bounds for random entangled mixtures.
    Scatter(RunConfig),
    /// Monte Carlo average against the analytic state: `t,max_abs_error,budget,pass`.
    McValidate(RunConfig),
    /// Preserving time against gamma (ou) or H (fgn): `param,tstar`.
    Sweep(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvArg {
    Indep,
    Common,
}

impl From<EnvArg> for EnvTopology {
    fn from(e: EnvArg) -> Self {
        match e {
            EnvArg::Indep => EnvTopology::Independent,
            EnvArg::Common => EnvTopology::Common,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Noise process: `ou:gamma=G`, `fgn:h=H`, `wiener` or `white`.
    #[arg(long, default_value = "ou:gamma=1")]
    pub process: ProcessSpec,

    #[arg(long, value_enum, default_value = "indep")]
    pub env: EnvArg,

    /// `phi+`, `phi-`, `psi+`, `psi-`, `mixed` or `c=c1,c2,c3,c4`.
    #[arg(long, default_value = "phi+")]
    pub state: BellMixture,

    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,

    /// Fraction of the initial negativity defining the preserving time.
    #[arg(long, short = 'r', default_value_t = 0.99)]
    pub ratio: f64,

    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,

    /// Rows of time-resolved and sweep output, end points included.
    #[arg(long, default_value_t = 200)]
    pub n_points: usize,

    /// Noise realizations per Monte Carlo estimate.
    #[arg(long, default_value_t = 10_000)]
    pub mc_samples: usize,

    /// Quadrature nodes per unit time for Monte Carlo phases.
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_GRID_DENSITY)]
    pub grid_density: usize,

    /// Explicit Monte Carlo times, replacing the uniform grid.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,

    /// Random mixtures drawn by `scatter`.
    #[arg(long, default_value_t = 1000)]
    pub n_states: usize,

    /// Sweep range; defaults to [1e-2, 1e2] (log) for gamma, [0.05, 0.95] for H.
    #[arg(long)]
    pub param_min: Option<f64>,

    #[arg(long)]
    pub param_max: Option<f64>,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads; output does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Write to this file instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

impl Command {
    pub fn config(&self) -> &RunConfig {
        match self {
            Self::Curve(c)
            | Self::Trajectory(c)
            | Self::Tstar(c)
            | Self::Tes(c)
            | Self::Scatter(c)
            | Self::McValidate(c)
            | Self::Sweep(c) => c,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot build thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Formats with at most 15 significant digits and no trailing zeros.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.14e}")
        .parse()
        .expect("round trip of formatted float");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn num(x: f64) -> String {
    format_number(x)
}

impl RunConfig {
    fn params(&self) -> Result<EvolutionParams, CliError> {
        Ok(EvolutionParams::new(
            self.process,
            self.env.into(),
            self.lambda,
            self.omega0,
        )?)
    }

    fn ratio(&self) -> Result<ThresholdRatio, CliError> {
        Ok(ThresholdRatio::new(self.ratio)?)
    }

    fn time_grid(&self) -> Result<TimeGrid, CliError> {
        if self.n_points < 2 {
            return Err(CliError::Config(format!(
                "--n-points must be at least 2, got {}",
                self.n_points
            )));
        }
        Ok(TimeGrid::new(self.t_max, self.n_points - 1)?)
    }
}

/// Runs a command, honoring `--threads`, and returns the CSV text.
pub fn run(command: &Command) -> Result<String, CliError> {
    match command.config().threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| execute(command))
        }
        None => execute(command),
    }
}

fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Curve(cfg) => cmd_curve(cfg),
        Command::Trajectory(cfg) => cmd_trajectory(cfg),
        Command::Tstar(cfg) => cmd_tstar(cfg),
        Command::Tes(cfg) => cmd_tes(cfg),
        Command::Scatter(cfg) => cmd_scatter(cfg),
        Command::McValidate(cfg) => cmd_mc_validate(cfg),
        Command::Sweep(cfg) => cmd_sweep(cfg),
    }
}

pub fn cmd_curve(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let mut out = String::from("t,negativity\n");
    for t in cfg.time_grid()?.nodes() {
        let n = negativity_at(&cfg.state, &p, t)?;
        push_row(&mut out, &[num(t), num(n)]);
    }
    Ok(out)
}

pub fn cmd_trajectory(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let mut out = String::from("t,a1,a2,a3,negativity\n");
    for pt in trajectory(&cfg.state, &p, &cfg.time_grid()?)? {
        let [a1, a2, a3] = pt.bloch.components();
        push_row(
            &mut out,
            &[num(pt.t), num(a1), num(a2), num(a3), num(pt.negativity)],
        );
    }
    Ok(out)
}

fn single_outcome(n0: f64, outcome: SurvivalOutcome) -> String {
    let mut out = String::from("N0,value,outcome\n");
    push_row(
        &mut out,
        &[num(n0), num(outcome.time_or_inf()), outcome.label().into()],
    );
    out
}

pub fn cmd_tstar(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let outcome = preserving_time(&cfg.state, p.spec(), p.lambda(), cfg.ratio()?, p.env())?;
    Ok(single_outcome(cfg.state.initial_negativity(), outcome))
}

pub fn cmd_tes(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let outcome = survival_time(&cfg.state, p.spec(), p.lambda(), p.env())?;
    Ok(single_outcome(cfg.state.initial_negativity(), outcome))
}

pub fn cmd_scatter(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let rows = scatter_study(
        cfg.n_states,
        p.spec(),
        p.lambda(),
        p.env(),
        cfg.ratio()?,
        &SeededRng::new(cfg.seed),
    )?;
    let mut out = String::from("c1,c2,c3,c4,N0,tstar,tes_outcome,tes,tstar_bound,tes_bound\n");
    for row in rows {
        let mut cells: Vec<String> = row.mixture.weights().iter().map(|&c| num(c)).collect();
        cells.extend([
            num(row.n0),
            num(row.preserving.time_or_inf()),
            row.survival.label().into(),
            num(row.survival.time_or_inf()),
            num(row.tstar_bound),
            num(row.tes_bound.unwrap_or(f64::INFINITY)),
        ]);
        push_row(&mut out, &cells);
    }
    Ok(out)
}

/// Largest element-wise modulus of the difference between the Monte Carlo
/// and analytic states at each time. Every time uses the same seed.
pub fn cmd_mc_validate(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let times: Vec<f64> = match &cfg.times {
        Some(ts) => ts.clone(),
        None => cfg.time_grid()?.nodes().collect(),
    };
    let budget = 4.0 / (cfg.mc_samples as f64).sqrt();
    let rng = SeededRng::new(cfg.seed);
    let mut out = String::from("t,max_abs_error,budget,pass\n");
    for t in times {
        let mc = mc_evolve(&cfg.state, &p, t, cfg.mc_samples, cfg.grid_density, &rng)?;
        let exact = evolve(&cfg.state, &p, t)?;
        let mut err: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                err = err.max((mc.get(i, j) - exact.get(i, j)).norm());
            }
        }
        push_row(
            &mut out,
            &[num(t), num(err), num(budget), (err <= budget).to_string()],
        );
    }
    Ok(out)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.n_points < 2 {
        return Err(CliError::Config(format!(
            "--n-points must be at least 2, got {}",
            cfg.n_points
        )));
    }
    let ratio = cfg.ratio()?;
    let env: EnvTopology = cfg.env.into();
    let last = (cfg.n_points - 1) as f64;
    let lerp = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / last;

    let mut points: Vec<(f64, ProcessSpec)> = Vec::with_capacity(cfg.n_points);
    match cfg.process {
        ProcessSpec::OrnsteinUhlenbeck { .. } => {
            let lo = cfg.param_min.unwrap_or(1e-2);
            let hi = cfg.param_max.unwrap_or(1e2);
            if !(lo > 0.0 && hi > 0.0) {
                return Err(CliError::Config(
                    "gamma sweep range must be positive".into(),
                ));
            }
            for k in 0..cfg.n_points {
                let gamma = lerp(lo.ln(), hi.ln(), k).exp();
                points.push((gamma, ProcessSpec::ornstein_uhlenbeck(gamma)?));
            }
        }
        ProcessSpec::FractionalGaussian { .. } => {
            let lo = cfg.param_min.unwrap_or(0.05);
            let hi = cfg.param_max.unwrap_or(0.95);
            for k in 0..cfg.n_points {
                let h = lerp(lo, hi, k);
                points.push((h, ProcessSpec::fractional_gaussian(h)?));
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "sweep needs an ou or fgn process, got `{other}`"
            )))
        }
    }

    let mut out = String::from("param,tstar\n");
    for (param, spec) in points {
        let t = preserving_time(&cfg.state, spec, cfg.lambda, ratio, env)?;
        push_row(&mut out, &[num(param), num(t.time_or_inf())]);
    }
    Ok(out)
}
