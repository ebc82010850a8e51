//! Command-line front end: reproduces every table and figure dataset of the
//! engine as deterministic CSV or JSON.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pnpe::analytic::{self, LossParams, MeasurementSettings, PathStateKind, SourceParams};
use pnpe::metrics::{self, DiMetrics, ProtocolVariant};
use pnpe::optimize::{
    maximize_chsh, maximize_generic_chsh, sweep_eta, threshold_scan, OptimizationProblem,
    ScanObjective,
};
use pnpe::par::pmap;
use pnpe::protocol::{measure_chsh_sim, ProtocolParams};
use pnpe::reference::{EBERHARD_LIMIT, SPPE_THRESHOLD, TABLE_S1};

use config::{ConfigError, RunConfig};
use output::{Cell, Format, Table};

const EXIT_CONFIG: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "pnpe", version, about = "Heralded path-entanglement Bell-protocol engine")]
struct Cli {
    /// Flat key=value config file (section-prefixed keys, e.g. source.g).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for all randomized restarts (overrides optimizer.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Per-mode Fock-space photon-number cutoff for simulated values.
    #[arg(long, global = true, default_value_t = 6)]
    cutoff: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reference-table regression: analytic and simulated CHSH per row.
    TableS1 {
        /// Restrict to the row at this detection efficiency.
        #[arg(long)]
        eta: Option<f64>,
        /// Re-optimize each row and report the recovered optimum.
        #[arg(long)]
        verify_optimizer: bool,
    },
    /// Optimal CHSH violation versus symmetric detection efficiency.
    SweepEta,
    /// Success probability of the three protocol variants versus eta_C.
    SuccessProb,
    /// Device-independent metrics per protocol family over the eta_D grid.
    DiMetrics,
    /// Correlated vs anticorrelated family optima and loss thresholds.
    CompareStates {
        /// Also emit a simulated (eta_H, S) scan at fixed eta_D = 0.75.
        #[arg(long)]
        eta_h_grid: bool,
    },
    /// Single CHSH maximization at one detection efficiency.
    Optimize {
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cli, &cfg) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

enum Failure {
    Config(ConfigError),
    Engine(pnpe::Error),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<pnpe::Error> for Failure {
    fn from(e: pnpe::Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.optimizer_seed = seed;
    }
    Ok(cfg)
}

fn problem(cli: &Cli, cfg: &RunConfig, eta_d: f64) -> OptimizationProblem {
    let mut p = OptimizationProblem::new(eta_d);
    p.restarts = cfg.optimizer_restarts;
    p.seed = cfg.optimizer_seed;
    p.cutoff = cli.cutoff;
    p
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<ExitCode, Failure> {
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let (name, table, code) = match &cli.command {
        Command::TableS1 {
            eta,
            verify_optimizer,
        } => cmd_table_s1(cli, cfg, *eta, *verify_optimizer)?,
        Command::SweepEta => cmd_sweep_eta(cli, cfg)?,
        Command::SuccessProb => cmd_success_prob(cfg)?,
        Command::DiMetrics => cmd_di_metrics(cli, cfg)?,
        Command::CompareStates { eta_h_grid } => cmd_compare_states(cli, cfg, *eta_h_grid)?,
        Command::Optimize { eta } => cmd_optimize(cli, cfg, *eta)?,
    };
    table.write(format, name, &cfg.resolved(), cli.out.as_deref())?;
    Ok(code)
}

fn cmd_table_s1(
    cli: &Cli,
    cfg: &RunConfig,
    eta: Option<f64>,
    verify: bool,
) -> Result<(&'static str, Table, ExitCode), Failure> {
    let mut columns = vec![
        "eta_D", "t_b", "g", "alpha1", "alpha2", "beta1", "beta2", "s_analytic", "s_simulated",
        "s_ref", "delta",
    ];
    let mut units = vec![
        "1", "intensity", "rad", "sqrt(photon)", "sqrt(photon)", "sqrt(photon)", "sqrt(photon)",
        "1", "1", "1", "1",
    ];
    if verify {
        columns.push("s_optimized");
        units.push("1");
    }
    let mut table = Table::new(columns, units);
    let rows: Vec<_> = TABLE_S1
        .iter()
        .filter(|r| eta.map_or(true, |e| (r.eta_d - e).abs() < 1e-9))
        .collect();
    if rows.is_empty() {
        return Err(ConfigError(format!(
            "--eta {} matches no reference row",
            eta.unwrap()
        ))
        .into());
    }
    let mut regression_ok = true;
    let results: Vec<(f64, f64, Option<f64>)> = pmap(rows.clone(), |row| {
        let src = SourceParams::simple(row.g, row.t_b_intensity()).expect("reference row");
        let settings = MeasurementSettings::new(row.alpha1, row.alpha2, row.beta1, row.beta2)
            .expect("reference row");
        let s_analytic = analytic::chsh(&src, row.eta_d, &settings)
            .map(|r| r.s)
            .unwrap_or(f64::NAN);
        let loss = LossParams::detection_only(row.eta_d).expect("reference row");
        let s_sim = ProtocolParams::new(src, loss, cli.cutoff)
            .and_then(|p| measure_chsh_sim(&p, &settings, row.eta_d))
            .map(|r| r.s)
            .unwrap_or(f64::NAN);
        let s_opt = verify.then(|| {
            maximize_chsh(&problem(cli, cfg, row.eta_d))
                .map(|r| r.s)
                .unwrap_or(f64::NAN)
        });
        (s_analytic, s_sim, s_opt)
    });
    for (row, (s_analytic, s_sim, s_opt)) in rows.iter().zip(results) {
        let delta = (s_sim - row.s).abs();
        if !(delta <= 1e-3) {
            regression_ok = false;
        }
        let mut cells = vec![
            Cell::Num(row.eta_d),
            Cell::Num(row.t_b_intensity()),
            Cell::Num(row.g),
            Cell::Num(row.alpha1),
            Cell::Num(row.alpha2),
            Cell::Num(row.beta1),
            Cell::Num(row.beta2),
            Cell::Num(s_analytic),
            Cell::Num(s_sim),
            Cell::Num(row.s),
            Cell::Num(delta),
        ];
        if let Some(s) = s_opt {
            if !(s >= row.s - 1e-3) {
                regression_ok = false;
            }
            cells.push(Cell::Num(s));
        }
        table.push(cells);
    }
    let code = if regression_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_THRESHOLD)
    };
    Ok(("table-s1", table, code))
}

fn cmd_sweep_eta(cli: &Cli, cfg: &RunConfig) -> Result<(&'static str, Table, ExitCode), Failure> {
    let grid = cfg.eta_grid()?;
    let template = problem(cli, cfg, 1.0);
    let reports = sweep_eta(&template, &grid, true)?;
    let mut table = Table::new(
        vec![
            "eta_D",
            "s_optimal",
            "s_classical",
            "threshold_psi",
            "threshold_eberhard",
        ],
        vec!["1", "1", "1", "1", "1"],
    );
    for (eta, report) in grid.iter().zip(reports) {
        table.push(vec![
            Cell::Num(*eta),
            Cell::Num(report.s),
            Cell::Num(2.0),
            Cell::Num(SPPE_THRESHOLD),
            Cell::Num(EBERHARD_LIMIT),
        ]);
    }
    Ok(("sweep-eta", table, ExitCode::SUCCESS))
}

fn cmd_success_prob(cfg: &RunConfig) -> Result<(&'static str, Table, ExitCode), Failure> {
    let grid = cfg.eta_c_grid()?;
    let lambda = cfg.source_g.tanh();
    let tmsv = ProtocolVariant::TwoTmsv { lambda };
    let sppe = ProtocolVariant::TwoSppe {
        lambda,
        t: cfg.metrics_t,
    };
    let hybrid = ProtocolVariant::Hybrid {
        lambda,
        t_b: cfg.source_t_b,
    };
    if let Some(w) = sppe.regime_warning() {
        eprintln!("warning: {w}");
    }
    let p = |v: &ProtocolVariant, eta_c: f64| metrics::variant_success_probability(v, eta_c);
    let mut table = Table::new(
        vec!["eta_C", "p_two_tmsv", "p_hybrid", "p_two_sppe", "slope_hybrid"],
        vec!["1", "1/pulse", "1/pulse", "1/pulse", "dlnP/dlneta"],
    );
    for (i, &eta_c) in grid.iter().enumerate() {
        // Centered log-log slope of the hybrid curve (one-sided at edges).
        let (lo, hi) = (
            if i == 0 { i } else { i - 1 },
            if i + 1 == grid.len() { i } else { i + 1 },
        );
        let slope = (p(&hybrid, grid[hi])?.ln() - p(&hybrid, grid[lo])?.ln())
            / (grid[hi].ln() - grid[lo].ln());
        table.push(vec![
            Cell::Num(eta_c),
            Cell::Num(p(&tmsv, eta_c)?),
            Cell::Num(p(&hybrid, eta_c)?),
            Cell::Num(p(&sppe, eta_c)?),
            Cell::Num(slope),
        ]);
    }
    Ok(("success-prob", table, ExitCode::SUCCESS))
}

fn cmd_di_metrics(cli: &Cli, cfg: &RunConfig) -> Result<(&'static str, Table, ExitCode), Failure> {
    let grid = cfg.eta_grid()?;
    let rate = cfg.metrics_repetition_rate;
    let hybrid: Vec<f64> = sweep_eta(&problem(cli, cfg, 1.0), &grid, true)?
        .into_iter()
        .map(|r| r.s)
        .collect();
    let psi: Vec<f64> = pmap(grid.clone(), |eta| {
        maximize_generic_chsh(
            PathStateKind::AntiCorrelated,
            eta,
            cfg.optimizer_seed,
            cfg.optimizer_restarts,
        )
        .s
    });
    let mut table = Table::new(
        vec!["family", "eta_D", "s", "h_min", "chi_max", "rate_lower_bound"],
        vec!["name", "1", "1", "bit", "bit", "bit/s"],
    );
    for (family, series) in [("hybrid", &hybrid), ("psi-sppe", &psi)] {
        for (eta, &s) in grid.iter().zip(series) {
            let m = DiMetrics::from_s(s, rate)?;
            table.push(vec![
                Cell::Str(family.into()),
                Cell::Num(*eta),
                Cell::Num(s),
                Cell::Num(m.h_min),
                Cell::Num(m.chi_max),
                Cell::Num(m.rate_lower_bound),
            ]);
        }
    }
    Ok(("di-metrics", table, ExitCode::SUCCESS))
}

fn cmd_compare_states(
    cli: &Cli,
    cfg: &RunConfig,
    eta_h_grid: bool,
) -> Result<(&'static str, Table, ExitCode), Failure> {
    let mut table = Table::new(vec!["record", "eta", "s"], vec!["name", "1", "1"]);
    let seed = cfg.optimizer_seed;
    let restarts = cfg.optimizer_restarts;
    for (record, kind) in [
        ("phi-optimum", PathStateKind::Correlated),
        ("psi-optimum", PathStateKind::AntiCorrelated),
    ] {
        let opt = maximize_generic_chsh(kind, 1.0, seed, restarts);
        table.push(vec![Cell::Str(record.into()), Cell::Num(1.0), Cell::Num(opt.s)]);
    }
    for (record, kind) in [
        ("phi-threshold", PathStateKind::Correlated),
        ("psi-threshold", PathStateKind::AntiCorrelated),
    ] {
        let eta = threshold_scan(
            &ScanObjective::Generic {
                kind,
                seed,
                restarts,
            },
            1e-3,
        )?;
        table.push(vec![Cell::Str(record.into()), Cell::Num(eta), Cell::Num(2.0)]);
    }
    if eta_h_grid {
        // Simulated heralding-loss scan: reference row-5 displacements at
        // eta_D = 0.75, source re-tuned to the same state ratio at small
        // gain so the epsilon-noise admixture stays negligible.
        let row = &TABLE_S1[4];
        let ratio = row.g.tanh() * ((1.0 - row.t_b_intensity()) / row.t_b_intensity()).sqrt();
        let g: f64 = 0.05;
        let r = ratio / g.tanh();
        let t_b = 1.0 / (1.0 + r * r);
        let settings =
            MeasurementSettings::new(row.alpha1, row.alpha2, row.beta1, row.beta2)
                .expect("reference row");
        let etas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let scan: Vec<pnpe::Result<f64>> = pmap(etas.clone(), |eta_h| {
            let src = SourceParams::simple(g, t_b)?;
            let loss = LossParams::symmetric(eta_h, row.eta_d)?;
            let params = ProtocolParams::new(src, loss, cli.cutoff)?;
            Ok(measure_chsh_sim(&params, &settings, row.eta_d)?.s)
        });
        for (eta_h, s) in etas.into_iter().zip(scan) {
            table.push(vec![
                Cell::Str("eta-h-scan".into()),
                Cell::Num(eta_h),
                Cell::Num(s?),
            ]);
        }
    }
    Ok(("compare-states", table, ExitCode::SUCCESS))
}

fn cmd_optimize(
    cli: &Cli,
    cfg: &RunConfig,
    eta: f64,
) -> Result<(&'static str, Table, ExitCode), Failure> {
    let report = maximize_chsh(&problem(cli, cfg, eta))?;
    let mut table = Table::new(
        vec![
            "eta_D",
            "s",
            "t_b",
            "g",
            "alpha1",
            "alpha2",
            "beta1",
            "beta2",
            "evaluations",
            "restarts",
            "seed",
        ],
        vec![
            "1",
            "1",
            "intensity",
            "rad",
            "sqrt(photon)",
            "sqrt(photon)",
            "sqrt(photon)",
            "sqrt(photon)",
            "count",
            "count",
            "seed",
        ],
    );
    table.push(vec![
        Cell::Num(eta),
        Cell::Num(report.s),
        Cell::Num(report.src.t_b),
        Cell::Num(report.src.g()),
        Cell::Num(report.settings.alpha1),
        Cell::Num(report.settings.alpha2),
        Cell::Num(report.settings.beta1),
        Cell::Num(report.settings.beta2),
        Cell::Int(report.evaluations as u64),
        Cell::Int(report.restarts_used as u64),
        Cell::Int(report.seed),
    ]);
    Ok(("optimize", table, ExitCode::SUCCESS))
}
