//! Command-line front end: solve one finite model, run a refinement
//! schedule, print analytic oracle values, evaluate a stored policy, or
//! re-emit report formats.
//!
//! Environment: `TEAMQUANT_OUT_DIR` overrides the configured output
//! directory, `TEAMQUANT_THREADS` pins the worker-thread count (results are
//! identical for any value). Exit codes: 0 success, 2 configuration error,
//! 3 numeric failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use teamquant::evaluator::{
    affine_oracle_witsenhausen, exact_cost, extend_policy, oracle_value, radner_oracle, CostReport,
};
use teamquant::experiments::{
    emit_report, load_reports, run_schedule, ExperimentConfig, ReportFormat, StepReport,
};
use teamquant::finite::{build_finite, SavedPolicy};
use teamquant::quant::{ActionGrid, Quantizer};
use teamquant::solver::{exhaustive_solve, multi_start_solve};
use teamquant::team::{static_reduce, ProblemKind};
use teamquant::{Error, Result};

#[derive(Parser)]
#[command(name = "teamquant", version, about = "Finite-model solver for decentralized stochastic teams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and solve one finite model (config needs a [model] section).
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured refinement schedule and emit reports.
    Refine {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the analytic baseline for the configured problem.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a stored policy (finite, exact, and Monte Carlo costs).
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Policy JSON produced by `solve`/`refine`.
        #[arg(long)]
        policy: PathBuf,
        /// Write the report JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit stored reports in another format.
    Report {
        /// A reports.json produced by `refine`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        format: String,
        /// Output directory (default: alongside the input).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("TEAMQUANT_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                // Ignore failure: the global pool can only be set once.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var("TEAMQUANT_OUT_DIR") {
        Ok(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from(&cfg.output.dir),
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve { config } => solve(&load_config(&config)?),
        Command::Refine { config } => refine(&load_config(&config)?),
        Command::Oracle { config } => oracle(&load_config(&config)?),
        Command::Evaluate {
            config,
            policy,
            out,
        } => evaluate(&load_config(&config)?, &policy, out.as_deref()),
        Command::Report { input, format, dir } => report(&input, &format, dir),
    }
}

fn solve(cfg: &ExperimentConfig) -> Result<()> {
    let model = cfg
        .model
        .ok_or_else(|| Error::Config("solve needs a [model] section".into()))?;
    let problem = cfg.build_problem()?;
    let reduced = static_reduce(&problem)?;
    let q = Quantizer::uniform(model.radius, model.levels)?;
    let g = ActionGrid::new(
        model.action_half_width,
        model.action_points,
        model.nested_grid,
    )?;
    let quantizers = vec![q; problem.num_agents];
    let grids = vec![g; problem.num_agents];
    let fm = build_finite(&reduced, &quantizers, &grids, cfg.evaluation.state_nodes)?;

    let table = if cfg.solver.exhaustive {
        exhaustive_solve(&fm, cfg.solver.enumeration_cap)?.0
    } else {
        multi_start_solve(
            &fm,
            cfg.solver.starts,
            cfg.solver.seed,
            cfg.solver.max_sweeps,
            cfg.solver.tol,
            &[],
        )?
        .0
    };
    let report = certify(cfg, &problem, &fm, &table, &quantizers)?;

    let dir = out_dir(cfg);
    fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let policy_path = dir.join("policy.json");
    let saved = SavedPolicy::new(&table, &quantizers, &grids)?;
    fs::write(&policy_path, saved.to_json()? + "\n").map_err(|e| Error::Io {
        path: policy_path.display().to_string(),
        source: e,
    })?;
    println!(
        "finite {:.9}  exact {}  mc {:.9} +- {:.9}",
        report.finite_cost,
        report
            .exact_cost
            .map(|e| format!("{e:.9}"))
            .unwrap_or_else(|| "n/a".into()),
        report.mc_cost,
        report.mc_half_ci95
    );
    println!("policy written to {}", policy_path.display());
    Ok(())
}

fn certify(
    cfg: &ExperimentConfig,
    problem: &teamquant::team::TeamProblem,
    fm: &teamquant::finite::FiniteTeamModel,
    table: &teamquant::finite::PolicyTable,
    quantizers: &[Quantizer],
) -> Result<CostReport> {
    let finite_cost = fm.eval_finite_cost(table)?;
    let policy = extend_policy(table, quantizers)?;
    let exact = exact_cost(problem, &policy, cfg.evaluation.state_nodes)?;
    let (mc_cost, mc_half_ci95) =
        problem.mc_cost_dynamic(&policy, cfg.evaluation.mc_samples, cfg.evaluation.seed)?;
    let gap = match (exact, oracle_value(&problem.kind)?) {
        (Some(e), Some(o)) => Some(e - o),
        _ => None,
    };
    Ok(CostReport {
        finite_cost,
        exact_cost: exact,
        mc_cost,
        mc_half_ci95,
        gap,
    })
}

fn refine(cfg: &ExperimentConfig) -> Result<()> {
    let reports = run_schedule(cfg)?;
    for r in &reports {
        println!(
            "step {}  radius {}  n {}  k {}  finite {:.9}  exact {}  mc {:.9}",
            r.step,
            r.radius,
            r.levels,
            r.action_points,
            r.report.finite_cost,
            r.report
                .exact_cost
                .map(|e| format!("{e:.9}"))
                .unwrap_or_else(|| "n/a".into()),
            r.report.mc_cost
        );
    }
    let formats: Vec<ReportFormat> = cfg
        .output
        .formats
        .iter()
        .map(|f| ReportFormat::parse(f))
        .collect::<Result<_>>()?;
    let dir = out_dir(cfg);
    let paths = emit_report(&reports, &formats, &dir)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn oracle(cfg: &ExperimentConfig) -> Result<()> {
    let problem = cfg.build_problem()?;
    match &problem.kind {
        ProblemKind::Witsenhausen { weight } => {
            let (lambda, j) = affine_oracle_witsenhausen(*weight)?;
            println!("affine oracle: lambda* {lambda:.12}  cost {j:.12}");
        }
        ProblemKind::Radner { r } => {
            let (alpha, j) = radner_oracle(*r)?;
            println!("linear oracle: alpha* {alpha:.12}  cost {j:.12}");
        }
        _ => {
            return Err(Error::Config(
                "no analytic oracle is configured for this problem kind".into(),
            ));
        }
    }
    Ok(())
}

fn evaluate(cfg: &ExperimentConfig, policy_path: &Path, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(policy_path).map_err(|e| Error::Io {
        path: policy_path.display().to_string(),
        source: e,
    })?;
    let saved = SavedPolicy::from_json(&text)?;
    let problem = cfg.build_problem()?;
    if saved.agents.len() != problem.num_agents {
        return Err(Error::Config(format!(
            "policy has {} agents, problem has {}",
            saved.agents.len(),
            problem.num_agents
        )));
    }
    let reduced = static_reduce(&problem)?;
    let quantizers = saved.quantizers()?;
    let grids = saved.grids()?;
    let fm = build_finite(&reduced, &quantizers, &grids, cfg.evaluation.state_nodes)?;
    let report = certify(cfg, &problem, &fm, &saved.table(), &quantizers)?;

    #[derive(serde::Serialize)]
    struct EvaluateOutput<'a> {
        config: &'a ExperimentConfig,
        report: &'a CostReport,
    }
    let json = serde_json::to_string_pretty(&EvaluateOutput {
        config: cfg,
        report: &report,
    })
    .map_err(|e| Error::Serde(e.to_string()))?
        + "\n";
    match out {
        Some(path) => fs::write(path, json).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => print!("{json}"),
    }
    Ok(())
}

fn report(input: &Path, format: &str, dir: Option<PathBuf>) -> Result<()> {
    let reports: Vec<StepReport> = load_reports(input)?;
    let fmt = ReportFormat::parse(format)?;
    let dir = dir
        .or_else(|| input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let paths = emit_report(&reports, &[fmt], &dir)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}
