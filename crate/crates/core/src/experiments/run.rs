//! The refinement-schedule runner: build each finite model, solve it, extend
//! the policy, certify it exactly and by Monte Carlo, and collect one report
//! per step.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::evaluator::{exact_cost, extend_policy, oracle_value, CostReport};
use crate::finite::{build_finite, FiniteTeamModel, PolicyTable, SavedPolicy};
use crate::quant::{ActionGrid, Quantizer};
use crate::solver::{exhaustive_solve, multi_start_solve, solver_cost};
use crate::team::static_reduce;
use crate::Result;

use super::config::ExperimentConfig;

/// Everything recorded about one schedule step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub radius: f64,
    pub levels: usize,
    pub action_half_width: f64,
    pub action_points: usize,
    #[serde(flatten)]
    pub report: CostReport,
    /// Sweeps used by the best descent run (0 for exhaustive solves).
    pub sweeps: usize,
    /// Wall-clock per step; 0 unless `output.timing` is set.
    pub wall_ms: u64,
    pub policy: SavedPolicy,
}

/// Per-step Monte Carlo seed: one documented stream family per step.
fn step_seed(base: u64, step: usize) -> u64 {
    base.wrapping_add((step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn solve_one(
    cfg: &ExperimentConfig,
    fm: &FiniteTeamModel,
    warm: Option<&PolicyTable>,
) -> Result<(PolicyTable, usize)> {
    if cfg.solver.exhaustive {
        let (table, _) = exhaustive_solve(fm, cfg.solver.enumeration_cap)?;
        return Ok((table, 0));
    }
    let extra: Vec<PolicyTable> = warm.cloned().into_iter().collect();
    let (table, traces) = multi_start_solve(
        fm,
        cfg.solver.starts,
        cfg.solver.seed,
        cfg.solver.max_sweeps,
        cfg.solver.tol,
        &extra,
    )?;
    let best_cost = solver_cost(fm, &table)?;
    let sweeps = traces
        .iter()
        .find(|t| (t.final_cost() - best_cost).abs() <= 1e-12 * best_cost.abs().max(1.0))
        .map(|t| t.sweeps())
        .unwrap_or(0);
    Ok((table, sweeps))
}

/// Embed the previous step's policy into the new model: every new symbol maps
/// to the coarse policy's action at the symbol's representative, projected to
/// the new grid; the overflow symbol keeps the coarse overflow action (the
/// new overflow region is contained in the old one).
fn lift_table(
    prev: &PolicyTable,
    prev_quantizers: &[Quantizer],
    quantizers: &[Quantizer],
    grids: &[ActionGrid],
) -> PolicyTable {
    let rows = prev
        .rows
        .iter()
        .zip(prev_quantizers)
        .zip(quantizers.iter().zip(grids))
        .map(|((prev_row, pq), (q, g))| {
            let mut row = Vec::with_capacity(q.num_symbols());
            row.push(g.nearest(prev_row[0]));
            for &level in q.levels() {
                let sym = pq.quantize(level).0;
                row.push(g.nearest(prev_row[sym]));
            }
            row
        })
        .collect();
    PolicyTable { rows }
}

/// Run every schedule step: build, solve, extend, certify. A failing step
/// aborts with an error naming the step.
pub fn run_schedule(cfg: &ExperimentConfig) -> Result<Vec<StepReport>> {
    let schedule = cfg
        .schedule
        .as_ref()
        .ok_or_else(|| crate::Error::Config("config has no [schedule] section".into()))?;
    let problem = cfg.build_problem()?;
    let reduced = static_reduce(&problem)?;
    let oracle = oracle_value(&problem.kind)?;

    let mut reports = Vec::with_capacity(schedule.len());
    let mut prev: Option<(PolicyTable, Vec<Quantizer>)> = None;
    for step in 0..schedule.len() {
        let started = Instant::now();
        let radius = schedule.radius[step];
        let levels = schedule.levels[step];
        let half_width = schedule.action_half_width[step];
        let points = schedule.action_points[step];
        let in_step = |e: crate::Error| crate::Error::Step {
            step,
            source: Box::new(e),
        };

        let q = Quantizer::uniform(radius, levels)?;
        let g = ActionGrid::new(half_width, points, true)?;
        let quantizers = vec![q; problem.num_agents];
        let grids = vec![g; problem.num_agents];
        let fm = build_finite(&reduced, &quantizers, &grids, cfg.evaluation.state_nodes)?;

        let warm = match (&prev, cfg.solver.warm_start) {
            (Some((table, pqs)), true) => Some(lift_table(table, pqs, &quantizers, &grids)),
            _ => None,
        };
        let (table, sweeps) = solve_one(cfg, &fm, warm.as_ref()).map_err(in_step)?;

        let finite_cost = fm.eval_finite_cost(&table)?;
        let policy = extend_policy(&table, &quantizers)?;
        let exact = exact_cost(&problem, &policy, cfg.evaluation.state_nodes)?;
        let (mc_cost, mc_half_ci95) = problem.mc_cost_dynamic(
            &policy,
            cfg.evaluation.mc_samples,
            step_seed(cfg.evaluation.seed, step),
        )?;
        let gap = match (exact, oracle) {
            (Some(e), Some(o)) => Some(e - o),
            _ => None,
        };
        let wall_ms = if cfg.output.timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        reports.push(StepReport {
            step,
            radius,
            levels,
            action_half_width: half_width,
            action_points: points,
            report: CostReport {
                finite_cost,
                exact_cost: exact,
                mc_cost,
                mc_half_ci95,
                gap,
            },
            sweeps,
            wall_ms,
            policy: SavedPolicy::new(&table, &quantizers, &grids)?,
        });
        prev = Some((table, quantizers));
    }
    Ok(reports)
}
