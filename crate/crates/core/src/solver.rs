//! Policy-table optimization on finite team models: person-by-person
//! best-response coordinate descent with multi-start, and exhaustive global
//! search at small scale.
//!
//! A best response replaces one agent's row with, per observation symbol, the
//! grid action minimizing the finite cost with everything else held fixed;
//! the per-symbol subproblems decouple because each symbol contributes an
//! additive mass-weighted term. The per-symbol objective is computed by a
//! structured fast path where the cost kernel factorizes (the relay chain,
//! the quadratic static team) and by direct tuple summation otherwise; the
//! fast paths are cross-checked against the direct sum in tests.

use rayon::prelude::*;

use crate::finite::{FiniteTeamModel, PolicyTable};
use crate::gauss::StreamRng;
use crate::team::{gaussian_density_factor, ProblemKind};
use crate::{Error, Result};

/// Why a descent run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Termination {
    /// A full sweep improved the cost by less than the tolerance.
    Converged,
    /// A full sweep left the table unchanged (exact fixed point).
    Stalled,
    MaxSweeps,
}

/// Cost trajectory of one descent run; `sweep_costs[0]` is the initial cost.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolveTrace {
    pub sweep_costs: Vec<f64>,
    pub termination: Termination,
    pub start_index: usize,
}

impl SolveTrace {
    pub fn sweeps(&self) -> usize {
        self.sweep_costs.len().saturating_sub(1)
    }

    pub fn final_cost(&self) -> f64 {
        *self.sweep_costs.last().expect("trace has initial cost")
    }
}

/// Finite cost along the route the solver itself uses (chain-factorized for
/// the relay, direct sum otherwise). Agrees with
/// [`FiniteTeamModel::eval_finite_cost`] up to float reassociation.
pub fn solver_cost(fm: &FiniteTeamModel, table: &PolicyTable) -> Result<f64> {
    match fm.reduced().kind {
        ProblemKind::Relay { ref weights } => chain_cost(fm, table, weights),
        _ => fm.eval_finite_cost(table),
    }
}

/// One best-response step: agent's row replaced by the per-symbol argmin over
/// its action grid, ties broken toward the smaller action.
pub fn best_response(fm: &FiniteTeamModel, table: &PolicyTable, agent: usize) -> Result<PolicyTable> {
    if agent >= fm.num_agents() {
        return Err(Error::InvalidParameter(format!(
            "agent index {agent} out of range for {} agents",
            fm.num_agents()
        )));
    }
    let objective = response_objective(fm, table, agent)?;
    let candidates = fm.grids()[agent].points();
    let mut out = table.clone();
    for (s, row) in objective.iter().enumerate() {
        let mut best = 0usize;
        for (a, &v) in row.iter().enumerate() {
            if v < row[best] {
                best = a;
            }
        }
        out.rows[agent][s] = candidates[best];
    }
    Ok(out)
}

/// Per-symbol response objective `G[s][a]`: the finite cost contribution of
/// agent `agent` observing symbol `s` and playing candidate `a`, with all
/// other rows fixed (own symbol mass omitted; it does not move the argmin).
fn response_objective(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    agent: usize,
) -> Result<Vec<Vec<f64>>> {
    match fm.reduced().kind {
        ProblemKind::Relay { ref weights } => chain_objective(fm, table, agent, weights),
        ProblemKind::Radner { r } => radner_objective(fm, table, agent, r),
        _ => generic_objective(fm, table, agent),
    }
}

/// Direct tuple-sum objective; works for any kernel, used by the 2-agent
/// problems and as the reference the fast paths are tested against.
fn generic_objective(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    agent: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = fm.num_agents();
    let symbols = fm.symbols();
    let masses = fm.masses();
    let candidates = fm.grids()[agent].points();
    let others: Vec<usize> = (0..n).filter(|&j| j != agent).collect();
    let dims: Vec<usize> = others.iter().map(|&j| symbols[j].len()).collect();

    symbols[agent]
        .par_iter()
        .map(|&ys| {
            let mut row = vec![0.0; candidates.len()];
            let mut y = vec![0.0; n];
            let mut u = vec![0.0; n];
            y[agent] = ys;
            let mut idx = vec![0usize; others.len()];
            loop {
                let mut weight = 1.0;
                for (pos, &j) in others.iter().enumerate() {
                    y[j] = symbols[j][idx[pos]];
                    u[j] = table.rows[j][idx[pos]];
                    weight *= masses[j][idx[pos]];
                }
                for (a, &cand) in candidates.iter().enumerate() {
                    u[agent] = cand;
                    row[a] += weight * tuple_cost(fm, &y, &u)?;
                }
                let mut k = others.len();
                loop {
                    if k == 0 {
                        return Ok(row);
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < dims[k] {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .collect()
}

fn tuple_cost(fm: &FiniteTeamModel, y: &[f64], u: &[f64]) -> Result<f64> {
    match fm.state_rule() {
        None => fm.reduced().reduced_cost(0.0, y, u),
        Some(rule) => {
            let mut acc = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * fm.reduced().reduced_cost(x, y, u)?;
            }
            Ok(acc)
        }
    }
}

/// Backward messages for the relay chain, as coefficient triples of the
/// terminal quadratic: `T_j(b, x) = A_j(b) - 2x B_j(b) + x^2 M_j(b)`, where
/// `T_j` sums the stages `j..N` factors and cost terms given `u_{j-1} = b`.
struct ChainBackward {
    a: Vec<f64>,
    b: Vec<f64>,
    m: Vec<f64>,
}

/// Evaluate the backward recursion from the terminal stage down to `target`,
/// returning messages at the given `queries` (values of `u_{target-1}`).
fn chain_backward(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    weights: &[f64],
    target: usize,
    queries: &[f64],
) -> Result<ChainBackward> {
    let n = fm.num_agents();
    debug_assert!(target >= 1 && target <= n - 1);
    // Messages at stage j are evaluated at agent j-1's current actions while
    // j > target, and at `queries` when j == target.
    let mut a_next: Vec<f64> = Vec::new();
    let mut b_next: Vec<f64> = Vec::new();
    let mut m_next: Vec<f64> = Vec::new();
    for j in (target..n).rev() {
        let points: &[f64] = if j == target {
            queries
        } else {
            &table.rows[j - 1]
        };
        let syms = &fm.symbols()[j];
        let mass = &fm.masses()[j];
        let acts = &table.rows[j];
        let mut a_cur = vec![0.0; points.len()];
        let mut b_cur = vec![0.0; points.len()];
        let mut m_cur = vec![0.0; points.len()];
        for (pi, &b) in points.iter().enumerate() {
            let (mut av, mut bv, mut mv) = (0.0, 0.0, 0.0);
            for (s, &ys) in syms.iter().enumerate() {
                let pf = mass[s] * gaussian_density_factor(b, ys)?;
                let us = acts[s];
                if j == n - 1 {
                    av += pf * us * us;
                    bv += pf * us;
                    mv += pf;
                } else {
                    // a_next et al. are indexed by agent j's symbols because
                    // the previous iteration was queried at table.rows[j].
                    av += pf * (weights[j] * us * us * m_next[s] + a_next[s]);
                    bv += pf * b_next[s];
                    mv += pf * m_next[s];
                }
            }
            a_cur[pi] = av;
            b_cur[pi] = bv;
            m_cur[pi] = mv;
        }
        a_next = a_cur;
        b_next = b_cur;
        m_next = m_cur;
    }
    Ok(ChainBackward {
        a: a_next,
        b: b_next,
        m: m_next,
    })
}

/// Forward state-moment summaries at `agent`'s symbols:
/// `w0/w1/w2[s] = sum_g w_g x_g^k omega_g(s)` and the accumulated power
/// penalty `k0[s]`, where `omega_g(s)` is the density-weighted mass of
/// reaching agent `agent` at symbol `s` given state node `x_g`.
struct ChainForward {
    w0: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    k0: Vec<f64>,
}

fn chain_forward(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    weights: &[f64],
    agent: usize,
) -> Result<ChainForward> {
    let rule = fm.state_rule().ok_or_else(|| {
        Error::InvalidParameter("relay chain model is missing its state rule".into())
    })?;
    let g_count = rule.nodes.len();
    let s0 = fm.symbols()[0].len();
    // omega[g][t], kappa[g][t] at the current stage.
    let mut omega = vec![vec![0.0; s0]; g_count];
    let mut kappa = vec![vec![0.0; s0]; g_count];
    for (g, &x) in rule.nodes.iter().enumerate() {
        for (t, &y0) in fm.symbols()[0].iter().enumerate() {
            omega[g][t] = gaussian_density_factor(x, y0)?;
        }
    }
    for j in 1..=agent {
        let prev_syms = fm.symbols()[j - 1].len();
        let syms = &fm.symbols()[j];
        let mass = &fm.masses()[j - 1];
        let acts = &table.rows[j - 1];
        // Density table f(u_{j-1}(t'), y_j(t)) shared across state nodes.
        let mut ftab = vec![vec![0.0; syms.len()]; prev_syms];
        for tp in 0..prev_syms {
            for (t, &ys) in syms.iter().enumerate() {
                ftab[tp][t] = gaussian_density_factor(acts[tp], ys)?;
            }
        }
        let lw = weights[j - 1];
        for g in 0..g_count {
            let mut omega_new = vec![0.0; syms.len()];
            let mut kappa_new = vec![0.0; syms.len()];
            for tp in 0..prev_syms {
                let po = mass[tp] * omega[g][tp];
                let pk = mass[tp] * (kappa[g][tp] + omega[g][tp] * lw * acts[tp] * acts[tp]);
                let frow = &ftab[tp];
                for (t, &f) in frow.iter().enumerate() {
                    omega_new[t] += po * f;
                    kappa_new[t] += pk * f;
                }
            }
            omega[g] = omega_new;
            kappa[g] = kappa_new;
        }
    }
    let s_agent = fm.symbols()[agent].len();
    let mut out = ChainForward {
        w0: vec![0.0; s_agent],
        w1: vec![0.0; s_agent],
        w2: vec![0.0; s_agent],
        k0: vec![0.0; s_agent],
    };
    for (g, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        for s in 0..s_agent {
            out.w0[s] += w * omega[g][s];
            out.w1[s] += w * x * omega[g][s];
            out.w2[s] += w * x * x * omega[g][s];
            out.k0[s] += w * kappa[g][s];
        }
    }
    Ok(out)
}

/// Chain-factorized response objective for the relay.
fn chain_objective(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    agent: usize,
    weights: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = fm.num_agents();
    let fwd = chain_forward(fm, table, weights, agent)?;
    let candidates = fm.grids()[agent].points();
    let s_agent = fm.symbols()[agent].len();
    let mut rows = vec![vec![0.0; candidates.len()]; s_agent];
    if agent == n - 1 {
        for s in 0..s_agent {
            for (ai, &a) in candidates.iter().enumerate() {
                rows[s][ai] = fwd.k0[s] + fwd.w0[s] * a * a - 2.0 * fwd.w1[s] * a + fwd.w2[s];
            }
        }
    } else {
        let back = chain_backward(fm, table, weights, agent + 1, candidates)?;
        let lw = weights[agent];
        for s in 0..s_agent {
            for (ai, &a) in candidates.iter().enumerate() {
                rows[s][ai] = fwd.k0[s] * back.m[ai]
                    + fwd.w0[s] * (lw * a * a * back.m[ai] + back.a[ai])
                    - 2.0 * fwd.w1[s] * back.b[ai]
                    + fwd.w2[s] * back.m[ai];
            }
        }
    }
    Ok(rows)
}

/// Relay finite cost via the same message passing (cheap enough to call once
/// per sweep).
fn chain_cost(fm: &FiniteTeamModel, table: &PolicyTable, weights: &[f64]) -> Result<f64> {
    let agent = fm.num_agents() - 1;
    let fwd = chain_forward(fm, table, weights, agent)?;
    let mass = &fm.masses()[agent];
    let mut j = 0.0;
    for (s, &a) in table.rows[agent].iter().enumerate() {
        j += mass[s] * (fwd.k0[s] + fwd.w0[s] * a * a - 2.0 * fwd.w1[s] * a + fwd.w2[s]);
    }
    Ok(j)
}

/// State-quadratic response objective for the 2-agent static team: per state
/// node the other agent contributes (mass, mean, second-moment) aggregates
/// and the candidate enters through a per-node quadratic.
fn radner_objective(
    fm: &FiniteTeamModel,
    table: &PolicyTable,
    agent: usize,
    r: f64,
) -> Result<Vec<Vec<f64>>> {
    let rule = fm.state_rule().ok_or_else(|| {
        Error::InvalidParameter("static-team model is missing its state rule".into())
    })?;
    let other = 1 - agent;
    let candidates = fm.grids()[agent].points();
    let o_syms = &fm.symbols()[other];
    let o_mass = &fm.masses()[other];
    let o_acts = &table.rows[other];
    // Per-node quadratic coefficients: G(s,a) = sum_g f(x_g, y_s) (P + aQ + a^2 R).
    let g_count = rule.nodes.len();
    let (mut pg, mut qg, mut rg) = (vec![0.0; g_count], vec![0.0; g_count], vec![0.0; g_count]);
    for (g, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let (mut m, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for (s, &ys) in o_syms.iter().enumerate() {
            let pf = o_mass[s] * gaussian_density_factor(x, ys)?;
            m += pf;
            s1 += pf * o_acts[s];
            s2 += pf * o_acts[s] * o_acts[s];
        }
        pg[g] = w * (x * x * m - 2.0 * x * s1 + (1.0 + r) * s2);
        qg[g] = w * (-2.0 * x * m + 2.0 * s1);
        rg[g] = w * (1.0 + r) * m;
    }
    let a_syms = &fm.symbols()[agent];
    let mut rows = vec![vec![0.0; candidates.len()]; a_syms.len()];
    for (s, &ys) in a_syms.iter().enumerate() {
        let (mut p, mut q, mut rr) = (0.0, 0.0, 0.0);
        for (g, &x) in rule.nodes.iter().enumerate() {
            let f = gaussian_density_factor(x, ys)?;
            p += f * pg[g];
            q += f * qg[g];
            rr += f * rg[g];
        }
        for (ai, &a) in candidates.iter().enumerate() {
            rows[s][ai] = p + a * q + a * a * rr;
        }
    }
    Ok(rows)
}

/// Cyclic best-response sweeps until a full sweep improves the finite cost by
/// less than `tol`, the table stops changing, or `max_sweeps` is hit.
pub fn pbp_solve(
    fm: &FiniteTeamModel,
    init: &PolicyTable,
    max_sweeps: u32,
    tol: f64,
) -> Result<(PolicyTable, SolveTrace)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "descent tolerance must be positive, got {tol}"
        )));
    }
    let mut table = init.clone();
    let mut costs = vec![solver_cost(fm, &table)?];
    let mut termination = Termination::MaxSweeps;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for agent in 0..fm.num_agents() {
            let next = best_response(fm, &table, agent)?;
            if next.rows[agent] != table.rows[agent] {
                changed = true;
            }
            table = next;
        }
        let j = solver_cost(fm, &table)?;
        let improvement = costs.last().unwrap() - j;
        costs.push(j);
        if !changed {
            termination = Termination::Stalled;
            break;
        }
        if improvement < tol {
            termination = Termination::Converged;
            break;
        }
    }
    Ok((
        table,
        SolveTrace {
            sweep_costs: costs,
            termination,
            start_index: 0,
        },
    ))
}

/// Descent from the zero table, `starts` seeded random tables, and any
/// `extra` warm-start tables; returns the best terminal table (ties keep the
/// earliest run) and every trace.
pub fn multi_start_solve(
    fm: &FiniteTeamModel,
    starts: u32,
    seed: u64,
    max_sweeps: u32,
    tol: f64,
    extra: &[PolicyTable],
) -> Result<(PolicyTable, Vec<SolveTrace>)> {
    let mut inits = Vec::with_capacity(starts as usize + 1 + extra.len());
    inits.push(fm.zero_table());
    for s in 1..=starts {
        inits.push(random_table(fm, seed, s as u64));
    }
    inits.extend_from_slice(extra);

    let mut traces = Vec::with_capacity(inits.len());
    let mut best: Option<(f64, PolicyTable)> = None;
    for (i, init) in inits.iter().enumerate() {
        let (table, mut trace) = pbp_solve(fm, init, max_sweeps, tol)?;
        trace.start_index = i;
        let cost = trace.final_cost();
        if best.as_ref().map_or(true, |(b, _)| cost < *b) {
            best = Some((cost, table));
        }
        traces.push(trace);
    }
    let (_, table) = best.expect("at least one start");
    Ok((table, traces))
}

fn random_table(fm: &FiniteTeamModel, seed: u64, start: u64) -> PolicyTable {
    let mut rng = StreamRng::new(seed, start);
    PolicyTable {
        rows: fm
            .symbols()
            .iter()
            .zip(fm.grids())
            .map(|(syms, grid)| {
                (0..syms.len())
                    .map(|_| grid.points()[rng.uniform_index(grid.len())])
                    .collect()
            })
            .collect(),
    }
}

/// Globally minimal finite cost over all grid-restricted tables, first table
/// in lexicographic order winning ties.
pub fn exhaustive_solve(fm: &FiniteTeamModel, cap: u64) -> Result<(PolicyTable, f64)> {
    let mut best: Option<(f64, PolicyTable)> = None;
    for table in fm.enumerate_policies(cap)? {
        let j = fm.eval_finite_cost(&table)?;
        if best.as_ref().map_or(true, |(b, _)| j < *b) {
            best = Some((j, table));
        }
    }
    let (j, table) = best.expect("policy space is nonempty");
    Ok((table, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{build_finite, DEFAULT_ENUM_CAP, DEFAULT_STATE_NODES};
    use crate::problems::*;
    use crate::quant::{ActionGrid, Quantizer};
    use crate::team::{static_reduce, MeanRef, ObsKernel, ProblemKind, TeamProblem};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn wits_model(weight: f64, radius: f64, n: usize, m: f64, k: usize) -> FiniteTeamModel {
        let p = make_witsenhausen(&WitsenhausenSpec { weight }).unwrap();
        let r = static_reduce(&p).unwrap();
        let q = Quantizer::uniform(radius, n).unwrap();
        let g = ActionGrid::new(m, k, true).unwrap();
        build_finite(&r, &[q.clone(), q], &[g.clone(), g], DEFAULT_STATE_NODES).unwrap()
    }

    fn relay_model(n_agents: usize, radius: f64, n: usize, k: usize, nodes: usize) -> FiniteTeamModel {
        let p = make_relay(&RelaySpec {
            num_agents: n_agents,
            weights: vec![0.1; n_agents - 1],
        })
        .unwrap();
        let r = static_reduce(&p).unwrap();
        let q = Quantizer::uniform(radius, n).unwrap();
        let g = ActionGrid::new(1.0, k, true).unwrap();
        build_finite(&r, &vec![q; n_agents], &vec![g; n_agents], nodes).unwrap()
    }

    fn radner_model(r: f64, radius: f64, n: usize, k: usize) -> FiniteTeamModel {
        let p = make_radner(&RadnerSpec { r }).unwrap();
        let red = static_reduce(&p).unwrap();
        let q = Quantizer::uniform(radius, n).unwrap();
        let g = ActionGrid::new(1.0, k, true).unwrap();
        build_finite(&red, &[q.clone(), q], &[g.clone(), g], 48).unwrap()
    }

    #[test]
    fn chain_fast_path_matches_generic_objective() {
        let fm = relay_model(3, 1.5, 3, 3, 24);
        let table = random_table(&fm, 99, 1);
        for agent in 0..3 {
            let fast = chain_objective(&fm, &table, agent, &[0.1, 0.1]).unwrap();
            let slow = generic_objective(&fm, &table, agent).unwrap();
            for (rf, rs) in fast.iter().zip(&slow) {
                for (a, b) in rf.iter().zip(rs) {
                    assert!(
                        (a - b).abs() <= 1e-11 * b.abs().max(1.0),
                        "agent {agent}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn chain_cost_matches_generic_eval() {
        let fm = relay_model(3, 2.0, 4, 5, 32);
        for s in 0..4 {
            let table = random_table(&fm, 7, s);
            let fast = solver_cost(&fm, &table).unwrap();
            let slow = fm.eval_finite_cost(&table).unwrap();
            assert!((fast - slow).abs() <= 1e-11 * slow.abs().max(1.0));
        }
    }

    #[test]
    fn radner_fast_path_matches_generic_objective() {
        let fm = radner_model(0.1, 2.0, 4, 5);
        let table = random_table(&fm, 5, 2);
        for agent in 0..2 {
            let fast = radner_objective(&fm, &table, agent, 0.1).unwrap();
            let slow = generic_objective(&fm, &table, agent).unwrap();
            for (rf, rs) in fast.iter().zip(&slow) {
                for (a, b) in rf.iter().zip(rs) {
                    assert!(
                        (a - b).abs() <= 1e-11 * b.abs().max(1.0),
                        "agent {agent}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn best_response_never_increases_cost() {
        let models = vec![
            wits_model(1.0, 2.0, 4, 1.0, 5),
            relay_model(3, 1.5, 3, 3, 32),
            radner_model(0.1, 2.0, 4, 5),
        ];
        for fm in &models {
            for s in 0..3 {
                let mut table = random_table(fm, 11, s);
                for agent in 0..fm.num_agents() {
                    let before = solver_cost(fm, &table).unwrap();
                    table = best_response(fm, &table, agent).unwrap();
                    let after = solver_cost(fm, &table).unwrap();
                    assert!(after <= before + 1e-12, "agent {agent}: {before} -> {after}");
                }
            }
        }
    }

    #[test]
    fn second_stage_response_is_projected_conditional_mean() {
        // With quadratic second-stage cost the unconstrained minimizer per
        // symbol is E[u1 | y2 = y_j] under the finite model; on a dense grid
        // the response is its nearest grid point.
        let fm = wits_model(1.0, 2.0, 4, 2.0, 65);
        let mut table = fm.zero_table();
        table.rows[0] = vec![0.0, -1.5, -0.5, 0.5, 1.5];
        let response = best_response(&fm, &table, 1).unwrap();
        let grid = &fm.grids()[1];
        for (s, &ys) in fm.symbols()[1].iter().enumerate() {
            let (mut num, mut den) = (0.0, 0.0);
            for (t, &u1) in table.rows[0].iter().enumerate() {
                let w = fm.masses()[0][t] * gaussian_density_factor(u1, ys).unwrap();
                num += w * u1;
                den += w;
            }
            let want = grid.nearest(num / den);
            assert_abs_diff_eq!(response.rows[1][s], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_agent_best_response_is_global() {
        // One agent, quadratic tracking cost: a single best response lands on
        // the exhaustive optimum.
        let p = TeamProblem::new(
            false,
            vec![ObsKernel::Gaussian {
                mean: MeanRef::Zero,
                std_dev: 1.0,
            }],
            Arc::new(|_x, y, u| (u[0] - y[0]) * (u[0] - y[0])),
            ProblemKind::Custom,
        )
        .unwrap();
        let r = static_reduce(&p).unwrap();
        let q = Quantizer::uniform(2.0, 4).unwrap();
        let g = ActionGrid::new(2.0, 9, true).unwrap();
        let fm = build_finite(&r, &[q], &[g], DEFAULT_STATE_NODES).unwrap();
        let stepped = best_response(&fm, &fm.zero_table(), 0).unwrap();
        let (opt_table, opt_cost) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(stepped.rows, opt_table.rows);
        assert_abs_diff_eq!(
            fm.eval_finite_cost(&stepped).unwrap(),
            opt_cost,
            epsilon = 1e-14
        );
    }

    #[test]
    fn n1_zero_start_reaches_zero_cost_fixed_point() {
        let fm = wits_model(1.0, 1.0, 1, 1.0, 3);
        let (table, trace) = pbp_solve(&fm, &fm.zero_table(), 100, 1e-10).unwrap();
        assert_eq!(table.rows, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_abs_diff_eq!(trace.final_cost(), 0.0, epsilon = 1e-15);
        assert_eq!(trace.termination, Termination::Stalled);
        // The zero table is the global optimum here.
        let (_, opt) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        assert_abs_diff_eq!(opt, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn trace_is_monotone_and_fixed_point_is_stationary() {
        let fm = wits_model(0.5, 2.0, 6, 1.0, 5);
        let (table, trace) = pbp_solve(&fm, &random_table(&fm, 3, 1), 200, 1e-10).unwrap();
        for w in trace.sweep_costs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        // One extra sweep at the fixed point changes nothing measurable.
        let (_, trace2) = pbp_solve(&fm, &table, 1, 1e-10).unwrap();
        let delta = trace2.sweep_costs[0] - trace2.final_cost();
        assert!(delta.abs() < 1e-10, "delta={delta}");
    }

    #[test]
    fn determinism_across_identical_runs() {
        let fm = relay_model(3, 1.5, 3, 3, 32);
        let (t1, tr1) = multi_start_solve(&fm, 4, 17, 100, 1e-10, &[]).unwrap();
        let (t2, tr2) = multi_start_solve(&fm, 4, 17, 100, 1e-10, &[]).unwrap();
        assert_eq!(t1.rows, t2.rows);
        let c1: Vec<Vec<u64>> = tr1
            .iter()
            .map(|t| t.sweep_costs.iter().map(|c| c.to_bits()).collect())
            .collect();
        let c2: Vec<Vec<u64>> = tr2
            .iter()
            .map(|t| t.sweep_costs.iter().map(|c| c.to_bits()).collect())
            .collect();
        assert_eq!(c1, c2);
    }

    #[test]
    fn multi_start_improves_on_single_start_and_matches_exhaustive_when_tiny() {
        let fm = wits_model(1.0, 1.5, 3, 1.0, 3);
        let (best, traces) = multi_start_solve(&fm, 64, 23, 200, 1e-10, &[]).unwrap();
        let best_cost = fm.eval_finite_cost(&best).unwrap();
        for t in &traces {
            assert!(best_cost <= t.final_cost() + 1e-11);
        }
        let (_, opt) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        assert!(opt <= best_cost + 1e-12);
        assert!((best_cost - opt).abs() <= 1e-9, "pbp {best_cost} vs opt {opt}");
    }

    #[test]
    fn exhaustive_matches_independent_brute_force_on_toy() {
        // 2 agents, n=1 (2 symbols), 3 actions: 81 tables; brute-force the
        // double sum directly from masses and the closed-form reduced cost.
        let weight = 1.0;
        let fm = wits_model(weight, 1.0, 1, 1.0, 3);
        let acts = [-1.0, 0.0, 1.0];
        let masses = &fm.masses()[0];
        let symbols = &fm.symbols()[0];
        let mut best = f64::INFINITY;
        let mut count = 0;
        for a0 in acts {
            for a1 in acts {
                for b0 in acts {
                    for b1 in acts {
                        let rows = [vec![a0, a1], vec![b0, b1]];
                        let mut j = 0.0;
                        for (i, &yi) in symbols.iter().enumerate() {
                            for (l, &yl) in symbols.iter().enumerate() {
                                let u1 = rows[0][i];
                                let u2 = rows[1][l];
                                let c = weight * (u1 - yi) * (u1 - yi) + (u2 - u1) * (u2 - u1);
                                let f = (-(u1 * u1 - 2.0 * yl * u1) / 2.0f64).exp();
                                j += c * f * masses[i] * masses[l];
                            }
                        }
                        best = best.min(j);
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 81);
        let (_, opt) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        assert_abs_diff_eq!(opt, best, epsilon = 1e-12);
    }

    #[test]
    fn exhaustive_dominates_descent() {
        let fm = wits_model(0.8, 1.5, 2, 1.0, 3);
        let (_, opt) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        let (best, _) = multi_start_solve(&fm, 8, 41, 200, 1e-10, &[]).unwrap();
        assert!(opt <= fm.eval_finite_cost(&best).unwrap() + 1e-12);
    }

    #[test]
    fn warm_start_extra_inits_participate() {
        let fm = wits_model(1.0, 1.5, 3, 1.0, 3);
        let (opt_table, opt) = exhaustive_solve(&fm, DEFAULT_ENUM_CAP).unwrap();
        // Seeding with the exhaustive optimum keeps the result at the optimum.
        let (best, traces) = multi_start_solve(&fm, 0, 1, 200, 1e-10, &[opt_table]).unwrap();
        assert_eq!(traces.len(), 2);
        assert!(fm.eval_finite_cost(&best).unwrap() <= opt + 1e-12);
    }
}
