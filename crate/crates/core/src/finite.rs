//! Finite team models: per-agent observation symbols with Gaussian cell
//! masses, finite action grids, and exact evaluation of the finite cost as a
//! weighted sum over all symbol tuples (with an outer fixed-node quadrature
//! over the state for problems that carry one).

use serde::{Deserialize, Serialize};

use crate::gauss::GaussHermite;
use crate::quant::{ActionGrid, Quantizer};
use crate::team::ReducedTeam;
use crate::{Error, Result};

/// Gauss-Hermite node count for the state integral unless overridden.
pub const DEFAULT_STATE_NODES: usize = 64;

/// Above this many symbol tuples, evaluation streams instead of materializing
/// per-tuple contributions.
const EVAL_CACHE_LIMIT: u128 = 1_000_000;

/// Default cap on exhaustive policy enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// The finite team model built from a reduced team, per-agent quantizers, and
/// per-agent action grids.
#[derive(Debug, Clone)]
pub struct FiniteTeamModel {
    reduced: ReducedTeam,
    quantizers: Vec<Quantizer>,
    grids: Vec<ActionGrid>,
    /// Per-agent symbol representatives, overflow first.
    symbols: Vec<Vec<f64>>,
    /// Per-agent symbol masses under the standard-Gaussian reference.
    masses: Vec<Vec<f64>>,
    /// State quadrature (nodes, weights summing to 1) when the problem has a
    /// continuous state.
    state_rule: Option<GaussHermite>,
}

impl FiniteTeamModel {
    pub fn reduced(&self) -> &ReducedTeam {
        &self.reduced
    }

    pub fn num_agents(&self) -> usize {
        self.symbols.len()
    }

    pub fn quantizers(&self) -> &[Quantizer] {
        &self.quantizers
    }

    pub fn grids(&self) -> &[ActionGrid] {
        &self.grids
    }

    pub fn symbols(&self) -> &[Vec<f64>] {
        &self.symbols
    }

    pub fn masses(&self) -> &[Vec<f64>] {
        &self.masses
    }

    pub fn state_rule(&self) -> Option<&GaussHermite> {
        self.state_rule.as_ref()
    }

    /// Number of symbol tuples.
    pub fn tuple_count(&self) -> u128 {
        self.symbols.iter().map(|s| s.len() as u128).product()
    }

    /// A table with every action set to the grid point nearest zero.
    pub fn zero_table(&self) -> PolicyTable {
        PolicyTable {
            rows: self
                .symbols
                .iter()
                .zip(&self.grids)
                .map(|(syms, grid)| vec![grid.nearest(0.0); syms.len()])
                .collect(),
        }
    }

    fn check_table(&self, table: &PolicyTable) -> Result<()> {
        if table.rows.len() != self.num_agents() {
            return Err(Error::InvalidParameter(format!(
                "table has {} agents, model has {}",
                table.rows.len(),
                self.num_agents()
            )));
        }
        for (i, row) in table.rows.iter().enumerate() {
            if row.len() != self.symbols[i].len() {
                return Err(Error::InvalidParameter(format!(
                    "agent {i}: table row has {} entries, model has {} symbols",
                    row.len(),
                    self.symbols[i].len()
                )));
            }
        }
        Ok(())
    }

    /// Reduced cost at one symbol tuple (state integrated out when present).
    fn tuple_cost(&self, y: &[f64], u: &[f64]) -> Result<f64> {
        match &self.state_rule {
            None => self.reduced.reduced_cost(0.0, y, u),
            Some(rule) => {
                let mut acc = 0.0;
                for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                    acc += w * self.reduced.reduced_cost(x, y, u)?;
                }
                Ok(acc)
            }
        }
    }

    /// Exact finite cost: the mass-weighted sum of the reduced cost over all
    /// symbol tuples at their representative points.
    pub fn eval_finite_cost(&self, table: &PolicyTable) -> Result<f64> {
        self.check_table(table)?;
        let n = self.num_agents();
        let dims: Vec<usize> = self.symbols.iter().map(|s| s.len()).collect();
        let count = self.tuple_count();

        let mut idx = vec![0usize; n];
        let mut y = vec![0.0; n];
        let mut u = vec![0.0; n];
        let mut contributions = if count <= EVAL_CACHE_LIMIT {
            Vec::with_capacity(count as usize)
        } else {
            Vec::new()
        };
        let mut total = 0.0;
        loop {
            let mut weight = 1.0;
            for i in 0..n {
                y[i] = self.symbols[i][idx[i]];
                u[i] = table.rows[i][idx[i]];
                weight *= self.masses[i][idx[i]];
            }
            let c = weight * self.tuple_cost(&y, &u)?;
            if count <= EVAL_CACHE_LIMIT {
                contributions.push(c);
            } else {
                total += c;
            }
            // Odometer, last agent fastest.
            let mut k = n;
            loop {
                if k == 0 {
                    let result = if count <= EVAL_CACHE_LIMIT {
                        contributions.iter().sum()
                    } else {
                        total
                    };
                    return Ok(result);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Iterate every grid-restricted policy table in lexicographic order.
    ///
    /// Errs with `TooLarge` when the table count exceeds `cap`.
    pub fn enumerate_policies(&self, cap: u64) -> Result<PolicyIter<'_>> {
        let mut count: u128 = 1;
        for (syms, grid) in self.symbols.iter().zip(&self.grids) {
            for _ in 0..syms.len() {
                count = count.saturating_mul(grid.len() as u128);
                if count > cap as u128 {
                    return Err(Error::TooLarge { count, cap });
                }
            }
        }
        Ok(PolicyIter {
            model: self,
            digits: vec![0; self.symbols.iter().map(|s| s.len()).sum()],
            done: false,
        })
    }
}

/// Build the finite model: symbol lists are the quantizer levels with the
/// overflow representative prepended, masses are the standard-Gaussian cell
/// masses (the reduced reference measure), and problems with a state get a
/// `state_nodes`-point Gauss-Hermite rule for the outer integral.
pub fn build_finite(
    reduced: &ReducedTeam,
    quantizers: &[Quantizer],
    grids: &[ActionGrid],
    state_nodes: usize,
) -> Result<FiniteTeamModel> {
    let n = reduced.num_agents;
    if quantizers.len() != n || grids.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need one quantizer and one grid per agent ({n}); got {} and {}",
            quantizers.len(),
            grids.len()
        )));
    }
    let mut symbols = Vec::with_capacity(n);
    let mut masses = Vec::with_capacity(n);
    for q in quantizers {
        symbols.push(q.symbols());
        masses.push(q.cell_masses(1.0)?);
    }
    let state_rule = if reduced.has_state {
        Some(GaussHermite::new(state_nodes)?)
    } else {
        None
    };
    Ok(FiniteTeamModel {
        reduced: reduced.clone(),
        quantizers: quantizers.to_vec(),
        grids: grids.to_vec(),
        symbols,
        masses,
        state_rule,
    })
}

/// Per-agent map from observation symbol index (overflow first) to action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    pub rows: Vec<Vec<f64>>,
}

impl PolicyTable {
    pub fn constant(symbol_counts: &[usize], a: f64) -> Self {
        Self {
            rows: symbol_counts.iter().map(|&s| vec![a; s]).collect(),
        }
    }
}

/// Lexicographic iterator over grid-restricted policy tables.
pub struct PolicyIter<'a> {
    model: &'a FiniteTeamModel,
    /// Flattened grid indices: agent 0 symbols first, then agent 1, ...
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for PolicyIter<'_> {
    type Item = PolicyTable;

    fn next(&mut self) -> Option<PolicyTable> {
        if self.done {
            return None;
        }
        let mut rows = Vec::with_capacity(self.model.num_agents());
        let mut pos = 0;
        for (syms, grid) in self.model.symbols.iter().zip(&self.model.grids) {
            let row = self.digits[pos..pos + syms.len()]
                .iter()
                .map(|&d| grid.points()[d])
                .collect();
            rows.push(row);
            pos += syms.len();
        }
        // Advance the odometer, last digit fastest.
        let radices: Vec<usize> = self
            .model
            .symbols
            .iter()
            .zip(&self.model.grids)
            .flat_map(|(syms, grid)| std::iter::repeat(grid.len()).take(syms.len()))
            .collect();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < radices[k] {
                break;
            }
            self.digits[k] = 0;
        }
        Some(PolicyTable { rows })
    }
}

/// Serialized policy bundle: per-agent actions by symbol index plus the
/// generating quantizer/grid parameters. Round-trips bit-exactly through
/// JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedPolicy {
    pub agents: Vec<SavedAgentPolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedAgentPolicy {
    pub radius: f64,
    pub levels: usize,
    pub half_width: f64,
    pub points: usize,
    pub nested: bool,
    /// Action per symbol index, overflow first.
    pub actions: Vec<f64>,
}

impl SavedPolicy {
    pub fn new(
        table: &PolicyTable,
        quantizers: &[Quantizer],
        grids: &[ActionGrid],
    ) -> Result<Self> {
        if table.rows.len() != quantizers.len() || table.rows.len() != grids.len() {
            return Err(Error::InvalidParameter(
                "policy bundle needs matching table/quantizer/grid counts".into(),
            ));
        }
        let agents = table
            .rows
            .iter()
            .zip(quantizers)
            .zip(grids)
            .map(|((row, q), g)| SavedAgentPolicy {
                radius: q.radius(),
                levels: q.num_levels(),
                half_width: g.half_width(),
                points: g.len(),
                nested: g.nested(),
                actions: row.clone(),
            })
            .collect();
        Ok(Self { agents })
    }

    pub fn table(&self) -> PolicyTable {
        PolicyTable {
            rows: self.agents.iter().map(|a| a.actions.clone()).collect(),
        }
    }

    pub fn quantizers(&self) -> Result<Vec<Quantizer>> {
        self.agents
            .iter()
            .map(|a| Quantizer::uniform(a.radius, a.levels))
            .collect()
    }

    pub fn grids(&self) -> Result<Vec<ActionGrid>> {
        self.agents
            .iter()
            .map(|a| ActionGrid::new(a.half_width, a.points, a.nested))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))
    }
}
