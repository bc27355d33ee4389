//! Sequential team problems in intrinsic form and their static reduction.
//!
//! A [`TeamProblem`] is an ordered list of agents; agent `i` observes `y_i`
//! drawn from a kernel that may condition on the state and on actions of
//! earlier agents, then acts through its policy. [`static_reduce`] rewrites
//! the problem over a reference measure under which the state and all
//! observations are independent standard Gaussians, multiplying the cost by
//! the kernel density factors `f(u, y) = exp(-(u^2 - 2yu)/2)`. Both forms are
//! evaluated here by seeded Monte Carlo.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::gauss::{mc_mean_ci, Seed};
use crate::quant::Quantizer;
use crate::{Error, Result};

/// Team cost `c(x, y, u)`; stateless problems receive `x = 0`.
pub type CostFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;

/// Sampler for a kernel without a Gaussian description (test/extension hook).
pub type KernelSampler = Arc<dyn Fn(&mut ChaCha12Rng, f64, &[f64]) -> f64 + Send + Sync>;

/// What the conditional mean of a Gaussian observation kernel points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanRef {
    /// Exogenous observation, mean 0.
    Zero,
    /// Mean equals the state x.
    State,
    /// Mean equals the action of an earlier agent.
    Action(usize),
}

/// Observation kernel for one agent.
#[derive(Clone)]
pub enum ObsKernel {
    /// Conditionally Gaussian: `y ~ N(mean, std_dev^2)`.
    Gaussian { mean: MeanRef, std_dev: f64 },
    /// Opaque sampler; cannot be statically reduced.
    Custom(KernelSampler),
}

impl fmt::Debug for ObsKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsKernel::Gaussian { mean, std_dev } => f
                .debug_struct("Gaussian")
                .field("mean", mean)
                .field("std_dev", std_dev)
                .finish(),
            ObsKernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Which problem family an instance belongs to; drives structured fast paths
/// and the choice of exact evaluator and analytic baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    Witsenhausen { weight: f64 },
    Relay { weights: Vec<f64> },
    Radner { r: f64 },
    Custom,
}

/// A sequential team problem in intrinsic form.
#[derive(Clone)]
pub struct TeamProblem {
    pub num_agents: usize,
    /// true when the problem carries a scalar state x ~ N(0,1).
    pub has_state: bool,
    pub obs_kernels: Vec<ObsKernel>,
    pub cost: CostFn,
    pub is_static: bool,
    pub kind: ProblemKind,
}

impl fmt::Debug for TeamProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TeamProblem")
            .field("num_agents", &self.num_agents)
            .field("has_state", &self.has_state)
            .field("obs_kernels", &self.obs_kernels)
            .field("is_static", &self.is_static)
            .field("kind", &self.kind)
            .finish()
    }
}

impl TeamProblem {
    pub fn new(
        has_state: bool,
        obs_kernels: Vec<ObsKernel>,
        cost: CostFn,
        kind: ProblemKind,
    ) -> Result<Self> {
        let num_agents = obs_kernels.len();
        if num_agents == 0 {
            return Err(Error::InvalidParameter("team needs at least one agent".into()));
        }
        let mut is_static = true;
        for (i, k) in obs_kernels.iter().enumerate() {
            if let ObsKernel::Gaussian { mean, std_dev } = k {
                if !(std_dev.is_finite() && *std_dev > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "agent {i}: kernel std dev must be positive, got {std_dev}"
                    )));
                }
                match mean {
                    MeanRef::Action(j) if *j >= i => {
                        return Err(Error::InvalidParameter(format!(
                            "agent {i}: observation may only depend on actions of agents < {i}, got {j}"
                        )));
                    }
                    MeanRef::Action(_) => is_static = false,
                    MeanRef::State if !has_state => {
                        return Err(Error::InvalidParameter(format!(
                            "agent {i}: kernel references the state but the problem has none"
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            num_agents,
            has_state,
            obs_kernels,
            cost,
            is_static,
            kind,
        })
    }

    /// Forward-simulate one realization; returns the incurred cost.
    fn simulate(&self, policy: &ContinuousPolicy, rng: &mut ChaCha12Rng) -> Result<f64> {
        let x: f64 = if self.has_state {
            rng.sample(StandardNormal)
        } else {
            0.0
        };
        let mut ys = Vec::with_capacity(self.num_agents);
        let mut us = Vec::with_capacity(self.num_agents);
        for (i, kernel) in self.obs_kernels.iter().enumerate() {
            let y = match kernel {
                ObsKernel::Gaussian { mean, std_dev } => {
                    let mu = match mean {
                        MeanRef::Zero => 0.0,
                        MeanRef::State => x,
                        MeanRef::Action(j) => us[*j],
                    };
                    mu + std_dev * rng.sample::<f64, _>(StandardNormal)
                }
                ObsKernel::Custom(sampler) => sampler(rng, x, &us),
            };
            ys.push(y);
            us.push(policy.agents[i].act(y));
        }
        let c = (self.cost)(x, &ys, &us);
        if !c.is_finite() {
            return Err(Error::NonFiniteCost(format!("dynamic cost {c}")));
        }
        Ok(c)
    }

    /// Monte Carlo estimate of J(policy) by forward simulation of the
    /// sequential system; returns (mean, 1.96 * stderr).
    pub fn mc_cost_dynamic(
        &self,
        policy: &ContinuousPolicy,
        samples: u64,
        seed: Seed,
    ) -> Result<(f64, f64)> {
        if policy.agents.len() != self.num_agents {
            return Err(Error::InvalidParameter(format!(
                "policy has {} agents, problem has {}",
                policy.agents.len(),
                self.num_agents
            )));
        }
        mc_mean_ci(seed, samples, |rng| self.simulate(policy, rng))
    }
}

/// The density factor of Eq-form `f(u, y) = exp(-(u^2 - 2yu)/2)`, which turns
/// a unit-variance Gaussian kernel centered at `u` into a reweighting of the
/// standard Gaussian reference: `f(u, y) * phi(y) = phi(y - u)`.
pub fn gaussian_density_factor(u: f64, y: f64) -> Result<f64> {
    let exponent = -(u * u - 2.0 * y * u) / 2.0;
    if !exponent.is_finite() || exponent.abs() > 700.0 {
        return Err(Error::Overflow(exponent));
    }
    Ok(exponent.exp())
}

/// Statically reduced team: independent standard-Gaussian coordinates with
/// density factors absorbed into the cost.
#[derive(Clone)]
pub struct ReducedTeam {
    pub num_agents: usize,
    pub has_state: bool,
    cost: CostFn,
    /// Per-agent conditional mean of the original kernel; `None` means the
    /// observation was already standard normal (identity factor).
    factors: Vec<Option<MeanRef>>,
    pub kind: ProblemKind,
}

impl fmt::Debug for ReducedTeam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedTeam")
            .field("num_agents", &self.num_agents)
            .field("has_state", &self.has_state)
            .field("factors", &self.factors)
            .field("kind", &self.kind)
            .finish()
    }
}

impl ReducedTeam {
    /// Density factor of agent `i` at `(x, u, y_i)`.
    pub fn density_factor(&self, i: usize, x: f64, u: &[f64], y_i: f64) -> Result<f64> {
        match self.factors[i] {
            None => Ok(1.0),
            Some(MeanRef::Zero) => Ok(1.0),
            Some(MeanRef::State) => gaussian_density_factor(x, y_i),
            Some(MeanRef::Action(j)) => gaussian_density_factor(u[j], y_i),
        }
    }

    /// Reduced cost `c~(x, y, u) = c(x, y, u) * prod_i f_i`.
    pub fn reduced_cost(&self, x: f64, y: &[f64], u: &[f64]) -> Result<f64> {
        let mut v = (self.cost)(x, y, u);
        for i in 0..self.num_agents {
            v *= self.density_factor(i, x, u, y[i])?;
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteCost(format!("reduced cost {v}")));
        }
        Ok(v)
    }

    /// Monte Carlo estimate of the reduced-form cost: all coordinates (state
    /// included when present) sampled as independent standard Gaussians.
    pub fn mc_cost_reduced(
        &self,
        policy: &ContinuousPolicy,
        samples: u64,
        seed: Seed,
    ) -> Result<(f64, f64)> {
        if policy.agents.len() != self.num_agents {
            return Err(Error::InvalidParameter(format!(
                "policy has {} agents, reduced team has {}",
                policy.agents.len(),
                self.num_agents
            )));
        }
        mc_mean_ci(seed, samples, |rng| {
            let x: f64 = if self.has_state {
                rng.sample(StandardNormal)
            } else {
                0.0
            };
            let mut ys = vec![0.0; self.num_agents];
            let mut us = vec![0.0; self.num_agents];
            for i in 0..self.num_agents {
                ys[i] = rng.sample(StandardNormal);
                us[i] = policy.agents[i].act(ys[i]);
            }
            self.reduced_cost(x, &ys, &us)
        })
    }
}

/// Rewrite a team with unit-variance Gaussian kernels as an equivalent static
/// team over independent standard Gaussians. For every policy the reduced
/// expectation equals the original one.
pub fn static_reduce(p: &TeamProblem) -> Result<ReducedTeam> {
    let mut factors = Vec::with_capacity(p.num_agents);
    for (i, k) in p.obs_kernels.iter().enumerate() {
        match k {
            ObsKernel::Gaussian { mean, std_dev } => {
                if (*std_dev - 1.0).abs() > 1e-12 {
                    return Err(Error::UnsupportedKernel(format!(
                        "agent {i}: static reduction requires unit conditional variance, got std dev {std_dev}"
                    )));
                }
                factors.push(match mean {
                    MeanRef::Zero => None,
                    m => Some(*m),
                });
            }
            ObsKernel::Custom(_) => {
                return Err(Error::UnsupportedKernel(format!(
                    "agent {i}: kernel has no conditional-Gaussian description"
                )));
            }
        }
    }
    Ok(ReducedTeam {
        num_agents: p.num_agents,
        has_state: p.has_state,
        cost: p.cost.clone(),
        factors,
        kind: p.kind.clone(),
    })
}

/// One agent's measurable map from observation to action.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum AgentPolicy {
    /// Table composed with a quantizer: piecewise constant with
    /// `num_levels + 1` pieces (overflow action on both tails).
    Quantized {
        quantizer: Quantizer,
        /// Action per symbol index, overflow first; length `num_symbols`.
        actions: Vec<f64>,
    },
    /// `u = slope * y + intercept`.
    Affine { slope: f64, intercept: f64 },
}

impl AgentPolicy {
    pub fn constant(a: f64) -> Self {
        AgentPolicy::Affine {
            slope: 0.0,
            intercept: a,
        }
    }

    #[inline]
    pub fn act(&self, y: f64) -> f64 {
        match self {
            AgentPolicy::Quantized { quantizer, actions } => actions[quantizer.quantize(y).0],
            AgentPolicy::Affine { slope, intercept } => slope * y + intercept,
        }
    }
}

/// A full team strategy profile.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContinuousPolicy {
    pub agents: Vec<AgentPolicy>,
}

impl ContinuousPolicy {
    pub fn constant(num_agents: usize, a: f64) -> Self {
        Self {
            agents: vec![AgentPolicy::constant(a); num_agents],
        }
    }
}
