//! The problem zoo: the two-stage counterexample with nonclassical
//! information, the N-agent Gaussian relay chain, and a quadratic static team
//! with a known linear optimum used as a verification instance.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::team::{MeanRef, ObsKernel, ProblemKind, TeamProblem};
use crate::{Error, Result};

/// Two-stage problem: agent 1 sees `y1 ~ N(0,1)`, agent 2 sees
/// `y2 = u1 + v`; cost `weight*(u1 - y1)^2 + (u2 - u1)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitsenhausenSpec {
    pub weight: f64,
}

/// Relay chain: agent 1 sees `y1 = x + v0`, agent `i` sees
/// `y_i = u_{i-1} + v_{i-1}`; cost `(u_N - x)^2 + sum_i weights[i] * u_i^2`.
/// All variances are unit (general variances are normalized away when
/// configuring the instance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaySpec {
    pub num_agents: usize,
    /// Power penalties l_1 .. l_{N-1}; length `num_agents - 1`.
    pub weights: Vec<f64>,
}

/// Static quadratic team: `x ~ N(0,1)`, `y_i = x + w_i`;
/// cost `(x - u1 - u2)^2 + r*(u1^2 + u2^2)`, strictly convex for `r > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadnerSpec {
    pub r: f64,
}

pub fn make_witsenhausen(spec: &WitsenhausenSpec) -> Result<TeamProblem> {
    if !(spec.weight > 0.0 && spec.weight.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "stage-1 cost weight must be positive, got {}",
            spec.weight
        )));
    }
    let w = spec.weight;
    TeamProblem::new(
        false,
        vec![
            ObsKernel::Gaussian {
                mean: MeanRef::Zero,
                std_dev: 1.0,
            },
            ObsKernel::Gaussian {
                mean: MeanRef::Action(0),
                std_dev: 1.0,
            },
        ],
        Arc::new(move |_x, y, u| w * (u[0] - y[0]).powi(2) + (u[1] - u[0]).powi(2)),
        ProblemKind::Witsenhausen { weight: w },
    )
}

pub fn make_relay(spec: &RelaySpec) -> Result<TeamProblem> {
    let n = spec.num_agents;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "relay chain needs at least 2 agents, got {n}"
        )));
    }
    if spec.weights.len() != n - 1 {
        return Err(Error::InvalidParameter(format!(
            "relay with {n} agents needs {} weights, got {}",
            n - 1,
            spec.weights.len()
        )));
    }
    if spec.weights.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter(
            "relay power weights must be nonnegative".into(),
        ));
    }
    let weights = spec.weights.clone();
    let mut kernels = vec![ObsKernel::Gaussian {
        mean: MeanRef::State,
        std_dev: 1.0,
    }];
    for i in 1..n {
        kernels.push(ObsKernel::Gaussian {
            mean: MeanRef::Action(i - 1),
            std_dev: 1.0,
        });
    }
    let ws = weights.clone();
    TeamProblem::new(
        true,
        kernels,
        Arc::new(move |x, _y, u| {
            let mut c = (u[u.len() - 1] - x).powi(2);
            for (i, l) in ws.iter().enumerate() {
                c += l * u[i] * u[i];
            }
            c
        }),
        ProblemKind::Relay { weights },
    )
}

pub fn make_radner(spec: &RadnerSpec) -> Result<TeamProblem> {
    if !(spec.r > 0.0 && spec.r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "regularizer must be positive for strict convexity, got {}",
            spec.r
        )));
    }
    let r = spec.r;
    TeamProblem::new(
        true,
        vec![
            ObsKernel::Gaussian {
                mean: MeanRef::State,
                std_dev: 1.0,
            },
            ObsKernel::Gaussian {
                mean: MeanRef::State,
                std_dev: 1.0,
            },
        ],
        Arc::new(move |x, _y, u| {
            (x - u[0] - u[1]).powi(2) + r * (u[0] * u[0] + u[1] * u[1])
        }),
        ProblemKind::Radner { r },
    )
}
