//! Uniform observation quantizers with an overflow symbol, and finite action
//! grids with nested dyadic refinement.
//!
//! A quantizer with radius `l` and `n` levels partitions the granular region
//! `[-l, l)` into `n` half-open cells of width `tau = 2l/n` with the
//! representative at each cell midpoint; everything outside the granular
//! region maps to the overflow symbol at index 0 with representative 0.
//! Symbol indices are therefore `0 = overflow, 1..=n = cells left to right`.

use serde::{Deserialize, Serialize};

use crate::gauss::{std_normal_cdf, Interval};
use crate::{Error, Result};

/// Uniform scalar quantizer over `[-radius, radius)` plus overflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    radius: f64,
    /// Cell boundaries, length n+1; `bounds[0] = -radius`, `bounds[n] = radius`.
    bounds: Vec<f64>,
    /// Cell midpoints, length n.
    levels: Vec<f64>,
}

impl Quantizer {
    /// `n` equal cells of width `2*radius/n` on `[-radius, radius)`.
    pub fn uniform(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quantizer radius must be positive and finite, got {radius}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter(
                "quantizer needs at least one level".into(),
            ));
        }
        let tau = 2.0 * radius / n as f64;
        let mut bounds = Vec::with_capacity(n + 1);
        for j in 0..=n {
            bounds.push(-radius + j as f64 * tau);
        }
        bounds[n] = radius;
        let levels = (0..n).map(|j| 0.5 * (bounds[j] + bounds[j + 1])).collect();
        Ok(Self {
            radius,
            bounds,
            levels,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of granular cells (excluding the overflow symbol).
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Total symbol count including overflow.
    pub fn num_symbols(&self) -> usize {
        self.levels.len() + 1
    }

    /// Cell width `tau = 2*radius/n`.
    pub fn cell_width(&self) -> f64 {
        2.0 * self.radius / self.levels.len() as f64
    }

    /// Representative value of the overflow symbol.
    pub fn overflow_level(&self) -> f64 {
        0.0
    }

    /// Cell midpoints (granular symbols only, ascending).
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Representative of a symbol index (0 = overflow).
    pub fn level_of_symbol(&self, symbol: usize) -> f64 {
        if symbol == 0 {
            self.overflow_level()
        } else {
            self.levels[symbol - 1]
        }
    }

    /// The half-open granular cell of symbol `j >= 1`.
    pub fn cell(&self, j: usize) -> Interval {
        Interval {
            lo: self.bounds[j - 1],
            hi: self.bounds[j],
        }
    }

    /// All symbol representatives, overflow first.
    pub fn symbols(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_symbols());
        v.push(self.overflow_level());
        v.extend_from_slice(&self.levels);
        v
    }

    /// Map `y` to `(symbol index, representative)`; the granular region uses
    /// half-open cells so boundary points land in the right-hand cell, and
    /// everything outside `[-radius, radius)` maps to the overflow symbol.
    #[inline]
    pub fn quantize(&self, y: f64) -> (usize, f64) {
        if !(y >= -self.radius && y < self.radius) {
            return (0, self.overflow_level());
        }
        // Count interior boundaries <= y; boundary hits go right.
        let n = self.levels.len();
        let j = self.bounds[1..n].partition_point(|b| *b <= y);
        (j + 1, self.levels[j])
    }

    /// Per-symbol probabilities under N(0, scale^2), overflow first.
    /// The overflow entry is both Gaussian tails combined.
    pub fn cell_masses(&self, scale: f64) -> Result<Vec<f64>> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {scale}"
            )));
        }
        let n = self.levels.len();
        let mut masses = Vec::with_capacity(n + 1);
        let cdf = |x: f64| std_normal_cdf(x / scale);
        masses.push(cdf(-self.radius) + (1.0 - cdf(self.radius)));
        for j in 0..n {
            masses.push(cdf(self.bounds[j + 1]) - cdf(self.bounds[j]));
        }
        Ok(masses)
    }

    /// The pieces of a policy extended through this quantizer: overflow tails
    /// first (matching symbol 0), then the granular cells.
    pub fn pieces(&self) -> Vec<(Interval, usize)> {
        let n = self.levels.len();
        let mut v = Vec::with_capacity(n + 2);
        v.push((
            Interval {
                lo: f64::NEG_INFINITY,
                hi: -self.radius,
            },
            0,
        ));
        for j in 1..=n {
            v.push((self.cell(j), j));
        }
        v.push((
            Interval {
                lo: self.radius,
                hi: f64::INFINITY,
            },
            0,
        ));
        v
    }
}

/// Finite action set on `[-half_width, half_width]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionGrid {
    half_width: f64,
    points: Vec<f64>,
    nested: bool,
}

impl ActionGrid {
    /// `k` points on `[-m, m]`.
    ///
    /// With `nested = false` this is the midpoint uniform quantizer codebook
    /// (`k` cells of width `2m/k`, representatives at midpoints). With
    /// `nested = true` it is the endpoint-included dyadic grid
    /// `{-m + j*2m/2^t}` for the smallest `t >= 1` with `2^t + 1 >= k`, so
    /// doubling refinements contain their parent grid and 0 is always a grid
    /// point.
    pub fn new(half_width: f64, k: usize, nested: bool) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter(
                "action grid needs at least one point".into(),
            ));
        }
        let points = if nested {
            let mut t = 1usize;
            while (1usize << t) + 1 < k {
                t += 1;
            }
            let cells = 1usize << t;
            let step = 2.0 * half_width / cells as f64;
            (0..=cells).map(|j| -half_width + j as f64 * step).collect()
        } else {
            let step = 2.0 * half_width / k as f64;
            (0..k)
                .map(|j| -half_width + (j as f64 + 0.5) * step)
                .collect()
        };
        Ok(Self {
            half_width,
            points,
            nested,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nested(&self) -> bool {
        self.nested
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Grid point minimizing |u - point|; ties break toward the smaller point.
    pub fn nearest(&self, u: f64) -> f64 {
        let mut best = self.points[0];
        let mut best_d = (u - best).abs();
        for &p in &self.points[1..] {
            let d = (u - p).abs();
            if d < best_d {
                best = p;
                best_d = d;
            }
        }
        best
    }
}
