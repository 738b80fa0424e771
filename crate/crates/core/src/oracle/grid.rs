//! Barycentric lattices on the probability simplex.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

/// Evaluations an oracle may perform before refusing with a resource error.
pub const DEFAULT_GRID_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per simplex edge; coordinates are multiples of `1 / (resolution - 1)`.
    pub resolution: usize,
    /// Auxiliary alphabet size for scheme searches.
    pub u_size: usize,
    /// Most objective evaluations allowed.
    pub budget: u64,
}

impl GridSpec {
    pub fn new(resolution: usize, u_size: usize) -> Self {
        Self {
            resolution,
            u_size,
            budget: DEFAULT_GRID_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(config_err!("grid resolution must be at least 2, got {}", self.resolution));
        }
        if self.u_size == 0 {
            return Err(config_err!("auxiliary alphabet size must be at least 1"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    /// Largest total-variation distance from any law on `k` points to the nearest lattice point.
    pub fn tv_radius(&self, k: usize) -> f64 {
        ((k / 2) as f64 * self.step()).min(1.0)
    }
}

/// Number of lattice points on the `k`-simplex at `resolution`: `C(resolution - 2 + k, k - 1)`.
pub fn simplex_grid_size(k: usize, resolution: usize) -> Option<u64> {
    if k == 0 || resolution < 2 {
        return Some(0);
    }
    let total = (resolution - 1) as u128;
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c.checked_mul(total + i)? / i;
    }
    u64::try_from(c).ok()
}

/// All lattice points on the `k`-simplex, each a composition of `resolution - 1`
/// scaled to sum to one, in lexicographic order of the integer parts.
pub fn simplex_grid(k: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(config_err!("simplex dimension must be at least 1"));
    }
    if resolution < 2 {
        return Err(config_err!("grid resolution must be at least 2, got {resolution}"));
    }
    let size = simplex_grid_size(k, resolution)
        .filter(|s| *s <= DEFAULT_GRID_BUDGET)
        .ok_or_else(|| Error::Resource(format!("simplex grid for k={k}, resolution={resolution} is too large")))?;
    let total = resolution - 1;
    let scale = 1.0 / total as f64;
    let mut out = Vec::with_capacity(size as usize);
    let mut parts = vec![0usize; k];
    parts[k - 1] = total;
    loop {
        out.push(parts.iter().map(|p| *p as f64 * scale).collect());
        // next composition in lexicographic order: bump the rightmost non-final
        // slot that still has mass to its right, then push the remainder last
        let Some(i) = (0..k - 1).rev().find(|&i| parts[i + 1..].iter().sum::<usize>() > 0) else {
            break;
        };
        parts[i] += 1;
        let used: usize = parts[..=i].iter().sum();
        for p in &mut parts[i + 1..] {
            *p = 0;
        }
        parts[k - 1] = total - used;
    }
    Ok(out)
}

/// Binary entropy in bits, with `h(t) = 1` for `t >= 1/2` so it stays monotone as a bound.
pub(crate) fn h2_bound(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 0.5 {
        1.0
    } else {
        -(t * t.log2() + (1.0 - t) * (1.0 - t).log2())
    }
}

/// Continuity bound for entropy on an alphabet of size `k` at total-variation distance `t`.
pub(crate) fn entropy_modulus(t: f64, k: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let t = t.min(1.0);
    t * ((k - 1) as f64).log2() + h2_bound(t)
}
