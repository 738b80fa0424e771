//! Brute-force maximization of `I(S; X | Q1)` over lattice input laws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{entropy_modulus, simplex_grid, simplex_grid_size, GridSpec};
use crate::channel::{ContextModel, SemanticChannel};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCapacity {
    pub rate: f64,
    /// Upper bound on how far `rate` can sit below the true maximum.
    pub gap: f64,
    /// Best lattice input law per sender context `(q0, q1t)`, row-major.
    pub input: Vec<Vec<f64>>,
    pub points_evaluated: u64,
}

/// `I(S; X)` in bits for input `p` through rows `w[s][x]`.
pub(crate) fn mutual_info(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let nx = w[0].len();
    let mut total = 0.0;
    for x in 0..nx {
        let qx: f64 = p.iter().zip(w).map(|(ps, row)| ps * row[x]).sum();
        for (ps, row) in p.iter().zip(w) {
            let j = ps * row[x];
            if j > 0.0 {
                total += j * (row[x] / qx).log2();
            }
        }
    }
    total.max(0.0)
}

/// Maximum of `I(S; X | Q1)` over the product of per-context lattices.
///
/// The objective is a `p(q1)`-weighted sum of one term per sender context, so
/// the product maximum is the sum of the per-context maxima; each context's
/// lattice is scanned in full. The gap combines entropy continuity bounds for
/// `H(X | q1)` and `H(X | S, q1)` at the lattice's covering radius.
pub fn exhaustive_capacity<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    grid: &GridSpec,
) -> Result<OracleCapacity> {
    grid.validate()?;
    ch.check_against(ctx)?;
    let ns = ch.s().size();
    let nx = ch.x().size();
    let pq1 = ctx.sender_marginal();
    let (n0, n1) = (ctx.q0().size(), ctx.q1_extra().size());
    let per = simplex_grid_size(ns, grid.resolution).unwrap_or(u64::MAX);
    let points = per.saturating_mul((n0 * n1) as u64);
    if points > grid.budget {
        return Err(Error::Resource(format!(
            "exhaustive capacity needs {points} evaluations, budget is {}",
            grid.budget
        )));
    }
    let lattice = simplex_grid(ns, grid.resolution)?;
    let t = grid.tv_radius(ns);
    let per_context_gap = entropy_modulus(t, nx) + t * (nx as f64).log2();

    let mut rate = 0.0;
    let mut gap = 0.0;
    let mut input = Vec::with_capacity(n0 * n1);
    for a in 0..n0 {
        for b in 0..n1 {
            let w: Vec<Vec<f64>> = (0..ns)
                .map(|s| ch.row(a, b, s).iter().map(|v| v.as_f64()).collect())
                .collect();
            let (best, idx) = lattice
                .par_iter()
                .enumerate()
                .map(|(i, p)| (mutual_info(p, &w), i))
                .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
            let weight = pq1[a * n1 + b].as_f64();
            rate += weight * best;
            gap += weight * per_context_gap;
            input.push(lattice[idx].clone());
        }
    }
    Ok(OracleCapacity {
        rate,
        gap,
        input,
        points_evaluated: points,
    })
}

/// Larger value wins; equal values go to the lower index.
pub(crate) fn pick_max(x: (f64, usize), y: (f64, usize)) -> (f64, usize) {
    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
        y
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn binary_channel(rows: Vec<Vec<f64>>) -> (SemanticChannel<f64>, ContextModel<f64>) {
        let ctx = ContextModel::trivial();
        let ch = SemanticChannel::context_free(
            &ctx,
            Alphabet::indexed("s", rows.len()).unwrap(),
            Alphabet::indexed("x", rows[0].len()).unwrap(),
            &rows,
        )
        .unwrap();
        (ch, ctx)
    }

    #[test]
    fn identity_is_one_bit() {
        let (ch, ctx) = binary_channel(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = exhaustive_capacity(&ch, &ctx, &GridSpec::new(101, 2)).unwrap();
        assert!((r.rate - 1.0).abs() < 1e-4);
        assert_eq!(r.input[0], vec![0.5, 0.5]);
    }

    #[test]
    fn constant_channel_is_exactly_zero() {
        let (ch, ctx) = binary_channel(vec![vec![0.3, 0.7], vec![0.3, 0.7]]);
        let r = exhaustive_capacity(&ch, &ctx, &GridSpec::new(51, 2)).unwrap();
        assert_eq!(r.rate, 0.0);
    }

    #[test]
    fn z_channel_value() {
        // optimum of the Z channel with crossover 1/2 is log2(5/4)
        let (ch, ctx) = binary_channel(vec![vec![1.0, 0.0], vec![0.5, 0.5]]);
        let r = exhaustive_capacity(&ch, &ctx, &GridSpec::new(201, 2)).unwrap();
        assert!((r.rate - 1.25f64.log2()).abs() < 1e-4, "{}", r.rate);
        assert!(r.gap > 0.0);
    }

    #[test]
    fn budget_is_enforced() {
        let (ch, ctx) = binary_channel(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let mut g = GridSpec::new(101, 2);
        g.budget = 10;
        assert!(matches!(exhaustive_capacity(&ch, &ctx, &g), Err(Error::Resource(_))));
    }
}
