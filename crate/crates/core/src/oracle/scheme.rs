//! Brute-force search over deterministic maps and lattice laws `p(u | q1)`.

use rayon::prelude::*;

use super::capacity::pick_max;
use super::grid::{entropy_modulus, simplex_grid, simplex_grid_size, GridSpec};
use crate::channel::{require_scenario, AuxiliaryScheme, ContextModel, Scenario, SemanticChannel, U};
use crate::error::{Error, Result};
use crate::prob::{Alphabet, CondPmf};
use crate::scalar::Real;
use crate::solver::{evaluate_rate, map_count, map_digits, RateReport, TraceEntry};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScheme<T> {
    /// Report for the best lattice scheme, recomputed by the library evaluator.
    pub report: RateReport<T>,
    /// The same rate from the oracle's own plug-in evaluation.
    pub plugin_rate: f64,
    /// Upper bound on how far the lattice maximum can sit below the true one.
    pub gap: f64,
    pub evaluations: u64,
}

fn h(v: &[f64]) -> f64 {
    -v.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Plug-in rate of one scheme, computed directly from the scenario's mutual-information terms.
#[derive(Clone)]
struct PlugIn {
    n0: usize,
    n1: usize,
    n2: usize,
    nu: usize,
    nx: usize,
    scenario: Scenario,
    /// `p(q0, q1t, q2t)`.
    pc: Vec<f64>,
    h_q0: f64,
    h_q01: f64,
    h_q02: f64,
    // scratch
    uq01: Vec<f64>,
    uq02: Vec<f64>,
    xq02: Vec<f64>,
    uxq02: Vec<f64>,
    uq0: Vec<f64>,
}

impl PlugIn {
    fn new<T: Real>(ctx: &ContextModel<T>, nu: usize, nx: usize, scenario: Scenario) -> Self {
        let (n0, n1, n2) = (ctx.q0().size(), ctx.q1_extra().size(), ctx.q2_extra().size());
        let pc: Vec<f64> = ctx.joint().probs().iter().map(|v| v.as_f64()).collect();
        let mut q0 = vec![0.0; n0];
        let mut q01 = vec![0.0; n0 * n1];
        let mut q02 = vec![0.0; n0 * n2];
        for a in 0..n0 {
            for b in 0..n1 {
                for c in 0..n2 {
                    let p = pc[(a * n1 + b) * n2 + c];
                    q0[a] += p;
                    q01[a * n1 + b] += p;
                    q02[a * n2 + c] += p;
                }
            }
        }
        Self {
            n0,
            n1,
            n2,
            nu,
            nx,
            scenario,
            h_q0: h(&q0),
            h_q01: h(&q01),
            h_q02: h(&q02),
            pc,
            uq01: vec![0.0; n0 * n1 * nu],
            uq02: vec![0.0; n0 * n2 * nu],
            xq02: vec![0.0; n0 * n2 * nx],
            uxq02: vec![0.0; n0 * n2 * nu * nx],
            uq0: vec![0.0; n0 * nu],
        }
    }

    /// `a[(q0, q1t)][u]`, `law[((q0, q1t), u)][x] = W(x | f(u, q0, q1t), q0, q1t)`.
    fn rate(&mut self, a: &[&[f64]], law: &[f64]) -> f64 {
        let (n1, n2, nu, nx) = (self.n1, self.n2, self.nu, self.nx);
        for v in [&mut self.uq01, &mut self.uq02, &mut self.xq02, &mut self.uxq02, &mut self.uq0] {
            v.iter_mut().for_each(|p| *p = 0.0);
        }
        for q0 in 0..self.n0 {
            for q1 in 0..n1 {
                let r = q0 * n1 + q1;
                for q2 in 0..n2 {
                    let pc = self.pc[r * n2 + q2];
                    if pc == 0.0 {
                        continue;
                    }
                    let k = q0 * n2 + q2;
                    for u in 0..nu {
                        let pu = pc * a[r][u];
                        if pu == 0.0 {
                            continue;
                        }
                        self.uq01[r * nu + u] += pu;
                        self.uq02[k * nu + u] += pu;
                        self.uq0[q0 * nu + u] += pu;
                        let row = &law[(r * nu + u) * nx..][..nx];
                        for x in 0..nx {
                            let p = pu * row[x];
                            self.xq02[k * nx + x] += p;
                            self.uxq02[(k * nu + u) * nx + x] += p;
                        }
                    }
                }
            }
        }
        let h_uq0 = h(&self.uq0);
        let i_ux_q2 = h(&self.uq02) + h(&self.xq02) - h(&self.uxq02) - self.h_q02;
        let i_uq1 = h_uq0 + self.h_q01 - h(&self.uq01) - self.h_q0;
        let i_uq2 = h_uq0 + self.h_q02 - h(&self.uq02) - self.h_q0;
        match self.scenario {
            Scenario::FullShared => i_ux_q2,
            Scenario::SenderKnowsMore => i_ux_q2 - i_uq1,
            Scenario::ReceiverKnowsMore => i_ux_q2 + i_uq2,
            Scenario::PartialShared => i_ux_q2 + i_uq2 - i_uq1,
        }
    }

    /// Continuity bound on the rate at joint total-variation distance `t`.
    fn gap(&self, t: f64) -> f64 {
        let (n0, n1, n2, nu, nx) = (self.n0, self.n1, self.n2, self.nu, self.nx);
        let ux = entropy_modulus(t, nu * n0 * n2) + entropy_modulus(t, nx * n0 * n2) + entropy_modulus(t, nu * nx * n0 * n2);
        let q1 = entropy_modulus(t, nu * n0) + entropy_modulus(t, nu * n0 * n1);
        let q2 = entropy_modulus(t, nu * n0) + entropy_modulus(t, nu * n0 * n2);
        match self.scenario {
            Scenario::FullShared => ux,
            Scenario::SenderKnowsMore => ux + q1,
            Scenario::ReceiverKnowsMore => ux + q2,
            Scenario::PartialShared => ux + q1 + q2,
        }
    }
}

/// Best rate over every deterministic map `f` and every lattice point of `p(u | q1)`.
///
/// Rates are computed by an independent plug-in evaluator; the winning scheme
/// is then re-evaluated by [`evaluate_rate`] for the returned report. Ties go
/// to the lowest `(map, point)` index in lexicographic order.
pub fn exhaustive_scheme_search<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scenario: Scenario,
    grid: &GridSpec,
) -> Result<OracleScheme<T>> {
    grid.validate()?;
    require_scenario(ctx, scenario)?;
    ch.check_against(ctx)?;
    let (ns, nx, nu) = (ch.s().size(), ch.x().size(), grid.u_size);
    let rows = ctx.num_sender_contexts();
    let cells = rows * nu;
    let too_big = || {
        Error::Resource(format!(
            "exhaustive scheme search over {ns}^{cells} maps at resolution {} exceeds the budget of {}",
            grid.resolution, grid.budget
        ))
    };
    let maps = map_count(ns, cells).and_then(|m| u64::try_from(m).ok()).ok_or_else(too_big)?;
    let per = simplex_grid_size(nu, grid.resolution).ok_or_else(too_big)?;
    let points = u32::try_from(rows).ok().and_then(|r| per.checked_pow(r)).ok_or_else(too_big)?;
    let evaluations = maps.checked_mul(points).filter(|e| *e <= grid.budget).ok_or_else(too_big)?;
    let lattice = simplex_grid(nu, grid.resolution)?;

    let w: Vec<f64> = ch.law().table().iter().map(|v| v.as_f64()).collect();
    let (n1, n0) = (ctx.q1_extra().size(), ctx.q0().size());
    let base = PlugIn::new(ctx, nu, nx, scenario);

    // per map: best (value, point index)
    let best_per_map: Vec<(f64, usize)> = (0..maps)
        .into_par_iter()
        .map(|m| {
            let f = map_digits(m as u128, ns, cells);
            let mut law = vec![0.0; cells * nx];
            for q0 in 0..n0 {
                for q1 in 0..n1 {
                    let r = q0 * n1 + q1;
                    for u in 0..nu {
                        let s = f[r * nu + u];
                        let src = &w[((r * ns) + s) * nx..][..nx];
                        law[(r * nu + u) * nx..][..nx].copy_from_slice(src);
                    }
                }
            }
            let mut eval = base.clone();
            let mut idx = vec![0usize; rows];
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for p in 0..points as usize {
                let a: Vec<&[f64]> = idx.iter().map(|i| lattice[*i].as_slice()).collect();
                let v = eval.rate(&a, &law);
                if v > best.0 {
                    best = (v, p);
                }
                // odometer, last row fastest
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < lattice.len() {
                        break;
                    }
                    *slot = 0;
                }
            }
            best
        })
        .collect();
    let (plugin_rate, best_map) = best_per_map
        .iter()
        .enumerate()
        .map(|(m, (v, _))| (*v, m))
        .reduce(pick_max)
        .expect("at least one map");
    let mut point = best_per_map[best_map].1;
    let mut idx = vec![0usize; rows];
    for slot in idx.iter_mut().rev() {
        *slot = point % lattice.len();
        point /= lattice.len();
    }

    let f = map_digits(best_map as u128, ns, cells);
    let table: Vec<T> = idx.iter().flat_map(|i| lattice[*i].iter().map(|v| T::lit(*v))).collect();
    let law = CondPmf::new(
        vec![ctx.q0().clone(), ctx.q1_extra().clone()],
        Alphabet::indexed(U, nu)?,
        table,
    )?;
    let scheme = AuxiliaryScheme::new(law, ch.s().clone(), f)?;
    let mut report = evaluate_rate(ch, ctx, &scheme, scenario)?;
    report.optimizer_trace = vec![TraceEntry {
        stage: "oracle_grid".to_string(),
        iteration: evaluations as usize,
        value: plugin_rate,
    }];
    report.exhaustive = Some(true);
    Ok(OracleScheme {
        report,
        plugin_rate,
        gap: base.gap(grid.tv_radius(nu)),
        evaluations,
    })
}
