//! Search over auxiliary schemes `(p(u | q1), f)` for the best scenario rate.
//!
//! For a fixed map `f` every scenario's expression collapses to
//! `H(U | Q0, Q1t) - H(U | X, Q0, Q2t)` once the scenario's degenerate
//! components are taken into account, so one objective and its gradient serve
//! all four cases. Maps are enumerated lexicographically (or sampled when the
//! space is over budget) and, per map, `p(u | q1)` is improved by multi-start
//! projected gradient ascent.

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use super::rate::{evaluate_rate, Argmax, RateReport, TraceEntry};
use super::simplex::project_to_simplex;
use crate::channel::{require_scenario, AuxiliaryScheme, ContextModel, Scenario, SemanticChannel, U};
use crate::error::{config_err, Error, Result};
use crate::prob::{Alphabet, CondPmf};
use crate::scalar::Real;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Auxiliary alphabet size; `None` means `|S| * |Q1| + 1`.
    pub u_size: Option<usize>,
    /// Most maps `f` to visit.
    pub max_maps: u64,
    /// Sample maps at random when the full space exceeds `max_maps`.
    pub allow_sampling: bool,
    pub restarts: usize,
    pub max_steps: usize,
    /// Step size at iteration `t` is `step0 / sqrt(t)`.
    pub step0: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            u_size: None,
            max_maps: 1 << 12,
            allow_sampling: true,
            restarts: 16,
            max_steps: 2000,
            step0: 0.5,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_u_size(mut self, u: usize) -> Self {
        self.u_size = Some(u);
        self
    }
}

/// Default auxiliary alphabet size `|S| * |Q1| + 1`.
pub fn default_u_size<T: Real>(ch: &SemanticChannel<T>, ctx: &ContextModel<T>) -> usize {
    ch.s().size() * ctx.num_sender_contexts() + 1
}

/// The rate objective for one fixed map `f`, as a function of `p(u | q1)`.
#[derive(Debug, Clone)]
pub(crate) struct FixedMapObjective<T> {
    nu: usize,
    nx: usize,
    nq2: usize,
    pq1: Vec<T>,
    /// `(q1, q2, p(q0, q1t, q2t))` for every context cell with mass.
    cells: Vec<(usize, usize, T)>,
    /// `W(x | f(u, q1), q1)`, laid out `[q1][u][x]`.
    law: Vec<T>,
}

impl<T: Real> FixedMapObjective<T> {
    pub fn new(ch: &SemanticChannel<T>, ctx: &ContextModel<T>, nu: usize, f: &[usize]) -> Self {
        let (n0, n1, n2) = (ctx.q0().size(), ctx.q1_extra().size(), ctx.q2_extra().size());
        let nx = ch.x().size();
        let mut cells = Vec::new();
        for a in 0..n0 {
            for b in 0..n1 {
                for c in 0..n2 {
                    let p = ctx.prob(a, b, c);
                    if p > T::zero() {
                        cells.push((a * n1 + b, a * n2 + c, p));
                    }
                }
            }
        }
        let mut law = Vec::with_capacity(n0 * n1 * nu * nx);
        for a in 0..n0 {
            for b in 0..n1 {
                for u in 0..nu {
                    let s = f[(a * n1 + b) * nu + u];
                    law.extend_from_slice(ch.row(a, b, s));
                }
            }
        }
        Self {
            nu,
            nx,
            nq2: n0 * n2,
            pq1: ctx.sender_marginal(),
            cells,
            law,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.pq1.len()
    }

    /// Objective value; fills `grad` (same layout as `a`) when given.
    pub fn eval(&self, a: &[T], grad: Option<&mut [T]>, buf: &mut Vec<T>) -> T {
        let (nu, nx) = (self.nu, self.nx);
        buf.clear();
        buf.resize(self.nq2 * nu * nx + self.nq2 * nx, T::zero());
        let (pux, px) = buf.split_at_mut(self.nq2 * nu * nx);
        for &(q1, q2, c) in &self.cells {
            for u in 0..nu {
                let w = c * a[q1 * nu + u];
                if w == T::zero() {
                    continue;
                }
                let row = &self.law[(q1 * nu + u) * nx..(q1 * nu + u + 1) * nx];
                let out = &mut pux[(q2 * nu + u) * nx..(q2 * nu + u + 1) * nx];
                for x in 0..nx {
                    out[x] = out[x] + w * row[x];
                }
            }
        }
        for q2 in 0..self.nq2 {
            for u in 0..nu {
                for x in 0..nx {
                    px[q2 * nx + x] = px[q2 * nx + x] + pux[(q2 * nu + u) * nx + x];
                }
            }
        }
        // H(U | Q1)
        let mut h_u_q1 = T::zero();
        for (q1, &p) in self.pq1.iter().enumerate() {
            if p > T::zero() {
                h_u_q1 = h_u_q1 - p * a[q1 * nu..(q1 + 1) * nu].iter().map(|v| v.xlog2x()).sum::<T>();
            }
        }
        // H(U | X, Q2)
        let mut h_u_xq2 = T::zero();
        for q2 in 0..self.nq2 {
            for u in 0..nu {
                for x in 0..nx {
                    let p = pux[(q2 * nu + u) * nx + x];
                    if p > T::zero() {
                        h_u_xq2 = h_u_xq2 - p * (p / px[q2 * nx + x]).log2();
                    }
                }
            }
        }
        if let Some(g) = grad {
            let floor = T::lit(1e-12);
            let log2e = T::lit(std::f64::consts::LOG2_E);
            for (q1, &p) in self.pq1.iter().enumerate() {
                for u in 0..nu {
                    g[q1 * nu + u] = if p > T::zero() {
                        -p * (a[q1 * nu + u].max(floor).log2() + log2e)
                    } else {
                        T::zero()
                    };
                }
            }
            for &(q1, q2, c) in &self.cells {
                for u in 0..nu {
                    let row = &self.law[(q1 * nu + u) * nx..(q1 * nu + u + 1) * nx];
                    let mut acc = T::zero();
                    for x in 0..nx {
                        if row[x] > T::zero() {
                            let post = pux[(q2 * nu + u) * nx + x].max(floor) / px[q2 * nx + x].max(floor);
                            acc = acc + row[x] * post.log2();
                        }
                    }
                    g[q1 * nu + u] = g[q1 * nu + u] + c * acc;
                }
            }
        }
        h_u_q1 - h_u_xq2
    }

    /// Multi-start projected ascent; returns the best value seen and its point.
    pub fn ascend(&self, cfg: &SearchConfig, seed: u64) -> (T, Vec<T>, Vec<T>) {
        let nu = self.nu;
        let rows = self.num_rows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = Vec::new();
        let mut grad = vec![T::zero(); rows * nu];
        let mut best = (T::neg_infinity(), vec![T::zero(); rows * nu]);
        let mut per_restart = Vec::with_capacity(cfg.restarts);
        for r in 0..cfg.restarts.max(1) {
            let mut a: Vec<T> = if r == 0 {
                vec![T::one() / T::from_usize(nu).unwrap(); rows * nu]
            } else {
                let mut v: Vec<T> = (0..rows * nu)
                    .map(|_| T::lit(-(1.0 - rng.random::<f64>()).ln()))
                    .collect();
                for row in v.chunks_mut(nu) {
                    let s: T = row.iter().copied().sum();
                    row.iter_mut().for_each(|x| *x = *x / s);
                }
                v
            };
            let mut run_best = self.eval(&a, None, &mut buf);
            let mut run_arg = a.clone();
            for t in 1..=cfg.max_steps {
                self.eval(&a, Some(&mut grad), &mut buf);
                let eta = T::lit(cfg.step0 / (t as f64).sqrt());
                let mut moved = T::zero();
                for q1 in 0..rows {
                    let p = self.pq1[q1];
                    if p <= T::zero() {
                        continue;
                    }
                    let row = &mut a[q1 * nu..(q1 + 1) * nu];
                    let old: Vec<T> = row.to_vec();
                    for u in 0..nu {
                        row[u] = row[u] + eta * grad[q1 * nu + u] / p;
                    }
                    project_to_simplex(row);
                    for (o, n) in old.iter().zip(row.iter()) {
                        moved = moved.max((*o - *n).abs());
                    }
                }
                let v = self.eval(&a, None, &mut buf);
                if v > run_best {
                    run_best = v;
                    run_arg.copy_from_slice(&a);
                }
                if moved < T::lit(1e-13) {
                    break;
                }
            }
            per_restart.push(run_best);
            if run_best > best.0 {
                best = (run_best, run_arg);
            }
        }
        (best.0, best.1, per_restart)
    }
}

/// Digits of map number `index` in base `base`, most significant first.
pub(crate) fn map_digits(mut index: u128, base: usize, cells: usize) -> Vec<usize> {
    let mut d = vec![0; cells];
    for slot in d.iter_mut().rev() {
        *slot = (index % base as u128) as usize;
        index /= base as u128;
    }
    d
}

/// `base^cells`, or `None` on overflow.
pub(crate) fn map_count(base: usize, cells: usize) -> Option<u128> {
    (base as u128).checked_pow(u32::try_from(cells).ok()?)
}

fn digits_seed(seed: u64, digits: &[usize]) -> u64 {
    let words: Vec<u64> = digits.iter().map(|d| *d as u64).collect();
    derive_seed(seed, &words)
}

/// Candidate maps in visiting order, plus whether the list is exhaustive.
fn candidate_maps(ns: usize, cells: usize, cfg: &SearchConfig) -> Result<(Vec<Vec<usize>>, bool)> {
    let total = map_count(ns, cells);
    match total {
        Some(t) if t <= cfg.max_maps as u128 => {
            Ok(((0..t).map(|i| map_digits(i, ns, cells)).collect(), true))
        }
        _ if !cfg.allow_sampling => Err(Error::Resource(format!(
            "{ns}^{cells} deterministic maps exceed the budget of {} and sampling is disabled",
            cfg.max_maps
        ))),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x6d61_7073]));
            let mut maps: Vec<Vec<usize>> = Vec::with_capacity(cfg.max_maps as usize);
            // always try the "u mod |S|" map, which embeds a direct input law
            maps.push((0..cells).map(|i| i % ns).collect());
            while (maps.len() as u64) < cfg.max_maps {
                maps.push((0..cells).map(|_| rng.random_range(0..ns)).collect());
            }
            maps.sort();
            maps.dedup();
            Ok((maps, false))
        }
    }
}

/// Best scheme rate over maps `f` and laws `p(u | q1)`.
pub fn optimize_rate<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scenario: Scenario,
    cfg: &SearchConfig,
) -> Result<RateReport<T>> {
    require_scenario(ctx, scenario)?;
    ch.check_against(ctx)?;
    let nu = cfg.u_size.unwrap_or_else(|| default_u_size(ch, ctx));
    if nu == 0 {
        return Err(config_err!("auxiliary alphabet size must be at least 1"));
    }
    let ns = ch.s().size();
    let rows = ctx.num_sender_contexts();
    let cells = rows * nu;
    let (maps, exhaustive) = candidate_maps(ns, cells, cfg)?;

    let results: Vec<(T, usize, Vec<T>, Vec<T>)> = maps
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let obj = FixedMapObjective::new(ch, ctx, nu, f);
            let (v, a, runs) = obj.ascend(cfg, digits_seed(cfg.seed, f));
            (v, i, a, runs)
        })
        .collect();
    let (best_val, best_i, best_a, runs) = results
        .into_iter()
        .max_by(|x, y| match x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal) {
            // earlier map wins ties
            Ordering::Equal => y.1.cmp(&x.1),
            o => o,
        })
        .expect("at least one candidate map");

    let u = Alphabet::indexed(U, nu)?;
    let law = CondPmf::new(vec![ctx.q0().clone(), ctx.q1_extra().clone()], u, best_a)?;
    let scheme = AuxiliaryScheme::new(law, ch.s().clone(), maps[best_i].clone())?;
    let mut report = evaluate_rate(ch, ctx, &scheme, scenario)?;
    debug_assert!((report.rate_bits - best_val).abs() < T::lit(1e-6));
    let mut trace: Vec<TraceEntry> = runs
        .iter()
        .enumerate()
        .map(|(i, v)| TraceEntry {
            stage: "restart".to_string(),
            iteration: i,
            value: v.as_f64(),
        })
        .collect();
    trace.push(TraceEntry {
        stage: "maps_visited".to_string(),
        iteration: maps.len(),
        value: best_val.as_f64(),
    });
    report.optimizer_trace = trace;
    report.argmax = Argmax::Scheme(scheme);
    report.exhaustive = Some(exhaustive);
    Ok(report)
}
