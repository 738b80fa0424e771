#![allow(dead_code)]

use rand::Rng;
use semctx::channel::{AuxiliaryScheme, ContextModel, SemanticChannel};
use semctx::prob::{Alphabet, JointPmf};

pub fn bits(name: &str) -> Alphabet {
    Alphabet::indexed(name, 2).unwrap()
}

pub fn one_hot(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// Random point of the `k`-simplex with every entry bounded away from zero.
pub fn random_row<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|v| v / t).collect()
}

pub fn random_joint<R: Rng>(rng: &mut R, vars: Vec<Alphabet>) -> JointPmf<f64> {
    let n: usize = vars.iter().map(|a| a.size()).product();
    JointPmf::new(vars, random_row(rng, n)).unwrap()
}

/// Memory cell: free with probability `1 - p`, otherwise stuck at 0 or 1 with equal odds.
pub fn stuck_at(p: f64) -> (SemanticChannel<f64>, ContextModel<f64>) {
    let q1 = Alphabet::new("q1t", ["free", "stuck0", "stuck1"]).unwrap();
    let ctx = ContextModel::new(
        Alphabet::degenerate("q0"),
        q1.clone(),
        Alphabet::degenerate("q2t"),
        vec![1.0 - p, p / 2.0, p / 2.0],
    )
    .unwrap();
    let ch = SemanticChannel::from_fn(Alphabet::degenerate("q0"), q1, bits("s"), bits("x"), |_, b, s| match b {
        0 => one_hot(2, s),
        1 => one_hot(2, 0),
        _ => one_hot(2, 1),
    })
    .unwrap();
    (ch, ctx)
}

/// Write-through scheme for [`stuck_at`]: `u` uniform on free cells, equal to the defect otherwise.
pub fn stuck_at_scheme(ctx: &ContextModel<f64>) -> AuxiliaryScheme<f64> {
    AuxiliaryScheme::from_fns(
        ctx,
        bits("u"),
        bits("s"),
        |_, b| match b {
            0 => vec![0.5, 0.5],
            1 => one_hot(2, 0),
            _ => one_hot(2, 1),
        },
        |u, _, _| u,
    )
    .unwrap()
}

/// Shared context: noiseless when clear, pure noise when noisy.
pub fn context_bsc() -> (SemanticChannel<f64>, ContextModel<f64>) {
    let q0 = Alphabet::new("q0", ["clear", "noisy"]).unwrap();
    let ctx = ContextModel::shared(q0.clone(), vec![0.5, 0.5]).unwrap();
    let ch = SemanticChannel::from_fn(q0, Alphabet::degenerate("q1t"), bits("s"), bits("x"), |a, _, s| {
        if a == 0 {
            one_hot(2, s)
        } else {
            vec![0.5, 0.5]
        }
    })
    .unwrap();
    (ch, ctx)
}

pub fn bsc_row(e: f64, s: usize) -> Vec<f64> {
    if s == 0 {
        vec![1.0 - e, e]
    } else {
        vec![e, 1.0 - e]
    }
}

/// Binary shared, sender-private and receiver-private parts; `q2t = q1t` with probability 0.8.
pub fn partial_context() -> (SemanticChannel<f64>, ContextModel<f64>) {
    let ctx = ContextModel::from_fn(bits("q0"), bits("q1t"), bits("q2t"), |i| {
        let agree = if i[1] == i[2] { 0.8 } else { 0.2 };
        0.5 * 0.5 * agree
    })
    .unwrap();
    let cross = [[0.05, 0.2], [0.1, 0.3]];
    let ch = SemanticChannel::from_fn(bits("q0"), bits("q1t"), bits("s"), bits("x"), |a, b, s| bsc_row(cross[a][b], s))
        .unwrap();
    (ch, ctx)
}

/// All-binary channel with shared binary context and random rows.
pub fn random_binary_full_shared<R: Rng>(rng: &mut R) -> (SemanticChannel<f64>, ContextModel<f64>) {
    let pq = rng.random_range(0.1..0.9);
    let ctx = ContextModel::shared(bits("q0"), vec![pq, 1.0 - pq]).unwrap();
    let rows: Vec<Vec<f64>> = (0..4).map(|_| {
        let a = rng.random_range(0.0..1.0);
        vec![a, 1.0 - a]
    }).collect();
    let ch = SemanticChannel::from_fn(bits("q0"), Alphabet::degenerate("q1t"), bits("s"), bits("x"), |a, _, s| {
        rows[a * 2 + s].clone()
    })
    .unwrap();
    (ch, ctx)
}

pub fn random_scheme<R: Rng>(rng: &mut R, ctx: &ContextModel<f64>, nu: usize, ns: usize) -> AuxiliaryScheme<f64> {
    let rows: Vec<Vec<f64>> = (0..ctx.num_sender_contexts()).map(|_| random_row(rng, nu)).collect();
    let f: Vec<usize> = (0..ctx.num_sender_contexts() * nu).map(|_| rng.random_range(0..ns)).collect();
    let n1 = ctx.q1_extra().size();
    AuxiliaryScheme::from_fns(
        ctx,
        Alphabet::indexed("u", nu).unwrap(),
        Alphabet::indexed("s", ns).unwrap(),
        |a, b| rows[a * n1 + b].clone(),
        |u, a, b| f[(a * n1 + b) * nu + u],
    )
    .unwrap()
}
