//! Built-in scenarios.

use crate::config::{
    key, AlphabetsConfig, CodecSettings, Expected, Provenance, ScenarioConfig, SchemeConfig, SearchSettings,
    SemanticMapConfig, Table,
};
use semctx::Scenario;
use std::collections::BTreeMap;

fn syms(s: &[&str]) -> Vec<String> {
    s.iter().map(|v| v.to_string()).collect()
}

fn expected(quantity: &str, value: f64, tolerance: f64, provenance: Provenance, basis: &str) -> Expected {
    Expected {
        quantity: quantity.into(),
        value,
        tolerance,
        provenance,
        basis: basis.into(),
    }
}

fn codec(n: usize, rate: f64, rate_tilde: f64, epsilon: f64) -> Option<CodecSettings> {
    Some(CodecSettings {
        n,
        rate,
        rate_tilde,
        epsilon,
        trials: 10_000,
        block_size: None,
        seed: Some(1),
    })
}

/// Conditioning symbols and the two output probabilities of one row.
type BinaryRow<'a> = (&'a [(&'a str, &'a str)], [f64; 2]);

fn binary_rows(rows: &[BinaryRow]) -> Table {
    let mut t = Table::new();
    for (given, p) in rows {
        for (x, v) in ["0", "1"].iter().zip(p) {
            let mut k: Vec<(&str, &str)> = given.to_vec();
            k.push(("x", x));
            t.insert(key(&k), *v);
        }
    }
    t
}

/// A word whose meaning depends on whether the conversation is about the
/// calendar or about food; context removes all ambiguity.
pub fn date_polysemy() -> ScenarioConfig {
    let cells: [(&str, &str, &str, f64); 6] = [
        ("day", "date", "calendar", 0.46),
        ("day", "day-of-month", "calendar", 0.02),
        ("fruit", "palm-fruit", "calendar", 0.02),
        ("fruit", "date", "food", 0.46),
        ("fruit", "palm-fruit", "food", 0.02),
        ("day", "day-of-month", "food", 0.02),
    ];
    let joint: Table = cells
        .iter()
        .map(|(w, m, q, p)| (key(&[("w", w), ("m", m), ("q", q)]), *p))
        .collect();
    // channel p(m | w, q) of the induced semantic channel
    let mut channel = Table::new();
    for q in ["calendar", "food"] {
        for w in ["day", "fruit"] {
            let row: Vec<_> = cells.iter().filter(|c| c.0 == w && c.2 == q).collect();
            let total: f64 = row.iter().map(|c| c.3).sum();
            for m in ["date", "day-of-month", "palm-fruit"] {
                let p = row.iter().find(|c| c.1 == m).map_or(0.0, |c| c.3 / total);
                channel.insert(key(&[("q0", q), ("s", w), ("x", m)]), p);
            }
        }
    }
    ScenarioConfig {
        id: "date-polysemy".into(),
        description: "The message `date` names a calendar day or a palm fruit; the conversation topic disambiguates it.".into(),
        scenario: Scenario::FullShared,
        alphabets: AlphabetsConfig {
            q0: Some(syms(&["calendar", "food"])),
            q1t: None,
            q2t: None,
            s: syms(&["day", "fruit"]),
            x: syms(&["date", "day-of-month", "palm-fruit"]),
        },
        context: Table::from([(key(&[("q0", "calendar")]), 0.5), (key(&[("q0", "food")]), 0.5)]),
        channel,
        search: Some(SearchSettings {
            u_size: Some(2),
            ..Default::default()
        }),
        scheme: None,
        semantic_map: Some(SemanticMapConfig {
            w: syms(&["day", "fruit"]),
            m: syms(&["date", "day-of-month", "palm-fruit"]),
            q: syms(&["calendar", "food"]),
            joint,
        }),
        codec: codec(16, 0.25, 0.5, 0.9),
        expected: vec![
            expected(
                "ambiguity_bits",
                0.92,
                1e-9,
                Provenance::Derived,
                "H(W|M) evaluated directly: only `date` is ambiguous, P(date) = 0.92 with an even split",
            ),
            expected("residual_ambiguity_bits", 0.0, 1e-9, Provenance::Trivial, "every (message, topic) pair has one meaning"),
            expected("rate_bits", 1.0, 1e-6, Provenance::Trivial, "per topic the two meanings use disjoint messages"),
        ],
    }
}

/// Memory cells that are free, stuck at 0 or stuck at 1; only the writer sees the defects.
pub fn stuck_at_memory() -> ScenarioConfig {
    let p = 0.5;
    let states = ["free", "stuck0", "stuck1"];
    let mut channel = Table::new();
    for q in states {
        for s in ["0", "1"] {
            let out = match q {
                "free" => s,
                "stuck0" => "0",
                _ => "1",
            };
            for x in ["0", "1"] {
                channel.insert(key(&[("q1t", q), ("s", s), ("x", x)]), if x == out { 1.0 } else { 0.0 });
            }
        }
    }
    let mut pu = Table::new();
    let mut f = BTreeMap::new();
    for q in states {
        for u in ["0", "1"] {
            let v = match (q, u) {
                ("free", _) => 0.5,
                ("stuck0", "0") | ("stuck1", "1") => 1.0,
                _ => 0.0,
            };
            pu.insert(key(&[("q1t", q), ("u", u)]), v);
            f.insert(key(&[("q1t", q), ("u", u)]), u.to_string());
        }
    }
    ScenarioConfig {
        id: "stuck-at-memory".into(),
        description: "Binary memory with defect probability 0.5, half stuck at 0 and half at 1; the writer knows the defect map, the reader does not.".into(),
        scenario: Scenario::SenderKnowsMore,
        alphabets: AlphabetsConfig {
            q0: None,
            q1t: Some(syms(&states)),
            q2t: None,
            s: syms(&["0", "1"]),
            x: syms(&["0", "1"]),
        },
        context: Table::from([
            (key(&[("q1t", "free")]), 1.0 - p),
            (key(&[("q1t", "stuck0")]), p / 2.0),
            (key(&[("q1t", "stuck1")]), p / 2.0),
        ]),
        channel,
        search: Some(SearchSettings {
            u_size: Some(3),
            ..Default::default()
        }),
        scheme: Some(SchemeConfig {
            u: syms(&["0", "1"]),
            pu,
            f,
        }),
        semantic_map: None,
        // codebook rate exceeds the message rate by 1.2 I(U;Q1)
        codec: codec(16, 0.25, 0.85, 0.9),
        expected: vec![
            expected(
                "rate_bits",
                0.5,
                0.02,
                Provenance::Derived,
                "exhaustive search over all maps f and lattice laws p(u|q1) with |U| = 3",
            ),
            expected("scheme_rate_bits", 0.5, 1e-9, Provenance::Trivial, "shipped scheme: I(U;X) = 1, I(U;Q1) = 0.5"),
            expected("i_u_q1_bits", 0.5, 1e-9, Provenance::Trivial, "H(U) = 1, H(U|Q1) = 0.5"),
        ],
    }
}

/// Shared context switches between a clean binary channel and pure noise.
pub fn context_bsc() -> ScenarioConfig {
    let clear: &[(&str, [f64; 2])] = &[("0", [1.0, 0.0]), ("1", [0.0, 1.0])];
    let mut rows = Vec::new();
    let given: Vec<Vec<(&str, &str)>> = ["clear", "noisy"]
        .iter()
        .flat_map(|q| ["0", "1"].map(|s| vec![("q0", *q), ("s", s)]))
        .collect();
    for g in &given {
        let p = if g[0].1 == "clear" {
            clear.iter().find(|c| c.0 == g[1].1).unwrap().1
        } else {
            [0.5, 0.5]
        };
        rows.push((g.as_slice(), p));
    }
    let mut pu = Table::new();
    let mut f = BTreeMap::new();
    for q in ["clear", "noisy"] {
        for u in ["0", "1"] {
            pu.insert(key(&[("q0", q), ("u", u)]), 0.5);
            f.insert(key(&[("q0", q), ("u", u)]), u.to_string());
        }
    }
    ScenarioConfig {
        id: "context-bsc".into(),
        description: "Both ends see whether the link is clear (noiseless) or noisy (crossover 1/2), each half of the time.".into(),
        scenario: Scenario::FullShared,
        alphabets: AlphabetsConfig {
            q0: Some(syms(&["clear", "noisy"])),
            q1t: None,
            q2t: None,
            s: syms(&["0", "1"]),
            x: syms(&["0", "1"]),
        },
        context: Table::from([(key(&[("q0", "clear")]), 0.5), (key(&[("q0", "noisy")]), 0.5)]),
        channel: binary_rows(&rows),
        search: None,
        scheme: Some(SchemeConfig {
            u: syms(&["0", "1"]),
            pu,
            f,
        }),
        semantic_map: None,
        codec: codec(16, 0.25, 0.25, 0.9),
        expected: vec![expected("rate_bits", 0.5, 1e-6, Provenance::Trivial, "1/2 bit from the clear state, none from the noisy one")],
    }
}

/// Shared topic plus a private hint on each side; the receiver's hint agrees with the sender's 80% of the time.
pub fn partial_context() -> ScenarioConfig {
    let cross = [[0.05, 0.2], [0.1, 0.3]];
    let b = ["0", "1"];
    let mut context = Table::new();
    let mut rows_owned = Vec::new();
    let mut pu = Table::new();
    let mut f = BTreeMap::new();
    for (a, qa) in b.iter().enumerate() {
        for (c, qc) in b.iter().enumerate() {
            for (d, qd) in b.iter().enumerate() {
                context.insert(
                    key(&[("q0", qa), ("q1t", qc), ("q2t", qd)]),
                    0.25 * if c == d { 0.8 } else { 0.2 },
                );
            }
            for (s, qs) in b.iter().enumerate() {
                let e = cross[a][c];
                let row = if s == 0 { [1.0 - e, e] } else { [e, 1.0 - e] };
                rows_owned.push((vec![("q0", *qa), ("q1t", *qc), ("s", *qs)], row));
            }
            for u in b {
                pu.insert(key(&[("q0", qa), ("q1t", qc), ("u", u)]), 0.5);
                f.insert(key(&[("q0", qa), ("q1t", qc), ("u", u)]), u.to_string());
            }
        }
    }
    let rows: Vec<BinaryRow> = rows_owned.iter().map(|(g, p)| (g.as_slice(), *p)).collect();
    ScenarioConfig {
        id: "partial-context".into(),
        description: "Binary channel whose crossover depends on a shared topic and a sender-private state; the receiver holds a noisy copy of that state.".into(),
        scenario: Scenario::PartialShared,
        alphabets: AlphabetsConfig {
            q0: Some(syms(&b)),
            q1t: Some(syms(&b)),
            q2t: Some(syms(&b)),
            s: syms(&b),
            x: syms(&b),
        },
        context,
        channel: binary_rows(&rows),
        search: Some(SearchSettings {
            u_size: Some(2),
            ..Default::default()
        }),
        scheme: Some(SchemeConfig {
            u: syms(&b),
            pu,
            f,
        }),
        semantic_map: None,
        codec: codec(16, 0.1, 0.1, 0.9),
        expected: vec![expected(
            "scheme_rate_bits",
            0.382_282_711_729_508_45,
            1e-9,
            Provenance::Derived,
            "closed form for uniform U sent directly: 1 - mean over (q0, q2t) of h2(effective crossover)",
        )],
    }
}

/// Noiseless quaternary channel without context.
pub fn identity_4() -> ScenarioConfig {
    let s = ["a", "b", "c", "d"];
    let mut channel = Table::new();
    let mut pu = Table::new();
    let mut f = BTreeMap::new();
    for i in s {
        for o in s {
            channel.insert(key(&[("s", i), ("x", o)]), if i == o { 1.0 } else { 0.0 });
        }
        pu.insert(key(&[("u", i)]), 0.25);
        f.insert(key(&[("u", i)]), i.to_string());
    }
    ScenarioConfig {
        id: "identity-4".into(),
        description: "Noiseless channel on four symbols, no context.".into(),
        scenario: Scenario::FullShared,
        alphabets: AlphabetsConfig {
            q0: None,
            q1t: None,
            q2t: None,
            s: syms(&s),
            x: syms(&s),
        },
        context: Table::from([(key(&[("q0", crate::config::DEGENERATE_SYMBOL)]), 1.0)]),
        channel,
        search: None,
        scheme: Some(SchemeConfig {
            u: syms(&s),
            pu,
            f,
        }),
        semantic_map: None,
        codec: codec(16, 0.5, 0.75, 0.9),
        expected: vec![expected("rate_bits", 2.0, 1e-6, Provenance::Trivial, "log2 of the alphabet size")],
    }
}

pub fn entries() -> Vec<ScenarioConfig> {
    vec![date_polysemy(), stuck_at_memory(), context_bsc(), partial_context(), identity_4()]
}

pub fn entry(id: &str) -> Option<ScenarioConfig> {
    entries().into_iter().find(|e| e.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds_and_round_trips() {
        for e in entries() {
            let m = e.build().unwrap_or_else(|err| panic!("{}: {err}", e.id));
            assert!(semctx::validate_scenario(&m.ctx, m.scenario).ok, "{}", e.id);
            let text = e.to_toml();
            let back = ScenarioConfig::from_toml(&text).unwrap();
            assert_eq!(back, e);
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn expected_values_carry_provenance() {
        for e in entries() {
            assert!(!e.expected.is_empty(), "{}", e.id);
            assert!(e.expected.iter().all(|x| !x.basis.is_empty()));
        }
    }

    #[test]
    fn ids_are_unique() {
        let ids: std::collections::BTreeSet<_> = entries().into_iter().map(|e| e.id).collect();
        assert_eq!(ids.len(), entries().len());
    }
}
