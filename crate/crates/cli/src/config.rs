//! Scenario files.
//!
//! A scenario is a TOML document with named alphabets and flat probability
//! tables whose keys are symbol tuples such as `"q0=clear,s=0,x=1"`. Axes with
//! a single symbol may be left out of keys; cells absent from a table have
//! probability zero. Tables are `BTreeMap`s, so writing a loaded file back out
//! reproduces it byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use semctx::channel::{Q0, Q1T, Q2T, S, U, X};
use semctx::prob::{Alphabet, ABSENT};
use semctx::semantic_map::{M, Q, W};
use semctx::solver::SearchConfig;
use semctx::{AuxiliaryScheme, ContextModel, Error, Scenario, SemanticChannel, SemanticMap};

use crate::error::CliError;

pub type Table = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub description: String,
    pub scenario: Scenario,
    pub alphabets: AlphabetsConfig,
    /// `p(q0, q1t, q2t)`.
    pub context: Table,
    /// `p(x | q0, q1t, s)`.
    pub channel: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_map: Option<SemanticMapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codec: Option<CodecSettings>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<Expected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1t: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2t: Option<Vec<String>>,
    pub s: Vec<String>,
    pub x: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_maps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub u: Vec<String>,
    /// `p(u | q0, q1t)`.
    pub pu: Table,
    /// `f(u, q0, q1t)` as a symbol of `s`.
    pub f: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticMapConfig {
    pub w: Vec<String>,
    pub m: Vec<String>,
    pub q: Vec<String>,
    /// `p(w, m, q)`.
    pub joint: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecSettings {
    pub n: usize,
    pub rate: f64,
    pub rate_tilde: f64,
    pub epsilon: f64,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Follows from the construction by inspection.
    Trivial,
    /// Computed by an independent method, named in `basis`.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
    pub basis: String,
}

/// Everything a scenario file describes, as library objects.
#[derive(Debug, Clone)]
pub struct Model {
    pub scenario: Scenario,
    pub ctx: ContextModel,
    pub channel: SemanticChannel,
    pub scheme: Option<AuxiliaryScheme>,
    pub semantic_map: Option<SemanticMap>,
}

/// `"a=x,b=y"` from name/symbol pairs.
pub fn key(parts: &[(&str, &str)]) -> String {
    parts
        .iter()
        .map(|(n, s)| format!("{n}={s}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn alphabet(name: &str, symbols: &Option<Vec<String>>) -> Result<Alphabet, Error> {
    match symbols {
        None => Ok(Alphabet::degenerate(name)),
        Some(s) => Alphabet::new(name, s.iter().cloned()),
    }
}

fn invalid(msg: String) -> Error {
    Error::Config(msg)
}

/// Resolve a tuple key to one index per axis of `vars`.
fn parse_key(table: &str, key: &str, vars: &[&Alphabet]) -> Result<Vec<usize>, Error> {
    let mut idx: Vec<Option<usize>> = vec![None; vars.len()];
    for part in key.split(',') {
        let (name, sym) = part
            .split_once('=')
            .ok_or_else(|| invalid(format!("{table}: key `{key}` has a component without `=`")))?;
        let (name, sym) = (name.trim(), sym.trim());
        let axis = vars
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| invalid(format!("{table}: key `{key}` names unknown variable `{name}`")))?;
        if idx[axis].is_some() {
            return Err(invalid(format!("{table}: key `{key}` repeats variable `{name}`")));
        }
        let i = vars[axis]
            .index_of(sym)
            .ok_or_else(|| invalid(format!("{table}: key `{key}` uses undeclared symbol `{sym}` of `{name}`")))?;
        idx[axis] = Some(i);
    }
    idx.into_iter()
        .zip(vars)
        .map(|(i, a)| match i {
            Some(i) => Ok(i),
            None if a.is_degenerate() => Ok(0),
            None => Err(invalid(format!("{table}: key `{key}` does not give `{}`", a.name()))),
        })
        .collect()
}

fn flat(idx: &[usize], vars: &[&Alphabet]) -> usize {
    idx.iter().zip(vars).fold(0, |acc, (i, a)| acc * a.size() + i)
}

fn label(idx: &[usize], vars: &[&Alphabet]) -> String {
    let parts: Vec<(&str, &str)> = idx
        .iter()
        .zip(vars)
        .filter(|(_, a)| !a.is_degenerate())
        .map(|(i, a)| (a.name(), a.symbol(*i)))
        .collect();
    if parts.is_empty() {
        "()".to_string()
    } else {
        key(&parts)
    }
}

fn unflat(mut r: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (o, d) in out.iter_mut().zip(dims).rev() {
        *o = r % d;
        r /= d;
    }
    out
}

/// Dense row-major table over `vars`; the last `target_axes` axes form each row
/// of a conditional law (0 for a joint), and every row must sum to one.
fn dense(table_name: &str, table: &Table, vars: &[&Alphabet], target_axes: usize) -> Result<Vec<f64>, Error> {
    let len: usize = vars.iter().map(|a| a.size()).product();
    let mut out = vec![0.0; len];
    let mut seen = vec![false; len];
    for (k, v) in table {
        let idx = parse_key(table_name, k, vars)?;
        if !v.is_finite() || *v < 0.0 || *v > 1.0 {
            return Err(invalid(format!("{table_name}: cell `{k}` has value {v}, outside [0, 1]")));
        }
        let f = flat(&idx, vars);
        if seen[f] {
            return Err(invalid(format!("{table_name}: cell `{k}` is given twice")));
        }
        seen[f] = true;
        out[f] = *v;
    }
    let row_len: usize = vars[vars.len() - target_axes..].iter().map(|a| a.size()).product();
    let given = &vars[..vars.len() - target_axes];
    let given_dims: Vec<usize> = given.iter().map(|a| a.size()).collect();
    for (r, row) in out.chunks(row_len).enumerate() {
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            let what = if target_axes == vars.len() {
                "table".to_string()
            } else {
                format!("row `{}`", label(&unflat(r, &given_dims), given))
            };
            return Err(invalid(format!("{table_name}: {what} sums to {total}, expected 1")));
        }
    }
    Ok(out)
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::parse(format!("invalid scenario file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable as TOML")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Build and validate every table; the first failing cell or row is named in the error.
    pub fn build(&self) -> Result<Model, Error> {
        let a = &self.alphabets;
        let q0 = alphabet(Q0, &a.q0)?;
        let q1t = alphabet(Q1T, &a.q1t)?;
        let q2t = alphabet(Q2T, &a.q2t)?;
        let s = Alphabet::new(S, a.s.iter().cloned())?;
        let x = Alphabet::new(X, a.x.iter().cloned())?;

        let ctx_probs = dense("context", &self.context, &[&q0, &q1t, &q2t], 3)?;
        let ctx = ContextModel::new(q0.clone(), q1t.clone(), q2t.clone(), ctx_probs)?;
        let law = dense("channel", &self.channel, &[&q0, &q1t, &s, &x], 1)?;
        let channel = SemanticChannel::new(q0.clone(), q1t.clone(), s.clone(), x, law)?;

        let scheme = match &self.scheme {
            None => None,
            Some(sc) => {
                let u = Alphabet::new(U, sc.u.iter().cloned())?;
                let vars = [&q0, &q1t, &u];
                let pu = dense("scheme.pu", &sc.pu, &vars, 1)?;
                let mut f = vec![None; pu.len()];
                for (k, sym) in &sc.f {
                    let idx = parse_key("scheme.f", k, &vars)?;
                    let v = s
                        .index_of(sym)
                        .ok_or_else(|| invalid(format!("scheme.f: cell `{k}` maps to undeclared symbol `{sym}` of `s`")))?;
                    f[flat(&idx, &vars)] = Some(v);
                }
                let dims = [q0.size(), q1t.size(), u.size()];
                let f = f
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.ok_or_else(|| invalid(format!("scheme.f: cell `{}` is missing", label(&unflat(i, &dims), &vars))))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let law = semctx::CondPmf::new(vec![q0.clone(), q1t.clone()], u, pu)?;
                Some(AuxiliaryScheme::new(law, s.clone(), f)?)
            }
        };

        let semantic_map = match &self.semantic_map {
            None => None,
            Some(sm) => {
                let w = Alphabet::new(W, sm.w.iter().cloned())?;
                let m = Alphabet::new(M, sm.m.iter().cloned())?;
                let q = Alphabet::new(Q, sm.q.iter().cloned())?;
                let probs = dense("semantic_map.joint", &sm.joint, &[&w, &m, &q], 3)?;
                Some(SemanticMap::new(w, m, q, probs)?)
            }
        };

        if let Some(c) = &self.codec {
            semctx::codec::CodebookConfig::new(c.n, c.rate, c.rate_tilde, c.epsilon, 0).validate()?;
        }

        Ok(Model {
            scenario: self.scenario,
            ctx,
            channel,
            scheme,
            semantic_map,
        })
    }

    pub fn search_config(&self) -> SearchConfig {
        let mut cfg = SearchConfig::default();
        if let Some(s) = &self.search {
            cfg.u_size = s.u_size;
            if let Some(m) = s.max_maps {
                cfg.max_maps = m;
            }
            if let Some(r) = s.restarts {
                cfg.restarts = r;
            }
        }
        cfg
    }
}

/// Symbol used for single-valued context components in keys and exports.
pub const DEGENERATE_SYMBOL: &str = ABSENT;

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ScenarioConfig {
        ScenarioConfig {
            id: "t".into(),
            description: "binary symmetric".into(),
            scenario: Scenario::FullShared,
            alphabets: AlphabetsConfig {
                q0: None,
                q1t: None,
                q2t: None,
                s: vec!["0".into(), "1".into()],
                x: vec!["0".into(), "1".into()],
            },
            context: Table::from([("q0=-".to_string(), 1.0)]),
            channel: Table::from([
                ("s=0,x=0".to_string(), 0.9),
                ("s=0,x=1".to_string(), 0.1),
                ("s=1,x=0".to_string(), 0.1),
                ("s=1,x=1".to_string(), 0.9),
            ]),
            search: None,
            scheme: None,
            semantic_map: None,
            codec: None,
            expected: vec![],
        }
    }

    #[test]
    fn builds_and_round_trips() {
        let c = minimal();
        let m = c.build().unwrap();
        assert_eq!(m.channel.row(0, 0, 1), &[0.1, 0.9]);
        let text = c.to_toml();
        let back = ScenarioConfig::from_toml(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn short_row_is_named() {
        let mut c = minimal();
        c.channel.insert("s=1,x=1".into(), 0.8);
        let e = c.build().unwrap_err().to_string();
        assert!(e.contains("row `s=1`") && e.contains("0.9"), "{e}");
    }

    #[test]
    fn bad_keys_are_named() {
        let mut c = minimal();
        c.channel.insert("s=2,x=1".into(), 0.0);
        assert!(c.build().unwrap_err().to_string().contains("`s=2,x=1`"));
        let mut c = minimal();
        c.channel.insert("x=1".into(), 0.0);
        assert!(c.build().unwrap_err().to_string().contains("does not give `s`"));
        let mut c = minimal();
        c.channel.insert("s=0,x=0".into(), -0.1);
        assert!(c.build().is_err());
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let text = minimal().to_toml().replace("id = ", "ident = ");
        assert_eq!(ScenarioConfig::from_toml(&text).unwrap_err().code, crate::error::EXIT_PARSE);
    }
}
