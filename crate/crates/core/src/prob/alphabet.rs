use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Symbol placeholder used for size-one ("absent") context components.
pub const ABSENT: &str = "-";

/// A named finite alphabet with ordered, distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        symbols: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(config_err!("alphabet name must be nonempty"));
        }
        if symbols.is_empty() {
            return Err(config_err!("alphabet `{name}` has no symbols"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(config_err!("alphabet `{name}` repeats symbol `{s}`"));
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet with symbols `"0"`, `"1"`, ... `"size-1"`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| i.to_string()))
    }

    /// Size-one alphabet standing in for a context component nobody observes.
    pub fn degenerate(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            symbols: vec![ABSENT.to_string()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.symbols.len() == 1
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Same symbols under a different variable name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            symbols: self.symbols.clone(),
        }
    }

    pub(crate) fn same_symbols(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={{{}}}", self.name, self.symbols.join(","))
    }
}

/// Mixed-radix indexing over a product of alphabets, last axis fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Shape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![0; dims.len()];
        let mut acc = 1usize;
        for (i, d) in dims.iter().enumerate().rev() {
            strides[i] = acc;
            acc = acc.saturating_mul(*d);
        }
        Self {
            dims,
            strides,
            len: acc,
        }
    }

    pub fn of(alphabets: &[Alphabet]) -> Self {
        Self::new(alphabets.iter().map(Alphabet::size).collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unflat(&self, mut flat: usize, out: &mut [usize]) {
        for (o, s) in out.iter_mut().zip(&self.strides) {
            *o = flat / s;
            flat %= s;
        }
    }
}
