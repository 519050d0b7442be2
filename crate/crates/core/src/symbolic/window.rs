use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// A finite piece `s_-m … s_-1 . s_0 … s_n` of a bisequence over `{0, …, p-1}`.
///
/// `back[0]` is `s_-1`, `back[m-1]` is `s_-m`; `fwd[k]` is `s_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ItineraryWindow {
    p: u32,
    back: Vec<u32>,
    fwd: Vec<u32>,
}

impl ItineraryWindow {
    pub fn new(p: u32, back: Vec<u32>, fwd: Vec<u32>) -> Result<Self> {
        if fwd.is_empty() {
            return Err(Error::EmptyForwardPart);
        }
        if let Some(&symbol) = back.iter().chain(&fwd).find(|&&s| s >= p) {
            return Err(Error::InvalidSymbol { symbol, p });
        }
        Ok(Self { p, back, fwd })
    }

    pub fn forward_only(p: u32, fwd: Vec<u32>) -> Result<Self> {
        Self::new(p, Vec::new(), fwd)
    }

    /// The window whose symbols `s_-m … s_n` are all `s`.
    pub fn constant(p: u32, s: u32, m: usize, n: usize) -> Result<Self> {
        Self::new(p, vec![s; m], vec![s; n + 1])
    }

    /// Reads `"21.0102"`: back symbols as written left to right are
    /// `s_-m … s_-1`. For `p > 10` symbols are separated by commas.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        let text = text.trim();
        let (back, fwd) = text
            .split_once('.')
            .ok_or_else(|| Error::MalformedWindow(format!("{text:?} has no '.'")))?;
        if fwd.contains('.') {
            return Err(Error::MalformedWindow(format!("{text:?} has more than one '.'")));
        }
        let mut back = parse_symbols(p, back, text)?;
        back.reverse();
        let fwd = parse_symbols(p, fwd, text)?;
        if fwd.is_empty() {
            return Err(Error::EmptyForwardPart);
        }
        Self::new(p, back, fwd)
    }

    pub fn random<R: Rng + ?Sized>(p: u32, m: usize, n: usize, rng: &mut R) -> Self {
        let back = (0..m).map(|_| rng.gen_range(0..p)).collect();
        let fwd = (0..=n).map(|_| rng.gen_range(0..p)).collect();
        Self { p, back, fwd }
    }

    /// The `index`-th window of shape `(m, n)` in base-`p` order of
    /// `s_-m … s_n` (most significant first).
    pub fn from_index(p: u32, m: usize, n: usize, mut index: u64) -> Self {
        let len = m + n + 1;
        let mut chain = vec![0u32; len];
        for slot in chain.iter_mut().rev() {
            *slot = (index % p as u64) as u32;
            index /= p as u64;
        }
        Self::from_chain(p, m, &chain)
    }

    /// Builds the window from `s_-m … s_n` in time order.
    pub fn from_chain(p: u32, m: usize, chain: &[u32]) -> Self {
        let mut back = chain[..m].to_vec();
        back.reverse();
        Self {
            p,
            back,
            fwd: chain[m..].to_vec(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `s_-1, …, s_-m`.
    pub fn back(&self) -> &[u32] {
        &self.back
    }

    /// `s_0, …, s_n`.
    pub fn fwd(&self) -> &[u32] {
        &self.fwd
    }

    pub fn m(&self) -> usize {
        self.back.len()
    }

    pub fn n(&self) -> usize {
        self.fwd.len() - 1
    }

    pub fn len(&self) -> usize {
        self.back.len() + self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbol(&self, k: i64) -> Option<u32> {
        if k >= 0 {
            self.fwd.get(k as usize).copied()
        } else {
            self.back.get((-k - 1) as usize).copied()
        }
    }

    /// `s_-m, …, s_n` in time order.
    pub fn chain(&self) -> Vec<u32> {
        self.back.iter().rev().chain(&self.fwd).copied().collect()
    }

    /// The shift `σ`: `s_0` moves behind the dot.
    pub fn shift(&self) -> Result<Self> {
        if self.fwd.len() < 2 {
            return Err(Error::EmptyForwardPart);
        }
        let mut back = Vec::with_capacity(self.back.len() + 1);
        back.push(self.fwd[0]);
        back.extend_from_slice(&self.back);
        Ok(Self {
            p: self.p,
            back,
            fwd: self.fwd[1..].to_vec(),
        })
    }

    /// Whether every symbol of `self` agrees with `other`, and `other` is at
    /// least as deep on both sides.
    pub fn is_extended_by(&self, other: &ItineraryWindow) -> bool {
        self.p == other.p && other.back.starts_with(&self.back) && other.fwd.starts_with(&self.fwd)
    }
}

fn parse_symbols(p: u32, part: &str, whole: &str) -> Result<Vec<u32>> {
    let bad = || Error::MalformedWindow(whole.to_string());
    if part.is_empty() {
        return Ok(Vec::new());
    }
    let symbols: Vec<u32> = if part.contains(',') || p > 10 {
        part.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    } else {
        part.chars()
            .map(|c| c.to_digit(10).ok_or_else(bad))
            .collect::<Result<_>>()?
    };
    if let Some(&symbol) = symbols.iter().find(|&&s| s >= p) {
        return Err(Error::InvalidSymbol { symbol, p });
    }
    Ok(symbols)
}

impl fmt::Display for ItineraryWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |syms: &mut dyn Iterator<Item = &u32>| -> String {
            if self.p > 10 {
                syms.map(u32::to_string).collect::<Vec<_>>().join(",")
            } else {
                syms.map(u32::to_string).collect()
            }
        };
        let back = join(&mut self.back.iter().rev());
        let fwd = join(&mut self.fwd.iter());
        write!(f, "{back}.{fwd}")
    }
}
