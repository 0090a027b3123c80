//! Weights and blocks: compositions `A(n,k)`, the raising map `a[i]`,
//! Jordan types, value tuples and their orbit classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("node {i} outside 1..={max}")]
    NodeOutOfRange { i: usize, max: usize },
    #[error("ambient sizes differ: {0} vs {1}")]
    MismatchedN(usize, usize),
    #[error("invalid Jordan type: {0}")]
    InvalidJordanType(String),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
}

/// A `k`-tuple of nonnegative integers summing to `n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Self {
        assert!(!parts.is_empty(), "a composition needs k >= 1 parts");
        Composition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// `a_s`, 1-based.
    pub fn part(&self, s: usize) -> usize {
        self.0[s - 1]
    }

    /// `k_j = a_1 + ⋯ + a_j`, with `k_0 = 0` and `k_j = n` beyond `k`.
    pub fn partial_sum(&self, j: usize) -> usize {
        self.0.iter().take(j).sum()
    }

    fn check_node(&self, i: usize) -> Result<(), BlockError> {
        if i == 0 || i >= self.k() {
            return Err(BlockError::NodeOutOfRange { i, max: self.k().saturating_sub(1) });
        }
        Ok(())
    }

    /// `a[i] = (…, a_i + 1, a_{i+1} - 1, …)`, absent when `a_{i+1} = 0`.
    pub fn raise(&self, i: usize) -> Result<Option<Composition>, BlockError> {
        self.check_node(i)?;
        if self.0[i] == 0 {
            return Ok(None);
        }
        let mut p = self.0.clone();
        p[i - 1] += 1;
        p[i] -= 1;
        Ok(Some(Composition(p)))
    }

    /// Inverse of [`raise`](Self::raise), absent when `a_i = 0`.
    pub fn lower(&self, i: usize) -> Result<Option<Composition>, BlockError> {
        self.check_node(i)?;
        if self.0[i - 1] == 0 {
            return Ok(None);
        }
        let mut p = self.0.clone();
        p[i - 1] -= 1;
        p[i] += 1;
        Ok(Some(Composition(p)))
    }

    /// Sizes of the refined flag `(a_1,…,a_i,1,a_{i+1}-1,…)` used by the
    /// correspondence between `a` and `a[i]`.
    pub fn refined(&self, i: usize) -> Option<Vec<usize>> {
        if self.0.get(i).copied().unwrap_or(0) == 0 {
            return None;
        }
        let mut p = self.0[..i].to_vec();
        p.push(1);
        p.push(self.0[i] - 1);
        p.extend_from_slice(&self.0[i + 1..]);
        Some(p)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (ix, p) in self.0.iter().enumerate() {
            if ix > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Composition {
    type Err = BlockError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = parse_list(s).ok_or_else(|| BlockError::InvalidComposition(s.to_string()))?;
        if parts.is_empty() {
            return Err(BlockError::InvalidComposition(s.to_string()));
        }
        Ok(Composition(parts))
    }
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// A partition of `n`: Jordan block sizes of a nilpotent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JordanType(Vec<usize>);

impl JordanType {
    pub fn new(parts: Vec<usize>) -> Result<Self, BlockError> {
        let ok = parts.iter().all(|&p| p >= 1) && parts.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(BlockError::InvalidJordanType(format!("{parts:?}")));
        }
        Ok(JordanType(parts))
    }

    /// The regular type `(n)`.
    pub fn regular(n: usize) -> Self {
        JordanType(if n == 0 { vec![] } else { vec![n] })
    }

    /// The zero nilpotent `(1,…,1)`.
    pub fn trivial(n: usize) -> Self {
        JordanType(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Segment index of each position: `S_0` holds the first `λ_1` positions, and so on.
    pub fn segment_of(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(j, &l)| std::iter::repeat(j).take(l)).collect()
    }
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Debug for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for JordanType {
    type Err = BlockError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = parse_list(s).ok_or_else(|| BlockError::InvalidJordanType(s.to_string()))?;
        JordanType::new(parts)
    }
}

/// Entries `(r_1,…,r_n)` with values in `1..=k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueTuple(Vec<u8>);

impl ValueTuple {
    pub fn new(entries: Vec<u8>) -> Self {
        assert!(entries.iter().all(|&r| r >= 1), "values are 1-based");
        ValueTuple(entries)
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn content(&self, k: usize) -> Composition {
        let mut c = vec![0; k];
        for &r in &self.0 {
            c[r as usize - 1] += 1;
        }
        Composition(c)
    }

    /// Copy with entry `m` (0-based) replaced by `v`.
    pub fn with(&self, m: usize, v: u8) -> Self {
        let mut e = self.0.clone();
        e[m] = v;
        ValueTuple(e)
    }
}

impl fmt::Display for ValueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Debug for ValueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coordinates of `μ + ρ` in the basis `e_1..e_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntegralWeight(pub Vec<i64>);

/// All of `A(n,k)`, ordered with the first part decreasing.
pub fn enumerate_compositions(n: usize, k: usize) -> Vec<Composition> {
    assert!(k >= 1, "k must be at least 1");
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(rem: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(rem);
            out.push(Composition(cur.clone()));
            cur.pop();
            return;
        }
        for p in (0..=rem).rev() {
            cur.push(p);
            go(rem - p, slots - 1, cur, out);
            cur.pop();
        }
    }
    go(n, k, &mut cur, &mut out);
    out
}

/// All partitions of `n` in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<JordanType> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<JordanType>) {
        if rem == 0 {
            out.push(JordanType(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `μ(a) + ρ`: a position in the `s`-th block of sizes `a_1, …, a_k` carries `-s`.
pub fn mu_weight(a: &Composition) -> IntegralWeight {
    IntegralWeight(
        a.parts().iter().enumerate().flat_map(|(s, &c)| std::iter::repeat(-(s as i64 + 1)).take(c)).collect(),
    )
}

/// All tuples of content `a`, in lexicographic order.
pub fn tuples_in_block(a: &Composition) -> Vec<ValueTuple> {
    let n = a.n();
    let mut left = a.parts().to_vec();
    let mut cur = Vec::with_capacity(n);
    let mut out = Vec::new();
    fn go(left: &mut [usize], cur: &mut Vec<u8>, n: usize, out: &mut Vec<ValueTuple>) {
        if cur.len() == n {
            out.push(ValueTuple(cur.clone()));
            return;
        }
        for s in 0..left.len() {
            if left[s] > 0 {
                left[s] -= 1;
                cur.push(s as u8 + 1);
                go(left, cur, n, out);
                cur.pop();
                left[s] += 1;
            }
        }
    }
    go(&mut left, &mut cur, n, &mut out);
    out
}

/// Per-segment sorted multisets of values, the invariant of an orbit class.
pub fn class_key(lambda: &JordanType, r: &ValueTuple) -> Vec<Vec<u8>> {
    let mut key = Vec::with_capacity(lambda.parts().len());
    let mut pos = 0;
    for &l in lambda.parts() {
        let mut seg = r.entries()[pos..pos + l].to_vec();
        seg.sort_unstable();
        key.push(seg);
        pos += l;
    }
    key
}

/// Partition of `tuples_in_block(a)` into classes of tuples whose segment
/// multisets agree; classes appear in order of their least member.
pub fn orbit_classes(lambda: &JordanType, a: &Composition) -> Result<Vec<Vec<ValueTuple>>, BlockError> {
    if lambda.n() != a.n() {
        return Err(BlockError::MismatchedN(lambda.n(), a.n()));
    }
    let mut index: HashMap<Vec<Vec<u8>>, usize> = HashMap::new();
    let mut classes: Vec<Vec<ValueTuple>> = Vec::new();
    for r in tuples_in_block(a) {
        let key = class_key(lambda, &r);
        let ix = *index.entry(key).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[ix].push(r);
    }
    Ok(classes)
}

/// `c_λ(a)`, the number of simple objects in the block.
pub fn count_simples(lambda: &JordanType, a: &Composition) -> Result<usize, BlockError> {
    Ok(orbit_classes(lambda, a)?.len())
}

/// Dimension of the `a`-weight space of `S^{λ_1}C^k ⊗ ⋯`, by multiplying
/// the weight generating functions of the symmetric powers.
pub fn weight_space_dim(lambda: &JordanType, k: usize, a: &Composition) -> u64 {
    if a.k() != k || lambda.n() != a.n() {
        return 0;
    }
    let mut acc: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    acc.insert(vec![0; k], 1);
    for &l in lambda.parts() {
        let factor = enumerate_compositions(l, k);
        let mut next: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (w, c) in &acc {
            for m in &factor {
                let v: Vec<usize> = w.iter().zip(m.parts()).map(|(x, y)| x + y).collect();
                if v.iter().zip(a.parts()).all(|(x, y)| x <= y) {
                    *next.entry(v).or_insert(0) += c;
                }
            }
        }
        acc = next;
    }
    acc.get(a.parts()).copied().unwrap_or(0)
}

/// `dim S^l C^k = C(l + k - 1, k - 1)`.
pub fn sym_power_dim(l: usize, k: usize) -> u64 {
    let mut r: u64 = 1;
    for j in 0..(k as u64 - 1) {
        r = r * (l as u64 + 1 + j) / (j + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &[usize]) -> Composition {
        Composition::new(p.to_vec())
    }

    fn lam(p: &[usize]) -> JordanType {
        JordanType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn compositions_listed() {
        assert_eq!(enumerate_compositions(2, 2), vec![c(&[2, 0]), c(&[1, 1]), c(&[0, 2])]);
        assert_eq!(enumerate_compositions(0, 3), vec![c(&[0, 0, 0])]);
        assert_eq!(enumerate_compositions(3, 2).len(), 4);
    }

    #[test]
    fn raise_and_lower() {
        assert_eq!(c(&[1, 1]).raise(1).unwrap(), Some(c(&[2, 0])));
        assert_eq!(c(&[2, 0]).raise(1).unwrap(), None);
        assert_eq!(c(&[1, 1, 1]).raise(2).unwrap(), Some(c(&[1, 2, 0])));
        assert_eq!(c(&[2, 0]).lower(1).unwrap(), Some(c(&[1, 1])));
        assert_eq!(c(&[0, 2]).lower(1).unwrap(), None);
        assert_eq!(c(&[1, 2]).lower(1).unwrap(), Some(c(&[0, 3])));
        assert!(c(&[1, 1]).raise(2).is_err());
        assert!(c(&[1, 1]).lower(0).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(mu_weight(&c(&[1, 1])).0, vec![-1, -2]);
        assert_eq!(mu_weight(&c(&[2, 0])).0, vec![-1, -1]);
        assert_eq!(mu_weight(&c(&[0, 2])).0, vec![-2, -2]);
    }

    #[test]
    fn block_tuples() {
        let t = tuples_in_block(&c(&[1, 1]));
        assert_eq!(t, vec![ValueTuple::new(vec![1, 2]), ValueTuple::new(vec![2, 1])]);
        assert_eq!(tuples_in_block(&c(&[2, 0])), vec![ValueTuple::new(vec![1, 1])]);
        assert_eq!(tuples_in_block(&c(&[1, 1, 1])).len(), 6);
    }

    #[test]
    fn simples_and_weight_dims() {
        let l21 = lam(&[2, 1]);
        let counts: Vec<usize> =
            enumerate_compositions(3, 2).iter().rev().map(|a| count_simples(&l21, a).unwrap()).collect();
        assert_eq!(counts, vec![1, 2, 2, 1]);
        assert_eq!(count_simples(&l21, &c(&[2, 1])).unwrap(), 2);
        let dims: Vec<u64> = enumerate_compositions(3, 2).iter().rev().map(|a| weight_space_dim(&l21, 2, a)).collect();
        assert_eq!(dims, vec![1, 2, 2, 1]);
        assert_eq!(count_simples(&lam(&[1, 1, 1]), &c(&[1, 1, 1])).unwrap(), 6);
        assert_eq!(weight_space_dim(&lam(&[3]), 3, &c(&[1, 1, 1])), 1);
        assert!(count_simples(&l21, &c(&[1, 1])).is_err());
    }

    #[test]
    fn jordan_types() {
        assert!(JordanType::new(vec![1, 2]).is_err());
        assert_eq!("2,1".parse::<JordanType>().unwrap(), lam(&[2, 1]));
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(sym_power_dim(2, 3), 6);
        assert_eq!(c(&[1, 2, 1]).refined(2), Some(vec![1, 2, 1, 0]));
    }
}
