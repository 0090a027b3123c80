//! Grothendieck-group model: the free module on value tuples, the
//! translation operators `E_i`, `F_i`, and the quotient to orbit classes.

use std::collections::BTreeMap;

use crate::blocks::{
    class_key, enumerate_compositions, orbit_classes, tuples_in_block, weight_space_dim, BlockError, Composition,
    JordanType, ValueTuple,
};
use crate::report::RelationReport;
use crate::ring::Rational;

/// Sparse vector on the tuple basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct K0Vector(BTreeMap<ValueTuple, Rational>);

impl K0Vector {
    pub fn zero() -> Self {
        K0Vector(BTreeMap::new())
    }

    pub fn basis(r: ValueTuple) -> Self {
        let mut m = BTreeMap::new();
        m.insert(r, Rational::one());
        K0Vector(m)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ValueTuple, Rational)>) -> Self {
        let mut v = Self::zero();
        for (r, c) in terms {
            v.add_term(r, &c);
        }
        v
    }

    pub fn add_term(&mut self, r: ValueTuple, c: &Rational) {
        let e = self.0.entry(r.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&r);
        }
    }

    pub fn coefficient(&self, r: &ValueTuple) -> Rational {
        self.0.get(r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ValueTuple, &Rational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &K0Vector) -> K0Vector {
        let mut out = self.clone();
        for (r, c) in &other.0 {
            out.add_term(r.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> K0Vector {
        K0Vector::from_terms(self.0.iter().map(|(r, x)| (r.clone(), x * c)))
    }
}

fn check_node(i: usize, k: usize) -> Result<(), BlockError> {
    if i == 0 || i >= k {
        return Err(BlockError::NodeOutOfRange { i, max: k.saturating_sub(1) });
    }
    Ok(())
}

fn shift_values(i: usize, k: usize, v: &K0Vector, from: u8, to: u8) -> Result<K0Vector, BlockError> {
    check_node(i, k)?;
    let mut out = K0Vector::zero();
    for (r, c) in v.terms() {
        for (m, &x) in r.entries().iter().enumerate() {
            if x == from {
                out.add_term(r.with(m, to), c);
            }
        }
    }
    Ok(out)
}

/// `r ↦ Σ_{m : r_m = i+1} r|_{m ↦ i}`.
pub fn apply_e(i: usize, k: usize, v: &K0Vector) -> Result<K0Vector, BlockError> {
    shift_values(i, k, v, i as u8 + 1, i as u8)
}

/// `r ↦ Σ_{m : r_m = i} r|_{m ↦ i+1}`.
pub fn apply_f(i: usize, k: usize, v: &K0Vector) -> Result<K0Vector, BlockError> {
    shift_values(i, k, v, i as u8, i as u8 + 1)
}

/// Sparse matrix between the tuple bases of two blocks, keyed `(source, target)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Operator {
    pub src: Composition,
    pub dst: Composition,
    entries: BTreeMap<(ValueTuple, ValueTuple), Rational>,
}

impl K0Operator {
    pub fn zero(src: Composition, dst: Composition) -> Self {
        K0Operator { src, dst, entries: BTreeMap::new() }
    }

    pub fn identity(a: &Composition) -> Self {
        let entries = tuples_in_block(a).into_iter().map(|r| ((r.clone(), r), Rational::one())).collect();
        K0Operator { src: a.clone(), dst: a.clone(), entries }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(ValueTuple, ValueTuple), &Rational)> {
        self.entries.iter()
    }

    pub fn entry(&self, r: &ValueTuple, s: &ValueTuple) -> Rational {
        self.entries.get(&(r.clone(), s.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    fn insert(&mut self, r: ValueTuple, s: ValueTuple, c: &Rational) {
        let e = self.entries.entry((r.clone(), s.clone())).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.entries.remove(&(r, s));
        }
    }

    pub fn apply(&self, v: &K0Vector) -> K0Vector {
        let mut out = K0Vector::zero();
        for ((r, s), c) in &self.entries {
            let x = v.coefficient(r);
            if !x.is_zero() {
                out.add_term(s.clone(), &(&x * c));
            }
        }
        out
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &K0Operator) -> K0Operator {
        assert_eq!(self.dst, other.src, "composition mismatch");
        let mut out = K0Operator::zero(self.src.clone(), other.dst.clone());
        for ((r, s), c) in &self.entries {
            let tail = other.entries.range((s.clone(), ValueTuple::new(vec![]))..);
            for ((_, u), d) in tail.take_while(|((x, _), _)| x == s) {
                out.insert(r.clone(), u.clone(), &(c * d));
            }
        }
        out
    }

    pub fn plus(&self, other: &K0Operator) -> K0Operator {
        assert_eq!((&self.src, &self.dst), (&other.src, &other.dst), "shape mismatch");
        let mut out = self.clone();
        for ((r, s), c) in &other.entries {
            out.insert(r.clone(), s.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> K0Operator {
        let mut out = K0Operator::zero(self.src.clone(), self.dst.clone());
        for ((r, s), x) in &self.entries {
            out.insert(r.clone(), s.clone(), &(x * c));
        }
        out
    }

    /// First basis pair where the two operators differ.
    pub fn first_difference(&self, other: &K0Operator) -> Option<(ValueTuple, ValueTuple)> {
        let d = self.plus(&other.scale(&-Rational::one()));
        d.entries.keys().next().cloned()
    }

    /// Flips the sign of the first stored entry (a fault-injection hook).
    pub fn perturbed(mut self) -> Self {
        if let Some((_, v)) = self.entries.iter_mut().next() {
            *v = -v.clone();
        }
        self
    }
}

/// Builds the matrices of `E_i`, `F_i` on each block, optionally with a
/// deliberately corrupted `E_1`.
#[derive(Debug, Clone, Copy)]
pub struct K0Model {
    pub k: usize,
    pub perturb: bool,
}

impl K0Model {
    pub fn new(k: usize) -> Self {
        K0Model { k, perturb: false }
    }

    fn operator(&self, a: &Composition, dst: Option<Composition>, i: usize, up: bool) -> Option<K0Operator> {
        let dst = dst?;
        let mut op = K0Operator::zero(a.clone(), dst);
        for r in tuples_in_block(a) {
            let img = if up {
                apply_e(i, self.k, &K0Vector::basis(r.clone()))
            } else {
                apply_f(i, self.k, &K0Vector::basis(r.clone()))
            };
            for (s, c) in img.expect("node checked").terms() {
                op.insert(r.clone(), s.clone(), c);
            }
        }
        Some(if up && i == 1 && self.perturb { op.perturbed() } else { op })
    }

    /// `E_i : a → a[i]`, `None` when `a[i]` is undefined.
    pub fn e(&self, a: &Composition, i: usize) -> Result<Option<K0Operator>, BlockError> {
        let dst = a.raise(i)?;
        Ok(self.operator(a, dst, i, true))
    }

    /// `F_i : a → lower(a, i)`.
    pub fn f(&self, a: &Composition, i: usize) -> Result<Option<K0Operator>, BlockError> {
        let dst = a.lower(i)?;
        Ok(self.operator(a, dst, i, false))
    }

    /// Composite of a word applied left to right, starting on block `a`;
    /// `None` when an intermediate weight leaves `A(n,k)` (the zero map).
    pub fn word(&self, a: &Composition, word: &[(char, usize)]) -> Result<Option<K0Operator>, BlockError> {
        let mut acc: Option<K0Operator> = None;
        let mut cur = a.clone();
        for &(kind, i) in word {
            let op = match kind {
                'E' => self.e(&cur, i)?,
                'F' => self.f(&cur, i)?,
                _ => panic!("unknown generator {kind}"),
            };
            let Some(op) = op else { return Ok(None) };
            cur = op.dst.clone();
            acc = Some(match acc {
                None => op,
                Some(prev) => prev.then(&op),
            });
        }
        Ok(acc.or_else(|| Some(K0Operator::identity(a))))
    }
}

fn word_or_zero(model: &K0Model, a: &Composition, w: &[(char, usize)], dst: &Composition) -> K0Operator {
    model.word(a, w).expect("valid nodes").unwrap_or_else(|| K0Operator::zero(a.clone(), dst.clone()))
}

fn word_target(a: &Composition, w: &[(char, usize)]) -> Option<Composition> {
    let mut cur = a.clone();
    for &(kind, i) in w {
        cur = match kind {
            'E' => cur.raise(i).ok()??,
            _ => cur.lower(i).ok()??,
        };
    }
    Some(cur)
}

fn describe(d: Option<(ValueTuple, ValueTuple)>) -> Option<String> {
    d.map(|(r, s)| format!("entry {r} -> {s}"))
}

/// `E_iF_i + a_{i+1}·Id = F_iE_i + a_i·Id` on the block `a`, where
/// `E_iF_i` applies `F_i` first.
pub fn verify_sl2_block_relation(model: &K0Model, a: &Composition, i: usize) -> RelationReport {
    let id = K0Operator::identity(a);
    let ef = word_or_zero(model, a, &[('F', i), ('E', i)], a);
    let fe = word_or_zero(model, a, &[('E', i), ('F', i)], a);
    let lhs = ef.plus(&id.scale(&Rational::from(a.part(i + 1))));
    let rhs = fe.plus(&id.scale(&Rational::from(a.part(i))));
    RelationReport::new(format!("sl2 i={i}"), a, describe(lhs.first_difference(&rhs)))
}

/// Commutation `E_iF_j = F_jE_i` for `i ≠ j` and both Serre relations for
/// adjacent nodes, on every block of `A(n,k)`.
pub fn verify_serre_and_commute(model: &K0Model, n: usize) -> Vec<RelationReport> {
    let k = model.k;
    let mut out = Vec::new();
    for a in enumerate_compositions(n, k) {
        if k < 3 {
            out.push(RelationReport::skipped("commute", &a));
            out.push(RelationReport::skipped("serre", &a));
            continue;
        }
        for i in 1..k {
            for j in 1..k {
                if i == j {
                    continue;
                }
                let w1 = [('F', j), ('E', i)];
                let w2 = [('E', i), ('F', j)];
                let Some(dst) = word_target(&a, &w1) else {
                    out.push(RelationReport::new(format!("commute i={i} j={j}"), &a, None));
                    continue;
                };
                let x = word_or_zero(model, &a, &w1, &dst);
                let y = word_or_zero(model, &a, &w2, &dst);
                out.push(RelationReport::new(format!("commute i={i} j={j}"), &a, describe(x.first_difference(&y))));
            }
        }
        for i in 1..k {
            for j in [i.wrapping_sub(1), i + 1] {
                if j == 0 || j >= k {
                    continue;
                }
                for kind in ['E', 'F'] {
                    let name = format!("serre {kind} i={i} j={j}");
                    let w_iij = [(kind, j), (kind, i), (kind, i)];
                    let w_jii = [(kind, i), (kind, i), (kind, j)];
                    let w_iji = [(kind, i), (kind, j), (kind, i)];
                    let Some(dst) = word_target(&a, &w_iji) else {
                        out.push(RelationReport::new(name, &a, None));
                        continue;
                    };
                    let lhs = word_or_zero(model, &a, &w_iij, &dst).plus(&word_or_zero(model, &a, &w_jii, &dst));
                    let rhs = word_or_zero(model, &a, &w_iji, &dst).scale(&Rational::from(2));
                    out.push(RelationReport::new(name, &a, describe(lhs.first_difference(&rhs))));
                }
            }
        }
    }
    out
}

/// Orbit-class label of a tuple.
pub type ClassKey = Vec<Vec<u8>>;

/// Pushes coordinates along `r ↦ [r]`.
pub fn quotient_to_simples(lambda: &JordanType, v: &K0Vector) -> Result<BTreeMap<ClassKey, Rational>, BlockError> {
    let mut out: BTreeMap<ClassKey, Rational> = BTreeMap::new();
    for (r, c) in v.terms() {
        if r.n() != lambda.n() {
            return Err(BlockError::MismatchedN(lambda.n(), r.n()));
        }
        *out.entry(class_key(lambda, r)).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Checks that `E_i`, `F_i` descend to the orbit classes, that the induced
/// `ē_i, f̄_i` satisfy `[ē_i, f̄_i] = (a_i - a_{i+1})` and that the class
/// count of every block equals the weight multiplicity of `⊗ S^{λ_j} C^k`.
pub fn verify_quotient_intertwines(lambda: &JordanType, k: usize) -> Vec<RelationReport> {
    let n = lambda.n();
    let mut out = Vec::new();
    for a in enumerate_compositions(n, k) {
        let classes = orbit_classes(lambda, &a).expect("same n");
        let dim = weight_space_dim(lambda, k, &a);
        let rank_fail = (classes.len() as u64 != dim).then(|| format!("{} classes vs weight dim {dim}", classes.len()));
        out.push(RelationReport::new("character", &a, rank_fail).with_lambda(lambda));

        // Induced maps are read off from the first member of each class.
        let mut induced: BTreeMap<(char, usize), BTreeMap<ClassKey, BTreeMap<ClassKey, Rational>>> = BTreeMap::new();
        for i in 1..k {
            for kind in ['E', 'F'] {
                let mut bad = None;
                let mut table = BTreeMap::new();
                for class in &classes {
                    let images: Vec<_> = class
                        .iter()
                        .map(|r| {
                            let v = K0Vector::basis(r.clone());
                            let img = if kind == 'E' { apply_e(i, k, &v) } else { apply_f(i, k, &v) };
                            quotient_to_simples(lambda, &img.expect("node in range")).expect("same n")
                        })
                        .collect();
                    if let Some(pos) = images.iter().position(|x| x != &images[0]) {
                        bad.get_or_insert_with(|| format!("{} and {} have different images", class[0], class[pos]));
                    }
                    table.insert(class_key(lambda, &class[0]), images[0].clone());
                }
                out.push(RelationReport::new(format!("descends {kind} i={i}"), &a, bad).with_lambda(lambda));
                induced.insert((kind, i), table);
            }
        }
        for i in 1..k {
            let h = Rational::from(a.part(i) as i64 - a.part(i + 1) as i64);
            let mut bad = None;
            for class in &classes {
                let key = class_key(lambda, &class[0]);
                let ef = apply_class(&induced, lambda, k, ('F', i), ('E', i), &key);
                let fe = apply_class(&induced, lambda, k, ('E', i), ('F', i), &key);
                let mut lhs = ef;
                for (c, x) in fe {
                    *lhs.entry(c).or_insert_with(Rational::zero) -= &x;
                }
                *lhs.entry(key.clone()).or_insert_with(Rational::zero) -= &h;
                lhs.retain(|_, c| !c.is_zero());
                if !lhs.is_empty() {
                    bad.get_or_insert_with(|| format!("class of {}", class[0]));
                }
            }
            out.push(RelationReport::new(format!("induced sl2 i={i}"), &a, bad).with_lambda(lambda));
        }
    }
    out
}

/// Applies `second ∘ first` of the induced class operators to a class.
fn apply_class(
    induced: &BTreeMap<(char, usize), BTreeMap<ClassKey, BTreeMap<ClassKey, Rational>>>,
    lambda: &JordanType,
    k: usize,
    first: (char, usize),
    second: (char, usize),
    key: &ClassKey,
) -> BTreeMap<ClassKey, Rational> {
    let mut out: BTreeMap<ClassKey, Rational> = BTreeMap::new();
    let mid = &induced[&first][key];
    for (c, x) in mid {
        // Classes of other blocks are rebuilt on demand from a representative.
        let img = match induced[&second].get(c) {
            Some(img) => img.clone(),
            None => {
                let rep = representative(c);
                let v = K0Vector::basis(rep);
                let v = if second.0 == 'E' { apply_e(second.1, k, &v) } else { apply_f(second.1, k, &v) };
                quotient_to_simples(lambda, &v.expect("node in range")).expect("same n")
            }
        };
        for (d, y) in img {
            *out.entry(d).or_insert_with(Rational::zero) += &(x * &y);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A tuple in the class: segment multisets laid out in sorted order.
fn representative(key: &ClassKey) -> ValueTuple {
    ValueTuple::new(key.iter().flatten().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tup(x: &[u8]) -> ValueTuple {
        ValueTuple::new(x.to_vec())
    }

    fn c(p: &[usize]) -> Composition {
        Composition::new(p.to_vec())
    }

    #[test]
    fn e_and_f_on_basis() {
        let e = |r: &[u8]| apply_e(1, 2, &K0Vector::basis(tup(r))).unwrap();
        let f = |r: &[u8]| apply_f(1, 2, &K0Vector::basis(tup(r))).unwrap();
        assert_eq!(e(&[2]), K0Vector::basis(tup(&[1])));
        assert_eq!(e(&[2, 2]), K0Vector::basis(tup(&[1, 2])).add(&K0Vector::basis(tup(&[2, 1]))));
        assert!(e(&[1, 1]).is_zero());
        assert_eq!(f(&[1]), K0Vector::basis(tup(&[2])));
        assert_eq!(f(&[1, 2]), K0Vector::basis(tup(&[2, 2])));
        assert!(f(&[2, 2]).is_zero());
        assert!(apply_e(2, 2, &K0Vector::basis(tup(&[1]))).is_err());
    }

    #[test]
    fn sl2_relation_small() {
        let m = K0Model::new(2);
        for a in [c(&[0, 1]), c(&[1, 1]), c(&[2, 0]), c(&[0, 2])] {
            assert!(!verify_sl2_block_relation(&m, &a, 1).status.failed(), "{a}");
        }
        let ef = m.word(&c(&[0, 1]), &[('F', 1), ('E', 1)]).unwrap();
        assert!(ef.is_none());
        let fe = m.word(&c(&[0, 1]), &[('E', 1), ('F', 1)]).unwrap().unwrap();
        assert_eq!(fe, K0Operator::identity(&c(&[0, 1])));
    }

    #[test]
    fn perturbation_breaks_sl2() {
        let m = K0Model { k: 2, perturb: true };
        assert!(verify_sl2_block_relation(&m, &c(&[0, 1]), 1).status.failed());
    }

    #[test]
    fn serre_small() {
        let reports = verify_serre_and_commute(&K0Model::new(3), 2);
        assert!(reports.iter().all(|r| !r.status.failed()));
        let k2 = verify_serre_and_commute(&K0Model::new(2), 2);
        assert!(k2.iter().all(|r| r.status == crate::report::Status::Skipped));
    }

    #[test]
    fn quotient_examples() {
        let l2 = JordanType::regular(2);
        let v = K0Vector::from_terms([(tup(&[1, 2]), Rational::one()), (tup(&[2, 1]), -Rational::one())]);
        assert!(quotient_to_simples(&l2, &v).unwrap().is_empty());
        let w = K0Vector::from_terms([(tup(&[1, 2]), Rational::one()), (tup(&[2, 1]), Rational::one())]);
        let q = quotient_to_simples(&l2, &w).unwrap();
        assert_eq!(q.values().cloned().collect::<Vec<_>>(), vec![Rational::from(2)]);
        let triv = JordanType::trivial(2);
        assert_eq!(quotient_to_simples(&triv, &v).unwrap().len(), 2);
    }

    #[test]
    fn quotient_intertwines_small() {
        for lam in [JordanType::regular(3), JordanType::new(vec![2, 1]).unwrap(), JordanType::trivial(2)] {
            let r = verify_quotient_intertwines(&lam, 2);
            assert!(r.iter().all(|x| !x.status.failed()), "{lam}: {r:?}");
        }
    }
}
