//! Torus fixed-point model of the kernels acting between cotangent bundles
//! of partial flag varieties `T*𝒫_a`.
//!
//! A fixed point of `𝒫_a` is a step function `f : {1..n} → {1..k}` with
//! `|f^{-1}(s)| = a_s`; its flag is `V_j = ⟨e_m : f(m) ≤ j⟩`. Classes are
//! matrices of rational functions indexed by pairs of fixed points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::blocks::{tuples_in_block, BlockError, Composition, ValueTuple};
use crate::report::{Convention, KernelDump, KernelEntry, RelationReport};
use crate::ring::{signed_quantum_integer, LaurentMono, LaurentPoly, RatFunc, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlocError {
    #[error("cannot compose kernels {0} -> {1} and {2} -> {3}")]
    CompositionMismatch(Composition, Composition, Composition, Composition),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("unknown variant {0}")]
    UnknownVariant(String),
}

pub type FlagFixedPoint = ValueTuple;

/// All fixed points of `𝒫_a`.
pub fn flag_fixed_points(a: &Composition) -> Vec<FlagFixedPoint> {
    tuples_in_block(a)
}

/// A multiset of torus weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character(pub Vec<LaurentMono>);

impl Character {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted copy, for multiset comparison.
    pub fn sorted(&self) -> Vec<LaurentMono> {
        let mut v = self.0.clone();
        v.sort();
        v
    }

    /// `Λ_{-1}` of the dual: `∏ (1 - w^{-1})`.
    pub fn lambda_dual(&self) -> Vec<LaurentMono> {
        self.0.iter().map(|w| w.inv()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    E,
    F,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Kind::E { "E" } else { "F" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    CK0,
    CK1,
    P0,
    P1,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::CK0, Variant::CK1, Variant::P0, Variant::P1];

    /// The loop (`1` / `-1`) partner family.
    pub fn is_loop(self) -> bool {
        matches!(self, Variant::CK1 | Variant::P1)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::CK0 => "CK0",
            Variant::CK1 => "CK1",
            Variant::P0 => "P0",
            Variant::P1 => "P1",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Variant {
    type Err = KlocError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "CK0" => Ok(Variant::CK0),
            "CK1" => Ok(Variant::CK1),
            "P0" => Ok(Variant::P0),
            "P1" => Ok(Variant::P1),
            _ => Err(KlocError::UnknownVariant(s.to_string())),
        }
    }
}

/// A fixed point of the correspondence between `𝒫_a` and `𝒫_{a[i]}`:
/// `f2` equals `f1` except at `split`, where `f1 = i+1` and `f2 = i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrFixedPoint {
    pub f1: FlagFixedPoint,
    pub f2: FlagFixedPoint,
    /// 0-based position `m` with `V_i / V_i' = ⟨e_m⟩`.
    pub split: usize,
    pub node: usize,
}

impl CorrFixedPoint {
    /// Steps of the refined flag `V_1 ⊆ ⋯ ⊆ V_i' ⊆ V_i ⊆ ⋯`, doubled so the
    /// singleton step sits at `2i + 1` between `2i` and `2i + 2`.
    pub fn refined(&self) -> Vec<u32> {
        self.f1
            .entries()
            .iter()
            .enumerate()
            .map(|(m, &s)| if m == self.split { 2 * self.node as u32 + 1 } else { 2 * s as u32 })
            .collect()
    }
}

/// All fixed points of the correspondence for `(a, i)`; empty when `a[i]` is undefined.
pub fn corr_fixed_points(a: &Composition, i: usize) -> Result<Vec<CorrFixedPoint>, KlocError> {
    if a.raise(i)?.is_none() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for f1 in flag_fixed_points(a) {
        for (m, &s) in f1.entries().iter().enumerate() {
            if s as usize == i + 1 {
                out.push(CorrFixedPoint { f2: f1.with(m, i as u8), f1: f1.clone(), split: m, node: i });
            }
        }
    }
    Ok(out)
}

/// A factor of a line-bundle expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Det {
    /// `det V_j` for `j ≠ i`, common to both flags.
    V(usize),
    /// `det V_i` of the `a[i]`-flag.
    Upper,
    /// `det V_i'`, i.e. `V_i` of the `a`-flag.
    Lower,
}

/// `∏ det(·)^e` with a grading shift `{shift}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBundle {
    pub factors: Vec<(Det, i32)>,
    pub shift: i64,
}

/// Evaluation context: number of positions and a convention tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub n: usize,
    pub conv: Convention,
    /// Negates one entry of every `E_1` kernel (fault injection).
    pub perturb: bool,
}

impl Geometry {
    pub fn new(n: usize, conv: Convention) -> Self {
        Geometry { n, conv, perturb: false }
    }

    fn t(&self, m: usize) -> LaurentMono {
        LaurentMono::t(self.n, m + 1, 1)
    }

    /// Tangent weight for positions `x`, `y` with `x` in the earlier step.
    fn pair_weight(&self, x: usize, y: usize) -> LaurentMono {
        let w = self.t(y).div(&self.t(x));
        if self.conv.orientation > 0 {
            w
        } else {
            w.inv()
        }
    }

    fn dilation(&self) -> LaurentMono {
        LaurentMono::q(self.n, self.conv.dilation as i32 * self.conv.sigma as i32)
    }

    /// Cotangent fibre weight paired with tangent weight `w`.
    fn fibre(&self, w: &LaurentMono) -> LaurentMono {
        self.dilation().div(w)
    }

    pub fn tangent_character(&self, f: &FlagFixedPoint) -> Character {
        let e = f.entries();
        let mut out = Vec::new();
        for x in 0..e.len() {
            for y in 0..e.len() {
                if e[x] < e[y] {
                    out.push(self.pair_weight(x, y));
                }
            }
        }
        Character(out)
    }

    /// Tangent weights of `T*𝒫_a` at `f`: base directions and fibre directions.
    pub fn cotangent_bundle_character(&self, f: &FlagFixedPoint) -> Character {
        let base = self.tangent_character(f);
        let fib: Vec<LaurentMono> = base.0.iter().map(|w| self.fibre(w)).collect();
        Character(base.0.into_iter().chain(fib).collect())
    }

    /// `∏_w (1 - w^{-1})(1 - q^{-dσ} w)` over tangent weights `w` of `𝒫_a` at `f`.
    pub fn cotangent_euler(&self, f: &FlagFixedPoint) -> RatFunc {
        let ws = self.cotangent_bundle_character(f).lambda_dual();
        RatFunc::from_factors(Rational::one(), LaurentMono::one(self.n), &ws, &[]).expect("no vanishing weight")
    }

    /// Tangent weights of the correspondence `W` at `h`: the refined flag
    /// variety plus the allowed cotangent fibre directions.
    pub fn corr_tangent_character(&self, h: &CorrFixedPoint) -> Character {
        let r = h.refined();
        let i = h.node as u32;
        let single = 2 * i + 1;
        let next = 2 * i + 2;
        let mut base = Vec::new();
        let mut fib = Vec::new();
        for x in 0..r.len() {
            for y in 0..r.len() {
                if r[x] >= r[y] {
                    continue;
                }
                let w = self.pair_weight(x, y);
                let allowed = if r[y] == single {
                    r[x] + 2 <= 2 * i
                } else if r[y] == next {
                    r[x] <= 2 * i
                } else {
                    true
                };
                if allowed {
                    fib.push(self.fibre(&w));
                }
                base.push(w);
            }
        }
        Character(base.into_iter().chain(fib).collect())
    }

    /// `det V_j` at `f`.
    pub fn det(&self, f: &FlagFixedPoint, j: usize) -> LaurentMono {
        let mut out = LaurentMono::one(self.n);
        for (m, &s) in f.entries().iter().enumerate() {
            if s as usize <= j {
                out = out.mul(&self.t(m));
            }
        }
        out
    }

    /// `{s} ↦ ε^s q^{σ s}`.
    pub fn shift(&self, s: i64) -> (Rational, LaurentMono) {
        let sign = if self.conv.shift_sign < 0 && s.rem_euclid(2) == 1 { -Rational::one() } else { Rational::one() };
        (sign, LaurentMono::q(self.n, (self.conv.sigma as i64 * s) as i32))
    }

    pub fn line_bundle_value(&self, lb: &LineBundle, h: &CorrFixedPoint) -> (Rational, LaurentMono) {
        let mut mono = LaurentMono::one(self.n);
        for &(d, e) in &lb.factors {
            let v = match d {
                Det::V(j) => self.det(&h.f1, j),
                Det::Upper => self.det(&h.f2, h.node),
                Det::Lower => self.det(&h.f1, h.node),
            };
            mono = mono.mul(&v.pow(e));
        }
        let (c, q) = self.shift(lb.shift);
        (c, mono.mul(&q))
    }

    /// Kernel of `E_i : a → a[i]` (`kind = E`) or of `F_i : a[i] → a`
    /// (`kind = F`), built on the correspondence for `(a, i)`.
    pub fn kernel(&self, kind: Kind, variant: Variant, a: &Composition, i: usize) -> Result<KernelMatrix, KlocError> {
        let Some(b) = a.raise(i)? else {
            let (src, dst) = if kind == Kind::E { (a.clone(), a.clone()) } else { (a.clone(), a.clone()) };
            return Ok(KernelMatrix::zero(self.n, src, dst));
        };
        let lb = line_bundle(kind, variant, a, i);
        let mut entries = BTreeMap::new();
        for h in corr_fixed_points(a, i)? {
            let (c, mono) = self.line_bundle_value(&lb, &h);
            let x: Vec<LaurentMono> = self
                .cotangent_bundle_character(&h.f1)
                .lambda_dual()
                .into_iter()
                .chain(self.cotangent_bundle_character(&h.f2).lambda_dual())
                .collect();
            let w = self.corr_tangent_character(&h).lambda_dual();
            let v = RatFunc::from_factors(c, mono, &x, &w).expect("no vanishing weight");
            let key = if kind == Kind::E { (h.f1, h.f2) } else { (h.f2, h.f1) };
            entries.insert(key, v);
        }
        let (src, dst) = if kind == Kind::E { (a.clone(), b) } else { (b, a.clone()) };
        let mut k = KernelMatrix { n: self.n, src, dst, entries };
        if self.perturb && kind == Kind::E && i == 1 {
            if let Some(v) = k.entries.values_mut().next() {
                *v = -&*v;
            }
        }
        Ok(k)
    }

    /// Diagonal kernel with entries `cotangent_euler(a, f)`.
    pub fn identity_kernel(&self, a: &Composition) -> KernelMatrix {
        let entries =
            flag_fixed_points(a).into_iter().map(|f| ((f.clone(), f.clone()), self.cotangent_euler(&f))).collect();
        KernelMatrix { n: self.n, src: a.clone(), dst: a.clone(), entries }
    }

    /// `(K1 ⋆ K2)(f, h) = Σ_g K1(f, g) K2(g, h) / cotangent_euler(g)`.
    pub fn convolve(&self, k1: &KernelMatrix, k2: &KernelMatrix) -> Result<KernelMatrix, KlocError> {
        if k1.dst != k2.src {
            return Err(KlocError::CompositionMismatch(k1.src.clone(), k1.dst.clone(), k2.src.clone(), k2.dst.clone()));
        }
        let mut rows: BTreeMap<&FlagFixedPoint, Vec<(&FlagFixedPoint, &RatFunc)>> = BTreeMap::new();
        for ((g, h), v) in &k2.entries {
            rows.entry(g).or_default().push((h, v));
        }
        let inv_euler: BTreeMap<&FlagFixedPoint, RatFunc> = rows
            .keys()
            .map(|g| {
                let ws = self.cotangent_bundle_character(g).lambda_dual();
                (*g, RatFunc::from_factors(Rational::one(), LaurentMono::one(self.n), &[], &ws).expect("nonzero"))
            })
            .collect();
        let mut left: BTreeMap<&FlagFixedPoint, Vec<(&FlagFixedPoint, &RatFunc)>> = BTreeMap::new();
        for ((f, g), v) in &k1.entries {
            left.entry(f).or_default().push((g, v));
        }
        let parts: Vec<Vec<((FlagFixedPoint, FlagFixedPoint), RatFunc)>> = left
            .par_iter()
            .map(|(f, gs)| {
                let mut terms: BTreeMap<&FlagFixedPoint, Vec<RatFunc>> = BTreeMap::new();
                for (g, v) in gs {
                    let Some(row) = rows.get(g) else { continue };
                    let vg = &**v * &inv_euler[g];
                    for (h, w) in row {
                        terms.entry(h).or_default().push(&vg * w);
                    }
                }
                terms
                    .into_iter()
                    .map(|(h, ts)| (((*f).clone(), h.clone()), RatFunc::sum(self.n, ts.iter())))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        let entries = parts.into_iter().flatten().collect();
        Ok(KernelMatrix { n: self.n, src: k1.src.clone(), dst: k2.dst.clone(), entries })
    }

    /// Composite kernel of a word applied left to right starting on `a`
    /// (`('E', i)` raises, `('F', i)` lowers); `None` when the weight leaves
    /// `A(n, k)`, which is the zero kernel.
    pub fn chain(
        &self,
        variant: Variant,
        a: &Composition,
        word: &[(Kind, usize)],
    ) -> Result<Option<KernelMatrix>, KlocError> {
        let mut acc: Option<KernelMatrix> = None;
        let mut cur = a.clone();
        for &(kind, i) in word {
            let k = match kind {
                Kind::E => match cur.raise(i)? {
                    Some(_) => self.kernel(Kind::E, variant, &cur, i)?,
                    None => return Ok(None),
                },
                Kind::F => match cur.lower(i)? {
                    Some(c) => self.kernel(Kind::F, variant, &c, i)?,
                    None => return Ok(None),
                },
            };
            cur = k.dst.clone();
            acc = Some(match acc {
                None => k,
                Some(prev) => self.convolve(&prev, &k)?,
            });
        }
        Ok(acc)
    }

    /// Entry multiplied by `L_src(x) / L_dst(y)` with `L_c = ∏_j det(V_j)^{e_j}`.
    pub fn twist_conjugate_with(&self, k: &KernelMatrix, src_exps: &[i32], dst_exps: &[i32]) -> KernelMatrix {
        let l = |f: &FlagFixedPoint, exps: &[i32]| {
            exps.iter().enumerate().fold(LaurentMono::one(self.n), |acc, (j, &e)| acc.mul(&self.det(f, j + 1).pow(e)))
        };
        let entries = k
            .entries
            .iter()
            .map(|((x, y), v)| ((x.clone(), y.clone()), v.mul_mono(&l(x, src_exps).div(&l(y, dst_exps)))))
            .collect();
        KernelMatrix { n: self.n, src: k.src.clone(), dst: k.dst.clone(), entries }
    }

    /// Conjugation by `⊗_j det(V_j)^{k_j - k_{j+1}}` on both sides.
    pub fn twist_conjugate(&self, k: &KernelMatrix) -> KernelMatrix {
        self.twist_conjugate_with(k, &twist_exponents(&k.src), &twist_exponents(&k.dst))
    }

    /// The `P0` kernel times `[c]{c}`, with `[1] = -1` in K-theory.
    pub fn koszul_dual_kernel(&self, kind: Kind, a: &Composition, i: usize) -> Result<KernelMatrix, KlocError> {
        let k = self.kernel(kind, Variant::P0, a, i)?;
        if k.entries.is_empty() {
            return Ok(k);
        }
        let c = koszul_shift(kind, a, i);
        let (sign, mono) = self.shift(c);
        let sign = if c.rem_euclid(2) == 1 { -sign } else { sign };
        Ok(k.map(|v| v.scale(&sign).mul_mono(&mono)))
    }
}

/// Cohomological shift `c` of the Koszul-dual kernel.
pub fn koszul_shift(kind: Kind, a: &Composition, i: usize) -> i64 {
    match kind {
        Kind::E => a.part(i + 1) as i64 - 1,
        Kind::F => a.part(i) as i64,
    }
}

/// `k_j - k_{j+1} = -c_{j+1}` for `j = 1..k-1`.
pub fn twist_exponents(c: &Composition) -> Vec<i32> {
    (1..c.k()).map(|j| -(c.part(j + 1) as i32)).collect()
}

/// Line bundle of each kernel family on the correspondence for `(a, i)`.
pub fn line_bundle(kind: Kind, variant: Variant, a: &Composition, i: usize) -> LineBundle {
    let ai = a.part(i) as i32;
    let aj = a.part(i + 1) as i32;
    let ii = i as i64;
    let (factors, shift) = match (kind, variant) {
        (Kind::E, Variant::CK0) => {
            (vec![(Det::Lower, 1), (Det::V(i - 1), -1), (Det::V(i + 1), -1), (Det::Upper, 1)], ai as i64)
        }
        (Kind::E, Variant::CK1) => (vec![(Det::Lower, 2), (Det::V(i - 1), -1), (Det::V(i + 1), -1)], ai as i64 + ii),
        (Kind::E, Variant::P0) => (vec![(Det::V(i + 1), -1), (Det::Upper, aj), (Det::Lower, 1 - aj)], ai as i64),
        (Kind::E, Variant::P1) => {
            (vec![(Det::Upper, aj - 1), (Det::Lower, 2 - aj), (Det::V(i + 1), -1)], ai as i64 + ii)
        }
        (Kind::F, Variant::CK0) => {
            let e = aj - ai - 1;
            (vec![(Det::Upper, e), (Det::Lower, -e)], aj as i64 - 1)
        }
        (Kind::F, Variant::CK1) => {
            let e = aj - ai;
            (vec![(Det::Upper, e), (Det::Lower, -e)], aj as i64 - 1 - ii)
        }
        (Kind::F, Variant::P0) => (vec![(Det::V(i - 1), -1), (Det::Upper, -ai), (Det::Lower, ai + 1)], aj as i64 - 1),
        (Kind::F, Variant::P1) => {
            (vec![(Det::Upper, 1 - ai), (Det::Lower, ai), (Det::V(i - 1), -1)], aj as i64 - 1 - ii)
        }
    };
    LineBundle { factors, shift }
}

/// Fixed-point matrix of a kernel, keyed `(source point, target point)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelMatrix {
    pub n: usize,
    pub src: Composition,
    pub dst: Composition,
    pub entries: BTreeMap<(FlagFixedPoint, FlagFixedPoint), RatFunc>,
}

impl KernelMatrix {
    pub fn zero(n: usize, src: Composition, dst: Composition) -> Self {
        KernelMatrix { n, src, dst, entries: BTreeMap::new() }
    }

    pub fn get(&self, x: &FlagFixedPoint, y: &FlagFixedPoint) -> RatFunc {
        self.entries.get(&(x.clone(), y.clone())).cloned().unwrap_or_else(|| RatFunc::zero(self.n))
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> KernelMatrix {
        let entries = self.entries.iter().map(|(k, v)| (k.clone(), f(v))).collect();
        KernelMatrix { n: self.n, src: self.src.clone(), dst: self.dst.clone(), entries }
    }

    pub fn plus(&self, other: &KernelMatrix) -> KernelMatrix {
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            let s = match entries.get(k) {
                Some(x) => x + v,
                None => v.clone(),
            };
            entries.insert(k.clone(), s);
        }
        entries.retain(|_, v| !v.is_zero());
        KernelMatrix { n: self.n, src: self.src.clone(), dst: self.dst.clone(), entries }
    }

    pub fn scale(&self, c: &RatFunc) -> KernelMatrix {
        self.map(|v| v * c)
    }

    /// First entry where the kernels differ.
    pub fn first_difference(&self, other: &KernelMatrix) -> Option<(FlagFixedPoint, FlagFixedPoint)> {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find(|(x, y)| self.get(x, y) != other.get(x, y)).cloned()
    }

    pub fn dump(&self, kind: Kind, variant: Variant, node: usize, conv: Convention) -> KernelDump {
        KernelDump {
            src: self.src.clone(),
            dst: self.dst.clone(),
            variant: variant.to_string(),
            kind: kind.to_string(),
            node,
            convention: conv,
            entries: self
                .entries
                .iter()
                .map(|((x, y), v)| KernelEntry {
                    f1: x.entries().to_vec(),
                    f2: y.entries().to_vec(),
                    value: v.render(),
                })
                .collect(),
        }
    }
}

fn describe(d: Option<(FlagFixedPoint, FlagFixedPoint)>) -> Option<String> {
    d.map(|(x, y)| format!("entry {x} -> {y}"))
}

fn or_zero(g: &Geometry, k: Option<KernelMatrix>, a: &Composition, dst: &Composition) -> KernelMatrix {
    k.unwrap_or_else(|| KernelMatrix::zero(g.n, a.clone(), dst.clone()))
}

/// `F_iE_i - E_iF_i = sign(m)[|m|] · Id` on block `a` with
/// `m = a_{i+1} - a_i`, where `F_iE_i` applies `E_i` first.
pub fn verify_ef_relation(
    g: &Geometry,
    a: &Composition,
    i: usize,
    variant: Variant,
) -> Result<RelationReport, KlocError> {
    let fe = or_zero(g, g.chain(variant, a, &[(Kind::E, i), (Kind::F, i)])?, a, a);
    let ef = or_zero(g, g.chain(variant, a, &[(Kind::F, i), (Kind::E, i)])?, a, a);
    let m = a.part(i + 1) as i64 - a.part(i) as i64;
    let qm = RatFunc::from_poly(signed_quantum_integer(g.n, m));
    let rhs = ef.plus(&g.identity_kernel(a).scale(&qm));
    Ok(RelationReport::new(format!("EF {variant} i={i}"), a, describe(fe.first_difference(&rhs))))
}

/// `F_jE_i = E_iF_j` on block `a` for `i ≠ j`.
pub fn verify_commute(
    g: &Geometry,
    a: &Composition,
    i: usize,
    j: usize,
    variant: Variant,
) -> Result<RelationReport, KlocError> {
    let name = format!("commute {variant} i={i} j={j}");
    let x = g.chain(variant, a, &[(Kind::E, i), (Kind::F, j)])?;
    let y = g.chain(variant, a, &[(Kind::F, j), (Kind::E, i)])?;
    let dst = match (&x, &y) {
        (Some(k), _) | (None, Some(k)) => k.dst.clone(),
        (None, None) => return Ok(RelationReport::new(name, a, None)),
    };
    let x = or_zero(g, x, a, &dst);
    let y = or_zero(g, y, a, &dst);
    Ok(RelationReport::new(name, a, describe(x.first_difference(&y))))
}

/// Twist conjugation carries the `from` kernel onto the `to` kernel entrywise.
pub fn verify_twist(
    g: &Geometry,
    kind: Kind,
    from: Variant,
    to: Variant,
    a: &Composition,
    i: usize,
) -> Result<RelationReport, KlocError> {
    let x = g.twist_conjugate(&g.kernel(kind, from, a, i)?);
    let y = g.kernel(kind, to, a, i)?;
    Ok(RelationReport::new(format!("twist {kind} {from}->{to} i={i}"), a, describe(x.first_difference(&y))))
}

/// Both sides of the graded Serre relation for `kind` on block `a`:
/// `X_iX_iX_j + X_jX_iX_i` and `X_iX_jX_i` (words applied right to left).
pub fn serre_sides(
    g: &Geometry,
    variant: Variant,
    kind: Kind,
    a: &Composition,
    i: usize,
    j: usize,
) -> Result<Option<(KernelMatrix, KernelMatrix)>, KlocError> {
    let w_iij = [(kind, j), (kind, i), (kind, i)];
    let w_jii = [(kind, i), (kind, i), (kind, j)];
    let w_iji = [(kind, i), (kind, j), (kind, i)];
    let mid = g.chain(variant, a, &w_iji)?;
    let l1 = g.chain(variant, a, &w_iij)?;
    let l2 = g.chain(variant, a, &w_jii)?;
    let dst = match [&mid, &l1, &l2].into_iter().flatten().next() {
        Some(k) => k.dst.clone(),
        None => return Ok(None),
    };
    let lhs = or_zero(g, l1, a, &dst).plus(&or_zero(g, l2, a, &dst));
    Ok(Some((lhs, or_zero(g, mid, a, &dst))))
}

/// `X_i²X_j + X_jX_i² = [2] X_iX_jX_i` with `[2] = q + q^{-1}`, plus the
/// same identity after `q → 1` with coefficient 2.
pub fn verify_serre(
    g: &Geometry,
    variant: Variant,
    kind: Kind,
    a: &Composition,
    i: usize,
    j: usize,
) -> Result<Vec<RelationReport>, KlocError> {
    let name = format!("serre {kind} {variant} i={i} j={j}");
    let Some((lhs, mid)) = serre_sides(g, variant, kind, a, i, j)? else {
        return Ok(vec![
            RelationReport::new(name.clone(), a, None),
            RelationReport::new(format!("{name} q=1"), a, None),
        ]);
    };
    let two_q = RatFunc::from_poly(crate::ring::quantum_integer(g.n, 2));
    let graded = describe(lhs.first_difference(&mid.scale(&two_q)));
    let at_one = |k: &KernelMatrix| k.map(|v| v.at_q_one().expect("no q-only denominators"));
    let two = RatFunc::constant(g.n, Rational::from(2));
    let ungraded = describe(at_one(&lhs).first_difference(&at_one(&mid).scale(&two)));
    Ok(vec![RelationReport::new(name.clone(), a, graded), RelationReport::new(format!("{name} q=1"), a, ungraded)])
}

/// Monomial ratio `CK1 / CK0` predicted by the loop twist
/// `det(V_i/V_i')^{-1}{i}` (for `E`) and its inverse-direction analogue for `F`.
pub fn loop_ratio(g: &Geometry, kind: Kind, h: &CorrFixedPoint) -> (Rational, LaurentMono) {
    let lb = match kind {
        Kind::E => LineBundle { factors: vec![(Det::Upper, -1), (Det::Lower, 1)], shift: h.node as i64 },
        Kind::F => LineBundle { factors: vec![(Det::Upper, 1), (Det::Lower, -1)], shift: -(h.node as i64) },
    };
    g.line_bundle_value(&lb, h)
}

/// Convenience: polynomial value of a `RatFunc`, panicking if it is not one.
pub fn expect_poly(v: &RatFunc) -> LaurentPoly {
    v.as_poly().expect("entry is a Laurent polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::enumerate_compositions;

    fn c(p: &[usize]) -> Composition {
        Composition::new(p.to_vec())
    }

    fn geo(n: usize) -> Geometry {
        Geometry::new(n, Convention::STANDARD)
    }

    #[test]
    fn fixed_point_counts() {
        assert_eq!(flag_fixed_points(&c(&[1, 1])).len(), 2);
        assert_eq!(flag_fixed_points(&c(&[2, 0])).len(), 1);
        assert_eq!(flag_fixed_points(&c(&[1, 1, 1])).len(), 6);
    }

    #[test]
    fn tangent_characters() {
        let g = geo(2);
        let f = ValueTuple::new(vec![1, 2]);
        assert_eq!(g.tangent_character(&f).0, vec![LaurentMono::from_exponents(&[-1, 1, 0])]);
        assert!(g.tangent_character(&ValueTuple::new(vec![1, 1])).is_empty());
        let g3 = geo(3);
        for f in flag_fixed_points(&c(&[1, 1, 1])) {
            assert_eq!(g3.tangent_character(&f).len(), 3);
        }
        // (1 - w^-1)(1 - q^-2 w) for w = t2/t1.
        let w = LaurentMono::from_exponents(&[-1, 1, 0]);
        let expect = RatFunc::from_poly(LaurentPoly::one_minus(&w.inv()).mul_one_minus(&w.mul(&LaurentMono::q(2, -2))));
        assert_eq!(g.cotangent_euler(&f), expect);
        assert!(g.cotangent_euler(&ValueTuple::new(vec![1, 1])).as_poly().unwrap().is_one());
    }

    #[test]
    fn correspondence_points() {
        assert_eq!(corr_fixed_points(&c(&[1, 1]), 1).unwrap().len(), 2);
        assert_eq!(corr_fixed_points(&c(&[0, 1]), 1).unwrap().len(), 1);
        assert!(corr_fixed_points(&c(&[1, 0]), 1).unwrap().is_empty());
        let g = geo(2);
        // W is Lagrangian in T*pt × T*P^1.
        for h in corr_fixed_points(&c(&[0, 2]), 1).unwrap() {
            assert_eq!(g.corr_tangent_character(&h).len(), 1);
        }
    }

    #[test]
    fn correspondence_is_lagrangian() {
        for n in 1..=4 {
            let g = geo(n);
            for a in enumerate_compositions(n, 3) {
                for i in 1..3 {
                    let Some(b) = a.raise(i).unwrap() else { continue };
                    let dims = |x: &Composition| {
                        let p = x.parts();
                        (0..p.len()).flat_map(|s| (s + 1..p.len()).map(move |t| p[s] * p[t])).sum::<usize>()
                    };
                    for h in corr_fixed_points(&a, i).unwrap() {
                        let w = g.corr_tangent_character(&h);
                        assert_eq!(w.len(), dims(&a) + dims(&b));
                        // T_h W sits inside T(T*P_a × T*P_b) as a multiset.
                        let mut x: Vec<_> = g
                            .cotangent_bundle_character(&h.f1)
                            .0
                            .into_iter()
                            .chain(g.cotangent_bundle_character(&h.f2).0)
                            .collect();
                        for u in w.0 {
                            let pos = x.iter().position(|v| *v == u).expect("sub-multiset");
                            x.swap_remove(pos);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn line_bundles_at_points() {
        let g = geo(2);
        let f = ValueTuple::new(vec![2, 1]);
        assert_eq!(g.det(&f, 1), LaurentMono::t(2, 2, 1));
        for f in flag_fixed_points(&c(&[1, 1])) {
            assert_eq!(g.det(&f, 2), LaurentMono::from_exponents(&[1, 1, 0]));
        }
        for h in corr_fixed_points(&c(&[1, 1]), 1).unwrap() {
            let lb = LineBundle { factors: vec![(Det::Upper, 1), (Det::Lower, -1)], shift: 0 };
            assert_eq!(g.line_bundle_value(&lb, &h).1, LaurentMono::t(2, h.split + 1, 1));
        }
    }

    #[test]
    fn point_kernels() {
        let g = geo(1);
        let e = g.kernel(Kind::E, Variant::CK0, &c(&[0, 1]), 1).unwrap();
        assert_eq!(e.entries.len(), 1);
        let v = expect_poly(e.entries.values().next().unwrap());
        assert_eq!(v.len(), 1);
        assert!(g.kernel(Kind::E, Variant::CK0, &c(&[1, 0]), 1).unwrap().entries.is_empty());
    }

    #[test]
    fn identity_is_neutral() {
        let g = geo(2);
        let a = c(&[1, 1]);
        let e = g.kernel(Kind::E, Variant::CK0, &a, 1).unwrap();
        let id = g.identity_kernel(&a);
        assert_eq!(g.convolve(&id, &e).unwrap(), e);
        let f = g.kernel(Kind::F, Variant::CK0, &a, 1).unwrap();
        assert_eq!(g.convolve(&f, &id).unwrap(), f);
        assert!(g.convolve(&e, &e).is_err());
    }

    #[test]
    fn ef_small() {
        for n in 1..=2 {
            let g = geo(n);
            for a in enumerate_compositions(n, 2) {
                for v in [Variant::CK0, Variant::P0, Variant::CK1, Variant::P1] {
                    let r = verify_ef_relation(&g, &a, 1, v).unwrap();
                    assert!(!r.status.failed(), "{r:?}");
                }
            }
        }
    }

    #[test]
    fn ef_on_p1_difference() {
        let g = geo(2);
        let a = c(&[0, 2]);
        let fe = g.chain(Variant::CK0, &a, &[(Kind::E, 1), (Kind::F, 1)]).unwrap().unwrap();
        let id = g.identity_kernel(&a);
        let q2 = RatFunc::from_poly(crate::ring::quantum_integer(2, 2));
        assert_eq!(fe.first_difference(&id.scale(&q2)), None);
    }

    #[test]
    fn twists_match() {
        for n in 1..=3 {
            let g = geo(n);
            for a in enumerate_compositions(n, 3) {
                for i in 1..3 {
                    for kind in [Kind::E, Kind::F] {
                        for (ck, p) in [(Variant::CK0, Variant::P0), (Variant::CK1, Variant::P1)] {
                            assert!(!verify_twist(&g, kind, ck, p, &a, i).unwrap().status.failed());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_twist_is_identity() {
        let g = geo(2);
        let k = g.kernel(Kind::E, Variant::CK0, &c(&[1, 1]), 1).unwrap();
        assert_eq!(g.twist_conjugate_with(&k, &[0], &[0]), k);
    }

    #[test]
    fn loop_kernels_are_monomial_rescalings() {
        let g = geo(3);
        for a in enumerate_compositions(3, 3) {
            for i in 1..3 {
                for kind in [Kind::E, Kind::F] {
                    let k0 = g.kernel(kind, Variant::CK0, &a, i).unwrap();
                    let k1 = g.kernel(kind, Variant::CK1, &a, i).unwrap();
                    for h in corr_fixed_points(&a, i).unwrap() {
                        let key =
                            if kind == Kind::E { (h.f1.clone(), h.f2.clone()) } else { (h.f2.clone(), h.f1.clone()) };
                        let (s, m) = loop_ratio(&g, kind, &h);
                        assert_eq!(k1.entries[&key], k0.entries[&key].scale(&s).mul_mono(&m));
                    }
                }
            }
        }
    }

    #[test]
    fn koszul_signs() {
        let g = geo(2);
        let a = c(&[0, 2]);
        let p0 = g.kernel(Kind::E, Variant::P0, &a, 1).unwrap();
        let kd = g.koszul_dual_kernel(Kind::E, &a, 1).unwrap();
        // c = a_2 - 1 = 1: odd, so [1] flips the sign and {1} contributes ε q^σ.
        assert_eq!(koszul_shift(Kind::E, &a, 1), 1);
        let expect = p0.map(|v| v.scale(&Rational::from(-g.conv.shift_sign as i64)).mul_mono(&LaurentMono::q(2, 1)));
        assert_eq!(kd, expect);
        let b = c(&[1, 1]);
        assert_eq!(koszul_shift(Kind::E, &b, 1), 0);
        assert_eq!(g.koszul_dual_kernel(Kind::E, &b, 1).unwrap(), g.kernel(Kind::E, Variant::P0, &b, 1).unwrap());
    }

    #[test]
    fn perturbed_kernel_fails() {
        let mut g = geo(1);
        g.perturb = true;
        let r = verify_ef_relation(&g, &c(&[0, 1]), 1, Variant::CK0).unwrap();
        assert!(r.status.failed());
    }
}
