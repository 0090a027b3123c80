//! Sparse Laurent polynomials in `t1, …, tn, q` with exact rational coefficients.
//!
//! A monomial is an exponent vector of length `n + 1`: slots `0..n` hold the
//! torus variables `t1..tn`, the final slot holds the grading variable `q`.
//! Polynomials keep their terms sorted by monomial so that equality is
//! structural and rendering is stable.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::Rational;

/// A Laurent monomial `t1^e1 ⋯ tn^en q^e`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentMono(SmallVec<[i32; 8]>);

impl LaurentMono {
    /// The identity monomial for a context with `n` torus variables.
    pub fn one(n: usize) -> Self {
        LaurentMono(SmallVec::from_elem(0, n + 1))
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        assert!(!exps.is_empty(), "a monomial needs at least the q slot");
        LaurentMono(SmallVec::from_slice(exps))
    }

    /// `t_m^e` (1-based `m`) in a context with `n` torus variables.
    pub fn t(n: usize, m: usize, e: i32) -> Self {
        assert!((1..=n).contains(&m), "t{m} outside 1..={n}");
        let mut x = Self::one(n);
        x.0[m - 1] = e;
        x
    }

    /// `q^e` in a context with `n` torus variables.
    pub fn q(n: usize, e: i32) -> Self {
        let mut x = Self::one(n);
        x.0[n] = e;
        x
    }

    /// Number of torus variables `n` (the vector has `n + 1` slots).
    pub fn nvars(&self) -> usize {
        self.0.len() - 1
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn exponent(&self, slot: usize) -> i32 {
        self.0[slot]
    }

    pub fn q_exponent(&self) -> i32 {
        self.0[self.0.len() - 1]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.0.len(), other.0.len(), "monomials from different contexts");
        LaurentMono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inv(&self) -> Self {
        LaurentMono(self.0.iter().map(|a| -a).collect())
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i32) -> Self {
        LaurentMono(self.0.iter().map(|a| a * e).collect())
    }

    /// True when the first non-zero exponent is positive. Exactly one of `w`
    /// and `w^-1` is positive for every `w != 1`.
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&e| e != 0).is_some_and(|&e| e > 0)
    }

    /// Key used for rendering: `q` first, then `t1..tn`.
    fn render_key(&self) -> impl Ord + '_ {
        let n = self.nvars();
        std::iter::once(self.0[n]).chain(self.0[..n].iter().copied()).collect::<SmallVec<[i32; 8]>>()
    }

    fn write_factors(&self, f: &mut fmt::Formatter<'_>) -> Result<bool, fmt::Error> {
        let n = self.nvars();
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, name: &str, e: i32| -> fmt::Result {
            if e == 0 {
                return Ok(());
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")
            } else {
                write!(f, "{name}^{e}")
            }
        };
        emit(f, "q", self.0[n])?;
        for m in 0..n {
            emit(f, &format!("t{}", m + 1), self.0[m])?;
        }
        Ok(!first)
    }
}

impl fmt::Display for LaurentMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.write_factors(f)? {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite sum of `coefficient * monomial` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    /// Sorted by monomial, strictly increasing.
    terms: Vec<(LaurentMono, Rational)>,
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { nvars: n, terms: Vec::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::term(c, LaurentMono::one(n))
    }

    pub fn monomial(m: LaurentMono) -> Self {
        Self::term(Rational::one(), m)
    }

    pub fn term(c: Rational, m: LaurentMono) -> Self {
        let nvars = m.nvars();
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        LaurentPoly { nvars, terms }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (LaurentMono, Rational)>) -> Self {
        let mut acc: HashMap<LaurentMono, Rational> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), n, "monomial from a different context");
            let e = acc.entry(m).or_insert_with(Rational::zero);
            *e += &c;
        }
        Self::from_map(n, acc)
    }

    fn from_map(n: usize, acc: HashMap<LaurentMono, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        LaurentPoly { nvars: n, terms }
    }

    /// `1 - w`.
    pub fn one_minus(w: &LaurentMono) -> Self {
        let n = w.nvars();
        Self::from_terms(n, [(LaurentMono::one(n), Rational::one()), (w.clone(), -Rational::one())])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(LaurentMono, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The constant term if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The single term if the polynomial is `c * m` with `c != 0`.
    pub fn as_term(&self) -> Option<(&LaurentMono, &Rational)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, c)),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &LaurentMono) -> Rational {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(m))
            .map(|ix| self.terms[ix].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomials from different contexts");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &Rational| if negate_other { -c.clone() } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.0.clone(), sign(&b.1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other { &a.1 - &b.1 } else { &a.1 + &b.1 };
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        LaurentPoly { nvars: self.nvars, terms: out }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// Multiplication by a monomial keeps the term order.
    pub fn mul_mono(&self, w: &LaurentMono) -> Self {
        LaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.mul(w), c.clone())).collect() }
    }

    /// `self * (1 - w)`.
    pub fn mul_one_minus(&self, w: &LaurentMono) -> Self {
        self.merge(&self.mul_mono(w), true)
    }

    /// Exact quotient `self / (1 - w)`, or `None` when `(1 - w)` does not divide.
    ///
    /// The exponent lattice splits into cosets of `Z·w`; on each coset the
    /// polynomial is a univariate Laurent polynomial in `w`, divisible by
    /// `1 - w` iff its coefficients sum to zero, with quotient given by
    /// partial sums.
    pub fn div_one_minus(&self, w: &LaurentMono) -> Option<Self> {
        assert!(!w.is_one(), "division by 1 - 1");
        let v = w.exponents();
        let p = v.iter().position(|&e| e != 0).unwrap();
        let vp = v[p];
        let mut chains: HashMap<LaurentMono, Vec<(i32, &Rational)>> = HashMap::new();
        for (m, c) in &self.terms {
            let j = m.exponent(p).div_euclid(vp);
            let rep = m.mul(&w.pow(-j));
            chains.entry(rep).or_default().push((j, c));
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (rep, mut chain) in chains {
            chain.sort_unstable_by_key(|(j, _)| *j);
            let mut acc = Rational::zero();
            let mut prev: Option<i32> = None;
            for (j, c) in chain {
                // Partial sums stay constant across gaps in the chain.
                if let Some(pj) = prev {
                    if !acc.is_zero() {
                        for jj in pj..j {
                            out.push((rep.mul(&w.pow(jj)), acc.clone()));
                        }
                    }
                }
                acc += c;
                prev = Some(j);
            }
            if !acc.is_zero() {
                return None;
            }
        }
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Some(LaurentPoly { nvars: self.nvars, terms: out })
    }

    /// Applies `f` to every monomial, producing `coefficient * monomial` images.
    pub fn map_terms(&self, n: usize, mut f: impl FnMut(&LaurentMono) -> (Rational, LaurentMono)) -> Self {
        Self::from_terms(
            n,
            self.terms.iter().map(|(m, c)| {
                let (k, m2) = f(m);
                (m2, c * &k)
            }),
        )
    }

    /// Degree range of `q`, if non-zero.
    pub fn q_range(&self) -> Option<(i32, i32)> {
        let mut it = self.terms.iter().map(|(m, _)| m.q_exponent());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Substitutes `q -> q^-1`.
    pub fn bar_q(&self) -> Self {
        let n = self.nvars;
        self.map_terms(n, |m| {
            let mut e = m.exponents().to_vec();
            e[n] = -e[n];
            (Rational::one(), LaurentMono::from_exponents(&e))
        })
    }

    /// Canonical text rendering, e.g. `3*q^2*t1^-1 + q - 1/2`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by(|a, b| b.0.render_key().cmp(&a.0.render_key()));
        for (ix, (m, c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (ix, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                m.write_factors(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.merge(rhs, false)
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.merge(rhs, true)
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars, "polynomials from different contexts");
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        if let Some((m, c)) = rhs.as_term() {
            return self.mul_mono(m).scale(c);
        }
        if let Some((m, c)) = self.as_term() {
            return rhs.mul_mono(m).scale(c);
        }
        let mut acc: HashMap<LaurentMono, Rational> = HashMap::with_capacity(self.len() * rhs.len());
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e = acc.entry(a.mul(b)).or_insert_with(Rational::zero);
                *e += &(x * y);
            }
        }
        LaurentPoly::from_map(self.nvars, acc)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `[d] = q^{d-1} + q^{d-3} + ⋯ + q^{1-d}`; zero for `d = 0`.
pub fn quantum_integer(n: usize, d: u32) -> LaurentPoly {
    let d = d as i32;
    LaurentPoly::from_terms(n, (0..d).map(|j| (LaurentMono::q(n, d - 1 - 2 * j), Rational::one())))
}

/// `sign(m) * [|m|]`, the graded multiplicity of the weight-`m` commutator.
pub fn signed_quantum_integer(n: usize, m: i64) -> LaurentPoly {
    let base = quantum_integer(n, m.unsigned_abs() as u32);
    if m < 0 {
        -&base
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i32) -> LaurentPoly {
        LaurentPoly::monomial(LaurentMono::q(2, e))
    }

    #[test]
    fn quantum_integers_small() {
        assert!(quantum_integer(0, 0).is_zero());
        assert!(quantum_integer(0, 1).is_one());
        let three = &(&q(2) + &LaurentPoly::one(2)) + &q(-2);
        assert_eq!(quantum_integer(2, 3), three);
        assert_eq!(quantum_integer(2, 3).to_string(), "q^2 + 1 + q^-2");
    }

    #[test]
    fn rendering_is_sorted_and_signed() {
        let n = 2;
        let p = LaurentPoly::from_terms(
            n,
            [
                (LaurentMono::from_exponents(&[-1, 0, 2]), Rational::from(3)),
                (LaurentMono::one(n), Rational::new(-1, 2)),
                (LaurentMono::from_exponents(&[0, 1, 0]), Rational::from(-1)),
            ],
        );
        assert_eq!(p.to_string(), "3*q^2*t1^-1 - t2 - 1/2");
    }

    #[test]
    fn exact_division_by_binomial() {
        let n = 2;
        let w = LaurentMono::from_exponents(&[1, -1, 0]);
        let base = LaurentPoly::from_terms(
            n,
            [
                (LaurentMono::from_exponents(&[2, 0, 1]), Rational::from(5)),
                (LaurentMono::from_exponents(&[0, 0, -3]), Rational::from(-2)),
                (LaurentMono::from_exponents(&[3, -3, 0]), Rational::from(1)),
            ],
        );
        let prod = base.mul_one_minus(&w);
        assert_eq!(prod.div_one_minus(&w).unwrap(), base);
        // 1 + w is not divisible by 1 - w.
        let not = &LaurentPoly::one(n) + &LaurentPoly::monomial(w.clone());
        assert!(not.div_one_minus(&w).is_none());
    }

    #[test]
    fn division_handles_gapped_chains() {
        // 1 - w^3 = (1 - w)(1 + w + w^2)
        let w = LaurentMono::from_exponents(&[0, 1]);
        let p = LaurentPoly::one_minus(&w.pow(3));
        let quo = p.div_one_minus(&w).unwrap();
        assert_eq!(quo.to_string(), "q^2 + q + 1");
        let w2 = LaurentMono::from_exponents(&[0, -2]);
        let quo2 = LaurentPoly::one_minus(&w2.pow(2)).div_one_minus(&w2).unwrap();
        assert_eq!(quo2.to_string(), "1 + q^-2");
    }
}
