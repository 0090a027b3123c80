//! Rational functions whose denominators are products of binomials `(1 - w)`.
//!
//! Every denominator met in localization is `Λ_{-1}` of a character, so
//! binomials `1 - w` are kept as a multiset with signed multiplicities.
//! Monomial units live in the Laurent part. Each stored `w` is positive in
//! the sense of [`LaurentMono::is_positive`], using `1 - w = -w (1 - w^-1)`
//! to flip the others.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::{LaurentMono, LaurentPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("division by zero")]
    ZeroDivisor,
    #[error("denominator vanishes: factor (1 - {factor})")]
    DenominatorVanishes { factor: String },
    #[error("divisor {0} is not a unit times a product of (1 - w) factors")]
    Unsupported(String),
    #[error("cannot assign zero to a Laurent variable")]
    ZeroAssignment,
}

/// A variable of the ambient context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `t_m`, 1-based.
    T(usize),
    Q,
}

/// The image of a variable under [`RatFunc::specialize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Mono(LaurentMono),
    Scalar(Rational),
}

/// Canonical form of the binomial `1 - w`: returns `(unit_sign, unit_mono, w')`
/// with `1 - w = unit_sign * unit_mono * (1 - w')` and `w'` positive.
fn canonical_binomial(w: &LaurentMono) -> (bool, LaurentMono, LaurentMono) {
    if w.is_positive() {
        (false, LaurentMono::one(w.nvars()), w.clone())
    } else {
        (true, w.clone(), w.inv())
    }
}

/// `poly · ∏ (1 - w)^{e_w}` with integer exponents `e_w`; binomials stay
/// factored (in numerator and denominator) until a sum forces expansion.
#[derive(Clone)]
pub struct RatFunc {
    poly: LaurentPoly,
    factors: BTreeMap<LaurentMono, i32>,
}

impl RatFunc {
    pub fn zero(n: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(n))
    }

    pub fn one(n: usize) -> Self {
        Self::from_poly(LaurentPoly::one(n))
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::from_poly(LaurentPoly::constant(n, c))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RatFunc { poly: p, factors: BTreeMap::new() }
    }

    pub fn from_mono(m: LaurentMono) -> Self {
        Self::from_poly(LaurentPoly::monomial(m))
    }

    /// `1 / (1 - w)`.
    pub fn inv_one_minus(w: &LaurentMono) -> Result<Self, RingError> {
        Self::from_factors(Rational::one(), LaurentMono::one(w.nvars()), &[], std::slice::from_ref(w))
    }

    /// `c * m * ∏_{u ∈ num} (1 - u) / ∏_{w ∈ den} (1 - w)`.
    pub fn from_factors(
        c: Rational,
        m: LaurentMono,
        num: &[LaurentMono],
        den: &[LaurentMono],
    ) -> Result<Self, RingError> {
        let n = m.nvars();
        let mut coef = c;
        let mut unit = m;
        let mut factors: BTreeMap<LaurentMono, i32> = BTreeMap::new();
        let mut vanishes = false;
        for (ws, dir) in [(num, 1i32), (den, -1i32)] {
            for w in ws {
                if w.is_one() {
                    if dir < 0 {
                        return Err(RingError::ZeroDivisor);
                    }
                    vanishes = true;
                    continue;
                }
                let (neg, u, wc) = canonical_binomial(w);
                if neg {
                    coef = -coef;
                }
                unit = if dir > 0 { unit.mul(&u) } else { unit.div(&u) };
                *factors.entry(wc).or_insert(0) += dir;
            }
        }
        if vanishes || coef.is_zero() {
            return Ok(Self::zero(n));
        }
        factors.retain(|_, e| *e != 0);
        Ok(RatFunc { poly: LaurentPoly::term(coef, unit), factors })
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    /// Fully expanded numerator of the reduced form.
    pub fn numerator(&self) -> LaurentPoly {
        self.reduced().poly
    }

    /// The denominator of the reduced form as `(w, multiplicity)` pairs,
    /// each meaning `(1 - w)^mult`.
    pub fn denominator(&self) -> Vec<(LaurentMono, u32)> {
        self.reduced().factors.into_iter().map(|(w, e)| (w, (-e) as u32)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// True when no binomial remains in the denominator after reduction.
    pub fn is_polynomial(&self) -> bool {
        self.factors.values().all(|&e| e > 0) || self.reduced().factors.is_empty()
    }

    /// The polynomial value when the denominator cancels completely.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        let r = self.reduced();
        r.factors.is_empty().then_some(r.poly)
    }

    /// Expands numerator binomials into the polynomial part and cancels
    /// denominator binomials wherever division is exact.
    fn reduced(&self) -> RatFunc {
        let mut poly = self.poly.clone();
        let mut den = BTreeMap::new();
        for (w, &e) in &self.factors {
            if e > 0 {
                for _ in 0..e {
                    poly = poly.mul_one_minus(w);
                }
            } else {
                den.insert(w.clone(), e);
            }
        }
        RatFunc { poly, factors: den }.cancel()
    }

    /// Divides the polynomial part by denominator binomials where exact.
    fn cancel(mut self) -> Self {
        if self.poly.is_zero() {
            self.factors.clear();
            return self;
        }
        let ws: Vec<LaurentMono> = self.factors.iter().filter(|(_, &e)| e < 0).map(|(w, _)| w.clone()).collect();
        for w in ws {
            let mut e = self.factors[&w];
            while e < 0 {
                match self.poly.div_one_minus(&w) {
                    Some(q) => {
                        self.poly = q;
                        e += 1;
                    }
                    None => break,
                }
            }
            if e == 0 {
                self.factors.remove(&w);
            } else {
                self.factors.insert(w, e);
            }
        }
        self
    }

    /// Sum of many terms. Binomials common to every term are factored out;
    /// only the cofactors are expanded.
    pub fn sum<'a>(n: usize, items: impl IntoIterator<Item = &'a RatFunc>) -> RatFunc {
        let items: Vec<&RatFunc> = items.into_iter().filter(|x| !x.is_zero()).collect();
        match items.len() {
            0 => return Self::zero(n),
            1 => return items[0].clone(),
            _ => {}
        }
        let mut common: BTreeMap<LaurentMono, i32> = BTreeMap::new();
        for x in &items {
            for w in x.factors.keys() {
                common.entry(w.clone()).or_insert(0);
            }
        }
        for (w, c) in common.iter_mut() {
            *c = items.iter().map(|x| x.factors.get(w).copied().unwrap_or(0)).min().unwrap();
        }
        let mut poly = LaurentPoly::zero(n);
        for x in &items {
            let mut p = x.poly.clone();
            for (w, c) in &common {
                let e = x.factors.get(w).copied().unwrap_or(0);
                for _ in 0..(e - c) {
                    p = p.mul_one_minus(w);
                }
            }
            poly = &poly + &p;
        }
        common.retain(|_, e| *e != 0);
        RatFunc { poly, factors: common }.cancel()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFunc { poly: self.poly.scale(c), factors: self.factors.clone() }
    }

    pub fn mul_mono(&self, m: &LaurentMono) -> Self {
        RatFunc { poly: self.poly.mul_mono(m), factors: self.factors.clone() }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        self * &RatFunc::from_poly(p.clone())
    }

    /// Division; the divisor's polynomial part must be a monomial or a
    /// binomial `c·m·(1 - w)`.
    pub fn try_div(&self, other: &RatFunc) -> Result<RatFunc, RingError> {
        if other.is_zero() {
            return Err(RingError::ZeroDivisor);
        }
        let (c, m, w) = match other.poly.terms() {
            [(m, c)] => (c.clone(), m.clone(), None),
            [(m1, c1), (m2, c2)] if c1 == &-c2 => (c1.clone(), m1.clone(), Some(m2.div(m1))),
            _ => return Err(RingError::Unsupported(other.poly.to_string())),
        };
        let inv_c = c.recip().ok_or(RingError::ZeroDivisor)?;
        let den_ws: Vec<LaurentMono> = w.into_iter().collect();
        let mut inv = RatFunc::from_factors(inv_c, m.inv(), &[], &den_ws)?;
        for (w, e) in &other.factors {
            let slot = inv.factors.entry(w.clone()).or_insert(0);
            *slot -= e;
        }
        inv.factors.retain(|_, e| *e != 0);
        Ok(self * &inv)
    }

    /// Applies a substitution homomorphism to numerator and denominator.
    pub fn specialize(&self, assign: &BTreeMap<Var, Value>) -> Result<RatFunc, RingError> {
        let n = self.nvars();
        let image = |m: &LaurentMono| -> Result<(Rational, LaurentMono), RingError> {
            let mut c = Rational::one();
            let mut out = LaurentMono::one(n);
            let mut keep = m.exponents().to_vec();
            for (var, val) in assign {
                let slot = match *var {
                    Var::T(j) => {
                        assert!((1..=n).contains(&j), "t{j} outside context");
                        j - 1
                    }
                    Var::Q => n,
                };
                let e = keep[slot];
                keep[slot] = 0;
                if e == 0 {
                    continue;
                }
                match val {
                    Value::Mono(x) => out = out.mul(&x.pow(e)),
                    Value::Scalar(s) => {
                        if s.is_zero() {
                            return Err(RingError::ZeroAssignment);
                        }
                        c *= &s.pow(e);
                    }
                }
            }
            Ok((c, out.mul(&LaurentMono::from_exponents(&keep))))
        };
        let r = self.reduced();
        let mut images = Vec::with_capacity(r.poly.len());
        for (m, k) in r.poly.terms() {
            let (c, m2) = image(m)?;
            images.push((m2, &c * k));
        }
        let num = LaurentPoly::from_terms(n, images);
        let mut scalar = Rational::one();
        let mut den_ws = Vec::new();
        for (w, &e) in &r.factors {
            let (c, w2) = image(w)?;
            let e = (-e) as u32;
            if w2.is_one() {
                let v = &Rational::one() - &c;
                if v.is_zero() {
                    return Err(RingError::DenominatorVanishes { factor: w.to_string() });
                }
                scalar *= &v.pow(e as i32);
            } else if c.is_one() {
                for _ in 0..e {
                    den_ws.push(w2.clone());
                }
            } else {
                return Err(RingError::Unsupported(format!("1 - {c}*{w2}")));
            }
        }
        let inv = RatFunc::from_factors(scalar.recip().unwrap(), LaurentMono::one(n), &[], &den_ws)?;
        Ok((&RatFunc::from_poly(num) * &inv).cancel())
    }

    /// Substitutes `q -> 1`.
    pub fn at_q_one(&self) -> Result<RatFunc, RingError> {
        let mut a = BTreeMap::new();
        a.insert(Var::Q, Value::Scalar(Rational::one()));
        self.specialize(&a)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.nvars() != other.nvars() {
            return false;
        }
        if self.factors == other.factors {
            return self.poly == other.poly;
        }
        (self - other).is_zero()
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.factors.is_empty() {
            return write!(f, "{}", r.poly);
        }
        write!(f, "({}) / (", r.poly)?;
        for (ix, (w, e)) in r.factors.iter().enumerate() {
            if ix > 0 {
                write!(f, "*")?;
            }
            write!(f, "(1 - {w})")?;
            if *e < -1 {
                write!(f, "^{}", -e)?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &'a RatFunc) -> RatFunc {
        RatFunc::sum(self.nvars(), [self, rhs])
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &'a RatFunc) -> RatFunc {
        let neg = -rhs;
        RatFunc::sum(self.nvars(), [self, &neg])
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &'a RatFunc) -> RatFunc {
        let n = self.nvars();
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(n);
        }
        let mut factors = self.factors.clone();
        for (w, &e) in &rhs.factors {
            *factors.entry(w.clone()).or_insert(0) += e;
        }
        factors.retain(|_, e| *e != 0);
        RatFunc { poly: &self.poly * &rhs.poly, factors }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { poly: -&self.poly, factors: self.factors.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::quantum_integer;

    fn t(n: usize, m: usize) -> LaurentMono {
        LaurentMono::t(n, m, 1)
    }

    #[test]
    fn telescoping_sum() {
        let n = 1;
        let a = RatFunc::inv_one_minus(&t(n, 1)).unwrap();
        let b = a.mul_mono(&t(n, 1)).scale(&Rational::from(-1));
        assert_eq!(&a + &b, RatFunc::one(n));
        assert!((&a + &b).is_polynomial());
    }

    #[test]
    fn inverse_pair() {
        let n = 2;
        let w = t(n, 1).div(&t(n, 2));
        let x = RatFunc::from_poly(LaurentPoly::one_minus(&w));
        let y = RatFunc::inv_one_minus(&w).unwrap();
        let p = &x * &y;
        assert!(p.as_poly().unwrap().is_one());
        // Negative w is stored flipped.
        let z = RatFunc::inv_one_minus(&w.inv()).unwrap();
        assert_eq!(z.denominator()[0].0, w);
        assert!((&RatFunc::from_poly(LaurentPoly::one_minus(&w.inv())) * &z).as_poly().unwrap().is_one());
    }

    #[test]
    fn quantum_square() {
        let n = 0;
        let two = RatFunc::from_poly(quantum_integer(n, 2));
        let three = RatFunc::from_poly(quantum_integer(n, 3));
        let r = &(&(&two * &two) - &three) - &RatFunc::one(n);
        assert!(r.is_zero());
    }

    #[test]
    fn specialize_examples() {
        let n = 1;
        let three = RatFunc::from_poly(quantum_integer(n, 3));
        assert_eq!(three.at_q_one().unwrap(), RatFunc::constant(n, Rational::from(3)));
        let qt = LaurentMono::from_exponents(&[1, 1]);
        let x = RatFunc::inv_one_minus(&qt).unwrap().at_q_one().unwrap();
        assert_eq!(x, RatFunc::inv_one_minus(&t(n, 1)).unwrap());
        let bad = RatFunc::inv_one_minus(&LaurentMono::q(n, 1)).unwrap();
        let err = bad.at_q_one().unwrap_err();
        assert!(matches!(err, RingError::DenominatorVanishes { .. }));
        assert!(err.to_string().contains("denominator vanishes"));
    }

    #[test]
    fn specialize_scalar_factor() {
        // 1/(1 - 2 q^0) after q -> 2 in 1/(1 - q) is -1.
        let n = 0;
        let x = RatFunc::inv_one_minus(&LaurentMono::q(n, 1)).unwrap();
        let mut a = BTreeMap::new();
        a.insert(Var::Q, Value::Scalar(Rational::from(2)));
        assert_eq!(x.specialize(&a).unwrap(), RatFunc::constant(n, Rational::from(-1)));
    }

    #[test]
    fn division() {
        let n = 2;
        let w = t(n, 1);
        let a = RatFunc::from_poly(quantum_integer(n, 3));
        let b =
            RatFunc::from_poly(LaurentPoly::one_minus(&w)).mul_mono(&LaurentMono::q(n, 2)).scale(&Rational::from(3));
        let c = a.try_div(&b).unwrap();
        assert_eq!(&c * &b, a);
        assert_eq!(a.try_div(&RatFunc::zero(n)).unwrap_err(), RingError::ZeroDivisor);
        assert!(matches!(b.try_div(&a), Err(RingError::Unsupported(_))));
        let d = RatFunc::inv_one_minus(&w).unwrap();
        assert_eq!(a.try_div(&d).unwrap(), RatFunc::from_poly(quantum_integer(n, 3).mul_one_minus(&w)));
    }

    #[test]
    fn zero_factor_rejected() {
        let n = 1;
        assert_eq!(RatFunc::inv_one_minus(&LaurentMono::one(n)).unwrap_err(), RingError::ZeroDivisor);
    }
}
