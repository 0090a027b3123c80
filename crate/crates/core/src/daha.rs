//! Matrix model of `x_j` and `t_j` on `M ⊗ (C^n)^{⊗d}` with `M = (C^n)^{⊗m}`.

use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::report::{DahaReport, NamedStatus, Status};
use crate::ring::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DahaError {
    #[error("invalid tensor context n={n} m={m} d={d}")]
    InvalidContext { n: usize, m: usize, d: usize },
    #[error("factor index out of range: {0}")]
    IndexOutOfRange(String),
}

/// `n` is the dimension of `C^n`, `m` the tensor length of `M`, `d` the
/// number of appended factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorContext {
    pub n: usize,
    pub m: usize,
    pub d: usize,
}

impl TensorContext {
    pub fn new(n: usize, m: usize, d: usize) -> Result<Self, DahaError> {
        if n == 0 || d == 0 || n.pow((m + d) as u32) > 4096 {
            return Err(DahaError::InvalidContext { n, m, d });
        }
        Ok(TensorContext { n, m, d })
    }

    pub fn dim(&self) -> usize {
        self.n.pow((self.m + self.d) as u32)
    }

    fn factors(&self) -> usize {
        self.m + self.d
    }

    /// Digit of factor `p` (0 is most significant) in basis index `ix`.
    fn digit(&self, ix: usize, p: usize) -> usize {
        (ix / self.n.pow((self.factors() - 1 - p) as u32)) % self.n
    }

    fn with_digit(&self, ix: usize, p: usize, v: usize) -> usize {
        let w = self.n.pow((self.factors() - 1 - p) as u32);
        ix - self.digit(ix, p) * w + v * w
    }

    /// Permutation matrix exchanging tensor factors `p` and `q`.
    pub fn swap(&self, p: usize, q: usize) -> DenseOp {
        let dim = self.dim();
        let mut op = DenseOp::zero(dim);
        for ix in 0..dim {
            let (x, y) = (self.digit(ix, p), self.digit(ix, q));
            let jx = self.with_digit(self.with_digit(ix, p, y), q, x);
            op.set(jx, ix, Rational::one());
        }
        op
    }

    /// Position of appended factor `j` (1-based).
    fn appended(&self, j: usize) -> usize {
        self.m + j - 1
    }
}

/// Square matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseOp {
    dim: usize,
    data: Vec<Rational>,
}

impl std::fmt::Debug for DenseOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.dim.min(16) {
            let row: Vec<String> = (0..self.dim.min(16)).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl DenseOp {
    pub fn zero(dim: usize) -> Self {
        DenseOp { dim, data: vec![Rational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        for i in 0..dim {
            op.set(i, i, Rational::one());
        }
        op
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let dim = rows.len();
        let mut op = Self::zero(dim);
        for (r, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (c, x) in row.into_iter().enumerate() {
                op.set(r, c, Rational::from(x));
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.dim + c] = v;
    }

    pub fn scale(&self, c: &Rational) -> DenseOp {
        DenseOp { dim: self.dim, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn trace(&self) -> Rational {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn commutator(&self, other: &DenseOp) -> DenseOp {
        &(self * other) - &(other * self)
    }

    /// Characteristic polynomial `det(λ - A)`, coefficients from degree 0 up,
    /// by the Faddeev–LeVerrier recursion.
    pub fn char_poly(&self) -> Vec<Rational> {
        let n = self.dim;
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut m = DenseOp::zero(n);
        for k in 1..=n {
            let mut next = self * &m;
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            let am = self * &next;
            c[n - k] = -(am.trace() / Rational::from(k as i64));
            m = next;
        }
        c
    }
}

impl<'a> Mul<&'a DenseOp> for &'a DenseOp {
    type Output = DenseOp;
    fn mul(self, rhs: &'a DenseOp) -> DenseOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = DenseOp::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a DenseOp> for &'a DenseOp {
    type Output = DenseOp;
    fn add(self, rhs: &'a DenseOp) -> DenseOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOp { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a DenseOp> for &'a DenseOp {
    type Output = DenseOp;
    fn sub(self, rhs: &'a DenseOp) -> DenseOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOp { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// `Ω = Σ e_ij ⊗ e_ji` between factor `s` (0 meaning all of `M`) and appended factor `j`.
pub fn omega_pair(ctx: &TensorContext, s: usize, j: usize) -> Result<DenseOp, DahaError> {
    if j == 0 || j > ctx.d || s >= j {
        return Err(DahaError::IndexOutOfRange(format!("omega_pair({s}, {j}) with d={}", ctx.d)));
    }
    let target = ctx.appended(j);
    if s >= 1 {
        return Ok(ctx.swap(ctx.appended(s), target));
    }
    let mut acc = DenseOp::zero(ctx.dim());
    for u in 0..ctx.m {
        acc = &acc + &ctx.swap(u, target);
    }
    Ok(acc)
}

/// `x_j = Σ_{s<j} Ω_{s,j}`.
pub fn x_op(ctx: &TensorContext, j: usize) -> Result<DenseOp, DahaError> {
    if j == 0 || j > ctx.d {
        return Err(DahaError::IndexOutOfRange(format!("x_{j} with d={}", ctx.d)));
    }
    let mut acc = DenseOp::zero(ctx.dim());
    for s in 0..j {
        acc = &acc + &omega_pair(ctx, s, j)?;
    }
    Ok(acc)
}

/// Flip of appended factors `j`, `j+1`.
pub fn t_op(ctx: &TensorContext, j: usize) -> Result<DenseOp, DahaError> {
    if j == 0 || j >= ctx.d {
        return Err(DahaError::IndexOutOfRange(format!("t_{j} with d={}", ctx.d)));
    }
    Ok(ctx.swap(ctx.appended(j), ctx.appended(j + 1)))
}

/// Diagonal action of the matrix unit `e_ab` (0-based) on every factor.
pub fn delta_unit(ctx: &TensorContext, a: usize, b: usize) -> DenseOp {
    let dim = ctx.dim();
    let mut op = DenseOp::zero(dim);
    for ix in 0..dim {
        for p in 0..ctx.factors() {
            if ctx.digit(ix, p) == b {
                let jx = ctx.with_digit(ix, p, a);
                let v = op.get(jx, ix) + &Rational::one();
                op.set(jx, ix, v);
            }
        }
    }
    op
}

fn named(name: String, ok: bool) -> NamedStatus {
    NamedStatus { name, status: Status::from_ok(ok) }
}

/// Checks the degenerate affine Hecke relations; with `perturb`, one entry
/// of `t_1` is negated first.
pub fn verify_daha(ctx: &TensorContext, perturb: bool) -> DahaReport {
    let d = ctx.d;
    let mut ts: Vec<DenseOp> = (1..d).map(|j| t_op(ctx, j).unwrap()).collect();
    if perturb && !ts.is_empty() {
        let v = -ts[0].get(0, 0).clone();
        ts[0].set(0, 0, v);
    }
    let xs: Vec<DenseOp> = (1..=d).map(|j| x_op(ctx, j).unwrap()).collect();
    let id = DenseOp::identity(ctx.dim());
    let mut rel = Vec::new();
    for (j, t) in ts.iter().enumerate() {
        rel.push(named(format!("t{}^2 = 1", j + 1), &(t * t) == &id));
    }
    for j in 0..ts.len() {
        for l in j + 1..ts.len() {
            let name = format!("t{} t{}", j + 1, l + 1);
            if l == j + 1 {
                let lhs = &(&ts[j] * &ts[l]) * &ts[j];
                let rhs = &(&ts[l] * &ts[j]) * &ts[l];
                rel.push(named(format!("braid {name}"), lhs == rhs));
            } else {
                rel.push(named(format!("commute {name}"), ts[j].commutator(&ts[l]).is_zero()));
            }
        }
    }
    for (j, t) in ts.iter().enumerate() {
        for (i, x) in xs.iter().enumerate() {
            if i != j && i != j + 1 {
                rel.push(named(format!("commute t{} x{}", j + 1, i + 1), t.commutator(x).is_zero()));
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            rel.push(named(format!("commute x{} x{}", i + 1, j + 1), xs[i].commutator(&xs[j]).is_zero()));
        }
    }
    let mut epsilon = None;
    if d >= 2 {
        for eps in [1i8, -1] {
            let e = Rational::from(eps as i64);
            let ok = ts.iter().enumerate().all(|(j, t)| {
                let rhs = &(&(t * &xs[j]) * t) + &t.scale(&e);
                xs[j + 1] == rhs
            });
            if ok {
                epsilon = Some(eps);
                break;
            }
        }
        rel.push(named("x_{j+1} = t_j x_j t_j + eps t_j".to_string(), epsilon.is_some()));
    } else {
        rel.push(NamedStatus { name: "x_{j+1} = t_j x_j t_j + eps t_j".to_string(), status: Status::Skipped });
    }
    for r in casimir_compatibility(ctx) {
        rel.push(r);
    }
    DahaReport { n: ctx.n, m: ctx.m, d, epsilon, relations: rel }
}

/// `[x_d, Δ(e_ab)] = 0` for all matrix units.
pub fn casimir_compatibility(ctx: &TensorContext) -> Vec<NamedStatus> {
    let x = x_op(ctx, ctx.d).unwrap();
    let mut out = Vec::new();
    for a in 0..ctx.n {
        for b in 0..ctx.n {
            let ok = x.commutator(&delta_unit(ctx, a, b)).is_zero();
            out.push(named(format!("commute x{} e{}{}", ctx.d, a + 1, b + 1), ok));
        }
    }
    out
}

/// Roots of an integer polynomial (coefficients from degree 0), with
/// multiplicity, if it splits into integer linear factors.
pub fn integer_roots(coeffs: &[Rational]) -> Option<Vec<i64>> {
    let mut p: Vec<i64> =
        coeffs.iter().map(|c| if c.is_integer() { c.to_i64() } else { None }).collect::<Option<_>>()?;
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    let mut roots = Vec::new();
    loop {
        let deg = p.len() - 1;
        if deg == 0 {
            return Some(roots);
        }
        if p[0] == 0 {
            roots.push(0);
            p.remove(0);
            continue;
        }
        let lead = *p.last().unwrap();
        if lead.abs() != 1 {
            return None;
        }
        let c0 = p[0].unsigned_abs();
        let root = (1..=c0)
            .filter(|x| c0 % x == 0)
            .flat_map(|x| [x as i64, -(x as i64)])
            .find(|&r| p.iter().rev().fold(0i128, |acc, &c| acc * r as i128 + c as i128) == 0)?;
        // Synthetic division by (X - root).
        let mut q = vec![0i64; deg];
        let mut carry = 0i64;
        for k in (1..=deg).rev() {
            carry = p[k] + carry * root;
            q[k - 1] = carry;
        }
        roots.push(root);
        p = q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_flip() {
        let ctx = TensorContext::new(2, 1, 1).unwrap();
        let flip = DenseOp::from_rows(vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 1]]);
        assert_eq!(omega_pair(&ctx, 0, 1).unwrap(), flip);
        assert_eq!(x_op(&ctx, 1).unwrap(), flip);
        let ctx0 = TensorContext::new(2, 0, 2).unwrap();
        assert!(omega_pair(&ctx0, 0, 1).unwrap().is_zero());
        assert_eq!(x_op(&ctx0, 2).unwrap(), t_op(&ctx0, 1).unwrap());
        assert_eq!(t_op(&ctx0, 1).unwrap(), flip);
        assert!(omega_pair(&ctx, 1, 1).is_err());
        assert!(t_op(&ctx, 1).is_err());
    }

    #[test]
    fn x2_structure() {
        let ctx = TensorContext::new(2, 1, 2).unwrap();
        let x2 = x_op(&ctx, 2).unwrap();
        assert_eq!(x2.dim(), 8);
        assert_eq!(x2, &omega_pair(&ctx, 0, 2).unwrap() + &omega_pair(&ctx, 1, 2).unwrap());
    }

    #[test]
    fn relations_small() {
        for (n, m, d) in [(2, 0, 2), (2, 1, 2), (2, 1, 3)] {
            let r = verify_daha(&TensorContext::new(n, m, d).unwrap(), false);
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.epsilon, Some(1));
        }
        let bad = verify_daha(&TensorContext::new(2, 1, 2).unwrap(), true);
        assert!(!bad.passed());
    }

    #[test]
    fn spectrum_of_x1() {
        let ctx = TensorContext::new(2, 1, 1).unwrap();
        let cp = x_op(&ctx, 1).unwrap().char_poly();
        let mut roots = integer_roots(&cp).unwrap();
        roots.sort();
        assert_eq!(roots, vec![-1, 1, 1, 1]);
    }

    #[test]
    fn roots_reject_irrational() {
        // X^2 - 2
        assert!(integer_roots(&[Rational::from(-2), Rational::zero(), Rational::one()]).is_none());
        assert_eq!(integer_roots(&[Rational::from(-6), Rational::from(1), Rational::one()]).unwrap(), vec![2, -3]);
    }
}
