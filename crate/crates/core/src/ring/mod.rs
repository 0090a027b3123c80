//! Exact arithmetic: rationals, Laurent polynomials in `t1..tn, q`, and
//! rational functions with binomial denominators.

mod laurent;
mod ratfunc;
mod rational;

pub use laurent::{quantum_integer, signed_quantum_integer, LaurentMono, LaurentPoly};
pub use ratfunc::{RatFunc, RingError, Value, Var};
pub use rational::{binomial, factorial, ParseRationalError, Rational};
