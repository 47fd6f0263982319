//! Exact scalars, Bernoulli data and sparse multivariate polynomials.

mod bernoulli;
mod poly;
mod rational;

pub use bernoulli::{
    bernoulli_number, bernoulli_poly, bernoulli_poly_homogenized, global_cache, multinomial, BernoulliCache,
    DEFAULT_BERNOULLI_BOUND,
};
pub use poly::{horner, Exponents, MultiPoly, Ring, VarSet};
pub use rational::{binomial, factorial, lcm, ParseRationalError, Rational};
