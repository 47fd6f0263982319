//! Differential polynomials in jet variables, local functionals, Miura maps and time series.

mod eta;
mod functional;
mod jet;
mod miura;
mod series;

pub use eta::MetricEta;
pub use functional::{monomials, poisson_bracket, LocalFunctional};
pub use jet::{evolve, DiffPoly, Jet, JetMonomial};
pub use miura::{MiuraKind, MiuraMap};
pub use series::{level, match_diffpoly, substitute_solution, FormalSeries, MatchOptions, Time};
