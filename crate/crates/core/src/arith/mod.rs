//! Exact arithmetic kernel: rationals, polynomials, rational functions, truncated
//! (log-)series, dense linear algebra and rational reconstruction.

pub mod linalg;
pub mod logseries;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod reconstruct;
pub mod series;

pub use logseries::LogSeries;
pub use poly::Poly;
pub use ratfun::RationalFunction;
pub use rational::{q, qr, Q};
pub use reconstruct::rational_reconstruct;
pub use series::MultiSeries;

/// Multiply two log-series (alias kept for the operation's public name).
pub fn series_mul(a: &LogSeries, b: &LogSeries) -> crate::Result<LogSeries> {
    a.mul(b)
}

/// Apply `θ_i` to a log-series.
pub fn theta_apply(i: usize, s: &LogSeries) -> LogSeries {
    s.theta(i)
}
