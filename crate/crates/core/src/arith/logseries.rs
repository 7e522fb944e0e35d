//! Truncated series with polynomial dependence on `log z_i` (total log-degree ≤ 2).

use std::collections::BTreeMap;

use num_traits::Zero;

use super::rational::{q, Q};
use super::series::MultiSeries;
use crate::error::{Error, Result};

/// Maximum total power of logarithms carried by any component.
pub const MAX_LOG_DEGREE: u32 = 2;

/// `Σ_k (Π_i log(z_i)^{k_i}) · f_k(z)`, keyed by the log multi-degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    nvars: usize,
    order: u32,
    comps: BTreeMap<Vec<u32>, MultiSeries>,
}

impl LogSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        LogSeries { nvars, order, comps: BTreeMap::new() }
    }

    pub fn from_series(s: MultiSeries) -> Self {
        let mut out = Self::zero(s.nvars(), s.order());
        out.set_component(vec![0; s.nvars()], s);
        out
    }

    pub fn constant(nvars: usize, order: u32, c: Q) -> Self {
        Self::from_series(MultiSeries::constant(nvars, order, c))
    }

    /// `log z_i`.
    pub fn log_var(nvars: usize, order: u32, i: usize) -> Self {
        let mut k = vec![0; nvars];
        k[i] = 1;
        let mut out = Self::zero(nvars, order);
        out.set_component(k, MultiSeries::one(nvars, order));
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &BTreeMap<Vec<u32>, MultiSeries> {
        &self.comps
    }

    /// Component multiplying `Π log(z_i)^{k_i}` (zero if absent).
    pub fn component(&self, k: &[u32]) -> MultiSeries {
        self.comps
            .get(k)
            .cloned()
            .unwrap_or_else(|| MultiSeries::zero(self.nvars, self.order))
    }

    /// The log-free part.
    pub fn power_part(&self) -> MultiSeries {
        self.component(&vec![0; self.nvars])
    }

    pub fn set_component(&mut self, k: Vec<u32>, s: MultiSeries) {
        assert!(k.iter().sum::<u32>() <= MAX_LOG_DEGREE, "log-degree bound");
        let s = s.truncate(self.order.min(s.order()));
        if s.is_zero() {
            self.comps.remove(&k);
        } else {
            self.comps.insert(k, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// True when no logarithm survives.
    pub fn is_log_free(&self) -> bool {
        self.comps.keys().all(|k| k.iter().all(|&x| x == 0))
    }

    pub fn max_log_degree(&self) -> u32 {
        self.comps.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &LogSeries) -> LogSeries {
        self.combine(o, &q(1))
    }

    pub fn sub(&self, o: &LogSeries) -> LogSeries {
        self.combine(o, &q(-1))
    }

    fn combine(&self, o: &LogSeries, sign: &Q) -> LogSeries {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let order = self.order.min(o.order);
        let mut out = LogSeries::zero(self.nvars, order);
        for (k, s) in &self.comps {
            out.set_component(k.clone(), s.truncate(order));
        }
        for (k, s) in &o.comps {
            let cur = out.component(k);
            out.set_component(k.clone(), &cur + &s.scale(sign));
        }
        out
    }

    pub fn scale(&self, c: &Q) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, self.order);
        if c.is_zero() {
            return out;
        }
        for (k, s) in &self.comps {
            out.set_component(k.clone(), s.scale(c));
        }
        out
    }

    /// Multiply every component by a plain series.
    pub fn mul_series(&self, s: &MultiSeries) -> LogSeries {
        let order = self.order.min(s.order());
        let mut out = LogSeries::zero(self.nvars, order);
        for (k, c) in &self.comps {
            out.set_component(k.clone(), c * s);
        }
        out
    }

    /// Product; fails when a log-degree above 2 would be produced with nonzero coefficient.
    pub fn mul(&self, o: &LogSeries) -> Result<LogSeries> {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let order = self.order.min(o.order);
        let mut out = LogSeries::zero(self.nvars, order);
        for (k1, s1) in &self.comps {
            for (k2, s2) in &o.comps {
                let k: Vec<u32> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                let total: u32 = k.iter().sum();
                let p = s1 * s2;
                if p.is_zero() {
                    continue;
                }
                if total > MAX_LOG_DEGREE {
                    return Err(Error::LogDegreeOverflow(total));
                }
                let cur = out.component(&k);
                out.set_component(k, &cur + &p);
            }
        }
        Ok(out)
    }

    /// `θ_i = z_i ∂/∂z_i`, with θ(f logᵏ z_i) = θf logᵏ z_i + k f logᵏ⁻¹ z_i.
    pub fn theta(&self, i: usize) -> LogSeries {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = LogSeries::zero(self.nvars, self.order);
        for (k, s) in &self.comps {
            let cur = out.component(k);
            out.set_component(k.clone(), &cur + &s.theta(i));
            if k[i] > 0 {
                let mut k2 = k.clone();
                k2[i] -= 1;
                let cur = out.component(&k2);
                out.set_component(k2, &cur + &s.scale(&q(k[i] as i64)));
            }
        }
        out
    }

    /// `Σ w_i θ_i`.
    pub fn theta_comb(&self, w: &[Q]) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, self.order);
        for (i, wi) in w.iter().enumerate() {
            if !wi.is_zero() {
                out = out.add(&self.theta(i).scale(wi));
            }
        }
        out
    }

    pub fn truncate(&self, order: u32) -> LogSeries {
        let mut out = LogSeries::zero(self.nvars, order.min(self.order));
        for (k, s) in &self.comps {
            out.set_component(k.clone(), s.truncate(order));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_examples() {
        let l = LogSeries::log_var(1, 4, 0);
        assert_eq!(l.theta(0), LogSeries::constant(1, 4, q(1)));
        let zn = LogSeries::from_series(MultiSeries::monomial(1, 4, vec![3], q(1)));
        assert_eq!(zn.theta(0), zn.scale(&q(3)));
        // θ(z log z) = z log z + z
        let z = MultiSeries::var(1, 4, 0);
        let zl = l.mul_series(&z);
        let expect = zl.add(&LogSeries::from_series(z));
        assert_eq!(zl.theta(0), expect);
    }

    #[test]
    fn log_squared_and_overflow() {
        let l = LogSeries::log_var(1, 3, 0);
        let l2 = l.mul(&l).unwrap();
        assert_eq!(l2.component(&[2]), MultiSeries::one(1, 3));
        assert_eq!(l2.mul(&l), Err(Error::LogDegreeOverflow(3)));
    }

    #[test]
    fn identity_product() {
        let t = LogSeries::log_var(1, 5, 0)
            .add(&LogSeries::from_series(MultiSeries::var(1, 5, 0).scale(&q(-6))));
        let one = LogSeries::constant(1, 5, q(1));
        assert_eq!(t.mul(&one).unwrap(), t);
    }
}
