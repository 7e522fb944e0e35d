//! Multivariate power series truncated at a total degree.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Exp, Poly};
use super::rational::{q, Q};
use super::ratfun::RationalFunction;
use crate::error::{Error, Result};

/// Power series in `nvars` variables; every stored term has total degree ≤ `order`
/// and a nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Exp, Q>,
}

fn deg(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MultiSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        MultiSeries { nvars, order, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, q(1))
    }

    pub fn constant(nvars: usize, order: u32, c: Q) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn monomial(nvars: usize, order: u32, e: Exp, c: Q) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(e, c);
        s
    }

    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, order, e, q(1))
    }

    pub fn from_poly(p: &Poly, order: u32) -> Self {
        let mut s = Self::zero(p.nvars(), order);
        for (e, c) in p.terms() {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    /// Expand a rational function whose denominator has a nonzero constant term.
    pub fn from_ratfun(r: &RationalFunction, order: u32) -> Result<Self> {
        let n = Self::from_poly(r.num(), order);
        let d = Self::from_poly(r.den(), order);
        Ok(&n * &d.inverse()?)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn add_term(&mut self, e: Exp, c: Q) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() || deg(&e) > self.order {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Lowest total degree with a nonzero coefficient (`None` for zero).
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|e| deg(e)).min()
    }

    /// Drop terms above `order`.
    pub fn truncate(&self, order: u32) -> Self {
        MultiSeries {
            nvars: self.nvars,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| deg(e) <= order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// The polynomial made of the stored terms.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.clone())))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.order);
        }
        MultiSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiply by `x^e`, dropping what leaves the truncation.
    pub fn shift(&self, e: &[u32]) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (k, c) in &self.terms {
            out.add_term(k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone());
        }
        out
    }

    /// `x_i ∂/∂x_i`.
    pub fn theta(&self, i: usize) -> Self {
        MultiSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| (e.clone(), c * q(e[i] as i64)))
                .collect(),
        }
    }

    /// `Σ w_i θ_i`.
    pub fn theta_comb(&self, w: &[Q]) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e, c) in &self.terms {
            let f: Q = e.iter().zip(w).map(|(&k, wi)| wi * q(k as i64)).sum();
            out.add_term(e.clone(), c * f);
        }
        out
    }

    /// Homogeneous components indexed by total degree.
    fn graded(&self) -> Vec<Vec<(&Exp, &Q)>> {
        let mut g = vec![Vec::new(); self.order as usize + 1];
        for (e, c) in &self.terms {
            g[deg(e) as usize].push((e, c));
        }
        g
    }

    /// Truncated product to an explicit order (≤ both operand orders).
    pub fn mul_to(&self, o: &MultiSeries, order: u32) -> MultiSeries {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let order = order.min(self.order).min(o.order);
        let mut acc: BTreeMap<Exp, Q> = BTreeMap::new();
        let og = o.graded();
        for (e1, c1) in &self.terms {
            let d1 = deg(e1);
            if d1 > order {
                continue;
            }
            for layer in og.iter().take((order - d1) as usize + 1) {
                for (e2, c2) in layer {
                    let e: Exp = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                    let p = c1 * *c2;
                    match acc.get_mut(&e) {
                        Some(v) => *v += p,
                        None => {
                            acc.insert(e, p);
                        }
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MultiSeries { nvars: self.nvars, order, terms: acc }
    }

    pub fn pow(&self, k: u32) -> MultiSeries {
        let mut acc = Self::one(self.nvars, self.order);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<MultiSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = c0.recip();
        let f = self.graded();
        // g_d = -(1/c0) Σ_{j=1..d} f_j g_{d-j}
        let mut g: Vec<BTreeMap<Exp, Q>> = Vec::with_capacity(self.order as usize + 1);
        let mut g0 = BTreeMap::new();
        g0.insert(vec![0; self.nvars], inv0.clone());
        g.push(g0);
        for d in 1..=self.order as usize {
            let mut layer: BTreeMap<Exp, Q> = BTreeMap::new();
            for j in 1..=d {
                for (e1, c1) in &f[j] {
                    for (e2, c2) in &g[d - j] {
                        let e: Exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                        *layer.entry(e).or_insert_with(Q::zero) += *c1 * c2;
                    }
                }
            }
            let neg = -inv0.clone();
            layer.retain(|_, v| !v.is_zero());
            for v in layer.values_mut() {
                *v *= &neg;
            }
            g.push(layer);
        }
        let mut out = Self::zero(self.nvars, self.order);
        for layer in g {
            for (e, c) in layer {
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    /// `exp(self)`; needs a zero constant term.
    pub fn exp(&self) -> Result<MultiSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Incompatible("exp of a series with nonzero constant term".into()));
        }
        // With E = Σ θ_i (total-degree operator): E g = (E f) g, so d g_d = Σ_j j f_j g_{d-j}.
        let f = self.graded();
        let mut g: Vec<BTreeMap<Exp, Q>> = Vec::new();
        let mut g0 = BTreeMap::new();
        g0.insert(vec![0; self.nvars], q(1));
        g.push(g0);
        for d in 1..=self.order as usize {
            let mut layer: BTreeMap<Exp, Q> = BTreeMap::new();
            for j in 1..=d {
                for (e1, c1) in &f[j] {
                    let cj = *c1 * q(j as i64);
                    for (e2, c2) in &g[d - j] {
                        let e: Exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                        *layer.entry(e).or_insert_with(Q::zero) += &cj * c2;
                    }
                }
            }
            let s = q(d as i64).recip();
            layer.retain(|_, v| !v.is_zero());
            for v in layer.values_mut() {
                *v *= &s;
            }
            g.push(layer);
        }
        let mut out = Self::zero(self.nvars, self.order);
        for layer in g {
            for (e, c) in layer {
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    /// `log(self)`; needs constant term 1.
    pub fn log(&self) -> Result<MultiSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::Incompatible("log of a series with constant term ≠ 1".into()));
        }
        // E log f = (E f)/f, then divide degree-d part by d.
        let ef = self.theta_comb(&vec![q(1); self.nvars]);
        let r = &ef * &self.inverse()?;
        let mut out = Self::zero(self.nvars, self.order);
        for (e, c) in r.terms {
            let d = deg(&e);
            out.add_term(e, c / q(d as i64));
        }
        Ok(out)
    }

    /// Substitute `x_i = y_i · u_i(y)` where every `u_i` is a series in the same variables.
    pub fn compose_scaled(&self, units: &[MultiSeries]) -> MultiSeries {
        assert_eq!(units.len(), self.nvars);
        let order = units.iter().map(|u| u.order).min().unwrap_or(self.order).min(self.order);
        let maxd = self.terms.keys().map(|e| deg(e)).max().unwrap_or(0);
        let mut powers: Vec<Vec<MultiSeries>> = Vec::with_capacity(self.nvars);
        for u in units {
            let mut p = vec![Self::one(self.nvars, order)];
            for k in 1..=maxd.min(order) as usize {
                let next = p[k - 1].mul_to(u, order - k as u32);
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = Self::zero(self.nvars, order);
        for (e, c) in &self.terms {
            let d = deg(e);
            if d > order {
                continue;
            }
            let room = order - d;
            let mut t = Self::constant(self.nvars, room, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul_to(&powers[i][k as usize], room);
                }
            }
            for (f, v) in t.terms {
                out.add_term(f.iter().zip(e).map(|(a, b)| a + b).collect(), v);
            }
        }
        out
    }

    /// Coefficientwise check that `self` vanishes.
    pub fn first_nonzero_degree(&self) -> Option<u32> {
        self.valuation()
    }
}

impl Add for &MultiSeries {
    type Output = MultiSeries;
    fn add(self, o: &MultiSeries) -> MultiSeries {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let order = self.order.min(o.order);
        let mut out = self.truncate(order);
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiSeries {
    type Output = MultiSeries;
    fn sub(self, o: &MultiSeries) -> MultiSeries {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let order = self.order.min(o.order);
        let mut out = self.truncate(order);
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiSeries {
    type Output = MultiSeries;
    fn mul(self, o: &MultiSeries) -> MultiSeries {
        self.mul_to(o, self.order.min(o.order))
    }
}

impl Neg for &MultiSeries {
    type Output = MultiSeries;
    fn neg(self) -> MultiSeries {
        self.scale(&q(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::qr;

    fn z(order: u32) -> MultiSeries {
        MultiSeries::var(1, order, 0)
    }

    #[test]
    fn difference_of_squares() {
        let one = MultiSeries::one(1, 2);
        let a = &one + &z(2);
        let b = &one - &z(2);
        let p = &a * &b;
        assert_eq!(p, &one - &z(2).pow(2));
    }

    #[test]
    fn geometric_inverse() {
        let s = &MultiSeries::one(1, 6) + &z(6).scale(&q(4));
        let inv = s.inverse().unwrap();
        for k in 0..=6u32 {
            assert_eq!(inv.coeff(&[k]), q((-4i64).pow(k)));
        }
        assert!(MultiSeries::zero(1, 3).inverse().is_err());
    }

    #[test]
    fn exp_log_roundtrip() {
        let f = &z(8).scale(&qr(1, 3)) + &z(8).pow(2).scale(&q(5));
        let e = f.exp().unwrap();
        assert_eq!(e.coeff(&[1]), qr(1, 3));
        assert_eq!(e.log().unwrap(), f);
    }

    #[test]
    fn compose_matches_direct_substitution() {
        // f(x) = 1/(1-x); substitute x = y(1+y): 1/(1 - y - y^2) has Fibonacci coefficients.
        let f = (&MultiSeries::one(1, 8) - &z(8)).inverse().unwrap();
        let u = &MultiSeries::one(1, 8) + &z(8);
        let g = f.compose_scaled(&[u]);
        let fib = [1, 1, 2, 3, 5, 8, 13, 21, 34];
        for (k, v) in fib.iter().enumerate() {
            assert_eq!(g.coeff(&[k as u32]), q(*v));
        }
    }

    #[test]
    fn ratfun_expansion() {
        let r = RationalFunction::parse("1/(1+27*z)", 1).unwrap();
        let s = MultiSeries::from_ratfun(&r, 4).unwrap();
        assert_eq!(s.coeff(&[3]), q(-19683));
    }
}
