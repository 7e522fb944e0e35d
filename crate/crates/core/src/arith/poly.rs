//! Sparse multivariate polynomials over ℚ with exact division and gcd.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{self, q, Q};

/// Exponent vector of a monomial.
pub type Exp = Vec<u32>;

/// Polynomial in `nvars` variables. Keys are ordered lexicographically by exponent vector,
/// which doubles as the monomial order used for division.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exp, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, q(1))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exp: Exp, c: Q) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, q(1))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exp, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn add_term(&mut self, e: Exp, c: Q) {
        if c.is_zero() {
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

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms (0 for the zero polynomial).
    pub fn low_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).min().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiply by the monomial `x^e`.
    pub fn shift(&self, e: &[u32]) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * q(e[i] as i64));
            }
        }
        out
    }

    /// `x_i ∂/∂x_i`.
    pub fn theta(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                out.add_term(e.clone(), c * q(e[i] as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                rational::to_f64(c)
                    * e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product::<f64>()
            })
            .sum()
    }

    /// Substitute polynomials for every variable.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (s, &k) in subs.iter().zip(e) {
                if k > 0 {
                    t = &t * &s.pow(k);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embed into a ring with a different variable count via an index map
    /// (`map[i]` is the target index of variable `i`).
    pub fn remap(&self, target: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut f = vec![0; target];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Leading term in lexicographic order.
    pub fn leading(&self) -> Option<(&Exp, &Q)> {
        self.terms.iter().next_back()
    }

    /// Lowest term in graded order (total degree, then lexicographic).
    pub fn lowest(&self) -> Option<(&Exp, &Q)> {
        self.terms
            .iter()
            .min_by(|a, b| graded_cmp(a.0, b.0))
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut r = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((re, rc)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exp = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let c = rc / &dc;
            r = &r - &d.shift(&e).scale(&c);
            quo.add_term(e, c);
        }
        Some(quo)
    }

    /// Scale to integer coefficients with gcd 1 and positive lex-leading coefficient.
    /// Returns `(content, primitive)` with `self = content * primitive`.
    pub fn integer_primitive(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (Q::zero(), self.clone());
        }
        let l = rational::denominator_lcm(self.terms.values());
        let g = self
            .terms
            .values()
            .map(|c| (c * Q::from_integer(l.clone())).to_integer())
            .fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, &x));
        let mut content = Q::new(g, l);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        (content.clone(), self.scale(&content.recip()))
    }

    /// Like [`Poly::integer_primitive`] but with the sign fixed by the lowest graded term.
    pub fn integer_primitive_low(&self) -> (Q, Poly) {
        let (mut c, mut p) = self.integer_primitive();
        if let Some((_, lc)) = p.lowest() {
            if lc.is_negative() {
                c = -c;
                p = -p;
            }
        }
        (c, p)
    }

    /// Highest-index variable that occurs.
    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&i| self.degree_in(i) > 0)
    }

    /// Coefficients with respect to variable `v` (index = power of `x_v`).
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[v] as usize;
            f[v] = 0;
            out[k].add_term(f, c.clone());
        }
        out
    }

    /// Content with respect to `v`: gcd of the coefficients in `x_v`.
    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for c in self.coefficients_in(v) {
            if !c.is_zero() {
                g = gcd(&g, &c);
                if g.is_constant() {
                    return Poly::one(self.nvars);
                }
            }
        }
        g
    }

    /// Pseudo-remainder of `self` by `b` in variable `v`.
    fn prem(&self, b: &Poly, v: usize) -> Poly {
        let n = b.degree_in(v);
        let lb = b.coefficients_in(v).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= n {
            let m = r.degree_in(v);
            let lr = r.coefficients_in(v).pop().unwrap();
            let mut e = vec![0; self.nvars];
            e[v] = m - n;
            r = &(&r * &lb) - &(&b.shift(&e) * &lr);
            // Keep coefficient growth in check.
            r = r.integer_primitive().1;
        }
        r
    }
}

/// Graded order: total degree first, then lexicographic.
pub fn graded_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Greatest common divisor, normalized to an integer-primitive polynomial with positive
/// lex-leading coefficient (so gcd(0, 0) = 0 and gcd with a nonzero constant is 1).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars;
    if a.is_zero() {
        return b.integer_primitive().1;
    }
    if b.is_zero() {
        return a.integer_primitive().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    // Strip common monomial factors cheaply first.
    let v = match (a.main_var(), b.main_var()) {
        (Some(x), Some(y)) => x.max(y),
        _ => return Poly::one(n),
    };
    if a.degree_in(v) == 0 {
        return gcd(a, &b.content_in(v));
    }
    if b.degree_in(v) == 0 {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let mut f = a.div_exact(&ca).unwrap().integer_primitive().1;
    let mut g = b.div_exact(&cb).unwrap().integer_primitive().1;
    if f.degree_in(v) < g.degree_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.prem(&g, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            g = Poly::one(n);
            break;
        }
        f = g;
        let cr = r.content_in(v);
        g = r.div_exact(&cr).unwrap().integer_primitive().1;
    }
    let gc = g.content_in(v);
    let g = g.div_exact(&gc).unwrap();
    (&c * &g).integer_primitive().1
}

/// Print with the given variable names, terms in ascending graded order: `1+27*z`.
pub fn format_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut keys: Vec<&Exp> = p.terms.keys().collect();
    keys.sort_by(|a, b| graded_cmp(a, b));
    let mut s = String::new();
    for (idx, e) in keys.into_iter().enumerate() {
        let c = &p.terms[e];
        let mono = format_monomial(e, names);
        let neg = c.is_negative();
        let a = c.abs();
        if idx > 0 {
            s.push(if neg { '-' } else { '+' });
        } else if neg {
            s.push('-');
        }
        if mono.is_empty() {
            s.push_str(&rational::to_string(&a));
        } else if a.is_one() {
            s.push_str(&mono);
        } else {
            let _ = write!(s, "{}*{}", rational::to_string(&a), mono);
        }
    }
    s
}

pub fn format_monomial(e: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

/// Default variable names: `z` for one variable, else `z1..zk`.
pub fn z_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["z".into()]
    } else {
        (1..=n).map(|i| format!("z{i}")).collect()
    }
}

/// Names `a0..a{n-1}` for coefficient-space polynomials.
pub fn a_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_poly(self, &z_names(self.nvars)))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::qr;

    fn x() -> Poly {
        Poly::var(2, 0)
    }
    fn y() -> Poly {
        Poly::var(2, 1)
    }
    fn c(v: i64) -> Poly {
        Poly::constant(2, q(v))
    }

    #[test]
    fn exact_division() {
        let a = &(&x() + &c(1)) * &(&y() - &c(2));
        let b = &x() + &c(1);
        assert_eq!(a.div_exact(&b).unwrap(), &y() - &c(2));
        assert!(a.div_exact(&(&x() - &c(3))).is_none());
    }

    #[test]
    fn gcd_of_products() {
        let f = &(&x() + &y()) * &(&x() - &c(1));
        let g = &(&x() + &y()) * &(&y().pow(2) + &c(1));
        assert_eq!(gcd(&f, &g), &x() + &y());
        assert!(gcd(&x(), &y()).is_one());
        let h = (&x() * &y()).scale(&qr(3, 4));
        assert_eq!(gcd(&h, &(&x() * &c(6))), x());
    }

    #[test]
    fn gcd_discriminant_like() {
        // d = (1-4x)^2 - 64 x^2 y, shared with another factor
        let d = &(&c(1) - &x().scale(&q(4))).pow(2) - &(&x().pow(2) * &y()).scale(&q(64));
        let f = &d * &(&c(1) - &y().scale(&q(4)));
        let g = &d.pow(2) * &x();
        assert_eq!(gcd(&f, &g), d.integer_primitive().1);
    }

    #[test]
    fn formatting() {
        let names = z_names(1);
        let p = Poly::from_terms(1, [(vec![0], q(1)), (vec![1], q(27))]);
        assert_eq!(format_poly(&p, &names), "1+27*z");
        let p = Poly::from_terms(2, [(vec![2, 1], q(-64)), (vec![0, 0], q(1))]);
        assert_eq!(format_poly(&p, &z_names(2)), "1-64*z1^2*z2");
    }

    #[test]
    fn theta_and_partial() {
        let p = &x().pow(3) * &y();
        assert_eq!(p.theta(0), p.scale(&q(3)));
        assert_eq!(p.partial(0), (&x().pow(2) * &y()).scale(&q(3)));
    }
}
