//! Rational functions over ℚ in a fixed number of variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{format_poly, gcd, z_names, Poly};
use super::rational::{self, q, Q};
use crate::error::{Error, Result};

/// `num/den`, reduced by the polynomial gcd. The denominator is normalized so that its
/// lowest term in graded order has coefficient 1 (e.g. `1+27z`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.nvars(), den.nvars());
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Self::normalized(num, den)
    }

    /// Build without a gcd pass; the caller guarantees coprimality.
    pub fn new_coprime(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        Self::normalized(num, den)
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.lowest().unwrap().1.clone();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let s = lc.recip();
            RationalFunction { num: num.scale(&s), den: den.scale(&s) }
        }
    }

    pub fn zero(nvars: usize) -> Self {
        RationalFunction { num: Poly::zero(nvars), den: Poly::one(nvars) }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, q(1))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        RationalFunction { num: Poly::constant(nvars, c), den: Poly::one(nvars) }
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RationalFunction { num: p, den: Poly::one(n) }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(Poly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Constant value if the function is constant.
    pub fn as_constant(&self) -> Option<Q> {
        (self.num.is_constant() && self.den.is_constant())
            .then(|| self.num.constant_term() / self.den.constant_term())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new_coprime(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i32) -> Self {
        let base = if k < 0 { self.recip() } else { self.clone() };
        RationalFunction::new_coprime(base.num.pow(k.unsigned_abs()), base.den.pow(k.unsigned_abs()))
    }

    /// `x_i ∂/∂x_i`.
    pub fn theta(&self, i: usize) -> Self {
        let n = &(&self.num.theta(i) * &self.den) - &(&self.num * &self.den.theta(i));
        RationalFunction::new(n, &self.den * &self.den)
    }

    /// Apply the linear combination `Σ w_i θ_i`.
    pub fn theta_comb(&self, w: &[Q]) -> Self {
        let mut tn = Poly::zero(self.nvars());
        let mut td = Poly::zero(self.nvars());
        for (i, wi) in w.iter().enumerate() {
            if !wi.is_zero() {
                tn = &tn + &self.num.theta(i).scale(wi);
                td = &td + &self.den.theta(i).scale(wi);
            }
        }
        let n = &(&tn * &self.den) - &(&self.num * &td);
        RationalFunction::new(n, &self.den * &self.den)
    }

    pub fn partial(&self, i: usize) -> Self {
        let n = &(&self.num.partial(i) * &self.den) - &(&self.num * &self.den.partial(i));
        RationalFunction::new(n, &self.den * &self.den)
    }

    pub fn eval(&self, x: &[Q]) -> Option<Q> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Substitute rational functions for the variables.
    pub fn compose(&self, subs: &[RationalFunction]) -> Self {
        let target = subs[0].nvars();
        let eval_poly = |p: &Poly| {
            let mut acc = RationalFunction::zero(target);
            for (e, c) in p.terms() {
                let mut t = RationalFunction::constant(target, c.clone());
                for (s, &k) in subs.iter().zip(e) {
                    if k > 0 {
                        t = &t * &s.pow(k as i32);
                    }
                }
                acc = &acc + &t;
            }
            acc
        };
        &eval_poly(&self.num) / &eval_poly(&self.den)
    }

    /// Ratio `self / other` if it is a constant.
    pub fn constant_ratio(&self, other: &RationalFunction) -> Option<Q> {
        if other.is_zero() {
            return None;
        }
        (self / other).as_constant()
    }

    /// Canonical text form, e.g. `-1/(3*(1+27*z))`.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.num.is_zero() {
            return "0".into();
        }
        let (cn, pn) = self.num.integer_primitive_low();
        let (cd, pd) = self.den.integer_primitive_low();
        let c = cn / cd;
        let p = Q::from_integer(c.numer().clone());
        let qd = Q::from_integer(c.denom().clone());
        let paren = |poly: &Poly| {
            let s = format_poly(poly, names);
            if poly.len() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        let num = if pn.is_one() {
            rational::to_string(&p)
        } else if p.is_one() {
            if pd.is_one() && qd.is_one() {
                format_poly(&pn, names)
            } else {
                paren(&pn)
            }
        } else if (-p.clone()).is_one() {
            format!("-{}", paren(&pn))
        } else {
            format!("{}*{}", rational::to_string(&p), paren(&pn))
        };
        if pd.is_one() && qd.is_one() {
            num
        } else if pd.is_one() {
            format!("{num}/{}", rational::to_string(&qd))
        } else if qd.is_one() {
            let s = format_poly(&pd, names);
            if pd.len() > 1 || s.contains('*') {
                format!("{num}/({s})")
            } else {
                format!("{num}/{s}")
            }
        } else {
            format!("{num}/({}*{})", rational::to_string(&qd), paren(&pd))
        }
    }

    /// Parse using the given variable names.
    pub fn parse_with(s: &str, names: &[String]) -> Result<Self> {
        Parser::new(s, names).parse()
    }

    /// Parse with default names (`z` or `z1..zk`).
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        Self::parse_with(s, &z_names(nvars))
    }
}

impl std::fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format_with(&z_names(self.nvars())))
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RationalFunction::new(&self.num + &o.num, self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = o.den.div_exact(&g).unwrap();
        let n = &(&self.num * &b) + &(&o.num * &a);
        RationalFunction::new(n, &(&a * &b) * &g)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero(self.nvars());
        }
        // Cross-cancel before multiplying to keep sizes small.
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        RationalFunction::new_coprime(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, o: &RationalFunction) -> RationalFunction {
        self * &o.recip()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

/// Recursive-descent parser for `+ - * / ^ ( )`, integers and named variables.
struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, names: &'a [String]) -> Self {
        Parser { chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, names, src }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in '{}'", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<RationalFunction> {
        let r = self.expr()?;
        if self.pos != self.chars.len() {
            return Err(self.err("trailing input"));
        }
        Ok(r)
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = &acc / &d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = self.integer()?;
            let k: i32 = k.parse().map_err(|_| self.err("bad exponent"))?;
            if neg && base.is_zero() {
                return Err(self.err("negative power of zero"));
            }
            return Ok(base.pow(if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        let n = self.names.len();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let s = self.integer()?;
                Ok(RationalFunction::constant(n, rational::parse(&s)?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let id: String = self.chars[start..self.pos].iter().collect();
                match self.names.iter().position(|x| *x == id) {
                    Some(i) => Ok(RationalFunction::var(n, i)),
                    None => Err(self.err(&format!("unknown variable '{id}'"))),
                }
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::qr;

    #[test]
    fn canonical_p2_form() {
        let r = RationalFunction::parse("-1/(3*(1+27*z))", 1).unwrap();
        assert_eq!(r.to_string(), "-1/(3*(1+27*z))");
        let r2 = RationalFunction::parse("-(1/3)/(1+27*z)", 1).unwrap();
        assert_eq!(r, r2);
        let r3 = RationalFunction::parse("-2/(6+162*z)", 1).unwrap();
        assert_eq!(r, r3);
    }

    #[test]
    fn display_roundtrip_two_vars() {
        for s in [
            "(1-4*z1-4*z2)/(1-8*z1-8*z2+16*z1^2-32*z1*z2+16*z2^2)",
            "-2*z2*(1-8*z1)/((1-4*z2)*(1-8*z1+16*z1^2-64*z1^2*z2))",
            "3/40*z1",
            "7",
            "z1/z2",
        ] {
            let r = RationalFunction::parse(s, 2).unwrap();
            let back = RationalFunction::parse(&r.to_string(), 2).unwrap();
            assert_eq!(r, back, "{s} -> {r}");
        }
    }

    #[test]
    fn arithmetic_reduces() {
        let a = RationalFunction::parse("1/(1-z)", 1).unwrap();
        let b = RationalFunction::parse("z/(1-z)", 1).unwrap();
        assert_eq!(&a - &b, RationalFunction::one(1));
        let c = RationalFunction::parse("(1-z^2)/(1+z)", 1).unwrap();
        assert_eq!(c.to_string(), "1-z");
    }

    #[test]
    fn theta_of_inverse() {
        let a = RationalFunction::parse("1/(1+27*z)", 1).unwrap();
        assert_eq!(a.theta(0), RationalFunction::parse("-27*z/(1+27*z)^2", 1).unwrap());
    }

    #[test]
    fn evaluation_and_constants() {
        let a = RationalFunction::parse("(z1+1)/(z2-2)", 2).unwrap();
        assert_eq!(a.eval(&[q(1), q(3)]), Some(q(2)));
        assert_eq!(a.eval(&[q(1), q(2)]), None);
        let b = a.scale(&qr(5, 7));
        assert_eq!(b.constant_ratio(&a), Some(qr(5, 7)));
    }

    #[test]
    fn parse_errors() {
        assert!(RationalFunction::parse("1/(z", 1).is_err());
        assert!(RationalFunction::parse("w+1", 1).is_err());
        assert!(RationalFunction::parse("1/0", 1).is_err());
    }
}
