//! Recovering rational functions from series expansions or from point samples.

use num_traits::Zero;

use super::linalg::{nullspace, Matrix};
use super::poly::{Exp, Poly};
use super::rational::Q;
use super::ratfun::RationalFunction;
use super::series::MultiSeries;
use crate::error::{Error, Result};

/// Number of top series degrees that must vanish in `s·denom` for a fit to be accepted.
pub const SAFETY_MARGIN: u32 = 4;

/// Find `p` with `s = p/denom` to truncation order. The numerator is read off from
/// `s·denom` up to degree `N − 4`; the remaining degrees must vanish identically.
pub fn rational_reconstruct(s: &MultiSeries, denom: &Poly) -> Result<RationalFunction> {
    let n = s.order();
    if n < SAFETY_MARGIN {
        return Err(Error::Incompatible(format!(
            "series order {n} below the safety margin {SAFETY_MARGIN}"
        )));
    }
    if denom.constant_term().is_zero() {
        return Err(Error::Incompatible("denominator must have a nonzero constant term".into()));
    }
    let prod = s * &MultiSeries::from_poly(denom, n);
    let cut = n - SAFETY_MARGIN;
    let mut num = Poly::zero(s.nvars());
    let mut bad: Option<u32> = None;
    for (e, c) in prod.terms() {
        let d: u32 = e.iter().sum();
        if d <= cut {
            num.add_term(e.clone(), c.clone());
        } else {
            bad = Some(bad.map_or(d, |b: u32| b.min(d)));
        }
    }
    if let Some(d) = bad {
        return Err(Error::NoFit(d));
    }
    Ok(RationalFunction::new(num, denom.clone()))
}

/// All exponent vectors in `nvars` variables with total degree ≤ `d`, in graded order.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Exp> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exp>) {
        if cur.len() == nvars {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(nvars, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, d, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| super::poly::graded_cmp(a, b));
    out
}

fn mono_eval(e: &[u32], x: &[Q]) -> Q {
    let mut t = Q::from_integer(1.into());
    for (xi, &k) in x.iter().zip(e) {
        for _ in 0..k {
            t *= xi;
        }
    }
    t
}

/// Black-box rational interpolation. `sample(i)` yields the i-th point and value
/// (or `None` to skip a bad point). Tries total degrees `0..=max_degree` for numerator
/// and denominator, accepting the first that fits and also matches `checks` fresh samples.
pub fn interpolate_rational<F>(
    nvars: usize,
    max_degree: u32,
    checks: usize,
    mut sample: F,
) -> Result<RationalFunction>
where
    F: FnMut(usize) -> Option<(Vec<Q>, Q)>,
{
    let mut pts: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut idx = 0usize;
    let mut next = |pts: &mut Vec<(Vec<Q>, Q)>| -> Result<()> {
        for _ in 0..1000 {
            let s = sample(idx);
            idx += 1;
            if let Some(s) = s {
                pts.push(s);
                return Ok(());
            }
        }
        Err(Error::RankDeficient("sampler produced no usable points".into()))
    };
    for d in 0..=max_degree {
        let monos = monomials_up_to(nvars, d);
        let m = monos.len();
        let unknowns = 2 * m;
        while pts.len() < unknowns + 2 {
            next(&mut pts)?;
        }
        let rows: Matrix = pts
            .iter()
            .map(|(x, v)| {
                let mut row = Vec::with_capacity(unknowns);
                for e in &monos {
                    row.push(mono_eval(e, x));
                }
                for e in &monos {
                    row.push(-(v * mono_eval(e, x)));
                }
                row
            })
            .collect();
        let ns = nullspace(&rows, unknowns);
        if ns.is_empty() {
            continue;
        }
        let v = &ns[0];
        let num = Poly::from_terms(nvars, monos.iter().cloned().zip(v[..m].iter().cloned()));
        let den = Poly::from_terms(nvars, monos.iter().cloned().zip(v[m..].iter().cloned()));
        if den.is_zero() {
            continue;
        }
        let r = RationalFunction::new(num, den);
        let mut ok = true;
        for _ in 0..checks {
            next(&mut pts)?;
            let (x, val) = pts.last().unwrap();
            if r.eval(x).as_ref() != Some(val) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
    }
    Err(Error::InterpolationDegreeExceeded(max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{q, qr};

    #[test]
    fn exact_inverse() {
        let d = Poly::from_terms(1, [(vec![0], q(1)), (vec![1], q(27))]);
        let r = RationalFunction::new(Poly::one(1), d.clone());
        let s = MultiSeries::from_ratfun(&r, 10).unwrap();
        let back = rational_reconstruct(&s, &d).unwrap();
        assert_eq!(back.num(), &Poly::one(1));
    }

    #[test]
    fn geometric_series() {
        let mut s = MultiSeries::zero(1, 8);
        for k in 0..=8u32 {
            s.add_term(vec![k], q((-4i64).pow(k)));
        }
        let d = Poly::from_terms(1, [(vec![0], q(1)), (vec![1], q(4))]);
        assert_eq!(rational_reconstruct(&s, &d).unwrap(), RationalFunction::new(Poly::one(1), d));
    }

    #[test]
    fn wrong_denominator_is_rejected() {
        let r = RationalFunction::parse("1/(1-2*z)", 1).unwrap();
        let s = MultiSeries::from_ratfun(&r, 10).unwrap();
        let d = Poly::from_terms(1, [(vec![0], q(1)), (vec![1], q(3))]);
        assert!(matches!(rational_reconstruct(&s, &d), Err(Error::NoFit(_))));
    }

    #[test]
    fn interpolate_two_vars() {
        let target = RationalFunction::parse("(1-4*z1)/(1-8*z1+16*z1^2-64*z1^2*z2)", 2).unwrap();
        let r = interpolate_rational(2, 4, 3, |i| {
            // Points must not lie on a low-degree curve, so scramble the coordinates.
            let i = i as i64;
            let x = vec![qr((i * 37 + 5) % 23 - 11, 7 + i % 5), qr((i * i * 13 + 3) % 29 - 14, 3 + i % 7)];
            target.eval(&x).map(|v| (x, v))
        })
        .unwrap();
        assert_eq!(r, target);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        assert_eq!(monomials_up_to(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
    }
}
