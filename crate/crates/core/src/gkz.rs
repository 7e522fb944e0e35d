//! A-hypergeometric systems: Euler and box operators, their reduction to Picard–Fuchs
//! operators in the torus-invariant coordinates, and the Frobenius solution basis.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::arith::linalg::solve;
use crate::arith::poly::z_names;
use crate::arith::reconstruct::monomials_up_to;
use crate::arith::{LogSeries, MultiSeries, Poly, RationalFunction, Q};
use crate::error::{Error, Result};
use crate::polytope::Point;
use crate::registry::ModelData;

/// `Σ c_e(z) θ^e` with the coefficients standing to the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaOperator {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, RationalFunction>,
}

fn binomial(n: u32, k: u32) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * Q::from_integer((n - i).into()) / Q::from_integer((i + 1).into());
    }
    r
}

impl ThetaOperator {
    pub fn zero(nvars: usize) -> Self {
        ThetaOperator { nvars, terms: BTreeMap::new() }
    }

    pub fn identity(nvars: usize) -> Self {
        Self::monomial(nvars, vec![0; nvars], RationalFunction::one(nvars))
    }

    pub fn monomial(nvars: usize, e: Vec<u32>, c: RationalFunction) -> Self {
        let mut out = Self::zero(nvars);
        out.add_term(e, c);
        out
    }

    /// `Σ w_i θ_i − s`.
    pub fn linear(w: &[Q], s: &Q) -> Self {
        let n = w.len();
        let mut out = Self::monomial(n, vec![0; n], RationalFunction::constant(n, -s.clone()));
        for (i, wi) in w.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            out.add_term(e, RationalFunction::constant(n, wi.clone()));
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, RationalFunction> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> RationalFunction {
        self.terms.get(e).cloned().unwrap_or_else(|| RationalFunction::zero(self.nvars))
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: RationalFunction) {
        let cur = self.coefficient(&e);
        let s = &cur + &c;
        if s.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, s);
        }
    }

    /// Total θ-degree.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &ThetaOperator) -> ThetaOperator {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &ThetaOperator) -> ThetaOperator {
        self.add(&o.left_mul(&RationalFunction::constant(self.nvars, -Q::one())))
    }

    /// `r(z) · self`.
    pub fn left_mul(&self, r: &RationalFunction) -> ThetaOperator {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * r);
        }
        out
    }

    /// Operator product `self ∘ o`, moving θ's past coefficients by the Leibniz rule.
    pub fn compose(&self, o: &ThetaOperator) -> ThetaOperator {
        let mut out = Self::zero(self.nvars);
        for (a, c1) in &self.terms {
            for (b, c2) in &o.terms {
                for part in monomials_below(a) {
                    let mut coef = Q::one();
                    let mut d = c2.clone();
                    for (i, (&ai, &pi)) in a.iter().zip(&part).enumerate() {
                        coef *= binomial(ai, pi);
                        for _ in 0..pi {
                            d = d.theta(i);
                        }
                    }
                    if d.is_zero() {
                        continue;
                    }
                    let e: Vec<u32> = a.iter().zip(&part).zip(b).map(|((ai, pi), bi)| ai - pi + bi).collect();
                    out.add_term(e, (c1 * &d).scale(&coef));
                }
            }
        }
        out
    }

    /// `(Σ w_i θ_i) ∘ self`.
    pub fn prolong(&self, w: &[Q]) -> ThetaOperator {
        ThetaOperator::linear(w, &Q::zero()).compose(self)
    }

    /// Apply to a log-series; coefficients must be regular at the origin.
    pub fn apply_series(&self, s: &LogSeries) -> Result<LogSeries> {
        let mut cache: BTreeMap<Vec<u32>, LogSeries> = BTreeMap::new();
        let mut out = LogSeries::zero(self.nvars, s.order());
        for (e, c) in &self.terms {
            let ds = theta_power(s, e, &mut cache);
            let cs = if c.is_polynomial() {
                MultiSeries::from_poly(c.num(), s.order())
            } else {
                MultiSeries::from_ratfun(c, s.order())?
            };
            out = out.add(&ds.mul_series(&cs));
        }
        Ok(out)
    }

    pub fn apply_ratfun(&self, f: &RationalFunction) -> RationalFunction {
        let mut out = RationalFunction::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut d = f.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    d = d.theta(i);
                }
            }
            out = &out + &(c * &d);
        }
        out
    }

    /// θ-monomial label such as `θ1^2*θ2` (or `θ^3` with one variable).
    pub fn monomial_label(e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                let base = if e.len() == 1 { "θ".to_string() } else { format!("θ{}", i + 1) };
                if k == 1 {
                    base
                } else {
                    format!("{base}^{k}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn to_json(&self) -> Value {
        let names = z_names(self.nvars);
        let mut m = Map::new();
        for (e, c) in &self.terms {
            m.insert(Self::monomial_label(e), Value::String(c.format_with(&names)));
        }
        Value::Object(m)
    }
}

impl fmt::Display for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = z_names(self.nvars);
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| format!("({})*{}", c.format_with(&names), Self::monomial_label(e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn monomials_below(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &ai in a {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=ai).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

fn theta_power(s: &LogSeries, e: &[u32], cache: &mut BTreeMap<Vec<u32>, LogSeries>) -> LogSeries {
    if let Some(x) = cache.get(e) {
        return x.clone();
    }
    let r = match e.iter().position(|&k| k > 0) {
        None => s.clone(),
        Some(i) => {
            let mut prev = e.to_vec();
            prev[i] -= 1;
            theta_power(s, &prev, cache).theta(i)
        }
    };
    cache.insert(e.to_vec(), r.clone());
    r
}

/// Euler operators as integer rows acting on `(θ_{a_0},…,θ_{a_{l-1}})`: first `Σ θ_{a_m}`, then
/// one row per lattice coordinate.
pub fn euler_operators(points: &[Point]) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![1; points.len()]];
    let dim = points.first().map_or(0, |p| p.len());
    for k in 0..dim {
        rows.push(points.iter().map(|p| p[k]).collect());
    }
    rows
}

/// Render an integer θ_a row such as `θa1-θa3-2*θa4`.
pub fn format_euler(row: &[i64]) -> String {
    let mut s = String::new();
    for (m, &c) in row.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = if c.abs() == 1 { String::new() } else { format!("{}*", c.abs()) };
        s.push_str(&format!("{sign}{mag}θa{m}"));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// `Π_{l_m>0} ∂_{a_m}^{l_m} − Π_{l_m<0} ∂_{a_m}^{−l_m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxOperator {
    pub plus: Vec<(usize, u32)>,
    pub minus: Vec<(usize, u32)>,
}

pub fn box_operator(l: &[i64]) -> BoxOperator {
    let pick = |sign: i64| {
        l.iter()
            .enumerate()
            .filter(|(_, &c)| c * sign > 0)
            .map(|(m, &c)| (m, c.unsigned_abs() as u32))
            .collect::<Vec<_>>()
    };
    BoxOperator { plus: pick(1), minus: pick(-1) }
}

impl BoxOperator {
    pub fn is_zero(&self) -> bool {
        self.plus == self.minus
    }
}

impl fmt::Display for BoxOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let side = |v: &[(usize, u32)]| -> String {
            if v.is_empty() {
                return "1".into();
            }
            v.iter()
                .map(|&(m, k)| if k == 1 { format!("∂{m}") } else { format!("∂{m}^{k}") })
                .collect::<Vec<_>>()
                .join("")
        };
        write!(f, "{} - {}", side(&self.plus), side(&self.minus))
    }
}

/// Coordinates of `l` in the relation basis (must be integral).
fn basis_coordinates(basis: &[Vec<i64>], l: &[i64]) -> Result<Vec<i64>> {
    let npts = l.len();
    let k = basis.len();
    let m: Vec<Vec<Q>> = (0..npts)
        .map(|p| (0..k).map(|i| Q::from_integer(basis[i][p].into())).collect())
        .collect();
    let b: Vec<Q> = l.iter().map(|&x| Q::from_integer(x.into())).collect();
    let x = solve(&m, &b, k).ok_or_else(|| {
        let p = l.iter().position(|&x| x != 0).unwrap_or(0);
        Error::DanglingTheta(p)
    })?;
    x.iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer().try_into().unwrap_or(0))
            } else {
                Err(Error::Incompatible("relation is not an integral combination of the basis".into()))
            }
        })
        .collect()
}

/// Picard–Fuchs operator of the relation `l` in the coordinates `z_i = a^{l^{(i)}}`.
pub fn reduce_to_pf(basis: &[Vec<i64>], l: &[i64]) -> Result<ThetaOperator> {
    let k = basis.len();
    let coords = basis_coordinates(basis, l)?;
    let descend = |m: usize| -> Vec<Q> { basis.iter().map(|r| Q::from_integer(r[m].into())).collect() };
    let factors = |sign: i64| -> ThetaOperator {
        let mut op = ThetaOperator::identity(k);
        for (m, &c) in l.iter().enumerate() {
            if c * sign <= 0 {
                continue;
            }
            let w = descend(m);
            for j in 0..c.unsigned_abs() {
                op = op.compose(&ThetaOperator::linear(&w, &Q::from_integer(j.into())));
            }
        }
        op
    };
    // z^l = Π z_i^{coords_i}.
    let mut num = vec![0u32; k];
    let mut den = vec![0u32; k];
    for (i, &c) in coords.iter().enumerate() {
        if c >= 0 {
            num[i] = c as u32;
        } else {
            den[i] = c.unsigned_abs() as u32;
        }
    }
    let zl = RationalFunction::new(
        Poly::monomial(k, num, Q::one()),
        Poly::monomial(k, den, Q::one()),
    );
    Ok(factors(1).sub(&factors(-1).left_mul(&zl)))
}

/// One Picard–Fuchs operator per basis relation.
pub fn pf_operators(basis: &[Vec<i64>]) -> Result<Vec<ThetaOperator>> {
    basis.iter().map(|l| reduce_to_pf(basis, l)).collect()
}

/// Truncated polynomial in `ρ` of degree two: value, gradient and Hessian.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dual2 {
    v: Q,
    g: Vec<Q>,
    h: Vec<Vec<Q>>,
}

impl Dual2 {
    fn constant(k: usize, v: Q) -> Self {
        Dual2 { v, g: vec![Q::zero(); k], h: vec![vec![Q::zero(); k]; k] }
    }

    /// `a·ρ + s`.
    fn linear(a: &[Q], s: Q) -> Self {
        let mut d = Self::constant(a.len(), s);
        d.g = a.to_vec();
        d
    }

    /// `1/(a·ρ + s)` for `s ≠ 0`.
    fn recip_linear(a: &[Q], s: &Q) -> Self {
        let k = a.len();
        let inv = s.recip();
        let inv2 = &inv * &inv;
        let inv3 = &inv2 * &inv;
        let mut d = Self::constant(k, inv);
        d.g = a.iter().map(|x| -(x * &inv2)).collect();
        for i in 0..k {
            for j in 0..k {
                d.h[i][j] = Q::from_integer(2.into()) * &a[i] * &a[j] * &inv3;
            }
        }
        d
    }

    fn mul(&self, o: &Dual2) -> Dual2 {
        let k = self.g.len();
        let v = &self.v * &o.v;
        let g = (0..k).map(|i| &self.v * &o.g[i] + &self.g[i] * &o.v).collect();
        let h = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        &self.v * &o.h[i][j]
                            + &self.h[i][j] * &o.v
                            + &self.g[i] * &o.g[j]
                            + &self.g[j] * &o.g[i]
                    })
                    .collect()
            })
            .collect();
        Dual2 { v, g, h }
    }
}

/// ρ-expansion of one Γ-series coefficient, or `None` when it vanishes to second order.
fn gamma_coefficient(basis: &[Vec<i64>], n: &[u32]) -> Option<Dual2> {
    let k = basis.len();
    let npts = basis[0].len();
    let mut acc = Dual2::constant(k, Q::one());
    let mut vanishing = 0;
    for m in 0..npts {
        let km: i64 = (0..k).map(|i| basis[i][m] * n[i] as i64).sum();
        if km < 0 && (0..k).any(|i| basis[i][m] != 0) {
            vanishing += 1;
        }
    }
    if vanishing >= 3 {
        return None;
    }
    for m in 0..npts {
        let w: Vec<Q> = (0..k).map(|i| Q::from_integer(basis[i][m].into())).collect();
        let km: i64 = (0..k).map(|i| basis[i][m] * n[i] as i64).sum();
        if km >= 0 {
            // Γ(1+x)/Γ(1+x+k) = Π_{j=1..k} 1/(x+j)
            for j in 1..=km {
                acc = acc.mul(&Dual2::recip_linear(&w, &Q::from_integer(j.into())));
            }
        } else {
            // Γ(1+x)/Γ(1+x−|k|) = Π_{j=0..|k|−1} (x−j)
            for j in 0..(-km) {
                acc = acc.mul(&Dual2::linear(&w, Q::from_integer((-j).into())));
            }
        }
    }
    Some(acc)
}

/// Power-series parts of the Γ-series: `ϖ(z;0)`, `∂_{ρ_i}` and `∂_{ρ_i}∂_{ρ_j}` coefficients
/// (the logarithms from `z^ρ` are added separately).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSeries {
    pub value: MultiSeries,
    pub gradient: Vec<MultiSeries>,
    pub hessian: Vec<Vec<MultiSeries>>,
}

pub fn gamma_series(basis: &[Vec<i64>], order: u32) -> GammaSeries {
    let k = basis.len();
    let mut value = MultiSeries::zero(k, order);
    let mut gradient = vec![MultiSeries::zero(k, order); k];
    let mut hessian = vec![vec![MultiSeries::zero(k, order); k]; k];
    for n in monomials_up_to(k, order) {
        let Some(c) = gamma_coefficient(basis, &n) else {
            continue;
        };
        value.add_term(n.clone(), c.v);
        for i in 0..k {
            gradient[i].add_term(n.clone(), c.g[i].clone());
            for j in 0..k {
                hessian[i][j].add_term(n.clone(), c.h[i][j].clone());
            }
        }
    }
    GammaSeries { value, gradient, hessian }
}

impl GammaSeries {
    fn nvars(&self) -> usize {
        self.gradient.len()
    }

    fn order(&self) -> u32 {
        self.value.order()
    }

    /// `∂_{ρ_i} ϖ|_{ρ=0}`.
    pub fn first_derivative(&self, i: usize) -> LogSeries {
        let (k, n) = (self.nvars(), self.order());
        LogSeries::from_series(self.gradient[i].clone())
            .add(&LogSeries::log_var(k, n, i).mul_series(&self.value))
    }

    /// `∂_{ρ_i}∂_{ρ_j} ϖ|_{ρ=0}`.
    pub fn second_derivative(&self, i: usize, j: usize) -> LogSeries {
        let (k, n) = (self.nvars(), self.order());
        let li = LogSeries::log_var(k, n, i);
        let lj = LogSeries::log_var(k, n, j);
        let lilj = li.mul(&lj).expect("double log stays within bound");
        LogSeries::from_series(self.hessian[i][j].clone())
            .add(&li.mul_series(&self.gradient[j]))
            .add(&lj.mul_series(&self.gradient[i]))
            .add(&lilj.mul_series(&self.value))
    }
}

/// The period basis: constant, mirror maps and the double-log solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusBasis {
    pub omega0: LogSeries,
    pub mirror_maps: Vec<LogSeries>,
    pub double_log: LogSeries,
    pub gamma: GammaSeries,
}

impl FrobeniusBasis {
    pub fn nvars(&self) -> usize {
        self.mirror_maps.len()
    }

    pub fn order(&self) -> u32 {
        self.omega0.order()
    }

    /// `t_i − log z_i`.
    pub fn mirror_power_part(&self, i: usize) -> MultiSeries {
        self.mirror_maps[i].power_part()
    }

    /// Every basis member in order `1, t_1..t_k, ∂_S F`.
    pub fn members(&self) -> Vec<&LogSeries> {
        let mut v = vec![&self.omega0];
        v.extend(self.mirror_maps.iter());
        v.push(&self.double_log);
        v
    }
}

/// Frobenius basis from a relation basis and a ρ-derivative combination for the double log.
pub fn frobenius_from_relations(
    basis: &[Vec<i64>],
    combination: &[(Q, usize, usize)],
    order: u32,
) -> Result<FrobeniusBasis> {
    if order == 0 {
        return Err(Error::Incompatible("truncation order must be at least 1".into()));
    }
    let k = basis.len();
    let gamma = gamma_series(basis, order);
    let mirror_maps = (0..k).map(|i| gamma.first_derivative(i)).collect();
    let mut double_log = LogSeries::zero(k, order);
    for (c, i, j) in combination {
        double_log = double_log.add(&gamma.second_derivative(*i, *j).scale(c));
    }
    Ok(FrobeniusBasis { omega0: LogSeries::from_series(gamma.value.clone()), mirror_maps, double_log, gamma })
}

pub fn frobenius_basis(model: &ModelData, order: u32) -> Result<FrobeniusBasis> {
    frobenius_from_relations(&model.relations, &model.sf_combination, order)
}

/// Residual of an operator applied to a candidate solution.
pub fn verify_annihilation(op: &ThetaOperator, s: &LogSeries) -> Result<LogSeries> {
    if op.nvars() != s.nvars() {
        return Err(Error::Incompatible("operator and series have different variable counts".into()));
    }
    op.apply_series(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr};
    use crate::registry::builtin;

    fn lin(w: &[i64], s: i64) -> ThetaOperator {
        ThetaOperator::linear(&w.iter().map(|&x| q(x)).collect::<Vec<_>>(), &q(s))
    }

    fn zpow(k: usize, i: usize) -> RationalFunction {
        RationalFunction::var(k, i)
    }

    #[test]
    fn projective_plane_operator() {
        let op = reduce_to_pf(&[vec![-3, 1, 1, 1]], &[-3, 1, 1, 1]).unwrap();
        let th = lin(&[1], 0);
        let expect = th.compose(&th).compose(&th).add(
            &th.compose(&lin(&[3], -1)).compose(&lin(&[3], -2)).left_mul(&zpow(1, 0).scale(&q(3))),
        );
        assert_eq!(op, expect);
        assert_eq!(op.order(), 3);
    }

    #[test]
    fn hirzebruch_operators() {
        let f0 = builtin("f0").unwrap();
        let ops = pf_operators(&f0.relations).unwrap();
        let th1 = lin(&[1, 0], 0);
        let s = lin(&[-2, -2], 0).compose(&lin(&[-2, -2], 1));
        assert_eq!(ops[0], th1.compose(&th1).sub(&s.left_mul(&zpow(2, 0))));
        let f2 = builtin("f2").unwrap();
        let ops = pf_operators(&f2.relations).unwrap();
        let th2 = lin(&[0, 1], 0);
        let s = lin(&[1, -2], 0).compose(&lin(&[1, -2], 1));
        assert_eq!(ops[1], th2.compose(&th2).sub(&s.left_mul(&zpow(2, 1))));
    }

    #[test]
    fn euler_rows() {
        let f2 = builtin("f2").unwrap();
        let rows = euler_operators(&f2.points);
        assert!(rows.iter().any(|r| format_euler(r) == "θa1-θa3-2*θa4"));
        let p2 = builtin("p2").unwrap();
        let rows: Vec<String> = euler_operators(&p2.points).iter().map(|r| format_euler(r)).collect();
        assert_eq!(rows, vec!["θa0+θa1+θa2+θa3", "θa1-θa3", "θa2-θa3"]);
    }

    #[test]
    fn box_operators() {
        assert_eq!(box_operator(&[-3, 1, 1, 1]).to_string(), "∂1∂2∂3 - ∂0^3");
        assert_eq!(box_operator(&[0, 0, 1, -2, 1]).to_string(), "∂2∂4 - ∂3^2");
        assert!(box_operator(&[0, 0, 0]).is_zero());
    }

    #[test]
    fn projective_plane_solutions() {
        let p2 = builtin("p2").unwrap();
        let fb = frobenius_basis(&p2, 6).unwrap();
        // t − log z = 3H, H = −2z + 15z² − 560/3 z³ + …
        let h = fb.mirror_power_part(0);
        assert_eq!(h.coeff(&[1]), q(-6));
        assert_eq!(h.coeff(&[2]), q(45));
        assert_eq!(h.coeff(&[3]), q(-560));
        let op = &pf_operators(&p2.relations).unwrap()[0];
        for s in fb.members() {
            assert!(verify_annihilation(op, s).unwrap().is_zero());
        }
        let z = LogSeries::from_series(MultiSeries::var(1, 6, 0));
        assert!(!verify_annihilation(op, &z).unwrap().is_zero());
    }

    #[test]
    fn every_model_basis_is_annihilated() {
        for name in ["f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let fb = frobenius_basis(&m, 7).unwrap();
            for op in pf_operators(&m.relations).unwrap() {
                for s in fb.members() {
                    assert!(verify_annihilation(&op, s).unwrap().is_zero(), "{name}");
                }
            }
        }
    }

    #[test]
    fn hirzebruch_two_auxiliary_series() {
        let f2 = builtin("f2").unwrap();
        let fb = frobenius_basis(&f2, 5).unwrap();
        // t2 = log z2 + 2G(z2), G = Σ (2n−1)!/(n!)² z2ⁿ
        let g = fb.mirror_power_part(1);
        assert_eq!(g.coeff(&[0, 1]), q(2));
        assert_eq!(g.coeff(&[0, 2]), q(3));
        assert_eq!(g.coeff(&[0, 3]), qr(2 * 120, 36));
        assert_eq!(g.coeff(&[1, 1]), q(0));
    }

    #[test]
    fn composition_moves_theta_past_coefficients() {
        // θ ∘ z = z θ + z
        let th = lin(&[1], 0);
        let z = ThetaOperator::identity(1).left_mul(&zpow(1, 0));
        let expect = th.left_mul(&zpow(1, 0)).add(&z);
        assert_eq!(th.compose(&z), expect);
    }
}
