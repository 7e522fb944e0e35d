//! Holomorphic anomaly recursion in the holomorphic limit. Amplitudes are polynomials in the
//! single generator `A = θ₀G/G` with coefficients in ℚ(z), closed under θ₀ because
//! `θ₀A = κ − A² + (θ₀Y/Y)·A`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::arith::linalg::{rank, solve};
use crate::arith::rational;
use crate::arith::{MultiSeries, Poly, RationalFunction, Q};
use crate::error::{Error, Result};
use crate::gkz::FrobeniusBasis;
use crate::registry::ModelData;
use crate::yukawa::{holomorphic_metric, multicover_inverse, MirrorMap};

/// Scalars of special geometry restricted to the θ₀ direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialGeometry {
    pub a: MultiSeries,
    pub kappa: RationalFunction,
    pub y00: RationalFunction,
    pub glimit: MultiSeries,
    /// θ₀ as weights on `θ_1..θ_k`.
    pub theta0: Vec<Q>,
}

impl SpecialGeometry {
    pub fn nvars(&self) -> usize {
        self.theta0.len()
    }

    pub fn order(&self) -> u32 {
        self.a.order()
    }

    /// `θ₀Y₀₀/Y₀₀`.
    pub fn log_derivative_y(&self) -> RationalFunction {
        &self.y00.theta_comb(&self.theta0) / &self.y00
    }

    /// `θ₀A + A² − (θ₀Y/Y)A − κ` as a series; zero when the data are consistent.
    pub fn residual(&self) -> Result<MultiSeries> {
        let n = self.order();
        let rho = MultiSeries::from_ratfun(&self.log_derivative_y(), n)?;
        let kappa = MultiSeries::from_ratfun(&self.kappa, n)?;
        let a = &self.a;
        Ok(&(&(&a.theta_comb(&self.theta0) + &(a * a)) - &(&rho * a)) - &kappa)
    }
}

pub fn special_geometry(model: &ModelData, basis: &FrobeniusBasis) -> Result<SpecialGeometry> {
    let glimit = holomorphic_metric(model, basis)?;
    let theta0 = model.theta0();
    let a = &glimit.theta_comb(&theta0) * &glimit.inverse()?;
    Ok(SpecialGeometry {
        a,
        kappa: model.kappa.clone(),
        y00: model.yukawa_table()[&(0, 0)].clone(),
        glimit,
        theta0,
    })
}

/// `C̃ⁿ_g` as `Σ coeffs[i]·A^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplitudePoly {
    pub g: u32,
    pub n: u32,
    pub coeffs: Vec<RationalFunction>,
}

impl AmplitudePoly {
    pub fn new(g: u32, n: u32, coeffs: Vec<RationalFunction>) -> Self {
        let mut p = AmplitudePoly { g, n, coeffs };
        p.trim();
        p
    }

    pub fn zero(g: u32, n: u32) -> Self {
        AmplitudePoly { g, n, coeffs: Vec::new() }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `A`; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `3g − 3 + n`.
    pub fn degree_bound(&self) -> i64 {
        3 * self.g as i64 - 3 + self.n as i64
    }

    pub fn within_bound(&self) -> bool {
        self.degree().map_or(true, |d| d as i64 <= self.degree_bound())
    }

    pub fn coeff(&self, i: usize, nvars: usize) -> RationalFunction {
        self.coeffs.get(i).cloned().unwrap_or_else(|| RationalFunction::zero(nvars))
    }

    fn combine(&self, other: &Self, f: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction, nvars: usize) -> Vec<RationalFunction> {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).map(|i| f(&self.coeff(i, nvars), &other.coeff(i, nvars))).collect()
    }

    pub fn add(&self, other: &Self, nvars: usize) -> Self {
        AmplitudePoly::new(self.g, self.n, self.combine(other, |a, b| a + b, nvars))
    }

    pub fn sub(&self, other: &Self, nvars: usize) -> Self {
        AmplitudePoly::new(self.g, self.n, self.combine(other, |a, b| a - b, nvars))
    }

    /// Product; genus and insertion labels are left to the caller.
    pub fn mul(&self, other: &Self, nvars: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return AmplitudePoly::zero(self.g, self.n);
        }
        let mut out = vec![RationalFunction::zero(nvars); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        AmplitudePoly::new(self.g, self.n, out)
    }

    pub fn mul_scalar(&self, c: &RationalFunction) -> Self {
        AmplitudePoly::new(self.g, self.n, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn relabel(mut self, g: u32, n: u32) -> Self {
        self.g = g;
        self.n = n;
        self
    }

    pub fn derivative_a(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Q::from_integer((i as i64).into()))).collect();
        AmplitudePoly::new(self.g, self.n, coeffs)
    }

    /// Antiderivative in `A` with the given constant term.
    pub fn integrate_a(&self, constant: RationalFunction) -> Self {
        let mut coeffs = vec![constant];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&Q::new(1.into(), ((i + 1) as i64).into())));
        }
        AmplitudePoly::new(self.g, self.n, coeffs)
    }

    /// Substitute `A = value`.
    pub fn eval_at(&self, value: &RationalFunction, nvars: usize) -> RationalFunction {
        self.coeffs.iter().rev().fold(RationalFunction::zero(nvars), |acc, c| &(&acc * value) + c)
    }

    /// Holomorphic-limit series obtained by substituting the series of `A`.
    pub fn to_series(&self, sg: &SpecialGeometry) -> Result<MultiSeries> {
        let n = sg.order();
        let mut acc = MultiSeries::zero(sg.nvars(), n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &sg.a) + &MultiSeries::from_ratfun(c, n)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self, names: &[String], qexp: Option<Value>) -> Value {
        let poly: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mono = match i {
                    0 => "1".to_string(),
                    1 => "A".to_string(),
                    _ => format!("A^{i}"),
                };
                json!([mono, c.format_with(names)])
            })
            .collect();
        let mut m = Map::new();
        m.insert("g".into(), json!(self.g));
        m.insert("n".into(), json!(self.n));
        m.insert("poly".into(), Value::Array(poly));
        if let Some(q) = qexp {
            m.insert("qexp".into(), q);
        }
        Value::Object(m)
    }
}

/// `C̃ⁿ⁺¹_g = (θ₀ − nA)·C̃ⁿ_g`.
pub fn yy_step(c: &AmplitudePoly, sg: &SpecialGeometry) -> AmplitudePoly {
    let k = sg.nvars();
    let rho = sg.log_derivative_y();
    // θ₀A as a polynomial in A.
    let theta_a = [sg.kappa.clone(), rho, -&RationalFunction::one(k)];
    let len = c.coeffs.len() + 1;
    let mut out = vec![RationalFunction::zero(k); len];
    let n = Q::from_integer((c.n as i64).into());
    for (i, ci) in c.coeffs.iter().enumerate() {
        out[i] = &out[i] + &ci.theta_comb(&sg.theta0);
        out[i + 1] = &out[i + 1] - &ci.scale(&n);
        if i > 0 {
            let ii = Q::from_integer((i as i64).into());
            for (j, t) in theta_a.iter().enumerate() {
                let idx = i - 1 + j;
                out[idx] = &out[idx] + &(ci * t).scale(&ii);
            }
        }
    }
    let step = AmplitudePoly::new(c.g, c.n + 1, out);
    debug_assert!(step.within_bound(), "degree bound violated");
    step
}

/// `C̃³₀ = Y₀₀;₀`.
pub fn genus0_three_point(sg: &SpecialGeometry) -> AmplitudePoly {
    AmplitudePoly::new(0, 3, vec![sg.y00.clone()])
}

/// `C̃¹₁ = −A/2 + f¹₁`.
pub fn genus1(model: &ModelData) -> AmplitudePoly {
    let k = model.nmoduli();
    AmplitudePoly::new(1, 1, vec![model.f11.clone(), RationalFunction::constant(k, Q::new((-1).into(), 2.into()))])
}

/// Right-hand side `−(C̃²₁ + (C̃¹₁)²)/(2Y₀₀;₀)` of the genus-two equation.
pub fn genus2_derivative(model: &ModelData, sg: &SpecialGeometry) -> AmplitudePoly {
    let k = sg.nvars();
    let c11 = genus1(model);
    let c21 = yy_step(&c11, sg);
    let rhs = c21.add(&c11.mul(&c11, k), k);
    let factor = sg.y00.scale(&Q::from_integer(2.into())).recip();
    rhs.mul_scalar(&-&factor).relabel(2, 0)
}

/// `C̃⁰₂` with ambiguity `f2`, falling back to the registry value.
pub fn genus2(model: &ModelData, sg: &SpecialGeometry, f2: Option<&RationalFunction>) -> Result<AmplitudePoly> {
    let f2 = match f2.or(model.f2.as_ref()) {
        Some(f) => f.clone(),
        None => return Err(Error::MissingAmbiguity("f2".into(), model.name.clone())),
    };
    let out = genus2_derivative(model, sg).integrate_a(f2).relabel(2, 0);
    debug_assert!(out.within_bound());
    Ok(out)
}

/// Propagator `S⁰⁰ = −A/Y₀₀;₀ + f_s` as a polynomial in `A`.
pub fn propagator(sg: &SpecialGeometry, fs: &RationalFunction) -> AmplitudePoly {
    AmplitudePoly::new(0, 0, vec![fs.clone(), -&sg.y00.recip()])
}

/// `Δ₀₀ = −1/S⁰⁰` as a holomorphic-limit series.
pub fn delta(sg: &SpecialGeometry, fs: &RationalFunction) -> Result<MultiSeries> {
    let s = propagator(sg, fs).to_series(sg)?;
    if s.constant_term().is_zero() {
        return Err(Error::VanishingPropagator);
    }
    Ok(-&s.inverse()?)
}

/// Genus-two Feynman sum with vertices evaluated where the propagator vanishes:
/// `½SC¹₂ + ½S(C¹₁)² + ⅛S²C⁰₄ + ½S²C⁰₃C¹₁ + (5/24)S³(C⁰₃)²`. With `S = −A/Y` the vertices
/// obey `∂_S C¹₁ = ½C⁰₃` and `∂_S C⁰₄ = 3(C⁰₃)²`, which fixes the signs of the `S²` terms.
pub fn feynman_genus2(model: &ModelData, sg: &SpecialGeometry, fs: &RationalFunction) -> AmplitudePoly {
    let k = sg.nvars();
    let s = propagator(sg, fs);
    // S = 0 at A = Y·f_s.
    let a0 = &sg.y00 * fs;
    let c03 = genus0_three_point(sg);
    let c04 = yy_step(&c03, sg);
    let c11 = genus1(model);
    let c21 = yy_step(&c11, sg);
    let v = |p: &AmplitudePoly| p.eval_at(&a0, k);
    let (v03, v04, v11, v21) = (v(&c03), v(&c04), v(&c11), v(&c21));
    let s2 = s.mul(&s, k);
    let s3 = s2.mul(&s, k);
    let qr = |a: i64, b: i64| Q::new(a.into(), b.into());
    let terms = [
        s.mul_scalar(&(&v21 + &(&v11 * &v11)).scale(&qr(1, 2))),
        s2.mul_scalar(&v04.scale(&qr(1, 8))),
        s2.mul_scalar(&(&v03 * &v11).scale(&qr(1, 2))),
        s3.mul_scalar(&(&v03 * &v03).scale(&qr(5, 24))),
    ];
    terms.iter().fold(AmplitudePoly::zero(2, 0), |acc, t| acc.add(t, k)).relabel(2, 0)
}

/// Raw coefficients and multi-cover transformed invariants at one genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusInvariants {
    pub genus: u32,
    pub raw: BTreeMap<Vec<u32>, Q>,
    pub bps: BTreeMap<Vec<u32>, Q>,
    pub undetermined: Vec<Vec<u32>>,
}

impl GenusInvariants {
    pub fn is_integral(&self) -> bool {
        self.bps.values().all(|v| v.is_integer())
    }

    pub fn to_json(&self) -> Value {
        let key = |b: &Vec<u32>| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let obj = |m: &BTreeMap<Vec<u32>, Q>| {
            Value::Object(m.iter().map(|(b, v)| (key(b), Value::String(rational::to_string(v)))).collect())
        };
        json!({
            "genus": self.genus,
            "raw": obj(&self.raw),
            "bps": obj(&self.bps),
            "undetermined": self.undetermined.iter().map(key).collect::<Vec<_>>(),
        })
    }
}

fn classes(k: usize, max_degree: u32) -> Vec<Vec<u32>> {
    crate::arith::reconstruct::monomials_up_to(k, max_degree).into_iter().filter(|b| b.iter().any(|&x| x > 0)).collect()
}

/// Genus-one numbers from `C̃¹₁ = θ₀F₁`: `N_β = −[C̃¹₁/G]_β/(c·β)`,
/// `n¹_β = Σ μ(k)N_{β/k}/k − n⁰_β/12`.
pub fn genus1_invariants(
    model: &ModelData,
    sg: &SpecialGeometry,
    mirror: &MirrorMap,
    genus0: &BTreeMap<Vec<u32>, Q>,
    max_degree: u32,
) -> Result<GenusInvariants> {
    let series = &genus1(model).to_series(sg)? * &sg.glimit.inverse()?;
    let qs = mirror.to_q(&series);
    let c = model.c_vector();
    let mut raw = BTreeMap::new();
    let mut undetermined = Vec::new();
    for beta in classes(model.nmoduli(), max_degree.min(sg.order())) {
        let cb: i64 = beta.iter().zip(&c).map(|(&b, &ci)| b as i64 * ci).sum();
        if cb == 0 {
            undetermined.push(beta);
            continue;
        }
        raw.insert(beta.clone(), -qs.coeff(&beta) / Q::from_integer(cb.into()));
    }
    let mut bps = multicover_inverse(&raw, |d| Q::new(1.into(), (d as i64).into()));
    subtract_constant_maps(&mut bps, genus0, Q::new(1.into(), 12.into()));
    Ok(GenusInvariants { genus: 1, raw, bps, undetermined })
}

/// Genus-two numbers from `C̃⁰₂ = F₂`: `n²_β = Σ μ(k)·k·N_{β/k} − n⁰_β/240`.
pub fn genus2_invariants(
    model: &ModelData,
    sg: &SpecialGeometry,
    mirror: &MirrorMap,
    amplitude: &AmplitudePoly,
    genus0: &BTreeMap<Vec<u32>, Q>,
    max_degree: u32,
) -> Result<GenusInvariants> {
    let qs = mirror.to_q(&amplitude.to_series(sg)?);
    let mut raw = BTreeMap::new();
    for beta in classes(model.nmoduli(), max_degree.min(sg.order())) {
        raw.insert(beta.clone(), qs.coeff(&beta));
    }
    let mut bps = multicover_inverse(&raw, |d| Q::from_integer((d as i64).into()));
    subtract_constant_maps(&mut bps, genus0, Q::new(1.into(), 240.into()));
    Ok(GenusInvariants { genus: 2, raw, bps, undetermined: Vec::new() })
}

fn subtract_constant_maps(bps: &mut BTreeMap<Vec<u32>, Q>, genus0: &BTreeMap<Vec<u32>, Q>, weight: Q) {
    for (b, v) in bps.iter_mut() {
        if let Some(n0) = genus0.get(b) {
            *v -= n0 * &weight;
        }
    }
}

/// Fit `f₂ = Σ b_m·z^m / den` to prescribed genus-two invariants. Each `b_m` enters the
/// invariants linearly, so the fit is an exact linear solve; an inconsistent or
/// underdetermined system is reported as such.
pub fn fit_f2(
    model: &ModelData,
    sg: &SpecialGeometry,
    mirror: &MirrorMap,
    numerator_monomials: &[Vec<u32>],
    denominator: &Poly,
    genus0: &BTreeMap<Vec<u32>, Q>,
    targets: &BTreeMap<Vec<u32>, Q>,
) -> Result<RationalFunction> {
    let k = model.nmoduli();
    let max_degree = targets.keys().map(|b| b.iter().sum::<u32>()).max().unwrap_or(0);
    let base = genus2_derivative(model, sg).integrate_a(RationalFunction::zero(k)).relabel(2, 0);
    let base_inv = genus2_invariants(model, sg, mirror, &base, genus0, max_degree)?;
    let mut columns = Vec::new();
    for m in numerator_monomials {
        let f = RationalFunction::new(Poly::monomial(k, m.clone(), Q::one()), denominator.clone());
        let amp = AmplitudePoly::new(2, 0, vec![f]);
        let mut inv = genus2_invariants(model, sg, mirror, &amp, &BTreeMap::new(), max_degree)?;
        columns.push(std::mem::take(&mut inv.bps));
    }
    let rows: Vec<Vec<Q>> = targets.keys().map(|b| columns.iter().map(|c| c[b].clone()).collect()).collect();
    let rhs: Vec<Q> = targets.iter().map(|(b, v)| v - &base_inv.bps[b]).collect();
    let unknowns = numerator_monomials.len();
    let r = rank(&rows, unknowns);
    if r < unknowns {
        return Err(Error::Underdetermined(unknowns - r));
    }
    let sol = solve(&rows, &rhs, unknowns).ok_or_else(|| Error::RankDeficient("f2 fit is inconsistent".into()))?;
    let mut num = Poly::zero(k);
    for (m, b) in numerator_monomials.iter().zip(&sol) {
        num.add_term(m.clone(), b.clone());
    }
    Ok(RationalFunction::new(num, denominator.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::gkz::frobenius_basis;
    use crate::registry::builtin;
    use crate::yukawa::gw0_invariants;

    fn setup(name: &str, order: u32) -> (ModelData, FrobeniusBasis, SpecialGeometry) {
        let m = builtin(name).unwrap();
        let fb = frobenius_basis(&m, order).unwrap();
        let sg = special_geometry(&m, &fb).unwrap();
        (m, fb, sg)
    }

    #[test]
    fn special_geometry_identity() {
        for name in ["p2", "f0", "f1", "f2"] {
            let (_, _, sg) = setup(name, 6);
            assert!(sg.residual().unwrap().is_zero(), "{name}");
            assert!(sg.a.constant_term().is_zero());
        }
    }

    #[test]
    fn projective_plane_data() {
        let (_, _, sg) = setup("p2", 3);
        assert_eq!(sg.y00, RationalFunction::parse("9/(1+27*z)", 1).unwrap());
        assert_eq!(sg.kappa, RationalFunction::parse("-54*z/(1+27*z)", 1).unwrap());
    }

    #[test]
    fn genus_one_step() {
        let (m, _, sg) = setup("p2", 3);
        let c21 = yy_step(&genus1(&m), &sg);
        let f = &m.f11;
        let rho = sg.log_derivative_y();
        let expect = AmplitudePoly::new(
            1,
            2,
            vec![
                &sg.kappa.scale(&Q::new((-1).into(), 2.into())) + &f.theta_comb(&sg.theta0),
                &rho.scale(&Q::new((-1).into(), 2.into())) - f,
                RationalFunction::one(1),
            ],
        );
        assert_eq!(c21, expect);
        assert!(yy_step(&AmplitudePoly::zero(0, 5), &sg).is_zero());
    }

    #[test]
    fn genus_two_integrates() {
        let (m, _, sg) = setup("p2", 3);
        let c = genus2(&m, &sg, None).unwrap();
        assert_eq!(c.degree(), Some(3));
        assert_eq!(c.derivative_a(), genus2_derivative(&m, &sg));
        assert_eq!(c.coeff(0, 1), m.f2.clone().unwrap());
        let f0 = builtin("f0").unwrap();
        let (_, _, sg0) = setup("f0", 2);
        assert!(matches!(genus2(&f0, &sg0, None), Err(Error::MissingAmbiguity(..))));
    }

    #[test]
    fn feynman_matches_recursion() {
        for (name, fs) in [("p2", "0"), ("p2", "1/(1+27*z)"), ("f0", "0"), ("f2", "z1")] {
            let (m, _, sg) = setup(name, 2);
            let k = m.nmoduli();
            let fs = RationalFunction::parse_with(fs, &m.z_names()).unwrap();
            let amp = genus2(&m, &sg, Some(&RationalFunction::zero(k))).unwrap();
            let a0 = &sg.y00 * &fs;
            let shifted = amp.sub(&AmplitudePoly::new(2, 0, vec![amp.eval_at(&a0, k)]), k);
            assert_eq!(feynman_genus2(&m, &sg, &fs), shifted, "{name}");
        }
    }

    #[test]
    fn propagator_limit() {
        let (_, _, sg) = setup("p2", 4);
        let s = propagator(&sg, &RationalFunction::zero(1));
        assert_eq!(s.coeffs[1], RationalFunction::parse("-(1+27*z)/9", 1).unwrap());
        assert!(s.to_series(&sg).unwrap().constant_term().is_zero());
        assert_eq!(delta(&sg, &RationalFunction::zero(1)), Err(Error::VanishingPropagator));
    }

    #[test]
    fn projective_plane_higher_genus() {
        let (m, fb, sg) = setup("p2", 6);
        let mm = MirrorMap::new(&fb).unwrap();
        let g0 = gw0_invariants(&m, &fb, 6).unwrap().bps;
        let g1 = genus1_invariants(&m, &sg, &mm, &g0, 6).unwrap();
        let n1: Vec<Q> = (1..=6).map(|d| g1.bps[&vec![d]].clone()).collect();
        assert_eq!(n1, [0, 0, -10, 231, -4452, 80948].map(q).to_vec());
        let amp = genus2(&m, &sg, None).unwrap();
        let g2 = genus2_invariants(&m, &sg, &mm, &amp, &g0, 6).unwrap();
        let n2: Vec<Q> = (1..=6).map(|d| g2.bps[&vec![d]].clone()).collect();
        assert_eq!(n2, [0, 0, 0, -102, 5430, -194022].map(q).to_vec());
    }

    #[test]
    fn ambiguity_fit_recovers_registry_value() {
        let (m, fb, sg) = setup("p2", 5);
        let mm = MirrorMap::new(&fb).unwrap();
        let g0 = gw0_invariants(&m, &fb, 5).unwrap().bps;
        let targets: BTreeMap<Vec<u32>, Q> = (1..=3).map(|d| (vec![d], q(0))).collect();
        let den = RationalFunction::parse("(1+27*z)^2", 1).unwrap().num().clone();
        let f2 = fit_f2(&m, &sg, &mm, &[vec![1], vec![2], vec![3]], &den, &g0, &targets).unwrap();
        assert_eq!(Some(f2), m.f2);
    }
}
