//! Model registry: per-polytope data (relations, discriminants, closed-form couplings,
//! ambiguities, intersection numbers) loaded from JSON files.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::Deserialize;

use crate::arith::poly::{a_names, z_names};
use crate::arith::{rational, Poly, RationalFunction, Q};
use crate::error::{Error, Result};
use crate::polytope::{integral_points, spans_kernel, LatticePolytope, Point};

const BUILTIN: [(&str, &str); 4] = [
    ("p2", include_str!("../data/p2.json")),
    ("f0", include_str!("../data/f0.json")),
    ("f1", include_str!("../data/f1.json")),
    ("f2", include_str!("../data/f2.json")),
];

#[derive(Deserialize)]
#[serde(untagged)]
enum AmbiguityInput {
    Explicit(String),
    /// `log_derivative · θ₀d/d + constant`, with `d` the discriminant.
    LogDerivative { log_derivative: String, constant: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelInput {
    name: String,
    title: String,
    points: Vec<Point>,
    relations: Vec<Vec<i64>>,
    regularity: Vec<String>,
    discriminant: String,
    yukawa_denominator: String,
    yukawa: BTreeMap<String, String>,
    kappa: String,
    f11: AmbiguityInput,
    f2: Option<String>,
    intersection: Vec<Vec<String>>,
    sf_scale: String,
    sf_combination: Vec<(String, usize, usize)>,
    holomorphic_limit: usize,
    wronskian_divisor: Option<usize>,
}

/// Everything the pipeline needs to know about one model. Mirror-coordinate indices are
/// 0-based here (`t_1` is index 0); index pairs of the Yukawa table use 0 for the θ₀ slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelData {
    pub name: String,
    pub title: String,
    pub polytope: LatticePolytope,
    /// Integral points, origin first; order fixes the meaning of `a_0..a_{l-1}`.
    pub points: Vec<Point>,
    pub relations: Vec<Vec<i64>>,
    /// Factors in the `a` variables whose nonvanishing means regularity.
    pub regularity: Vec<Poly>,
    pub discriminant: Poly,
    pub yukawa_denominator: Poly,
    /// `Y_{ij;0}` for `1 ≤ i ≤ j ≤ k` with the constant set to one.
    pub yukawa: BTreeMap<(usize, usize), RationalFunction>,
    pub kappa: RationalFunction,
    pub f11: RationalFunction,
    pub f2: Option<RationalFunction>,
    pub intersection: Vec<Vec<Q>>,
    /// Overall factor turning the double-log solution into the prepotential derivative.
    pub sf_scale: Q,
    /// `∂_S F = Σ coef · ∂_{ρ_i}∂_{ρ_j} ϖ`, indices 0-based.
    pub sf_combination: Vec<(Q, usize, usize)>,
    /// Mirror map `t_α` whose θ₀-derivative gives the holomorphic limit of the metric.
    pub holomorphic_limit: usize,
    /// Mirror map `t_β` with `θ_β t_β` dividing the Wronskians.
    pub wronskian_divisor: Option<usize>,
}

fn parse_q(s: &str) -> Result<Q> {
    rational::parse(s)
}

impl ModelData {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: ModelInput =
            serde_json::from_str(text).map_err(|e| Error::Registry(format!("model JSON: {e}")))?;
        let k = m.relations.len();
        let l = m.points.len();
        let zs = z_names(k);
        let parse_z = |s: &str| RationalFunction::parse_with(s, &zs);
        let parse_zpoly = |s: &str| -> Result<Poly> {
            let r = parse_z(s)?;
            if !r.is_polynomial() {
                return Err(Error::Registry(format!("expected a polynomial, got '{s}'")));
            }
            Ok(r.num().clone())
        };
        let discriminant = parse_zpoly(&m.discriminant)?;
        let yukawa_denominator = parse_zpoly(&m.yukawa_denominator)?;
        let an = a_names(l);
        let regularity = m
            .regularity
            .iter()
            .map(|s| {
                let r = RationalFunction::parse_with(s, &an)?;
                if !r.is_polynomial() {
                    return Err(Error::Registry(format!("regularity factor '{s}' is not a polynomial")));
                }
                Ok(r.num().clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut yukawa = BTreeMap::new();
        for (key, v) in &m.yukawa {
            let idx: Vec<usize> = key
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Registry(format!("bad Yukawa key '{key}'")))?;
            if idx.len() != 2 || idx[0] == 0 || idx[1] == 0 || idx[0] > k || idx[1] > k {
                return Err(Error::Registry(format!("bad Yukawa key '{key}'")));
            }
            yukawa.insert((idx[0].min(idx[1]), idx[0].max(idx[1])), parse_z(v)?);
        }
        let l0: Vec<Q> = m.relations.iter().map(|r| Q::from_integer(r[0].into())).collect();
        let f11 = match &m.f11 {
            AmbiguityInput::Explicit(s) => parse_z(s)?,
            AmbiguityInput::LogDerivative { log_derivative, constant } => {
                let d = RationalFunction::from_poly(discriminant.clone());
                let ld = &d.theta_comb(&l0) / &d;
                &ld.scale(&parse_q(log_derivative)?)
                    + &RationalFunction::constant(k, parse_q(constant)?)
            }
        };
        let intersection = m
            .intersection
            .iter()
            .map(|row| row.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let sf_combination = m
            .sf_combination
            .iter()
            .map(|(c, i, j)| {
                if *i == 0 || *j == 0 || *i > k || *j > k {
                    return Err(Error::Registry("double-log combination index out of range".into()));
                }
                Ok((parse_q(c)?, i - 1, j - 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let check_index = |i: usize| -> Result<usize> {
            if i == 0 || i > k {
                return Err(Error::Registry(format!("mirror-map index {i} out of range")));
            }
            Ok(i - 1)
        };
        let model = ModelData {
            polytope: LatticePolytope::hull(&m.points)?,
            name: m.name,
            title: m.title,
            points: m.points,
            relations: m.relations,
            regularity,
            discriminant,
            yukawa_denominator,
            yukawa,
            kappa: parse_z(&m.kappa)?,
            f11,
            f2: m.f2.as_deref().map(parse_z).transpose()?,
            intersection,
            sf_scale: parse_q(&m.sf_scale)?,
            sf_combination,
            holomorphic_limit: check_index(m.holomorphic_limit)?,
            wronskian_divisor: m.wronskian_divisor.map(check_index).transpose()?,
        };
        model.validate()?;
        Ok(model)
    }

    /// Internal consistency: the points are the polytope's lattice points, the relations form a
    /// ℤ-basis of the relation lattice, and the stored Yukawa denominators divide the ansatz.
    pub fn validate(&self) -> Result<()> {
        let k = self.nmoduli();
        let mut want = integral_points(&self.polytope);
        let mut have = self.points.clone();
        want.sort();
        have.sort();
        if want != have || self.points[0] != [0, 0] {
            return Err(Error::Registry(format!(
                "{}: points must be the polytope's lattice points with the origin first",
                self.name
            )));
        }
        if self.relations.iter().any(|r| r.len() != self.points.len())
            || !spans_kernel(&self.points, &self.relations)
        {
            return Err(Error::Registry(format!("{}: relations are not a basis of the relation lattice", self.name)));
        }
        if self.intersection.len() != k || self.intersection.iter().any(|r| r.len() != k) {
            return Err(Error::Registry(format!("{}: intersection matrix must be {k}×{k}", self.name)));
        }
        for i in 1..=k {
            for j in i..=k {
                let y = self.yukawa.get(&(i, j)).ok_or_else(|| {
                    Error::Registry(format!("{}: missing Yukawa entry ({i},{j})", self.name))
                })?;
                let scaled = y * &RationalFunction::from_poly(self.yukawa_denominator.clone());
                if !scaled.is_polynomial() {
                    return Err(Error::Registry(format!(
                        "{}: Yukawa ({i},{j}) denominator does not divide the ansatz",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of moduli `k = l(Δ) − 3`.
    pub fn nmoduli(&self) -> usize {
        self.relations.len()
    }

    pub fn npoints(&self) -> usize {
        self.points.len()
    }

    /// θ₀ = Σ l^{(i)}_0 θ_i as a weight vector.
    pub fn theta0(&self) -> Vec<Q> {
        self.relations.iter().map(|r| Q::from_integer(r[0].into())).collect()
    }

    /// `c_i = −l^{(i)}_0`.
    pub fn c_vector(&self) -> Vec<i64> {
        self.relations.iter().map(|r| -r[0]).collect()
    }

    pub fn z_names(&self) -> Vec<String> {
        z_names(self.nmoduli())
    }

    /// Full symmetric table `Y_{ij;0}`, `0 ≤ i,j ≤ k`, with slot 0 meaning θ₀.
    pub fn yukawa_table(&self) -> BTreeMap<(usize, usize), RationalFunction> {
        let k = self.nmoduli();
        let w = self.theta0();
        let get = |i: usize, j: usize| self.yukawa[&(i.min(j), i.max(j))].clone();
        let mut out = BTreeMap::new();
        for i in 1..=k {
            for j in i..=k {
                out.insert((i, j), get(i, j));
            }
        }
        let zero = RationalFunction::zero(k);
        for j in 1..=k {
            let y0j = (1..=k).fold(zero.clone(), |acc, l| &acc + &get(l, j).scale(&w[l - 1]));
            out.insert((0, j), y0j);
        }
        let y00 = (1..=k).fold(zero, |acc, l| &acc + &out[&(0, l)].scale(&w[l - 1]));
        out.insert((0, 0), y00);
        out
    }

    /// Regularity test at a rational coefficient vector `a`.
    pub fn is_regular(&self, a: &[Q]) -> Result<bool> {
        if a.len() != self.npoints() {
            return Err(Error::Incompatible(format!(
                "expected {} coefficients, got {}",
                self.npoints(),
                a.len()
            )));
        }
        Ok(self.regularity.iter().all(|f| !f.eval(a).is_zero()))
    }

    /// Torus-invariant coordinates `z_i = a^{l^{(i)}}` at a coefficient vector.
    pub fn z_of_a(&self, a: &[Q]) -> Option<Vec<Q>> {
        self.relations
            .iter()
            .map(|l| {
                let mut z = Q::from_integer(1.into());
                for (am, &e) in a.iter().zip(l) {
                    if e != 0 && am.is_zero() {
                        return None;
                    }
                    for _ in 0..e.unsigned_abs() {
                        if e > 0 {
                            z *= am;
                        } else {
                            z /= am;
                        }
                    }
                }
                Some(z)
            })
            .collect()
    }
}

/// The loaded set of models, in registration order.
#[derive(Clone, Debug)]
pub struct Registry {
    models: Vec<ModelData>,
}

impl Registry {
    pub fn builtin() -> Self {
        let models = BUILTIN
            .iter()
            .map(|(name, text)| {
                ModelData::from_json(text).unwrap_or_else(|e| panic!("built-in model {name} is invalid: {e}"))
            })
            .collect();
        Registry { models }
    }

    /// Built-ins plus every `*.json` model file in `dir` (later files override by name).
    pub fn with_dir(dir: &Path) -> Result<Self> {
        let mut reg = Self::builtin();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::Registry(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Registry(format!("{}: {e}", p.display())))?;
            reg.insert(ModelData::from_json(&text)?);
        }
        Ok(reg)
    }

    pub fn insert(&mut self, m: ModelData) {
        match self.models.iter_mut().find(|x| x.name == m.name) {
            Some(slot) => *slot = m,
            None => self.models.push(m),
        }
    }

    pub fn get(&self, name: &str) -> Result<&ModelData> {
        let key = name.to_ascii_lowercase();
        self.models.iter().find(|m| m.name == key).ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    pub fn models(&self) -> &[ModelData] {
        &self.models
    }
}

/// One of the shipped models by name.
pub fn builtin(name: &str) -> Result<ModelData> {
    Registry::builtin().get(name).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr};

    #[test]
    fn builtins_load_and_validate() {
        let r = Registry::builtin();
        assert_eq!(r.models().len(), 4);
        assert_eq!(r.get("F2").unwrap().c_vector(), vec![2, 0]);
        assert!(matches!(r.get("p3"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn theta_zero_slot() {
        let p2 = builtin("p2").unwrap();
        let t = p2.yukawa_table();
        assert_eq!(t[&(0, 0)], RationalFunction::parse("9/(1+27*z)", 1).unwrap());
        let f2 = builtin("f2").unwrap();
        let t = f2.yukawa_table();
        assert_eq!(t[&(0, 0)], t[&(1, 1)].scale(&q(4)));
        let f0 = builtin("f0").unwrap();
        let t = f0.yukawa_table();
        assert_eq!(t[&(0, 0)], RationalFunction::parse("8/((1-4*z1-4*z2)^2-64*z1*z2)", 2).unwrap());
    }

    #[test]
    fn regularity() {
        let p2 = builtin("p2").unwrap();
        assert!(p2.is_regular(&[q(1), q(1), q(1), q(1)]).unwrap());
        assert!(!p2.is_regular(&[q(-3), q(1), q(1), q(1)]).unwrap());
        assert!(!p2.is_regular(&[q(1), q(0), q(1), q(1)]).unwrap());
        let f0 = builtin("f0").unwrap();
        // a0 = 4, others 1: (16-8)^2 - 64 = 0.
        assert!(!f0.is_regular(&[q(4), q(1), q(1), q(1), q(1)]).unwrap());
        let f2 = builtin("f2").unwrap();
        assert!(!f2.is_regular(&[q(5), q(1), q(1), q(2), q(1)]).unwrap());
    }

    #[test]
    fn torus_coordinates() {
        let f1 = builtin("f1").unwrap();
        let z = f1.z_of_a(&[q(2), q(1), q(3), q(5), q(7)]).unwrap();
        assert_eq!(z, vec![qr(5, 4), qr(21, 10)]);
    }

    #[test]
    fn genus_one_ambiguity_from_log_derivative() {
        let f0 = builtin("f0").unwrap();
        let d = RationalFunction::from_poly(f0.discriminant.clone());
        let expect = &(&d.theta_comb(&f0.theta0()) / &d).scale(&qr(-1, 12))
            + &RationalFunction::constant(2, qr(1, 6));
        assert_eq!(f0.f11, expect);
    }
}
