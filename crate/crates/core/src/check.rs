//! The acceptance suite: ten criteria, each evaluated end to end on the built-in models and
//! reported as a pass/fail line with a short explanation.

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{q, RationalFunction, Q};
use crate::error::Result;
use crate::gkz::{frobenius_basis, pf_operators, verify_annihilation, ThetaOperator};
use crate::hae::{
    feynman_genus2, genus1_invariants, genus2, genus2_derivative, genus2_invariants, special_geometry,
};
use crate::jacobian::{
    algebraic_route, commutation_holds, expected_dimensions, filtration_tables, random_regular_point, rf_dimensions,
    transversality_holds, GradedRing,
};
use crate::oracle::{agrees, projective_plane_genus_zero};
use crate::polytope::{
    dual_polytope, is_reflexive, lattice_of_relations, normalized_volume, reflexive_polygons, relation_holds,
    spans_kernel,
};
use crate::registry::{builtin, ModelData};
use crate::yukawa::{
    evaluate_constraint, gw0_invariants, yukawa_closed_forms, yukawa_constraints, yukawa_from_ode,
    yukawa_from_wronskian, MirrorMap,
};

pub const MODELS: [&str; 4] = ["p2", "f0", "f1", "f2"];

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        format!("[{mark}] {:>2}. {}: {}", self.id, self.title, self.detail)
    }

    pub fn to_json(&self) -> Value {
        json!({ "id": self.id, "title": self.title, "passed": self.passed, "detail": self.detail })
    }
}

pub const TITLES: [&str; 10] = [
    "Picard-Fuchs reduction",
    "solution basis",
    "Yukawa closed forms",
    "Yukawa differential constraints",
    "algebraic route",
    "dimension tables",
    "special geometry",
    "genus-zero invariants",
    "genus one and two",
    "property suite",
];

/// Evaluate criterion `id` (1..=10) with series truncated at `order`.
pub fn run_criterion(id: u32, order: u32) -> CriterionResult {
    let outcome = match id {
        1 => pf_reduction(),
        2 => solution_basis(order),
        3 => yukawa_closed(order),
        4 => yukawa_ode(),
        5 => algebraic(),
        6 => dimension_tables(),
        7 => special_geometry_check(order),
        8 => genus_zero(order),
        9 => higher_genus(order),
        10 => properties(order),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let title = TITLES.get(id as usize - 1).copied().unwrap_or("unknown");
    CriterionResult { id, title, passed, detail }
}

pub fn run_all(order: u32) -> Vec<CriterionResult> {
    (1..=10).map(|id| run_criterion(id, order)).collect()
}

type Outcome = Result<(bool, String)>;

fn lin(w: &[i64], c: i64) -> ThetaOperator {
    let w: Vec<Q> = w.iter().map(|&x| q(x)).collect();
    ThetaOperator::linear(&w, &q(-c))
}

fn product(factors: &[ThetaOperator]) -> ThetaOperator {
    let k = factors[0].nvars();
    factors.iter().fold(ThetaOperator::identity(k), |acc, f| acc.compose(f))
}

/// `left − z_i · right`, both given as products of θ-linear factors.
fn two_term(k: usize, left: &[ThetaOperator], i: usize, right: &[ThetaOperator]) -> ThetaOperator {
    let z = RationalFunction::var(k, i);
    product(left).sub(&product(right).left_mul(&z))
}

/// The operators as printed for each model.
pub fn reference_operators(name: &str) -> Vec<ThetaOperator> {
    match name {
        "p2" => {
            let th = lin(&[1], 0);
            // θ³ + 3zθ(3θ+1)(3θ+2)
            let tail = product(&[th.clone(), lin(&[3], 1), lin(&[3], 2)]).left_mul(&RationalFunction::var(1, 0).scale(&q(3)));
            vec![product(&[th.clone(), th.clone(), th]).add(&tail)]
        }
        "f0" => {
            let s = [lin(&[-2, -2], 0), lin(&[-2, -2], -1)];
            vec![
                two_term(2, &[lin(&[1, 0], 0), lin(&[1, 0], 0)], 0, &s),
                two_term(2, &[lin(&[0, 1], 0), lin(&[0, 1], 0)], 1, &s),
            ]
        }
        "f1" => vec![
            two_term(2, &[lin(&[1, 0], 0), lin(&[1, -1], 0)], 0, &[lin(&[-2, -1], 0), lin(&[-2, -1], -1)]),
            two_term(2, &[lin(&[0, 1], 0), lin(&[0, 1], 0)], 1, &[lin(&[-2, -1], 0), lin(&[1, -1], 0)]),
        ],
        "f2" => vec![
            two_term(2, &[lin(&[1, 0], 0), lin(&[1, -2], 0)], 0, &[lin(&[-2, 0], 0), lin(&[-2, 0], -1)]),
            two_term(2, &[lin(&[0, 1], 0), lin(&[0, 1], 0)], 1, &[lin(&[1, -2], 0), lin(&[1, -2], -1)]),
        ],
        _ => Vec::new(),
    }
}

fn pf_reduction() -> Outcome {
    let mut bad = Vec::new();
    for name in MODELS {
        let m = builtin(name)?;
        if pf_operators(&m.relations)? != reference_operators(name) {
            bad.push(name);
        }
    }
    Ok(if bad.is_empty() {
        (true, "operators of p2, f0, f1, f2 match exactly".into())
    } else {
        (false, format!("mismatch for {}", bad.join(", ")))
    })
}

fn solution_basis(order: u32) -> Outcome {
    let mut count = 0;
    for name in MODELS {
        let m = builtin(name)?;
        let fb = frobenius_basis(&m, order)?;
        for op in pf_operators(&m.relations)? {
            for s in fb.members() {
                if !verify_annihilation(&op, s)?.is_zero() {
                    return Ok((false, format!("{name}: nonzero residual")));
                }
                count += 1;
            }
        }
    }
    Ok((true, format!("{count} operator/solution pairs vanish to order {order}")))
}

fn yukawa_closed(order: u32) -> Outcome {
    let mut constants = Vec::new();
    let mut p2_coupling = None;
    for name in MODELS {
        let m = builtin(name)?;
        let fb = frobenius_basis(&m, order)?;
        let table = yukawa_from_wronskian(&m, &fb)?;
        let Some(c) = table.ratio_to(&yukawa_closed_forms(&m)) else {
            return Ok((false, format!("{name}: no single constant relates the tables")));
        };
        if name == "p2" {
            // Yuk(θ_z,θ_z;θ_z) = Y_{zz;0}/l₀ once the constant is set to one.
            let normalized = table.scale(&c.recip());
            p2_coupling = Some(normalized.get(1, 1).scale(&m.theta0()[0].recip()));
        }
        constants.push(format!("{name}: c={c}"));
    }
    let want = RationalFunction::parse("-1/(3*(1+27*z))", 1)?;
    let got = p2_coupling.expect("p2 is a built-in");
    let shown = got.format_with(&["z".to_string()]);
    Ok((got == want, format!("{}; p2 coupling at c=1: {shown}", constants.join(", "))))
}

fn yukawa_ode() -> Outcome {
    let mut parts = Vec::new();
    for name in MODELS {
        let m = builtin(name)?;
        let closed = yukawa_closed_forms(&m);
        let (table, dim) = yukawa_from_ode(&m)?;
        if dim != 1 || table.ratio_to(&closed).is_none() {
            return Ok((false, format!("{name}: solution space dimension {dim}")));
        }
        let constraints = yukawa_constraints(&m)?;
        if !constraints.iter().all(|c| evaluate_constraint(c, &closed).is_zero()) {
            return Ok((false, format!("{name}: closed forms violate a constraint")));
        }
        parts.push(format!("{name}: dim 1, {} constraints", constraints.len()));
    }
    Ok((true, parts.join("; ")))
}

fn algebraic() -> Outcome {
    let mut parts = Vec::new();
    for name in MODELS {
        let m = builtin(name)?;
        let route = algebraic_route(&m)?;
        if !route.normal_form.is_closed() {
            return Ok((false, format!("{name}: closedness fails")));
        }
        let Some(c) = route.constant else {
            return Ok((false, format!("{name}: algebraic and transcendental couplings differ")));
        };
        if name == "p2" {
            let want = RationalFunction::parse_with("1/(27*a1*a2*a3+a0^3)", &crate::arith::poly::a_names(4))?;
            if route.normalization.xi.constant_ratio(&want).is_none() {
                return Ok((false, format!("p2: xi = {}", crate::jacobian::format_in_a(&route.normalization.xi))));
            }
        }
        parts.push(format!("{name}: ratio {c}"));
    }
    Ok((true, format!("xi(p2) = 1/(27a1a2a3+a0^3); {}", parts.join(", "))))
}

fn dimension_tables() -> Outcome {
    let mut parts = Vec::new();
    for name in MODELS {
        let m = builtin(name)?;
        let l = m.npoints();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let a = random_regular_point(&m, &mut rng);
            if rf_dimensions(&m, &a)? != expected_dimensions(l) {
                return Ok((false, format!("{name}: dimension jump at a regular point")));
            }
        }
        let t = filtration_tables(&m)?;
        let i2 = if name == "f2" { l - 2 } else { 2 };
        let weights: Vec<usize> = t.threefold_weights.values().cloned().collect();
        let ok = t.weight_chain == vec![0, 2, i2, l - 2, l - 1]
            && t.hodge_chain == vec![1, l - 2, l - 1]
            && weights == vec![2, l - 4, 0, 1]
            && t.hodge_numbers[1][1] == l - 1
            && t.hodge_numbers[2][1] == 1
            && transversality_holds(&m)?;
        if !ok {
            return Ok((false, format!("{name}: tables {}", t.to_json())));
        }
        parts.push(format!("{name}: I={:?} E={:?}", t.weight_chain, t.hodge_chain));
    }
    Ok((true, parts.join("; ")))
}

fn special_geometry_check(order: u32) -> Outcome {
    for name in MODELS {
        let m = builtin(name)?;
        let fb = frobenius_basis(&m, order)?;
        let sg = special_geometry(&m, &fb)?;
        if name == "p2"
            && (sg.y00 != RationalFunction::parse("9/(1+27*z)", 1)?
                || sg.kappa != RationalFunction::parse("-54*z/(1+27*z)", 1)?)
        {
            return Ok((false, "p2: Y00 or kappa differ".into()));
        }
        if !sg.residual()?.is_zero() {
            return Ok((false, format!("{name}: residual of the A equation is nonzero")));
        }
    }
    Ok((true, format!("p2 Y00 = 9/(1+27z), kappa = -54z/(1+27z); identity holds to order {order} for all models")))
}

fn genus_zero(order: u32) -> Outcome {
    let p2 = builtin("p2")?;
    let fb = frobenius_basis(&p2, order.max(4))?;
    let exact = gw0_invariants(&p2, &fb, 4)?;
    let oracle = projective_plane_genus_zero(4);
    let mut values = Vec::new();
    for d in 1..=4u32 {
        let n = &exact.bps[&vec![d]];
        let raw = exact.raw[&vec![d]].to_f64().unwrap_or(f64::NAN);
        let nf = n.to_f64().unwrap_or(f64::NAN);
        if !n.is_integer() || !agrees(nf, oracle.bps[d as usize - 1], 10) || !agrees(raw, oracle.raw[d as usize - 1], 10) {
            return Ok((false, format!("degree {d}: exact {n}, oracle {}", oracle.bps[d as usize - 1])));
        }
        values.push(n.to_string());
    }
    let first = exact.bps[&vec![1]] == q(3);
    Ok((first, format!("n_d = {} (oracle agrees to 10 digits)", values.join(", "))))
}

fn higher_genus(order: u32) -> Outcome {
    let p2 = builtin("p2")?;
    let fb = frobenius_basis(&p2, order.max(6))?;
    let sg = special_geometry(&p2, &fb)?;
    let amp = genus2(&p2, &sg, None)?;
    if amp.derivative_a() != genus2_derivative(&p2, &sg) {
        return Ok((false, "dF2/dA differs from the recursion".into()));
    }
    for fs in [RationalFunction::zero(1), RationalFunction::parse("1/(1+27*z)", 1)?] {
        let diff = amp.sub(&feynman_genus2(&p2, &sg, &fs), 1);
        if diff.degree().unwrap_or(0) > 0 {
            return Ok((false, "Feynman sum differs beyond an A-independent term".into()));
        }
    }
    let mm = MirrorMap::new(&fb)?;
    let g0 = gw0_invariants(&p2, &fb, 6)?.bps;
    let g1 = genus1_invariants(&p2, &sg, &mm, &g0, 6)?;
    let g2 = genus2_invariants(&p2, &sg, &mm, &amp, &g0, 6)?;
    let fmt = |m: &std::collections::BTreeMap<Vec<u32>, Q>| -> String {
        (1..=6u32).map(|d| m.get(&vec![d]).map(|v| v.to_string()).unwrap_or_default()).collect::<Vec<_>>().join(",")
    };
    let ok = g1.is_integral() && g2.is_integral();
    Ok((ok, format!("n1 = [{}], n2 = [{}]", fmt(&g1.bps), fmt(&g2.bps))))
}

/// JSON renderings whose byte-for-byte stability stands in for CLI determinism.
pub fn canonical_outputs(order: u32) -> Result<String> {
    let p2 = builtin("p2")?;
    let fb = frobenius_basis(&p2, order.min(6))?;
    let table = yukawa_from_wronskian(&p2, &fb)?;
    let gw = gw0_invariants(&p2, &fb, 4)?;
    let f0 = builtin("f0")?;
    let tables = filtration_tables(&f0)?;
    Ok(json!({ "yukawa": table.to_json(&p2), "gw0": gw.to_json(), "filtrations": tables.to_json() }).to_string())
}

fn theta_commutes(m: &ModelData, order: u32) -> Result<bool> {
    let fb = frobenius_basis(m, order.min(6))?;
    let s = &fb.double_log;
    Ok((0..m.nmoduli()).all(|i| (0..m.nmoduli()).all(|j| s.theta(i).theta(j) == s.theta(j).theta(i))))
}

fn properties(order: u32) -> Outcome {
    for name in MODELS {
        let m = builtin(name)?;
        if !m.relations.iter().all(|l| relation_holds(&m.points, l)) || !spans_kernel(&m.points, &m.relations) {
            return Ok((false, format!("{name}: relation identities fail")));
        }
        if !lattice_of_relations(&m.polytope).is_valid() {
            return Ok((false, format!("{name}: computed relation lattice invalid")));
        }
        if !theta_commutes(&m, order)? {
            return Ok((false, format!("{name}: theta operators do not commute")));
        }
        if !commutation_holds(&GradedRing::new(&m.points)?, 3) {
            return Ok((false, format!("{name}: [D_i, D_a] != 0")));
        }
    }
    for p in reflexive_polygons() {
        let d = dual_polytope(&p)?;
        if !is_reflexive(&d)? || dual_polytope(&d)? != p || normalized_volume(&p) + normalized_volume(&d) != 12 {
            return Ok((false, format!("duality fails for {:?}", p.vertices)));
        }
    }
    if canonical_outputs(order)? != canonical_outputs(order)? {
        return Ok((false, "JSON output differs between runs".into()));
    }
    Ok((true, "relations, duality on 16 polygons, [D_i, D_a] = 0, theta commutativity, deterministic JSON".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_operators_have_expected_orders() {
        assert_eq!(reference_operators("p2")[0].order(), 3);
        assert!(reference_operators("f1").iter().all(|op| op.order() == 2));
        assert!(reference_operators("nope").is_empty());
    }

    #[test]
    fn reduction_criterion() {
        let r = run_criterion(1, 4);
        assert!(r.passed, "{}", r.line());
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(11, 4).passed);
    }
}
