//! Yukawa couplings along three routes (Wronskians of periods, the differential constraints
//! implied by the Picard–Fuchs system, and the registry closed forms), the mirror map, and
//! genus-zero instanton numbers.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::arith::linalg::{nullspace, Matrix};
use crate::arith::poly::z_names;
use crate::arith::rational::{self, mobius};
use crate::arith::reconstruct::{monomials_up_to, rational_reconstruct};
use crate::arith::{LogSeries, MultiSeries, Poly, RationalFunction, Q};
use crate::error::{Error, Result};
use crate::gkz::{pf_operators, FrobeniusBasis, ThetaOperator};
use crate::registry::ModelData;

/// `Y_{ij;0}` for `0 ≤ i ≤ j ≤ k`, slot 0 being θ₀, together with the overall constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YukawaTable {
    pub k: usize,
    pub entries: BTreeMap<(usize, usize), RationalFunction>,
    pub c: Q,
}

/// Fill in the θ₀ row from `Y_{0j;0} = Σ_l l^{(l)}_0 Y_{lj;0}`.
pub fn complete_table(
    theta0: &[Q],
    upper: &BTreeMap<(usize, usize), RationalFunction>,
) -> BTreeMap<(usize, usize), RationalFunction> {
    let k = theta0.len();
    let get = |i: usize, j: usize| upper[&(i.min(j), i.max(j))].clone();
    let mut out = BTreeMap::new();
    for i in 1..=k {
        for j in i..=k {
            out.insert((i, j), get(i, j));
        }
    }
    let zero = RationalFunction::zero(k);
    for j in 1..=k {
        let y = (1..=k).fold(zero.clone(), |acc, l| &acc + &get(l, j).scale(&theta0[l - 1]));
        out.insert((0, j), y);
    }
    let y00 = (1..=k).fold(zero, |acc, l| &acc + &out[&(0, l)].scale(&theta0[l - 1]));
    out.insert((0, 0), y00);
    out
}

impl YukawaTable {
    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[&(i.min(j), i.max(j))]
    }

    pub fn scale(&self, c: &Q) -> YukawaTable {
        YukawaTable {
            k: self.k,
            entries: self.entries.iter().map(|(k, v)| (*k, v.scale(c))).collect(),
            c: &self.c * c,
        }
    }

    /// The constant `λ` with `self = λ · other` entrywise, if there is one.
    pub fn ratio_to(&self, other: &YukawaTable) -> Option<Q> {
        let mut ratio: Option<Q> = None;
        for (key, v) in &self.entries {
            let w = other.entries.get(key)?;
            match (v.is_zero(), w.is_zero()) {
                (true, true) => continue,
                (false, false) => {}
                _ => return None,
            }
            let r = v.constant_ratio(w)?;
            if ratio.as_ref().is_some_and(|x| *x != r) {
                return None;
            }
            ratio = Some(r);
        }
        ratio
    }

    /// JSON map; one modulus reports `Yuk(θ_z,θ_z;θ_z) = Y_{zz;0}/l_0`.
    pub fn to_json(&self, model: &ModelData) -> Value {
        let names = z_names(self.k);
        let mut m = Map::new();
        if self.k == 1 {
            let l0 = model.theta0()[0].clone();
            m.insert("(z,z;z)".into(), Value::String(self.get(1, 1).scale(&l0.recip()).format_with(&names)));
        } else {
            for ((i, j), v) in &self.entries {
                m.insert(format!("({i},{j};0)"), Value::String(v.format_with(&names)));
            }
        }
        Value::Object(m)
    }
}

/// Registry closed forms with the constant set to one.
pub fn yukawa_closed_forms(model: &ModelData) -> YukawaTable {
    YukawaTable { k: model.nmoduli(), entries: model.yukawa_table(), c: Q::one() }
}

fn unit(k: usize, i: usize) -> Vec<Q> {
    let mut w = vec![Q::zero(); k];
    w[i] = Q::one();
    w
}

fn det(m: &[Vec<LogSeries>]) -> Result<LogSeries> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = LogSeries::zero(m[0][0].nvars(), m[0][0].order());
    for c in 0..n {
        let minor: Vec<Vec<LogSeries>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][c].mul(&det(&minor)?)?;
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(acc)
}

/// Determinant with rows `t_1..t_k, ∂_S F` and columns `(θ_{d_1}⋯θ_{d_r} f, θ_1 f, …, θ_k f)`,
/// where each direction `d` is a weight vector for `Σ d_i θ_i`.
pub fn wronskian(basis: &FrobeniusBasis, dirs: &[Vec<Q>]) -> Result<LogSeries> {
    let k = basis.nvars();
    if dirs.len() < 2 {
        return Err(Error::BasisTooSmall("a Wronskian needs at least two derivative directions".into()));
    }
    if k == 0 {
        return Err(Error::BasisTooSmall("no mirror maps".into()));
    }
    let rows: Vec<&LogSeries> = basis.mirror_maps.iter().chain(std::iter::once(&basis.double_log)).collect();
    let m: Vec<Vec<LogSeries>> = rows
        .iter()
        .map(|f| {
            let mut first = (*f).clone();
            for d in dirs {
                first = first.theta_comb(d);
            }
            let mut row = vec![first];
            row.extend((0..k).map(|i| f.theta(i)));
            row
        })
        .collect();
    det(&m)
}

/// `Wr_{i j}` with index 0 meaning θ₀; divided by `θ_β t_β` when the model asks for it.
pub fn wronskian_index(model: &ModelData, basis: &FrobeniusBasis, idx: &[usize]) -> Result<MultiSeries> {
    let k = model.nmoduli();
    let dirs: Vec<Vec<Q>> = idx.iter().map(|&i| if i == 0 { model.theta0() } else { unit(k, i - 1) }).collect();
    let w = wronskian(basis, &dirs)?;
    if !w.is_log_free() {
        return Err(Error::Incompatible("Wronskian retained logarithms".into()));
    }
    let mut s = w.power_part();
    if let Some(b) = model.wronskian_divisor {
        let div = basis.mirror_maps[b].theta(b);
        s = &s * &div.power_part().inverse()?;
    }
    Ok(s)
}

/// `(−1)^k · scale · Wr_{ij}`, the series normalised so that the constant is one.
pub fn yukawa_series(model: &ModelData, basis: &FrobeniusBasis) -> Result<BTreeMap<(usize, usize), MultiSeries>> {
    let k = model.nmoduli();
    let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
    let norm = &sign * &model.sf_scale;
    let mut out = BTreeMap::new();
    for i in 1..=k {
        for j in i..=k {
            out.insert((i, j), wronskian_index(model, basis, &[i, j])?.scale(&norm));
        }
    }
    Ok(out)
}

/// Wronskian route: reconstruct each entry over the model's Yukawa denominator.
pub fn yukawa_from_wronskian(model: &ModelData, basis: &FrobeniusBasis) -> Result<YukawaTable> {
    let series = yukawa_series(model, basis)?;
    let mut upper = BTreeMap::new();
    for (key, s) in series {
        upper.insert(key, rational_reconstruct(&s, &model.yukawa_denominator)?);
    }
    Ok(YukawaTable { k: model.nmoduli(), entries: complete_table(&model.theta0(), &upper), c: Q::one() })
}

/// `Σ quad_{ij} Y_{ij;0} + Σ red_{ij} Y_{0ij;0} = 0` with `i,j ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YukawaConstraint {
    pub quadratic: BTreeMap<(usize, usize), RationalFunction>,
    pub reduced_cubic: BTreeMap<(usize, usize), RationalFunction>,
}

fn pair_of(e: &[u32]) -> (usize, usize) {
    let mut idx = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        for _ in 0..k {
            idx.push(i + 1);
        }
    }
    (idx[0], idx[1])
}

/// Divide a homogeneous cubic θ-form by the linear form `Σ w_i θ_i`.
fn divide_by_linear(cubic: &BTreeMap<Vec<u32>, RationalFunction>, w: &[Q]) -> Result<BTreeMap<Vec<u32>, RationalFunction>> {
    let k = w.len();
    let v = w.iter().position(|x| !x.is_zero()).ok_or_else(|| Error::Incompatible("θ₀ vanishes".into()))?;
    let mut rem = cubic.clone();
    let mut quot: BTreeMap<Vec<u32>, RationalFunction> = BTreeMap::new();
    loop {
        let Some(e) = rem.keys().filter(|e| e[v] > 0).max_by_key(|e| (e[v], (*e).clone())).cloned() else {
            break;
        };
        let c = rem[&e].scale(&w[v].recip());
        let mut qe = e.clone();
        qe[v] -= 1;
        for i in 0..k {
            if w[i].is_zero() {
                continue;
            }
            let mut f = qe.clone();
            f[i] += 1;
            let cur = rem.get(&f).cloned().unwrap_or_else(|| RationalFunction::zero(k));
            let next = &cur - &c.scale(&w[i]);
            if next.is_zero() {
                rem.remove(&f);
            } else {
                rem.insert(f, next);
            }
        }
        let cur = quot.get(&qe).cloned().unwrap_or_else(|| RationalFunction::zero(k));
        quot.insert(qe, &cur + &c);
    }
    if !rem.is_empty() {
        return Err(Error::Incompatible("cubic part is not divisible by θ₀".into()));
    }
    Ok(quot)
}

fn constraint_from(op: &ThetaOperator, w: &[Q]) -> Result<YukawaConstraint> {
    let mut quadratic = BTreeMap::new();
    let mut cubic = BTreeMap::new();
    for (e, c) in op.terms() {
        match e.iter().sum::<u32>() {
            0 | 1 => {}
            2 => {
                let p = pair_of(e);
                let cur: RationalFunction =
                    quadratic.get(&p).cloned().unwrap_or_else(|| RationalFunction::zero(w.len()));
                quadratic.insert(p, &cur + c);
            }
            3 => {
                cubic.insert(e.clone(), c.clone());
            }
            d => return Err(Error::Incompatible(format!("operator of order {d} needs higher couplings"))),
        }
    }
    let reduced_cubic = divide_by_linear(&cubic, w)?.into_iter().map(|(e, c)| (pair_of(&e), c)).collect();
    Ok(YukawaConstraint { quadratic, reduced_cubic })
}

/// Constraints from each Picard–Fuchs operator and, while the order stays ≤ 3, its θ₀-prolongation.
pub fn yukawa_constraints(model: &ModelData) -> Result<Vec<YukawaConstraint>> {
    let w = model.theta0();
    let mut out = Vec::new();
    for op in pf_operators(&model.relations)? {
        out.push(constraint_from(&op, &w)?);
        if op.order() < 3 {
            out.push(constraint_from(&op.prolong(&w), &w)?);
        }
    }
    Ok(out)
}

/// Evaluate a constraint on a full table, using `Y_{0ij;0} = ½(θ_i Y_{j0;0} + θ_j Y_{i0;0})`.
pub fn evaluate_constraint(c: &YukawaConstraint, table: &YukawaTable) -> RationalFunction {
    let half = Q::new(1.into(), 2.into());
    let mut acc = RationalFunction::zero(table.k);
    for ((i, j), u) in &c.quadratic {
        acc = &acc + &(u * table.get(*i, *j));
    }
    for ((i, j), r) in &c.reduced_cubic {
        let y0 = &table.get(*j, 0).theta(i - 1) + &table.get(*i, 0).theta(j - 1);
        acc = &acc + &(r * &y0.scale(&half));
    }
    acc
}

/// Solve the constraints for numerators over the stored denominator, widening the degree
/// bound twice before giving up. The one free constant is fixed against the closed forms
/// when the solution is proportional to them; the second value is the solution-space dimension.
pub fn yukawa_from_ode(model: &ModelData) -> Result<(YukawaTable, usize)> {
    let k = model.nmoduli();
    let w = model.theta0();
    let d = &model.yukawa_denominator;
    let constraints = yukawa_constraints(model)?;
    // Common denominator of all constraint coefficients.
    let mut lc = Poly::one(k);
    for c in &constraints {
        for r in c.quadratic.values().chain(c.reduced_cubic.values()) {
            let g = crate::arith::poly::gcd(&lc, r.den());
            lc = &lc * &r.den().div_exact(&g).expect("gcd divides");
        }
    }
    let to_poly = |r: &RationalFunction| -> Poly {
        (r * &RationalFunction::from_poly(lc.clone())).num().clone()
    };
    let pairs: Vec<(usize, usize)> = (1..=k).flat_map(|i| (i..=k).map(move |j| (i, j))).collect();
    let base_bound: Vec<u32> = (0..k).map(|v| d.degree_in(v) + 1).collect();
    let dtheta: Vec<Poly> = (0..k).map(|i| d.theta(i)).collect();
    for extra in 0..3u32 {
        let bound: Vec<u32> = base_bound.iter().map(|b| b + extra).collect();
        let total: u32 = bound.iter().sum();
        let monos: Vec<Vec<u32>> = monomials_up_to(k, total)
            .into_iter()
            .filter(|e| e.iter().zip(&bound).all(|(a, b)| a <= b))
            .collect();
        let mut columns: Vec<Vec<(Vec<u32>, Q)>> = Vec::new();
        let mut unknowns: Vec<((usize, usize), Vec<u32>)> = Vec::new();
        for &p in &pairs {
            for mu in &monos {
                let zmu = Poly::monomial(k, mu.clone(), Q::one());
                let n_of = |i: usize, j: usize| -> Poly {
                    if (i.min(j), i.max(j)) == p {
                        zmu.clone()
                    } else {
                        Poly::zero(k)
                    }
                };
                let n0 = |j: usize| -> Poly {
                    (1..=k).fold(Poly::zero(k), |acc, l| &acc + &n_of(l, j).scale(&w[l - 1]))
                };
                let mut col: Vec<(Vec<u32>, Q)> = Vec::new();
                for (ci, c) in constraints.iter().enumerate() {
                    // D²·(constraint), all coefficients cleared by lc.
                    let mut acc = Poly::zero(k);
                    for ((i, j), u) in &c.quadratic {
                        acc = &acc + &(&to_poly(u) * &(&n_of(*i, *j) * d));
                    }
                    for ((i, j), r) in &c.reduced_cubic {
                        let term = |a: usize, b: usize| -> Poly {
                            // D²·θ_a(N_{0b}/D) = θ_a N_{0b}·D − N_{0b}·θ_a D
                            let nb = n0(b);
                            &(&nb.theta(a - 1) * d) - &(&nb * &dtheta[a - 1])
                        };
                        let s = &term(*i, *j) + &term(*j, *i);
                        acc = &acc + &(&to_poly(r) * &s.scale(&Q::new(1.into(), 2.into())));
                    }
                    // Rows are keyed by (constraint, monomial).
                    for (e, v) in acc.terms() {
                        let mut tagged = vec![ci as u32];
                        tagged.extend(e.iter());
                        col.push((tagged, v.clone()));
                    }
                }
                columns.push(col);
                unknowns.push((p, mu.clone()));
            }
        }
        let mut row_index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for col in &columns {
            for (e, _) in col {
                let n = row_index.len();
                row_index.entry(e.clone()).or_insert(n);
            }
        }
        let mut mat: Matrix = vec![vec![Q::zero(); columns.len()]; row_index.len()];
        for (ci, col) in columns.iter().enumerate() {
            for (e, v) in col {
                mat[row_index[e]][ci] += v;
            }
        }
        let ns = nullspace(&mat, columns.len());
        match ns.len() {
            0 => continue,
            1 => {
                let v = &ns[0];
                let mut upper: BTreeMap<(usize, usize), RationalFunction> = BTreeMap::new();
                for &p in &pairs {
                    let mut num = Poly::zero(k);
                    for (x, (q, mu)) in v.iter().zip(&unknowns) {
                        if *q == p && !x.is_zero() {
                            num.add_term(mu.clone(), x.clone());
                        }
                    }
                    upper.insert(p, RationalFunction::new(num, d.clone()));
                }
                let table = YukawaTable { k, entries: complete_table(&w, &upper), c: Q::one() };
                // Fix the free constant against the closed forms where possible.
                let closed = yukawa_closed_forms(model);
                let table = match closed.ratio_to(&table) {
                    Some(r) => YukawaTable { c: Q::one(), ..table.scale(&r) },
                    None => table,
                };
                return Ok((table, ns.len()));
            }
            n => return Err(Error::Underdetermined(n)),
        }
    }
    Err(Error::AnsatzInsufficient(base_bound.iter().max().copied().unwrap_or(0) + 2))
}

/// Inverse mirror map: `z_i = q_i · u_i(q)` where `q_i = exp(t_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorMap {
    /// `t_i − log z_i` as series in `z`.
    pub shifts: Vec<MultiSeries>,
    /// `u_i(q)` with `z_i = q_i u_i(q)`.
    pub units: Vec<MultiSeries>,
}

impl MirrorMap {
    pub fn new(basis: &FrobeniusBasis) -> Result<Self> {
        let k = basis.nvars();
        let n = basis.order();
        let mut shifts = Vec::with_capacity(k);
        for (i, t) in basis.mirror_maps.iter().enumerate() {
            let mut ok = t.max_log_degree() <= 1;
            for (key, s) in t.components() {
                let deg: u32 = key.iter().sum();
                if deg == 1 {
                    ok &= key[i] == 1 && s == &MultiSeries::one(k, n);
                }
            }
            let p = t.power_part();
            ok &= p.constant_term().is_zero();
            if !ok {
                return Err(Error::ReversionFailure(format!("t_{} is not log z_{} + O(z)", i + 1, i + 1)));
            }
            shifts.push(p);
        }
        // Fixed point u = exp(−s(q·u)); each pass fixes one more order.
        let mut units = vec![MultiSeries::one(k, n); k];
        for _ in 0..=n {
            units = shifts
                .iter()
                .map(|s| (-&s.compose_scaled(&units)).exp())
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(MirrorMap { shifts, units })
    }

    /// Re-express a series in `z` as a series in `q`.
    pub fn to_q(&self, f: &MultiSeries) -> MultiSeries {
        f.compose_scaled(&self.units)
    }

    /// `z_i(q)` itself.
    pub fn z_of_q(&self, i: usize) -> MultiSeries {
        let k = self.units.len();
        let n = self.units[0].order();
        &MultiSeries::var(k, n, i) * &self.units[i]
    }
}

fn invert_series_matrix(m: &[Vec<MultiSeries>]) -> Result<Vec<Vec<MultiSeries>>> {
    let n = m.len();
    let nv = m[0][0].nvars();
    let ord = m[0][0].order();
    let mut a: Vec<Vec<MultiSeries>> = m.to_vec();
    let mut inv: Vec<Vec<MultiSeries>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { MultiSeries::one(nv, ord) } else { MultiSeries::zero(nv, ord) }).collect())
        .collect();
    for c in 0..n {
        let p = a[c][c].inverse()?;
        for j in 0..n {
            a[c][j] = &a[c][j] * &p;
            inv[c][j] = &inv[c][j] * &p;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[c][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[c][j]);
            }
        }
    }
    Ok(inv)
}

/// Couplings in flat coordinates from both sides, as series in `z`, plus their `q`-expansions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AModelCouplings {
    /// `Yuk(∂_α,∂_β; Σ l^{(i)}_0 ∂_i)` from the B-model table.
    pub from_yukawa: Vec<Vec<MultiSeries>>,
    /// `∂_α∂_β` of the scaled double-log solution.
    pub from_prepotential: Vec<Vec<MultiSeries>>,
    /// The latter re-expanded in `q`.
    pub q_expansion: Vec<Vec<MultiSeries>>,
}

impl AModelCouplings {
    pub fn agree(&self) -> bool {
        self.from_yukawa == self.from_prepotential
    }
}

/// Holomorphic limit of the metric, `θ₀ t_α / l^{(α)}_0`.
pub fn holomorphic_metric(model: &ModelData, basis: &FrobeniusBasis) -> Result<MultiSeries> {
    let a = model.holomorphic_limit;
    let l0 = model.theta0()[a].clone();
    if l0.is_zero() {
        return Err(Error::Incompatible("holomorphic limit uses a mirror map with c = 0".into()));
    }
    let g = basis.mirror_maps[a].theta_comb(&model.theta0());
    if !g.is_log_free() {
        return Err(Error::Incompatible("θ₀ t retains logarithms".into()));
    }
    Ok(g.power_part().scale(&l0.recip()))
}

pub fn amodel_couplings(model: &ModelData, basis: &FrobeniusBasis, table: &YukawaTable) -> Result<AModelCouplings> {
    let k = model.nmoduli();
    let n = basis.order();
    // M_{iα} = θ_i t_α
    let m: Vec<Vec<MultiSeries>> = (0..k)
        .map(|i| (0..k).map(|a| basis.mirror_maps[a].theta(i).power_part()).collect())
        .collect();
    let minv = invert_series_matrix(&m)?;
    let g_inv = holomorphic_metric(model, basis)?.inverse()?;
    let y: Vec<Vec<MultiSeries>> = (1..=k)
        .map(|i| {
            (1..=k)
                .map(|j| MultiSeries::from_ratfun(table.get(i, j), n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut from_yukawa = vec![vec![MultiSeries::zero(k, n); k]; k];
    for a in 0..k {
        for b in 0..k {
            let mut acc = MultiSeries::zero(k, n);
            for i in 0..k {
                for j in 0..k {
                    acc = &acc + &(&(&minv[a][i] * &y[i][j]) * &minv[b][j]);
                }
            }
            from_yukawa[a][b] = &acc * &g_inv;
        }
    }
    // ∂_β S = Σ_j (M^{-1})_{βj} θ_j S, then ∂_α of that.
    let s = basis.double_log.scale(&model.sf_scale);
    let ds: Vec<LogSeries> = (0..k)
        .map(|b| (0..k).fold(LogSeries::zero(k, n), |acc, j| acc.add(&s.theta(j).mul_series(&minv[b][j]))))
        .collect();
    let mut from_prepotential = vec![vec![MultiSeries::zero(k, n); k]; k];
    for a in 0..k {
        for b in 0..k {
            let v = (0..k).fold(LogSeries::zero(k, n), |acc, i| acc.add(&ds[b].theta(i).mul_series(&minv[a][i])));
            if !v.is_log_free() {
                return Err(Error::Incompatible("second flat derivative retains logarithms".into()));
            }
            from_prepotential[a][b] = v.power_part();
        }
    }
    let mm = MirrorMap::new(basis)?;
    let q_expansion = from_prepotential.iter().map(|row| row.iter().map(|s| mm.to_q(s)).collect()).collect();
    Ok(AModelCouplings { from_yukawa, from_prepotential, q_expansion })
}

/// Genus-zero invariants by curve class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstantonSeries {
    /// `N_β` read off the prepotential.
    pub raw: BTreeMap<Vec<u32>, Q>,
    /// Multi-cover transformed `n_β`.
    pub bps: BTreeMap<Vec<u32>, Q>,
    /// Classes with `c·β = 0`, invisible to the double-log solution.
    pub undetermined: Vec<Vec<u32>>,
}

impl InstantonSeries {
    pub fn to_json(&self) -> Value {
        let key = |b: &Vec<u32>| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut raw = Map::new();
        for (b, v) in &self.raw {
            raw.insert(key(b), Value::String(rational::to_string(v)));
        }
        let mut bps = Map::new();
        for (b, v) in &self.bps {
            bps.insert(key(b), Value::String(rational::to_string(v)));
        }
        let und: Vec<Value> = self.undetermined.iter().map(|b| Value::String(key(b))).collect();
        let mut m = Map::new();
        m.insert("raw".into(), Value::Object(raw));
        m.insert("bps".into(), Value::Object(bps));
        m.insert("undetermined".into(), Value::Array(und));
        Value::Object(m)
    }
}

/// Divisors `d ≥ 1` of every entry of `beta`.
pub fn common_divisors(beta: &[u32]) -> Vec<u32> {
    let g = beta.iter().fold(0u32, |a, &b| num_integer::Integer::gcd(&a, &b));
    (1..=g).filter(|d| g % d == 0).collect()
}

/// `n_β = Σ_{k|β} μ(k) · weight(k) · N_{β/k}`.
pub fn multicover_inverse(raw: &BTreeMap<Vec<u32>, Q>, weight: impl Fn(u32) -> Q) -> BTreeMap<Vec<u32>, Q> {
    let mut out = BTreeMap::new();
    for beta in raw.keys() {
        let mut acc = Q::zero();
        for d in common_divisors(beta) {
            let mu = mobius(d as u64);
            if mu == 0 {
                continue;
            }
            let sub: Vec<u32> = beta.iter().map(|x| x / d).collect();
            if let Some(v) = raw.get(&sub) {
                acc += Q::from_integer(mu.into()) * weight(d) * v;
            }
        }
        out.insert(beta.clone(), acc);
    }
    out
}

/// Instanton part `C(z)` of the scaled double-log solution after eliminating `log z`, together
/// with a check that the classical part equals `½ Σ J_{ij} t_i t_j`.
pub fn prepotential_instanton_part(model: &ModelData, basis: &FrobeniusBasis) -> Result<MultiSeries> {
    let k = model.nmoduli();
    let n = basis.order();
    let s = basis.double_log.scale(&model.sf_scale);
    let mm = MirrorMap::new(basis)?;
    // Substitute log z_i = t_i − s_i and collect powers of t.
    let mut c0 = MultiSeries::zero(k, n);
    let mut c1 = vec![MultiSeries::zero(k, n); k];
    let mut c2 = vec![vec![MultiSeries::zero(k, n); k]; k];
    for (key, comp) in s.components() {
        let logs: Vec<usize> = key.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect();
        match logs.len() {
            0 => c0 = &c0 + comp,
            1 => {
                let i = logs[0];
                c1[i] = &c1[i] + comp;
                c0 = &c0 - &(comp * &mm.shifts[i]);
            }
            2 => {
                let (i, j) = (logs[0], logs[1]);
                c2[i][j] = &c2[i][j] + comp;
                c1[i] = &c1[i] - &(comp * &mm.shifts[j]);
                c1[j] = &c1[j] - &(comp * &mm.shifts[i]);
                c0 = &c0 + &(&(comp * &mm.shifts[i]) * &mm.shifts[j]);
            }
            _ => return Err(Error::LogDegreeOverflow(logs.len() as u32)),
        }
    }
    let half = Q::new(1.into(), 2.into());
    for i in 0..k {
        if !c1[i].is_zero() {
            return Err(Error::Incompatible("prepotential has a term linear in t".into()));
        }
        for j in 0..k {
            let sym = if i == j { c2[i][i].clone() } else { (&c2[i][j] + &c2[j][i]).scale(&half) };
            let want = &model.intersection[i][j] * &half;
            if sym != MultiSeries::constant(k, n, want) {
                return Err(Error::Incompatible("classical part differs from the intersection form".into()));
            }
        }
    }
    Ok(mm.to_q(&c0))
}

/// Genus-zero local invariants up to total degree `max_degree`.
pub fn gw0_invariants(model: &ModelData, basis: &FrobeniusBasis, max_degree: u32) -> Result<InstantonSeries> {
    let c = model.c_vector();
    let inst = prepotential_instanton_part(model, basis)?;
    let k = model.nmoduli();
    let mut raw = BTreeMap::new();
    let mut undetermined = Vec::new();
    for beta in monomials_up_to(k, max_degree.min(basis.order())) {
        if beta.iter().all(|&x| x == 0) {
            continue;
        }
        let cb: i64 = beta.iter().zip(&c).map(|(&b, &ci)| b as i64 * ci).sum();
        if cb == 0 {
            undetermined.push(beta);
            continue;
        }
        let v = -inst.coeff(&beta) / Q::from_integer(cb.into());
        raw.insert(beta, v);
    }
    let bps = multicover_inverse(&raw, |d| Q::from_integer((d as i64).pow(3).into()).recip());
    for (b, v) in &bps {
        if !v.is_integer() {
            return Err(Error::NonIntegral { degree: b.clone(), value: rational::to_string(v) });
        }
    }
    Ok(InstantonSeries { raw, bps, undetermined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr};
    use crate::gkz::frobenius_basis;
    use crate::registry::builtin;

    #[test]
    fn projective_plane_wronskian_route() {
        let p2 = builtin("p2").unwrap();
        let fb = frobenius_basis(&p2, 8).unwrap();
        let t = yukawa_from_wronskian(&p2, &fb).unwrap();
        assert_eq!(t.ratio_to(&yukawa_closed_forms(&p2)), Some(q(1)));
        let j = t.to_json(&p2);
        assert_eq!(j["(z,z;z)"], "-1/(3*(1+27*z))");
    }

    #[test]
    fn projective_plane_constraint() {
        let p2 = builtin("p2").unwrap();
        let cs = yukawa_constraints(&p2).unwrap();
        assert_eq!(cs.len(), 1);
        // (1+27z)θY + 27zY = 0 written as quad·Y + red·Y_{0zz}: red = −(1+27z)/3.
        assert_eq!(cs[0].quadratic[&(1, 1)], RationalFunction::parse("27*z", 1).unwrap());
        assert_eq!(cs[0].reduced_cubic[&(1, 1)], RationalFunction::parse("-(1+27*z)/3", 1).unwrap());
        let closed = yukawa_closed_forms(&p2);
        assert!(evaluate_constraint(&cs[0], &closed).is_zero());
        let (ode, dim) = yukawa_from_ode(&p2).unwrap();
        assert_eq!(dim, 1);
        assert_eq!(ode, closed);
    }

    #[test]
    fn linear_division() {
        // (θ1+θ2)·(θ1² − θ2²) / (θ1+θ2)
        let mut cubic = BTreeMap::new();
        let one = RationalFunction::one(2);
        cubic.insert(vec![3, 0], one.clone());
        cubic.insert(vec![2, 1], one.clone());
        cubic.insert(vec![1, 2], -&one);
        cubic.insert(vec![0, 3], -&one);
        let qt = divide_by_linear(&cubic, &[q(1), q(1)]).unwrap();
        assert_eq!(qt.len(), 2);
        assert_eq!(qt[&vec![2, 0]], one);
        assert_eq!(qt[&vec![0, 2]], -&one);
    }

    #[test]
    fn mirror_map_inverts() {
        let p2 = builtin("p2").unwrap();
        let fb = frobenius_basis(&p2, 6).unwrap();
        let mm = MirrorMap::new(&fb).unwrap();
        // q = z·exp(s(z)) composed with z(q) returns q.
        let z = mm.z_of_q(0);
        let back = &z * &mm.to_q(&mm.shifts[0]).exp().unwrap();
        assert_eq!(back, MultiSeries::var(1, 6, 0));
        // z = q + 6q² + 9q³ + …
        assert_eq!(z.coeff(&[2]), q(6));
        assert_eq!(z.coeff(&[3]), q(9));
    }

    #[test]
    fn projective_plane_genus_zero() {
        let p2 = builtin("p2").unwrap();
        let fb = frobenius_basis(&p2, 6).unwrap();
        let inst = gw0_invariants(&p2, &fb, 4).unwrap();
        let n: Vec<Q> = (1..=4).map(|d| inst.bps[&vec![d]].clone()).collect();
        assert_eq!(n, vec![q(3), q(-6), q(27), q(-192)]);
        assert_eq!(inst.raw[&vec![2]], qr(-45, 8));
    }

    #[test]
    fn couplings_in_flat_coordinates() {
        let p2 = builtin("p2").unwrap();
        let fb = frobenius_basis(&p2, 6).unwrap();
        let a = amodel_couplings(&p2, &fb, &yukawa_closed_forms(&p2)).unwrap();
        assert!(a.agree());
        assert_eq!(a.q_expansion[0][0].constant_term(), q(1));
    }
}

#[cfg(test)]
mod two_parameter {
    use super::*;
    use crate::arith::q;
    use crate::gkz::frobenius_basis;
    use crate::registry::builtin;

    #[test]
    fn wronskian_matches_closed_forms() {
        for name in ["f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let fb = frobenius_basis(&m, 9).unwrap();
            let t = yukawa_from_wronskian(&m, &fb).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(t.ratio_to(&yukawa_closed_forms(&m)), Some(q(1)), "{name}");
        }
    }

    #[test]
    fn constraints_cut_out_a_line() {
        for name in ["f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let closed = yukawa_closed_forms(&m);
            for c in yukawa_constraints(&m).unwrap() {
                assert!(evaluate_constraint(&c, &closed).is_zero(), "{name}");
            }
            let (t, dim) = yukawa_from_ode(&m).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(dim, 1);
            assert_eq!(t, closed, "{name}");
        }
    }

    #[test]
    fn genus_zero_local_surfaces() {
        let expect: [(&str, &[(&[u32], i64)]); 3] = [
            ("f0", &[(&[1, 0], -2), (&[0, 1], -2), (&[1, 1], -4), (&[1, 2], -6), (&[2, 2], -32)]),
            ("f1", &[(&[1, 0], -2), (&[0, 1], 1), (&[1, 1], 3), (&[2, 1], 5), (&[2, 2], -6)]),
            ("f2", &[(&[1, 0], -2), (&[1, 1], -2), (&[2, 1], -4), (&[3, 1], -6)]),
        ];
        for (name, values) in expect {
            let m = builtin(name).unwrap();
            let fb = frobenius_basis(&m, 6).unwrap();
            let inst = gw0_invariants(&m, &fb, 4).unwrap_or_else(|e| panic!("{name}: {e}"));
            for (beta, n) in values {
                assert_eq!(inst.bps[&beta.to_vec()], q(*n), "{name} {beta:?}");
            }
        }
        let f2 = builtin("f2").unwrap();
        let inst = gw0_invariants(&f2, &frobenius_basis(&f2, 4).unwrap(), 3).unwrap();
        assert!(inst.undetermined.contains(&vec![0, 1]));
    }

    #[test]
    fn flat_couplings_agree() {
        for name in ["f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let fb = frobenius_basis(&m, 5).unwrap();
            let a = amodel_couplings(&m, &fb, &yukawa_closed_forms(&m)).unwrap();
            assert!(a.agree(), "{name}");
        }
    }
}
