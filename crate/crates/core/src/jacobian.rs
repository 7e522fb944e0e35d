//! The graded ring `S_Δ`, the operators `𝓓_i` and `𝓓_{a_m}`, the quotient `𝓡_F` with its
//! two filtrations, and the pairing normalisation `ξ` obtained from normal forms in `𝓘₁`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::linalg::{rank, Matrix, Reducer};
use crate::arith::poly::a_names;
use crate::arith::reconstruct::interpolate_rational;
use crate::arith::{qr, Poly, RationalFunction, Q};
use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, Point};
use crate::registry::ModelData;

/// Highest degree kept when forming `𝓡_F`; the Jacobian ring vanishes from degree 3 on.
pub const WORKING_DEGREE: u32 = 3;

/// `t₀^k t^m` with `m ∈ kΔ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedMonomial {
    pub degree: u32,
    pub exponent: Point,
}

impl GradedMonomial {
    pub fn new(degree: u32, exponent: Point) -> Self {
        GradedMonomial { degree, exponent }
    }

    pub fn one(dim: usize) -> Self {
        GradedMonomial { degree: 0, exponent: vec![0; dim] }
    }

    /// Multiply by `t₀ t^p`.
    pub fn raise(&self, p: &[i64]) -> Self {
        GradedMonomial {
            degree: self.degree + 1,
            exponent: self.exponent.iter().zip(p).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        match self.degree {
            0 => {}
            1 => parts.push("t0".to_string()),
            k => parts.push(format!("t0^{k}")),
        }
        for (i, &e) in self.exponent.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{e}", i + 1)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Monomial bookkeeping for `S_Δ` over a reflexive polygon.
#[derive(Clone, Debug)]
pub struct GradedRing {
    pub points: Vec<Point>,
    facets: Vec<(Point, i64)>,
    vertices: Vec<Point>,
}

impl GradedRing {
    /// `points` lists `A(Δ)`, origin first.
    pub fn new(points: &[Point]) -> Result<Self> {
        let poly = LatticePolytope::hull(points)?;
        if poly.dim != 2 {
            return Err(Error::UnsupportedPolytope("graded ring needs a polygon".into()));
        }
        Ok(GradedRing { points: points.to_vec(), facets: poly.facets(), vertices: poly.vertices.clone() })
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn npoints(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, m: &GradedMonomial) -> bool {
        let k = m.degree as i64;
        self.facets.iter().all(|(u, c)| dot(u, &m.exponent) >= k * c)
    }

    /// Number of facets of `kΔ` through `m`: 0 in the interior, 1 on an open edge, 2 at a vertex.
    pub fn tight_facets(&self, m: &GradedMonomial) -> usize {
        let k = m.degree as i64;
        self.facets.iter().filter(|(u, c)| dot(u, &m.exponent) == k * c).count()
    }

    /// Whether `m` lies in `I^{(j)}`.
    pub fn in_ideal(&self, m: &GradedMonomial, j: usize) -> bool {
        let n = self.dim();
        if j >= n + 2 {
            return true;
        }
        if m.degree == 0 {
            return false;
        }
        j == n + 1 || self.tight_facets(m) < j
    }

    /// Monomials of degree exactly `k`, sorted.
    pub fn piece(&self, k: u32) -> Vec<GradedMonomial> {
        if k == 0 {
            return vec![GradedMonomial::one(2)];
        }
        let k64 = k as i64;
        let (mut lo, mut hi) = ([i64::MAX; 2], [i64::MIN; 2]);
        for v in &self.vertices {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i] * k64);
                hi[i] = hi[i].max(v[i] * k64);
            }
        }
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                let m = GradedMonomial::new(k, vec![x, y]);
                if self.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }

    pub fn up_to(&self, k: u32) -> Vec<GradedMonomial> {
        (0..=k).flat_map(|d| self.piece(d)).collect()
    }

    /// Basis `{1, t₀t^m (m ∈ A'), t₀, t₀²}` of `𝓡_F`, where `A'` drops the origin and the
    /// last three vertices in point order.
    pub fn quotient_basis(&self) -> Vec<GradedMonomial> {
        let removed: Vec<&Point> = self.points.iter().filter(|p| self.vertices.contains(p)).rev().take(3).collect();
        let mut out = vec![GradedMonomial::one(2)];
        for p in &self.points[1..] {
            if !removed.contains(&p) {
                out.push(GradedMonomial::new(1, p.clone()));
            }
        }
        out.push(GradedMonomial::new(1, vec![0, 0]));
        out.push(GradedMonomial::new(2, vec![0, 0]));
        out
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Element of `S_Δ[a]` with polynomial coefficients in the parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    pub nparams: usize,
    pub terms: BTreeMap<GradedMonomial, Poly>,
}

impl RingElement {
    pub fn zero(nparams: usize) -> Self {
        RingElement { nparams, terms: BTreeMap::new() }
    }

    pub fn monomial(nparams: usize, m: GradedMonomial, c: Poly) -> Self {
        let mut e = RingElement::zero(nparams);
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: GradedMonomial, c: Poly) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&m) {
            Some(cur) => &cur + &c,
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert(m, next);
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree).max().unwrap_or(0)
    }

    /// Coefficients at a numeric parameter point.
    pub fn evaluate(&self, a: &[Q]) -> BTreeMap<GradedMonomial, Q> {
        self.terms.iter().map(|(m, c)| (m.clone(), c.eval(a))).filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// `𝓓₀ = θ_{t₀} + t₀F`, `𝓓_i = θ_{t_i} + t₀θ_{t_i}F` and `𝓓_{a_m} = ∂_{a_m} + t₀t^m`
/// for `F = Σ c_p t^p` with coefficients `c_p ∈ ℚ[a]`.
#[derive(Clone, Debug)]
pub struct DOperators {
    pub points: Vec<Point>,
    pub coeffs: Vec<Poly>,
}

impl DOperators {
    /// Generic `F = Σ a_p t^p`.
    pub fn symbolic(points: &[Point]) -> Self {
        let l = points.len();
        DOperators { points: points.to_vec(), coeffs: (0..l).map(|p| Poly::var(l, p)).collect() }
    }

    /// `F` at fixed rational coefficients (parameters left unused).
    pub fn at(points: &[Point], a: &[Q]) -> Self {
        let l = points.len();
        DOperators { points: points.to_vec(), coeffs: a.iter().map(|c| Poly::constant(l, c.clone())).collect() }
    }

    pub fn nparams(&self) -> usize {
        self.points.len()
    }

    /// Apply `𝓓_i`, `i = 0..=n`.
    pub fn apply(&self, i: usize, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero(x.nparams);
        for (m, c) in &x.terms {
            let w = if i == 0 { m.degree as i64 } else { m.exponent[i - 1] };
            if w != 0 {
                out.add_term(m.clone(), c.scale(&Q::from_integer(w.into())));
            }
            for (p, a) in self.points.iter().zip(&self.coeffs) {
                let w = if i == 0 { 1 } else { p[i - 1] };
                if w != 0 {
                    out.add_term(m.raise(p), (c * a).scale(&Q::from_integer(w.into())));
                }
            }
        }
        out
    }

    /// Apply `𝓓_{a_m}` for the point with index `m`.
    pub fn apply_param(&self, m: usize, x: &RingElement) -> RingElement {
        let mut out = RingElement::zero(x.nparams);
        for (mono, c) in &x.terms {
            out.add_term(mono.clone(), c.partial(m));
            out.add_term(mono.raise(&self.points[m]), c.clone());
        }
        out
    }

    /// `[𝓓_i, 𝓓_{a_m}] x`.
    pub fn commutator(&self, i: usize, m: usize, x: &RingElement) -> RingElement {
        self.apply(i, &self.apply_param(m, x)).sub(&self.apply_param(m, &self.apply(i, x)))
    }
}

/// Check `[𝓓_i, 𝓓_{a_m}] = 0` on every monomial of degree ≤ `max_degree`, each taken with
/// coefficient 1 and with coefficient `a_m²`.
pub fn commutation_holds(ring: &GradedRing, max_degree: u32) -> bool {
    let ops = DOperators::symbolic(&ring.points);
    let l = ops.nparams();
    for mono in ring.up_to(max_degree) {
        for m in 0..l {
            for coeff in [Poly::one(l), Poly::var(l, m).pow(2)] {
                let x = RingElement::monomial(l, mono.clone(), coeff);
                for i in 0..=ring.dim() {
                    if !ops.commutator(i, m, &x).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn laurent_term(points: &[Point], a: &[Q], i: usize) -> Vec<(Point, Q)> {
    points
        .iter()
        .zip(a)
        .filter_map(|(p, c)| {
            let w = if i == 0 { Q::one() } else { Q::from_integer(p[i - 1].into()) };
            let v = c * &w;
            (!v.is_zero()).then(|| (p.clone(), v))
        })
        .collect()
}

/// `dim R_F^k` for `k = 0..=3` at a rational coefficient vector.
pub fn jacobian_dimensions(ring: &GradedRing, a: &[Q]) -> Vec<usize> {
    let gens: Vec<Vec<(Point, Q)>> = (0..=ring.dim()).map(|i| laurent_term(&ring.points, a, i)).collect();
    (0..=3u32)
        .map(|k| {
            let target = ring.piece(k);
            if k == 0 {
                return target.len();
            }
            let index: BTreeMap<&GradedMonomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows: Matrix = Vec::new();
            for x in ring.piece(k - 1) {
                for g in &gens {
                    let mut row = vec![Q::zero(); target.len()];
                    for (p, c) in g {
                        row[index[&x.raise(p)]] += c;
                    }
                    rows.push(row);
                }
            }
            target.len() - rank(&rows, target.len())
        })
        .collect()
}

/// Generic graded dimensions `(1, l−3, 1, 0)` of the Jacobian ring.
pub fn expected_dimensions(npoints: usize) -> Vec<usize> {
    vec![1, npoints - 3, 1, 0]
}

/// Graded dimensions of `R_F` at `a`, rejecting points where the rank drops.
pub fn rf_dimensions(model: &ModelData, a: &[Q]) -> Result<Vec<usize>> {
    if a.len() != model.npoints() {
        return Err(Error::Incompatible(format!("expected {} coefficients", model.npoints())));
    }
    let ring = GradedRing::new(&model.points)?;
    let dims = jacobian_dimensions(&ring, a);
    let expect = expected_dimensions(model.npoints());
    if let Some(k) = dims.iter().zip(&expect).position(|(d, e)| d != e) {
        return Err(Error::NotRegular(k));
    }
    Ok(dims)
}

/// `𝓡_F` at a rational point, truncated at [`WORKING_DEGREE`].
#[derive(Clone, Debug)]
pub struct Quotient {
    pub basis: Vec<GradedMonomial>,
    columns: Vec<GradedMonomial>,
    index: BTreeMap<GradedMonomial, usize>,
    reducer: Reducer,
}

impl Quotient {
    pub fn new(ring: &GradedRing, a: &[Q]) -> Result<Self> {
        let basis = ring.quotient_basis();
        let mut columns: Vec<GradedMonomial> =
            ring.up_to(WORKING_DEGREE).into_iter().filter(|m| !basis.contains(m)).collect();
        columns.sort_by(|x, y| y.degree.cmp(&x.degree).then(x.cmp(y)));
        columns.extend(basis.iter().cloned());
        let index: BTreeMap<GradedMonomial, usize> = columns.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let ops = DOperators::at(&ring.points, a);
        let l = ring.npoints();
        let mut reducer = Reducer::new(columns.len(), 0);
        for x in ring.up_to(WORKING_DEGREE - 1) {
            for i in 0..=ring.dim() {
                let img = ops.apply(i, &RingElement::monomial(l, x.clone(), Poly::one(l))).evaluate(a);
                let mut row = vec![Q::zero(); columns.len()];
                for (m, c) in img {
                    row[index[&m]] = c;
                }
                reducer.insert(row, Vec::new());
            }
        }
        let q = Quotient { basis, columns, index, reducer };
        if q.columns.len() - q.reducer.rank() != q.basis.len() {
            return Err(Error::RankDeficient(format!(
                "quotient has dimension {} instead of {}",
                q.columns.len() - q.reducer.rank(),
                q.basis.len()
            )));
        }
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates on the basis of the class of `x`.
    pub fn reduce(&self, x: &BTreeMap<GradedMonomial, Q>) -> Result<Vec<Q>> {
        let mut v = vec![Q::zero(); self.columns.len()];
        for (m, c) in x {
            let i = self.index.get(m).ok_or_else(|| Error::Incompatible(format!("{} above working degree", m.label())))?;
            v[*i] += c;
        }
        self.reducer.reduce(&mut v, &mut []);
        let nb = self.columns.len() - self.basis.len();
        if v[..nb].iter().any(|c| !c.is_zero()) {
            return Err(Error::RankDeficient("basis monomials do not span the quotient".into()));
        }
        Ok(v[nb..].to_vec())
    }

    pub fn reduce_monomial(&self, m: &GradedMonomial) -> Result<Vec<Q>> {
        self.reduce(&BTreeMap::from([(m.clone(), Q::one())]))
    }

    /// Dimension of the image of a set of monomials.
    pub fn span_dimension(&self, monos: &[GradedMonomial]) -> Result<usize> {
        let rows: Matrix = monos.iter().map(|m| self.reduce_monomial(m)).collect::<Result<_>>()?;
        Ok(rank(&rows, self.dim()))
    }

    /// Positions of `t₀` and `t₀²` in the basis.
    fn i1_slots(&self) -> (usize, usize) {
        let n = self.basis.len();
        (n - 2, n - 1)
    }

    /// `(c_{t₀}, c_{t₀²})` for an element of `𝓘₁`, or an error if it leaves `𝓘₁`.
    pub fn i1_coordinates(&self, m: &GradedMonomial) -> Result<(Q, Q)> {
        let v = self.reduce_monomial(m)?;
        let (a, b) = self.i1_slots();
        if v[..a].iter().any(|c| !c.is_zero()) {
            return Err(Error::RankDeficient(format!("{} does not reduce into the t0, t0^2 span", m.label())));
        }
        Ok((v[a].clone(), v[b].clone()))
    }
}

/// Dimensions of the `𝓘`- and `𝓔`-filtrations and the Hodge/weight tables they induce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationTables {
    /// `dim 𝓘_j`, `j = 0..=4`.
    pub weight_chain: Vec<usize>,
    /// `dim 𝓔^{-k}`, `k = 0..=2`.
    pub hodge_chain: Vec<usize>,
    /// `dim Gr^W_w H³(Z°)` for `w = 3..=6`.
    pub threefold_weights: BTreeMap<u32, usize>,
    /// `dim Gr^W_w H²(𝕋², C°)` for `w = 1..=4`.
    pub relative_weights: BTreeMap<u32, usize>,
    /// `h^{p,q}(Z)`, indexed `[q][p]`.
    pub hodge_numbers: [[usize; 4]; 4],
}

impl FiltrationTables {
    pub fn to_json(&self) -> Value {
        let w = |m: &BTreeMap<u32, usize>| -> Value { m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect() };
        json!({
            "I": self.weight_chain,
            "E": self.hodge_chain,
            "weights_H3": w(&self.threefold_weights),
            "weights_H2": w(&self.relative_weights),
            "hodge_numbers": self.hodge_numbers,
        })
    }
}

/// Seeded random point with small coefficients at which `F` is regular.
pub fn random_regular_point(model: &ModelData, rng: &mut ChaCha8Rng) -> Vec<Q> {
    loop {
        let a: Vec<Q> = (0..model.npoints())
            .map(|_| {
                let mut n = rng.gen_range(-9i64..=9);
                if n == 0 {
                    n = 1;
                }
                qr(n, rng.gen_range(1i64..=5))
            })
            .collect();
        if model.is_regular(&a).unwrap_or(false) {
            return a;
        }
    }
}

pub fn filtration_tables(model: &ModelData) -> Result<FiltrationTables> {
    let ring = GradedRing::new(&model.points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_regular_point(model, &mut rng);
    let quot = Quotient::new(&ring, &a)?;
    let all = ring.up_to(WORKING_DEGREE);
    let weight_chain = (0..=4)
        .map(|j| {
            let monos: Vec<GradedMonomial> = all.iter().filter(|m| ring.in_ideal(m, j)).cloned().collect();
            quot.span_dimension(&monos)
        })
        .collect::<Result<Vec<_>>>()?;
    let hodge_chain = (0..=2u32)
        .map(|k| {
            let monos: Vec<GradedMonomial> = all.iter().filter(|m| m.degree <= k).cloned().collect();
            quot.span_dimension(&monos)
        })
        .collect::<Result<Vec<_>>>()?;
    let (i1, i3, total) = (weight_chain[1], weight_chain[3], weight_chain[4]);
    let threefold_weights = BTreeMap::from([(3, i1), (4, i3 - i1), (5, 0), (6, total - i3)]);
    let relative_weights = BTreeMap::from([(1, i1), (2, i3 - i1), (3, 0), (4, total - i3)]);
    let l = model.npoints();
    let mut hodge_numbers = [[0usize; 4]; 4];
    hodge_numbers[0][0] = 1;
    hodge_numbers[3][3] = 1;
    hodge_numbers[1][1] = l - 1;
    hodge_numbers[2][2] = l - 1;
    hodge_numbers[1][2] = 1;
    hodge_numbers[2][1] = 1;
    Ok(FiltrationTables { weight_chain, hodge_chain, threefold_weights, relative_weights, hodge_numbers })
}

/// `𝓓_{a_m}` (multiplication by `t₀t^m` at fixed `a`) maps each `𝓘_j` into itself and
/// `𝓔^{-k}` into `𝓔^{-k-1}`, checked by membership after reduction.
pub fn transversality_holds(model: &ModelData) -> Result<bool> {
    let ring = GradedRing::new(&model.points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = random_regular_point(model, &mut rng);
    let quot = Quotient::new(&ring, &a)?;
    let all = ring.up_to(WORKING_DEGREE);
    let contains = |span: &[GradedMonomial], images: &[GradedMonomial]| -> Result<bool> {
        let base = quot.span_dimension(span)?;
        let mut joined = span.to_vec();
        joined.extend(images.iter().cloned());
        Ok(quot.span_dimension(&joined)? == base)
    };
    for j in 1..=4 {
        let ideal: Vec<GradedMonomial> = all.iter().filter(|m| ring.in_ideal(m, j)).cloned().collect();
        let images: Vec<GradedMonomial> = ideal
            .iter()
            .filter(|x| x.degree < WORKING_DEGREE)
            .flat_map(|x| ring.points.iter().map(move |p| x.raise(p)))
            .collect();
        if !contains(&ideal, &images)? {
            return Ok(false);
        }
    }
    for k in 0..2u32 {
        let level: Vec<GradedMonomial> = all.iter().filter(|m| m.degree <= k).cloned().collect();
        let next: Vec<GradedMonomial> = all.iter().filter(|m| m.degree <= k + 1).cloned().collect();
        let images: Vec<GradedMonomial> = level.iter().flat_map(|x| ring.points.iter().map(move |p| x.raise(p))).collect();
        if !contains(&next, &images)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `t₀²t^m ≡ α_m t₀ + β_m t₀²` and `t₀³ ≡ γ t₀ + δ t₀²` in `𝓘₁`, as functions of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormData {
    pub alpha: Vec<RationalFunction>,
    pub beta: Vec<RationalFunction>,
    pub gamma: RationalFunction,
    pub delta: RationalFunction,
}

/// Normal-form coefficients at one rational point.
pub fn normal_form_at(ring: &GradedRing, a: &[Q]) -> Result<(Vec<Q>, Vec<Q>, Q, Q)> {
    let quot = Quotient::new(ring, a)?;
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for p in &ring.points {
        let (x, y) = quot.i1_coordinates(&GradedMonomial::new(2, p.clone()))?;
        alpha.push(x);
        beta.push(y);
    }
    let (g, d) = quot.i1_coordinates(&GradedMonomial::new(3, vec![0, 0]))?;
    Ok((alpha, beta, g, d))
}

/// A slice `a = a(z)` through the torus orbits: `a_0 = 1`, all coefficients 1 except
/// those at `free`, where `a_free = z^{exponents}` with an integral inverse.
#[derive(Clone, Debug)]
struct Slice {
    free: Vec<usize>,
    exponents: Vec<Vec<i64>>,
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det_i64(&minor)
            })
            .sum(),
    }
}

fn adjugate_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let d = det_i64(m);
    if d.abs() != 1 {
        return None;
    }
    if n == 1 {
        return Some(vec![vec![d]]);
    }
    let mut inv = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, x)| *x).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = s * det_i64(&minor) * d;
        }
    }
    Some(inv)
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

impl Slice {
    fn find(model: &ModelData) -> Result<Slice> {
        let k = model.nmoduli();
        let mut cands = Vec::new();
        subsets(model.npoints(), k, 1, &mut Vec::new(), &mut cands);
        for free in cands {
            // z_i = Π_r a_{free_r}^{M_ir}
            let m: Vec<Vec<i64>> = model.relations.iter().map(|l| free.iter().map(|&f| l[f]).collect()).collect();
            if let Some(inv) = adjugate_inverse(&m) {
                return Ok(Slice { free, exponents: inv });
            }
        }
        Err(Error::RankDeficient("no unimodular slice through the torus orbits".into()))
    }

    fn point(&self, npoints: usize, z: &[Q]) -> Vec<Q> {
        let mut a = vec![Q::one(); npoints];
        for (r, &f) in self.free.iter().enumerate() {
            let mut v = Q::one();
            for (zi, &e) in z.iter().zip(&self.exponents[r]) {
                v *= pow_signed(zi, e);
            }
            a[f] = v;
        }
        a
    }
}

fn pow_signed(x: &Q, e: i64) -> Q {
    let mut v = Q::one();
    for _ in 0..e.unsigned_abs() {
        v *= x;
    }
    if e < 0 {
        v.recip()
    } else {
        v
    }
}

/// `z_i(a)` as rational functions of the coefficients.
pub fn z_in_a(model: &ModelData) -> Vec<RationalFunction> {
    let l = model.npoints();
    model
        .relations
        .iter()
        .map(|rel| {
            let num: Vec<u32> = rel.iter().map(|&e| e.max(0) as u32).collect();
            let den: Vec<u32> = rel.iter().map(|&e| (-e).max(0) as u32).collect();
            RationalFunction::new(Poly::monomial(l, num, Q::one()), Poly::monomial(l, den, Q::one()))
        })
        .collect()
}

fn scrambled_z(i: usize, k: usize) -> Vec<Q> {
    let i = i as i64;
    let mut z = vec![qr((i * 37 + 5) % 23 - 11, 7 + (i % 5) * 13)];
    if k > 1 {
        z.push(qr((i * i * 13 + 3) % 29 - 14, 3 + (i % 7) * 11));
    }
    for j in 2..k {
        z.push(qr((i * (j as i64 + 5) * 17 + 1) % 31 - 15, 5 + i % 9));
    }
    z
}

/// Interpolation bound on total degree in `z`.
const NORMAL_FORM_DEGREE: u32 = 8;

/// Reconstruct the normal-form coefficients. The invariants `a_mα_m`, `a_mβ_m/a_0`, `a_0²γ`
/// and `a_0δ` depend on `z` alone; they are interpolated on a slice and lifted back to `a`,
/// then compared with direct reductions at three generic points.
pub fn normal_form(model: &ModelData) -> Result<NormalFormData> {
    let ring = GradedRing::new(&model.points)?;
    let l = model.npoints();
    let k = model.nmoduli();
    let slice = Slice::find(model)?;
    let nfun = 2 * l + 2;
    let mut cache: Vec<Option<(Vec<Q>, Vec<Q>)>> = Vec::new();
    let mut sample = |i: usize| -> Option<(Vec<Q>, Vec<Q>)> {
        while cache.len() <= i {
            let idx = cache.len();
            let z = scrambled_z(idx, k);
            let a = slice.point(l, &z);
            let entry = if z.iter().any(|x| x.is_zero()) || !model.is_regular(&a).unwrap_or(false) {
                None
            } else {
                normal_form_at(&ring, &a).ok().map(|(al, be, g, d)| {
                    let mut v: Vec<Q> = al.iter().zip(&a).map(|(x, am)| x * am).collect();
                    v.extend(be.iter().zip(&a).map(|(x, am)| x * am / &a[0]));
                    v.push(&g * &a[0] * &a[0]);
                    v.push(&d * &a[0]);
                    (z, v)
                })
            };
            cache.push(entry);
        }
        cache[i].clone()
    };
    let mut invariants = Vec::with_capacity(nfun);
    for f in 0..nfun {
        let r = interpolate_rational(k, NORMAL_FORM_DEGREE, 3, |i| sample(i).map(|(z, v)| (z, v[f].clone())))?;
        invariants.push(r);
    }
    let zs = z_in_a(model);
    let var = |i: usize| RationalFunction::var(l, i);
    let lift = |r: &RationalFunction| r.compose(&zs);
    let alpha: Vec<RationalFunction> = (0..l).map(|m| &lift(&invariants[m]) / &var(m)).collect();
    let beta: Vec<RationalFunction> = (0..l).map(|m| &(&lift(&invariants[l + m]) * &var(0)) / &var(m)).collect();
    let gamma = &lift(&invariants[2 * l]) / &var(0).pow(2);
    let delta = &lift(&invariants[2 * l + 1]) / &var(0);
    let nf = NormalFormData { alpha, beta, gamma, delta };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let a = random_regular_point(model, &mut rng);
        let (al, be, g, d) = normal_form_at(&ring, &a)?;
        let ok = (0..l).all(|m| nf.alpha[m].eval(&a).as_ref() == Some(&al[m]) && nf.beta[m].eval(&a).as_ref() == Some(&be[m]))
            && nf.gamma.eval(&a) == Some(g)
            && nf.delta.eval(&a) == Some(d);
        if !ok {
            return Err(Error::InterpolationDegreeExceeded(NORMAL_FORM_DEGREE));
        }
    }
    Ok(nf)
}

impl NormalFormData {
    pub fn nparams(&self) -> usize {
        self.gamma.nvars()
    }

    /// `2α_m + δβ_m + ∂_{a_0}β_m`, the logarithmic derivative of `ξ` along `a_m`. The sign
    /// follows from reducing `𝓓_{a_m}t₀² = 𝓓_{a₀}(t₀²t^m)` and asking that
    /// `⟨t₀, t₀²⟩` be flat; with it the discriminant appears in the denominator of `ξ`.
    pub fn log_derivative(&self, m: usize) -> RationalFunction {
        let two = Q::from_integer(2.into());
        &(&self.alpha[m].scale(&two) + &(&self.delta * &self.beta[m])) + &self.beta[m].partial(0)
    }

    /// `∂_{a_n} g_m = ∂_{a_m} g_n` for every pair.
    pub fn is_closed(&self) -> bool {
        let l = self.nparams();
        let g: Vec<RationalFunction> = (0..l).map(|m| self.log_derivative(m)).collect();
        (0..l).all(|m| (m + 1..l).all(|n| g[m].partial(n) == g[n].partial(m)))
    }
}

/// `ξ = N / L^k` with `L` the common denominator of the log-derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingNormalization {
    /// Normalised so that `a₀³ξ → 1` at the large-radius point when that limit exists.
    pub xi: RationalFunction,
    pub denominator: Poly,
    pub power: u32,
}

impl PairingNormalization {
    /// `⟨x, y⟩ = (−x₁y₂ + x₂y₁)·ξ` on `𝓘₁` coordinates `(c_{t₀}, c_{t₀²})`.
    pub fn pairing(&self, x: (&RationalFunction, &RationalFunction), y: (&RationalFunction, &RationalFunction)) -> RationalFunction {
        &(&(x.1 * y.0) - &(x.0 * y.1)) * &self.xi
    }
}

/// Exponent vectors of total degree `d` in `n` variables.
fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .flat_map(|first| {
            exponents_of_degree(n - 1, d - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn torus_weight(points: &[Point], e: &[u32]) -> Vec<i64> {
    let mut w = vec![0i64; 2];
    for (p, &k) in points.iter().zip(e) {
        w[0] += p[0] * k as i64;
        w[1] += p[1] * k as i64;
    }
    w
}

/// Solve `∂_{a_m} ξ = g_m ξ` with `ξ = N/L^k`, `N` an unknown polynomial of total degree
/// `k·deg L − 3` and the torus weight of `L^k`, for the smallest `k ≤ 3` that admits one.
pub fn xi_normalization(model: &ModelData, nf: &NormalFormData) -> Result<PairingNormalization> {
    if !nf.is_closed() {
        return Err(Error::NonIntegrable("mixed partials of the log-derivatives differ".into()));
    }
    let l = nf.nparams();
    let g: Vec<RationalFunction> = (0..l).map(|m| nf.log_derivative(m)).collect();
    let mut lcm = Poly::one(l);
    for gm in &g {
        let d = crate::arith::poly::gcd(&lcm, gm.den());
        lcm = &lcm * &gm.den().div_exact(&d).expect("gcd divides");
    }
    for k in 1..=3u32 {
        let den = lcm.pow(k);
        let total = den.terms().keys().next().map(|e| e.iter().sum::<u32>()).unwrap_or(0);
        if total < 3 {
            continue;
        }
        let weight = torus_weight(&model.points, den.terms().keys().next().expect("nonzero"));
        let unknowns: Vec<Vec<u32>> = exponents_of_degree(l, total - 3)
            .into_iter()
            .filter(|e| torus_weight(&model.points, e) == weight)
            .collect();
        // ∂_m N·D − N·h_m = 0 with h_m = g_m D + ∂_m D.
        let mut rows: BTreeMap<(usize, Vec<u32>), Vec<Q>> = BTreeMap::new();
        for m in 0..l {
            let h = &(&g[m] * &RationalFunction::from_poly(den.clone())) + &RationalFunction::from_poly(den.partial(m));
            if !h.is_polynomial() {
                return Err(Error::NonIntegrable("log-derivative has poles outside its denominator".into()));
            }
            for (col, e) in unknowns.iter().enumerate() {
                let mono = Poly::monomial(l, e.clone(), Q::one());
                let contribution = &(&mono.partial(m) * &den) - &(&mono * h.num());
                for (te, c) in contribution.terms() {
                    rows.entry((m, te.clone())).or_insert_with(|| vec![Q::zero(); unknowns.len()])[col] += c;
                }
            }
        }
        let matrix: Matrix = rows.into_values().collect();
        let ns = crate::arith::linalg::nullspace(&matrix, unknowns.len());
        match ns.len() {
            0 => continue,
            1 => {
                let mut num = Poly::zero(l);
                for (e, c) in unknowns.iter().zip(&ns[0]) {
                    num.add_term(e.clone(), c.clone());
                }
                let mut xi = RationalFunction::new(num, den.clone());
                if let Some(c) = large_radius_value(model, &xi) {
                    if !c.is_zero() {
                        xi = xi.scale(&c.recip());
                    }
                }
                return Ok(PairingNormalization { xi, denominator: den, power: k });
            }
            n => return Err(Error::Underdetermined(n)),
        }
    }
    Err(Error::NonIntegrable("no solution of the form N/L^k".into()))
}

/// `a₀³ξ` restricted to the slice and evaluated at `z = 0`.
fn large_radius_value(model: &ModelData, xi: &RationalFunction) -> Option<Q> {
    let slice = Slice::find(model).ok()?;
    let k = model.nmoduli();
    let l = model.npoints();
    let mut subs = vec![RationalFunction::one(k); l];
    for (r, &f) in slice.free.iter().enumerate() {
        let num: Vec<u32> = slice.exponents[r].iter().map(|&e| e.max(0) as u32).collect();
        let den: Vec<u32> = slice.exponents[r].iter().map(|&e| (-e).max(0) as u32).collect();
        subs[f] = RationalFunction::new(Poly::monomial(k, num, Q::one()), Poly::monomial(k, den, Q::one()));
    }
    xi.compose(&subs).eval(&vec![Q::zero(); k])
}

/// `(𝓓_{a₀}𝓓_{a₀}1, 𝓓_{a₀}1)`: `t₀²` paired with `t₀`, which is `ξ` itself.
pub fn algebraic_yukawa(pn: &PairingNormalization) -> RationalFunction {
    let l = pn.xi.nvars();
    let (zero, one) = (RationalFunction::zero(l), RationalFunction::one(l));
    // t₀² has coordinates (0, 1), t₀ has (1, 0).
    pn.pairing((&zero, &one), (&one, &zero))
}

/// The constant `c` with `a_0³·(algebraic coupling) = c·Y_{00;0}(z(a))`, if it exists.
pub fn compare_with_transcendental(model: &ModelData, algebraic: &RationalFunction) -> Option<Q> {
    let l = model.npoints();
    let y00 = model.yukawa_table()[&(0, 0)].compose(&z_in_a(model));
    let lhs = algebraic * &RationalFunction::var(l, 0).pow(3);
    lhs.constant_ratio(&y00)
}

/// Everything the algebraic side produces for one model.
#[derive(Clone, Debug)]
pub struct AlgebraicRoute {
    pub normal_form: NormalFormData,
    pub normalization: PairingNormalization,
    pub yukawa: RationalFunction,
    pub constant: Option<Q>,
}

pub fn algebraic_route(model: &ModelData) -> Result<AlgebraicRoute> {
    let normal_form = normal_form(model)?;
    let normalization = xi_normalization(model, &normal_form)?;
    let yukawa = algebraic_yukawa(&normalization);
    let constant = compare_with_transcendental(model, &yukawa);
    Ok(AlgebraicRoute { normal_form, normalization, yukawa, constant })
}

pub fn format_in_a(r: &RationalFunction) -> String {
    r.format_with(&a_names(r.nvars()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::registry::builtin;

    fn ring(name: &str) -> (ModelData, GradedRing) {
        let m = builtin(name).unwrap();
        let r = GradedRing::new(&m.points).unwrap();
        (m, r)
    }

    #[test]
    fn pieces() {
        let (_, r) = ring("p2");
        let sizes: Vec<usize> = (0..4).map(|k| r.piece(k).len()).collect();
        assert_eq!(sizes, vec![1, 4, 10, 19]);
        let b = r.quotient_basis();
        assert_eq!(b.iter().map(|m| m.label()).collect::<Vec<_>>(), vec!["1", "t0", "t0^2"]);
        let (_, r) = ring("f0");
        assert_eq!(r.quotient_basis().iter().map(|m| m.label()).collect::<Vec<_>>(), vec!["1", "t0*t1", "t0", "t0^2"]);
    }

    #[test]
    fn operator_actions() {
        let (m, r) = ring("p2");
        let ops = DOperators::symbolic(&m.points);
        let l = 4;
        let one = RingElement::monomial(l, GradedMonomial::one(2), Poly::one(l));
        // 𝓓₀(1) = t₀F
        let d0 = ops.apply(0, &one);
        assert_eq!(d0.terms.len(), 4);
        assert_eq!(d0.terms[&GradedMonomial::new(1, vec![1, 0])], Poly::var(l, 1));
        // 𝓓₀(t₀) = t₀ + t₀²F
        let t0 = RingElement::monomial(l, GradedMonomial::new(1, vec![0, 0]), Poly::one(l));
        let d = ops.apply(0, &t0);
        assert_eq!(d.terms[&GradedMonomial::new(1, vec![0, 0])], Poly::one(l));
        assert_eq!(d.terms[&GradedMonomial::new(2, vec![-1, -1])], Poly::var(l, 3));
        assert!(commutation_holds(&r, 3));
    }

    #[test]
    fn jacobian_ring_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for name in ["p2", "f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let a = random_regular_point(&m, &mut rng);
            assert_eq!(rf_dimensions(&m, &a).unwrap(), expected_dimensions(m.npoints()), "{name}");
        }
        let p2 = builtin("p2").unwrap();
        assert!(matches!(rf_dimensions(&p2, &[q(-3), q(1), q(1), q(1)]), Err(Error::NotRegular(_))));
    }

    #[test]
    fn filtrations() {
        let expect_i2 = [("p2", 2usize), ("f0", 2), ("f1", 2), ("f2", 3)];
        for (name, i2) in expect_i2 {
            let m = builtin(name).unwrap();
            let l = m.npoints();
            let t = filtration_tables(&m).unwrap();
            assert_eq!(t.weight_chain, vec![0, 2, i2, l - 2, l - 1], "{name}");
            assert_eq!(t.hodge_chain, vec![1, l - 2, l - 1], "{name}");
            assert_eq!(t.threefold_weights.values().cloned().collect::<Vec<_>>(), vec![2, l - 4, 0, 1]);
            assert!(transversality_holds(&m).unwrap(), "{name}");
        }
    }

    #[test]
    fn normal_form_basics() {
        let (m, r) = ring("p2");
        let (al, be, _, _) = normal_form_at(&r, &[q(2), q(1), q(3), q(-1)]).unwrap();
        assert_eq!((al[0].clone(), be[0].clone()), (q(0), q(1)));
        let nf = normal_form(&m).unwrap();
        assert!(nf.is_closed());
    }

    #[test]
    fn projective_plane_xi() {
        let m = builtin("p2").unwrap();
        let route = algebraic_route(&m).unwrap();
        let expect = RationalFunction::parse_with("1/(27*a1*a2*a3+a0^3)", &a_names(4)).unwrap();
        assert_eq!(route.normalization.xi, expect);
        assert_eq!(route.yukawa, expect);
        for m in 0..4 {
            let lhs = route.normalization.xi.partial(m);
            assert_eq!(lhs, &route.normal_form.log_derivative(m) * &route.normalization.xi);
        }
        assert_eq!(route.constant, Some(qr(1, 9)));
    }

    #[test]
    fn two_parameter_xi() {
        for name in ["f0", "f1", "f2"] {
            let m = builtin(name).unwrap();
            let route = algebraic_route(&m).unwrap();
            assert!(route.constant.is_some(), "{name}: {}", format_in_a(&route.yukawa));
        }
        // The F0 denominator is the discriminant in homogeneous form.
        let f0 = builtin("f0").unwrap();
        let xi = algebraic_route(&f0).unwrap().normalization.xi;
        let disc = RationalFunction::parse_with(
            "a0^4-8*a0^2*a1*a3-8*a0^2*a2*a4+16*a1^2*a3^2-32*a1*a2*a3*a4+16*a2^2*a4^2",
            &a_names(5),
        )
        .unwrap();
        assert!((&xi * &disc).is_polynomial());
    }
}
