//! Two-dimensional lattice polytopes: hulls, integral points, reflexivity, duality and
//! the lattice of integer relations among the integral points.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::Q;
use crate::error::{Error, Result};

pub type Point = Vec<i64>;

/// Convex lattice polytope stored by its vertex set (counter-clockwise in the plane).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolytope {
    /// Affine dimension of the hull.
    pub dim: usize,
    pub vertices: Vec<Point>,
}

/// JSON input shape `{"dim":2,"vertices":[[1,0],[0,1],[-1,-1]]}`.
#[derive(Deserialize)]
struct PolytopeInput {
    dim: usize,
    vertices: Vec<Point>,
}

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl LatticePolytope {
    /// Convex hull of planar points; interior and edge points are dropped.
    pub fn hull(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::UnsupportedPolytope("empty point set".into()));
        }
        if points.iter().any(|p| p.len() != 2) {
            return Err(Error::UnsupportedPolytope("only planar polytopes are supported".into()));
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() == 1 {
            return Ok(LatticePolytope { dim: 0, vertices: pts });
        }
        // Andrew's monotone chain, strict turns only.
        let mut lower: Vec<Point> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Point> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() == 2 {
            return Ok(LatticePolytope { dim: 1, vertices: lower });
        }
        Ok(LatticePolytope { dim: 2, vertices: lower })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inp: PolytopeInput =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("polytope JSON: {e}")))?;
        if inp.dim != 2 {
            return Err(Error::UnsupportedPolytope(format!("dimension {} (only 2 is supported)", inp.dim)));
        }
        Self::hull(&inp.vertices)
    }

    fn contains(&self, p: &[i64]) -> bool {
        match self.dim {
            0 => self.vertices[0] == p,
            1 => {
                let (a, b) = (&self.vertices[0], &self.vertices[1]);
                cross(a, b, p) == 0
                    && (p[0] - a[0]) * (p[0] - b[0]) <= 0
                    && (p[1] - a[1]) * (p[1] - b[1]) <= 0
            }
            _ => {
                let n = self.vertices.len();
                (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p) >= 0)
            }
        }
    }

    /// Primitive inner facet normals `u` with the offsets `c` such that `⟨u,x⟩ ≥ c` on the polytope.
    pub fn facets(&self) -> Vec<(Point, i64)> {
        let n = self.vertices.len();
        if self.dim < 2 {
            return Vec::new();
        }
        (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let g = dx.gcd(&dy);
                let u = vec![-dy / g, dx / g];
                let c = u[0] * a[0] + u[1] * a[1];
                (u, c)
            })
            .collect()
    }
}

/// All lattice points, origin first (if present), then lexicographic.
pub fn integral_points(p: &LatticePolytope) -> Vec<Point> {
    let lo: Vec<i64> = (0..2).map(|k| p.vertices.iter().map(|v| v[k]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..2).map(|k| p.vertices.iter().map(|v| v[k]).max().unwrap()).collect();
    let mut out = Vec::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            let q = vec![x, y];
            if p.contains(&q) {
                out.push(q);
            }
        }
    }
    if let Some(i) = out.iter().position(|q| q == &[0, 0]) {
        let o = out.remove(i);
        out.insert(0, o);
    }
    out
}

fn origin_interior(p: &LatticePolytope) -> bool {
    p.dim == 2 && p.facets().iter().all(|(_, c)| *c < 0)
}

/// True iff every facet sits at lattice distance one from the origin.
pub fn is_reflexive(p: &LatticePolytope) -> Result<bool> {
    if !origin_interior(p) {
        return Err(Error::OriginNotInterior);
    }
    Ok(p.facets().iter().all(|(_, c)| *c == -1))
}

/// `{y : ⟨x,y⟩ ≥ −1 on P}`; its vertices are the inner facet normals.
pub fn dual_polytope(p: &LatticePolytope) -> Result<LatticePolytope> {
    if !is_reflexive(p)? {
        return Err(Error::NotReflexive);
    }
    LatticePolytope::hull(&p.facets().into_iter().map(|(u, _)| u).collect::<Vec<_>>())
}

/// The sixteen reflexive polygons up to `GL₂(ℤ)`: ten with at most six boundary points,
/// followed by the duals of the six with fewer than six.
pub fn reflexive_polygons() -> Vec<LatticePolytope> {
    const SMALL: [&[[i64; 2]]; 10] = [
        &[[1, 0], [0, 1], [-1, -1]],
        &[[1, 0], [0, 1], [-1, 0], [0, -1]],
        &[[1, 0], [0, 1], [-1, 0], [-1, -1]],
        &[[1, 0], [0, 1], [-2, -1]],
        &[[1, 0], [1, 1], [0, 1], [-1, 0], [0, -1]],
        &[[1, 0], [0, 1], [-1, 1], [-1, -1]],
        &[[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]],
        &[[-1, -1], [1, -1], [1, 0], [0, 1], [-1, 0]],
        &[[1, 0], [0, 1], [-2, -3]],
        &[[-1, -1], [1, -1], [1, 0], [-1, 1]],
    ];
    let small: Vec<LatticePolytope> = SMALL
        .iter()
        .map(|vs| LatticePolytope::hull(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).expect("nonempty"))
        .collect();
    let duals: Vec<LatticePolytope> =
        small[..6].iter().map(|p| dual_polytope(p).expect("listed polygons are reflexive")).collect();
    small.into_iter().chain(duals).collect()
}

/// `n! · volume`; twice the shoelace area in the plane.
pub fn normalized_volume(p: &LatticePolytope) -> u64 {
    if p.dim < 2 {
        return 0;
    }
    let n = p.vertices.len();
    let twice: i64 = (0..n)
        .map(|i| {
            let (a, b) = (&p.vertices[i], &p.vertices[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    twice.unsigned_abs()
}

/// Integer relations `Σ l_m (m,1) = 0` among a fixed ordering of the lattice points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationLattice {
    pub points: Vec<Point>,
    pub basis: Vec<Vec<i64>>,
}

impl RelationLattice {
    pub fn npoints(&self) -> usize {
        self.points.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Both defining identities, for every basis vector.
    pub fn is_valid(&self) -> bool {
        self.basis.iter().all(|l| relation_holds(&self.points, l))
    }
}

pub fn relation_holds(points: &[Point], l: &[i64]) -> bool {
    l.iter().sum::<i64>() == 0
        && (0..2).all(|k| points.iter().zip(l).map(|(m, c)| m[k] * c).sum::<i64>() == 0)
}

/// Row-style Hermite normal form of an integer matrix (zero rows dropped).
pub fn hermite_rows(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        // Euclid on column c among rows r.. until one nonzero entry remains.
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| a[i][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let f = a[i][c].div_euclid(a[piv][c]);
                    for j in 0..ncols {
                        let t = f * a[piv][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        if a[r][c] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let f = a[i][c].div_euclid(a[r][c]);
            if f != 0 {
                for j in 0..ncols {
                    let t = f * a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.into_iter().map(|row| row.into_iter().map(|x| x as i64).collect()).collect()
}

/// ℤ-basis of the relations among `points`, in Hermite normal form.
pub fn integer_kernel(points: &[Point]) -> Vec<Vec<i64>> {
    let l = points.len();
    // Rows (m, 1 | e_i); unimodular row operations keep the right block a change of basis.
    let rows: Vec<Vec<i64>> = points
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut r = vec![m[0], m[1], 1];
            r.extend((0..l).map(|j| i64::from(i == j)));
            r
        })
        .collect();
    let h = hermite_rows(&rows);
    let kernel: Vec<Vec<i64>> =
        h.into_iter().filter(|r| r[..3].iter().all(|&x| x == 0)).map(|r| r[3..].to_vec()).collect();
    hermite_rows(&kernel)
}

/// Relation lattice of a polytope with its points in origin-first lexicographic order.
pub fn lattice_of_relations(p: &LatticePolytope) -> RelationLattice {
    let points = integral_points(p);
    let basis = integer_kernel(&points);
    RelationLattice { points, basis }
}

/// Same lattice as `integer_kernel(points)`?
pub fn spans_kernel(points: &[Point], basis: &[Vec<i64>]) -> bool {
    basis.iter().all(|l| relation_holds(points, l)) && hermite_rows(basis) == integer_kernel(points)
}

/// Laurent polynomial `Σ a_m t^m` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPolynomial {
    pub terms: BTreeMap<Point, Q>,
}

impl LaurentPolynomial {
    pub fn new(points: &[Point], coeffs: &[Q]) -> Self {
        use num_traits::Zero;
        let terms = points
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        LaurentPolynomial { terms }
    }

    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        LatticePolytope::hull(&self.terms.keys().cloned().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[[i64; 2]]) -> LatticePolytope {
        LatticePolytope::hull(&v.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn projective_plane_points() {
        let p = poly(&[[1, 0], [0, 1], [-1, -1]]);
        assert_eq!(integral_points(&p), vec![vec![0, 0], vec![-1, -1], vec![0, 1], vec![1, 0]]);
        assert_eq!(normalized_volume(&p), 3);
        assert!(is_reflexive(&p).unwrap());
    }

    #[test]
    fn diamond_and_point() {
        let d = poly(&[[1, 0], [0, 1], [-1, 0], [0, -1]]);
        assert_eq!(integral_points(&d).len(), 5);
        assert_eq!(normalized_volume(&d), 4);
        let o = poly(&[[0, 0]]);
        assert_eq!(integral_points(&o), vec![vec![0, 0]]);
        assert_eq!(o.dim, 0);
    }

    #[test]
    fn hull_drops_edge_points() {
        let p = poly(&[[1, 0], [0, 1], [-1, 0], [-2, -1], [0, 0]]);
        assert_eq!(p.vertices.len(), 3);
        assert!(is_reflexive(&p).unwrap());
    }

    #[test]
    fn dilated_triangle_is_not_reflexive() {
        let p = poly(&[[2, 0], [0, 2], [-2, -2]]);
        assert_eq!(is_reflexive(&p), Ok(false));
        assert_eq!(dual_polytope(&p), Err(Error::NotReflexive));
    }

    #[test]
    fn origin_on_boundary() {
        let p = poly(&[[0, 0], [1, 0], [0, 1]]);
        assert_eq!(is_reflexive(&p), Err(Error::OriginNotInterior));
    }

    #[test]
    fn duals() {
        let p = poly(&[[1, 0], [0, 1], [-1, -1]]);
        let d = dual_polytope(&p).unwrap();
        assert_eq!(d, poly(&[[2, -1], [-1, 2], [-1, -1]]));
        assert_eq!(dual_polytope(&d).unwrap(), p);
        let sq = dual_polytope(&poly(&[[1, 0], [0, 1], [-1, 0], [0, -1]])).unwrap();
        assert_eq!(sq, poly(&[[1, 1], [-1, 1], [-1, -1], [1, -1]]));
    }

    #[test]
    fn relations_of_projective_plane() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![-1, -1]];
        let k = integer_kernel(&pts);
        assert_eq!(k.len(), 1);
        assert!(k[0] == vec![3, -1, -1, -1] || k[0] == vec![-3, 1, 1, 1]);
        assert!(spans_kernel(&pts, &[vec![-3, 1, 1, 1]]));
        assert!(!spans_kernel(&pts, &[vec![-6, 2, 2, 2]]));
    }

    #[test]
    fn relations_of_hirzebruch_two() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![-1, 0], vec![-2, -1]];
        assert!(spans_kernel(&pts, &[vec![-2, 1, 0, 1, 0], vec![0, 0, 1, -2, 1]]));
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[vec![2, 4], vec![1, 3]]);
        let b = hermite_rows(&[vec![1, 3], vec![3, 7]]);
        assert_eq!(a, b);
    }

    #[test]
    fn sixteen_reflexive_polygons() {
        let all = reflexive_polygons();
        assert_eq!(all.len(), 16);
        let mut boundary: Vec<usize> = all.iter().map(|p| integral_points(p).len() - 1).collect();
        boundary.sort();
        assert_eq!(boundary, vec![3, 4, 4, 4, 5, 5, 6, 6, 6, 6, 7, 7, 8, 8, 8, 9]);
        for p in &all {
            let d = dual_polytope(p).unwrap();
            assert!(is_reflexive(&d).unwrap());
            assert_eq!(&dual_polytope(&d).unwrap(), p);
            assert_eq!(normalized_volume(p) as usize, integral_points(p).len() - 1);
            assert_eq!(normalized_volume(p) + normalized_volume(&d), 12);
        }
    }
}
