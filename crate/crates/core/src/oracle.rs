//! Floating-point reference for the genus-zero invariants of local P², built from the
//! hypergeometric coefficients in closed form rather than from the GKZ machinery.

/// Truncated power series in one variable.
#[derive(Clone, Debug, PartialEq)]
struct Series(Vec<f64>);

impl Series {
    fn zero(n: usize) -> Self {
        Series(vec![0.0; n + 1])
    }

    fn order(&self) -> usize {
        self.0.len() - 1
    }

    fn mul(&self, other: &Series) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().take(n + 1 - i).enumerate() {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    /// `exp(f)` for `f(0) = 0`, via `g' = f' g`.
    fn exp(&self) -> Series {
        let n = self.order();
        let mut g = Series::zero(n);
        g.0[0] = 1.0;
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.0[j] * g.0[k - j];
            }
            g.0[k] = acc / k as f64;
        }
        g
    }

    /// `f(x·u(x))`.
    fn compose_scaled(&self, u: &Series) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        let mut power = Series::zero(n);
        power.0[0] = 1.0;
        for k in 0..=n {
            for (i, c) in power.0.iter().enumerate() {
                if i + k <= n {
                    out.0[i + k] += self.0[k] * c;
                }
            }
            power = power.mul(u);
        }
        out
    }
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

/// `(3n−1)!/n!³` computed as a running product to keep the magnitude in range.
fn ratio(n: u64) -> f64 {
    let mut r = 1.0;
    for j in 1..3 * n {
        r *= j as f64;
    }
    for j in 1..=n {
        let j = j as f64;
        r /= j * j * j;
    }
    r
}

/// Log coefficient `s₁` of the single-log solution: `3(−1)^n (3n−1)!/n!³`.
pub fn single_log_coefficient(n: u64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    3.0 * sign * ratio(n)
}

/// Constant coefficient `s₂` of the double-log solution.
pub fn double_log_coefficient(n: u64) -> f64 {
    2.0 * single_log_coefficient(n) * (3.0 * harmonic(3 * n - 1) - 3.0 * harmonic(n))
}

/// Genus-zero data from the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleInvariants {
    /// `N_d` for `d = 1..=max_degree`.
    pub raw: Vec<f64>,
    /// `n_d` after the multi-cover transform.
    pub bps: Vec<f64>,
}

/// `N_d` and `n_d` for local P² up to `max_degree`.
pub fn projective_plane_genus_zero(max_degree: usize) -> OracleInvariants {
    let n = max_degree;
    let mut s1 = Series::zero(n);
    let mut s2 = Series::zero(n);
    for d in 1..=n {
        s1.0[d] = single_log_coefficient(d as u64);
        s2.0[d] = double_log_coefficient(d as u64);
    }
    // z = q·u(q) with u = exp(−s₁(q u)); each pass fixes one more coefficient.
    let mut u = Series::zero(n);
    u.0[0] = 1.0;
    for _ in 0..=n {
        let mut neg = s1.compose_scaled(&u);
        neg.0.iter_mut().for_each(|c| *c = -*c);
        u = neg.exp();
    }
    // Instanton part of the prepotential: ½(s₂ − s₁²) in q.
    let sq = s1.mul(&s1);
    let mut inst = Series::zero(n);
    for d in 0..=n {
        inst.0[d] = 0.5 * (s2.0[d] - sq.0[d]);
    }
    let inst = inst.compose_scaled(&u);
    let raw: Vec<f64> = (1..=n).map(|d| -inst.0[d] / (3.0 * d as f64)).collect();
    let bps = (1..=n)
        .map(|d| {
            (1..=d)
                .filter(|k| d % k == 0)
                .map(|k| {
                    let mu = crate::arith::rational::mobius(k as u64) as f64;
                    mu * raw[d / k - 1] / (k * k * k) as f64
                })
                .sum()
        })
        .collect();
    OracleInvariants { raw, bps }
}

/// Agreement to `digits` significant digits.
pub fn agrees(a: f64, b: f64, digits: i32) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= scale * 10f64.powi(-digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        assert_eq!(single_log_coefficient(1), -6.0);
        assert_eq!(single_log_coefficient(2), 45.0);
        assert_eq!(single_log_coefficient(3), -560.0);
    }

    #[test]
    fn invariants_are_near_integers() {
        let o = projective_plane_genus_zero(4);
        let expect = [3.0, -6.0, 27.0, -192.0];
        for (got, want) in o.bps.iter().zip(expect) {
            assert!(agrees(*got, want, 10), "{got} vs {want}");
        }
    }
}
