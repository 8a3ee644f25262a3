//! Floating-point helpers: values carried with an error bound, and rigorous
//! bounds on the dropped tails of norm-form lattice sums.

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

impl Approx {
    pub fn new(value: f64, err: f64) -> Self {
        Self { value, err: err.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn add(self, o: Self) -> Self {
        let v = self.value + o.value;
        Self::new(v, self.err + o.err + f64::EPSILON * v.abs())
    }

    pub fn mul(self, o: Self) -> Self {
        let v = self.value * o.value;
        Self::new(
            v,
            self.err * o.value.abs() + o.err * self.value.abs() + self.err * o.err + f64::EPSILON * v.abs(),
        )
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.value * k, self.err * k.abs() + f64::EPSILON * (self.value * k).abs())
    }
}

/// Upper bound on the number of points y of any translate c + Z² with
/// k ≤ N(y) < k+1.
///
/// Each |y_i| ≤ r = √(4(k+1)/3), and an interval of length 2r holds at most
/// 2r + 1 points of a translate of Z.
pub fn shell_count_bound(k: u64) -> f64 {
    let r = (4.0 * (k as f64 + 1.0) / 3.0).sqrt();
    (2.0 * r + 1.0).powi(2)
}

/// Upper bound on Σ over points n of a translate of Z² with N(n) ≥ k0 of
/// τ^(N(n)/scale) · exp(slope·(|n1|+|n2|)).
///
/// Uses |n1|+|n2| ≤ 2√(4N/3) on each shell. The per-shell bound t_k has a
/// ratio t_{k+1}/t_k that is non-increasing in k, so once it drops below 1
/// the rest is bounded by a geometric series.
pub fn norm_tail_bound(tau: f64, scale: f64, slope: f64, k0: u64) -> f64 {
    let lt = tau.ln() / scale;
    let term = |k: u64| -> f64 {
        let kf = k as f64;
        let growth = slope.max(0.0) * 2.0 * (4.0 * (kf + 1.0) / 3.0).sqrt();
        shell_count_bound(k) * (lt * kf + growth).exp()
    };
    let mut total = 0.0;
    let mut k = k0;
    loop {
        let t = term(k);
        let t1 = term(k + 1);
        total += t;
        if t1 < t && t > 0.0 {
            // Ratio bound from the smooth envelope, valid for all later shells.
            let kf = (k + 1) as f64;
            let cnt = ((2.0 * (4.0 * (kf + 2.0) / 3.0).sqrt() + 1.0) / (2.0 * (4.0 * (kf + 1.0) / 3.0).sqrt() + 1.0)).powi(2);
            let g = slope.max(0.0) * 2.0 * ((4.0 * (kf + 2.0) / 3.0).sqrt() - (4.0 * (kf + 1.0) / 3.0).sqrt());
            let rho = cnt * (lt + g).exp();
            if rho < 0.5 {
                return total + t1 / (1.0 - rho);
            }
        }
        if t == 0.0 || k > k0 + 1_000_000 {
            return total;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bound_dominates_brute_force() {
        for &(tau, scale, slope, k0) in &[(0.1, 1.0, 0.0, 9u64), (0.5, 2.0, 0.3, 4), (0.3, 1.0, 1.0, 20)] {
            let mut brute = 0.0;
            for n1 in -60i64..=60 {
                for n2 in -60i64..=60 {
                    let n = (n1 * n1 + n1 * n2 + n2 * n2) as u64;
                    if n >= k0 {
                        brute += f64::powf(tau, n as f64 / scale) * (slope * (n1.abs() + n2.abs()) as f64).exp();
                    }
                }
            }
            let b = norm_tail_bound(tau, scale, slope, k0);
            assert!(b >= brute, "bound {b} < brute {brute}");
        }
    }

    #[test]
    fn approx_propagates() {
        let a = Approx::new(1.0, 0.1).mul(Approx::new(2.0, 0.0));
        assert!((a.value - 2.0).abs() < 1e-15 && a.err >= 0.2);
    }
}
