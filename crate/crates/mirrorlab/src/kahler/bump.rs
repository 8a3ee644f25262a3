//! Bump functions built from the quintic smoothstep, and the profile of
//! thresholds used by the piecewise potential.

use super::jet::Jet;

/// S(s) = 6s⁵ − 15s⁴ + 10s³ on [0,1], constant outside. Returns (S, S′, S″).
pub fn smoothstep(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let s2 = s * s;
        (
            s2 * s * (10.0 + s * (-15.0 + 6.0 * s)),
            30.0 * s2 * (1.0 - s) * (1.0 - s),
            60.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
        )
    }
}

/// max |S′| and max |S″| on [0,1].
pub const SMOOTHSTEP_D1_MAX: f64 = 1.875;
pub const SMOOTHSTEP_D2_MAX: f64 = 5.773_502_691_896_258;

/// Thresholds of the bump profile in log_T units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub l: f64,
    pub p: f64,
    /// α₃, α₅ move while log_T d runs from d_in down to d_in − width.
    pub d_in: f64,
    pub d_width: f64,
    /// α₄ runs from 0 at log_T|θ| = theta0 to ±½ at log_T|θ| = theta1.
    pub theta0: f64,
    pub theta1: f64,
    /// α₆ runs from 1 at θ_II = theta_b to 0 at θ_II = theta_a.
    pub theta_a: f64,
    pub theta_b: f64,
}

impl BumpProfile {
    pub fn new(l: f64, p: f64) -> Self {
        Self {
            l,
            p,
            d_in: l / 4.0,
            d_width: l / p,
            theta0: 7.0 * l / 8.0 + 2.0,
            theta1: l / 2.0 - 2.0 * l / p + 0.5,
            theta_a: l / 8.0 - l / p,
            theta_b: l / 8.0 - 2.0 * l / p,
        }
    }

    /// Progress s of α₃ and α₅ from the log_T of the distance function.
    pub fn radial_s(&self, logt_d: f64) -> f64 {
        (self.d_in - logt_d) / self.d_width
    }

    pub fn alpha3(&self, s: f64) -> f64 {
        2.0 / 3.0 + smoothstep(s).0 / 3.0
    }

    pub fn alpha5(&self, s: f64) -> f64 {
        smoothstep(s).0
    }

    pub fn alpha4_s(&self, logt_abs_theta: f64) -> f64 {
        (self.theta0 - logt_abs_theta) / (self.theta0 - self.theta1)
    }

    pub fn alpha6_s(&self, theta_ii: f64) -> f64 {
        (theta_ii - self.theta_b) / (self.theta_a - self.theta_b)
    }

    /// Bounds c with |dα/dλ| ≤ c/l and |d²α/dλ²| ≤ c/l² in each bump's
    /// log-scale argument λ: (α₃, α₄, α₅, α₆).
    pub fn derivative_constants(&self) -> [f64; 4] {
        let c = |width: f64, amp: f64| {
            let k = self.l / width;
            (amp * SMOOTHSTEP_D1_MAX * k).max(amp * SMOOTHSTEP_D2_MAX * k * k)
        };
        [
            c(self.d_width, 1.0 / 3.0),
            c(self.theta0 - self.theta1, 0.5),
            c(self.d_width, 1.0),
            c(self.theta_a - self.theta_b, 1.0),
        ]
    }
}

/// α(s(λ)) where λ is a jet and s = (λ − a)/w; amplitude k and offset c0.
pub fn bump_jet(lambda: &Jet, a: f64, w: f64, k: f64, c0: f64) -> Jet {
    let s = (lambda.v - a) / w;
    let (f, d1, d2) = smoothstep(s);
    lambda.chain(c0 + k * f, k * d1 / w, k * d2 / (w * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_ends() {
        assert_eq!(smoothstep(0.0), (0.0, 0.0, 0.0));
        assert_eq!(smoothstep(1.0), (1.0, 0.0, 0.0));
        let (v, d1, _) = smoothstep(0.5);
        assert!((v - 0.5).abs() < 1e-15 && (d1 - SMOOTHSTEP_D1_MAX).abs() < 1e-15);
        let s = 0.5 - 3f64.sqrt() / 6.0;
        assert!((smoothstep(s).2.abs() - SMOOTHSTEP_D2_MAX).abs() < 1e-12);
    }

    #[test]
    fn profile_defaults() {
        let b = BumpProfile::new(40.0, 17.0);
        assert!((b.theta1 - 15.794_117_647_058_824).abs() < 1e-12);
        assert_eq!(b.theta0, 37.0);
        assert!(b.theta_a > b.theta_b && b.theta_b > 0.0);
    }
}
