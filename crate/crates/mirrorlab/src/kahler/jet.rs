//! Second-order forward-mode differentiation in three variables.

use std::ops::{Add, Mul, Neg, Sub};

/// A value with its gradient and Hessian with respect to (u_x, u_y, u_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, g: [0.0; 3], h: [[0.0; 3]; 3] }
    }

    /// The coordinate function u_i at value v.
    pub fn var(i: usize, v: f64) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// f∘self given f, f′ and f″ at self.v.
    pub fn chain(&self, f: f64, d1: f64, d2: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..3 {
            out.g[i] = d1 * self.g[i];
            for j in 0..3 {
                out.h[i][j] = d2 * self.g[i] * self.g[j] + d1 * self.h[i][j];
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    /// ln(1 + e^self), accurate for very negative arguments.
    pub fn ln_1p_exp(&self) -> Self {
        let x = self.v;
        let t = x.exp();
        let p = if x > 0.0 { 1.0 / (1.0 + (-x).exp()) } else { t / (1.0 + t) };
        let f = if x > 30.0 { x + (-x).exp().ln_1p() } else { t.ln_1p() };
        self.chain(f, p, p * (1.0 - p))
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.v *= k;
        for i in 0..3 {
            out.g[i] *= k;
            for j in 0..3 {
                out.h[i][j] *= k;
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut out = self;
        out.v += o.v;
        for i in 0..3 {
            out.g[i] += o.g[i];
            for j in 0..3 {
                out.h[i][j] += o.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + o.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..3 {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, k: f64) -> Jet {
        let mut out = self;
        out.v += k;
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, k: f64) -> Jet {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Jet::var(0, 2.0);
        let y = Jet::var(1, 3.0);
        let f = x * x * y;
        assert_eq!(f.v, 12.0);
        assert_eq!(f.g, [12.0, 4.0, 0.0]);
        assert_eq!(f.h[0][0], 6.0);
        assert_eq!(f.h[0][1], 4.0);
        assert_eq!(f.h[1][0], 4.0);
    }

    #[test]
    fn softplus_derivatives() {
        let x = Jet::var(2, -1.5);
        let f = x.ln_1p_exp();
        let e: f64 = (-1.5f64).exp();
        assert!((f.v - e.ln_1p()).abs() < 1e-15);
        assert!((f.g[2] - e / (1.0 + e)).abs() < 1e-15);
        assert!((f.h[2][2] - e / (1.0 + e).powi(2)).abs() < 1e-15);
        let big = Jet::var(0, 800.0).ln_1p_exp();
        assert!((big.v - 800.0).abs() < 1e-12 && big.g[0] == 1.0);
    }
}
