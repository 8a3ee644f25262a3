//! Toric coordinate charts as monomial maps over the group generated by
//! x, y, z, v₀ and T. A chart lists its three coordinates as monomials in
//! the base coordinates (x, y, z) of the chart at vertex 0 of tile (0,0).

use crate::error::{Error, Result};

/// T^t · v₀^v0 · x^e₀ y^e₁ z^e₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub t: i64,
    pub v0: i64,
    pub e: [i64; 3],
}

impl Monomial {
    pub const fn new(t: i64, v0: i64, e: [i64; 3]) -> Self {
        Self { t, v0, e }
    }

    /// Normal form with v₀ rewritten as xyz.
    pub fn reduced(&self) -> (i64, [i64; 3]) {
        (self.t, [self.e[0] + self.v0, self.e[1] + self.v0, self.e[2] + self.v0])
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.t + o.t,
            self.v0 + o.v0,
            [self.e[0] + o.e[0], self.e[1] + o.e[1], self.e[2] + o.e[2]],
        )
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.t * k, self.v0 * k, self.e.map(|x| x * k))
    }

    /// log|m| given ln T, ln|v₀| and ln|x|, ln|y|, ln|z|.
    pub fn log_abs(&self, ln_t: f64, ln_v0: f64, ln_xyz: [f64; 3]) -> f64 {
        self.t as f64 * ln_t
            + self.v0 as f64 * ln_v0
            + (0..3).map(|i| self.e[i] as f64 * ln_xyz[i]).sum::<f64>()
    }

    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        let f = |sym: &str, k: i64| match k {
            0 => None,
            1 => Some(sym.to_string()),
            _ => Some(format!("{sym}^{k}")),
        };
        parts.extend(f("T", self.t));
        parts.extend(f("v0", self.v0));
        for (i, s) in ["x", "y", "z"].iter().enumerate() {
            parts.extend(f(s, self.e[i]));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// A monomial map: three coordinate monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonoMap(pub [Monomial; 3]);

impl MonoMap {
    pub const IDENTITY: MonoMap = MonoMap([
        Monomial::new(0, 0, [1, 0, 0]),
        Monomial::new(0, 0, [0, 1, 0]),
        Monomial::new(0, 0, [0, 0, 1]),
    ]);

    /// Substitute `inner` into this map: (self ∘ inner)(p) = self(inner(p)).
    pub fn compose(&self, inner: &MonoMap) -> MonoMap {
        MonoMap(self.0.map(|m| {
            let mut acc = Monomial::new(m.t, m.v0, [0, 0, 0]);
            for i in 0..3 {
                acc = acc.mul(&inner.0[i].pow(m.e[i]));
            }
            acc
        }))
    }

    pub fn pow(&self, k: u32) -> MonoMap {
        (0..k).fold(MonoMap::IDENTITY, |acc, _| self.compose(&acc))
    }

    /// 3×3 exponent matrix, row i = exponents of coordinate i.
    pub fn matrix(&self) -> [[i64; 3]; 3] {
        self.0.map(|m| m.e)
    }

    pub fn det(&self) -> i64 {
        let a = self.matrix();
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse monomial map; requires a unimodular exponent matrix.
    pub fn inverse(&self) -> Result<MonoMap> {
        let a = self.matrix();
        let d = self.det();
        if d.abs() != 1 {
            return Err(Error::UnknownChart(format!("exponent matrix has determinant {d}")));
        }
        let mut inv = [[0i64; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                *x = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) * d;
            }
        }
        // ln x = A⁻¹(ln x′ − t ln T − v0 ln v₀).
        let t: Vec<i64> = self.0.iter().map(|m| m.t).collect();
        let v: Vec<i64> = self.0.iter().map(|m| m.v0).collect();
        Ok(MonoMap([0, 1, 2].map(|i| {
            let row = inv[i];
            Monomial::new(
                -(0..3).map(|k| row[k] * t[k]).sum::<i64>(),
                -(0..3).map(|k| row[k] * v[k]).sum::<i64>(),
                row,
            )
        })))
    }

    /// Equality after rewriting v₀ as xyz.
    pub fn reduced_eq(&self, o: &MonoMap) -> bool {
        (0..3).all(|i| self.0[i].reduced() == o.0[i].reduced())
    }

    /// The product of the coordinates, reduced.
    pub fn coordinate_product(&self) -> (i64, [i64; 3]) {
        self.0[0].mul(&self.0[1]).mul(&self.0[2]).reduced()
    }

    /// Whether the product of the coordinates is v₀ = xyz.
    pub fn preserves_v0(&self) -> bool {
        self.coordinate_product() == (0, [1, 1, 1])
    }

    pub fn display(&self) -> String {
        format!("({}, {}, {})", self.0[0].display(), self.0[1].display(), self.0[2].display())
    }
}

/// A chart label: tile (m1, m2) and vertex index k mod 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChartLabel {
    pub m1: i64,
    pub m2: i64,
    pub k: i64,
}

impl ChartLabel {
    /// Parse "m1,m2,k".
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::UnknownChart(s.to_string());
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: Vec<i64> = parts.iter().map(|p| p.parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        if !(0..6).contains(&n[2]) {
            return Err(bad());
        }
        Ok(Self { m1: n[0], m2: n[1], k: n[2] })
    }
}

const fn mono(t: i64, v0: i64, e: [i64; 3]) -> Monomial {
    Monomial::new(t, v0, e)
}

/// Charts around the vertices of tile (0,0), k = 0..5.
pub const BASE_CHARTS: [MonoMap; 6] = [
    MonoMap::IDENTITY,
    MonoMap([mono(1, 1, [-1, 0, 0]), mono(-2, 0, [0, -1, 0]), mono(1, 1, [0, 0, -1])]),
    MonoMap([mono(0, 0, [1, 0, 0]), mono(3, 1, [0, 1, 0]), mono(-3, -1, [0, 0, 1])]),
    MonoMap([mono(-2, 0, [-1, 0, 0]), mono(-2, 0, [0, -1, 0]), mono(4, 2, [0, 0, -1])]),
    MonoMap([mono(3, 1, [1, 0, 0]), mono(0, 0, [0, 1, 0]), mono(-3, -1, [0, 0, 1])]),
    MonoMap([mono(-2, 0, [-1, 0, 0]), mono(1, 1, [0, -1, 0]), mono(1, 1, [0, 0, -1])]),
];

/// The hexagon generator g(x, y, z) = (T⁻²y⁻¹, Txy, Tyz).
pub const HEX_GENERATOR: MonoMap =
    MonoMap([mono(-2, 0, [0, -1, 0]), mono(1, 0, [1, 1, 0]), mono(1, 0, [0, 1, 1])]);

/// The map attached to −γ′: (x, y, z) ↦ (T³v₀x, y, T⁻³v₀⁻¹z).
pub const NEG_GAMMA1: MonoMap =
    MonoMap([mono(3, 1, [1, 0, 0]), mono(0, 0, [0, 1, 0]), mono(-3, -1, [0, 0, 1])]);

/// The map attached to −γ″: (x, y, z) ↦ (x, T³v₀y, T⁻³v₀⁻¹z).
pub const NEG_GAMMA2: MonoMap =
    MonoMap([mono(0, 0, [1, 0, 0]), mono(3, 1, [0, 1, 0]), mono(-3, -1, [0, 0, 1])]);

fn power(m: &MonoMap, k: i64) -> MonoMap {
    if k >= 0 {
        m.pow(k as u32)
    } else {
        m.inverse().expect("unimodular").pow((-k) as u32)
    }
}

/// The lattice action of n1γ′ + n2γ″ on base coordinates.
pub fn lattice_action(n1: i64, n2: i64) -> MonoMap {
    power(&NEG_GAMMA1, -n1).compose(&power(&NEG_GAMMA2, -n2))
}

/// Coordinates of the chart with the given label, as monomials in the base
/// coordinates: the vertex chart of tile (0,0) precomposed with the action.
pub fn chart(label: &ChartLabel) -> Result<MonoMap> {
    if !(0..6).contains(&label.k) {
        return Err(Error::UnknownChart(format!("{},{},{}", label.m1, label.m2, label.k)));
    }
    Ok(BASE_CHARTS[label.k as usize].compose(&lattice_action(label.m1, label.m2)))
}

/// Coordinates of chart b as monomials in the coordinates of chart a.
pub fn chart_transition(a: &ChartLabel, b: &ChartLabel) -> Result<MonoMap> {
    Ok(chart(b)?.compose(&chart(a)?.inverse()?))
}

/// g·g_xy − g_xy + ln|Ty|², which vanishes identically.
///
/// g_xy = ln(1+|Tx|²) + ln(1+|Ty|²) + ln(1+|T²xy|²) and g pulls back
/// (x, y) to (T⁻²y⁻¹, Txy).
pub fn harmonic_difference(t: f64, rx: f64, ry: f64) -> f64 {
    let gxy = |x: f64, y: f64| {
        (t * t * x * x).ln_1p() + (t * t * y * y).ln_1p() + (t.powi(4) * x * x * y * y).ln_1p()
    };
    let (gx, gy) = (1.0 / (t * t * ry), t * rx * ry);
    gxy(gx, gy) - gxy(rx, ry) + (t * t * ry * ry).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_order_six() {
        assert!(HEX_GENERATOR.pow(6).reduced_eq(&MonoMap::IDENTITY));
        let g3 = MonoMap([mono(-2, 0, [-1, 0, 0]), mono(-2, 0, [0, -1, 0]), mono(4, 0, [2, 2, 1])]);
        assert!(HEX_GENERATOR.pow(3).reduced_eq(&g3));
    }

    #[test]
    fn first_chart_is_permuted_generator() {
        let g = HEX_GENERATOR.0;
        let perm = MonoMap([g[2], g[0], g[1]]);
        assert!(perm.reduced_eq(&BASE_CHARTS[1]));
    }

    #[test]
    fn charts_preserve_v0() {
        for k in 0..6 {
            assert!(BASE_CHARTS[k].preserves_v0(), "chart {k}");
        }
        let a = ChartLabel { m1: 1, m2: -2, k: 3 };
        let b = ChartLabel { m1: 0, m2: 1, k: 5 };
        let tr = chart_transition(&a, &b).unwrap();
        assert!(tr.preserves_v0());
        assert_eq!(tr.det().abs(), 1);
    }

    #[test]
    fn lattice_generators_commute() {
        assert!(NEG_GAMMA1.compose(&NEG_GAMMA2).reduced_eq(&NEG_GAMMA2.compose(&NEG_GAMMA1)));
        assert!(NEG_GAMMA1.reduced_eq(&BASE_CHARTS[4]));
        assert!(NEG_GAMMA2.reduced_eq(&BASE_CHARTS[2]));
    }

    #[test]
    fn inverse_round_trip() {
        for k in 0..6 {
            let c = chart(&ChartLabel { m1: 2, m2: -1, k }).unwrap();
            let inv = c.inverse().unwrap();
            assert_eq!(c.compose(&inv), MonoMap::IDENTITY);
            assert_eq!(inv.compose(&c), MonoMap::IDENTITY);
        }
    }

    #[test]
    fn harmonic_identity() {
        assert!(harmonic_difference(0.1, 0.3, 2.0).abs() < 1e-12);
        assert!(harmonic_difference(0.1, 5.0, 10.0).abs() < 1e-12);
    }

    #[test]
    fn labels() {
        assert!(ChartLabel::parse("0,0,6").is_err());
        assert_eq!(ChartLabel::parse("1,-1,2").unwrap(), ChartLabel { m1: 1, m2: -1, k: 2 });
    }
}
