//! The piecewise Kähler potential on the fiber |xyz| = T^l, its polar
//! metric, moment coordinates, parallel transport and monodromy.
//!
//! Derivatives are taken in u = ln r with forward-mode jets. The metric
//! matrix is H_ij/(r_i r_j) for the u-Hessian H, which is the polar form
//! with diagonal ∂²_r F + (1/r)∂_r F and off-diagonal ∂²_{r_i r_j} F.

pub mod bump;
pub mod eigen;
pub mod jet;
pub mod region;
pub mod sampling;

use crate::charts::harmonic_difference;
use crate::error::{Error, Result};
use crate::lattice::RationalVector2;
use crate::tropical::{tile_of, TileOf};

pub use bump::BumpProfile;
pub use eigen::{cholesky_pd, jacobi_eigen, jacobi_eigenvalues, Mat3};
pub use jet::Jet;
pub use region::Region;

/// Frozen base coefficient: c_base = 2^C_BASE_LOG2 · T^(−2l).
///
/// The smallest power of two for which all 7500 samples of seed 7 at
/// T = 0.1, l = 40, p = 17 are positive definite (`calibrate_c_base`).
pub const C_BASE_LOG2: i32 = -210;

/// A point (r_x, r_y, r_z) with the parameters of the construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
    pub t: f64,
    pub l: u32,
    pub p: u32,
}

impl FiberPoint {
    pub fn new(rx: f64, ry: f64, rz: f64, t: f64, l: u32, p: u32) -> Self {
        Self { rx, ry, rz, t, l, p }
    }

    /// From L_i = log_T r_i.
    pub fn from_logs(lv: [f64; 3], t: f64, l: u32, p: u32) -> Self {
        Self::new(t.powf(lv[0]), t.powf(lv[1]), t.powf(lv[2]), t, l, p)
    }

    pub fn ln_t(&self) -> f64 {
        self.t.ln()
    }

    pub fn u(&self) -> [f64; 3] {
        [self.rx.ln(), self.ry.ln(), self.rz.ln()]
    }

    pub fn logs(&self) -> [f64; 3] {
        self.u().map(|x| x / self.ln_t())
    }

    pub fn r(&self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }

    pub fn with_u(&self, u: [f64; 3]) -> Self {
        Self { rx: u[0].exp(), ry: u[1].exp(), rz: u[2].exp(), ..*self }
    }

    pub fn profile(&self) -> BumpProfile {
        BumpProfile::new(self.l as f64, self.p as f64)
    }

    /// Whether r_x r_y r_z = T^l to relative 1e−12.
    pub fn on_fiber(&self) -> bool {
        let lhs: f64 = self.u().iter().sum();
        (lhs - self.l as f64 * self.ln_t()).abs() <= 1e-12 * (self.l as f64 * self.ln_t()).abs()
    }
}

/// c_base for the given parameters from a power of two.
pub fn c_base_from_log2(j: i32, t: f64, l: u32) -> f64 {
    (j as f64 * std::f64::consts::LN_2 - 2.0 * l as f64 * t.ln()).exp()
}

pub fn c_base_default(t: f64, l: u32) -> f64 {
    c_base_from_log2(C_BASE_LOG2, t, l)
}

/// (φ_x, φ_y, φ_z) with φ_x = log_T((1+|Tx|²)/(1+|T²yz|²)) and cyclic.
pub fn phi_xyz(q: &FiberPoint) -> [f64; 3] {
    let u = q.u().map(Jet::constant);
    let bl = region::Blocks::new(&u, q.ln_t(), 0);
    [0, 1, 2].map(|i| bl.psi(i).v / q.ln_t())
}

pub fn region_classify(q: &FiberPoint) -> Region {
    region::classify(q.logs(), q.ln_t(), &q.profile()).0
}

/// F as a jet in u at u (no base term).
pub fn potential_jet(q: &FiberPoint, u: [f64; 3]) -> Jet {
    let b = q.profile();
    let lt = q.ln_t();
    let lv = u.map(|x| x / lt);
    let (_, k, f) = region::classify(lv, lt, &b);
    let uj = [Jet::var(0, u[0]), Jet::var(1, u[1]), Jet::var(2, u[2])];
    region::eval_formula(&uj, lt, k, f, &b)
}

/// F plus the base term c_base·|xyz|², as a jet.
pub fn total_jet(q: &FiberPoint, u: [f64; 3], c_base: f64) -> Jet {
    let f = potential_jet(q, u);
    if c_base == 0.0 {
        return f;
    }
    let s = Jet::var(0, u[0]) + Jet::var(1, u[1]) + Jet::var(2, u[2]);
    // c·e^{2Σu} computed as e^{2Σu + ln c} to stay in range.
    f + (s * 2.0 + c_base.ln()).exp()
}

pub fn kahler_f(q: &FiberPoint) -> f64 {
    potential_jet(q, q.u()).v
}

/// Evaluate the formula belonging to `region` at q, whatever q's own label.
/// Used to compare neighbouring formulas on their common boundary.
pub fn kahler_f_as(q: &FiberPoint, region: Region) -> Option<f64> {
    use region::{Formula, Sub};
    let b = q.profile();
    let lt = q.ln_t();
    let (k, f) = match region {
        Region::VII => (0, Formula::Seven),
        Region::Gxy => (0, Formula::Chart(0, 1)),
        Region::Gxz => (0, Formula::Chart(0, 2)),
        Region::Gyz => (1, Formula::Chart(0, 1)),
        Region::I => (0, Formula::SectorI),
        Region::III => (1, Formula::SectorI),
        Region::V => (2, Formula::SectorI),
        Region::AxisX => (0, Formula::Axis),
        Region::AxisY => (1, Formula::Axis),
        Region::AxisZ => (2, Formula::Axis),
        Region::IIA => (0, Formula::SectorII(Sub::A)),
        Region::IIB => (0, Formula::SectorII(Sub::B)),
        Region::IIC => (0, Formula::SectorII(Sub::C)),
        Region::IV | Region::VI => {
            let k = if region == Region::IV { 1 } else { 2 };
            let u = q.u().map(Jet::constant);
            let bl = region::Blocks::new(&u, lt, k);
            (k, Formula::SectorII(region::sub_of(bl.theta_ii().v, &b)))
        }
    };
    let u = q.u().map(Jet::constant);
    Some(region::eval_formula(&u, lt, k, f, &b).v)
}

/// The polar metric at a point.
///
/// The base term c_base·|xyz|² contributes β·wwᵀ with w_i = 1/r_i and
/// β = 4·c_base·|xyz|², a rank-one matrix whose entries can exceed those
/// of the potential part by tens of orders of magnitude. The eigenvalue
/// and the positivity verdict therefore come from the decomposition of the
/// potential part alone plus the rank-one update, never from the summed
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub point: FiberPoint,
    pub region: Region,
    /// Potential part plus base term, entrywise.
    pub matrix: Mat3,
    /// The metric of F alone.
    pub potential_matrix: Mat3,
    /// β·|w|², the weight of the base term along the unit vector w/|w|.
    pub base_weight: f64,
    pub min_eigenvalue: f64,
    /// Positive definiteness by the matrix determinant lemma.
    pub pd: bool,
}

/// The matrix H_ij/(r_i r_j) of a u-Hessian, symmetrized.
fn polar_from_hessian(h: &[[f64; 3]; 3], r: &[f64; 3]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            m[i][k] = h[i][k] / (r[i] * r[k]);
        }
    }
    for i in 0..3 {
        for k in 0..i {
            let a = 0.5 * (m[i][k] + m[k][i]);
            m[i][k] = a;
            m[k][i] = a;
        }
    }
    m
}

/// Unit vector along (1/r_x, 1/r_y, 1/r_z) and ln of β·|w|².
fn base_direction(q: &FiberPoint, c_base: f64) -> ([f64; 3], f64) {
    let u = q.u();
    let umin = u.iter().cloned().fold(f64::INFINITY, f64::min);
    // w_i·r_min = e^{u_min − u_i} ≤ 1.
    let scaled = u.map(|x| (umin - x).exp());
    let n = scaled.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w = scaled.map(|x| x / n);
    let sum_u: f64 = u.iter().sum();
    let ln_weight = 4f64.ln() + c_base.ln() + 2.0 * sum_u - 2.0 * umin + 2.0 * n.ln();
    (w, ln_weight)
}

pub fn metric_matrix(q: &FiberPoint, c_base: f64) -> Mat3 {
    let mut m = polar_from_hessian(&potential_jet(q, q.u()).h, &q.r());
    if c_base > 0.0 {
        let (w, lw) = base_direction(q, c_base);
        let beta = lw.exp();
        for i in 0..3 {
            for k in 0..3 {
                m[i][k] += beta * w[i] * w[k];
            }
        }
    }
    m
}

pub fn potential_metric(q: &FiberPoint) -> Mat3 {
    polar_from_hessian(&potential_jet(q, q.u()).h, &q.r())
}

pub fn metric(q: &FiberPoint, c_base: f64) -> MetricSample {
    let a = potential_metric(q);
    let (vals, vecs) = eigen::jacobi_eigen(&a);
    let (w, lw) = if c_base > 0.0 { base_direction(q, c_base) } else { ([1.0, 0.0, 0.0], f64::NEG_INFINITY) };
    let beta = lw.exp();
    MetricSample {
        point: *q,
        region: region_classify(q),
        matrix: metric_matrix(q, c_base),
        potential_matrix: a,
        base_weight: beta,
        min_eigenvalue: eigen::rank_one_min_eig(&vals, &vecs, &w, beta),
        pd: eigen::rank_one_pd(&vals, &vecs, &w, beta),
    }
}

/// Moment coordinates (ξ₁, ξ₂, η) from the u-gradient of F + base:
/// ξ₁ = ½(F_x − F_z) − 1, ξ₂ = ½(F_y − F_z) − 1, η = ½F_z.
///
/// The constants put the chart vertex r → 0 at the hexagon vertex (−1,−1).
pub fn moment_coords(q: &FiberPoint, c_base: f64) -> (f64, f64, f64) {
    let g = total_jet(q, q.u(), c_base).g;
    (0.5 * (g[0] - g[2]) - 1.0, 0.5 * (g[1] - g[2]) - 1.0, 0.5 * g[2])
}

/// Fractions of a full turn by which parallel transport rotates each phase.
pub fn transport_fractions(q: &FiberPoint) -> [f64; 3] {
    let inv = [q.rx, q.ry, q.rz].map(|r| 1.0 / (r * r));
    let s: f64 = inv.iter().sum();
    inv.map(|v| v / s)
}

/// Monodromy class (f₁, f₂) = −(tile index) of ξ; the fundamental
/// parallelogram (−3,−3) + [0,1]γ′ + [0,1]γ″ meets the four tiles (0,0),
/// (0,−1), (−1,0), (−1,−1).
pub fn monodromy_class(xi: &RationalVector2) -> Result<(i64, i64)> {
    match tile_of(xi) {
        TileOf::Tile(t) => Ok((-t.m1, -t.m2)),
        TileOf::Boundary(ms) => Err(Error::OnBoundary(format!(
            "ξ = ({}, {}) lies on the boundary of {} tiles",
            crate::lattice::fmt_q(&xi.a),
            crate::lattice::fmt_q(&xi.b),
            ms.len()
        ))),
    }
}

/// g*g_xy − g_xy + ln|Ty|² at the point.
pub fn harmonic_difference_check(q: &FiberPoint) -> f64 {
    harmonic_difference(q.t, q.rx, q.ry)
}

/// Finite-difference cross-check of the jet derivatives of F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdCheck {
    /// max_i |ΔF_i| / max_i |F_i| for the u-gradient.
    pub gradient_rel: f64,
    /// max_ik |ΔH_ik|/(r_i r_k) divided by max_ik |g_ik|: the error the
    /// difference quotient would put into the metric, relative to its size.
    pub hessian_rel: f64,
}

/// Central differences with step h in u = ln r.
///
/// Entries of the u-Hessian along a small r_i are sums of terms of order
/// T²r_i² that cancel to a much smaller total, so comparing them entry by
/// entry would measure rounding in the difference quotient. Scaling to the
/// metric compares each error with the quantity it feeds into.
pub fn fd_check(q: &FiberPoint, h: f64) -> FdCheck {
    let u0 = q.u();
    let r = q.r();
    let j0 = potential_jet(q, u0);
    let shift = |i: usize, s: f64| {
        let mut u = u0;
        u[i] += s;
        u
    };
    let gmax = j0.g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut grad_err = 0.0f64;
    let mut fd_h = [[0.0; 3]; 3];
    for i in 0..3 {
        let jp = potential_jet(q, shift(i, h));
        let jm = potential_jet(q, shift(i, -h));
        grad_err = grad_err.max(((jp.v - jm.v) / (2.0 * h) - j0.g[i]).abs());
        for k in 0..3 {
            fd_h[k][i] = (jp.g[k] - jm.g[k]) / (2.0 * h);
        }
    }
    let m = polar_from_hessian(&j0.h, &r);
    let mmax = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut herr = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            // H_ik is both ∂_k F_i and ∂_i F_k; difference the component
            // with the smaller gradient, whose rounding is smaller.
            let fd = if j0.g[i].abs() <= j0.g[k].abs() { fd_h[i][k] } else { fd_h[k][i] };
            herr = herr.max((fd - j0.h[i][k]).abs() / (r[i] * r[k]));
        }
    }
    FdCheck {
        gradient_rel: if gmax > 0.0 { grad_err / gmax } else { grad_err },
        hessian_rel: if mmax > 0.0 { herr / mmax } else { herr },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(lv: [f64; 3]) -> FiberPoint {
        FiberPoint::from_logs(lv, 0.1, 40, 17)
    }

    #[test]
    fn center_is_seven() {
        let l3 = 40.0 / 3.0;
        let q = pt([l3, l3, l3]);
        assert_eq!(region_classify(&q), Region::VII);
        let phi = phi_xyz(&q);
        assert!(phi[0].abs() < 1e-20 && (phi[0] - phi[1]).abs() < 1e-30);
        let m = potential_metric(&q);
        for i in 0..3 {
            assert!((m[i][i] / (0.01 * 8.0 / 3.0) - 1.0).abs() < 0.1);
        }
        let s = metric(&q, c_base_default(0.1, 40));
        assert!(s.pd && s.min_eigenvalue > 0.0);
    }

    #[test]
    fn transport() {
        let f = transport_fractions(&FiberPoint::new(0.1, 1.0, 1.0, 0.1, 40, 17));
        assert!((f[0] - 100.0 / 102.0).abs() < 1e-15);
        assert!((f.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
    }
}
