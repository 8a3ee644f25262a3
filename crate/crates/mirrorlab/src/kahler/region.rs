//! Sector classification and the region-wise formulas of the potential.
//!
//! Coordinates are L_i = log_T r_i. Sector I is where r_x dominates:
//! L_y − L_x ≥ θ_A and L_z − L_x ≥ θ_A. Sectors III and V are its images
//! under the relabeling x → y → z → x. The rest splits by the largest L_i
//! (the smallest r_i) into II (z), IV (x) and VI (y), with II lying
//! between I and III. Every formula below is written for the canonical
//! rotation and evaluated on permuted coordinates for the others.

use super::bump::{bump_jet, BumpProfile};
use super::jet::Jet;

/// Named regions of the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Gxy,
    Gxz,
    Gyz,
    I,
    IIA,
    IIB,
    IIC,
    III,
    IV,
    V,
    VI,
    VII,
    AxisX,
    AxisY,
    AxisZ,
}

impl Region {
    pub const ALL: [Region; 15] = [
        Region::Gxy,
        Region::Gxz,
        Region::Gyz,
        Region::I,
        Region::IIA,
        Region::IIB,
        Region::IIC,
        Region::III,
        Region::IV,
        Region::V,
        Region::VI,
        Region::VII,
        Region::AxisX,
        Region::AxisY,
        Region::AxisZ,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Region::Gxy => "g_xy",
            Region::Gxz => "g_xz",
            Region::Gyz => "g_yz",
            Region::I => "I",
            Region::IIA => "IIA",
            Region::IIB => "IIB",
            Region::IIC => "IIC",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
            Region::VII => "VII",
            Region::AxisX => "axis_x",
            Region::AxisY => "axis_y",
            Region::AxisZ => "axis_z",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        Region::ALL.iter().copied().find(|r| r.name() == s)
    }
}

/// Which of the six sectors a point is in, with its rotation k: the
/// canonical (x, y, z) are the actual coordinates (k, k+1, k+2) mod 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// I, III, V for k = 0, 1, 2.
    Dominant(usize),
    /// II, IV, VI for k = 0, 1, 2.
    Between(usize),
}

pub fn sector(lv: [f64; 3], b: &BumpProfile) -> Sector {
    for k in 0..3 {
        let (x, y, z) = (lv[k], lv[(k + 1) % 3], lv[(k + 2) % 3]);
        if y - x >= b.theta_a && z - x >= b.theta_a {
            return Sector::Dominant(k);
        }
    }
    let mut m = 0;
    for i in 1..3 {
        if lv[i] > lv[m] {
            m = i;
        }
    }
    Sector::Between((m + 1) % 3)
}

/// The building blocks a_i = ln(1+T²r_i²) and b_ij = ln(1+T⁴r_i²r_j²) as
/// jets in u = ln r, in the rotated frame.
#[derive(Debug, Clone, Copy)]
pub struct Blocks {
    pub a: [Jet; 3],
    /// b[i] = b_jk for {j, k} the complement of i.
    pub b: [Jet; 3],
    pub ln_t: f64,
    /// Values of u in the rotated frame (for θ_II).
    pub u: [Jet; 3],
}

impl Blocks {
    /// `u` holds the jets of (u_x, u_y, u_z); `k` is the rotation.
    pub fn new(u: &[Jet; 3], ln_t: f64, k: usize) -> Self {
        let ur = [u[k], u[(k + 1) % 3], u[(k + 2) % 3]];
        let a = ur.map(|ui| (ui * 2.0 + 2.0 * ln_t).ln_1p_exp());
        let b = [0usize, 1, 2].map(|i| {
            let (j, l) = ((i + 1) % 3, (i + 2) % 3);
            ((ur[j] + ur[l]) * 2.0 + 4.0 * ln_t).ln_1p_exp()
        });
        Self { a, b, ln_t, u: ur }
    }

    /// ψ_i = ln(1+T²r_i²) − ln(1+T⁴r_j²r_k²).
    pub fn psi(&self, i: usize) -> Jet {
        self.a[i] - self.b[i]
    }

    /// g_ij = a_i + a_j + b_ij, indexed by the complement c of {i, j}.
    pub fn g(&self, c: usize) -> Jet {
        let (i, j) = ((c + 1) % 3, (c + 2) % 3);
        self.a[i] + self.a[j] + self.b[c]
    }

    pub fn g_xy(&self) -> Jet {
        self.g(2)
    }

    pub fn g_xz(&self) -> Jet {
        self.g(1)
    }

    pub fn g_yz(&self) -> Jet {
        self.g(0)
    }

    pub fn seven(&self) -> Jet {
        (self.g(0) + self.g(1) + self.g(2)) * (1.0 / 3.0)
    }

    /// log_T of a positive jet.
    pub fn logt(&self, d: &Jet) -> Jet {
        d.ln() * (1.0 / self.ln_t)
    }

    /// θ_II = L_y − L_x.
    pub fn theta_ii(&self) -> Jet {
        (self.u[1] - self.u[0]) * (1.0 / self.ln_t)
    }
}

/// α₃ and α₅ of a distance jet d; constant (2/3, 0) when d ≤ 0.
pub fn alpha35(bl: &Blocks, d: &Jet, b: &BumpProfile) -> (Jet, Jet, f64) {
    if !(d.v > 0.0) {
        return (Jet::constant(2.0 / 3.0), Jet::constant(0.0), f64::NEG_INFINITY);
    }
    let lam = bl.logt(d);
    let s = b.radial_s(lam.v);
    let a3 = bump_jet(&lam, b.d_in, -b.d_width, 1.0 / 3.0, 2.0 / 3.0);
    let a5 = bump_jet(&lam, b.d_in, -b.d_width, 1.0, 0.0);
    (a3, a5, s)
}

/// α₄(θ) = ½·sign(θ)·S((Θ₀ − log_T|θ|)/(Θ₀ − Θ₁)), with its progress.
pub fn alpha4(bl: &Blocks, theta: &Jet, b: &BumpProfile) -> (Jet, f64) {
    if theta.v == 0.0 {
        return (Jet::constant(0.0), f64::NEG_INFINITY);
    }
    let sg = theta.v.signum();
    let lam = bl.logt(&theta.scale(sg));
    let s = b.alpha4_s(lam.v);
    (bump_jet(&lam, b.theta0, -(b.theta0 - b.theta1), 0.5 * sg, 0.0), s)
}

/// α₆(θ) = 1 − S((θ − θ_B)/(θ_A − θ_B)).
pub fn alpha6(theta: &Jet, b: &BumpProfile) -> Jet {
    bump_jet(theta, b.theta_b, b.theta_a - b.theta_b, -1.0, 1.0)
}

/// d_I = ψ_x − ½(ψ_y + ψ_z) and θ_I = ψ_y − ψ_z.
pub fn d_theta_i(bl: &Blocks) -> (Jet, Jet) {
    (bl.psi(0) - (bl.psi(1) + bl.psi(2)) * 0.5, bl.psi(1) - bl.psi(2))
}

/// F_I = g_yz + α₃(d_I)·d_I + α₄(θ_I)·α₅(d_I)·θ_I.
pub fn f_sector_i(bl: &Blocks, b: &BumpProfile) -> Jet {
    let (d, th) = d_theta_i(bl);
    let (a3, a5, _) = alpha35(bl, &d, b);
    let (a4, _) = alpha4(bl, &th, b);
    bl.g_yz() + a3 * d + a4 * a5 * th
}

/// Sub-regions of sector II.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sub {
    A,
    B,
    C,
}

pub fn sub_of(theta_ii: f64, b: &BumpProfile) -> Sub {
    if theta_ii >= b.theta_b {
        Sub::A
    } else if theta_ii <= -b.theta_b {
        Sub::C
    } else {
        Sub::B
    }
}

/// The distance function of a sector-II sub-region.
pub fn d_ii(bl: &Blocks, sub: Sub, b: &BumpProfile) -> Jet {
    let (px, py, pz) = (bl.psi(0), bl.psi(1), bl.psi(2));
    match sub {
        Sub::A => {
            let a6 = alpha6(&bl.theta_ii(), b);
            let (d, _) = d_theta_i(bl);
            d + a6 * py * 1.5
        }
        Sub::B => px + py - pz * 0.5,
        Sub::C => {
            let a6 = alpha6(&-bl.theta_ii(), b);
            let d3 = py - (pz + px) * 0.5;
            d3 + a6 * px * 1.5
        }
    }
}

/// F in sector II for the given sub-region.
///
/// IIA: g_yz − α₆ψ_y + α₃d + ½α₅(ψ_y − ψ_z − α₆ψ_y)
/// IIB: g_yz − ψ_y + α₃d − ½α₅ψ_z
/// IIC: g_xz − α₆ψ_x + α₃d + ½α₅(ψ_x − ψ_z − α₆ψ_x), α₆ at −θ_II
pub fn f_sector_ii(bl: &Blocks, sub: Sub, b: &BumpProfile) -> Jet {
    let (px, py, pz) = (bl.psi(0), bl.psi(1), bl.psi(2));
    let d = d_ii(bl, sub, b);
    let (a3, a5, _) = alpha35(bl, &d, b);
    match sub {
        Sub::A => {
            let a6 = alpha6(&bl.theta_ii(), b);
            bl.g_yz() - a6 * py + a3 * d + a5 * (py - pz - a6 * py) * 0.5
        }
        Sub::B => bl.g_yz() - py + a3 * d - a5 * pz * 0.5,
        Sub::C => {
            let a6 = alpha6(&-bl.theta_ii(), b);
            bl.g_xz() - a6 * px + a3 * d + a5 * (px - pz - a6 * px) * 0.5
        }
    }
}

/// ½(g_xy + g_xz) + α₄(θ_I)(g_xy − g_xz).
///
/// The difference is formed without the shared a_x, which dominates both
/// potentials near the x axis and would otherwise leave only a few correct
/// digits in a value that multiplies the gradient of α₄.
pub fn f_axis(bl: &Blocks, b: &BumpProfile) -> Jet {
    let (_, th) = d_theta_i(bl);
    let (a4, _) = alpha4(bl, &th, b);
    let diff = (bl.a[1] - bl.a[2]) + (bl.b[2] - bl.b[1]);
    (bl.g_xy() + bl.g_xz()) * 0.5 + a4 * diff
}

/// Name of the chart potential g_ij in actual coordinates, given the
/// rotated pair (i, j).
fn g_region(k: usize, i: usize, j: usize) -> Region {
    let (a, b) = ((i + k) % 3, (j + k) % 3);
    match (a.min(b), a.max(b)) {
        (0, 1) => Region::Gxy,
        (0, 2) => Region::Gxz,
        _ => Region::Gyz,
    }
}

fn axis_region(k: usize) -> Region {
    [Region::AxisX, Region::AxisY, Region::AxisZ][k]
}

/// What to evaluate at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Seven,
    /// g_ij with (i, j) in the rotated frame.
    Chart(usize, usize),
    Axis,
    SectorI,
    SectorII(Sub),
}

/// Region label, the rotation and the formula to evaluate.
pub fn classify(lv: [f64; 3], ln_t: f64, b: &BumpProfile) -> (Region, usize, Formula) {
    let u = lv.map(|l| Jet::constant(l * ln_t));
    match sector(lv, b) {
        Sector::Dominant(k) => {
            let bl = Blocks::new(&u, ln_t, k);
            let (d, th) = d_theta_i(&bl);
            let (_, _, s) = alpha35(&bl, &d, b);
            if s <= 0.0 {
                return (Region::VII, k, Formula::Seven);
            }
            if s < 1.0 {
                return ([Region::I, Region::III, Region::V][k], k, Formula::SectorI);
            }
            let (_, s4) = alpha4(&bl, &th, b);
            if s4 >= 1.0 {
                if th.v > 0.0 {
                    (g_region(k, 0, 1), k, Formula::Chart(0, 1))
                } else {
                    (g_region(k, 0, 2), k, Formula::Chart(0, 2))
                }
            } else {
                (axis_region(k), k, Formula::Axis)
            }
        }
        Sector::Between(k) => {
            let bl = Blocks::new(&u, ln_t, k);
            let sub = sub_of(bl.theta_ii().v, b);
            let d = d_ii(&bl, sub, b);
            let (_, _, s) = alpha35(&bl, &d, b);
            if s <= 0.0 {
                (Region::VII, k, Formula::Seven)
            } else if s >= 1.0 {
                (g_region(k, 0, 1), k, Formula::Chart(0, 1))
            } else {
                let r = match (k, sub) {
                    (0, Sub::A) => Region::IIA,
                    (0, Sub::B) => Region::IIB,
                    (0, Sub::C) => Region::IIC,
                    (1, _) => Region::IV,
                    _ => Region::VI,
                };
                (r, k, Formula::SectorII(sub))
            }
        }
    }
}

/// Evaluate a formula in the rotated frame.
pub fn eval_formula(u: &[Jet; 3], ln_t: f64, k: usize, f: Formula, b: &BumpProfile) -> Jet {
    let bl = Blocks::new(u, ln_t, k);
    match f {
        Formula::Seven => bl.seven(),
        Formula::Chart(i, j) => bl.g(3 - i - j),
        Formula::Axis => f_axis(&bl, b),
        Formula::SectorI => f_sector_i(&bl, b),
        Formula::SectorII(sub) => f_sector_ii(&bl, sub, b),
    }
}
