//! The lattice Γ_B = Z⟨γ′, γ″⟩ ⊂ Z², the map λ = M⁻¹ and the form κ.
//!
//! Standard coordinates are canonical; (n1, n2) with γ = n1γ′ + n2γ″ are a
//! view. M = [[2,1],[1,2]], so std = M·n and λ(γ) = n.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p/q", "p" or a decimal like "0.25" into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(a, b));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// "p/q" (or "p" for integers).
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// The norm form N(n) = n1² + n1n2 + n2², equal to −κ(n1γ′ + n2γ″).
pub fn norm_form(n1: i64, n2: i64) -> i64 {
    n1 * n1 + n1 * n2 + n2 * n2
}

pub fn norm_form_q(a: &Q, b: &Q) -> Q {
    a * a + a * b + b * b
}

/// An element n1γ′ + n2γ″ of Γ_B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeVector {
    pub n1: i64,
    pub n2: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { n1: 0, n2: 0 };
    pub const GAMMA1: LatticeVector = LatticeVector { n1: 1, n2: 0 };
    pub const GAMMA2: LatticeVector = LatticeVector { n1: 0, n2: 1 };

    pub fn new(n1: i64, n2: i64) -> Self {
        Self { n1, n2 }
    }

    pub fn std(&self) -> (i64, i64) {
        (2 * self.n1 + self.n2, self.n1 + 2 * self.n2)
    }

    /// Inverse of [`LatticeVector::std`]; `None` if (a, b) is not in Γ_B.
    pub fn from_std(a: i64, b: i64) -> Option<Self> {
        let (x, y) = (2 * a - b, 2 * b - a);
        if x % 3 != 0 || y % 3 != 0 {
            return None;
        }
        Some(Self::new(x / 3, y / 3))
    }

    pub fn std_q(&self) -> RationalVector2 {
        let (a, b) = self.std();
        RationalVector2::new(q(a), q(b))
    }

    pub fn norm(&self) -> i64 {
        norm_form(self.n1, self.n2)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.n1 + o.n1, self.n2 + o.n2)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.n1 - o.n1, self.n2 - o.n2)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.n1, -self.n2)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(k * self.n1, k * self.n2)
    }
}

/// A pair of exact rationals, used for std coordinates and λ-images alike.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector2 {
    pub a: Q,
    pub b: Q,
}

impl RationalVector2 {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn ints(a: i64, b: i64) -> Self {
        Self::new(q(a), q(b))
    }

    pub fn zero() -> Self {
        Self::ints(0, 0)
    }

    pub fn dot(&self, o: &Self) -> Q {
        &self.a * &o.a + &self.b * &o.b
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(&self.a * k, &self.b * k)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b)
    }

    pub fn max_abs(&self) -> Q {
        let (x, y) = (self.a.abs(), self.b.abs());
        if x > y {
            x
        } else {
            y
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (q_to_f64(&self.a), q_to_f64(&self.b))
    }
}

/// Moment-map coordinates (ξ₁, ξ₂, η).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentPoint {
    pub xi1: Q,
    pub xi2: Q,
    pub eta: Q,
}

impl MomentPoint {
    pub fn new(xi1: Q, xi2: Q, eta: Q) -> Self {
        Self { xi1, xi2, eta }
    }

    pub fn xi(&self) -> RationalVector2 {
        RationalVector2::new(self.xi1.clone(), self.xi2.clone())
    }
}

/// λ(v) = M⁻¹v.
pub fn lambda(v: &RationalVector2) -> RationalVector2 {
    let three = q(3);
    RationalVector2::new(
        (q(2) * &v.a - &v.b) / &three,
        (q(2) * &v.b - &v.a) / &three,
    )
}

/// κ(v) = −½⟨v, λ(v)⟩.
pub fn kappa(v: &RationalVector2) -> Q {
    -(v.dot(&lambda(v))) / q(2)
}

/// The l² representatives e1γ′ + e2γ″ with 0 ≤ e1, e2 < l, row-major in (e1, e2).
pub fn coset_reps(l: i64) -> Result<Vec<LatticeVector>> {
    if l <= 0 {
        return Err(Error::ZeroLevel(l));
    }
    Ok((0..l)
        .flat_map(|e1| (0..l).map(move |e2| LatticeVector::new(e1, e2)))
        .collect())
}

pub fn check_rep(e: &LatticeVector, l: i64) -> Result<()> {
    if l <= 0 {
        return Err(Error::ZeroLevel(l));
    }
    if e.n1 < 0 || e.n2 < 0 || e.n1 >= l || e.n2 >= l {
        return Err(Error::BadRep { e1: e.n1, e2: e.n2, l });
    }
    Ok(())
}

/// The representative of v modulo lΓ_B.
pub fn reduce_rep(v: &LatticeVector, l: i64) -> LatticeVector {
    LatticeVector::new(v.n1.rem_euclid(l), v.n2.rem_euclid(l))
}

/// The action γ·(ξ, η) = (ξ − γ, η − κ(γ) − ⟨ξ, λ(γ)⟩).
///
/// With this sign the map is a group action that preserves η ≥ φ(ξ) and
/// sends the facet of tile m to the facet of tile m − λ(γ).
pub fn gamma_act_moment(g: &LatticeVector, p: &MomentPoint) -> MomentPoint {
    let gs = g.std_q();
    let lg = RationalVector2::ints(g.n1, g.n2);
    let xi = p.xi();
    MomentPoint::new(
        &p.xi1 - &gs.a,
        &p.xi2 - &gs.b,
        &p.eta - kappa(&gs) - xi.dot(&lg),
    )
}

/// Floor of √x for a non-negative rational.
pub fn isqrt_floor(x: &Q) -> i64 {
    use num_traits::ToPrimitive;
    if !x.is_positive() {
        return 0;
    }
    let fl = x.floor().to_integer();
    let mut r = fl.sqrt().to_i64().unwrap_or(i64::MAX / 4);
    while BigInt::from(r + 1) * BigInt::from(r + 1) <= fl {
        r += 1;
    }
    while BigInt::from(r) * BigInt::from(r) > fl {
        r -= 1;
    }
    r
}

/// All γ with N(γ) ≤ bound, sorted by (N, n1, n2).
pub fn enumerate_norm_ball(bound: &Q) -> Vec<LatticeVector> {
    if bound.is_negative() {
        return Vec::new();
    }
    // N(n) ≥ 3n1²/4, so |n1| ≤ √(4B/3), and likewise for n2.
    let r = isqrt_floor(&(bound * qf(4, 3)));
    let b = bound.floor().to_integer();
    let mut out: Vec<LatticeVector> = (-r..=r)
        .flat_map(|n1| (-r..=r).map(move |n2| LatticeVector::new(n1, n2)))
        .filter(|v| BigInt::from(v.norm()) <= b)
        .collect();
    out.sort_by_key(|v| (v.norm(), v.n1, v.n2));
    out
}

/// Integer vectors w with N(w) ≤ bound and w ≡ e (mod l), i.e. the
/// translate e + lΓ_B cut by the norm ball.
pub fn enumerate_coset_ball(e: &LatticeVector, l: i64, bound: &Q) -> Vec<LatticeVector> {
    enumerate_norm_ball(bound)
        .into_iter()
        .filter(|w| (w.n1 - e.n1).rem_euclid(l) == 0 && (w.n2 - e.n2).rem_euclid(l) == 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(&RationalVector2::ints(2, 1)), RationalVector2::ints(1, 0));
        assert_eq!(lambda(&RationalVector2::zero()), RationalVector2::zero());
        assert_eq!(
            lambda(&RationalVector2::ints(1, 1)),
            RationalVector2::new(qf(1, 3), qf(1, 3))
        );
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&RationalVector2::ints(2, 1)), q(-1));
        assert_eq!(kappa(&RationalVector2::zero()), q(0));
        assert_eq!(kappa(&RationalVector2::ints(3, 3)), q(-3));
    }

    #[test]
    fn reps() {
        assert_eq!(coset_reps(1).unwrap(), vec![LatticeVector::ZERO]);
        let r2: Vec<_> = coset_reps(2).unwrap().iter().map(|v| (v.n1, v.n2)).collect();
        assert_eq!(r2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(coset_reps(0).is_err());
    }

    #[test]
    fn moment_action_examples() {
        let p = MomentPoint::new(q(0), q(0), q(0));
        let r = gamma_act_moment(&LatticeVector::GAMMA1, &p);
        assert_eq!(r, MomentPoint::new(q(-2), q(-1), q(1)));
        let p = MomentPoint::new(q(1), q(0), q(0));
        let r = gamma_act_moment(&LatticeVector::GAMMA2, &p);
        assert_eq!(r, MomentPoint::new(q(0), q(-2), q(1)));
    }

    #[test]
    fn ball_counts() {
        assert_eq!(enumerate_norm_ball(&q(0)).len(), 1);
        assert_eq!(enumerate_norm_ball(&q(1)).len(), 7);
        assert_eq!(enumerate_norm_ball(&q(3)).len(), 13);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("1/2").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-3").unwrap(), q(-3));
        assert_eq!(parse_q("0.25").unwrap(), qf(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), qf(-3, 2));
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&qf(6, 4)), "3/2");
    }
}
