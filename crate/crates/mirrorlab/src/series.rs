//! Exact truncated τ-series and theta sections.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{
    check_rep, coset_reps, enumerate_coset_ball, enumerate_norm_ball, fmt_q, q, q_to_f64, qf,
    LatticeVector, Q,
};
use crate::numeric::{norm_tail_bound, Approx};

/// A finite sum Σ c_a τ^a, known exactly for all exponents a ≤ cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSeries {
    terms: BTreeMap<Q, Q>,
    cutoff: Q,
}

impl TauSeries {
    pub fn zero(cutoff: Q) -> Self {
        Self { terms: BTreeMap::new(), cutoff }
    }

    pub fn one(cutoff: Q) -> Self {
        Self::monomial(q(0), q(1), cutoff)
    }

    /// c·τ^a, or the zero series if a exceeds the cutoff.
    pub fn monomial(exp: Q, coef: Q, cutoff: Q) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_term(exp, coef);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Q, Q)>>(terms: I, cutoff: Q) -> Self {
        let mut s = Self::zero(cutoff);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Accumulate c·τ^a, dropping it if a > cutoff and pruning zeros.
    pub fn add_term(&mut self, exp: Q, coef: Q) {
        if exp > self.cutoff || coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Q::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn cutoff(&self) -> &Q {
        &self.cutoff
    }

    pub fn terms(&self) -> &BTreeMap<Q, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &Q) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Option<(&Q, &Q)> {
        self.terms.iter().next()
    }

    /// Lower the cutoff, discarding terms above it.
    pub fn truncate(&self, cutoff: &Q) -> Self {
        let c = if cutoff < &self.cutoff { cutoff.clone() } else { self.cutoff.clone() };
        Self {
            terms: self.terms.range(..=c.clone()).map(|(a, b)| (a.clone(), b.clone())).collect(),
            cutoff: c,
        }
    }

    /// Multiply by τ^a; the cutoff shifts with the series.
    pub fn shift(&self, a: &Q) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + a, c.clone())).collect(),
            cutoff: &self.cutoff + a,
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.cutoff.clone());
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn add(&self, o: &Self) -> Self {
        series_add(self, o)
    }

    pub fn mul(&self, o: &Self) -> Self {
        series_mul(self, o)
    }

    /// Agreement on all exponents up to the smaller cutoff.
    pub fn agrees_with(&self, o: &Self) -> bool {
        self.first_difference(o).is_none()
    }

    /// The smallest exponent ≤ min cutoff where the coefficients differ.
    pub fn first_difference(&self, o: &Self) -> Option<(Q, Q, Q)> {
        let c = std::cmp::min(&self.cutoff, &o.cutoff).clone();
        let a = self.truncate(&c);
        let b = o.truncate(&c);
        let mut keys: Vec<&Q> = a.terms.keys().chain(b.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .find(|k| a.coeff(k) != b.coeff(k))
            .map(|k| (k.clone(), a.coeff(k), b.coeff(k)))
    }

    /// Σ c_a τ^a in floating point (no tail).
    pub fn eval(&self, tau: f64) -> f64 {
        self.terms.iter().map(|(e, c)| q_to_f64(c) * tau.powf(q_to_f64(e))).sum()
    }

    /// Least common multiple of all exponent denominators.
    pub fn exponent_denominator_lcm(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms.keys().fold(num_bigint::BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!([fmt_q(e), fmt_q(c)]))
            .collect();
        json!({"cutoff": fmt_q(&self.cutoff), "terms": terms})
    }
}

impl std::fmt::Display for TauSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { " - " } else if i > 0 { " + " } else { "" };
            let sign = if i == 0 && c.is_negative() { "-" } else { sign };
            let ca = c.abs();
            let cs = if ca.is_one() && !e.is_zero() { String::new() } else { fmt_q(&ca) };
            let ts = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "τ".to_string()
            } else {
                format!("τ^({})", fmt_q(e))
            };
            write!(f, "{sign}{cs}{ts}")?;
        }
        write!(f, " + O(τ^({}))", fmt_q(&self.cutoff))
    }
}

/// Coefficient-wise sum, known up to the smaller cutoff.
pub fn series_add(a: &TauSeries, b: &TauSeries) -> TauSeries {
    let c = std::cmp::min(&a.cutoff, &b.cutoff).clone();
    let mut out = a.truncate(&c);
    for (e, v) in b.terms.range(..=c.clone()) {
        out.add_term(e.clone(), v.clone());
    }
    out
}

/// Truncated product.
///
/// Terms of a product are reliable only up to min over factors of
/// (cutoff + lowest exponent of the other factor), so that is the cutoff.
/// With nonnegative leading exponents this is at least the plain minimum.
pub fn series_mul(a: &TauSeries, b: &TauSeries) -> TauSeries {
    mul_to(a, b, mul_cutoff(a, b))
}

/// Product known up to min(a.cutoff + lead(b), b.cutoff + lead(a)): an
/// unknown term of a beyond its cutoff meets b no lower than lead(b).
fn series_mul_sharp(a: &TauSeries, b: &TauSeries) -> TauSeries {
    let lead = |s: &TauSeries| s.terms.keys().next().cloned();
    let c = match (lead(a), lead(b)) {
        (Some(la), Some(lb)) => std::cmp::min(&a.cutoff + lb, &b.cutoff + la),
        _ => mul_cutoff(a, b),
    };
    mul_to(a, b, c)
}

fn mul_to(a: &TauSeries, b: &TauSeries, c: Q) -> TauSeries {
    let mut out = TauSeries::zero(c.clone());
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e = ea + eb;
            if e > c {
                break;
            }
            out.add_term(e, ca * cb);
        }
    }
    out
}

fn mul_cutoff(a: &TauSeries, b: &TauSeries) -> Q {
    // Use the plain min-of-cutoffs rule whenever both series start at a
    // nonnegative exponent; it is always sound then.
    let lead = |s: &TauSeries| s.terms.keys().next().cloned().unwrap_or_else(|| s.cutoff.clone());
    let (la, lb) = (lead(a), lead(b));
    let plain = std::cmp::min(&a.cutoff, &b.cutoff).clone();
    if !la.is_negative() && !lb.is_negative() {
        return plain;
    }
    std::cmp::min(&a.cutoff + &lb, &b.cutoff + &la)
}

/// A Laurent polynomial in x whose coefficients are τ-series. Keys are
/// x-exponents in the λ-image basis, so they are integer pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSection {
    pub level: i64,
    pub coeffs: BTreeMap<(i64, i64), TauSeries>,
    pub cutoff: Q,
}

impl LaurentSection {
    /// Product of two sections; levels add.
    pub fn mul(&self, o: &Self) -> Self {
        let c = std::cmp::min(&self.cutoff, &o.cutoff).clone();
        let mut coeffs: BTreeMap<(i64, i64), TauSeries> = BTreeMap::new();
        for (k1, s1) in &self.coeffs {
            for (k2, s2) in &o.coeffs {
                let lead = s1.leading().map(|x| x.0.clone()).unwrap_or_else(|| c.clone())
                    + s2.leading().map(|x| x.0.clone()).unwrap_or_else(|| c.clone());
                if lead > c {
                    continue;
                }
                let p = series_mul(s1, s2).truncate(&c);
                let key = (k1.0 + k2.0, k1.1 + k2.1);
                let slot = coeffs.entry(key).or_insert_with(|| TauSeries::zero(c.clone()));
                *slot = series_add(slot, &p);
            }
        }
        coeffs.retain(|_, s| !s.is_zero());
        Self { level: self.level + o.level, coeffs, cutoff: c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = std::cmp::min(&self.cutoff, &o.cutoff).clone();
        let mut coeffs: BTreeMap<(i64, i64), TauSeries> = BTreeMap::new();
        for (k, s) in self.coeffs.iter().chain(o.coeffs.iter()) {
            let slot = coeffs.entry(*k).or_insert_with(|| TauSeries::zero(c.clone()));
            *slot = series_add(slot, s);
        }
        coeffs.retain(|_, s| !s.is_zero());
        Self { level: self.level, coeffs, cutoff: c }
    }

    /// Multiply every coefficient by a τ-series; terms of the result are
    /// trusted up to `cutoff` only. Each product is known as far as the
    /// leading exponents allow, so a coefficient known to cutoff − lead(s)
    /// times a section starting at lead(s) is exact up to `cutoff`.
    pub fn scale_series(&self, k: &TauSeries, cutoff: &Q) -> Self {
        let mut coeffs = BTreeMap::new();
        for (key, s) in &self.coeffs {
            let p = series_mul_sharp(k, s).truncate(cutoff);
            if !p.is_zero() {
                coeffs.insert(*key, p);
            }
        }
        Self { level: self.level, coeffs, cutoff: cutoff.clone() }
    }

    /// Agreement of all coefficients up to the smaller cutoff.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let c = std::cmp::min(&self.cutoff, &o.cutoff).clone();
        let zero = TauSeries::zero(c.clone());
        self.coeffs
            .keys()
            .chain(o.coeffs.keys())
            .all(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero).truncate(&c);
                let b = o.coeffs.get(k).unwrap_or(&zero).truncate(&c);
                a.agrees_with(&b)
            })
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(k, s)| json!({"x": [k.0, k.1], "series": s.to_json()}))
            .collect();
        json!({"level": self.level, "cutoff": fmt_q(&self.cutoff), "coeffs": coeffs})
    }
}

/// The theta section s_{e,l} = Σ_γ τ^(−lκ(γ+γ_e/l)) x^(−lλ(γ)−λ(γ_e)).
///
/// Writing w = lγ + γ_e in (γ′,γ″) coordinates, the term is τ^(N(w)/l)·x^(−w),
/// so the terms up to `cutoff` are the w ≡ e (mod l) with N(w) ≤ l·cutoff.
pub fn theta_section(e: &LatticeVector, l: i64, cutoff: &Q) -> Result<LaurentSection> {
    check_rep(e, l)?;
    let lq = q(l);
    let mut coeffs = BTreeMap::new();
    for w in enumerate_coset_ball(e, l, &(cutoff * &lq)) {
        let exp = Q::new(w.norm().into(), l.into());
        coeffs.insert((-w.n1, -w.n2), TauSeries::monomial(exp, q(1), cutoff.clone()));
    }
    Ok(LaurentSection { level: l, coeffs, cutoff: cutoff.clone() })
}

/// Reduce the class of an x-exponent key modulo l.
fn key_rep(key: (i64, i64), l: i64) -> LatticeVector {
    LatticeVector::new((-key.0).rem_euclid(l), (-key.1).rem_euclid(l))
}

/// The w ≡ e (mod l) of least norm form, with the first in (N, n1, n2) order.
pub fn coset_min(e: &LatticeVector, l: i64) -> LatticeVector {
    // A deep hole of the norm form has N ≤ 1/3, so N(w) ≤ l²/3 here.
    enumerate_coset_ball(e, l, &qf(l * l, 3))[0]
}

/// Decompose s1·s2 = Σ_e C_e·s_{e,l} with l = l′ + l″.
///
/// Each C_e is read off at the least-norm key of its class and then every
/// key of the product is checked against C_e times the basis monomial.
/// The returned C_e are exact up to their cutoffs, which are the product
/// cutoff minus the leading exponent of s_{e,l}.
pub fn section_mul_decompose(
    s1: &LaurentSection,
    s2: &LaurentSection,
    cutoff: &Q,
) -> Result<BTreeMap<LatticeVector, TauSeries>> {
    let l = s1.level + s2.level;
    let prod = s1.mul(s2);
    let c = std::cmp::min(&prod.cutoff, cutoff).clone();
    let lq = q(l);
    let mut out = BTreeMap::new();
    for e in coset_reps(l)? {
        let w = coset_min(&e, l);
        let shift = Q::new(w.norm().into(), l.into());
        let here = prod
            .coeffs
            .get(&(-w.n1, -w.n2))
            .cloned()
            .unwrap_or_else(|| TauSeries::zero(c.clone()))
            .truncate(&c);
        out.insert(e, here.shift(&-&shift));
    }
    for (key, s) in &prod.coeffs {
        let e = key_rep(*key, l);
        let w = LatticeVector::new(-key.0, -key.1);
        let exp = Q::new(w.norm().into(), l.into());
        let expected = out[&e].shift(&exp).truncate(&c);
        if !expected.agrees_with(&s.truncate(&c)) {
            return Err(Error::OutsideSupport(key.0, key.1));
        }
    }
    // Conversely every key the basis expansion predicts must be present.
    for (e, ce) in &out {
        let Some((lead, _)) = ce.leading() else { continue };
        for w in enumerate_coset_ball(e, l, &((&c - lead) * &lq)) {
            if !prod.coeffs.contains_key(&(-w.n1, -w.n2)) {
                return Err(Error::OutsideSupport(-w.n1, -w.n2));
            }
        }
    }
    Ok(out)
}

/// Recombine Σ_e C_e·s_{e,l}, keeping terms up to `cutoff`.
pub fn recompose(coeffs: &BTreeMap<LatticeVector, TauSeries>, l: i64, cutoff: &Q) -> Result<LaurentSection> {
    let mut acc = LaurentSection { level: l, coeffs: BTreeMap::new(), cutoff: cutoff.clone() };
    for (e, c) in coeffs {
        let s = theta_section(e, l, cutoff)?;
        acc = acc.add(&s.scale_series(c, cutoff));
    }
    Ok(acc)
}

/// Numeric value of a section at positive real x, with a tail bound.
///
/// The x-exponent key k contributes coefficient(τ)·x1^k1·x2^k2. The dropped
/// terms are τ^(N(w)/l)·|x|^(−w) with N(w) > l·cutoff, and
/// |x^(−w)| ≤ exp(L(|w1|+|w2|)) with L = max |ln x_i|.
pub fn evaluate_numeric(s: &LaurentSection, x_abs: (f64, f64), tau: f64) -> Result<Approx> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::TauOutOfRange(tau));
    }
    let (l1, l2) = (x_abs.0.ln(), x_abs.1.ln());
    let mut sum = 0.0;
    let mut mag = 0.0;
    for (k, c) in &s.coeffs {
        let t = c.eval(tau) * (k.0 as f64 * l1 + k.1 as f64 * l2).exp();
        sum += t;
        mag += t.abs();
    }
    let slope = l1.abs().max(l2.abs());
    let k0 = (&s.cutoff * q(s.level)).floor().to_integer().to_u64().unwrap_or(0) + 1;
    let tail = norm_tail_bound(tau, s.level as f64, slope, k0);
    let round = mag * f64::EPSILON * (s.coeffs.len() as f64 + 1.0);
    Ok(Approx::new(sum, tail + round))
}

/// All (n1, n2) with N(n) ≤ bound as x-exponent keys; used by callers that
/// need the defining theta function's support.
pub fn norm_ball_keys(bound: &Q) -> Vec<(i64, i64)> {
    enumerate_norm_ball(bound).iter().map(|v| (v.n1, v.n2)).collect()
}
