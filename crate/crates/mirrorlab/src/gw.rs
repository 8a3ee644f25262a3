//! Disc counts on the mirror, the sphere-count series and the Floer
//! differential with its Leibniz-rule check.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{
    check_rep, coset_reps, enumerate_norm_ball, fmt_q, kappa, lambda, q, q_to_f64, LatticeVector,
    MomentPoint, RationalVector2, Q,
};
use crate::numeric::{norm_tail_bound, Approx};
use crate::report::{fnum, Status};
use crate::series::{evaluate_numeric, theta_section, TauSeries};
use crate::tropical::{facet, polytope_interior, Tile, ADJ};

/// Symplectic area ⟨A, ν(F_m)⟩ + α(F_m) = η − ⟨ξ, m⟩ + N(m).
pub fn disc_area(a: &MomentPoint, m: &Tile) -> Result<Q> {
    if !polytope_interior(a) {
        return Err(Error::NotInterior);
    }
    Ok(disc_area_unchecked(a, m))
}

fn disc_area_unchecked(a: &MomentPoint, m: &Tile) -> Q {
    let f = facet(m);
    &a.xi1 * q(f.normal.0) + &a.xi2 * q(f.normal.1) + &a.eta * q(f.normal.2) + q(f.offset)
}

/// The facets m whose disc area is at most `cutoff`, sorted by (area, m).
pub fn disc_classes(a: &MomentPoint, cutoff: &Q) -> Vec<(Tile, Q)> {
    // With X = |ξ|∞, area ≥ η + N − 2X√N since (|m₁|+|m₂|)² ≤ 4N(m).
    let x = q_to_f64(&a.xi().max_abs());
    let slack = (q_to_f64(cutoff) - q_to_f64(&a.eta)).max(0.0);
    let r = x + (x * x + slack).sqrt();
    let bound = Q::from_integer(BigInt::from((r * r).ceil() as i64 + 2));
    let mut out: Vec<(Tile, Q)> = enumerate_norm_ball(&bound)
        .into_iter()
        .map(|m| {
            let t = Tile::new(m.n1, m.n2);
            let ar = disc_area_unchecked(a, &t);
            (t, ar)
        })
        .filter(|(_, ar)| ar <= cutoff)
        .collect();
    out.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    out
}

/// Σ_m τ^area(A, m) over facets with area ≤ cutoff, one disc per class.
pub fn disc_series(a: &MomentPoint, cutoff: &Q) -> Result<TauSeries> {
    if !polytope_interior(a) {
        return Err(Error::NotInterior);
    }
    Ok(TauSeries::from_terms(
        disc_classes(a, cutoff).into_iter().map(|(_, ar)| (ar, q(1))),
        cutoff.clone(),
    ))
}

/// τ^η·s(x) for the level-one theta section s, with the monomial x^k
/// specialized to τ^⟨ξ,k⟩: the theta-function side of the disc count,
/// built from the section's own terms rather than from facets.
pub fn theta_at_moment(a: &MomentPoint, cutoff: &Q) -> Result<TauSeries> {
    if !polytope_interior(a) {
        return Err(Error::NotInterior);
    }
    // A term τ^(N(w) − ⟨ξ,w⟩) with X = |ξ|∞ has exponent ≥ N − 2X√N, so
    // N(w) ≤ r² with r as in `disc_classes` covers every term ≤ cutoff.
    let x = q_to_f64(&a.xi().max_abs());
    let slack = (q_to_f64(cutoff) - q_to_f64(&a.eta)).max(0.0);
    let r = x + (x * x + slack).sqrt();
    let depth = Q::from_integer(BigInt::from((r * r).ceil() as i64 + 2));
    let s = theta_section(&LatticeVector::ZERO, 1, &depth)?;
    let mut out = TauSeries::zero(cutoff.clone());
    for (k, c) in &s.coeffs {
        let pairing = &a.xi1 * q(k.0) + &a.xi2 * q(k.1);
        for (e, coef) in c.terms() {
            let ex = e + &pairing + &a.eta;
            if &ex <= cutoff {
                out.add_term(ex, coef.clone());
            }
        }
    }
    Ok(out)
}

/// The class of the sphere over a honeycomb edge and its divisor degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCurve {
    pub edge: (Tile, Tile),
    pub degrees: BTreeMap<Tile, i64>,
}

/// ν_c + ν_c′ − ν_a − ν_b = 0 where c, c′ are the two tiles adjacent to
/// both a and b.
pub fn wall_degrees(a: &Tile, b: &Tile) -> Result<WallCurve> {
    if !a.is_adjacent(b) {
        return Err(Error::NotAdjacent(a.m1, a.m2, b.m1, b.m2));
    }
    let common: Vec<Tile> = ADJ
        .iter()
        .map(|&(u1, u2)| Tile::new(a.m1 + u1, a.m2 + u2))
        .filter(|c| c.is_adjacent(b))
        .collect();
    debug_assert_eq!(common.len(), 2);
    let mut degrees = BTreeMap::new();
    degrees.insert(*a, -1);
    degrees.insert(*b, -1);
    for c in common {
        degrees.insert(c, 1);
    }
    Ok(WallCurve { edge: (*a, *b), degrees })
}

/// Σ_t D_t·ν_t over the facet normals, zero for every wall relation.
pub fn relation_residual(degrees: &BTreeMap<Tile, i64>) -> (i64, i64, i64) {
    degrees.iter().fold((0, 0, 0), |acc, (t, d)| {
        let n = facet(t).normal;
        (acc.0 + d * n.0, acc.1 + d * n.1, acc.2 + d * n.2)
    })
}

/// A nonnegative combination of wall curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveClass {
    pub curves: Vec<((Tile, Tile), u32)>,
    pub degrees: BTreeMap<Tile, i64>,
    pub total_degree: u32,
}

/// Wall curves whose four tiles all satisfy N(m) ≤ radius.
pub fn window_walls(radius: i64) -> Vec<WallCurve> {
    let tiles: Vec<Tile> = enumerate_norm_ball(&q(radius)).iter().map(|v| Tile::new(v.n1, v.n2)).collect();
    let mut out = Vec::new();
    for a in &tiles {
        for &(u1, u2) in &ADJ {
            let b = Tile::new(a.m1 + u1, a.m2 + u2);
            if b <= *a {
                continue;
            }
            let w = wall_degrees(a, &b).expect("adjacent");
            if w.degrees.keys().all(|t| t.vector().norm() <= radius) {
                out.push(w);
            }
        }
    }
    out.sort_by_key(|w| w.edge);
    out
}

/// All classes of total degree ≤ max_degree built from window walls that
/// satisfy D_I·d < 0 and D_I′·d ≥ 0 for I′ ≠ I.
///
/// Depth-first over multisets of walls. A wall raises at most two degrees,
/// so a partial class with more negative deficit off I than twice the
/// remaining degree cannot be completed.
pub fn window_candidates(i: &Tile, radius: i64, max_degree: u32) -> Vec<EffectiveClass> {
    let walls = window_walls(radius);
    let mut index: HashMap<Tile, usize> = HashMap::new();
    let mut tiles: Vec<Tile> = Vec::new();
    for w in &walls {
        for t in w.degrees.keys() {
            if !index.contains_key(t) {
                index.insert(*t, tiles.len());
                tiles.push(*t);
            }
        }
    }
    let Some(&ii) = index.get(i) else { return Vec::new() };
    let wall_idx: Vec<Vec<(usize, i64)>> = walls
        .iter()
        .map(|w| w.degrees.iter().map(|(t, d)| (index[t], *d)).collect())
        .collect();

    struct St<'a> {
        walls: &'a [Vec<(usize, i64)>],
        deg: Vec<i64>,
        deficit: i64,
        mult: Vec<u32>,
        ii: usize,
        max: u32,
        found: Vec<Vec<u32>>,
    }
    fn apply(s: &mut St, w: usize, sign: i64) {
        for &(t, d) in &s.walls[w] {
            if t != s.ii {
                let before = (-s.deg[t]).max(0);
                s.deg[t] += sign * d;
                s.deficit += (-s.deg[t]).max(0) - before;
            } else {
                s.deg[t] += sign * d;
            }
        }
    }
    fn dfs(s: &mut St, start: usize, used: u32) {
        if used > 0 && s.deficit == 0 && s.deg[s.ii] < 0 {
            s.found.push(s.mult.clone());
        }
        if used == s.max {
            return;
        }
        for w in start..s.walls.len() {
            apply(s, w, 1);
            if s.deficit <= 2 * (s.max - used - 1) as i64 {
                s.mult[w] += 1;
                dfs(s, w, used + 1);
                s.mult[w] -= 1;
            }
            apply(s, w, -1);
        }
    }
    let mut st = St {
        walls: &wall_idx,
        deg: vec![0; tiles.len()],
        deficit: 0,
        mult: vec![0; walls.len()],
        ii,
        max: max_degree,
        found: Vec::new(),
    };
    dfs(&mut st, 0, 0);
    st.found
        .into_iter()
        .map(|m| {
            let mut degrees = BTreeMap::new();
            let mut curves = Vec::new();
            for (w, &k) in m.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                curves.push((walls[w].edge, k));
                for (t, d) in &walls[w].degrees {
                    *degrees.entry(*t).or_insert(0) += d * k as i64;
                }
            }
            degrees.retain(|_, d| *d != 0);
            let total_degree = m.iter().sum();
            EffectiveClass { curves, degrees, total_degree }
        })
        .collect()
}

/// One admitted term of g_I.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTerm {
    pub class: EffectiveClass,
    pub coefficient: Q,
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The coefficient (−1)^(D_I·d)·(−D_I·d − 1)!/∏(D_I′·d)!, or `None` when
/// the sign conditions fail.
pub fn g_coefficient(i: &Tile, degrees: &BTreeMap<Tile, i64>) -> Option<Q> {
    let di = degrees.get(i).copied().unwrap_or(0);
    if di >= 0 || degrees.iter().any(|(t, d)| t != i && *d < 0) {
        return None;
    }
    let num = factorial(-di - 1);
    let den = degrees
        .iter()
        .filter(|(t, _)| *t != i)
        .fold(BigInt::one(), |acc, (_, d)| acc * factorial(*d));
    let sign = if di % 2 == 0 { 1 } else { -1 };
    Some(Q::new(num * sign, den))
}

/// Terms of g_I over the candidates. Candidates with a nonzero degree on a
/// tile outside the window N(m) ≤ radius are rejected as incomplete.
pub fn g_i(i: &Tile, candidates: &[EffectiveClass], radius: i64) -> Result<Vec<GTerm>> {
    let mut out = Vec::new();
    for c in candidates {
        if let Some(t) = c.degrees.keys().find(|t| t.vector().norm() > radius) {
            return Err(Error::IncompleteDegrees(format!("tile ({},{})", t.m1, t.m2)));
        }
        if let Some(coefficient) = g_coefficient(i, &c.degrees) {
            out.push(GTerm { class: c.clone(), coefficient });
        }
    }
    Ok(out)
}

/// exp(g_I) with every wall curve weighted τ, truncated at max_order.
pub fn sphere_count_c_from_terms(terms: &[GTerm], max_order: &Q) -> TauSeries {
    let mut g = TauSeries::zero(max_order.clone());
    for t in terms {
        g.add_term(q(t.class.total_degree as i64), t.coefficient.clone());
    }
    series_exp(&g)
}

/// exp of a series with no constant term.
pub fn series_exp(g: &TauSeries) -> TauSeries {
    let c = g.cutoff().clone();
    let mut out = TauSeries::one(c.clone());
    let mut power = TauSeries::one(c.clone());
    let mut fact = Q::one();
    let mut k = 1i64;
    loop {
        power = power.mul(g).truncate(&c);
        if power.is_zero() {
            break;
        }
        fact *= q(k);
        out = out.add(&power.scale(&(Q::one() / &fact)));
        k += 1;
    }
    out
}

/// The sphere count C = exp(g_I) for I = (0,0) in the window of the given
/// radius, as a series through `max_order`.
pub fn sphere_count_c(max_order: &Q, radius: i64) -> (TauSeries, Vec<GTerm>) {
    let i = Tile::new(0, 0);
    let deg = max_order.floor().to_integer().to_u32().unwrap_or(0);
    let cands = window_candidates(&i, radius, deg);
    let terms = g_i(&i, &cands, radius).expect("window candidates are complete");
    (sphere_count_c_from_terms(&terms, max_order), terms)
}

/// Coefficients D_ẽ(e) of multiplication by s: s·s_{e,l−1} = Σ_ẽ D_ẽ(e)·s_{ẽ,l}.
#[derive(Debug, Clone)]
pub struct DifferentialTable {
    pub l: i64,
    pub cutoff: Q,
    pub entries: BTreeMap<LatticeVector, BTreeMap<LatticeVector, TauSeries>>,
}

impl DifferentialTable {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .entries
            .iter()
            .map(|(e, row)| {
                let out: Vec<Value> = row
                    .iter()
                    .map(|(et, s)| json!({"e_out": [et.n1, et.n2], "series": s.to_json()}))
                    .collect();
                json!({"e_in": [e.n1, e.n2], "out": out})
            })
            .collect();
        json!({"l": self.l, "cutoff": fmt_q(&self.cutoff), "entries": rows})
    }
}

/// D_ẽ(e) = Σ over η ≡ e (mod l−1) of τ^((l/(l−1))·N(η − (l−1)ẽ/l)).
///
/// With v = lη − (l−1)ẽ the exponent is N(v)/(l(l−1)), so the terms up to
/// `cutoff` come from the norm ball N(v) ≤ cutoff·l(l−1).
pub fn differential_table(i: i64, j: i64, cutoff: &Q) -> Result<DifferentialTable> {
    let l = j - i;
    if l < 2 {
        return Err(Error::BadTriple(i, i + 1, j));
    }
    let d = l * (l - 1);
    let ball = enumerate_norm_ball(&(cutoff * q(d)));
    let mut entries = BTreeMap::new();
    for e in coset_reps(l - 1)? {
        let mut row = BTreeMap::new();
        for et in coset_reps(l)? {
            let mut s = TauSeries::zero(cutoff.clone());
            for v in &ball {
                let (a, b) = (v.n1 + (l - 1) * et.n1, v.n2 + (l - 1) * et.n2);
                if a.rem_euclid(l) != 0 || b.rem_euclid(l) != 0 {
                    continue;
                }
                let eta = LatticeVector::new(a / l, b / l);
                if (eta.n1 - e.n1).rem_euclid(l - 1) == 0 && (eta.n2 - e.n2).rem_euclid(l - 1) == 0 {
                    s.add_term(Q::new(v.norm().into(), d.into()), q(1));
                }
            }
            row.insert(et, s);
        }
        entries.insert(e, row);
    }
    Ok(DifferentialTable { l, cutoff: cutoff.clone(), entries })
}

/// n_e(l, x) = Σ_n τ^(l·N(λξ + n − e/l)) with ξ = log_τ|x| in std coordinates.
///
/// Sums the points with N ≤ depth and bounds the rest.
pub fn n_function(e: &LatticeVector, l: i64, xi: (f64, f64), tau: f64) -> Approx {
    let c = (
        (2.0 * xi.0 - xi.1) / 3.0 - e.n1 as f64 / l as f64,
        (2.0 * xi.1 - xi.0) / 3.0 - e.n2 as f64 / l as f64,
    );
    // τ^(l·depth) below 1e−40 of the leading term.
    let depth = (40.0 * std::f64::consts::LN_10 / (-tau.ln() * l as f64)).ceil() + 1.0;
    let r = (4.0 * depth / 3.0).sqrt().ceil() as i64 + 1;
    let (b1, b2) = (c.0.round() as i64, c.1.round() as i64);
    let mut sum = 0.0;
    let mut count = 0.0;
    for n1 in (-b1 - r)..=(-b1 + r) {
        for n2 in (-b2 - r)..=(-b2 + r) {
            let (y1, y2) = (c.0 + n1 as f64, c.1 + n2 as f64);
            let nn = y1 * y1 + y1 * y2 + y2 * y2;
            if nn <= depth {
                sum += tau.powf(l as f64 * nn);
                count += 1.0;
            }
        }
    }
    let tail = norm_tail_bound(tau, 1.0 / l as f64, 0.0, depth as u64);
    Approx::new(sum, tail + 4.0 * count * f64::EPSILON * sum)
}

/// Leibniz-rule comparison for one input rep.
#[derive(Debug, Clone)]
pub struct LeibnizItem {
    pub e: LatticeVector,
    pub lhs: Approx,
    pub rhs: Approx,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct LeibnizReport {
    pub i: i64,
    pub j: i64,
    pub x: (f64, f64),
    pub tau: f64,
    pub cutoff: Q,
    pub c_series: TauSeries,
    pub items: Vec<LeibnizItem>,
}

impl LeibnizReport {
    pub fn status(&self) -> Status {
        self.items.iter().fold(Status::Pass, |s, it| s.combine(it.status))
    }

    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .items
            .iter()
            .map(|it| {
                json!({
                    "e": [it.e.n1, it.e.n2],
                    "lhs": fnum(it.lhs.value),
                    "rhs": fnum(it.rhs.value),
                    "residual": fnum((it.lhs.value - it.rhs.value).abs()),
                    "bound": fnum(it.lhs.err + it.rhs.err),
                    "status": it.status.as_str(),
                })
            })
            .collect();
        json!({
            "i": self.i, "j": self.j,
            "x": [fnum(self.x.0), fnum(self.x.1)],
            "tau": fnum(self.tau),
            "cutoff": fmt_q(&self.cutoff),
            "sphere_count": self.c_series.to_json(),
            "items": items,
            "status": self.status().as_str(),
        })
    }
}

/// Relative size of the error bound above which a check is indeterminate.
pub const LEIBNIZ_REL_BOUND: f64 = 1e-9;

/// Check C·s(x)·n_e(l−1, x) = Σ_ẽ C·τ^κ(ξ)·D_ẽ(e)·n_ẽ(l, x) at positive real x.
///
/// The left side evaluates s by its x-expansion; the right side uses the
/// formal table, whose dropped terms are bounded by a norm-form tail.
pub fn leibniz_check(
    i: i64,
    j: i64,
    x: (f64, f64),
    tau: f64,
    cutoff: &Q,
    c_series: &TauSeries,
) -> Result<LeibnizReport> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::TauOutOfRange(tau));
    }
    let l = j - i;
    let table = differential_table(i, j, cutoff)?;
    let xi = (x.0.ln() / tau.ln(), x.1.ln() / tau.ln());
    let lxi = ((2.0 * xi.0 - xi.1) / 3.0, (2.0 * xi.1 - xi.0) / 3.0);
    let kap = -(lxi.0 * lxi.0 + lxi.0 * lxi.1 + lxi.1 * lxi.1);
    let c = Approx::exact(c_series.eval(tau));
    // Deepen the expansion of s until its tail is negligible at this x.
    let mut sc = cutoff.clone();
    let s_val = loop {
        let s = theta_section(&LatticeVector::ZERO, 1, &sc)?;
        let v = evaluate_numeric(&s, x, tau)?;
        if v.err <= 1e-18 * v.value.abs() || sc > q(400) {
            break v;
        }
        sc *= q(2);
    };
    let d = l * (l - 1);
    let k0 = (cutoff * q(d)).floor().to_integer().to_u64().unwrap_or(0) + 1;
    let d_tail = norm_tail_bound(tau, d as f64, 0.0, k0);
    let mut items = Vec::new();
    for e in coset_reps(l - 1)? {
        check_rep(&e, l - 1)?;
        let lhs = c.mul(s_val).mul(n_function(&e, l - 1, xi, tau));
        let mut rhs = Approx::exact(0.0);
        for (et, dser) in &table.entries[&e] {
            let dv = Approx::new(dser.eval(tau), d_tail + 1e-15 * dser.eval(tau));
            let term = c.scale(tau.powf(kap)).mul(dv).mul(n_function(et, l, xi, tau));
            rhs = rhs.add(term);
        }
        let resid = (lhs.value - rhs.value).abs();
        let bound = lhs.err + rhs.err;
        let scale = lhs.value.abs().max(rhs.value.abs()).max(f64::MIN_POSITIVE);
        let status = if resid > bound + 8.0 * f64::EPSILON * scale {
            Status::Fail
        } else if bound > LEIBNIZ_REL_BOUND * scale {
            Status::Indeterminate
        } else {
            Status::Pass
        };
        items.push(LeibnizItem { e, lhs, rhs, status });
    }
    Ok(LeibnizReport { i, j, x, tau, cutoff: cutoff.clone(), c_series: c_series.clone(), items })
}

/// τ^(κ(ξ)) needs ξ = log_τ|x|; exposed for callers building samples.
pub fn kappa_exponent(xi: &RationalVector2) -> Q {
    kappa(xi)
}

/// λ(ξ) for a std-coordinate point; convenience re-export.
pub fn lambda_of(xi: &RationalVector2) -> RationalVector2 {
    lambda(xi)
}

/// Whether every admitted term satisfies the sign conditions and has a
/// finite rational coefficient.
pub fn terms_well_formed(i: &Tile, terms: &[GTerm]) -> bool {
    terms.iter().all(|t| {
        let di = t.class.degrees.get(i).copied().unwrap_or(0);
        di < 0
            && t.class.degrees.iter().all(|(u, d)| u == i || *d >= 0)
            && !t.coefficient.is_zero()
            && t.coefficient.denom().is_positive()
    })
}
