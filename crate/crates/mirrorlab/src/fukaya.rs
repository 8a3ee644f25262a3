//! Linear Lagrangians ℓ_k in the fiber torus: intersection points,
//! holomorphic triangles in the universal cover and the μ² structure
//! constants, checked against the theta-section product.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{
    check_rep, coset_reps, enumerate_norm_ball, fmt_q, lambda, q, LatticeVector, RationalVector2, Q,
};
use crate::series::{section_mul_decompose, theta_section, TauSeries};

/// A point of ℓ_i ∩ ℓ_j, indexed by a representative e mod (j − i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub i: i64,
    pub j: i64,
    pub e: LatticeVector,
}

impl IntersectionPoint {
    /// (ξ, θ) = (γ_e/(j−i), −i·λ(γ_e/(j−i)) mod Z²), ξ in std coordinates.
    pub fn position(&self) -> (RationalVector2, RationalVector2) {
        let d = q(self.j - self.i);
        let xi = self.e.std_q().scale(&(q(1) / &d));
        let th = lambda(&xi).scale(&q(-self.i));
        let fr = |x: &Q| x - x.floor();
        (xi, RationalVector2::new(fr(&th.a), fr(&th.b)))
    }
}

pub fn intersection_points(i: i64, j: i64) -> Result<Vec<IntersectionPoint>> {
    if i == j {
        return Err(Error::NonTransverse(i));
    }
    let d = (j - i).abs();
    Ok(coset_reps(d)?
        .into_iter()
        .map(|e| IntersectionPoint { i, j, e })
        .collect())
}

/// Total rank of HF(ℓ_i, ℓ_j): (j−i)² when transverse, 4 = rank H(T²) otherwise.
pub fn hom_rank(i: i64, j: i64) -> i64 {
    if i == j {
        4
    } else {
        (j - i) * (j - i)
    }
}

/// A point of R⁴ = (ξ, θ), ξ in std coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point4 {
    pub xi: RationalVector2,
    pub theta: RationalVector2,
}

impl Point4 {
    fn sub(&self, o: &Self) -> Self {
        Self { xi: self.xi.sub(&o.xi), theta: self.theta.sub(&o.theta) }
    }

    fn add(&self, o: &Self) -> Self {
        Self { xi: self.xi.add(&o.xi), theta: self.theta.add(&o.theta) }
    }

    /// The vector (ζ, −s·λ(ζ)) tangent to ℓ_s.
    fn along(s: i64, zeta: &RationalVector2) -> Self {
        Self { xi: zeta.clone(), theta: lambda(zeta).scale(&q(-s)) }
    }
}

/// ω = dξ∧dθ on two vectors of R⁴.
pub fn omega(a: &Point4, b: &Point4) -> Q {
    a.xi.dot(&b.theta) - a.theta.dot(&b.xi)
}

/// A triangle with corners on ℓ_i∩ℓ_k, ℓ_i∩ℓ_j and ℓ_j∩ℓ_k, lifted to
/// the universal cover. `e` indexes the output corner mod l = k − i and
/// `gamma_a` is the lattice translate selecting the lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleDatum {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub e: LatticeVector,
    pub gamma_a: LatticeVector,
}

impl TriangleDatum {
    fn levels(&self) -> (i64, i64, i64) {
        (self.k - self.i, self.j - self.i, self.k - self.j)
    }

    /// ξ₀ = (l″/(l·l′))γ_e + γ_A/l′ in std coordinates.
    pub fn xi0(&self) -> RationalVector2 {
        let (l, l1, l2) = self.levels();
        self.e
            .std_q()
            .scale(&Q::new(l2.into(), (l * l1).into()))
            .add(&self.gamma_a.std_q().scale(&Q::new(1.into(), l1.into())))
    }

    /// Vertices q ∈ ℓ_i∩ℓ_k, p₁ ∈ ℓ_i∩ℓ_j, p₂ ∈ ℓ_j∩ℓ_k.
    pub fn vertices(&self) -> [Point4; 3] {
        let (l, _, l2) = self.levels();
        let ge = self.e.std_q().scale(&Q::new(1.into(), l.into()));
        let qv = Point4 { xi: ge.clone(), theta: lambda(&ge).scale(&q(-self.k)) };
        let x0 = self.xi0();
        let p1 = qv.add(&Point4::along(self.i, &x0));
        let xp = x0.scale(&Q::new((-l).into(), l2.into()));
        let p2 = p1.add(&Point4::along(self.j, &xp));
        [qv, p1, p2]
    }

    /// Edge vectors q→p₁, p₁→p₂, p₂→q.
    pub fn edges(&self) -> [Point4; 3] {
        let [a, b, c] = self.vertices();
        [b.sub(&a), c.sub(&b), a.sub(&c)]
    }

    /// The corner reps read off the geometry: l′·p₁ gives e′, l″·p₂ gives e″.
    pub fn input_reps(&self) -> (LatticeVector, LatticeVector) {
        let (_, l1, l2) = self.levels();
        let [_, p1, p2] = self.vertices();
        let read = |v: &RationalVector2, m: i64| {
            let s = v.scale(&q(m));
            let n = lambda(&s);
            assert!(n.a.is_integer() && n.b.is_integer());
            let (a, b) = (n.a.to_integer(), n.b.to_integer());
            let m = num_bigint::BigInt::from(m);
            let r = |x: num_bigint::BigInt| -> i64 {
                use num_integer::Integer;
                use num_traits::ToPrimitive;
                x.mod_floor(&m).to_i64().unwrap()
            };
            LatticeVector::new(r(a), r(b))
        };
        (read(&p1.xi, l1), read(&p2.xi, l2))
    }
}

/// Symplectic area |½ω(q→p₁, q→p₂)| computed from the vertices alone.
pub fn triangle_area_oracle(t: &TriangleDatum) -> Q {
    let [a, b, c] = t.vertices();
    (omega(&b.sub(&a), &c.sub(&a)) / q(2)).abs()
}

/// The closed-form area −(l/(l′l″))·κ((l″/l)γ_e + γ_A) = N(l″e + lγ_A)/(l·l′·l″).
pub fn triangle_area_closed(t: &TriangleDatum) -> Q {
    let (l, l1, l2) = t.levels();
    let v = t.e.scale(l2).add(&t.gamma_a.scale(l));
    Q::new(v.norm().into(), (l * l1 * l2).into())
}

fn check_triple(i: i64, j: i64, k: i64) -> Result<()> {
    if i < j && j < k {
        Ok(())
    } else {
        Err(Error::BadTriple(i, j, k))
    }
}

/// Whether γ_A pairs the inputs (e′, e″) with output e:
/// γ_A ≡ e′ − e (mod l′) and γ_A ≡ −e″ (mod l″).
pub fn compatible(
    e: &LatticeVector,
    e1: &LatticeVector,
    e2: &LatticeVector,
    g: &LatticeVector,
    l1: i64,
    l2: i64,
) -> bool {
    let m = |x: i64, d: i64| x.rem_euclid(d) == 0;
    m(g.n1 - e1.n1 + e.n1, l1)
        && m(g.n2 - e1.n2 + e.n2, l1)
        && m(g.n1 + e2.n1, l2)
        && m(g.n2 + e2.n2, l2)
}

/// μ²(e′, e″) = Σ_e C_e·e, each C_e summing τ^area over compatible triangles.
pub fn mu2_closed(
    i: i64,
    j: i64,
    k: i64,
    e1: &LatticeVector,
    e2: &LatticeVector,
    cutoff: &Q,
) -> Result<BTreeMap<LatticeVector, TauSeries>> {
    check_triple(i, j, k)?;
    let (l, l1, l2) = (k - i, j - i, k - j);
    check_rep(e1, l1)?;
    check_rep(e2, l2)?;
    let denom = l * l1 * l2;
    let ball = enumerate_norm_ball(&(cutoff * q(denom)));
    let mut out = BTreeMap::new();
    for e in coset_reps(l)? {
        let mut s = TauSeries::zero(cutoff.clone());
        let base = e.scale(l2);
        for v in &ball {
            let d = v.sub(&base);
            if d.n1.rem_euclid(l) != 0 || d.n2.rem_euclid(l) != 0 {
                continue;
            }
            let g = LatticeVector::new(d.n1 / l, d.n2 / l);
            if compatible(&e, e1, e2, &g, l1, l2) {
                s.add_term(Q::new(v.norm().into(), denom.into()), q(1));
            }
        }
        out.insert(e, s);
    }
    Ok(out)
}

/// Comparison of the product decomposition and μ² for one input pair.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub e1: LatticeVector,
    pub e2: LatticeVector,
    pub per_rep: BTreeMap<LatticeVector, bool>,
    pub first_discrepancy: Option<(LatticeVector, Q, Q, Q)>,
}

impl PairReport {
    pub fn matches(&self) -> bool {
        self.per_rep.values().all(|&b| b)
    }
}

#[derive(Debug, Clone)]
pub struct FunctorReport {
    pub triple: (i64, i64, i64),
    pub cutoff: Q,
    pub pairs: Vec<PairReport>,
}

impl FunctorReport {
    pub fn all_match(&self) -> bool {
        self.pairs.iter().all(|p| p.matches())
    }

    pub fn to_json(&self) -> Value {
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .map(|p| {
                let reps: Vec<Value> = p
                    .per_rep
                    .iter()
                    .map(|(e, ok)| json!({"e": [e.n1, e.n2], "matches": ok}))
                    .collect();
                let disc = p.first_discrepancy.as_ref().map(|(e, x, a, b)| {
                    json!({"e": [e.n1, e.n2], "exponent": fmt_q(x), "product": fmt_q(a), "mu2": fmt_q(b)})
                });
                json!({
                    "e_in": [[p.e1.n1, p.e1.n2], [p.e2.n1, p.e2.n2]],
                    "matches": p.matches(),
                    "reps": reps,
                    "first_discrepancy": disc,
                })
            })
            .collect();
        json!({
            "triple": [self.triple.0, self.triple.1, self.triple.2],
            "cutoff": fmt_q(&self.cutoff),
            "all_match": self.all_match(),
            "pairs": pairs,
        })
    }
}

/// Compare s_{e′,l′}·s_{e″,l″} decomposed in the level-l basis against
/// μ²(e′, e″) for every basis pair, exactly up to `cutoff`.
pub fn functor_check(i: i64, j: i64, k: i64, cutoff: &Q) -> Result<FunctorReport> {
    check_triple(i, j, k)?;
    let (l, l1, l2) = (k - i, j - i, k - j);
    // The decomposition loses up to the deep-hole shift l/3 of cutoff.
    let work = cutoff + q((l + 2) / 3 + 1);
    let left: Vec<_> = coset_reps(l1)?
        .into_iter()
        .map(|e| theta_section(&e, l1, &work).map(|s| (e, s)))
        .collect::<Result<_>>()?;
    let right: Vec<_> = coset_reps(l2)?
        .into_iter()
        .map(|e| theta_section(&e, l2, &work).map(|s| (e, s)))
        .collect::<Result<_>>()?;
    use rayon::prelude::*;
    let jobs: Vec<_> = left
        .iter()
        .flat_map(|a| right.iter().map(move |b| (a, b)))
        .collect();
    let pairs = jobs
        .par_iter()
        .map(|((e1, s1), (e2, s2))| -> Result<PairReport> {
            let dec = section_mul_decompose(s1, s2, &work)?;
            let mu = mu2_closed(i, j, k, e1, e2, cutoff)?;
            let mut per_rep = BTreeMap::new();
            let mut first = None;
            for (e, m) in &mu {
                let d = dec[e].truncate(cutoff);
                debug_assert!(d.cutoff() >= cutoff);
                let diff = d.first_difference(m);
                if let (None, Some((x, a, b))) = (&first, &diff) {
                    first = Some((*e, x.clone(), a.clone(), b.clone()));
                }
                per_rep.insert(*e, diff.is_none() && d.cutoff() == m.cutoff());
            }
            Ok(PairReport { e1: *e1, e2: *e2, per_rep, first_discrepancy: first })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctorReport { triple: (i, j, k), cutoff: cutoff.clone(), pairs })
}

/// All triangles with area ≤ cutoff for the triple, enumerated over (e, γ_A)
/// without any compatibility filter; inputs are read off geometrically.
pub fn enumerate_triangles(i: i64, j: i64, k: i64, cutoff: &Q) -> Result<Vec<TriangleDatum>> {
    check_triple(i, j, k)?;
    let (l, l1, l2) = (k - i, j - i, k - j);
    let ball = enumerate_norm_ball(&(cutoff * q(l * l1 * l2)));
    let mut out = Vec::new();
    for e in coset_reps(l)? {
        let base = e.scale(l2);
        for v in &ball {
            let d = v.sub(&base);
            if d.n1.rem_euclid(l) == 0 && d.n2.rem_euclid(l) == 0 {
                let gamma_a = LatticeVector::new(d.n1 / l, d.n2 / l);
                out.push(TriangleDatum { i, j, k, e, gamma_a });
            }
        }
    }
    Ok(out)
}

/// Edge vectors of a triangle sum to zero and each lies along its Lagrangian.
pub fn edges_consistent(t: &TriangleDatum) -> bool {
    let [a, b, c] = t.edges();
    let s = a.add(&b).add(&c);
    let on = |p: &Point4, s: i64| p.theta == lambda(&p.xi).scale(&q(-s));
    s.xi.a.is_zero() && s.xi.b.is_zero() && s.theta.a.is_zero() && s.theta.b.is_zero()
        && on(&a, t.i)
        && on(&b, t.j)
        && on(&c, t.k)
}
