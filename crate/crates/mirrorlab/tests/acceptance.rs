//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed whether it
//! passes or not; the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mirrorlab::charts::{chart, ChartLabel, MonoMap, BASE_CHARTS, HEX_GENERATOR};
use mirrorlab::cli::{monodromy_corners, monodromy_sample, seven_deviation, SEVEN_TOL};
use mirrorlab::fukaya::{edges_consistent, enumerate_triangles, functor_check, mu2_closed, triangle_area_closed, triangle_area_oracle};
use mirrorlab::gw::{differential_table, disc_series, leibniz_check, sphere_count_c, terms_well_formed, theta_at_moment, window_walls};
use mirrorlab::kahler::sampling::{certify, SampleSpec, FD_TOL};
use mirrorlab::kahler::{c_base_default, harmonic_difference_check, monodromy_class, transport_fractions, FiberPoint, Region};
use mirrorlab::lattice::{kappa, q, qf, LatticeVector, MomentPoint, RationalVector2, Q};
use mirrorlab::report::Status;
use mirrorlab::series::{section_mul_decompose, theta_section, TauSeries};
use mirrorlab::tropical::{facet, trop_phi, Tile};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn norm(a: i64, b: i64) -> i64 {
    a * a + a * b + b * b
}

/// Count of lattice vectors with N(n) = k for each k ≤ kmax, by box scan.
fn shell_counts(kmax: i64) -> BTreeMap<i64, i64> {
    let r = 2 * ((kmax as f64).sqrt().ceil() as i64) + 1;
    let mut out = BTreeMap::new();
    for a in -r..=r {
        for b in -r..=r {
            let n = norm(a, b);
            if n <= kmax {
                *out.entry(n).or_insert(0) += 1;
            }
        }
    }
    out
}

fn functor_identity() -> Outcome {
    let cutoff = q(20);
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 4)] {
        match functor_check(i, j, k, &cutoff) {
            Ok(r) => {
                ok &= r.all_match();
                detail.push(format!("({i},{j},{k}):{} pairs {}", r.pairs.len(), if r.all_match() { "ok" } else { "MISMATCH" }));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("({i},{j},{k}): error {e}"));
            }
        }
    }
    (ok, detail.join(", "))
}

fn triangle_areas() -> Outcome {
    let tris = match enumerate_triangles(0, 1, 2, &q(12)) {
        Ok(t) => t,
        Err(e) => return (false, format!("error {e}")),
    };
    let bad = tris.iter().filter(|t| triangle_area_oracle(t) != triangle_area_closed(t)).count();
    let open = tris.iter().filter(|t| !edges_consistent(t)).count();
    (!tris.is_empty() && bad == 0 && open == 0, format!("{} triangles, {bad} area mismatches, {open} unclosed", tris.len()))
}

/// Structure constant of s·s at the least-norm key of class `e` mod 2, by a
/// direct double sum over pairs a + b = w₀ with exponent in half-units.
fn brute_structure_constant(e: (i64, i64), max_exp_halves: i64) -> BTreeMap<i64, i64> {
    let mut w0 = (0, 0);
    let mut best = i64::MAX;
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            if (a - e.0).rem_euclid(2) == 0 && (b - e.1).rem_euclid(2) == 0 && norm(a, b) < best {
                best = norm(a, b);
                w0 = (a, b);
            }
        }
    }
    let mut out = BTreeMap::new();
    let r = 12;
    for a1 in -r..=r {
        for a2 in -r..=r {
            let (b1, b2) = (w0.0 - a1, w0.1 - a2);
            let halves = 2 * (norm(a1, a2) + norm(b1, b2)) - norm(w0.0, w0.1);
            if halves <= max_exp_halves {
                *out.entry(halves).or_insert(0) += 1;
            }
        }
    }
    out
}

fn leading_constants() -> Outcome {
    let cutoff = q(10);
    let s = match theta_section(&LatticeVector::ZERO, 1, &cutoff) {
        Ok(s) => s,
        Err(e) => return (false, format!("error {e}")),
    };
    let d = match section_mul_decompose(&s, &s, &cutoff) {
        Ok(d) => d,
        Err(e) => return (false, format!("error {e}")),
    };
    let max_halves = 16;
    let to_halves = |c: &TauSeries| -> BTreeMap<i64, i64> {
        c.terms()
            .iter()
            .filter(|(x, _)| *x <= &qf(max_halves, 2))
            .map(|(x, k)| {
                let h = x * q(2);
                assert!(h.is_integer() && k.is_integer());
                (h.to_integer().try_into().unwrap(), k.to_integer().try_into().unwrap())
            })
            .collect()
    };
    let c00 = to_halves(&d[&LatticeVector::ZERO]);
    let c10 = to_halves(&d[&LatticeVector::new(1, 0)]);
    let brute00 = brute_structure_constant((0, 0), max_halves);
    let brute10 = brute_structure_constant((1, 0), max_halves);
    // Golden prefixes: 1 + 6τ² + 6τ⁶ + 6τ⁸ and 2τ^(1/2).
    let golden00: BTreeMap<i64, i64> = [(0, 1), (4, 6), (12, 6), (16, 6)].into();
    let lead10 = c10.iter().next().map(|(a, b)| (*a, *b));
    let ok = c00 == brute00 && c00 == golden00 && c10 == brute10 && lead10 == Some((1, 2));
    (ok, format!("C00 = {:?}, C10 leading (half-exponent, coeff) = {:?}; brute-force scan agrees: {}", c00, lead10, c00 == brute00 && c10 == brute10))
}

fn disc_theta() -> Outcome {
    let eta = qf(1, 2);
    let a = MomentPoint::new(q(0), q(0), eta.clone());
    let cutoff = &eta + q(15);
    let (disc, theta) = match (disc_series(&a, &cutoff), theta_at_moment(&a, &cutoff)) {
        (Ok(d), Ok(t)) => (d, t),
        _ => return (false, "series construction failed".into()),
    };
    let normalized = disc.shift(&-eta.clone());
    let shells = shell_counts(15);
    let mut ok = disc.agrees_with(&theta);
    for k in 0..=15 {
        ok &= normalized.coeff(&q(k)) == q(*shells.get(&k).unwrap_or(&0));
    }
    ok &= normalized.terms().keys().all(|x| x.is_integer());
    let lead: Vec<String> = normalized.terms().iter().take(5).map(|(x, k)| format!("{k}τ^{x}")).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random_ok = 0;
    for _ in 0..20 {
        let d: i64 = rng.gen_range(1..=12);
        let xi = RationalVector2::new(qf(rng.gen_range(-3 * d..=3 * d), d), qf(rng.gen_range(-3 * d..=3 * d), d));
        let lift = qf(rng.gen_range(1..=36), 12);
        let eta = trop_phi(&xi).value + lift;
        let a = MomentPoint::new(xi.a.clone(), xi.b.clone(), eta.clone());
        let cutoff = &eta + q(8);
        if let (Ok(d), Ok(t)) = (disc_series(&a, &cutoff), theta_at_moment(&a, &cutoff)) {
            let same = d.terms() == t.terms() && !d.is_zero();
            random_ok += same as usize;
        }
    }
    ok &= random_ok == 20;
    (ok, format!("normalized series {} …; random interior A agreeing: {random_ok}/20", lead.join(" + ")))
}

fn brute_phi(xi: &RationalVector2) -> (Q, Vec<LatticeVector>) {
    let mut best: Option<Q> = None;
    let mut arg = Vec::new();
    for a in -15..=15 {
        for b in -15..=15 {
            let v = LatticeVector::new(a, b);
            let val = xi.dot(&RationalVector2::ints(a, b)) - q(norm(a, b));
            match &best {
                Some(m) if &val < m => {}
                Some(m) if &val == m => arg.push(v),
                _ => {
                    best = Some(val);
                    arg = vec![v];
                }
            }
        }
    }
    arg.sort();
    (best.unwrap(), arg)
}

fn tropical_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    let mut oracle_bad = 0;
    for _ in 0..100 {
        let d: i64 = rng.gen_range(1..=24);
        let xi = RationalVector2::new(qf(rng.gen_range(-5 * d..=5 * d), d), qf(rng.gen_range(-5 * d..=5 * d), d));
        let g = LatticeVector::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let gs = g.std_q();
        let lhs = trop_phi(&xi.add(&gs)).value - trop_phi(&xi).value;
        let rhs = -kappa(&gs) + xi.dot(&RationalVector2::ints(g.n1, g.n2));
        bad += (lhs != rhs) as usize;
        let t = trop_phi(&xi);
        oracle_bad += ((t.value, t.maximizers) != brute_phi(&xi)) as usize;
    }
    let vertex = trop_phi(&RationalVector2::ints(1, 1)).maximizers;
    let want = vec![LatticeVector::ZERO, LatticeVector::GAMMA2, LatticeVector::GAMMA1];
    let ok = bad == 0 && oracle_bad == 0 && vertex == want;
    let shown: Vec<(i64, i64)> = vertex.iter().map(|v| (v.n1, v.n2)).collect();
    (ok, format!("100 pairs: {bad} periodicity failures, {oracle_bad} brute-force disagreements; maximizers at (1,1): {shown:?}"))
}

fn metric_certificate() -> Outcome {
    let start = Instant::now();
    let (t, l, p) = (0.1, 40, 17);
    let spec = SampleSpec { t, l, p, seed: 7, per_region: 500, max_batches: 64 };
    let cert = certify(&spec, c_base_default(t, l));
    let secs = start.elapsed().as_secs_f64();
    let (dev, _) = seven_deviation(t, l, p);
    let min_samples = cert.regions.iter().map(|r| r.samples).min().unwrap_or(0);
    let fd = cert.regions.iter().map(|r| r.max_fd_gradient.max(r.max_fd_hessian)).fold(0.0, f64::max);
    let failures: usize = cert.regions.iter().map(|r| r.pd_failures).sum();
    let ok = cert.regions.len() == Region::ALL.len()
        && min_samples >= 500
        && cert.all_pd()
        && cert.fd_ok()
        && fd <= FD_TOL
        && dev <= SEVEN_TOL
        && cert.status() == Status::Pass
        && secs < 60.0;
    (
        ok,
        format!(
            "{} regions, ≥{min_samples} samples each, {failures} non-PD, max FD rel err {fd:.1e}, center deviation {:.2}%, {secs:.1} s",
            cert.regions.len(),
            dev * 100.0
        ),
    )
}

fn monodromy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut max_err = 0.0f64;
    for _ in 0..1000 {
        let lv = [rng.gen_range(-5.0..45.0), rng.gen_range(-5.0..45.0), rng.gen_range(-5.0..45.0)];
        let f = transport_fractions(&FiberPoint::from_logs(lv, 0.1, 40, 17));
        max_err = max_err.max((f.iter().sum::<f64>() - 1.0).abs());
    }
    let corners_ok = monodromy_corners().iter().all(|(_, xi, want)| monodromy_class(xi).ok() == Some(*want));
    let mut anti = 0;
    for k in 0..50 {
        let xi = monodromy_sample(7, k);
        if let (Ok(a), Ok(b)) = (monodromy_class(&xi), monodromy_class(&xi.neg())) {
            anti += (b == (-a.0, -a.1)) as usize;
        }
    }
    let ok = max_err <= 1e-14 && corners_ok && anti == 50;
    (ok, format!("max |Σf − 1| = {max_err:.1e}, corners {}, antisymmetric {anti}/50", if corners_ok { "ok" } else { "WRONG" }))
}

/// Product of the three coordinate monomials with v₀ rewritten as xyz,
/// computed from the raw exponent data.
fn product_exponents(m: &MonoMap) -> (i64, [i64; 3]) {
    let mut t = 0;
    let mut e = [0i64; 3];
    for mono in &m.0 {
        t += mono.t;
        for (k, ek) in e.iter_mut().enumerate() {
            *ek += mono.e[k] + mono.v0;
        }
    }
    (t, e)
}

fn chart_algebra() -> Outcome {
    let g6 = HEX_GENERATOR.pow(6).reduced_eq(&MonoMap::IDENTITY);
    let mut v0_ok = BASE_CHARTS.iter().all(|c| product_exponents(c) == (0, [1, 1, 1]));
    for k in 0..6 {
        for (m1, m2) in [(0, 0), (1, -2), (-3, 2)] {
            v0_ok &= chart(&ChartLabel { m1, m2, k }).map(|c| product_exponents(&c) == (0, [1, 1, 1])).unwrap_or(false);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = FiberPoint::from_logs([rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0], 0.1, 40, 17);
        worst = worst.max(harmonic_difference_check(&q).abs());
    }
    let ok = g6 && v0_ok && worst <= 1e-12;
    (ok, format!("g⁶ = id: {g6}, v₀ preserved in all charts: {v0_ok}, max harmonic difference {worst:.1e}"))
}

fn differential() -> Outcome {
    let cutoff = q(15);
    let mut ok = true;
    let table = match differential_table(0, 2, &cutoff) {
        Ok(t) => t,
        Err(e) => return (false, format!("error {e}")),
    };
    let mut compared = 0;
    for (e, row) in &table.entries {
        let mu = mu2_closed(0, 1, 2, &LatticeVector::ZERO, e, &cutoff).unwrap_or_default();
        ok &= mu.len() == row.len();
        for (et, s) in row {
            ok &= mu.get(et) == Some(s);
            compared += 1;
        }
    }
    let (c3, _) = sphere_count_c(&q(3), 9);
    let mut statuses = Vec::new();
    for j in [2, 3] {
        match leibniz_check(0, j, (1.0, 1.0), 0.1, &cutoff, &c3) {
            Ok(r) => {
                ok &= r.status() == Status::Pass;
                statuses.push(format!("(0,{j}) {}", r.status().as_str()));
            }
            Err(e) => {
                ok = false;
                statuses.push(format!("(0,{j}) error {e}"));
            }
        }
    }
    (ok, format!("{compared} table entries equal to triangle counts; Leibniz {}", statuses.join(", ")))
}

fn factorial(n: i64) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * q(k))
}

fn sphere_count() -> Outcome {
    let (c, terms) = sphere_count_c(&q(4), 9);
    let i = Tile::new(0, 0);
    let constant = c.coeff(&q(0)).is_one() && c.terms().keys().all(|x| !x.is_negative());
    let signs = terms_well_formed(&i, &terms);
    // Coefficients recomputed from the degrees.
    let coeff_ok = terms.iter().all(|t| {
        let di = t.class.degrees[&i];
        let mut v = factorial(-di - 1);
        if di % 2 != 0 {
            v = -v;
        }
        for (u, d) in &t.class.degrees {
            if u != &i {
                v /= factorial(*d);
            }
        }
        v == t.coefficient && !v.is_zero()
    });
    let walls = window_walls(9);
    let kernel_ok = walls.iter().all(|w| {
        let mut s = (0i64, 0i64, 0i64);
        for (u, d) in &w.degrees {
            let n = facet(u).normal;
            s = (s.0 + d * n.0, s.1 + d * n.1, s.2 + d * n.2);
        }
        s == (0, 0, 0) && w.degrees.values().filter(|d| **d != 0).count() == 4
    });
    let ok = constant && signs && coeff_ok && kernel_ok;
    let shown: Vec<String> = c.terms().iter().map(|(x, k)| format!("{k}τ^{x}")).collect();
    (
        ok,
        format!(
            "C = {} (higher terms depend on the window, reported only); {} g-terms well formed: {}; {} walls in kernel: {kernel_ok}",
            shown.join(" + "),
            terms.len(),
            signs && coeff_ok,
            walls.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("functor identity at cutoff 20", functor_identity),
        ("triangle area oracle", triangle_areas),
        ("leading structure constants", leading_constants),
        ("disc series equals theta series", disc_theta),
        ("tropical periodicity and trivalent vertex", tropical_periodicity),
        ("metric positive definiteness certificate", metric_certificate),
        ("monodromy classes and transport", monodromy),
        ("chart algebra", chart_algebra),
        ("differential and Leibniz rule", differential),
        ("sphere count series", sphere_count),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f();
        let ms = start.elapsed().as_millis();
        failed += (!ok) as usize;
        println!("criterion {:>2} {}: {name}: {detail} [{ms} ms]", n + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
