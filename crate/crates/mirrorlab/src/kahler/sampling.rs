//! Seeded sampling of fiber points by region and the metric certificate.
//!
//! Candidate i is drawn from its own ChaCha stream (seed, stream i), so the
//! result depends only on the seed and not on the thread count. Half of the
//! candidates are uniform on the fiber triangle {L_i ≥ −1, ΣL_i = l}; the
//! other half concentrate on the band where the radial bumps move, which
//! is where the thin transition regions live.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{fd_check, metric, region_classify, FiberPoint, MetricSample, Region};
use crate::report::{fnum, Status};

pub const BATCH: u64 = 1 << 16;

/// Sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub t: f64,
    pub l: u32,
    pub p: u32,
    pub seed: u64,
    pub per_region: usize,
    pub max_batches: u64,
}

/// The i-th candidate point.
pub fn candidate(spec: &SampleSpec, index: u64) -> FiberPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let l = spec.l as f64;
    let lv = if rng.gen_bool(0.5) {
        // Uniform on the triangle via sorted uniforms.
        let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let w = [a, b - a, 1.0 - b];
        w.map(|x| -1.0 + (l + 3.0) * x)
    } else {
        let bp = super::BumpProfile::new(l, spec.p as f64);
        // log_T d ≈ 2 + 2L_min, so the radial bumps move for L_min in
        // ((d_in − width)/2 − 1, d_in/2 − 1); widen by 0.3 on both sides.
        let lo = (bp.d_in - bp.d_width) / 2.0 - 1.3;
        let hi = bp.d_in / 2.0 - 0.7;
        let i = rng.gen_range(0..3usize);
        let li: f64 = rng.gen_range(lo..hi);
        let rest = l - li;
        // Half of these put the second coordinate close to the first.
        let lj: f64 = if rng.gen_bool(0.5) {
            li + rng.gen_range(0.0..1.0f64)
        } else {
            rng.gen_range(li..(rest - li))
        };
        let lk = rest - lj;
        let mut out = [0.0; 3];
        out[i] = li;
        out[(i + 1) % 3] = lj;
        out[(i + 2) % 3] = lk;
        if rng.gen_bool(0.5) {
            out.swap((i + 1) % 3, (i + 2) % 3);
        }
        out
    };
    FiberPoint::from_logs(lv, spec.t, spec.l, spec.p)
}

/// The first `per_region` candidates of each region, in index order.
pub fn collect_by_region(spec: &SampleSpec) -> BTreeMap<Region, Vec<FiberPoint>> {
    let mut out: BTreeMap<Region, Vec<FiberPoint>> = Region::ALL.iter().map(|r| (*r, Vec::new())).collect();
    if spec.per_region == 0 {
        return out;
    }
    for batch in 0..spec.max_batches {
        let start = batch * BATCH;
        let labelled: Vec<(Region, FiberPoint)> = (start..start + BATCH)
            .into_par_iter()
            .map(|i| {
                let q = candidate(spec, i);
                (region_classify(&q), q)
            })
            .collect();
        for (r, q) in labelled {
            let v = out.get_mut(&r).expect("all regions present");
            if v.len() < spec.per_region {
                v.push(q);
            }
        }
        if out.values().all(|v| v.len() >= spec.per_region) {
            break;
        }
    }
    out
}

/// Per-region outcome of the metric certificate.
#[derive(Debug, Clone)]
pub struct RegionResult {
    pub region: Region,
    pub samples: usize,
    pub min_eig: f64,
    /// min over samples of λ_min divided by the largest eigenvalue of the
    /// potential part.
    pub min_rel_eig: f64,
    pub worst: Option<MetricSample>,
    pub pd_failures: usize,
    pub max_fd_gradient: f64,
    pub max_fd_hessian: f64,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub spec: SampleSpec,
    pub c_base: f64,
    pub regions: Vec<RegionResult>,
    pub derivative_constants: [f64; 4],
}

/// Relative tolerance of the finite-difference derivative check.
pub const FD_TOL: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-6;

impl Certificate {
    pub fn all_pd(&self) -> bool {
        self.regions.iter().all(|r| r.samples > 0 && r.min_eig > 0.0 && r.pd_failures == 0)
    }

    pub fn fd_ok(&self) -> bool {
        self.regions.iter().all(|r| r.max_fd_gradient <= FD_TOL && r.max_fd_hessian <= FD_TOL)
    }

    pub fn status(&self) -> Status {
        if self.regions.iter().all(|r| r.samples == 0) {
            return Status::Indeterminate;
        }
        let bad = self.regions.iter().any(|r| r.samples > 0 && (r.min_eig <= 0.0 || r.pd_failures > 0));
        if bad || !self.fd_ok() {
            return Status::Fail;
        }
        if self.regions.iter().any(|r| r.samples < self.spec.per_region) {
            return Status::Indeterminate;
        }
        Status::Pass
    }

    pub fn to_json(&self) -> Value {
        let mut regions = serde_json::Map::new();
        for r in &self.regions {
            let worst = r.worst.as_ref().map(|w| {
                json!({
                    "r": [fnum(w.point.rx), fnum(w.point.ry), fnum(w.point.rz)],
                    "log_t_r": w.point.logs().map(fnum).to_vec(),
                    "matrix": w.matrix.iter().map(|row| row.iter().map(|x| fnum(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            });
            regions.insert(
                r.region.name().to_string(),
                json!({
                    "samples": r.samples,
                    "min_eig": if r.samples > 0 { fnum(r.min_eig) } else { Value::Null },
                    "min_rel_eig": if r.samples > 0 { fnum(r.min_rel_eig) } else { Value::Null },
                    "pd_failures": r.pd_failures,
                    "max_fd_gradient_rel": fnum(r.max_fd_gradient),
                    "max_fd_hessian_rel": fnum(r.max_fd_hessian),
                    "worst_point": worst,
                }),
            );
        }
        let c = self.derivative_constants;
        json!({
            "T": fnum(self.spec.t),
            "l": self.spec.l,
            "p": self.spec.p,
            "seed": self.spec.seed,
            "samples_per_region": self.spec.per_region,
            "c_base": fnum(self.c_base),
            "regions": regions,
            "derivative_constants": {"alpha3": fnum(c[0]), "alpha4": fnum(c[1]), "alpha5": fnum(c[2]), "alpha6": fnum(c[3])},
            "status": self.status().as_str(),
        })
    }
}

pub fn certify_points(spec: &SampleSpec, points: &BTreeMap<Region, Vec<FiberPoint>>, c_base: f64) -> Certificate {
    let regions = points
        .iter()
        .map(|(region, pts)| {
            let samples: Vec<(MetricSample, f64, f64, f64)> = pts
                .par_iter()
                .map(|q| {
                    let m = metric(q, c_base);
                    // Scale of the potential part, which the base term
                    // does not change in the directions that matter.
                    let top = super::jacobi_eigenvalues(&m.potential_matrix)[2];
                    let fd = fd_check(q, FD_STEP);
                    (m, m.min_eigenvalue / top, fd.gradient_rel, fd.hessian_rel)
                })
                .collect();
            let mut res = RegionResult {
                region: *region,
                samples: samples.len(),
                min_eig: f64::INFINITY,
                min_rel_eig: f64::INFINITY,
                worst: None,
                pd_failures: 0,
                max_fd_gradient: 0.0,
                max_fd_hessian: 0.0,
            };
            for (m, rel, fg, fh) in samples {
                if !m.pd {
                    res.pd_failures += 1;
                }
                if rel < res.min_rel_eig {
                    res.min_rel_eig = rel;
                    res.worst = Some(m);
                }
                res.min_eig = res.min_eig.min(m.min_eigenvalue);
                res.max_fd_gradient = res.max_fd_gradient.max(fg);
                res.max_fd_hessian = res.max_fd_hessian.max(fh);
            }
            res
        })
        .collect();
    let bp = super::BumpProfile::new(spec.l as f64, spec.p as f64);
    Certificate { spec: *spec, c_base, regions, derivative_constants: bp.derivative_constants() }
}

pub fn certify(spec: &SampleSpec, c_base: f64) -> Certificate {
    certify_points(spec, &collect_by_region(spec), c_base)
}

/// Smallest j such that c_base = 2^j·T^(−2l) makes every given point's
/// metric positive definite, searched in [lo, hi]. The smallest eigenvalue
/// is nondecreasing in c_base because the base term is positive
/// semidefinite.
pub fn calibrate_c_base(points: &[FiberPoint], t: f64, l: u32, lo: i32, hi: i32) -> Option<i32> {
    let ok = |j: i32| {
        let c = super::c_base_from_log2(j, t, l);
        points.par_iter().all(|q| {
            let m = metric(q, c);
            m.min_eigenvalue > 0.0 && m.pd
        })
    };
    if !ok(hi) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    if ok(a) {
        return Some(a);
    }
    while b - a > 1 {
        let m = a + (b - a) / 2;
        if ok(m) {
            b = m;
        } else {
            a = m;
        }
    }
    Some(b)
}

/// Largest jump of F found across the boundary between two labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryJump {
    pub a: Region,
    pub b: Region,
    pub pairs: usize,
    pub max_jump: f64,
}

/// Bisect the segment between two points with different labels down to
/// `tol` in log_T coordinates, returning the straddling pair.
pub fn bisect_boundary(p: &FiberPoint, q: &FiberPoint, tol: f64) -> (FiberPoint, FiberPoint) {
    let (mut lo, mut hi) = (p.logs(), q.logs());
    let rp = region_classify(p);
    let at = |lv: [f64; 3]| FiberPoint::from_logs(lv, p.t, p.l, p.p);
    for _ in 0..200 {
        let d = (0..3).map(|i| (hi[i] - lo[i]).abs()).fold(0.0, f64::max);
        if d <= tol {
            break;
        }
        let mid = [0, 1, 2].map(|i| 0.5 * (lo[i] + hi[i]));
        if region_classify(&at(mid)) == rp {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (at(lo), at(hi))
}

/// F continuity across region boundaries. From each sample a step of
/// length `step` (in log_T r, along the fiber) in a seeded direction is
/// taken; when the label changes the crossing is bisected and F is compared
/// on both sides.
pub fn continuity_check(spec: &SampleSpec, points: &BTreeMap<Region, Vec<FiberPoint>>, step: f64) -> Vec<BoundaryJump> {
    let all: Vec<FiberPoint> = points.values().flatten().copied().collect();
    let found: Vec<(Region, Region, f64)> = all
        .par_iter()
        .enumerate()
        .filter_map(|(i, q)| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
            rng.set_stream(i as u64);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            // Orthonormal basis of the plane ΣL = 0.
            let e1 = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
            let e2 = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()];
            let lv = q.logs();
            let to = [0, 1, 2].map(|k| lv[k] + step * (phi.cos() * e1[k] + phi.sin() * e2[k]));
            let q2 = FiberPoint::from_logs(to, q.t, q.l, q.p);
            let (r1, r2) = (region_classify(q), region_classify(&q2));
            if r1 == r2 {
                return None;
            }
            let (a, b) = bisect_boundary(q, &q2, 1e-12);
            let (ra, rb) = (region_classify(&a), region_classify(&b));
            let jump = (super::kahler_f(&a) - super::kahler_f(&b)).abs();
            Some((ra.min(rb), ra.max(rb), jump))
        })
        .collect();
    let mut out: BTreeMap<(Region, Region), BoundaryJump> = BTreeMap::new();
    for (a, b, j) in found {
        let e = out.entry((a, b)).or_insert(BoundaryJump { a, b, pairs: 0, max_jump: 0.0 });
        e.pairs += 1;
        e.max_jump = e.max_jump.max(j);
    }
    out.into_values().collect()
}

pub const CONTINUITY_TOL: f64 = 1e-9;
