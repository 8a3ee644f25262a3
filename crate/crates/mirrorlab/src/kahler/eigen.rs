//! Symmetric 3×3 eigenvalues by cyclic Jacobi rotations, and a Cholesky
//! positive-definiteness certificate.
//!
//! Jacobi rotations determine the eigenvalues of a positive definite matrix
//! to high relative accuracy when D·A·D has a modest condition number for
//! the diagonal scaling D = diag(A)^(−1/2). The metric matrices here are
//! strongly graded, so this matters for the smallest eigenvalue.

pub type Mat3 = [[f64; 3]; 3];

/// Eigenvalues in increasing order.
pub fn jacobi_eigenvalues(a: &Mat3) -> [f64; 3] {
    jacobi_eigen(a).0
}

/// Eigenvalues in increasing order with unit eigenvectors; `vecs[i]` belongs
/// to `vals[i]`.
pub fn jacobi_eigen(a: &Mat3) -> ([f64; 3], Mat3) {
    let mut m = *a;
    // Columns of v accumulate the rotations.
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..100 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        if off == 0.0 {
            break;
        }
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq == 0.0 {
                continue;
            }
            // Skip rotations that are negligible relative to the diagonal.
            if apq.abs() <= f64::EPSILON * 0.5 * (m[p][p].abs() * m[q][q].abs()).sqrt() {
                m[p][q] = 0.0;
                m[q][p] = 0.0;
                continue;
            }
            rotated = true;
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let r = 3 - p - q;
            let (arp, arq) = (m[r][p], m[r][q]);
            m[p][p] -= t * apq;
            m[q][q] += t * apq;
            m[p][q] = 0.0;
            m[q][p] = 0.0;
            m[r][p] = c * arp - s * arq;
            m[p][r] = m[r][p];
            m[r][q] = s * arp + c * arq;
            m[q][r] = m[r][q];
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = idx.map(|i| m[i][i]);
    let vecs = idx.map(|i| [v[0][i], v[1][i], v[2][i]]);
    (vals, vecs)
}

/// Smallest eigenvalue of A + β·ŵŵᵀ for β ≥ 0 and unit ŵ, given the
/// eigen-decomposition of A.
///
/// The root of the secular equation 1 + β·Σ z_i²/(a_i − λ) = 0 in
/// [a₀, a₁] (z = Vᵀŵ) is found by bisection, which stays accurate when β
/// exceeds ‖A‖ by many orders of magnitude and forming A + βŵŵᵀ in floating
/// point would erase A.
pub fn rank_one_min_eig(vals: &[f64; 3], vecs: &Mat3, w: &[f64; 3], beta: f64) -> f64 {
    let z = vecs.map(|v| v[0] * w[0] + v[1] * w[1] + v[2] * w[2]);
    if !(beta > 0.0) {
        return vals[0];
    }
    let f = |lam: f64| {
        let mut s = 0.0;
        for i in 0..3 {
            s += z[i] * z[i] / (vals[i] - lam);
        }
        1.0 / beta + s
    };
    let (mut lo, mut hi) = (vals[0], vals[1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // f increases from −∞ just above a₀ to +∞ just below a₁.
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive definiteness of A + β·ŵŵᵀ from the inertia of A and the matrix
/// determinant lemma: a positive rank-one update removes at most one
/// negative eigenvalue, and does so iff 1 + β·ŵᵀA⁻¹ŵ < 0.
pub fn rank_one_pd(vals: &[f64; 3], vecs: &Mat3, w: &[f64; 3], beta: f64) -> bool {
    if vals[0] > 0.0 {
        return true;
    }
    if !(vals[1] > 0.0) || !(beta > 0.0) {
        return false;
    }
    let z = vecs.map(|v| v[0] * w[0] + v[1] * w[1] + v[2] * w[2]);
    if vals[0] == 0.0 {
        return z[0] != 0.0;
    }
    let s: f64 = (0..3).map(|i| z[i] * z[i] / vals[i]).sum();
    1.0 / beta + s < 0.0
}

/// Whether A = LLᵀ with positive pivots, computed on the diagonally scaled
/// matrix so grading does not matter.
pub fn cholesky_pd(a: &Mat3) -> bool {
    if (0..3).any(|i| !(a[i][i] > 0.0)) {
        return false;
    }
    let d: Vec<f64> = (0..3).map(|i| 1.0 / a[i][i].sqrt()).collect();
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = a[i][j] * d[i] * d[j];
        }
    }
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut sum = s[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return false;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    true
}
