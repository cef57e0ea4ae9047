//! Polynomial roots from companion-matrix eigenvalues.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// Roots closer than this are merged into one root of higher multiplicity.
pub const MERGE_TOL: f64 = 1e-7;

/// All complex roots of `sum_k coeffs[k] z^k`, with multiplicity (repeated).
///
/// Leading coefficients negligible against the largest one are dropped, which
/// only discards roots of modulus far outside the unit disc.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    if deg == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut companion = DMatrix::<Complex64>::zeros(deg, deg);
    for k in 1..deg {
        companion[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..deg {
        companion[(k, deg - 1)] = -coeffs[k] / lead;
    }
    let schur = Schur::new(companion);
    let (_, t) = schur.unpack();
    let mut roots: Vec<Complex64> = (0..deg).map(|k| t[(k, k)]).collect();
    for r in roots.iter_mut() {
        *r = polish(&coeffs[..=deg], *r);
    }
    roots
}

/// A few guarded Newton steps on the original coefficients.
fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        if horner_with_derivative(coeffs, next).0.norm() < p.norm() {
            z = next;
        } else {
            break;
        }
    }
    z
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Groups roots closer than [`MERGE_TOL`]; returns `(centroid, multiplicity)`.
pub fn merge_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    'outer: for &r in roots {
        for g in groups.iter_mut() {
            if (g.0 - r).norm() < MERGE_TOL {
                let n = g.1 as f64;
                g.0 = (g.0 * n + r) / (n + 1.0);
                g.1 += 1;
                continue 'outer;
            }
        }
        groups.push((r, 1));
    }
    groups
}
