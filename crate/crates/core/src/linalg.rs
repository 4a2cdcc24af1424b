//! Restarted GMRES for the matrix-free Newton steps of the Bishop solver.

use alloc::vec;
use alloc::vec::Vec;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `A x = b` from `x = 0` with restart length `restart`; returns the
/// last iterate when the tolerance is not reached.
pub(crate) fn gmres(
    apply: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    restart: usize,
    max_restarts: usize,
    rtol: f64,
) -> Vec<f64> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return x;
    }
    for _ in 0..max_restarts {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        if beta / bnorm <= rtol {
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        // Hessenberg columns after Givens rotation, stored as upper triangle.
        let mut hcols: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];
        for j in 0..restart {
            let mut w = apply(&basis[j]);
            let mut h = vec![0.0; j + 2];
            for (i, q) in basis.iter().enumerate() {
                h[i] = dot(&w, q);
                for (wk, qk) in w.iter_mut().zip(q) {
                    *wk -= h[i] * qk;
                }
            }
            h[j + 1] = norm(&w);
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (a, bb) = (h[i], h[i + 1]);
                h[i] = c * a + s * bb;
                h[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (h[j], h[j + 1]);
            let den = libm::hypot(a, bb);
            let (c, s) = if den == 0.0 { (1.0, 0.0) } else { (a / den, bb / den) };
            h[j] = c * a + s * bb;
            h[j + 1] = 0.0;
            cs.push((c, s));
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s * gj);
            let lucky = den == 0.0 || norm(&w) == 0.0;
            if !lucky {
                let wn = norm(&w);
                basis.push(w.iter().map(|v| v / wn).collect());
            }
            hcols.push(h);
            if g[j + 1].abs() / bnorm <= rtol || lucky {
                break;
            }
        }
        // Back substitution on the triangular system.
        let k = hcols.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                acc -= hcols[l][i] * yl;
            }
            y[i] = if hcols[i][i] != 0.0 { acc / hcols[i][i] } else { 0.0 };
        }
        for (i, yi) in y.iter().enumerate() {
            for (xk, qk) in x.iter_mut().zip(&basis[i]) {
                *xk += yi * qk;
            }
        }
    }
    x
}
