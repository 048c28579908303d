//! Dense singular value decomposition via one-sided Jacobi rotations.
//!
//! Hestenes' method: repeatedly rotate pairs of columns until all pairs
//! are mutually orthogonal; the column norms are then the singular
//! values. It is simple, deterministic (no random starts), and accurate
//! to near machine precision, which is what the index's reproducibility
//! guarantees need. Cost is O(m n^2) per sweep; fine at the scale this
//! crate indexes.

use ndarray::{Array1, Array2};

/// Thin SVD A = U diag(sigma) Vt with positive, non-increasing singular
/// values. Columns below the rank cutoff are dropped, so `u` is m x r,
/// `sigma` has r entries, and `vt` is r x n where r is the numerical rank.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<f64>,
    pub sigma: Array1<f64>,
    pub vt: Array2<f64>,
}

const MAX_SWEEPS: usize = 60;
const ORTH_TOL: f64 = 1e-14;
const RANK_REL_TOL: f64 = 1e-12;

/// Computes the thin SVD of a dense matrix.
pub fn svd(a: &Array2<f64>) -> Svd {
    let (m, n) = a.dim();
    if m >= n {
        svd_tall(a)
    } else {
        // factor the transpose and swap the roles of U and V
        let at = a.t().to_owned();
        let s = svd_tall(&at);
        let u = s.vt.t().to_owned();
        let vt = s.u.t().to_owned();
        Svd {
            u,
            sigma: s.sigma,
            vt,
        }
    }
}

fn svd_tall(a: &Array2<f64>) -> Svd {
    let (m, n) = a.dim();
    // work on columns: w[j] is the j-th column of the evolving matrix
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j).to_vec()).collect();
    // v accumulates the right rotations, also stored as columns
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (alpha, beta, gamma) = {
                    let wi = &w[i];
                    let wj = &w[j];
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for r in 0..m {
                        alpha += wi[r] * wi[r];
                        beta += wj[r] * wj[r];
                        gamma += wi[r] * wj[r];
                    }
                    (alpha, beta, gamma)
                };
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= ORTH_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, i, j, c, s);
                rotate_pair(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    // column norms are the singular values; sort descending (stable, so
    // equal values keep a deterministic order)
    let mut order: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .map(|(j, col)| (j, col.iter().map(|x| x * x).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let sigma_max = order.first().map(|(_, s)| *s).unwrap_or(0.0);
    let cutoff = sigma_max * RANK_REL_TOL;
    let rank = order.iter().filter(|(_, s)| *s > cutoff && *s > 0.0).count();

    let mut u = Array2::zeros((m, rank));
    let mut sigma = Array1::zeros(rank);
    let mut vt = Array2::zeros((rank, n));
    for (k, &(j, s)) in order.iter().take(rank).enumerate() {
        sigma[k] = s;
        for r in 0..m {
            u[[r, k]] = w[j][r] / s;
        }
        for r in 0..n {
            vt[[k, r]] = v[j][r];
        }
    }

    fix_signs(&mut u, &mut vt);
    Svd { u, sigma, vt }
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(j);
    let wi = &mut head[i];
    let wj = &mut tail[0];
    for r in 0..wi.len() {
        let x = wi[r];
        let y = wj[r];
        wi[r] = c * x - s * y;
        wj[r] = s * x + c * y;
    }
}

/// Makes each left singular vector's largest-magnitude entry positive
/// (first such entry on ties), flipping the matching right vector to
/// preserve the product. This pins an otherwise arbitrary sign so that
/// identical inputs build identical indexes.
fn fix_signs(u: &mut Array2<f64>, vt: &mut Array2<f64>) {
    let (m, r) = u.dim();
    let n = vt.dim().1;
    for k in 0..r {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for row in 0..m {
            let a = u[[row, k]].abs();
            if a > best_abs {
                best_abs = a;
                best = row;
            }
        }
        if u[[best, k]] < 0.0 {
            for row in 0..m {
                u[[row, k]] = -u[[row, k]];
            }
            for col in 0..n {
                vt[[k, col]] = -vt[[k, col]];
            }
        }
    }
}
