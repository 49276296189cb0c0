//! Eigenvalue kernels: dense symmetric (faer), symmetric tridiagonal (QL)
//! and Lanczos for the smallest eigenvalue of a large sparse operator.

use std::sync::Once;

use crate::error::{Error, Result};

/// Largest matrix handed to the dense solver.
pub const DENSE_CAP: usize = 4000;
/// Relative tolerance of the iterative smallest-eigenvalue solver.
pub const LANCZOS_TOL: f64 = 1e-10;
/// Memory budget for the Lanczos basis, in f64 entries.
const LANCZOS_BASIS_BUDGET: usize = 200_000_000;

static SEQUENTIAL: Once = Once::new();

/// Each eigenproblem runs single-threaded so results do not depend on the
/// thread count.
fn sequential_faer() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Ascending eigenvalues of a symmetric row-major `n × n` matrix.
pub fn dense_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::Precondition(format!("matrix has {} entries, expected {n}²", a.len())));
    }
    if n > DENSE_CAP {
        return Err(Error::Resource {
            what: "dense eigensolver".into(),
            limit: DENSE_CAP,
            reached: n,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    sequential_faer();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    m.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::Convergence {
        what: format!("dense symmetric eigensolver: {e:?}"),
        residual: f64::NAN,
    })
}

/// Ascending eigenvalues of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e` (`e[i]` couples `i` and `i+1`), by implicit QL.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::Precondition("off-diagonal must have length n - 1".into()));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence {
                    what: "tridiagonal QL".into(),
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Solves `(T - θ) x = b` for symmetric tridiagonal `T` by Gaussian
/// elimination with partial pivoting.
fn shifted_tridiagonal_solve(alpha: &[f64], beta: &[f64], theta: f64, b: &mut [f64]) {
    let n = alpha.len();
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut d: Vec<f64> = alpha.iter().map(|a| a - theta).collect();
    let mut du: Vec<f64> = beta.to_vec();
    let dl: Vec<f64> = beta.to_vec();
    let mut du2 = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

/// Result of the iterative solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosResult {
    pub value: f64,
    /// `‖Ay - θy‖` for the unit Ritz vector `y`.
    pub residual: f64,
    /// Distance to the second Ritz value.
    pub gap: f64,
    pub iterations: usize,
}

/// Smallest eigenvalue of the symmetric operator `apply` (writes `A x` into
/// `y`) of dimension `n`, by Lanczos with full reorthogonalization.
///
/// Converged when `min(r, r²/gap) ≤ LANCZOS_TOL · θ`, `r` the residual norm.
pub fn lanczos_smallest(n: usize, apply: &dyn Fn(&[f64], &mut [f64]), start: &[f64]) -> Result<LanczosResult> {
    if n == 0 || start.len() != n {
        return Err(Error::Precondition("start vector must match a nonzero dimension".into()));
    }
    let max_iter = n.min(LANCZOS_BASIS_BUDGET / n).min(3000);
    if max_iter < n.min(50) {
        return Err(Error::Resource {
            what: "Lanczos basis".into(),
            limit: LANCZOS_BASIS_BUDGET,
            reached: n * 50,
        });
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut q: Vec<Vec<f64>> = Vec::new();
    let s0 = norm(start);
    if s0 == 0.0 {
        return Err(Error::Precondition("start vector is zero".into()));
    }
    q.push(start.iter().map(|x| x / s0).collect());
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut w = vec![0.0; n];
    let mut last = LanczosResult {
        value: f64::NAN,
        residual: f64::INFINITY,
        gap: 0.0,
        iterations: 0,
    };
    for j in 0..max_iter {
        apply(&q[j], &mut w);
        let a: f64 = w.iter().zip(&q[j]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for qi in &q {
                let c: f64 = w.iter().zip(qi).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let check = m == max_iter || b <= 1e-14 || m % 10 == 0;
        if check {
            let ritz = tridiagonal_eigenvalues(&alpha, &beta)?;
            let theta = ritz[0];
            let gap = if m > 1 { ritz[1] - ritz[0] } else { f64::INFINITY };
            // last component of the Ritz vector by inverse iteration
            let mut s = vec![1.0; m];
            for _ in 0..3 {
                shifted_tridiagonal_solve(&alpha, &beta, theta - 1e-13 * theta.abs().max(1e-300), &mut s);
                let ns = norm(&s);
                s.iter_mut().for_each(|x| *x /= ns);
            }
            let residual = b * s[m - 1].abs();
            last = LanczosResult {
                value: theta,
                residual,
                gap,
                iterations: m,
            };
            // the gap-refined bound needs a second Ritz value
            let err = if m > 1 { residual.min(residual * residual / gap.max(f64::MIN_POSITIVE)) } else { residual };
            if err <= LANCZOS_TOL * theta.abs().max(f64::MIN_POSITIVE) || b <= 1e-14 {
                return Ok(last);
            }
        }
        if m == max_iter {
            break;
        }
        beta.push(b);
        q.push(w.iter().map(|x| x / b).collect());
    }
    Err(Error::Convergence {
        what: format!("Lanczos smallest eigenvalue after {} iterations (estimate {:e})", last.iterations, last.value),
        residual: last.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_laplacian(n: usize) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
            if i + 1 < n {
                a[i * n + i + 1] = -0.5;
                a[(i + 1) * n + i] = -0.5;
            }
        }
        a
    }

    #[test]
    fn dense_matches_closed_form() {
        let n = 60;
        let ev = dense_eigenvalues(&path_laplacian(n), n).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 1.0 - ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 5, 18, 40] {
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                a[i * n + i] = d[i];
                if i + 1 < n {
                    a[i * n + i + 1] = e[i];
                    a[(i + 1) * n + i] = e[i];
                }
            }
            let dense = dense_eigenvalues(&a, n).unwrap();
            let tri = tridiagonal_eigenvalues(&d, &e).unwrap();
            for (x, y) in dense.iter().zip(&tri) {
                assert!((x - y).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn lanczos_on_square_box() {
        // Z² SRW Dirichlet operator on a k×k box: λ₁ = 1 - cos(π/(k+1))
        let k = 70;
        let n = k * k;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..k {
                for j in 0..k {
                    let mut v = x[i * k + j];
                    if i > 0 {
                        v -= 0.25 * x[(i - 1) * k + j];
                    }
                    if i + 1 < k {
                        v -= 0.25 * x[(i + 1) * k + j];
                    }
                    if j > 0 {
                        v -= 0.25 * x[i * k + j - 1];
                    }
                    if j + 1 < k {
                        v -= 0.25 * x[i * k + j + 1];
                    }
                    y[i * k + j] = v;
                }
            }
        };
        let r = lanczos_smallest(n, &apply, &vec![1.0; n]).unwrap();
        let exact = 1.0 - (std::f64::consts::PI / (k + 1) as f64).cos();
        assert!((r.value - exact).abs() <= 1e-9 * exact, "{r:?} vs {exact}");
    }
}
