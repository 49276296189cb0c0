//! Return probabilities of the simple random walk on the integer Heisenberg
//! group via a Fourier transform in the `(b, c)` coordinates.
//!
//! With `x = (1,0,0)`, `y = (0,1,0)` and right multiplication, the Markov
//! operator commutes with translations in `b` and `c`. The character
//! `e^{i(φ b + θ c)}` reduces it to the tridiagonal operator on `ℓ²(Z)`
//!
//! `(A g)(a) = ¼ (g(a+1) + g(a-1)) + ½ cos(φ + θ a) g(a)`,
//!
//! and `p(2k) = (2π)^{-2} ∫∫ ‖A^k δ_0‖² dθ dφ`. The integrand is a
//! trigonometric polynomial, so the trapezoid rule on an `Mθ × Mφ` grid is
//! exact up to aliasing from `|c| ≥ Mθ` or `|b| ≥ Mφ`, whose probability is
//! far below double precision for the grid sizes chosen here.

use rayon::prelude::*;

use crate::error::Result;

fn round_up4(x: usize) -> usize {
    x.div_ceil(4) * 4
}

/// Grid sizes `(Mθ, Mφ)` used for `k ≤ k_max`.
pub fn fourier_grid(k_max: usize) -> (usize, usize) {
    let m_theta = round_up4((6 * k_max + 8).max(16));
    let m_phi = round_up4(((10.0 * (k_max as f64).sqrt()).ceil() as usize + 8).max(16));
    (m_theta, m_phi)
}

/// `p(2k)` for `k = 0..=k_max`.
pub fn central_fourier_return(k_max: usize) -> Result<Vec<f64>> {
    let (m_theta, m_phi) = fourier_grid(k_max);
    central_fourier_with_grid(k_max, m_theta, m_phi)
}

/// As [`central_fourier_return`] with explicit grid sizes (multiples of 4).
pub fn central_fourier_with_grid(k_max: usize, m_theta: usize, m_phi: usize) -> Result<Vec<f64>> {
    assert!(m_theta % 4 == 0 && m_phi % 4 == 0);
    // f is even in θ, even in φ and π-periodic in φ for even powers
    let thetas: Vec<(f64, f64)> = (0..=m_theta / 2)
        .map(|j| {
            let w = if j == 0 || j == m_theta / 2 { 1.0 } else { 2.0 };
            (2.0 * std::f64::consts::PI * j as f64 / m_theta as f64, w)
        })
        .collect();
    let phis: Vec<(f64, f64)> = (0..=m_phi / 4)
        .map(|l| {
            let w = if l == 0 || l == m_phi / 4 { 2.0 } else { 4.0 };
            (2.0 * std::f64::consts::PI * l as f64 / m_phi as f64, w)
        })
        .collect();
    let rows: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&(theta, wt)| {
            let mut acc = vec![0.0; k_max + 1];
            let mut scratch = Scratch::new(k_max);
            for &(phi, wp) in &phis {
                scratch.run(theta, phi);
                for (a, f) in acc.iter_mut().zip(&scratch.norms) {
                    *a += wt * wp * f;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; k_max + 1];
    for row in &rows {
        for (t, r) in total.iter_mut().zip(row) {
            *t += r;
        }
    }
    let scale = 1.0 / (m_theta as f64 * m_phi as f64);
    Ok(total.into_iter().map(|x| x * scale).collect())
}

struct Scratch {
    k_max: usize,
    diag: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
    norms: Vec<f64>,
}

impl Scratch {
    fn new(k_max: usize) -> Self {
        let n = 2 * k_max + 3;
        Scratch {
            k_max,
            diag: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![0.0; n],
            norms: vec![0.0; k_max + 1],
        }
    }

    /// Fills `norms[k] = ‖A^k δ_0‖²`.
    fn run(&mut self, theta: f64, phi: f64) {
        let k = self.k_max;
        let off = k + 1; // index of a = 0; one zero pad on each side
        for (i, d) in self.diag.iter_mut().enumerate() {
            let a = i as f64 - off as f64;
            *d = 0.5 * (phi + theta * a).cos();
        }
        self.v.iter_mut().for_each(|x| *x = 0.0);
        self.w.iter_mut().for_each(|x| *x = 0.0);
        self.v[off] = 1.0;
        self.norms[0] = 1.0;
        for s in 1..=k {
            let (lo, hi) = (off - s, off + s);
            for i in lo..=hi {
                self.w[i] = 0.25 * (self.v[i - 1] + self.v[i + 1]) + self.diag[i] * self.v[i];
            }
            let mut nrm = 0.0;
            for i in lo..=hi {
                nrm += self.w[i] * self.w[i];
            }
            self.norms[s] = nrm;
            std::mem::swap(&mut self.v, &mut self.w);
        }
    }
}
