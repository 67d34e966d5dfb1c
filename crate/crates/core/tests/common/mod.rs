//! Reference solvers and certificates used only by tests. Nothing here calls
//! into the ADMM code paths it is used to check.
#![allow(dead_code)]

use blockfuse::sensing::{gaussian_matrix, orthonormalize_rows};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A penalty term `weight · Σ_blocks ‖(K x)_block‖₂` (blocks of size 1 give ℓ₁).
pub struct Term {
    pub weight: f64,
    pub op: DMatrix<f64>,
    pub blocks: Vec<std::ops::Range<usize>>,
}

impl Term {
    pub fn l1(weight: f64, op: DMatrix<f64>) -> Self {
        let rows = op.nrows();
        Term { weight, op, blocks: (0..rows).map(|i| i..i + 1).collect() }
    }

    pub fn groups(weight: f64, op: DMatrix<f64>, size: usize) -> Self {
        let rows = op.nrows();
        Term { weight, op, blocks: (0..rows / size).map(|i| i * size..(i + 1) * size).collect() }
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let kx = &self.op * x;
        self.weight * self.blocks.iter().map(|b| kx.rows(b.start, b.len()).norm()).sum::<f64>()
    }

    // projection onto the dual-norm ball of radius `weight`
    fn project(&self, v: &mut DVector<f64>) {
        for b in &self.blocks {
            let mut blk = v.rows_mut(b.start, b.len());
            let nrm = blk.norm();
            if nrm > self.weight {
                blk *= self.weight / nrm;
            }
        }
    }
}

pub fn composite_objective(x: &DVector<f64>, y: &DVector<f64>, phi: &DMatrix<f64>, terms: &[Term]) -> f64 {
    0.5 * (y - phi * x).norm_squared() + terms.iter().map(|t| t.value(x)).sum::<f64>()
}

fn spectral_norm_sq(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    ata.symmetric_eigenvalues().max().max(0.0)
}

/// Condat–Vũ primal-dual splitting for
/// `min ½‖y − Φx‖² + Σ_k g_k(K_k x)`; returns the best objective seen.
pub fn primal_dual_oracle(y: &DVector<f64>, phi: &DMatrix<f64>, terms: &[Term], iters: usize) -> (DVector<f64>, f64) {
    let n = phi.ncols();
    let lip = spectral_norm_sq(phi).max(1e-12);
    let stacked = DMatrix::from_fn(terms.iter().map(|t| t.op.nrows()).sum::<usize>().max(1), n, |i, j| {
        let mut i = i;
        for t in terms {
            if i < t.op.nrows() {
                return t.op[(i, j)];
            }
            i -= t.op.nrows();
        }
        0.0
    });
    let knorm = spectral_norm_sq(&stacked).max(1e-12);
    // 1/τ − σ‖K‖² ≥ L/2 with σ = 1/(τ‖K‖²)·½
    let sigma = 1.0 / knorm.sqrt();
    let tau = 1.0 / (lip / 2.0 + sigma * knorm) * 0.99;

    let mut x = DVector::zeros(n);
    let mut duals: Vec<DVector<f64>> = terms.iter().map(|t| DVector::zeros(t.op.nrows())).collect();
    let mut best = (x.clone(), composite_objective(&x, y, phi, terms));
    for it in 0..iters {
        let mut grad = phi.transpose() * (phi * &x - y);
        for (t, d) in terms.iter().zip(&duals) {
            grad += t.op.transpose() * d;
        }
        let x_new = &x - grad * tau;
        let extrap = &x_new * 2.0 - &x;
        for (t, d) in terms.iter().zip(duals.iter_mut()) {
            *d += &t.op * &extrap * sigma;
            t.project(d);
        }
        x = x_new;
        if it % 50 == 0 || it + 1 == iters {
            let f = composite_objective(&x, y, phi, terms);
            if f < best.1 {
                best = (x.clone(), f);
            }
        }
    }
    best
}

pub fn difference_matrix(n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n - 1 {
        d[(j, j)] = -1.0;
        d[(j, j + 1)] = 1.0;
    }
    d[(n - 1, n - 1)] = 1.0;
    d
}

/// Selection matrix stacking overlapping windows of `size` with `stride`.
pub fn window_selection(n: usize, size: usize, stride: usize) -> DMatrix<f64> {
    let count = (n - size) / stride + 1;
    let mut w = DMatrix::zeros(count * size, n);
    for g in 0..count {
        for r in 0..size {
            w[(g * size + r, g * stride + r)] = 1.0;
        }
    }
    w
}

/// Terms of the SGF objective with fusion as `‖Dx‖₁`.
pub fn sgf_terms(n: usize, group_size: usize, le: f64, lg: f64, lf: f64) -> Vec<Term> {
    let mut t = Vec::new();
    if le > 0.0 {
        t.push(Term::l1(le, DMatrix::identity(n, n)));
    }
    if lg > 0.0 {
        t.push(Term::groups(lg, DMatrix::identity(n, n), group_size));
    }
    if lf > 0.0 {
        t.push(Term::l1(lf, difference_matrix(n)));
    }
    t
}

pub fn lgf_terms(n: usize, group_size: usize, overlap: usize, lg: f64, lf: f64) -> Vec<Term> {
    let mut t = Vec::new();
    if lg > 0.0 {
        t.push(Term::groups(lg, window_selection(n, group_size, group_size - overlap), group_size));
    }
    if lf > 0.0 {
        t.push(Term::l1(lf, difference_matrix(n)));
    }
    t
}

/// Plain ISTA for `½‖y − Φx‖² + λ‖x‖₁`.
pub fn ista_lasso(y: &DVector<f64>, phi: &DMatrix<f64>, lambda: f64, iters: usize) -> (DVector<f64>, f64) {
    let step = 1.0 / spectral_norm_sq(phi).max(1e-12);
    let mut x = DVector::zeros(phi.ncols());
    for _ in 0..iters {
        let g = phi.transpose() * (phi * &x - y);
        x = (&x - g * step).map(|v| {
            let m = v.abs() - lambda * step;
            if m > 0.0 { m * v.signum() } else { 0.0 }
        });
    }
    let f = 0.5 * (y - phi * &x).norm_squared() + lambda * x.lp_norm(1);
    (x, f)
}

/// Checks `v − p ∈ τₑ∂‖p‖₁ + τ_g∂‖p‖₂`; returns the worst violation.
pub fn sparse_group_certificate(v: &[f64], p: &[f64], te: f64, tg: f64) -> f64 {
    let g: Vec<f64> = v.iter().zip(p).map(|(a, b)| a - b).collect();
    let pn = p.iter().map(|a| a * a).sum::<f64>().sqrt();
    if pn == 0.0 {
        // need g = τₑs + τ_g w with |s_j| ≤ 1 and ‖w‖ ≤ 1
        let resid = g.iter().map(|a| (a.abs() - te).max(0.0).powi(2)).sum::<f64>().sqrt();
        return (resid - tg).max(0.0);
    }
    let mut worst: f64 = 0.0;
    for (gj, pj) in g.iter().zip(p) {
        let viol = if *pj != 0.0 {
            (gj - te * pj.signum() - tg * pj / pn).abs()
        } else {
            (gj.abs() - te).max(0.0)
        };
        worst = worst.max(viol);
    }
    worst
}

pub fn soft_threshold_certificate(v: &[f64], p: &[f64], tau: f64) -> f64 {
    v.iter()
        .zip(p)
        .map(|(a, b)| {
            let g = a - b;
            if *b != 0.0 { (g - tau * b.signum()).abs() } else { (g.abs() - tau).max(0.0) }
        })
        .fold(0.0, f64::max)
}

pub fn block_shrink_certificate(v: &[f64], p: &[f64], tau: f64) -> f64 {
    let g: Vec<f64> = v.iter().zip(p).map(|(a, b)| a - b).collect();
    let pn = p.iter().map(|a| a * a).sum::<f64>().sqrt();
    if pn == 0.0 {
        (g.iter().map(|a| a * a).sum::<f64>().sqrt() - tau).max(0.0)
    } else {
        g.iter().zip(p).map(|(gj, pj)| (gj - tau * pj / pn).abs()).fold(0.0, f64::max)
    }
}

/// A small compressed-sensing instance with a block-sparse, piece-wise
/// smooth ground truth.
pub struct Instance {
    pub phi: DMatrix<f64>,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

pub fn instance(seed: u64, n: usize, m: usize, amplitude: f64, noise: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = orthonormalize_rows(&gaussian_matrix(m, n, seed.wrapping_add(1000))).unwrap();
    let start = rng.random_range(0..n / 2);
    let len = rng.random_range(2..=n / 2);
    let x = DVector::from_fn(n, |j, _| {
        if j >= start && j < start + len {
            amplitude * (1.0 + 0.3 * ((j - start) as f64).sin())
        } else if j == n - 1 {
            0.5 * amplitude
        } else {
            0.0
        }
    });
    let y = &phi * &x + DVector::from_fn(m, |_, _| noise * rng.random_range(-1.0..1.0));
    Instance { phi, x, y }
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
