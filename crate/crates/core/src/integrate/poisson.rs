//! Masked least-squares integration by preconditioned conjugate gradient.
//!
//! Only edges between two valid 4-neighbours enter the system, which gives
//! natural zero-flux conditions along the silhouette. The graph Laplacian is
//! singular (constants are free) but the right-hand side is consistent, so CG
//! started from zero converges to a solution; the gauge is fixed afterwards.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{DepthMap, GradientField};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonOptions {
    /// Stop once `‖Lz - b‖ / ‖b‖` falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions {
            tolerance: 1e-6,
            max_iterations: 10_000,
        }
    }
}

/// Valid-pixel Laplacian in compact form: node degrees and, per node, the
/// indices of its right and lower neighbours (or `usize::MAX`).
struct Graph {
    degree: Vec<f64>,
    right: Vec<usize>,
    down: Vec<usize>,
}

impl Graph {
    fn new(g: &GradientField, index: &[usize]) -> Self {
        let (w, h) = (g.width, g.height);
        let n = index.iter().filter(|&&i| i != usize::MAX).count();
        let mut degree = vec![0.0; n];
        let mut right = vec![usize::MAX; n];
        let mut down = vec![usize::MAX; n];
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                let a = index[i];
                if a == usize::MAX {
                    continue;
                }
                if c + 1 < w && index[i + 1] != usize::MAX {
                    right[a] = index[i + 1];
                    degree[a] += 1.0;
                    degree[index[i + 1]] += 1.0;
                }
                if r + 1 < h && index[i + w] != usize::MAX {
                    down[a] = index[i + w];
                    degree[a] += 1.0;
                    degree[index[i + w]] += 1.0;
                }
            }
        }
        Graph { degree, right, down }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, (&d, &v)) in out.iter_mut().zip(self.degree.iter().zip(x)) {
            *o = d * v;
        }
        for a in 0..x.len() {
            for b in [self.right[a], self.down[a]] {
                if b != usize::MAX {
                    out[a] -= x[b];
                    out[b] -= x[a];
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares depth over the valid pixels of `g`.
///
/// Returns [`Error::ConvergenceFailure`] carrying the best iterate when the
/// tolerance is not reached within the iteration budget.
pub fn integrate_poisson(g: &GradientField, opts: &PoissonOptions) -> Result<DepthMap> {
    let (w, h) = (g.width, g.height);
    let mut index = vec![usize::MAX; w * h];
    let mut pixels = Vec::new();
    for (i, &m) in g.mask.iter().enumerate() {
        if m {
            index[i] = pixels.len();
            pixels.push(i);
        }
    }
    let graph = Graph::new(g, &index);
    let full_b = g.divergence();
    let b: Vec<f64> = pixels.iter().map(|&i| full_b[i]).collect();
    let n = b.len();

    let assemble = |x: &[f64]| {
        let mut z = vec![0.0; w * h];
        for (&i, &v) in pixels.iter().zip(x) {
            z[i] = v;
        }
        DepthMap::centered(w, h, z, g.mask.clone())
    };

    let b_norm = math::sqrt(dot(&b, &b));
    if b_norm == 0.0 {
        return Ok(assemble(&vec![0.0; n]));
    }
    let inv_diag: Vec<f64> = graph.degree.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect();

    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut best = (1.0, x.clone());
    for _ in 0..opts.max_iterations {
        graph.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rel = math::sqrt(dot(&r, &r)) / b_norm;
        if rel <= opts.tolerance {
            // Confirm against the true residual, which drifts from the
            // recurrence over long runs.
            graph.apply(&x, &mut ap);
            let true_rel = math::sqrt(ap.iter().zip(&b).map(|(a, y)| (a - y) * (a - y)).sum::<f64>()) / b_norm;
            if true_rel <= opts.tolerance {
                return Ok(assemble(&x));
            }
            for k in 0..n {
                r[k] = b[k] - ap[k];
            }
        }
        if rel < best.0 {
            best = (rel, x.clone());
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::ConvergenceFailure {
        residual: best.0,
        iterations: opts.max_iterations,
        best: Box::new(assemble(&best.1)),
    })
}
