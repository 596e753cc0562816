//! Preconditioned conjugate gradients for SPD operators.

use crate::error::SolveError;
use crate::precond::IcPreconditioner;
use crate::sparse::{axpy, dot, norm2, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgConfig {
    /// Relative residual target `‖Mx − b‖ ≤ tol·‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `10·n`.
    pub max_iter: Option<usize>,
    /// When the true residual stagnates above `tol` (rounding floor of an
    /// ill-conditioned system) or the cap is hit, accept the iterate if its
    /// relative residual is at most this.
    pub fallback_tol: Option<f64>,
}

impl Default for PcgConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            fallback_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `‖Mx − b‖ / ‖b‖` of the returned `x`.
    pub residual: f64,
}

/// Solves `M x = b` starting from zero.
///
/// The recursive residual drifts from the true one on ill-conditioned
/// systems, so convergence is confirmed against `b − Mx` and the iteration
/// restarts from the current iterate when the two disagree.
pub fn pcg_solve<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    pc: &IcPreconditioner,
    cfg: &PcgConfig,
) -> Result<PcgOutcome, SolveError> {
    let n = op.dim();
    if b.len() != n || pc.n() != n {
        return Err(SolveError::DimensionMismatch {
            expected: n,
            found: if b.len() != n { b.len() } else { pc.n() },
        });
    }
    let max_iter = cfg.max_iter.unwrap_or(10 * n.max(1));
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(PcgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = cfg.tol * b_norm;
    let mut last_true = f64::INFINITY;

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut iterations = 0;

    loop {
        pc.apply_into(&r, &mut z);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let mut r_norm = norm2(&r);

        while r_norm > target && iterations < max_iter {
            op.apply_into(&p, &mut q);
            let curvature = dot(&p, &q);
            if !(curvature > 0.0) {
                return Err(SolveError::Breakdown {
                    iteration: iterations,
                });
            }
            let alpha = rz / curvature;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &q, &mut r);
            iterations += 1;
            r_norm = norm2(&r);
            if r_norm <= target {
                break;
            }
            pc.apply_into(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }

        // true residual
        op.apply_into(&x, &mut q);
        for ((ri, bi), qi) in r.iter_mut().zip(b).zip(&q) {
            *ri = bi - qi;
        }
        let true_norm = norm2(&r);
        if true_norm <= target {
            return Ok(PcgOutcome {
                x,
                iterations,
                residual: true_norm / b_norm,
            });
        }
        let stagnated = true_norm > 0.5 * last_true;
        if iterations >= max_iter || stagnated {
            let residual = true_norm / b_norm;
            if cfg.fallback_tol.is_some_and(|f| residual <= f) {
                log::debug!("pcg accepted residual {residual:.2e} after {iterations} iterations");
                return Ok(PcgOutcome {
                    x,
                    iterations,
                    residual,
                });
            }
            return Err(SolveError::NonConvergence {
                iterations,
                residual,
            });
        }
        last_true = true_norm;
    }
}
