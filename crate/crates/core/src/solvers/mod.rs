//! Restoration methods: Richardson-Lucy (classical and regularized),
//! Landweber (plain and damped) and truncated SVD.

mod config;
mod landweber;
mod rl;
mod tsvd;

pub use config::{Init, LwParams, RlParams, SolverConfig, SolverRun, TraceRow};
pub use landweber::lw_deblur;
pub use rl::{regularization_factor, rl_amplification, rl_deblur, rl_regularized};
pub use tsvd::{tsvd_deblur, tsvd_deblur_literal};

use crate::error::Result;
use crate::image::ImageVec;

/// Shared iteration loop: applies `step` until the ∞-norm change drops below
/// `cfg.conv_tol` or `cfg.max_iters` is reached, recording trace rows.
pub(crate) fn iterate<F>(init: ImageVec, cfg: &SolverConfig, mut step: F) -> Result<SolverRun>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut f = init.into_vec();
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(TraceRow::new(0, &f, 0.0));
    }
    let mut converged = false;
    let mut done = 0;
    for k in 1..=cfg.max_iters {
        let next = step(&f)?;
        let change = next
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        f = next;
        done = k;
        if !change.is_finite() || f.iter().any(|v| !v.is_finite()) {
            return Err(crate::DeblurError::NumericalFailure(format!(
                "iterate became non-finite at k = {k}"
            )));
        }
        converged = change < cfg.conv_tol;
        let last = converged || k == cfg.max_iters;
        if cfg.record_trace && (k % cfg.trace_every == 0 || last) {
            trace.push(TraceRow::new(k, &f, change));
        }
        if converged {
            break;
        }
    }
    Ok(SolverRun {
        restored: ImageVec::new(f)?,
        iterations_done: done,
        converged,
        trace,
    })
}
