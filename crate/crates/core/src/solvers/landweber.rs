use crate::error::{check_len, Result};
use crate::image::ImageVec;
use crate::matrix::BlurMatrix;
use crate::spectral::svd;

use super::config::{LwParams, SolverConfig, SolverRun};
use super::iterate;

/// Landweber iteration f⁽ᵏ⁺¹⁾ = (1 - βε) f⁽ᵏ⁾ + β Tᵀ(g - T f⁽ᵏ⁾).
///
/// β must lie in (0, 2/σ_0²); σ_0 comes from `params.sigma_max` or an SVD of
/// `t`. No sign constraint is applied.
pub fn lw_deblur(
    g: &ImageVec,
    t: &BlurMatrix,
    params: LwParams,
    cfg: &SolverConfig,
) -> Result<SolverRun> {
    cfg.validate()?;
    check_len(t.n(), g.len())?;
    let sigma_max = match params.sigma_max {
        Some(s) => s,
        None => svd(t)?.sigma_max(),
    };
    params.validate(sigma_max)?;
    let init = cfg.initial_image(g)?;
    let beta = params.beta;
    let keep = 1.0 - beta * params.epsilon;
    iterate(init, cfg, |f| {
        let residual: Vec<f64> = t
            .apply(f)
            .iter()
            .zip(g.iter())
            .map(|(p, gj)| gj - p)
            .collect();
        let back = t.apply_transpose(&residual);
        Ok(f.iter()
            .zip(&back)
            .map(|(fi, bi)| keep * fi + beta * bi)
            .collect())
    })
}
