use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::matrix::BlurMatrix;

use super::config::{RlParams, SolverConfig, SolverRun};
use super::iterate;

/// Back-projected ratio of measured to predicted intensities.
///
/// Predictions below `ratio_floor` are clamped to it; a zero measurement over a
/// vanishing prediction contributes nothing.
fn amplification(f: &[f64], g: &[f64], t: &BlurMatrix, q: &[f64], ratio_floor: f64) -> Vec<f64> {
    let predicted = t.apply(f);
    let ratio: Vec<f64> = g
        .iter()
        .zip(&predicted)
        .map(|(&gj, &pj)| {
            if pj < ratio_floor {
                if gj == 0.0 {
                    0.0
                } else {
                    gj / ratio_floor
                }
            } else {
                gj / pj
            }
        })
        .collect();
    t.apply_transpose(&ratio)
        .into_iter()
        .zip(q)
        .map(|(s, &qi)| if qi > 0.0 { s / qi } else { 0.0 })
        .collect()
}

/// Amplification factors A_i = (1/q_i) Σ_j T_ji g_j / (T f)_j.
pub fn rl_amplification(
    f_k: &ImageVec,
    g: &ImageVec,
    t: &BlurMatrix,
    ratio_floor: f64,
) -> Result<ImageVec> {
    check_len(t.n(), f_k.len())?;
    check_len(t.n(), g.len())?;
    if !f_k.is_nonnegative() {
        return Err(DeblurError::Domain("f_k has negative entries".into()));
    }
    if ratio_floor.is_nan() || ratio_floor <= 0.0 {
        return Err(DeblurError::InvalidParameter(
            "ratio_floor must be > 0".into(),
        ));
    }
    let q = t.column_sums();
    ImageVec::new(amplification(f_k, g, t, &q, ratio_floor))
}

fn extremum_factors(f: &[f64], lambda: f64) -> Vec<f64> {
    let n = f.len();
    let up = 1.0 / (1.0 - lambda);
    let down = 1.0 / (1.0 + lambda);
    (0..n)
        .map(|i| {
            let left = f[(i + n - 1) % n];
            let right = f[(i + 1) % n];
            if f[i] < left && f[i] < right {
                up
            } else if f[i] > left && f[i] > right {
                down
            } else {
                1.0
            }
        })
        .collect()
}

/// Regularization factors I_i: 1/(1-Λ) at strict local minima, 1/(1+Λ) at
/// strict local maxima, 1 elsewhere. Ties fall to the last case.
pub fn regularization_factor(f_k: &ImageVec, lambda: f64) -> Result<ImageVec> {
    RlParams::new(lambda)?;
    ImageVec::new(extremum_factors(f_k, lambda))
}

fn rl_run(g: &ImageVec, t: &BlurMatrix, lambda: f64, cfg: &SolverConfig) -> Result<SolverRun> {
    cfg.validate()?;
    check_len(t.n(), g.len())?;
    if !g.is_nonnegative() {
        return Err(DeblurError::Domain(
            "blurred image has negative entries".into(),
        ));
    }
    let init = cfg.initial_image(g)?;
    if !init.is_nonnegative() {
        return Err(DeblurError::Domain(
            "initial guess has negative entries".into(),
        ));
    }
    let q = t.column_sums();
    let floor = cfg.ratio_floor;
    iterate(init, cfg, |f| {
        let a = amplification(f, g, t, &q, floor);
        let next = if lambda == 0.0 {
            a.iter().zip(f).map(|(ai, fi)| ai * fi).collect()
        } else {
            let reg = extremum_factors(f, lambda);
            a.iter()
                .zip(&reg)
                .zip(f)
                .map(|((ai, ii), fi)| ai * ii * fi)
                .collect()
        };
        Ok(next)
    })
}

/// Classical Richardson-Lucy: f⁽ᵏ⁺¹⁾ = A⁽ᵏ⁾ f⁽ᵏ⁾ elementwise.
pub fn rl_deblur(g: &ImageVec, t: &BlurMatrix, cfg: &SolverConfig) -> Result<SolverRun> {
    rl_run(g, t, 0.0, cfg)
}

/// Regularized Richardson-Lucy: f⁽ᵏ⁺¹⁾ = A⁽ᵏ⁾ I⁽ᵏ⁾ f⁽ᵏ⁾ elementwise.
pub fn rl_regularized(
    g: &ImageVec,
    t: &BlurMatrix,
    params: RlParams,
    cfg: &SolverConfig,
) -> Result<SolverRun> {
    params.validate()?;
    rl_run(g, t, params.lambda, cfg)
}
