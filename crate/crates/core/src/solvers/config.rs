use serde::{Deserialize, Serialize};

use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::spectral::{decompose, BasisSide, SvdFactorization};

/// Initial guess f⁽⁰⁾.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Uniform image at mean(g), so total intensity matches from the start.
    #[default]
    Uniform,
    /// f⁽⁰⁾ = g.
    Blurred,
    Custom(ImageVec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the ∞-norm change of one iteration falls below this.
    pub conv_tol: f64,
    pub init: Init,
    /// Record every `trace_every`-th iterate (the final one is always recorded).
    pub trace_every: usize,
    /// Floor for predicted intensities in the Richardson-Lucy ratio.
    pub ratio_floor: f64,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            conv_tol: 1e-12,
            init: Init::Uniform,
            trace_every: 1,
            ratio_floor: 1e-15,
            record_trace: true,
        }
    }
}

impl SolverConfig {
    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_conv_tol(mut self, conv_tol: f64) -> Self {
        self.conv_tol = conv_tol;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_trace_every(mut self, trace_every: usize) -> Self {
        self.trace_every = trace_every;
        self
    }

    pub fn without_trace(mut self) -> Self {
        self.record_trace = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(DeblurError::InvalidParameter(
                "max_iters must be >= 1".into(),
            ));
        }
        if self.conv_tol.is_nan() || self.conv_tol < 0.0 {
            return Err(DeblurError::InvalidParameter(
                "conv_tol must be >= 0".into(),
            ));
        }
        if !self.ratio_floor.is_finite() || self.ratio_floor <= 0.0 {
            return Err(DeblurError::InvalidParameter(
                "ratio_floor must be > 0".into(),
            ));
        }
        if self.trace_every == 0 {
            return Err(DeblurError::InvalidParameter(
                "trace_every must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn initial_image(&self, g: &ImageVec) -> Result<ImageVec> {
        match &self.init {
            Init::Uniform => ImageVec::uniform(g.len(), g.mean()),
            Init::Blurred => Ok(g.clone()),
            Init::Custom(f0) => {
                check_len(g.len(), f0.len())?;
                Ok(f0.clone())
            }
        }
    }
}

/// Richardson-Lucy regularization strength Λ ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlParams {
    pub lambda: f64,
}

impl RlParams {
    pub fn new(lambda: f64) -> Result<Self> {
        let p = Self { lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..1.0).contains(&self.lambda) {
            Ok(())
        } else {
            Err(DeblurError::InvalidParameter(format!(
                "lambda = {} must lie in [0, 1)",
                self.lambda
            )))
        }
    }
}

/// Landweber step size β and damping ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LwParams {
    pub beta: f64,
    pub epsilon: f64,
    /// Known σ_0 of T; computed by SVD when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
}

impl Default for LwParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            epsilon: 0.0,
            sigma_max: None,
        }
    }
}

impl LwParams {
    pub fn new(beta: f64, epsilon: f64) -> Self {
        Self {
            beta,
            epsilon,
            sigma_max: None,
        }
    }

    pub fn with_sigma_max(mut self, sigma_max: f64) -> Self {
        self.sigma_max = Some(sigma_max);
        self
    }

    pub(crate) fn validate(&self, sigma_max: f64) -> Result<()> {
        let bound = 2.0 / (sigma_max * sigma_max);
        if !(self.beta > 0.0 && self.beta < bound) {
            return Err(DeblurError::InvalidParameter(format!(
                "beta = {} outside (0, {bound}) for sigma_0 = {sigma_max}",
                self.beta
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(DeblurError::InvalidParameter(format!(
                "epsilon = {} must be finite and >= 0",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub values: Vec<f64>,
    /// ∞-norm change from the previous iterate (0 for the initial guess).
    pub change: f64,
    /// Right-singular-basis coefficients, when attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
}

impl TraceRow {
    pub(crate) fn new(iteration: usize, values: &[f64], change: f64) -> Self {
        Self {
            iteration,
            values: values.to_vec(),
            change,
            coefficients: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub restored: ImageVec,
    pub iterations_done: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

impl SolverRun {
    /// Fills in singular coefficients for every trace row.
    pub fn attach_coefficients(&mut self, svd: &SvdFactorization) -> Result<()> {
        for row in &mut self.trace {
            let x = ImageVec::new(row.values.clone())?;
            row.coefficients = Some(decompose(&x, svd, BasisSide::Right)?.coeffs);
        }
        Ok(())
    }

    pub fn has_trace(&self) -> bool {
        !self.trace.is_empty()
    }
}
