//! Pixel intensity vectors on a cyclic lattice and the test-image generators.

use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use crate::error::{DeblurError, Result};

/// Length-n intensity vector. Pixel indices wrap modulo n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ImageVec(Vec<f64>);

impl ImageVec {
    /// Wraps `values`, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(DeblurError::InvalidImage("image has no pixels".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DeblurError::InvalidImage(format!(
                "pixel {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::uniform(n, 0.0)
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Infinity-norm distance to `other`.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Euclidean distance to `other`.
    pub fn l2_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Cyclic shift: pixel i of the result holds pixel (i - s) mod n of `self`.
    pub fn shift(&self, s: i64) -> Self {
        let n = self.len() as i64;
        let values = (0..n)
            .map(|i| self.0[(i - s).rem_euclid(n) as usize])
            .collect();
        Self(values)
    }

    /// Reflection about pixel `center`: pixel c + d takes the value of pixel c - d.
    pub fn reflect(&self, center: i64) -> Self {
        let n = self.len() as i64;
        let values = (0..n)
            .map(|i| self.0[(2 * center - i).rem_euclid(n) as usize])
            .collect();
        Self(values)
    }

    /// Advisory check of the grayscale convention: every pixel in [0, 1].
    pub fn within_unit_interval(&self, tol: f64) -> bool {
        self.0.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }
}

impl Deref for ImageVec {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for ImageVec {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ImageVec {
    type Error = DeblurError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ImageVec> for Vec<f64> {
    fn from(image: ImageVec) -> Self {
        image.0
    }
}

/// Declarative description of a test image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Single bright pixel on a black field.
    Delta {
        index: usize,
        height: f64,
    },
    /// `length` contiguous pixels starting at `start` (wrapping) at `height`.
    Ramp {
        start: usize,
        length: usize,
        height: f64,
    },
    /// Uniform `background` with pixel `index` raised by `bump`.
    BackgroundPlusDelta {
        background: f64,
        index: usize,
        bump: f64,
    },
    /// Uniform `background` with a plateau of `length` pixels raised by `bump`.
    BackgroundPlusRamp {
        background: f64,
        start: usize,
        length: usize,
        bump: f64,
    },
    Uniform {
        value: f64,
    },
    Custom {
        values: Vec<f64>,
    },
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(DeblurError::InvalidImage(format!(
            "{name} = {v} outside [0, 1]"
        )))
    }
}

fn in_range(name: &str, index: usize, n: usize) -> Result<()> {
    if index < n {
        Ok(())
    } else {
        Err(DeblurError::InvalidImage(format!(
            "{name} = {index} out of range for n = {n}"
        )))
    }
}

/// Realizes `generator` on `n` pixels. Generated originals always lie in [0, 1].
pub fn generate_image(generator: &Generator, n: usize) -> Result<ImageVec> {
    if n == 0 {
        return Err(DeblurError::InvalidDimension("n must be positive".into()));
    }
    let values = match *generator {
        Generator::Delta { index, height } => {
            in_range("index", index, n)?;
            unit_interval("height", height)?;
            let mut v = vec![0.0; n];
            v[index] = height;
            v
        }
        Generator::Ramp {
            start,
            length,
            height,
        } => {
            in_range("start", start, n)?;
            if length == 0 || length > n {
                return Err(DeblurError::InvalidImage(format!(
                    "ramp length {length} must lie in [1, {n}]"
                )));
            }
            unit_interval("height", height)?;
            let mut v = vec![0.0; n];
            for k in 0..length {
                v[(start + k) % n] = height;
            }
            v
        }
        Generator::BackgroundPlusDelta {
            background,
            index,
            bump,
        } => {
            in_range("index", index, n)?;
            unit_interval("background", background)?;
            unit_interval("background + bump", background + bump)?;
            let mut v = vec![background; n];
            v[index] = background + bump;
            v
        }
        Generator::BackgroundPlusRamp {
            background,
            start,
            length,
            bump,
        } => {
            in_range("start", start, n)?;
            if length == 0 || length > n {
                return Err(DeblurError::InvalidImage(format!(
                    "plateau length {length} must lie in [1, {n}]"
                )));
            }
            unit_interval("background", background)?;
            unit_interval("background + bump", background + bump)?;
            let mut v = vec![background; n];
            for k in 0..length {
                v[(start + k) % n] = background + bump;
            }
            v
        }
        Generator::Uniform { value } => {
            unit_interval("value", value)?;
            vec![value; n]
        }
        Generator::Custom { ref values } => {
            if values.len() != n {
                return Err(DeblurError::DimensionMismatch {
                    expected: n,
                    actual: values.len(),
                });
            }
            for (i, &v) in values.iter().enumerate() {
                unit_interval(&format!("values[{i}]"), v)?;
            }
            values.clone()
        }
    };
    ImageVec::new(values)
}
