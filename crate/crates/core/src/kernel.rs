//! Sparse cyclic point-spread functions.

use serde::{Deserialize, Serialize};

use crate::error::{DeblurError, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// One kernel entry: the weight deposited `offset` pixels away from the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub offset: i64,
    pub weight: f64,
}

/// Column-normalized sparse kernel. Taps are kept sorted by offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Tap>", into = "Vec<Tap>")]
pub struct BlurKernel {
    taps: Vec<Tap>,
}

impl BlurKernel {
    /// Builds a kernel from `(offset, weight)` pairs. Offsets must be distinct,
    /// weights nonnegative and summing to 1 within 1e-12.
    pub fn from_taps(taps: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut taps: Vec<Tap> = taps
            .into_iter()
            .map(|(offset, weight)| Tap { offset, weight })
            .collect();
        if taps.is_empty() {
            return Err(DeblurError::InvalidKernel("kernel has no taps".into()));
        }
        taps.sort_by_key(|t| t.offset);
        if let Some(w) = taps.windows(2).find(|w| w[0].offset == w[1].offset) {
            return Err(DeblurError::InvalidKernel(format!(
                "duplicate offset {}",
                w[0].offset
            )));
        }
        for t in &taps {
            if !t.weight.is_finite() || t.weight < 0.0 {
                return Err(DeblurError::InvalidKernel(format!(
                    "weight {} at offset {} must be finite and nonnegative",
                    t.weight, t.offset
                )));
            }
        }
        let sum: f64 = taps.iter().map(|t| t.weight).sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(DeblurError::InvalidKernel(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { taps })
    }

    /// The kernel `{0: 1}`.
    pub fn identity() -> Self {
        Self {
            taps: vec![Tap {
                offset: 0,
                weight: 1.0,
            }],
        }
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Weight at `offset`, 0 for absent taps.
    pub fn weight(&self, offset: i64) -> f64 {
        self.taps
            .iter()
            .find(|t| t.offset == offset)
            .map_or(0.0, |t| t.weight)
    }

    pub fn weight_sum(&self) -> f64 {
        self.taps.iter().map(|t| t.weight).sum()
    }

    pub fn max_abs_offset(&self) -> u64 {
        self.taps
            .iter()
            .map(|t| t.offset.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Weights folded onto residues modulo `n`.
    pub(crate) fn residue_weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for t in &self.taps {
            w[t.offset.rem_euclid(n as i64) as usize] += t.weight;
        }
        w
    }

    /// True when the weight at `d` equals the weight at `-d` modulo `n`.
    pub fn is_symmetric_mod(&self, n: usize) -> bool {
        let w = self.residue_weights(n);
        (0..n).all(|r| (w[r] - w[(n - r) % n]).abs() <= 1e-15)
    }

    pub(crate) fn check_dimension(&self, n: usize) -> Result<()> {
        if n == 0 || n < self.taps.len() || self.max_abs_offset() >= n as u64 {
            return Err(DeblurError::InvalidDimension(format!(
                "n = {n} too small for kernel with {} taps and max |offset| {}",
                self.taps.len(),
                self.max_abs_offset()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<Tap>> for BlurKernel {
    type Error = DeblurError;

    fn try_from(taps: Vec<Tap>) -> Result<Self> {
        Self::from_taps(taps.into_iter().map(|t| (t.offset, t.weight)))
    }
}

impl From<BlurKernel> for Vec<Tap> {
    fn from(k: BlurKernel) -> Self {
        k.taps
    }
}

/// `{0: 0.550, ±1: 0.225}`.
pub fn make_kernel_3bin() -> BlurKernel {
    BlurKernel::from_taps([(-1, 0.225), (0, 0.550), (1, 0.225)])
        .expect("3-bin kernel is normalized")
}

/// `{0: 0.250, ±1: 0.250, ±2: 0.125}`.
pub fn make_kernel_5bin() -> BlurKernel {
    BlurKernel::from_taps([(-2, 0.125), (-1, 0.250), (0, 0.250), (1, 0.250), (2, 0.125)])
        .expect("5-bin kernel is normalized")
}
