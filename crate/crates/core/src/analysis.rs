//! Diagnostics over solver runs: singular-coefficient trajectories, error
//! splits between null space and row space, and a simple contrast measure.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::solvers::SolverRun;
use crate::spectral::{
    decompose, null_space, row_space, BasisSide, DegenerateGroup, SvdFactorization,
};

/// Original coefficients below this magnitude make a ratio undefined.
pub const ABSENT_COEFF: f64 = 1e-14;

/// Per-iteration restored coefficients normalized to the original's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTable {
    pub iterations: Vec<usize>,
    /// `ratios[row][α] = F_α⁽ᵏ⁾ / F_α`, absent where `|F_α| < ABSENT_COEFF`.
    pub ratios: Vec<Vec<Option<f64>>>,
    pub groups: Vec<DegenerateGroup>,
    /// `group_ratios[row][g] = ‖P_g f⁽ᵏ⁾‖ / ‖P_g F‖`, basis independent.
    pub group_ratios: Vec<Vec<Option<f64>>>,
    pub original_coeffs: Vec<f64>,
}

impl TrajectoryTable {
    /// First recorded iteration at which each group's ratio reaches `threshold`.
    pub fn iterations_to_reach(&self, threshold: f64) -> Vec<Option<usize>> {
        (0..self.groups.len())
            .map(|g| {
                self.group_ratios
                    .iter()
                    .zip(&self.iterations)
                    .find(|(row, _)| row[g].is_some_and(|r| r >= threshold))
                    .map(|(_, &k)| k)
            })
            .collect()
    }

    pub fn final_ratios(&self) -> &[Option<f64>] {
        self.ratios.last().map_or(&[], Vec::as_slice)
    }

    pub fn final_group_ratios(&self) -> &[Option<f64>] {
        self.group_ratios.last().map_or(&[], Vec::as_slice)
    }
}

fn group_norm(coeffs: &[f64], group: &DegenerateGroup) -> f64 {
    coeffs[group.indices()]
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
}

/// Builds the trajectory table of `run` against `original` in the right singular basis.
pub fn coefficient_trajectories(
    run: &SolverRun,
    original: &ImageVec,
    svd: &SvdFactorization,
) -> Result<TrajectoryTable> {
    if !run.has_trace() {
        return Err(DeblurError::NoTrace);
    }
    check_len(svd.n(), original.len())?;
    check_len(svd.n(), run.restored.len())?;
    let base = decompose(original, svd, BasisSide::Right)?.coeffs;
    let groups = svd.degenerate_groups();
    let base_groups: Vec<f64> = groups.iter().map(|g| group_norm(&base, g)).collect();

    let mut iterations = Vec::with_capacity(run.trace.len());
    let mut ratios = Vec::with_capacity(run.trace.len());
    let mut group_ratios = Vec::with_capacity(run.trace.len());
    for row in &run.trace {
        let coeffs = match &row.coefficients {
            Some(c) => c.clone(),
            None => decompose(&ImageVec::new(row.values.clone())?, svd, BasisSide::Right)?.coeffs,
        };
        iterations.push(row.iteration);
        ratios.push(
            coeffs
                .iter()
                .zip(&base)
                .map(|(c, b)| (b.abs() >= ABSENT_COEFF).then(|| c / b))
                .collect(),
        );
        group_ratios.push(
            groups
                .iter()
                .zip(&base_groups)
                .map(|(g, &b)| (b >= ABSENT_COEFF).then(|| group_norm(&coeffs, g) / b))
                .collect(),
        );
    }
    Ok(TrajectoryTable {
        iterations,
        ratios,
        groups,
        group_ratios,
        original_coeffs: base,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub l2_error: f64,
    pub linf_error: f64,
    pub nullspace_error: f64,
    pub rowspace_error: f64,
    /// Σ max(0, -f_i).
    pub negativity: f64,
}

/// Error of `f` against the original `original`, split into the null space
/// (σ < `tol`) and its orthogonal complement.
pub fn quality_report(
    f: &ImageVec,
    original: &ImageVec,
    svd: &SvdFactorization,
    tol: f64,
) -> Result<QualityReport> {
    check_len(original.len(), f.len())?;
    check_len(svd.n(), f.len())?;
    let diff: Vec<f64> = f.iter().zip(original.iter()).map(|(a, b)| a - b).collect();
    let null = null_space(svd, tol)?;
    let row = row_space(svd, tol)?;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(QualityReport {
        l2_error: norm(&diff),
        linf_error: diff.iter().fold(0.0, |m, d| f64::max(m, d.abs())),
        nullspace_error: norm(&null.project(&diff)),
        rowspace_error: norm(&row.project(&diff)),
        negativity: f.iter().map(|&v| (-v).max(0.0)).sum(),
    })
}

/// `‖P_null f‖ / ‖P_null F‖`, or `None` when the original has no null content.
pub fn null_space_ratio(
    f: &ImageVec,
    original: &ImageVec,
    svd: &SvdFactorization,
    tol: f64,
) -> Result<Option<f64>> {
    check_len(original.len(), f.len())?;
    let null = null_space(svd, tol)?;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let base = norm(&null.coefficients(original));
    Ok((base >= ABSENT_COEFF).then(|| norm(&null.coefficients(f)) / base))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastMetric {
    /// Fraction of pixels below `low_threshold · max(F)`.
    pub fraction_low: f64,
    /// (max - min) / max, 0 for an all-zero image.
    pub range_ratio: f64,
}

pub fn contrast_metric(original: &ImageVec, low_threshold: f64) -> ContrastMetric {
    let max = original.max();
    let min = original.min();
    let cut = low_threshold * max;
    let low = original.iter().filter(|&&v| v < cut).count();
    ContrastMetric {
        fraction_low: low as f64 / original.len() as f64,
        range_ratio: if max == 0.0 { 0.0 } else { (max - min) / max },
    }
}
