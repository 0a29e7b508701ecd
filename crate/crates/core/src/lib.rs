//! One-dimensional cyclic blurring and iterative deblurring.
//!
//! The crate models an image as a short vector of pixel intensities on a ring,
//! blurs it with a column-normalized circulant matrix, and restores it with
//! Richardson-Lucy (classical and extremum-regularized), Landweber (plain and
//! damped) and truncated-SVD inversion. The [`spectral`] module factors the
//! blurring matrix so restorations can be inspected in the singular basis, and
//! [`analysis`] turns solver traces into coefficient trajectories and error
//! summaries.
//!
//! ```
//! use deblur_core::{blur, generate_image, make_circulant_matrix, make_kernel_5bin,
//!     rl_deblur, Generator, SolverConfig};
//!
//! let t = make_circulant_matrix(&make_kernel_5bin(), 12).unwrap();
//! let original = generate_image(&Generator::Delta { index: 5, height: 1.0 }, 12).unwrap();
//! let g = blur(&t, &original).unwrap();
//! let run = rl_deblur(&g, &t, &SolverConfig::default()).unwrap();
//! assert!((run.restored[5] - 1.0).abs() < 1e-3);
//! ```

pub mod analysis;
pub mod error;
pub mod image;
pub mod kernel;
pub mod matrix;
pub mod solvers;
pub mod spectral;

pub use analysis::{
    coefficient_trajectories, contrast_metric, null_space_ratio, quality_report, ContrastMetric,
    QualityReport, TrajectoryTable,
};
pub use error::{DeblurError, Result};
pub use image::{generate_image, Generator, ImageVec};
pub use kernel::{make_kernel_3bin, make_kernel_5bin, BlurKernel};
pub use matrix::{blur, make_circulant_matrix, BlurMatrix, Matrix};
pub use solvers::{
    lw_deblur, regularization_factor, rl_amplification, rl_deblur, rl_regularized, tsvd_deblur,
    tsvd_deblur_literal, Init, LwParams, RlParams, SolverConfig, SolverRun, TraceRow,
};
pub use spectral::{
    circulant_spectrum_oracle, decompose, group_projector, null_space, project_row_space,
    reconstruct, row_space, svd, BasisSide, DegenerateGroup, SpectralCoefficients, Subspace,
    SvdFactorization,
};
