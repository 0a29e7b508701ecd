//! Singular value decomposition of blurring matrices and singular-basis
//! expansions of images.
//!
//! The factorization is computed with one-sided (Hestenes) Jacobi rotations
//! applied directly to T, which keeps tiny and zero singular values accurate
//! to roughly machine precision relative to `‖T‖`. For circulant matrices the
//! result can be cross-checked against [`circulant_spectrum_oracle`], which
//! evaluates the kernel's discrete Fourier transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::kernel::BlurKernel;
use crate::matrix::{BlurMatrix, Matrix};

const MAX_SWEEPS: usize = 100;
const REL_ORTHOGONALITY: f64 = 1e-15;
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-14;
/// Default null-space tolerance relative to σ_0.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;
/// Singular values within this fraction of σ_0 are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdFactorization {
    /// Nonincreasing singular values.
    pub sigma: Vec<f64>,
    /// Left singular vectors as columns.
    pub u: Matrix,
    /// Right singular vectors as columns.
    pub v: Matrix,
    /// Singular values at or below this are classified as zero.
    pub rank_tol: f64,
}

/// A run of (numerically) equal singular values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateGroup {
    pub start: usize,
    pub len: usize,
    pub sigma: f64,
}

impl DegenerateGroup {
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    pub fn contains(&self, alpha: usize) -> bool {
        self.indices().contains(&alpha)
    }
}

impl SvdFactorization {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn u_col(&self, alpha: usize) -> Vec<f64> {
        self.u.column(alpha)
    }

    pub fn v_col(&self, alpha: usize) -> Vec<f64> {
        self.v.column(alpha)
    }

    pub fn basis(&self, side: BasisSide, alpha: usize) -> Vec<f64> {
        match side {
            BasisSide::Right => self.v_col(alpha),
            BasisSide::Left => self.u_col(alpha),
        }
    }

    /// Number of singular values above `rank_tol`.
    pub fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.rank_tol).count()
    }

    /// Groups of consecutive singular values equal within `DEGENERACY_TOL · σ_0`.
    /// All singular values at or below `rank_tol` form one group.
    pub fn degenerate_groups(&self) -> Vec<DegenerateGroup> {
        let tol = DEGENERACY_TOL * self.sigma_max().max(f64::MIN_POSITIVE);
        let mut groups: Vec<DegenerateGroup> = Vec::new();
        for (alpha, &s) in self.sigma.iter().enumerate() {
            match groups.last_mut() {
                Some(g)
                    if (g.sigma - s).abs() <= tol
                        || (g.sigma <= self.rank_tol && s <= self.rank_tol) =>
                {
                    g.len += 1
                }
                _ => groups.push(DegenerateGroup {
                    start: alpha,
                    len: 1,
                    sigma: s,
                }),
            }
        }
        groups
    }

    /// Σ_α σ_α u_α v_αᵀ.
    pub fn reconstruct_matrix(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for alpha in 0..n {
            let s = self.sigma[alpha];
            for i in 0..n {
                let us = self.u[(i, alpha)] * s;
                for j in 0..n {
                    m[(i, j)] += us * self.v[(j, alpha)];
                }
            }
        }
        m
    }
}

/// Which singular basis an expansion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSide {
    /// Right singular vectors v_α (originals and restorations).
    Right,
    /// Left singular vectors u_α (blurred images).
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub coeffs: Vec<f64>,
    pub basis_side: BasisSide,
}

impl SpectralCoefficients {
    pub fn norm2(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Orthonormal basis of a subspace, stored as vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for b in &self.basis {
            let c = dot(b, x);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let nrm = dot(x, x).sqrt();
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    nrm
}

/// Gram-Schmidt (applied twice) of `x` against `basis`; returns the residual norm.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
    normalize(x)
}

/// Singular value decomposition of `t`.
///
/// Sign convention: the first component of each v_α with magnitude above 1e-12
/// is positive, and u_α is flipped with it. Left vectors for zero singular
/// values are completed by orthogonalizing the matching right vectors (then
/// unit vectors) against the nonzero left vectors.
pub fn svd(t: &BlurMatrix) -> Result<SvdFactorization> {
    svd_matrix(t.entries())
}

pub(crate) fn svd_matrix(t: &Matrix) -> Result<SvdFactorization> {
    let n = t.rows();
    if n == 0 || t.cols() != n {
        return Err(DeblurError::InvalidDimension(format!(
            "svd needs a nonempty square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let fro = t.frobenius_norm();
    if !fro.is_finite() {
        return Err(DeblurError::NumericalFailure(
            "matrix has non-finite entries".into(),
        ));
    }
    let abs_floor = OFF_DIAGONAL_THRESHOLD * fro;

    // Working columns of A = T V and the accumulated rotations V.
    let mut a: Vec<Vec<f64>> = (0..n).map(|j| t.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma.abs() <= REL_ORTHOGONALITY * (alpha * beta).sqrt()
                    || gamma.abs().sqrt() <= abs_floor
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                for cols in [&mut a, &mut v] {
                    let (left, right) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut left[p], &mut right[0]);
                    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = cos * xp - sin * yq;
                        *y = sin * xp + cos * yq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DeblurError::NumericalFailure(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = a.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let rank_tol = DEFAULT_NULL_TOL * sigma[0];

    let mut v_cols: Vec<Vec<f64>> = order.iter().map(|&k| v[k].clone()).collect();
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (alpha, &k) in order.iter().enumerate() {
        if sigma[alpha] > rank_tol {
            u_cols.push(a[k].iter().map(|x| x / sigma[alpha]).collect());
        }
    }
    let nonzero = u_cols.len();
    for seed in &v_cols[nonzero..] {
        let mut candidate = seed.clone();
        if orthogonalize(&mut candidate, &u_cols) < 1e-8 {
            let mut placed = false;
            for e in 0..n {
                let mut unit = vec![0.0; n];
                unit[e] = 1.0;
                if orthogonalize(&mut unit, &u_cols) > 1e-8 {
                    candidate = unit;
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(DeblurError::NumericalFailure(
                    "could not complete left singular basis".into(),
                ));
            }
        }
        u_cols.push(candidate);
    }

    for (vc, uc) in v_cols.iter_mut().zip(u_cols.iter_mut()) {
        if let Some(&lead) = vc.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                vc.iter_mut().for_each(|x| *x = -*x);
                uc.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }

    Ok(SvdFactorization {
        sigma,
        u: Matrix::from_columns(&u_cols)?,
        v: Matrix::from_columns(&v_cols)?,
        rank_tol,
    })
}

/// Eigenvalues of the circulant matrix generated by `kernel`:
/// `λ_k = Σ_d w_d cos(2πkd/n)` for a symmetric kernel (signed, real), and the
/// modulus `|Σ_d w_d e^{-2πikd/n}|` otherwise. Singular values are `|λ_k|`.
pub fn circulant_spectrum_oracle(kernel: &BlurKernel, n: usize) -> Result<Vec<f64>> {
    kernel.check_dimension(n)?;
    let symmetric = kernel.is_symmetric_mod(n);
    let spectrum = (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for tap in kernel.taps() {
                let phase = 2.0 * PI * (k as f64) * (tap.offset as f64) / n as f64;
                re += tap.weight * phase.cos();
                im -= tap.weight * phase.sin();
            }
            if symmetric {
                re
            } else {
                re.hypot(im)
            }
        })
        .collect();
    Ok(spectrum)
}

/// Expansion coefficients `⟨basis_α, x⟩` in the chosen singular basis.
pub fn decompose(
    x: &ImageVec,
    svd: &SvdFactorization,
    side: BasisSide,
) -> Result<SpectralCoefficients> {
    check_len(svd.n(), x.len())?;
    let basis = match side {
        BasisSide::Right => &svd.v,
        BasisSide::Left => &svd.u,
    };
    Ok(SpectralCoefficients {
        coeffs: basis.transpose_mul_vec(x),
        basis_side: side,
    })
}

/// Inverse of [`decompose`]: `Σ_α c_α basis_α`.
pub fn reconstruct(c: &SpectralCoefficients, svd: &SvdFactorization) -> Result<ImageVec> {
    check_len(svd.n(), c.coeffs.len())?;
    let basis = match c.basis_side {
        BasisSide::Right => &svd.v,
        BasisSide::Left => &svd.u,
    };
    ImageVec::new(basis.mul_vec(&c.coeffs))
}

fn check_tol(svd: &SvdFactorization, tol: f64) -> Result<()> {
    let smax = svd.sigma_max();
    if !(tol > 0.0 && tol < smax) {
        return Err(DeblurError::InvalidTolerance {
            tol,
            sigma_max: smax,
        });
    }
    Ok(())
}

/// Right singular vectors with σ_α < `tol`.
pub fn null_space(svd: &SvdFactorization, tol: f64) -> Result<Subspace> {
    check_tol(svd, tol)?;
    let basis = svd
        .sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < tol)
        .map(|(alpha, _)| svd.v_col(alpha))
        .collect();
    Ok(Subspace { basis })
}

/// Right singular vectors with σ_α ≥ `tol`.
pub fn row_space(svd: &SvdFactorization, tol: f64) -> Result<Subspace> {
    check_tol(svd, tol)?;
    let basis = svd
        .sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= tol)
        .map(|(alpha, _)| svd.v_col(alpha))
        .collect();
    Ok(Subspace { basis })
}

/// `x` with its null-space component removed.
pub fn project_row_space(x: &ImageVec, svd: &SvdFactorization, tol: f64) -> Result<ImageVec> {
    check_len(svd.n(), x.len())?;
    let null = null_space(svd, tol)?;
    let p = null.project(x);
    ImageVec::new(x.iter().zip(&p).map(|(a, b)| a - b).collect())
}

/// Orthogonal projector onto the span of `basis_side` vectors in `group`.
pub fn group_projector(svd: &SvdFactorization, group: &DegenerateGroup, side: BasisSide) -> Matrix {
    let n = svd.n();
    let mut p = Matrix::zeros(n, n);
    for alpha in group.indices() {
        let b = svd.basis(side, alpha);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += b[i] * b[j];
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{generate_image, Generator};
    use crate::kernel::{make_kernel_3bin, make_kernel_5bin};
    use crate::matrix::{blur, make_circulant_matrix};
    use proptest::prelude::*;

    fn svd_of(kernel: &BlurKernel, n: usize) -> (BlurMatrix, SvdFactorization) {
        let t = make_circulant_matrix(kernel, n).unwrap();
        let s = svd(&t).unwrap();
        (t, s)
    }

    /// Independent oracle: direct cosine sum written out for the 5-bin kernel.
    fn five_bin_cosine_spectrum(n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                0.25 + 0.5 * th.cos() + 0.25 * (2.0 * th).cos()
            })
            .collect()
    }

    fn sorted_abs(mut x: Vec<f64>) -> Vec<f64> {
        x.iter_mut().for_each(|v| *v = v.abs());
        x.sort_by(|a, b| b.total_cmp(a));
        x
    }

    fn check_invariants(t: &BlurMatrix, s: &SvdFactorization) {
        let n = t.n();
        for w in s.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(s.sigma.iter().all(|&x| x >= 0.0));
        let utu = s.u.transpose().matmul(&s.u).unwrap();
        let vtv = s.v.transpose().matmul(&s.v).unwrap();
        assert!(utu.max_abs_diff(&Matrix::identity(n)) < 1e-10);
        assert!(vtv.max_abs_diff(&Matrix::identity(n)) < 1e-10);
        assert!(s.reconstruct_matrix().max_abs_diff(t.entries()) < 1e-10);
        let m = t.entries().transpose().matmul(t.entries()).unwrap();
        for alpha in 0..n {
            let va = s.v_col(alpha);
            let mv = m.mul_vec(&va);
            let s2 = s.sigma[alpha] * s.sigma[alpha];
            for (x, y) in mv.iter().zip(&va) {
                assert!((x - s2 * y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let (t, s) = svd_of(&BlurKernel::identity(), 4);
        assert_eq!(s.sigma, vec![1.0; 4]);
        check_invariants(&t, &s);
        assert_eq!(null_space(&s, 0.5).unwrap().dim(), 0);
    }

    #[test]
    fn five_bin_spectrum_matches_cosine_oracle() {
        let (t, s) = svd_of(&make_kernel_5bin(), 12);
        check_invariants(&t, &s);
        let expected = sorted_abs(five_bin_cosine_spectrum(12));
        for (a, b) in s.sigma.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // Frozen from the oracle above.
        let frozen = [
            1.0,
            0.808012701892219,
            0.808012701892219,
            0.375,
            0.375,
            0.125,
            0.125,
            0.058012701892219,
            0.058012701892219,
            0.0,
            0.0,
            0.0,
        ];
        for (a, b) in s.sigma.iter().zip(&frozen) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(s.rank(), 9);
    }

    #[test]
    fn three_bin_smallest_sigma() {
        let (t, s) = svd_of(&make_kernel_3bin(), 12);
        check_invariants(&t, &s);
        assert!((s.sigma[11] - 0.10).abs() < 1e-10);
        let alt: Vec<f64> = (0..12)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / 12f64.sqrt())
            .collect();
        assert!(dot(&s.v_col(11), &alt).abs() > 1.0 - 1e-10);
        assert_eq!(null_space(&s, 1e-10).unwrap().dim(), 0);
    }

    #[test]
    fn oracle_values() {
        let f = circulant_spectrum_oracle(&make_kernel_5bin(), 12).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-15);
        assert!(f[6].abs() < 1e-15);
        let t = circulant_spectrum_oracle(&make_kernel_3bin(), 12).unwrap();
        assert!((t[6] - 0.10).abs() < 1e-15);
    }

    #[test]
    fn oracle_modulus_for_asymmetric_kernel() {
        let k = BlurKernel::from_taps([(0, 0.6), (1, 0.3), (3, 0.1)]).unwrap();
        let spec = circulant_spectrum_oracle(&k, 8).unwrap();
        let (t, s) = svd_of(&k, 8);
        check_invariants(&t, &s);
        for (a, b) in s.sigma.iter().zip(sorted_abs(spec)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn five_bin_null_space_dimension() {
        let (_, s) = svd_of(&make_kernel_5bin(), 12);
        assert_eq!(null_space(&s, 1e-10).unwrap().dim(), 3);
    }

    #[test]
    fn invalid_tolerance() {
        let (_, s) = svd_of(&make_kernel_5bin(), 12);
        assert!(matches!(
            null_space(&s, 2.0),
            Err(DeblurError::InvalidTolerance { .. })
        ));
        assert!(matches!(
            null_space(&s, 0.0),
            Err(DeblurError::InvalidTolerance { .. })
        ));
    }

    #[test]
    fn sign_convention_and_determinism() {
        let (_, s1) = svd_of(&make_kernel_5bin(), 12);
        let (_, s2) = svd_of(&make_kernel_5bin(), 12);
        assert_eq!(s1, s2);
        for alpha in 0..12 {
            let v = s1.v_col(alpha);
            let lead = v.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*lead > 0.0);
        }
    }

    #[test]
    fn negative_eigenvalues_flip_left_vectors() {
        // λ_4 = -0.125 for 5-bin at n = 12: u spans the same space as v, with sign -1.
        let (t, s) = svd_of(&make_kernel_5bin(), 12);
        for alpha in 5..7 {
            let u = s.u_col(alpha);
            let v = s.v_col(alpha);
            let tv = t.apply(&v);
            for ((a, b), c) in tv.iter().zip(&u).zip(&v) {
                assert!((a - 0.125 * b).abs() < 1e-12);
                assert!((b + c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_groups_five_bin() {
        let (_, s) = svd_of(&make_kernel_5bin(), 12);
        let lens: Vec<usize> = s.degenerate_groups().iter().map(|g| g.len).collect();
        assert_eq!(lens, vec![1, 2, 2, 2, 2, 3]);
    }

    #[test]
    fn decompose_examples() {
        let (t, s) = svd_of(&make_kernel_5bin(), 12);
        let c = 0.4;
        let uni = ImageVec::uniform(12, c).unwrap();
        let cu = decompose(&uni, &s, BasisSide::Right).unwrap();
        assert!((cu.coeffs[0] - c * 12f64.sqrt()).abs() < 1e-12);
        assert!(cu.coeffs[1..].iter().all(|x| x.abs() < 1e-12));

        let v3 = ImageVec::new(s.v_col(3)).unwrap();
        let c3 = decompose(&v3, &s, BasisSide::Right).unwrap();
        for (alpha, x) in c3.coeffs.iter().enumerate() {
            let e = if alpha == 3 { 1.0 } else { 0.0 };
            assert!((x - e).abs() < 1e-12);
        }

        let f = generate_image(
            &Generator::Delta {
                index: 5,
                height: 1.0,
            },
            12,
        )
        .unwrap();
        let g = blur(&t, &f).unwrap();
        let fa = decompose(&f, &s, BasisSide::Right).unwrap();
        let ga = decompose(&g, &s, BasisSide::Left).unwrap();
        for alpha in 0..12 {
            assert!((ga.coeffs[alpha] - s.sigma[alpha] * fa.coeffs[alpha]).abs() < 1e-12);
        }
        assert!(reconstruct(&fa, &s).unwrap().max_abs_diff(&f) < 1e-10);
        assert!(reconstruct(&ga, &s).unwrap().max_abs_diff(&g) < 1e-10);
        let zero = SpectralCoefficients {
            coeffs: vec![0.0; 12],
            basis_side: BasisSide::Left,
        };
        assert!(reconstruct(&zero, &s).unwrap().iter().all(|&x| x == 0.0));
        assert!(decompose(&ImageVec::zeros(3).unwrap(), &s, BasisSide::Right).is_err());
    }

    #[test]
    fn row_space_projection_of_delta() {
        let (_, s) = svd_of(&make_kernel_5bin(), 12);
        let f = generate_image(
            &Generator::Delta {
                index: 5,
                height: 1.0,
            },
            12,
        )
        .unwrap();
        let p = project_row_space(&f, &s, 1e-10).unwrap();
        // Exact values: 1/12 everywhere, -1/4 at pixels 1, 9, 3/4 at pixel 5.
        for (i, &x) in p.iter().enumerate() {
            let e = match i {
                1 | 9 => -0.25,
                5 => 0.75,
                _ => 1.0 / 12.0,
            };
            assert!((x - e).abs() < 1e-12, "pixel {i}: {x}");
        }
        let ramp = generate_image(
            &Generator::Ramp {
                start: 5,
                length: 4,
                height: 1.0,
            },
            12,
        )
        .unwrap();
        assert!(
            project_row_space(&ramp, &s, 1e-10)
                .unwrap()
                .max_abs_diff(&ramp)
                < 1e-12
        );

        let (_, s3) = svd_of(&make_kernel_3bin(), 12);
        assert!(project_row_space(&f, &s3, 1e-10).unwrap().max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn multiplicities_for_builtin_kernels() {
        for n in 3..=32 {
            for kernel in [make_kernel_3bin(), make_kernel_5bin()] {
                if kernel.check_dimension(n).is_err() {
                    continue;
                }
                let (t, s) = svd_of(&kernel, n);
                let oracle = sorted_abs(circulant_spectrum_oracle(&kernel, n).unwrap());
                for (a, b) in s.sigma.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
                }
                let groups = s.degenerate_groups();
                // The constant vector carries the nondegenerate σ = 1.
                assert_eq!(groups[0].len, 1);
                assert!((groups[0].sigma - 1.0).abs() < 1e-12);
                let ones: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
                assert!(dot(&s.v_col(0), &ones).abs() > 1.0 - 1e-12);
                for g in &groups {
                    assert!((1..=3).contains(&g.len), "n={n}: group {g:?}");
                    let pu = group_projector(&s, g, BasisSide::Left);
                    let pv = group_projector(&s, g, BasisSide::Right);
                    assert!(pu.max_abs_diff(&pv) < 1e-9, "n={n}");
                }
                let _ = t;
            }
        }
    }

    fn image_strategy(n: usize) -> impl Strategy<Value = ImageVec> {
        prop::collection::vec(-1.0f64..1.0, n).prop_map(|v| ImageVec::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn parseval_and_roundtrip(x in image_strategy(12)) {
            let (_, s) = svd_of(&make_kernel_5bin(), 12);
            for side in [BasisSide::Left, BasisSide::Right] {
                let c = decompose(&x, &s, side).unwrap();
                prop_assert!((c.norm2() - x.norm2()).abs() < 1e-10);
                prop_assert!(reconstruct(&c, &s).unwrap().max_abs_diff(&x) < 1e-10);
            }
        }

        #[test]
        fn row_space_projection_is_idempotent(x in image_strategy(12)) {
            let (_, s) = svd_of(&make_kernel_5bin(), 12);
            let p = project_row_space(&x, &s, 1e-10).unwrap();
            let pp = project_row_space(&p, &s, 1e-10).unwrap();
            prop_assert!(p.max_abs_diff(&pp) < 1e-12);
        }

        #[test]
        fn random_kernels_satisfy_svd_invariants(
            w in prop::collection::vec(0.01f64..1.0, 4),
            n in 7usize..16,
        ) {
            let total: f64 = w.iter().sum();
            let k = BlurKernel::from_taps([
                (-1, w[0] / total), (0, w[1] / total), (1, w[2] / total),
                (3, 1.0 - (w[0] + w[1] + w[2]) / total),
            ]).unwrap();
            let (t, s) = svd_of(&k, n);
            check_invariants(&t, &s);
            let oracle = sorted_abs(circulant_spectrum_oracle(&k, n).unwrap());
            for (a, b) in s.sigma.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
