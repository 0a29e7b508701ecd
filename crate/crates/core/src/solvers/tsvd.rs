use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::spectral::SvdFactorization;

fn check_truncation(svd: &SvdFactorization, m: usize) -> Result<()> {
    let n = svd.n();
    if m == 0 || m > n {
        return Err(DeblurError::InvalidParameter(format!(
            "truncation m = {m} must lie in [1, {n}]"
        )));
    }
    let sigma = svd.sigma[m - 1];
    if sigma <= svd.rank_tol {
        return Err(DeblurError::RankDeficientTruncation {
            m,
            index: m - 1,
            sigma,
        });
    }
    Ok(())
}

fn accumulate(
    f: &mut [f64],
    svd: &SvdFactorization,
    g: &[f64],
    alphas: impl Iterator<Item = usize>,
) {
    for alpha in alphas {
        let u = svd.u_col(alpha);
        let coeff = u.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / svd.sigma[alpha];
        for (fi, vi) in f.iter_mut().zip(svd.v_col(alpha)) {
            *fi += coeff * vi;
        }
    }
}

/// Truncated-SVD restoration f = Σ_{α<m} (⟨u_α, g⟩ / σ_α) v_α.
///
/// When the cut at `m` splits a degenerate group, the basis of that group is
/// rotated so its kept directions start with the projection of `g` onto the
/// group. That is the choice of `T_m` within the degeneracy that minimizes
/// `‖g - T_m f‖`, and it makes the result independent of the arbitrary basis
/// the SVD returned for the group: the split group contributes its full
/// projection of `g`.
pub fn tsvd_deblur(g: &ImageVec, svd: &SvdFactorization, m: usize) -> Result<ImageVec> {
    check_len(svd.n(), g.len())?;
    check_truncation(svd, m)?;
    let mut f = vec![0.0; g.len()];
    for group in svd.degenerate_groups() {
        if group.start >= m {
            break;
        }
        accumulate(&mut f, svd, g, group.indices());
    }
    ImageVec::new(f)
}

/// Truncated-SVD restoration using exactly the first `m` vectors of `svd`,
/// without aligning a split degenerate group to the data.
pub fn tsvd_deblur_literal(g: &ImageVec, svd: &SvdFactorization, m: usize) -> Result<ImageVec> {
    check_len(svd.n(), g.len())?;
    check_truncation(svd, m)?;
    let mut f = vec![0.0; g.len()];
    accumulate(&mut f, svd, g, 0..m);
    ImageVec::new(f)
}
