use nalgebra::{DMatrix, DVector};

use super::{DifferenceOperator, GroupPartition, LatentGroupLayout, PenaltyConfig};
use crate::error::{check_len, Error, Result};

/// `½‖y − Φx‖₂²`
pub fn data_fit(x: &DVector<f64>, y: &DVector<f64>, phi: &DMatrix<f64>) -> Result<f64> {
    check_len("Φ columns vs x", phi.ncols(), x.len())?;
    check_len("Φ rows vs y", phi.nrows(), y.len())?;
    Ok(0.5 * (y - phi * x).norm_squared())
}

/// Unweighted fusion sum `Σ_{j≥1} |x_j − x_{j−1}|`.
///
/// Equals `‖Dx‖₁ − |x_{N−1}|`.
pub fn fusion_penalty(x: &DVector<f64>) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidDimension(format!(
            "fusion penalty needs length >= 2, got {}",
            x.len()
        )));
    }
    Ok(x.as_slice().windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

fn disjoint_group_norms(x: &DVector<f64>, partition: &GroupPartition) -> f64 {
    partition.ranges().map(|r| x.rows(r.start, r.len()).norm()).sum()
}

fn sgf_common(
    x: &DVector<f64>,
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    partition: &GroupPartition,
    penalties: &PenaltyConfig,
) -> Result<f64> {
    check_len("partition vs x", partition.n(), x.len())?;
    Ok(data_fit(x, y, phi)?
        + penalties.lambda_e * x.lp_norm(1)
        + penalties.lambda_g * disjoint_group_norms(x, partition))
}

/// SGF-LASSO objective with the (N−1)-term fusion sum.
pub fn sgf_objective(
    x: &DVector<f64>,
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    partition: &GroupPartition,
    penalties: &PenaltyConfig,
) -> Result<f64> {
    Ok(sgf_common(x, y, phi, partition, penalties)? + penalties.lambda_f * fusion_penalty(x)?)
}

/// SGF-LASSO objective with the fusion term written as `‖Dx‖₁`.
///
/// This is the function the ADMM splitting `z = Dx` actually minimises; it
/// exceeds [`sgf_objective`] by `λ_f·|x_{N−1}|`.
pub fn sgf_split_objective(
    x: &DVector<f64>,
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    partition: &GroupPartition,
    penalties: &PenaltyConfig,
) -> Result<f64> {
    let d = DifferenceOperator::checked(x.len())?;
    Ok(sgf_common(x, y, phi, partition, penalties)?
        + penalties.lambda_f * d.apply_unchecked(x).lp_norm(1))
}

/// LGF-LASSO objective: `½‖y − Φx‖₂² + λ_g Σ_i ‖W_i x‖₂ + λ_f ‖Dx‖₁`.
pub fn lgf_objective(
    x: &DVector<f64>,
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    layout: &LatentGroupLayout,
    penalties: &PenaltyConfig,
) -> Result<f64> {
    check_len("layout vs x", layout.n(), x.len())?;
    let d = DifferenceOperator::checked(x.len())?;
    let groups: f64 = (0..layout.num_groups())
        .map(|i| {
            let r = layout.group(i);
            x.rows(r.start, r.len()).norm()
        })
        .sum();
    Ok(data_fit(x, y, phi)?
        + penalties.lambda_g * groups
        + penalties.lambda_f * d.apply_unchecked(x).lp_norm(1))
}

/// `‖x − x̂‖₂² / N`
pub fn mse(x_true: &DVector<f64>, x_hat: &DVector<f64>) -> Result<f64> {
    check_len("mse", x_true.len(), x_hat.len())?;
    if x_true.is_empty() {
        return Err(Error::InvalidDimension("mse of empty signals".into()));
    }
    Ok((x_true - x_hat).norm_squared() / x_true.len() as f64)
}

impl DifferenceOperator {
    fn checked(n: usize) -> Result<Self> {
        super::build_difference_operator(n)
    }
}
