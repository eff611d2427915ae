/// Mahalanobis distance of `action` from the zero mean under a diagonal
/// covariance given by its `variances`.
pub fn mahalanobis(action: &[f64], variances: &[f64]) -> f64 {
    debug_assert_eq!(action.len(), variances.len());
    action
        .iter()
        .zip(variances)
        .map(|(a, var)| a * a / var)
        .sum::<f64>()
        .sqrt()
}
