use super::PipelineError;

/// Median with the even-count convention of averaging the two central order
/// statistics. `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Centered moving average of odd `width`. Near the ends the window is
/// truncated to the elements that exist, so the output has the input's length.
pub fn running_average(values: &[f64], width: usize) -> Result<Vec<f64>, PipelineError> {
    if width == 0 || width.is_multiple_of(2) {
        return Err(PipelineError::InvalidWidth(width));
    }
    let half = width / 2;
    let n = values.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let window = &values[lo..=hi];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect())
}
