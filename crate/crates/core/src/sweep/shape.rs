//! Shape statistics of sampled curves.

/// Minimum prominence of a counted peak, as a fraction of the peak's own height.
pub const PEAK_PROMINENCE: f64 = 0.01;

/// Number of interior local maxima whose topographic prominence is at least
/// `min_prominence` times the peak value.
///
/// Prominence is the height above the higher of the two lowest points reached
/// before climbing to a taller sample (or the curve end) on either side.
pub fn count_peaks(values: &[f64], min_prominence: f64) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    let mut count = 0;
    for i in 1..n - 1 {
        let v = values[i];
        if !(v > values[i - 1] && v >= values[i + 1]) {
            continue;
        }
        let mut left_min = v;
        for &w in values[..i].iter().rev() {
            if w > v {
                break;
            }
            left_min = left_min.min(w);
        }
        let mut right_min = v;
        for &w in &values[i + 1..] {
            if w > v {
                break;
            }
            right_min = right_min.min(w);
        }
        if v - left_min.max(right_min) >= min_prominence * v.abs() {
            count += 1;
        }
    }
    count
}

/// Each sample is at most the previous one (plus `slack`).
pub fn is_non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_prominent_peaks_only() {
        let v = [0.0, 1.0, 0.5, 0.503, 0.4, 2.0, 0.1];
        assert_eq!(count_peaks(&v, 0.0), 3);
        assert_eq!(count_peaks(&v, 0.01), 2);
        // small ripples on a low tail still count
        let tail = [10.0, 0.02, 0.03, 0.02, 0.025, 0.01];
        assert_eq!(count_peaks(&tail, 0.01), 2);
        assert_eq!(count_peaks(&[3.0, 2.0, 1.0], 0.0), 0);
        // plateau counted once
        assert_eq!(count_peaks(&[0.0, 1.0, 1.0, 0.0], 0.0), 1);
    }

    #[test]
    fn edge_maxima_are_not_interior() {
        assert_eq!(count_peaks(&[5.0, 1.0, 2.0, 1.0], 0.01), 1);
    }

    #[test]
    fn monotone_check() {
        assert!(is_non_increasing(&[3.0, 2.0, 2.0, 1.0], 0.0));
        assert!(!is_non_increasing(&[3.0, 2.0, 2.1], 0.0));
    }
}
