use serde::Serialize;

use crate::{Error, Result};

/// Growth of a count sequence, in nats per iterate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRate {
    /// Least-squares slope of `ln count` against `n` over the window.
    pub slope: f64,
    /// `max (1/n) ln count` over the window.
    pub limsup_proxy: f64,
}

/// The default fit window `[1, max(2, ⌊log₂ N⌋)]`, capped at `n_max`.
pub fn default_window(carrier_size: usize, n_max: usize) -> (usize, usize) {
    let log2 = usize::BITS - 1 - carrier_size.max(1).leading_zeros();
    (1, (log2 as usize).max(2).min(n_max.max(1)))
}

/// Fits the growth of `counts`, where `counts[k]` is the count at `n = k + 1`.
///
/// `window` is an inclusive 1-based range of `n`. Constant counts give a
/// slope of exactly zero; a single-point window gives `ln(c)/n`.
pub fn growth_rate(counts: &[u64], window: (usize, usize)) -> Result<GrowthRate> {
    let (lo, hi) = window;
    if lo == 0 || lo > hi {
        return Err(Error::OutOfRange(format!("fit window [{lo}, {hi}] is empty")));
    }
    if hi > counts.len() {
        return Err(Error::OutOfRange(format!(
            "fit window ends at n = {hi} but only {} counts are available",
            counts.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| {
            let c = counts[n - 1];
            if c == 0 {
                Err(Error::OutOfRange(format!("count at n = {n} is zero")))
            } else {
                Ok((n as f64, (c as f64).ln()))
            }
        })
        .collect::<Result<_>>()?;
    let limsup_proxy = pts.iter().map(|&(n, l)| l / n).fold(f64::NEG_INFINITY, f64::max);
    let window_counts = &counts[lo - 1..hi];
    let slope = if pts.len() == 1 {
        pts[0].1 / pts[0].0
    } else if window_counts.iter().all(|&c| c == window_counts[0]) {
        0.0
    } else {
        let m = pts.len() as f64;
        let mean_n = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|&(n, l)| (n - mean_n) * (l - mean_l)).sum();
        let sxx: f64 = pts.iter().map(|&(n, _)| (n - mean_n) * (n - mean_n)).sum();
        sxy / sxx
    };
    Ok(GrowthRate { slope, limsup_proxy })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn geometric_counts() {
        let counts: Vec<u64> = (1..=12).map(|n| 1 << n).collect();
        let g = growth_rate(&counts, (1, 12)).unwrap();
        assert!((g.slope - LN2).abs() < 1e-12);
        assert!((g.limsup_proxy - LN2).abs() < 1e-12);
    }

    #[test]
    fn constant_counts_are_exactly_zero() {
        let g = growth_rate(&[7; 6], (1, 6)).unwrap();
        assert_eq!(g.slope, 0.0);
    }

    #[test]
    fn saturating_counts_on_pre_saturation_window() {
        let l = 6;
        let counts: Vec<u64> = (1..=10).map(|n: usize| 1 << n.min(l)).collect();
        let g = growth_rate(&counts, (1, l)).unwrap();
        assert!((g.slope - LN2).abs() < 1e-12);
        assert!(growth_rate(&counts, (1, 10)).unwrap().slope < LN2);
    }

    #[test]
    fn window_errors() {
        assert!(growth_rate(&[1, 2], (1, 3)).is_err());
        assert!(growth_rate(&[1, 2], (2, 1)).is_err());
        assert!(growth_rate(&[1, 2], (0, 1)).is_err());
        assert!(growth_rate(&[0, 2], (1, 2)).is_err());
        assert_eq!(growth_rate(&[1, 4], (2, 2)).unwrap().slope, 4f64.ln() / 2.0);
    }

    #[test]
    fn default_windows() {
        assert_eq!(default_window(1024, 20), (1, 10));
        assert_eq!(default_window(1024, 6), (1, 6));
        assert_eq!(default_window(3, 10), (1, 2));
        assert_eq!(default_window(1, 1), (1, 1));
    }
}
