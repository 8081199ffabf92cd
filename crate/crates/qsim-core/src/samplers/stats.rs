//! Error estimation for correlated sample series.
//!
//! Uncertainties come from a blocking analysis: the series is repeatedly
//! pair-averaged, the standard error of the mean is computed at every level,
//! and the largest value wins. For uncorrelated data all levels agree; for
//! correlated data the low levels underestimate and the plateau over the
//! blocked levels is the honest figure.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockedStats {
    pub mean: f64,
    pub stderr: f64,
    /// Integrated autocorrelation time in samples; 0.5 for uncorrelated
    /// data, 0 for a constant series.
    pub autocorrelation_time: f64,
}

fn sem_sq(data: &[f64]) -> f64 {
    let n = data.len();
    if n < 2 {
        return 0.0;
    }
    let mean = data.iter().sum::<f64>() / n as f64;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    var / n as f64
}

pub fn blocked_stats(series: &[f64]) -> BlockedStats {
    let n = series.len();
    if n == 0 {
        return BlockedStats { mean: f64::NAN, stderr: f64::NAN, autocorrelation_time: f64::NAN };
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let base = sem_sq(series);
    let mut worst = base;
    let mut level = series.to_vec();
    while level.len() / 2 >= 16 {
        level = level.chunks_exact(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
        worst = worst.max(sem_sq(&level));
    }
    let autocorrelation_time = if base > 0.0 { 0.5 * worst / base } else { 0.0 };
    BlockedStats { mean, stderr: worst.sqrt(), autocorrelation_time }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexStats {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Worse of the two components.
    pub autocorrelation_time: f64,
}

pub fn complex_blocked_stats(series: &[Complex64]) -> ComplexStats {
    let re: Vec<f64> = series.iter().map(|z| z.re).collect();
    let im: Vec<f64> = series.iter().map(|z| z.im).collect();
    let sre = blocked_stats(&re);
    let sim = blocked_stats(&im);
    ComplexStats {
        mean: Complex64::new(sre.mean, sim.mean),
        stderr_re: sre.stderr,
        stderr_im: sim.stderr,
        autocorrelation_time: sre.autocorrelation_time.max(sim.autocorrelation_time),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub value: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Number of jackknife blocks the error is based on.
    pub blocks: usize,
}

/// Ratio of means `sum(numerator) / sum(denominator)` with a blocked
/// jackknife error.
///
/// The block length is taken from the autocorrelation of the two series so
/// that blocks are effectively independent, clamped to keep at least 16
/// blocks. The value itself uses every sample; the error uses the blocked
/// region.
pub fn jackknife_ratio(numerator: &[Complex64], denominator: &[Complex64]) -> RatioEstimate {
    assert_eq!(numerator.len(), denominator.len());
    let n = numerator.len();
    let num_total: Complex64 = numerator.iter().sum();
    let den_total: Complex64 = denominator.iter().sum();
    let value = num_total / den_total;

    let tau = complex_blocked_stats(numerator)
        .autocorrelation_time
        .max(complex_blocked_stats(denominator).autocorrelation_time)
        .max(0.5);
    let block = ((4.0 * tau).ceil() as usize).clamp(1, (n / 16).max(1));
    let blocks = n / block;
    if blocks < 2 {
        return RatioEstimate { value, stderr_re: 0.0, stderr_im: 0.0, blocks };
    }

    let block_sum = |series: &[Complex64], k: usize| -> Complex64 {
        series[k * block..(k + 1) * block].iter().sum()
    };
    let mut num_blocks = Vec::with_capacity(blocks);
    let mut den_blocks = Vec::with_capacity(blocks);
    for k in 0..blocks {
        num_blocks.push(block_sum(numerator, k));
        den_blocks.push(block_sum(denominator, k));
    }
    let num_in: Complex64 = num_blocks.iter().sum();
    let den_in: Complex64 = den_blocks.iter().sum();
    let replicates: Vec<Complex64> = (0..blocks)
        .map(|k| (num_in - num_blocks[k]) / (den_in - den_blocks[k]))
        .collect();
    let center: Complex64 = replicates.iter().sum::<Complex64>() / blocks as f64;
    let scale = (blocks as f64 - 1.0) / blocks as f64;
    let var_re: f64 = replicates.iter().map(|r| (r.re - center.re).powi(2)).sum::<f64>() * scale;
    let var_im: f64 = replicates.iter().map(|r| (r.im - center.im).powi(2)).sum::<f64>() * scale;
    RatioEstimate { value, stderr_re: var_re.sqrt(), stderr_im: var_im.sqrt(), blocks }
}
