use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// The six per-channel encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    Identity,
    /// Central difference `[-1, 0, 1]`.
    Sobel,
    /// Binary edge series from Gaussian-derivative magnitude with
    /// non-maximum suppression and hysteresis.
    Canny,
    /// 9-tap Laplacian of Gaussian, sigma 1.5.
    LaplacianOfGaussian,
    /// Even Gabor, sigma 2, wavelength 8 samples.
    GaborCos,
    /// Odd Gabor, sigma 2, wavelength 8 samples.
    GaborSin,
}

impl Filter {
    pub const ALL: [Filter; 6] = [
        Filter::Identity,
        Filter::Sobel,
        Filter::Canny,
        Filter::LaplacianOfGaussian,
        Filter::GaborCos,
        Filter::GaborSin,
    ];

    pub fn index(self) -> usize {
        Filter::ALL.iter().position(|f| *f == self).expect("listed")
    }

    pub fn name(self) -> &'static str {
        match self {
            Filter::Identity => "identity",
            Filter::Sobel => "sobel",
            Filter::Canny => "canny",
            Filter::LaplacianOfGaussian => "log",
            Filter::GaborCos => "gabor_cos",
            Filter::GaborSin => "gabor_sin",
        }
    }

    pub fn apply(self, x: &[f64]) -> Vec<f64> {
        match self {
            Filter::Identity => x.to_vec(),
            Filter::Sobel => correlate_same(x, &[-1.0, 0.0, 1.0]),
            Filter::Canny => canny_1d(x, 0.4, 0.8),
            Filter::LaplacianOfGaussian => correlate_same(x, &log_kernel()),
            Filter::GaborCos => correlate_same(x, &gabor_kernel(false)),
            Filter::GaborSin => correlate_same(x, &gabor_kernel(true)),
        }
    }
}

const LOG_SIGMA: f64 = 1.5;
const LOG_HALF_WIDTH: i32 = 4;
const GABOR_SIGMA: f64 = 2.0;
const GABOR_WAVELENGTH: f64 = 8.0;
const GABOR_HALF_WIDTH: i32 = 6;
const CANNY_SIGMA: f64 = 1.0;
const CANNY_HALF_WIDTH: i32 = 3;

/// Zero-sum 9-tap Laplacian-of-Gaussian.
pub fn log_kernel() -> Vec<f64> {
    let s2 = LOG_SIGMA * LOG_SIGMA;
    let raw: Vec<f64> = (-LOG_HALF_WIDTH..=LOG_HALF_WIDTH)
        .map(|i| {
            let x = f64::from(i);
            (x * x / (s2 * s2) - 1.0 / s2) * (-x * x / (2.0 * s2)).exp()
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.into_iter().map(|v| v - mean).collect()
}

pub fn gabor_kernel(odd: bool) -> Vec<f64> {
    (-GABOR_HALF_WIDTH..=GABOR_HALF_WIDTH)
        .map(|i| {
            let x = f64::from(i);
            let env = (-x * x / (2.0 * GABOR_SIGMA * GABOR_SIGMA)).exp();
            let phase = 2.0 * PI * x / GABOR_WAVELENGTH;
            env * if odd { phase.sin() } else { phase.cos() }
        })
        .collect()
}

fn gaussian_derivative_kernel() -> Vec<f64> {
    let s2 = CANNY_SIGMA * CANNY_SIGMA;
    (-CANNY_HALF_WIDTH..=CANNY_HALF_WIDTH)
        .map(|i| {
            let x = f64::from(i);
            -x / s2 * (-x * x / (2.0 * s2)).exp()
        })
        .collect()
}

/// Same-length correlation `y[t] = sum_k h[k] x[t + k - c]` with the centre
/// tap `c = len / 2` and edge replication outside the series.
pub fn correlate_same(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = x.len() as isize;
    if n == 0 {
        return Vec::new();
    }
    let c = (kernel.len() / 2) as isize;
    (0..n)
        .map(|t| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, h)| h * x[(t + k as isize - c).clamp(0, n - 1) as usize])
                .sum()
        })
        .collect()
}

/// 1-D Canny: gradient magnitude, non-maximum suppression, then
/// hysteresis. Weak maxima survive only inside a run of above-`low`
/// gradient that also contains a strong maximum. Output is 0/1.
pub fn canny_1d(x: &[f64], low_frac: f64, high_frac: f64) -> Vec<f64> {
    let n = x.len();
    let mag: Vec<f64> = correlate_same(x, &gaussian_derivative_kernel())
        .into_iter()
        .map(f64::abs)
        .collect();
    let max = mag.iter().cloned().fold(0.0, f64::max);
    let mut out = vec![0.0; n];
    if max <= 1e-12 {
        return out;
    }
    let (low, high) = (low_frac * max, high_frac * max);
    let is_peak = |i: usize| {
        let left = if i > 0 { mag[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < n { mag[i + 1] } else { f64::NEG_INFINITY };
        mag[i] >= left && mag[i] > right
    };
    let mut i = 0;
    while i < n {
        if mag[i] < low {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && mag[i] >= low {
            i += 1;
        }
        let run = start..i;
        if run.clone().any(|j| mag[j] >= high && is_peak(j)) {
            for j in run {
                if is_peak(j) {
                    out[j] = 1.0;
                }
            }
        }
    }
    out
}

/// All six encodings of one series, in [`Filter::ALL`] order.
pub fn apply_filter_bank(x: &[f64]) -> Vec<Vec<f64>> {
    Filter::ALL.iter().map(|f| f.apply(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_same_length_encodings() {
        let x: Vec<f64> = (0..17).map(|i| (i as f64 * 0.7).sin()).collect();
        let bank = apply_filter_bank(&x);
        assert_eq!(bank.len(), 6);
        assert!(bank.iter().all(|e| e.len() == x.len()));
        assert_eq!(bank[0], x);
    }

    #[test]
    fn identity_and_sobel() {
        assert_eq!(Filter::Identity.apply(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let sob = Filter::Sobel.apply(&[4.0; 8]);
        assert!(sob.iter().all(|v| *v == 0.0));
        assert_eq!(Filter::Sobel.apply(&[0.0, 1.0, 2.0, 3.0]), vec![1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn log_impulse_response_is_kernel() {
        let mut x = vec![0.0; 21];
        x[10] = 1.0;
        let y = Filter::LaplacianOfGaussian.apply(&x);
        let k = log_kernel();
        assert_eq!(k.len(), 9);
        assert_eq!(&y[6..15], &k[..]);
        assert!(k.iter().sum::<f64>().abs() < 1e-12);
        assert!(k[4] < 0.0);
    }

    #[test]
    fn short_series_pads_by_replication() {
        let y = Filter::GaborCos.apply(&[2.0, 2.0]);
        let s: f64 = gabor_kernel(false).iter().sum();
        assert!((y[0] - 2.0 * s).abs() < 1e-12 && (y[1] - 2.0 * s).abs() < 1e-12);
        assert_eq!(Filter::Sobel.apply(&[5.0]), vec![0.0]);
    }

    #[test]
    fn canny_marks_step_edge() {
        let mut x = vec![0.0; 20];
        for v in x.iter_mut().skip(10) {
            *v = 1.0;
        }
        let e = Filter::Canny.apply(&x);
        assert!(e.iter().all(|v| *v == 0.0 || *v == 1.0));
        assert_eq!(e.iter().sum::<f64>(), 1.0);
        let pos = e.iter().position(|v| *v == 1.0).unwrap();
        assert!(pos == 9 || pos == 10);
        assert!(Filter::Canny.apply(&[3.0; 12]).iter().all(|v| *v == 0.0));
    }
}
