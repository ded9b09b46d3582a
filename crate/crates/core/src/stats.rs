//! Sample statistics shared by the noise checks and the ensemble engine.
//!
//! All reductions run in index order so results do not depend on how the
//! samples were produced.

/// Index-ordered running mean. A constant sample averages to itself exactly.
pub fn running_mean(xs: &[f64]) -> f64 {
    let mut mean = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        mean += (x - mean) / (i + 1) as f64;
    }
    mean
}

/// Unbiased sample variance (Welford). Zero for fewer than two samples.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    m2 / (xs.len() - 1) as f64
}

pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Sample skewness `m3 / m2^{3/2}` (population moments).
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = running_mean(xs);
    let (m2, m3) = xs.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = x - mean;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Left edge of the first bin.
    pub lo: f64,
    /// Bin width; zero when every sample is identical.
    pub width: f64,
    pub probabilities: Vec<f64>,
}

const MAX_BINS: usize = 100_000;

impl Histogram {
    /// Equal-width bins spanning `[min, max]` of the sample.
    pub fn with_bins(xs: &[f64], n_bins: usize) -> Histogram {
        assert!(!xs.is_empty(), "histogram of an empty sample");
        let n_bins = n_bins.max(1);
        let (min, max) = min_max(xs);
        if max <= min {
            let mut probabilities = vec![0.0; n_bins];
            probabilities[0] = 1.0;
            return Histogram { lo: min, width: 0.0, probabilities };
        }
        let width = (max - min) / n_bins as f64;
        let mut counts = vec![0usize; n_bins];
        for &x in xs {
            let idx = (((x - min) / width) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
        let n = xs.len() as f64;
        Histogram {
            lo: min,
            width,
            probabilities: counts.into_iter().map(|c| c as f64 / n).collect(),
        }
    }

    /// Freedman-Diaconis bin width `2 IQR n^{-1/3}`.
    pub fn freedman_diaconis(xs: &[f64]) -> Histogram {
        assert!(!xs.is_empty(), "histogram of an empty sample");
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        let h = 2.0 * iqr * (xs.len() as f64).powf(-1.0 / 3.0);
        let range = sorted[sorted.len() - 1] - sorted[0];
        let n_bins = if h > 0.0 && range > 0.0 {
            ((range / h).ceil() as usize).clamp(1, MAX_BINS)
        } else {
            1
        };
        Self::with_bins(xs, n_bins)
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.lo + (bin as f64 + 0.5) * self.width
    }

    /// Center of the tallest bin (first one on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        self.center(best)
    }

    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probabilities.iter().enumerate().map(|(i, &p)| (self.center(i), p))
    }
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
