//! Running mean/variance accumulation (Welford with a parallel merge), so
//! chunked Monte Carlo loops stay numerically stable even when the payoff
//! is nearly deterministic.

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MeanVar {
    n: f64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: MeanVar) -> MeanVar {
        if other.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        MeanVar {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n > 1.0 {
            (self.m2 / (self.n - 1.0)).max(0.0)
        } else {
            0.0
        }
    }

    /// 95% confidence half-width of the mean.
    pub fn ci_half_width(&self) -> f64 {
        1.96 * (self.variance() / self.n).sqrt()
    }
}
