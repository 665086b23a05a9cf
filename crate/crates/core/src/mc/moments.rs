//! One-pass central moments up to order four, with co-moments, that merge
//! exactly (up to rounding) in any grouping.

/// Streaming moments of a `D`-dimensional sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<const D: usize> {
    pub count: u64,
    pub mean: [f64; D],
    /// Sums of 2nd, 3rd and 4th powers of deviations, per coordinate.
    pub m2: [f64; D],
    pub m3: [f64; D],
    pub m4: [f64; D],
    /// Sums of deviation products, row-major; the diagonal equals `m2`.
    pub co: [[f64; D]; D],
}

impl<const D: usize> Default for Moments<D> {
    fn default() -> Self {
        Moments {
            count: 0,
            mean: [0.0; D],
            m2: [0.0; D],
            m3: [0.0; D],
            m4: [0.0; D],
            co: [[0.0; D]; D],
        }
    }
}

impl<const D: usize> Moments<D> {
    pub fn push(&mut self, x: [f64; D]) {
        let one = Moments::<D> {
            count: 1,
            mean: x,
            ..Default::default()
        };
        *self = self.merged(&one);
    }

    /// Combines two disjoint samples (pairwise update formulas for central
    /// moments and co-moments).
    pub fn merged(&self, other: &Moments<D>) -> Moments<D> {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let mut out = Moments::<D> {
            count: self.count + other.count,
            ..Default::default()
        };
        let delta: [f64; D] = std::array::from_fn(|i| other.mean[i] - self.mean[i]);
        for i in 0..D {
            let d = delta[i];
            let (a2, b2) = (self.m2[i], other.m2[i]);
            let (a3, b3) = (self.m3[i], other.m3[i]);
            out.mean[i] = self.mean[i] + d * nb / n;
            out.m2[i] = a2 + b2 + d * d * na * nb / n;
            out.m3[i] = a3
                + b3
                + d.powi(3) * na * nb * (na - nb) / (n * n)
                + 3.0 * d * (na * b2 - nb * a2) / n;
            out.m4[i] = self.m4[i]
                + other.m4[i]
                + d.powi(4) * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
                + 6.0 * d * d * (na * na * b2 + nb * nb * a2) / (n * n)
                + 4.0 * d * (na * b3 - nb * a3) / n;
            for j in 0..D {
                out.co[i][j] = self.co[i][j] + other.co[i][j] + d * delta[j] * na * nb / n;
            }
        }
        out
    }

    /// Unbiased covariance of coordinates `i` and `j`.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.co[i][j] / (self.count as f64 - 1.0)
    }

    pub fn var(&self, i: usize) -> f64 {
        self.cov(i, i)
    }

    pub fn corr(&self, i: usize, j: usize) -> f64 {
        self.co[i][j] / (self.co[i][i] * self.co[j][j]).sqrt()
    }

    /// Standard error of the mean of coordinate `i`.
    pub fn se_mean(&self, i: usize) -> f64 {
        (self.var(i) / self.count as f64).sqrt()
    }

    /// Sample skewness m3/m2^{3/2} (moment estimator).
    pub fn skewness(&self, i: usize) -> f64 {
        let n = self.count as f64;
        (self.m3[i] / n) / (self.m2[i] / n).powf(1.5)
    }

    /// Sample excess kurtosis m4/m2² - 3 (moment estimator).
    pub fn excess_kurtosis(&self, i: usize) -> f64 {
        let n = self.count as f64;
        (self.m4[i] / n) / (self.m2[i] / n).powi(2) - 3.0
    }
}
