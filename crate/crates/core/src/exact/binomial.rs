use crate::numeric::{Accumulator, Neumaier};

/// Weights below this fraction of the modal weight are dropped.
const CUTOFF: f64 = 1e-30;

/// Binomial(n, p) probabilities on the window `lo..=hi` where they are
/// non-negligible, normalised to sum to one.
#[derive(Debug, Clone)]
pub(crate) struct BinomialWindow {
    pub lo: usize,
    pub weights: Vec<f64>,
}

impl BinomialWindow {
    /// Builds the window outward from the mode by the ratio
    /// w(k+1)/w(k) = (n-k)/(k+1) · p/q, so nothing underflows before the
    /// cutoff is reached.
    pub fn new(n: usize, p: f64) -> Self {
        let q = 1.0 - p;
        let mode = (((n + 1) as f64 * p).floor() as usize).min(n);

        let mut down = Vec::new();
        let mut w = 1.0;
        let mut k = mode;
        while k > 0 {
            w *= k as f64 / (n - k + 1) as f64 * (q / p);
            if w < CUTOFF {
                break;
            }
            down.push(w);
            k -= 1;
        }
        let lo = mode - down.len();

        let mut weights: Vec<f64> = down.into_iter().rev().collect();
        weights.push(1.0);
        let mut w = 1.0;
        let mut k = mode;
        while k < n {
            w *= (n - k) as f64 / (k + 1) as f64 * (p / q);
            if w < CUTOFF {
                break;
            }
            weights.push(w);
            k += 1;
        }

        let mut total = Neumaier::default();
        for &w in &weights {
            total.push(w);
        }
        let scale = total.value().recip();
        for w in &mut weights {
            *w *= scale;
        }
        BinomialWindow { lo, weights }
    }

    pub fn hi(&self) -> usize {
        self.lo + self.weights.len() - 1
    }

    /// `(k, w_k)` pairs over the window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (self.lo + i, w))
    }

    /// Probability of `k`, zero outside the window.
    pub fn weight(&self, k: usize) -> f64 {
        if k < self.lo || k > self.hi() {
            0.0
        } else {
            self.weights[k - self.lo]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(n: usize, k: usize, p: f64) -> f64 {
        let mut c = 1.0;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    }

    #[test]
    fn small_n_matches_direct_formula() {
        for &p in &[0.5, 0.3, 0.05, 0.91] {
            for n in 1..40 {
                let win = BinomialWindow::new(n, p);
                for k in 0..=n {
                    let d = direct(n, k, p);
                    let w = win.weight(k);
                    if d > 1e-25 {
                        assert!((w - d).abs() <= 1e-13 * d, "n={n} k={k} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_n_is_normalised_and_centred() {
        let n = 20_000;
        let p = 0.3;
        let win = BinomialWindow::new(n, p);
        let mut sum = Neumaier::default();
        let mut mean = Neumaier::default();
        for (k, w) in win.iter() {
            sum.push(w);
            mean.push(w * k as f64);
        }
        assert!((sum.value() - 1.0).abs() < 1e-14);
        assert!((mean.value() - n as f64 * p).abs() < 1e-9);
        // window spans roughly ±12 standard deviations
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(((win.hi() - win.lo) as f64) < 30.0 * sd);
    }

    #[test]
    fn two_keys_at_one_half() {
        let win = BinomialWindow::new(2, 0.5);
        assert_eq!(win.lo, 0);
        assert_eq!(win.weights, vec![0.25, 0.5, 0.25]);
    }
}
