use serde::{Deserialize, Serialize};

use super::binomial::BinomialWindow;
use crate::error::{check_probability, Error, Result};
use crate::numeric::{Accumulator, DoubleDouble, Neumaier};

/// Largest supported table index; the solver is O(n^1.5).
pub const MAX_N: usize = 30_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Neumaier-compensated f64 sums.
    #[default]
    Standard,
    /// Double-double sums with exact products.
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::InvalidParameter(format!(
                "precision must be standard or extended, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        })
    }
}

/// Raw moment sequences that can be read off a [`MomentTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    S,
    K,
    N,
    S2,
    K2,
    N2,
    SK,
    SN,
}

/// Exact means, variances and covariances of (S_n, K_n, N_n) for
/// `0 <= n <= n_max` at a fixed bit probability.
///
/// Central moments are stored; raw second moments are derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    p: f64,
    precision: Precision,
    es: Vec<f64>,
    ek: Vec<f64>,
    en: Vec<f64>,
    var_s: Vec<f64>,
    var_k: Vec<f64>,
    var_n: Vec<f64>,
    cov_sk: Vec<f64>,
    cov_sn: Vec<f64>,
}

impl MomentTable {
    /// Solves the moment recurrences for every `n <= n_max`.
    ///
    /// The law of (S, K, N) is symmetric in p and 1-p, so the solver always
    /// runs at `min(p, 1-p)` rounded to 15 significant digits. The rounding
    /// makes p and 1-p land on the same float (1 - 0.7 is not 0.3 in binary),
    /// so the two tables are bitwise identical.
    pub fn compute(p: f64, n_max: usize, precision: Precision) -> Result<Self> {
        check_probability(p)?;
        let canonical: f64 = format!("{:.14e}", p.min(1.0 - p))
            .parse()
            .expect("formatted float parses");
        let mut table = compute_at(canonical, n_max, precision)?;
        table.p = p;
        Ok(table)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_max(&self) -> usize {
        self.es.len() - 1
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            Err(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max(),
            })
        } else {
            Ok(())
        }
    }

    pub fn mean_s(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.es[n])
    }

    pub fn mean_k(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.ek[n])
    }

    pub fn mean_n(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.en[n])
    }

    pub fn var_s(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.var_s[n])
    }

    pub fn var_k(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.var_k[n])
    }

    pub fn var_n(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.var_n[n])
    }

    pub fn cov_sk(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.cov_sk[n])
    }

    pub fn cov_sn(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.cov_sn[n])
    }

    fn rho(&self, n: usize, cov: &[f64], var_a: &[f64], var_b: &[f64]) -> Result<f64> {
        self.check(n)?;
        if var_a[n] <= 0.0 || var_b[n] <= 0.0 {
            return Err(Error::DegenerateVariance(n));
        }
        Ok(cov[n] / (var_a[n] * var_b[n]).sqrt())
    }

    /// Correlation of size and key path length.
    pub fn rho_sk(&self, n: usize) -> Result<f64> {
        self.rho(n, &self.cov_sk, &self.var_s, &self.var_k)
    }

    /// Correlation of size and node path length.
    pub fn rho_sn(&self, n: usize) -> Result<f64> {
        self.rho(n, &self.cov_sn, &self.var_s, &self.var_n)
    }

    /// Expected depth of a uniformly chosen key, E K_n / n.
    pub fn mean_depth(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        if n == 0 {
            return Err(Error::InvalidParameter("mean depth needs n >= 1".into()));
        }
        Ok(self.ek[n] / n as f64)
    }

    /// Raw moment `kind` at index `n`.
    pub fn raw(&self, kind: MomentKind, n: usize) -> Result<f64> {
        self.check(n)?;
        let (s, k, m) = (self.es[n], self.ek[n], self.en[n]);
        Ok(match kind {
            MomentKind::S => s,
            MomentKind::K => k,
            MomentKind::N => m,
            MomentKind::S2 => self.var_s[n] + s * s,
            MomentKind::K2 => self.var_k[n] + k * k,
            MomentKind::N2 => self.var_n[n] + m * m,
            MomentKind::SK => self.cov_sk[n] + s * k,
            MomentKind::SN => self.cov_sn[n] + s * m,
        })
    }

    /// The whole raw sequence `kind` for `n = 0..=n_max`.
    pub fn raw_sequence(&self, kind: MomentKind) -> Vec<f64> {
        (0..=self.n_max())
            .map(|n| self.raw(kind, n).expect("index in range"))
            .collect()
    }
}

pub(crate) fn compute_at(p: f64, n_max: usize, precision: Precision) -> Result<MomentTable> {
    check_probability(p)?;
    if !(2..=MAX_N).contains(&n_max) {
        return Err(Error::InvalidParameter(format!(
            "n_max must be in [2, {MAX_N}], got {n_max}"
        )));
    }
    Ok(match precision {
        Precision::Standard => solve::<Neumaier>(p, n_max, precision),
        Precision::Extended => solve::<DoubleDouble>(p, n_max, precision),
    })
}

/// Solves the recurrences by conditioning on the number B of keys sent to
/// the p-side subtree.
///
/// With independent subtrees of sizes k and n-k, every conditional mean,
/// variance and covariance is a sum of subtree quantities, and the laws of
/// total variance and covariance add the spread of the conditional means
/// over B. The B = 0 and B = n terms contain the unknown at index n itself
/// and are moved to the left-hand side, leaving the factor
/// d = P(0 < B < n). Quantities are solved in dependency order:
/// means, then Var S, Var K, Cov(S,K), Cov(S,N), Var N.
///
/// The node path length splits as N = U_a + U_b with U_m = N_m + S_m.
fn solve<A: Accumulator>(p: f64, n_max: usize, precision: Precision) -> MomentTable {
    let len = n_max + 1;
    let mut es = vec![0.0; len];
    let mut ek = vec![0.0; len];
    let mut en = vec![0.0; len];
    let mut var_s = vec![0.0; len];
    let mut var_k = vec![0.0; len];
    let mut var_n = vec![0.0; len];
    let mut cov_sk = vec![0.0; len];
    let mut cov_sn = vec![0.0; len];

    let diff = |terms: &[f64]| -> f64 {
        let mut acc = A::default();
        for &t in terms {
            acc.push(t);
        }
        acc.value()
    };

    for n in 2..len {
        let win = BinomialWindow::new(n, p);
        let nf = n as f64;
        let inner = || win.iter().filter(move |&(k, _)| k > 0 && k < n);

        let mut d = A::default();
        for (_, w) in inner() {
            d.push(w);
        }
        let d = d.value();
        let ends = win.weight(0) + win.weight(n);

        // means
        let (mut s_acc, mut k_acc, mut n_acc) = (A::default(), A::default(), A::default());
        s_acc.push(1.0);
        k_acc.push(nf);
        for (k, w) in inner() {
            let b = n - k;
            s_acc.push_prod(w, es[k]);
            s_acc.push_prod(w, es[b]);
            k_acc.push_prod(w, ek[k]);
            k_acc.push_prod(w, ek[b]);
            n_acc.push_prod(w, en[k] + es[k]);
            n_acc.push_prod(w, en[b] + es[b]);
        }
        let mu = s_acc.value() / d;
        let kappa = k_acc.value() / d;
        n_acc.push_prod(ends, mu);
        let eta = n_acc.value() / d;
        es[n] = mu;
        ek[n] = kappa;
        en[n] = eta;

        // Var S, Var K, Cov(S, K)
        let (mut vs, mut vk, mut csk) = (A::default(), A::default(), A::default());
        vs.push(ends);
        vk.push_prod(ends, nf * nf);
        csk.push_prod(ends, nf);
        // conditional mean deviations for 0 < k < n, reused below
        let mut devs = Vec::with_capacity(win.weights.len());
        for (k, w) in inner() {
            let b = n - k;
            let ds = diff(&[es[k], es[b], 1.0, -mu]);
            let dk = diff(&[ek[k], ek[b], nf, -kappa]);
            let dn = diff(&[en[k], es[k], en[b], es[b], -eta]);
            devs.push((k, w, ds, dk, dn));
            vs.push_prod(w, var_s[k]);
            vs.push_prod(w, var_s[b]);
            vs.push_prod(w * ds, ds);
            vk.push_prod(w, var_k[k]);
            vk.push_prod(w, var_k[b]);
            vk.push_prod(w * dk, dk);
            csk.push_prod(w, cov_sk[k]);
            csk.push_prod(w, cov_sk[b]);
            csk.push_prod(w * ds, dk);
        }
        var_s[n] = vs.value() / d;
        var_k[n] = vk.value() / d;
        cov_sk[n] = csk.value() / d;

        // Cov(S, N) needs Var S at n; Var N needs both.
        let mut csn = A::default();
        csn.push_prod(ends, var_s[n] + mu);
        for &(k, w, ds, _, dn) in &devs {
            let b = n - k;
            csn.push_prod(w, cov_sn[k] + var_s[k]);
            csn.push_prod(w, cov_sn[b] + var_s[b]);
            csn.push_prod(w * ds, dn);
        }
        cov_sn[n] = csn.value() / d;

        let mut vn = A::default();
        vn.push_prod(ends, 2.0 * cov_sn[n] + var_s[n] + mu * mu);
        for &(k, w, _, _, dn) in &devs {
            let b = n - k;
            vn.push_prod(w, var_n[k] + 2.0 * cov_sn[k] + var_s[k]);
            vn.push_prod(w, var_n[b] + 2.0 * cov_sn[b] + var_s[b]);
            vn.push_prod(w * dn, dn);
        }
        var_n[n] = vn.value() / d;
    }

    MomentTable {
        p,
        precision,
        es,
        ek,
        en,
        var_s,
        var_k,
        var_n,
        cov_sk,
        cov_sn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Moments of (S_2, K_2, N_2) from the common-prefix length L:
    /// P(L = l) = r^l (1 - r) with r = p² + q², S = L + 1, K = 2S,
    /// N = L(L+1)/2.
    fn two_key_oracle(p: f64) -> [f64; 8] {
        let r = p * p + (1.0 - p) * (1.0 - p);
        let mut m = [0.0; 8];
        let mut pl = 1.0 - r;
        for l in 0..5000 {
            let s = l as f64 + 1.0;
            let k = 2.0 * s;
            let nn = (l * (l + 1)) as f64 / 2.0;
            for (slot, v) in m
                .iter_mut()
                .zip([s, k, nn, s * s, k * k, nn * nn, s * k, s * nn])
            {
                *slot += pl * v;
            }
            pl *= r;
        }
        m
    }

    #[test]
    fn two_keys_match_geometric_oracle() {
        for &p in &[0.5, 0.3, 0.1, 0.77] {
            let t = MomentTable::compute(p, 2, Precision::Standard).unwrap();
            let o = two_key_oracle(p);
            let kinds = [
                MomentKind::S,
                MomentKind::K,
                MomentKind::N,
                MomentKind::S2,
                MomentKind::K2,
                MomentKind::N2,
                MomentKind::SK,
                MomentKind::SN,
            ];
            for (kind, expected) in kinds.iter().zip(o) {
                let got = t.raw(*kind, 2).unwrap();
                assert!((got - expected).abs() < 1e-10 * expected, "{kind:?} p={p}");
            }
            let pq = p * (1.0 - p);
            assert!((t.mean_s(2).unwrap() - 1.0 / (2.0 * pq)).abs() < 1e-13);
            assert!((t.mean_k(2).unwrap() - 1.0 / pq).abs() < 1e-12);
            assert!((t.rho_sk(2).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_two_key_values() {
        let t = MomentTable::compute(0.5, 8, Precision::Standard).unwrap();
        assert_eq!(t.mean_s(2).unwrap(), 2.0);
        assert_eq!(t.mean_k(2).unwrap(), 4.0);
        assert_eq!(t.mean_n(2).unwrap(), 2.0);
        assert_eq!(t.var_s(2).unwrap(), 2.0);
        assert_eq!(t.cov_sk(2).unwrap(), 4.0);
        assert_eq!(t.mean_depth(2).unwrap(), 2.0);
        // n = 3 by hand: E S_3 = 10/3, E K_3 = 8
        assert!((t.mean_s(3).unwrap() - 10.0 / 3.0).abs() < 1e-14);
        assert!((t.mean_k(3).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_rows_are_zero() {
        let t = MomentTable::compute(0.3, 10, Precision::Standard).unwrap();
        for n in 0..2 {
            for kind in [MomentKind::S, MomentKind::K2, MomentKind::SN] {
                assert_eq!(t.raw(kind, n).unwrap(), 0.0);
            }
            assert!(matches!(t.rho_sk(n), Err(Error::DegenerateVariance(_))));
            assert!(matches!(t.rho_sn(n), Err(Error::DegenerateVariance(_))));
        }
    }

    #[test]
    fn out_of_range_and_bad_input() {
        let t = MomentTable::compute(0.3, 10, Precision::Standard).unwrap();
        assert!(matches!(
            t.mean_s(11),
            Err(Error::IndexOutOfRange {
                index: 11,
                n_max: 10
            })
        ));
        assert!(MomentTable::compute(1.0, 10, Precision::Standard).is_err());
        assert!(MomentTable::compute(0.5, 1, Precision::Standard).is_err());
        assert!(MomentTable::compute(0.5, MAX_N + 1, Precision::Standard).is_err());
    }

    #[test]
    fn exchange_symmetry() {
        let a = compute_at(0.3, 400, Precision::Standard).unwrap();
        let b = compute_at(0.7, 400, Precision::Standard).unwrap();
        for n in 2..=400 {
            for kind in [MomentKind::S, MomentKind::K, MomentKind::N] {
                let (x, y) = (a.raw(kind, n).unwrap(), b.raw(kind, n).unwrap());
                assert!((x - y).abs() <= 1e-12 * x.abs());
            }
            for (x, y) in [
                (a.var_s(n).unwrap(), b.var_s(n).unwrap()),
                (a.var_k(n).unwrap(), b.var_k(n).unwrap()),
                (a.var_n(n).unwrap(), b.var_n(n).unwrap()),
                (a.cov_sk(n).unwrap(), b.cov_sk(n).unwrap()),
                (a.cov_sn(n).unwrap(), b.cov_sn(n).unwrap()),
            ] {
                assert!((x - y).abs() <= 1e-12 * x.abs(), "n={n}");
            }
        }
        // the public entry point canonicalises and is bitwise symmetric
        let a = MomentTable::compute(0.3, 100, Precision::Standard).unwrap();
        let b = MomentTable::compute(0.7, 100, Precision::Standard).unwrap();
        assert_eq!(a.var_k, b.var_k);
        assert_eq!(a.p(), 0.3);
        assert_eq!(b.p(), 0.7);
    }

    #[test]
    fn precisions_agree() {
        let a = MomentTable::compute(0.5, 600, Precision::Standard).unwrap();
        let b = MomentTable::compute(0.5, 600, Precision::Extended).unwrap();
        for n in 2..=600 {
            let (x, y) = (a.cov_sk(n).unwrap(), b.cov_sk(n).unwrap());
            assert!((x - y).abs() < 1e-12 * x);
            let (x, y) = (a.var_n(n).unwrap(), b.var_n(n).unwrap());
            assert!((x - y).abs() < 1e-12 * x);
        }
    }

    #[test]
    fn structural_inequalities() {
        for &p in &[0.5, 0.3] {
            let t = MomentTable::compute(p, 2000, Precision::Standard).unwrap();
            for n in 2..=2000 {
                let (vs, vk, vn) = (
                    t.var_s(n).unwrap(),
                    t.var_k(n).unwrap(),
                    t.var_n(n).unwrap(),
                );
                assert!(vs > 0.0 && vk > 0.0 && vn > 0.0);
                let c = t.cov_sk(n).unwrap();
                assert!(c * c <= vs * vk * (1.0 + 1e-12), "Cauchy-Schwarz at n={n}");
                assert!(t.rho_sk(n).unwrap().abs() <= 1.0 + 1e-12);
                assert!(t.rho_sn(n).unwrap().abs() <= 1.0 + 1e-12);
                assert!(t.mean_k(n).unwrap() >= n as f64);
                assert!(t.mean_k(n).unwrap() >= t.mean_s(n).unwrap());
            }
        }
    }
}
