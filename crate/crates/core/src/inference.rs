//! Distance estimate, variance estimates and the tests built on them.
//!
//! The distance estimate is `M^2 = 2 pi int int (S_{T,2} - |S_{T,1}|^2)`.
//! Under white noise `sqrt(T) M^2 / v_H0` is compared with normal quantiles;
//! the relevant-deviation and similarity tests and the confidence interval
//! standardize with the Gaussian-case variance estimate `v_H1` instead.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functional::{autocov_matrix, inner_product_raw, real_kernel_norm_sq, FunctionalSample};
use crate::normal;
use crate::par;
use crate::spectral::{m_hat_fast, FdftTable, MIN_LEN};

/// Minimum sample length for the `v_H1` estimate (four consecutive frequencies).
pub const MIN_LEN_H1: usize = 8;

/// Variances at or below this fraction of the data's natural scale are
/// treated as zero.
const DEGENERATE_REL: f64 = 1e-12;

/// The four estimated second-order terms of the asymptotic variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1VarianceTerms {
    /// `16 pi int tr(F_w^4) dw`.
    pub trace4: f64,
    /// `4 pi int ||f_w||^4 dw`.
    pub norm4: f64,
    /// `-16 int int tr(F_w1 F_w2^3)`.
    pub cross3: f64,
    /// The triple-integral term, in which two of the three frequencies are
    /// integrated out on their own.
    pub cross2: f64,
}

impl H1VarianceTerms {
    pub fn total(&self) -> f64 {
        self.trace4 + self.norm4 + self.cross3 + self.cross2
    }
}

/// Everything the tests need from one sample, computed from a single fDFT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralAnalysis {
    pub sample_len: usize,
    pub m_hat_sq: f64,
    /// `int int S_{T,2}`.
    pub s2_integral: f64,
    /// `||S_{T,1}||^2`.
    pub s1_norm_sq: f64,
    /// `v_H0 = 4 pi int int S_{T,2}`.
    pub v_h0: f64,
    /// Gaussian-case variance estimate, clipped at zero; `None` when `T < 8`
    /// or when skipped.
    pub v_h1_sq: Option<f64>,
    pub h1_terms: Option<H1VarianceTerms>,
    // Natural degree-four scale of the data, used for degeneracy checks.
    scale: f64,
}

impl SpectralAnalysis {
    pub fn new(x: &FunctionalSample) -> Result<Self> {
        x.require_len(MIN_LEN)?;
        Self::from_table(&FdftTable::new(x))
    }

    /// Skips the `v_H1` estimate, which dominates the cost for large grids.
    pub fn without_h1(x: &FunctionalSample) -> Result<Self> {
        x.require_len(MIN_LEN)?;
        Self::build(&FdftTable::new(x), false)
    }

    pub fn from_table(fd: &FdftTable) -> Result<Self> {
        Self::build(fd, true)
    }

    fn build(fd: &FdftTable, with_h1: bool) -> Result<Self> {
        let moments = m_hat_fast(fd)?;
        let n = fd.max_index();
        let g = fd.grid().len() as f64;
        let energy: f64 = fd.coefficients().iter().map(|v| v.norm_sqr()).sum::<f64>() / g;
        let per_freq = energy / (n + 1) as f64;
        let (v_h1_sq, h1_terms) = if with_h1 && fd.sample_len() >= MIN_LEN_H1 {
            let terms = h1_variance_terms(fd, &fd.s1_matrix());
            (Some(terms.total().max(0.0)), Some(terms))
        } else {
            (None, None)
        };
        Ok(Self {
            sample_len: fd.sample_len(),
            m_hat_sq: moments.m_hat(),
            s2_integral: moments.a2,
            s1_norm_sq: moments.a1,
            v_h0: 4.0 * PI * moments.a2,
            v_h1_sq,
            h1_terms,
            scale: 4.0 * PI * per_freq * per_freq,
        })
    }

    /// Analysis from already computed summary values. Only exact zeros count
    /// as degenerate variances.
    pub fn from_summary(sample_len: usize, m_hat_sq: f64, v_h0: f64, v_h1: Option<f64>) -> Self {
        Self {
            sample_len,
            m_hat_sq,
            s2_integral: v_h0 / (4.0 * PI),
            s1_norm_sq: v_h0 / (4.0 * PI) - m_hat_sq / (2.0 * PI),
            v_h0,
            v_h1_sq: v_h1.map(|v| v * v),
            h1_terms: None,
            scale: 0.0,
        }
    }

    /// `v_H1`, the square root of the Gaussian-case variance estimate.
    pub fn v_h1(&self) -> Option<f64> {
        self.v_h1_sq.map(f64::sqrt)
    }

    fn is_negligible(&self, v: f64) -> bool {
        v <= DEGENERATE_REL * self.scale
    }

    /// `v_H0`, or an error when it vanishes.
    pub fn checked_v_h0(&self) -> Result<f64> {
        if self.is_negligible(self.v_h0) {
            Err(Error::Degenerate(
                "null variance estimate v_H0 is zero (series constant in time?)".into(),
            ))
        } else {
            Ok(self.v_h0)
        }
    }

    /// `v_H1`, or an error when unavailable or zero.
    pub fn checked_v_h1(&self) -> Result<f64> {
        let v = self.v_h1().ok_or(Error::TooShort {
            required: MIN_LEN_H1,
            actual: self.sample_len,
        })?;
        if self.is_negligible(v) {
            Err(Error::Degenerate("variance estimate v_H1 is zero".into()))
        } else {
            Ok(v)
        }
    }
}

/// Estimates of the second-order terms of the asymptotic variance.
///
/// Every spectral factor at a common frequency is replaced by a periodogram
/// at its own consecutive offset `k, k-1, k-2, ...`; a frequency integral
/// over `[-pi, pi]` becomes `(4 pi / T) sum_k Re(...)`, and a frequency
/// integral that stands alone becomes `2 pi S_{T,1}`. Each periodogram is
/// rank one, so a summand reduces to a product of inner products of fDFT
/// curves, some of them first mapped through `S_{T,1}`.
fn h1_variance_terms(fd: &FdftTable, s1: &Array2<f64>) -> H1VarianceTerms {
    let t = fd.sample_len() as f64;
    let n = fd.max_index();
    let g = fd.grid().len() as f64;

    // (S1 X_k)(tau_i) = (1/G) sum_j S1(tau_i, sigma_j) X_k(sigma_j); S1 is symmetric.
    let z = fd.coefficients();
    let re = z.mapv(|v| v.re).dot(s1) / g;
    let im = z.mapv(|v| v.im).dot(s1) / g;
    let sz = Array2::from_shape_fn(re.dim(), |(k, j)| Complex64::new(re[[k, j]], im[[k, j]]));
    let ip = |j: usize, k: usize| fd.ip(j, k);
    let ip_sz = |j: usize, k: usize| inner_product_raw(sz.row(j), z.row(k));
    let ip_zs = |j: usize, k: usize| inner_product_raw(z.row(j), sz.row(k));

    let per_k = par::map_indexed(n + 1, |k| {
        let mut out = [0.0; 4];
        if k >= 4 {
            let chain = ip(k, k - 3) * ip(k - 1, k) * ip(k - 2, k - 1) * ip(k - 3, k - 2);
            out[0] = chain.re;
            out[1] = ip(k, k - 1).norm_sqr() * ip(k - 2, k - 3).norm_sqr();
        }
        if k >= 3 {
            out[2] = (ip_sz(k, k - 2) * ip(k - 1, k) * ip(k - 2, k - 1)).re;
        }
        if k >= 2 {
            out[3] = ip_zs(k, k - 1).norm_sqr();
        }
        out
    });
    let mut sums = [0.0; 4];
    for row in &per_k {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    let pi2 = PI * PI;
    H1VarianceTerms {
        trace4: 64.0 * pi2 / t * sums[0],
        norm4: 16.0 * pi2 / t * sums[1],
        cross3: -128.0 * pi2 / t * sums[2],
        cross2: 64.0 * pi2 / t * sums[3],
    }
}

/// Distance estimate `M^2`, via the fast route.
pub fn m_hat_squared(x: &FunctionalSample) -> Result<f64> {
    x.require_len(MIN_LEN)?;
    Ok(m_hat_fast(&FdftTable::new(x))?.m_hat())
}

/// `v_H0 = 4 pi int int S_{T,2}`.
pub fn var_h0_hat(x: &FunctionalSample) -> Result<f64> {
    x.require_len(MIN_LEN)?;
    Ok(4.0 * PI * m_hat_fast(&FdftTable::new(x))?.a2)
}

/// Gaussian-case estimate of the asymptotic variance of `sqrt(T) M^2`,
/// clipped at zero. Terms involving fourth-order cumulant spectra are left
/// out, which is exact for Gaussian processes.
pub fn var_h1_hat_gaussian(x: &FunctionalSample) -> Result<f64> {
    x.require_len(MIN_LEN_H1)?;
    let fd = FdftTable::new(x);
    Ok(h1_variance_terms(&fd, &fd.s1_matrix()).total().max(0.0))
}

/// Default lag cutoff `ceil(T^{1/3})` for the time-domain estimate.
pub fn default_lag_cutoff(t: usize) -> usize {
    let c = (t as f64).cbrt().ceil() as usize;
    // cbrt can land just above an exact cube
    if (c - 1).pow(3) >= t { c - 1 } else { c }.max(1)
}

/// Time-domain distance estimate `(1/pi) sum_{t=1}^{p} ||r_t||^2` with
/// centered autocovariance kernels.
pub fn m_tilde_squared(x: &FunctionalSample, lag_cutoff: usize) -> Result<f64> {
    let t = x.len();
    if lag_cutoff == 0 || lag_cutoff >= t {
        return Err(Error::InvalidParameter(format!(
            "lag cutoff must lie in 1..={}, got {lag_cutoff}",
            t.saturating_sub(1)
        )));
    }
    let norms = par::map_indexed(lag_cutoff, |i| {
        autocov_matrix(x, i + 1, true).map(|r| real_kernel_norm_sq(&r))
    });
    let mut total = 0.0;
    for v in norms {
        total += v?;
    }
    Ok(total / PI)
}

/// Which hypothesis a report tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestMode {
    /// `H0: M^2 = 0`, standardized by `v_H0`.
    Classical,
    /// `H: M^2 <= delta` against `K: M^2 > delta`.
    Relevant { delta: f64 },
    /// `H: M^2 >= delta` against `K: M^2 < delta`.
    Similarity { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    Retain,
}

impl Decision {
    fn from_bool(reject: bool) -> Self {
        if reject {
            Decision::Reject
        } else {
            Decision::Retain
        }
    }

    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of one test on one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub mode: TestMode,
    pub sample_len: usize,
    pub m_hat_sq: f64,
    pub v_h0: f64,
    pub v_h1: Option<f64>,
    pub z: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub critical_value: f64,
    pub decision: Decision,
    pub ci: Option<ConfidenceInterval>,
    /// Set when the result relies on `v_H1`, which assumes Gaussian data.
    pub gaussian_variance: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

fn interval(m_hat: f64, v: f64, t: usize, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let half = v / (t as f64).sqrt() * normal::quantile(1.0 - alpha / 2.0)?;
    let lo = (m_hat - half).max(0.0);
    let hi = (m_hat + half).max(lo);
    Ok(ConfidenceInterval {
        level: 1.0 - alpha,
        lo,
        hi,
    })
}

impl TestReport {
    /// Classical test: reject when `M^2 > v_H0 u_{1-alpha} / sqrt(T)`.
    pub fn classical(a: &SpectralAnalysis, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let v = a.checked_v_h0()?;
        let z = (a.sample_len as f64).sqrt() * a.m_hat_sq / v;
        let u = normal::quantile(1.0 - alpha)?;
        let ci = match a.checked_v_h1() {
            Ok(v1) => Some(interval(a.m_hat_sq, v1, a.sample_len, alpha)?),
            Err(_) => None,
        };
        Ok(Self {
            mode: TestMode::Classical,
            sample_len: a.sample_len,
            m_hat_sq: a.m_hat_sq,
            v_h0: a.v_h0,
            v_h1: a.v_h1(),
            z,
            p_value: normal::sf(z),
            alpha,
            critical_value: u,
            decision: Decision::from_bool(z > u),
            ci,
            gaussian_variance: false,
        })
    }

    /// Relevant-deviation or similarity test standardized by `v_H1`.
    pub fn precise(a: &SpectralAnalysis, mode: TestMode, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (delta, similarity) = match mode {
            TestMode::Relevant { delta } => (delta, false),
            TestMode::Similarity { delta } => (delta, true),
            TestMode::Classical => return Self::classical(a, alpha),
        };
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be >= 0, got {delta}"
            )));
        }
        let v = a.checked_v_h1()?;
        let z = (a.sample_len as f64).sqrt() * (a.m_hat_sq - delta) / v;
        let (u, reject, p) = if similarity {
            let u = normal::quantile(alpha)?;
            (u, z < u, normal::cdf(z))
        } else {
            let u = normal::quantile(1.0 - alpha)?;
            (u, z > u, normal::sf(z))
        };
        Ok(Self {
            mode,
            sample_len: a.sample_len,
            m_hat_sq: a.m_hat_sq,
            v_h0: a.v_h0,
            v_h1: Some(v),
            z,
            p_value: p,
            alpha,
            critical_value: u,
            decision: Decision::from_bool(reject),
            ci: Some(interval(a.m_hat_sq, v, a.sample_len, alpha)?),
            gaussian_variance: true,
        })
    }
}

/// Classical white-noise test at level `alpha`.
pub fn classical_test(x: &FunctionalSample, alpha: f64) -> Result<TestReport> {
    TestReport::classical(&SpectralAnalysis::new(x)?, alpha)
}

/// Relevant-deviation (`similarity = false`) or similarity test with threshold `delta`.
pub fn precise_test(
    x: &FunctionalSample,
    delta: f64,
    alpha: f64,
    similarity: bool,
) -> Result<TestReport> {
    let mode = if similarity {
        TestMode::Similarity { delta }
    } else {
        TestMode::Relevant { delta }
    };
    TestReport::precise(&SpectralAnalysis::new(x)?, mode, alpha)
}

/// Asymptotic `1 - alpha` confidence interval for the distance, clipped at zero.
pub fn confidence_interval(x: &FunctionalSample, alpha: f64) -> Result<ConfidenceInterval> {
    let a = SpectralAnalysis::new(x)?;
    interval(a.m_hat_sq, a.checked_v_h1()?, a.sample_len, alpha)
}

/// Confidence interval from given summary values.
pub fn confidence_interval_from(
    m_hat: f64,
    v_h1: f64,
    t: usize,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    if !(v_h1 > 0.0) {
        return Err(Error::Degenerate("variance estimate v_H1 is zero".into()));
    }
    interval(m_hat, v_h1, t, alpha)
}

/// Normal approximation of the classical test's power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub sample_len: usize,
    pub m0_sq: f64,
    pub v_h0: f64,
    pub v_h1: f64,
    pub alpha: f64,
    pub power: f64,
}

/// `Phi(sqrt(T) M0^2 / v_H1 - (v_H0 / v_H1) u_{1-alpha})`.
pub fn power_approximation(
    t: usize,
    m0_sq: f64,
    v_h0: f64,
    v_h1: f64,
    alpha: f64,
) -> Result<PowerEstimate> {
    check_alpha(alpha)?;
    if !(v_h1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "v_h1 must be positive, got {v_h1}"
        )));
    }
    if !(v_h0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "v_h0 must be >= 0, got {v_h0}"
        )));
    }
    let arg = (t as f64).sqrt() * m0_sq / v_h1 - v_h0 / v_h1 * normal::quantile(1.0 - alpha)?;
    Ok(PowerEstimate {
        sample_len: t,
        m0_sq,
        v_h0,
        v_h1,
        alpha,
        power: normal::cdf(arg),
    })
}

/// Kernel-free check used by tests: `S_{T,1}` recomputed from the stored rows.
#[cfg(test)]
fn s1_by_rows(fd: &FdftTable) -> Array2<f64> {
    use ndarray::s;
    let z = fd.coefficients();
    let n = fd.max_index();
    let g = z.ncols();
    let rows = z.slice(s![1..=n, ..]);
    Array2::from_shape_fn((g, g), |(i, j)| {
        rows.rows()
            .into_iter()
            .map(|r| (r[i] * r[j].conj()).re)
            .sum::<f64>()
            * 2.0
            / fd.sample_len() as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::s_statistics;

    fn zero_sample(t: usize, g: usize) -> FunctionalSample {
        FunctionalSample::from_rows(Array2::zeros((t, g))).unwrap()
    }

    fn wiggly(t: usize, g: usize) -> FunctionalSample {
        FunctionalSample::from_rows(Array2::from_shape_fn((t, g), |(s, j)| {
            ((s * 31 + j * 17) % 23) as f64 / 7.0 - 1.5 + 0.3 * (s as f64 * 0.9).sin()
        }))
        .unwrap()
    }

    #[test]
    fn zero_sample_gives_zero() {
        let x = zero_sample(16, 4);
        assert_eq!(m_hat_squared(&x).unwrap(), 0.0);
        assert_eq!(var_h0_hat(&x).unwrap(), 0.0);
        assert_eq!(var_h1_hat_gaussian(&x).unwrap(), 0.0);
        assert_eq!(m_tilde_squared(&x, 3).unwrap(), 0.0);
        assert!(matches!(
            classical_test(&x, 0.05),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            precise_test(&x, 0.1, 0.05, true),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn constant_in_time_is_degenerate() {
        let x =
            FunctionalSample::from_rows(Array2::from_shape_fn((32, 5), |(_, j)| 3.0 + j as f64))
                .unwrap();
        assert!(classical_test(&x, 0.05).unwrap_err().is_degenerate());
    }

    #[test]
    fn classical_arithmetic() {
        let a = SpectralAnalysis {
            sample_len: 100,
            m_hat_sq: 0.1,
            s2_integral: 0.5 / (4.0 * PI),
            s1_norm_sq: 0.0,
            v_h0: 0.5,
            v_h1_sq: None,
            h1_terms: None,
            scale: 1.0,
        };
        let r = TestReport::classical(&a, 0.05).unwrap();
        assert!((r.z - 2.0).abs() < 1e-14);
        assert!((r.critical_value - 1.644_853_626_951_472).abs() < 1e-12);
        assert_eq!(r.decision, Decision::Reject);
        assert!((r.p_value - (1.0 - 0.977_249_868_051_820_8)).abs() < 1e-15);
        assert!(r.ci.is_none());
        assert!(TestReport::classical(&a, 1.0).is_err());
    }

    fn with_v_h1(m: f64, v1: f64, t: usize) -> SpectralAnalysis {
        SpectralAnalysis {
            sample_len: t,
            m_hat_sq: m,
            s2_integral: 0.0,
            s1_norm_sq: 0.0,
            v_h0: 1.0,
            v_h1_sq: Some(v1 * v1),
            h1_terms: None,
            scale: 1.0,
        }
    }

    #[test]
    fn similarity_arithmetic() {
        let a = with_v_h1(0.05, 0.5, 100);
        let r = TestReport::precise(&a, TestMode::Similarity { delta: 0.2 }, 0.05).unwrap();
        assert!((r.z + 3.0).abs() < 1e-12);
        assert!((r.critical_value + 1.644_853_626_951_472).abs() < 1e-12);
        assert_eq!(r.decision, Decision::Reject);
        assert!(r.gaussian_variance);
    }

    #[test]
    fn boundary_delta_retains() {
        let a = with_v_h1(0.07, 0.3, 256);
        for alpha in [0.01, 0.1, 0.49] {
            for mode in [
                TestMode::Similarity { delta: 0.07 },
                TestMode::Relevant { delta: 0.07 },
            ] {
                let r = TestReport::precise(&a, mode, alpha).unwrap();
                assert_eq!(r.z, 0.0);
                assert_eq!(r.decision, Decision::Retain);
            }
        }
        assert!(TestReport::precise(&a, TestMode::Relevant { delta: -1.0 }, 0.05).is_err());
    }

    #[test]
    fn relevant_with_zero_delta_is_one_sided() {
        let a = with_v_h1(0.02, 0.1, 400);
        let r = TestReport::precise(&a, TestMode::Relevant { delta: 0.0 }, 0.05).unwrap();
        assert!((r.z - 4.0).abs() < 1e-12);
        assert_eq!(r.decision, Decision::Reject);
        assert!((r.p_value - normal::sf(4.0)).abs() < 1e-18);
    }

    #[test]
    fn interval_arithmetic() {
        let ci = confidence_interval_from(1.0, 1.0, 400, 0.05).unwrap();
        let h = 1.959_963_984_540_054 / 20.0;
        assert!((ci.lo - (1.0 - h)).abs() < 1e-12 && (ci.hi - (1.0 + h)).abs() < 1e-12);
        assert!((ci.lo - 0.902).abs() < 1e-3 && (ci.hi - 1.098).abs() < 1e-3);
        let ci = confidence_interval_from(0.0, 0.7, 50, 0.1).unwrap();
        assert_eq!(ci.lo, 0.0);
        let ci = confidence_interval_from(-5.0, 0.1, 50, 0.1).unwrap();
        assert!(ci.lo == 0.0 && ci.hi == 0.0);
        assert!(confidence_interval_from(1.0, 0.0, 50, 0.1).is_err());
    }

    #[test]
    fn power_examples() {
        let p = power_approximation(500, 0.0, 0.4, 0.4, 0.05).unwrap();
        assert!((p.power - 0.05).abs() < 1e-12);
        let p = power_approximation(256, 0.1, 0.5, 0.5, 0.05).unwrap();
        // 30-digit reference: Phi(3.2 - u_0.95) = 0.940044393607293620...
        assert!((p.power - 0.940_044_393_607_293_6).abs() < 1e-9);
        assert!((p.power - 0.9401).abs() < 1e-3);
        let p = power_approximation(64, 1e6, 0.5, 0.5, 0.05).unwrap();
        assert_eq!(p.power, 1.0);
        assert!(power_approximation(64, 0.1, 0.5, 0.0, 0.05).is_err());
        assert!(power_approximation(64, 0.1, -0.5, 1.0, 0.05).is_err());
    }

    #[test]
    fn fast_and_kernel_routes_agree() {
        let x = wiggly(21, 5);
        let kernel = s_statistics(&x).unwrap().m_hat();
        let fast = m_hat_squared(&x).unwrap();
        assert!((kernel.re - fast).abs() <= 1e-10 * fast.abs().max(1e-300));
        assert!(kernel.im.abs() <= 1e-10 * (1.0 + kernel.re.abs()));
    }

    #[test]
    fn s1_matrix_matches_rows() {
        let fd = FdftTable::new(&wiggly(13, 4));
        let a = fd.s1_matrix();
        let b = s1_by_rows(&fd);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn scaling_degrees() {
        let x = wiggly(40, 6);
        let c = 1.7;
        let y = x.scaled(c).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(
            rel(
                m_hat_squared(&y).unwrap(),
                c.powi(4) * m_hat_squared(&x).unwrap()
            ) < 1e-10
        );
        assert!(rel(var_h0_hat(&y).unwrap(), c.powi(4) * var_h0_hat(&x).unwrap()) < 1e-10);
        let h1 = var_h1_hat_gaussian(&x).unwrap();
        if h1 > 0.0 {
            assert!(rel(var_h1_hat_gaussian(&y).unwrap(), c.powi(8) * h1) < 1e-10);
        }
        let r1 = classical_test(&x, 0.05).unwrap();
        let r2 = classical_test(&y, 0.05).unwrap();
        assert!((r1.z - r2.z).abs() < 1e-10 * r1.z.abs().max(1.0));
        assert_eq!(r1.decision, r2.decision);
    }

    #[test]
    fn h1_requires_eight() {
        let x = wiggly(7, 3);
        assert!(matches!(
            var_h1_hat_gaussian(&x),
            Err(Error::TooShort { required: 8, .. })
        ));
        let r = classical_test(&x, 0.05).unwrap();
        assert!(r.v_h1.is_none() && r.ci.is_none());
        assert!(precise_test(&x, 0.1, 0.05, false).is_err());
    }

    #[test]
    fn lag_cutoff() {
        assert_eq!(default_lag_cutoff(27), 3);
        assert_eq!(default_lag_cutoff(28), 4);
        assert_eq!(default_lag_cutoff(1024), 11);
        assert_eq!(default_lag_cutoff(1), 1);
        let x = wiggly(10, 3);
        assert!(m_tilde_squared(&x, 0).is_err());
        assert!(m_tilde_squared(&x, 10).is_err());
        assert!(m_tilde_squared(&x, 9).unwrap() >= 0.0);
    }

    /// v_H1 by brute-force integration over the grid: every spectral factor
    /// is a materialized periodogram or S_{T,1}, integrated entry by entry.
    #[test]
    fn h1_terms_match_brute_force() {
        let x = wiggly(10, 3);
        let fd = FdftTable::new(&x);
        let terms = h1_variance_terms(&fd, &fd.s1_matrix());
        let t = 10.0;
        let n = 5;
        let g = 3;
        let z = fd.coefficients();
        let p = |k: usize, a: usize, b: usize| z[[k, a]] * z[[k, b]].conj();
        let s1 = s1_by_rows(&fd);
        let gg = (g * g * g * g) as f64;
        let (mut t1, mut t2, mut t3, mut t4) = (0.0, 0.0, 0.0, 0.0);
        for k in 2..=n {
            for a in 0..g {
                for b in 0..g {
                    for c in 0..g {
                        for d in 0..g {
                            // (tau1, sigma1, tau2, sigma2) = (a, b, c, d)
                            if k >= 4 {
                                t1 +=
                                    (p(k, a, b) * p(k - 1, b, c) * p(k - 2, c, d) * p(k - 3, d, a))
                                        .re;
                                t2 += (p(k, a, b)
                                    * p(k - 1, a, b).conj()
                                    * p(k - 2, c, d)
                                    * p(k - 3, c, d).conj())
                                .re;
                            }
                            if k >= 3 {
                                t3 +=
                                    s1[[a, b]] * (p(k, b, c) * p(k - 1, c, d) * p(k - 2, d, a)).re;
                            }
                            t4 += s1[[a, b]] * s1[[c, d]] * (p(k, a, d) * p(k - 1, c, b)).re;
                        }
                    }
                }
            }
        }
        let pi2 = PI * PI;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1e-12);
        assert!(close(terms.trace4, 64.0 * pi2 / t * t1 / gg));
        assert!(close(terms.norm4, 16.0 * pi2 / t * t2 / gg));
        assert!(close(terms.cross3, -128.0 * pi2 / t * t3 / gg));
        assert!(close(terms.cross2, 64.0 * pi2 / t * t4 / gg));
    }
}
