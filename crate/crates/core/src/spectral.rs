//! Functional DFT, periodogram kernels and the sums `S_{T,1}`, `S_{T,2}`.
//!
//! Two routes compute the distance estimate. [`s_statistics`] materializes
//! every periodogram kernel and forms the sums literally. [`m_hat_fast`] works
//! on the fDFT curves directly: because each periodogram is rank one,
//! `<p_k, p_{k-1}> = |<X_k, X_{k-1}>|^2` and the `S_{T,2}` integral needs only
//! `O(T G)` work. Only `S_{T,1}` is accumulated as a `G x G` matrix.
//!
//! Only the frequencies `k = 0, ..., floor(T/2)` are stored; for real input
//! the negative frequencies are the complex conjugates.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functional::{
    inner_product_raw, integrate_bi, BivariateKernel, ComplexCurve, FourierFrequency,
    FunctionalSample, Grid,
};
use crate::par;

/// Minimum sample length for which `S_{T,2}` has a summand.
pub const MIN_LEN: usize = 4;

/// Unnormalized DFT of every grid column, column-major: entry `j * T + k` is
/// `sum_t X_t(tau_j) exp(-2 pi i k t / T)`.
fn column_spectra(x: &FunctionalSample) -> Vec<Complex64> {
    let t = x.len();
    let g = x.grid().len();
    let values = x.values();
    let mut buf = vec![Complex64::new(0.0, 0.0); g * t];
    for (j, col) in buf.chunks_mut(t).enumerate() {
        for (dst, src) in col.iter_mut().zip(values.column(j).iter()) {
            *dst = Complex64::new(*src, 0.0);
        }
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(t);
    par::for_each_chunk_mut(&mut buf, t, |_, col| fft.process(col));
    buf
}

/// fDFT curves at the Fourier frequencies `k = 0, ..., floor(T/2)`.
#[derive(Debug, Clone)]
pub struct FdftTable {
    grid: Grid,
    len: usize,
    // Row k holds the curve at omega_k.
    coeffs: Array2<Complex64>,
}

impl FdftTable {
    pub fn new(x: &FunctionalSample) -> Self {
        let t = x.len();
        let g = x.grid().len();
        let n = t / 2;
        let scale = 1.0 / (2.0 * PI * t as f64).sqrt();
        let spectra = column_spectra(x);
        let coeffs = Array2::from_shape_fn((n + 1, g), |(k, j)| spectra[j * t + k] * scale);
        Self {
            grid: x.grid().clone(),
            len: t,
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Sample length `T`.
    pub fn sample_len(&self) -> usize {
        self.len
    }

    /// Largest stored frequency index, `floor(T/2)`.
    pub fn max_index(&self) -> usize {
        self.len / 2
    }

    /// All stored curves, one row per frequency index.
    pub fn coefficients(&self) -> ArrayView2<'_, Complex64> {
        self.coeffs.view()
    }

    pub(crate) fn row(&self, k: usize) -> ArrayView1<'_, Complex64> {
        self.coeffs.row(k)
    }

    pub fn frequency(&self, k: usize) -> Result<FourierFrequency> {
        self.check_index(k)?;
        FourierFrequency::new(k as i64, self.len)
    }

    pub fn curve(&self, k: usize) -> Result<ComplexCurve> {
        self.check_index(k)?;
        ComplexCurve::new(self.grid.clone(), self.coeffs.row(k).to_owned())
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k > self.max_index() {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.max_index(),
            })
        } else {
            Ok(())
        }
    }

    /// `<X_j, X_k>` for two stored frequencies.
    pub(crate) fn ip(&self, j: usize, k: usize) -> Complex64 {
        inner_product_raw(self.coeffs.row(j), self.coeffs.row(k))
    }

    /// Relative deviation from Parseval's identity,
    /// `sum_{k=0}^{T-1} ||X_k||^2 = (1 / 2 pi) sum_t ||X_t||^2`.
    pub fn parseval_residual(&self, x: &FunctionalSample) -> f64 {
        let t = self.len;
        let g = self.grid.len() as f64;
        let norm = |k: usize| self.coeffs.row(k).iter().map(|v| v.norm_sqr()).sum::<f64>() / g;
        let mut freq = norm(0);
        for k in 1..t.div_ceil(2) {
            freq += 2.0 * norm(k);
        }
        if t.is_multiple_of(2) {
            freq += norm(t / 2);
        }
        let time = x.values().iter().map(|v| v * v).sum::<f64>() / g / (2.0 * PI);
        if time == 0.0 {
            freq.abs()
        } else {
            (freq - time).abs() / time
        }
    }

    /// `S_{T,1} = (2 / T) sum_{k=1}^{floor(T/2)} Re p_k` as a real matrix.
    pub fn s1_matrix(&self) -> Array2<f64> {
        let n = self.max_index();
        let rows = self.coeffs.slice(s![1..=n, ..]);
        let re = rows.mapv(|v| v.re);
        let im = rows.mapv(|v| v.im);
        let mut s1 = re.t().dot(&re);
        s1 += &im.t().dot(&im);
        s1 *= 2.0 / self.len as f64;
        s1
    }
}

/// fDFT of the sample at an arbitrary frequency by direct summation.
///
/// [`FdftTable`] produces the same curves for all Fourier frequencies at once
/// through one FFT per grid column.
pub fn fdft(x: &FunctionalSample, omega: FourierFrequency) -> ComplexCurve {
    let t = x.len();
    let w = omega.value();
    let scale = 1.0 / (2.0 * PI * t as f64).sqrt();
    let mut acc = Array1::<Complex64>::zeros(x.grid().len());
    for (step, curve) in x.values().rows().into_iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -w * step as f64);
        for (a, v) in acc.iter_mut().zip(curve.iter()) {
            *a += phase * *v;
        }
    }
    acc.mapv_inplace(|v| v * scale);
    ComplexCurve::new(x.grid().clone(), acc).expect("fDFT of finite data is finite")
}

/// Periodogram kernel `p_k(tau, sigma) = X_k(tau) conj X_k(sigma)`.
pub fn periodogram(fd: &FdftTable, k: usize) -> Result<BivariateKernel> {
    fd.check_index(k)?;
    let z = fd.row(k);
    let g = z.len();
    let values = Array2::from_shape_fn((g, g), |(i, j)| z[i] * z[j].conj());
    BivariateKernel::new(fd.grid.clone(), values)?.assert_hermitian()
}

/// Kernel-level `S_{T,1}` and `S_{T,2}`.
#[derive(Debug, Clone)]
pub struct SStatistics {
    pub s1: BivariateKernel,
    pub s2: BivariateKernel,
    pub len: usize,
}

impl SStatistics {
    /// `2 pi int int (S_{T,2} - S_{T,1} conj S_{T,1})`, complex; the imaginary
    /// part is rounding noise.
    pub fn m_hat(&self) -> Complex64 {
        let prod = &self.s2.values() - &self.s1.values().mapv(|v| v * v.conj());
        let k = BivariateKernel::new(self.s1.grid().clone(), prod)
            .expect("finite kernels give a finite combination");
        integrate_bi(&k) * (2.0 * PI)
    }
}

/// Literal evaluation of
/// `S_{T,1} = (1/T) sum_{k=1}^{n} (p_k + conj p_k)` and
/// `S_{T,2} = (2/T) sum_{k=2}^{n} p_k conj p_{k-1}` (entrywise),
/// with `n = floor(T/2)`.
pub fn s_statistics(x: &FunctionalSample) -> Result<SStatistics> {
    x.require_len(MIN_LEN)?;
    let fd = FdftTable::new(x);
    let t = x.len();
    let n = fd.max_index();
    let g = x.grid().len();
    let mut s1 = Array2::<Complex64>::zeros((g, g));
    let mut s2 = Array2::<Complex64>::zeros((g, g));
    let mut prev = periodogram(&fd, 1)?;
    s1 += &prev.values();
    s1 += &prev.values().mapv(|v| v.conj());
    for k in 2..=n {
        let p = periodogram(&fd, k)?;
        s1 += &p.values();
        s1 += &p.values().mapv(|v| v.conj());
        s2 += &(&p.values() * &prev.values().mapv(|v| v.conj()));
        prev = p;
    }
    s1 /= Complex64::new(t as f64, 0.0);
    s2 *= Complex64::new(2.0 / t as f64, 0.0);
    let grid = x.grid().clone();
    Ok(SStatistics {
        s1: BivariateKernel::new(grid.clone(), s1)?.assert_real_symmetric()?,
        s2: BivariateKernel::new(grid, s2)?,
        len: t,
    })
}

/// The two quadratic forms behind the distance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastMoments {
    /// `int int S_{T,2} = (2/T) sum_{k=2}^{n} |<X_k, X_{k-1}>|^2`.
    pub a2: f64,
    /// `||S_{T,1}||_2^2`.
    pub a1: f64,
}

impl FastMoments {
    /// `2 pi (a2 - a1)`.
    pub fn m_hat(&self) -> f64 {
        2.0 * PI * (self.a2 - self.a1)
    }
}

/// `a2` from the fDFT curves alone.
pub(crate) fn s2_integral(fd: &FdftTable) -> f64 {
    let n = fd.max_index();
    let terms = par::map_indexed(n.saturating_sub(1), |i| fd.ip(i + 2, i + 1).norm_sqr());
    terms.iter().sum::<f64>() * 2.0 / fd.sample_len() as f64
}

/// Fast route to the distance estimate; see the module docs.
pub fn m_hat_fast(fd: &FdftTable) -> Result<FastMoments> {
    if fd.sample_len() < MIN_LEN {
        return Err(Error::TooShort {
            required: MIN_LEN,
            actual: fd.sample_len(),
        });
    }
    let s1 = fd.s1_matrix();
    Ok(FastMoments {
        a2: s2_integral(fd),
        a1: crate::functional::real_kernel_norm_sq(&s1),
    })
}

/// Largest entrywise deviation between
/// `(1/T) sum_{k=-floor((T-1)/2)}^{floor(T/2)} (p_k + conj p_k)` and
/// `(1 / (pi T)) sum_t X_t(tau) X_t(sigma)`.
///
/// The frequency sum runs over all `T` Fourier frequencies, taken from the
/// full FFT output rather than the conjugate-symmetric half table.
pub fn full_frequency_identity_check(x: &FunctionalSample) -> f64 {
    let t = x.len();
    let g = x.grid().len();
    let scale = 1.0 / (2.0 * PI * t as f64);
    let spectra = column_spectra(x);
    let values = x.values();
    let rows = par::map_indexed(g, |i| {
        let mut worst = 0.0_f64;
        for j in 0..g {
            let mut freq = 0.0;
            for k in 0..t {
                let p = spectra[i * t + k] * spectra[j * t + k].conj() * scale;
                freq += 2.0 * p.re;
            }
            freq /= t as f64;
            let time: f64 = values
                .column(i)
                .iter()
                .zip(values.column(j).iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (PI * t as f64);
            worst = worst.max((freq - time).abs());
        }
        worst
    });
    rows.into_iter().fold(0.0, f64::max)
}
