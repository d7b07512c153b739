//! Grids, curves, bivariate kernels and the time-domain autocovariance.
//!
//! Curves are sampled on a common [`Grid`] of points in `[0, 1]`. Integrals
//! over `[0, 1]` and `[0, 1]^2` are plain averages of the grid values, which
//! on the default midpoint grid is the midpoint rule.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance used when checking the optional symmetry flags of a kernel.
const SYMMETRY_TOL: f64 = 1e-12;

/// Evaluation points shared by all curves and kernels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// Midpoint grid `tau_j = (j + 1/2) / n`.
    pub fn midpoint(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let g = n as f64;
        Ok(Self {
            points: (0..n).map(|j| (j as f64 + 0.5) / g).collect(),
        })
    }

    /// Grid from explicit points, which must be strictly increasing in `[0, 1]`.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidGrid("points must lie in [0, 1]".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Observed series `X_0, ..., X_{T-1}`; row `t` holds curve `X_t` on the grid.
#[derive(Debug, Clone)]
pub struct FunctionalSample {
    grid: Grid,
    values: Array2<f64>,
}

impl FunctionalSample {
    pub fn new(grid: Grid, values: Array2<f64>) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(Error::Shape {
                expected: format!("{} columns", grid.len()),
                actual: format!("{} columns", values.ncols()),
            });
        }
        if values.nrows() == 0 {
            return Err(Error::TooShort {
                required: 1,
                actual: 0,
            });
        }
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self { grid, values })
    }

    /// Builds a sample on the midpoint grid matching the row length.
    pub fn from_rows(values: Array2<f64>) -> Result<Self> {
        let grid = Grid::midpoint(values.ncols())?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Sample length `T`.
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn curve(&self, t: usize) -> ArrayView1<'_, f64> {
        self.values.row(t)
    }

    /// The same series multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.grid.clone(), &self.values * c)
    }

    /// The series in reversed time order.
    pub fn reversed(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.slice(s![..;-1, ..]).to_owned(),
        }
    }

    pub(crate) fn require_len(&self, required: usize) -> Result<()> {
        if self.len() < required {
            Err(Error::TooShort {
                required,
                actual: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// One complex-valued curve on a grid.
#[derive(Debug, Clone)]
pub struct ComplexCurve {
    grid: Grid,
    values: Array1<Complex64>,
}

impl ComplexCurve {
    pub fn new(grid: Grid, values: Array1<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                expected: format!("{} values", grid.len()),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> ArrayView1<'_, Complex64> {
        self.values.view()
    }

    /// Squared `L^2` norm.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

/// Complex kernel `k(tau_i, sigma_j)` on the grid squared.
#[derive(Debug, Clone)]
pub struct BivariateKernel {
    grid: Grid,
    values: Array2<Complex64>,
    hermitian: bool,
    real_symmetric: bool,
}

impl BivariateKernel {
    pub fn new(grid: Grid, values: Array2<Complex64>) -> Result<Self> {
        let g = grid.len();
        if values.dim() != (g, g) {
            return Err(Error::Shape {
                expected: format!("{g}x{g}"),
                actual: format!("{}x{}", values.nrows(), values.ncols()),
            });
        }
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self {
            grid,
            values,
            hermitian: false,
            real_symmetric: false,
        })
    }

    pub fn from_real(grid: Grid, values: &Array2<f64>) -> Result<Self> {
        Self::new(grid, values.mapv(|v| Complex64::new(v, 0.0)))
    }

    pub fn zeros(grid: Grid) -> Self {
        let g = grid.len();
        Self {
            grid,
            values: Array2::zeros((g, g)),
            hermitian: true,
            real_symmetric: true,
        }
    }

    /// Marks the kernel Hermitian, `k(tau, sigma) = conj k(sigma, tau)`. Fails
    /// if the values disagree.
    pub fn assert_hermitian(mut self) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        let g = self.grid.len();
        for i in 0..g {
            for j in 0..=i {
                let d = self.values[[i, j]] - self.values[[j, i]].conj();
                if d.norm() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidParameter(format!(
                        "kernel is not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Marks the kernel real and symmetric. Fails if the values disagree.
    pub fn assert_real_symmetric(mut self) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        let g = self.grid.len();
        for i in 0..g {
            for j in 0..=i {
                let a = self.values[[i, j]];
                let b = self.values[[j, i]];
                if a.im.abs() > SYMMETRY_TOL * scale || (a - b).norm() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidParameter(format!(
                        "kernel is not real symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        self.hermitian = true;
        self.real_symmetric = true;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> ArrayView2<'_, Complex64> {
        self.values.view()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[[i, j]]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Real parts as a dense matrix.
    pub fn real_part(&self) -> Array2<f64> {
        self.values.mapv(|v| v.re)
    }

    /// Discrete Hilbert-Schmidt norm `sqrt(integral |k|^2)`.
    pub fn hs_norm(&self) -> f64 {
        integrate_bi_abs_sq(&self.values).sqrt()
    }

    /// Mean of the diagonal, the discrete trace of the induced operator.
    pub fn trace(&self) -> Complex64 {
        let g = self.grid.len();
        self.values.diag().sum() / g as f64
    }
}

fn integrate_bi_abs_sq(values: &Array2<Complex64>) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64
}

/// Fourier frequency `omega_k = 2 pi k / T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierFrequency {
    index: i64,
    len: usize,
}

impl FourierFrequency {
    pub fn new(index: i64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter(
                "sample length must be positive".into(),
            ));
        }
        Ok(Self { index, len })
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn sample_len(&self) -> usize {
        self.len
    }

    /// The frequency in radians.
    pub fn value(&self) -> f64 {
        2.0 * PI * self.index as f64 / self.len as f64
    }
}

/// Mean of the kernel over all `G^2` grid nodes, the approximation of
/// `int_0^1 int_0^1 k(tau, sigma) d tau d sigma`.
pub fn integrate_bi(k: &BivariateKernel) -> Complex64 {
    k.values.sum() / k.values.len() as f64
}

/// `<a, b> = int a(tau) conj(b(tau)) d tau`.
pub fn inner_product(a: &ComplexCurve, b: &ComplexCurve) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(inner_product_raw(a.values.view(), b.values.view()))
}

pub(crate) fn inner_product_raw(
    a: ArrayView1<'_, Complex64>,
    b: ArrayView1<'_, Complex64>,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y.conj();
    }
    acc / a.len() as f64
}

/// Pointwise average of the curves.
pub fn mean_curve(x: &FunctionalSample) -> Array1<f64> {
    x.values
        .mean_axis(Axis(0))
        .expect("a sample always has at least one curve")
}

/// Real autocovariance matrix at `lag`, the values of
/// `(1 / (T - lag)) sum_{t = lag}^{T-1} (X_t(tau) - m(tau)) (X_{t-lag}(sigma) - m(sigma))`
/// where `m` is the sample mean curve when `centered` and zero otherwise.
pub fn autocov_matrix(x: &FunctionalSample, lag: usize, centered: bool) -> Result<Array2<f64>> {
    let t = x.len();
    if lag >= t {
        return Err(Error::IndexOutOfRange {
            index: lag,
            max: t - 1,
        });
    }
    let data = if centered {
        let m = mean_curve(x);
        &x.values - &m
    } else {
        x.values.clone()
    };
    let lead = data.slice(s![lag.., ..]);
    let trail = data.slice(s![..t - lag, ..]);
    let mut r = lead.t().dot(&trail);
    r /= (t - lag) as f64;
    Ok(r)
}

/// Autocovariance kernel estimate at `lag`, divisor `T - lag`.
pub fn autocov_kernel(x: &FunctionalSample, lag: usize, centered: bool) -> Result<BivariateKernel> {
    let r = autocov_matrix(x, lag, centered)?;
    let k = BivariateKernel::from_real(x.grid.clone(), &r)?;
    if lag == 0 {
        // Lag zero is a Gram matrix; symmetrize away the rounding asymmetry.
        let sym = (&k.values + &k.values.t()).mapv(|v| v * 0.5);
        BivariateKernel::new(x.grid.clone(), sym)?.assert_real_symmetric()
    } else {
        Ok(k)
    }
}

/// Squared discrete `L^2` norm of a real matrix viewed as a kernel.
pub(crate) fn real_kernel_norm_sq(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn grid(n: usize) -> Grid {
        Grid::midpoint(n).unwrap()
    }

    #[test]
    fn midpoint_grid_points() {
        let g = grid(4);
        assert_eq!(g.points(), &[0.125, 0.375, 0.625, 0.875]);
        assert!(Grid::midpoint(1).is_err());
        assert!(Grid::from_points(vec![0.1, 0.1]).is_err());
        assert!(Grid::from_points(vec![0.1, 1.2]).is_err());
        assert!(Grid::from_points(vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn integrate_constant_and_checkerboard() {
        let g = grid(6);
        let c = Complex64::new(2.5, -1.0);
        let k = BivariateKernel::new(g.clone(), Array2::from_elem((6, 6), c)).unwrap();
        assert!((integrate_bi(&k) - c).norm() < 1e-15);

        let board =
            Array2::from_shape_fn((6, 6), |(i, j)| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let k = BivariateKernel::from_real(g, &board).unwrap();
        assert_eq!(integrate_bi(&k), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integrate_min_squared() {
        let g = grid(1000);
        let p = g.points().to_vec();
        let m = Array2::from_shape_fn((1000, 1000), |(i, j)| p[i].min(p[j]).powi(2));
        let k = BivariateKernel::from_real(g, &m).unwrap();
        assert!((integrate_bi(&k).re - 1.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn inner_product_basics() {
        let g = grid(1000);
        let one = ComplexCurve::from_real(g.clone(), &vec![1.0; 1000]).unwrap();
        assert!((inner_product(&one, &one).unwrap() - 1.0).norm() < 1e-12);
        let lin = ComplexCurve::from_real(g.clone(), g.points()).unwrap();
        assert!((inner_product(&lin, &one).unwrap().re - 0.5).abs() < 1e-3);

        let a = ComplexCurve::new(
            grid(3),
            array![
                Complex64::new(1.0, 2.0),
                Complex64::new(-0.5, 0.1),
                Complex64::new(0.0, 3.0)
            ],
        )
        .unwrap();
        let b = ComplexCurve::new(
            grid(3),
            array![
                Complex64::new(0.3, -1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 1.0)
            ],
        )
        .unwrap();
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        assert!(inner_product(&a, &one).is_err());
    }

    #[test]
    fn mean_curve_examples() {
        let x = FunctionalSample::from_rows(array![[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert_eq!(mean_curve(&x), array![1.0, 2.0]);
        let x = FunctionalSample::from_rows(array![[0.5, -2.0], [-0.5, 2.0]]).unwrap();
        assert_eq!(mean_curve(&x), array![0.0, 0.0]);
        let x = FunctionalSample::from_rows(array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(mean_curve(&x), array![1.0, 1.0]);
    }

    #[test]
    fn autocov_examples() {
        let x = FunctionalSample::from_rows(Array2::from_elem((5, 3), 4.0)).unwrap();
        let r = autocov_kernel(&x, 1, true).unwrap();
        assert_eq!(r.max_abs(), 0.0);

        let a = [1.0, -2.0, 0.5];
        let b = [3.0, 0.25, -1.0];
        let x =
            FunctionalSample::from_rows(array![[a[0], a[1], a[2]], [b[0], b[1], b[2]]]).unwrap();
        let r = autocov_kernel(&x, 1, false).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                // X_1(tau) X_0(sigma)
                assert_eq!(r.get(i, j).re, b[i] * a[j]);
            }
        }
        assert!(matches!(
            autocov_kernel(&x, 2, false),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn lag_zero_is_real_symmetric() {
        let x = FunctionalSample::from_rows(array![
            [1.0, 2.0, 0.0],
            [0.5, -1.0, 3.0],
            [2.0, 0.0, -1.0]
        ])
        .unwrap();
        let r = autocov_kernel(&x, 0, true).unwrap();
        assert!(r.is_real_symmetric());
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(matches!(
            FunctionalSample::from_rows(array![[1.0, f64::NAN]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(FunctionalSample::new(grid(3), Array2::zeros((2, 2))).is_err());
        let k = BivariateKernel::new(
            grid(2),
            array![
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
                [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]
            ],
        )
        .unwrap();
        assert!(k.clone().assert_hermitian().is_err());
        assert!(k.assert_real_symmetric().is_err());
    }
}
