//! Benchmark processes on a shared grid: iid Brownian motion and bridge,
//! FARCH(1) and FAR(1) with Gaussian or Wiener operator kernels.
//!
//! Every sample is a pure function of its [`DgpSpec`] and a stream index.
//! The generator is ChaCha8 seeded from the spec's 64-bit seed; stream `r`
//! selects an independent keystream, so replication `r` of an experiment
//! draws from `(seed, r)` whatever thread it runs on.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{BivariateKernel, FunctionalSample, Grid};

/// Generator name recorded in reports.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), keystream = replication index";

pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_HS_NORM: f64 = 0.3;
pub const DEFAULT_C_PSI: f64 = 0.3418;

/// Generator for replication `stream` of seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `c exp((tau^2 + sigma^2) / 2)`.
    Gaussian,
    /// `c min(tau, sigma)`.
    Wiener,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Innovation {
    #[serde(rename = "bm")]
    BrownianMotion,
    #[serde(rename = "bb")]
    BrownianBridge,
}

impl Innovation {
    fn draw<R: Rng + ?Sized>(self, grid: &Grid, rng: &mut R) -> Array1<f64> {
        match self {
            Innovation::BrownianMotion => brownian_motion_path(grid, rng),
            Innovation::BrownianBridge => brownian_bridge_path(grid, rng),
        }
    }

    /// Covariance of the innovation at two grid points.
    fn covariance(self, s: f64, t: f64) -> f64 {
        match self {
            Innovation::BrownianMotion => s.min(t),
            Innovation::BrownianBridge => s.min(t) - s * t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    IidBm,
    IidBb,
    Farch1 {
        c_psi: f64,
        burn_in: usize,
    },
    Far1 {
        kernel: KernelKind,
        hs_norm: f64,
        innovation: Innovation,
        burn_in: usize,
    },
}

impl Model {
    pub fn farch1() -> Self {
        Model::Farch1 {
            c_psi: DEFAULT_C_PSI,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn far1(kernel: KernelKind, innovation: Innovation) -> Self {
        Model::Far1 {
            kernel,
            hs_norm: DEFAULT_HS_NORM,
            innovation,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// Short label such as `far1-wiener-bm`.
    pub fn label(&self) -> String {
        match self {
            Model::IidBm => "iid-bm".into(),
            Model::IidBb => "iid-bb".into(),
            Model::Farch1 { .. } => "farch1".into(),
            Model::Far1 {
                kernel, innovation, ..
            } => format!(
                "far1-{}-{}",
                match kernel {
                    KernelKind::Gaussian => "gaussian",
                    KernelKind::Wiener => "wiener",
                },
                match innovation {
                    Innovation::BrownianMotion => "bm",
                    Innovation::BrownianBridge => "bb",
                }
            ),
        }
    }

    /// Whether the process is white noise (possibly dependent).
    pub fn is_white(&self) -> bool {
        !matches!(self, Model::Far1 { hs_norm, .. } if *hs_norm > 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Far1 { hs_norm, .. } if !(0.0..1.0).contains(&hs_norm) => {
                Err(Error::InvalidParameter(format!(
                    "FAR(1) kernel norm must lie in [0, 1), got {hs_norm}"
                )))
            }
            Model::Farch1 { c_psi, .. } if !(c_psi >= 0.0 && c_psi.is_finite()) => Err(
                Error::InvalidParameter(format!("c_psi must be finite and >= 0, got {c_psi}")),
            ),
            _ => Ok(()),
        }
    }
}

/// A fully specified data-generating process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgpSpec {
    pub model: Model,
    pub grid: Grid,
    pub len: usize,
    pub seed: u64,
}

impl DgpSpec {
    /// Spec on a midpoint grid of `grid_size` points.
    pub fn new(model: Model, grid_size: usize, len: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            model,
            grid: Grid::midpoint(grid_size)?,
            len,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.len == 0 {
            return Err(Error::InvalidParameter(
                "sample length must be positive".into(),
            ));
        }
        self.model.validate()
    }
}

/// Standard Brownian motion at the grid points.
///
/// Built from independent Gaussian increments over consecutive gaps, the
/// first running from 0 to the first grid point, so the covariance at the
/// nodes is exactly `min(tau, sigma)`.
pub fn brownian_motion_path<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Array1<f64> {
    let mut prev = 0.0;
    let mut w = 0.0;
    grid.points()
        .iter()
        .map(|&p| {
            let z: f64 = rng.sample(StandardNormal);
            w += z * (p - prev).sqrt();
            prev = p;
            w
        })
        .collect()
}

/// Brownian bridge `W(tau) - tau W(1)`, with `W(1)` drawn as the endpoint
/// of the same path.
pub fn brownian_bridge_path<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Array1<f64> {
    let mut w = brownian_motion_path(grid, rng);
    let last = *grid
        .points()
        .last()
        .expect("grids have at least two points");
    let z: f64 = rng.sample(StandardNormal);
    let w1 = w[w.len() - 1] + z * (1.0 - last).sqrt();
    for (v, &p) in w.iter_mut().zip(grid.points()) {
        *v -= p * w1;
    }
    w
}

/// `int_0^1 exp(tau^2) d tau` from its power series `sum 1 / (n! (2n + 1))`.
fn exp_square_integral() -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..40 {
        if n > 0 {
            term /= n as f64;
        }
        sum += term / (2 * n + 1) as f64;
    }
    sum
}

/// Continuous-norm scale of the kernel shape: the constant `c` for which the
/// kernel on `[0, 1]^2` has Hilbert-Schmidt norm `target`.
pub fn kernel_constant(kind: KernelKind, target: f64) -> f64 {
    match kind {
        // int int exp(tau^2 + sigma^2) = (int exp(tau^2))^2
        KernelKind::Gaussian => target / exp_square_integral(),
        // int int min(tau, sigma)^2 = 1/6
        KernelKind::Wiener => target * 6f64.sqrt(),
    }
}

fn kernel_shape(kind: KernelKind, s: f64, t: f64) -> f64 {
    match kind {
        KernelKind::Gaussian => ((s * s + t * t) / 2.0).exp(),
        KernelKind::Wiener => s.min(t),
    }
}

/// FAR(1) operator kernel scaled so that its discrete Hilbert-Schmidt norm on
/// `grid` equals `target`.
pub fn far1_kernel(kind: KernelKind, grid: &Grid, target: f64) -> Result<BivariateKernel> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "kernel norm must lie in [0, 1), got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(BivariateKernel::zeros(grid.clone()));
    }
    let p = grid.points();
    let shape = Array2::from_shape_fn((p.len(), p.len()), |(i, j)| kernel_shape(kind, p[i], p[j]));
    let norm = (shape.iter().map(|v| v * v).sum::<f64>() / shape.len() as f64).sqrt();
    let k = shape * (target / norm);
    BivariateKernel::from_real(grid.clone(), &k)?.assert_real_symmetric()
}

/// Discrete operator matrix `P` with `(P x)_i = (1/G) sum_j K(tau_i, sigma_j) x_j`.
fn operator_matrix(kernel: &BivariateKernel) -> Array2<f64> {
    kernel.real_part() / kernel.grid().len() as f64
}

/// Population distance `(1/pi) sum_{h >= 1} ||r_h||^2` of a stationary FAR(1)
/// process with the discrete operator of `kernel`, computed from
/// `r_0 = sum_j P^j C (P^j)'` and `r_h = P^h r_0`.
pub fn far1_distance(kernel: &BivariateKernel, innovation: Innovation) -> f64 {
    let grid = kernel.grid();
    let p = operator_matrix(kernel);
    let pts = grid.points();
    let c = Array2::from_shape_fn((pts.len(), pts.len()), |(i, j)| {
        innovation.covariance(pts[i], pts[j])
    });
    let norm_sq = |m: &Array2<f64>| m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64;

    let mut r0 = c.clone();
    let mut term = c;
    for _ in 0..200 {
        term = p.dot(&term).dot(&p.t());
        r0 += &term;
        if norm_sq(&term) <= 1e-34 * norm_sq(&r0) {
            break;
        }
    }
    let mut total = 0.0;
    let mut r = r0;
    for _ in 0..400 {
        r = p.dot(&r);
        let n = norm_sq(&r);
        total += n;
        if n <= 1e-17 * total {
            break;
        }
    }
    total / std::f64::consts::PI
}

/// Sample for stream 0 of `spec`.
pub fn simulate(spec: &DgpSpec) -> Result<FunctionalSample> {
    simulate_stream(spec, 0)
}

/// Sample for replication `stream` of `spec`.
pub fn simulate_stream(spec: &DgpSpec, stream: u64) -> Result<FunctionalSample> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, stream);
    let grid = &spec.grid;
    let g = grid.len();
    let t = spec.len;
    let mut out = Array2::<f64>::zeros((t, g));

    match spec.model {
        Model::IidBm | Model::IidBb => {
            let innovation = if spec.model == Model::IidBm {
                Innovation::BrownianMotion
            } else {
                Innovation::BrownianBridge
            };
            for mut row in out.rows_mut() {
                row.assign(&innovation.draw(grid, &mut rng));
            }
        }
        Model::Far1 {
            kernel,
            hs_norm,
            innovation,
            burn_in,
        } => {
            let p = operator_matrix(&far1_kernel(kernel, grid, hs_norm)?);
            let mut x = Array1::<f64>::zeros(g);
            for step in 0..burn_in + t {
                let eps = innovation.draw(grid, &mut rng);
                x = p.dot(&x) + eps;
                if step >= burn_in {
                    out.row_mut(step - burn_in).assign(&x);
                }
            }
        }
        Model::Farch1 { c_psi, burn_in } => {
            let pts = grid.points();
            let half_exp: Vec<f64> = pts.iter().map(|p| (p * p / 2.0).exp()).collect();
            let mut x = Array1::<f64>::zeros(g);
            for step in 0..burn_in + t {
                // int c exp((tau^2 + sigma^2) / 2) X(sigma)^2 d sigma
                //   = c exp(tau^2 / 2) * mean_j exp(sigma_j^2 / 2) X(sigma_j)^2
                let s = x.iter().zip(&half_exp).map(|(v, e)| e * v * v).sum::<f64>() / g as f64;
                let eps = brownian_motion_path(grid, &mut rng);
                for j in 0..g {
                    x[j] = eps[j] * (pts[j] + c_psi * half_exp[j] * s).sqrt();
                }
                if step >= burn_in {
                    out.row_mut(step - burn_in).assign(&x);
                }
            }
        }
    }

    if let Some(pos) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Diverged { step: pos / g });
    }
    FunctionalSample::new(grid.clone(), out)
}
