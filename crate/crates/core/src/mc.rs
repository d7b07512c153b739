//! Monte Carlo experiments: replicate (simulate, test) and aggregate.
//!
//! A cell is one model at one sample length. Its replications share one seed
//! and differ by stream index, and all alphas of a cell are evaluated on the
//! same replications. Results are identical for any number of threads.

use serde::Serialize;
use std::time::Instant;

use crate::error::{Error, ReplicationFailure, Result};
use crate::functional::FunctionalSample;
use crate::inference::{
    confidence_interval_from, SpectralAnalysis, TestMode, TestReport, MIN_LEN_H1,
};
use crate::normal;
use crate::par;
use crate::simulate::{simulate_stream, DgpSpec, Innovation, KernelKind, Model, RNG_NAME};
use crate::spectral::MIN_LEN;

pub const DESK_GRID_SIZE: usize = 100;
pub const DESK_REPS: usize = 500;
pub const TABLE_LENGTHS: [usize; 4] = [128, 256, 512, 1024];
pub const TABLE_ALPHAS: [f64; 3] = [0.10, 0.05, 0.01];

/// What each replication computes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McMode {
    Classical,
    Relevant {
        delta: f64,
    },
    Similarity {
        delta: f64,
    },
    /// Coverage of `target` by the `1 - alpha` confidence interval.
    Coverage {
        target: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub models: Vec<Model>,
    pub grid_size: usize,
    pub lengths: Vec<usize>,
    pub alphas: Vec<f64>,
    pub n_reps: usize,
    pub mode: McMode,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Experiment {
    pub fn new(
        model: Model,
        lengths: Vec<usize>,
        alphas: Vec<f64>,
        n_reps: usize,
        mode: McMode,
        seed: u64,
    ) -> Self {
        Self {
            models: vec![model],
            grid_size: DESK_GRID_SIZE,
            lengths,
            alphas,
            n_reps,
            mode,
            seed,
            threads: None,
        }
    }

    /// Size study over iid BM, iid Brownian bridge and FARCH(1).
    pub fn table1(grid_size: usize, n_reps: usize, seed: u64) -> Self {
        Self {
            models: vec![Model::IidBm, Model::IidBb, Model::farch1()],
            grid_size,
            lengths: TABLE_LENGTHS.to_vec(),
            alphas: TABLE_ALPHAS.to_vec(),
            n_reps,
            mode: McMode::Classical,
            seed,
            threads: None,
        }
    }

    /// Power study over the four FAR(1) designs.
    pub fn table2(grid_size: usize, n_reps: usize, seed: u64) -> Self {
        let models = [KernelKind::Gaussian, KernelKind::Wiener]
            .into_iter()
            .flat_map(|k| {
                [Innovation::BrownianMotion, Innovation::BrownianBridge]
                    .into_iter()
                    .map(move |i| Model::far1(k, i))
            })
            .collect();
        Self {
            models,
            ..Self::table1(grid_size, n_reps, seed)
        }
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_reps == 0 {
            return bad("n_reps must be at least 1".into());
        }
        if self.models.is_empty() || self.lengths.is_empty() || self.alphas.is_empty() {
            return bad("models, lengths and alphas must be non-empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return bad(format!("alpha must lie in (0, 1), got {a}"));
        }
        let min_len = match self.mode {
            McMode::Classical => MIN_LEN,
            _ => MIN_LEN_H1,
        };
        if let Some(t) = self.lengths.iter().find(|t| **t < min_len) {
            return bad(format!("sample length {t} below the minimum {min_len}"));
        }
        match self.mode {
            McMode::Relevant { delta } | McMode::Similarity { delta } if !(delta >= 0.0) => {
                return bad(format!("delta must be >= 0, got {delta}"))
            }
            _ => {}
        }
        for m in &self.models {
            m.validate()?;
        }
        if self.grid_size < 2 {
            return bad(format!(
                "grid size must be at least 2, got {}",
                self.grid_size
            ));
        }
        Ok(())
    }
}

/// Seed for the cell of `model` at length `len`, independent of the order in
/// which cells are listed.
pub fn cell_seed(master: u64, model: &Model, len: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in model.label().bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    splitmix64(splitmix64(master ^ h) ^ len as u64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mean, variance and Kolmogorov-Smirnov distance to `N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZSummary {
    pub mean: f64,
    pub variance: f64,
    pub ks_distance: f64,
}

impl ZSummary {
    pub fn from_sample(z: &[f64]) -> Self {
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let variance = if z.len() > 1 {
            z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            variance,
            ks_distance: ks_distance_normal(z),
        }
    }
}

/// `sup |F_n - Phi|` for the empirical distribution `F_n` of `z`.
pub fn ks_distance_normal(z: &[f64]) -> f64 {
    let mut s = z.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = normal::cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Rejection,
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub model: String,
    pub len: usize,
    pub alpha: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub rate_kind: RateKind,
    pub count: usize,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / n)`.
    pub se: f64,
    pub mean_m_hat_sq: f64,
    pub z_summary: Option<ZSummary>,
    /// `Var(sqrt(T) M^2) / mean(v_H0^2)` over the replications.
    pub variance_ratio: Option<f64>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub library_version: &'static str,
    pub rng: &'static str,
    pub seed: u64,
    pub grid_size: usize,
    pub n_reps: usize,
    pub mode: McMode,
    pub models: Vec<Model>,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub cells: Vec<Cell>,
    pub wall_time_secs: f64,
}

impl ExperimentResult {
    pub fn cell(&self, model: &str, len: usize, alpha: f64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.len == len && c.alpha == alpha)
    }

    /// Copy with every timing field zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.wall_time_secs = 0.0;
        for c in &mut out.cells {
            c.wall_time_secs = 0.0;
        }
        out
    }
}

/// Per-replication summary that every alpha of a cell is evaluated on.
struct Replication {
    analysis: SpectralAnalysis,
}

fn evaluate(a: &SpectralAnalysis, mode: McMode, alpha: f64) -> Result<(bool, Option<f64>)> {
    match mode {
        McMode::Classical => {
            let r = TestReport::classical(a, alpha)?;
            Ok((r.decision.is_reject(), Some(r.z)))
        }
        McMode::Relevant { delta } => {
            let r = TestReport::precise(a, TestMode::Relevant { delta }, alpha)?;
            Ok((r.decision.is_reject(), Some(r.z)))
        }
        McMode::Similarity { delta } => {
            let r = TestReport::precise(a, TestMode::Similarity { delta }, alpha)?;
            Ok((r.decision.is_reject(), Some(r.z)))
        }
        McMode::Coverage { target } => {
            let ci = confidence_interval_from(a.m_hat_sq, a.checked_v_h1()?, a.sample_len, alpha)?;
            Ok((ci.contains(target), None))
        }
    }
}

/// Runs `e` on the simulated processes.
pub fn run(e: &Experiment) -> Result<ExperimentResult> {
    run_with(e, simulate_stream)
}

/// Runs `e` drawing replication `r` of each cell from `sampler(spec, r)`.
pub fn run_with<S>(e: &Experiment, sampler: S) -> Result<ExperimentResult>
where
    S: Fn(&DgpSpec, u64) -> Result<FunctionalSample> + Sync,
{
    e.validate()?;
    let start = Instant::now();
    let cells = par::with_threads(e.threads, || {
        let mut cells = Vec::new();
        for model in &e.models {
            for &len in &e.lengths {
                cells.extend(run_cell(e, *model, len, &sampler)?);
            }
        }
        Ok::<_, Error>(cells)
    })??;
    Ok(ExperimentResult {
        metadata: Metadata {
            library_version: crate::VERSION,
            rng: RNG_NAME,
            seed: e.seed,
            grid_size: e.grid_size,
            n_reps: e.n_reps,
            mode: e.mode,
            models: e.models.clone(),
            parallel: cfg!(feature = "parallel"),
        },
        cells,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn run_cell<S>(e: &Experiment, model: Model, len: usize, sampler: &S) -> Result<Vec<Cell>>
where
    S: Fn(&DgpSpec, u64) -> Result<FunctionalSample> + Sync,
{
    let start = Instant::now();
    let seed = cell_seed(e.seed, &model, len);
    let spec = DgpSpec::new(model, e.grid_size, len, seed)?;
    let label = model.label();

    let reps = par::map_indexed(e.n_reps, |r| {
        let x = sampler(&spec, r as u64)?;
        let analysis = match e.mode {
            McMode::Classical => SpectralAnalysis::without_h1(&x)?,
            _ => SpectralAnalysis::new(&x)?,
        };
        // Surface degenerate replications here rather than per alpha.
        for &alpha in &e.alphas {
            evaluate(&analysis, e.mode, alpha)?;
        }
        Ok::<_, Error>(Replication { analysis })
    });
    let mut ok = Vec::with_capacity(e.n_reps);
    let mut failures = Vec::new();
    for (rep, r) in reps.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(err) => failures.push(ReplicationFailure {
                rep,
                error: Box::new(err),
            }),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Replications {
            cell: format!("{label} T={len}"),
            n_reps: e.n_reps,
            failures,
        });
    }

    let n = ok.len() as f64;
    let sqrt_t = (len as f64).sqrt();
    let m_hats: Vec<f64> = ok.iter().map(|r| r.analysis.m_hat_sq).collect();
    let mean_m_hat_sq = m_hats.iter().sum::<f64>() / n;
    let variance_ratio = (e.mode == McMode::Classical && ok.len() > 1).then(|| {
        let scaled: Vec<f64> = m_hats.iter().map(|m| m * sqrt_t).collect();
        let mean = scaled.iter().sum::<f64>() / n;
        let var = scaled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let mean_v2 = ok.iter().map(|r| r.analysis.v_h0.powi(2)).sum::<f64>() / n;
        var / mean_v2
    });

    let elapsed = start.elapsed().as_secs_f64();
    let mut out = Vec::with_capacity(e.alphas.len());
    for &alpha in &e.alphas {
        let mut count = 0;
        let mut zs = Vec::with_capacity(ok.len());
        for r in &ok {
            let (hit, z) = evaluate(&r.analysis, e.mode, alpha)?;
            count += hit as usize;
            zs.extend(z);
        }
        let rate = count as f64 / n;
        out.push(Cell {
            model: label.clone(),
            len,
            alpha,
            n_reps: e.n_reps,
            seed,
            rate_kind: match e.mode {
                McMode::Coverage { .. } => RateKind::Coverage,
                _ => RateKind::Rejection,
            },
            count,
            rate,
            se: (rate * (1.0 - rate) / n).sqrt(),
            mean_m_hat_sq,
            z_summary: (!zs.is_empty()).then(|| ZSummary::from_sample(&zs)),
            variance_ratio,
            wall_time_secs: elapsed,
        });
    }
    Ok(out)
}

/// Null-distribution summary of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullDiagnostic {
    pub model: String,
    pub len: usize,
    pub z_mean: f64,
    pub z_variance: f64,
    pub ks_distance: f64,
    pub variance_ratio: f64,
}

/// KS distance of the classical statistic to `N(0, 1)` and the ratio
/// `Var(sqrt(T) M^2) / mean(v_H0^2)` for every cell of `e`, run in
/// classical mode.
pub fn null_distribution_diagnostic(e: &Experiment) -> Result<Vec<NullDiagnostic>> {
    null_distribution_diagnostic_with(e, simulate_stream)
}

pub fn null_distribution_diagnostic_with<S>(
    e: &Experiment,
    sampler: S,
) -> Result<Vec<NullDiagnostic>>
where
    S: Fn(&DgpSpec, u64) -> Result<FunctionalSample> + Sync,
{
    let mut e = e.clone();
    e.mode = McMode::Classical;
    e.alphas = vec![e.alphas.first().copied().unwrap_or(0.05)];
    let res = run_with(&e, sampler)?;
    Ok(res
        .cells
        .iter()
        .map(|c| {
            let z = c.z_summary.expect("classical cells carry z");
            NullDiagnostic {
                model: c.model.clone(),
                len: c.len,
                z_mean: z.mean,
                z_variance: z.variance,
                ks_distance: z.ks_distance,
                variance_ratio: c.variance_ratio.unwrap_or(f64::NAN),
            }
        })
        .collect())
}
