//! `fwnoise` command-line front end.
//!
//! Exit codes: 0 on success (whatever the decision), 2 for unreadable or
//! invalid input and parameters, 3 for degenerate data, 1 otherwise.

mod args;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{
    Cli, Command, InnovationKind, Kernel, McArgs, McModeArg, Mode, ModelArgs, ModelKind, Preset,
    SimulateArgs, TestArgs, Variance,
};
use fwnoise::mc::{self, Experiment, ExperimentResult, McMode};
use fwnoise::simulate::{self, DgpSpec, Innovation, KernelKind, Model};
use fwnoise::{SpectralAnalysis, TestMode, TestReport};

/// Version of the JSON documents written by this tool.
const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Degenerate(String),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Degenerate(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Degenerate(m) => write!(f, "degenerate data: {m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<fwnoise::Error> for Failure {
    fn from(e: fwnoise::Error) -> Self {
        use fwnoise::Error as E;
        match &e {
            E::Degenerate(_) => Failure::Degenerate(e.to_string()),
            E::Replications { failures, .. }
                if failures.iter().all(|f| f.error.is_degenerate()) =>
            {
                Failure::Degenerate(e.to_string())
            }
            E::InvalidGrid(_)
            | E::Shape { .. }
            | E::NonFinite { .. }
            | E::TooShort { .. }
            | E::IndexOutOfRange { .. }
            | E::InvalidParameter(_) => Failure::Input(e.to_string()),
            _ => Failure::Other(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

#[derive(Serialize)]
struct TimeDomain {
    lag_cutoff: usize,
    m_tilde_sq: f64,
}

#[derive(Serialize)]
struct TestDocument {
    schema_version: u32,
    library_version: &'static str,
    input: PathBuf,
    seed: Option<u64>,
    grid_size: usize,
    sample_len: usize,
    report: TestReport,
    time_domain: Option<TimeDomain>,
}

#[derive(Serialize)]
struct SimulationDocument<'a> {
    schema_version: u32,
    library_version: &'static str,
    rng: &'static str,
    data: PathBuf,
    grid_size: usize,
    sample_len: usize,
    seed: u64,
    spec: &'a DgpSpec,
}

#[derive(Serialize)]
struct McDocument {
    schema_version: u32,
    library_version: &'static str,
    result: ExperimentResult,
}

fn run_test(a: &TestArgs) -> Result<(), Failure> {
    let x = io::read_sample(&a.input, a.header)?;
    let mode = match (a.mode, a.delta) {
        (Mode::Classical, None) => TestMode::Classical,
        (Mode::Classical, Some(_)) => {
            return Err(Failure::Input(
                "--delta requires --mode relevant or similarity".into(),
            ))
        }
        (_, None) => {
            return Err(Failure::Input(
                "--delta is required for the relevant and similarity modes".into(),
            ))
        }
        (Mode::Relevant, Some(delta)) => TestMode::Relevant { delta },
        (Mode::Similarity, Some(delta)) => TestMode::Similarity { delta },
    };
    let variance = a.variance.unwrap_or(match mode {
        TestMode::Classical => Variance::H0,
        _ => Variance::H1Gaussian,
    });
    if mode != TestMode::Classical && variance == Variance::H0 {
        return Err(Failure::Input(
            "the relevant and similarity modes standardize by h1-gaussian".into(),
        ));
    }

    let (report, time_domain) = fwnoise::with_threads(a.threads, || -> Result<_, Failure> {
        let analysis = SpectralAnalysis::new(&x)?;
        let report = match (mode, variance) {
            (TestMode::Classical, Variance::H0) => TestReport::classical(&analysis, a.alpha)?,
            // one-sided rule with the Gaussian-case variance
            (TestMode::Classical, Variance::H1Gaussian) => {
                TestReport::precise(&analysis, TestMode::Relevant { delta: 0.0 }, a.alpha)?
            }
            (m, _) => TestReport::precise(&analysis, m, a.alpha)?,
        };
        let time_domain = match a.pt {
            Some(p) => Some(TimeDomain {
                lag_cutoff: p,
                m_tilde_sq: fwnoise::m_tilde_squared(&x, p)?,
            }),
            None => None,
        };
        Ok((report, time_domain))
    })
    .map_err(Failure::from)??;

    let doc = TestDocument {
        schema_version: SCHEMA_VERSION,
        library_version: fwnoise::VERSION,
        input: a.input.clone(),
        seed: None,
        grid_size: x.grid().len(),
        sample_len: x.len(),
        report,
        time_domain,
    };
    io::write_json(a.output.as_deref(), &doc)?;
    Ok(())
}

fn model_from(m: &ModelArgs) -> Model {
    let kernel = match m.kernel {
        Kernel::Gaussian => KernelKind::Gaussian,
        Kernel::Wiener => KernelKind::Wiener,
    };
    let innovation = match m.innovation {
        InnovationKind::Bm => Innovation::BrownianMotion,
        InnovationKind::Bb => Innovation::BrownianBridge,
    };
    match m.model {
        ModelKind::IidBm => Model::IidBm,
        ModelKind::IidBb => Model::IidBb,
        ModelKind::Farch1 => Model::Farch1 {
            c_psi: m.c_psi,
            burn_in: m.burn_in,
        },
        ModelKind::Far1 => Model::Far1 {
            kernel,
            hs_norm: m.hs_norm,
            innovation,
            burn_in: m.burn_in,
        },
    }
}

fn sidecar_path(csv: &std::path::Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn run_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let spec = DgpSpec::new(model_from(&a.model), a.grid_size, a.length, a.seed)?;
    let x = simulate::simulate(&spec)?;
    io::write_sample(&a.output, &x)?;
    let doc = SimulationDocument {
        schema_version: SCHEMA_VERSION,
        library_version: fwnoise::VERSION,
        rng: simulate::RNG_NAME,
        data: a.output.clone(),
        grid_size: a.grid_size,
        sample_len: a.length,
        seed: a.seed,
        spec: &spec,
    };
    io::write_json(Some(&sidecar_path(&a.output)), &doc)?;
    Ok(())
}

fn run_mc(a: &McArgs) -> Result<(), Failure> {
    let mode = match (a.mode, a.delta, a.target) {
        (McModeArg::Classical, None, None) => McMode::Classical,
        (McModeArg::Relevant, Some(delta), None) => McMode::Relevant { delta },
        (McModeArg::Similarity, Some(delta), None) => McMode::Similarity { delta },
        (McModeArg::Coverage, None, Some(target)) => McMode::Coverage { target },
        (McModeArg::Relevant | McModeArg::Similarity, None, _) => {
            return Err(Failure::Input(
                "--delta is required for the relevant and similarity modes".into(),
            ))
        }
        (McModeArg::Coverage, _, None) => {
            return Err(Failure::Input(
                "--target is required for coverage mode".into(),
            ))
        }
        _ => {
            return Err(Failure::Input(
                "--delta and --target do not apply to this mode".into(),
            ))
        }
    };
    let mut e = match a.preset {
        Some(Preset::Table1) => Experiment::table1(a.grid_size, a.reps, a.seed),
        Some(Preset::Table2) => Experiment::table2(a.grid_size, a.reps, a.seed),
        None => {
            let mut e = Experiment::new(
                model_from(&a.model),
                a.length.clone(),
                a.alpha.clone(),
                a.reps,
                mode,
                a.seed,
            );
            e.grid_size = a.grid_size;
            e
        }
    };
    e.mode = mode;
    e.threads = a.threads;
    let result = mc::run(&e)?;
    let doc = McDocument {
        schema_version: SCHEMA_VERSION,
        library_version: fwnoise::VERSION,
        result,
    };
    io::write_json(a.output.as_deref(), &doc)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Test(a) => run_test(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Mc(a) => run_mc(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fwnoise: {f}");
            ExitCode::from(f.code())
        }
    }
}
