use fwnoise::simulate::*;
use fwnoise::*;
use ndarray::{Array1, Array2, Axis};

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (m, s)
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let c = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() as f64 - 1.0);
    c / (sa * sb)
}

fn hs(m: &Array2<f64>) -> f64 {
    (m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64).sqrt()
}

#[test]
fn brownian_motion_variance_and_increments() {
    let grid = Grid::midpoint(50).unwrap();
    let mut rng = rng_for(11, 0);
    let paths: Vec<Array1<f64>> = (0..10_000)
        .map(|_| brownian_motion_path(&grid, &mut rng))
        .collect();
    let last: Vec<f64> = paths.iter().map(|p| p[49]).collect();
    let var = last.iter().map(|v| v * v).sum::<f64>() / last.len() as f64;
    let tau = grid.points()[49];
    assert!((var / tau - 1.0).abs() < 0.05, "var {var} vs {tau}");

    let inc_a: Vec<f64> = paths.iter().map(|p| p[10] - p[0]).collect();
    let inc_b: Vec<f64> = paths.iter().map(|p| p[40] - p[20]).collect();
    assert!(corr(&inc_a, &inc_b).abs() < 0.05);

    // covariance at two nodes is min(tau, sigma)
    let cov = paths.iter().map(|p| p[5] * p[30]).sum::<f64>() / paths.len() as f64;
    assert!((cov - grid.points()[5]).abs() < 0.02);
}

#[test]
fn brownian_bridge_moments() {
    let grid = Grid::midpoint(40).unwrap();
    let mut rng = rng_for(12, 3);
    let paths: Vec<Array1<f64>> = (0..10_000)
        .map(|_| brownian_bridge_path(&grid, &mut rng))
        .collect();
    for j in [0, 13, 20, 39] {
        let v: Vec<f64> = paths.iter().map(|p| p[j]).collect();
        let (m, s) = mean_sd(&v);
        assert!(m.abs() < 3.0 * s / (v.len() as f64).sqrt(), "mean at {j}");
        let tau = grid.points()[j];
        let var = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        assert!(
            (var / (tau * (1.0 - tau)) - 1.0).abs() < 0.06,
            "variance at {j}: {var}"
        );
    }
}

#[test]
fn far1_satisfies_yule_walker() {
    let g = 30;
    let grid = Grid::midpoint(g).unwrap();
    let kernel = far1_kernel(KernelKind::Wiener, &grid, 0.3).unwrap();
    let p = kernel.real_part() / g as f64;
    let mut r0 = Array2::<f64>::zeros((g, g));
    let mut r1 = Array2::<f64>::zeros((g, g));
    let reps = 20;
    for seed in 0..reps {
        let spec = DgpSpec::new(
            Model::far1(KernelKind::Wiener, Innovation::BrownianMotion),
            g,
            4096,
            seed,
        )
        .unwrap();
        let x = simulate(&spec).unwrap();
        r0 += &autocov_matrix(&x, 0, true).unwrap();
        r1 += &autocov_matrix(&x, 1, true).unwrap();
    }
    let predicted = p.dot(&r0);
    let rel = hs(&(&r1 - &predicted)) / hs(&predicted);
    assert!(rel < 0.10, "relative deviation {rel}");
}

#[test]
fn farch1_is_uncorrelated_but_dependent() {
    let g = 30;
    let t = 4096;
    let square_dependence = |x: &FunctionalSample| {
        let sq = FunctionalSample::from_rows(x.values().mapv(|v| v * v)).unwrap();
        hs(&autocov_matrix(&sq, 1, true).unwrap()) / hs(&autocov_matrix(&sq, 0, true).unwrap())
    };
    let farch = simulate(&DgpSpec::new(Model::farch1(), g, t, 5).unwrap()).unwrap();
    let iid = simulate(&DgpSpec::new(Model::IidBm, g, t, 5).unwrap()).unwrap();

    let r1 = hs(&autocov_matrix(&farch, 1, true).unwrap())
        / hs(&autocov_matrix(&farch, 0, true).unwrap());
    assert!(r1 < 0.05, "lag-1 correlation ratio {r1}");
    let dep = square_dependence(&farch);
    let base = square_dependence(&iid);
    assert!(
        dep > 0.05 && dep > 4.0 * base,
        "squares: farch {dep}, iid {base}"
    );
}

#[test]
fn far1_is_stationary_after_burn_in() {
    let reps = 200;
    let t = 256;
    let diffs: Vec<f64> = (0..reps)
        .map(|r| {
            let spec = DgpSpec::new(
                Model::far1(KernelKind::Gaussian, Innovation::BrownianMotion),
                20,
                t,
                77,
            )
            .unwrap();
            let x = simulate_stream(&spec, r).unwrap();
            let v = x.values();
            let a = v
                .slice(ndarray::s![..t / 2, ..])
                .mean_axis(Axis(0))
                .unwrap();
            let b = v
                .slice(ndarray::s![t / 2.., ..])
                .mean_axis(Axis(0))
                .unwrap();
            (a - b).mean().unwrap()
        })
        .collect();
    let (m, s) = mean_sd(&diffs);
    assert!(m.abs() < 3.0 * s / (reps as f64).sqrt(), "mean drift {m}");
}

#[test]
fn far1_never_diverges_over_a_million_curves() {
    for kind in [KernelKind::Gaussian, KernelKind::Wiener] {
        for (i, innovation) in [Innovation::BrownianMotion, Innovation::BrownianBridge]
            .into_iter()
            .enumerate()
        {
            let spec =
                DgpSpec::new(Model::far1(kind, innovation), 20, 250_000, 100 + i as u64).unwrap();
            let x = simulate(&spec).unwrap();
            assert!(x.values().iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn iid_kinds_ignore_burn_in_and_reproduce() {
    let spec = DgpSpec::new(
        Model::Farch1 {
            c_psi: 0.3418,
            burn_in: 0,
        },
        16,
        64,
        2,
    )
    .unwrap();
    let a = simulate(&spec).unwrap();
    let b = simulate(&spec).unwrap();
    assert_eq!(a.values(), b.values());
    assert_eq!(a.len(), 64);
    assert_eq!(a.grid().len(), 16);
}
