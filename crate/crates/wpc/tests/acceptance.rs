//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.
//!
//! Every Monte Carlo check uses experiment seed 1.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use wpc_core::bootstrap::MarginSpec;
use wpc_core::rng::{derive_seed, stream, StreamRng};
use wpc_core::sim::{run_experiment, run_trial, ExperimentConfig, SimModel, SimSpec, SweepParam};
use wpc_core::wpc::default_half_width;
use wpc_core::{
    knn_fit, m_kernel, normal_cdf, pseudo_observations, statistic, statistic_bruteforce,
    ConditionalMargin, Dataset, KernelSpec, Margin, PseudoObs, TestConfig, TieBreak,
};

const SEED: u64 = 1;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn gauss(rng: &mut StreamRng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

fn lr() -> TestConfig {
    TestConfig {
        margin: MarginSpec::Lr,
        ..Default::default()
    }
}

fn rejection_freq(
    model: SimModel,
    n: usize,
    d: usize,
    a: f64,
    trials: usize,
    test: TestConfig,
) -> f64 {
    let spec = SimSpec::new(model, n, d, a, 0.0, SEED).unwrap();
    let cfg = ExperimentConfig {
        trials,
        test,
        ..Default::default()
    };
    run_experiment(&spec, SweepParam::A, &[a], &cfg)
        .unwrap()
        .cells[0]
        .rejection_freq
}

fn closed_form_vs_quadrature() -> Verdict {
    let kernel = KernelSpec::default();
    let mut sizes = stream(SEED, 0);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = sizes.random_range(20..=60);
        let mut rng = stream(SEED, 1 + case);
        let x: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
        let data = Dataset::new(x, 1, vec![0.0; n], vec![0.0; n]).unwrap();
        let u1: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let u2: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let pobs = PseudoObs::from_columns(&u1, &u2).unwrap();
        let exact = statistic(&data, &pobs, &kernel).unwrap();
        let brute = statistic_bruteforce(
            &data,
            &pobs,
            &kernel,
            128,
            default_half_width(&data, &kernel),
        )
        .unwrap();
        worst = worst.max((exact - brute).abs() / brute);
    }
    verdict(
        worst <= 1e-2,
        format!("max relative error {worst:.2e} over 20 datasets (bound 1e-2)"),
    )
}

fn m_spot_values() -> Verdict {
    let checks = [
        ([0.0, 0.0], [0.0, 0.0], 11.0 / 18.0),
        ([1.0, 1.0], [1.0, 1.0], 1.0 / 9.0),
        ([0.0, 0.0], [1.0, 1.0], -5.0 / 36.0),
    ];
    let worst = checks
        .iter()
        .map(|&(u, v, want)| (m_kernel(u, v) - want).abs())
        .fold(0.0, f64::max);
    verdict(
        worst <= 1e-15,
        format!("max deviation {worst:.1e} from 11/18, 1/9, -5/36"),
    )
}

/// Composite Simpson rule over `[-h, h]` with `2m` panels.
fn simpson(f: impl Fn(f64) -> f64, h: f64, m: usize) -> f64 {
    let step = h / m as f64;
    let mut acc = f(-h) + f(h);
    for i in 1..2 * m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(-h + i as f64 * step);
    }
    acc * step / 3.0
}

fn w_star_vs_convolution() -> Verdict {
    let kernel = KernelSpec::default();
    let h = 12.0;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let delta = -3.0 + 6.0 * i as f64 / 19.0;
        let quad = simpson(|t| kernel.w(&[t]) * kernel.w(&[t + delta]), h, 1200);
        worst = worst.max((quad - kernel.w_star(&[delta])).abs());
        let delta2 = [delta, 1.5 - 0.15 * i as f64];
        let quad = simpson(
            |t1| {
                simpson(
                    |t2| kernel.w(&[t1, t2]) * kernel.w(&[t1 + delta2[0], t2 + delta2[1]]),
                    h,
                    300,
                )
            },
            h,
            300,
        );
        worst = worst.max((quad - kernel.w_star(&delta2)).abs());
    }
    verdict(
        worst <= 1e-6,
        format!("max absolute error {worst:.1e} on 20 deltas, d = 1 and 2"),
    )
}

fn level_calibration() -> Verdict {
    let lr_freq = rejection_freq(SimModel::Linear, 500, 1, 0.0, 200, lr());
    let knn_freq = rejection_freq(SimModel::Linear, 500, 1, 0.0, 200, TestConfig::default());
    verdict(
        (0.02..=0.10).contains(&lr_freq) && (0.01..=0.11).contains(&knn_freq),
        format!("LR {lr_freq:.3} (band [0.02, 0.10]), k-NN {knn_freq:.3} (band [0.01, 0.11]), 200 trials"),
    )
}

fn level_in_dimension() -> Verdict {
    let freqs: Vec<f64> = [1, 3, 5]
        .iter()
        .map(|&d| rejection_freq(SimModel::Linear, 500, d, 0.0, 100, lr()))
        .collect();
    verdict(
        freqs.iter().all(|&f| f <= 0.12),
        format!("LR margins, d = 1, 3, 5: {freqs:.3?} (bound 0.12), 100 trials each"),
    )
}

fn power_monotonicity() -> Verdict {
    let spec = SimSpec::new(SimModel::Linear, 1000, 1, 0.0, 0.0, SEED).unwrap();
    let cfg = ExperimentConfig {
        trials: 100,
        test: lr(),
        ..Default::default()
    };
    let report = run_experiment(&spec, SweepParam::A, &[0.0, 0.15, 0.3], &cfg).unwrap();
    let f: Vec<f64> = report.cells.iter().map(|c| c.rejection_freq).collect();
    let monotone = f.windows(2).all(|w| w[1] >= w[0] - 0.07);
    verdict(
        monotone && f[2] >= 0.5,
        format!("LR margins, a = 0, 0.15, 0.3: {f:.3?} (nondecreasing within 0.07, last >= 0.5)"),
    )
}

fn post_nonlinear_power() -> Verdict {
    let freq = rejection_freq(
        SimModel::PostNonlinear,
        1000,
        1,
        0.5,
        100,
        TestConfig::default(),
    );
    verdict(
        freq >= 0.9,
        format!("k-NN margins, a = 0.5, n = 1000: {freq:.3} (bound 0.9), 100 trials"),
    )
}

/// Sup over a 50 x 50 grid of `|F̂(y|x) − Φ(y − x)|`, `X ~ U[0, 1]`.
fn knn_sup_error(n: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, n as u64);
    let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let y: Vec<f64> = x.iter().map(|&x| x + gauss(&mut rng)).collect();
    let data = Dataset::new(x, 1, y, vec![0.0; n]).unwrap();
    let k = (n as f64).powf(2.0 / 3.0).ceil() as usize;
    let model = knn_fit(&data, Margin::First, k).unwrap();
    let mut sup: f64 = 0.0;
    for i in 0..50 {
        let xq = i as f64 / 49.0;
        for j in 0..50 {
            let yq = -2.5 + 6.0 * j as f64 / 49.0;
            sup = sup.max((model.cdf(yq, &[xq]) - normal_cdf(yq - xq)).abs());
        }
    }
    sup
}

fn knn_error_decay() -> Verdict {
    let mean = |n| {
        (0..20)
            .map(|s| knn_sup_error(n, derive_seed(SEED, s)))
            .sum::<f64>()
            / 20.0
    };
    let (small, large) = (mean(500), mean(8000));
    verdict(
        large <= 0.6 * small,
        format!(
            "mean sup-error {small:.4} at n = 500, {large:.4} at n = 8000, ratio {:.3} (bound 0.6)",
            large / small
        ),
    )
}

/// Two-sample Kolmogorov–Smirnov distance.
fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn bootstrap_mimics_null() -> Verdict {
    let spec = SimSpec::new(SimModel::Linear, 500, 1, 0.0, 0.0, SEED).unwrap();
    let mut test = TestConfig::default();
    test.bootstrap.replicates = 1;
    let (mut observed, mut boot) = (Vec::new(), Vec::new());
    for trial in 0..300 {
        let outcome = run_trial(&spec, 0, trial, &test).unwrap();
        observed.push(outcome.statistic);
        boot.push(outcome.boot_stats[0]);
    }
    let d = ks_distance(&observed, &boot);
    verdict(d <= 0.15, format!("k-NN margins: KS distance {d:.3} between 300 null and 300 bootstrap statistics (bound 0.15)"))
}

fn rank_invariance() -> Verdict {
    let kernel = KernelSpec::default();
    let mut identical = 0;
    for case in 0..50 {
        let mut rng = stream(SEED, 100 + case);
        let n = rng.random_range(20..200);
        let x: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
        let y1: Vec<f64> = x.iter().map(|&x| x + gauss(&mut rng)).collect();
        let y2: Vec<f64> = x.iter().map(|&x| x * x + gauss(&mut rng)).collect();
        let data = Dataset::new(x, 1, y1, y2).unwrap();
        let k = rng.random_range(1..=n / 2);
        let m1 = knn_fit(&data, Margin::First, k).unwrap();
        let m2 = knn_fit(&data, Margin::Second, k).unwrap();
        let pobs = pseudo_observations(&data, &m1, &m2).unwrap();
        let u1: Vec<f64> = pobs.u_hat().iter().map(|u| u[0]).collect();
        let u2: Vec<f64> = pobs.u_hat().iter().map(|u| u[1]).collect();
        let e1: Vec<f64> = u1.iter().map(|u| u.exp()).collect();
        let e2: Vec<f64> = u2.iter().map(|u| u.exp()).collect();
        let mut same = true;
        for ties in [TieBreak::Max, TieBreak::Random(case)] {
            let before = PseudoObs::from_columns_with(&u1, &u2, ties).unwrap();
            let after = PseudoObs::from_columns_with(&e1, &e2, ties).unwrap();
            let (t0, t1) = (
                statistic(&data, &before, &kernel).unwrap(),
                statistic(&data, &after, &kernel).unwrap(),
            );
            same &= t0.to_bits() == t1.to_bits();
        }
        identical += usize::from(same);
    }
    verdict(
        identical == 50,
        format!("{identical}/50 datasets bit-identical after exp (both tie rules)"),
    )
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let input = dir.path().join("data.csv");
    let mut rng = stream(SEED, 7);
    let mut text = String::from("x1,x2,y1,y2\n");
    for _ in 0..300 {
        let (a, b) = (gauss(&mut rng), gauss(&mut rng));
        text.push_str(&format!(
            "{a},{b},{},{}\n",
            a + gauss(&mut rng),
            b - gauss(&mut rng)
        ));
    }
    std::fs::write(&input, text).unwrap();
    let input = input.to_str().unwrap();
    let invocations: [&[&str]; 3] = [
        &["test", "--input", input, "--seed", "42"],
        &[
            "sweep",
            "--model",
            "post_nonlinear",
            "--param",
            "a",
            "--values",
            "0,0.4",
            "--trials",
            "6",
            "--n",
            "200",
            "--B",
            "50",
            "--auc",
            "--seed",
            "42",
        ],
        &[
            "ci-matrix",
            "--input",
            input,
            "--B",
            "50",
            "--seed",
            "42",
            "--format",
            "csv",
        ],
    ];
    let mut mismatches = Vec::new();
    for args in invocations {
        let run = |threads: &str| {
            let out = Command::new(env!("CARGO_BIN_EXE_wpc"))
                .arg("--threads")
                .arg(threads)
                .args(args)
                .output()
                .expect("spawn wpc");
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let one = run("1");
        if one != run("1") || one != run("8") {
            mismatches.push(args[0]);
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("test, sweep, ci-matrix: stdout identical across runs and --threads 1 vs 8; mismatches {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "closed form matches brute-force quadrature",
            closed_form_vs_quadrature,
        ),
        ("M spot values", m_spot_values),
        (
            "Gaussian w* matches numerical convolution",
            w_star_vs_convolution,
        ),
        ("level calibration, linear model", level_calibration),
        ("level stability in d", level_in_dimension),
        ("power monotone in a", power_monotonicity),
        ("post-nonlinear power", post_nonlinear_power),
        ("k-NN uniform error decays", knn_error_decay),
        ("bootstrap mimics the null", bootstrap_mimics_null),
        ("rank invariance", rank_invariance),
        ("CLI determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name}: {} [{:.1}s]",
            v.detail,
            started.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
