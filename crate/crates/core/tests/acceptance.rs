//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::Instant;

use multiplier_lab::bumps::check_bumps;
use multiplier_lab::cli::random_field;
use multiplier_lab::conditions::{classical_marcinkiewicz_a, product_sobolev_k, ConditionOptions, IndexBox, WindowGrid};
use multiplier_lab::experiments::comparison::comparison_suite;
use multiplier_lab::experiments::domination::{default_rho, domination_ratio};
use multiplier_lab::experiments::sharpness::dyadic_ladder;
use multiplier_lab::experiments::{
    check_1d_identity, check_1d_laplacian, keystone_check, one_sidedness, sharpness_scan, Example51, Status,
};
use multiplier_lab::grid::{forward_transform, lebesgue_norm, Field, GridSpec};
use multiplier_lab::operators::{apply_multiplier, SmoothnessSpec};
use multiplier_lab::quad::GaussLegendre;
use multiplier_lab::symbol::{named, sample, Dilated, FnSymbol, Identity, Symbol};
use multiplier_lab::Complex64;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn gaussian(spec: GridSpec, width: f64) -> Field {
    Field::from_fn(spec, |x| Complex64::new((-PI * x.iter().map(|a| a * a).sum::<f64>() / (width * width)).exp(), 0.0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn bump_suite() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for spec in [GridSpec::new(1, 4096, 64.0), GridSpec::new(2, 256, 32.0), GridSpec::new(3, 64, 16.0)] {
        let c = check_bumps(&spec.unwrap());
        worst.0 = worst.0.max(c.partition_residual).max(c.radial_partition_residual);
        worst.1 = worst.1.max(c.theta_plateau_residual);
        worst.2 = worst.2.max(c.theta_leak);
        ok &= c.passes(1e-12);
    }
    ok &= worst.0 <= 1e-12 && worst.1 <= 1e-12 && worst.2 == 0.0;
    (ok, format!("partition {:.1e}, plateau {:.1e}, leak outside [1/4,4] {:.1e}", worst.0, worst.1, worst.2))
}

fn transform_fidelity() -> Outcome {
    let spec = GridSpec::new(2, 128, 16.0).unwrap();
    let f = gaussian(spec, 1.0);
    let s = forward_transform(&f);
    let mut xi = [0.0; 2];
    let mut err: f64 = 0.0;
    for (k, v) in s.values().iter().enumerate() {
        spec.frequency(k, &mut xi);
        err = err.max((v - (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp()).norm());
    }
    let g = random_field(spec, 11);
    let parseval = rel(s.l2_norm(), lebesgue_norm(&f, 2.0).unwrap()).max(rel(
        forward_transform(&g).l2_norm(),
        lebesgue_norm(&g, 2.0).unwrap(),
    ));
    let id = apply_multiplier(&sample(&Identity { dim: 2 }, spec), &g).unwrap();
    let ident = id.max_abs_diff(&g) / g.max_abs();
    let ok = err < 1e-8 && parseval <= 1e-12 && ident <= 1e-12;
    (ok, format!("gaussian {err:.1e}, parseval {parseval:.1e}, T_1 {ident:.1e}"))
}

fn domination_suite() -> Outcome {
    let start = Instant::now();
    let smooth = SmoothnessSpec::new(2.0, vec![0.8, 0.8]).unwrap();
    let rho = default_rho(&smooth);
    let opts = ConditionOptions {
        window: WindowGrid::with_samples(256),
        ..Default::default()
    };
    let field = |seed: Option<u64>, spec: GridSpec| match seed {
        None => gaussian(spec, 1.0),
        Some(s) => random_field(spec, s),
    };
    let cases: [(&str, Option<u64>, [i32; 2]); 6] = [
        ("identity", None, [0, 0]),
        ("identity", Some(1), [1, -1]),
        ("mikhlin:b=1", None, [0, 0]),
        ("mikhlin:b=2", Some(2), [0, 1]),
        ("shift:h=0.5", None, [-1, 0]),
        ("mikhlin:b=1", Some(3), [1, 1]),
    ];
    let mut ok = true;
    let mut worst: f64 = 1.0;
    for (name, seed, j) in cases {
        let sigma = named(name, 2).unwrap();
        let k = product_sobolev_k(sigma.as_ref(), &smooth, &opts).unwrap().value;
        let mut ratios = Vec::new();
        for n in [128, 256] {
            let spec = GridSpec::new(2, n, 16.0).unwrap();
            ratios.push(domination_ratio(sigma.as_ref(), &field(seed, spec), &j, rho, k).unwrap());
        }
        let change = ratios[1].max(ratios[0]) / ratios[1].min(ratios[0]);
        ok &= ratios.iter().all(|r| r.is_finite() && *r > 0.0) && change <= 2.0;
        worst = worst.max(change);
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= 60.0;
    (ok, format!("6 cases, worst N=128->256 change x{worst:.3}, {secs:.1}s"))
}

fn dilation_lemmas() -> Outcome {
    let lorentzian = |spec: GridSpec| Field::from_fn(spec, |x| Complex64::new(1.0 / (1.0 + x[0] * x[0]), 0.0));
    let ks_id: Vec<i32> = (-4..=4).collect();
    let ks_lap: Vec<i32> = (0..=6).collect();
    let id_grid = GridSpec::new(1, 32768, 128.0).unwrap();
    let lap_grid = GridSpec::new(1, 16384, 1024.0).unwrap();
    let mut ok = true;
    let mut flat: f64 = 0.0;
    let mut detail = Vec::new();
    for (label, f_id, f_lap) in [
        ("gaussian", gaussian(id_grid, 1.0), gaussian(lap_grid, 1.0)),
        ("lorentzian", lorentzian(id_grid), lorentzian(lap_grid)),
    ] {
        let id = check_1d_identity(&f_id, 0.6, 2.0, &ks_id).unwrap();
        let lap = check_1d_laplacian(&f_lap, 0.75, 2.0, &ks_lap).unwrap();
        ok &= id.verdict.status == Status::Pass && lap.verdict.status == Status::Pass;
        flat = flat.max(id.ratios.last().unwrap() / id.ratios[0]);
        detail.push(format!(
            "{label} raw exponent {:.4} vs {:.4}, normalized slope {:.4}",
            lap.params["raw_exponent"].as_f64().unwrap(),
            lap.params["derived_exponent"].as_f64().unwrap(),
            lap.params["normalized_slope"].as_f64().unwrap()
        ));
    }
    (ok, format!("identity last/first <= {flat:.3}; {}", detail.join("; ")))
}

fn comparison() -> Outcome {
    let smooth = SmoothnessSpec::new(2.0, vec![0.6, 0.6]).unwrap();
    let symbols: Vec<Arc<dyn Symbol>> = ["identity", "mikhlin:b=1", "mikhlin:b=2", "shift:h=0.5"]
        .iter()
        .map(|s| named(s, 2).unwrap())
        .collect();
    let suite = comparison_suite(&symbols, &smooth, &[128, 256], None).unwrap();
    let one = one_sidedness(0.3, 1.0, 0.0, 2.0, &[16, 32, 64, 128, 256], WindowGrid::with_samples(1024)).unwrap();
    let ok = suite.verdict.status == Status::Pass && one.verdict.status == Status::Pass;
    (
        ok,
        format!(
            "fitted constants {:?}; one-sided slope {:.3} vs {:.3}, bounded slope {:.3}",
            suite.ratios.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
            one.params["excess_slope"].as_f64().unwrap(),
            0.7,
            one.params["bounded_slope"].as_f64().unwrap()
        ),
    )
}

fn keystone() -> Outcome {
    let grid = GridSpec::new(1, 512, 8.0).unwrap();
    let shells = [9.0, 20.0, 3f64.exp(), 100.0, 1000.0];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.3, 0.75), (0.15, 0.6), (0.4, 0.9)] {
        let res = keystone_check(&Example51::new(a, b, 2).unwrap(), grid, &shells, 1e-6).unwrap();
        ok &= res.verdict.status == Status::Pass;
        worst = worst.max(res.ratios.iter().copied().fold(0.0, f64::max));
    }
    (ok, format!("worst interior relative error {worst:.2e}"))
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let radii = dyadic_ladder(4, 18);
    let p = 4.0 / 3.0;
    let runs = [
        (sharpness_scan(0.15, p, 0.6, &radii, 2).unwrap(), Status::Diverges),
        (sharpness_scan(0.4, p, 0.6, &radii, 2).unwrap(), Status::Converges),
        (sharpness_scan(0.25, p, 0.9, &radii, 2).unwrap(), Status::Converges),
    ];
    let secs = start.elapsed().as_secs_f64();
    let ok = runs.iter().all(|(r, want)| r.verdict.status == *want) && secs <= 120.0;
    let rate_dev = runs[0].0.ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let got: Vec<String> = runs.iter().map(|(r, _)| r.verdict.status.to_string()).collect();
    (ok, format!("verdicts {}, worst rate deviation {rate_dev:.3}, {secs:.1}s", got.join("/")))
}

fn condition_functionals() -> Outcome {
    // separability of K for σ ≡ 1
    let window = WindowGrid::with_samples(128);
    let opts = ConditionOptions {
        window,
        index_box: Some(IndexBox::cube(2, -1, 1)),
        ..Default::default()
    };
    let opts1 = ConditionOptions {
        window,
        index_box: Some(IndexBox::cube(1, 0, 0)),
        ..Default::default()
    };
    let r = 3.0;
    let k2 = product_sobolev_k(&Identity { dim: 2 }, &SmoothnessSpec::new(r, vec![0.6, 0.9]).unwrap(), &opts).unwrap().value;
    let ka = product_sobolev_k(&Identity { dim: 1 }, &SmoothnessSpec::new(r, vec![0.6]).unwrap(), &opts1).unwrap().value;
    let kb = product_sobolev_k(&Identity { dim: 1 }, &SmoothnessSpec::new(r, vec![0.9]).unwrap(), &opts1).unwrap().value;
    let sep = rel(k2, ka * kb);

    // dilation covariance on overlapping index ranges
    let base: Arc<dyn Symbol> = Arc::new(Example51::new(0.3, 0.75, 2).unwrap());
    let shift = vec![1, 2];
    let dilated = Dilated { inner: base.clone(), shift: shift.clone() };
    let smooth = SmoothnessSpec::new(2.0, vec![0.6, 0.6]).unwrap();
    let wide = ConditionOptions {
        window,
        index_box: Some(IndexBox::new(vec![-1, 1], vec![2, 6]).unwrap()),
        ..Default::default()
    };
    let a = product_sobolev_k(base.as_ref(), &smooth, &wide).unwrap();
    let b = product_sobolev_k(&dilated, &smooth, &wide).unwrap();
    let mut overlap = 0;
    let mut dil: f64 = 0.0;
    for iv in &b.per_index {
        let moved: Vec<i32> = iv.index.iter().zip(&shift).map(|(j, m)| j + m).collect();
        if let Some(v) = a.value_at(&moved) {
            overlap += 1;
            dil = dil.max((v - iv.value).abs());
        }
    }

    // classical A against quadrature of the exact derivative
    let q = GaussLegendre::new(32);
    let mut a_err: f64 = 0.0;
    type Case = (&'static str, fn(f64) -> f64, fn(f64) -> f64);
    let cases: [Case; 2] = [
        ("gauss", |x| (-x * x).exp(), |x| -2.0 * x * (-x * x).exp()),
        ("wave", |x| (5.0 * x).sin() / (1.0 + x * x), |x| {
            5.0 * (5.0 * x).cos() / (1.0 + x * x) - 2.0 * x * (5.0 * x).sin() / (1.0 + x * x).powi(2)
        }),
    ];
    for (label, f, df) in cases {
        let sigma = FnSymbol::new(1, label, move |xi: &[f64]| Complex64::new(f(xi[0]), 0.0));
        let boxed = IndexBox::cube(1, -4, 4);
        let numeric = classical_marcinkiewicz_a(&sigma, None, &boxed, 512).unwrap().value;
        let oracle = (-4..=4)
            .map(|j| {
                let (lo, hi) = (2f64.powi(j), 2f64.powi(j + 1));
                let breaks: Vec<f64> = (0..=512).map(|i| lo + (hi - lo) * i as f64 / 512.0).collect();
                2.0 * q.integrate_pieces(&breaks, |x| df(x).abs())
            })
            .fold(0.0, f64::max);
        a_err = a_err.max(rel(numeric, oracle));
    }
    let ok = sep <= 1e-8 && overlap > 0 && dil == 0.0 && a_err <= 0.01;
    (
        ok,
        format!("separability {sep:.1e}, dilation max diff {dil:.1e} on {overlap} indices, A vs quadrature {a_err:.1e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 8] = [
        &["bump-check", "--grid", "2,64,8"],
        &["condition", "--functional", "K", "--sigma", "mikhlin:b=1", "--gamma", "0.8,0.8", "--window", "64"],
        &["condition", "--functional", "A", "--sigma", "mikhlin:b=1", "--grid", "2,8,8", "--k", "-1:1"],
        &["verify", "lemma21", "--sigma", "identity", "--gamma", "0.8,0.8", "--grid", "2,64,16", "--field", "random", "--seed", "3", "--window", "64"],
        &["verify", "identity", "--grid", "1,4096,128", "--k", "-2:2"],
        &["example", "keystone"],
        &["example", "sharpness", "--alpha", "0.4", "--p", "1.3333333333333333", "--beta", "0.6", "--radii", "16:256"],
        &["example", "membership", "--beta", "0.75", "--format", "csv"],
    ];
    let exe = env!("CARGO_BIN_EXE_mlab");
    let mut ok = true;
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("run{i}-{rep}.out"));
            let status = Command::new(exe)
                .args(*args)
                .arg("--out")
                .arg(&path)
                .stderr(Stdio::null())
                .status()
                .unwrap();
            ok &= status.code().is_some_and(|c| c <= 1);
            outputs.push(std::fs::read(&path).unwrap_or_default());
        }
        ok &= !outputs[0].is_empty() && outputs[0] == outputs[1];
    }
    (ok, format!("{} invocations rerun byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("bump suite", bump_suite),
        ("transform fidelity", transform_fidelity),
        ("pointwise domination", domination_suite),
        ("dilation lemmas", dilation_lemmas),
        ("product versus isotropic smoothness", comparison),
        ("closed-form keystone", keystone),
        ("sharpness scans", sharpness),
        ("condition functionals", condition_functionals),
        ("CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {}: {} {label}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
