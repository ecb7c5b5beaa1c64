//! Acceptance suite: one test per release criterion, each printing the
//! measured quantities it judges. Statistical criteria use fixed seeds, so
//! every run evaluates the identical Monte-Carlo estimate.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use bosonsim::circuit::{compose, reck_decompose, Circuit, Element};
use bosonsim::distributions::{
    bs_probability_raw, dist_probability_raw, full_space_probability, Source,
};
use bosonsim::experiments::{
    ensemble_unitary, haar_ensemble_curve, lr_haar_ensemble, nmin_haar_average, success_curve_at,
    ExperimentConfig,
};
use bosonsim::io::{curves_to_csv, ensemble_summary_to_csv, nmin_to_csv};
use bosonsim::matrix::{permanent, permanent_naive, ComplexMatrix};
use bosonsim::modes::{enumerate_no_collision, enumerate_occupations, no_collision_count, ModeConfig};
use bosonsim::unitary::haar_unitary;
use bosonsim::validators::{LrState, DEFAULT_K1, DEFAULT_K2};

fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::new(
        n,
        n,
        (0..n * n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_01_permanent_matches_exhaustive_oracle() {
    let mut worst: f64 = 0.0;
    for case in 0..1000u64 {
        let n = 1 + (case as usize % 6);
        let a = random_matrix(n, 0x01_0000 + case);
        let fast = permanent(&a).unwrap();
        let naive = permanent_naive(&a).unwrap();
        let rel = (fast - naive).norm() / naive.norm().max(1e-12);
        worst = worst.max(rel);
        assert!(
            rel <= 1e-10,
            "case {case} (n={n}): relative error {rel:.3e}"
        );
    }
    println!("criterion 01 PASS: worst relative error {worst:.3e} over 1000 matrices (n <= 6)");
}

#[test]
fn criterion_02_full_space_distributions_normalize() {
    for (photons, modes) in [(2usize, 4usize), (3, 5), (3, 6)] {
        let u = haar_unitary(modes, 0x02_0000 + modes as u64).unwrap();
        let start = (modes - photons) / 2;
        let s = ModeConfig::new((start..start + photons).collect(), modes).unwrap();
        let patterns = enumerate_occupations(modes, photons).unwrap();
        for source in [Source::Indistinguishable, Source::Distinguishable] {
            let total: f64 = patterns
                .iter()
                .map(|mu| full_space_probability(&u, &s, mu, source).unwrap())
                .sum();
            assert!(
                (total - 1.0).abs() <= 1e-10,
                "(n={photons}, m={modes}, {source}): total {total:.15}"
            );
            println!(
                "criterion 02 PASS: (n={photons}, m={modes}, {source}) sums to 1 {:+.2e}",
                total - 1.0
            );
        }
    }
}

#[test]
fn criterion_03_no_collision_support_sizes() {
    for (modes, expected) in [(5usize, 10usize), (7, 35), (9, 84)] {
        let support = enumerate_no_collision(modes, 3).unwrap();
        assert_eq!(support.len(), expected, "m={modes}");
        assert_eq!(no_collision_count(modes, 3), expected as u64, "m={modes}");
        println!("criterion 03 PASS: (n=3, m={modes}) has exactly {expected} no-collision outputs");
    }
}

#[test]
fn criterion_04_hong_ou_mandel_dip() {
    let coupler = Circuit::new(
        2,
        vec![Element::Coupler {
            modes: (0, 1),
            tau: 0.5,
        }],
    )
    .unwrap();
    let u = compose(&coupler).unwrap();
    let s = ModeConfig::new(vec![0, 1], 2).unwrap();
    let p = bs_probability_raw(&u, &s, &s).unwrap();
    let q = dist_probability_raw(&u, &s, &s).unwrap();
    assert!(p <= 1e-12, "indistinguishable coincidence {p:.3e}");
    assert!((q - 0.5).abs() <= 1e-12, "distinguishable coincidence {q}");
    println!("criterion 04 PASS: coincidence probability {p:.2e} (bosons) vs {q} (distinguishable)");
}

#[test]
fn criterion_05_converging_unitary_fractions() {
    // 200 Haar unitaries per register size, 1000 data sets of 5000 events
    // each; a unitary converges when at least 95% of its data sets get the
    // boson-sampler majority verdict.
    for (modes, expected) in [(5usize, 0.434f64), (7, 0.573), (9, 0.822)] {
        let mut cfg = ExperimentConfig::new(3, modes);
        cfg.set_sizes = vec![5000];
        cfg.trials_per_point = 1000;
        cfg.unitary_count = 200;
        cfg.exclusion_cap = 5000;
        cfg.master_seed = 202;
        let s = cfg.input_config().unwrap();
        let mut converging = 0usize;
        for index in 0..cfg.unitary_count {
            let u = ensemble_unitary(&cfg, index).unwrap();
            let curve = success_curve_at(&u, &s, Source::Indistinguishable, &cfg, index).unwrap();
            if curve.converging == Some(true) {
                converging += 1;
            }
        }
        let fraction = converging as f64 / cfg.unitary_count as f64;
        assert!(
            (fraction - expected).abs() <= 0.10,
            "m={modes}: converging fraction {fraction:.3}, expected {expected} +- 0.10"
        );
        println!(
            "criterion 05 PASS: m={modes} converging fraction {fraction:.3} (expected {expected} +- 0.10)"
        );
    }
}

#[test]
fn criterion_06_row_norm_success_at_modest_set_size() {
    let mut cfg = ExperimentConfig::new(3, 9);
    cfg.set_sizes = vec![500];
    cfg.trials_per_point = 400;
    cfg.unitary_count = 50;
    cfg.master_seed = 11;
    let ensemble = haar_ensemble_curve(&cfg).unwrap();
    let bs = ensemble.bs_points[0].mean;
    let uniform = ensemble.uniform_points[0].mean;
    assert!(
        bs >= 0.95,
        "boson-sampler success {bs:.4} at 500 events (averaged over {} converging unitaries)",
        ensemble.converging_count
    );
    assert!(
        uniform <= 0.05,
        "uniform data mislabeled boson-sampler at rate {uniform:.4}"
    );
    println!(
        "criterion 06 PASS: (3,9) at 500 events: success {bs:.4}, uniform mislabeled {uniform:.4} \
         ({} of {} unitaries converging)",
        ensemble.converging_count, ensemble.unitary_count
    );
}

#[test]
fn criterion_07_nmin_nonincreasing_in_mode_count() {
    let mut means = Vec::new();
    for modes in [7usize, 9, 12] {
        let mut cfg = ExperimentConfig::new(3, modes);
        cfg.trials_per_point = 200;
        cfg.unitary_count = 50;
        cfg.master_seed = 13;
        let study = nmin_haar_average(&cfg).unwrap();
        let mean = study
            .mean_n_min
            .expect("some unitaries should reach both criteria");
        println!(
            "criterion 07: m={modes} mean N_min {mean:.1} over {} of {} unitaries",
            study.reached_count, cfg.unitary_count
        );
        means.push(mean);
    }
    assert!(
        means[0] >= means[1] && means[1] >= means[2],
        "mean N_min not nonincreasing: {means:?}"
    );
    println!(
        "criterion 07 PASS: mean N_min {:.1} >= {:.1} >= {:.1} across m = 7, 9, 12",
        means[0], means[1], means[2]
    );
}

#[test]
fn criterion_08_large_instance_convergence() {
    let mut cfg = ExperimentConfig::new(5, 25);
    cfg.set_sizes = vec![1000];
    cfg.trials_per_point = 200;
    cfg.unitary_count = 20;
    cfg.exclusion_cap = 1000;
    cfg.master_seed = 17;
    let s = cfg.input_config().unwrap();
    let mut converged = 0usize;
    for index in 0..cfg.unitary_count {
        let u = ensemble_unitary(&cfg, index).unwrap();
        let curve = success_curve_at(&u, &s, Source::Indistinguishable, &cfg, index).unwrap();
        if curve.converging == Some(true) {
            converged += 1;
        }
    }
    let fraction = converged as f64 / cfg.unitary_count as f64;
    assert!(
        fraction >= 0.80,
        "only {converged} of {} unitaries at (5,25) reach 95% success by 1000 events",
        cfg.unitary_count
    );
    println!(
        "criterion 08 PASS: {converged} of {} unitaries at (5,25) reach 95% success by 1000 events",
        cfg.unitary_count
    );
}

#[test]
fn criterion_09_likelihood_ratio_discrimination() {
    let mut cfg = ExperimentConfig::new(3, 7);
    cfg.set_sizes = vec![200];
    cfg.trials_per_point = 500;
    cfg.unitary_count = 20;
    cfg.master_seed = 19;
    let ensembles = lr_haar_ensemble(&cfg).unwrap();
    let pooled = |pick: fn(&bosonsim::experiments::LrCurves) -> u64| -> f64 {
        let successes: u64 = ensembles.iter().map(pick).sum();
        successes as f64 / (cfg.trials_per_point * cfg.unitary_count) as f64
    };
    let ind = pooled(|c| c.indistinguishable.points[0].successes);
    let dis = pooled(|c| c.distinguishable.points[0].successes);
    assert!(ind >= 0.95, "indistinguishable data: D > 0 rate {ind:.4}");
    assert!(dis <= 0.05, "distinguishable data: D > 0 rate {dis:.4}");
    println!(
        "criterion 09 PASS: at (3,7), 200 events: D > 0 for {ind:.4} of boson data \
         and {dis:.4} of distinguishable data"
    );
}

#[test]
fn criterion_10_likelihood_ratio_reciprocal_antisymmetry() {
    // 1000 random streams of 100 probability pairs each: running the test
    // with the models swapped must negate the counter exactly, event by
    // event.
    let mut rng = ChaCha8Rng::seed_from_u64(0x10_0000);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let mut forward = LrState::new(DEFAULT_K1, DEFAULT_K2).unwrap();
        let mut swapped = LrState::new(DEFAULT_K1, DEFAULT_K2).unwrap();
        for _ in 0..100 {
            let gp: f64 = StandardNormal.sample(&mut rng);
            let gq: f64 = StandardNormal.sample(&mut rng);
            let p = (4.0 * gp).exp();
            let q = (4.0 * gq).exp();
            let a = forward.update(p, q).unwrap();
            let b = swapped.update(q, p).unwrap();
            assert_eq!(a.value(), -b.value(), "p={p:e}, q={q:e}");
            checked += 1;
        }
        assert_eq!(forward.d(), -swapped.d());
    }
    println!("criterion 10 PASS: D negated exactly under model swap for {checked} random ratios");
}

#[test]
fn criterion_11_mesh_decomposition_roundtrip() {
    let mut worst: f64 = 0.0;
    for case in 0..100u64 {
        let modes = 3 + (case as usize % 6);
        let u = haar_unitary(modes, 0x11_0000 + case).unwrap();
        let mesh = reck_decompose(&u).unwrap();
        let recomposed = compose(&mesh).unwrap();
        let residual = recomposed.matrix().max_abs_diff(u.matrix()).unwrap();
        worst = worst.max(residual);
        assert!(
            residual <= 1e-10,
            "case {case} (m={modes}): residual {residual:.3e}"
        );
    }
    println!("criterion 11 PASS: worst recomposition residual {worst:.3e} over 100 Haar unitaries");
}

#[test]
fn criterion_12_reproducible_result_files() {
    let mut cfg = ExperimentConfig::new(3, 5);
    cfg.set_sizes = vec![1, 10, 50];
    cfg.trials_per_point = 100;
    cfg.unitary_count = 4;
    cfg.exclusion_cap = 50;
    cfg.success_threshold = 0.5;
    cfg.master_seed = 23;

    let run_all = || {
        let ensemble = haar_ensemble_curve(&cfg).unwrap();
        let bs_csv = curves_to_csv(ensemble.members.iter().map(|m| &m.bs_curve));
        let uniform_csv = curves_to_csv(ensemble.members.iter().map(|m| &m.uniform_curve));
        let summary_csv = ensemble_summary_to_csv(&ensemble);
        let nmin_csv = nmin_to_csv(&nmin_haar_average(&cfg).unwrap());
        let lr = lr_haar_ensemble(&cfg).unwrap();
        let lr_csv = curves_to_csv(
            lr.iter()
                .flat_map(|c| [&c.indistinguishable, &c.distinguishable]),
        );
        [bs_csv, uniform_csv, summary_csv, nmin_csv, lr_csv]
    };

    let baseline = run_all();
    assert_eq!(baseline, run_all(), "rerun changed result bytes");
    for threads in [1usize, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let result = pool.install(run_all);
        assert_eq!(result, baseline, "thread count {threads} changed result bytes");
    }
    println!(
        "criterion 12 PASS: {} result files byte-identical across reruns and 1/8-thread pools",
        baseline.len()
    );
}
