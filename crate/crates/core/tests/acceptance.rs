//! Acceptance gate: one test per exit criterion, each printing a single
//! pass/fail line. Budgets are asserted with wall-clock checks; numeric
//! claims run at the stated tolerances against independent oracles.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use remez_lab_core::certifier::suites::{
    run_classical_suite, run_cw_suite, run_negative_p_check, run_theorem1_suite, ClassicalSpec,
    NegativePSpec, SuiteSpec,
};
use remez_lab_core::certifier::tightness::tightness_exponential;
use remez_lab_core::certifier::{fit_empirical_constant, Verdict, VerdictCounts};
use remez_lab_core::measures::{
    quadrature_1d, Domain1D, MeasureKind, MeasureSpec, Points, SamplerPolicy, SetSpec,
};
use remez_lab_core::norms::{
    lp_norm, restricted_lp_norm, set_measure, EstimatorOptions, NormEstimate,
};
use remez_lab_core::poly::Polynomial;
use remez_lab_core::special::z_for_confidence;

fn criterion<F>(number: u32, name: &str, body: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    match std::panic::catch_unwind(body) {
        Ok(()) => eprintln!("criterion {number} ({name}): pass"),
        Err(cause) => {
            eprintln!("criterion {number} ({name}): FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

#[test]
fn criterion_1_monomial_tightness_is_exact() {
    criterion(1, "monomial tightness audit", || {
        let start = Instant::now();
        for d in 1u32..=10 {
            let mut fact = 1.0f64;
            for k in 1..=u64::from(d) {
                fact *= k as f64;
            }
            let stirling = (f64::from(d) / std::f64::consts::E).powi(d as i32);
            for eps in [0.1, 0.5, 1.0] {
                let t = tightness_exponential(d, eps, 4.0).unwrap();
                assert!(
                    (t.full_norm - fact).abs() <= 1e-9 * fact,
                    "d={d}: L1 norm {} vs {fact}",
                    t.full_norm
                );
                assert!(fact >= stirling, "d={d}: d! must dominate (d/e)^d");
                assert!(
                    t.restricted_integral <= t.epsilon_bound * (1.0 + 1e-12),
                    "d={d} eps={eps}: integral {} above cap {}",
                    t.restricted_integral,
                    t.epsilon_bound
                );
                let quad = quadrature_1d(
                    |x| x.powi(d as i32) * (-x).exp(),
                    Domain1D::Interval { lo: 0.0, hi: eps },
                    1e-14,
                    &[],
                )
                .unwrap();
                assert!(
                    (quad - t.restricted_integral).abs()
                        <= 1e-12 * t.restricted_integral.max(1e-300),
                    "d={d} eps={eps}: quadrature {} vs gamma route {}",
                    quad,
                    t.restricted_integral
                );
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 1.0, "tightness audit took {elapsed:.2} s");
    });
}

#[test]
fn criterion_2_restricted_norm_suite_holds_at_standard_scale() {
    criterion(2, "restricted-norm suite, 5 seeds", || {
        let start = Instant::now();
        let mut fitted = Vec::new();
        for seed in [11u64, 22, 33, 44, 55] {
            let spec = SuiteSpec { fixed_clock: true, ..SuiteSpec::default().with_seed(seed) };
            let reports = run_theorem1_suite(&spec).unwrap();
            assert_eq!(reports.len(), 3600, "standard grid is 144 cells x 25 polynomials");
            let counts = VerdictCounts::tally(&reports);
            assert_eq!(counts.violated, 0, "seed {seed}: violations at c = 4");
            let c_hat = fit_empirical_constant(&reports).unwrap();
            if c_hat > 4.0 {
                let retry = SuiteSpec { c: 2.0 * c_hat, ..spec.clone() };
                let again = run_theorem1_suite(&retry).unwrap();
                assert_eq!(
                    VerdictCounts::tally(&again).violated,
                    0,
                    "seed {seed}: violations persist at c = {}",
                    retry.c
                );
            }
            assert!(c_hat.is_finite() && c_hat <= 4.0, "seed {seed}: fitted constant {c_hat}");
            fitted.push(c_hat);
        }
        let lo = fitted.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = fitted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            hi <= 1.25 * lo,
            "fitted constants spread beyond 25%: {fitted:?}"
        );
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed <= 900.0, "suite took {elapsed:.1} s, budget 900 s");
    });
}

#[test]
fn criterion_3_levelset_suite_holds_and_is_exactly_monotone() {
    criterion(3, "level-set suite with threshold grid", || {
        let spec = SuiteSpec { fixed_clock: true, ..SuiteSpec::default().with_seed(77) };
        let reports = run_cw_suite(&spec).unwrap();
        assert_eq!(reports.len(), 28800, "3600 instances x 8 thresholds");
        let counts = VerdictCounts::tally(&reports);
        assert_eq!(counts.violated, 0, "violations at c = 4");

        let mut per_instance: HashMap<(usize, usize, u64, String, usize), Vec<(f64, f64)>> =
            HashMap::new();
        for r in &reports {
            let i = &r.instance;
            let key = (i.n, i.d, i.p.unwrap().to_bits(), i.body.clone(), i.poly_index);
            per_instance.entry(key).or_default().push((i.threshold.unwrap(), r.lhs.value));
        }
        assert_eq!(per_instance.len(), 3600);
        for (key, mut curve) in per_instance {
            curve.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert_eq!(curve.len(), 8);
            for pair in curve.windows(2) {
                assert!(
                    pair[0].1 <= pair[1].1,
                    "level-set estimate not monotone at {key:?}: {curve:?}"
                );
            }
        }
    });
}

#[test]
fn criterion_4_sup_norm_suite_within_the_classical_constant() {
    criterion(4, "sup-norm suite over subinterval unions", || {
        let start = Instant::now();
        let spec = ClassicalSpec { fixed_clock: true, ..ClassicalSpec::default().with_seed(99) };
        let reports = run_classical_suite(&spec).unwrap();
        assert_eq!(reports.len(), 800);
        let scalar = reports.iter().filter(|r| r.instance.suite == "sup_remez_scalar").count();
        let vector = reports.iter().filter(|r| r.instance.suite == "sup_remez_vector").count();
        let trig = reports.iter().filter(|r| r.instance.suite == "sup_remez_trig").count();
        assert_eq!((scalar, vector, trig), (500, 200, 100));
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.instance);
            assert!(r.margin >= 0.0, "sup ratio exceeds the bound: {:?}", r.instance);
            let lambda = r.mu_a.as_ref().expect("fraction recorded").value;
            assert!(lambda >= 0.2 - 1e-12, "fraction {lambda} below the floor");
        }
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed <= 120.0, "suite took {elapsed:.1} s, budget 120 s");
    });
}

fn se_of(est: &NormEstimate) -> f64 {
    est.radius / z_for_confidence(0.99)
}

#[test]
fn criterion_5_norm_oracles_match_the_monte_carlo_path() {
    criterion(5, "norm-engine closed-form oracles", || {
        let exact_opts = EstimatorOptions::default();
        let mc_opts = EstimatorOptions::default().monte_carlo_only();
        let t = Polynomial::univariate(&[0.0, 1.0]);
        let unit = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();

        let checks: [(&str, f64, NormEstimate, NormEstimate); 4] = [
            (
                "L1 of t on U[0,1]",
                0.5,
                lp_norm(&t, &unit, 1.0, &exact_opts, 1).unwrap(),
                lp_norm(&t, &unit, 1.0, &mc_opts, 1).unwrap(),
            ),
            (
                "restricted L1 of t on [1/2,1]",
                0.75,
                restricted_lp_norm(
                    &t,
                    &unit,
                    &SetSpec::Intervals { intervals: vec![(0.5, 1.0)] },
                    1.0,
                    &exact_opts,
                    2,
                )
                .unwrap(),
                restricted_lp_norm(
                    &t,
                    &unit,
                    &SetSpec::Intervals { intervals: vec![(0.5, 1.0)] },
                    1.0,
                    &mc_opts,
                    2,
                )
                .unwrap(),
            ),
            (
                "geometric mean of t on U[0,1]",
                (-1.0f64).exp(),
                lp_norm(&t, &unit, 0.0, &exact_opts, 3).unwrap(),
                lp_norm(&t, &unit, 0.0, &mc_opts, 3).unwrap(),
            ),
            (
                "L1 of t^3 against e^{-t}",
                6.0,
                lp_norm(
                    &Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0]),
                    &MeasureSpec::exponential_halfline().unwrap(),
                    1.0,
                    &exact_opts,
                    4,
                )
                .unwrap(),
                lp_norm(
                    &Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0]),
                    &MeasureSpec::exponential_halfline().unwrap(),
                    1.0,
                    &mc_opts,
                    4,
                )
                .unwrap(),
            ),
        ];
        for (name, oracle, exact, mc) in &checks {
            assert!(
                (exact.value - oracle).abs() <= 1e-9 * oracle.max(1e-12),
                "{name}: exact path {} vs oracle {oracle}",
                exact.value
            );
            let tolerance = 4.0 * se_of(mc) + 1e-9;
            assert!(
                (mc.value - oracle).abs() <= tolerance,
                "{name}: monte-carlo {} vs {oracle}, allowed {tolerance:.2e}",
                mc.value
            );
        }

        let sym = MeasureSpec::interval_uniform(-1.0, 1.0).unwrap();
        let sublevel =
            SetSpec::Sublevel { poly: Polynomial::univariate(&[0.0, 0.0, 1.0]), threshold: 0.25 };
        let exact = set_measure(&sym, &sublevel, &exact_opts, 5).unwrap();
        assert!((exact.value - 0.5).abs() <= 1e-9, "sublevel measure {}", exact.value);
        let mc = set_measure(&sym, &sublevel, &mc_opts, 5).unwrap();
        let se = mc.radius / z_for_confidence(0.99);
        assert!(
            (mc.value - 0.5).abs() <= 4.0 * se + 1e-9,
            "sublevel measure via sampling: {} +- {se:.2e}",
            mc.value
        );
    });
}

#[test]
fn criterion_6_negative_exponent_identity_holds_everywhere() {
    criterion(6, "negative-exponent comparison, 100 instances", || {
        let spec = NegativePSpec { fixed_clock: true, ..NegativePSpec::default().with_seed(13) };
        let reports = run_negative_p_check(&spec).unwrap();
        assert_eq!(reports.len(), 100, "50 instances x 2 exponents");
        for r in &reports {
            let scale = r.rhs.value.abs().max(1.0);
            assert!(
                r.margin >= -1e-9 * scale,
                "identity fails at {:?}: margin {}",
                r.instance,
                r.margin
            );
        }
    });
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn coordinate(points: &Points, j: usize) -> Vec<f64> {
    points.iter().map(|x| x[j]).collect()
}

fn squared_norms(points: &Points) -> Vec<f64> {
    points.iter().map(|x| x.iter().map(|v| v * v).sum()).collect()
}

#[test]
fn criterion_7_samplers_match_their_moments() {
    criterion(7, "sampler moment checks and chain agreement", || {
        let m = 40_000usize;
        let root_m = (m as f64).sqrt();

        let cube = MeasureSpec::uniform_box(3).unwrap().sample(m, 101).unwrap();
        for j in 0..3 {
            let xs = coordinate(&cube, j);
            let (mean, _) = mean_and_var(&xs);
            assert!(mean.abs() <= 5.0 * (1.0f64 / 3.0).sqrt() / root_m, "cube mean {mean}");
            let sq: Vec<f64> = xs.iter().map(|v| v * v).collect();
            let (m2, _) = mean_and_var(&sq);
            assert!(
                (m2 - 1.0 / 3.0).abs() <= 5.0 * (4.0f64 / 45.0).sqrt() / root_m,
                "cube second moment {m2}"
            );
        }

        let ball = MeasureSpec::uniform_ball(3).unwrap().sample(m, 102).unwrap();
        for j in 0..3 {
            let (mean, var) = mean_and_var(&coordinate(&ball, j));
            assert!(mean.abs() <= 5.0 * var.sqrt() / root_m, "ball mean {mean}");
        }
        let (r2, _) = mean_and_var(&squared_norms(&ball));
        assert!(
            (r2 - 0.6).abs() <= 5.0 * (12.0f64 / 175.0).sqrt() / root_m,
            "ball radial moment {r2} vs n/(n+2) = 0.6"
        );

        let simplex = MeasureSpec::uniform_simplex(2).unwrap().sample(m, 103).unwrap();
        for j in 0..2 {
            let (mean, _) = mean_and_var(&coordinate(&simplex, j));
            assert!(
                (mean - 1.0 / 3.0).abs() <= 5.0 * (1.0f64 / 18.0).sqrt() / root_m,
                "simplex mean {mean} vs 1/3"
            );
        }

        let chain_m = 20_000usize;
        for kind in [MeasureKind::UniformBox, MeasureKind::UniformBall] {
            let direct = MeasureSpec::new(kind.clone(), 3, SamplerPolicy::Direct)
                .unwrap()
                .sample(chain_m, 104)
                .unwrap();
            let chain = MeasureSpec::new(kind.clone(), 3, SamplerPolicy::hit_and_run_default(3))
                .unwrap()
                .sample(chain_m, 105)
                .unwrap();
            let (dm, dv) = mean_and_var(&squared_norms(&direct));
            let (cm, cv) = mean_and_var(&squared_norms(&chain));
            let se = (dv / chain_m as f64 + cv / chain_m as f64).sqrt();
            assert!(
                (dm - cm).abs() <= 5.0 * se,
                "{kind:?}: hit-and-run radial moment {cm} vs direct {dm}, se {se:.2e}"
            );
        }
    });
}

#[test]
fn criterion_8_reports_are_byte_identical_under_a_fixed_clock() {
    criterion(8, "fixed-clock determinism", || {
        let dir = std::env::temp_dir()
            .join(format!("remez-lab-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("suite.toml");
        std::fs::write(
            &cfg,
            "seed = 21\nfixed_clock = true\n\n[grid]\ndims = [1, 2]\ndegrees = [1, 2]\n\
             exponents = [0.5, 1.0]\nbodies = [\"box\", \"ball\"]\npolys_per_cell = 3\n\
             thresholds = [0.05, 0.2, 0.5, 1.0]\n\n[budgets]\nsamples = 5000\n\
             calibration_samples = 512\n\n[sets]\nhalfspace_quantiles = [0.3, 0.6]\n\
             sublevel_quantiles = [0.5]\n",
        )
        .unwrap();

        for command in ["verify-theorem1", "verify-cw", "verify-classical", "tightness"] {
            let paths: Vec<PathBuf> =
                (0..2).map(|i| dir.join(format!("{command}-{i}.json"))).collect();
            for out in &paths {
                let status = std::process::Command::new(env!("CARGO_BIN_EXE_remez-lab"))
                    .args([
                        command,
                        "--config",
                        cfg.to_str().unwrap(),
                        "--out",
                        out.to_str().unwrap(),
                    ])
                    .status()
                    .unwrap();
                assert!(status.code().is_some(), "{command} crashed");
            }
            let a = std::fs::read(&paths[0]).unwrap();
            let b = std::fs::read(&paths[1]).unwrap();
            assert_eq!(a, b, "{command}: reports differ between identical runs");
        }

        let spec = SuiteSpec {
            dims: vec![1, 2],
            degrees: vec![1, 2],
            exponents: vec![0.5, 1.0],
            polys_per_cell: 3,
            samples: 5000,
            calibration_samples: 512,
            fixed_clock: true,
            ..SuiteSpec::default().with_seed(21)
        };
        let one = serde_json::to_string(&run_cw_suite(&spec).unwrap()).unwrap();
        let two = serde_json::to_string(&run_cw_suite(&spec).unwrap()).unwrap();
        assert_eq!(one, two, "library-level level-set suite not deterministic");
    });
}
