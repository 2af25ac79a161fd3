//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fail. All tolerances are fixed below.

use std::time::{Duration, Instant};

use rand::Rng;

use nonmarkov::cli::config::PlanSection;
use nonmarkov::cli::{cmd_gen, cmd_train};
use nonmarkov::learn::{
    evaluate, fit_least_squares, fold_indices, k_fold_cv, knn_fit, knn_predict, size_sweep, train_poly,
    train_test_split, Dataset, SplitMode, DEFAULT_TRAIN_SIZES,
};
use nonmarkov::linalg::{von_neumann_entropy, ComplexMatrix};
use nonmarkov::process::{
    empirical_pmf, joint_pmf, mixed_process, non_markovianity, non_markovianity_direct, pauli, prepared_state,
    sample_marginal, JointPmf, PauliIndex,
};
use nonmarkov::rng;
use nonmarkov::simulate::{
    generate_dataset, output_state, probe_unitary, stokes, stokes_via_contraction, GenerationPlan, ProbeConfig, Shots,
};

const PRODUCT_ZERO_TOL: f64 = 1e-9;
const MAXIMUM_TOL: f64 = 1e-9;
const TWIRL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-8;
const BORN_TOL: f64 = 1e-10;
const BOUNDS_SLACK: f64 = 1e-9;
const DEG2_TEST_R2_MIN: f64 = 0.80;
const DEG2_TEST_MAE_MAX: f64 = 0.08;
const DEG_GAP_MIN: f64 = 0.05;
const NESTED_SLACK: f64 = 1e-9;
const CV_MEAN_R2_MIN: f64 = 0.80;
const SOLVER_TOL: f64 = 1e-8;
const KNN_R2_RANGE: (f64, f64) = (0.75, 1.0);

const PRODUCT_ZERO_BUDGET: Duration = Duration::from_secs(10);
const MAXIMUM_BUDGET: Duration = Duration::from_secs(1);
const REGRESSION_BUDGET: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_marginal(g: &mut rng::Stream) -> [f64; 4] {
    let r = g.random_range(1.0..2.0);
    sample_marginal(r, g).unwrap()
}

fn random_table(g: &mut rng::Stream) -> JointPmf {
    let mut t = [[0.0; 4]; 4];
    let mut total = 0.0;
    for row in t.iter_mut() {
        for v in row.iter_mut() {
            *v = g.random::<f64>();
            total += *v;
        }
    }
    for row in t.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    JointPmf::from_table(t).unwrap()
}

fn standard_dataset(seed: u64) -> Dataset {
    let plan = GenerationPlan { base_seed: seed, ..Default::default() };
    Dataset::new(generate_dataset(&plan).unwrap(), plan.measurements.feature_names()).unwrap()
}

fn product_zero() -> Outcome {
    let t = Instant::now();
    let mut g = rng::stream(101);
    let rho = prepared_state();
    let worst = (0..200)
        .map(|_| non_markovianity(&mixed_process(&joint_pmf(&random_marginal(&mut g), 0.0).unwrap(), &rho), 2.0).unwrap())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let el = t.elapsed();
    outcome(worst < PRODUCT_ZERO_TOL && el < PRODUCT_ZERO_BUDGET, format!("max |N| = {worst:.2e} bits over 200 marginals, {el:.2?}"))
}

fn analytic_maximum() -> Outcome {
    let t = Instant::now();
    let w = mixed_process(&joint_pmf(&[0.25; 4], 1.0).unwrap(), &prepared_state());
    let n = non_markovianity(&w, 2.0).unwrap();
    let el = t.elapsed();
    outcome((n - 1.0).abs() <= MAXIMUM_TOL && el < MAXIMUM_BUDGET, format!("N = {n:.12} bits, {el:.2?}"))
}

fn twirl_identity() -> Outcome {
    let mut g = rng::stream(103);
    let rho = prepared_state();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = random_marginal(&mut g);
        let n = non_markovianity(&mixed_process(&joint_pmf(&m, 1.0).unwrap(), &rho), 2.0).unwrap();
        let mut twirled = ComplexMatrix::zeros(2, 2);
        for i in PauliIndex::ALL {
            twirled = &twirled + &rho.matrix().conjugate_by(&pauli(i)).unwrap().scale(m[i.value()]);
        }
        let s = von_neumann_entropy(&twirled, 2.0).unwrap();
        worst = worst.max((n - s).abs());
    }
    outcome(worst <= TWIRL_TOL, format!("max |N - S(twirl)| = {worst:.2e} over 100 marginals"))
}

fn dual_formula() -> Outcome {
    let mut g = rng::stream(104);
    let rho = prepared_state();
    let mut worst = 0.0f64;
    for case in 0..1000 {
        // thirds: dense random tables, model pmfs, sparse empirical pmfs
        let p = match case % 3 {
            0 => random_table(&mut g),
            1 => joint_pmf(&random_marginal(&mut g), g.random::<f64>()).unwrap(),
            _ => {
                let model = joint_pmf(&random_marginal(&mut g), g.random::<f64>()).unwrap();
                empirical_pmf(&model, 50, &mut g).unwrap()
            }
        };
        let w = mixed_process(&p, &rho);
        let a = non_markovianity(&w, 2.0).unwrap();
        let b = non_markovianity_direct(&w, 2.0).unwrap();
        worst = worst.max((a - b).abs());
    }
    outcome(worst <= DUAL_TOL, format!("max |mutual info - relative entropy| = {worst:.2e} over 1000 processes"))
}

fn born_rule() -> Outcome {
    let mut g = rng::stream(105);
    let rho = prepared_state();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = joint_pmf(&random_marginal(&mut g), g.random::<f64>()).unwrap();
        let cfg = ProbeConfig::new(
            g.random_range(0.0..std::f64::consts::TAU),
            g.random_range(0.0..std::f64::consts::TAU),
            g.random_range(0.0..std::f64::consts::TAU),
        )
        .unwrap();
        let k = PauliIndex::new(g.random_range(0..3)).unwrap();
        let l = PauliIndex::new(g.random_range(0..4)).unwrap();
        let u = probe_unitary(k, &cfg).unwrap();
        let direct = stokes(&output_state(&p, &rho, &u).unwrap(), l);
        let via = stokes_via_contraction(&mixed_process(&p, &rho), &u, l).unwrap();
        worst = worst.max((direct - via).abs());
    }
    outcome(worst <= BORN_TOL, format!("max |contraction - evolution| = {worst:.2e} over 1000 triples"))
}

fn bounds() -> Outcome {
    let noisy = GenerationPlan::default();
    let mut exact = noisy.clone();
    exact.noise.shots = Shots::Exact;
    let rows = generate_dataset(&noisy).unwrap();
    let clean = generate_dataset(&exact).unwrap();
    let in_unit = |v: f64, lo: f64, hi: f64| v >= lo - BOUNDS_SLACK && v <= hi + BOUNDS_SLACK;
    let labels_ok = rows.iter().all(|r| in_unit(r.label, 0.0, 1.0));
    let features_ok = clean.iter().all(|r| r.features.iter().all(|&f| in_unit(f, -1.0, 1.0)));
    let same_labels = rows.iter().zip(&clean).all(|(a, b)| a.label == b.label);
    let (lo, hi) = rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.label), hi.max(r.label)));
    outcome(
        rows.len() == 1000 && labels_ok && features_ok && same_labels,
        format!("{} rows, labels in [{lo:.4}, {hi:.4}] bits, noiseless features bounded: {features_ok}", rows.len()),
    )
}

fn regression_quality(ds: &Dataset) -> Outcome {
    let t = Instant::now();
    let (train, test) = train_test_split(ds, 0.7, 0, SplitMode::Uniform).unwrap();
    let scores: Vec<_> = (1..=3)
        .map(|d| {
            let m = train_poly(&train, d, 0.0).unwrap();
            (evaluate(&m, &train).unwrap(), evaluate(&m, &test).unwrap())
        })
        .collect();
    let el = t.elapsed();
    let (tr, te): (Vec<_>, Vec<_>) = scores.into_iter().unzip();
    let pass = te[1].r_squared >= DEG2_TEST_R2_MIN
        && te[1].mae <= DEG2_TEST_MAE_MAX
        && te[1].r_squared - te[0].r_squared >= DEG_GAP_MIN
        && tr[2].r_squared >= tr[1].r_squared - NESTED_SLACK
        && tr[1].r_squared >= tr[0].r_squared - NESTED_SLACK
        && el < REGRESSION_BUDGET;
    outcome(
        pass,
        format!(
            "test R2 d1/d2/d3 = {:.3}/{:.3}/{:.3}, d2 MAE {:.4}, train R2 {:.3}/{:.3}/{:.3}, {el:.2?}",
            te[0].r_squared, te[1].r_squared, te[2].r_squared, te[1].mae, tr[0].r_squared, tr[1].r_squared, tr[2].r_squared
        ),
    )
}

fn k_fold(ds: &Dataset) -> Outcome {
    let rep = k_fold_cv(ds, 10, 2, 0, 0.0).unwrap();
    let mut tested: Vec<usize> = rep.folds.iter().flat_map(|f| f.test_indices.iter().copied()).collect();
    tested.sort();
    let mut assigned = fold_indices(ds.len(), 10, 0).unwrap().concat();
    assigned.sort();
    let identity: Vec<usize> = (0..ds.len()).collect();
    let partition = tested == identity && assigned == identity;
    outcome(
        rep.mean_r_squared >= CV_MEAN_R2_MIN && rep.std_r_squared.is_finite() && partition,
        format!("10-fold degree-2 R2 = {:.3} ± {:.3} (population std), partition exact: {partition}", rep.mean_r_squared, rep.std_r_squared),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn size_sweep_trend() -> Outcome {
    let seeds = 0..5u64;
    let sweeps: Vec<_> = seeds.map(|s| size_sweep(&standard_dataset(s), 300, &DEFAULT_TRAIN_SIZES, 2, s, 0.0).unwrap()).collect();
    let col = |size: usize, f: &dyn Fn(&nonmarkov::learn::SweepEntry) -> f64| {
        median(sweeps.iter().map(|s| f(s.entries.iter().find(|e| e.train_size == size).unwrap())).collect())
    };
    let test_70 = col(70, &|e| e.test.r_squared);
    let test_630 = col(630, &|e| e.test.r_squared);
    let gaps: Vec<(usize, f64)> =
        DEFAULT_TRAIN_SIZES.iter().map(|&s| (s, col(s, &|e| e.train.r_squared - e.test.r_squared))).collect();
    let widest = gaps.iter().fold(gaps[0], |b, &g| if g.1 > b.1 { g } else { b });
    let per_seed = sweeps.iter().filter(|s| s.largest_gap().map(|e| e.train_size) == Some(70)).count();
    outcome(
        test_630 > test_70 && widest.0 == 70,
        format!(
            "median test R2 at 70 = {test_70:.3}, at 630 = {test_630:.3}; widest median gap at size {} ({:.3}); size 70 widest in {per_seed}/5 seeds",
            widest.0, widest.1
        ),
    )
}

/// Cholesky solve of the normal equations, written out independently of
/// the SVD solver under test.
fn normal_equations(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = a[0].len();
    let mut g = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (row, &yi) in a.iter().zip(y) {
        for i in 0..m {
            b[i] += row[i] * yi;
            for j in 0..m {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][i] = (g[i][i] - s).sqrt();
            } else {
                l[i][j] = (g[i][j] - s) / l[j][j];
            }
        }
    }
    let mut z = vec![0.0; m];
    for i in 0..m {
        z[i] = (b[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        x[i] = (z[i] - (i + 1..m).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

fn residual(a: &[Vec<f64>], y: &[f64], c: &[f64]) -> Vec<f64> {
    a.iter().zip(y).map(|(row, yi)| yi - row.iter().zip(c).map(|(p, q)| p * q).sum::<f64>()).collect()
}

fn solver_oracle() -> Outcome {
    let mut g = rng::stream(110);
    let mut worst_coef = 0.0f64;
    let mut worst_resid = 0.0f64;
    for _ in 0..100 {
        let (n, m) = (g.random_range(20..60), g.random_range(2..12));
        let a: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| g.random_range(-1.0..1.0)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| g.random_range(-1.0..1.0)).collect();
        let refs: Vec<&[f64]> = a.iter().map(Vec::as_slice).collect();
        let got = fit_least_squares(&refs, &y).unwrap();
        let want = normal_equations(&a, &y);
        worst_coef = worst_coef.max(got.iter().zip(&want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));

        // rank-deficient: append linear combinations of the base columns;
        // the oracle fits the full-rank base and must give the same residual
        let extra = g.random_range(1..4);
        let mix: Vec<Vec<f64>> = (0..extra).map(|_| (0..m).map(|_| g.random_range(-1.0..1.0)).collect()).collect();
        let wide: Vec<Vec<f64>> = a
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.extend(mix.iter().map(|w| w.iter().zip(row).map(|(p, q)| p * q).sum::<f64>()));
                r
            })
            .collect();
        let refs: Vec<&[f64]> = wide.iter().map(Vec::as_slice).collect();
        let got = fit_least_squares(&refs, &y).unwrap();
        let r_got = residual(&wide, &y, &got);
        let r_want = residual(&a, &y, &want);
        worst_resid = worst_resid.max(r_got.iter().zip(&r_want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
    }
    outcome(
        worst_coef <= SOLVER_TOL && worst_resid <= SOLVER_TOL,
        format!("max coefficient error {worst_coef:.2e} (100 full-rank), max residual error {worst_resid:.2e} (100 rank-deficient)"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let plan = PlanSection { seed: Some(42), ..Default::default() }.resolve().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    cmd_gen(&plan, &a).unwrap();
    cmd_gen(&plan, &b).unwrap();
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();
    let csv_same = read(&a) == read(&b);
    let meta_same = read(&dir.path().join("a.csv.meta.json")) == read(&dir.path().join("b.csv.meta.json"));

    let settings = nonmarkov::cli::config::LearnSection::default().resolve(&[2]).unwrap();
    let (ma, mb) = (dir.path().join("ma.txt"), dir.path().join("mb.txt"));
    let ra = cmd_train(&settings, &a, &ma).unwrap();
    let rb = cmd_train(&settings, &a, &mb).unwrap();
    let metrics_same = ra == rb
        && read(&dir.path().join("ma.txt.metrics.json")) == read(&dir.path().join("mb.txt.metrics.json"))
        && read(&ma) == read(&mb);
    outcome(
        csv_same && meta_same && metrics_same,
        format!("gen CSV identical: {csv_same}, sidecar identical: {meta_same}, train outputs identical: {metrics_same}"),
    )
}

fn knn_sanity(ds: &Dataset) -> Outcome {
    let (train, test) = train_test_split(ds, 0.7, 0, SplitMode::Uniform).unwrap();
    let one = knn_fit(&train, 1).unwrap();
    let self_exact = train.rows().iter().all(|r| knn_predict(&one, &r.features).unwrap() == r.label);
    let five = knn_fit(&train, 5).unwrap();
    let r2 = evaluate(&five, &test).unwrap().r_squared;
    outcome(
        self_exact && r2 >= KNN_R2_RANGE.0 && r2 <= KNN_R2_RANGE.1,
        format!("k=1 self-query exact: {self_exact}; k=5 test R2 = {r2:.3}"),
    )
}

fn main() {
    let ds = standard_dataset(0);
    type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        ("product-process zero", Box::new(product_zero)),
        ("analytic maximum", Box::new(analytic_maximum)),
        ("twirl identity", Box::new(twirl_identity)),
        ("dual-formula agreement", Box::new(dual_formula)),
        ("Born-rule consistency", Box::new(born_rule)),
        ("label and feature bounds", Box::new(bounds)),
        ("regression quality", Box::new(|| regression_quality(&ds))),
        ("k-fold cross-validation", Box::new(|| k_fold(&ds))),
        ("training-size sweep", Box::new(size_sweep_trend)),
        ("least-squares solver oracle", Box::new(solver_oracle)),
        ("CLI determinism", Box::new(determinism)),
        ("KNN sanity", Box::new(|| knn_sanity(&ds))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
