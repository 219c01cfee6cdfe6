use tailcomb::distributions::t_upper_quantile;
use tailcomb::simulate::{dense_mean, replication_rng};
use tailcomb::{
    estimate_rejection_rate, pvalue_covariance, tail_dependence_t, CombinationMethod,
    ExchangeableModel, ExperimentConfig, Sidedness, StatFamily,
};

const R: u64 = 100_000;

fn draws(model: &ExchangeableModel, seed: u64, reps: u64) -> Vec<Vec<f64>> {
    (0..reps)
        .map(|r| model.sample_statistics(seed, r))
        .collect()
}

#[test]
fn sampler_covariance_matches_exchangeable_matrix() {
    for (k, rho) in [-0.2, 0.0, 0.5, 0.9, 0.99].into_iter().enumerate() {
        let model =
            ExchangeableModel::null(StatFamily::Normal, 5, rho, Sidedness::OneSided).unwrap();
        let t = draws(&model, 100 + k as u64, R);
        let r = R as f64;
        for (i, j) in [(0, 0), (0, 1), (2, 4), (3, 3)] {
            let cov: f64 = t.iter().map(|v| v[i] * v[j]).sum::<f64>() / r;
            let target = if i == j { 1.0 } else { rho };
            // Var(XᵢXⱼ) = 1 + ρᵢⱼ² for a centred Gaussian pair.
            let se = ((1.0 + target * target) / r).sqrt();
            assert!((cov - target).abs() <= 4.0 * se, "ρ={rho} ({i},{j}): {cov}");
        }
        let mean: f64 = t.iter().map(|v| v[1]).sum::<f64>() / r;
        assert!(mean.abs() <= 4.0 / r.sqrt());
    }
}

#[test]
fn null_pvalues_are_uniform() {
    let delta: f64 = 1e-3;
    let bound = 3.0 * ((2.0 / delta).ln() / (2.0 * R as f64)).sqrt();
    let models = [
        ExchangeableModel::null(StatFamily::Normal, 3, 0.5, Sidedness::OneSided).unwrap(),
        ExchangeableModel::null(StatFamily::Normal, 3, -0.4, Sidedness::TwoSided).unwrap(),
        ExchangeableModel::null(
            StatFamily::StudentT { nu: 2.0 },
            3,
            0.9,
            Sidedness::OneSided,
        )
        .unwrap(),
    ];
    for (k, model) in models.iter().enumerate() {
        let mut p: Vec<f64> = draws(model, 500 + k as u64, R)
            .iter()
            .map(|t| model.statistics_to_pvalues(t).unwrap().as_slice()[2])
            .collect();
        p.sort_by(f64::total_cmp);
        let n = p.len() as f64;
        let ks = p
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n - x).abs().max((x - i as f64 / n).abs()))
            .fold(0.0, f64::max);
        assert!(ks <= bound, "model {k}: KS = {ks} > {bound}");
    }
}

#[test]
fn bonferroni_under_independence() {
    let config = ExperimentConfig {
        model: ExchangeableModel::null(StatFamily::Normal, 5, 0.0, Sidedness::OneSided).unwrap(),
        methods: vec![CombinationMethod::Bonferroni(None)],
        alphas: vec![0.05],
        replications: R,
        seed: 42,
        workers: 4,
    };
    let row = &estimate_rejection_rate(&config).unwrap().rows[0];
    let exact = 1.0 - (1.0 - 0.05f64 / 5.0).powi(5);
    assert!((exact - 0.049_009_9).abs() < 1e-7);
    assert!(
        (row.estimate - exact).abs() <= 3.0 * row.std_error,
        "{row:?}"
    );
    assert_eq!(row.estimate, row.rejections as f64 / R as f64);
}

#[test]
fn t_joint_exceedance_approaches_tail_dependence() {
    let (nu, rho) = (2.0, 0.5);
    let lambda = tail_dependence_t(nu, rho).unwrap();
    let model =
        ExchangeableModel::null(StatFamily::StudentT { nu }, 2, rho, Sidedness::OneSided).unwrap();
    let t = draws(&model, 77, 300_000);
    let gap = |level: f64| {
        let q = t_upper_quantile(level, nu).unwrap();
        let both = t.iter().filter(|v| v[0] > q && v[1] > q).count() as f64;
        let one = t.iter().filter(|v| v[1] > q).count() as f64;
        (both / one - lambda).abs()
    };
    let gaps: Vec<f64> = [0.1, 0.01, 0.001].into_iter().map(gap).collect();
    assert!(gaps[2] < gaps[0], "{gaps:?}");
}

#[test]
fn pvalue_covariance_signs() {
    let two = ExchangeableModel::null(StatFamily::Normal, 2, -0.9, Sidedness::TwoSided).unwrap();
    let c = pvalue_covariance(&two, R, 1, 2).unwrap();
    assert!(c.estimate >= -3.0 * c.std_error, "{c:?}");
    let one = ExchangeableModel::null(StatFamily::Normal, 2, 0.9, Sidedness::OneSided).unwrap();
    let c = pvalue_covariance(&one, R, 2, 2).unwrap();
    assert!(c.estimate > 3.0 * c.std_error, "{c:?}");
    let ind = ExchangeableModel::null(StatFamily::Normal, 2, 0.0, Sidedness::OneSided).unwrap();
    let c = pvalue_covariance(&ind, R, 3, 2).unwrap();
    assert!(c.estimate.abs() <= 3.0 * c.std_error, "{c:?}");
}

#[test]
fn reports_are_identical_across_worker_counts() {
    let model = ExchangeableModel::null(
        StatFamily::StudentT { nu: 2.0 },
        5,
        0.5,
        Sidedness::OneSided,
    )
    .unwrap()
    .with_mean(dense_mean(5, 1.0))
    .unwrap();
    let base = ExperimentConfig {
        model,
        methods: vec![
            CombinationMethod::Standard(tailcomb::Distribution::cauchy()),
            CombinationMethod::Fisher,
            CombinationMethod::MinP { cutoff: 0.01 },
        ],
        alphas: vec![0.05, 0.001],
        replications: 20_000,
        seed: 9,
        workers: 1,
    };
    let reference = estimate_rejection_rate(&base).unwrap().rows;
    for workers in [2, 3, 8] {
        let rows = estimate_rejection_rate(&ExperimentConfig {
            workers,
            ..base.clone()
        })
        .unwrap()
        .rows;
        assert_eq!(rows, reference);
    }
}

#[test]
fn replication_streams_are_independent_of_order() {
    use rand::Rng;
    let a: u64 = replication_rng(5, 1000).random();
    let _ = replication_rng(5, 999).random::<u64>();
    let b: u64 = replication_rng(5, 1000).random();
    assert_eq!(a, b);
}
