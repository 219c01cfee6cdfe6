//! Seeded Monte Carlo engine: exchangeable normal or t test statistics,
//! one- or two-sided p-values, rejection rates, equivalence ratios, minP
//! calibration and p-value covariance.
//!
//! Every replication draws from its own ChaCha8 stream keyed by
//! `(seed, replication index)`, and rejection counts are integers, so
//! results do not depend on how replications are spread over workers.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combine::{bonferroni, combine_weighted, CombinationMethod, PValueVector, WeightVector};
use crate::distributions::{t_cdf, t_survival, HeavyTailDistribution};
use crate::error::{Error, Result};
use crate::special::normal_sf;

/// Marginal law of the test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StatFamily {
    Normal,
    StudentT { nu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// `T ~ μ + N(0, Σ_ρ)` or `μ + t_ν(0, Σ_ρ)` with `Σ_ρ` the exchangeable
/// correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeableModel {
    family: StatFamily,
    rho: f64,
    mean: Vec<f64>,
    sided: Sidedness,
    sqrt_lambda_common: f64,
    sqrt_lambda_rest: f64,
    chi2: Option<ChiSquared<f64>>,
}

impl ExchangeableModel {
    pub fn new(family: StatFamily, rho: f64, mean: Vec<f64>, sided: Sidedness) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::Model(
                "at least one test statistic is required".into(),
            ));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::Model("mean vector must be finite".into()));
        }
        let lower = if n > 1 { -1.0 / (n as f64 - 1.0) } else { -1.0 };
        if !rho.is_finite() || rho > 1.0 || rho <= lower {
            return Err(Error::Model(format!(
                "correlation {rho} is not admissible for n = {n}: need -1/(n-1) = {lower} < rho <= 1"
            )));
        }
        let chi2 = match family {
            StatFamily::Normal => None,
            StatFamily::StudentT { nu } => {
                if !(nu > 0.0) || !nu.is_finite() {
                    return Err(Error::Model(format!(
                        "degrees of freedom must be positive, got {nu}"
                    )));
                }
                Some(ChiSquared::new(nu).map_err(|e| Error::Model(e.to_string()))?)
            }
        };
        let lambda_common = 1.0 + (n as f64 - 1.0) * rho;
        let lambda_rest = 1.0 - rho;
        Ok(ExchangeableModel {
            family,
            rho,
            mean,
            sided,
            sqrt_lambda_common: lambda_common.max(0.0).sqrt(),
            sqrt_lambda_rest: lambda_rest.max(0.0).sqrt(),
            chi2,
        })
    }

    /// Null model: `μ = 0`.
    pub fn null(family: StatFamily, n: usize, rho: f64, sided: Sidedness) -> Result<Self> {
        Self::new(family, rho, vec![0.0; n], sided)
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn family(&self) -> StatFamily {
        self.family
    }

    pub fn sided(&self) -> Sidedness {
        self.sided
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn is_null(&self) -> bool {
        self.mean.iter().all(|&m| m == 0.0)
    }

    /// Same model with a different mean vector.
    pub fn with_mean(&self, mean: Vec<f64>) -> Result<Self> {
        if mean.len() != self.n() {
            return Err(Error::Model(format!(
                "mean vector has {} entries, model has {}",
                mean.len(),
                self.n()
            )));
        }
        Self::new(self.family, self.rho, mean, self.sided)
    }

    /// Fills `out` with one draw, using
    /// `T = μ + √λ₂(Z − Z̄1) + √λ₁ Z̄1` for the Gaussian part.
    pub fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let n = self.n();
        debug_assert_eq!(out.len(), n);
        let mut total = 0.0;
        for z in out.iter_mut() {
            *z = StandardNormal.sample(rng);
            total += *z;
        }
        let zbar = total / n as f64;
        let common = self.sqrt_lambda_common * zbar;
        let scale = match self.chi2 {
            Some(chi2) => {
                let StatFamily::StudentT { nu } = self.family else {
                    unreachable!("chi-square mixing only exists for the t family")
                };
                let s: f64 = chi2.sample(rng);
                (s / nu).sqrt().recip()
            }
            None => 1.0,
        };
        for (t, &mu) in out.iter_mut().zip(&self.mean) {
            *t = mu + scale * (self.sqrt_lambda_rest * (*t - zbar) + common);
        }
    }

    /// Draw for replication `rep` of the stream keyed by `seed`.
    pub fn sample_statistics(&self, seed: u64, rep: u64) -> Vec<f64> {
        let mut rng = replication_rng(seed, rep);
        let mut out = vec![0.0; self.n()];
        self.sample_into(&mut rng, &mut out);
        out
    }

    fn marginal_sf(&self, t: f64) -> f64 {
        match self.family {
            StatFamily::Normal => normal_sf(t).unwrap_or(f64::NAN),
            StatFamily::StudentT { nu } => t_survival(t, nu).unwrap_or(f64::NAN),
        }
    }

    /// One-sided `F̄(Tᵢ)` or two-sided `2F̄(|Tᵢ|)` under the central
    /// marginal, floored at the smallest positive double.
    pub fn pvalues_into(&self, stats: &[f64], out: &mut [f64]) {
        for (p, &t) in out.iter_mut().zip(stats) {
            let raw = match self.sided {
                Sidedness::OneSided => self.marginal_sf(t),
                Sidedness::TwoSided => (2.0 * self.marginal_sf(t.abs())).min(1.0),
            };
            *p = raw.max(f64::MIN_POSITIVE);
        }
    }

    pub fn statistics_to_pvalues(&self, stats: &[f64]) -> Result<PValueVector<f64>> {
        if stats.len() != self.n() {
            return Err(Error::Model(format!(
                "{} statistics for a model with n = {}",
                stats.len(),
                self.n()
            )));
        }
        let mut out = vec![0.0; stats.len()];
        self.pvalues_into(stats, &mut out);
        PValueVector::new(out)
    }

    /// Null-model p-values for replication `rep`.
    fn draw_pvalues(&self, seed: u64, rep: u64, stats: &mut [f64], p: &mut [f64]) {
        let mut rng = replication_rng(seed, rep);
        self.sample_into(&mut rng, stats);
        self.pvalues_into(stats, p);
    }
}

/// Independent stream for one replication.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Dense signal `(μ, …, μ)`.
pub fn dense_mean(n: usize, mu: f64) -> Vec<f64> {
    vec![mu; n]
}

/// Sparse signal `(0, …, 0, μ)`.
pub fn sparse_mean(n: usize, mu: f64) -> Vec<f64> {
    let mut m = vec![0.0; n];
    if let Some(last) = m.last_mut() {
        *last = mu;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ExchangeableModel,
    pub methods: Vec<CombinationMethod<f64>>,
    pub alphas: Vec<f64>,
    pub replications: u64,
    pub seed: u64,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config(
                "at least one significance level is required".into(),
            ));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!(
                    "significance level {a} is outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// One `(method, α)` cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub alpha: f64,
    pub rejections: u64,
    pub replications: u64,
    pub estimate: f64,
    /// `√(p̂(1 − p̂)/R)`.
    pub std_error: f64,
    pub ratio_to_alpha: f64,
}

impl ReportRow {
    fn new(method: String, alpha: f64, rejections: u64, replications: u64) -> Self {
        let r = replications as f64;
        let estimate = rejections as f64 / r;
        ReportRow {
            method,
            alpha,
            rejections,
            replications,
            estimate,
            std_error: (estimate * (1.0 - estimate) / r).sqrt(),
            ratio_to_alpha: estimate / alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub seed: u64,
    pub replications: u64,
    pub runtime_secs: f64,
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Replications per work item.
const BLOCK: u64 = 4096;

/// Runs `per_block` over consecutive replication ranges and sums the
/// integer tallies it returns.
fn tally<F>(workers: usize, replications: u64, width: usize, per_block: F) -> Result<Vec<u64>>
where
    F: Fn(std::ops::Range<u64>, &mut [u64]) -> Result<()> + Sync,
{
    let blocks = replications.div_ceil(BLOCK);
    pool(workers)?.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let end = (start + BLOCK).min(replications);
                let mut counts = vec![0u64; width];
                per_block(start..end, &mut counts)?;
                Ok(counts)
            })
            .try_reduce(
                || vec![0u64; width],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )
    })
}

/// Rejection rate of every method at every level (type-I error under a null
/// mean, power otherwise).
pub fn estimate_rejection_rate(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let model = &config.model;
    let n = model.n();
    let m = config.methods.len();
    let a = config.alphas.len();
    let counts = tally(
        config.workers,
        config.replications,
        m * a,
        |range, counts| {
            let mut stats = vec![0.0; n];
            let mut p = vec![0.0; n];
            for rep in range {
                model.draw_pvalues(config.seed, rep, &mut stats, &mut p);
                let pv = PValueVector::new(p.clone())?;
                for (mi, method) in config.methods.iter().enumerate() {
                    match method {
                        CombinationMethod::MinP { .. } => {
                            for (ai, &alpha) in config.alphas.iter().enumerate() {
                                counts[mi * a + ai] += u64::from(method.rejects(&pv, alpha)?);
                            }
                        }
                        _ => {
                            let res = method.combine(&pv)?;
                            for (ai, &alpha) in config.alphas.iter().enumerate() {
                                counts[mi * a + ai] += u64::from(res.rejects(alpha));
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    )?;
    let mut rows = Vec::with_capacity(m * a);
    for (mi, method) in config.methods.iter().enumerate() {
        for (ai, &alpha) in config.alphas.iter().enumerate() {
            rows.push(ReportRow::new(
                method.label(),
                alpha,
                counts[mi * a + ai],
                config.replications,
            ));
        }
    }
    Ok(ExperimentReport {
        rows,
        seed: config.seed,
        replications: config.replications,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}

/// Shared-sample counts comparing the weighted combination test with the
/// weighted Bonferroni test under the mapped weights at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub alpha: f64,
    pub replications: u64,
    pub combination_rejections: u64,
    pub bonferroni_rejections: u64,
    /// Replications where exactly one of the two tests rejects.
    pub disagreements: u64,
    pub both_reject: u64,
}

impl EquivalenceRow {
    fn min_count(&self) -> u64 {
        self.combination_rejections.min(self.bonferroni_rejections)
    }

    fn insufficient(&self) -> Error {
        Error::InsufficientEvents {
            combination: self.combination_rejections,
            bonferroni: self.bonferroni_rejections,
            replications: self.replications,
        }
    }

    /// `Pr(φ_wgt ≠ φ_bon) / min{Pr(φ_wgt = 1), Pr(φ_bon = 1)}`.
    pub fn ratio(&self) -> Result<f64> {
        let m = self.min_count();
        if m == 0 {
            return Err(self.insufficient());
        }
        Ok(self.disagreements as f64 / m as f64)
    }

    /// Delta-method standard error of [`ratio`](Self::ratio) from the paired
    /// indicators.
    pub fn std_error(&self) -> Result<f64> {
        let ratio = self.ratio()?;
        let r = self.replications as f64;
        let m = self.min_count() as f64;
        let pd = self.disagreements as f64 / r;
        let pm = m / r;
        // The lower-rate test rejects alone in m − both replications, and
        // each of those is a disagreement.
        let pdm = (m - self.both_reject as f64) / r;
        let var = pd * (1.0 - pd) - 2.0 * ratio * (pdm - pd * pm) + ratio * ratio * pm * (1.0 - pm);
        Ok((var.max(0.0) / r).sqrt() / pm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub seed: u64,
    pub replications: u64,
    pub runtime_secs: f64,
}

/// Estimates the disagreement ratio between the weighted combination test
/// with weights `w` and the weighted Bonferroni test with weights
/// `ωᵢ^γ/Σωⱼ^γ`, at every level in `config.alphas`. `config.methods` is
/// ignored.
pub fn estimate_equivalence_ratio(
    config: &ExperimentConfig,
    d: &HeavyTailDistribution<f64>,
    w: &WeightVector<f64>,
) -> Result<EquivalenceReport> {
    config.validate()?;
    let model = &config.model;
    let n = model.n();
    if w.len() != n {
        return Err(Error::Shape {
            p_values: n,
            weights: w.len(),
        });
    }
    let started = Instant::now();
    let (mapped, _) = w.mapped(d.tail_index());
    let a = config.alphas.len();
    // Per level: combination, Bonferroni, disagreement, both.
    let counts = tally(
        config.workers,
        config.replications,
        4 * a,
        |range, counts| {
            let mut stats = vec![0.0; n];
            let mut p = vec![0.0; n];
            for rep in range {
                model.draw_pvalues(config.seed, rep, &mut stats, &mut p);
                let pv = PValueVector::new(p.clone())?;
                let wgt = combine_weighted(&pv, w, d)?;
                let bon = bonferroni(&pv, Some(&mapped))?;
                for (ai, &alpha) in config.alphas.iter().enumerate() {
                    let x = wgt.rejects(alpha);
                    let y = bon.rejects(alpha);
                    let c = &mut counts[4 * ai..4 * ai + 4];
                    c[0] += u64::from(x);
                    c[1] += u64::from(y);
                    c[2] += u64::from(x != y);
                    c[3] += u64::from(x && y);
                }
            }
            Ok(())
        },
    )?;
    let rows = config
        .alphas
        .iter()
        .enumerate()
        .map(|(ai, &alpha)| EquivalenceRow {
            alpha,
            replications: config.replications,
            combination_rejections: counts[4 * ai],
            bonferroni_rejections: counts[4 * ai + 1],
            disagreements: counts[4 * ai + 2],
            both_reject: counts[4 * ai + 3],
        })
        .collect();
    Ok(EquivalenceReport {
        rows,
        seed: config.seed,
        replications: config.replications,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}

/// Below this many expected exceedances the empirical quantile is noisy.
pub const MIN_TAIL_EVENTS: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinPCalibration {
    pub alpha: f64,
    pub n: usize,
    pub replications: u64,
    /// Empirical `α`-quantile of `min pᵢ` under the null.
    pub cutoff: f64,
    /// `cutoff / (α/n)`.
    pub cutoff_ratio: f64,
    pub warning: Option<String>,
}

/// Collects `f(rep)` for every replication, in replication order.
fn collect_ordered<F, V>(workers: usize, replications: u64, f: F) -> Result<Vec<V>>
where
    F: Fn(std::ops::Range<u64>, &mut Vec<V>) + Sync,
    V: Send,
{
    let blocks = replications.div_ceil(BLOCK);
    let parts: Vec<Vec<V>> = pool(workers)?.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let end = (start + BLOCK).min(replications);
                let mut out = Vec::with_capacity((end - start) as usize);
                f(start..end, &mut out);
                out
            })
            .collect()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Monte Carlo cutoff for the minP test: the empirical `α`-quantile of
/// `min pᵢ` over `replications` null draws.
pub fn calibrate_minp(
    model: &ExchangeableModel,
    alpha: f64,
    replications: u64,
    seed: u64,
    workers: usize,
) -> Result<MinPCalibration> {
    if !model.is_null() {
        return Err(Error::Model(
            "minP calibration needs the null model (zero mean)".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "significance level {alpha} is outside (0, 1)"
        )));
    }
    if replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let n = model.n();
    let mut mins = collect_ordered(workers, replications, |range, out| {
        let mut stats = vec![0.0; n];
        let mut p = vec![0.0; n];
        for rep in range {
            model.draw_pvalues(seed, rep, &mut stats, &mut p);
            out.push(p.iter().copied().fold(1.0, f64::min));
        }
    })?;
    // Smallest m with F_R(m) ≥ α.
    let k = ((alpha * replications as f64).ceil() as usize).clamp(1, mins.len()) - 1;
    let (_, &mut cutoff, _) = mins.select_nth_unstable_by(k, f64::total_cmp);
    let expected = alpha * replications as f64;
    let warning = (expected < MIN_TAIL_EVENTS).then(|| {
        format!(
            "only {expected:.1} expected null exceedances (R·α < {MIN_TAIL_EVENTS}); the cutoff is unstable"
        )
    });
    Ok(MinPCalibration {
        alpha,
        n,
        replications,
        cutoff,
        cutoff_ratio: cutoff / (alpha / n as f64),
        warning,
    })
}

/// Upper tail dependence of a bivariate `t_ν` with correlation `ρ`:
/// `2·t_{ν+1}(−√((ν+1)(1−ρ)/(1+ρ)))`.
pub fn tail_dependence_t(nu: f64, rho: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Model(format!(
            "degrees of freedom must be positive, got {nu}"
        )));
    }
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Model(format!(
            "correlation must lie in (-1, 1), got {rho}"
        )));
    }
    let arg = ((nu + 1.0) * (1.0 - rho) / (1.0 + rho)).sqrt();
    Ok(2.0 * t_cdf(-arg, nu + 1.0)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub replications: u64,
}

/// Empirical covariance of the two p-values of an `n = 2` model, with the
/// standard error of the product-moment estimator.
pub fn pvalue_covariance(
    model: &ExchangeableModel,
    replications: u64,
    seed: u64,
    workers: usize,
) -> Result<CovarianceEstimate> {
    if model.n() != 2 {
        return Err(Error::Model(format!(
            "p-value covariance needs n = 2, model has n = {}",
            model.n()
        )));
    }
    if replications < 2 {
        return Err(Error::Config(
            "covariance needs at least 2 replications".into(),
        ));
    }
    let pairs = collect_ordered(workers, replications, |range, out| {
        let mut stats = [0.0; 2];
        let mut p = [0.0; 2];
        for rep in range {
            model.draw_pvalues(seed, rep, &mut stats, &mut p);
            out.push((p[0], p[1]));
        }
    })?;
    let r = pairs.len() as f64;
    let (s1, s2) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (m1, m2) = (s1 / r, s2 / r);
    let products: Vec<f64> = pairs.iter().map(|&(x, y)| (x - m1) * (y - m2)).collect();
    let cov = products.iter().sum::<f64>() / (r - 1.0);
    let mean_prod = products.iter().sum::<f64>() / r;
    let var = products
        .iter()
        .map(|&v| (v - mean_prod).powi(2))
        .sum::<f64>()
        / (r - 1.0);
    Ok(CovarianceEstimate {
        estimate: cov,
        std_error: (var / r).sqrt(),
        replications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(n: usize, rho: f64) -> ExchangeableModel {
        ExchangeableModel::null(StatFamily::Normal, n, rho, Sidedness::OneSided).unwrap()
    }

    #[test]
    fn admissible_correlation() {
        assert!(
            ExchangeableModel::null(StatFamily::Normal, 5, -0.25, Sidedness::OneSided).is_err()
        );
        assert!(ExchangeableModel::null(StatFamily::Normal, 5, -0.2, Sidedness::OneSided).is_ok());
        assert!(ExchangeableModel::null(StatFamily::Normal, 5, 1.01, Sidedness::OneSided).is_err());
        assert!(ExchangeableModel::null(StatFamily::Normal, 5, 1.0, Sidedness::OneSided).is_ok());
        let e = ExchangeableModel::null(
            StatFamily::StudentT { nu: 0.0 },
            2,
            0.0,
            Sidedness::OneSided,
        );
        assert!(e.is_err());
        assert!(
            ExchangeableModel::new(StatFamily::Normal, 0.0, vec![], Sidedness::OneSided).is_err()
        );
    }

    #[test]
    fn pvalue_examples() {
        let m = normal(1, 0.0);
        assert_eq!(m.statistics_to_pvalues(&[0.0]).unwrap().as_slice(), &[0.5]);
        let two = ExchangeableModel::null(StatFamily::Normal, 1, 0.0, Sidedness::TwoSided).unwrap();
        let p = two.statistics_to_pvalues(&[1.959963984540054]).unwrap();
        assert!((p.as_slice()[0] - 0.05).abs() < 1e-15);
        let t = ExchangeableModel::null(
            StatFamily::StudentT { nu: 2.0 },
            1,
            0.0,
            Sidedness::OneSided,
        )
        .unwrap();
        assert_eq!(t.statistics_to_pvalues(&[0.0]).unwrap().as_slice(), &[0.5]);
        // Far tail: floored rather than zero.
        assert_eq!(
            m.statistics_to_pvalues(&[60.0]).unwrap().as_slice(),
            &[f64::MIN_POSITIVE]
        );
    }

    #[test]
    fn streams_are_reproducible() {
        let m = normal(4, 0.3);
        assert_eq!(m.sample_statistics(7, 11), m.sample_statistics(7, 11));
        assert_ne!(m.sample_statistics(7, 11), m.sample_statistics(7, 12));
        assert_ne!(m.sample_statistics(7, 11), m.sample_statistics(8, 11));
    }

    #[test]
    fn perfect_correlation_gives_identical_coordinates() {
        let m = normal(3, 1.0);
        let t = m.sample_statistics(1, 0);
        assert!((t[0] - t[1]).abs() < 1e-12 && (t[1] - t[2]).abs() < 1e-12);
    }

    #[test]
    fn tail_dependence_values() {
        let want = [(0.0, 0.1817), (0.5, 0.3910), (0.9, 0.7177), (0.99, 0.9100)];
        for (rho, v) in want {
            assert!((tail_dependence_t(2.0, rho).unwrap() - v).abs() < 1e-4);
        }
        assert!(tail_dependence_t(2.0, 1.0).is_err());
        assert!(tail_dependence_t(-1.0, 0.5).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let config = ExperimentConfig {
            model: normal(3, 0.4),
            methods: vec![
                CombinationMethod::Standard(HeavyTailDistribution::cauchy()),
                CombinationMethod::Bonferroni(None),
                CombinationMethod::Fisher,
            ],
            alphas: vec![0.05, 0.01],
            replications: 10_000,
            seed: 99,
            workers: 1,
        };
        let a = estimate_rejection_rate(&config).unwrap();
        let b = estimate_rejection_rate(&ExperimentConfig {
            workers: 4,
            ..config
        })
        .unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn config_errors() {
        let config = ExperimentConfig {
            model: normal(2, 0.0),
            methods: vec![CombinationMethod::Fisher],
            alphas: vec![0.05],
            replications: 0,
            seed: 1,
            workers: 1,
        };
        assert!(matches!(
            estimate_rejection_rate(&config),
            Err(Error::Config(_))
        ));
        let config = ExperimentConfig {
            replications: 10,
            alphas: vec![1.0],
            ..config
        };
        assert!(matches!(
            estimate_rejection_rate(&config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn equivalence_row_arithmetic() {
        let row = EquivalenceRow {
            alpha: 0.05,
            replications: 1000,
            combination_rejections: 50,
            bonferroni_rejections: 40,
            disagreements: 12,
            both_reject: 39,
        };
        assert!((row.ratio().unwrap() - 0.3).abs() < 1e-15);
        assert!(row.std_error().unwrap() > 0.0);
        let empty = EquivalenceRow {
            bonferroni_rejections: 0,
            both_reject: 0,
            ..row
        };
        assert_eq!(
            empty.ratio().unwrap_err(),
            Error::InsufficientEvents {
                combination: 50,
                bonferroni: 0,
                replications: 1000
            }
        );
    }

    #[test]
    fn minp_warns_on_few_events() {
        let c = calibrate_minp(&normal(2, 0.0), 0.01, 1000, 3, 2).unwrap();
        assert!(c.warning.is_some());
        let alt = normal(2, 0.0).with_mean(vec![1.0, 0.0]).unwrap();
        assert!(calibrate_minp(&alt, 0.05, 1000, 3, 1).is_err());
    }
}
