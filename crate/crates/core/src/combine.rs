//! Global tests on a vector of p-values: heavy-tailed combination tests
//! (standard, average, weighted), weighted Bonferroni and its max-statistic
//! form, Fisher's method, and Benjamini–Hochberg adjustment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{Family, HeavyTailDistribution};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, to_f64, Real};
use crate::special::reg_gamma_upper;

/// Non-empty list of p-values, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector<T>(Vec<T>);

impl<T: Real> PValueVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("at least one p-value is required"));
        }
        for (i, &p) in values.iter().enumerate() {
            if p.is_nan() || p <= T::zero() || p > T::one() {
                return Err(Error::domain(format!(
                    "p-value #{} must lie in (0, 1], got {}",
                    i + 1,
                    to_f64(p)
                )));
            }
        }
        Ok(PValueVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub(crate) fn min(&self) -> T {
        self.0.iter().copied().fold(T::one(), T::min)
    }
}

impl<T: Real> TryFrom<Vec<T>> for PValueVector<T> {
    type Error = Error;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

/// Strictly positive, finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Real> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("at least one weight is required"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::domain(format!(
                    "weight #{} must be positive and finite, got {}",
                    i + 1,
                    to_f64(w)
                )));
            }
        }
        Ok(WeightVector(weights))
    }

    /// `n` weights all equal to `value`.
    pub fn equal(n: usize, value: T) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |a, &w| a + w)
    }

    /// Rescaled to sum to one. The flag is false when the weights already
    /// summed to one within `n` ulps and were left untouched.
    pub fn normalized(&self) -> (WeightVector<T>, bool) {
        let total = self.sum();
        let tol = from_usize::<T>(self.len()) * T::epsilon();
        if (total - T::one()).abs() <= tol {
            return (self.clone(), false);
        }
        (
            WeightVector(self.0.iter().map(|&w| w / total).collect()),
            true,
        )
    }

    /// `κ = Σ ωᵢ^γ`.
    pub fn kappa(&self, gamma: T) -> T {
        self.0.iter().fold(T::zero(), |a, &w| a + w.powf(gamma))
    }

    /// Bonferroni weights `ωᵢ^γ / κ` matching the max-statistic rewrite,
    /// together with `κ`.
    pub fn mapped(&self, gamma: T) -> (WeightVector<T>, T) {
        let kappa = self.kappa(gamma);
        (
            WeightVector(self.0.iter().map(|&w| w.powf(gamma) / kappa).collect()),
            kappa,
        )
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::Shape {
                p_values: n,
                weights: self.len(),
            });
        }
        Ok(())
    }
}

/// Which global test produced a [`CombinedResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Standard,
    Average,
    Weighted,
    Bonferroni,
    Fisher,
    #[serde(rename = "minp")]
    MinP,
}

impl MethodKind {
    pub fn label(self) -> &'static str {
        match self {
            MethodKind::Standard => "standard",
            MethodKind::Average => "average",
            MethodKind::Weighted => "weighted",
            MethodKind::Bonferroni => "bonferroni",
            MethodKind::Fisher => "fisher",
            MethodKind::MinP => "minp",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(MethodKind::Standard),
            "average" => Ok(MethodKind::Average),
            "weighted" => Ok(MethodKind::Weighted),
            "bonferroni" => Ok(MethodKind::Bonferroni),
            "fisher" => Ok(MethodKind::Fisher),
            "minp" => Ok(MethodKind::MinP),
            other => Err(Error::domain(format!("unknown method `{other}`"))),
        }
    }
}

/// Output of a global test.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedResult<T> {
    pub method: MethodKind,
    /// `S_n`, `M_n`, `S_{n,ω}`, `min pᵢ/ωᵢ` or the Fisher statistic.
    pub statistic: T,
    /// `ln` of the statistic when the statistic itself overflowed and was
    /// saturated.
    pub ln_statistic: Option<T>,
    /// Clamped to `[T::min_positive_value(), 1]`.
    pub combined_p: T,
    pub kappa: Option<T>,
    /// Some transformed value or the statistic hit the floating-point range
    /// and was replaced by the nearest finite value.
    pub saturated: bool,
    /// Bonferroni weights did not sum to one and were rescaled.
    pub weights_normalized: bool,
}

impl<T: Real> CombinedResult<T> {
    /// Decision at level `alpha`: `combined_p < alpha`.
    ///
    /// For the heavy-tailed tests this is the threshold rule
    /// `S > Q_F(1 − α/κ)` stated through the survival function.
    pub fn rejects(&self, alpha: T) -> bool {
        self.combined_p < alpha
    }
}

pub(crate) fn clamp_p<T: Real>(raw: T) -> T {
    if raw.is_nan() {
        return raw;
    }
    raw.max(T::min_positive_value()).min(T::one())
}

/// `Xᵢ = Q_F(1 − pᵢ)` with saturation bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed<T> {
    pub values: Vec<T>,
    /// Some `pᵢ` mapped outside the finite range (for example `pᵢ = 1` under
    /// a real-line family) and was replaced by `±T::max_value()`.
    pub saturated: bool,
}

/// Maps every p-value to `Q_F(1 − pᵢ)`. `pᵢ = 1` gives the lower end of the
/// support; infinite values are saturated to the largest finite magnitude.
pub fn transform<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
) -> Result<Transformed<T>> {
    let mut saturated = false;
    let values = p
        .as_slice()
        .iter()
        .map(|&pi| {
            let x = d.upper_quantile(pi)?;
            Ok(if x.is_infinite() {
                saturated = true;
                if x > T::zero() {
                    T::max_value()
                } else {
                    T::min_value()
                }
            } else {
                x
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(Transformed { values, saturated })
}

/// One summand `weight · x` where `x = Q_F(1 − p)` (unsaturated).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term<T> {
    pub weight: T,
    pub x: T,
    pub p: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TailSum<T> {
    pub statistic: T,
    pub ln_statistic: Option<T>,
    pub survival: T,
    pub saturated: bool,
}

/// `S = Σ wᵢxᵢ` and `F̄(S)`, summed in iteration order.
///
/// A summand at `-∞` makes `S = -∞`. When the finite sum overflows, `S` is
/// rebuilt on the log scale and `F̄` evaluated there.
pub(crate) fn tail_sum<T, I>(d: &HeavyTailDistribution<T>, terms: I) -> Result<TailSum<T>>
where
    T: Real,
    I: Iterator<Item = Term<T>> + Clone,
{
    let mut s = T::zero();
    for t in terms.clone() {
        if t.x == T::neg_infinity() {
            return Ok(TailSum {
                statistic: T::min_value(),
                ln_statistic: None,
                survival: T::one(),
                saturated: true,
            });
        }
        s = s + t.weight * t.x;
    }
    if s.is_finite() {
        return Ok(TailSum {
            statistic: s,
            ln_statistic: None,
            survival: d.survival(s)?,
            saturated: false,
        });
    }

    let ln_term = |t: &Term<T>| -> Result<T> {
        let ln_x = if t.x.is_finite() {
            t.x.ln()
        } else {
            d.ln_upper_quantile(t.p)?
        };
        Ok(t.weight.ln() + ln_x)
    };
    let mut shift = T::neg_infinity();
    for t in terms.clone().filter(|t| t.x > T::zero()) {
        shift = shift.max(ln_term(&t)?);
    }
    let scale = (-shift).exp();
    let mut r = T::zero();
    for t in terms {
        r = r + if t.x > T::zero() {
            (ln_term(&t)? - shift).exp()
        } else {
            t.weight * t.x * scale
        };
    }
    if !(r > T::zero()) {
        return Err(Error::Numerical(
            "rescaled sum of transformed p-values is not positive".into(),
        ));
    }
    let ln_s = shift + r.ln();
    Ok(TailSum {
        statistic: T::max_value(),
        ln_statistic: Some(ln_s),
        survival: d.survival_at_ln(ln_s)?,
        saturated: true,
    })
}

fn weighted_terms<'a, T: Real>(
    d: &'a HeavyTailDistribution<T>,
    p: &'a [T],
    w: impl Iterator<Item = T> + Clone + 'a,
) -> Result<Vec<Term<T>>> {
    p.iter()
        .zip(w)
        .map(|(&pi, weight)| {
            Ok(Term {
                weight,
                x: d.upper_quantile(pi)?,
                p: pi,
            })
        })
        .collect()
}

/// Standard test: `S_n = Σ Xᵢ`, combined p-value `n·F̄(S_n)`.
pub fn combine_standard<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
) -> Result<CombinedResult<T>> {
    let terms = weighted_terms(d, p.as_slice(), std::iter::repeat(T::one()))?;
    let sum = tail_sum(d, terms.iter().copied())?;
    let n = from_usize::<T>(p.len());
    Ok(CombinedResult {
        method: MethodKind::Standard,
        statistic: sum.statistic,
        ln_statistic: sum.ln_statistic,
        combined_p: clamp_p(n * sum.survival),
        kappa: Some(n),
        saturated: sum.saturated,
        weights_normalized: false,
    })
}

/// Average test: `M_n = S_n / n`, combined p-value `F̄(M_n)`. Needs a
/// family with tail index 1.
pub fn combine_average<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
) -> Result<CombinedResult<T>> {
    if d.tail_index() != T::one() {
        return Err(Error::MethodMisuse(format!(
            "the average test needs tail index 1, {d} has {}",
            d.tail_index()
        )));
    }
    let n = from_usize::<T>(p.len());
    let w = n.recip();
    let terms = weighted_terms(d, p.as_slice(), std::iter::repeat(w))?;
    let sum = tail_sum(d, terms.iter().copied())?;
    Ok(CombinedResult {
        method: MethodKind::Average,
        statistic: sum.statistic,
        ln_statistic: sum.ln_statistic,
        combined_p: clamp_p(sum.survival),
        kappa: None,
        saturated: sum.saturated,
        weights_normalized: false,
    })
}

/// Weighted test: `S_{n,ω} = Σ ωᵢXᵢ`, combined p-value `κ·F̄(S_{n,ω})` with
/// `κ = Σ ωᵢ^γ`.
pub fn combine_weighted<T: Real>(
    p: &PValueVector<T>,
    w: &WeightVector<T>,
    d: &HeavyTailDistribution<T>,
) -> Result<CombinedResult<T>> {
    w.check_len(p.len())?;
    let kappa = w.kappa(d.tail_index());
    let terms = weighted_terms(d, p.as_slice(), w.as_slice().iter().copied())?;
    let sum = tail_sum(d, terms.iter().copied())?;
    Ok(CombinedResult {
        method: MethodKind::Weighted,
        statistic: sum.statistic,
        ln_statistic: sum.ln_statistic,
        combined_p: clamp_p(kappa * sum.survival),
        kappa: Some(kappa),
        saturated: sum.saturated,
        weights_normalized: false,
    })
}

/// Weighted Bonferroni: statistic `min pᵢ/ωᵢ` with `Σ ωᵢ = 1` (weights are
/// rescaled if needed). Without weights the statistic is `n·min pᵢ`.
pub fn bonferroni<T: Real>(
    p: &PValueVector<T>,
    w: Option<&WeightVector<T>>,
) -> Result<CombinedResult<T>> {
    let (statistic, weights_normalized) = match w {
        None => (from_usize::<T>(p.len()) * p.min(), false),
        Some(w) => {
            w.check_len(p.len())?;
            let (w, normalized) = w.normalized();
            let stat = p
                .as_slice()
                .iter()
                .zip(w.as_slice())
                .map(|(&pi, &wi)| pi / wi)
                .fold(T::infinity(), T::min);
            (stat, normalized)
        }
    };
    Ok(CombinedResult {
        method: MethodKind::Bonferroni,
        statistic,
        ln_statistic: None,
        combined_p: clamp_p(statistic),
        kappa: None,
        saturated: false,
        weights_normalized,
    })
}

/// `Q_F(1 − α/κ)`, or the lower end of the support when `α/κ ≥ 1`.
pub fn rejection_threshold<T: Real>(d: &HeavyTailDistribution<T>, alpha: T, kappa: T) -> Result<T> {
    check_alpha(alpha)?;
    d.upper_quantile((alpha / kappa).min(T::one()))
}

pub(crate) fn check_alpha<T: Real>(alpha: T) -> Result<T> {
    if alpha.is_nan() || alpha <= T::zero() || alpha >= T::one() {
        return Err(Error::domain(format!(
            "significance level must lie in (0, 1), got {}",
            to_f64(alpha)
        )));
    }
    Ok(alpha)
}

/// Bonferroni decision written as `max ωᵢXᵢ > Q_F(1 − α/κ)`, `κ = Σ ωᵢ^γ`.
///
/// Coincides with [`bonferroni`] under the mapped weights
/// [`WeightVector::mapped`] whenever `F̄` is an exact power law (Pareto,
/// log-gamma) or all weights equal one. When `α/κ > 1` the power-law
/// quantile is continued below the support; other families use the lower
/// end of the support there.
pub fn bonferroni_as_max_statistic<T: Real>(
    p: &PValueVector<T>,
    w: &WeightVector<T>,
    d: &HeavyTailDistribution<T>,
    alpha: T,
) -> Result<bool> {
    w.check_len(p.len())?;
    let kappa = w.kappa(d.tail_index());
    let raw_level = check_alpha(alpha)? / kappa;
    let level = raw_level.min(T::one());
    let threshold =
        if raw_level > T::one() && matches!(d.family(), Family::Pareto | Family::LogGamma) {
            // Power-law quantile continued below the support, so that
            // `(ωᵢXᵢ)^γ > κ/α` still reads as `pᵢ < α ωᵢ^γ/κ`.
            raw_level.powf(-d.tail_index().recip())
        } else {
            d.upper_quantile(level)?
        };
    for (&pi, &wi) in p.as_slice().iter().zip(w.as_slice()) {
        let x = d.upper_quantile(pi)?;
        let v = wi * x;
        let exceeds = if v.is_finite() && threshold.is_finite() {
            v > threshold
        } else if v == T::infinity() && threshold > T::zero() {
            // Compare on the log scale; both sides are positive.
            let lhs = wi.ln() + d.ln_upper_quantile(pi)?;
            let rhs = if threshold.is_finite() {
                threshold.ln()
            } else {
                d.ln_upper_quantile(level)?
            };
            lhs > rhs
        } else {
            v > threshold
        };
        if exceeds {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Fisher's method: `−2 Σ ln pᵢ` against the `χ²_{2n}` upper tail.
pub fn fisher<T: Real>(p: &PValueVector<T>) -> Result<CombinedResult<T>> {
    let statistic = p
        .as_slice()
        .iter()
        .fold(T::zero(), |a, &pi| a - (pi.ln() + pi.ln()));
    let half = statistic / (T::one() + T::one());
    let combined = reg_gamma_upper(from_usize::<T>(p.len()), half)?;
    Ok(CombinedResult {
        method: MethodKind::Fisher,
        statistic,
        ln_statistic: None,
        combined_p: clamp_p(combined),
        kappa: None,
        saturated: false,
        weights_normalized: false,
    })
}

/// Benjamini–Hochberg step-up adjusted p-values, in input order.
pub fn bh_adjust<T: Real>(p: &PValueVector<T>) -> Vec<T> {
    let values = p.as_slice();
    let m = from_usize::<T>(values.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_p(values[a], values[b]).then(a.cmp(&b)));
    let mut adjusted = vec![T::one(); values.len()];
    let mut running = T::one();
    for (rank, &idx) in order.iter().enumerate().rev() {
        // m·p/m can round below p.
        let candidate = (m * values[idx] / from_usize::<T>(rank + 1)).max(values[idx]);
        running = running.min(candidate);
        adjusted[idx] = running.min(T::one());
    }
    adjusted
}

/// Ordering for p-values, which are validated as non-NaN.
pub(crate) fn cmp_p<T: Real>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

/// A global test with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CombinationMethod<T> {
    Standard(HeavyTailDistribution<T>),
    Average(HeavyTailDistribution<T>),
    Weighted(HeavyTailDistribution<T>, WeightVector<T>),
    Bonferroni(Option<WeightVector<T>>),
    Fisher,
    /// Rejects when `min pᵢ ≤ cutoff`; the cutoff comes from Monte Carlo
    /// calibration, so there is no combined p-value.
    MinP {
        cutoff: T,
    },
}

impl<T: Real> CombinationMethod<T> {
    pub fn kind(&self) -> MethodKind {
        match self {
            CombinationMethod::Standard(_) => MethodKind::Standard,
            CombinationMethod::Average(_) => MethodKind::Average,
            CombinationMethod::Weighted(..) => MethodKind::Weighted,
            CombinationMethod::Bonferroni(_) => MethodKind::Bonferroni,
            CombinationMethod::Fisher => MethodKind::Fisher,
            CombinationMethod::MinP { .. } => MethodKind::MinP,
        }
    }

    pub fn combine(&self, p: &PValueVector<T>) -> Result<CombinedResult<T>> {
        match self {
            CombinationMethod::Standard(d) => combine_standard(p, d),
            CombinationMethod::Average(d) => combine_average(p, d),
            CombinationMethod::Weighted(d, w) => combine_weighted(p, w, d),
            CombinationMethod::Bonferroni(w) => bonferroni(p, w.as_ref()),
            CombinationMethod::Fisher => fisher(p),
            CombinationMethod::MinP { .. } => Err(Error::MethodMisuse(
                "minP has a calibrated cutoff rather than a combined p-value".into(),
            )),
        }
    }

    pub fn rejects(&self, p: &PValueVector<T>, alpha: T) -> Result<bool> {
        check_alpha(alpha)?;
        match self {
            CombinationMethod::MinP { cutoff } => Ok(p.min() <= *cutoff),
            _ => Ok(self.combine(p)?.rejects(alpha)),
        }
    }

    /// Short label such as `standard:cauchy` or `bonferroni`.
    pub fn label(&self) -> String {
        match self {
            CombinationMethod::Standard(d)
            | CombinationMethod::Average(d)
            | CombinationMethod::Weighted(d, _) => format!("{}:{d}", self.kind()),
            _ => self.kind().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = HeavyTailDistribution<f64>;

    fn pv(v: &[f64]) -> PValueVector<f64> {
        PValueVector::new(v.to_vec()).unwrap()
    }

    fn wv(v: &[f64]) -> WeightVector<f64> {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(PValueVector::<f64>::new(vec![]).is_err());
        assert!(PValueVector::new(vec![0.0]).is_err());
        assert!(PValueVector::new(vec![1.5]).is_err());
        assert!(PValueVector::new(vec![f64::NAN]).is_err());
        assert!(PValueVector::new(vec![1.0]).is_ok());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![f64::INFINITY]).is_err());
        let e = combine_weighted(&pv(&[0.1, 0.2]), &wv(&[1.0]), &D::cauchy()).unwrap_err();
        assert_eq!(
            e,
            Error::Shape {
                p_values: 2,
                weights: 1
            }
        );
    }

    #[test]
    fn transform_examples() {
        let t = transform(&pv(&[0.5, 0.25]), &D::cauchy()).unwrap();
        assert!(t.values[0].abs() < 1e-16);
        assert!((t.values[1] - 1.0).abs() < 1e-15);
        assert!(!t.saturated);
        let t = transform(&pv(&[0.1]), &D::pareto(1.0).unwrap()).unwrap();
        assert!((t.values[0] - 10.0).abs() < 1e-13);
        let t = transform(&pv(&[1.0]), &D::cauchy()).unwrap();
        assert_eq!(t.values[0], f64::MIN);
        assert!(t.saturated);
        let t = transform(&pv(&[1.0]), &D::pareto(2.0).unwrap()).unwrap();
        assert_eq!(t.values[0], 1.0);
    }

    #[test]
    fn standard_examples() {
        let r = combine_standard(&pv(&[0.5, 0.5]), &D::cauchy()).unwrap();
        assert!(r.statistic.abs() < 1e-15);
        assert_eq!(r.combined_p, 1.0);
        for d in [
            D::cauchy(),
            D::levy(),
            D::pareto(1.5).unwrap(),
            D::student_t(3.0).unwrap(),
        ] {
            let r = combine_standard(&pv(&[0.05]), &d).unwrap();
            assert!((r.combined_p - 0.05).abs() < 1e-13, "{d}");
        }
        // mpmath: S = tan(0.49π) = 31.8205159537739297,
        // 2·atan(1/S)/π = 0.0200000000000000178
        let r = combine_standard(&pv(&[0.01, 0.5]), &D::cauchy()).unwrap();
        assert!((r.statistic - 31.8205159537739297).abs() < 1e-12);
        assert!((r.combined_p - 0.0200000000000000178).abs() < 1e-16);
        assert!(r.rejects(0.05));
        assert!(!r.rejects(0.01));
    }

    #[test]
    fn cauchy_p_one_saturates() {
        let r = combine_standard(&pv(&[1.0, 0.001]), &D::cauchy()).unwrap();
        assert!(r.saturated);
        assert_eq!(r.statistic, f64::MIN);
        assert_eq!(r.combined_p, 1.0);
    }

    #[test]
    fn average_examples() {
        let r = combine_average(&pv(&[0.5, 0.5]), &D::cauchy()).unwrap();
        assert_eq!(r.combined_p, 0.5);
        for n in 1..8 {
            let r = combine_average(&pv(&vec![0.0123; n]), &D::cauchy()).unwrap();
            assert!((r.combined_p - 0.0123).abs() < 1e-15);
        }
        // (50 + 1/0.98)/2 = 25.5102040816326530; reciprocal 0.0392
        let r = combine_average(&pv(&[0.02, 0.98]), &D::pareto(1.0).unwrap()).unwrap();
        assert!((r.statistic - 25.5102040816326530).abs() < 1e-12);
        assert!((r.combined_p - 0.0392).abs() < 1e-15);
        let e = combine_average(&pv(&[0.1]), &D::levy()).unwrap_err();
        assert!(matches!(e, Error::MethodMisuse(_)));
    }

    #[test]
    fn weighted_examples() {
        let p = pv(&[0.5, 0.5]);
        let a = combine_weighted(&p, &wv(&[1.0, 1.0]), &D::cauchy()).unwrap();
        let b = combine_standard(&p, &D::cauchy()).unwrap();
        assert_eq!(a.combined_p, b.combined_p);
        assert_eq!(a.statistic, b.statistic);
        let r = combine_weighted(&p, &wv(&[0.5, 0.5]), &D::cauchy()).unwrap();
        assert_eq!(r.combined_p, 0.5);
        let r =
            combine_weighted(&pv(&[0.1, 0.5]), &wv(&[2.0, 1.0]), &D::pareto(1.0).unwrap()).unwrap();
        assert!((r.statistic - 22.0).abs() < 1e-12);
        assert_eq!(r.kappa, Some(3.0));
        assert!((r.combined_p - 3.0 / 22.0).abs() < 1e-15);
    }

    #[test]
    fn bonferroni_examples() {
        let r = bonferroni(&pv(&[0.01, 0.04, 0.9]), None).unwrap();
        assert!((r.combined_p - 0.03).abs() < 1e-17);
        let r = bonferroni(&pv(&[0.01, 0.04, 0.9]), Some(&wv(&[1.0, 1.0, 1.0]))).unwrap();
        assert!((r.combined_p - 0.03).abs() < 1e-16);
        assert!(r.weights_normalized);
        let r = bonferroni(&pv(&[0.09, 0.02]), Some(&wv(&[0.9, 0.1]))).unwrap();
        assert!((r.combined_p - 0.1).abs() < 1e-16);
        assert!(!r.weights_normalized);
        let r = bonferroni(&pv(&[0.5, 0.5]), None).unwrap();
        assert_eq!(r.combined_p, 1.0);
    }

    #[test]
    fn max_statistic_examples() {
        let w = wv(&[1.0, 1.0]);
        assert!(bonferroni_as_max_statistic(&pv(&[0.01, 0.5]), &w, &D::cauchy(), 0.05).unwrap());
        assert!(!bonferroni_as_max_statistic(&pv(&[0.03, 0.5]), &w, &D::cauchy(), 0.05).unwrap());
        // α/κ ≥ 1: the threshold falls to the support bound, here -∞.
        let w = wv(&[0.1, 0.1]);
        assert_eq!(
            rejection_threshold(&D::cauchy(), 0.5, 0.2).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(bonferroni_as_max_statistic(&pv(&[0.9, 0.9]), &w, &D::cauchy(), 0.5).unwrap());
    }

    #[test]
    fn max_statistic_survives_overflow() {
        // Log-Cauchy quantiles overflow for p below about 4.5e-4.
        let d = D::log_cauchy();
        let w = wv(&[1.0, 1.0, 1.0]);
        let p = pv(&[1e-6, 0.5, 0.5]);
        assert!(bonferroni_as_max_statistic(&p, &w, &d, 0.05).unwrap());
        let p = pv(&[1e-4, 0.5, 0.5]);
        // 3e-4 < 1e-3 but not < 1e-4.
        assert!(bonferroni_as_max_statistic(&p, &w, &d, 1e-3).unwrap());
        assert!(!bonferroni_as_max_statistic(&p, &w, &d, 1e-4).unwrap());
    }

    #[test]
    fn overflowing_sums_use_log_scale() {
        let d = D::log_cauchy();
        let r = combine_standard(&pv(&[1e-6, 0.3]), &d).unwrap();
        assert!(r.saturated);
        let ln_s = r.ln_statistic.unwrap();
        // The largest term dominates: S ≈ Q(1 − 1e-6).
        let ln_top = d.ln_upper_quantile(1e-6).unwrap();
        assert!((ln_s - ln_top).abs() < 1e-12);
        assert!((r.combined_p - 2e-6).abs() < 1e-12);
        // Lévy and small-γ Pareto overflow long before their tails vanish.
        let r = combine_standard(&pv(&[1e-200, 1e-200]), &D::levy()).unwrap();
        assert!(r.saturated);
        // S = 2x with F̄(x) = 1e-200 and γ = ½, so F̄(S) ≈ 1e-200/√2.
        let want = 2.0 * 1e-200 / 2f64.sqrt();
        assert!(((r.combined_p - want) / want).abs() < 1e-9);
    }

    #[test]
    fn fisher_examples() {
        let r = fisher(&pv(&[0.2])).unwrap();
        assert!((r.combined_p - 0.2).abs() < 1e-15);
        assert_eq!(fisher(&pv(&[1.0, 1.0])).unwrap().combined_p, 1.0);
        // x = -ln 0.0025; (1 + x)e^{-x} by mpmath
        let r = fisher(&pv(&[0.05, 0.05])).unwrap();
        assert!((r.statistic - 11.98292909421596375).abs() < 1e-13);
        assert!((r.combined_p - 0.01747866136776995).abs() < 1e-16);
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh_adjust(&pv(&[0.01, 0.02, 0.03, 0.04])), vec![0.04; 4]);
        assert_eq!(bh_adjust(&pv(&[0.37])), vec![0.37]);
        let a = bh_adjust(&pv(&[1.0, 0.001]));
        assert_eq!(a, vec![1.0, 0.002]);
        let a = bh_adjust(&pv(&[0.04, 0.01, 0.5]));
        assert!((a[0] - 0.06).abs() < 1e-16 && (a[1] - 0.03).abs() < 1e-16 && a[2] == 0.5);
    }

    #[test]
    fn method_enum_dispatch() {
        let p = pv(&[0.01, 0.5]);
        let m = CombinationMethod::Standard(D::cauchy());
        assert_eq!(m.label(), "standard:cauchy");
        assert!(m.rejects(&p, 0.05).unwrap());
        let m = CombinationMethod::MinP { cutoff: 0.02 };
        assert!(m.rejects(&p, 0.05).unwrap());
        assert!(m.combine(&p).is_err());
        assert!(m.rejects(&p, 1.0).is_err());
        assert_eq!("Fisher".parse::<MethodKind>().unwrap(), MethodKind::Fisher);
        assert!("harmonic".parse::<MethodKind>().is_err());
    }

    #[test]
    fn max_statistic_with_small_kappa() {
        // κ = 0.1^1.5 ≈ 0.0316 < α, so α/κ > 1.
        let d = D::pareto(1.5).unwrap();
        let w = wv(&[0.1]);
        let (mapped, _) = w.mapped(1.5);
        for p in [0.9, 0.2, 0.05] {
            let direct = bonferroni(&pv(&[p]), Some(&mapped)).unwrap().rejects(0.3);
            assert_eq!(
                bonferroni_as_max_statistic(&pv(&[p]), &w, &d, 0.3).unwrap(),
                direct
            );
        }
    }
}
