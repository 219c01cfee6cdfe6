//! Regularly varying tailed distributions used to transform p-values.
//!
//! Each family exposes survival, CDF, quantile, tail index and the lower end
//! of its support. Upper-tail work goes through [`HeavyTailDistribution::upper_quantile`],
//! which evaluates `Q(1 − p)` directly from `p` so tiny p-values keep their
//! precision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::special::{
    find_root, log_gamma, normal_cdf_pair, normal_quantile, normal_two_sided_mass, reg_beta,
    reg_gamma_lower, reg_gamma_upper, Probability, RootBracket,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cauchy,
    LogCauchy,
    Levy,
    Pareto,
    Frechet,
    InverseGamma,
    LogGamma,
    StudentT,
    TruncatedT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Truncation<T> {
    p0: T,
    point: T,
    parent_survival: T,
}

/// A member of one of the nine heavy-tailed families.
///
/// `gamma` is the free shape parameter where the family has one (tail index
/// for Pareto, Fréchet, inverse gamma and log-gamma; degrees of freedom for
/// the t families). Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeavyTailDistribution<T> {
    family: Family,
    gamma: T,
    truncation: Option<Truncation<T>>,
}

fn check_shape<T: Real>(gamma: T) -> Result<T> {
    if gamma.is_nan() || gamma <= T::zero() || gamma.is_infinite() {
        return Err(Error::domain(format!(
            "shape parameter must be positive and finite, got {}",
            to_f64(gamma)
        )));
    }
    Ok(gamma)
}

impl<T: Real> HeavyTailDistribution<T> {
    fn fixed(family: Family, gamma: f64) -> Self {
        HeavyTailDistribution {
            family,
            gamma: lit(gamma),
            truncation: None,
        }
    }

    fn shaped(family: Family, gamma: T) -> Result<Self> {
        Ok(HeavyTailDistribution {
            family,
            gamma: check_shape(gamma)?,
            truncation: None,
        })
    }

    pub fn cauchy() -> Self {
        Self::fixed(Family::Cauchy, 1.0)
    }

    pub fn log_cauchy() -> Self {
        Self::fixed(Family::LogCauchy, 1.0)
    }

    pub fn levy() -> Self {
        Self::fixed(Family::Levy, 0.5)
    }

    pub fn pareto(gamma: T) -> Result<Self> {
        Self::shaped(Family::Pareto, gamma)
    }

    pub fn frechet(gamma: T) -> Result<Self> {
        Self::shaped(Family::Frechet, gamma)
    }

    pub fn inverse_gamma(gamma: T) -> Result<Self> {
        Self::shaped(Family::InverseGamma, gamma)
    }

    /// Survival `x^{-γ}` on `[1, ∞)`.
    pub fn log_gamma(gamma: T) -> Result<Self> {
        Self::shaped(Family::LogGamma, gamma)
    }

    pub fn student_t(gamma: T) -> Result<Self> {
        Self::shaped(Family::StudentT, gamma)
    }

    /// Student t with `gamma` degrees of freedom conditioned on `X ≥ c`,
    /// where `c` is the `1 − p0` quantile of the untruncated t.
    pub fn truncated_t(gamma: T, p0: T) -> Result<Self> {
        let gamma = check_shape(gamma)?;
        let point = truncation_point(gamma, p0)?;
        let parent_survival = t_survival(point, gamma)?;
        Ok(HeavyTailDistribution {
            family: Family::TruncatedT,
            gamma,
            truncation: Some(Truncation {
                p0,
                point,
                parent_survival,
            }),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Shape parameter as given at construction (1 for Cauchy and
    /// log-Cauchy, ½ for Lévy).
    pub fn shape(&self) -> T {
        self.gamma
    }

    pub fn truncation_threshold(&self) -> Option<T> {
        self.truncation.map(|t| t.p0)
    }

    pub fn truncation_point(&self) -> Option<T> {
        self.truncation.map(|t| t.point)
    }

    /// Index γ of regular variation: `F̄(xy)/F̄(x) → y^{-γ}`.
    pub fn tail_index(&self) -> T {
        match self.family {
            Family::Cauchy => T::one(),
            Family::LogCauchy => T::zero(),
            Family::Levy => lit(0.5),
            _ => self.gamma,
        }
    }

    pub fn support_lower_bound(&self) -> T {
        match self.family {
            Family::Cauchy | Family::StudentT => T::neg_infinity(),
            Family::LogCauchy | Family::Levy | Family::Frechet | Family::InverseGamma => T::zero(),
            Family::Pareto | Family::LogGamma => T::one(),
            Family::TruncatedT => self.trunc().point,
        }
    }

    /// Whether the support is bounded below by zero or more.
    pub fn has_positive_support(&self) -> bool {
        self.support_lower_bound() >= T::zero()
    }

    fn trunc(&self) -> Truncation<T> {
        self.truncation
            .expect("truncated t always carries its truncation data")
    }

    fn check_arg(x: T) -> Result<()> {
        if x.is_nan() {
            return Err(Error::domain("distribution evaluated at NaN"));
        }
        Ok(())
    }

    /// `F̄(x) = P(X > x)`.
    pub fn survival(&self, x: T) -> Result<T> {
        Self::check_arg(x)?;
        let one = T::one();
        let v = match self.family {
            Family::Cauchy => cauchy_survival(x),
            Family::StudentT => t_survival(x, self.gamma)?,
            Family::LogCauchy => {
                if x <= T::zero() {
                    one
                } else {
                    cauchy_survival(x.ln())
                }
            }
            Family::Levy => {
                if x <= T::zero() {
                    one
                } else {
                    normal_two_sided_mass(x.sqrt().recip())
                }
            }
            Family::Pareto | Family::LogGamma => {
                if x <= one {
                    one
                } else {
                    (-self.gamma * x.ln()).exp()
                }
            }
            Family::Frechet => {
                if x <= T::zero() {
                    one
                } else {
                    -(-(-self.gamma * x.ln()).exp()).exp_m1()
                }
            }
            Family::InverseGamma => {
                if x <= T::zero() {
                    one
                } else {
                    reg_gamma_lower(self.gamma, x.recip())?
                }
            }
            Family::TruncatedT => {
                let tr = self.trunc();
                if x <= tr.point {
                    one
                } else {
                    (t_survival(x, self.gamma)? / tr.parent_survival).min(one)
                }
            }
        };
        Ok(v.max(T::zero()).min(one))
    }

    /// `F(x) = P(X ≤ x)`, evaluated directly so the lower tail keeps its
    /// relative accuracy.
    pub fn cdf(&self, x: T) -> Result<T> {
        Self::check_arg(x)?;
        let zero = T::zero();
        let one = T::one();
        let v = match self.family {
            Family::Cauchy => cauchy_survival(-x),
            Family::StudentT => t_survival(-x, self.gamma)?,
            Family::LogCauchy => {
                if x <= zero {
                    zero
                } else {
                    cauchy_survival(-x.ln())
                }
            }
            Family::Levy => {
                if x <= zero {
                    zero
                } else {
                    lit::<T>(2.0) * normal_cdf_pair(x.sqrt().recip()).1
                }
            }
            Family::Pareto | Family::LogGamma => {
                if x <= one {
                    zero
                } else {
                    -(-self.gamma * x.ln()).exp_m1()
                }
            }
            Family::Frechet => {
                if x <= zero {
                    zero
                } else {
                    (-(-self.gamma * x.ln()).exp()).exp()
                }
            }
            Family::InverseGamma => {
                if x <= zero {
                    zero
                } else {
                    reg_gamma_upper(self.gamma, x.recip())?
                }
            }
            Family::TruncatedT => {
                let tr = self.trunc();
                if x <= tr.point {
                    zero
                } else {
                    let sf = t_survival(x, self.gamma)?;
                    (tr.parent_survival - sf) / tr.parent_survival
                }
            }
        };
        Ok(v.max(zero).min(one))
    }

    /// `Q(u) = inf{x : u ≤ F(x)}` for `0 < u < 1`.
    pub fn quantile(&self, u: T) -> Result<T> {
        let u = Probability::new_open(u)?.get();
        let half = lit::<T>(0.5);
        match self.family {
            Family::Cauchy => Ok(if u < half {
                -cauchy_upper_quantile(u)
            } else {
                cauchy_upper_quantile(T::one() - u)
            }),
            Family::StudentT => Ok(if u < half {
                -t_upper_quantile(u, self.gamma)?
            } else {
                t_upper_quantile(T::one() - u, self.gamma)?
            }),
            Family::LogCauchy => Ok(self.quantile_via_log(u)),
            Family::Levy => {
                let y = normal_quantile(u * half)?;
                Ok((y * y).recip())
            }
            Family::Pareto | Family::LogGamma => Ok((-(-u).ln_1p() / self.gamma).exp()),
            Family::Frechet => Ok((-u.ln()).powf(-self.gamma.recip())),
            Family::InverseGamma => {
                if u <= half {
                    self.invert_lower(u)
                } else {
                    self.invert_upper(T::one() - u)
                }
            }
            Family::TruncatedT => {
                if u > half {
                    self.upper_quantile(T::one() - u)
                } else {
                    let tr = self.trunc();
                    let parent_p = tr.parent_survival * (T::one() - u);
                    Ok(t_upper_quantile(parent_p, self.gamma)?.max(tr.point))
                }
            }
        }
    }

    fn quantile_via_log(&self, u: T) -> T {
        let half = lit::<T>(0.5);
        let lx = if u < half {
            -cauchy_upper_quantile(u)
        } else {
            cauchy_upper_quantile(T::one() - u)
        };
        lx.exp()
    }

    /// `Q(1 − p)` for `0 < p ≤ 1`, computed without forming `1 − p`.
    ///
    /// `p = 1` yields the lower end of the support, which is `-∞` for the
    /// Cauchy and Student t families.
    pub fn upper_quantile(&self, p: T) -> Result<T> {
        if p.is_nan() || p <= T::zero() || p > T::one() {
            return Err(Error::domain(format!(
                "upper-tail probability must lie in (0, 1], got {}",
                to_f64(p)
            )));
        }
        if p == T::one() {
            return Ok(self.support_lower_bound());
        }
        let half = lit::<T>(0.5);
        match self.family {
            Family::Cauchy => Ok(cauchy_upper_quantile(p)),
            Family::StudentT => t_upper_quantile(p, self.gamma),
            Family::LogCauchy => Ok(cauchy_upper_quantile(p).exp()),
            Family::Levy => {
                if p > half {
                    return self.quantile(T::one() - p);
                }
                let y = levy_inverse_mass(p)?;
                Ok((y * y).recip())
            }
            Family::Pareto | Family::LogGamma => Ok((-p.ln() / self.gamma).exp()),
            Family::Frechet => Ok((-(-p).ln_1p()).powf(-self.gamma.recip())),
            Family::InverseGamma => {
                if p <= half {
                    self.invert_upper(p)
                } else {
                    self.invert_lower(T::one() - p)
                }
            }
            Family::TruncatedT => {
                let tr = self.trunc();
                let x = t_upper_quantile(p * tr.parent_survival, self.gamma)?;
                Ok(x.max(tr.point))
            }
        }
    }

    /// `ln Q(1 − p)` for `0 < p ≤ 1`, finite even where `Q(1 − p)` itself
    /// overflows. Only defined where `Q(1 − p) > 0`.
    pub fn ln_upper_quantile(&self, p: T) -> Result<T> {
        let g = self.gamma;
        let v = match self.family {
            Family::LogCauchy => {
                Probability::new(p)?;
                if p == T::zero() {
                    return Err(Error::domain("upper-tail probability must be positive"));
                }
                if p == T::one() {
                    return Ok(T::neg_infinity());
                }
                return Ok(cauchy_upper_quantile(p));
            }
            Family::Pareto | Family::LogGamma => {
                self.upper_quantile(p)?;
                -p.ln() / g
            }
            Family::Frechet => {
                self.upper_quantile(p)?;
                -(-(-p).ln_1p()).ln() / g
            }
            Family::Cauchy if p > T::zero() && p < lit(0.25) => -(T::PI() * p).tan().ln(),
            Family::Levy if p > T::zero() && p <= lit(0.5) => {
                lit::<T>(-2.0) * levy_inverse_mass(p)?.ln()
            }
            _ => {
                let x = self.upper_quantile(p)?;
                if x.is_infinite() && x > T::zero() {
                    self.ln_invert_upper(p)?
                } else {
                    x.ln()
                }
            }
        };
        if v.is_nan() {
            return Err(Error::domain(format!(
                "{self} has a non-positive quantile at upper-tail probability {}",
                to_f64(p)
            )));
        }
        Ok(v)
    }

    /// `F̄(e^{lx})`, evaluated without forming `e^{lx}` where that would
    /// overflow.
    pub fn survival_at_ln(&self, lx: T) -> Result<T> {
        Self::check_arg(lx)?;
        let g = self.gamma;
        let far = lit::<T>(600.0);
        let v = match self.family {
            Family::LogCauchy => cauchy_survival(lx),
            Family::Pareto | Family::LogGamma => {
                if lx <= T::zero() {
                    T::one()
                } else {
                    (-g * lx).exp()
                }
            }
            _ if lx < far => return self.survival(lx.exp()),
            // Leading terms of each expansion; the next ones are below e^{-600}
            // relative.
            Family::Cauchy => (-lx - T::PI().ln()).exp(),
            Family::Frechet => (-g * lx).exp(),
            Family::Levy => (-lx * lit(0.5) + (T::FRAC_2_PI()).sqrt().ln()).exp(),
            Family::InverseGamma => (-g * lx - log_gamma(g + T::one())?).exp(),
            Family::StudentT => t_survival_far(lx, g)?,
            Family::TruncatedT => t_survival_far(lx, g)? / self.trunc().parent_survival,
        };
        Ok(v.max(T::zero()).min(T::one()))
    }

    /// `F(e^{lx})`.
    pub fn cdf_at_ln(&self, lx: T) -> Result<T> {
        Self::check_arg(lx)?;
        match self.family {
            Family::LogCauchy => Ok(cauchy_survival(-lx)),
            _ => self.cdf(lx.exp()),
        }
    }

    /// Solves `F̄(e^{lx}) = p` for quantiles beyond the floating-point range.
    fn ln_invert_upper(&self, p: T) -> Result<T> {
        let sf = |lx: T| self.survival_at_ln(lx).unwrap_or_else(|_| T::nan());
        let hi = grow_up(T::zero(), |lx| sf(lx) <= p)?;
        let target = p.ln();
        solve_monotone(|lx| safe_ln(sf(lx)) - target, T::zero(), hi)
    }

    fn survival_unchecked(&self, x: T) -> T {
        self.survival(x).unwrap_or_else(|_| T::nan())
    }

    fn cdf_unchecked(&self, x: T) -> T {
        self.cdf(x).unwrap_or_else(|_| T::nan())
    }

    /// Solves `F̄(x) = p` on a bracket grown geometrically from the support.
    fn invert_upper(&self, p: T) -> Result<T> {
        let lower = self.support_lower_bound().max(T::zero());
        let Ok(hi) = grow_up(lower, |x| self.survival_unchecked(x) <= p) else {
            return Ok(T::infinity());
        };
        let lo = grow_down(lower, hi, |x| self.survival_unchecked(x) >= p)?;
        let target = p.ln();
        solve_monotone(|x| safe_ln(self.survival_unchecked(x)) - target, lo, hi)
    }

    /// Solves `F(x) = u`.
    fn invert_lower(&self, u: T) -> Result<T> {
        let lower = self.support_lower_bound().max(T::zero());
        let hi = grow_up(lower, |x| self.cdf_unchecked(x) >= u)?;
        let lo = grow_down(lower, hi, |x| self.cdf_unchecked(x) <= u)?;
        let target = u.ln();
        solve_monotone(|x| safe_ln(self.cdf_unchecked(x)) - target, lo, hi)
    }
}

fn safe_ln<T: Real>(v: T) -> T {
    if v > T::zero() {
        v.ln()
    } else {
        // Below every representable log-probability.
        T::min_positive_value().ln() * lit(2.0)
    }
}

const MAX_BRACKET_STEPS: usize = 4096;

/// Smallest `lower + 2^k` (k ≥ 0) satisfying `done`.
fn grow_up<T: Real>(lower: T, mut done: impl FnMut(T) -> bool) -> Result<T> {
    let mut step = T::one();
    for _ in 0..MAX_BRACKET_STEPS {
        let x = lower + step;
        if x.is_infinite() {
            break;
        }
        if done(x) {
            return Ok(x);
        }
        step = step * lit(2.0);
    }
    Err(Error::Numerical(
        "could not bracket quantile from above".into(),
    ))
}

/// Largest `lower + hi·2^{-k}` satisfying `done`, or `lower` itself.
fn grow_down<T: Real>(lower: T, hi: T, mut done: impl FnMut(T) -> bool) -> Result<T> {
    let mut step = hi - lower;
    for _ in 0..MAX_BRACKET_STEPS {
        step = step * lit(0.5);
        let x = lower + step;
        if x <= lower {
            return Ok(lower);
        }
        if done(x) {
            return Ok(x);
        }
    }
    Ok(lower)
}

fn solve_monotone<T: Real>(f: impl FnMut(T) -> T, lo: T, hi: T) -> Result<T> {
    if lo == hi {
        return Ok(lo);
    }
    let bracket = RootBracket::with_tolerances(
        lo,
        hi,
        lit::<T>(4.0) * T::epsilon(),
        T::min_positive_value(),
        400,
    )?;
    find_root(f, &bracket)
}

/// Cauchy survival, evaluated from whichever side avoids cancellation.
fn cauchy_survival<T: Real>(x: T) -> T {
    if x > T::zero() {
        x.recip().atan() / T::PI()
    } else {
        lit::<T>(0.5) - x.atan() / T::PI()
    }
}

/// Cauchy `Q(1 − p)`.
fn cauchy_upper_quantile<T: Real>(p: T) -> T {
    let pi = T::PI();
    if p < lit(0.25) {
        (pi * p).tan().recip()
    } else if p <= lit(0.75) {
        (pi * (lit::<T>(0.5) - p)).tan()
    } else {
        -(pi * (T::one() - p)).tan().recip()
    }
}

/// `y` with `2Φ(y) − 1 = p`, for `0 < p ≤ ½`.
fn levy_inverse_mass<T: Real>(p: T) -> Result<T> {
    let sqrt_pi = T::PI().sqrt();
    let mut y = if p <= lit(1e-3) {
        // Inverse error function series: erf(z) = p.
        let w = p * sqrt_pi * lit(0.5);
        let w2 = w * w;
        let z = w
            * (T::one()
                + w2 * (lit::<T>(1.0 / 3.0)
                    + w2 * (lit::<T>(7.0 / 30.0) + w2 * lit::<T>(127.0 / 630.0))));
        z * T::SQRT_2()
    } else {
        normal_quantile(lit::<T>(0.5) + p * lit(0.5))?
    };
    // Newton on the two-sided mass; its derivative is 2φ(y).
    for _ in 0..2 {
        let err = normal_two_sided_mass(y) - p;
        let pdf = (-y * y * lit(0.5)).exp() / (T::PI() * lit(2.0)).sqrt();
        y = y - err / (lit::<T>(2.0) * pdf);
    }
    Ok(y)
}

/// Survival function of Student's t with `nu` degrees of freedom.
pub fn t_survival<T: Real>(x: T, nu: T) -> Result<T> {
    if x.is_nan() || nu.is_nan() || nu <= T::zero() {
        return Err(Error::domain(format!(
            "t survival needs finite dof > 0, got x = {}, nu = {}",
            to_f64(x),
            to_f64(nu)
        )));
    }
    if x < T::zero() {
        return Ok(T::one() - t_survival(-x, nu)?);
    }
    if x == T::zero() {
        return Ok(lit(0.5));
    }
    if nu == T::one() {
        return Ok(cauchy_survival(x));
    }
    if nu == lit(2.0) {
        if x.is_infinite() {
            return Ok(T::zero());
        }
        let s = (x * x + lit(2.0)).sqrt();
        return Ok((s * (s + x)).recip());
    }
    let half = lit::<T>(0.5);
    if x * x < nu {
        // Near the centre: F̄ = ½ − ½·I_{x²/(x²+ν)}(½, ν/2).
        let w = x * x / (x * x + nu);
        return Ok(half - half * reg_beta(w, half, nu * half)?);
    }
    if x > lit(1e100) {
        return t_survival_far(x.ln(), nu);
    }
    let z = nu / (x * x + nu);
    Ok(half * reg_beta(z, nu * half, half)?)
}

/// t survival at `e^{lx}` for `lx` large enough that `x² + ν` rounds to `x²`.
/// Uses `I_z(a, ½) ≈ z^a / (a·B(a, ½))` with `z = ν e^{-2 lx}`.
fn t_survival_far<T: Real>(lx: T, nu: T) -> Result<T> {
    let a = nu * lit(0.5);
    let half = lit::<T>(0.5);
    let ln_z = nu.ln() - lit::<T>(2.0) * lx;
    let ln_beta = log_gamma(a)? + log_gamma(half)? - log_gamma(a + half)?;
    Ok((half.ln() + a * ln_z - a.ln() - ln_beta).exp())
}

/// CDF of Student's t with `nu` degrees of freedom.
pub fn t_cdf<T: Real>(x: T, nu: T) -> Result<T> {
    t_survival(-x, nu)
}

/// Student t `Q(1 − p)` for `0 < p < 1`.
pub fn t_upper_quantile<T: Real>(p: T, nu: T) -> Result<T> {
    if p.is_nan() || p <= T::zero() || p >= T::one() {
        return Err(Error::domain(format!(
            "t quantile needs p in (0, 1), got {}",
            to_f64(p)
        )));
    }
    let half = lit::<T>(0.5);
    if p > half {
        return Ok(-t_upper_quantile(T::one() - p, nu)?);
    }
    if p == half {
        return Ok(T::zero());
    }
    if nu == T::one() {
        return Ok(cauchy_upper_quantile(p));
    }
    if nu == lit(2.0) {
        return Ok((T::one() - lit::<T>(2.0) * p) / (lit::<T>(2.0) * p * (T::one() - p)).sqrt());
    }
    let sf = |x: T| t_survival(x, nu).unwrap_or_else(|_| T::nan());
    let Ok(hi) = grow_up(T::zero(), |x| sf(x) <= p) else {
        // Beyond the largest finite value.
        return Ok(T::infinity());
    };
    let lo = grow_down(T::zero(), hi, |x| sf(x) >= p)?;
    let target = p.ln();
    solve_monotone(|x| safe_ln(sf(x)) - target, lo, hi)
}

/// Left truncation point `c = Q_t(1 − p0)` for a t with `gamma` degrees of
/// freedom.
pub fn truncation_point<T: Real>(gamma: T, p0: T) -> Result<T> {
    check_shape(gamma)?;
    let p0 = Probability::new_open(p0)?.get();
    t_upper_quantile(p0, gamma)
}

impl<T: Real> fmt::Display for HeavyTailDistribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Cauchy => write!(f, "cauchy"),
            Family::LogCauchy => write!(f, "log_cauchy"),
            Family::Levy => write!(f, "levy"),
            Family::Pareto => write!(f, "pareto:{}", self.gamma),
            Family::Frechet => write!(f, "frechet:{}", self.gamma),
            Family::InverseGamma => write!(f, "inv_gamma:{}", self.gamma),
            Family::LogGamma => write!(f, "log_gamma:{}", self.gamma),
            Family::StudentT => write!(f, "t:{}", self.gamma),
            Family::TruncatedT => write!(f, "trunc_t:{}:{}", self.gamma, self.trunc().p0),
        }
    }
}

impl<T: Real + FromStr> FromStr for HeavyTailDistribution<T> {
    type Err = Error;

    /// Parses `cauchy`, `log_cauchy`, `levy`, `pareto:γ`, `frechet:γ`,
    /// `inv_gamma:γ`, `log_gamma:γ`, `t:γ` or `trunc_t:γ:p0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |i: usize| -> Result<T> {
            let raw = parts.get(i).ok_or_else(|| {
                Error::domain(format!("distribution `{s}` is missing a parameter"))
            })?;
            raw.parse::<T>()
                .map_err(|_| Error::domain(format!("bad number `{raw}` in distribution `{s}`")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() != n {
                return Err(Error::domain(format!(
                    "distribution `{s}` expects {} parameter(s)",
                    n - 1
                )));
            }
            Ok(())
        };
        match parts[0].to_ascii_lowercase().as_str() {
            "cauchy" => arity(1).map(|_| Self::cauchy()),
            "log_cauchy" => arity(1).map(|_| Self::log_cauchy()),
            "levy" => arity(1).map(|_| Self::levy()),
            "pareto" => arity(2).and_then(|_| Self::pareto(num(1)?)),
            "frechet" => arity(2).and_then(|_| Self::frechet(num(1)?)),
            "inv_gamma" => arity(2).and_then(|_| Self::inverse_gamma(num(1)?)),
            "log_gamma" => arity(2).and_then(|_| Self::log_gamma(num(1)?)),
            "t" => arity(2).and_then(|_| Self::student_t(num(1)?)),
            "trunc_t" => arity(3).and_then(|_| Self::truncated_t(num(1)?, num(2)?)),
            other => Err(Error::domain(format!("unknown distribution `{other}`"))),
        }
    }
}
