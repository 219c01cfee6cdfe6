//! Closed testing of the standard combination test: family-wise error
//! control for the individual hypotheses, via an O(n²) shortcut and a 2ⁿ
//! brute-force reference.

use crate::combine::{check_alpha, clamp_p, cmp_p, tail_sum, PValueVector, Term};
use crate::distributions::HeavyTailDistribution;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Real};

/// Largest family the brute-force enumeration accepts.
pub const BRUTE_FORCE_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedTestingResult<T> {
    /// `P*ᵢ = max_{I ∋ i} P_I`, in input order.
    pub adjusted_p: Vec<T>,
    /// In input order.
    pub rejected: Vec<bool>,
    /// 1-based rank `J` in ascending p-value order: exactly the `J − 1`
    /// smallest p-values are rejected.
    pub rejection_cut: usize,
}

struct Sorted<T> {
    /// Input indices in ascending p-value order, ties by index.
    order: Vec<usize>,
    p: Vec<T>,
    /// `x_(r) = H(p_(r))`, unsaturated.
    x: Vec<T>,
}

fn sort_and_transform<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
) -> Result<Sorted<T>> {
    let values = p.as_slice();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_p(values[a], values[b]).then(a.cmp(&b)));
    let p: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let x = p
        .iter()
        .map(|&pi| d.upper_quantile(pi))
        .collect::<Result<Vec<T>>>()?;
    Ok(Sorted { order, p, x })
}

fn unit<T: Real>(x: T, p: T) -> Term<T> {
    Term {
        weight: T::one(),
        x,
        p,
    }
}

/// Subset p-value `|I|·F̄(S)` for a subset whose descending-p fold is
/// `partial + last`; falls back to the explicit terms on overflow.
fn subset_p<T, I>(
    d: &HeavyTailDistribution<T>,
    size: usize,
    folded: T,
    has_neg_inf: bool,
    terms: I,
) -> Result<T>
where
    T: Real,
    I: Iterator<Item = Term<T>> + Clone,
{
    let k = from_usize::<T>(size);
    if has_neg_inf {
        return Ok(clamp_p(k));
    }
    let survival = if folded.is_finite() {
        d.survival(folded)?
    } else {
        tail_sum(d, terms)?.survival
    };
    Ok(clamp_p(k * survival))
}

/// Closed testing through the step-down shortcut.
///
/// With `x_(1) ≥ … ≥ x_(n)` the transformed p-values in ascending p order,
/// thresholds `c₁ = H(α)` and `c_k = H(α/k) − Σ_{j=n−k+2}^{n} x_(j)`, the
/// cut `J` is the first rank with `x_(J) < max(c₁, …, c_{n−J+1})`, or
/// `n + 1` when there is none. Adjusted p-values maximise
/// `k·F̄(max{x_(r), x_(n−k+1)} + Σ_{j=n−k+2}^{n} x_(j))` over `k`.
pub fn closed_test_shortcut<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
    alpha: T,
) -> Result<ClosedTestingResult<T>> {
    check_alpha(alpha)?;
    let s = sort_and_transform(p, d)?;
    let n = s.p.len();
    let cut = step_down_cut(d, &s, alpha)?;

    // tails[k] = fold of x_(n), …, x_(n−k+2), i.e. the k − 1 largest p-values.
    let mut tails = Vec::with_capacity(n + 1);
    let mut neg_inf = Vec::with_capacity(n + 1);
    tails.push(T::zero());
    neg_inf.push(false);
    let mut acc = T::zero();
    let mut any_neg = false;
    for j in (0..n).rev() {
        acc = acc + s.x[j];
        any_neg |= s.x[j] == T::neg_infinity();
        tails.push(acc);
        neg_inf.push(any_neg);
    }

    let mut adjusted_sorted = vec![T::zero(); n];
    for r in 0..n {
        let mut best = s.p[r];
        for k in 2..=n {
            // Extra term: rank r itself, or rank n−k+1 (0-based n−k) when r
            // already sits among the k − 1 largest.
            let extra = r.min(n - k);
            let top = || (n - k + 1..n).rev().map(|j| unit(s.x[j], s.p[j]));
            let terms = top().chain(std::iter::once(unit(s.x[extra], s.p[extra])));
            let folded = tails[k - 1] + s.x[extra];
            let has_neg = neg_inf[k - 1] || s.x[extra] == T::neg_infinity();
            let pk = subset_p(d, k, folded, has_neg, terms)?;
            best = best.max(pk);
        }
        adjusted_sorted[r] = best.min(T::one());
    }

    Ok(assemble(&s.order, &adjusted_sorted, cut))
}

/// `±e^{ln}`: a signed value stored through its log-magnitude, so sums and
/// comparisons survive values far outside the floating-point range.
#[derive(Debug, Clone, Copy)]
struct LogSigned<T> {
    neg: bool,
    ln: T,
}

impl<T: Real> LogSigned<T> {
    fn zero() -> Self {
        LogSigned {
            neg: false,
            ln: T::neg_infinity(),
        }
    }

    /// `x = Q_F(1 − p)`, with `p` used when `x` overflowed.
    fn from_quantile(d: &HeavyTailDistribution<T>, x: T, p: T) -> Result<Self> {
        Ok(if x == T::zero() {
            Self::zero()
        } else if x < T::zero() {
            LogSigned {
                neg: true,
                ln: (-x).ln(),
            }
        } else if x.is_finite() {
            LogSigned {
                neg: false,
                ln: x.ln(),
            }
        } else {
            LogSigned {
                neg: false,
                ln: d.ln_upper_quantile(p)?,
            }
        })
    }

    fn negate(self) -> Self {
        if self.ln == T::neg_infinity() {
            return self;
        }
        LogSigned {
            neg: !self.neg,
            ln: self.ln,
        }
    }

    fn add(self, other: Self) -> Self {
        if self.ln == T::neg_infinity() {
            return other;
        }
        if other.ln == T::neg_infinity() {
            return self;
        }
        let (big, small) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        if big.ln == T::infinity() {
            return big;
        }
        let delta = small.ln - big.ln;
        if big.neg == small.neg {
            LogSigned {
                neg: big.neg,
                ln: big.ln + delta.exp().ln_1p(),
            }
        } else if delta == T::zero() {
            Self::zero()
        } else {
            LogSigned {
                neg: big.neg,
                ln: big.ln + (-delta.exp_m1()).ln(),
            }
        }
    }

    fn lt(self, other: Self) -> bool {
        match (self.neg, other.neg) {
            (true, false) => !(self.ln == T::neg_infinity() && other.ln == T::neg_infinity()),
            (false, true) => false,
            (false, false) => self.ln < other.ln,
            (true, true) => self.ln > other.ln,
        }
    }
}

fn step_down_cut<T: Real>(d: &HeavyTailDistribution<T>, s: &Sorted<T>, alpha: T) -> Result<usize> {
    let n = s.p.len();
    let levels: Vec<T> = (1..=n).map(|k| alpha / from_usize::<T>(k)).collect();
    let h = levels
        .iter()
        .map(|&l| d.upper_quantile(l))
        .collect::<Result<Vec<T>>>()?;
    let nn = from_usize::<T>(n);
    let limit = T::max_value() / (nn + nn + nn + nn);
    let in_range = |v: &T| v.abs() < limit || *v == T::neg_infinity();
    if s.x.iter().all(in_range) && h.iter().all(in_range) {
        return Ok(cut_from_thresholds(
            &s.x,
            &h,
            T::zero(),
            |a, b| a + b,
            |a, b| a - b,
            |a, b| a < b,
        ));
    }
    let xs =
        s.x.iter()
            .zip(&s.p)
            .map(|(&x, &p)| LogSigned::from_quantile(d, x, p))
            .collect::<Result<Vec<_>>>()?;
    let hs = h
        .iter()
        .zip(&levels)
        .map(|(&x, &p)| LogSigned::from_quantile(d, x, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(cut_from_thresholds(
        &xs,
        &hs,
        LogSigned::zero(),
        LogSigned::add,
        |a, b| a.add(b.negate()),
        LogSigned::lt,
    ))
}

/// `J = min{i : x_(i) < max(c₁, …, c_{n−i+1})}` with
/// `c_k = h_k − Σ_{j=n−k+2}^{n} x_(j)`, or `n + 1`.
fn cut_from_thresholds<V: Copy>(
    xs: &[V],
    hs: &[V],
    zero: V,
    add: impl Fn(V, V) -> V,
    sub: impl Fn(V, V) -> V,
    lt: impl Fn(V, V) -> bool,
) -> usize {
    let n = xs.len();
    let mut prefix_max: Vec<V> = Vec::with_capacity(n);
    let mut tail = zero;
    for k in 1..=n {
        if k >= 2 {
            tail = add(tail, xs[n - k + 1]);
        }
        let c = sub(hs[k - 1], tail);
        let best = match prefix_max.last() {
            Some(&b) if !lt(b, c) => b,
            _ => c,
        };
        prefix_max.push(best);
    }
    (1..=n)
        .find(|&i| lt(xs[i - 1], prefix_max[n - i]))
        .unwrap_or(n + 1)
}

fn assemble<T: Real>(order: &[usize], adjusted_sorted: &[T], cut: usize) -> ClosedTestingResult<T> {
    let n = order.len();
    let mut adjusted_p = vec![T::zero(); n];
    let mut rejected = vec![false; n];
    for (rank, &idx) in order.iter().enumerate() {
        adjusted_p[idx] = adjusted_sorted[rank];
        rejected[idx] = rank + 1 < cut;
    }
    ClosedTestingResult {
        adjusted_p,
        rejected,
        rejection_cut: cut,
    }
}

/// Closed testing by enumerating all `2ⁿ − 1` subsets: `P_I = |I|·F̄(Σ_{i∈I} H(pᵢ))`
/// clamped to one, `P*ᵢ = max_{I∋i} P_I`, and `Hᵢ` rejected when `P*ᵢ ≤ α`.
///
/// Subset sums are folded in descending p order, matching the shortcut, so
/// both routes produce the same adjusted p-values.
pub fn closed_test_bruteforce<T: Real>(
    p: &PValueVector<T>,
    d: &HeavyTailDistribution<T>,
    alpha: T,
) -> Result<ClosedTestingResult<T>> {
    check_alpha(alpha)?;
    let n = p.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::Capacity {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let s = sort_and_transform(p, d)?;
    let mut adjusted_sorted = vec![T::zero(); n];
    let mut members = Vec::with_capacity(n);
    enumerate(
        d,
        &s,
        n,
        T::zero(),
        false,
        &mut members,
        &mut adjusted_sorted,
    )?;

    // Adjusted p-values are nondecreasing in rank, so the rejections form a
    // prefix.
    let cut = adjusted_sorted
        .iter()
        .position(|&a| a > alpha)
        .map_or(n + 1, |i| i + 1);
    Ok(assemble(&s.order, &adjusted_sorted, cut))
}

/// Depth-first walk over ranks `n−1, n−2, …, 0` (descending p), carrying the
/// running fold of the chosen `x` values.
fn enumerate<T: Real>(
    d: &HeavyTailDistribution<T>,
    s: &Sorted<T>,
    next: usize,
    folded: T,
    has_neg: bool,
    members: &mut Vec<usize>,
    adjusted: &mut [T],
) -> Result<()> {
    for j in (0..next).rev() {
        members.push(j);
        let f = folded + s.x[j];
        let neg = has_neg || s.x[j] == T::neg_infinity();
        let terms = members.iter().map(|&m| unit(s.x[m], s.p[m]));
        let pi = subset_p(d, members.len(), f, neg, terms)?;
        for &m in members.iter() {
            if pi > adjusted[m] {
                adjusted[m] = pi;
            }
        }
        enumerate(d, s, j, f, neg, members, adjusted)?;
        members.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = HeavyTailDistribution<f64>;

    fn pv(v: &[f64]) -> PValueVector<f64> {
        PValueVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_hypothesis() {
        for f in [closed_test_shortcut, closed_test_bruteforce] {
            let r = f(&pv(&[0.03]), &D::cauchy(), 0.05).unwrap();
            assert!(r.rejected[0]);
            assert!((r.adjusted_p[0] - 0.03).abs() < 1e-15);
            assert_eq!(r.rejection_cut, 2);
        }
    }

    #[test]
    fn cauchy_half_half_never_rejects() {
        for f in [closed_test_shortcut, closed_test_bruteforce] {
            let r = f(&pv(&[0.5, 0.5]), &D::cauchy(), 0.99).unwrap();
            assert_eq!(r.adjusted_p, vec![1.0, 1.0]);
            assert_eq!(r.rejected, vec![false, false]);
            assert_eq!(r.rejection_cut, 1);
        }
    }

    #[test]
    fn two_hypotheses_by_hand() {
        let d = D::cauchy();
        let h = |p: f64| d.upper_quantile(p).unwrap();
        // Descending-p fold: H(0.02) first.
        let p12 = (2.0 * d.survival(h(0.02) + h(0.01)).unwrap()).min(1.0);
        let r = closed_test_bruteforce(&pv(&[0.01, 0.02]), &d, 0.05).unwrap();
        assert!((r.adjusted_p[0] - 0.01f64.max(p12)).abs() < 1e-16);
        assert!((r.adjusted_p[1] - 0.02f64.max(p12)).abs() < 1e-16);
        let s = closed_test_shortcut(&pv(&[0.01, 0.02]), &d, 0.05).unwrap();
        assert_eq!(s.adjusted_p, r.adjusted_p);
        assert_eq!(s.rejected, vec![true, true]);
    }

    #[test]
    fn exhaustive_grid_agrees() {
        let grid = [0.001, 0.01, 0.1, 0.5];
        for d in [D::cauchy(), D::pareto(1.0).unwrap(), D::levy()] {
            for &a in &grid {
                for &b in &grid {
                    for &c in &grid {
                        let p = pv(&[a, b, c]);
                        // Levels off the grid: a tie such as P_I = α exactly is decided by
                        // rounding, differently in the two routes.
                        for alpha in [0.04, 0.07, 0.25] {
                            let s = closed_test_shortcut(&p, &d, alpha).unwrap();
                            let r = closed_test_bruteforce(&p, &d, alpha).unwrap();
                            assert_eq!(s.rejected, r.rejected, "{d} {a} {b} {c} {alpha}");
                            for (x, y) in s.adjusted_p.iter().zip(&r.adjusted_p) {
                                assert!((x - y).abs() <= 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn p_equal_one_blocks_cauchy_closure() {
        // Any subset containing p = 1 has S = −∞ under Cauchy.
        let p = pv(&[1e-8, 1.0]);
        let s = closed_test_shortcut(&p, &D::cauchy(), 0.05).unwrap();
        let r = closed_test_bruteforce(&p, &D::cauchy(), 0.05).unwrap();
        assert_eq!(s, r);
        assert_eq!(s.adjusted_p, vec![1.0, 1.0]);
        assert_eq!(s.rejection_cut, 1);
    }

    #[test]
    fn overflow_agrees_with_bruteforce() {
        let d = D::log_cauchy();
        let p = pv(&[1e-9, 2e-6, 0.3, 0.04]);
        for alpha in [1e-5, 0.05] {
            let s = closed_test_shortcut(&p, &d, alpha).unwrap();
            let r = closed_test_bruteforce(&p, &d, alpha).unwrap();
            assert_eq!(s.rejected, r.rejected);
            for (x, y) in s.adjusted_p.iter().zip(&r.adjusted_p) {
                assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn thresholds_beyond_float_range() {
        // H(α/k) overflows for log-Cauchy once α/k < 4.5e-4.
        let d = D::log_cauchy();
        let p = pv(&[1e-12, 3e-7, 2e-5, 0.001, 0.2, 0.6, 0.9, 1e-5]);
        for alpha in [1e-4, 1e-3, 0.01] {
            let s = closed_test_shortcut(&p, &d, alpha).unwrap();
            let r = closed_test_bruteforce(&p, &d, alpha).unwrap();
            assert_eq!(s.rejected, r.rejected, "alpha {alpha}");
            for (x, y) in s.adjusted_p.iter().zip(&r.adjusted_p) {
                assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn capacity_and_alpha_checks() {
        let p = pv(&vec![0.5; 21]);
        assert_eq!(
            closed_test_bruteforce(&p, &D::cauchy(), 0.05).unwrap_err(),
            Error::Capacity { n: 21, max: 20 }
        );
        assert!(closed_test_shortcut(&p, &D::cauchy(), 0.0).is_err());
        assert!(closed_test_shortcut(&p, &D::cauchy(), 1.0).is_err());
    }
}
