//! Series evaluation of distributional quantities via the power expansion
//! of the density in the baseline distribution function.
//!
//! Writing t = G/(1-G) and expanding both exp(-lambda t) and the negative
//! powers of 1-G gives the density as a weighted double series
//!
//!   f = sum_{i,j} w_ij g G^{i+j} + sum_{i,k} w_ik g G^{i+k+2}
//!
//! with
//!
//!   w_ij = lambda^2/(1+lambda) (-lambda)^i / i! C(i+j+1, j)
//!   w_ik = lambda^3/(2(1+lambda)) (-lambda)^i / i! C(i+k+3, k)
//!
//! Collecting equal powers of G, the anti-diagonal sums of each family are
//! generalized Laguerre polynomials,
//!
//!   sum_{i+j=n} w_ij = lambda^2/(1+lambda) L_n^{(1)}(lambda)
//!   sum_{i+k=n} w_ik = lambda^3/(2(1+lambda)) L_n^{(3)}(lambda),
//!
//! so f = g sum_n c_n G^n with c_n = the first sum at n plus the second at
//! n-2, and F = sum_n c_n G^{n+1}/(n+1). The coefficients oscillate with a
//! slowly growing envelope (~n^{1/4}), which has two consequences this
//! module is built around:
//!
//! 1. Pointwise series for f and F converge for every point with finite
//!    odds, but the number of useful terms scales like 1/(1 - G), so the
//!    truncation flag reports honestly when the index cap is hit first.
//! 2. Termwise integration over the *whole* support produces blocks that
//!    decay too slowly to sum reliably in floating point (the partial sums
//!    oscillate with amplitude up to e^{2 lambda t}). Integrated
//!    functionals are therefore evaluated in hybrid form: the series is
//!    integrated only over an inner region G <= u0 where both the
//!    geometric decay and the cancellation are controlled, and the exact
//!    closed-form integrand is integrated over the remaining tail by
//!    adaptive quadrature. The split point u0 is chosen from the
//!    truncation policy so the inner truncation error is below the tail
//!    tolerance and the alternating-sum amplification stays under 1e6.
//!
//! Every operation takes an [`EvalMethod`]: `Series` uses the expansion as
//! above, `Quadrature` integrates the closed forms directly. The two paths
//! share no code beyond the integrator, which makes them useful as checks
//! on one another.

use std::fmt;
use std::str::FromStr;

use crate::baseline::BaselineModel;
use crate::dist::OxgDistribution;
use crate::error::{OxgError, Result};
use crate::quad::{integrate, QuadratureResult};
use crate::special::{ln_choose, ln_factorial};

/// How a distributional quantity should be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    /// Power-series expansion in G (hybrid with an exact tail for
    /// integrated quantities).
    Series,
    /// Direct adaptive quadrature of the closed forms.
    Quadrature,
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMethod::Series => "series",
            EvalMethod::Quadrature => "quadrature",
        })
    }
}

impl FromStr for EvalMethod {
    type Err = OxgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(EvalMethod::Series),
            "quadrature" => Ok(EvalMethod::Quadrature),
            other => Err(OxgError::InvalidParameter(format!(
                "unknown evaluation method '{other}' (expected series or quadrature)"
            ))),
        }
    }
}

/// Whether block summation may stop early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationMode {
    /// Always sum every block up to the index cap.
    FixedCaps,
    /// Stop once two consecutive blocks fall below the tail tolerance.
    AdaptiveUntilTail,
}

/// Truncation control for series evaluation.
///
/// `max_index` caps the power of G kept in the expansion; blocks are summed
/// in order of total degree n so every kept coefficient is complete.
/// `tail_tolerance` is the relative block size treated as negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub max_index: usize,
    pub tail_tolerance: f64,
    pub mode: TruncationMode,
}

impl TruncationPolicy {
    pub fn new(max_index: usize, tail_tolerance: f64, mode: TruncationMode) -> Result<Self> {
        if max_index == 0 || max_index > 400 {
            return Err(OxgError::InvalidParameter(format!(
                "max_index must lie in 1..=400, got {max_index}"
            )));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(OxgError::InvalidParameter(format!(
                "tail_tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(TruncationPolicy {
            max_index,
            tail_tolerance,
            mode,
        })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_index: 40,
            tail_tolerance: 1e-10,
            mode: TruncationMode::AdaptiveUntilTail,
        }
    }
}

/// A series-evaluated number with convergence diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    /// False when a truncation cap was hit before the tail criterion, or
    /// when a supporting quadrature failed to meet its tolerance.
    pub converged: bool,
    /// Blocks (or Taylor terms) actually summed.
    pub blocks_used: usize,
}

/// The two triangular families of expansion weights, stored for
/// i + j <= max_index and i + k <= max_index.
#[derive(Debug, Clone)]
pub struct MixtureWeights {
    pub lambda: f64,
    pub max_index: usize,
    /// `w_ij[i][j]`, from the exponential factor alone.
    pub w_ij: Vec<Vec<f64>>,
    /// `w_ik[i][k]`, carrying the extra t^2 factor (enters at degree i+k+2).
    pub w_ik: Vec<Vec<f64>>,
}

impl MixtureWeights {
    /// Sum of the first family along the anti-diagonal i + j = n.
    pub fn first_diagonal_sum(&self, n: usize) -> f64 {
        let mut acc = Kahan::new();
        for i in 0..=n {
            acc.add(self.w_ij[i][n - i]);
        }
        acc.value()
    }

    /// Sum of the second family along the anti-diagonal i + k = n.
    pub fn second_diagonal_sum(&self, n: usize) -> f64 {
        let mut acc = Kahan::new();
        for i in 0..=n {
            acc.add(self.w_ik[i][n - i]);
        }
        acc.value()
    }
}

/// Raw and central summaries of the first four moments.
#[derive(Debug, Clone, Copy)]
pub struct MomentSet {
    /// E[X^r] for r = 1..4.
    pub raw_moments: [f64; 4],
    pub mean: f64,
    pub variance: f64,
    /// Standardised third central moment.
    pub skewness: f64,
    /// Standardised fourth central moment (3 for a normal law).
    pub kurtosis: f64,
    pub method: EvalMethod,
    pub converged: bool,
}

/// Mean absolute deviations about the mean and the median.
#[derive(Debug, Clone, Copy)]
pub struct MeanDeviations {
    pub mean: f64,
    pub median: f64,
    pub about_mean: f64,
    pub about_median: f64,
    pub converged: bool,
}

/// Compensated accumulator.
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan { sum: 0.0, c: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Builds both weight tables up to the given total degree.
pub fn mixture_weights(lambda: f64, max_index: usize) -> Result<MixtureWeights> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(OxgError::InvalidParameter(format!(
            "lambda must be a positive finite number, got {lambda}"
        )));
    }
    let scale1 = lambda * lambda / (1.0 + lambda);
    let scale2 = 0.5 * lambda * scale1;
    let ln_l = lambda.ln();
    let mut w_ij = Vec::with_capacity(max_index + 1);
    let mut w_ik = Vec::with_capacity(max_index + 1);
    for i in 0..=max_index {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let ln_i = i as f64 * ln_l - ln_factorial(i);
        let mut row1 = Vec::with_capacity(max_index - i + 1);
        let mut row2 = Vec::with_capacity(max_index - i + 1);
        for j in 0..=(max_index - i) {
            row1.push(sign * scale1 * (ln_i + ln_choose(i + j + 1, j)).exp());
            row2.push(sign * scale2 * (ln_i + ln_choose(i + j + 3, j)).exp());
        }
        w_ij.push(row1);
        w_ik.push(row2);
    }
    Ok(MixtureWeights {
        lambda,
        max_index,
        w_ij,
        w_ik,
    })
}

/// lambda^2/(1+lambda) L_n^{(1)}(lambda): the degree-n coefficient from
/// the first weight family, summed directly in ascending i.
fn phi1(lambda: f64, n: usize) -> f64 {
    let scale = lambda * lambda / (1.0 + lambda);
    let ln_l = lambda.ln();
    let mut acc = Kahan::new();
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let ln_t = i as f64 * ln_l - ln_factorial(i) + ln_choose(n + 1, n - i);
        acc.add(sign * ln_t.exp());
    }
    scale * acc.value()
}

/// lambda^3/(2(1+lambda)) L_n^{(3)}(lambda): the second family's diagonal.
fn phi2(lambda: f64, n: usize) -> f64 {
    let scale = 0.5 * lambda * lambda * lambda / (1.0 + lambda);
    let ln_l = lambda.ln();
    let mut acc = Kahan::new();
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let ln_t = i as f64 * ln_l - ln_factorial(i) + ln_choose(n + 3, n - i);
        acc.add(sign * ln_t.exp());
    }
    scale * acc.value()
}

/// The complete degree-n coefficient: f = g sum_n c_n G^n.
pub fn pdf_block_coefficient(lambda: f64, n: usize) -> f64 {
    let mut c = phi1(lambda, n);
    if n >= 2 {
        c += phi2(lambda, n - 2);
    }
    c
}

fn block_coefs(lambda: f64, max_index: usize) -> Vec<f64> {
    (0..=max_index)
        .map(|n| pdf_block_coefficient(lambda, n))
        .collect()
}

/// Sums degree blocks under the policy. Returns (sum, blocks used, whether
/// the two-consecutive-small-blocks tail criterion held where summation
/// stopped).
fn sum_blocks<F: FnMut(usize) -> Result<f64>>(
    policy: &TruncationPolicy,
    mut block: F,
) -> Result<(f64, usize, bool)> {
    let mut acc = Kahan::new();
    let mut prev_small = false;
    let mut used = 0usize;
    let mut converged = false;
    for n in 0..=policy.max_index {
        let b = block(n)?;
        acc.add(b);
        used = n + 1;
        let small = b.abs() <= policy.tail_tolerance * acc.value().abs();
        if n >= 4 && small && prev_small {
            converged = true;
            if policy.mode == TruncationMode::AdaptiveUntilTail {
                break;
            }
        } else {
            converged = false;
        }
        prev_small = small;
    }
    Ok((acc.value(), used, converged))
}

/// The inner/tail split for hybrid evaluation.
///
/// `u0` keeps the geometric truncation error below a thousandth of the
/// tail tolerance (u0^max_index <= tol/1000, after discounting any
/// polynomial growth of the block coefficients) and caps the odds at
/// ln(1e6) / (2 lambda_eff) so alternating-sum amplification stays below
/// 1e6 (about 2e-10 relative noise in doubles). `x0` is the matching
/// point of the support.
struct Split {
    u0: f64,
    x0: f64,
}

/// `poly_degree` is the power `d` in the envelope `|block_n| ~ n^d` of the
/// expansion being truncated: 0 for the plain density/distribution mixture
/// (whose Laguerre coefficients stay bounded), `2 beta` for the `beta`-th
/// power of the density, where binomials of the form C(n + 2 beta - 1, k)
/// enter the blocks. Dividing the geometric target by `max_index^d`
/// ensures the *discounted* tail still meets the tolerance; as the target
/// shrinks, `u0` shrinks with it and the evaluation degenerates gracefully
/// towards pure tail quadrature.
fn split_point(
    baseline: &BaselineModel,
    lambda_eff: f64,
    policy: &TruncationPolicy,
    poly_degree: f64,
) -> Result<Split> {
    let n = policy.max_index as f64;
    let target = 1e-3 * policy.tail_tolerance / n.powf(poly_degree);
    let u_geo = target.powf(1.0 / n);
    let t_canc = (1e6f64).ln() / (2.0 * lambda_eff);
    let u_canc = t_canc / (1.0 + t_canc);
    let u0 = u_geo.min(u_canc);
    let x0 = baseline.quantile(u0)?;
    Ok(Split { u0, x0 })
}

/// integral over {x : u_a <= G(x) <= u_b} of x^p g(x) G(x)^n dx, i.e.
/// integral of Q(u)^p u^n du. Closed form for the uniform baseline and for
/// p = 0; adaptive quadrature otherwise.
fn q_power_integral(
    baseline: &BaselineModel,
    p: u32,
    n: usize,
    u_a: f64,
    u_b: f64,
) -> QuadratureResult {
    if let BaselineModel::Uniform { theta } = *baseline {
        let e = (n + p as usize + 1) as i32;
        let value = theta.powi(p as i32) * (u_b.powi(e) - u_a.powi(e)) / e as f64;
        return QuadratureResult {
            value,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    if p == 0 {
        let e = (n + 1) as i32;
        let value = (u_b.powi(e) - u_a.powi(e)) / e as f64;
        return QuadratureResult {
            value,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let pn = p as i32;
    let ni = n as i32;
    integrate(
        |u| {
            let q = baseline.quantile(u).unwrap_or(0.0);
            q.powi(pn) * u.powi(ni)
        },
        u_a,
        u_b,
        1e-13,
        1e-11,
    )
}

/// x^r f(x), assembled in log scale where possible so overflow at extreme
/// x degrades to 0 instead of NaN.
fn moment_integrand(d: &OxgDistribution, r: i32, x: f64) -> f64 {
    let v = x.powi(r) * d.log_pdf(x).exp();
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Pointwise series evaluation of the density.
pub fn pdf_series(d: &OxgDistribution, x: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let g = d.baseline().pdf(x);
    let u = d.baseline().cdf(x);
    if g == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            converged: true,
            blocks_used: 0,
        });
    }
    let coefs = block_coefs(d.lambda(), policy.max_index);
    let mut u_pow = 1.0f64;
    let (sum, used, converged) = sum_blocks(policy, |n| {
        let b = coefs[n] * u_pow;
        u_pow *= u;
        Ok(b)
    })?;
    Ok(SeriesValue {
        value: g * sum,
        converged,
        blocks_used: used,
    })
}

/// Pointwise series evaluation of the distribution function.
pub fn cdf_series(d: &OxgDistribution, x: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let (lo, hi) = d.support();
    if x <= lo {
        return Ok(SeriesValue {
            value: 0.0,
            converged: true,
            blocks_used: 0,
        });
    }
    let u = if x >= hi { 1.0 } else { d.baseline().cdf(x) };
    let coefs = block_coefs(d.lambda(), policy.max_index);
    let mut u_pow = u;
    let (sum, used, converged) = sum_blocks(policy, |n| {
        let b = coefs[n] * u_pow / (n + 1) as f64;
        u_pow *= u;
        Ok(b)
    })?;
    Ok(SeriesValue {
        value: sum,
        converged,
        blocks_used: used,
    })
}

/// E[X^r], by hybrid series or direct quadrature.
pub fn raw_moment(
    d: &OxgDistribution,
    r: u32,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    if r == 0 {
        return Ok(SeriesValue {
            value: 1.0,
            converged: true,
            blocks_used: 0,
        });
    }
    let (lo, hi) = d.support();
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(|x| moment_integrand(d, r as i32, x), lo, hi, 1e-10, 1e-10);
            Ok(SeriesValue {
                value: q.value,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let coefs = block_coefs(d.lambda(), policy.max_index);
            let split = split_point(d.baseline(), d.lambda(), policy, 0.0)?;
            let mut inner_ok = true;
            let (inner, used, blocks_ok) = sum_blocks(policy, |n| {
                let q = q_power_integral(d.baseline(), r, n, 0.0, split.u0);
                inner_ok &= q.converged;
                Ok(coefs[n] * q.value)
            })?;
            let tail = integrate(
                |x| moment_integrand(d, r as i32, x),
                split.x0,
                hi,
                1e-10,
                1e-10,
            );
            Ok(SeriesValue {
                value: inner + tail.value,
                converged: blocks_ok && inner_ok && tail.converged,
                blocks_used: used,
            })
        }
    }
}

/// First four raw moments plus mean, variance, skewness and kurtosis.
pub fn moment_set(
    d: &OxgDistribution,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<MomentSet> {
    let mut raw = [0.0f64; 4];
    let mut converged = true;
    for (idx, slot) in raw.iter_mut().enumerate() {
        let m = raw_moment(d, idx as u32 + 1, policy, method)?;
        *slot = m.value;
        converged &= m.converged;
    }
    let [m1, m2, m3, m4] = raw;
    let variance = m2 - m1 * m1;
    let mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    let mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
    Ok(MomentSet {
        raw_moments: raw,
        mean: m1,
        variance,
        skewness: mu3 / variance.powf(1.5),
        kurtosis: mu4 / (variance * variance),
        method,
        converged,
    })
}

/// Moment generating function E[e^{sX}]. The series method sums the
/// Taylor expansion sum_r s^r E[X^r] / r! with series raw moments; the
/// quadrature method integrates exp(s x + ln f(x)) directly.
pub fn mgf(
    d: &OxgDistribution,
    s: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    if !s.is_finite() {
        return Err(OxgError::Domain(format!("mgf argument must be finite, got {s}")));
    }
    let (lo, hi) = d.support();
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(
                |x| {
                    let v = (s * x + d.log_pdf(x)).exp();
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                lo,
                hi,
                1e-10,
                1e-10,
            );
            Ok(SeriesValue {
                value: q.value,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let mut moments_ok = true;
            let mut factor = 1.0f64; // s^r / r!, updated multiplicatively
            let (sum, used, taylor_ok) = sum_blocks(policy, |r| {
                let term = if r == 0 {
                    1.0
                } else {
                    factor * raw_moment(d, r as u32, policy, EvalMethod::Series).map(|m| {
                        moments_ok &= m.converged;
                        m.value
                    })?
                };
                factor *= s / (r + 1) as f64;
                Ok(term)
            })?;
            Ok(SeriesValue {
                value: sum,
                converged: taylor_ok && moments_ok,
                blocks_used: used,
            })
        }
    }
}

/// Incomplete moment: integral of u^r f(u) du up to x.
pub fn incomplete_moment(
    d: &OxgDistribution,
    r: u32,
    x: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    let (lo, hi) = d.support();
    if x <= lo {
        return Ok(SeriesValue {
            value: 0.0,
            converged: true,
            blocks_used: 0,
        });
    }
    if x >= hi {
        return raw_moment(d, r, policy, method);
    }
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(|u| moment_integrand(d, r as i32, u), lo, x, 1e-10, 1e-10);
            Ok(SeriesValue {
                value: q.value,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let u_x = d.baseline().cdf(x);
            let coefs = block_coefs(d.lambda(), policy.max_index);
            let split = split_point(d.baseline(), d.lambda(), policy, 0.0)?;
            let u_in = u_x.min(split.u0);
            let mut inner_ok = true;
            let (inner, used, blocks_ok) = sum_blocks(policy, |n| {
                let q = q_power_integral(d.baseline(), r, n, 0.0, u_in);
                inner_ok &= q.converged;
                Ok(coefs[n] * q.value)
            })?;
            let mut value = inner;
            let mut tail_ok = true;
            if u_x > split.u0 {
                let tail = integrate(
                    |u| moment_integrand(d, r as i32, u),
                    split.x0,
                    x,
                    1e-10,
                    1e-10,
                );
                value += tail.value;
                tail_ok = tail.converged;
            }
            Ok(SeriesValue {
                value,
                converged: blocks_ok && inner_ok && tail_ok,
                blocks_used: used,
            })
        }
    }
}

/// Mean deviations about the mean (delta1) and the median (delta2):
/// delta1 = 2 mu F(mu) - 2 m1(mu), delta2 = mu - 2 m1(M), with m1 the
/// first incomplete moment.
pub fn mean_deviations(
    d: &OxgDistribution,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<MeanDeviations> {
    let m1 = raw_moment(d, 1, policy, method)?;
    let mean = m1.value;
    let median = d.quantile(0.5)?;
    let inc_mean = incomplete_moment(d, 1, mean, policy, method)?;
    let inc_median = incomplete_moment(d, 1, median, policy, method)?;
    Ok(MeanDeviations {
        mean,
        median,
        about_mean: 2.0 * mean * d.cdf(mean) - 2.0 * inc_mean.value,
        about_median: mean - 2.0 * inc_median.value,
        converged: m1.converged && inc_mean.converged && inc_median.converged,
    })
}

fn require_nonnegative_support(d: &OxgDistribution, what: &str) -> Result<()> {
    if d.support().0 < 0.0 {
        Err(OxgError::Unsupported(format!(
            "{what} requires a non-negative support; the {} baseline extends below zero",
            d.baseline().kind()
        )))
    } else {
        Ok(())
    }
}

/// Lorenz curve L(p) = m1(Q(p)) / mu for p in (0, 1].
pub fn lorenz(
    d: &OxgDistribution,
    p: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    require_nonnegative_support(d, "the Lorenz curve")?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(OxgError::Domain(format!(
            "Lorenz curve level must lie in (0, 1], got {p}"
        )));
    }
    let x_p = d.quantile(p)?;
    let inc = incomplete_moment(d, 1, x_p, policy, method)?;
    let mu = raw_moment(d, 1, policy, method)?;
    Ok(SeriesValue {
        value: inc.value / mu.value,
        converged: inc.converged && mu.converged,
        blocks_used: inc.blocks_used.max(mu.blocks_used),
    })
}

/// Bonferroni curve B(p) = L(p) / p.
pub fn bonferroni(
    d: &OxgDistribution,
    p: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    let l = lorenz(d, p, policy, method)?;
    Ok(SeriesValue {
        value: l.value / p,
        ..l
    })
}

/// Degree-m coefficient of the expansion of f^beta / (lambda^2/(1+lambda))^beta
/// in powers of G (integer beta >= 2): expanding the binomial
/// (1 + (lambda/2) t^2)^beta, the exponential and the negative power of
/// 1 - G and collecting G^m. The inner binomial top i + 2j + 2 beta + k - 1
/// collapses to m + 2 beta - 1 because i + k = m - 2j.
fn renyi_block(lambda: f64, beta: usize, m: usize) -> f64 {
    let ln_lb = (lambda * beta as f64).ln();
    let ln_half_l = (0.5 * lambda).ln();
    let mut acc = Kahan::new();
    for j in 0..=beta.min(m / 2) {
        let base = ln_choose(beta, j) + j as f64 * ln_half_l;
        for i in 0..=(m - 2 * j) {
            let k = m - 2 * j - i;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let ln_t =
                base + i as f64 * ln_lb - ln_factorial(i) + ln_choose(m + 2 * beta - 1, k);
            acc.add(sign * ln_t.exp());
        }
    }
    acc.value()
}

/// Renyi entropy of order beta: ln(integral of f^beta) / (1 - beta).
///
/// The quadrature method accepts any beta > 0 except 1; the series method
/// requires an integer beta >= 2, where the binomial in the expansion
/// terminates.
pub fn renyi_entropy(
    d: &OxgDistribution,
    beta: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(OxgError::InvalidParameter(format!(
            "Renyi order must be positive and finite, got {beta}"
        )));
    }
    if beta == 1.0 {
        return Err(OxgError::InvalidParameter(
            "Renyi order 1 is the Shannon limit and is not defined by the formula; \
             use a nearby order"
                .into(),
        ));
    }
    let (lo, hi) = d.support();
    let power_integrand = |x: f64| {
        let v = (beta * d.log_pdf(x)).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(power_integrand, lo, hi, 1e-12, 1e-10);
            Ok(SeriesValue {
                value: q.value.ln() / (1.0 - beta),
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            if beta.fract() != 0.0 || !(2.0..=60.0).contains(&beta) {
                return Err(OxgError::Unsupported(format!(
                    "series Renyi entropy needs an integer order in 2..=60 (got {beta}); \
                     use the quadrature method for other orders"
                )));
            }
            let b = beta as usize;
            let lam = d.lambda();
            let split = split_point(d.baseline(), beta * lam, policy, 2.0 * beta)?;
            let bi = b as i32;
            let mut inner_ok = true;
            let baseline = *d.baseline();
            let (inner, used, blocks_ok) = sum_blocks(policy, |m| {
                // integral of g^beta G^m dx over the inner region, i.e.
                // integral of g(Q(u))^(beta-1) u^m du.
                let q = if let BaselineModel::Uniform { theta } = baseline {
                    QuadratureResult {
                        value: theta.powi(1 - bi) * split.u0.powi(m as i32 + 1)
                            / (m + 1) as f64,
                        abs_error_estimate: 0.0,
                        evaluations: 0,
                        converged: true,
                    }
                } else {
                    let mi = m as i32;
                    integrate(
                        |u| {
                            let x = baseline.quantile(u).unwrap_or(0.0);
                            baseline.pdf(x).powi(bi - 1) * u.powi(mi)
                        },
                        0.0,
                        split.u0,
                        1e-13,
                        1e-11,
                    )
                };
                inner_ok &= q.converged;
                Ok(renyi_block(lam, b, m) * q.value)
            })?;
            let scale = (beta * (2.0 * lam.ln() - lam.ln_1p())).exp();
            let tail = integrate(power_integrand, split.x0, hi, 1e-12, 1e-10);
            let total = scale * inner + tail.value;
            Ok(SeriesValue {
                value: total.ln() / (1.0 - beta),
                converged: blocks_ok && inner_ok && tail.converged,
                blocks_used: used,
            })
        }
    }
}

/// Density of the i-th order statistic of a sample of size n, from the
/// closed forms: n!/((i-1)!(n-i)!) F^{i-1} (1-F)^{n-i} f.
pub fn order_stat_pdf(d: &OxgDistribution, i: usize, n: usize, x: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(OxgError::InvalidParameter(format!(
            "order statistic index must satisfy 1 <= i <= n, got i = {i}, n = {n}"
        )));
    }
    let c = (ln_factorial(n) - ln_factorial(i - 1) - ln_factorial(n - i)).exp();
    let f = d.cdf(x);
    let s = d.survival(x);
    Ok(c * f.powi((i - 1) as i32) * s.powi((n - i) as i32) * d.pdf(x))
}

/// Series version of the order-statistic density: the same combinatorial
/// prefactor applied to series-evaluated F and f.
pub fn order_stat_pdf_expansion(
    d: &OxgDistribution,
    i: usize,
    n: usize,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    if i == 0 || i > n {
        return Err(OxgError::InvalidParameter(format!(
            "order statistic index must satisfy 1 <= i <= n, got i = {i}, n = {n}"
        )));
    }
    let c = (ln_factorial(n) - ln_factorial(i - 1) - ln_factorial(n - i)).exp();
    let f_ser = pdf_series(d, x, policy)?;
    let cdf_ser = cdf_series(d, x, policy)?;
    let value = c
        * cdf_ser.value.powi((i - 1) as i32)
        * (1.0 - cdf_ser.value).powi((n - i) as i32)
        * f_ser.value;
    Ok(SeriesValue {
        value,
        converged: f_ser.converged && cdf_ser.converged,
        blocks_used: f_ser.blocks_used.max(cdf_ser.blocks_used),
    })
}

/// Stress-strength reliability R = P(X2 < X1), with X1 the strength and
/// X2 the stress, both from this family over a common baseline. R depends
/// on the two shapes only (the common odds transform is monotone), which
/// the series form makes explicit: the inner part is a pure convolution of
/// the two coefficient sequences in u-space.
pub fn stress_strength(
    strength: &OxgDistribution,
    stress: &OxgDistribution,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    if strength.baseline() != stress.baseline() {
        return Err(OxgError::InvalidParameter(
            "stress-strength reliability requires both components to share a baseline".into(),
        ));
    }
    let (lo, hi) = strength.support();
    let integrand = |x: f64| {
        let v = strength.log_pdf(x).exp() * stress.cdf(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(integrand, lo, hi, 1e-12, 1e-10);
            Ok(SeriesValue {
                value: q.value,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let c1 = block_coefs(strength.lambda(), policy.max_index);
            let c2 = block_coefs(stress.lambda(), policy.max_index);
            let split = split_point(
                strength.baseline(),
                strength.lambda() + stress.lambda(),
                policy,
                0.0,
            )?;
            // f1 F2 = g sum_s G^{s+1} conv_s with
            // conv_s = sum_{m<=s} c1[s-m] c2[m]/(m+1); integrating g G^{s+1}
            // over the inner region gives u0^{s+2}/(s+2).
            let mut u_pow = split.u0 * split.u0;
            let (inner, used, blocks_ok) = sum_blocks(policy, |s| {
                let mut conv = Kahan::new();
                for m in 0..=s {
                    conv.add(c1[s - m] * c2[m] / (m + 1) as f64);
                }
                let b = u_pow / (s + 2) as f64 * conv.value();
                u_pow *= split.u0;
                Ok(b)
            })?;
            let tail = integrate(integrand, split.x0, hi, 1e-12, 1e-10);
            Ok(SeriesValue {
                value: inner + tail.value,
                converged: blocks_ok && tail.converged,
                blocks_used: used,
            })
        }
    }
}

/// Residual life moment E[(X - t)^r | X > t].
///
/// The series method is implemented for the uniform baseline, where the
/// binomial-expanded inner integrals have closed forms; other baselines
/// use the quadrature method.
pub fn residual_moment(
    d: &OxgDistribution,
    r: u32,
    t: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    let (lo, hi) = d.support();
    if t.is_nan() || t >= hi {
        return Err(OxgError::Domain(format!(
            "residual moments need t below the upper support endpoint, got t = {t}"
        )));
    }
    let s_t = d.survival(t);
    if s_t <= 0.0 {
        return Err(OxgError::Domain(format!(
            "no probability mass beyond t = {t}"
        )));
    }
    if r == 0 {
        return Ok(SeriesValue {
            value: 1.0,
            converged: true,
            blocks_used: 0,
        });
    }
    let ri = r as i32;
    let start = t.max(lo);
    let integrand = |x: f64| {
        let v = (x - t).powi(ri) * d.log_pdf(x).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(integrand, start, hi, 1e-10, 1e-10);
            Ok(SeriesValue {
                value: q.value / s_t,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let BaselineModel::Uniform { theta } = *d.baseline() else {
                return Err(OxgError::Unsupported(format!(
                    "series residual moments are implemented for the uniform baseline; \
                     use the quadrature method for {}",
                    d.baseline().kind()
                )));
            };
            let u_t = d.baseline().cdf(t);
            let split = split_point(d.baseline(), d.lambda(), policy, 0.0)?;
            let mut inner = 0.0;
            let mut used = 0;
            let mut blocks_ok = true;
            let mut tail_from = start;
            if u_t < split.u0 {
                let coefs = block_coefs(d.lambda(), policy.max_index);
                // integral over [u_t, u0] of (theta v - t)^r v^n dv, expanded
                // binomially in powers of v.
                let (sum, blocks, ok) = sum_blocks(policy, |n| {
                    let mut b = Kahan::new();
                    for w in 0..=r {
                        let e = (n + (r - w) as usize + 1) as i32;
                        b.add(
                            (ln_choose(r as usize, w as usize)).exp()
                                * (-t).powi(w as i32)
                                * theta.powi((r - w) as i32)
                                * (split.u0.powi(e) - u_t.powi(e))
                                / e as f64,
                        );
                    }
                    Ok(coefs[n] * b.value())
                })?;
                inner = sum;
                used = blocks;
                blocks_ok = ok;
                tail_from = split.x0;
            }
            let tail = integrate(integrand, tail_from, hi, 1e-10, 1e-10);
            Ok(SeriesValue {
                value: (inner + tail.value) / s_t,
                converged: blocks_ok && tail.converged,
                blocks_used: used,
            })
        }
    }
}

/// Reversed residual life moment E[(t - X)^r | X <= t].
pub fn reversed_residual_moment(
    d: &OxgDistribution,
    r: u32,
    t: f64,
    policy: &TruncationPolicy,
    method: EvalMethod,
) -> Result<SeriesValue> {
    let (lo, hi) = d.support();
    if t.is_nan() || t <= lo {
        return Err(OxgError::Domain(format!(
            "reversed residual moments need t above the lower support endpoint, got t = {t}"
        )));
    }
    let f_t = d.cdf(t);
    if f_t <= 0.0 {
        return Err(OxgError::Domain(format!(
            "no probability mass at or below t = {t}"
        )));
    }
    if r == 0 {
        return Ok(SeriesValue {
            value: 1.0,
            converged: true,
            blocks_used: 0,
        });
    }
    let ri = r as i32;
    let end = t.min(hi);
    let integrand = |x: f64| {
        let v = (t - x).powi(ri) * d.log_pdf(x).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    match method {
        EvalMethod::Quadrature => {
            let q = integrate(integrand, lo, end, 1e-10, 1e-10);
            Ok(SeriesValue {
                value: q.value / f_t,
                converged: q.converged,
                blocks_used: 0,
            })
        }
        EvalMethod::Series => {
            let BaselineModel::Uniform { theta } = *d.baseline() else {
                return Err(OxgError::Unsupported(format!(
                    "series reversed residual moments are implemented for the uniform \
                     baseline; use the quadrature method for {}",
                    d.baseline().kind()
                )));
            };
            let u_t = d.baseline().cdf(t);
            let split = split_point(d.baseline(), d.lambda(), policy, 0.0)?;
            let u_in = u_t.min(split.u0);
            let coefs = block_coefs(d.lambda(), policy.max_index);
            // integral over [0, u_in] of (t - theta v)^r v^n dv.
            let (inner, used, blocks_ok) = sum_blocks(policy, |n| {
                let mut b = Kahan::new();
                for w in 0..=r {
                    let e = (n + w as usize + 1) as i32;
                    b.add(
                        (ln_choose(r as usize, w as usize)).exp()
                            * t.powi((r - w) as i32)
                            * (-theta).powi(w as i32)
                            * u_in.powi(e)
                            / e as f64,
                    );
                }
                Ok(coefs[n] * b.value())
            })?;
            let mut value = inner;
            let mut tail_ok = true;
            if u_t > split.u0 {
                let tail = integrate(integrand, split.x0, end, 1e-10, 1e-10);
                value += tail.value;
                tail_ok = tail.converged;
            }
            Ok(SeriesValue {
                value: value / f_t,
                converged: blocks_ok && tail_ok,
                blocks_used: used,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::BaselineModel;

    fn uni(lambda: f64, theta: f64) -> OxgDistribution {
        OxgDistribution::new(lambda, BaselineModel::uniform(theta).unwrap()).unwrap()
    }

    fn exp_d(lambda: f64, theta: f64) -> OxgDistribution {
        OxgDistribution::new(lambda, BaselineModel::exponential(theta).unwrap()).unwrap()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    /// Generalized Laguerre polynomial via the three-term recurrence:
    /// an independent route to the anti-diagonal coefficient sums.
    fn laguerre(n: usize, a: f64, x: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mut l0 = 1.0;
        let mut l1 = 1.0 + a - x;
        for k in 1..n {
            let kf = k as f64;
            let l2 = ((2.0 * kf + a + 1.0 - x) * l1 - (kf + a) * l0) / (kf + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    }

    #[test]
    fn weight_diagonals_match_laguerre_recurrence() {
        for lambda in [0.25, 1.0, 2.0] {
            let w = mixture_weights(lambda, 50).unwrap();
            let s1 = lambda * lambda / (1.0 + lambda);
            let s2 = 0.5 * lambda * s1;
            // The anti-diagonal sums cancel heavily at large n, so the
            // achievable accuracy is set by the size of the terms before
            // cancellation, not by the size of the result.
            for n in 0..=50 {
                let d1 = w.first_diagonal_sum(n);
                let r1 = s1 * laguerre(n, 1.0, lambda);
                let c1: f64 = (0..=n).map(|i| w.w_ij[i][n - i].abs()).sum();
                assert!(
                    (d1 - r1).abs() <= 1e-13 * c1.max(1.0),
                    "first family lambda={lambda} n={n}: {d1} vs {r1}"
                );
                let d2 = w.second_diagonal_sum(n);
                let r2 = s2 * laguerre(n, 3.0, lambda);
                let c2: f64 = (0..=n).map(|i| w.w_ik[i][n - i].abs()).sum();
                assert!(
                    (d2 - r2).abs() <= 1e-13 * c2.max(1.0),
                    "second family lambda={lambda} n={n}: {d2} vs {r2}"
                );
            }
        }
    }

    #[test]
    fn block_coefficient_combines_both_families() {
        for lambda in [0.5, 1.7] {
            let w = mixture_weights(lambda, 20).unwrap();
            for n in 0..=20 {
                let expect = w.first_diagonal_sum(n)
                    + if n >= 2 { w.second_diagonal_sum(n - 2) } else { 0.0 };
                let got = pdf_block_coefficient(lambda, n);
                assert!(
                    (got - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                    "lambda={lambda} n={n}"
                );
            }
        }
    }

    #[test]
    fn weight_spot_values() {
        // w_00 = lambda^2/(1+lambda), w_01 doubles it (C(2,1) = 2),
        // w_10 flips sign at the same magnitude.
        let w = mixture_weights(1.0, 5).unwrap();
        assert!((w.w_ij[0][0] - 0.5).abs() < 1e-15);
        assert!((w.w_ij[0][1] - 1.0).abs() < 1e-15);
        assert!((w.w_ij[1][0] + 0.5).abs() < 1e-15);
        // w_ik[0][0] = lambda^3/(2(1+lambda)) C(3,0) = 0.25.
        assert!((w.w_ik[0][0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pointwise_series_match_closed_forms() {
        for d in [exp_d(0.25, 1.0), exp_d(1.0, 1.0), uni(0.5, 2.0)] {
            // u = 0.5 needs about 35 of the 40 default blocks; beyond that the
            // default cap cannot reach the tail tolerance.
            for u in [0.05, 0.2, 0.35, 0.5] {
                let x = d.baseline().quantile(u).unwrap();
                let ps = pdf_series(&d, x, &policy()).unwrap();
                assert!(ps.converged, "pdf series should converge at u={u}");
                assert!(
                    (ps.value - d.pdf(x)).abs() <= 1e-10 * d.pdf(x),
                    "pdf mismatch at u={u}: {} vs {}",
                    ps.value,
                    d.pdf(x)
                );
                let cs = cdf_series(&d, x, &policy()).unwrap();
                assert!(cs.converged);
                assert!(
                    (cs.value - d.cdf(x)).abs() <= 1e-10,
                    "cdf mismatch at u={u}: {} vs {}",
                    cs.value,
                    d.cdf(x)
                );
            }
        }
    }

    #[test]
    fn pointwise_series_flags_truncation_near_the_boundary() {
        // Odds of 30 puts G at 30/31; the default 40-term cap cannot reach
        // the tail criterion there and must say so.
        let d = exp_d(1.0, 1.0);
        let x = 31.0f64.ln();
        let ps = pdf_series(&d, x, &policy()).unwrap();
        assert!(!ps.converged);
        assert!(ps.value.is_finite());
        assert_eq!(ps.blocks_used, policy().max_index + 1);
    }

    #[test]
    fn fixed_caps_mode_sums_every_block() {
        let d = exp_d(1.0, 1.0);
        let x = d.baseline().quantile(0.3).unwrap();
        let p = TruncationPolicy::new(40, 1e-10, TruncationMode::FixedCaps).unwrap();
        let ps = pdf_series(&d, x, &p).unwrap();
        assert_eq!(ps.blocks_used, 41);
        assert!(ps.converged);
        let adaptive = pdf_series(&d, x, &policy()).unwrap();
        assert!(adaptive.blocks_used < 41);
        // The adaptive run stops once blocks fall below the tail tolerance,
        // leaving a geometric remainder of roughly tol / (1 - G(x)).
        assert!((ps.value - adaptive.value).abs() <= 2e-9 * ps.value);
    }

    #[test]
    fn truncation_policy_validation() {
        assert!(TruncationPolicy::new(0, 1e-10, TruncationMode::FixedCaps).is_err());
        assert!(TruncationPolicy::new(40, 0.0, TruncationMode::FixedCaps).is_err());
        assert!(TruncationPolicy::new(40, 1.5, TruncationMode::FixedCaps).is_err());
    }

    // Frozen high-precision reference values for the uniform(0,1) model at
    // lambda = 1 and the exponential(rate 1) model.
    const UNI_1_MOMENTS: [f64; 4] = [
        0.552_739_478_257_604_444_24,
        0.360_044_753_611_216_295_56,
        0.251_025_043_447_242_220_32,
        0.182_072_463_700_092_588_42,
    ];
    const UNI_HALF_MOMENTS: [f64; 4] = [
        0.724_393_618_232_556_152_33,
        0.567_408_159_541_079_508_41,
        0.459_350_273_497_662_048_23,
        0.379_277_186_122_457_427_78,
    ];

    #[test]
    fn raw_moments_match_reference_uniform() {
        for (lambda, expect) in [(1.0, UNI_1_MOMENTS), (0.5, UNI_HALF_MOMENTS)] {
            let d = uni(lambda, 1.0);
            for (r, want) in expect.iter().enumerate() {
                for method in [EvalMethod::Series, EvalMethod::Quadrature] {
                    let m = raw_moment(&d, r as u32 + 1, &policy(), method).unwrap();
                    assert!(m.converged, "lambda={lambda} r={} {method}", r + 1);
                    assert!(
                        (m.value - want).abs() <= 1e-9 * want,
                        "lambda={lambda} r={} {method}: {} vs {want}",
                        r + 1,
                        m.value
                    );
                }
            }
        }
    }

    #[test]
    fn raw_moments_match_reference_exponential() {
        let cases = [
            (1.0, 1, 0.947_260_521_742_395_555_76),
            (1.0, 2, 1.197_121_758_710_210_808_1),
            (0.5, 1, 1.525_516_307_696_131_185),
            (2.0, 1, 0.527_995_283_554_889_251_36),
        ];
        for (lambda, r, want) in cases {
            let d = exp_d(lambda, 1.0);
            for method in [EvalMethod::Series, EvalMethod::Quadrature] {
                let m = raw_moment(&d, r, &policy(), method).unwrap();
                assert!(m.converged);
                assert!(
                    (m.value - want).abs() <= 1e-9 * want,
                    "lambda={lambda} r={r} {method}: {} vs {want}",
                    m.value
                );
            }
        }
    }

    #[test]
    fn moment_set_summaries_match_reference() {
        let d = uni(1.0, 1.0);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let ms = moment_set(&d, &policy(), method).unwrap();
            assert!(ms.converged);
            assert!((ms.variance - 0.054_523_822_786_727_519_412).abs() < 1e-10);
            assert!((ms.skewness + 0.648_851_036_209_313_914_27).abs() < 1e-8);
            assert!((ms.kurtosis - 2.369_711_250_259_269_000_5).abs() < 1e-7);
        }
    }

    #[test]
    fn incomplete_moments_match_reference() {
        let d = uni(1.0, 1.0);
        let median = 0.610_610_094_948_077_726_36;
        assert!((d.quantile(0.5).unwrap() - median).abs() < 1e-12);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let at_half = incomplete_moment(&d, 1, 0.5, &policy(), method).unwrap();
            assert!((at_half.value - 0.100_614_343_745_508_087_51).abs() < 1e-10, "{method}");
            let at_med = incomplete_moment(&d, 1, median, &policy(), method).unwrap();
            assert!((at_med.value - 0.180_897_512_035_005_928_31).abs() < 1e-10, "{method}");
        }
    }

    #[test]
    fn mean_deviations_match_reference() {
        let d = uni(1.0, 1.0);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let md = mean_deviations(&d, &policy(), method).unwrap();
            assert!(md.converged);
            assert!(
                (md.about_mean - 0.195_778_636_157_421_053_12).abs() < 1e-9,
                "{method}: {}",
                md.about_mean
            );
            assert!(
                (md.about_median - 0.190_944_454_187_592_587_62).abs() < 1e-9,
                "{method}: {}",
                md.about_median
            );
        }
    }

    #[test]
    fn lorenz_and_bonferroni_match_reference() {
        let d = uni(1.0, 1.0);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let l = lorenz(&d, 0.5, &policy(), method).unwrap();
            assert!((l.value - 0.327_274_455_961_147_349).abs() < 1e-9);
            let b = bonferroni(&d, 0.5, &policy(), method).unwrap();
            assert!((b.value - 0.654_548_911_922_294_698_01).abs() < 1e-9);
        }
        // L(1) = 1 by construction.
        let l1 = lorenz(&d, 1.0, &policy(), EvalMethod::Series).unwrap();
        assert!((l1.value - 1.0).abs() < 1e-9);
        // Undefined for supports extending below zero.
        let n = OxgDistribution::new(1.0, BaselineModel::normal(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            lorenz(&n, 0.5, &policy(), EvalMethod::Quadrature),
            Err(OxgError::Unsupported(_))
        ));
    }

    #[test]
    fn mgf_matches_reference() {
        let d = uni(1.0, 1.0);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let m = mgf(&d, 0.1, &policy(), method).unwrap();
            assert!(
                (m.value - 1.057_116_779_185_601_181_3).abs() < 1e-10,
                "{method}: {}",
                m.value
            );
            let zero = mgf(&d, 0.0, &policy(), method).unwrap();
            assert!((zero.value - 1.0).abs() < 1e-12);
            // mgf(-s) on a positive variable lies in (0, 1).
            let neg = mgf(&d, -0.5, &policy(), method).unwrap();
            assert!(neg.value > 0.0 && neg.value < 1.0);
        }
    }

    #[test]
    fn renyi_entropy_matches_reference() {
        let cases = [
            (uni(1.0, 1.0), 2.0, -0.324_119_468_654_211_976_09),
            (uni(1.0, 1.0), 3.0, -0.406_251_970_214_362_911_54),
            (exp_d(1.0, 1.0), 2.0, 0.677_642_994_023_980_055_27),
            (exp_d(1.0, 1.0), 3.0, 0.652_756_647_865_626_489_23),
        ];
        for (d, beta, want) in cases {
            for method in [EvalMethod::Series, EvalMethod::Quadrature] {
                let h = renyi_entropy(&d, beta, &policy(), method).unwrap();
                assert!(h.converged);
                assert!(
                    (h.value - want).abs() <= 1e-9 * want.abs(),
                    "beta={beta} {method}: {} vs {want}",
                    h.value
                );
            }
        }
    }

    #[test]
    fn renyi_entropy_rejects_bad_orders() {
        let d = uni(1.0, 1.0);
        assert!(renyi_entropy(&d, 1.0, &policy(), EvalMethod::Quadrature).is_err());
        assert!(renyi_entropy(&d, -2.0, &policy(), EvalMethod::Quadrature).is_err());
        assert!(matches!(
            renyi_entropy(&d, 2.5, &policy(), EvalMethod::Series),
            Err(OxgError::Unsupported(_))
        ));
        // Non-integer orders are fine under quadrature.
        let h = renyi_entropy(&d, 2.5, &policy(), EvalMethod::Quadrature).unwrap();
        assert!(h.value.is_finite() && h.converged);
    }

    #[test]
    fn stress_strength_matches_closed_form() {
        // For exponential-rate-1 odds the reliability of (0.5, 1.5) is
        // exactly 537/640.
        let p = policy();
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let d1 = exp_d(0.5, 1.0);
            let d2 = exp_d(1.5, 1.0);
            let r = stress_strength(&d1, &d2, &p, method).unwrap();
            assert!(r.converged);
            assert!(
                (r.value - 0.839_062_5).abs() < 1e-9,
                "{method}: {}",
                r.value
            );
            let r2 = stress_strength(&exp_d(2.0, 1.0), &exp_d(0.7, 1.0), &p, method).unwrap();
            assert!((r2.value - 0.181_730_829_024_530_036_2).abs() < 1e-9, "{method}");
        }
    }

    #[test]
    fn stress_strength_is_baseline_invariant_and_symmetric() {
        let p = policy();
        // Monotone odds transforms cancel: any common baseline gives the
        // same reliability.
        let (l1, l2) = (0.8, 1.7);
        let r_exp = stress_strength(&exp_d(l1, 1.0), &exp_d(l2, 1.0), &p, EvalMethod::Series)
            .unwrap()
            .value;
        let r_uni = stress_strength(&uni(l1, 3.0), &uni(l2, 3.0), &p, EvalMethod::Series)
            .unwrap()
            .value;
        assert!((r_exp - r_uni).abs() < 1e-10);
        // Swapping the roles complements the probability.
        let r_swap = stress_strength(&exp_d(l2, 1.0), &exp_d(l1, 1.0), &p, EvalMethod::Series)
            .unwrap()
            .value;
        assert!((r_exp + r_swap - 1.0).abs() < 1e-10);
        // Distinct baselines are rejected.
        assert!(stress_strength(&exp_d(1.0, 1.0), &uni(1.0, 1.0), &p, EvalMethod::Series).is_err());
    }

    #[test]
    fn residual_moments_match_reference() {
        let d = uni(1.0, 1.0);
        for method in [EvalMethod::Series, EvalMethod::Quadrature] {
            let m = residual_moment(&d, 1, 0.3, &policy(), method).unwrap();
            assert!(m.converged);
            assert!(
                (m.value - 0.338_561_914_156_012_052_42).abs() < 1e-9,
                "{method}: {}",
                m.value
            );
            let rev = reversed_residual_moment(&d, 1, 0.5, &policy(), method).unwrap();
            assert!(
                (rev.value - 0.217_542_832_833_080_897_98).abs() < 1e-9,
                "{method}: {}",
                rev.value
            );
        }
    }

    #[test]
    fn residual_series_is_uniform_only() {
        let d = exp_d(1.0, 1.0);
        assert!(matches!(
            residual_moment(&d, 1, 0.5, &policy(), EvalMethod::Series),
            Err(OxgError::Unsupported(_))
        ));
        assert!(matches!(
            reversed_residual_moment(&d, 1, 0.5, &policy(), EvalMethod::Series),
            Err(OxgError::Unsupported(_))
        ));
        // Quadrature serves every baseline; sanity: residual mean at 0
        // equals the mean.
        let m = residual_moment(&d, 1, 0.0, &policy(), EvalMethod::Quadrature).unwrap();
        assert!((m.value - 0.947_260_521_742_395_555_76).abs() < 1e-8);
    }

    #[test]
    fn residual_moment_domain_checks() {
        let d = uni(1.0, 1.0);
        assert!(residual_moment(&d, 1, 1.0, &policy(), EvalMethod::Quadrature).is_err());
        assert!(reversed_residual_moment(&d, 1, 0.0, &policy(), EvalMethod::Quadrature).is_err());
    }

    #[test]
    fn order_stat_pdf_reduces_to_the_density() {
        let d = exp_d(1.3, 0.8);
        for x in [0.2, 0.9, 2.5] {
            let f11 = order_stat_pdf(&d, 1, 1, x).unwrap();
            assert_eq!(f11.to_bits(), d.pdf(x).to_bits());
        }
        assert!(order_stat_pdf(&d, 0, 3, 1.0).is_err());
        assert!(order_stat_pdf(&d, 4, 3, 1.0).is_err());
    }

    #[test]
    fn order_stat_pdf_integrates_to_one() {
        let d = uni(0.7, 2.0);
        for (i, n) in [(1usize, 3usize), (2, 3), (3, 3)] {
            let q = integrate(
                |x| order_stat_pdf(&d, i, n, x).unwrap_or(0.0),
                0.0,
                2.0,
                1e-11,
                1e-11,
            );
            assert!(
                (q.value - 1.0).abs() < 1e-9,
                "({i},{n}) integrates to {}",
                q.value
            );
        }
    }

    #[test]
    fn order_stat_expansion_tracks_direct_form() {
        let d = exp_d(0.5, 1.0);
        let x = d.baseline().quantile(0.4).unwrap();
        let direct = order_stat_pdf(&d, 2, 5, x).unwrap();
        let exp = order_stat_pdf_expansion(&d, 2, 5, x, &policy()).unwrap();
        assert!(exp.converged);
        assert!((exp.value - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn mgf_series_flags_are_honest_for_wide_arguments() {
        // Bounded support: the Taylor series converges for any argument.
        let d = uni(1.0, 1.0);
        let m = mgf(&d, 3.0, &policy(), EvalMethod::Series).unwrap();
        let q = mgf(&d, 3.0, &policy(), EvalMethod::Quadrature).unwrap();
        assert!(m.converged);
        assert!((m.value - q.value).abs() <= 1e-9 * q.value);
    }
}
