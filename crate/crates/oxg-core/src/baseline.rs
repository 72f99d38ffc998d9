//! Baseline distributions feeding the odds transformation.
//!
//! A baseline G with density g supplies the odds variable
//! W(x) = G(x) / (1 - G(x)); everything else in the family is a function of
//! W. Four baselines are provided:
//!
//! * uniform on (0, theta)
//! * exponential with rate theta
//! * Burr XII with shape alpha and theta: G(x) = 1 - (1 + x^alpha)^(-theta)
//! * normal with mean mu and standard deviation sigma
//!
//! Accuracy in the far tail is what matters most here: the transformed
//! density involves 1/(1-G)^2 and exp(-lambda W), so `ln_sf` and `odds` are
//! computed from tail-stable forms (expm1/ln1p, scaled complementary error
//! function) rather than via `1 - cdf`.

use std::fmt;
use std::str::FromStr;

use crate::error::{OxgError, Result};
use crate::solve::find_root;
use crate::special::{norm_cdf, norm_ln_sf, norm_pdf, norm_sf};

/// Names of the supported baseline families, for CLI parsing and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Uniform,
    Exponential,
    BurrXii,
    Normal,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::Uniform => "uniform",
            BaselineKind::Exponential => "exponential",
            BaselineKind::BurrXii => "burr-xii",
            BaselineKind::Normal => "normal",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = OxgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(BaselineKind::Uniform),
            "exponential" => Ok(BaselineKind::Exponential),
            "burr-xii" => Ok(BaselineKind::BurrXii),
            "normal" => Ok(BaselineKind::Normal),
            other => Err(OxgError::InvalidParameter(format!(
                "unknown baseline '{other}' (expected uniform, exponential, burr-xii or normal)"
            ))),
        }
    }
}

/// A fully parameterised baseline distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineModel {
    /// Uniform on (0, theta).
    Uniform { theta: f64 },
    /// Exponential with rate theta (mean 1/theta).
    Exponential { theta: f64 },
    /// Burr XII: G(x) = 1 - (1 + x^alpha)^(-theta) on x > 0.
    BurrXii { alpha: f64, theta: f64 },
    /// Normal with mean mu and standard deviation sigma.
    Normal { mu: f64, sigma: f64 },
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(OxgError::InvalidParameter(format!(
            "{name} must be a positive finite number, got {value}"
        )))
    }
}

impl BaselineModel {
    /// Uniform baseline on (0, theta).
    pub fn uniform(theta: f64) -> Result<Self> {
        require_positive("theta", theta)?;
        Ok(BaselineModel::Uniform { theta })
    }

    /// Exponential baseline with rate theta.
    pub fn exponential(theta: f64) -> Result<Self> {
        require_positive("theta", theta)?;
        Ok(BaselineModel::Exponential { theta })
    }

    /// Burr XII baseline with shapes alpha and theta.
    pub fn burr_xii(alpha: f64, theta: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        require_positive("theta", theta)?;
        Ok(BaselineModel::BurrXii { alpha, theta })
    }

    /// Normal baseline with mean mu and standard deviation sigma.
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(OxgError::InvalidParameter(format!(
                "mu must be finite, got {mu}"
            )));
        }
        require_positive("sigma", sigma)?;
        Ok(BaselineModel::Normal { mu, sigma })
    }

    /// Builds a baseline from its CLI name and parameter vector.
    ///
    /// Expected lengths: uniform and exponential take `[theta]`, burr-xii
    /// takes `[alpha, theta]`, normal takes `[mu, sigma]`.
    pub fn from_kind(kind: BaselineKind, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(OxgError::InvalidParameter(format!(
                    "baseline {kind} expects {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match kind {
            BaselineKind::Uniform => {
                want(1)?;
                BaselineModel::uniform(params[0])
            }
            BaselineKind::Exponential => {
                want(1)?;
                BaselineModel::exponential(params[0])
            }
            BaselineKind::BurrXii => {
                want(2)?;
                BaselineModel::burr_xii(params[0], params[1])
            }
            BaselineKind::Normal => {
                want(2)?;
                BaselineModel::normal(params[0], params[1])
            }
        }
    }

    /// Which family this model belongs to.
    pub fn kind(&self) -> BaselineKind {
        match self {
            BaselineModel::Uniform { .. } => BaselineKind::Uniform,
            BaselineModel::Exponential { .. } => BaselineKind::Exponential,
            BaselineModel::BurrXii { .. } => BaselineKind::BurrXii,
            BaselineModel::Normal { .. } => BaselineKind::Normal,
        }
    }

    /// Parameter vector in constructor order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            BaselineModel::Uniform { theta } => vec![theta],
            BaselineModel::Exponential { theta } => vec![theta],
            BaselineModel::BurrXii { alpha, theta } => vec![alpha, theta],
            BaselineModel::Normal { mu, sigma } => vec![mu, sigma],
        }
    }

    /// Parameter names matching the order of [`Self::params`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            BaselineModel::Uniform { .. } => &["theta"],
            BaselineModel::Exponential { .. } => &["theta"],
            BaselineModel::BurrXii { .. } => &["alpha", "theta"],
            BaselineModel::Normal { .. } => &["mu", "sigma"],
        }
    }

    /// The open support interval (lower, upper) of the baseline.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            BaselineModel::Uniform { theta } => (0.0, theta),
            BaselineModel::Exponential { .. } => (0.0, f64::INFINITY),
            BaselineModel::BurrXii { .. } => (0.0, f64::INFINITY),
            BaselineModel::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// G(x), clamped to [0, 1] outside the support.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Uniform { theta } => (x / theta).clamp(0.0, 1.0),
            BaselineModel::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-theta * x).exp_m1()
                }
            }
            BaselineModel::BurrXii { alpha, theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-theta * x.powf(alpha).ln_1p()).exp_m1()
                }
            }
            BaselineModel::Normal { mu, sigma } => norm_cdf((x - mu) / sigma),
        }
    }

    /// Survival function 1 - G(x), computed without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Uniform { theta } => ((theta - x) / theta).clamp(0.0, 1.0),
            BaselineModel::Exponential { theta } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-theta * x).exp()
                }
            }
            BaselineModel::BurrXii { alpha, theta } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-theta * x.powf(alpha).ln_1p()).exp()
                }
            }
            BaselineModel::Normal { mu, sigma } => norm_sf((x - mu) / sigma),
        }
    }

    /// ln(1 - G(x)); -inf at or beyond the upper endpoint.
    pub fn ln_sf(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Uniform { theta } => {
                if x <= 0.0 {
                    0.0
                } else if x >= theta {
                    f64::NEG_INFINITY
                } else {
                    ((theta - x) / theta).ln()
                }
            }
            BaselineModel::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -theta * x
                }
            }
            BaselineModel::BurrXii { alpha, theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -theta * x.powf(alpha).ln_1p()
                }
            }
            BaselineModel::Normal { mu, sigma } => norm_ln_sf((x - mu) / sigma),
        }
    }

    /// Density g(x); 0 outside the support, boundary values by continuity
    /// from the interior (e.g. the exponential density tends to theta at 0).
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Uniform { theta } => {
                if (0.0..=theta).contains(&x) {
                    1.0 / theta
                } else {
                    0.0
                }
            }
            BaselineModel::Exponential { theta } => {
                if x < 0.0 {
                    0.0
                } else {
                    theta * (-theta * x).exp()
                }
            }
            BaselineModel::BurrXii { alpha, theta } => {
                if x < 0.0 {
                    0.0
                } else if x == 0.0 {
                    // Limit of alpha*theta*x^(alpha-1)*(1+x^alpha)^-(theta+1).
                    if alpha > 1.0 {
                        0.0
                    } else if alpha == 1.0 {
                        theta
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let xa = x.powf(alpha);
                    alpha * theta * xa / x * (-(theta + 1.0) * xa.ln_1p()).exp()
                }
            }
            BaselineModel::Normal { mu, sigma } => norm_pdf((x - mu) / sigma) / sigma,
        }
    }

    /// ln g(x); -inf where the density vanishes.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Uniform { theta } => {
                if (0.0..=theta).contains(&x) {
                    -theta.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            BaselineModel::Exponential { theta } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    theta.ln() - theta * x
                }
            }
            BaselineModel::BurrXii { alpha, theta } => {
                if x <= 0.0 {
                    self.pdf(x).ln()
                } else {
                    let xa = x.powf(alpha);
                    alpha.ln() + theta.ln() + (alpha - 1.0) * x.ln()
                        - (theta + 1.0) * xa.ln_1p()
                }
            }
            BaselineModel::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - sigma.ln()
            }
        }
    }

    /// Quantile function G^{-1}(u) for u in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) || !u.is_finite() {
            return Err(OxgError::Domain(format!(
                "quantile level must lie in [0, 1], got {u}"
            )));
        }
        if u == 0.0 || u == 1.0 {
            let (lo, hi) = self.support();
            return Ok(if u == 0.0 { lo } else { hi });
        }
        Ok(match *self {
            BaselineModel::Uniform { theta } => theta * u,
            BaselineModel::Exponential { theta } => -(-u).ln_1p() / theta,
            BaselineModel::BurrXii { alpha, theta } => {
                // Invert 1 - (1 + x^alpha)^(-theta) = u  =>
                // x = (exp(-ln(1-u)/theta) - 1)^(1/alpha).
                (-(-u).ln_1p() / theta).exp_m1().powf(1.0 / alpha)
            }
            BaselineModel::Normal { mu, sigma } => {
                // Solve Phi(z) = u by bracketed root finding; the bracket
                // covers every representable quantile level.
                let r = find_root(|z| norm_cdf(z) - u, -42.0, 42.0, 1e-15, 0.0, 200)?;
                mu + sigma * r.x
            }
        })
    }

    /// The odds W(x) = G(x)/(1 - G(x)).
    ///
    /// Past the upper end of the support the odds are infinite, which the
    /// transformed family cannot represent as a finite density argument, so
    /// that case is reported as an error rather than returning `inf`.
    pub fn odds(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Err(OxgError::InfiniteOdds);
        }
        Ok(match *self {
            BaselineModel::Uniform { theta } => x / (theta - x),
            BaselineModel::Exponential { theta } => (theta * x).exp_m1(),
            BaselineModel::BurrXii { alpha, theta } => {
                let la = theta * x.powf(alpha).ln_1p();
                if la > 33.0 {
                    // exp(la) - 1 = exp(la) to machine precision already,
                    // but keep the correction exact in extended form.
                    la.exp() - 1.0
                } else {
                    la.exp_m1()
                }
            }
            BaselineModel::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                norm_cdf(z) / norm_sf(z)
            }
        })
    }

    /// Inverts the odds: returns x with G(x)/(1-G(x)) = t, for t >= 0.
    pub fn quantile_from_odds(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(OxgError::Domain(format!(
                "odds must be non-negative, got {t}"
            )));
        }
        if t.is_infinite() {
            return Ok(self.support().1);
        }
        Ok(match *self {
            BaselineModel::Uniform { theta } => theta * t / (1.0 + t),
            // G = t/(1+t)  =>  1 - G = 1/(1+t)  =>  x = ln(1+t)/theta.
            BaselineModel::Exponential { theta } => t.ln_1p() / theta,
            BaselineModel::BurrXii { alpha, theta } => {
                (t.ln_1p() / theta).exp_m1().powf(1.0 / alpha)
            }
            BaselineModel::Normal { .. } => {
                // u = t/(1+t) with a stable complement for large t.
                let u = t / (1.0 + t);
                if u < 1.0 {
                    self.quantile(u)?
                } else {
                    // t/(1+t) rounded to 1: solve on the survival side,
                    // Phi_bar(z) = 1/(1+t).
                    let sf_target = 1.0 / (1.0 + t);
                    let BaselineModel::Normal { mu, sigma } = *self else {
                        unreachable!()
                    };
                    let r = find_root(
                        |z| norm_ln_sf(z) - sf_target.ln(),
                        0.0,
                        42.0,
                        1e-15,
                        0.0,
                        200,
                    )?;
                    mu + sigma * r.x
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<BaselineModel> {
        vec![
            BaselineModel::uniform(2.0).unwrap(),
            BaselineModel::exponential(1.3).unwrap(),
            BaselineModel::burr_xii(2.0, 1.5).unwrap(),
            BaselineModel::burr_xii(0.7, 3.0).unwrap(),
            BaselineModel::normal(-0.5, 2.0).unwrap(),
        ]
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BaselineModel::uniform(0.0).is_err());
        assert!(BaselineModel::exponential(-1.0).is_err());
        assert!(BaselineModel::burr_xii(1.0, f64::NAN).is_err());
        assert!(BaselineModel::normal(f64::INFINITY, 1.0).is_err());
        assert!(BaselineModel::normal(0.0, 0.0).is_err());
        assert!(BaselineModel::from_kind(BaselineKind::Uniform, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kind_round_trip() {
        for kind in [
            BaselineKind::Uniform,
            BaselineKind::Exponential,
            BaselineKind::BurrXii,
            BaselineKind::Normal,
        ] {
            assert_eq!(kind.to_string().parse::<BaselineKind>().unwrap(), kind);
        }
        assert!("weibull".parse::<BaselineKind>().is_err());
    }

    #[test]
    fn cdf_sf_complement() {
        for m in models() {
            for u in [0.01, 0.1, 0.5, 0.9, 0.99] {
                let x = m.quantile(u).unwrap();
                let c = m.cdf(x);
                let s = m.sf(x);
                assert!((c + s - 1.0).abs() < 1e-12, "{m:?} at u={u}");
                assert!((c - u).abs() < 1e-9, "{m:?}: quantile/cdf mismatch at {u}");
                assert!((m.ln_sf(x) - s.ln()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pdf_matches_cdf_derivative() {
        for m in models() {
            for u in [0.05, 0.3, 0.6, 0.95] {
                let x = m.quantile(u).unwrap();
                let h = 1e-6 * (1.0 + x.abs());
                let fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
                let pdf = m.pdf(x);
                assert!(
                    (fd - pdf).abs() <= 1e-6 * pdf.max(1.0),
                    "{m:?} at u={u}: fd={fd} pdf={pdf}"
                );
                assert!((m.ln_pdf(x) - pdf.ln()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn odds_and_inverse_agree() {
        for m in models() {
            for u in [0.001, 0.2, 0.5, 0.8, 0.999, 0.999999] {
                let x = m.quantile(u).unwrap();
                let t = m.odds(x).unwrap();
                let direct = u / (1.0 - u);
                assert!(
                    (t - direct).abs() <= 1e-8 * direct.max(1.0),
                    "{m:?} odds mismatch at u={u}: {t} vs {direct}"
                );
                let back = m.quantile_from_odds(t).unwrap();
                assert!(
                    (back - x).abs() <= 1e-8 * (1.0 + x.abs()),
                    "{m:?} odds inversion at u={u}: {back} vs {x}"
                );
            }
        }
    }

    #[test]
    fn deep_tail_odds_are_stable() {
        // Exponential odds must track expm1 exactly, far past double overflow
        // of the naive ratio.
        let m = BaselineModel::exponential(1.0).unwrap();
        let t = m.odds(500.0).unwrap();
        assert!((t.ln() - 500.0).abs() < 1e-12);
        let x = m.quantile_from_odds(t).unwrap();
        assert!((x - 500.0).abs() < 1e-9);

        // Normal odds at z = 30 from the asymptotic-safe survival function.
        let m = BaselineModel::normal(0.0, 1.0).unwrap();
        let t = m.odds(30.0).unwrap();
        // ln odds = -ln Phi_bar(30) up to Phi(30) = 1 exactly in doubles.
        assert!((t.ln() + norm_ln_sf(30.0)).abs() < 1e-10);
    }

    #[test]
    fn infinite_odds_is_an_error() {
        let m = BaselineModel::uniform(2.0).unwrap();
        assert!(matches!(m.odds(2.0), Err(OxgError::InfiniteOdds)));
        assert!(matches!(m.odds(5.0), Err(OxgError::InfiniteOdds)));
        assert_eq!(m.odds(0.0).unwrap(), 0.0);
        assert_eq!(m.odds(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn boundary_density_values() {
        // Densities at the support edge take their limiting values.
        let e = BaselineModel::exponential(2.5).unwrap();
        assert_eq!(e.pdf(0.0), 2.5);
        let u = BaselineModel::uniform(4.0).unwrap();
        assert_eq!(u.pdf(0.0), 0.25);
        assert_eq!(u.pdf(4.0), 0.25);
        assert_eq!(u.pdf(4.0 + 1e-12), 0.0);
        let b1 = BaselineModel::burr_xii(1.0, 2.0).unwrap();
        assert_eq!(b1.pdf(0.0), 2.0);
        let b2 = BaselineModel::burr_xii(2.0, 1.0).unwrap();
        assert_eq!(b2.pdf(0.0), 0.0);
    }

    #[test]
    fn quantile_endpoints() {
        let m = BaselineModel::exponential(1.0).unwrap();
        assert_eq!(m.quantile(0.0).unwrap(), 0.0);
        assert_eq!(m.quantile(1.0).unwrap(), f64::INFINITY);
        assert!(m.quantile(-0.1).is_err());
        assert!(m.quantile(1.5).is_err());
        let n = BaselineModel::normal(0.0, 1.0).unwrap();
        assert_eq!(n.quantile(0.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn normal_quantile_reference_values() {
        // Phi^-1(0.975) = 1.959963984540054..., Phi^-1(0.5) = 0.
        let n = BaselineModel::normal(0.0, 1.0).unwrap();
        assert!((n.quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        assert!(n.quantile(0.5).unwrap().abs() < 1e-12);
        let shifted = BaselineModel::normal(3.0, 2.0).unwrap();
        assert!((shifted.quantile(0.975).unwrap() - (3.0 + 2.0 * 1.959_963_984_540_054)).abs() < 1e-8);
    }
}
