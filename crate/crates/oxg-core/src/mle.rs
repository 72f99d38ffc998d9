//! Maximum likelihood estimation and goodness of fit.
//!
//! The shape score has the closed form
//!
//!   U_lambda = 2n/lambda - n/(1+lambda)
//!              - sum V_i + sum (V_i^2/2) / (1 + (lambda/2) V_i^2)
//!
//! with V_i the baseline odds of observation i; baseline-parameter score
//! components use centred differences of ln g, ln(1-G) and V, which keeps
//! the estimator definition independent of any one baseline's algebra.
//!
//! Fitting minimises the negative log likelihood with Nelder-Mead over
//! log-transformed parameters (so positivity is structural, not penalised)
//! from a small deterministic grid of starting points, and reports the
//! per-observation sup-norm of the score at the optimum as a convergence
//! diagnostic alongside the simplex's own criterion.

use crate::baseline::{BaselineKind, BaselineModel};
use crate::dist::OxgDistribution;
use crate::error::{OxgError, Result};
use crate::optim::nelder_mead;

/// Result of a maximum likelihood fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub lambda: f64,
    pub baseline: BaselineModel,
    pub log_likelihood: f64,
    pub aic: f64,
    /// Iterations used by the best simplex run.
    pub iterations: usize,
    /// Simplex converged and the score is numerically zero.
    pub converged: bool,
    /// Sup norm of the score divided by the sample size.
    pub score_norm: f64,
    /// Number of starting points searched.
    pub restarts_used: usize,
}

impl FitResult {
    /// The fitted distribution.
    pub fn distribution(&self) -> Result<OxgDistribution> {
        OxgDistribution::new(self.lambda, self.baseline)
    }

    /// All fitted parameters with their names, shape first.
    pub fn named_params(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("lambda", self.lambda)];
        for (name, value) in self
            .baseline
            .param_names()
            .iter()
            .zip(self.baseline.params())
        {
            out.push((name, value));
        }
        out
    }
}

/// Akaike information criterion for k parameters.
pub fn aic(k: usize, log_likelihood: f64) -> f64 {
    2.0 * k as f64 - 2.0 * log_likelihood
}

/// Sum of log densities, with a diagnostic error naming the first
/// observation that carries zero density under the model.
pub fn log_likelihood(d: &OxgDistribution, obs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &x) in obs.iter().enumerate() {
        let lp = d.log_pdf(x);
        if !lp.is_finite() {
            return Err(OxgError::Data(format!(
                "observation {} (value {x}) has zero density under the {} model",
                i + 1,
                d.baseline().kind()
            )));
        }
        total += lp;
    }
    Ok(total)
}

/// Log likelihood for optimisation: -inf instead of an error off-support.
fn ll_penalised(d: &OxgDistribution, obs: &[f64]) -> f64 {
    let mut total = 0.0;
    for &x in obs {
        let lp = d.log_pdf(x);
        if !lp.is_finite() {
            return f64::NEG_INFINITY;
        }
        total += lp;
    }
    total
}

/// Odds, log density and log survival of every observation under a
/// baseline; None if any observation has infinite odds (used to detect an
/// invalid finite-difference displacement).
fn baseline_terms(b: &BaselineModel, obs: &[f64]) -> Option<Vec<(f64, f64, f64)>> {
    obs.iter()
        .map(|&x| b.odds(x).ok().map(|v| (v, b.ln_pdf(x), b.ln_sf(x))))
        .collect()
}

/// Score vector (d log L / d parameter) in the order lambda, then the
/// baseline parameters.
pub fn score(d: &OxgDistribution, obs: &[f64]) -> Result<Vec<f64>> {
    let lambda = d.lambda();
    let n = obs.len() as f64;
    let base = baseline_terms(d.baseline(), obs).ok_or_else(|| {
        OxgError::Data("an observation has infinite baseline odds; the score is undefined".into())
    })?;

    let mut u_lambda = 2.0 * n / lambda - n / (1.0 + lambda);
    for &(v, _, _) in &base {
        u_lambda += -v + (0.5 * v * v) / (1.0 + 0.5 * lambda * v * v);
    }
    let mut out = vec![u_lambda];

    let kind = d.baseline().kind();
    let params = d.baseline().params();
    for j in 0..params.len() {
        let h = 1e-6 * (1.0 + params[j].abs());
        let mut plus = params.clone();
        plus[j] += h;
        let b_plus = BaselineModel::from_kind(kind, &plus)?;
        let terms_plus = baseline_terms(&b_plus, obs).ok_or_else(|| {
            OxgError::NonConvergence(
                "finite-difference displacement left the valid parameter region".into(),
            )
        })?;
        let mut minus = params.clone();
        minus[j] -= h;
        // Centred difference when the downward displacement stays valid
        // (it may not, e.g. a uniform range just above the sample maximum);
        // otherwise fall back to a forward difference against the centre.
        let down = BaselineModel::from_kind(kind, &minus)
            .ok()
            .and_then(|b| baseline_terms(&b, obs));
        let (lo_terms, denom) = match &down {
            Some(t) => (t.as_slice(), 2.0 * h),
            None => (base.as_slice(), h),
        };
        let mut u = 0.0;
        for (((vp, lgp, lsp), (vm, lgm, lsm)), (v0, _, _)) in
            terms_plus.iter().zip(lo_terms).zip(&base)
        {
            let dv = (vp - vm) / denom;
            let dlng = (lgp - lgm) / denom;
            let dlnsf = (lsp - lsm) / denom;
            u += dlng - 2.0 * dlnsf + lambda * v0 * dv / (1.0 + 0.5 * lambda * v0 * v0)
                - lambda * dv;
        }
        out.push(u);
    }
    Ok(out)
}

/// Deterministic starting grid in the transformed parameter space.
fn starting_points(kind: BaselineKind, obs: &[f64]) -> Vec<Vec<f64>> {
    let n = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / n;
    let max_x = obs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let median = {
        let mut s = obs.to_vec();
        s.sort_by(f64::total_cmp);
        if s.len() % 2 == 1 {
            s[s.len() / 2]
        } else {
            0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2])
        }
    };
    let sd = {
        let var = obs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt().max(1e-3 * (1.0 + mean.abs()))
    };

    let lambdas = [0.1f64, 1.0, 10.0];
    let mut starts = Vec::new();
    for l in lambdas {
        let z0 = l.ln();
        match kind {
            BaselineKind::Exponential => {
                for rate in [1.0 / mean, 1.0 / median] {
                    starts.push(vec![z0, rate.ln()]);
                }
            }
            BaselineKind::Uniform => {
                // theta = max + e^eta; begin at 1.05 max and 2 max.
                for margin in [0.05 * max_x, max_x] {
                    starts.push(vec![z0, margin.ln()]);
                }
            }
            BaselineKind::BurrXii => {
                for (alpha, theta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)] {
                    starts.push(vec![z0, f64::ln(alpha), f64::ln(theta)]);
                }
            }
            BaselineKind::Normal => {
                starts.push(vec![z0, mean, sd.ln()]);
            }
        }
    }
    starts.truncate(8);
    starts
}

/// Maps a transformed parameter vector to (lambda, baseline).
fn decode(kind: BaselineKind, z: &[f64], max_x: f64) -> Result<(f64, BaselineModel)> {
    let lambda = z[0].exp();
    let baseline = match kind {
        BaselineKind::Exponential => BaselineModel::exponential(z[1].exp())?,
        BaselineKind::Uniform => BaselineModel::uniform(max_x + z[1].exp())?,
        BaselineKind::BurrXii => BaselineModel::burr_xii(z[1].exp(), z[2].exp())?,
        BaselineKind::Normal => BaselineModel::normal(z[1], z[2].exp())?,
    };
    Ok((lambda, baseline))
}

/// Fits the family to data by maximum likelihood.
pub fn fit(obs: &[f64], kind: BaselineKind) -> Result<FitResult> {
    if obs.len() < 2 {
        return Err(OxgError::Data(format!(
            "need at least 2 observations to fit, got {}",
            obs.len()
        )));
    }
    for (i, &x) in obs.iter().enumerate() {
        if !x.is_finite() {
            return Err(OxgError::Data(format!(
                "observation {} is not finite ({x})",
                i + 1
            )));
        }
        if kind != BaselineKind::Normal && x <= 0.0 {
            return Err(OxgError::Data(format!(
                "observation {} (value {x}) must be positive for the {kind} baseline",
                i + 1
            )));
        }
    }
    let max_x = obs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let objective = |z: &[f64]| -> f64 {
        match decode(kind, z, max_x).and_then(|(l, b)| OxgDistribution::new(l, b)) {
            Ok(d) => -ll_penalised(&d, obs),
            Err(_) => f64::INFINITY,
        }
    };

    let starts = starting_points(kind, obs);
    let mut best: Option<crate::optim::NelderMeadResult> = None;
    for start in &starts {
        let r = nelder_mead(objective, start, 0.25, 2000, 1e-9, 1e-10);
        let better = match &best {
            None => true,
            Some(b) => r.fmin < b.fmin,
        };
        if better {
            best = Some(r);
        }
    }
    let nm = best.expect("at least one starting point");
    if !nm.fmin.is_finite() {
        return Err(OxgError::NonConvergence(
            "the likelihood was degenerate at every point searched".into(),
        ));
    }

    let (lambda, baseline) = decode(kind, &nm.x, max_x)?;
    let d = OxgDistribution::new(lambda, baseline)?;
    let ll = log_likelihood(&d, obs)?;
    let k = 1 + baseline.params().len();
    let u = score(&d, obs)?;
    let score_norm = u.iter().fold(0.0f64, |a, v| a.max(v.abs())) / obs.len() as f64;
    Ok(FitResult {
        lambda,
        baseline,
        log_likelihood: ll,
        aic: aic(k, ll),
        iterations: nm.iterations,
        converged: nm.converged && score_norm <= 1e-4,
        score_norm,
        restarts_used: starts.len(),
    })
}

/// Kolmogorov-Smirnov statistic of the sample against a fitted model.
pub fn ks_statistic(d: &OxgDistribution, obs: &[f64]) -> Result<f64> {
    if obs.is_empty() {
        return Err(OxgError::Data("cannot compute a KS statistic without data".into()));
    }
    let mut sorted = obs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut dmax = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = d.cdf(x);
        dmax = dmax.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    Ok(dmax)
}

/// Asymptotic 1% critical value of the KS statistic, 1.63 / sqrt(n).
pub fn ks_critical_01(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{GLASS_FIBRES, INDOMETH};

    #[test]
    fn aic_formula() {
        assert!((aic(2, -14.046181) - 32.092362).abs() < 1e-9);
        assert!((aic(3, 0.0) - 6.0).abs() < 1e-12);
    }

    // Reference fits frozen from an independent optimiser run on the same
    // likelihood (simplex on log parameters, tolerance 1e-12).
    #[test]
    fn fit_glass_fibres_exponential() {
        let r = fit(&GLASS_FIBRES, BaselineKind::Exponential).unwrap();
        assert!(r.converged, "score_norm = {}", r.score_norm);
        assert!(
            (r.log_likelihood - -14.046181).abs() < 1e-3,
            "ll = {}",
            r.log_likelihood
        );
        assert!((r.aic - 32.092361).abs() < 2e-3);
        assert!(
            (r.lambda - 0.08730867).abs() < 0.01 * 0.08730867,
            "lambda = {}",
            r.lambda
        );
        let theta = r.baseline.params()[0];
        assert!((theta - 2.19239064).abs() < 0.01 * 2.19239064, "theta = {theta}");
    }

    #[test]
    fn fit_indometh_exponential() {
        let r = fit(&INDOMETH, BaselineKind::Exponential).unwrap();
        assert!(r.converged, "score_norm = {}", r.score_norm);
        assert!(
            (r.log_likelihood - -31.341735).abs() < 1e-3,
            "ll = {}",
            r.log_likelihood
        );
        // The likelihood surface has a shallow ridge here; parameters get a
        // looser tolerance than the likelihood itself.
        assert!((r.lambda - 16.74079748).abs() < 0.02 * 16.74079748, "lambda = {}", r.lambda);
        let theta = r.baseline.params()[0];
        assert!((theta - 0.10539001).abs() < 0.01 * 0.10539001, "theta = {theta}");
    }

    #[test]
    fn score_vanishes_at_the_optimum() {
        let r = fit(&GLASS_FIBRES, BaselineKind::Exponential).unwrap();
        assert!(r.score_norm <= 1e-4, "score_norm = {}", r.score_norm);
    }

    #[test]
    fn score_matches_likelihood_differences() {
        let d = OxgDistribution::new(1.3, BaselineModel::exponential(0.9).unwrap()).unwrap();
        let obs = d.sample(40, 99).unwrap();
        let u = score(&d, &obs).unwrap();
        // Central difference of the log likelihood in each natural
        // parameter.
        let h = 1e-5;
        let fd_lambda = {
            let dp = OxgDistribution::new(1.3 + h, *d.baseline()).unwrap();
            let dm = OxgDistribution::new(1.3 - h, *d.baseline()).unwrap();
            (ll_penalised(&dp, &obs) - ll_penalised(&dm, &obs)) / (2.0 * h)
        };
        assert!(
            (u[0] - fd_lambda).abs() <= 1e-4 * fd_lambda.abs().max(1.0),
            "analytic {} vs fd {}",
            u[0],
            fd_lambda
        );
        let fd_theta = {
            let bp = BaselineModel::exponential(0.9 + h).unwrap();
            let bm = BaselineModel::exponential(0.9 - h).unwrap();
            let dp = OxgDistribution::new(1.3, bp).unwrap();
            let dm = OxgDistribution::new(1.3, bm).unwrap();
            (ll_penalised(&dp, &obs) - ll_penalised(&dm, &obs)) / (2.0 * h)
        };
        assert!(
            (u[1] - fd_theta).abs() <= 1e-4 * fd_theta.abs().max(1.0),
            "fd {} vs score {}",
            fd_theta,
            u[1]
        );
    }

    #[test]
    fn fit_recovers_uniform_synthetic_data() {
        let truth =
            OxgDistribution::new(1.0, BaselineModel::uniform(2.0).unwrap()).unwrap();
        let obs = truth.sample(200, 5).unwrap();
        let r = fit(&obs, BaselineKind::Uniform).unwrap();
        let max_x = obs.iter().cloned().fold(0.0f64, f64::max);
        let theta = r.baseline.params()[0];
        assert!(theta > max_x);
        assert!(r.log_likelihood.is_finite());
        assert!(r.lambda > 0.2 && r.lambda < 5.0, "lambda = {}", r.lambda);
    }

    #[test]
    fn fit_recovers_normal_synthetic_data() {
        let truth =
            OxgDistribution::new(1.0, BaselineModel::normal(0.5, 1.2).unwrap()).unwrap();
        let obs = truth.sample(150, 3).unwrap();
        let r = fit(&obs, BaselineKind::Normal).unwrap();
        assert!(r.log_likelihood.is_finite());
        let mu = r.baseline.params()[0];
        assert!((mu - 0.5).abs() < 0.8, "mu = {mu}");
    }

    #[test]
    fn fit_rejects_invalid_data() {
        assert!(fit(&[], BaselineKind::Exponential).is_err());
        assert!(fit(&[1.0], BaselineKind::Exponential).is_err());
        assert!(fit(&[1.0, -2.0, 3.0], BaselineKind::Exponential).is_err());
        assert!(fit(&[1.0, f64::NAN], BaselineKind::Normal).is_err());
        // Negative data are fine for the normal baseline.
        let obs: Vec<f64> = (0..50).map(|i| (i as f64 - 25.0) / 10.0).collect();
        assert!(fit(&obs, BaselineKind::Normal).is_ok());
    }

    #[test]
    fn ks_statistic_basics() {
        let d = OxgDistribution::new(1.0, BaselineModel::exponential(1.0).unwrap()).unwrap();
        let med = d.quantile(0.5).unwrap();
        let ks = ks_statistic(&d, &[med]).unwrap();
        assert!((ks - 0.5).abs() < 1e-9);
        assert!(ks_statistic(&d, &[]).is_err());
        assert!((ks_critical_01(63) - 1.63 / 63.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fitted_glass_model_passes_ks() {
        let r = fit(&GLASS_FIBRES, BaselineKind::Exponential).unwrap();
        let d = r.distribution().unwrap();
        let ks = ks_statistic(&d, &GLASS_FIBRES).unwrap();
        assert!(ks < ks_critical_01(GLASS_FIBRES.len()), "ks = {ks}");
    }
}
