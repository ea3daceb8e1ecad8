//! Multi-asset Black-Scholes model: payoffs, truncated Gaussian integrands
//! on `[-A, A]^d`, the call-put parity criterion, the 1-D closed form and
//! a crude Monte Carlo pricer.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{self, AdaptiveConfig, AdaptiveResult};
use crate::quadrature::Rect;
use crate::rng::{normal_cdf, GaussianStream};
use crate::{Error, Result};

/// Payoff selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    BasketCall,
    BasketPut,
    DigitalBasket,
    PutOnMin,
}

/// Model parameters for `d` correlated lognormal assets.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub spots: Vec<f64>,
    pub vols: Vec<f64>,
    pub rate: f64,
    pub maturity: f64,
    pub correlation: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub strike: f64,
    pub barriers: Option<Vec<f64>>,
}

impl ModelSpec {
    /// Homogeneous basket (weights `1/d`) with equicorrelation `rho`.
    pub fn equicorrelated(
        d: usize,
        spot: f64,
        vol: f64,
        rate: f64,
        maturity: f64,
        rho: f64,
        strike: f64,
    ) -> Result<Self> {
        let spec = ModelSpec {
            spots: vec![spot; d],
            vols: vec![vol; d],
            rate,
            maturity,
            correlation: equicorrelation(d, rho)?,
            weights: vec![1.0 / d as f64; d],
            strike,
            barriers: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.spots.len()
    }

    pub fn with_spot(&self, asset: usize, spot: f64) -> ModelSpec {
        let mut m = self.clone();
        m.spots[asset] = spot;
        m
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("model needs at least one asset"));
        }
        if self.vols.len() != d || self.weights.len() != d {
            return Err(Error::invalid(
                "spots, vols and weights must share the length d",
            ));
        }
        if let Some(b) = &self.barriers {
            if b.len() != d {
                return Err(Error::invalid("barriers must have length d"));
            }
            if b.iter().any(|&u| !u.is_finite() || u <= 0.0) {
                return Err(Error::invalid("barriers must be positive"));
            }
        }
        if self.spots.iter().any(|&s| !s.is_finite() || s <= 0.0) {
            return Err(Error::invalid("spot prices must be positive"));
        }
        if self.vols.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(Error::invalid("volatilities must be positive"));
        }
        if !self.maturity.is_finite() || self.maturity <= 0.0 {
            return Err(Error::invalid("maturity must be positive"));
        }
        if !self.strike.is_finite() || self.strike <= 0.0 {
            return Err(Error::invalid("strike must be positive"));
        }
        if self.correlation.nrows() != d || self.correlation.ncols() != d {
            return Err(Error::invalid("correlation matrix must be d x d"));
        }
        for i in 0..d {
            if (self.correlation[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("correlation diagonal must be one"));
            }
            for j in 0..i {
                if (self.correlation[(i, j)] - self.correlation[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("correlation matrix must be symmetric"));
                }
            }
        }
        self.cholesky()?;
        Ok(())
    }

    /// Lower-triangular Cholesky factor of the correlation matrix.
    pub fn cholesky(&self) -> Result<DMatrix<f64>> {
        nalgebra::Cholesky::new(self.correlation.clone())
            .map(|c| c.l())
            .ok_or_else(|| Error::invalid("correlation matrix is not positive definite"))
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.maturity).exp()
    }
}

/// Equicorrelation matrix `Gamma = (1 - rho) I + rho 1 1^T`, with `rho`
/// restricted to the positive-definite range `(-1/(d-1), 1)`.
pub fn equicorrelation(d: usize, rho: f64) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    let lo = if d > 1 {
        -1.0 / (d as f64 - 1.0)
    } else {
        f64::NEG_INFINITY
    };
    if d > 1 && !(rho > lo && rho < 1.0) {
        return Err(Error::CorrelationOutOfRange { rho, lo, d });
    }
    let gamma = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho });
    if nalgebra::Cholesky::new(gamma.clone()).is_none() {
        return Err(Error::CorrelationOutOfRange { rho, lo, d });
    }
    Ok(gamma)
}

/// Terminal prices `S_T^i = s_i exp((r - sigma_i^2/2) T + sigma_i sqrt(T) (C g)_i)`
/// driven by the standard normal vector `g`.
pub fn terminal_price(model: &ModelSpec, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != model.dim() {
        return Err(Error::invalid("gaussian vector length must equal d"));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("gaussian vector must be finite"));
    }
    let c = model.cholesky()?;
    let sqrt_t = model.maturity.sqrt();
    Ok((0..model.dim())
        .map(|i| {
            let z: f64 = (0..=i).map(|j| c[(i, j)] * g[j]).sum();
            let drift = (model.rate - 0.5 * model.vols[i] * model.vols[i]) * model.maturity;
            model.spots[i] * (drift + model.vols[i] * sqrt_t * z).exp()
        })
        .collect())
}

/// Payoff of `kind` at terminal prices `s`.
pub fn payoff(kind: PayoffKind, model: &ModelSpec, s: &[f64]) -> Result<f64> {
    if s.len() != model.dim() {
        return Err(Error::invalid("price vector length must equal d"));
    }
    match kind {
        PayoffKind::BasketCall => {
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            Ok((basket - model.strike).max(0.0))
        }
        PayoffKind::BasketPut => {
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            Ok((model.strike - basket).max(0.0))
        }
        PayoffKind::DigitalBasket => {
            let barriers = model.barriers.as_ref().ok_or(Error::MissingBarriers)?;
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            let inside = s.iter().zip(barriers).all(|(s, u)| s <= u);
            Ok(if inside {
                (basket - model.strike).max(0.0)
            } else {
                0.0
            })
        }
        PayoffKind::PutOnMin => {
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            Ok((model.strike - min).max(0.0))
        }
    }
}

/// The truncated-integral integrand `phi(x) p(x)` on `[-A, A]^d`: payoff of
/// the terminal prices driven by `x`, times the standard normal density.
pub struct Integrand {
    kind: PayoffKind,
    weights: Vec<f64>,
    strike: f64,
    barriers: Option<Vec<f64>>,
    /// Row-major lower-triangular Cholesky factor.
    chol: Vec<f64>,
    /// `s_i exp((r - sigma_i^2 / 2) T)` per asset.
    forward_factor: Vec<f64>,
    /// `sigma_i sqrt(T)` per asset.
    vol_sqrt_t: Vec<f64>,
    norm_const: f64,
    d: usize,
}

impl Integrand {
    pub fn new(model: &ModelSpec, kind: PayoffKind) -> Result<Self> {
        model.validate()?;
        if kind == PayoffKind::DigitalBasket && model.barriers.is_none() {
            return Err(Error::MissingBarriers);
        }
        let d = model.dim();
        let c = model.cholesky()?;
        let mut chol = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                chol[i * d + j] = c[(i, j)];
            }
        }
        let forward_factor = (0..d)
            .map(|i| {
                model.spots[i]
                    * ((model.rate - 0.5 * model.vols[i] * model.vols[i]) * model.maturity).exp()
            })
            .collect();
        let vol_sqrt_t = model
            .vols
            .iter()
            .map(|v| v * model.maturity.sqrt())
            .collect();
        Ok(Integrand {
            kind,
            weights: model.weights.clone(),
            strike: model.strike,
            barriers: model.barriers.clone(),
            chol,
            forward_factor,
            vol_sqrt_t,
            norm_const: (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0),
            d,
        })
    }

    /// `psi(S_T(x)) p(x)`.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        let d = self.d;
        let mut basket = 0.0;
        let mut min_price = f64::INFINITY;
        let mut inside = true;
        let mut norm_sq = 0.0;
        for &xk in x {
            norm_sq += xk * xk;
        }
        for i in 0..d {
            let z: f64 = self.chol[i * d..i * d + i + 1]
                .iter()
                .zip(x)
                .map(|(c, xj)| c * xj)
                .sum();
            let s = self.forward_factor[i] * (self.vol_sqrt_t[i] * z).exp();
            basket += self.weights[i] * s;
            if s < min_price {
                min_price = s;
            }
            if let Some(b) = &self.barriers {
                inside &= s <= b[i];
            }
        }
        let psi = match self.kind {
            PayoffKind::BasketCall => (basket - self.strike).max(0.0),
            PayoffKind::BasketPut => (self.strike - basket).max(0.0),
            PayoffKind::DigitalBasket => {
                if inside {
                    (basket - self.strike).max(0.0)
                } else {
                    0.0
                }
            }
            PayoffKind::PutOnMin => (self.strike - min_price).max(0.0),
        };
        psi * self.norm_const * (-0.5 * norm_sq).exp()
    }
}

/// A value with an uncertainty proxy and its evaluation cost. For adaptive
/// pricing the uncertainty is the total error indicator; for Monte Carlo
/// it is the 95% confidence half-width.
#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub uncertainty: f64,
    pub eval_count: u64,
}

/// Adaptive price together with the final mesh.
#[derive(Debug)]
pub struct PricedAdaptive {
    pub estimate: Estimate,
    pub adaptive: AdaptiveResult,
}

/// Discounted adaptive price of `payoff` under `model`, integrating the
/// truncated Gaussian integrand over `[-A, A]^d`.
pub fn price_adaptive(
    model: &ModelSpec,
    kind: PayoffKind,
    truncation: f64,
    config: &AdaptiveConfig,
) -> Result<PricedAdaptive> {
    if !truncation.is_finite() || truncation <= 0.0 {
        return Err(Error::invalid("truncation A must be positive"));
    }
    let integrand = Integrand::new(model, kind)?;
    let domain = Rect::centered_cube(model.dim(), truncation)?;
    let disc = model.discount();
    let result = adaptive::integrate_adaptive(&|x: &[f64]| integrand.value(x), &domain, config)?;
    Ok(PricedAdaptive {
        estimate: Estimate {
            value: disc * result.estimate,
            uncertainty: disc * result.total_indicator,
            eval_count: result.eval_count,
        },
        adaptive: result,
    })
}

/// Discounted replication statistics of GRS prices (mean, median and the
/// replication error criterion `Err = s_v`), seeds `seed .. seed + runs - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct PriceReplications {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub values: Vec<f64>,
    pub eval_count: u64,
}

pub fn price_replications(
    model: &ModelSpec,
    kind: PayoffKind,
    truncation: f64,
    config: &AdaptiveConfig,
    runs: usize,
) -> Result<PriceReplications> {
    if !truncation.is_finite() || truncation <= 0.0 {
        return Err(Error::invalid("truncation A must be positive"));
    }
    let integrand = Integrand::new(model, kind)?;
    let domain = Rect::centered_cube(model.dim(), truncation)?;
    let stats = adaptive::run_replications(&|x: &[f64]| integrand.value(x), &domain, config, runs)?;
    let disc = model.discount();
    Ok(PriceReplications {
        mean: disc * stats.mean,
        median: disc * stats.median,
        std_dev: disc * stats.std_dev,
        values: stats.values.iter().map(|v| disc * v).collect(),
        eval_count: stats.eval_count,
    })
}

/// Call-put parity residual `|V - U - sum(lambda_i s_i) + K exp(-rT)|`.
pub fn parity_residual(call: f64, put: f64, model: &ModelSpec) -> f64 {
    let weighted_spot: f64 = model
        .spots
        .iter()
        .zip(&model.weights)
        .map(|(s, w)| s * w)
        .sum();
    (call - put - weighted_spot + model.strike * model.discount()).abs()
}

/// Black-Scholes closed form for a single asset; `weights[0]` scales the
/// underlying so that the payoff is `(w s - K)_+` or `(K - w s)_+`.
pub fn bs_closed_form_1d(model: &ModelSpec, kind: PayoffKind) -> Result<f64> {
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension(format!(
            "closed form requires d = 1, got d = {}",
            model.dim()
        )));
    }
    if !matches!(kind, PayoffKind::BasketCall | PayoffKind::BasketPut) {
        return Err(Error::UnsupportedDimension(
            "closed form covers vanilla call and put only".into(),
        ));
    }
    model.validate()?;
    let s = model.weights[0] * model.spots[0];
    let k = model.strike;
    let sig = model.vols[0];
    let t = model.maturity;
    let r = model.rate;
    let sqrt_t = t.sqrt();
    let d1 = ((s / k).ln() + (r + 0.5 * sig * sig) * t) / (sig * sqrt_t);
    let d2 = d1 - sig * sqrt_t;
    let disc = (-r * t).exp();
    Ok(match kind {
        PayoffKind::BasketCall => s * normal_cdf(d1) - k * disc * normal_cdf(d2),
        PayoffKind::BasketPut => k * disc * normal_cdf(-d2) - s * normal_cdf(-d1),
        _ => unreachable!(),
    })
}

/// Closed-form delta of the 1-D call or put with respect to the spot.
pub fn bs_closed_form_delta_1d(model: &ModelSpec, kind: PayoffKind) -> Result<f64> {
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension(format!(
            "closed form requires d = 1, got d = {}",
            model.dim()
        )));
    }
    let w = model.weights[0];
    let s = w * model.spots[0];
    let k = model.strike;
    let sig = model.vols[0];
    let t = model.maturity;
    let d1 = ((s / k).ln() + (model.rate + 0.5 * sig * sig) * t) / (sig * t.sqrt());
    match kind {
        PayoffKind::BasketCall => Ok(w * normal_cdf(d1)),
        PayoffKind::BasketPut => Ok(w * (normal_cdf(d1) - 1.0)),
        _ => Err(Error::UnsupportedDimension(
            "closed-form delta covers vanilla call and put only".into(),
        )),
    }
}

/// Crude Monte Carlo price with a 95% confidence half-width, using the
/// counter-based Gaussian stream (reproducible and order-independent).
pub fn mc_price(model: &ModelSpec, kind: PayoffKind, n: u64, seed: u64) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::invalid("Monte Carlo needs n >= 2"));
    }
    model.validate()?;
    if kind == PayoffKind::DigitalBasket && model.barriers.is_none() {
        return Err(Error::MissingBarriers);
    }
    let d = model.dim();
    let c = model.cholesky()?;
    let mut chol = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            chol[i * d + j] = c[(i, j)];
        }
    }
    let stream = GaussianStream::new(seed);
    let disc = model.discount();
    let spec = model.clone();

    let chunk = 65_536u64;
    let n_chunks = n.div_ceil(chunk);
    let partial: Vec<crate::stats::MeanVar> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n);
            let mut g = vec![0.0; d];
            let mut s = vec![0.0; d];
            let mut cursor = stream.sampler_at(lo * d as u64);
            let mut acc = crate::stats::MeanVar::default();
            for _ in lo..hi {
                cursor.fill_normal(&mut g);
                terminal_into(&spec, &chol, &g, &mut s);
                acc.push(disc * payoff_value(kind, &spec, &s));
            }
            acc
        })
        .collect();
    let acc = partial
        .into_iter()
        .fold(crate::stats::MeanVar::default(), |a, b| a.merge(b));
    Ok(Estimate {
        value: acc.mean(),
        uncertainty: acc.ci_half_width(),
        eval_count: n,
    })
}

pub(crate) fn terminal_into(model: &ModelSpec, chol: &[f64], g: &[f64], out: &mut [f64]) {
    let d = model.dim();
    let sqrt_t = model.maturity.sqrt();
    for i in 0..d {
        let mut z = 0.0;
        for j in 0..=i {
            z += chol[i * d + j] * g[j];
        }
        let drift = (model.rate - 0.5 * model.vols[i] * model.vols[i]) * model.maturity;
        out[i] = model.spots[i] * (drift + model.vols[i] * sqrt_t * z).exp();
    }
}

pub(crate) fn payoff_value(kind: PayoffKind, model: &ModelSpec, s: &[f64]) -> f64 {
    match kind {
        PayoffKind::BasketCall => {
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            (basket - model.strike).max(0.0)
        }
        PayoffKind::BasketPut => {
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            (model.strike - basket).max(0.0)
        }
        PayoffKind::DigitalBasket => {
            let barriers = model.barriers.as_ref().expect("validated earlier");
            let basket: f64 = s.iter().zip(&model.weights).map(|(s, w)| s * w).sum();
            if s.iter().zip(barriers).all(|(s, u)| s <= u) {
                (basket - model.strike).max(0.0)
            } else {
                0.0
            }
        }
        PayoffKind::PutOnMin => {
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            (model.strike - min).max(0.0)
        }
    }
}

/// JSON model/payoff configuration mirroring [`ModelSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub spots: Vec<f64>,
    pub vols: Vec<f64>,
    pub rate: f64,
    pub maturity: f64,
    pub correlation: CorrelationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub strike: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barriers: Option<Vec<f64>>,
    pub payoff: PayoffKind,
}

/// Correlation given either as an equicorrelation coefficient or a full
/// matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrelationConfig {
    Rho { rho: f64 },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl ModelConfig {
    /// Validate and convert into a runtime model and payoff kind.
    /// Weights default to the homogeneous basket `1/d`.
    pub fn build(&self) -> Result<(ModelSpec, PayoffKind)> {
        let d = self.spots.len();
        if let Some(cfg_d) = self.d {
            if cfg_d != d {
                return Err(Error::invalid(format!(
                    "config d = {cfg_d} does not match {d} spots"
                )));
            }
        }
        let correlation = match &self.correlation {
            CorrelationConfig::Rho { rho } => equicorrelation(d, *rho)?,
            CorrelationConfig::Matrix { matrix } => {
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                    return Err(Error::invalid("correlation matrix must be d x d"));
                }
                DMatrix::from_fn(d, d, |i, j| matrix[i][j])
            }
        };
        let spec = ModelSpec {
            spots: self.spots.clone(),
            vols: self.vols.clone(),
            rate: self.rate,
            maturity: self.maturity,
            correlation,
            weights: self
                .weights
                .clone()
                .unwrap_or_else(|| vec![1.0 / d as f64; d]),
            strike: self.strike,
            barriers: self.barriers.clone(),
        };
        spec.validate()?;
        if self.payoff == PayoffKind::DigitalBasket && spec.barriers.is_none() {
            return Err(Error::MissingBarriers);
        }
        Ok((spec, self.payoff))
    }
}
