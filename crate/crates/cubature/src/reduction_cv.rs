//! PCA-based dimension reduction of the volatility covariance and the
//! control-variate Monte Carlo estimator whose control expectation is
//! computed by the GRS integrator in the reduced dimension.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::adaptive::{self, AdaptiveConfig};
use crate::model::{self, ModelSpec, PayoffKind};
use crate::quadrature::Rect;
use crate::rng::GaussianStream;
use crate::{Error, Result};

/// Eigen-analysis of the volatility covariance `Sigma = diag(sigma) Gamma
/// diag(sigma)`, with the symmetric square root and the component loading
/// map used by the reduced model.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// The covariance being decomposed.
    pub sigma: DMatrix<f64>,
    /// Eigenvalues sorted decreasing.
    pub eigenvalues: DVector<f64>,
    /// Eigenvector matrix with rows as eigenvectors, so `Sigma = P^T D P`.
    pub p: DMatrix<f64>,
    /// Symmetric square root `H = P^T D^{1/2} P`, `H H = Sigma`.
    pub h: DMatrix<f64>,
    /// `P^T D^{1/2}`: column `k` is the k-th principal direction scaled by
    /// the square-rooted eigenvalue. Zeroing trailing columns removes the
    /// lowest-variance components of the driving noise.
    pub loadings: DMatrix<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Fraction of total variance carried by the first `l` components.
    pub fn variance_share(&self, l: usize) -> f64 {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalues.iter().take(l).sum::<f64>() / total
    }
}

/// Eigendecompose the volatility covariance of `model`.
pub fn build_pca(model: &ModelSpec) -> Result<PcaModel> {
    model.validate()?;
    let d = model.dim();
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, model.vols.iter().copied()));
    let sigma = &diag * &model.correlation * &diag;
    let eig = nalgebra::SymmetricEigen::new(sigma.clone());

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    if let Some(&bad) = eigenvalues.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NonPositiveEigenvalue { value: bad });
    }
    // Columns of q are the eigenvectors in decreasing-eigenvalue order.
    let q = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    let sqrt_d = DMatrix::from_diagonal(&eigenvalues.map(f64::sqrt));
    let h = &q * &sqrt_d * q.transpose();
    let loadings = &q * &sqrt_d;
    Ok(PcaModel {
        sigma,
        eigenvalues,
        p: q.transpose(),
        h,
        loadings,
    })
}

/// Terminal prices of the reduced model: the first `l` principal
/// components of the driving noise are kept, the rest set to zero.
/// With `l = d` this is the full model in its PCA parameterization.
pub fn reduced_terminal(
    pca: &PcaModel,
    model: &ModelSpec,
    g: &[f64],
    l: usize,
) -> Result<Vec<f64>> {
    let d = model.dim();
    if pca.dim() != d {
        return Err(Error::invalid("PCA model dimension mismatch"));
    }
    if g.len() != d {
        return Err(Error::invalid("gaussian vector length must equal d"));
    }
    if l > d {
        return Err(Error::invalid("component count l must satisfy 0 <= l <= d"));
    }
    let sqrt_t = model.maturity.sqrt();
    Ok((0..d)
        .map(|i| {
            let z: f64 = g[..l]
                .iter()
                .enumerate()
                .map(|(k, gk)| pca.loadings[(i, k)] * gk)
                .sum();
            let drift = (model.rate - 0.5 * model.vols[i] * model.vols[i]) * model.maturity;
            model.spots[i] * (drift + sqrt_t * z).exp()
        })
        .collect())
}

/// Discounted control expectation and its integration cost.
#[derive(Debug, Clone, Serialize)]
pub struct ControlEstimate {
    pub value: f64,
    pub eval_count: u64,
    pub total_indicator: f64,
}

/// Discounted expectation of the reduced-model payoff, computed by GRS
/// adaptive integration over `[-A, A]^l`. With `l = 0` the reduced model
/// is deterministic and no integration happens.
pub fn control_expectation(
    pca: &PcaModel,
    model: &ModelSpec,
    kind: PayoffKind,
    l: usize,
    truncation: f64,
    config: &AdaptiveConfig,
) -> Result<ControlEstimate> {
    model.validate()?;
    if l > model.dim() {
        return Err(Error::invalid("component count l must satisfy 0 <= l <= d"));
    }
    if kind == PayoffKind::DigitalBasket && model.barriers.is_none() {
        return Err(Error::MissingBarriers);
    }
    let disc = model.discount();
    if l == 0 {
        let s = reduced_terminal(pca, model, &vec![0.0; model.dim()], 0)?;
        let value = disc * model::payoff(kind, model, &s)?;
        return Ok(ControlEstimate {
            value,
            eval_count: 1,
            total_indicator: 0.0,
        });
    }
    let d = model.dim();
    let norm_const = (2.0 * std::f64::consts::PI).powf(-(l as f64) / 2.0);
    let spec = model.clone();
    let pca = pca.clone();
    let integrand = move |x: &[f64]| {
        let mut g = vec![0.0; d];
        g[..l].copy_from_slice(x);
        let mut norm_sq = 0.0;
        for &v in x {
            norm_sq += v * v;
        }
        let s = reduced_terminal(&pca, &spec, &g, l).expect("dimensions fixed");
        model::payoff_value(kind, &spec, &s) * norm_const * (-0.5 * norm_sq).exp()
    };
    let domain = Rect::centered_cube(l, truncation)?;
    let result = adaptive::integrate_adaptive(&integrand, &domain, config)?;
    Ok(ControlEstimate {
        value: disc * result.estimate,
        eval_count: result.eval_count,
        total_indicator: disc * result.total_indicator,
    })
}

/// Control-variate Monte Carlo estimate.
#[derive(Debug, Clone, Serialize)]
pub struct CvEstimate {
    /// Discounted price estimate `mean(psi(S) - psi(S_hat)) + I_hat`.
    pub value: f64,
    /// 95% confidence half-width of the difference term.
    pub ci_half_width: f64,
    /// The GRS-computed control expectation `I_hat`.
    pub control_value: f64,
    /// Monte Carlo samples.
    pub n: u64,
    /// Retained principal components.
    pub components: usize,
    /// Paired variance ratio crude / CV on the same draws; `None` when the
    /// CV variance is exactly zero (`l = d`).
    pub variance_ratio: Option<f64>,
    /// 95% confidence half-width of crude Monte Carlo on the same draws.
    pub crude_ci_half_width: f64,
    /// Crude Monte Carlo estimate on the same draws.
    pub crude_value: f64,
    /// Payoff evaluations spent in the sampling loop (two per draw).
    pub mc_eval_count: u64,
    /// Integrand evaluations spent computing the control expectation.
    pub control_eval_count: u64,
}

/// The control-variate estimator: paired draws through the PCA
/// parameterization, the reduced path sharing the same Gaussians.
#[allow(clippy::too_many_arguments)]
pub fn cv_estimator(
    pca: &PcaModel,
    model: &ModelSpec,
    kind: PayoffKind,
    l: usize,
    n: u64,
    seed: u64,
    truncation: f64,
    config: &AdaptiveConfig,
) -> Result<CvEstimate> {
    if n < 2 {
        return Err(Error::invalid("Monte Carlo needs n >= 2"));
    }
    if l > model.dim() {
        return Err(Error::invalid("component count l must satisfy 0 <= l <= d"));
    }
    if kind == PayoffKind::DigitalBasket && model.barriers.is_none() {
        return Err(Error::MissingBarriers);
    }
    let control = control_expectation(pca, model, kind, l, truncation, config)?;

    let d = model.dim();
    let stream = GaussianStream::new(seed);
    let disc = model.discount();
    let spec = model.clone();
    let pca_ref = pca;

    let chunk = 16_384u64;
    let n_chunks = n.div_ceil(chunk);
    let partial: Vec<(crate::stats::MeanVar, crate::stats::MeanVar)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n);
            let mut g = vec![0.0; d];
            let mut cursor = stream.sampler_at(lo * d as u64);
            let mut diff_acc = crate::stats::MeanVar::default();
            let mut crude_acc = crate::stats::MeanVar::default();
            for _ in lo..hi {
                cursor.fill_normal(&mut g);
                let full = reduced_terminal(pca_ref, &spec, &g, d).expect("dims fixed");
                let reduced = reduced_terminal(pca_ref, &spec, &g, l).expect("dims fixed");
                let crude = disc * model::payoff_value(kind, &spec, &full);
                let diff = crude - disc * model::payoff_value(kind, &spec, &reduced);
                diff_acc.push(diff);
                crude_acc.push(crude);
            }
            (diff_acc, crude_acc)
        })
        .collect();
    let (diff_acc, crude_acc) = partial.into_iter().fold(
        (
            crate::stats::MeanVar::default(),
            crate::stats::MeanVar::default(),
        ),
        |(a, b), (x, y)| (a.merge(x), b.merge(y)),
    );
    let var_diff = diff_acc.variance();

    Ok(CvEstimate {
        value: diff_acc.mean() + control.value,
        ci_half_width: diff_acc.ci_half_width(),
        control_value: control.value,
        n,
        components: l,
        variance_ratio: if var_diff > 0.0 {
            Some(crude_acc.variance() / var_diff)
        } else {
            None
        },
        crude_ci_half_width: crude_acc.ci_half_width(),
        crude_value: crude_acc.mean(),
        mc_eval_count: 2 * n,
        control_eval_count: control.eval_count,
    })
}
