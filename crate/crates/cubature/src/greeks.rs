//! Delta via Chebyshev interpolation of the price in one spot coordinate,
//! plus a finite-difference Monte Carlo benchmark with common random
//! numbers.

use rayon::prelude::*;

use crate::adaptive::AdaptiveConfig;
use crate::model::{self, ModelSpec, PayoffKind};
use crate::rng::GaussianStream;
use crate::{Error, Result};

/// Configuration of the interpolation delta.
#[derive(Debug, Clone)]
pub struct DeltaConfig {
    /// Spot coordinate being differentiated.
    pub asset_index: usize,
    /// Interpolation node count `m >= 2`.
    pub nodes: usize,
    /// Absolute half-width of the window `]x0 - h, x0 + h[`.
    pub half_width: f64,
    /// Domain truncation for the node pricings.
    pub truncation: f64,
    /// Adaptive pricing configuration, used with the same seed at every
    /// node so pricing noise cancels in the differences.
    pub pricing: AdaptiveConfig,
}

/// Chebyshev-Gauss nodes of `[center - h, center + h]`.
fn cheb_nodes(center: f64, half_width: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            center
                + half_width
                    * ((2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * m as f64)).cos()
        })
        .collect()
}

/// Derivative at the window center of the degree `m - 1` Chebyshev
/// interpolant through values at the Chebyshev-Gauss nodes. Pure in the
/// node values; `values[j]` belongs to node `j` of [`cheb_nodes`].
pub fn cheb_derivative_at_center(values: &[f64], half_width: f64) -> Result<f64> {
    let m = values.len();
    if m < 2 {
        return Err(Error::invalid("interpolation needs at least two nodes"));
    }
    if !half_width.is_finite() || half_width <= 0.0 {
        return Err(Error::invalid("interpolation half-width must be positive"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "interpolation nodes carry non-finite values",
        ));
    }
    // Coefficients by discrete Chebyshev orthogonality, then
    // T_k'(0) = k U_{k-1}(0) which vanishes for even k and alternates for
    // odd k.
    let mut derivative = 0.0;
    for k in (1..m).step_by(2) {
        let mut ck = 0.0;
        for (j, &y) in values.iter().enumerate() {
            ck += y
                * ((k as f64) * (2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * m as f64))
                    .cos();
        }
        ck *= 2.0 / m as f64;
        let sign = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        derivative += ck * k as f64 * sign;
    }
    Ok(derivative / half_width)
}

/// Delta by differentiating the Chebyshev interpolant of the price as a
/// function of one spot: price the option at `m` nodes of the window
/// around the current spot (GRS with a fixed seed per node) and return the
/// interpolant's derivative at the spot.
pub fn delta_tcheb(model: &ModelSpec, kind: PayoffKind, cfg: &DeltaConfig) -> Result<f64> {
    if cfg.asset_index >= model.dim() {
        return Err(Error::invalid(format!(
            "asset index {} out of range for d = {}",
            cfg.asset_index,
            model.dim()
        )));
    }
    if cfg.nodes < 2 {
        return Err(Error::invalid("delta interpolation needs m >= 2 nodes"));
    }
    let x0 = model.spots[cfg.asset_index];
    if !(cfg.half_width > 0.0 && cfg.half_width < x0) {
        return Err(Error::invalid(
            "window half-width must lie in (0, spot) so node spots stay positive",
        ));
    }
    let nodes = cheb_nodes(x0, cfg.half_width, cfg.nodes);
    let prices: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&x| {
            let bumped = model.with_spot(cfg.asset_index, x);
            Ok(
                model::price_adaptive(&bumped, kind, cfg.truncation, &cfg.pricing)?
                    .estimate
                    .value,
            )
        })
        .collect();
    let prices = prices.into_iter().collect::<Result<Vec<f64>>>()?;
    cheb_derivative_at_center(&prices, cfg.half_width)
}

/// Central finite-difference Monte Carlo delta with common random numbers
/// and the step `h_n = n^{-1/6}`.
pub fn delta_mc_fd(
    model: &ModelSpec,
    kind: PayoffKind,
    asset_index: usize,
    n: u64,
    seed: u64,
) -> Result<f64> {
    if asset_index >= model.dim() {
        return Err(Error::invalid(format!(
            "asset index {asset_index} out of range for d = {}",
            model.dim()
        )));
    }
    if n < 2 {
        return Err(Error::invalid("Monte Carlo needs n >= 2"));
    }
    model.validate()?;
    let h = (n as f64).powf(-1.0 / 6.0);
    let up = model.with_spot(asset_index, model.spots[asset_index] + 0.5 * h);
    let down = model.with_spot(asset_index, model.spots[asset_index] - 0.5 * h);
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

    let chunk = 65_536u64;
    let n_chunks = n.div_ceil(chunk);
    let sums: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(n);
            let mut g = vec![0.0; d];
            let mut s = vec![0.0; d];
            let mut cursor = stream.sampler_at(lo * d as u64);
            let mut acc = 0.0;
            for _ in lo..hi {
                cursor.fill_normal(&mut g);
                model::terminal_into(&up, &chol, &g, &mut s);
                let plus = model::payoff_value(kind, &up, &s);
                model::terminal_into(&down, &chol, &g, &mut s);
                let minus = model::payoff_value(kind, &down, &s);
                acc += plus - minus;
            }
            acc
        })
        .collect();
    let total: f64 = sums.iter().sum();
    Ok(disc * total / (n as f64 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::Strategy;
    use crate::model::{bs_closed_form_delta_1d, ModelSpec};
    use approx::assert_abs_diff_eq;

    fn call_model_1d() -> ModelSpec {
        ModelSpec {
            spots: vec![50.0],
            vols: vec![0.2],
            rate: 0.05,
            maturity: 1.0,
            correlation: nalgebra::DMatrix::identity(1, 1),
            weights: vec![1.0],
            strike: 45.0,
            barriers: None,
        }
    }

    #[test]
    fn interpolant_reproduces_linear_functions_exactly() {
        for m in 2..=7 {
            let h = 0.35;
            let nodes = cheb_nodes(10.0, h, m);
            let values: Vec<f64> = nodes.iter().map(|x| 3.25 * x - 1.0).collect();
            let d = cheb_derivative_at_center(&values, h).unwrap();
            assert_abs_diff_eq!(d, 3.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolant_derivative_is_a_pure_function_of_node_values() {
        let values = [1.0, 2.0, 0.5, 0.25, 4.0];
        let a = cheb_derivative_at_center(&values, 0.1).unwrap();
        let b = cheb_derivative_at_center(&values, 0.1).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(cheb_derivative_at_center(&[1.0], 0.1).is_err());
        assert!(cheb_derivative_at_center(&[1.0, f64::NAN], 0.1).is_err());
    }

    #[test]
    fn interpolation_delta_matches_closed_form_in_1d() {
        let m = call_model_1d();
        let cfg = DeltaConfig {
            asset_index: 0,
            nodes: 5,
            half_width: 0.1,
            truncation: 12.0,
            pricing: AdaptiveConfig::new(Strategy::Grs, 200, 8, 12, 3, 11),
        };
        let delta = delta_tcheb(&m, PayoffKind::BasketCall, &cfg).unwrap();
        let exact = bs_closed_form_delta_1d(&m, PayoffKind::BasketCall).unwrap();
        assert_abs_diff_eq!(delta, exact, epsilon = 1e-5);
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        let m = call_model_1d();
        let mut cfg = DeltaConfig {
            asset_index: 1,
            nodes: 5,
            half_width: 0.1,
            truncation: 12.0,
            pricing: AdaptiveConfig::new(Strategy::Grs, 50, 8, 12, 3, 11),
        };
        assert!(delta_tcheb(&m, PayoffKind::BasketCall, &cfg).is_err());
        cfg.asset_index = 0;
        cfg.nodes = 1;
        assert!(delta_tcheb(&m, PayoffKind::BasketCall, &cfg).is_err());
        cfg.nodes = 3;
        cfg.half_width = 60.0;
        assert!(delta_tcheb(&m, PayoffKind::BasketCall, &cfg).is_err());
        assert!(delta_mc_fd(&m, PayoffKind::BasketCall, 3, 100, 0).is_err());
    }

    #[test]
    fn fd_delta_of_deterministic_basket_equals_the_weight() {
        // sigma -> 0 and in the money: the discounted payoff is linear in
        // the spot with slope lambda_i.
        let mut m = ModelSpec::equicorrelated(3, 50.0, 0.2, 0.05, 1.0, 0.0, 45.0).unwrap();
        m.vols = vec![1e-13; 3];
        let delta = delta_mc_fd(&m, PayoffKind::BasketCall, 0, 1000, 5).unwrap();
        assert_abs_diff_eq!(delta, 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn fd_delta_approaches_closed_form_at_desk_scale() {
        let m = call_model_1d();
        let delta = delta_mc_fd(&m, PayoffKind::BasketCall, 0, 1_000_000, 42).unwrap();
        let exact = bs_closed_form_delta_1d(&m, PayoffKind::BasketCall).unwrap();
        assert!((delta - exact).abs() < 3e-3, "{delta} vs {exact}");
    }

    #[test]
    fn common_random_numbers_beat_independent_draws() {
        // Independent-draws control: same estimator but the two legs read
        // disjoint counter ranges.
        let m = call_model_1d();
        let n = 10_000u64;
        let h = (n as f64).powf(-1.0 / 6.0);
        let up = m.with_spot(0, m.spots[0] + 0.5 * h);
        let down = m.with_spot(0, m.spots[0] - 0.5 * h);
        let disc = m.discount();

        let mut crn = Vec::new();
        let mut indep = Vec::new();
        for seed in 0..50u64 {
            crn.push(delta_mc_fd(&m, PayoffKind::BasketCall, 0, n, seed).unwrap());
            let stream = GaussianStream::new(seed);
            let mut acc = 0.0;
            let mut g = [0.0];
            let mut s = [0.0];
            let chol = [1.0];
            for j in 0..n {
                stream.fill_normal(j, &mut g);
                model::terminal_into(&up, &chol, &g, &mut s);
                let plus = model::payoff_value(PayoffKind::BasketCall, &up, &s);
                stream.fill_normal(j + n, &mut g);
                model::terminal_into(&down, &chol, &g, &mut s);
                let minus = model::payoff_value(PayoffKind::BasketCall, &down, &s);
                acc += plus - minus;
            }
            indep.push(disc * acc / (n as f64 * h));
        }
        let var = |xs: &[f64]| {
            let mu = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
        };
        assert!(
            var(&crn) < var(&indep),
            "CRN variance {} !< independent variance {}",
            var(&crn),
            var(&indep)
        );
    }
}
