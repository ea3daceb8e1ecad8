//! Full-protocol checks against published benchmark values for the
//! two-asset basket family, plus the crude Monte Carlo cross-check.

use cubature::adaptive::{AdaptiveConfig, Strategy};
use cubature::model::{mc_price, parity_residual, price_adaptive, ModelSpec, PayoffKind};

fn grs(iterations: usize, seed: u64) -> AdaptiveConfig {
    AdaptiveConfig::new(Strategy::Grs, iterations, 18, 24, 3, seed)
}

fn basket2(vol: f64, rho: f64, strike: f64) -> ModelSpec {
    let mut m = ModelSpec::equicorrelated(2, 50.0, vol, 0.05, 3.0, rho, strike).unwrap();
    m.weights = vec![1.0, 1.0];
    m
}

#[test]
fn two_asset_basket_at_full_protocol() {
    // sigma = 0.4, rho = 0.3, K = 100; published to ten digits.
    let model = basket2(0.4, 0.3, 100.0);
    let cfg = grs(4000, 0);

    let v13 = price_adaptive(&model, PayoffKind::BasketCall, 13.0, &cfg).unwrap();
    let u13 = price_adaptive(&model, PayoffKind::BasketPut, 13.0, &cfg).unwrap();
    assert!(
        (v13.estimate.value - 28.49407708).abs() <= 5e-7,
        "V = {}",
        v13.estimate.value
    );
    assert!(
        (u13.estimate.value - 14.564874726).abs() <= 5e-7,
        "U = {}",
        u13.estimate.value
    );
    assert!(parity_residual(v13.estimate.value, u13.estimate.value, &model) <= 1e-6);

    // Truncation stability: widening the box moves the price by less than
    // the published accuracy scale, and the narrower box reproduces its
    // own published value.
    let v12 = price_adaptive(&model, PayoffKind::BasketCall, 12.0, &cfg).unwrap();
    assert!(
        (v12.estimate.value - 28.49407706).abs() <= 1e-7,
        "V(A=12) = {}",
        v12.estimate.value
    );
    assert!(
        (v13.estimate.value - v12.estimate.value).abs() <= 1e-6,
        "truncation shift {}",
        (v13.estimate.value - v12.estimate.value).abs()
    );
}

#[test]
fn deep_out_of_the_money_tail() {
    // sigma = 0.2, rho = 0.7, K = 300: a 2-cent price resolved to ~8 digits.
    let model = basket2(0.2, 0.7, 300.0);
    let cfg = grs(4000, 0);
    let v = price_adaptive(&model, PayoffKind::BasketCall, 13.0, &cfg).unwrap();
    assert!(
        (v.estimate.value - 0.021755880).abs() <= 1e-6,
        "V = {}",
        v.estimate.value
    );
}

#[test]
fn crude_monte_carlo_matches_published_three_digits() {
    let model = ModelSpec::equicorrelated(2, 50.0, 0.2, 0.05, 1.0, 0.1, 45.0).unwrap();
    let est = mc_price(&model, PayoffKind::PutOnMin, 4_000_000, 11).unwrap();
    assert!(
        (est.value - 2.104291).abs() <= 2.5e-3,
        "MC = {} +- {}",
        est.value,
        est.uncertainty
    );
}
