//! Built-in configurations for the published benchmark examples (ex1-ex20)
//! and the benchmark tables (t1-t13), so runs never depend on hand-typed
//! parameters.

use cubature::model::{CorrelationConfig, ModelConfig};
use cubature::PayoffKind;

/// Defaults attached to a named preset; command-line flags override them.
#[derive(Debug, Clone)]
pub struct PresetDefaults {
    pub iterations: usize,
    pub q1: u32,
    pub q2: u32,
    pub alpha: u32,
    pub truncation: f64,
    pub samples: u64,
    pub components: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    pub model: ModelConfig,
    pub defaults: PresetDefaults,
}

fn defaults(d: usize, alpha: u32, truncation: f64) -> PresetDefaults {
    PresetDefaults {
        iterations: 2000 * d,
        q1: 18,
        q2: 24,
        alpha,
        truncation,
        samples: 1_000_000,
        components: vec![0, 1, 2, 3],
    }
}

#[allow(clippy::too_many_arguments)]
fn equicorr_model(
    d: usize,
    spot: f64,
    vol: f64,
    rho: f64,
    rate: f64,
    maturity: f64,
    strike: f64,
    weights: Option<Vec<f64>>,
    barrier: Option<f64>,
    payoff: PayoffKind,
) -> ModelConfig {
    ModelConfig {
        d: Some(d),
        spots: vec![spot; d],
        vols: vec![vol; d],
        rate,
        maturity,
        correlation: CorrelationConfig::Rho { rho },
        weights,
        strike,
        barriers: barrier.map(|u| vec![u; d]),
        payoff,
    }
}

/// The ten-asset block correlation of example 20: two internally
/// correlated groups, negatively correlated with each other.
pub fn block_matrix_ex20() -> Vec<Vec<f64>> {
    (0..10)
        .map(|i| {
            (0..10)
                .map(|j| {
                    if i == j {
                        1.0
                    } else if i < 5 && j < 5 {
                        0.8
                    } else if i >= 5 && j >= 5 {
                        0.4
                    } else {
                        -0.5
                    }
                })
                .collect()
        })
        .collect()
}

fn ex20_model() -> ModelConfig {
    ModelConfig {
        d: Some(10),
        spots: vec![100.0; 10],
        vols: vec![0.2; 10],
        rate: 0.02,
        maturity: 2.0,
        correlation: CorrelationConfig::Matrix {
            matrix: block_matrix_ex20(),
        },
        weights: None,
        strike: 105.0,
        barriers: None,
        payoff: PayoffKind::BasketCall,
    }
}

/// Volatility vector of the five-asset control-variate examples.
pub const VOLS_5D: [f64; 5] = [0.156, 0.442, 0.325, 0.134, 0.114];

fn ex17_family(rho: f64) -> ModelConfig {
    ModelConfig {
        d: Some(5),
        spots: vec![50.0; 5],
        vols: VOLS_5D.to_vec(),
        rate: 0.05,
        maturity: 1.0,
        correlation: CorrelationConfig::Rho { rho },
        weights: None,
        strike: 45.0,
        barriers: None,
        payoff: PayoffKind::BasketCall,
    }
}

/// Basket-parity table models carry unit weights: the published values
/// satisfy V - U = sum(s_i) - K exp(-rT), i.e. every asset enters with
/// weight one.
fn parity_model(
    d: usize,
    spot: f64,
    vol: f64,
    rho: f64,
    maturity: f64,
    strike: f64,
) -> ModelConfig {
    equicorr_model(
        d,
        spot,
        vol,
        rho,
        0.05,
        maturity,
        strike,
        Some(vec![1.0; d]),
        None,
        PayoffKind::BasketCall,
    )
}

pub fn preset(name: &str) -> Option<Preset> {
    let p = |name, about, model, defaults| {
        Some(Preset {
            name,
            about,
            model,
            defaults,
        })
    };
    match name {
        // Put-on-minimum examples.
        "ex1" => p(
            "ex1",
            "put on minimum, d=2, rho=0.1, K=45",
            equicorr_model(
                2,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(2, 3, 12.0),
        ),
        "ex2" => p(
            "ex2",
            "put on minimum, d=2, rho=0.9, K=55",
            equicorr_model(
                2,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(2, 3, 12.0),
        ),
        "ex3" => p(
            "ex3",
            "put on minimum, d=3, rho=0.1, K=45",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(3, 3, 12.0),
        ),
        "ex4" => p(
            "ex4",
            "put on minimum, d=3, rho=0.9, K=55",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(3, 3, 12.0),
        ),
        "ex5" => p(
            "ex5",
            "put on minimum, d=4, rho=0.1, K=45",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(4, 3, 12.0),
        ),
        "ex6" => p(
            "ex6",
            "put on minimum, d=4, rho=0.9, K=55",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(4, 3, 12.0),
        ),
        // Digital basket examples.
        "ex7" => p(
            "ex7",
            "digital basket, d=2, rho=0.1, K=45, U=60",
            equicorr_model(
                2,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(2, 3, 12.0),
        ),
        "ex8" => p(
            "ex8",
            "digital basket, d=2, rho=0.9, K=55, U=60",
            equicorr_model(
                2,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(2, 3, 12.0),
        ),
        "ex9" => p(
            "ex9",
            "digital basket, d=3, rho=0.1, K=45, U=60",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(3, 20, 12.0),
        ),
        "ex10" => p(
            "ex10",
            "digital basket, d=3, rho=0.9, K=55, U=60",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(3, 40, 12.0),
        ),
        "ex11" => p(
            "ex11",
            "digital basket, d=4, rho=0.1, K=45, U=60",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(4, 30, 12.0),
        ),
        "ex12" => p(
            "ex12",
            "digital basket, d=4, rho=0.9, K=55, U=60",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.9,
                0.05,
                1.0,
                55.0,
                None,
                Some(60.0),
                PayoffKind::DigitalBasket,
            ),
            defaults(4, 40, 5.0),
        ),
        // Delta examples.
        "ex13" => p(
            "ex13",
            "basket call delta, d=3, rho=0.1, K=45",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                None,
                PayoffKind::BasketCall,
            ),
            defaults(3, 3, 12.0),
        ),
        "ex14" => p(
            "ex14",
            "put-on-minimum delta, d=3, rho=0.5, K=55",
            equicorr_model(
                3,
                50.0,
                0.2,
                0.5,
                0.05,
                1.0,
                55.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(3, 3, 12.0),
        ),
        "ex15" => p(
            "ex15",
            "basket call delta, d=4, rho=0.1, K=45",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.1,
                0.05,
                1.0,
                45.0,
                None,
                None,
                PayoffKind::BasketCall,
            ),
            defaults(4, 3, 12.0),
        ),
        "ex16" => p(
            "ex16",
            "put-on-minimum delta, d=4, rho=0.5, K=55",
            equicorr_model(
                4,
                50.0,
                0.2,
                0.5,
                0.05,
                1.0,
                55.0,
                None,
                None,
                PayoffKind::PutOnMin,
            ),
            defaults(4, 3, 12.0),
        ),
        // Control-variate examples.
        "ex17" => p(
            "ex17",
            "basket call, d=5, rho=0.9",
            ex17_family(0.9),
            defaults(3, 3, 12.0),
        ),
        "ex18" => p(
            "ex18",
            "basket call, d=5, rho=0.1",
            ex17_family(0.1),
            defaults(3, 3, 12.0),
        ),
        "ex19" => p(
            "ex19",
            "basket call, d=5, rho=-0.1",
            ex17_family(-0.1),
            defaults(3, 3, 12.0),
        ),
        "ex20" => p(
            "ex20",
            "basket call, d=10, block correlation",
            ex20_model(),
            defaults(3, 3, 12.0),
        ),
        // Parity-table configurations (strike variants; basket call).
        "t1k1" => p(
            "t1k1",
            "2-asset basket, sigma=0.4, rho=0.3, K=100",
            parity_model(2, 50.0, 0.4, 0.3, 3.0, 100.0),
            defaults(2, 3, 12.0),
        ),
        "t1k2" => p(
            "t1k2",
            "2-asset basket, sigma=0.4, rho=0.3, K=127.80",
            parity_model(2, 50.0, 0.4, 0.3, 3.0, 127.80),
            defaults(2, 3, 12.0),
        ),
        "t1k3" => p(
            "t1k3",
            "2-asset basket, sigma=0.4, rho=0.3, K=300",
            parity_model(2, 50.0, 0.4, 0.3, 3.0, 300.0),
            defaults(2, 3, 12.0),
        ),
        "t2k1" => p(
            "t2k1",
            "2-asset basket, sigma=0.2, rho=0.7, K=100",
            parity_model(2, 50.0, 0.2, 0.7, 3.0, 100.0),
            defaults(2, 3, 12.0),
        ),
        "t2k2" => p(
            "t2k2",
            "2-asset basket, sigma=0.2, rho=0.7, K=127.80",
            parity_model(2, 50.0, 0.2, 0.7, 3.0, 127.80),
            defaults(2, 3, 12.0),
        ),
        "t2k3" => p(
            "t2k3",
            "2-asset basket, sigma=0.2, rho=0.7, K=300",
            parity_model(2, 50.0, 0.2, 0.7, 3.0, 300.0),
            defaults(2, 3, 12.0),
        ),
        "t3k1" => p(
            "t3k1",
            "3-asset basket, independent assets, K=90",
            parity_model(3, 30.0, 0.2, 0.0, 3.0, 90.0),
            defaults(3, 3, 12.0),
        ),
        "t3k2" => p(
            "t3k2",
            "3-asset basket, independent assets, K=120",
            parity_model(3, 30.0, 0.2, 0.0, 3.0, 120.0),
            defaults(3, 3, 12.0),
        ),
        "t4k1" => p(
            "t4k1",
            "4-asset basket, independent assets, K=80",
            parity_model(4, 20.0, 0.1, 0.0, 1.0, 80.0),
            defaults(4, 3, 5.0),
        ),
        "t4k2" => p(
            "t4k2",
            "4-asset basket, independent assets, K=90",
            parity_model(4, 20.0, 0.1, 0.0, 1.0, 90.0),
            defaults(4, 3, 5.0),
        ),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 30] = [
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "ex9", "ex10", "ex11", "ex12", "ex13",
    "ex14", "ex15", "ex16", "ex17", "ex18", "ex19", "ex20", "t1k1", "t1k2", "t1k3", "t2k1", "t2k2",
    "t2k3", "t3k1", "t3k2", "t4k1", "t4k2",
];
