//! Adaptive integration driver: a priority list of hyperrectangles ordered
//! by the hierarchical error indicator, with fully adaptive (FAS) and
//! geometrical random (GRS) splitting.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{self, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::quadrature::{cached_rule, QuadratureResult, QuadratureRule, Rect};
use crate::{Error, Result};

/// Splitting strategy of the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Try every axis, keep the bisection minimizing the children's
    /// combined indicator.
    Fas,
    /// Bisect uniformly at random among the longest axes.
    Grs,
}

/// Driver configuration. `q1 < q2` are the two rule levels of the
/// hierarchical indicator; `seed` feeds the GRS direction stream only.
#[derive(Debug, Clone)]
pub struct AdaptiveConfig {
    pub strategy: Strategy,
    pub iterations: usize,
    pub q1: u32,
    pub q2: u32,
    pub alpha: u32,
    pub seed: u64,
    /// Upper bound on the number of mesh cells kept in memory.
    pub max_regions: usize,
    /// Optional early stop once the summed indicator drops below this.
    pub indicator_threshold: Option<f64>,
}

impl AdaptiveConfig {
    pub fn new(
        strategy: Strategy,
        iterations: usize,
        q1: u32,
        q2: u32,
        alpha: u32,
        seed: u64,
    ) -> Self {
        AdaptiveConfig {
            strategy,
            iterations,
            q1,
            q2,
            alpha,
            seed,
            max_regions: 4_000_000,
            indicator_threshold: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q1 < 1 || self.q1 >= self.q2 {
            return Err(Error::invalid(format!(
                "rule levels must satisfy 1 <= q1 < q2, got q1 = {}, q2 = {}",
                self.q1, self.q2
            )));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iteration count must be >= 1"));
        }
        if self.iterations + 1 > self.max_regions {
            return Err(Error::ResourceLimit(format!(
                "{} iterations would create {} regions, above the budget of {}",
                self.iterations,
                self.iterations + 1,
                self.max_regions
            )));
        }
        Ok(())
    }
}

/// A mesh cell together with its two rule results and error indicator.
#[derive(Debug, Clone)]
pub struct HyperRectangle {
    pub rect: Rect,
    pub result_q1: QuadratureResult,
    pub result_q2: QuadratureResult,
    pub indicator: f64,
}

/// Output of one adaptive integration.
#[derive(Debug, Clone)]
pub struct AdaptiveResult {
    /// Sum of the fine-rule estimates over the final mesh.
    pub estimate: f64,
    /// Sum of the leaf error indicators.
    pub total_indicator: f64,
    /// Exact number of integrand evaluations spent.
    pub eval_count: u64,
    /// Final mesh, sorted by decreasing indicator.
    pub mesh: Vec<HyperRectangle>,
}

/// Hierarchical error indicator between the coarse and fine rule results
/// on one cell: the integral discrepancy plus the volume-weighted
/// discrepancies of the monitored model coefficients.
pub fn error_indicator(r1: &QuadratureResult, r2: &QuadratureResult) -> f64 {
    debug_assert_eq!(r1.leading_coeffs.len(), r2.leading_coeffs.len());
    let mut ind = (r1.integral_estimate - r2.integral_estimate).abs();
    let volf = r1.volume_factor;
    for (a, b) in r1.leading_coeffs.iter().zip(&r2.leading_coeffs) {
        ind += volf * (a - b).abs();
    }
    ind
}

/// Evaluate one cell with both rules and compute its indicator.
pub fn evaluate_cell<F>(
    f: &F,
    rect: Rect,
    rule1: &QuadratureRule,
    rule2: &QuadratureRule,
) -> Result<HyperRectangle>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let result_q1 = rule1.apply(f, &rect)?;
    let result_q2 = rule2.apply(f, &rect)?;
    let indicator = error_indicator(&result_q1, &result_q2);
    Ok(HyperRectangle {
        rect,
        result_q1,
        result_q2,
        indicator,
    })
}

/// Axes whose side length ties the maximum within relative tolerance.
pub fn admissible_directions(rect: &Rect) -> Vec<usize> {
    let max = (0..rect.dim()).map(|k| rect.side(k)).fold(0.0, f64::max);
    (0..rect.dim())
        .filter(|&k| rect.side(k) >= max * (1.0 - 1e-12))
        .collect()
}

/// Fully adaptive split: bisect along every axis, evaluate both children
/// of every trial, and keep the pair with the smallest combined indicator
/// (ties resolved towards the smallest axis index).
pub fn split_fas<F>(
    f: &F,
    rect: &Rect,
    rule1: &QuadratureRule,
    rule2: &QuadratureRule,
) -> Result<(HyperRectangle, HyperRectangle, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let trials: Vec<Result<(HyperRectangle, HyperRectangle)>> = (0..rect.dim())
        .into_par_iter()
        .map(|axis| {
            let (left, right) = rect.bisect(axis);
            Ok((
                evaluate_cell(f, left, rule1, rule2)?,
                evaluate_cell(f, right, rule1, rule2)?,
            ))
        })
        .collect();

    let mut best: Option<(HyperRectangle, HyperRectangle, usize, f64)> = None;
    for (axis, trial) in trials.into_iter().enumerate() {
        let (left, right) = trial?;
        let score = left.indicator + right.indicator;
        if best.as_ref().is_none_or(|(_, _, _, s)| score < *s) {
            best = Some((left, right, axis, score));
        }
    }
    let (left, right, axis, _) = best.expect("dimension is at least one");
    Ok((left, right, axis))
}

/// Geometrical random split: a direction drawn uniformly among the longest
/// axes, children returned unevaluated.
pub fn split_grs<R: Rng>(rect: &Rect, rng: &mut R) -> (Rect, Rect, usize) {
    let admissible = admissible_directions(rect);
    let axis = admissible[rng.random_range(0..admissible.len())];
    let (left, right) = rect.bisect(axis);
    (left, right, axis)
}

struct Entry {
    cell: HyperRectangle,
    seq: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on the indicator; ties pop the oldest cell first.
        self.cell
            .indicator
            .total_cmp(&other.cell.indicator)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Run the adaptive driver: initialize with the whole domain, then `N`
/// times pop the cell with the largest indicator, split it per the
/// configured strategy and insert the evaluated children.
pub fn integrate_adaptive<F>(
    f: &F,
    domain: &Rect,
    config: &AdaptiveConfig,
) -> Result<AdaptiveResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let d = domain.dim();
    let rule1 = cached_rule(d, config.q1, config.alpha)?;
    let rule2 = cached_rule(d, config.q2, config.alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut eval_count: u64 = 0;
    let mut seq: u64 = 0;
    let mut heap = BinaryHeap::with_capacity(config.iterations + 1);

    let root = evaluate_cell(f, domain.clone(), &rule1, &rule2)?;
    eval_count += root.result_q1.eval_count + root.result_q2.eval_count;
    let mut running_indicator = root.indicator;
    heap.push(Entry { cell: root, seq });

    for _ in 0..config.iterations {
        if let Some(threshold) = config.indicator_threshold {
            if running_indicator <= threshold {
                break;
            }
        }
        let top = heap.pop().expect("heap never empties");
        running_indicator -= top.cell.indicator;

        let (left, right) = match config.strategy {
            Strategy::Fas => {
                let (left, right, _) = split_fas(f, &top.cell.rect, &rule1, &rule2)?;
                eval_count +=
                    (2 * d as u64) * (rule1.point_count() as u64 + rule2.point_count() as u64);
                (left, right)
            }
            Strategy::Grs => {
                let (lrect, rrect, _) = split_grs(&top.cell.rect, &mut rng);
                let left = evaluate_cell(f, lrect, &rule1, &rule2)?;
                let right = evaluate_cell(f, rrect, &rule1, &rule2)?;
                eval_count += 2 * (rule1.point_count() as u64 + rule2.point_count() as u64);
                (left, right)
            }
        };
        running_indicator += left.indicator + right.indicator;
        seq += 1;
        heap.push(Entry { cell: left, seq });
        seq += 1;
        heap.push(Entry { cell: right, seq });
    }

    let mut mesh: Vec<HyperRectangle> = heap
        .into_sorted_vec()
        .into_iter()
        .rev()
        .map(|e| e.cell)
        .collect();
    let estimate = mesh.iter().map(|c| c.result_q2.integral_estimate).sum();
    let total_indicator = mesh.iter().map(|c| c.indicator).sum();
    mesh.shrink_to_fit();
    Ok(AdaptiveResult {
        estimate,
        total_indicator,
        eval_count,
        mesh,
    })
}

/// Statistics over independent GRS replications.
#[derive(Debug, Clone)]
pub struct ReplicationStats {
    pub mean: f64,
    pub median: f64,
    /// Unbiased sample standard deviation, the replication error criterion.
    pub std_dev: f64,
    pub values: Vec<f64>,
    pub eval_count: u64,
}

/// Run `runs` independent GRS instances with seeds `seed + 0 .. seed + runs - 1`.
pub fn run_replications<F>(
    f: &F,
    domain: &Rect,
    config: &AdaptiveConfig,
    runs: usize,
) -> Result<ReplicationStats>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if config.strategy != Strategy::Grs {
        return Err(Error::invalid(
            "replication statistics require the stochastic GRS strategy",
        ));
    }
    if runs < 2 {
        return Err(Error::invalid("replications need runs >= 2"));
    }
    let results: Vec<Result<AdaptiveResult>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut cfg = config.clone();
            cfg.seed = config.seed.wrapping_add(i as u64);
            integrate_adaptive(f, domain, &cfg)
        })
        .collect();

    let mut values = Vec::with_capacity(runs);
    let mut eval_count = 0u64;
    for r in results {
        let r = r?;
        values.push(r.estimate);
        eval_count += r.eval_count;
    }
    Ok(ReplicationStats {
        mean: mean(&values),
        median: median(&values),
        std_dev: sample_std(&values),
        values,
        eval_count,
    })
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// Write the final mesh as CSV: one record per leaf with lower bounds,
/// upper bounds, indicator and local estimate, floats at 17 significant
/// digits.
pub fn export_mesh<W: Write>(result: &AdaptiveResult, mut out: W) -> io::Result<()> {
    let d = result
        .mesh
        .first()
        .map(|c| c.rect.dim())
        .unwrap_or_default();
    let mut header = Vec::with_capacity(2 * d + 2);
    for k in 1..=d {
        header.push(format!("lo_{k}"));
    }
    for k in 1..=d {
        header.push(format!("hi_{k}"));
    }
    header.push("indicator".to_string());
    header.push("estimate".to_string());
    writeln!(out, "{}", header.join(","))?;
    for cell in &result.mesh {
        let mut fields = Vec::with_capacity(2 * d + 2);
        for v in cell.rect.lower() {
            fields.push(format!("{v:.16e}"));
        }
        for v in cell.rect.upper() {
            fields.push(format!("{v:.16e}"));
        }
        fields.push(format!("{:.16e}", cell.indicator));
        fields.push(format!("{:.16e}", cell.result_q2.integral_estimate));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// `export_mesh` into a file, reporting failures with the path.
pub fn export_mesh_to_path<P: AsRef<Path>>(result: &AdaptiveResult, path: P) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    export_mesh(result, io::BufWriter::new(file))
        .map_err(|e| Error::io(path.display().to_string(), e))
}
