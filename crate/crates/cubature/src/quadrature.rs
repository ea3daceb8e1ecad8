//! Least-squares quadrature rules on Chebyshev-density Halton points.
//!
//! A rule for parameters `(d, q, alpha)` fits the reduced polynomial model
//! spanned by `W_{d,q}` to function values at `alpha * L` quasi-random
//! points plus the `2^d` corners of the reference cube, and converts the
//! fit into one weight vector for the integral and one weight row per
//! monitored leading coefficient. Rules are built once per parameter
//! triple and applied to arbitrary boxes through the affine map.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;

use crate::index_basis::{basis_integral, build_index_set, IndexSet};
use crate::{Error, Result};

/// Hard cap on design-matrix entries (M x L), about 4.8 GB of f64.
const MAX_DESIGN_ENTRIES: u64 = 600_000_000;

/// Relative rank tolerance of the pivoted factorization.
const RANK_TOLERANCE: f64 = 1e-10;

/// An axis-aligned box with strictly positive side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Rect {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid(
                "rectangle bounds must be non-empty and of equal length",
            ));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::invalid(format!(
                    "degenerate rectangle side [{l}, {u}]"
                )));
            }
        }
        Ok(Rect { lower, upper })
    }

    /// The centred cube `[-a, a]^d`.
    pub fn centered_cube(d: usize, a: f64) -> Result<Self> {
        Rect::new(vec![-a; d], vec![a; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.side(k)).product()
    }

    /// `vol(rect) / 2^d`, the Jacobian of the map from the reference cube.
    pub fn volume_factor(&self) -> f64 {
        (0..self.dim()).map(|k| 0.5 * self.side(k)).product()
    }

    /// Ratio of the longest to the shortest side.
    pub fn aspect_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..self.dim() {
            lo = lo.min(self.side(k));
            hi = hi.max(self.side(k));
        }
        hi / lo
    }

    /// Split at the midpoint of `axis` into two equal-volume halves.
    pub fn bisect(&self, axis: usize) -> (Rect, Rect) {
        let mid = 0.5 * (self.lower[axis] + self.upper[axis]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[axis] = mid;
        right.lower[axis] = mid;
        (left, right)
    }
}

/// First `count` primes, used as Halton bases.
fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if out.iter().all(|p| !n.is_multiple_of(*p)) {
            out.push(n);
        }
        n += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// First `count` Halton points in `[0,1]^d` (bases = first `d` primes,
/// sequence started at index 1, no scrambling).
pub fn halton_points(count: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    if count == 0 || d == 0 {
        return Err(Error::invalid(
            "halton_points requires count >= 1 and d >= 1",
        ));
    }
    let bases = primes(d);
    Ok((1..=count as u64)
        .map(|i| bases.iter().map(|&b| radical_inverse(i, b)).collect())
        .collect())
}

/// Halton points pushed to the Chebyshev (arcsine) density on `[-1,1]^d`
/// through the componentwise map `x = cos(pi u)`.
pub fn tcheb_distributed_points(count: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    let mut pts = halton_points(count, d)?;
    for p in &mut pts {
        for u in p.iter_mut() {
            *u = (std::f64::consts::PI * *u).cos();
        }
    }
    Ok(pts)
}

/// The outcome of applying a rule to one integrand on one box.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    /// Estimate of the integral over the box.
    pub integral_estimate: f64,
    /// Estimated leading model coefficients (constant plus the d linear
    /// terms), in box-local coordinates.
    pub leading_coeffs: Vec<f64>,
    /// Number of integrand evaluations spent (the rule's M).
    pub eval_count: u64,
    /// `vol(box) / 2^d`; carried so hierarchical indicators can weight
    /// coefficient discrepancies like integrals.
    pub volume_factor: f64,
}

/// A least-squares quadrature rule for one `(d, q, alpha)` triple.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    d: usize,
    q: u32,
    alpha: u32,
    index_set: IndexSet,
    /// M reference points, row-major M x d, the last 2^d being corners.
    points: Vec<f64>,
    point_count: usize,
    /// Integral weights, length M.
    integral_weights: Vec<f64>,
    /// (d + 1) x M weight rows for the monitored coefficients.
    coeff_weights: Vec<f64>,
    condition_number: f64,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.q
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    /// Total point count `M = alpha * L + 2^d`.
    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn integral_weights(&self) -> &[f64] {
        &self.integral_weights
    }

    /// 2-norm condition number of the design matrix.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Reference point `i` as a slice of length `d`.
    fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    /// Apply the rule to `f` on `rect`: affine-map the reference points,
    /// evaluate once per point, and contract with the weight rows.
    pub fn apply<F>(&self, f: F, rect: &Rect) -> Result<QuadratureResult>
    where
        F: Fn(&[f64]) -> f64,
    {
        if rect.dim() != self.d {
            return Err(Error::invalid(format!(
                "rule dimension {} does not match rectangle dimension {}",
                self.d,
                rect.dim()
            )));
        }
        let d = self.d;
        let mut center = vec![0.0; d];
        let mut halfw = vec![0.0; d];
        for k in 0..d {
            center[k] = 0.5 * (rect.lower[k] + rect.upper[k]);
            halfw[k] = 0.5 * rect.side(k);
        }
        let volume_factor = rect.volume_factor();

        let mut x = vec![0.0; d];
        let mut integral = 0.0;
        let mut coeffs = vec![0.0; d + 1];
        let m = self.point_count;
        for i in 0..m {
            let p = self.point(i);
            for k in 0..d {
                x[k] = center[k] + halfw[k] * p[k];
            }
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation { point: x });
            }
            integral += self.integral_weights[i] * v;
            for (r, c) in coeffs.iter_mut().enumerate() {
                *c += self.coeff_weights[r * m + i] * v;
            }
        }
        Ok(QuadratureResult {
            integral_estimate: volume_factor * integral,
            leading_coeffs: coeffs,
            eval_count: m as u64,
            volume_factor,
        })
    }
}

/// Build the rule for `(d, q, alpha)`: assemble the design matrix on the
/// Chebyshev-density Halton points plus corners, factorize it with a
/// rank-revealing column-pivoted QR, and extract the integral weights and
/// the d + 1 coefficient weight rows from the pseudo-inverse.
pub fn build_rule(d: usize, q: u32, alpha: u32) -> Result<QuadratureRule> {
    if alpha == 0 {
        return Err(Error::invalid("alpha must be >= 1"));
    }
    if d > 25 {
        return Err(Error::ResourceLimit(format!(
            "corner points are 2^{d}; dimensions above 25 are not supported"
        )));
    }
    let index_set = build_index_set(d, q)?;
    let l = index_set.len();
    let n_halton = alpha as usize * l;
    let m = n_halton + (1usize << d);
    if (m as u64) * (l as u64) > MAX_DESIGN_ENTRIES {
        return Err(Error::ResourceLimit(format!(
            "design matrix {m} x {l} exceeds the size budget"
        )));
    }

    // Point set: alpha*L Chebyshev-density Halton points, then the corners
    // in bitmask order (bit k set = +1 on axis k).
    let mut points = Vec::with_capacity(m * d);
    for p in tcheb_distributed_points(n_halton, d)? {
        points.extend_from_slice(&p);
    }
    for mask in 0..(1usize << d) {
        for k in 0..d {
            points.push(if (mask >> k) & 1 == 1 { 1.0 } else { -1.0 });
        }
    }

    // Design matrix A[i][j] = prod_k T_{m_j(k)}(x_i(k)), assembled from a
    // per-point table of 1-D Chebyshev values up to the maximum degree.
    let max_deg = index_set
        .members()
        .iter()
        .flat_map(|mi| mi.0.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let mut design = DMatrix::<f64>::zeros(m, l);
    let mut table = vec![0.0; d * (max_deg + 1)];
    for i in 0..m {
        let x = &points[i * d..(i + 1) * d];
        for k in 0..d {
            let row = &mut table[k * (max_deg + 1)..(k + 1) * (max_deg + 1)];
            row[0] = 1.0;
            if max_deg >= 1 {
                row[1] = x[k];
                for deg in 2..=max_deg {
                    row[deg] = 2.0 * x[k] * row[deg - 1] - row[deg - 2];
                }
            }
        }
        for (j, mi) in index_set.members().iter().enumerate() {
            let mut prod = 1.0;
            for (k, &mk) in mi.0.iter().enumerate() {
                prod *= table[k * (max_deg + 1) + mk as usize];
            }
            design[(i, j)] = prod;
        }
    }

    let qr = design.col_piv_qr();
    let r = qr.r();
    let rank = (0..l)
        .take_while(|&i| r[(i, i)].abs() >= RANK_TOLERANCE * r[(0, 0)].abs())
        .count();
    if rank < l {
        return Err(Error::RankDeficient { rank, cols: l });
    }
    let condition_number = condition_from_r(&r);

    // With A P = Q R (full column rank), any transposed pseudo-inverse
    // image (A+)^T w equals Q R^{-T} P^T w.
    let q_mat = qr.q();
    let r_t = r.transpose();
    let perm = qr.p();
    let pinv_t_image = |w: DVector<f64>| -> Result<Vec<f64>> {
        let mut w = w;
        perm.permute_rows(&mut w);
        let y = r_t
            .solve_lower_triangular(&w)
            .ok_or(Error::RankDeficient { rank, cols: l })?;
        Ok((&q_mat * y).iter().copied().collect())
    };

    let exact = DVector::from_iterator(l, index_set.members().iter().map(basis_integral));
    let integral_weights = pinv_t_image(exact)?;

    let mut coeff_weights = Vec::with_capacity((d + 1) * m);
    for pos in index_set.leading_positions() {
        let mut e = DVector::zeros(l);
        e[pos] = 1.0;
        coeff_weights.extend_from_slice(&pinv_t_image(e)?);
    }

    Ok(QuadratureRule {
        d,
        q,
        alpha,
        index_set,
        points,
        point_count: m,
        integral_weights,
        coeff_weights,
        condition_number,
    })
}

/// 2-norm condition number of A from its triangular factor R (same
/// singular values), via power iteration on R^T R and inverse iteration
/// through triangular solves. A diagnostic, deterministic and clamped >= 1.
fn condition_from_r(r: &DMatrix<f64>) -> f64 {
    let l = r.nrows();
    if l == 1 {
        return 1.0;
    }
    let r_t = r.transpose();
    let start = DVector::from_iterator(l, (0..l).map(|i| ((i + 1) as f64).sin())).normalize();

    let mut v = start.clone();
    let mut sigma_max_sq = 0.0;
    for _ in 0..200 {
        let w = &r_t * (r * &v);
        let lambda = v.dot(&w);
        let n = w.norm();
        if n == 0.0 {
            break;
        }
        v = w / n;
        if (lambda - sigma_max_sq).abs() <= 1e-13 * lambda.abs() {
            sigma_max_sq = lambda;
            break;
        }
        sigma_max_sq = lambda;
    }

    let mut v = start;
    let mut inv_lambda = 0.0;
    for _ in 0..200 {
        let y = match r_t.solve_lower_triangular(&v) {
            Some(y) => y,
            None => return f64::INFINITY,
        };
        let w = match r.solve_upper_triangular(&y) {
            Some(w) => w,
            None => return f64::INFINITY,
        };
        let lambda = v.dot(&w);
        let n = w.norm();
        if n == 0.0 {
            break;
        }
        v = w / n;
        if (lambda - inv_lambda).abs() <= 1e-13 * lambda.abs() {
            inv_lambda = lambda;
            break;
        }
        inv_lambda = lambda;
    }
    if inv_lambda <= 0.0 || sigma_max_sq <= 0.0 {
        return f64::INFINITY;
    }
    (sigma_max_sq * inv_lambda).sqrt().max(1.0)
}

type RuleCache = HashMap<(usize, u32, u32), Arc<QuadratureRule>>;

static RULE_CACHE: Lazy<Mutex<RuleCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Fetch the rule for `(d, q, alpha)`, building and caching it on first use.
pub fn cached_rule(d: usize, q: u32, alpha: u32) -> Result<Arc<QuadratureRule>> {
    if let Some(rule) = RULE_CACHE.lock().unwrap().get(&(d, q, alpha)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(d, q, alpha)?);
    let mut cache = RULE_CACHE.lock().unwrap();
    Ok(Arc::clone(cache.entry((d, q, alpha)).or_insert(rule)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_basis::{tcheb_eval, MultiIndex};
    use crate::test_oracles::gauss_legendre;
    use approx::assert_abs_diff_eq;

    #[test]
    fn halton_first_terms() {
        let pts = halton_points(3, 1).unwrap();
        assert_eq!(pts, vec![vec![0.5], vec![0.25], vec![0.75]]);
        let pts = halton_points(2, 2).unwrap();
        assert_abs_diff_eq!(pts[0][0], 0.5);
        assert_abs_diff_eq!(pts[0][1], 1.0 / 3.0);
        assert_abs_diff_eq!(pts[1][0], 0.25);
        assert_abs_diff_eq!(pts[1][1], 2.0 / 3.0);
        let pts = halton_points(1, 3).unwrap();
        assert_abs_diff_eq!(pts[0][2], 0.2);
    }

    #[test]
    fn tcheb_map_examples() {
        let pts = tcheb_distributed_points(2, 1).unwrap();
        // u = 1/2 -> 0, u = 1/4 -> cos(pi/4)
        assert!(pts[0][0].abs() < 1e-15);
        assert_abs_diff_eq!(pts[1][0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn tcheb_map_matches_arcsine_cdf() {
        // Kolmogorov distance between the empirical CDF of 10^4 mapped
        // points and the arcsine CDF (2/pi) asin(sqrt((x+1)/2)).
        let n = 10_000;
        let mut xs: Vec<f64> = tcheb_distributed_points(n, 1)
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let cdf = |x: f64| 2.0 / std::f64::consts::PI * ((x + 1.0) / 2.0).sqrt().asin();
        let mut ks = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let f = cdf(x);
            ks = ks.max((f - i as f64 / n as f64).abs());
            ks = ks.max((f - (i + 1) as f64 / n as f64).abs());
        }
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn quadratic_is_integrated_exactly_in_1d() {
        let rule = build_rule(1, 2, 3).unwrap();
        let rect = Rect::centered_cube(1, 1.0).unwrap();
        let res = rule.apply(|x| x[0] * x[0], &rect).unwrap();
        assert_abs_diff_eq!(res.integral_estimate, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn published_point_count_and_weight_sum() {
        let rule = build_rule(2, 24, 3).unwrap();
        assert_eq!(rule.point_count(), 403);
        let rule18 = build_rule(2, 18, 3).unwrap();
        let s: f64 = rule18.integral_weights().iter().sum();
        assert_abs_diff_eq!(s, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn exactness_on_every_basis_function() {
        for (d, q) in [(1usize, 8u32), (2, 18), (3, 12)] {
            let rule = build_rule(d, q, 3).unwrap();
            let rect = Rect::centered_cube(d, 1.0).unwrap();
            for mi in rule.index_set().members() {
                let m = mi.clone();
                let res = rule
                    .apply(
                        |x| {
                            x.iter()
                                .zip(&m.0)
                                .map(|(&xi, &mi)| tcheb_eval(mi, xi))
                                .product()
                        },
                        &rect,
                    )
                    .unwrap();
                let exact = basis_integral(mi);
                assert!(
                    (res.integral_estimate - exact).abs() <= 1e-9,
                    "d={d} q={q} m={:?}: {} vs {}",
                    mi.0,
                    res.integral_estimate,
                    exact
                );
            }
        }
    }

    #[test]
    fn constant_and_linear_coefficients() {
        let rule = build_rule(2, 18, 3).unwrap();
        let rect = Rect::new(vec![0.0, -2.0], vec![3.0, 2.0]).unwrap();
        let res = rule.apply(|_| 2.5, &rect).unwrap();
        assert_abs_diff_eq!(res.integral_estimate, 2.5 * rect.volume(), epsilon = 1e-9);
        assert_abs_diff_eq!(res.leading_coeffs[0], 2.5, epsilon = 1e-9);
        assert!(res.leading_coeffs[1].abs() < 1e-9);
        assert!(res.leading_coeffs[2].abs() < 1e-9);

        let reference = Rect::centered_cube(2, 1.0).unwrap();
        let res = rule.apply(|x| x[0], &reference).unwrap();
        assert!(res.integral_estimate.abs() < 1e-10);
        assert_abs_diff_eq!(res.leading_coeffs[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn affine_consistency_on_a_polynomial() {
        // int_{[1,3]x[-1,2]} x^2 y dx dy = (26/3) * (3/2) = 13.
        let rule = build_rule(2, 18, 3).unwrap();
        let rect = Rect::new(vec![1.0, -1.0], vec![3.0, 2.0]).unwrap();
        let res = rule.apply(|x| x[0] * x[0] * x[1], &rect).unwrap();
        assert_abs_diff_eq!(res.integral_estimate, 13.0, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_density_matches_tensor_gauss_legendre() {
        // Independent oracle: 64-node tensor Gauss-Legendre on [-1,1]^2.
        let (nodes, weights) = gauss_legendre(64);
        let f =
            |x: f64, y: f64| (2.0 * std::f64::consts::PI).recip() * (-0.5 * (x * x + y * y)).exp();
        let mut oracle = 0.0;
        for (i, &xi) in nodes.iter().enumerate() {
            for (j, &xj) in nodes.iter().enumerate() {
                oracle += weights[i] * weights[j] * f(xi, xj);
            }
        }
        let rule = build_rule(2, 24, 3).unwrap();
        let rect = Rect::centered_cube(2, 1.0).unwrap();
        let res = rule.apply(|x| f(x[0], x[1]), &rect).unwrap();
        assert!(
            (res.integral_estimate - oracle).abs() <= 1e-8,
            "rule {} oracle {}",
            res.integral_estimate,
            oracle
        );
    }

    #[test]
    fn conditioning_improves_with_alpha() {
        let k3 = build_rule(2, 18, 3).unwrap().condition_number();
        let k10 = build_rule(2, 18, 10).unwrap().condition_number();
        assert!(k3.is_finite() && k10.is_finite());
        assert!(k3 >= 1.0 && k10 >= 1.0);
        assert!(k10 < k3, "kappa(alpha=10) = {k10} !< kappa(alpha=3) = {k3}");
    }

    #[test]
    fn last_points_are_the_corners() {
        let rule = build_rule(2, 6, 3).unwrap();
        let m = rule.point_count();
        let corners: Vec<&[f64]> = (m - 4..m).map(|i| rule.point(i)).collect();
        assert_eq!(
            corners,
            vec![
                &[-1.0, -1.0][..],
                &[1.0, -1.0][..],
                &[-1.0, 1.0][..],
                &[1.0, 1.0][..]
            ]
        );
        assert_eq!(m, 3 * rule.index_set().len() + 4);
    }

    #[test]
    fn rules_are_bit_identical_across_builds() {
        let a = build_rule(2, 12, 3).unwrap();
        let b = build_rule(2, 12, 3).unwrap();
        assert_eq!(a.integral_weights(), b.integral_weights());
        assert_eq!(a.points, b.points);
        assert_eq!(a.condition_number(), b.condition_number());
    }

    #[test]
    fn nan_evaluation_is_reported_with_the_point() {
        let rule = build_rule(1, 4, 3).unwrap();
        let rect = Rect::centered_cube(1, 1.0).unwrap();
        let err = rule
            .apply(|x| if x[0] > 0.0 { f64::NAN } else { 1.0 }, &rect)
            .unwrap_err();
        match err {
            Error::Evaluation { point } => assert_eq!(point.len(), 1),
            other => panic!("expected evaluation error, got {other}"),
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_rule(2, 18, 0).is_err());
        assert!(matches!(
            build_rule(10, 18, 3),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn basis_integral_row_recovers_exact_vector() {
        // Applying the rule to a member basis function must also recover
        // its coefficient: model coefficients of T_m are the unit vector.
        let rule = build_rule(2, 8, 3).unwrap();
        let rect = Rect::centered_cube(2, 1.0).unwrap();
        let m = MultiIndex(vec![0, 1]);
        let res = rule
            .apply(|x| tcheb_eval(0, x[0]) * tcheb_eval(1, x[1]), &rect)
            .unwrap();
        assert_abs_diff_eq!(res.leading_coeffs[2], 1.0, epsilon = 1e-10);
        assert!(res.leading_coeffs[0].abs() < 1e-10);
        assert!(res.leading_coeffs[1].abs() < 1e-10);
        assert_abs_diff_eq!(res.integral_estimate, basis_integral(&m), epsilon = 1e-10);
    }
}
