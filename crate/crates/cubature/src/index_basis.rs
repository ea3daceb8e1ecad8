//! Chebyshev polynomials, hyperbolic-cross index sets and exact integrals
//! of tensor-product basis functions over `[-1,1]^d`.

use crate::{Error, Result};

/// A multi-index `m` in `N^d` identifying the tensor-product basis function
/// `T_{m_1}(x_1) ... T_{m_d}(x_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product of `max(1, m_i)`, the hyperbolic-cross weight of the index.
    pub fn cross_weight(&self) -> u64 {
        self.0.iter().map(|&m| u64::from(m.max(1))).product()
    }
}

/// The hyperbolic-cross set `W_{d,q} = { m : prod_i max(1, m_i) <= q }`,
/// stored in a fixed deterministic order (total degree, then lexicographic).
#[derive(Debug, Clone)]
pub struct IndexSet {
    d: usize,
    q: u32,
    members: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.q
    }

    /// Cardinality `L_{d,q}`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn contains(&self, m: &MultiIndex) -> bool {
        m.dim() == self.d && m.cross_weight() <= u64::from(self.q)
    }

    /// Positions of the `d + 1` monitored indices: the all-zero index
    /// followed by the unit indices `e_1, ..., e_d`.
    pub fn leading_positions(&self) -> Vec<usize> {
        let mut targets = Vec::with_capacity(self.d + 1);
        targets.push(MultiIndex(vec![0; self.d]));
        for k in 0..self.d {
            let mut e = vec![0u32; self.d];
            e[k] = 1;
            targets.push(MultiIndex(e));
        }
        targets
            .iter()
            .map(|t| {
                self.members
                    .iter()
                    .position(|m| m == t)
                    .expect("leading index always belongs to W_{d,q} for q >= 1")
            })
            .collect()
    }
}

/// Enumerate `W_{d,q}` completely, sorted by (total degree, lexicographic).
pub fn build_index_set(d: usize, q: u32) -> Result<IndexSet> {
    if d == 0 {
        return Err(Error::invalid("index set dimension must be >= 1"));
    }
    if q == 0 {
        return Err(Error::invalid("index set level q must be >= 1"));
    }
    let mut members = Vec::new();
    let mut prefix = vec![0u32; d];
    enumerate(&mut members, &mut prefix, 0, 1, u64::from(q));
    members.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(IndexSet { d, q, members })
}

fn enumerate(out: &mut Vec<MultiIndex>, prefix: &mut [u32], pos: usize, weight: u64, q: u64) {
    if pos == prefix.len() {
        out.push(MultiIndex(prefix.to_vec()));
        return;
    }
    let mut m = 0u32;
    while weight * u64::from(m.max(1)) <= q {
        prefix[pos] = m;
        enumerate(out, prefix, pos + 1, weight * u64::from(m.max(1)), q);
        m += 1;
    }
    prefix[pos] = 0;
}

/// Chebyshev polynomial of the first kind `T_m(x)` by the three-term
/// recurrence. `x` outside `[-1, 1]` is permitted but flagged in debug
/// builds, since every internal caller stays on the reference cube.
pub fn tcheb_eval(m: u32, x: f64) -> f64 {
    debug_assert!(
        (-1.0 - 1e-9..=1.0 + 1e-9).contains(&x),
        "T_m evaluated outside [-1,1]: x = {x}"
    );
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 2..=m {
                (prev, cur) = (cur, 2.0 * x * cur - prev);
            }
            cur
        }
    }
}

/// `\int_{-1}^{1} T_m(x) dx`: zero for odd `m`, `2/(1 - m^2)` for even `m`.
pub fn basis_integral_1d(m: u32) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        2.0 / (1.0 - (f64::from(m)) * (f64::from(m)))
    }
}

/// Exact integral of the tensor-product basis function over `[-1,1]^d`.
pub fn basis_integral(m: &MultiIndex) -> f64 {
    m.0.iter().map(|&mi| basis_integral_1d(mi)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(d: usize, q: u32) -> Vec<MultiIndex> {
        // Independent oracle: scan the bounding box [0, q]^d.
        let mut out = Vec::new();
        let mut idx = vec![0u32; d];
        loop {
            let w: u64 = idx.iter().map(|&m| u64::from(m.max(1))).product();
            if w <= u64::from(q) {
                out.push(MultiIndex(idx.clone()));
            }
            let mut k = d;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < q {
                    idx[k] += 1;
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn one_dimensional_set_is_range() {
        let set = build_index_set(1, 5).unwrap();
        assert_eq!(set.len(), 6);
        let degrees: Vec<u32> = set.members().iter().map(|m| m.0[0]).collect();
        assert_eq!(degrees, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn level_one_is_binary_box() {
        let set = build_index_set(3, 1).unwrap();
        assert_eq!(set.len(), 8);
        for m in set.members() {
            assert!(m.0.iter().all(|&v| v <= 1));
        }
    }

    #[test]
    fn cardinality_matches_published_point_counts() {
        // M = 3 L + 2^d must give 403 evaluation points in (d=2, q=24).
        let set = build_index_set(2, 24).unwrap();
        assert_eq!(set.len(), 133);
        assert_eq!(3 * set.len() + 4, 403);
        assert_eq!(build_index_set(3, 24).unwrap().len(), 528);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(build_index_set(0, 5).is_err());
        assert!(build_index_set(2, 0).is_err());
    }

    #[test]
    fn membership_matches_brute_force() {
        for d in 1..=4usize {
            for q in 1..=24u32 {
                let set = build_index_set(d, q).unwrap();
                let mut expect = brute_force(d, q);
                expect.sort_by(|a, b| {
                    a.total_degree()
                        .cmp(&b.total_degree())
                        .then_with(|| a.0.cmp(&b.0))
                });
                assert_eq!(set.members(), expect.as_slice(), "d={d} q={q}");
            }
        }
    }

    #[test]
    fn tcheb_examples() {
        assert_eq!(tcheb_eval(0, 0.7), 1.0);
        assert!((tcheb_eval(3, 0.5) - (-1.0)).abs() < 1e-15);
        let x = (std::f64::consts::PI / 7.0).cos();
        assert!((tcheb_eval(7, x) - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn tcheb_matches_cosine_form_and_stays_bounded() {
        for m in 0..=50u32 {
            for i in 0..=200 {
                let x = -1.0 + 2.0 * f64::from(i) / 200.0;
                let t = tcheb_eval(m, x);
                assert!(t.abs() <= 1.0 + 1e-12, "m={m} x={x} t={t}");
                if x.abs() < 1.0 {
                    let reference = (f64::from(m) * x.acos()).cos();
                    assert!((t - reference).abs() < 1e-12, "m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn basis_integral_examples() {
        assert_eq!(basis_integral(&MultiIndex(vec![0, 0])), 4.0);
        assert_eq!(basis_integral(&MultiIndex(vec![1, 0])), 0.0);
        assert!((basis_integral(&MultiIndex(vec![2, 2])) - 4.0 / 9.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn nested_in_level(d in 1usize..=3, q1 in 1u32..=12, extra in 0u32..=12) {
            let q2 = q1 + extra;
            let small = build_index_set(d, q1).unwrap();
            let large = build_index_set(d, q2).unwrap();
            for m in small.members() {
                prop_assert!(large.contains(m));
            }
        }

        #[test]
        fn odd_component_kills_integral(m in proptest::collection::vec(0u32..8, 1..4)) {
            let idx = MultiIndex(m);
            if idx.0.iter().any(|&v| v % 2 == 1) {
                prop_assert_eq!(basis_integral(&idx), 0.0);
            }
        }
    }
}
