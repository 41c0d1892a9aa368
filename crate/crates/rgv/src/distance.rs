//! Distance functions on pairs of input sequences, evaluated through the
//! joint type of the pair.
//!
//! Additive distances average a symmetric single-letter table (Hamming,
//! Bhattacharyya, Chernoff); type-dependent distances evaluate an arbitrary
//! function of the pair joint (negative mutual information, equivocation, the
//! rate-dependent inner-optimization distance `beta`). The `symmetrize`
//! combinator takes the pointwise minimum of a distance and its transpose.

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::prob::{mutual_info_xx, Channel, JointXX};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Which standard distance a [`DistanceFn`] was built as. Lets downstream
/// code pick analytic fast paths where they exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceTag {
    Hamming,
    Bhattacharyya,
    Chernoff,
    NegMutualInfo,
    Equivocation,
    Beta,
    Custom,
}

#[derive(Clone)]
pub enum DistanceKind {
    /// Average of a single-letter table `d(x, x')` under the pair joint.
    Additive { table: Vec<f64>, nx: usize },
    /// Arbitrary function of the pair joint.
    TypeDep(Arc<dyn Fn(&JointXX) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct DistanceFn {
    kind: DistanceKind,
    symmetric: bool,
    tag: DistanceTag,
}

impl fmt::Debug for DistanceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DistanceFn({:?}, symmetric={})",
            self.tag, self.symmetric
        )
    }
}

fn table_is_symmetric(table: &[f64], nx: usize) -> bool {
    for a in 0..nx {
        for b in 0..a {
            if (table[a * nx + b] - table[b * nx + a]).abs() > 1e-12 {
                return false;
            }
        }
    }
    true
}

impl DistanceFn {
    /// Additive distance from a row-major table. The symmetric flag is set
    /// from the table itself.
    pub fn additive(table: Vec<f64>, nx: usize) -> Result<Self> {
        if table.len() != nx * nx {
            return Err(Error::InvalidConfig(format!(
                "distance table must be {nx}x{nx}"
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::UnboundedDistance(
                "additive distance table has non-finite entries".into(),
            ));
        }
        let symmetric = table_is_symmetric(&table, nx);
        Ok(Self {
            kind: DistanceKind::Additive { table, nx },
            symmetric,
            tag: DistanceTag::Custom,
        })
    }

    /// Type-dependent distance from an evaluator on pair joints.
    pub fn type_dep(f: impl Fn(&JointXX) -> f64 + Send + Sync + 'static, symmetric: bool) -> Self {
        Self {
            kind: DistanceKind::TypeDep(Arc::new(f)),
            symmetric,
            tag: DistanceTag::Custom,
        }
    }

    pub fn tag(&self) -> DistanceTag {
        self.tag
    }

    pub fn kind(&self) -> &DistanceKind {
        &self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn additive_table(&self) -> Option<(&[f64], usize)> {
        match &self.kind {
            DistanceKind::Additive { table, nx } => Some((table, *nx)),
            DistanceKind::TypeDep(_) => None,
        }
    }

    pub fn is_additive(&self) -> bool {
        self.additive_table().is_some()
    }

    /// Single-letter distance; only meaningful for the additive kind.
    #[inline]
    pub fn letter(&self, a: usize, b: usize) -> f64 {
        match &self.kind {
            DistanceKind::Additive { table, nx } => table[a * nx + b],
            DistanceKind::TypeDep(_) => panic!("letter() called on a type-dependent distance"),
        }
    }

    /// Evaluates the distance on a pair joint.
    pub fn eval(&self, joint: &JointXX) -> f64 {
        match &self.kind {
            DistanceKind::Additive { table, nx } => {
                let mut acc = 0.0;
                for a in 0..*nx {
                    for b in 0..*nx {
                        let p = joint.get(a, b);
                        if p > 0.0 {
                            acc += p * table[a * nx + b];
                        }
                    }
                }
                acc
            }
            DistanceKind::TypeDep(f) => f(joint),
        }
    }

    /// Evaluates the distance on a pair joint type given as cell counts, in
    /// a canonical order-independent summation so threshold comparisons are
    /// reproducible across the samplers and the enumeration oracles.
    pub fn eval_counts(&self, counts: &[usize], nx: usize, n: usize) -> f64 {
        match &self.kind {
            DistanceKind::Additive { table, nx: tnx } => {
                let mut acc = 0.0;
                for a in 0..nx {
                    for b in 0..nx {
                        let c = counts[a * nx + b];
                        if c > 0 {
                            acc += c as f64 * table[a * tnx + b];
                        }
                    }
                }
                acc / n as f64
            }
            DistanceKind::TypeDep(_) => {
                let joint: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
                self.eval(&JointXX::new(joint, nx).expect("joint type is a distribution"))
            }
        }
    }

    /// Evaluates the distance on two sequences via their joint type.
    pub fn eval_seqs(&self, x: &[usize], xp: &[usize], nx: usize) -> f64 {
        debug_assert_eq!(x.len(), xp.len());
        let mut counts = vec![0usize; nx * nx];
        for (&a, &b) in x.iter().zip(xp) {
            counts[a * nx + b] += 1;
        }
        self.eval_counts(&counts, nx, x.len())
    }

    fn with_tag(mut self, tag: DistanceTag) -> Self {
        self.tag = tag;
        self
    }
}

/// Hamming distance: the fraction of positions where the sequences differ.
pub fn hamming(nx: usize) -> DistanceFn {
    let mut table = vec![1.0; nx * nx];
    for a in 0..nx {
        table[a * nx + a] = 0.0;
    }
    DistanceFn::additive(table, nx)
        .expect("hamming table is finite")
        .with_tag(DistanceTag::Hamming)
}

/// Bhattacharyya distance of the channel: `-log sum_y sqrt(W(y|x) W(y|x'))`.
///
/// Every pair of inputs must share an output of positive probability under
/// both, otherwise the distance is unbounded and an error is returned.
pub fn bhattacharyya(w: &Channel) -> Result<DistanceFn> {
    let nx = w.nx();
    let mut table = vec![0.0; nx * nx];
    for a in 0..nx {
        for b in 0..nx {
            let s: f64 = (0..w.ny())
                .map(|y| (w.get(a, y) * w.get(b, y)).sqrt())
                .sum();
            if s <= 0.0 {
                return Err(Error::UnboundedDistance(format!(
                    "inputs {a} and {b} have no common output"
                )));
            }
            table[a * nx + b] = -s.ln();
        }
    }
    Ok(DistanceFn::additive(table, nx)
        .expect("bhattacharyya table is finite")
        .with_tag(DistanceTag::Bhattacharyya))
}

/// Chernoff distance `d_s(x, x') = -log sum_y W(y|x) e^{s (q(x',y) - q(x,y))}`
/// for an additive metric `q` and `s >= 0`. Not symmetric in general.
pub fn chernoff(w: &Channel, q: &Metric, s: f64) -> Result<DistanceFn> {
    let (table_q, nx, ny) = q
        .additive_table()
        .ok_or_else(|| Error::Unsupported("chernoff distance needs an additive metric".into()))?;
    if table_q.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnboundedDistance(
            "chernoff distance needs a bounded metric table".into(),
        ));
    }
    if s < 0.0 {
        return Err(Error::InvalidConfig(
            "chernoff exponent s must be >= 0".into(),
        ));
    }
    let mut table = vec![0.0; nx * nx];
    for a in 0..nx {
        for b in 0..nx {
            let mut sum = 0.0;
            for y in 0..ny {
                let wya = w.get(a, y);
                if wya > 0.0 {
                    sum += wya * (s * (table_q[b * ny + y] - table_q[a * ny + y])).exp();
                }
            }
            if !(sum.is_finite() && sum > 0.0) {
                return Err(Error::UnboundedDistance(format!(
                    "chernoff sum diverges at pair ({a}, {b})"
                )));
            }
            table[a * nx + b] = -sum.ln();
        }
    }
    Ok(DistanceFn::additive(table, nx)
        .expect("chernoff table checked finite")
        .with_tag(DistanceTag::Chernoff))
}

/// Negative empirical mutual information, `d(pi) = -I_pi(X; X')`.
pub fn neg_mutual_info() -> DistanceFn {
    DistanceFn::type_dep(|pi| -mutual_info_xx(pi), true).with_tag(DistanceTag::NegMutualInfo)
}

/// Equivocation distance `d(pi) = H_pi(X' | X)`. Symmetric on equal-marginal
/// joints (the only ones the code construction evaluates) but not on
/// arbitrary joints, so the symmetric flag is left unset; wrap with
/// [`symmetrize`] before handing it to the codebook generator.
pub fn equivocation() -> DistanceFn {
    DistanceFn::type_dep(
        |pi| crate::prob::entropy(pi.probs()) - crate::prob::entropy(&pi.marginal_x()),
        false,
    )
    .with_tag(DistanceTag::Equivocation)
}

/// Symmetrized distance `d'(pi) = min(d(pi), d(pi^T))`.
pub fn symmetrize(d: &DistanceFn) -> DistanceFn {
    if d.is_symmetric() {
        return d.clone();
    }
    let inner = d.clone();
    DistanceFn::type_dep(
        move |pi| inner.eval(pi).min(inner.eval(&pi.transpose())),
        true,
    )
}

/// The rate-dependent distance defined through the inner exponent
/// minimization: its value at a pair joint is the best exponent achievable by
/// any joint `(X, X', Y)` consistent with that pair joint and favoring the
/// competitor under `q`. `+inf` (in-band) when no such joint exists.
///
/// Inner-solver results are cached keyed by the pair joint quantized to a
/// 1e-4 grid; the cache is internally synchronized.
pub fn beta_distance(r: f64, w: &Channel, q: &Metric) -> Result<DistanceFn> {
    if !q.is_additive() {
        return Err(Error::Unsupported(
            "beta distance is implemented for additive metrics".into(),
        ));
    }
    let w = w.clone();
    let q = q.clone();
    let cache: Mutex<HashMap<Vec<u32>, f64>> = Mutex::new(HashMap::new());
    Ok(DistanceFn::type_dep(
        move |pi| {
            let key: Vec<u32> = pi
                .probs()
                .iter()
                .map(|&v| (v * 1e4).round().max(0.0) as u32)
                .collect();
            if let Some(&v) = cache.lock().unwrap().get(&key) {
                return v;
            }
            let v = crate::primal::beta_value(pi, &w, &q, r);
            cache.lock().unwrap().insert(key, v);
            v
        },
        false,
    )
    .with_tag(DistanceTag::Beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Distribution;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_joint(rng: &mut ChaCha20Rng, nx: usize) -> JointXX {
        let mut v: Vec<f64> = (0..nx * nx).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        JointXX::new(v, nx).unwrap()
    }

    #[test]
    fn hamming_on_sequences() {
        let d = hamming(2);
        assert_abs_diff_eq!(d.eval_seqs(&[0, 1, 1], &[0, 1, 1], 2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.eval_seqs(&[0, 1, 1], &[0, 1, 0], 2),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        let u = Distribution::uniform(2);
        assert_abs_diff_eq!(d.eval(&JointXX::product(&u)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bhattacharyya_values() {
        let w = Channel::bsc(0.1).unwrap();
        let d = bhattacharyya(&w).unwrap();
        assert_abs_diff_eq!(d.letter(0, 0), 0.0, epsilon = 1e-12);
        let expect = -(2.0 * (0.1f64 * 0.9).sqrt()).ln();
        assert_abs_diff_eq!(d.letter(0, 1), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(d.letter(0, 1), 0.5108, epsilon = 5e-4);

        let w5 = Channel::bsc(0.5).unwrap();
        let d5 = bhattacharyya(&w5).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(d5.letter(a, b), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bhattacharyya_disjoint_support_errors() {
        let w = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            bhattacharyya(&w),
            Err(Error::UnboundedDistance(_))
        ));
    }

    #[test]
    fn chernoff_half_ml_is_bhattacharyya() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for nx in [2usize, 3] {
            for _ in 0..20 {
                let rows: Vec<Vec<f64>> = (0..nx)
                    .map(|_| {
                        let mut r: Vec<f64> = (0..nx).map(|_| rng.gen::<f64>() + 0.05).collect();
                        let s: f64 = r.iter().sum();
                        r.iter_mut().for_each(|v| *v /= s);
                        r
                    })
                    .collect();
                let w = Channel::new(rows).unwrap();
                let q = Metric::ml(&w);
                let c = chernoff(&w, &q, 0.5).unwrap();
                let b = bhattacharyya(&w).unwrap();
                for a in 0..nx {
                    for bb in 0..nx {
                        assert_abs_diff_eq!(c.letter(a, bb), b.letter(a, bb), epsilon = 1e-12);
                    }
                }
                assert!(c.is_symmetric());
            }
        }
    }

    #[test]
    fn chernoff_s_zero_and_diagonal() {
        let w = Channel::bsc(0.2).unwrap();
        let q = Metric::additive(vec![0.1, 0.9, 0.4, 0.3], 2, 2);
        let d0 = chernoff(&w, &q, 0.0).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(d0.letter(a, b), 0.0, epsilon = 1e-12);
            }
        }
        let d = chernoff(&w, &q, 0.7).unwrap();
        for a in 0..2 {
            assert_abs_diff_eq!(d.letter(a, a), 0.0, epsilon = 1e-12);
        }
        assert!(!d.is_symmetric());
    }

    #[test]
    fn neg_mi_matches_core_oracle() {
        let d = neg_mutual_info();
        let u = Distribution::uniform(2);
        assert_abs_diff_eq!(d.eval(&JointXX::product(&u)), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            d.eval(&JointXX::diagonal(&u)),
            -(2.0f64.ln()),
            epsilon = 1e-12
        );
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        for _ in 0..100 {
            let j = random_joint(&mut rng, 3);
            assert_abs_diff_eq!(d.eval(&j), -mutual_info_xx(&j), epsilon = 1e-12);
        }
    }

    #[test]
    fn equivocation_examples_and_identity() {
        let d = equivocation();
        let u = Distribution::uniform(2);
        assert_abs_diff_eq!(d.eval(&JointXX::diagonal(&u)), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eval(&JointXX::product(&u)), 2.0f64.ln(), epsilon = 1e-12);
        // On equal-marginal joints, H(X'|X) = H(P) - I(X;X').
        let nmi = neg_mutual_info();
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..100 {
            // build an equal-marginal binary joint
            let p0: f64 = rng.gen_range(0.2..0.8);
            let amin: f64 = (2.0 * p0 - 1.0).max(0.0);
            let a: f64 = rng.gen_range(amin..p0);
            let j = JointXX::new(vec![a, p0 - a, p0 - a, 1.0 - 2.0 * p0 + a], 2).unwrap();
            let hp = crate::prob::entropy(&[p0, 1.0 - p0]);
            assert_abs_diff_eq!(d.eval(&j), hp + nmi.eval(&j), epsilon = 1e-10);
        }
    }

    #[test]
    fn symmetric_flag_holds_on_random_joints() {
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        let w = Channel::new(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.6, 0.3],
            vec![0.25, 0.3, 0.45],
        ])
        .unwrap();
        let q = Metric::ml(&w);
        let candidates = vec![
            hamming(3),
            bhattacharyya(&w).unwrap(),
            neg_mutual_info(),
            symmetrize(&chernoff(&w, &q, 0.3).unwrap()),
            symmetrize(&equivocation()),
        ];
        for d in &candidates {
            assert!(d.is_symmetric());
            for _ in 0..1000 {
                let j = random_joint(&mut rng, 3);
                assert_abs_diff_eq!(d.eval(&j), d.eval(&j.transpose()), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetrize_properties() {
        let w = Channel::bsc(0.15).unwrap();
        let q = Metric::additive(vec![0.0, 1.0, 0.3, 0.2], 2, 2);
        let d = chernoff(&w, &q, 0.8).unwrap();
        let ds = symmetrize(&d);
        let mut rng = ChaCha20Rng::seed_from_u64(25);
        for _ in 0..200 {
            let j = random_joint(&mut rng, 2);
            assert!(ds.eval(&j) <= d.eval(&j) + 1e-12);
            assert_abs_diff_eq!(ds.eval(&j), ds.eval(&j.transpose()), epsilon = 1e-12);
        }
        // symmetrizing a symmetric distance is the identity
        let h = hamming(2);
        let hs = symmetrize(&h);
        for _ in 0..50 {
            let j = random_joint(&mut rng, 2);
            assert_abs_diff_eq!(hs.eval(&j), h.eval(&j), epsilon = 1e-12);
        }
    }

    #[test]
    fn additive_distance_is_type_dependent() {
        // two sequence pairs with identical joint types get identical values
        let d = hamming(2);
        let a = d.eval_seqs(&[0, 0, 1, 1], &[0, 1, 0, 1], 2);
        let b = d.eval_seqs(&[1, 1, 0, 0], &[0, 1, 0, 1], 2);
        // same joint type up to reordering of positions
        let c = d.eval_seqs(&[0, 1, 0, 1], &[0, 0, 1, 1], 2);
        assert_abs_diff_eq!(a, c, epsilon = 1e-15);
        let _ = b;
    }
}
