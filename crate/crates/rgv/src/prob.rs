//! Probability primitives over finite alphabets: distributions, channels,
//! joint distributions, type descriptors, and the information quantities
//! (entropy, mutual information, conditional KL divergence) the exponent and
//! codebook machinery is built on.
//!
//! Alphabets are dense integer ranges `0..size`; symbol names, if any, live
//! in the CLI layer. All logarithms are natural, all information quantities
//! are in nats. Conventions: `0 log 0 = 0`, `0 log(0/0) = 0`, and
//! `p log(p/0) = +inf` for `p > 0` (an in-band value, not an error).

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;

/// Absolute tolerance for validating that probabilities sum to one.
pub const SUM_TOL: f64 = 1e-12;

fn check_probs(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what}: empty")));
    }
    for (i, &p) in v.iter().enumerate() {
        if !(p >= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is {p}"
            )));
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: sums to {sum}, expected 1 within {SUM_TOL}"
        )));
    }
    Ok(())
}

/// A probability mass function on the alphabet `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_probs(&p, "distribution")?;
        Ok(Self { p })
    }

    /// Uniform distribution on `0..size`.
    pub fn uniform(size: usize) -> Self {
        Self {
            p: vec![1.0 / size as f64; size],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, x: usize) -> f64 {
        self.p[x]
    }

    /// Support as the set of symbols with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&x| self.p[x] > 0.0).collect()
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.p)
    }
}

/// A discrete memoryless channel `W(y|x)`: one output distribution per input.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    w: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl Channel {
    /// Builds a channel from a row-major matrix; every row must be a
    /// distribution over the output alphabet.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("no rows".into()));
        }
        let ny = rows[0].len();
        let mut w = Vec::with_capacity(rows.len() * ny);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != ny {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {ny}",
                    row.len()
                )));
            }
            check_probs(row, &format!("channel row {x}"))
                .map_err(|e| Error::InvalidChannel(e.to_string()))?;
            w.extend_from_slice(row);
        }
        Ok(Self {
            w,
            nx: rows.len(),
            ny,
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.w[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.ny..(x + 1) * self.ny]
    }

    /// True when every transition probability is strictly positive.
    pub fn strictly_positive(&self) -> bool {
        self.w.iter().all(|&v| v > 0.0)
    }
}

/// A joint distribution on pairs over the same input alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct JointXX {
    p: Vec<f64>,
    nx: usize,
}

impl JointXX {
    pub fn new(p: Vec<f64>, nx: usize) -> Result<Self> {
        if p.len() != nx * nx {
            return Err(Error::InvalidDistribution(format!(
                "joint over {nx}x{nx} needs {} entries, got {}",
                nx * nx,
                p.len()
            )));
        }
        check_probs(&p, "joint (x, x')")?;
        Ok(Self { p, nx })
    }

    pub(crate) fn from_raw(p: Vec<f64>, nx: usize) -> Self {
        Self { p, nx }
    }

    pub fn product(p: &Distribution) -> Self {
        let nx = p.len();
        let mut v = vec![0.0; nx * nx];
        for a in 0..nx {
            for b in 0..nx {
                v[a * nx + b] = p.get(a) * p.get(b);
            }
        }
        Self { p: v, nx }
    }

    /// Joint with all mass on the diagonal, i.e. `X' = X` with `X ~ p`.
    pub fn diagonal(p: &Distribution) -> Self {
        let nx = p.len();
        let mut v = vec![0.0; nx * nx];
        for a in 0..nx {
            v[a * nx + a] = p.get(a);
        }
        Self { p: v, nx }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.nx + b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn transpose(&self) -> Self {
        let mut t = vec![0.0; self.p.len()];
        for a in 0..self.nx {
            for b in 0..self.nx {
                t[b * self.nx + a] = self.p[a * self.nx + b];
            }
        }
        Self { p: t, nx: self.nx }
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.nx];
        for a in 0..self.nx {
            for b in 0..self.nx {
                m[a] += self.p[a * self.nx + b];
            }
        }
        m
    }

    pub fn marginal_xt(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.nx];
        for a in 0..self.nx {
            for b in 0..self.nx {
                m[b] += self.p[a * self.nx + b];
            }
        }
        m
    }
}

/// A joint distribution over an input/output pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JointXY {
    p: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl JointXY {
    pub fn new(p: Vec<f64>, nx: usize, ny: usize) -> Result<Self> {
        if p.len() != nx * ny {
            return Err(Error::InvalidDistribution(format!(
                "joint over {nx}x{ny} needs {} entries, got {}",
                nx * ny,
                p.len()
            )));
        }
        check_probs(&p, "joint (x, y)")?;
        Ok(Self { p, nx, ny })
    }

    pub(crate) fn from_raw(p: Vec<f64>, nx: usize, ny: usize) -> Self {
        Self { p, nx, ny }
    }

    /// The joint `p(x) W(y|x)` induced by an input distribution and channel.
    pub fn input_channel(p: &Distribution, w: &Channel) -> Self {
        let (nx, ny) = (w.nx(), w.ny());
        let mut v = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                v[x * ny + y] = p.get(x) * w.get(x, y);
            }
        }
        Self { p: v, nx, ny }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.nx];
        for x in 0..self.nx {
            for y in 0..self.ny {
                m[x] += self.p[x * self.ny + y];
            }
        }
        m
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                m[y] += self.p[x * self.ny + y];
            }
        }
        m
    }
}

/// A joint distribution over `(X, X', Y)`: the transmitted input, a competing
/// input, and the channel output.
#[derive(Debug, Clone, PartialEq)]
pub struct JointXXY {
    v: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl JointXXY {
    pub fn new(v: Vec<f64>, nx: usize, ny: usize) -> Result<Self> {
        if v.len() != nx * nx * ny {
            return Err(Error::InvalidDistribution(format!(
                "tensor over {nx}x{nx}x{ny} needs {} entries, got {}",
                nx * nx * ny,
                v.len()
            )));
        }
        check_probs(&v, "joint (x, x', y)")?;
        Ok(Self { v, nx, ny })
    }

    pub(crate) fn from_raw(v: Vec<f64>, nx: usize, ny: usize) -> Self {
        Self { v, nx, ny }
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut v = vec![0.0; nx * nx * ny];
        for x in 0..nx {
            for xt in 0..nx {
                for y in 0..ny {
                    v[(x * nx + xt) * ny + y] = f(x, xt, y);
                }
            }
        }
        Self::new(v, nx, ny)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn get(&self, x: usize, xt: usize, y: usize) -> f64 {
        self.v[(x * self.nx + xt) * self.ny + y]
    }

    pub fn probs(&self) -> &[f64] {
        &self.v
    }

    pub fn marginal_xx(&self) -> JointXX {
        let mut m = vec![0.0; self.nx * self.nx];
        for x in 0..self.nx {
            for xt in 0..self.nx {
                for y in 0..self.ny {
                    m[x * self.nx + xt] += self.get(x, xt, y);
                }
            }
        }
        JointXX::from_raw(m, self.nx)
    }

    pub fn marginal_xy(&self) -> JointXY {
        let mut m = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for xt in 0..self.nx {
                for y in 0..self.ny {
                    m[x * self.ny + y] += self.get(x, xt, y);
                }
            }
        }
        JointXY::from_raw(m, self.nx, self.ny)
    }

    /// Marginal over the competing input and the output.
    pub fn marginal_xty(&self) -> JointXY {
        let mut m = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for xt in 0..self.nx {
                for y in 0..self.ny {
                    m[xt * self.ny + y] += self.get(x, xt, y);
                }
            }
        }
        JointXY::from_raw(m, self.nx, self.ny)
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.marginal_xy().marginal_x()
    }

    pub fn marginal_xt(&self) -> Vec<f64> {
        self.marginal_xty().marginal_x()
    }
}

/// The composition of a length-`n` sequence: symbol counts summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDescriptor {
    counts: Vec<usize>,
    n: usize,
}

impl TypeDescriptor {
    pub fn new(counts: Vec<usize>, n: usize) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total != n {
            return Err(Error::NoValidType(format!(
                "counts sum to {total}, expected n = {n}"
            )));
        }
        if n == 0 {
            return Err(Error::NoValidType("n must be at least 1".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// The empirical distribution `counts / n`.
    pub fn distribution(&self) -> Distribution {
        let n = self.n as f64;
        Distribution {
            p: self.counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }
}

/// Quantizes `p` to a type with denominator `n`, preserving the support and
/// keeping the max-norm distance to `p` at most `1/n`.
pub fn quantize_type(p: &Distribution, n: usize) -> Result<TypeDescriptor> {
    if n == 0 {
        return Err(Error::NoValidType("n must be at least 1".into()));
    }
    let nf = n as f64;
    let k = p.len();
    let mut lo = vec![0usize; k];
    let mut hi = vec![0usize; k];
    for i in 0..k {
        let target = nf * p.get(i);
        if p.get(i) == 0.0 {
            // same support both ways: zero mass stays zero
            lo[i] = 0;
            hi[i] = 0;
        } else {
            let l = (target - 1.0 - 1e-9).ceil().max(1.0);
            let h = (target + 1.0 + 1e-9).floor().min(nf);
            if l > h {
                return Err(Error::NoValidType(format!(
                    "no count within 1 of n*p for symbol {i}"
                )));
            }
            lo[i] = l as usize;
            hi[i] = h as usize;
        }
    }
    let lo_sum: usize = lo.iter().sum();
    let hi_sum: usize = hi.iter().sum();
    if lo_sum > n || hi_sum < n {
        return Err(Error::NoValidType(format!(
            "no type with denominator {n} lies within 1/n of p on its support"
        )));
    }

    let mut counts: Vec<usize> = (0..k)
        .map(|i| ((nf * p.get(i)).round() as usize).clamp(lo[i], hi[i]))
        .collect();
    // Repair the sum while staying inside the per-symbol brackets.
    loop {
        let total: usize = counts.iter().sum();
        match total.cmp(&n) {
            std::cmp::Ordering::Equal => break,
            std::cmp::Ordering::Greater => {
                let i = (0..k)
                    .filter(|&i| counts[i] > lo[i])
                    .max_by(|&a, &b| {
                        let da = counts[a] as f64 - nf * p.get(a);
                        let db = counts[b] as f64 - nf * p.get(b);
                        da.partial_cmp(&db).unwrap()
                    })
                    .expect("sum repair: bracket feasibility already checked");
                counts[i] -= 1;
            }
            std::cmp::Ordering::Less => {
                let i = (0..k)
                    .filter(|&i| counts[i] < hi[i])
                    .max_by(|&a, &b| {
                        let da = nf * p.get(a) - counts[a] as f64;
                        let db = nf * p.get(b) - counts[b] as f64;
                        da.partial_cmp(&db).unwrap()
                    })
                    .expect("sum repair: bracket feasibility already checked");
                counts[i] += 1;
            }
        }
    }

    let t = TypeDescriptor::new(counts, n)?;
    for i in 0..k {
        let dev = (t.counts[i] as f64 / nf - p.get(i)).abs();
        debug_assert!(dev <= 1.0 / nf + 1e-9);
    }
    Ok(t)
}

/// Exact multinomial coefficient `n! / prod_i counts[i]!`.
pub fn multinomial(n: usize, counts: &[usize]) -> BigUint {
    debug_assert_eq!(counts.iter().sum::<usize>(), n);
    let mut acc = BigUint::one();
    let mut remaining = n;
    for &c in counts {
        // multiply by C(remaining, c)
        for j in 0..c {
            acc *= BigUint::from(remaining - j);
            acc /= BigUint::from(j + 1);
        }
        remaining -= c;
    }
    acc
}

/// Natural log of `n!`, by direct summation.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Natural log of the multinomial coefficient.
pub fn ln_multinomial(n: usize, counts: &[usize]) -> f64 {
    ln_factorial(n) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
}

/// Exact size of the type class together with its natural log.
pub fn type_class_size(t: &TypeDescriptor) -> (BigUint, f64) {
    (
        multinomial(t.n(), t.counts()),
        ln_multinomial(t.n(), t.counts()),
    )
}

#[inline]
fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Shannon entropy of a nonnegative vector (treated as probabilities), nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&v| xlogx(v)).sum::<f64>()
}

/// One KL summand with the standard conventions.
#[inline]
pub fn kl_term(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// KL divergence between two probability vectors, `+inf` in-band.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| kl_term(a, b)).sum()
}

/// Conditional KL divergence `D(V_{Y|X} || W | P)` for a conditional given as
/// a channel-shaped matrix.
pub fn cond_kl(v: &Channel, p: &Distribution, w: &Channel) -> f64 {
    let mut acc = 0.0;
    for x in 0..w.nx() {
        let px = p.get(x);
        if px == 0.0 {
            continue;
        }
        for y in 0..w.ny() {
            acc += px * kl_term(v.get(x, y), w.get(x, y));
        }
    }
    acc
}

/// `D(V_{Y|X} || W | V_X)` read off a full joint tensor.
pub fn cond_kl_joint(v: &JointXXY, w: &Channel) -> f64 {
    let vxy = v.marginal_xy();
    let vx = vxy.marginal_x();
    let mut acc = 0.0;
    for x in 0..v.nx() {
        if vx[x] == 0.0 {
            continue;
        }
        for y in 0..v.ny() {
            acc += kl_term(vxy.get(x, y), vx[x] * w.get(x, y));
        }
    }
    acc
}

fn clamp_info(v: f64) -> f64 {
    if v < 0.0 && v > -1e-9 {
        0.0
    } else {
        v
    }
}

/// Mutual information `I(X'; X, Y)` of a joint tensor, nats.
pub fn mutual_info_xt_xy(v: &JointXXY) -> f64 {
    let h_xt = entropy(&v.marginal_xt());
    let h_xy = entropy(v.marginal_xy().probs());
    let h_all = entropy(v.probs());
    clamp_info(h_xt + h_xy - h_all)
}

/// Mutual information `I(X; X')` of a pair joint, nats.
pub fn mutual_info_xx(p: &JointXX) -> f64 {
    let h_x = entropy(&p.marginal_x());
    let h_xt = entropy(&p.marginal_xt());
    let h = entropy(p.probs());
    clamp_info(h_x + h_xt - h)
}

/// Mutual information `I(X; Y)` of an input/output joint, nats.
pub fn mutual_info_xy(p: &JointXY) -> f64 {
    let h_x = entropy(&p.marginal_x());
    let h_y = entropy(&p.marginal_y());
    let h = entropy(p.probs());
    clamp_info(h_x + h_y - h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_simplex(rng: &mut ChaCha20Rng, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        v
    }

    #[test]
    fn quantize_exact_type() {
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        let t = quantize_type(&p, 4).unwrap();
        assert_eq!(t.counts(), &[2, 2]);
    }

    #[test]
    fn quantize_degenerate_support() {
        let p = Distribution::new(vec![1.0, 0.0]).unwrap();
        let t = quantize_type(&p, 5).unwrap();
        assert_eq!(t.counts(), &[5, 0]);
    }

    #[test]
    fn quantize_matches_exhaustive_search() {
        // Oracle: enumerate every composition of n = 4 into 2 parts and keep
        // those within max-norm 1/n of p with the same support.
        let p = Distribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let n = 4usize;
        let ok: Vec<[usize; 2]> = (0..=n)
            .map(|c0| [c0, n - c0])
            .filter(|c| {
                c.iter().zip(p.probs()).all(|(&ci, &pi)| {
                    let same_support = (ci > 0) == (pi > 0.0);
                    same_support && (ci as f64 / n as f64 - pi).abs() <= 1.0 / n as f64 + 1e-12
                })
            })
            .collect();
        assert!(!ok.is_empty());
        let t = quantize_type(&p, n).unwrap();
        assert!(ok.contains(&[t.counts()[0], t.counts()[1]]));
    }

    #[test]
    fn quantize_infeasible() {
        let p = Distribution::new(vec![0.94, 0.03, 0.03]).unwrap();
        assert!(quantize_type(&p, 2).is_err());
        // n = 4 admits no type within 1/4 of p that keeps all three symbols
        assert!(quantize_type(&p, 4).is_err());
    }

    #[test]
    fn type_class_sizes() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let (size, log) = type_class_size(&t);
        assert_eq!(size, BigUint::from(6u32));
        assert_abs_diff_eq!(log, 6.0f64.ln(), epsilon = 1e-12);

        let t = TypeDescriptor::new(vec![2, 4], 6).unwrap();
        assert_eq!(type_class_size(&t).0, BigUint::from(15u32));

        let t = TypeDescriptor::new(vec![5, 0], 5).unwrap();
        assert_eq!(type_class_size(&t).0, BigUint::from(1u32));
    }

    #[test]
    fn cond_kl_identity_is_zero() {
        let w = Channel::bsc(0.3).unwrap();
        let p = Distribution::uniform(2);
        assert_abs_diff_eq!(cond_kl(&w, &p, &w), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cond_kl_ignores_zero_mass_rows() {
        let w = Channel::bsc(0.1).unwrap();
        let v = Channel::new(vec![vec![0.7, 0.3], vec![0.0, 1.0]]).unwrap();
        let p = Distribution::new(vec![1.0, 0.0]).unwrap();
        let expect = 0.7 * (0.7f64 / 0.9).ln() + 0.3 * (0.3f64 / 0.1).ln();
        assert_abs_diff_eq!(cond_kl(&v, &p, &w), expect, epsilon = 1e-12);
    }

    #[test]
    fn cond_kl_bsc_hand_value() {
        let w = Channel::bsc(0.1).unwrap();
        let v = Channel::bsc(0.2).unwrap();
        let p = Distribution::uniform(2);
        let expect = 0.2 * (0.2f64 / 0.1).ln() + 0.8 * (0.8f64 / 0.9).ln();
        assert_abs_diff_eq!(cond_kl(&v, &p, &w), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(cond_kl(&v, &p, &w), 0.0444, epsilon = 5e-4);
    }

    #[test]
    fn mi_independent_is_zero() {
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        let w = Channel::bsc(0.1).unwrap();
        let pxy = JointXY::input_channel(&p, &w);
        let v = JointXXY::from_fn(2, 2, |x, xt, y| pxy.get(x, y) * p.get(xt)).unwrap();
        assert_abs_diff_eq!(mutual_info_xt_xy(&v), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mi_chain_rule_on_deterministic_copy() {
        // X' = X deterministically, Y noiseless copy of X, X uniform binary:
        // I(X'; X, Y) = I(X'; X) + I(X'; Y | X) = H(X) + 0 = log 2.
        let v =
            JointXXY::from_fn(2, 2, |x, xt, y| if x == xt && y == x { 0.5 } else { 0.0 }).unwrap();
        assert_abs_diff_eq!(mutual_info_xt_xy(&v), 2.0f64.ln(), epsilon = 1e-12);
    }

    // Independent oracle: mutual information as an explicit KL sum rather
    // than an entropy difference.
    fn mi_xt_xy_oracle(v: &JointXXY) -> f64 {
        let xt = v.marginal_xt();
        let xy = v.marginal_xy();
        let mut acc = 0.0;
        for x in 0..v.nx() {
            for t in 0..v.nx() {
                for y in 0..v.ny() {
                    acc += kl_term(v.get(x, t, y), xt[t] * xy.get(x, y));
                }
            }
        }
        acc
    }

    #[test]
    fn mi_matches_kl_oracle_on_random_tensors() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = JointXXY::new(random_simplex(&mut rng, 8), 2, 2).unwrap();
            assert_abs_diff_eq!(mutual_info_xt_xy(&v), mi_xt_xy_oracle(&v), epsilon = 1e-12);
            assert!(mutual_info_xt_xy(&v) >= 0.0);
        }
    }

    #[test]
    fn mi_xx_examples_and_oracle() {
        let p = Distribution::new(vec![0.4, 0.6]).unwrap();
        assert_abs_diff_eq!(mutual_info_xx(&JointXX::product(&p)), 0.0, epsilon = 1e-12);
        let u = Distribution::uniform(2);
        assert_abs_diff_eq!(
            mutual_info_xx(&JointXX::diagonal(&u)),
            2.0f64.ln(),
            epsilon = 1e-12
        );
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let j = JointXX::new(random_simplex(&mut rng, 9), 3).unwrap();
            let h = entropy(&j.marginal_x()) + entropy(&j.marginal_xt()) - entropy(j.probs());
            assert_abs_diff_eq!(mutual_info_xx(&j), h.max(0.0), epsilon = 1e-12);
            assert!(mutual_info_xx(&j) >= 0.0);
        }
    }

    #[test]
    fn cond_kl_positive_unless_equal() {
        let w = Channel::bsc(0.2).unwrap();
        let p = Distribution::uniform(2);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a: f64 = rng.gen_range(0.01..0.99);
            let b: f64 = rng.gen_range(0.01..0.99);
            let v = Channel::new(vec![vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap();
            let d = cond_kl(&v, &p, &w);
            assert!(d >= 0.0);
            if (a - 0.2).abs() > 1e-6 || (b - 0.2).abs() > 1e-6 {
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn distribution_rejects_bad_input() {
        assert!(Distribution::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-14]).is_ok());
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v = random_simplex(&mut rng, 4);
            assert!(Distribution::new(v).is_ok());
        }
    }

    #[test]
    fn joint_xxy_marginals_consistent() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let v = JointXXY::new(random_simplex(&mut rng, 12), 2, 3).unwrap();
        let sx: f64 = v.marginal_x().iter().sum();
        assert_abs_diff_eq!(sx, 1.0, epsilon = 1e-12);
        let xx = v.marginal_xx();
        assert_abs_diff_eq!(xx.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        for x in 0..2 {
            assert_abs_diff_eq!(xx.marginal_x()[x], v.marginal_x()[x], epsilon = 1e-12);
        }
    }
}
