//! The recursive minimum-distance codebook construction at small blocklength,
//! its cost-constrained (shell) variant, and exact enumeration oracles for
//! the construction's distributional properties.
//!
//! Codewords live in one type class. Each new word is drawn uniformly from
//! the sequences at distance greater than `delta_cap` from every previous
//! word; the packing condition checked at configuration time guarantees the
//! candidate set never empties.

use crate::distance::DistanceFn;
use crate::error::{Error, Result};
use crate::prob::{multinomial, type_class_size, Distribution, TypeDescriptor};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Deterministic per-stream generator: every randomized routine in the crate
/// derives its generator from a `(seed, stream)` pair this way, so results
/// are reproducible regardless of thread count.
pub(crate) fn derive_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&stream.to_le_bytes());
    bytes[16..24].copy_from_slice(b"rgv-code");
    bytes[24..32].copy_from_slice(&(seed ^ stream.rotate_left(17)).to_le_bytes());
    ChaCha20Rng::from_seed(bytes)
}

/// `e^{-n delta} / (1 - e^{-n delta})`, the slack constant of the
/// finite-blocklength brackets. Infinite when `delta = 0`.
pub fn delta_n(n: usize, delta: f64) -> f64 {
    let e = (-(n as f64) * delta).exp();
    if e >= 1.0 {
        f64::INFINITY
    } else {
        e / (1.0 - e)
    }
}

/// Natural log of a big integer (`-inf` for zero).
pub(crate) fn ln_biguint(b: &BigUint) -> f64 {
    if b.is_zero() {
        return f64::NEG_INFINITY;
    }
    if let Some(f) = b.to_f64() {
        if f.is_finite() {
            return f.ln();
        }
    }
    let bits = b.bits();
    let shift = bits - 52;
    let top = (b >> shift).to_u64().expect("52 bits fit in u64");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// Shared enumeration machinery
// ---------------------------------------------------------------------------

/// Enumerates every nonnegative integer table with the given row sums whose
/// column totals, aggregated by `group_of_col`, equal `group_budget`.
/// The visitor sees the row-major table. Guarded against blow-up.
pub(crate) fn for_each_table(
    row_sums: &[usize],
    ncols: usize,
    group_of_col: &[usize],
    group_budget: &[usize],
    guard: usize,
    visitor: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    let nrows = row_sums.len();
    let mut table = vec![0usize; nrows * ncols];
    let mut budget = group_budget.to_vec();
    let mut visits = 0usize;

    fn recurse(
        row_sums: &[usize],
        ncols: usize,
        group_of_col: &[usize],
        budget: &mut [usize],
        table: &mut [usize],
        row: usize,
        col: usize,
        row_left: usize,
        visits: &mut usize,
        guard: usize,
        visitor: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        let nrows = row_sums.len();
        if row == nrows {
            if budget.iter().all(|&b| b == 0) {
                *visits += 1;
                if *visits > guard {
                    return Err(Error::GuardExceeded(format!(
                        "table enumeration exceeded {guard} visits"
                    )));
                }
                visitor(table);
            }
            return Ok(());
        }
        if col == ncols - 1 {
            let g = group_of_col[col];
            if budget[g] >= row_left {
                table[row * ncols + col] = row_left;
                budget[g] -= row_left;
                recurse(
                    row_sums,
                    ncols,
                    group_of_col,
                    budget,
                    table,
                    row + 1,
                    0,
                    if row + 1 < nrows {
                        row_sums[row + 1]
                    } else {
                        0
                    },
                    visits,
                    guard,
                    visitor,
                )?;
                budget[g] += row_left;
                table[row * ncols + col] = 0;
            }
            return Ok(());
        }
        let g = group_of_col[col];
        let hi = row_left.min(budget[g]);
        for v in 0..=hi {
            table[row * ncols + col] = v;
            budget[g] -= v;
            recurse(
                row_sums,
                ncols,
                group_of_col,
                budget,
                table,
                row,
                col + 1,
                row_left - v,
                visits,
                guard,
                visitor,
            )?;
            budget[g] += v;
            table[row * ncols + col] = 0;
        }
        Ok(())
    }

    let first_left = if nrows > 0 { row_sums[0] } else { 0 };
    recurse(
        row_sums,
        ncols,
        group_of_col,
        &mut budget,
        &mut table,
        0,
        0,
        first_left,
        &mut visits,
        guard,
        visitor,
    )
}

/// Next lexicographic permutation in place; `false` once exhausted.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Materializes the full type class in lexicographic order.
pub fn enumerate_type_class(t: &TypeDescriptor, limit: usize) -> Result<Vec<Vec<usize>>> {
    let (size, _) = type_class_size(t);
    let size = size
        .to_usize()
        .filter(|&s| s <= limit)
        .ok_or_else(|| Error::GuardExceeded(format!("type class larger than {limit}")))?;
    let mut seq: Vec<usize> = Vec::with_capacity(t.n());
    for (sym, &c) in t.counts().iter().enumerate() {
        seq.extend(std::iter::repeat(sym).take(c));
    }
    let mut out = Vec::with_capacity(size);
    loop {
        out.push(seq.clone());
        if !next_permutation(&mut seq) {
            break;
        }
    }
    debug_assert_eq!(out.len(), size);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Volume and packing
// ---------------------------------------------------------------------------

const ENUM_GUARD: usize = 10_000_000;

/// Exact ball volume: the number of same-type sequences at distance at most
/// `delta_cap` from a representative. The value does not depend on the
/// representative (distances are type-dependent and symmetric); for the
/// sequence-enumeration path this is asserted on two representatives.
pub fn volume(t: &TypeDescriptor, d: &DistanceFn, delta_cap: f64) -> Result<BigUint> {
    let n = t.n();
    let counts = t.counts();
    let k = counts.len();
    if d.is_additive() {
        // count conditional types: tables with row sums = counts (positions of
        // the representative) and column sums = counts (the candidate's type)
        let mut total = BigUint::zero();
        let group_of_col: Vec<usize> = (0..k).collect();
        for_each_table(counts, k, &group_of_col, counts, ENUM_GUARD, &mut |tab| {
            if d.eval_counts(tab, k, n) <= delta_cap {
                let mut ways = BigUint::from(1u32);
                for a in 0..k {
                    ways *= multinomial(counts[a], &tab[a * k..(a + 1) * k]);
                }
                total += ways;
            }
        })?;
        return Ok(total);
    }
    // type-dependent distance: enumerate sequences against two representatives
    let class = enumerate_type_class(t, ENUM_GUARD)?;
    let rep_a = &class[0];
    let rep_b = class.last().unwrap();
    let count_against = |rep: &Vec<usize>| -> BigUint {
        let mut c = BigUint::zero();
        for cand in &class {
            if d.eval_seqs(cand, rep, k) <= delta_cap + 1e-12 {
                c += BigUint::from(1u32);
            }
        }
        c
    };
    let va = count_against(rep_a);
    if rep_a != rep_b {
        let vb = count_against(rep_b);
        debug_assert_eq!(va, vb, "ball volume must not depend on the center");
    }
    Ok(va)
}

/// Exact packing-condition report: `m e^{n delta} vol <= |T(P_n)|`.
#[derive(Debug, Clone)]
pub struct PackingReport {
    pub holds: bool,
    pub volume: BigUint,
    pub class_size: BigUint,
    /// `ln |T| - (ln m + n delta + ln vol)`; positive slack means it holds.
    pub log_slack: f64,
}

pub fn check_packing(
    t: &TypeDescriptor,
    m: usize,
    d: &DistanceFn,
    delta_cap: f64,
    delta: f64,
) -> Result<PackingReport> {
    let vol = volume(t, d, delta_cap)?;
    let (size, ln_size) = type_class_size(t);
    if vol.is_zero() {
        return Ok(PackingReport {
            holds: true,
            volume: vol,
            class_size: size,
            log_slack: f64::INFINITY,
        });
    }
    let lhs = (m as f64).ln() + t.n() as f64 * delta + ln_biguint(&vol);
    let log_slack = ln_size - lhs;
    Ok(PackingReport {
        holds: log_slack >= -1e-12,
        volume: vol,
        class_size: size,
        log_slack,
    })
}

// ---------------------------------------------------------------------------
// Configuration and generation
// ---------------------------------------------------------------------------

/// Parameters of the recursive construction. Validated at creation: the
/// distance must carry the symmetric flag and the packing condition must
/// hold exactly.
#[derive(Debug, Clone)]
pub struct RgvConfig {
    t: TypeDescriptor,
    m: usize,
    d: DistanceFn,
    delta_cap: f64,
    delta: f64,
    ln_class_size: f64,
    class_size: BigUint,
}

impl RgvConfig {
    pub fn new(
        t: TypeDescriptor,
        m: usize,
        d: DistanceFn,
        delta_cap: f64,
        delta: f64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("need at least one message".into()));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidConfig("delta must be nonnegative".into()));
        }
        if !d.is_symmetric() {
            return Err(Error::AsymmetricDistance(
                "the construction's guarantees assume a symmetric distance".into(),
            ));
        }
        let report = check_packing(&t, m, &d, delta_cap, delta)?;
        if !report.holds {
            return Err(Error::PackingViolated(format!(
                "m e^(n delta) vol exceeds |T| by e^{:.4}",
                -report.log_slack
            )));
        }
        let (class_size, ln_class_size) = type_class_size(&t);
        Ok(Self {
            t,
            m,
            d,
            delta_cap,
            delta,
            ln_class_size,
            class_size,
        })
    }

    pub fn t(&self) -> &TypeDescriptor {
        &self.t
    }
    pub fn n(&self) -> usize {
        self.t.n()
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn alphabet_size(&self) -> usize {
        self.t.alphabet_size()
    }
    pub fn d(&self) -> &DistanceFn {
        &self.d
    }
    pub fn delta_cap(&self) -> f64 {
        self.delta_cap
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn rate(&self) -> f64 {
        (self.m as f64).ln() / self.n() as f64
    }
    pub fn class_size(&self) -> &BigUint {
        &self.class_size
    }
    pub fn ln_class_size(&self) -> f64 {
        self.ln_class_size
    }

    fn template(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.n());
        for (sym, &c) in self.t.counts().iter().enumerate() {
            seq.extend(std::iter::repeat(sym).take(c));
        }
        seq
    }
}

/// A realized codebook: ordered constant-composition words, pairwise distance
/// strictly above the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    words: Vec<Vec<usize>>,
    alphabet_size: usize,
    seed: u64,
}

impl Codebook {
    pub(crate) fn from_words(words: Vec<Vec<usize>>, alphabet_size: usize, seed: u64) -> Self {
        Self {
            words,
            alphabet_size,
            seed,
        }
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn n(&self) -> usize {
        self.words.first().map(|w| w.len()).unwrap_or(0)
    }
    pub fn m(&self) -> usize {
        self.words.len()
    }

    /// Plain-text form: header `n m |X| seed`, one word per line as space
    /// separated symbol indices.
    pub fn serialize(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.n(),
            self.m(),
            self.alphabet_size,
            self.seed
        );
        for w in &self.words {
            let row: Vec<String> = w.iter().map(|s| s.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty codebook file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::InvalidConfig(
                "codebook header must be `n m |X| seed`".into(),
            ));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::InvalidConfig("bad n in header".into()))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| Error::InvalidConfig("bad m in header".into()))?;
        let alphabet_size: usize = fields[2]
            .parse()
            .map_err(|_| Error::InvalidConfig("bad |X| in header".into()))?;
        let seed: u64 = fields[3]
            .parse()
            .map_err(|_| Error::InvalidConfig("bad seed in header".into()))?;
        let mut words = Vec::with_capacity(m);
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let w: std::result::Result<Vec<usize>, _> =
                line.split_whitespace().map(|s| s.parse()).collect();
            let w = w.map_err(|_| Error::InvalidConfig(format!("bad symbol on line {}", i + 2)))?;
            if w.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "word {} has length {}, expected {n}",
                    i + 1,
                    w.len()
                )));
            }
            if w.iter().any(|&s| s >= alphabet_size) {
                return Err(Error::InvalidConfig(format!(
                    "word {} has a symbol outside the alphabet",
                    i + 1
                )));
            }
            words.push(w);
        }
        if words.len() != m {
            return Err(Error::InvalidConfig(format!(
                "expected {m} words, found {}",
                words.len()
            )));
        }
        Ok(Self {
            words,
            alphabet_size,
            seed,
        })
    }
}

const LIVE_SET_LIMIT: usize = 1_000_000;

/// Draws a codebook by the exact recursive law, deterministically from the
/// seed. Small type classes use an explicit live candidate set with
/// incremental deletion; larger ones rejection-sample uniform type-class
/// permutations, which realizes the same per-step uniform law.
pub fn generate(cfg: &RgvConfig, seed: u64) -> Result<Codebook> {
    let mut rng = derive_rng(seed, 0);
    let words = if cfg
        .class_size
        .to_usize()
        .map(|s| s <= LIVE_SET_LIMIT)
        .unwrap_or(false)
    {
        let class = enumerate_type_class(cfg.t(), LIVE_SET_LIMIT)?;
        generate_live_set(cfg, &class, &mut rng)?
    } else {
        sample_rejection(cfg, &mut rng)?
    };
    Ok(Codebook {
        words,
        alphabet_size: cfg.alphabet_size(),
        seed,
    })
}

fn generate_live_set(
    cfg: &RgvConfig,
    class: &[Vec<usize>],
    rng: &mut ChaCha20Rng,
) -> Result<Vec<Vec<usize>>> {
    let nx = cfg.alphabet_size();
    let mut live: Vec<usize> = (0..class.len()).collect();
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(cfg.m());
    for _ in 0..cfg.m() {
        if live.is_empty() {
            return Err(Error::PackingViolated(
                "candidate set exhausted despite the packing condition".into(),
            ));
        }
        let pick = live[rng.gen_range(0..live.len())];
        let word = class[pick].clone();
        live.retain(|&i| cfg.d.eval_seqs(&class[i], &word, nx) > cfg.delta_cap);
        words.push(word);
    }
    Ok(words)
}

/// Rejection path shared with the Monte Carlo driver.
pub(crate) fn sample_rejection(cfg: &RgvConfig, rng: &mut ChaCha20Rng) -> Result<Vec<Vec<usize>>> {
    let nx = cfg.alphabet_size();
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(cfg.m());
    let mut buf = cfg.template();
    for _ in 0..cfg.m() {
        let mut attempts = 0usize;
        loop {
            attempts += 1;
            if attempts > 200_000 {
                return Err(Error::SamplerStalled(
                    "rejection sampler exceeded 200000 attempts per word".into(),
                ));
            }
            // Fisher-Yates on the multiset template: uniform over the class
            for i in (1..buf.len()).rev() {
                let j = rng.gen_range(0..=i);
                buf.swap(i, j);
            }
            if words
                .iter()
                .all(|w| cfg.d.eval_seqs(&buf, w, nx) > cfg.delta_cap)
            {
                words.push(buf.clone());
                break;
            }
        }
    }
    Ok(words)
}

// ---------------------------------------------------------------------------
// Exact tuple law and lemma oracles
// ---------------------------------------------------------------------------

/// The exact joint law of the full ordered codeword tuple, over indices into
/// the materialized type class.
#[derive(Debug, Clone)]
pub struct TupleLaw {
    pub class: Vec<Vec<usize>>,
    pub tuples: Vec<(Vec<u32>, f64)>,
}

impl TupleLaw {
    pub fn total(&self) -> f64 {
        self.tuples.iter().map(|(_, p)| p).sum()
    }

    pub fn single_marginal(&self, word: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.class.len()];
        for (tuple, p) in &self.tuples {
            m[tuple[word] as usize] += p;
        }
        m
    }

    /// Joint of words `k` and `m` (`k < m`), flattened over class indices.
    pub fn pair_marginal(&self, k: usize, m: usize) -> Vec<f64> {
        let s = self.class.len();
        let mut out = vec![0.0; s * s];
        for (tuple, p) in &self.tuples {
            out[tuple[k] as usize * s + tuple[m] as usize] += p;
        }
        out
    }

    pub fn triple_marginal(&self, i: usize, j: usize, k: usize) -> Vec<f64> {
        let s = self.class.len();
        let mut out = vec![0.0; s * s * s];
        for (tuple, p) in &self.tuples {
            out[(tuple[i] as usize * s + tuple[j] as usize) * s + tuple[k] as usize] += p;
        }
        out
    }
}

/// Enumerates the exact probability of every ordered codeword tuple under the
/// recursive law. Guarded to tiny instances.
pub fn exact_tuple_law(cfg: &RgvConfig) -> Result<TupleLaw> {
    let size = cfg
        .class_size
        .to_usize()
        .ok_or_else(|| Error::GuardExceeded("type class too large to enumerate".into()))?;
    let total = size
        .checked_pow(cfg.m() as u32)
        .filter(|&t| t <= ENUM_GUARD)
        .ok_or_else(|| {
            Error::GuardExceeded(format!("|T|^m = {size}^{} exceeds the guard", cfg.m()))
        })?;
    let _ = total;
    let class = enumerate_type_class(cfg.t(), ENUM_GUARD)?;
    let nx = cfg.alphabet_size();
    // pairwise admissibility between class members
    let admissible: Vec<Vec<bool>> = class
        .iter()
        .map(|a| {
            class
                .iter()
                .map(|b| cfg.d.eval_seqs(a, b, nx) > cfg.delta_cap)
                .collect()
        })
        .collect();

    let mut tuples = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(cfg.m());
    let mut live: Vec<bool> = vec![true; size];

    fn recurse(
        cfg: &RgvConfig,
        admissible: &[Vec<bool>],
        live: &mut Vec<bool>,
        current: &mut Vec<u32>,
        prob: f64,
        tuples: &mut Vec<(Vec<u32>, f64)>,
    ) {
        if current.len() == cfg.m() {
            tuples.push((current.clone(), prob));
            return;
        }
        let count = live.iter().filter(|&&b| b).count();
        if count == 0 {
            return;
        }
        let step = prob / count as f64;
        let candidates: Vec<usize> = (0..live.len()).filter(|&i| live[i]).collect();
        for &i in &candidates {
            let removed: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&j| live[j] && !admissible[i][j])
                .collect();
            for &j in &removed {
                live[j] = false;
            }
            current.push(i as u32);
            recurse(cfg, admissible, live, current, step, tuples);
            current.pop();
            for &j in &removed {
                live[j] = true;
            }
        }
    }

    recurse(cfg, &admissible, &mut live, &mut current, 1.0, &mut tuples);
    Ok(TupleLaw { class, tuples })
}

/// One oracle check outcome.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Candidate-set size bracket along every reachable prefix:
/// `(1 - e^{-n delta}) |T| <= |T(P_n, prefix)| <= |T|`.
pub fn lemma1_check(cfg: &RgvConfig) -> Result<LemmaReport> {
    let class = enumerate_type_class(cfg.t(), ENUM_GUARD)?;
    let size = class.len();
    if size.pow(cfg.m() as u32 - 1) > 1_000_000 {
        return Err(Error::GuardExceeded(
            "too many prefixes to enumerate".into(),
        ));
    }
    let nx = cfg.alphabet_size();
    let lower = (1.0 - (-(cfg.n() as f64) * cfg.delta()).exp()) * size as f64;
    let mut pass = true;

    fn recurse(
        cfg: &RgvConfig,
        class: &[Vec<usize>],
        nx: usize,
        prefix: &mut Vec<usize>,
        live: &mut Vec<bool>,
        lower: f64,
        pass: &mut bool,
        worst: &mut f64,
    ) {
        let count = live.iter().filter(|&&b| b).count();
        *worst = worst.min(count as f64);
        if (count as f64) < lower - 1e-9 || count > class.len() {
            *pass = false;
        }
        if prefix.len() + 1 >= cfg.m() {
            return;
        }
        let candidates: Vec<usize> = (0..live.len()).filter(|&i| live[i]).collect();
        for &i in &candidates {
            let removed: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&j| {
                    live[j] && cfg.d().eval_seqs(&class[j], &class[i], nx) <= cfg.delta_cap()
                })
                .collect();
            for &j in &removed {
                live[j] = false;
            }
            prefix.push(i);
            recurse(cfg, class, nx, prefix, live, lower, pass, worst);
            prefix.pop();
            for &j in &removed {
                live[j] = true;
            }
        }
    }

    let mut live = vec![true; size];
    let mut prefix = Vec::new();
    let mut worst_count = f64::INFINITY;
    recurse(
        cfg,
        &class,
        nx,
        &mut prefix,
        &mut live,
        lower,
        &mut pass,
        &mut worst_count,
    );
    Ok(LemmaReport {
        name: "candidate-set bracket".into(),
        pass,
        detail: format!(
            "|T| = {size}, lower bound {:.4}, smallest reachable candidate set {}",
            lower, worst_count
        ),
    })
}

/// Pairwise-marginal bracket: zero exactly on pairs at distance <= threshold,
/// otherwise within the tracked-constant bracket around `1/|T|^2`.
pub fn lemma2_check(cfg: &RgvConfig) -> Result<LemmaReport> {
    let law = exact_tuple_law(cfg)?;
    let size = law.class.len();
    let nx = cfg.alphabet_size();
    let dn = delta_n(cfg.n(), cfg.delta());
    let base = 1.0 / (size as f64 * size as f64);
    let lower = if dn.is_finite() {
        (1.0 - 4.0 * dn * dn) * (-2.0 * dn).exp() * base
    } else {
        f64::NEG_INFINITY
    };
    let e = (-(cfg.n() as f64) * cfg.delta()).exp();
    let upper = if e < 1.0 {
        base / ((1.0 - e) * (1.0 - e))
    } else {
        f64::INFINITY
    };
    let mut pass = true;
    let mut detail = String::new();
    for k in 0..cfg.m() {
        for m in (k + 1)..cfg.m() {
            let joint = law.pair_marginal(k, m);
            for a in 0..size {
                for b in 0..size {
                    let p = joint[a * size + b];
                    let dist = cfg.d().eval_seqs(&law.class[a], &law.class[b], nx);
                    if dist <= cfg.delta_cap() {
                        if p != 0.0 {
                            pass = false;
                            detail = format!("nonzero mass {p} on a forbidden pair");
                        }
                    } else if p < lower - 1e-12 || p > upper + 1e-12 {
                        pass = false;
                        detail = format!("pair mass {p} outside [{lower}, {upper}]");
                    }
                }
            }
        }
    }
    Ok(LemmaReport {
        name: "pairwise-marginal bracket".into(),
        pass,
        detail: if detail.is_empty() {
            format!("bracket [{lower:.3e}, {upper:.3e}] around {base:.3e}")
        } else {
            detail
        },
    })
}

/// Triple-marginal upper bound plus the zero-mass/distance-violation
/// equivalence.
pub fn lemma3_check(cfg: &RgvConfig) -> Result<LemmaReport> {
    if cfg.m() < 3 {
        return Err(Error::InvalidConfig("need at least three words".into()));
    }
    let law = exact_tuple_law(cfg)?;
    let size = law.class.len();
    let nx = cfg.alphabet_size();
    let e = (-(cfg.n() as f64) * cfg.delta()).exp();
    let upper = if e < 1.0 {
        1.0 / ((1.0 - e).powi(3) * (size as f64).powi(3))
    } else {
        f64::INFINITY
    };
    let mut pass = true;
    let mut detail = String::new();
    for i in 0..cfg.m() {
        for j in (i + 1)..cfg.m() {
            for k in (j + 1)..cfg.m() {
                let joint = law.triple_marginal(i, j, k);
                for a in 0..size {
                    for b in 0..size {
                        for c in 0..size {
                            let p = joint[(a * size + b) * size + c];
                            let dmin = cfg
                                .d()
                                .eval_seqs(&law.class[a], &law.class[b], nx)
                                .min(cfg.d().eval_seqs(&law.class[a], &law.class[c], nx))
                                .min(cfg.d().eval_seqs(&law.class[b], &law.class[c], nx));
                            if dmin > cfg.delta_cap() {
                                if p > upper + 1e-12 {
                                    pass = false;
                                    detail = format!("triple mass {p} above bound {upper}");
                                }
                                // zero probability only at distance
                                // violations: admissible triples are reachable
                                if p == 0.0 {
                                    pass = false;
                                    detail = "admissible triple with zero mass".into();
                                }
                            } else if p != 0.0 {
                                pass = false;
                                detail = "mass on a distance-violating triple".into();
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(LemmaReport {
        name: "triple-marginal bound".into(),
        pass,
        detail: if detail.is_empty() {
            format!("bound {upper:.3e}")
        } else {
            detail
        },
    })
}

/// Per-word marginals are exactly uniform over the type class.
pub fn lemma4_check(cfg: &RgvConfig) -> Result<LemmaReport> {
    let law = exact_tuple_law(cfg)?;
    let size = law.class.len();
    let expect = 1.0 / size as f64;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for word in 0..cfg.m() {
        for p in law.single_marginal(word) {
            worst = worst.max((p - expect).abs());
            if (p - expect).abs() > 1e-12 {
                pass = false;
            }
        }
    }
    Ok(LemmaReport {
        name: "uniform single-word marginals".into(),
        pass,
        detail: format!("max deviation from 1/|T| is {worst:.3e}"),
    })
}

// ---------------------------------------------------------------------------
// Cost-constrained construction
// ---------------------------------------------------------------------------

/// Parameters of the cost-constrained (shell) construction: proposals are
/// i.i.d. `P` conditioned on every auxiliary cost's empirical mean lying
/// within `eps` of its expectation.
#[derive(Debug, Clone)]
pub struct CostConfig {
    n: usize,
    m: usize,
    p: Distribution,
    aux_costs: Vec<Vec<f64>>,
    eps: f64,
    d: DistanceFn,
    delta_cap: f64,
    delta: f64,
}

impl CostConfig {
    pub fn new(
        n: usize,
        m: usize,
        p: Distribution,
        aux_costs: Vec<Vec<f64>>,
        eps: f64,
        d: DistanceFn,
        delta_cap: f64,
        delta: f64,
    ) -> Result<Self> {
        if aux_costs.len() > 4 {
            return Err(Error::InvalidConfig("at most four auxiliary costs".into()));
        }
        for (j, a) in aux_costs.iter().enumerate() {
            if a.len() != p.len() {
                return Err(Error::InvalidConfig(format!(
                    "auxiliary cost {j} has wrong length"
                )));
            }
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if !d.is_additive() {
            return Err(Error::Unsupported(
                "cost-constrained construction needs an additive distance".into(),
            ));
        }
        let rate = (m as f64).ln() / n as f64;
        let rl = crate::dual::rate_limit_dual(&p, &d, delta_cap, delta)?;
        if rate > rl.raw {
            return Err(Error::RateConditionViolated(format!(
                "rate {rate} exceeds the permitted {}",
                rl.raw
            )));
        }
        Ok(Self {
            n,
            m,
            p,
            aux_costs,
            eps,
            d,
            delta_cap,
            delta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> &Distribution {
        &self.p
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn d(&self) -> &DistanceFn {
        &self.d
    }
    pub fn delta_cap(&self) -> f64 {
        self.delta_cap
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn aux_costs(&self) -> &[Vec<f64>] {
        &self.aux_costs
    }

    fn phis(&self) -> Vec<f64> {
        self.aux_costs
            .iter()
            .map(|a| self.p.probs().iter().zip(a).map(|(&pi, &ai)| pi * ai).sum())
            .collect()
    }

    /// True when the sequence lies in every cost shell.
    pub fn in_shell(&self, x: &[usize]) -> bool {
        let phis = self.phis();
        for (a, &phi) in self.aux_costs.iter().zip(&phis) {
            let mean: f64 = x.iter().map(|&s| a[s]).sum::<f64>() / self.n as f64;
            if (mean - phi).abs() > self.eps + 1e-12 {
                return false;
            }
        }
        true
    }
}

/// Statistics from one cost-constrained generation run.
#[derive(Debug, Clone)]
pub struct CostGenStats {
    /// Fraction of raw i.i.d. proposals that landed in the shell.
    pub shell_acceptance: f64,
    /// Per-word fraction of shell proposals that cleared the distance checks.
    pub mu_estimates: Vec<f64>,
}

fn sample_iid(p: &Distribution, n: usize, rng: &mut ChaCha20Rng) -> Vec<usize> {
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut sym = p.len() - 1;
        for (i, &pi) in p.probs().iter().enumerate() {
            acc += pi;
            if u < acc {
                sym = i;
                break;
            }
        }
        x.push(sym);
    }
    x
}

/// Draws one shell proposal (i.i.d. conditioned on the shells).
pub fn sample_shell(cfg: &CostConfig, rng: &mut ChaCha20Rng) -> Result<Vec<usize>> {
    for _ in 0..1_000_000 {
        let x = sample_iid(&cfg.p, cfg.n, rng);
        if cfg.in_shell(&x) {
            return Ok(x);
        }
    }
    Err(Error::SamplerStalled(
        "shell acceptance appears to be below 1e-6".into(),
    ))
}

/// Cost-constrained recursive generation: shell proposals accepted when they
/// clear the distance threshold to every previous word.
pub fn cost_generate(cfg: &CostConfig, seed: u64) -> Result<(Codebook, CostGenStats)> {
    let mut rng = derive_rng(seed, 1);
    let nx = cfg.p.len();
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(cfg.m);
    let mut shell_tries = 0usize;
    let mut shell_hits = 0usize;
    let mut mu_estimates = Vec::with_capacity(cfg.m);
    for _word in 0..cfg.m {
        let mut dist_tries = 0usize;
        let mut consecutive = 0usize;
        loop {
            let x = loop {
                shell_tries += 1;
                let cand = sample_iid(&cfg.p, cfg.n, &mut rng);
                if cfg.in_shell(&cand) {
                    shell_hits += 1;
                    break cand;
                }
                if shell_tries > 10_000_000 {
                    return Err(Error::SamplerStalled("shell acceptance too small".into()));
                }
            };
            dist_tries += 1;
            if words
                .iter()
                .all(|w| cfg.d.eval_seqs(&x, w, nx) > cfg.delta_cap)
            {
                mu_estimates.push(1.0 / dist_tries as f64);
                words.push(x);
                break;
            }
            consecutive += 1;
            if consecutive > 1_000_000 {
                return Err(Error::SamplerStalled(format!(
                    "distance acceptance stalled; empirical mu ~ {:.3e}",
                    1.0 / consecutive as f64
                )));
            }
        }
    }
    Ok((
        Codebook {
            words,
            alphabet_size: nx,
            seed,
        },
        CostGenStats {
            shell_acceptance: shell_hits as f64 / shell_tries as f64,
            mu_estimates,
        },
    ))
}

/// The exact shell distribution of a tiny instance: every sequence in the
/// shell with its normalized probability.
pub fn shell_support(cfg: &CostConfig) -> Result<Vec<(Vec<usize>, f64)>> {
    let nx = cfg.p.len();
    let total = nx
        .checked_pow(cfg.n as u32)
        .filter(|&t| t <= 2_000_000)
        .ok_or_else(|| Error::GuardExceeded("shell enumeration too large".into()))?;
    let mut out = Vec::new();
    let mut mu = 0.0;
    for code in 0..total {
        let mut x = Vec::with_capacity(cfg.n);
        let mut c = code;
        for _ in 0..cfg.n {
            x.push(c % nx);
            c /= nx;
        }
        let mut prob = 1.0;
        for &s in &x {
            prob *= cfg.p.get(s);
        }
        if prob > 0.0 && cfg.in_shell(&x) {
            mu += prob;
            out.push((x, prob));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("empty shell".into()));
    }
    for (_, p) in &mut out {
        *p /= mu;
    }
    Ok(out)
}

/// Exact tuple law of the cost-constrained recursion over the shell support.
/// Guarded to tiny instances.
pub fn cost_exact_tuple_law(
    cfg: &CostConfig,
) -> Result<(Vec<(Vec<usize>, f64)>, Vec<(Vec<u32>, f64)>)> {
    let shell = shell_support(cfg)?;
    let s = shell.len();
    if s.pow(cfg.m as u32) > 4_000_000 {
        return Err(Error::GuardExceeded(
            "shell tuple enumeration too large".into(),
        ));
    }
    let nx = cfg.p.len();
    let admissible: Vec<Vec<bool>> = shell
        .iter()
        .map(|(a, _)| {
            shell
                .iter()
                .map(|(b, _)| cfg.d.eval_seqs(a, b, nx) > cfg.delta_cap)
                .collect()
        })
        .collect();

    let mut tuples = Vec::new();
    fn recurse(
        m: usize,
        shell: &[(Vec<usize>, f64)],
        admissible: &[Vec<bool>],
        chosen: &mut Vec<u32>,
        prob: f64,
        tuples: &mut Vec<(Vec<u32>, f64)>,
    ) {
        if chosen.len() == m {
            tuples.push((chosen.clone(), prob));
            return;
        }
        // normalizing constant given the prefix
        let mut mu = 0.0;
        for (i, (_, pi)) in shell.iter().enumerate() {
            if chosen.iter().all(|&c| admissible[c as usize][i]) {
                mu += pi;
            }
        }
        if mu <= 0.0 {
            return;
        }
        for (i, (_, pi)) in shell.iter().enumerate() {
            if chosen.iter().all(|&c| admissible[c as usize][i]) {
                chosen.push(i as u32);
                recurse(m, shell, admissible, chosen, prob * pi / mu, tuples);
                chosen.pop();
            }
        }
    }
    let mut chosen = Vec::new();
    recurse(cfg.m, &shell, &admissible, &mut chosen, 1.0, &mut tuples);
    Ok((shell, tuples))
}

/// Exact convolution check of the pairwise-ball exponent for additive
/// distances: the probability that an i.i.d. draw lands within `delta_cap`
/// of a fixed type-`P_n` sequence, against the dual rate-condition bound.
#[derive(Debug, Clone)]
pub struct PropertyAReport {
    pub exact_exponent: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn property_a_check(
    p: &Distribution,
    d: &DistanceFn,
    delta_cap: f64,
    delta: f64,
    n: usize,
) -> Result<PropertyAReport> {
    let (table, nx) = d.additive_table().ok_or_else(|| {
        Error::Unsupported("the convolution check needs an additive distance".into())
    })?;
    let t = quantize_type_for(p, n)?;
    // distribution of the per-letter distance sum, convolved exactly
    let mut dist: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for (sym, &count) in t.counts().iter().enumerate() {
        for _ in 0..count {
            let mut next: Vec<(f64, f64)> = Vec::with_capacity(dist.len() * nx);
            for &(v, pr) in &dist {
                for xp in 0..nx {
                    let pxp = p.get(xp);
                    if pxp > 0.0 {
                        next.push((v + table[sym * nx + xp], pr * pxp));
                    }
                }
            }
            next.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
            for (v, pr) in next {
                match merged.last_mut() {
                    Some((lv, lp)) if (v - *lv).abs() <= 1e-10 => *lp += pr,
                    _ => merged.push((v, pr)),
                }
            }
            dist = merged;
        }
    }
    let ball: f64 = dist
        .iter()
        .filter(|(v, _)| *v <= delta_cap * n as f64 + 1e-9)
        .map(|(_, pr)| pr)
        .sum();
    let exact_exponent = if ball > 0.0 {
        -ball.ln() / n as f64
    } else {
        f64::INFINITY
    };
    let rl = crate::dual::rate_limit_dual(p, d, delta_cap, 0.0)?;
    let bound = rl.raw; // the supremum itself (delta = 0 removes the offset)
    let holds = exact_exponent >= bound - delta - 1e-9;
    Ok(PropertyAReport {
        exact_exponent,
        bound,
        holds,
    })
}

fn quantize_type_for(p: &Distribution, n: usize) -> Result<TypeDescriptor> {
    crate::prob::quantize_type(p, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::hamming;
    use crate::prob::JointXX;
    use approx::assert_abs_diff_eq;

    fn hamming_cfg(m: usize, delta: f64) -> RgvConfig {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        RgvConfig::new(t, m, hamming(2), 0.25, delta).unwrap()
    }

    #[test]
    fn volume_examples() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let d = hamming(2);
        assert_eq!(volume(&t, &d, -0.1).unwrap(), BigUint::from(0u32));
        assert_eq!(volume(&t, &d, 1.0).unwrap(), BigUint::from(6u32));
        assert_eq!(volume(&t, &d, 0.25).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn volume_typedep_matches_additive() {
        // same Hamming distance expressed as a type-dependent evaluator
        let t = TypeDescriptor::new(vec![3, 3], 6).unwrap();
        let add = hamming(2);
        let typedep = DistanceFn::type_dep(|pi: &JointXX| pi.get(0, 1) + pi.get(1, 0), true);
        for cap in [-0.1, 0.0, 0.3, 0.34, 0.6, 1.0] {
            assert_eq!(
                volume(&t, &add, cap).unwrap(),
                volume(&t, &typedep, cap).unwrap(),
                "cap {cap}"
            );
        }
    }

    #[test]
    fn packing_examples() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let d = hamming(2);
        // m = 4: 4 e^{0.2} ~ 4.89 <= 6
        let rep = check_packing(&t, 4, &d, 0.25, 0.05).unwrap();
        assert!(rep.holds);
        // m = 6: 6 e^{0.2} ~ 7.33 > 6
        let rep = check_packing(&t, 6, &d, 0.25, 0.05).unwrap();
        assert!(!rep.holds);
        // m = 1 with an empty ball is immediate
        let rep = check_packing(&t, 1, &d, -1.0, 0.5).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn generate_forced_complement() {
        let t = TypeDescriptor::new(vec![1, 1], 2).unwrap();
        let cfg = RgvConfig::new(t, 2, hamming(2), 0.4, 0.0).unwrap();
        for seed in 0..20 {
            let cb = generate(&cfg, seed).unwrap();
            let w = cb.words();
            assert_eq!(w.len(), 2);
            assert_eq!(w[0][0] ^ 1, w[1][0]);
            assert_eq!(w[0][1] ^ 1, w[1][1]);
        }
    }

    #[test]
    fn generate_is_deterministic_and_respects_distance() {
        let cfg = hamming_cfg(4, 0.05);
        let a = generate(&cfg, 7).unwrap();
        let b = generate(&cfg, 7).unwrap();
        assert_eq!(a, b);
        for (i, wi) in a.words().iter().enumerate() {
            for wj in a.words().iter().skip(i + 1) {
                assert!(cfg.d().eval_seqs(wi, wj, 2) > cfg.delta_cap());
            }
        }
    }

    #[test]
    fn rejection_and_live_set_agree_in_law() {
        // same seed gives different draws (different algorithms), but both
        // must satisfy the construction invariants; distributional agreement
        // is covered by the tuple-law Monte Carlo test below.
        let cfg = hamming_cfg(3, 0.05);
        let mut rng = derive_rng(3, 0);
        let w = sample_rejection(&cfg, &mut rng).unwrap();
        assert_eq!(w.len(), 3);
        for (i, wi) in w.iter().enumerate() {
            for wj in w.iter().skip(i + 1) {
                assert!(cfg.d().eval_seqs(wi, wj, 2) > cfg.delta_cap());
            }
        }
    }

    #[test]
    fn tuple_law_sums_to_one_and_uniform_marginals() {
        for m in [2usize, 3] {
            let cfg = hamming_cfg(m, 0.05);
            let law = exact_tuple_law(&cfg).unwrap();
            assert_abs_diff_eq!(law.total(), 1.0, epsilon = 1e-12);
            let rep = lemma4_check(&cfg).unwrap();
            assert!(rep.pass, "{}", rep.detail);
        }
    }

    #[test]
    fn asymmetric_distance_is_refused() {
        let w = crate::prob::Channel::bsc(0.2).unwrap();
        let q = crate::metric::Metric::additive(vec![0.0, 1.0, 0.3, 0.2], 2, 2);
        let d = crate::distance::chernoff(&w, &q, 0.8).unwrap();
        assert!(!d.is_symmetric());
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        // below every symmetrized letter value, so the ball is empty
        let cap = -0.6;
        let err = RgvConfig::new(t.clone(), 2, d.clone(), cap, 0.05);
        assert!(matches!(err, Err(Error::AsymmetricDistance(_))));
        // the symmetrized wrapper is accepted
        let ds = crate::distance::symmetrize(&d);
        assert!(RgvConfig::new(t, 2, ds, cap, 0.05).is_ok());
    }

    #[test]
    fn single_word_law_is_uniform() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg = RgvConfig::new(t, 1, hamming(2), 0.25, 0.05).unwrap();
        let law = exact_tuple_law(&cfg).unwrap();
        assert_eq!(law.tuples.len(), 6);
        for (_, p) in &law.tuples {
            assert_abs_diff_eq!(*p, 1.0 / 6.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn vacuous_threshold_never_shrinks_candidates() {
        // with the threshold below the least distance the candidate set stays
        // the whole class along every prefix
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg = RgvConfig::new(t, 3, hamming(2), -0.5, 0.05).unwrap();
        let rep = lemma1_check(&cfg).unwrap();
        assert!(rep.pass);
        assert!(rep.detail.contains("smallest reachable candidate set 6"));
    }

    #[test]
    fn lemma_brackets_hold_on_the_tiny_instance() {
        for m in [2usize, 3] {
            let cfg = hamming_cfg(m, 0.05);
            assert!(lemma1_check(&cfg).unwrap().pass);
            assert!(lemma2_check(&cfg).unwrap().pass);
        }
        let cfg = hamming_cfg(3, 0.05);
        assert!(lemma3_check(&cfg).unwrap().pass);
    }

    #[test]
    fn generated_distribution_matches_tuple_law() {
        // forced-complement instance: compare empirical tuple frequencies
        let t = TypeDescriptor::new(vec![1, 1], 2).unwrap();
        let cfg = RgvConfig::new(t, 2, hamming(2), 0.4, 0.0).unwrap();
        let law = exact_tuple_law(&cfg).unwrap();
        let trials = 100_000usize;
        let mut counts = std::collections::HashMap::new();
        for seed in 0..trials {
            let cb = generate(&cfg, seed as u64).unwrap();
            let key: Vec<Vec<usize>> = cb.words().to_vec();
            *counts.entry(key).or_insert(0usize) += 1;
        }
        for (tuple, p) in &law.tuples {
            let words: Vec<Vec<usize>> = tuple
                .iter()
                .map(|&i| law.class[i as usize].clone())
                .collect();
            let observed = *counts.get(&words).unwrap_or(&0) as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (observed - p).abs() <= 3.0 * sigma + 1e-9,
                "tuple {:?}: observed {observed}, expected {p}",
                tuple
            );
        }
    }

    #[test]
    fn serialization_round_trip() {
        let cfg = hamming_cfg(3, 0.05);
        let cb = generate(&cfg, 99).unwrap();
        let text = cb.serialize();
        let back = Codebook::parse(&text).unwrap();
        assert_eq!(cb, back);
        assert!(text.starts_with("4 3 2 99\n"));
    }

    #[test]
    fn cost_generate_iid_case() {
        // vacuous shell and distance: plain i.i.d. sampling
        let p = Distribution::uniform(2);
        let cfg = CostConfig::new(8, 2, p, vec![], 1.0, hamming(2), -0.1, 0.05).unwrap();
        let (cb, stats) = cost_generate(&cfg, 5).unwrap();
        assert_eq!(cb.m(), 2);
        assert_abs_diff_eq!(stats.shell_acceptance, 1.0, epsilon = 1e-12);
        assert!(stats.mu_estimates.iter().all(|&m| m == 1.0));
    }

    #[test]
    fn cost_config_rejects_excess_rate() {
        let p = Distribution::uniform(2);
        // Hamming with a high threshold leaves almost no room
        let err = CostConfig::new(8, 64, p, vec![], 0.5, hamming(2), 0.45, 0.01);
        assert!(matches!(err, Err(Error::RateConditionViolated(_))));
    }

    #[test]
    fn shell_support_is_normalized() {
        let p = Distribution::new(vec![0.4, 0.6]).unwrap();
        let a = vec![0.5, -0.5];
        let cfg = CostConfig::new(6, 2, p, vec![a], 0.3, hamming(2), 0.1, 0.02).unwrap();
        let shell = shell_support(&cfg).unwrap();
        let total: f64 = shell.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(shell.len() < 64);
    }

    #[test]
    fn property_a_hamming_uniform() {
        let p = Distribution::uniform(2);
        let rep = property_a_check(&p, &hamming(2), 0.25, 0.01, 32).unwrap();
        assert!(
            rep.holds,
            "exact {} vs bound {}",
            rep.exact_exponent, rep.bound
        );
        // the exact binomial-tail exponent: -ln Pr(Bin(32, 1/2) <= 8) / 32
        let mut tail = 0.0f64;
        for k in 0..=8u32 {
            let mut c = 1.0f64;
            for i in 0..k {
                c *= (32 - i) as f64 / (i + 1) as f64;
            }
            tail += c * 0.5f64.powi(32);
        }
        assert_abs_diff_eq!(rep.exact_exponent, -tail.ln() / 32.0, epsilon = 1e-9);
    }

    #[test]
    fn property_a_trivial_edges() {
        let p = Distribution::uniform(2);
        // negative threshold: the ball is empty, exponent infinite
        let rep = property_a_check(&p, &hamming(2), -0.2, 0.01, 16).unwrap();
        assert!(rep.exact_exponent.is_infinite());
        assert!(rep.holds);
        // threshold above the maximum: both sides collapse to about zero
        let rep = property_a_check(&p, &hamming(2), 1.0, 0.01, 16).unwrap();
        assert_abs_diff_eq!(rep.exact_exponent, 0.0, epsilon = 1e-12);
        assert!(rep.bound <= 1e-6);
        assert!(rep.holds);
    }
}
