//! Error-probability evaluation: maximum-metric decoding, ensemble Monte
//! Carlo, exact enumeration oracles for tiny instances, and the union-bound
//! machinery (type-reorganized pairwise sums, de Caen's inequality, empirical
//! exponent fits).

use crate::codebook::{self, derive_rng, for_each_table, ln_biguint, volume, Codebook, RgvConfig};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::metric::Metric;
use crate::prob::{ln_multinomial, Channel};
use num_traits::ToPrimitive;
use rand::Rng;

/// Outcome of one decoding attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(usize),
    /// Two or more codewords tied for the best score; counted as an error.
    Tie,
}

/// Maximum-metric decoder. Scores are computed in a canonical per-position
/// order so ties are exact float equalities, reproducibly.
pub fn decode(cb: &Codebook, y: &[usize], q: &Metric, ny: usize) -> DecodeOutcome {
    let nx = cb.alphabet_size();
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0usize;
    let mut tied = false;
    for (i, w) in cb.words().iter().enumerate() {
        let score = q.eval_seqs(w, y, nx, ny);
        if score > best {
            best = score;
            best_idx = i;
            tied = false;
        } else if score == best {
            tied = true;
        }
    }
    if tied || best == f64::NEG_INFINITY {
        DecodeOutcome::Tie
    } else {
        DecodeOutcome::Decoded(best_idx)
    }
}

/// Monte Carlo estimate with its binomial confidence interval and the error
/// breakdown by cause.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub pe_estimate: f64,
    /// 95% normal-approximation half width.
    pub ci_halfwidth: f64,
    pub trials: u64,
    pub errors_metric_beaten: u64,
    pub errors_tie: u64,
}

impl SimResult {
    pub fn errors(&self) -> u64 {
        self.errors_metric_beaten + self.errors_tie
    }
}

/// Which codebook each trial uses.
#[derive(Debug, Clone, Copy)]
pub enum CodebookSampling<'a> {
    /// Fresh draw per trial: estimates the ensemble average.
    FreshPerTrial,
    /// One fixed codebook: estimates its conditional error probability.
    Fixed(&'a Codebook),
}

fn sample_output(w: &Channel, x: &[usize], rng: &mut rand_chacha::ChaCha20Rng) -> Vec<usize> {
    let ny = w.ny();
    let mut y = Vec::with_capacity(x.len());
    for &sym in x {
        let u: f64 = rng.gen();
        let row = w.row(sym);
        let mut acc = 0.0;
        let mut out = ny - 1;
        for (i, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                out = i;
                break;
            }
        }
        y.push(out);
    }
    y
}

/// Ensemble Monte Carlo: every trial draws a fresh codebook, a uniform
/// message, and a channel output, then decodes. Deterministic given the seed
/// regardless of thread count.
pub fn monte_carlo(
    cfg: &RgvConfig,
    w: &Channel,
    q: &Metric,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    monte_carlo_with(
        cfg,
        w,
        q,
        trials,
        seed,
        ExecMode::Parallel,
        CodebookSampling::FreshPerTrial,
    )
}

/// Sequential twin of [`monte_carlo`], for benchmarking the two modes.
pub fn monte_carlo_serial(
    cfg: &RgvConfig,
    w: &Channel,
    q: &Metric,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    monte_carlo_with(
        cfg,
        w,
        q,
        trials,
        seed,
        ExecMode::Sequential,
        CodebookSampling::FreshPerTrial,
    )
}

pub fn monte_carlo_with(
    cfg: &RgvConfig,
    w: &Channel,
    q: &Metric,
    trials: u64,
    seed: u64,
    mode: ExecMode,
    sampling: CodebookSampling<'_>,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    if w.nx() != cfg.alphabet_size() {
        return Err(Error::InvalidConfig(
            "channel and codebook disagree on |X|".into(),
        ));
    }
    let ny = w.ny();
    let (beaten, ties) = exec::map_reduce(
        mode,
        trials as usize,
        |trial| {
            let mut rng = derive_rng(seed, trial as u64);
            let fresh;
            let cb: &Codebook = match sampling {
                CodebookSampling::Fixed(cb) => cb,
                CodebookSampling::FreshPerTrial => {
                    let words = codebook::sample_rejection(cfg, &mut rng)
                        .expect("packing condition was validated at config time");
                    fresh = Codebook::from_words(words, cfg.alphabet_size(), seed);
                    &fresh
                }
            };
            let m = rng.gen_range(0..cb.m());
            let y = sample_output(w, &cb.words()[m], &mut rng);
            match decode(cb, &y, q, ny) {
                DecodeOutcome::Decoded(j) if j == m => (0u64, 0u64),
                DecodeOutcome::Decoded(_) => (1, 0),
                DecodeOutcome::Tie => (0, 1),
            }
        },
        || (0u64, 0u64),
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let errors = beaten + ties;
    let pe = errors as f64 / trials as f64;
    let ci = 1.96 * (pe * (1.0 - pe) / trials as f64).sqrt();
    Ok(SimResult {
        pe_estimate: pe,
        ci_halfwidth: ci,
        trials,
        errors_metric_beaten: beaten,
        errors_tie: ties,
    })
}

/// Exact ensemble error probability by full enumeration: every codeword
/// tuple (by the exact recursive law), every message, every output sequence.
pub fn exact_pe(cfg: &RgvConfig, w: &Channel, q: &Metric) -> Result<f64> {
    let ny = w.ny();
    let size = cfg
        .class_size()
        .to_usize()
        .ok_or_else(|| Error::GuardExceeded("type class too large".into()))?;
    let outputs = (ny as u64)
        .checked_pow(cfg.n() as u32)
        .ok_or_else(|| Error::GuardExceeded("output space too large".into()))?;
    let work = (size as u64)
        .checked_pow(cfg.m() as u32)
        .and_then(|t| t.checked_mul(outputs))
        .filter(|&t| t <= 100_000_000)
        .ok_or_else(|| Error::GuardExceeded("|T|^m |Y|^n exceeds the guard".into()))?;
    let _ = work;
    let law = codebook::exact_tuple_law(cfg)?;
    let m = cfg.m();
    let n = cfg.n();

    let total = exec::map_reduce(
        ExecMode::Parallel,
        law.tuples.len(),
        |ti| {
            let (tuple, tuple_p) = &law.tuples[ti];
            let words: Vec<&Vec<usize>> = tuple.iter().map(|&i| &law.class[i as usize]).collect();
            let cb = Codebook::from_words(
                words.iter().map(|w| (*w).clone()).collect(),
                cfg.alphabet_size(),
                0,
            );
            let mut acc = 0.0;
            let mut y = vec![0usize; n];
            loop {
                // W^n(y | x_m) for each message, reusing the output sweep
                for msg in 0..m {
                    let mut wn = 1.0;
                    for (pos, &ysym) in y.iter().enumerate() {
                        wn *= w.get(words[msg][pos], ysym);
                        if wn == 0.0 {
                            break;
                        }
                    }
                    if wn == 0.0 {
                        continue;
                    }
                    let err = match decode(&cb, &y, q, ny) {
                        DecodeOutcome::Decoded(j) => j != msg,
                        DecodeOutcome::Tie => true,
                    };
                    if err {
                        acc += tuple_p / m as f64 * wn;
                    }
                }
                // next output sequence
                let mut pos = 0;
                loop {
                    y[pos] += 1;
                    if y[pos] < ny {
                        break;
                    }
                    y[pos] = 0;
                    pos += 1;
                    if pos == n {
                        return acc;
                    }
                }
            }
        },
        || 0.0,
        |a, b| a + b,
    );
    Ok(total)
}

/// The type-reorganized pairwise union expression: the average over the
/// transmitted word and output of `min(1, (M-1) S(x, y))`, where `S` counts
/// same-type competitors that beat the metric and clear the distance
/// condition (`>=` by default, `>` in strict mode). Exact via joint-type
/// enumeration with multiplicities.
pub fn rcu_like(cfg: &RgvConfig, w: &Channel, q: &Metric) -> Result<f64> {
    rcu_like_with(cfg, w, q, false)
}

pub fn rcu_like_with(cfg: &RgvConfig, w: &Channel, q: &Metric, strict: bool) -> Result<f64> {
    let nx = cfg.alphabet_size();
    let ny = w.ny();
    let n = cfg.n();
    let counts = cfg.t().counts().to_vec();
    let ln_class = cfg.ln_class_size();
    let mm1 = (cfg.m() - 1) as f64;
    let d = cfg.d();

    // enumerate joint (x, y) types: rows = x symbols, cols = y symbols
    let group_all = vec![0usize; ny];
    let mut total = 0.0;
    let mut outer_tables: Vec<Vec<usize>> = Vec::new();
    for_each_table(&counts, ny, &group_all, &[n], 50_000_000, &mut |k| {
        outer_tables.push(k.to_vec());
    })?;

    let contributions = exec::map_collect(ExecMode::Parallel, outer_tables.len(), |ki| {
        let k = &outer_tables[ki];
        // weight: (number of y for a fixed x in the class) * W^n(y|x)
        let mut ln_w = 0.0;
        for a in 0..nx {
            ln_w += ln_multinomial(counts[a], &k[a * ny..(a + 1) * ny]);
            for b in 0..ny {
                let c = k[a * ny + b];
                if c > 0 {
                    let wv = w.get(a, b);
                    if wv == 0.0 {
                        return 0.0;
                    }
                    ln_w += c as f64 * wv.ln();
                }
            }
        }
        let q_sent = q.eval_counts(k, nx, ny, n);

        // inner: competitors x' by conditional type given (x, y)
        let cell_sums: Vec<usize> = k.to_vec();
        let group_of_col: Vec<usize> = (0..nx).collect();
        let mut s = 0.0;
        let res = for_each_table(
            &cell_sums,
            nx,
            &group_of_col,
            &counts,
            50_000_000,
            &mut |l| {
                // l[(a, b) cell][a'] = positions with sent a, output b, competitor a'
                let mut q_counts = vec![0usize; nx * ny];
                let mut d_counts = vec![0usize; nx * nx];
                for cell in 0..nx * ny {
                    let (a, b) = (cell / ny, cell % ny);
                    for ap in 0..nx {
                        let c = l[cell * nx + ap];
                        q_counts[ap * ny + b] += c;
                        d_counts[a * nx + ap] += c;
                    }
                }
                let q_comp = q.eval_counts(&q_counts, nx, ny, n);
                if q_comp < q_sent {
                    return;
                }
                let dval = d.eval_counts(&d_counts, nx, n);
                let ok = if strict {
                    dval > cfg.delta_cap()
                } else {
                    dval >= cfg.delta_cap()
                };
                if !ok {
                    return;
                }
                let mut ln_count = 0.0;
                for cell in 0..nx * ny {
                    ln_count += ln_multinomial(cell_sums[cell], &l[cell * nx..(cell + 1) * nx]);
                }
                s += (ln_count - ln_class).exp();
            },
        );
        if res.is_err() {
            return f64::NAN;
        }
        ln_w.exp() * (mm1 * s).min(1.0)
    });
    for c in contributions {
        if c.is_nan() {
            return Err(Error::GuardExceeded(
                "inner conditional-type enumeration exceeded the guard".into(),
            ));
        }
        total += c;
    }
    Ok(total)
}

/// Exact ensemble error probability for two-message configurations via joint
/// type enumeration; scales to blocklengths far beyond `exact_pe`.
pub fn exact_pe_two_words(cfg: &RgvConfig, w: &Channel, q: &Metric) -> Result<f64> {
    if cfg.m() != 2 {
        return Err(Error::InvalidConfig("needs exactly two messages".into()));
    }
    let nx = cfg.alphabet_size();
    let ny = w.ny();
    let n = cfg.n();
    let counts = cfg.t().counts().to_vec();
    let d = cfg.d();
    let vol = volume(cfg.t(), d, cfg.delta_cap())?;
    let ln_candidates = {
        let survivors = cfg.class_size() - &vol;
        ln_biguint(&survivors)
    };

    // tau[a][(a', b)] counts positions: sent symbol a, competitor a', output b
    let ncols = nx * ny;
    let group_of_col: Vec<usize> = (0..ncols).map(|c| c / ny).collect();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    for_each_table(
        &counts,
        ncols,
        &group_of_col,
        &counts,
        50_000_000,
        &mut |t| {
            tables.push(t.to_vec());
        },
    )?;

    let total = exec::map_reduce(
        ExecMode::Parallel,
        tables.len(),
        |ti| {
            let tau = &tables[ti];
            // distance between the two words
            let mut d_counts = vec![0usize; nx * nx];
            let mut qy_sent = vec![0usize; nx * ny];
            let mut qy_comp = vec![0usize; nx * ny];
            let mut ln_weight = 0.0;
            for a in 0..nx {
                ln_weight += ln_multinomial(counts[a], &tau[a * ncols..(a + 1) * ncols]);
                for ap in 0..nx {
                    for b in 0..ny {
                        let c = tau[a * ncols + ap * ny + b];
                        if c > 0 {
                            d_counts[a * nx + ap] += c;
                            qy_sent[a * ny + b] += c;
                            qy_comp[ap * ny + b] += c;
                            let wv = w.get(a, b);
                            if wv == 0.0 {
                                return 0.0;
                            }
                            ln_weight += c as f64 * wv.ln();
                        }
                    }
                }
            }
            let dval = d.eval_counts(&d_counts, nx, n);
            if dval <= cfg.delta_cap() {
                return 0.0; // the pair law forbids this competitor
            }
            let q_sent = q.eval_counts(&qy_sent, nx, ny, n);
            let q_comp = q.eval_counts(&qy_comp, nx, ny, n);
            if q_comp < q_sent {
                return 0.0;
            }
            (ln_weight - ln_candidates).exp()
        },
        || 0.0,
        |a, b| a + b,
    );
    Ok(total)
}

/// Report from the union lower bound check.
#[derive(Debug, Clone)]
pub struct DeCaenReport {
    pub union: f64,
    pub bound: f64,
    pub holds: bool,
}

/// De Caen's lower bound on the probability of a union, with zero-probability
/// events skipped, evaluated exactly on explicit finite event systems.
pub fn de_caen_check(events: &[Vec<bool>], measure: &[f64]) -> DeCaenReport {
    let space = measure.len();
    debug_assert!(events.iter().all(|e| e.len() == space));
    let union: f64 = (0..space)
        .filter(|&o| events.iter().any(|e| e[o]))
        .map(|o| measure[o])
        .sum();
    let pr = |i: usize| -> f64 {
        (0..space)
            .filter(|&o| events[i][o])
            .map(|o| measure[o])
            .sum()
    };
    let pr_pair = |i: usize, j: usize| -> f64 {
        (0..space)
            .filter(|&o| events[i][o] && events[j][o])
            .map(|o| measure[o])
            .sum()
    };
    let mut bound = 0.0;
    for i in 0..events.len() {
        let pi = pr(i);
        if pi <= 0.0 {
            continue;
        }
        let mut denom = pi;
        for j in 0..events.len() {
            if j != i {
                denom += pr_pair(i, j);
            }
        }
        bound += pi * pi / denom;
    }
    DeCaenReport {
        union,
        bound,
        holds: union >= bound - 1e-12,
    }
}

/// Least-squares fit of the negative log error frequency against the
/// blocklength. Points with zero observed errors are excluded and flagged.
#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub slope: Option<f64>,
    pub stderr: f64,
    pub used: Vec<usize>,
    pub flagged: Vec<usize>,
}

pub fn empirical_exponent(points: &[(usize, SimResult)]) -> ExponentFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut vars = Vec::new();
    let mut used = Vec::new();
    let mut flagged = Vec::new();
    for (n, sim) in points {
        if sim.pe_estimate <= 0.0 {
            flagged.push(*n);
            continue;
        }
        used.push(*n);
        xs.push(*n as f64);
        ys.push(-sim.pe_estimate.ln());
        // delta method on ln(p_hat)
        vars.push((1.0 - sim.pe_estimate) / (sim.pe_estimate * sim.trials as f64));
    }
    if xs.len() < 2 {
        return ExponentFit {
            slope: None,
            stderr: f64::NAN,
            used,
            flagged,
        };
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let var_slope: f64 = xs
        .iter()
        .zip(&vars)
        .map(|(x, v)| ((x - xbar) / sxx).powi(2) * v)
        .sum();
    ExponentFit {
        slope: Some(slope),
        stderr: var_slope.sqrt(),
        used,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::generate;
    use crate::distance::hamming;
    use crate::prob::TypeDescriptor;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn forced_complement_cfg() -> RgvConfig {
        let t = TypeDescriptor::new(vec![1, 1], 2).unwrap();
        RgvConfig::new(t, 2, hamming(2), 0.4, 0.0).unwrap()
    }

    fn tiny_cfg(m: usize) -> RgvConfig {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        RgvConfig::new(t, m, hamming(2), 0.25, 0.05).unwrap()
    }

    #[test]
    fn decode_basics() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg1 = RgvConfig::new(t, 1, hamming(2), 0.25, 0.05).unwrap();
        let cb = generate(&cfg1, 3).unwrap();
        let w = Channel::bsc(0.1).unwrap();
        let q = Metric::ml(&w);
        assert_eq!(decode(&cb, &[0, 0, 1, 1], &q, 2), DecodeOutcome::Decoded(0));

        // constant metric with two codewords always ties
        let cfg2 = tiny_cfg(2);
        let cb2 = generate(&cfg2, 3).unwrap();
        let qc = Metric::additive(vec![1.0; 4], 2, 2);
        assert_eq!(decode(&cb2, &[0, 1, 0, 1], &qc, 2), DecodeOutcome::Tie);

        // noiseless channel: the transmitted word is the unique maximizer
        let noiseless = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let qn = Metric::ml(&noiseless);
        for (i, wseq) in cb2.words().iter().enumerate() {
            assert_eq!(decode(&cb2, wseq, &qn, 2), DecodeOutcome::Decoded(i));
        }
    }

    #[test]
    fn exact_pe_single_word_is_zero() {
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg = RgvConfig::new(t, 1, hamming(2), 0.25, 0.05).unwrap();
        let w = Channel::bsc(0.2).unwrap();
        let q = Metric::ml(&w);
        assert_abs_diff_eq!(exact_pe(&cfg, &w, &q).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_pe_constant_metric_is_one() {
        let cfg = tiny_cfg(2);
        let w = Channel::bsc(0.2).unwrap();
        let q = Metric::additive(vec![0.7; 4], 2, 2);
        assert_abs_diff_eq!(exact_pe(&cfg, &w, &q).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_pe_forced_complement_closed_form() {
        let cfg = forced_complement_cfg();
        for p in [0.1, 0.3] {
            let w = Channel::bsc(p).unwrap();
            let q = Metric::ml(&w);
            let pe = exact_pe(&cfg, &w, &q).unwrap();
            // error iff both symbols flip, plus ties when exactly one flips
            let expect = p * p + 2.0 * p * (1.0 - p);
            assert_abs_diff_eq!(pe, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let cfg = tiny_cfg(3);
        let w = Channel::bsc(0.15).unwrap();
        let q = Metric::ml(&w);
        let exact = exact_pe(&cfg, &w, &q).unwrap();
        let sim = monte_carlo(&cfg, &w, &q, 100_000, 42).unwrap();
        let sigma = (exact * (1.0 - exact) / sim.trials as f64).sqrt();
        assert!(
            (sim.pe_estimate - exact).abs() <= 3.0 * sigma,
            "mc {} vs exact {exact}",
            sim.pe_estimate
        );
        assert!(sim.errors_metric_beaten + sim.errors_tie > 0);
    }

    #[test]
    fn monte_carlo_is_deterministic_across_modes() {
        let cfg = tiny_cfg(3);
        let w = Channel::bsc(0.15).unwrap();
        let q = Metric::ml(&w);
        let a = monte_carlo_with(
            &cfg,
            &w,
            &q,
            5_000,
            7,
            ExecMode::Parallel,
            CodebookSampling::FreshPerTrial,
        )
        .unwrap();
        let b = monte_carlo_with(
            &cfg,
            &w,
            &q,
            5_000,
            7,
            ExecMode::Sequential,
            CodebookSampling::FreshPerTrial,
        )
        .unwrap();
        assert_eq!(a.errors_metric_beaten, b.errors_metric_beaten);
        assert_eq!(a.errors_tie, b.errors_tie);
    }

    #[test]
    fn monte_carlo_edge_cases() {
        // noiseless channel: distinct codewords never confuse the decoder
        let noiseless = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let q = Metric::ml(&noiseless);
        let cfg = tiny_cfg(3);
        let sim = monte_carlo(&cfg, &noiseless, &q, 2_000, 1).unwrap();
        assert_eq!(sim.errors(), 0);

        // constant metric: every trial is a tie error
        let w = Channel::bsc(0.5).unwrap();
        let qc = Metric::additive(vec![0.0; 4], 2, 2);
        let sim = monte_carlo(&cfg, &w, &qc, 2_000, 1).unwrap();
        assert_abs_diff_eq!(sim.pe_estimate, 1.0, epsilon = 1e-12);
        assert_eq!(sim.errors_metric_beaten, 0);
    }

    #[test]
    fn fixed_codebook_conditional_error() {
        let cfg = tiny_cfg(3);
        let w = Channel::bsc(0.2).unwrap();
        let q = Metric::ml(&w);
        let cb = generate(&cfg, 12).unwrap();
        // exact conditional error probability of this fixed codebook
        let ny = 2usize;
        let n = cb.n();
        let mut exact = 0.0;
        for msg in 0..cb.m() {
            let mut y = vec![0usize; n];
            loop {
                let mut wn = 1.0;
                for (pos, &ys) in y.iter().enumerate() {
                    wn *= w.get(cb.words()[msg][pos], ys);
                }
                let err = match decode(&cb, &y, &q, ny) {
                    DecodeOutcome::Decoded(j) => j != msg,
                    DecodeOutcome::Tie => true,
                };
                if err {
                    exact += wn / cb.m() as f64;
                }
                let mut pos = 0;
                loop {
                    y[pos] += 1;
                    if y[pos] < ny {
                        break;
                    }
                    y[pos] = 0;
                    pos += 1;
                    if pos == n {
                        break;
                    }
                }
                if pos == n {
                    break;
                }
            }
        }
        let sim = monte_carlo_with(
            &cfg,
            &w,
            &q,
            60_000,
            5,
            ExecMode::Parallel,
            CodebookSampling::Fixed(&cb),
        )
        .unwrap();
        let sigma = (exact * (1.0 - exact) / sim.trials as f64).sqrt();
        assert!(
            (sim.pe_estimate - exact).abs() <= 3.0 * sigma,
            "mc {} vs exact {exact}",
            sim.pe_estimate
        );
    }

    #[test]
    fn rcu_like_edges_and_sandwich() {
        let w = Channel::bsc(0.1).unwrap();
        let q = Metric::ml(&w);
        // single message: the inner factor is empty
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg1 = RgvConfig::new(t.clone(), 1, hamming(2), 0.25, 0.05).unwrap();
        assert_abs_diff_eq!(rcu_like(&cfg1, &w, &q).unwrap(), 0.0, epsilon = 1e-15);
        // threshold above the maximum distance: empty inner sum (a single
        // message keeps the packing condition satisfiable there)
        let t1 = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let cfg_hi = RgvConfig::new(t1, 1, hamming(2), 1.5, 0.0).unwrap();
        assert_abs_diff_eq!(rcu_like(&cfg_hi, &w, &q).unwrap(), 0.0, epsilon = 1e-15);

        // upper sandwich on the tiny instance
        for m in [2usize, 3] {
            let cfg = tiny_cfg(m);
            let pe = exact_pe(&cfg, &w, &q).unwrap();
            let rcu = rcu_like(&cfg, &w, &q).unwrap();
            let e = (-(cfg.n() as f64) * cfg.delta()).exp();
            let factor = 1.0 / ((1.0 - e) * (1.0 - e));
            assert!(
                pe <= factor * rcu + 1e-12,
                "m={m}: pe {pe} vs scaled rcu {}",
                factor * rcu
            );
        }
    }

    #[test]
    fn rcu_monotone_in_m_and_cap() {
        let w = Channel::bsc(0.1).unwrap();
        let q = Metric::ml(&w);
        let t = TypeDescriptor::new(vec![2, 2], 4).unwrap();
        let v2 = rcu_like(
            &RgvConfig::new(t.clone(), 2, hamming(2), 0.25, 0.05).unwrap(),
            &w,
            &q,
        )
        .unwrap();
        let v3 = rcu_like(
            &RgvConfig::new(t.clone(), 3, hamming(2), 0.25, 0.05).unwrap(),
            &w,
            &q,
        )
        .unwrap();
        assert!(v3 >= v2 - 1e-15);
        let lo = rcu_like(
            &RgvConfig::new(t.clone(), 2, hamming(2), -0.2, 0.05).unwrap(),
            &w,
            &q,
        )
        .unwrap();
        let hi = rcu_like(
            &RgvConfig::new(t, 2, hamming(2), 0.25, 0.05).unwrap(),
            &w,
            &q,
        )
        .unwrap();
        assert!(hi <= lo + 1e-15);
    }

    #[test]
    fn two_word_enumeration_matches_exact_pe() {
        let w = Channel::bsc(0.12).unwrap();
        let q = Metric::ml(&w);
        let cfg = tiny_cfg(2);
        let a = exact_pe(&cfg, &w, &q).unwrap();
        let b = exact_pe_two_words(&cfg, &w, &q).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);

        let t6 = TypeDescriptor::new(vec![3, 3], 6).unwrap();
        let cfg6 = RgvConfig::new(t6, 2, hamming(2), 1.0 / 6.0, 0.2).unwrap();
        let a = exact_pe(&cfg6, &w, &q).unwrap();
        let b = exact_pe_two_words(&cfg6, &w, &q).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn de_caen_cases() {
        // disjoint events: equality
        let events = vec![
            vec![true, false, false, false],
            vec![false, true, false, false],
        ];
        let measure = vec![0.25; 4];
        let rep = de_caen_check(&events, &measure);
        assert!(rep.holds);
        assert_abs_diff_eq!(rep.union, rep.bound, epsilon = 1e-12);

        // identical events: the bound collapses to Pr(E)
        let events = vec![vec![true, true, false, false]; 5];
        let rep = de_caen_check(&events, &measure);
        assert!(rep.holds);
        assert_abs_diff_eq!(rep.bound, 0.5, epsilon = 1e-12);

        // random systems
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let space = 12;
            let mut measure: Vec<f64> = (0..space).map(|_| rng.gen::<f64>() + 0.01).collect();
            let s: f64 = measure.iter().sum();
            measure.iter_mut().for_each(|v| *v /= s);
            let events: Vec<Vec<bool>> = (0..5)
                .map(|_| (0..space).map(|_| rng.gen::<f64>() < 0.3).collect())
                .collect();
            let rep = de_caen_check(&events, &measure);
            assert!(rep.holds, "union {} < bound {}", rep.union, rep.bound);
        }
    }

    #[test]
    fn empirical_exponent_edge_cases() {
        let zero = SimResult {
            pe_estimate: 0.0,
            ci_halfwidth: 0.0,
            trials: 100,
            errors_metric_beaten: 0,
            errors_tie: 0,
        };
        let fit = empirical_exponent(&[(8, zero.clone()), (12, zero)]);
        assert!(fit.slope.is_none());
        assert_eq!(fit.flagged, vec![8, 12]);

        // constant pe = 1 gives slope zero
        let ones = |n: usize| {
            (
                n,
                SimResult {
                    pe_estimate: 1.0,
                    ci_halfwidth: 0.0,
                    trials: 100,
                    errors_metric_beaten: 0,
                    errors_tie: 100,
                },
            )
        };
        let fit = empirical_exponent(&[ones(8), ones(12), ones(16)]);
        assert_abs_diff_eq!(fit.slope.unwrap(), 0.0, epsilon = 1e-12);
    }
}
