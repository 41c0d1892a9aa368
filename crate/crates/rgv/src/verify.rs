//! Named verification suites: batteries of cross-checks between the
//! independent computation routes (enumeration oracles vs. samplers, primal
//! vs. dual solvers, classical-exponent recoveries, construction property
//! brackets). The CLI `verify` subcommand runs these; the acceptance tests
//! run the same batteries at full strength.

use crate::codebook::{
    check_packing, cost_exact_tuple_law, cost_generate, delta_n, exact_tuple_law, lemma1_check,
    lemma2_check, lemma3_check, lemma4_check, property_a_check, sample_shell, CostConfig,
    RgvConfig,
};
use crate::distance::{bhattacharyya, chernoff, hamming, neg_mutual_info, symmetrize, DistanceFn};
use crate::dual::{
    check_rate_condition_consistency, dual_objective, ergv_dual, expurgated_delta_cap,
    expurgated_dual, rate_limit_dual, rc_dual_objective, DualParams,
};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::metric::Metric;
use crate::primal::{
    beta_exponent_check, ck_exponent, ergv_primal, rate_limit_primal, PrimalProblem,
};
use crate::prob::{Channel, Distribution, TypeDescriptor};
use crate::simulate::{
    de_caen_check, empirical_exponent, exact_pe, exact_pe_two_words, monte_carlo, rcu_like_with,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// One named check with its outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The registered suite names.
pub fn suite_names() -> &'static [&'static str] {
    &[
        "lemmas",
        "duality",
        "recoveries",
        "optimality",
        "beta",
        "simulation",
        "decaen",
        "cost",
        "trend",
    ]
}

/// Runs a named suite. `trials` scales the Monte Carlo suites; `limit` caps
/// the number of corpus instances for the duality battery.
pub fn run_suite(name: &str, trials: Option<u64>, limit: Option<usize>) -> Result<VerifyReport> {
    match name {
        "lemmas" => lemmas_suite(),
        "duality" => duality_suite(limit),
        "recoveries" => recoveries_suite(),
        "optimality" => optimality_suite(),
        "beta" => beta_suite(),
        "simulation" => simulation_suite(trials.unwrap_or(100_000)),
        "decaen" => decaen_suite(),
        "cost" => cost_suite(trials.unwrap_or(10_000)),
        "trend" => trend_suite(trials.unwrap_or(100_000)),
        other => Err(Error::InvalidConfig(format!(
            "unknown suite `{other}`; available: {}",
            suite_names().join(", ")
        ))),
    }
}

// ---------------------------------------------------------------------------
// Shared random corpus
// ---------------------------------------------------------------------------

/// One randomly generated (but deterministic) additive instance.
#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub name: String,
    pub p: Distribution,
    pub w: Channel,
    pub q: Metric,
    pub d: DistanceFn,
    pub delta_cap: f64,
    pub rate: f64,
}

fn random_stochastic_row(rng: &mut ChaCha20Rng, len: usize, floor: f64) -> Vec<f64> {
    let mut row: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() + floor).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

/// Deterministic corpus of additive instances with alphabet sizes in
/// {2, 3}: random channels, inputs, additive metrics and symmetric additive
/// distances, with thresholds placed inside the achievable range and rates
/// below the rate condition.
pub fn additive_corpus() -> Vec<CorpusInstance> {
    let mut out = Vec::new();
    let sizes = [(2usize, 2usize), (2, 2), (2, 3), (3, 2), (3, 3)];
    for i in 0..22u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE + i);
        let (nx, ny) = sizes[(i % 5) as usize];
        // rows concentrated on distinct outputs, so the channel carries real
        // information and the exponents are not trivially zero
        let w = Channel::new(
            (0..nx)
                .map(|x| {
                    let mut row: Vec<f64> = (0..ny)
                        .map(|y| {
                            let base = if y == x % ny { 2.0 } else { 0.25 };
                            base + 0.4 * rng.gen::<f64>()
                        })
                        .collect();
                    let sum: f64 = row.iter().sum();
                    row.iter_mut().for_each(|v| *v /= sum);
                    row
                })
                .collect(),
        )
        .expect("rows are stochastic");
        let p = Distribution::new(random_stochastic_row(&mut rng, nx, 0.3)).expect("stochastic");
        let q = if i % 3 == 0 {
            Metric::ml(&w)
        } else {
            let table: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Metric::additive(table, nx, ny)
        };
        let mut dtab = vec![0.0; nx * nx];
        for a in 0..nx {
            for b in 0..a {
                let v = rng.gen_range(0.2..1.0);
                dtab[a * nx + b] = v;
                dtab[b * nx + a] = v;
            }
        }
        let d = DistanceFn::additive(dtab.clone(), nx).expect("finite table");
        // distance at the independent coupling: the threshold must sit below
        // it for the rate condition to leave room
        let mut d_prod = 0.0;
        for a in 0..nx {
            for b in 0..nx {
                d_prod += p.get(a) * p.get(b) * dtab[a * nx + b];
            }
        }
        let delta_cap = d_prod * rng.gen_range(0.3..0.85);
        let rl = rate_limit_primal(&p, &d, delta_cap, 0.0).expect("additive rate limit");
        let rate = (rl.raw * rng.gen_range(0.25..0.75)).max(5e-3);
        out.push(CorpusInstance {
            name: format!("corpus-{i:02}-{nx}x{ny}"),
            p,
            w,
            q,
            d,
            delta_cap,
            rate,
        });
    }
    // instances with the distance constraint active at the optimum (the
    // exponent strictly exceeds random coding, so the dual needs r > 0)
    let w2 = Channel::bsc(0.1).expect("valid channel");
    let p2 = Distribution::uniform(2);
    let d2 = bhattacharyya(&w2).expect("positive channel");
    out.push(CorpusInstance {
        name: "corpus-active-2x2".into(),
        q: Metric::ml(&w2),
        rate: 0.015,
        delta_cap: 0.2,
        p: p2,
        w: w2,
        d: d2,
    });
    let w3 = Channel::new(vec![
        vec![0.8, 0.15, 0.05],
        vec![0.1, 0.75, 0.15],
        vec![0.05, 0.15, 0.8],
    ])
    .expect("valid channel");
    let p3 = Distribution::uniform(3);
    let d3 = bhattacharyya(&w3).expect("positive channel");
    let mut d_prod = 0.0;
    let (tab, _) = d3.additive_table().expect("additive");
    for a in 0..3 {
        for b in 0..3 {
            d_prod += p3.get(a) * p3.get(b) * tab[a * 3 + b];
        }
    }
    let cap3 = 0.8 * d_prod;
    let rl3 = rate_limit_primal(&p3, &d3, cap3, 0.0).expect("additive rate limit");
    out.push(CorpusInstance {
        name: "corpus-active-3x3".into(),
        q: Metric::ml(&w3),
        rate: 0.6 * rl3.raw,
        delta_cap: cap3,
        p: p3,
        w: w3,
        d: d3,
    });
    out
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn tiny_cfg(m: usize) -> RgvConfig {
    let t = TypeDescriptor::new(vec![2, 2], 4).expect("valid type");
    RgvConfig::new(t, m, hamming(2), 0.25, 0.05).expect("packing holds")
}

pub fn lemmas_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let t = TypeDescriptor::new(vec![2, 2], 4)?;
    let rep = check_packing(&t, 4, &hamming(2), 0.25, 0.05)?;
    checks.push(Check::new(
        "packing m=4",
        rep.holds,
        format!("log slack {:.4}", rep.log_slack),
    ));
    let rep = check_packing(&t, 6, &hamming(2), 0.25, 0.05)?;
    checks.push(Check::new(
        "packing m=6 fails",
        !rep.holds,
        format!("log slack {:.4}", rep.log_slack),
    ));
    for m in [2usize, 3] {
        let cfg = tiny_cfg(m);
        let law = exact_tuple_law(&cfg)?;
        checks.push(Check::new(
            format!("tuple law m={m} sums to one"),
            (law.total() - 1.0).abs() <= 1e-12,
            format!("total {:.15}", law.total()),
        ));
        for rep in [
            lemma1_check(&cfg)?,
            lemma2_check(&cfg)?,
            lemma4_check(&cfg)?,
        ] {
            checks.push(Check::new(
                format!("{} (m={m})", rep.name),
                rep.pass,
                rep.detail,
            ));
        }
        if m >= 3 {
            let rep = lemma3_check(&cfg)?;
            checks.push(Check::new(
                format!("{} (m={m})", rep.name),
                rep.pass,
                rep.detail,
            ));
        }
    }
    Ok(VerifyReport {
        suite: "lemmas".into(),
        checks,
    })
}

pub fn duality_suite(limit: Option<usize>) -> Result<VerifyReport> {
    let corpus = additive_corpus();
    let take = limit.unwrap_or(corpus.len()).min(corpus.len());
    let checks: Vec<Check> = exec::map_collect(ExecMode::Parallel, take, |i| {
        let inst = &corpus[i];
        let run = || -> Result<(f64, f64, f64, f64)> {
            let prob = PrimalProblem::new(
                inst.rate,
                inst.p.clone(),
                inst.w.clone(),
                inst.q.clone(),
                inst.d.clone(),
                inst.delta_cap,
                1e-4,
            )?;
            let primal = ergv_primal(&prob)?.value;
            let dual = ergv_dual(
                inst.rate,
                &inst.p,
                &inst.w,
                &inst.q,
                &inst.d,
                inst.delta_cap,
            )?
            .value;
            let rlp = rate_limit_primal(&inst.p, &inst.d, inst.delta_cap, 1e-3)?.raw;
            let rld = rate_limit_dual(&inst.p, &inst.d, inst.delta_cap, 1e-3)?.raw;
            Ok((primal, dual, rlp, rld))
        };
        match run() {
            Ok((primal, dual, rlp, rld)) => {
                let gap = (primal - dual).abs();
                let rl_gap = (rlp - rld).abs();
                Check::new(
                    inst.name.clone(),
                    gap <= 1e-2 && rl_gap <= 1e-3,
                    format!(
                        "E_primal {primal:.6} E_dual {dual:.6} (gap {gap:.2e}); \
                         rate limits {rlp:.6}/{rld:.6} (gap {rl_gap:.2e})"
                    ),
                )
            }
            Err(e) => Check::new(inst.name.clone(), false, format!("error: {e}")),
        }
    });
    Ok(VerifyReport {
        suite: "duality".into(),
        checks,
    })
}

pub fn recoveries_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();

    // (a) zero distance multiplier reproduces the independent random-coding
    // dual, pointwise
    let mut rng = ChaCha20Rng::seed_from_u64(771);
    let w23 = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.15, 0.6, 0.25]])?;
    let p2 = Distribution::new(vec![0.45, 0.55])?;
    let q23 = Metric::additive(vec![0.1, -0.4, 0.9, 0.3, 0.2, -0.7], 2, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let par = DualParams::new(
            rng.gen_range(0.0..1.0),
            0.0,
            rng.gen_range(0.0..4.0),
            vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        );
        let rate = rng.gen_range(0.01..0.4);
        let cap = rng.gen_range(-0.4..0.4);
        let lhs = dual_objective(&par, rate, &p2, &w23, &q23, &hamming(2), cap)?;
        let rhs = rc_dual_objective(par.rho, par.s, &par.a, rate, &p2, &w23, &q23)?;
        worst = worst.max((lhs - rhs).abs());
    }
    checks.push(Check::new(
        "zero multiplier = random-coding dual",
        worst <= 1e-6,
        format!("max pointwise gap {worst:.2e}"),
    ));

    // (b) the Chernoff-distance substitution reproduces the expurgated form
    let channels: Vec<(String, Channel, Distribution)> = vec![
        (
            "bsc(0.1)".into(),
            Channel::bsc(0.1)?,
            Distribution::uniform(2),
        ),
        (
            "random 3-ary".into(),
            Channel::new(vec![
                vec![0.6, 0.3, 0.1],
                vec![0.2, 0.5, 0.3],
                vec![0.25, 0.25, 0.5],
            ])?,
            Distribution::new(vec![0.3, 0.3, 0.4])?,
        ),
    ];
    for (cname, w, p) in &channels {
        let q = Metric::ml(w);
        for rate in [0.02, 0.05, 0.1, 0.15, 0.2] {
            let (value, par) = expurgated_dual(rate, p, w, &q)?;
            let d = chernoff(w, &q, par.s)?;
            let cap = expurgated_delta_cap(par.rho_prime, par.s, &par.a, rate, 0.0, p, w, &q)?;
            let dual_par = DualParams::new(
                1.0,
                par.rho_prime / (1.0 + par.rho_prime),
                par.s,
                par.a.clone(),
            );
            let substituted = dual_objective(&dual_par, rate, p, w, &q, &d, cap)?;
            checks.push(Check::new(
                format!("expurgated substitution {cname} R={rate}"),
                (substituted - value).abs() <= 1e-3,
                format!("expurgated {value:.6} vs substituted {substituted:.6}"),
            ));
            let cons = check_rate_condition_consistency(
                rate,
                p,
                w,
                &q,
                par.s,
                par.rho_prime,
                1e-3,
                &par.a,
            )?;
            checks.push(Check::new(
                format!("rate-condition reduction {cname} R={rate}"),
                cons.holds,
                format!("lhs {} rhs {}", cons.lhs, cons.rhs),
            ));
        }
    }
    Ok(VerifyReport {
        suite: "recoveries".into(),
        checks,
    })
}

pub fn optimality_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let w = Channel::bsc(0.1)?;
    let p = Distribution::uniform(2);
    let q = Metric::ml(&w);
    let delta = 1e-4;
    let rate = 0.05;
    let opt_prob = PrimalProblem::new(
        rate,
        p.clone(),
        w.clone(),
        q.clone(),
        neg_mutual_info(),
        -(rate + 2.0 * delta),
        delta,
    )?;
    let e_opt = ergv_primal(&opt_prob)?.value;
    let e_ck = ck_exponent(rate, &p, &w, &q)?;
    checks.push(Check::new(
        "neg-MI choice equals the benchmark exponent",
        (e_opt - e_ck).abs() <= 1e-2,
        format!("neg-MI {e_opt:.6} vs benchmark {e_ck:.6}"),
    ));

    let distances: Vec<(String, DistanceFn)> = vec![
        ("hamming".into(), hamming(2)),
        ("bhattacharyya".into(), bhattacharyya(&w)?),
        (
            "chernoff(0.3)+symmetrize".into(),
            symmetrize(&chernoff(&w, &q, 0.3)?),
        ),
    ];
    for (dname, d) in &distances {
        // the largest admissible threshold for this rate, by bisection on the
        // monotone rate limit
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let rl = rate_limit_primal(&p, d, mid, delta)?;
            if rl.raw >= rate {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cap_max = lo;
        let sweep: Vec<f64> = (0..10)
            .map(|i| cap_max * (0.05 + 0.90 * i as f64 / 9.0))
            .collect();
        let results = exec::map_collect(ExecMode::Parallel, sweep.len(), |i| {
            let cap = sweep[i];
            let prob =
                PrimalProblem::new(rate, p.clone(), w.clone(), q.clone(), d.clone(), cap, delta)
                    .and_then(|pr| ergv_primal(&pr));
            (cap, prob.map(|r| r.value))
        });
        for (cap, res) in results {
            match res {
                Ok(e_d) => checks.push(Check::new(
                    format!("{dname} cap={cap:.4}"),
                    e_opt >= e_d - 2e-3,
                    format!("E_d {e_d:.6} <= E_opt {e_opt:.6} + 2e-3"),
                )),
                Err(e) => checks.push(Check::new(
                    format!("{dname} cap={cap:.4}"),
                    false,
                    format!("error: {e}"),
                )),
            }
        }
    }
    Ok(VerifyReport {
        suite: "optimality".into(),
        checks,
    })
}

pub fn beta_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let w = Channel::bsc(0.1)?;
    let p = Distribution::uniform(2);
    let q = Metric::ml(&w);
    let delta = 1e-4;
    let rates = [0.02, 0.05, 0.08, 0.12, 0.16];
    for &rate in &rates {
        let d = crate::distance::beta_distance(rate, &w, &q)?;
        // largest threshold satisfying the rate condition, by bisection
        let admissible =
            |cap: f64| -> Result<bool> { Ok(rate_limit_primal(&p, &d, cap, delta)?.raw >= rate) };
        let mut lo = 0.0;
        let mut hi = 1.2;
        if !admissible(lo)? {
            checks.push(Check::new(
                format!("rate {rate}: no admissible threshold"),
                false,
                String::new(),
            ));
            continue;
        }
        for _ in 0..25 {
            let mid = 0.5 * (lo + hi);
            if admissible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cap = lo * 0.999;
        let rep = beta_exponent_check(rate, &p, &w, &q, cap, delta, 1e-3)?;
        checks.push(Check::new(
            format!("exponent >= threshold at R={rate}"),
            rep.holds,
            format!("exponent {:.6} vs threshold {cap:.6}", rep.exponent),
        ));
        // the achievable envelope matches the neg-MI one
        let opt_prob = PrimalProblem::new(
            rate,
            p.clone(),
            w.clone(),
            q.clone(),
            neg_mutual_info(),
            -(rate + 2.0 * delta),
            delta,
        )?;
        let e_opt = ergv_primal(&opt_prob)?.value;
        let e_beta = rep.exponent.max(cap);
        checks.push(Check::new(
            format!("envelope match at R={rate}"),
            (e_beta - e_opt).abs() <= 1e-2,
            format!("beta-envelope {e_beta:.6} vs neg-MI {e_opt:.6}"),
        ));
    }
    Ok(VerifyReport {
        suite: "beta".into(),
        checks,
    })
}

pub fn simulation_suite(trials: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let w = Channel::bsc(0.1)?;
    let q = Metric::ml(&w);

    for m in [2usize, 3] {
        let cfg = tiny_cfg(m);
        let pe = exact_pe(&cfg, &w, &q)?;
        if m == 2 {
            let pe2 = exact_pe_two_words(&cfg, &w, &q)?;
            checks.push(Check::new(
                "enumeration oracles agree (m=2)",
                (pe - pe2).abs() <= 1e-12,
                format!("{pe:.15} vs {pe2:.15}"),
            ));
        }
        let sim = monte_carlo(&cfg, &w, &q, trials, 2024)?;
        let sigma = (pe * (1.0 - pe) / trials as f64).sqrt();
        checks.push(Check::new(
            format!("monte carlo within 3 sigma (m={m})"),
            (sim.pe_estimate - pe).abs() <= 3.0 * sigma,
            format!(
                "mc {:.6} vs exact {pe:.6} (sigma {sigma:.2e})",
                sim.pe_estimate
            ),
        ));
        // tracked-constant sandwich
        let s_strict = rcu_like_with(&cfg, &w, &q, true)?;
        let s_loose = rcu_like_with(&cfg, &w, &q, false)?;
        let e = (-(cfg.n() as f64) * cfg.delta()).exp();
        let upper = s_loose / ((1.0 - e) * (1.0 - e));
        let dn = delta_n(cfg.n(), cfg.delta());
        let lower_factor = if dn.is_finite() {
            0.5 * (1.0 - 4.0 * dn * dn) * (-2.0 * dn).exp()
        } else {
            0.0
        };
        let lower = lower_factor * s_strict;
        checks.push(Check::new(
            format!("sandwich (m={m})"),
            lower <= pe + 1e-12 && pe <= upper + 1e-12,
            format!("{lower:.6} <= {pe:.6} <= {upper:.6}"),
        ));
    }

    // a larger two-word instance where the lower factor is strictly positive
    let t16 = TypeDescriptor::new(vec![8, 8], 16)?;
    let cfg16 = RgvConfig::new(t16, 2, hamming(2), 1.0 / 16.0, 0.08)?;
    let pe = exact_pe_two_words(&cfg16, &w, &q)?;
    let s_strict = rcu_like_with(&cfg16, &w, &q, true)?;
    let s_loose = rcu_like_with(&cfg16, &w, &q, false)?;
    let e = (-(cfg16.n() as f64) * cfg16.delta()).exp();
    let dn = delta_n(cfg16.n(), cfg16.delta());
    let lower = 0.5 * (1.0 - 4.0 * dn * dn) * (-2.0 * dn).exp() * s_strict;
    let upper = s_loose / ((1.0 - e) * (1.0 - e));
    checks.push(Check::new(
        "non-vacuous sandwich (n=16)",
        lower > 0.0 && lower <= pe && pe <= upper,
        format!("{lower:.6e} <= {pe:.6e} <= {upper:.6e}"),
    ));

    Ok(VerifyReport {
        suite: "simulation".into(),
        checks,
    })
}

pub fn decaen_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(88);
    let mut all_random = true;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..100 {
        let space = rng.gen_range(4..24);
        let mut measure: Vec<f64> = (0..space).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = measure.iter().sum();
        measure.iter_mut().for_each(|v| *v /= s);
        let n_events = rng.gen_range(2..8);
        let events: Vec<Vec<bool>> = (0..n_events)
            .map(|_| (0..space).map(|_| rng.gen::<f64>() < 0.35).collect())
            .collect();
        let rep = de_caen_check(&events, &measure);
        worst_margin = worst_margin.min(rep.union - rep.bound);
        all_random &= rep.holds;
    }
    checks.push(Check::new(
        "100 random finite event systems",
        all_random,
        format!("worst margin {worst_margin:.3e}"),
    ));

    // pairwise-error events from the tiny construction, conditioned on the
    // transmitted word and an output sequence
    let w = Channel::bsc(0.1)?;
    let q = Metric::ml(&w);
    let cfg = tiny_cfg(3);
    let law = exact_tuple_law(&cfg)?;
    let size = law.class.len();
    let mut all_rgv = true;
    for sent_idx in [0usize, 3] {
        // conditional law of the first two words given word 3 = sent
        let cond: Vec<(&Vec<u32>, f64)> = law
            .tuples
            .iter()
            .filter(|(t, _)| t[2] as usize == sent_idx)
            .map(|(t, p)| (t, *p))
            .collect();
        let total: f64 = cond.iter().map(|(_, p)| p).sum();
        let sent = law.class[sent_idx].clone();
        for ycode in 0..16usize {
            let y: Vec<usize> = (0..4).map(|k| (ycode >> k) & 1).collect();
            let q_sent = q.eval_seqs(&sent, &y, 2, 2);
            let beats: Vec<bool> = (0..size)
                .map(|i| q.eval_seqs(&law.class[i], &y, 2, 2) >= q_sent)
                .collect();
            let measure: Vec<f64> = cond.iter().map(|(_, p)| p / total).collect();
            let events: Vec<Vec<bool>> = (0..2)
                .map(|word| cond.iter().map(|(t, _)| beats[t[word] as usize]).collect())
                .collect();
            let rep = de_caen_check(&events, &measure);
            all_rgv &= rep.holds;
        }
    }
    checks.push(Check::new(
        "construction pairwise-error events",
        all_rgv,
        "conditioned on sent word and output",
    ));
    Ok(VerifyReport {
        suite: "decaen".into(),
        checks,
    })
}

pub fn cost_suite(trials: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let p = Distribution::uniform(2);

    // (a) exact convolution at blocklength 32
    let rep = property_a_check(&p, &hamming(2), 0.25, 0.01, 32)?;
    checks.push(Check::new(
        "pairwise-ball exponent (n=32)",
        rep.holds,
        format!("exact {:.6} vs bound {:.6}", rep.exact_exponent, rep.bound),
    ));

    // shared tiny instance for (b), (c), (d)
    let n = 10usize;
    let delta = 0.1;
    let cap = 0.1;
    let aux = vec![vec![0.3, -0.3]];
    let cfg = CostConfig::new(n, 2, p.clone(), aux, 0.2, hamming(2), cap, delta)?;

    // (b) acceptance-rate lower bound, Monte Carlo over shell proposals
    let (cb, _) = cost_generate(&cfg, 31)?;
    let prefix = cb.words()[0].clone();
    let mut rng = crate::codebook::derive_rng(32, 7);
    let mut accepted = 0u64;
    for _ in 0..trials {
        let x = sample_shell(&cfg, &mut rng)?;
        if cfg.d().eval_seqs(&x, &prefix, 2) > cfg.delta_cap() {
            accepted += 1;
        }
    }
    let mu_hat = accepted as f64 / trials as f64;
    let target = 1.0 - (-(n as f64) * delta).exp();
    let sigma = (mu_hat * (1.0 - mu_hat) / trials as f64).sqrt();
    checks.push(Check::new(
        "per-step acceptance lower bound",
        mu_hat >= target - 3.0 * sigma,
        format!("estimate {mu_hat:.4} vs bound {target:.4}"),
    ));

    // (c) and (d): exact brackets on the tiny shell instance
    let (shell, tuples) = cost_exact_tuple_law(&cfg)?;
    let s = shell.len();
    let mut marg = vec![vec![0.0; s]; cfg.m()];
    let mut pair = vec![0.0; s * s];
    let mut total = 0.0;
    for (t, pr) in &tuples {
        total += pr;
        for wi in 0..cfg.m() {
            marg[wi][t[wi] as usize] += pr;
        }
        pair[t[0] as usize * s + t[1] as usize] += pr;
    }
    checks.push(Check::new(
        "shell tuple law normalized",
        (total - 1.0).abs() <= 1e-10,
        format!("total {total:.12}"),
    ));
    let dn = delta_n(n, delta);
    let lo_factor = (1.0 - dn * dn) * (-dn).exp();
    let hi_factor = 1.0 / (1.0 - (-(n as f64) * delta).exp());
    let mut c_holds = true;
    for wi in 0..cfg.m() {
        for (i, (_, pshell)) in shell.iter().enumerate() {
            let m = marg[wi][i];
            if m < lo_factor * pshell - 1e-12 || m > hi_factor * pshell + 1e-12 {
                c_holds = false;
            }
        }
    }
    checks.push(Check::new(
        "per-word marginal bracket",
        c_holds,
        format!("factors [{lo_factor:.4}, {hi_factor:.4}]"),
    ));
    let mut d_holds = true;
    for i in 0..s {
        for j in 0..s {
            let pij = pair[i * s + j];
            let admissible = cfg.d().eval_seqs(&shell[i].0, &shell[j].0, 2) > cfg.delta_cap();
            let bound = if admissible {
                hi_factor * hi_factor * shell[i].1 * shell[j].1
            } else {
                0.0
            };
            if pij > bound + 1e-12 {
                d_holds = false;
            }
        }
    }
    checks.push(Check::new(
        "pairwise product bound",
        d_holds,
        format!("factor {:.4}", hi_factor * hi_factor),
    ));
    Ok(VerifyReport {
        suite: "cost".into(),
        checks,
    })
}

pub fn trend_suite(trials: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let w = Channel::bsc(0.1)?;
    let p = Distribution::uniform(2);
    let q = Metric::ml(&w);
    let d = bhattacharyya(&w)?;
    let rate = 0.1;
    let cap = 0.12;
    let delta = 0.01;
    let rl = rate_limit_primal(&p, &d, cap, delta)?;
    checks.push(Check::new(
        "trend configuration is admissible",
        rate <= rl.raw,
        format!("rate {rate} vs permitted {:.4}", rl.raw),
    ));
    let ns = [8usize, 12, 16, 20];
    let points: Vec<(usize, crate::simulate::SimResult)> = ns
        .iter()
        .map(|&n| {
            let t = crate::prob::quantize_type(&p, n).expect("uniform binary quantizes");
            let m = ((rate * n as f64).exp().floor() as usize).max(2);
            let cfg = RgvConfig::new(t, m, d.clone(), cap, delta).expect("packing holds");
            let sim = monte_carlo(&cfg, &w, &q, trials, 77).expect("simulation runs");
            (n, sim)
        })
        .collect();
    let fit = empirical_exponent(&points);
    let prob = PrimalProblem::new(rate, p, w, q, d, cap, delta)?;
    let e_rgv = ergv_primal(&prob)?.value;
    match fit.slope {
        Some(slope) => {
            checks.push(Check::new(
                "fitted slope is positive",
                slope > 0.0,
                format!("slope {slope:.4} +/- {:.4}", fit.stderr),
            ));
            checks.push(Check::new(
                "slope within the achievability band",
                slope <= e_rgv + 0.1,
                format!("slope {slope:.4} vs exponent {e_rgv:.4} + 0.1"),
            ));
        }
        None => checks.push(Check::new(
            "fit produced a slope",
            false,
            format!("flagged points: {:?}", fit.flagged),
        )),
    }
    Ok(VerifyReport {
        suite: "trend".into(),
        checks,
    })
}
