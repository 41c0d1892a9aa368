//! Type-dependent decoding metrics.
//!
//! A metric scores a candidate codeword against the received sequence through
//! their joint empirical distribution. The additive kind is an expectation of
//! a single-letter table; maximum-likelihood is the additive kind with table
//! `log W(y|x)` (entries may be `-inf` when the channel has zero transitions,
//! which is an in-band value here but rules the metric out of the dual-form
//! machinery, which needs bounded tables).

use crate::prob::{Channel, JointXY};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum MetricKind {
    /// Expectation of a single-letter table `q(x, y)` under the joint type.
    Additive {
        table: Vec<f64>,
        nx: usize,
        ny: usize,
    },
    /// Maximum likelihood: additive with table `log W(y|x)`.
    Ml {
        table: Vec<f64>,
        nx: usize,
        ny: usize,
    },
    /// Arbitrary type-dependent evaluator.
    General(Arc<dyn Fn(&JointXY) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct Metric {
    kind: MetricKind,
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MetricKind::Additive { nx, ny, .. } => write!(f, "Metric::additive({nx}x{ny})"),
            MetricKind::Ml { nx, ny, .. } => write!(f, "Metric::ml({nx}x{ny})"),
            MetricKind::General(_) => write!(f, "Metric::general"),
        }
    }
}

impl Metric {
    /// Additive metric from a row-major single-letter table (`nx` rows of
    /// `ny` scores).
    pub fn additive(table: Vec<f64>, nx: usize, ny: usize) -> Self {
        assert_eq!(table.len(), nx * ny, "metric table shape mismatch");
        Self {
            kind: MetricKind::Additive { table, nx, ny },
        }
    }

    /// Maximum-likelihood metric for `w`. Zero transitions score `-inf`.
    pub fn ml(w: &Channel) -> Self {
        let (nx, ny) = (w.nx(), w.ny());
        let table = (0..nx)
            .flat_map(|x| (0..ny).map(move |y| (x, y)))
            .map(|(x, y)| {
                let p = w.get(x, y);
                if p > 0.0 {
                    p.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        Self {
            kind: MetricKind::Ml { table, nx, ny },
        }
    }

    /// Arbitrary type-dependent metric.
    pub fn general(f: impl Fn(&JointXY) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: MetricKind::General(Arc::new(f)),
        }
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    /// The single-letter table when the metric is additive (ML included).
    pub fn additive_table(&self) -> Option<(&[f64], usize, usize)> {
        match &self.kind {
            MetricKind::Additive { table, nx, ny } | MetricKind::Ml { table, nx, ny } => {
                Some((table, *nx, *ny))
            }
            MetricKind::General(_) => None,
        }
    }

    pub fn is_additive(&self) -> bool {
        self.additive_table().is_some()
    }

    /// Additive with every entry finite — the boundedness the dual form needs.
    pub fn is_bounded_additive(&self) -> bool {
        self.additive_table()
            .map(|(t, _, _)| t.iter().all(|v| v.is_finite()))
            .unwrap_or(false)
    }

    /// Single-letter score; only meaningful for additive kinds.
    #[inline]
    pub fn letter(&self, x: usize, y: usize) -> f64 {
        match &self.kind {
            MetricKind::Additive { table, ny, .. } | MetricKind::Ml { table, ny, .. } => {
                table[x * ny + y]
            }
            MetricKind::General(_) => panic!("letter() called on a general metric"),
        }
    }

    /// Evaluates the metric on a joint (input, output) distribution.
    pub fn eval(&self, joint: &JointXY) -> f64 {
        match &self.kind {
            MetricKind::Additive { table, nx, ny } | MetricKind::Ml { table, nx, ny } => {
                let mut acc = 0.0;
                for x in 0..*nx {
                    for y in 0..*ny {
                        let p = joint.get(x, y);
                        if p > 0.0 {
                            acc += p * table[x * ny + y];
                        }
                    }
                }
                acc
            }
            MetricKind::General(f) => f(joint),
        }
    }

    /// Evaluates the metric on a joint type given as cell counts over
    /// `X x Y`, in a canonical order-independent summation: every path that
    /// compares metric values (the decoder, the exact enumeration oracles)
    /// goes through this, so ties are exact float equalities everywhere.
    pub fn eval_counts(&self, counts: &[usize], nx: usize, ny: usize, n: usize) -> f64 {
        match &self.kind {
            MetricKind::Additive { table, ny: tny, .. } | MetricKind::Ml { table, ny: tny, .. } => {
                let mut acc = 0.0;
                for a in 0..nx {
                    for b in 0..ny {
                        let c = counts[a * ny + b];
                        if c > 0 {
                            acc += c as f64 * table[a * tny + b];
                        }
                    }
                }
                acc / n as f64
            }
            MetricKind::General(_) => {
                let joint: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
                self.eval(&JointXY::new(joint, nx, ny).expect("joint type is a distribution"))
            }
        }
    }

    /// Evaluates the metric on a pair of sequences via their joint type.
    pub fn eval_seqs(&self, x: &[usize], y: &[usize], nx: usize, ny: usize) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let mut counts = vec![0usize; nx * ny];
        for (&a, &b) in x.iter().zip(y) {
            counts[a * ny + b] += 1;
        }
        self.eval_counts(&counts, nx, ny, x.len())
    }
}

/// Evaluates a metric on a joint distribution over inputs and outputs.
pub fn eval_metric(q: &Metric, joint: &JointXY) -> f64 {
    q.eval(joint)
}
