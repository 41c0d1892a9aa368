//! Run configuration: a single JSON document describing the channel, input
//! distribution, decoding metric, distance function, thresholds, and the
//! rate point or grid. Parse errors carry the line and column.

use rgv::distance::{self, DistanceFn};
use rgv::metric::Metric;
use rgv::prob::{Channel, Distribution};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelSpec,
    pub input: InputSpec,
    pub metric: MetricSpec,
    pub distance: DistanceSpec,
    pub delta_cap: f64,
    pub delta: f64,
    pub rate: RateSpec,
    #[serde(default)]
    pub code: Option<CodeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(rename = "P")]
    pub p: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub kind: String,
    #[serde(default)]
    pub table: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceSpec {
    pub kind: String,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub symmetrize: Option<bool>,
    #[serde(default)]
    pub table: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RateSpec {
    Single { single: f64 },
    Grid { grid: GridRange },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    pub messages: usize,
}

pub struct Parsed {
    pub p: Distribution,
    pub w: Channel,
    pub q: Metric,
    pub delta_cap: f64,
    pub delta: f64,
    pub rates: Vec<f64>,
    pub distance_spec: DistanceSpec,
    pub code: Option<CodeSpec>,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn build(self) -> Result<Parsed, String> {
        let w = Channel::new(self.channel.w).map_err(|e| e.to_string())?;
        let p = Distribution::new(self.input.p).map_err(|e| e.to_string())?;
        if p.len() != w.nx() {
            return Err("input.P length must match the channel row count".into());
        }
        let q = match self.metric.kind.as_str() {
            "ml" => Metric::ml(&w),
            "additive" => {
                let rows = self
                    .metric
                    .table
                    .ok_or_else(|| "metric.kind additive needs metric.table".to_string())?;
                flatten_table(&rows, w.nx(), w.ny()).map(|t| Metric::additive(t, w.nx(), w.ny()))?
            }
            other => return Err(format!("unknown metric kind `{other}` (ml, additive)")),
        };
        let rates = match self.rate {
            RateSpec::Single { single } => vec![single],
            RateSpec::Grid { grid } => {
                if grid.points < 2 {
                    return Err("rate.grid.points must be at least 2".into());
                }
                (0..grid.points)
                    .map(|i| {
                        grid.start + (grid.stop - grid.start) * i as f64 / (grid.points - 1) as f64
                    })
                    .collect()
            }
        };
        if rates.iter().any(|&r| !(r > 0.0)) {
            return Err("rates must be positive".into());
        }
        Ok(Parsed {
            p,
            w,
            q,
            delta_cap: self.delta_cap,
            delta: self.delta,
            rates,
            distance_spec: self.distance,
            code: self.code,
        })
    }
}

fn flatten_table(rows: &[Vec<f64>], nx: usize, ny: usize) -> Result<Vec<f64>, String> {
    if rows.len() != nx || rows.iter().any(|r| r.len() != ny) {
        return Err(format!("table must be {nx} rows of {ny} entries"));
    }
    Ok(rows.iter().flatten().copied().collect())
}

impl Parsed {
    /// Builds the distance function; the rate matters only for the
    /// inner-optimization (`beta`) kind.
    pub fn distance_at(&self, rate: f64) -> Result<DistanceFn, String> {
        let nx = self.p.len();
        let spec = &self.distance_spec;
        let base = match spec.kind.as_str() {
            "hamming" => distance::hamming(nx),
            "bhattacharyya" => distance::bhattacharyya(&self.w).map_err(|e| e.to_string())?,
            "chernoff" => {
                let s = spec
                    .s
                    .ok_or_else(|| "distance.kind chernoff needs distance.s".to_string())?;
                distance::chernoff(&self.w, &self.q, s).map_err(|e| e.to_string())?
            }
            "neg_mutual_info" => distance::neg_mutual_info(),
            "equivocation" => distance::equivocation(),
            "additive" => {
                let rows = spec
                    .table
                    .as_ref()
                    .ok_or_else(|| "distance.kind additive needs distance.table".to_string())?;
                let t = flatten_table(rows, nx, nx)?;
                DistanceFn::additive(t, nx).map_err(|e| e.to_string())?
            }
            "beta" => distance::beta_distance(rate, &self.w, &self.q).map_err(|e| e.to_string())?,
            other => {
                return Err(format!(
                    "unknown distance kind `{other}` (hamming, bhattacharyya, chernoff, \
                     neg_mutual_info, equivocation, additive, beta)"
                ))
            }
        };
        if spec.symmetrize.unwrap_or(false) {
            Ok(distance::symmetrize(&base))
        } else {
            Ok(base)
        }
    }
}
