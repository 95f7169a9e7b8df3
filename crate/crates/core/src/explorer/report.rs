use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sweep::{Cell, Source};
use super::{Functional, SweepConfig};
use crate::caratheodory::{AtomicMeasure, RNG_NAME};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "q,alpha,mu_re,mu_im,functional,empirical_max,stated_bound,conjectural,slack,violated";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub config: SweepConfig,
    pub rng: String,
}

/// Value of one injected closed-form extremal in a cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalValue {
    pub source: Source,
    pub value: f64,
    pub slack: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub q: f64,
    pub alpha: f64,
    pub mu: Option<[f64; 2]>,
    pub functional: Functional,
    pub empirical_max: f64,
    pub stated_bound: f64,
    pub conjectural: bool,
    /// `stated_bound - empirical_max`.
    pub slack: f64,
    pub violated: bool,
    pub argmax_measure: AtomicMeasure,
    pub argmax_source: Source,
    /// Index of the winning sample; `None` for an injected extremal.
    pub argmax_sample: Option<usize>,
    pub extremals: Vec<ExtremalValue>,
}

impl CellRecord {
    pub fn extremal(&self, source: Source) -> Option<&ExtremalValue> {
        self.extremals.iter().find(|e| e.source == source)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ConfigEcho,
    pub cells: Vec<CellRecord>,
    pub version: String,
}

/// Result of re-evaluating a cell's argmax.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplayCheck {
    pub value: f64,
    pub abs_diff: f64,
}

impl SweepReport {
    pub(crate) fn new(config: SweepConfig, cells: Vec<CellRecord>) -> Self {
        Self {
            config: ConfigEcho {
                config,
                rng: RNG_NAME.to_string(),
            },
            cells,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Canonical JSON: sorted keys, shortest round-trip floats, no whitespace.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        serde_json::to_string(&value).expect("value is serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("bad report JSON: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let (re, im) = match c.mu {
                Some([re, im]) => (re.to_string(), im.to_string()),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                c.q,
                c.alpha,
                re,
                im,
                c.functional.name(),
                c.empirical_max,
                c.stated_bound,
                c.conjectural,
                c.slack,
                c.violated
            ));
        }
        out
    }

    /// Replays every cell; see [`replay_cell`].
    pub fn replay(&self) -> Result<Vec<ReplayCheck>> {
        self.cells
            .iter()
            .map(|c| replay_cell(&self.config.config, c))
            .collect()
    }
}

/// Re-evaluates the functional at the recorded argmax.
pub fn replay_cell(cfg: &SweepConfig, cell: &CellRecord) -> Result<ReplayCheck> {
    let mu = cell.mu.map(|[re, im]| Complex64::new(re, im));
    let c = Cell::new(cell.functional, cell.q, cell.alpha, mu, cfg.order, cfg.n_check)?;
    let value = c.eval(cell.argmax_source, &cell.argmax_measure)?;
    Ok(ReplayCheck {
        value,
        abs_diff: (value - cell.empirical_max).abs(),
    })
}
