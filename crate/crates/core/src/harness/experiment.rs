use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::decimal::format_rational;
use crate::exact::{parse_rational, rat_string, Rational};
use crate::oracle::EnumerationBudget;

use super::document::SCHEMA_VERSION;
use super::generate::{generate, BetaMode, GeneratorConfig, WeightMode};
use super::pipeline::{run_pipeline, PipelineOptions, ReportDocument, WidthSummary};

pub const CSV_HEADER: [&str; 16] = [
    "n",
    "mode",
    "param",
    "big_m",
    "instances",
    "hypothesis",
    "failed",
    "range_iwidth_le_1",
    "range_frac_iwidth_le_1",
    "range_max_iwidth",
    "range_tightness",
    "range_tightness_approx",
    "null_instances",
    "null_iwidth_le_1",
    "null_tightness",
    "null_tightness_approx",
];

fn default_depth() -> usize {
    3
}

/// A batch sweep. Each `n` is crossed with every density and every explicit `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    /// Rationals such as `"2/5"` or `"0.4"`.
    #[serde(default)]
    pub densities: Vec<String>,
    #[serde(default)]
    pub big_m: Vec<String>,
    pub count: usize,
    pub vmax: String,
    pub seed: u64,
    #[serde(default)]
    pub beta: BetaMode,
    #[serde(default)]
    pub require_hypothesis: bool,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub oracle: bool,
}

/// Aggregates for one `(n, parameter)` cell. Tightness is the mean of
/// `iwidth / bound` over instances whose bound is positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub mode: String,
    pub param: String,
    pub big_m: String,
    pub instances: usize,
    pub hypothesis: usize,
    pub failed: usize,
    pub range_iwidth_le_1: usize,
    pub range_frac_iwidth_le_1: String,
    pub range_max_iwidth: String,
    pub range_tightness: String,
    pub range_tightness_approx: String,
    pub null_instances: usize,
    pub null_iwidth_le_1: usize,
    pub null_tightness: String,
    pub null_tightness_approx: String,
}

impl ExperimentRow {
    fn record(&self) -> [String; 16] {
        [
            self.n.to_string(),
            self.mode.clone(),
            self.param.clone(),
            self.big_m.clone(),
            self.instances.to_string(),
            self.hypothesis.to_string(),
            self.failed.to_string(),
            self.range_iwidth_le_1.to_string(),
            self.range_frac_iwidth_le_1.clone(),
            self.range_max_iwidth.clone(),
            self.range_tightness.clone(),
            self.range_tightness_approx.clone(),
            self.null_instances.to_string(),
            self.null_iwidth_le_1.to_string(),
            self.null_tightness.clone(),
            self.null_tightness_approx.clone(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
    #[serde(skip)]
    pub reports: Vec<ReportDocument>,
}

impl ExperimentSummary {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.failed > 0)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.record()).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summaries always serialize");
        s.push('\n');
        s
    }
}

struct Cell {
    n: usize,
    mode: WeightMode,
    param: String,
}

fn cells(config: &ExperimentConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for &n in &config.n {
        for d in &config.densities {
            out.push(Cell { n, mode: WeightMode::Density(parse_rational(d).ok_or_else(|| Error::Invalid(format!("density: {d:?} is not a rational")))?), param: d.clone() });
        }
        for m in &config.big_m {
            let big: BigInt = m.trim().parse().map_err(|_| Error::Invalid(format!("M: {m:?} is not a decimal integer")))?;
            out.push(Cell { n, mode: WeightMode::BigM(big), param: m.clone() });
        }
    }
    Ok(out)
}

fn int_field(s: &str) -> BigInt {
    s.parse().expect("report integers are decimal")
}

/// `(iwidth <= 1, iwidth, iwidth / bound when bound > 0)`.
fn width_stats(w: &WidthSummary) -> (bool, BigInt, Option<Rational>) {
    let iw = int_field(&w.iwidth_unit_reformed);
    let bound = int_field(&w.width_bound);
    let tight = (!bound.is_zero()).then(|| Rational::new(iw.clone(), bound));
    (iw <= BigInt::one(), iw, tight)
}

fn mean(xs: &[Rational]) -> (String, String) {
    if xs.is_empty() {
        return (String::new(), String::new());
    }
    let m = xs.iter().fold(Rational::zero(), |s, x| s + x) / Rational::from_integer(BigInt::from(xs.len()));
    (rat_string(&m), format_rational(&m))
}

fn aggregate(cell: &Cell, big_m: &BigInt, reports: &[ReportDocument]) -> ExperimentRow {
    let mut range_le_1 = 0;
    let mut range_max = BigInt::zero();
    let mut range_tight = Vec::new();
    let mut null_instances = 0;
    let mut null_le_1 = 0;
    let mut null_tight = Vec::new();
    for r in reports {
        let (le1, iw, t) = width_stats(&r.range.widths);
        range_le_1 += usize::from(le1);
        range_max = range_max.max(iw);
        range_tight.extend(t);
        if let Some(null) = &r.null {
            let (le1, _, t) = width_stats(&null.widths);
            null_instances += 1;
            null_le_1 += usize::from(le1);
            null_tight.extend(t);
        }
    }
    let frac = if reports.is_empty() {
        String::new()
    } else {
        format_rational(&Rational::new(BigInt::from(range_le_1), BigInt::from(reports.len())))
    };
    let (range_tightness, range_tightness_approx) = mean(&range_tight);
    let (null_tightness, null_tightness_approx) = mean(&null_tight);
    ExperimentRow {
        n: cell.n,
        mode: match cell.mode {
            WeightMode::BigM(_) => "bigM".into(),
            WeightMode::Density(_) => "density".into(),
        },
        param: cell.param.clone(),
        big_m: big_m.to_string(),
        instances: reports.len(),
        hypothesis: reports.iter().filter(|r| r.hypothesis).count(),
        failed: reports.iter().filter(|r| !r.passed()).count(),
        range_iwidth_le_1: range_le_1,
        range_frac_iwidth_le_1: frac,
        range_max_iwidth: if reports.is_empty() { String::new() } else { range_max.to_string() },
        range_tightness,
        range_tightness_approx,
        null_instances,
        null_iwidth_le_1: null_le_1,
        null_tightness,
        null_tightness_approx,
    }
}

/// Runs every cell; cell `i` draws from ChaCha stream `i`. Instances run in
/// parallel and are merged back in generation order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let vmax: BigInt = config.vmax.trim().parse().map_err(|_| Error::Invalid(format!("vmax: {:?} is not a decimal integer", config.vmax)))?;
    let cells = cells(config)?;
    let opts = PipelineOptions { depth: config.depth, oracle: config.oracle, budget: EnumerationBudget::default(), timings: false };
    let mut batches = Vec::with_capacity(cells.len());
    for (stream, cell) in cells.iter().enumerate() {
        let gen = GeneratorConfig {
            n: cell.n,
            mode: cell.mode.clone(),
            vmax: vmax.clone(),
            beta: config.beta,
            require_hypothesis: config.require_hypothesis,
            seed: config.seed,
            stream: stream as u64,
        };
        let big_m = gen.big_m()?;
        let docs = generate(&gen, config.count)?;
        batches.push((big_m, docs));
    }
    let jobs: Vec<(usize, &_)> = batches.iter().enumerate().flat_map(|(c, (_, docs))| docs.iter().map(move |d| (c, d))).collect();
    let reports: Vec<(usize, ReportDocument)> = jobs
        .par_iter()
        .map(|(c, doc)| Ok((*c, run_pipeline(&doc.to_instance()?, &opts)?)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    if config.count > 0 {
        for (c, (cell, (big_m, _))) in cells.iter().zip(&batches).enumerate() {
            let mine: Vec<ReportDocument> = reports.iter().filter(|(i, _)| *i == c).map(|(_, r)| r.clone()).collect();
            rows.push(aggregate(cell, big_m, &mine));
        }
    }
    Ok(ExperimentSummary {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        rows,
        reports: reports.into_iter().map(|(_, r)| r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(count: usize) -> ExperimentConfig {
        ExperimentConfig {
            n: vec![4, 5],
            densities: vec![],
            big_m: vec![(BigInt::one() << 40u32).to_string()],
            count,
            vmax: "3".into(),
            seed: 7,
            beta: BetaMode::Equal,
            require_hypothesis: true,
            depth: 2,
            oracle: false,
        }
    }

    #[test]
    fn empty_count_gives_header_only() {
        let s = run_experiment(&config(0)).unwrap();
        assert!(s.rows.is_empty());
        assert_eq!(s.to_csv(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn huge_weights_stay_within_bounds() {
        let s = run_experiment(&config(10)).unwrap();
        assert_eq!(s.rows.len(), 2);
        assert!(!s.failed());
        for r in &s.rows {
            assert_eq!(r.instances, 10);
            assert_eq!(r.hypothesis, 10);
            assert_eq!(r.null_instances, 10);
        }
        for rep in &s.reports {
            let w = &rep.range.widths;
            assert!(int_field(&w.iwidth_unit_reformed) <= int_field(&w.width_bound));
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let mut c = config(4);
        c.densities = vec!["1/2".into()];
        c.require_hypothesis = false;
        c.beta = BetaMode::Range;
        let first = run_experiment(&c).unwrap();
        let second = run_experiment(&c).unwrap();
        assert_eq!(first.to_csv(), second.to_csv());
        assert_eq!(first.to_json(), second.to_json());
        assert_eq!(first.rows.len(), 4);
    }

    #[test]
    fn config_parses_with_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"n":[4],"densities":["0.4"],"count":2,"vmax":"5","seed":1}"#).unwrap();
        assert_eq!(c.depth, 3);
        assert_eq!(c.beta, BetaMode::Range);
        assert!(run_experiment(&c).is_ok());
    }
}
