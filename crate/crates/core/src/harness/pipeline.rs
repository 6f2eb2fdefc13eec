use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::ser::Serializer;
use serde::Serialize;

use crate::approx::{
    certify_range_direction, certify_null_direction, certify_range_block, certify_null_block, check_parallelness, decompose, extract_null_direction,
    extract_range_direction, null_inverse, successive, Decomposition, RowWindow,
};
use crate::error::Result;
use crate::exact::decimal::{format_rational, format_sqrt};
use crate::exact::{rat_string, to_rat_vec, unit_vec, IntMat, Rational};
use crate::lattice::{completeness_certificate, is_lll_reduced, stacked};
use crate::oracle::{bijection_null, bijection_range, node_count, vertex_enum_optimize, EnumerationBudget};
use crate::reform::{build_nullspace, build_rangespace, check_hypothesis, density_approx, KnapsackInstance};
use crate::width::{branch_bound, is_signed_unit, iwidth, lp_optimize, width_bound_null, width_bound_range, Polytope, Sense};

/// A check outcome that may not apply to the instance at hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b { Verdict::Pass } else { Verdict::Fail }
    }

    pub fn when(applicable: bool, b: impl FnOnce() -> bool) -> Self {
        if applicable { Verdict::from_bool(b()) } else { Verdict::NotApplicable }
    }

    pub fn failed(self) -> bool {
        self == Verdict::Fail
    }
}

impl From<Option<bool>> for Verdict {
    fn from(b: Option<bool>) -> Self {
        b.map_or(Verdict::NotApplicable, Verdict::from_bool)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Pass => s.serialize_bool(true),
            Verdict::Fail => s.serialize_bool(false),
            Verdict::NotApplicable => s.serialize_str("n/a"),
        }
    }
}

/// Exact value with a 6-significant-digit rendering for display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Number {
    pub exact: String,
    pub approx: String,
}

impl Number {
    pub fn of(q: &Rational) -> Self {
        Number { exact: rat_string(q), approx: format_rational(q) }
    }

    /// `sqrt(q)`, exact as the square.
    pub fn sqrt_of(q: &Rational) -> Self {
        Number { exact: format!("sqrt({})", rat_string(q)), approx: format_sqrt(q) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Successive approximation depth; `k = 1..=depth` are certified.
    pub depth: usize,
    pub oracle: bool,
    pub budget: EnumerationBudget,
    pub timings: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { depth: 3, oracle: false, budget: EnumerationBudget::default(), timings: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    pub p: Vec<String>,
    pub lambda: Number,
    pub r: Vec<Number>,
    /// `|r| / lambda`.
    pub ratio: Number,
    pub sin: Number,
}

impl DirectionReport {
    fn of(d: &Decomposition) -> Self {
        DirectionReport {
            p: d.p.iter().map(ToString::to_string).collect(),
            lambda: Number::of(&d.lambda),
            r: d.r.iter().map(Number::of).collect(),
            ratio: Number::sqrt_of(&d.ratio_sq()),
            sin: Number::sqrt_of(&d.sin_sq()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParallelnessReport {
    pub sin_le_ratio: Verdict,
    pub sign_agree: Verdict,
    pub rounding: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessiveReport {
    pub k: usize,
    pub lambda_sq: Number,
    pub ratio: Number,
    pub r_norm_sq: Number,
    pub items: BTreeMap<&'static str, bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WidthSummary {
    /// Integer width along the last unit vector of the original system.
    pub iwidth_unit_original: String,
    /// Integer width along the last unit vector of the reformulation.
    pub iwidth_unit_reformed: String,
    pub iwidth_direction: String,
    pub width_bound: String,
    /// `iwidth_unit_reformed <= width_bound`.
    pub width_bound_holds: bool,
    pub branch_bound: Option<String>,
    /// `iwidth_direction <= branch_bound`; n/a when `p` has a negative entry.
    pub branch_bound_holds: Verdict,
    pub transference_unit: bool,
    pub transference_equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeReport {
    pub u: Vec<Vec<String>>,
    pub u_inv: Vec<Vec<String>>,
    pub au: Vec<String>,
    pub lll_reduced: bool,
    pub sublattice_det: bool,
    pub direction: DirectionReport,
    pub bounds: BTreeMap<&'static str, bool>,
    pub parallelness: ParallelnessReport,
    pub successive: Vec<SuccessiveReport>,
    pub widths: WidthSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct NullReport {
    pub v_basis: Vec<Vec<String>>,
    pub x_beta: Vec<String>,
    pub b: Vec<String>,
    pub lll_reduced: bool,
    pub complete: bool,
    pub direction: DirectionReport,
    pub bounds: BTreeMap<&'static str, bool>,
    pub parallelness: ParallelnessReport,
    pub successive: Vec<SuccessiveReport>,
    pub widths: WidthSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub bijection_range: Verdict,
    pub bijection_null: Verdict,
    /// Vertex enumeration agrees with the simplex on `e_n` over the original LP.
    pub lp_agrees: Verdict,
    /// Branching node count from enumeration equals the simplex integer width along `p`.
    pub node_count_agrees: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub n: usize,
    pub a: Vec<String>,
    pub v: Vec<String>,
    pub beta1: String,
    pub beta2: String,
    pub density: String,
    pub hypothesis: bool,
    pub range: RangeReport,
    /// Absent unless `beta1 = beta2` and `n >= 2`.
    pub null: Option<NullReport>,
    pub oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<&'static str, f64>>,
    /// Applicable certified inequalities that failed; empty on success.
    pub failures: Vec<String>,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

fn strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn matrix_strings(m: &IntMat) -> Vec<Vec<String>> {
    m.row_vecs().iter().map(|r| strings(r)).collect()
}

fn parallelness_report(a: &[BigInt], p: &[BigInt]) -> Result<ParallelnessReport> {
    let c = check_parallelness(a, p)?;
    Ok(ParallelnessReport {
        sin_le_ratio: Verdict::from_bool(c.sin_le_ratio),
        sign_agree: c.sign_agree.into(),
        rounding: c.rounding.into(),
    })
}

struct Clock {
    on: bool,
    last: Instant,
    laps: BTreeMap<&'static str, f64>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock { on, last: Instant::now(), laps: BTreeMap::new() }
    }

    fn lap(&mut self, name: &'static str) {
        if self.on {
            let now = Instant::now();
            self.laps.insert(name, (now - self.last).as_secs_f64() * 1e3);
            self.last = now;
        }
    }
}

fn record(failures: &mut Vec<String>, applicable: bool, ok: bool, what: impl Into<String>) {
    if applicable && !ok {
        failures.push(what.into());
    }
}

fn widths(
    inst: &KnapsackInstance,
    dec: &Decomposition,
    reformed: &Polytope,
    unit: Vec<BigInt>,
    width_bound: BigInt,
    transference_unit: bool,
) -> Result<WidthSummary> {
    let n = inst.n();
    let original = Polytope::knapsack(inst);
    let iw_unit_orig = iwidth(&unit_vec(n, n - 1), &original)?;
    let iw_unit_ref = iwidth(&unit, reformed)?;
    let iw_dir = iwidth(&dec.p, &original)?;
    let bb = if dec.p.iter().any(Signed::is_negative) {
        None
    } else {
        Some(branch_bound(dec, inst.v(), inst.beta1(), inst.beta2())?)
    };
    Ok(WidthSummary {
        width_bound_holds: iw_unit_ref <= width_bound,
        branch_bound_holds: Verdict::when(bb.is_some(), || bb.as_ref().is_some_and(|b| iw_dir <= *b)),
        branch_bound: bb.map(|b| b.to_string()),
        transference_unit,
        transference_equal: iw_dir == iw_unit_ref,
        iwidth_unit_original: iw_unit_orig.to_string(),
        iwidth_unit_reformed: iw_unit_ref.to_string(),
        iwidth_direction: iw_dir.to_string(),
        width_bound: width_bound.to_string(),
    })
}

/// Reformulates, extracts, certifies and measures one instance.
pub fn run_pipeline(inst: &KnapsackInstance, opts: &PipelineOptions) -> Result<ReportDocument> {
    let a = inst.a();
    let n = inst.n();
    let hyp = check_hypothesis(a);
    let mut failures = Vec::new();
    let mut clock = Clock::new(opts.timings);

    let rr = build_rangespace(inst)?;
    let lll_reduced = is_lll_reduced(&stacked(a).mul(&rr.u)?)?;
    let sublattice_det = rr.reduction.sublattice_checks()?.into_iter().all(|b| b);
    record(&mut failures, true, lll_reduced, "range: [a; I] U is not LLL-reduced");
    record(&mut failures, true, sublattice_det, "range: sublattice determinant bound");
    clock.lap("rangespace");

    let dec = decompose(a, &extract_range_direction(&rr))?;
    let range_items = certify_range_direction(a, &dec)?;
    for (name, ok) in [("i1", range_items.i1), ("i2", range_items.i2), ("i3", range_items.i3)] {
        record(&mut failures, hyp, ok, format!("range direction bound {name}"));
    }
    let parallelness = parallelness_report(a, &dec.p)?;
    for (name, v) in [("sin", parallelness.sin_le_ratio), ("sign", parallelness.sign_agree), ("rounding", parallelness.rounding)] {
        record(&mut failures, true, !v.failed(), format!("range direction parallelness {name}"));
    }
    let mut range_succ = Vec::new();
    for k in 1..=opts.depth.min(n) {
        let s = successive(&rr.u_inv, RowWindow::Last, a, k)?;
        let c = certify_range_block(a, &s)?;
        let items = BTreeMap::from([("i1", c.items.i1), ("i2", c.items.i2), ("i3", c.items.i3), ("sin", c.sin)]);
        for (name, ok) in &items {
            record(&mut failures, hyp, *ok, format!("range successive k={k} {name}"));
        }
        if k == 1 {
            record(&mut failures, true, c.items == range_items, "range successive k=1 differs from the single-row path");
        }
        range_succ.push(SuccessiveReport {
            k,
            lambda_sq: Number::of(&s.lambda_sq),
            ratio: Number::sqrt_of(&s.ratio_sq()),
            r_norm_sq: Number::of(&s.r_norm_sq),
            items,
        });
    }
    clock.lap("range_certify");

    let reformed = Polytope::rangespace(&rr)?;
    let pu = rr.u.vec_mul(&dec.p)?;
    let range_widths = widths(
        inst,
        &dec,
        &reformed,
        unit_vec(n, n - 1),
        width_bound_range(a, inst.v(), inst.beta1(), inst.beta2())?,
        is_signed_unit(&pu, n - 1),
    )?;
    record(&mut failures, hyp, range_widths.width_bound_holds, "range integer width exceeds the main bound");
    record(&mut failures, true, !range_widths.branch_bound_holds.failed(), "range direction exceeds the branching bound");
    record(
        &mut failures,
        true,
        range_widths.transference_unit && range_widths.transference_equal,
        "range transference",
    );
    clock.lap("range_widths");

    let range = RangeReport {
        u: matrix_strings(&rr.u),
        u_inv: matrix_strings(&rr.u_inv),
        au: strings(&rr.au),
        lll_reduced,
        sublattice_det,
        direction: DirectionReport::of(&dec),
        bounds: BTreeMap::from([("i1", range_items.i1), ("i2", range_items.i2), ("i3", range_items.i3)]),
        parallelness,
        successive: range_succ,
        widths: range_widths,
    };

    let null_reform = if inst.is_equality() && n >= 2 { Some(build_nullspace(inst)?) } else { None };
    let null = match &null_reform {
        None => None,
        Some(nr) => {
            let lll_reduced = is_lll_reduced(&nr.v_basis)?;
            let complete = completeness_certificate(&nr.v_basis)?.ok();
            record(&mut failures, true, lll_reduced, "null: V is not LLL-reduced");
            record(&mut failures, true, complete, "null: V does not span the full nullspace lattice");
            let dec = decompose(a, &extract_null_direction(nr)?)?;
            let null_items = certify_null_direction(a, &dec)?;
            for (name, ok) in [("i1", null_items.i1), ("i2", null_items.i2), ("r_nonzero", null_items.r_nonzero)] {
                record(&mut failures, hyp, ok, format!("null direction bound {name}"));
            }
            let parallelness = parallelness_report(a, &dec.p)?;
            for (name, v) in [("sin", parallelness.sin_le_ratio), ("sign", parallelness.sign_agree), ("rounding", parallelness.rounding)] {
                record(&mut failures, true, !v.failed(), format!("null direction parallelness {name}"));
            }
            let inv = null_inverse(nr)?;
            let mut succ = Vec::new();
            for k in 1..=opts.depth.min(n - 1) {
                let s = successive(&inv, RowWindow::NextToLast, a, k)?;
                let c = certify_null_block(a, &s)?;
                let items = BTreeMap::from([("i1", c.items.i1), ("i2", c.items.i2), ("r_nonzero", c.items.r_nonzero), ("sin", c.sin)]);
                for (name, ok) in &items {
                    record(&mut failures, hyp, *ok, format!("null successive k={k} {name}"));
                }
                if k == 1 {
                    record(&mut failures, true, c.items == null_items, "null successive k=1 differs from the single-row path");
                }
                succ.push(SuccessiveReport {
                    k,
                    lambda_sq: Number::of(&s.lambda_sq),
                    ratio: Number::sqrt_of(&s.ratio_sq()),
                    r_norm_sq: Number::of(&s.r_norm_sq),
                    items,
                });
            }
            let reformed = Polytope::nullspace(nr)?;
            let pv = nr.v_basis.vec_mul(&dec.p)?;
            let w = widths(inst, &dec, &reformed, unit_vec(n - 1, n - 2), width_bound_null(a, inst.v())?, is_signed_unit(&pv, n - 2))?;
            record(&mut failures, hyp, w.width_bound_holds, "null integer width exceeds the main bound");
            record(&mut failures, true, !w.branch_bound_holds.failed(), "null direction exceeds the branching bound");
            record(&mut failures, true, w.transference_unit && w.transference_equal, "null transference");
            Some(NullReport {
                v_basis: matrix_strings(&nr.v_basis),
                x_beta: strings(&nr.x_beta),
                b: strings(&nr.b),
                lll_reduced,
                complete,
                direction: DirectionReport::of(&dec),
                bounds: BTreeMap::from([("i1", null_items.i1), ("i2", null_items.i2), ("r_nonzero", null_items.r_nonzero)]),
                parallelness,
                successive: succ,
                widths: w,
            })
        }
    };
    clock.lap("nullspace");

    let oracle = if opts.oracle {
        let budget = &opts.budget;
        let bij_range = bijection_range(&rr, budget)?.holds();
        let bij_null = match &null_reform {
            Some(nr) => Verdict::from_bool(bijection_null(nr, budget)?.holds()),
            None => Verdict::NotApplicable,
        };
        let original = Polytope::knapsack(inst);
        let e_n = to_rat_vec(&unit_vec(n, n - 1));
        let mut lp_agrees = true;
        for sense in [Sense::Max, Sense::Min] {
            lp_agrees &= vertex_enum_optimize(&e_n, &original, sense, budget)?.value() == lp_optimize(&e_n, &original, sense)?.value();
        }
        let nodes = node_count(inst, &dec.p, budget)? == iwidth(&dec.p, &original)?;
        let report = OracleReport {
            bijection_range: Verdict::from_bool(bij_range),
            bijection_null: bij_null,
            lp_agrees: Verdict::from_bool(lp_agrees),
            node_count_agrees: Verdict::from_bool(nodes),
        };
        for (name, v) in [
            ("range bijection", report.bijection_range),
            ("null bijection", report.bijection_null),
            ("vertex enumeration agreement", report.lp_agrees),
            ("node count agreement", report.node_count_agrees),
        ] {
            record(&mut failures, true, !v.failed(), format!("oracle: {name}"));
        }
        clock.lap("oracle");
        Some(report)
    } else {
        None
    };

    Ok(ReportDocument {
        schema_version: super::document::SCHEMA_VERSION,
        n,
        a: strings(a),
        v: strings(inst.v()),
        beta1: inst.beta1().to_string(),
        beta2: inst.beta2().to_string(),
        density: density_approx(a),
        hypothesis: hyp,
        range,
        null,
        oracle,
        timings_ms: opts.timings.then_some(clock.laps),
        failures,
    })
}
