//! Seeded verification suites.
//!
//! Every suite draws from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
//! order, so a report depends only on the suite name and seed. `all` runs
//! each suite with a fresh generator on the same seed.
//!
//! Two error measures are used: `|a - b| / |b|` for positive quantities
//! (q-exponentials, probabilities) and `|a - b| / max(|b|, 1)` for
//! quantities that may pass through zero (q-logarithms, arguments). Trend
//! checks report the largest ratio of consecutive errors and pass when it
//! does not exceed 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::canonical::{
    build_distribution, canonical_form, feasible_split_interval, reproduction_error,
    split_representation, verify_uniqueness,
};
use crate::combinatorics::{
    multinomial_correspondence, stirling_relative_error, tsallis_entropy, CountVector,
    ProbabilityVector,
};
use crate::dynamics::{
    compose_shifts, equivalent_single_shift, fig2_data, fig2_default_grid, integrate_ode,
    rescale_factor_directed, shift_expansion, Direction, InitialCondition, FIG2_Q, FIG2_SCALES,
};
use crate::error::Result;
use crate::figure::{FigureTable, Grid};
use crate::qalgebra::{q_exp_law_check, q_product, scale_drift_expand};
use crate::qcore::{exp_bracket, q_exp, q_log, q_log_of_ratio, EntropicIndex};
use crate::qgaussian::{
    defining_ode_residual, fig3_data, fig3_default_grid, lnq_quadraticity, mlp_stationarity,
    normalization, QGaussianModel, SampleSet, FIG3_Q, FIG3_SCALES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Dynamics,
    Stirling,
    Mlp,
    Canonical,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 5] = [
        Suite::Identities,
        Suite::Dynamics,
        Suite::Stirling,
        Suite::Mlp,
        Suite::Canonical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Dynamics => "dynamics",
            Suite::Stirling => "stirling",
            Suite::Mlp => "mlp",
            Suite::Canonical => "canonical",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identities" => Ok(Suite::Identities),
            "dynamics" => Ok(Suite::Dynamics),
            "stirling" => Ok(Suite::Stirling),
            "mlp" => Ok(Suite::Mlp),
            "canonical" => Ok(Suite::Canonical),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{other}' (expected identities, dynamics, stirling, mlp, canonical or all)"
            )),
        }
    }
}

/// One checked property: the worst error over its samples against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, samples: usize, max_rel_err: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            samples,
            max_rel_err,
            tolerance,
            // NaN never passes.
            pass: max_rel_err <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub cases: Vec<Check>,
    pub pass: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl SuiteReport {
    fn from_cases(
        suite: Suite,
        seed: u64,
        cases: Vec<Check>,
        metadata: BTreeMap<String, Value>,
    ) -> Self {
        let tolerances = cases
            .iter()
            .map(|c| (c.name.clone(), c.tolerance))
            .collect();
        let pass = cases.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.name().into(),
            seed,
            tolerances,
            cases,
            pass,
            metadata,
        }
    }

    pub fn max_rel_err(&self) -> f64 {
        self.cases.iter().map(|c| c.max_rel_err).fold(0.0, f64::max)
    }

    pub fn case(&self, name: &str) -> Option<&Check> {
        self.cases.iter().find(|c| c.name == name)
    }
}

/// Random tuples per identity check.
pub const IDENTITY_SAMPLES: usize = 10_000;
pub const IDENTITY_TOL: f64 = 1e-12;

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    if suite == Suite::All {
        let mut cases = Vec::new();
        let mut metadata = BTreeMap::new();
        for s in Suite::INDIVIDUAL {
            let r = run_suite(s, seed)?;
            for mut c in r.cases {
                c.name = format!("{}.{}", s.name(), c.name);
                cases.push(c);
            }
            for (k, v) in r.metadata {
                metadata.insert(format!("{}.{}", s.name(), k), v);
            }
        }
        return Ok(SuiteReport::from_cases(Suite::All, seed, cases, metadata));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut metadata = BTreeMap::new();
    let cases = match suite {
        Suite::Identities => identities(&mut rng, &mut metadata)?,
        Suite::Dynamics => dynamics(&mut rng, &mut metadata)?,
        Suite::Stirling => stirling(&mut rng, &mut metadata)?,
        Suite::Mlp => mlp(&mut rng, &mut metadata)?,
        Suite::Canonical => canonical(&mut rng, &mut metadata)?,
        Suite::All => unreachable!(),
    };
    Ok(SuiteReport::from_cases(suite, seed, cases, metadata))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn mixed(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Smallest bracket `1 + (1-q)x` admitted for sampled arguments.
const MIN_BRACKET: f64 = 0.1;

fn sample_q(rng: &mut ChaCha8Rng) -> EntropicIndex {
    // One draw in ten exercises the classical branch exactly.
    let v = if rng.random_bool(0.1) {
        1.0
    } else {
        rng.random_range(-0.5..2.9)
    };
    EntropicIndex::new(v).expect("finite")
}

fn sample_arg(rng: &mut ChaCha8Rng, q: EntropicIndex, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if exp_bracket(q, x) >= MIN_BRACKET {
            return x;
        }
    }
}

fn ratio_trend(errors: &[f64]) -> f64 {
    errors
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 && w[1] == 0.0 {
                0.0
            } else {
                w[1] / w[0]
            }
        })
        .fold(0.0, f64::max)
}

fn identities(rng: &mut ChaCha8Rng, _meta: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let n = IDENTITY_SAMPLES;
    let mut round_trip: f64 = 0.0;
    let mut exp_law: f64 = 0.0;
    let mut assoc: f64 = 0.0;
    let mut commut: f64 = 0.0;
    let mut shift: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    let mut drift: f64 = 0.0;

    for _ in 0..n {
        let q = sample_q(rng);
        let x = sample_arg(rng, q, -3.0, 3.0);
        round_trip = round_trip.max(mixed(q_log(q, q_exp(q, x)?)?, x));
    }
    for _ in 0..n {
        let q = sample_q(rng);
        let (x1, x2) = loop {
            let x1 = sample_arg(rng, q, -2.0, 2.0);
            let x2 = sample_arg(rng, q, -2.0, 2.0);
            if exp_bracket(q, x1 + x2) >= MIN_BRACKET {
                break (x1, x2);
            }
        };
        exp_law = exp_law.max(q_exp_law_check(q, x1, x2)?);
    }
    for _ in 0..n {
        let q = sample_q(rng);
        let (x, y, z) = loop {
            let x: f64 = rng.random_range(0.2..5.0);
            let y: f64 = rng.random_range(0.2..5.0);
            let z: f64 = rng.random_range(0.2..5.0);
            let (lx, ly, lz) = (q_log(q, x)?, q_log(q, y)?, q_log(q, z)?);
            if [lx + ly, ly + lz, lx + lz, lx + ly + lz]
                .iter()
                .all(|s| exp_bracket(q, *s) >= MIN_BRACKET)
            {
                break (x, y, z);
            }
        };
        let left = q_product(q, q_product(q, x, y)?, z)?;
        let right = q_product(q, x, q_product(q, y, z)?)?;
        assoc = assoc.max(rel(left, right));
        commut = commut.max(rel(q_product(q, x, y)?, q_product(q, y, x)?));
    }
    for _ in 0..n {
        let q = sample_q(rng);
        let (x, c) = loop {
            let x = sample_arg(rng, q, -2.0, 2.0);
            let c = sample_arg(rng, q, -2.0, 2.0);
            if exp_bracket(q, x + c) >= MIN_BRACKET {
                break (x, c);
            }
        };
        let lhs = q_exp(q, x + c)?;
        let rhs = shift_expansion(q, c)?.apply(q, x)?;
        shift = shift.max(rel(rhs, lhs));
    }
    for _ in 0..n {
        let q = sample_q(rng);
        let x: f64 = rng.random_range(0.1..10.0);
        let y: f64 = rng.random_range(0.1..10.0);
        ratio = ratio.max(mixed(q_log_of_ratio(q, y, x)?, q_log(q, y / x)?));
    }
    for _ in 0..n {
        let q = sample_q(rng);
        let shifts = loop {
            let s: Vec<f64> = (0..5).map(|_| rng.random_range(-0.4..0.4)).collect();
            let mut partial = 0.0;
            let ok = s.iter().all(|x| {
                partial += x;
                exp_bracket(q, partial) >= MIN_BRACKET
            });
            if ok {
                break s;
            }
        };
        let seq = scale_drift_expand(q, &shifts)?;
        drift = drift.max(rel(
            seq.product_of_exponentials()?,
            seq.exponential_of_sum()?,
        ));
    }
    Ok(vec![
        Check::new("qlog_qexp_round_trip", n, round_trip, IDENTITY_TOL),
        Check::new("q_exponential_law", n, exp_law, IDENTITY_TOL),
        Check::new("q_product_associativity", n, assoc, IDENTITY_TOL),
        Check::new("q_product_commutativity", n, commut, IDENTITY_TOL),
        Check::new("shift_expansion", n, shift, IDENTITY_TOL),
        Check::new("qlog_ratio", n, ratio, IDENTITY_TOL),
        Check::new("scale_drift_product", n, drift, IDENTITY_TOL),
    ])
}

/// `max |ln_q(y_raw) - qlog_y| / max(|qlog_y|, 1)` over all rows.
pub fn qlog_line_residual(table: &FigureTable) -> Result<f64> {
    let q = EntropicIndex::new(table.q)?;
    let mut worst: f64 = 0.0;
    for r in &table.rows {
        worst = worst.max(mixed(q_log(q, r.y_raw)?, r.qlog_y));
    }
    Ok(worst)
}

/// Largest deviation of `qlog_y` from `slope·x_raw^power + ln_q(scale)`.
pub fn qlog_shape_residual(table: &FigureTable, power: i32, slope: f64) -> Result<f64> {
    let q = EntropicIndex::new(table.q)?;
    let mut worst: f64 = 0.0;
    for r in &table.rows {
        let expected = slope * r.x_raw.powi(power) + q_log(q, r.scale)?;
        worst = worst.max(mixed(r.qlog_y, expected));
    }
    Ok(worst)
}

pub const RK4_STEP: f64 = 1e-3;
pub const RK4_TOL: f64 = 1e-6;
pub const PROP1_TOL: f64 = 1e-4;
pub const RESCALE_TOL: f64 = 1e-12;
pub const AFFINE_TOL: f64 = 1e-9;

fn dynamics(rng: &mut ChaCha8Rng, meta: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let q = EntropicIndex::new(FIG2_Q)?;
    let mut cases = Vec::new();

    let ic = InitialCondition::new(0.0, 1.0)?;
    let c0 = rescale_factor_directed(q, ic, Direction::Decay)?;
    let traj = integrate_ode(q, ic, Direction::Decay, 5.0, RK4_STEP)?;
    cases.push(Check::new(
        "rk4_vs_analytic",
        traj.samples.len(),
        traj.max_deviation_from_analytic(c0)?,
        RK4_TOL,
    ));

    let mut prop1: f64 = 0.0;
    let mut prop1_samples = 0;
    for &c in &FIG2_SCALES {
        let ic = InitialCondition::new(0.0, c)?;
        let c0 = rescale_factor_directed(q, ic, Direction::Decay)?;
        let x_end = 5.0 * c0.x_unit(q);
        let traj = integrate_ode(q, ic, Direction::Decay, x_end, RK4_STEP * c0.x_unit(q))?;
        prop1_samples += traj.samples.len();
        prop1 = prop1.max(traj.rescaling_invariance_residual(c0));
    }
    cases.push(Check::new(
        "rescaling_invariance",
        prop1_samples,
        prop1,
        PROP1_TOL,
    ));

    let table = fig2_data(q, &FIG2_SCALES, fig2_default_grid())?;
    cases.push(Check::new(
        "fig2_rescaled_identical",
        table.rows.len(),
        table.max_rescaled_gap(),
        RESCALE_TOL,
    ));
    let line = qlog_line_residual(&table)?.max(qlog_shape_residual(&table, 1, -1.0)?);
    cases.push(Check::new(
        "fig2_qlog_affine",
        table.rows.len(),
        line,
        AFFINE_TOL,
    ));

    let n = 1000;
    let mut compose: f64 = 0.0;
    for _ in 0..n {
        let qq = sample_q(rng);
        let c1 = sample_arg(rng, qq, -1.0, 1.0);
        let c2 = sample_arg(rng, qq, -1.0, 1.0);
        let c = equivalent_single_shift(qq, c1, c2);
        if exp_bracket(qq, c) < MIN_BRACKET {
            continue;
        }
        let a = compose_shifts(qq, c1, c2)?;
        let b = shift_expansion(qq, c)?;
        compose = compose
            .max(rel(a.y_scale, b.y_scale))
            .max(rel(a.x_scale, b.x_scale));
    }
    cases.push(Check::new("shift_composition", n, compose, IDENTITY_TOL));

    meta.insert("q".into(), json!(FIG2_Q));
    meta.insert("scales".into(), json!(FIG2_SCALES));
    meta.insert("rk4_step".into(), json!(RK4_STEP));
    Ok(cases)
}

pub const STIRLING_QS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 2.5];
pub const STIRLING_NS: [u64; 4] = [10, 100, 1000, 10_000];
pub const CORRESPONDENCE_QS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
pub const CORRESPONDENCE_SCALES: [u64; 4] = [1, 10, 100, 1000];
pub const CORRESPONDENCE_RATIOS: [&[u64]; 2] = [&[1, 1], &[1, 2, 3]];

/// Relative correspondence errors for counts `ratio · (60 / Σ ratio) · m`.
pub fn correspondence_errors(q: EntropicIndex, ratio: &[u64]) -> Result<Vec<f64>> {
    let unit = 60 / ratio.iter().sum::<u64>();
    CORRESPONDENCE_SCALES
        .iter()
        .map(|m| {
            let cv = CountVector::new(ratio.iter().map(|r| r * unit * m).collect())?;
            Ok(multinomial_correspondence(q, &cv).rel_err)
        })
        .collect()
}

fn stirling(rng: &mut ChaCha8Rng, meta: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let mut cases = Vec::new();
    for qv in STIRLING_QS {
        let q = EntropicIndex::new(qv)?;
        let errs: Vec<f64> = STIRLING_NS
            .iter()
            .map(|&n| stirling_relative_error(q, n))
            .collect();
        cases.push(Check::new(
            format!("stirling_trend_q{qv}"),
            errs.len(),
            ratio_trend(&errs),
            1.0,
        ));
    }
    for qv in CORRESPONDENCE_QS {
        let q = EntropicIndex::new(qv)?;
        for ratio in CORRESPONDENCE_RATIOS {
            let errs = correspondence_errors(q, ratio)?;
            let label = ratio
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join("_");
            cases.push(Check::new(
                format!("correspondence_trend_q{qv}_ratio{label}"),
                errs.len(),
                ratio_trend(&errs),
                1.0,
            ));
        }
    }

    let n = 1000;
    let mut excess: f64 = 0.0;
    let mut negative: f64 = 0.0;
    for _ in 0..n {
        let q = EntropicIndex::new(rng.random_range(0.1..3.0))?;
        let k = rng.random_range(2..8usize);
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let p = ProbabilityVector::new(raw.iter().map(|v| v / s).collect())?;
        let sp = tsallis_entropy(q, &p);
        let su = tsallis_entropy(q, &ProbabilityVector::uniform(k)?);
        excess = excess.max((sp - su).max(0.0) / su);
        negative = negative.max((-sp).max(0.0));
    }
    cases.push(Check::new(
        "tsallis_uniform_maximal",
        n,
        excess,
        IDENTITY_TOL,
    ));
    cases.push(Check::new("tsallis_nonnegative", n, negative, 0.0));

    meta.insert("stirling_n".into(), json!(STIRLING_NS));
    meta.insert("correspondence_base_total".into(), json!(60));
    Ok(cases)
}

pub const MLP_QS: [f64; 3] = [0.5, 1.3, 1.7];
pub const MLP_SETS: usize = 100;
pub const NORMALIZATION_QS: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5];
pub const NORMALIZATION_BETAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Sample set for the stationarity check with `β = 1`. For `q < 1` every
/// point stays well inside the support around the mean.
pub fn mlp_sample_set(rng: &mut ChaCha8Rng, q: EntropicIndex) -> Result<SampleSet> {
    let n = rng.random_range(4..=30usize);
    let (centre, half) = if q.value() < 1.0 {
        (rng.random_range(-1.0..1.0), 0.25 / q.one_minus().sqrt())
    } else {
        (rng.random_range(-5.0..5.0), 3.0)
    };
    SampleSet::new(
        (0..n)
            .map(|_| centre + rng.random_range(-half..half))
            .collect(),
    )
}

fn mlp(rng: &mut ChaCha8Rng, meta: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let mut cases = Vec::new();
    for qv in MLP_QS {
        let q = EntropicIndex::new(qv)?;
        let model = QGaussianModel::with_beta(q, 1.0)?;
        let mut worst: f64 = 0.0;
        for _ in 0..MLP_SETS {
            let samples = mlp_sample_set(rng, q)?;
            let st = mlp_stationarity(&model, &samples)?;
            worst = worst.max(st.normalized_gradient());
        }
        cases.push(Check::new(
            format!("stationarity_q{qv}"),
            MLP_SETS,
            worst,
            crate::qgaussian::STATIONARITY_TOL,
        ));
        let half = model.support_half_width().map_or(3.0, |w| 0.9 * w);
        let grid = Grid::new(-half, half, 201)?;
        cases.push(Check::new(
            format!("lnq_quadratic_q{qv}"),
            grid.points,
            lnq_quadraticity(&model, grid)?,
            1e-6,
        ));
    }

    let n = 1000;
    let mut ode: f64 = 0.0;
    for _ in 0..n {
        let q = EntropicIndex::new(rng.random_range(0.5..2.5))?;
        let a = -rng.random_range(0.5..3.0);
        let c = sample_arg(rng, q, -1.0, 1.0);
        let model = QGaussianModel::new(q, a, c)?;
        let e_max = model.support_half_width().map_or(3.0, |w| 0.8 * w);
        let e = rng.random_range(-e_max..e_max);
        let r = defining_ode_residual(&model, e)?;
        ode = ode.max(r.abs() / (1e-5 * (a * e).abs() + 1e-8));
    }
    cases.push(Check::new("defining_ode_contract", n, ode, 1.0));

    let z1 = normalization(EntropicIndex::CLASSICAL, 1.0)?;
    cases.push(Check::new(
        "normalization_gaussian",
        1,
        (z1 - PI.sqrt()).abs(),
        1e-10,
    ));
    let z0 = normalization(EntropicIndex::new(0.0)?, 1.0)?;
    cases.push(Check::new(
        "normalization_q0",
        1,
        (z0 - 4.0 / 3.0).abs(),
        1e-10,
    ));
    let mut mass: f64 = 0.0;
    for qv in NORMALIZATION_QS {
        for beta in NORMALIZATION_BETAS {
            let m = QGaussianModel::with_beta(EntropicIndex::new(qv)?, beta)?;
            mass = mass.max((m.total_mass()? - 1.0).abs());
        }
    }
    cases.push(Check::new(
        "pdf_unit_mass",
        NORMALIZATION_QS.len() * NORMALIZATION_BETAS.len(),
        mass,
        1e-8,
    ));

    let table = fig3_data(
        EntropicIndex::new(FIG3_Q)?,
        &FIG3_SCALES,
        fig3_default_grid(),
    )?;
    cases.push(Check::new(
        "fig3_rescaled_identical",
        table.rows.len(),
        table.max_rescaled_gap(),
        RESCALE_TOL,
    ));
    let line = qlog_line_residual(&table)?.max(qlog_shape_residual(&table, 2, -1.0)?);
    cases.push(Check::new(
        "fig3_qlog_quadratic",
        table.rows.len(),
        line,
        AFFINE_TOL,
    ));

    meta.insert("qs".into(), json!(MLP_QS));
    meta.insert("beta".into(), json!(1.0));
    meta.insert("fig3_q".into(), json!(FIG3_Q));
    meta.insert("fig3_scales".into(), json!(FIG3_SCALES));
    Ok(cases)
}

pub const UNIQUENESS_Q: f64 = 1.5;
pub const UNIQUENESS_C: f64 = 1.0;
pub const UNIQUENESS_POINTS: usize = 10;
pub const UNIQUENESS_SPLITS: usize = 100;

pub fn uniqueness_points(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..UNIQUENESS_POINTS)
        .map(|_| rng.random_range(0.0..2.0))
        .collect()
}

fn canonical(rng: &mut ChaCha8Rng, meta: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let mut cases = Vec::new();
    let q = EntropicIndex::new(UNIQUENESS_Q)?;
    let xs = uniqueness_points(rng);
    let r = verify_uniqueness(q, &xs, UNIQUENESS_C, UNIQUENESS_SPLITS, rng)?;
    cases.push(Check::new(
        "split_probabilities_agree",
        r.accepted,
        r.max_probability_deviation,
        1e-12,
    ));
    cases.push(Check::new(
        "canonical_bit_stable",
        r.accepted,
        (r.distinct_canonical_forms as f64 - 1.0).abs(),
        0.0,
    ));
    cases.push(Check::new(
        "parameterizations_distinct",
        r.accepted,
        (r.accepted as f64 - r.distinct_parameterizations as f64).abs(),
        0.0,
    ));
    cases.push(Check::new(
        "canonical_reproduction",
        r.accepted,
        r.max_reproduction_error,
        1e-10,
    ));

    let classical = EntropicIndex::CLASSICAL;
    let n = 200;
    let base = build_distribution(classical, &xs, 0.0)?;
    let base_form = canonical_form(&base);
    let mut c_dep: f64 = 0.0;
    for _ in 0..n {
        let c = rng.random_range(-5.0..5.0);
        let d = build_distribution(classical, &xs, c)?;
        for (p, p0) in d.probabilities().iter().zip(base.probabilities()) {
            c_dep = c_dep.max(rel(*p, *p0));
        }
        let f = canonical_form(&d);
        c_dep = c_dep.max((f.slope - base_form.slope).abs());
        for &x in &xs {
            let lhs = f.log_probability(x);
            c_dep = c_dep.max(mixed(lhs, base_form.log_probability(x)));
        }
    }
    cases.push(Check::new(
        "classical_c_independent",
        n,
        c_dep,
        IDENTITY_TOL,
    ));

    let hand = build_distribution(EntropicIndex::new(2.0)?, &[0.0, 1.0], 0.0)?;
    let hf = canonical_form(&hand);
    let hand_err = [
        (hand.probabilities()[0] - 2.0 / 3.0).abs(),
        (hand.probabilities()[1] - 1.0 / 3.0).abs(),
        (hf.slope + 1.5).abs(),
        (hf.intercept + 0.5).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    cases.push(Check::new("hand_example", 1, hand_err, 1e-14));

    let n = 1000;
    let mut split_dev: f64 = 0.0;
    let mut printed: f64 = 0.0;
    let mut repro: f64 = 0.0;
    for _ in 0..n {
        let qq = EntropicIndex::new(rng.random_range(0.2..2.8))?;
        let c = rng.random_range(-0.5..0.5);
        let k = rng.random_range(1..=8usize);
        let xs: Vec<f64> = (0..k).map(|_| sample_arg(rng, qq, -1.0, 1.0)).collect();
        let xs: Vec<f64> = xs
            .into_iter()
            .filter(|x| exp_bracket(qq, c - x) >= MIN_BRACKET)
            .collect();
        if xs.is_empty() {
            continue;
        }
        let (lo, hi) = feasible_split_interval(qq, c);
        let (lo, hi) = (lo.max(-5.0), hi.min(5.0));
        let c1 = lo + rng.random_range(0.05..0.95) * (hi - lo);
        let d = build_distribution(qq, &xs, c)?;
        let (a, b) = split_representation(qq, &xs, c1, c - c1)?;
        for ((pa, pb), p) in a.iter().zip(&b).zip(d.probabilities()) {
            split_dev = split_dev.max(rel(*pa, *p)).max(rel(*pb, *p));
        }
        let f = canonical_form(&d);
        for (i, &x) in xs.iter().enumerate() {
            let direct = q_log(qq, d.probabilities()[i])?;
            printed = printed
                .max(mixed(f.log_probability(x), direct))
                .max(mixed(d.derived_log_probability(i)?, direct));
        }
        repro = repro.max(reproduction_error(&d, &f)?);
    }
    cases.push(Check::new("random_split_invariance", n, split_dev, 1e-12));
    cases.push(Check::new(
        "closed_form_vs_ratio_identity",
        n,
        printed,
        1e-12,
    ));
    cases.push(Check::new("random_canonical_reproduction", n, repro, 1e-10));

    meta.insert("q".into(), json!(UNIQUENESS_Q));
    meta.insert("c".into(), json!(UNIQUENESS_C));
    meta.insert("splits".into(), json!(UNIQUENESS_SPLITS));
    meta.insert("rejected_splits".into(), json!(r.rejected));
    meta.insert("slope".into(), json!(r.canonical.slope));
    meta.insert("intercept".into(), json!(r.canonical.intercept));
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Check::new("x", 1, f64::NAN, 1.0).pass);
        assert!(Check::new("x", 1, 1.0, 1.0).pass);
    }

    #[test]
    fn trend_ratio() {
        assert_eq!(ratio_trend(&[1.0, 0.5, 0.25]), 0.5);
        assert!(ratio_trend(&[1.0, 2.0]) > 1.0);
    }

    #[test]
    fn every_suite_passes() {
        for s in Suite::INDIVIDUAL {
            let r = run_suite(s, 42).unwrap();
            for c in &r.cases {
                assert!(c.pass, "{s}: {c:?}");
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite(Suite::Canonical, 9).unwrap();
        let b = run_suite(Suite::Canonical, 9).unwrap();
        assert_eq!(a, b);
    }
}
