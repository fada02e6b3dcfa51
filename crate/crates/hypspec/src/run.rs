//! The six subcommands. Each returns an [`Outcome`] (exit code, summary lines,
//! files written) or a [`CliError`] whose exit code follows the contract.

use std::path::{Path, PathBuf};

use hypspec_core::exponent::{
    displacement_series, estimate_delta, growth_table, poincare_growth, poincare_partial,
    poincare_profile, regime, ExponentEstimate, Method, Regime, DEFAULT_MARGIN,
};
use hypspec_core::group::{enumerate_orbit, shortest_displacement, EnumerationOptions};
use hypspec_core::images::{AutomorphicSum, KernelValue};
use hypspec_core::verify::{
    check_lemma_distance, check_model_bounds, check_truncation, divergence_test, hypothesis_cells,
    hypothesis_report, open_grid, reduced_pairs, sample_points, BoundCheckReport, Cell,
    DivergenceReport, LemmaReport, PairRecord, TruncationReport, EXTENDED_ORDERS,
    HYPOTHESIS_ORDERS,
};
use hypspec_core::{Error as CoreError, GroupPresentation, OrbitCache};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache_file::{read_cache, write_cache};
use crate::config::{DeltaMethod, RunConfig};
use crate::error::{CliError, EXIT_CHECK_FAILED};
use crate::report::Writer;

/// Kernel dimension parameter: the gate and `s` range use `n/2 = 1` on H³.
const N: u32 = 2;
/// Relative change allowed in the lemma sup between radii `T − step` and `T`.
pub const LEMMA_STABILITY_TOL: f64 = 0.05;
pub const DEFAULT_CACHE_NAME: &str = "cache.hsc";
pub const PARTIAL_CACHE_NAME: &str = "partial_cache.hsc";

pub struct Context {
    pub config: RunConfig,
    /// Input cache for analysis commands, output path for `enumerate`.
    pub cache: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new(pass: bool, summary: Vec<String>, files: Vec<PathBuf>) -> Self {
        Self {
            code: if pass { 0 } else { EXIT_CHECK_FAILED },
            summary,
            files,
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Enumerate, persisting the partial cache when the budget runs out.
fn enumerate_to(
    group: &GroupPresentation,
    radius: f64,
    budget: usize,
    partial: &Path,
) -> Result<OrbitCache, CliError> {
    let opts = EnumerationOptions {
        radius,
        max_elements: budget,
        ..EnumerationOptions::default()
    };
    match enumerate_orbit(group, &opts) {
        Ok(c) => Ok(c),
        Err(CoreError::BudgetExceeded(cache)) => {
            write_cache(partial, &cache, None)?;
            Err(CliError::Budget {
                path: partial.to_path_buf(),
                elements: cache.len(),
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// The cache named on the command line, or a fresh enumeration at `radius`.
fn obtain_cache(ctx: &Context, radius: f64) -> Result<OrbitCache, CliError> {
    match &ctx.cache {
        Some(path) => Ok(read_cache(path)?.cache),
        None => enumerate_to(
            &ctx.config.group.build()?,
            radius,
            ctx.config.budget,
            &ctx.out.join(PARTIAL_CACHE_NAME),
        ),
    }
}

/// Cache used for δ estimation: a dedicated radius when configured.
fn delta_cache(ctx: &Context, main: &OrbitCache) -> Result<Option<OrbitCache>, CliError> {
    match ctx.config.delta.radius {
        Some(r) if r > main.radius() => Ok(Some(enumerate_to(
            main.group(),
            r,
            ctx.config.budget,
            &ctx.out.join(PARTIAL_CACHE_NAME),
        )?)),
        _ => Ok(None),
    }
}

fn methods(m: DeltaMethod) -> Vec<Method> {
    match m {
        DeltaMethod::Slope => vec![Method::Slope],
        DeltaMethod::Bisection => vec![Method::Bisection],
        DeltaMethod::Both => vec![Method::Slope, Method::Bisection],
    }
}

/// An upper bound for δ_Γ: closed form when known, otherwise the largest `δ̂ + CI`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaBound {
    pub delta: f64,
    pub upper: f64,
    pub known: bool,
}

fn delta_bound(
    ctx: &Context,
    cache: &OrbitCache,
) -> Result<(DeltaBound, Vec<ExponentEstimate>), CliError> {
    if let Some(d) = cache.group().known_delta() {
        return Ok((
            DeltaBound {
                delta: d,
                upper: d,
                known: true,
            },
            Vec::new(),
        ));
    }
    let extra = delta_cache(ctx, cache)?;
    let c = extra.as_ref().unwrap_or(cache);
    let ests = methods(ctx.config.delta.method)
        .into_iter()
        .map(|m| estimate_delta(c, m, ctx.config.delta.min_radius))
        .collect::<Result<Vec<_>, _>>()?;
    let best = ests
        .iter()
        .max_by(|a, b| a.upper().total_cmp(&b.upper()))
        .copied()
        .ok_or_else(|| CliError::Config("no δ estimation method selected".into()))?;
    Ok((
        DeltaBound {
            delta: best.delta_hat,
            upper: best.upper(),
            known: false,
        },
        ests,
    ))
}

/// Refuse kernel sums unless `δ + CI < n/2 − margin`.
fn gate(bound: &DeltaBound) -> Result<(), CliError> {
    let limit = f64::from(N) / 2.0 - DEFAULT_MARGIN;
    if bound.upper < limit {
        Ok(())
    } else {
        Err(CoreError::HypothesisViolation(format!(
            "delta upper bound {:.4} is not below n/2 - margin = {limit}",
            bound.upper
        ))
        .into())
    }
}

// ---------------------------------------------------------------- enumerate

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub group: String,
    pub radius: f64,
    pub elements: usize,
    pub complete: bool,
    pub l0: Option<f64>,
    pub l0_certified: bool,
    pub max_orbit_distance: f64,
    pub warnings: Vec<String>,
}

pub fn census(cache: &OrbitCache) -> Census {
    let l0 = shortest_displacement(cache).ok();
    Census {
        group: cache.group().name().into(),
        radius: cache.radius(),
        elements: cache.len(),
        complete: cache.is_complete(),
        l0: l0.map(|s| s.value),
        l0_certified: l0.is_some_and(|s| s.certified),
        max_orbit_distance: cache.max_orbit_distance(),
        warnings: cache.warnings().to_vec(),
    }
}

pub fn enumerate(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let group = cfg.group.build()?;
    let path = ctx
        .cache
        .clone()
        .unwrap_or_else(|| ctx.out.join(DEFAULT_CACHE_NAME));
    let cache = enumerate_to(&group, cfg.radius, cfg.budget, &path)?;
    write_cache(&path, &cache, Some(cfg))?;
    let c = census(&cache);
    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json("census.json", "census", &c)?;
    let summary = vec![
        format!("group {} radius {}", c.group, c.radius),
        format!("elements {} (complete: {})", c.elements, c.complete),
        match c.l0 {
            Some(l) => format!("l0 {l:.6} (certified: {})", c.l0_certified),
            None => "l0 undetermined (identity only)".into(),
        },
        format!("max orbit distance {:.6}", c.max_orbit_distance),
        format!("cache written to {}", path.display()),
    ];
    let mut files = vec![path];
    files.extend(w.into_files());
    Ok(Outcome::new(true, summary, files))
}

// -------------------------------------------------------------------- delta

#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub group: String,
    pub radius: f64,
    pub known_delta: Option<f64>,
    pub estimates: Vec<ExponentEstimate>,
    /// `|slope − bisection|` when both ran.
    pub method_gap: Option<f64>,
    pub gate_pass: bool,
}

pub fn delta(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let radius = cfg.delta.radius.unwrap_or(cfg.radius).max(cfg.radius);
    let cache = obtain_cache(ctx, radius)?;
    let estimates = methods(cfg.delta.method)
        .into_iter()
        .map(|m| estimate_delta(&cache, m, cfg.delta.min_radius))
        .collect::<Result<Vec<_>, _>>()?;
    let method_gap = match estimates.as_slice() {
        [a, b] => Some((a.delta_hat - b.delta_hat).abs()),
        _ => None,
    };
    let upper = estimates
        .iter()
        .map(ExponentEstimate::upper)
        .fold(0.0, f64::max);
    let report = DeltaReport {
        group: cache.group().name().into(),
        radius: cache.radius(),
        known_delta: cache.group().known_delta(),
        method_gap,
        gate_pass: gate(&DeltaBound {
            delta: upper,
            upper,
            known: false,
        })
        .is_ok(),
        estimates,
    };
    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json("delta.json", "delta", &report)?;
    w.csv("growth.csv", &growth_table(&cache))?;
    let mut summary = vec![format!("group {} radius {}", report.group, report.radius)];
    for e in &report.estimates {
        summary.push(format!(
            "{:?}: delta_hat {:.4} +/- {:.4}",
            e.method, e.delta_hat, e.half_width
        ));
    }
    if let Some(g) = method_gap {
        summary.push(format!("method gap {g:.4}"));
    }
    summary.push(format!(
        "gate delta + CI < n/2 - margin: {}",
        verdict(report.gate_pass)
    ));
    Ok(Outcome::new(true, summary, w.into_files()))
}

// ----------------------------------------------------------------- poincare

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesRow {
    pub series: &'static str,
    pub s: f64,
    pub partial_sum: f64,
    /// Empty when the series is treated as divergent.
    pub tail: Option<f64>,
    pub terms: usize,
    pub radius: f64,
    pub regime: Regime,
    /// Fitted `d log(partial sum) / dR` over the outer half (orbit series only).
    pub growth_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileRow {
    pub s: f64,
    pub radius: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    pub group: String,
    pub estimate: ExponentEstimate,
    pub rows: Vec<SeriesRow>,
}

pub fn poincare(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let radius = cfg.delta.radius.unwrap_or(cfg.radius).max(cfg.radius);
    let cache = obtain_cache(ctx, radius)?;
    let method = match cfg.delta.method {
        DeltaMethod::Bisection => Method::Bisection,
        _ => Method::Slope,
    };
    let est = estimate_delta(&cache, method, cfg.delta.min_radius)?;
    let ss: Vec<f64> = if cfg.poincare.s.is_empty() {
        [est.delta_hat - 0.3, est.delta_hat + 0.3]
            .into_iter()
            .filter(|&s| s > 0.0)
            .collect()
    } else {
        cfg.poincare.s.clone()
    };
    let o = *cache.basepoint();
    let mut rows = Vec::new();
    let mut profile = Vec::new();
    for &s in &ss {
        let reg = regime(s, &est, DEFAULT_MARGIN);
        let v = poincare_partial(&cache, s, &o, &o, est.delta_hat)?;
        rows.push(SeriesRow {
            series: "orbit",
            s,
            partial_sum: v.partial_sum,
            tail: v.tail_estimate,
            terms: v.terms_used,
            radius: v.radius,
            regime: reg,
            growth_rate: poincare_growth(&cache, s, &o, &o).ok().map(|f| f.slope),
        });
        let dv = displacement_series(&cache, s, est.delta_hat)?;
        rows.push(SeriesRow {
            series: "displacement",
            s,
            partial_sum: dv.partial_sum,
            tail: dv.tail_estimate,
            terms: dv.terms_used,
            radius: dv.radius,
            regime: reg,
            growth_rate: None,
        });
        profile.extend(poincare_profile(&cache, s, &o, &o)?.into_iter().map(
            |(radius, partial_sum)| ProfileRow {
                s,
                radius,
                partial_sum,
            },
        ));
    }
    let report = PoincareReport {
        group: cache.group().name().into(),
        estimate: est,
        rows,
    };
    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json("poincare.json", "poincare", &report)?;
    w.csv("series.csv", &report.rows)?;
    w.csv("profile.csv", &profile)?;
    w.csv("growth.csv", &growth_table(&cache))?;
    let mut summary = vec![format!(
        "group {} radius {} delta_hat {:.4}",
        report.group,
        cache.radius(),
        est.delta_hat
    )];
    for r in &report.rows {
        summary.push(format!(
            "{} s={:.3} ({:?}): partial {:.6e}, tail {}, growth {}",
            r.series,
            r.s,
            r.regime,
            r.partial_sum,
            r.tail.map_or("divergent".into(), |t| format!("{t:.3e}")),
            r.growth_rate.map_or("-".into(), |g| format!("{g:.4}")),
        ));
    }
    Ok(Outcome::new(true, summary, w.into_files()))
}

// ------------------------------------------------------------------- kernel

/// Shared setup for `kernel` and `verify`: δ bound, gate, `l₀` and reduced pairs.
pub struct SumSetup {
    pub bound: DeltaBound,
    pub estimates: Vec<ExponentEstimate>,
    pub l0: f64,
    pub pairs: Vec<PairRecord>,
}

pub fn setup(ctx: &Context, cache: &OrbitCache) -> Result<SumSetup, CliError> {
    let cfg = &ctx.config;
    let (bound, estimates) = delta_bound(ctx, cache)?;
    gate(&bound)?;
    let l0 = shortest_displacement(cache)?.value;
    let ys = sample_points(
        cache.basepoint(),
        cfg.pairs.count,
        cfg.pairs.d_min,
        cfg.pairs.d_max,
        cfg.seed,
    )?;
    let pairs = reduced_pairs(cache, &ys)?;
    Ok(SumSetup {
        bound,
        estimates,
        l0,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelRow {
    pub pair: usize,
    pub d: f64,
    pub lambda: f64,
    pub j: u32,
    pub value: f64,
    pub identity_term: f64,
    pub nonidentity_sum: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
    pub s: f64,
    pub certified: bool,
}

fn kernel_row(pair: usize, v: &KernelValue) -> KernelRow {
    KernelRow {
        pair,
        d: v.pair_distance,
        lambda: v.lambda,
        j: v.j,
        value: v.value,
        identity_term: v.identity_term,
        nonidentity_sum: v.nonidentity_sum,
        tail_bound: v.tail_bound,
        terms_used: v.terms_used,
        s: v.s_used,
        certified: v.certified,
    }
}

pub fn kernel(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let cache = obtain_cache(ctx, cfg.radius)?;
    let st = setup(ctx, &cache)?;
    let sum = AutomorphicSum::new(&cache, st.bound.upper, st.l0, cfg.s)?;
    let lambdas = cfg.lambda.values();
    let per_pair = st
        .pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let prepared = sum.prepare(&p.x, &p.y_star)?;
            let mut rows = Vec::new();
            for &lambda in &lambdas {
                for &j in &cfg.orders {
                    rows.push(kernel_row(i, &prepared.evaluate(lambda, j)?));
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    let rows: Vec<KernelRow> = per_pair.into_iter().flatten().collect();
    #[derive(Serialize)]
    struct KernelReport<'a> {
        group: &'a str,
        radius: f64,
        delta: DeltaBound,
        s: f64,
        l0: f64,
        seed: u64,
        pairs: &'a [PairRecord],
        rows: &'a [KernelRow],
    }
    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json(
        "kernel.json",
        "kernel",
        &KernelReport {
            group: cache.group().name(),
            radius: cache.radius(),
            delta: st.bound,
            s: sum.s(),
            l0: st.l0,
            seed: cfg.seed,
            pairs: &st.pairs,
            rows: &rows,
        },
    )?;
    w.csv("kernel.csv", &rows)?;
    let summary = vec![
        format!(
            "group {} radius {} s {:.4} l0 {:.4}",
            cache.group().name(),
            cache.radius(),
            sum.s(),
            st.l0
        ),
        format!("{} evaluations over {} pairs", rows.len(), st.pairs.len()),
    ];
    Ok(Outcome::new(true, summary, w.into_files()))
}

// ------------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub at_radius: LemmaReport,
    pub at_smaller_radius: LemmaReport,
    pub relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub group: String,
    pub delta: DeltaBound,
    pub estimates: Vec<ExponentEstimate>,
    pub s: f64,
    pub l0: f64,
    pub model: Vec<BoundCheckReport>,
    pub hypothesis: BoundCheckReport,
    pub truncation: Option<TruncationReport>,
    pub lemma: LemmaCheck,
    pub pass: bool,
}

/// Hypothesis cells over pairs in parallel, merged in pair order.
pub fn parallel_hypothesis(
    sum: &AutomorphicSum<'_>,
    lambdas: &[f64],
    pairs: &[PairRecord],
) -> Result<BoundCheckReport, CliError> {
    let cells = pairs
        .par_iter()
        .map(|p| hypothesis_cells(&sum.prepare(&p.x, &p.y_star)?, lambdas))
        .collect::<Result<Vec<Vec<Cell>>, CoreError>>()?;
    Ok(hypothesis_report(sum, lambdas, pairs, cells.concat()))
}

pub fn lemma_check(
    cache: &OrbitCache,
    pairs: &[PairRecord],
    r0: f64,
    step: f64,
) -> Result<LemmaCheck, CliError> {
    let big = check_lemma_distance(cache, pairs, r0)?;
    let small = check_lemma_distance(&cache.truncated(cache.radius() - step), pairs, r0)?;
    let relative_change = if small.sup_ratio > 0.0 {
        (big.sup_ratio - small.sup_ratio).abs() / small.sup_ratio
    } else if big.sup_ratio > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(LemmaCheck {
        pass: big.pass && small.pass && relative_change < LEMMA_STABILITY_TOL,
        at_radius: big,
        at_smaller_radius: small,
        relative_change,
    })
}

pub fn verify(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let cache = obtain_cache(ctx, cfg.radius)?;
    let st = setup(ctx, &cache)?;
    let sum = AutomorphicSum::new(&cache, st.bound.upper, st.l0, cfg.s)?;
    let lambdas = cfg.lambda.values();

    let model = if cfg.verify.model {
        let ml = cfg.model.lambda.values();
        let rs = open_grid(cfg.model.r_max, cfg.model.r_count)?;
        cfg.model
            .l0
            .par_iter()
            .map(|&l0| check_model_bounds(l0, &ml, &rs))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };

    let mut hypothesis = parallel_hypothesis(&sum, &lambdas, &st.pairs)?;
    hypothesis.seed = Some(cfg.seed);

    let truncation = match cfg.verify.larger_radius {
        Some(r) => {
            let large = enumerate_to(
                cache.group(),
                r,
                cfg.budget,
                &ctx.out.join(PARTIAL_CACHE_NAME),
            )?;
            let big_sum = AutomorphicSum::new(&large, st.bound.upper, st.l0, Some(sum.s()))?;
            let orders: Vec<u32> = HYPOTHESIS_ORDERS
                .iter()
                .chain(EXTENDED_ORDERS.iter())
                .copied()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            Some(check_truncation(
                &sum, &big_sum, &lambdas, &orders, &st.pairs,
            )?)
        }
        None => None,
    };

    let r0 = cfg.verify.lemma_r0.unwrap_or(2.0 * st.l0);
    let lemma = lemma_check(&cache, &st.pairs, r0, cfg.verify.lemma_step)?;

    let pass = model.iter().all(|m| m.pass)
        && hypothesis.pass
        && truncation.as_ref().is_none_or(|t| t.pass)
        && lemma.pass;
    let report = VerifyReport {
        group: cache.group().name().into(),
        delta: st.bound,
        estimates: st.estimates,
        s: sum.s(),
        l0: st.l0,
        model,
        hypothesis,
        truncation,
        lemma,
        pass,
    };

    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json("verify.json", "verify", &report)?;
    w.csv("hypothesis_cells.csv", &report.hypothesis.cells)?;
    w.csv("hypothesis_summary.csv", &summary_rows(&report.hypothesis))?;
    let model_cells: Vec<ModelCell> = cfg
        .model
        .l0
        .iter()
        .zip(&report.model)
        .flat_map(|(&l0, m)| {
            m.cells.iter().map(move |c| ModelCell {
                l0,
                j: c.j,
                lambda: c.lambda,
                d: c.d,
                value: c.value,
                envelope: c.envelope,
                ratio: c.ratio,
            })
        })
        .collect();
    if !model_cells.is_empty() {
        w.csv("model_cells.csv", &model_cells)?;
    }
    if let Some(t) = &report.truncation {
        w.csv("truncation_cells.csv", &t.cells)?;
    }

    let mut summary = vec![format!(
        "group {} radius {} s {:.4} l0 {:.4} delta<= {:.4}{}",
        report.group,
        cache.radius(),
        report.s,
        report.l0,
        report.delta.upper,
        if report.delta.known {
            " (closed form)"
        } else {
            ""
        }
    )];
    for (l0, m) in cfg.model.l0.iter().zip(&report.model) {
        for s in &m.summaries {
            summary.push(format!(
                "{} model l0={l0} j={} slope {:.4} sup {:.4}",
                verdict(s.pass),
                s.j,
                s.slope,
                s.constant
            ));
        }
    }
    for s in &report.hypothesis.summaries {
        summary.push(format!(
            "{} {:?} j={} slope {:.4} sup {:.4}",
            verdict(s.pass),
            s.family,
            s.j,
            s.slope,
            s.constant
        ));
    }
    if let Some(t) = &report.truncation {
        summary.push(format!(
            "{} truncation T={} vs {} worst |diff|/tail {:.4}",
            verdict(t.pass),
            t.radius,
            t.larger_radius,
            t.worst_ratio
        ));
    }
    summary.push(format!(
        "{} lemma R0={:.3} sup {:.4} (T-{}: {:.4}, change {:.2}%; empirical, not a proof)",
        verdict(report.lemma.pass),
        r0,
        report.lemma.at_radius.sup_ratio,
        cfg.verify.lemma_step,
        report.lemma.at_smaller_radius.sup_ratio,
        100.0 * report.lemma.relative_change
    ));
    summary.push(format!("overall {}", verdict(pass)));
    Ok(Outcome::new(pass, summary, w.into_files()))
}

#[derive(Serialize)]
struct ModelCell {
    l0: f64,
    j: u32,
    lambda: f64,
    d: f64,
    value: f64,
    envelope: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    family: hypspec_core::verify::Family,
    j: u32,
    constant: f64,
    slope: f64,
    all_finite: bool,
    pass: bool,
}

fn summary_rows(r: &BoundCheckReport) -> Vec<SummaryRow> {
    r.summaries
        .iter()
        .map(|s| SummaryRow {
            family: s.family,
            j: s.j,
            constant: s.constant,
            slope: s.slope,
            all_finite: s.all_finite,
            pass: s.pass,
        })
        .collect()
}

// ----------------------------------------------------------- counterexample

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub runs: Vec<DivergenceReport>,
    /// The envelope check rejects the configuration, as it should.
    pub fails_as_expected: bool,
    pub label: &'static str,
}

#[derive(Serialize)]
struct DivergenceRow {
    j: u32,
    k: u64,
    sum: f64,
}

pub fn counterexample(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let ce = &cfg.counterexample;
    let runs = [1u32, 0]
        .iter()
        .map(|&j| divergence_test(ce.lambda, ce.l, &ce.ks, j))
        .collect::<Result<Vec<_>, _>>()?;
    let main = &runs[0];
    let fails_as_expected = main.as_expected && !main.envelope_pass;
    let report = CounterexampleReport {
        label: if fails_as_expected {
            "FAIL-as-expected"
        } else {
            "unexpected"
        },
        fails_as_expected,
        runs,
    };
    let rows: Vec<DivergenceRow> = report
        .runs
        .iter()
        .flat_map(|r| {
            r.ks.iter()
                .zip(&r.sums)
                .map(move |(&k, &sum)| DivergenceRow { j: r.j, k, sum })
        })
        .collect();
    let mut w = Writer::new(&ctx.out, cfg)?;
    w.json("counterexample.json", "counterexample", &report)?;
    w.csv("counterexample.csv", &rows)?;
    let mut summary: Vec<String> = report
        .runs
        .iter()
        .map(|r| {
            format!(
                "euclidean cylinder j={} slope {:.4} (expected {}), envelope {}",
                r.j,
                r.fit.slope,
                r.expected_slope,
                verdict(r.envelope_pass)
            )
        })
        .collect();
    summary.push(format!("negative control: {}", report.label));
    Ok(Outcome::new(fails_as_expected, summary, w.into_files()))
}
