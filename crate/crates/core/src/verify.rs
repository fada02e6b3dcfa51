//! Bound sweeps, ratio fits and the checks built on them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fit::{linear_fit, log_log_fit, LineFit};
use crate::geometry::{halfspace_from_ball, unit_vector, BallPoint, HalfSpacePoint, Isometry};
use crate::group::OrbitCache;
use crate::images::{euclidean_cylinder_sum, reduce_to_dirichlet, AutomorphicSum, PreparedPair};
use crate::kernel::{bound_h3, kernel_h3, KernelQuery};

pub const MODEL_SLOPE_TOL: f64 = 0.05;
pub const AUTOMORPHIC_SLOPE_TOL: f64 = 0.1;
/// Orders checked against the abstract hypothesis for m = 3.
pub const HYPOTHESIS_ORDERS: [u32; 2] = [0, 2];
/// Orders of the non-identity `C λ^{n/2}` check.
pub const EXTENDED_ORDERS: [u32; 3] = [1, 2, 3];
pub const MODEL_ORDERS: [u32; 3] = [0, 1, 2];

/// Which envelope a cell is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `|∂^j K| / bound_h3`
    Model,
    /// `(|Σ_γ ∂^j K| + tail) / λ^{2-j}(1+λd)^{-1+j}`
    Hypothesis,
    /// `(|Σ_{γ≠Id} ∂^j K| + tail) / λ`
    Nonidentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub family: Family,
    pub lambda: f64,
    pub d: f64,
    pub j: u32,
    pub value: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub family: Family,
    pub j: u32,
    /// Fitted constant: the sup of all ratios.
    pub constant: f64,
    /// Log-λ slope of the per-λ sup ratios (0 with a single λ).
    pub slope: f64,
    pub fit: Option<LineFit>,
    pub all_finite: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub x: HalfSpacePoint,
    pub y_star: HalfSpacePoint,
    pub distance: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub group: String,
    pub check: String,
    pub lambdas: Vec<f64>,
    pub pairs: Vec<PairRecord>,
    pub seed: Option<u64>,
    pub slope_tol: f64,
    pub cells: Vec<Cell>,
    pub summaries: Vec<OrderSummary>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl BoundCheckReport {
    /// Summarize cells by `(family, j)`; pass iff every summary passes.
    pub fn from_cells(
        group: &str,
        check: &str,
        lambdas: Vec<f64>,
        cells: Vec<Cell>,
        slope_tol: f64,
    ) -> Self {
        let summaries = summarize(&cells, slope_tol);
        let pass = !summaries.is_empty() && summaries.iter().all(|s| s.pass);
        Self {
            group: group.into(),
            check: check.into(),
            lambdas,
            pairs: Vec::new(),
            seed: None,
            slope_tol,
            cells,
            summaries,
            notes: Vec::new(),
            pass,
        }
    }

    pub fn summary(&self, family: Family, j: u32) -> Option<&OrderSummary> {
        self.summaries
            .iter()
            .find(|s| s.family == family && s.j == j)
    }
}

fn summarize(cells: &[Cell], slope_tol: f64) -> Vec<OrderSummary> {
    // (family, j) -> λ bits -> (λ, sup ratio)
    let mut groups: BTreeMap<(Family, u32), BTreeMap<u64, (f64, f64)>> = BTreeMap::new();
    let mut finite: BTreeMap<(Family, u32), bool> = BTreeMap::new();
    for c in cells {
        let key = (c.family, c.j);
        let ok = c.ratio.is_finite();
        *finite.entry(key).or_insert(true) &= ok;
        let slot = groups
            .entry(key)
            .or_default()
            .entry(c.lambda.to_bits())
            .or_insert((c.lambda, 0.0));
        if ok {
            slot.1 = slot.1.max(c.ratio);
        }
    }
    groups
        .into_iter()
        .map(|((family, j), by_lambda)| {
            let mut pts: Vec<(f64, f64)> = by_lambda.into_values().collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let constant = pts.iter().map(|p| p.1).fold(0.0, f64::max);
            let all_finite = finite[&(family, j)];
            let fit = if pts.len() >= 2 && pts.iter().all(|p| p.1 > 0.0) {
                let (ls, rs): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
                log_log_fit(&ls, &rs).ok()
            } else {
                None
            };
            let slope = fit.map_or(0.0, |f| f.slope);
            OrderSummary {
                family,
                j,
                constant,
                slope,
                fit,
                all_finite,
                pass: all_finite && slope <= slope_tol,
            }
        })
        .collect()
}

/// `n` log-spaced values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() || n == 0 {
        return Err(domain("log grid needs 0 < lo <= hi and n >= 1"));
    }
    if n == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// `n` evenly spaced values in `(0, hi]`.
pub fn open_grid(hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > 0.0) || !hi.is_finite() || n == 0 {
        return Err(domain("grid needs hi > 0 and n >= 1"));
    }
    Ok((1..=n).map(|i| hi * i as f64 / n as f64).collect())
}

/// `|∂_λ^j K_{H³}| / bound_h3` over the grid for `j ∈ {0, 1, 2}`.
pub fn check_model_bounds(l0: f64, lambdas: &[f64], rs: &[f64]) -> Result<BoundCheckReport> {
    if lambdas.is_empty() || rs.is_empty() {
        return Err(domain("grids must be nonempty"));
    }
    let mut cells = Vec::with_capacity(3 * lambdas.len() * rs.len());
    for &j in &MODEL_ORDERS {
        for &lambda in lambdas {
            for &r in rs {
                let q = KernelQuery::new(lambda, r, j)?;
                let value = kernel_h3(&q)?;
                let envelope = bound_h3(&q, l0)?;
                cells.push(Cell {
                    family: Family::Model,
                    lambda,
                    d: r,
                    j,
                    value,
                    envelope,
                    ratio: value.abs() / envelope,
                });
            }
        }
    }
    let mut report = BoundCheckReport::from_cells(
        "H3",
        "model_bounds",
        lambdas.to_vec(),
        cells,
        MODEL_SLOPE_TOL,
    );
    report
        .notes
        .push(format!("l0 = {l0}; cutoff at d = {}", l0 / 2.0));
    Ok(report)
}

/// `λ^{m-1-j} (1 + λd)^{-(m-1)/2 + j}` with `m = 3`.
pub fn hypothesis_envelope(lambda: f64, d: f64, j: u32) -> f64 {
    let jf = j as f64;
    lambda.powf(2.0 - jf) * (1.0 + lambda * d).powf(-1.0 + jf)
}

/// Deterministic sample points at log-spaced distances in `[d_min, d_max]`
/// from the basepoint, on a golden-angle spiral rotated by a seeded offset.
pub fn sample_points(
    basepoint: &HalfSpacePoint,
    count: usize,
    d_min: f64,
    d_max: f64,
    seed: u64,
) -> Result<Vec<HalfSpacePoint>> {
    let ds = log_grid(d_min, d_max, count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * core::f64::consts::TAU;
    let golden = core::f64::consts::PI * (3.0 - 5f64.sqrt());
    let to_base = Isometry::moving_origin_to(basepoint);
    ds.iter()
        .enumerate()
        .map(|(i, &d)| {
            let cos_polar = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let dir = unit_vector(cos_polar, offset + golden * i as f64);
            let p = halfspace_from_ball(&BallPoint::at_distance(dir, d)?)?;
            to_base.apply(&p)
        })
        .collect()
}

/// Reduce each `(basepoint, y)` pair into the Dirichlet domain of the cache.
pub fn reduced_pairs(cache: &OrbitCache, ys: &[HalfSpacePoint]) -> Result<Vec<PairRecord>> {
    let x = *cache.basepoint();
    ys.iter()
        .map(|y| {
            let red = reduce_to_dirichlet(cache, &x, y)?;
            Ok(PairRecord {
                x,
                y_star: red.y_star,
                distance: red.reduced_distance,
                certified: red.certified,
            })
        })
        .collect()
}

/// Hypothesis and non-identity cells for one prepared pair.
pub fn hypothesis_cells(pair: &PreparedPair, lambdas: &[f64]) -> Result<Vec<Cell>> {
    let d = pair.pair_distance();
    let mut cells = Vec::new();
    for &lambda in lambdas {
        for &j in &HYPOTHESIS_ORDERS {
            let v = pair.evaluate(lambda, j)?;
            let envelope = hypothesis_envelope(lambda, d, j);
            let value = v.value.abs() + v.tail_bound;
            cells.push(Cell {
                family: Family::Hypothesis,
                lambda,
                d,
                j,
                value,
                envelope,
                ratio: value / envelope,
            });
        }
        for &j in &EXTENDED_ORDERS {
            let v = pair.evaluate(lambda, j)?;
            let value = v.nonidentity_sum.abs() + v.tail_bound;
            cells.push(Cell {
                family: Family::Nonidentity,
                lambda,
                d,
                j,
                value,
                envelope: lambda,
                ratio: value / lambda,
            });
        }
    }
    Ok(cells)
}

/// Theorem-level kernel hypothesis on a group, over Dirichlet-reduced pairs.
pub fn check_abstract_hypothesis(
    ctx: &AutomorphicSum<'_>,
    lambdas: &[f64],
    pairs: &[PairRecord],
) -> Result<BoundCheckReport> {
    if lambdas.is_empty() || pairs.is_empty() {
        return Err(domain("need at least one lambda and one pair"));
    }
    let mut cells = Vec::new();
    for p in pairs {
        let prepared = ctx.prepare(&p.x, &p.y_star)?;
        cells.extend(hypothesis_cells(&prepared, lambdas)?);
    }
    Ok(hypothesis_report(ctx, lambdas, pairs, cells))
}

/// Assemble the hypothesis report from cells computed pair by pair (in pair order).
pub fn hypothesis_report(
    ctx: &AutomorphicSum<'_>,
    lambdas: &[f64],
    pairs: &[PairRecord],
    cells: Vec<Cell>,
) -> BoundCheckReport {
    let mut report = BoundCheckReport::from_cells(
        ctx.cache().group().name(),
        "abstract_hypothesis",
        lambdas.to_vec(),
        cells,
        AUTOMORPHIC_SLOPE_TOL,
    );
    report.pairs = pairs.to_vec();
    report.notes.push(format!(
        "s = {}, l0 = {}, cache radius = {}",
        ctx.s(),
        ctx.l0(),
        ctx.cache().radius()
    ));
    if pairs.iter().any(|p| !p.certified) {
        report
            .notes
            .push("some Dirichlet reductions are not certified".into());
    }
    report
}

/// `|value(T) − value(T')| ≤ tail_bound(T)` for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationCell {
    pub lambda: f64,
    pub d: f64,
    pub j: u32,
    pub difference: f64,
    pub tail_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub group: String,
    pub radius: f64,
    pub larger_radius: f64,
    pub cells: Vec<TruncationCell>,
    /// Largest `difference / tail_bound`.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Compare evaluations on a cache against a larger one at the same `s`.
pub fn check_truncation(
    small: &AutomorphicSum<'_>,
    large: &AutomorphicSum<'_>,
    lambdas: &[f64],
    orders: &[u32],
    pairs: &[PairRecord],
) -> Result<TruncationReport> {
    if small.s() != large.s() {
        return Err(domain("truncation check needs the same s on both caches"));
    }
    let mut cells = Vec::new();
    for p in pairs {
        let a = small.prepare(&p.x, &p.y_star)?;
        let b = large.prepare(&p.x, &p.y_star)?;
        for &lambda in lambdas {
            for &j in orders {
                let va = a.evaluate(lambda, j)?;
                let vb = b.evaluate(lambda, j)?;
                let difference = (va.value - vb.value).abs();
                cells.push(TruncationCell {
                    lambda,
                    d: p.distance,
                    j,
                    difference,
                    tail_bound: va.tail_bound,
                    pass: difference <= va.tail_bound,
                });
            }
        }
    }
    let worst_ratio = cells
        .iter()
        .map(|c| {
            if c.tail_bound > 0.0 {
                c.difference / c.tail_bound
            } else if c.difference > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    Ok(TruncationReport {
        group: small.cache().group().name().into(),
        radius: small.cache().radius(),
        larger_radius: large.cache().radius(),
        pass: cells.iter().all(|c| c.pass),
        cells,
        worst_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub group: String,
    pub radius: f64,
    pub r0: f64,
    /// `sup e^{l_γ − d(x, γy)}` over pairs and elements with `l_γ > R₀`.
    pub sup_ratio: f64,
    pub terms: usize,
    /// No element qualified, so the check holds vacuously.
    pub vacuous: bool,
    pub pass: bool,
    pub note: String,
}

/// Empirical check of `e^{−d(x,γy)} ≤ C e^{−l_γ}` for `l_γ > r0` over the cache.
pub fn check_lemma_distance(
    cache: &OrbitCache,
    pairs: &[PairRecord],
    r0: f64,
) -> Result<LemmaReport> {
    if !(r0 >= 0.0) || !r0.is_finite() {
        return Err(domain("R0 must be finite and nonnegative"));
    }
    let mut sup: f64 = 0.0;
    let mut terms = 0;
    for p in pairs {
        for e in cache.elements() {
            if e.is_identity() || e.displacement <= r0 {
                continue;
            }
            let d = crate::geometry::distance(&p.x, &e.matrix.apply(&p.y_star)?);
            sup = sup.max((e.displacement - d).exp());
            terms += 1;
        }
    }
    let vacuous = terms == 0;
    Ok(LemmaReport {
        group: cache.group().name().into(),
        radius: cache.radius(),
        r0,
        sup_ratio: sup,
        terms,
        vacuous,
        pass: sup.is_finite(),
        note: "empirical finite sup over the cache, not a proof".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub lambda: f64,
    pub l: f64,
    pub j: u32,
    pub ks: Vec<u64>,
    pub sums: Vec<f64>,
    pub fit: LineFit,
    pub expected_slope: f64,
    /// Slope lies within 0.05 of the expected growth exponent.
    pub as_expected: bool,
    /// Whether the partial sums stay bounded in `K` (the envelope check).
    pub envelope_pass: bool,
}

/// Growth of Euclidean-cylinder envelope sums in `K`.
pub fn divergence_test(lambda: f64, l: f64, ks: &[u64], j: u32) -> Result<DivergenceReport> {
    if ks.len() < 4 {
        return Err(Error::InsufficientData(
            "need at least 4 values of K".into(),
        ));
    }
    let constant = ks.iter().all(|&k| k == ks[0]);
    if !constant && ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("K grid must be increasing"));
    }
    let sums = ks
        .iter()
        .map(|&k| euclidean_cylinder_sum(lambda, 0.0, l, j, k))
        .collect::<Result<Vec<_>>>()?;
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let fit = log_log_fit(&kf, &sums)?;
    let expected_slope = j as f64 + 0.5;
    Ok(DivergenceReport {
        lambda,
        l,
        j,
        ks: ks.to_vec(),
        sums,
        as_expected: (fit.slope - expected_slope).abs() <= 0.05,
        envelope_pass: fit.slope <= AUTOMORPHIC_SLOPE_TOL,
        expected_slope,
        fit,
    })
}

/// Log-log slope of `(t, v)` with its residual; at least three positive points.
pub fn fit_growth_exponent(ts: &[f64], vs: &[f64]) -> Result<LineFit> {
    if ts.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 points".into()));
    }
    log_log_fit(ts, vs)
}

/// Least-squares slope of `v` against `t` (no logs).
pub fn fit_linear_rate(ts: &[f64], vs: &[f64]) -> Result<LineFit> {
    linear_fit(ts, vs)
}
