//! Poincaré series, displacement series and critical-exponent estimation.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fit::{linear_fit, LineFit};
use crate::geometry::{distance, HalfSpacePoint};
use crate::group::OrbitCache;
use crate::sum::CompensatedSum;

/// Shells are half-open distance intervals `(k-1, k]` of this width.
pub const SHELL_WIDTH: f64 = 1.0;
/// Smallest certified radius accepted by [`estimate_delta`].
pub const DEFAULT_MIN_RADIUS: f64 = 8.0;
/// Default margin in `s` for the convergent/divergent classifier.
pub const DEFAULT_MARGIN: f64 = 0.1;
/// Distances within this much above a shell boundary stay in the lower shell.
const SHELL_SLACK: f64 = 1e-9;

/// Truncated series together with an extrapolated tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub s: f64,
    pub partial_sum: f64,
    pub terms_used: usize,
    /// `None` flags a series treated as divergent (`s ≤ δ̂`).
    pub tail_estimate: Option<f64>,
    /// Truncation radius of the summed distances.
    pub radius: f64,
}

impl SeriesValue {
    pub fn is_divergent(&self) -> bool {
        self.tail_estimate.is_none()
    }

    /// Partial sum plus tail, or `None` when divergent.
    pub fn total(&self) -> Option<f64> {
        self.tail_estimate.map(|t| self.partial_sum + t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Slope,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub delta_hat: f64,
    pub method: Method,
    pub half_width: f64,
    pub radius: f64,
    /// Fit behind the estimate (log N(R) against R, or log shell sums at the root).
    pub fit: LineFit,
}

impl ExponentEstimate {
    pub fn upper(&self) -> f64 {
        self.delta_hat + self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Convergent,
    Divergent,
    Indeterminate,
}

/// Classify `s` against the estimate, leaving a band of `margin` undecided.
pub fn regime(s: f64, estimate: &ExponentEstimate, margin: f64) -> Regime {
    if s > estimate.upper() + margin {
        Regime::Convergent
    } else if s < estimate.delta_hat - estimate.half_width - margin {
        Regime::Divergent
    } else {
        Regime::Indeterminate
    }
}

/// One row of the orbit growth table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub radius: f64,
    pub shell_count: usize,
    pub cumulative: usize,
}

fn shell_index(d: f64) -> usize {
    let k = ((d - SHELL_SLACK) / SHELL_WIDTH).ceil();
    if k <= 0.0 {
        0
    } else {
        k as usize
    }
}

fn shell_count(radius: f64) -> usize {
    (radius / SHELL_WIDTH + SHELL_SLACK).floor().max(0.0) as usize
}

/// Shell and cumulative counts of `d(o, γo)` at `R = 0, 1, 2, ... ≤ T`.
pub fn growth_table(cache: &OrbitCache) -> Vec<GrowthRow> {
    let n = shell_count(cache.radius());
    let mut counts = vec![0usize; n + 1];
    for e in cache.elements() {
        let k = shell_index(e.orbit_distance);
        if k <= n {
            counts[k] += 1;
        }
    }
    let mut cumulative = 0;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            cumulative += c;
            GrowthRow {
                radius: k as f64 * SHELL_WIDTH,
                shell_count: c,
                cumulative,
            }
        })
        .collect()
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("series exponent s must be positive and finite"));
    }
    Ok(())
}

/// Distances `d(x, γy)` over the cache, restricted to the range the cache
/// certifies (`T − d(o,x) − d(o,y)`), sorted ascending.
pub fn image_distances(
    cache: &OrbitCache,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
) -> Result<(Vec<f64>, f64)> {
    let o = cache.basepoint();
    let reach = cache.radius() - distance(o, x) - distance(o, y);
    if reach < 0.0 {
        return Err(Error::InsufficientData(
            "points lie beyond the cache radius".into(),
        ));
    }
    let mut ds = Vec::new();
    for e in cache.elements() {
        let d = distance(x, &e.matrix.apply(y)?);
        if crate::group::within(d, reach) {
            ds.push(d);
        }
    }
    ds.sort_by(f64::total_cmp);
    Ok((ds, reach))
}

/// Geometric extrapolation of the last two full shells with ratio `e^{−(s−δ̂)}`.
fn geometric_tail(shell_sums: &[f64], s: f64, delta_hat: f64) -> Option<f64> {
    if !(s > delta_hat) {
        return None;
    }
    let n = shell_sums.len();
    let last = match n {
        0 => 0.0,
        1 => shell_sums[0],
        _ => shell_sums[n - 1].max(shell_sums[n - 2]),
    };
    let ratio = (-(s - delta_hat) * SHELL_WIDTH).exp();
    Some(last * ratio / (1.0 - ratio))
}

/// Sums of `weights` grouped by the shell of `keys`, shells `1..=n` (shell 0 dropped).
fn shell_sums(keys: &[f64], weights: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut sums = vec![CompensatedSum::new(); n + 1];
    for (&k, w) in keys.iter().zip(weights) {
        let i = shell_index(k);
        if i <= n {
            sums[i].add(w);
        }
    }
    sums.iter().skip(1).map(CompensatedSum::value).collect()
}

/// Truncated `G_s(x, y) = Σ e^{−s d(x, γy)}` with a geometric tail estimate.
pub fn poincare_partial(
    cache: &OrbitCache,
    s: f64,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    delta_hat: f64,
) -> Result<SeriesValue> {
    check_s(s)?;
    let (ds, reach) = image_distances(cache, x, y)?;
    let partial_sum = ds
        .iter()
        .map(|d| (-s * d).exp())
        .collect::<CompensatedSum>()
        .value();
    let shells = shell_sums(&ds, ds.iter().map(|d| (-s * d).exp()), shell_count(reach));
    Ok(SeriesValue {
        s,
        partial_sum,
        terms_used: ds.len(),
        tail_estimate: geometric_tail(&shells, s, delta_hat),
        radius: reach,
    })
}

/// Partial sums of `G_s(x, y)` at each whole radius up to the certified reach.
pub fn poincare_profile(
    cache: &OrbitCache,
    s: f64,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
) -> Result<Vec<(f64, f64)>> {
    check_s(s)?;
    let (ds, reach) = image_distances(cache, x, y)?;
    let n = shell_count(reach);
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = CompensatedSum::new();
    let mut it = ds.iter().peekable();
    for k in 0..=n {
        let r = k as f64 * SHELL_WIDTH;
        while let Some(&&d) = it.peek() {
            if shell_index(d) > k {
                break;
            }
            acc.add((-s * d).exp());
            it.next();
        }
        out.push((r, acc.value()));
    }
    Ok(out)
}

/// `Σ_{γ≠Id} e^{−s l_γ}` over the cache, tail extrapolated by orbit-distance shells.
pub fn displacement_series(cache: &OrbitCache, s: f64, delta_hat: f64) -> Result<SeriesValue> {
    check_s(s)?;
    let others: Vec<_> = cache
        .elements()
        .iter()
        .filter(|e| !e.is_identity())
        .collect();
    let partial_sum = others
        .iter()
        .map(|e| (-s * e.displacement).exp())
        .collect::<CompensatedSum>()
        .value();
    let keys: Vec<f64> = others.iter().map(|e| e.orbit_distance).collect();
    let shells = shell_sums(
        &keys,
        others.iter().map(|e| (-s * e.displacement).exp()),
        shell_count(cache.radius()),
    );
    Ok(SeriesValue {
        s,
        partial_sum,
        terms_used: others.len(),
        tail_estimate: geometric_tail(&shells, s, delta_hat),
        radius: cache.radius(),
    })
}

fn clamp_delta(delta: f64, n: f64) -> f64 {
    if delta < 0.0 {
        0.0
    } else if delta >= n {
        n * (1.0 - 1e-12)
    } else {
        delta
    }
}

fn outer_half_shells(radius: f64) -> (usize, usize) {
    let n = shell_count(radius);
    (n.div_ceil(2), n)
}

/// Estimate δ_Γ from a complete cache of radius at least `min_radius`.
pub fn estimate_delta(
    cache: &OrbitCache,
    method: Method,
    min_radius: f64,
) -> Result<ExponentEstimate> {
    let t = cache.radius();
    if !cache.is_complete() {
        return Err(Error::InsufficientData("cache is not complete".into()));
    }
    if t < min_radius {
        return Err(Error::InsufficientData(alloc::format!(
            "cache radius {t} below the required {min_radius}"
        )));
    }
    let n = f64::from(cache.group().dimension());
    match method {
        Method::Slope => slope_estimate(cache, n),
        Method::Bisection => bisection_estimate(cache, n),
    }
}

fn slope_estimate(cache: &OrbitCache, n: f64) -> Result<ExponentEstimate> {
    let t = cache.radius();
    let mut ds: Vec<f64> = cache.elements().iter().map(|e| e.orbit_distance).collect();
    ds.sort_by(f64::total_cmp);
    // R grid of step SHELL_WIDTH/4 over the outer half [T/2, T]
    let steps = (2.0 * t / SHELL_WIDTH).floor() as usize;
    let mut rs = Vec::new();
    let mut logs = Vec::new();
    for i in 0..=steps {
        let r = t / 2.0 + i as f64 * SHELL_WIDTH / 4.0;
        if r > t + SHELL_SLACK {
            break;
        }
        let count = ds.partition_point(|&d| d <= r + SHELL_SLACK);
        rs.push(r);
        logs.push((count as f64).ln());
    }
    if rs.len() < 3 {
        return Err(Error::InsufficientData(
            "too few radii for a slope fit".into(),
        ));
    }
    let fit = linear_fit(&rs, &logs)?;
    Ok(ExponentEstimate {
        delta_hat: clamp_delta(fit.slope, n),
        method: Method::Slope,
        half_width: 2.0 * fit.slope_stderr,
        radius: t,
        fit,
    })
}

/// Log-slope of the nonempty outer-half shell sums of `e^{−s d(o,γo)}`.
fn shell_slope(cache: &OrbitCache, s: f64) -> Result<LineFit> {
    let (lo, hi) = outer_half_shells(cache.radius());
    let keys: Vec<f64> = cache.elements().iter().map(|e| e.orbit_distance).collect();
    let sums = shell_sums(&keys, keys.iter().map(|d| (-s * d).exp()), hi);
    let mut ks = Vec::new();
    let mut logs = Vec::new();
    for k in lo.max(1)..=hi {
        let v = sums[k - 1];
        if v > 0.0 {
            ks.push(k as f64 * SHELL_WIDTH);
            logs.push(v.ln());
        }
    }
    if ks.len() < 3 {
        return Err(Error::InsufficientData("too few nonempty shells".into()));
    }
    linear_fit(&ks, &logs)
}

fn bisection_estimate(cache: &OrbitCache, n: f64) -> Result<ExponentEstimate> {
    let f0 = shell_slope(cache, 0.0)?;
    let (delta, fit) = if f0.slope <= 0.0 {
        (0.0, f0)
    } else {
        let fnn = shell_slope(cache, n)?;
        if fnn.slope > 0.0 {
            (n, fnn)
        } else {
            let (mut lo, mut hi) = (0.0, n);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if shell_slope(cache, mid)?.slope > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            (root, shell_slope(cache, root)?)
        }
    };
    Ok(ExponentEstimate {
        delta_hat: clamp_delta(delta, n),
        method: Method::Bisection,
        half_width: 2.0 * fit.slope_stderr,
        radius: cache.radius(),
        fit,
    })
}

/// Refuse unless `δ̂ + CI < n/2`.
pub fn delta_gate(estimate: &ExponentEstimate, n: u32) -> Result<()> {
    let half = f64::from(n) / 2.0;
    if estimate.upper() < half {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(alloc::format!(
            "delta_hat + CI = {:.4} is not below n/2 = {half}",
            estimate.upper()
        )))
    }
}

/// Fitted log-growth rate of `G_s(x, y)` partial sums over the outer half of the reach.
pub fn poincare_growth(
    cache: &OrbitCache,
    s: f64,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
) -> Result<LineFit> {
    let profile = poincare_profile(cache, s, x, y)?;
    let reach = profile.last().map_or(0.0, |p| p.0);
    let (rs, logs): (Vec<f64>, Vec<f64>) = profile
        .iter()
        .filter(|(r, v)| *r >= reach / 2.0 && *v > 0.0)
        .map(|(r, v)| (*r, v.ln()))
        .unzip();
    if rs.len() < 3 {
        return Err(Error::InsufficientData(
            "too few radii for a growth fit".into(),
        ));
    }
    linear_fit(&rs, &logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cylinder_group, enumerate_orbit, EnumerationOptions};

    fn cylinder_cache(l: f64, t: f64) -> OrbitCache {
        enumerate_orbit(&cylinder_group(l).unwrap(), &EnumerationOptions::new(t)).unwrap()
    }

    #[test]
    fn growth_table_of_cylinder() {
        let rows = growth_table(&cylinder_cache(1.0, 10.0));
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].cumulative, 1);
        for r in &rows[1..] {
            assert_eq!(r.shell_count, 2);
        }
        assert_eq!(rows[10].cumulative, 21);
    }

    #[test]
    fn cylinder_poincare_closed_form() {
        let cache = cylinder_cache(1.0, 30.0);
        let o = HalfSpacePoint::origin();
        for s in [0.5, 1.0, 2.0] {
            let v = poincare_partial(&cache, s, &o, &o, 0.0).unwrap();
            let q = (-s).exp();
            let exact = 1.0 + 2.0 * q / (1.0 - q);
            let total = v.total().unwrap();
            // the tail uses the larger of the last two shells, so it brackets from above
            assert!(
                v.partial_sum <= exact && exact <= total * (1.0 + 1e-14),
                "s={s}"
            );
            assert!(total - exact <= (exact - v.partial_sum) * (s.exp() - 1.0) + 1e-12 * exact);
            assert_eq!(v.terms_used, 61);
        }
    }

    #[test]
    fn displacement_series_closed_form_and_monotone() {
        let cache = cylinder_cache(1.0, 40.0);
        let mut prev = f64::INFINITY;
        for s in [0.3, 0.7, 1.5, 3.0, 40.0] {
            let v = displacement_series(&cache, s, 0.0).unwrap();
            let q = (-s).exp();
            let exact = 2.0 * q / (1.0 - q);
            assert!(
                v.partial_sum <= exact * (1.0 + 1e-12)
                    && exact <= v.total().unwrap() * (1.0 + 1e-12)
            );
            assert!(v.partial_sum < prev);
            prev = v.partial_sum;
        }
        assert!(prev < 1e-16);
    }

    #[test]
    fn single_image_group() {
        // translation length beyond the radius leaves only the identity
        let cache = cylinder_cache(25.0, 10.0);
        assert_eq!(cache.len(), 1);
        let x = HalfSpacePoint::from_coords(0.2, 0.1, 1.3).unwrap();
        let y = HalfSpacePoint::from_coords(-0.4, 0.3, 0.8).unwrap();
        let v = poincare_partial(&cache, 0.7, &x, &y, 0.0).unwrap();
        assert!((v.partial_sum - (-0.7 * distance(&x, &y)).exp()).abs() < 1e-15);
        assert_eq!(v.tail_estimate, Some(0.0));
    }

    #[test]
    fn rejects_nonpositive_s() {
        let cache = cylinder_cache(1.0, 5.0);
        let o = HalfSpacePoint::origin();
        assert!(matches!(
            poincare_partial(&cache, 0.0, &o, &o, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            displacement_series(&cache, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn divergent_flag_below_delta() {
        let cache = cylinder_cache(1.0, 10.0);
        let o = HalfSpacePoint::origin();
        let v = poincare_partial(&cache, 0.2, &o, &o, 0.5).unwrap();
        assert!(v.is_divergent());
    }

    #[test]
    fn cylinder_delta_is_small() {
        let cache = cylinder_cache(1.0, 60.0);
        for m in [Method::Slope, Method::Bisection] {
            let e = estimate_delta(&cache, m, DEFAULT_MIN_RADIUS).unwrap();
            assert!(e.delta_hat <= 0.05, "{m:?}: {e:?}");
        }
        assert!(estimate_delta(&cylinder_cache(1.0, 5.0), Method::Slope, 8.0).is_err());
    }

    #[test]
    fn gate_refuses_large_delta() {
        let cache = cylinder_cache(1.0, 60.0);
        let mut e = estimate_delta(&cache, Method::Slope, 8.0).unwrap();
        assert!(delta_gate(&e, 2).is_ok());
        e.delta_hat = 0.99;
        e.half_width = 0.02;
        assert!(matches!(
            delta_gate(&e, 2),
            Err(Error::HypothesisViolation(_))
        ));
        assert_eq!(regime(1.5, &e, DEFAULT_MARGIN), Regime::Convergent);
        assert_eq!(regime(0.5, &e, DEFAULT_MARGIN), Regime::Divergent);
        assert_eq!(regime(1.0, &e, DEFAULT_MARGIN), Regime::Indeterminate);
    }
}
