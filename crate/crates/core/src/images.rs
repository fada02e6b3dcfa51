//! Method of images: the quotient kernel as a sum over orbit translates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exponent::poincare_partial;
use crate::geometry::{distance, HalfSpacePoint};
use crate::group::{OrbitCache, Word};
use crate::kernel::{kernel_h3, KernelQuery, MAX_ORDER};
use crate::sum::CompensatedSum;

/// Slack for the Dirichlet minimality and case inequalities.
pub const CASE_TOL: f64 = 1e-9;
/// `n/2` for H³.
const HALF_N: f64 = 1.0;

/// Representative of `y` closest to `x` among the cached translates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletReduction {
    pub x: HalfSpacePoint,
    pub y_star: HalfSpacePoint,
    /// Word of the element moving `y` to `y_star`.
    pub word: Word,
    pub reduced_distance: f64,
    pub original_distance: f64,
    /// The true minimizer over Γ provably lies in the cache.
    pub certified: bool,
    pub warning: Option<String>,
}

/// Replace `y` by the cached translate `γy` minimizing `d(x, γy)`.
pub fn reduce_to_dirichlet(
    cache: &OrbitCache,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
) -> Result<DirichletReduction> {
    let mut best: Option<(f64, usize, HalfSpacePoint)> = None;
    for (i, e) in cache.elements().iter().enumerate() {
        let gy = e.matrix.apply(y)?;
        let d = distance(x, &gy);
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, i, gy));
        }
    }
    let (d, i, y_star) = best.ok_or_else(|| Error::InsufficientData("empty cache".into()))?;
    let original = distance(x, y);
    // the minimizer γ* satisfies d(o, γ*o) ≤ d(o,x) + d(x,y) + d(o,y)
    let o = cache.basepoint();
    let needed = distance(o, x) + original + distance(o, y);
    let certified = cache.is_complete() && needed <= cache.radius();
    let warning =
        (!certified).then(|| {
            format!(
            "reduction not certified: needs a complete cache of radius {needed:.3}, have {:.3}{}",
            cache.radius(),
            if cache.is_complete() { "" } else { " (incomplete)" }
        )
        });
    Ok(DirichletReduction {
        x: *x,
        y_star,
        word: cache.elements()[i].word.clone(),
        reduced_distance: d,
        original_distance: original,
        certified,
        warning,
    })
}

/// Which branch of the distance dichotomy a reduced pair falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairCase {
    /// `d(x,y) < l₀/2`
    Near,
    /// `d(x,y) ≥ l₀/2`
    Far,
}

/// Components of the truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Truncation distance `T − d(o,x) − d(o,y)` for `d(x, γy)`.
    pub radius: f64,
    pub s: f64,
    /// Partial `G_s(x, y)` plus its geometric tail.
    pub poincare_factor: f64,
    pub formula_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub j: u32,
    pub lambda: f64,
    pub pair_distance: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub s_used: f64,
    pub identity_term: f64,
    /// Sum over the non-identity terms only.
    pub nonidentity_sum: f64,
    /// Cache complete, so the tail bound covers everything left out.
    pub certified: bool,
}

/// Cache, exponent bound and `s` shared by every evaluation on one group.
#[derive(Debug, Clone, Copy)]
pub struct AutomorphicSum<'a> {
    cache: &'a OrbitCache,
    delta_upper: f64,
    l0: f64,
    s: f64,
}

impl<'a> AutomorphicSum<'a> {
    /// `delta_upper` is `δ̂ + CI`; `s` defaults to the midpoint of `(δ̂ + CI, n/2)`.
    pub fn new(cache: &'a OrbitCache, delta_upper: f64, l0: f64, s: Option<f64>) -> Result<Self> {
        if !(l0 > 0.0) || !l0.is_finite() {
            return Err(domain("l0 must be positive and finite"));
        }
        if !(delta_upper >= 0.0) || !delta_upper.is_finite() {
            return Err(domain("delta bound must be finite and nonnegative"));
        }
        let s = s.unwrap_or(0.5 * (delta_upper + HALF_N));
        if !(s > delta_upper && s < HALF_N) {
            return Err(Error::HypothesisViolation(format!(
                "s = {s} must lie strictly between delta_hat + CI = {delta_upper} and n/2 = {HALF_N}"
            )));
        }
        Ok(Self {
            cache,
            delta_upper,
            l0,
            s,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn cache(&self) -> &'a OrbitCache {
        self.cache
    }

    /// Precompute image distances for a reduced pair and check the case inequalities.
    pub fn prepare(&self, x: &HalfSpacePoint, y_star: &HalfSpacePoint) -> Result<PreparedPair> {
        let o = self.cache.basepoint();
        let reach = self.cache.radius() - distance(o, x) - distance(o, y_star);
        let pair_distance = distance(x, y_star);
        if reach <= pair_distance {
            return Err(Error::InsufficientData(format!(
                "cache radius {} leaves no room past d(x,y) = {pair_distance:.4}",
                self.cache.radius()
            )));
        }
        let mut terms = Vec::with_capacity(self.cache.len());
        for e in self.cache.elements() {
            let d = distance(x, &e.matrix.apply(y_star)?);
            let id = e.is_identity();
            if !id {
                if d < pair_distance - CASE_TOL {
                    return Err(Error::CaseViolation(format!(
                        "[{}] gives d(x,γy) = {d} below d(x,y) = {pair_distance}; pair is not Dirichlet-reduced",
                        e.word
                    )));
                }
                if pair_distance < self.l0 / 2.0 && d < self.l0 / 2.0 - CASE_TOL {
                    return Err(Error::CaseViolation(format!(
                        "near pair d(x,y) = {pair_distance} but [{}] gives d(x,γy) = {d} < l0/2 = {}",
                        e.word,
                        self.l0 / 2.0
                    )));
                }
            }
            if crate::group::within(d, reach) {
                terms.push((d, id));
            }
        }
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let g = poincare_partial(self.cache, self.s, x, y_star, self.delta_upper)?;
        let poincare_factor = g.total().ok_or_else(|| {
            Error::HypothesisViolation("Poincaré series flagged divergent at s".into())
        })?;
        Ok(PreparedPair {
            pair_distance,
            case: if pair_distance < self.l0 / 2.0 {
                PairCase::Near
            } else {
                PairCase::Far
            },
            terms,
            reach,
            s: self.s,
            poincare_factor,
            complete: self.cache.is_complete(),
        })
    }

    /// Reduce, prepare and evaluate in one call.
    pub fn evaluate(
        &self,
        x: &HalfSpacePoint,
        y: &HalfSpacePoint,
        lambda: f64,
        j: u32,
    ) -> Result<KernelValue> {
        let red = reduce_to_dirichlet(self.cache, x, y)?;
        self.prepare(x, &red.y_star)?.evaluate(lambda, j)
    }
}

/// Sorted image distances of one reduced pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPair {
    pair_distance: f64,
    case: PairCase,
    terms: Vec<(f64, bool)>,
    reach: f64,
    s: f64,
    poincare_factor: f64,
    complete: bool,
}

impl PreparedPair {
    pub fn pair_distance(&self) -> f64 {
        self.pair_distance
    }

    pub fn case(&self) -> PairCase {
        self.case
    }

    /// Image distances `d(x, γy) ≤ reach`, ascending.
    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    /// Bound on `Σ |∂_λ^j K(λ, d(x,γy))|` over `d(x,γy) > reach`.
    ///
    /// For `d ≥ T`: `|∂^j K| ≤ (λ d^j + j d^{j-1}) / (2π² sinh d)
    /// ≤ (λ + j/T) d^j e^{-d} / (π² (1 − e^{-2T}))`, and
    /// `d^j e^{-d} ≤ sup_{d≥T} d^j e^{-(1-s)d} · e^{-sd}`, summed against `G_s`.
    pub fn tail(&self, lambda: f64, j: u32) -> TailBound {
        let t = self.reach;
        let jf = j as f64;
        let decay = HALF_N - self.s;
        let d_star = t.max(jf / decay);
        let sup = d_star.powi(j as i32) * (-decay * d_star).exp();
        let prefactor = (lambda + jf / t) / (PI * PI * -(-2.0 * t).exp_m1());
        let mut formula_value = prefactor * sup * self.poincare_factor;
        if !self.complete {
            formula_value *= 2.0;
        }
        TailBound {
            radius: t,
            s: self.s,
            poincare_factor: self.poincare_factor,
            formula_value,
        }
    }

    pub fn evaluate(&self, lambda: f64, j: u32) -> Result<KernelValue> {
        if j > MAX_ORDER {
            return Err(Error::UnsupportedOrder(j));
        }
        let mut all = CompensatedSum::new();
        let mut others = CompensatedSum::new();
        let mut identity_term = 0.0;
        for &(d, id) in &self.terms {
            let v = kernel_h3(&KernelQuery::new(lambda, d, j)?)?;
            all.add(v);
            if id {
                identity_term = v;
            } else {
                others.add(v);
            }
        }
        Ok(KernelValue {
            value: all.value(),
            j,
            lambda,
            pair_distance: self.pair_distance,
            terms_used: self.terms.len(),
            tail_bound: self.tail(lambda, j).formula_value,
            s_used: self.s,
            identity_term,
            nonidentity_sum: others.value(),
            certified: self.complete,
        })
    }
}

/// `Σ_{|k|≤K} (1 + λ|offset + k l|)^{-1/2 + j}`: the ℝ² envelope summed over
/// a Euclidean cylinder's translates.
pub fn euclidean_cylinder_sum(lambda: f64, offset: f64, l: f64, j: u32, k_max: u64) -> Result<f64> {
    if j > 1 {
        return Err(domain("euclidean cylinder sum takes j in {0, 1}"));
    }
    if k_max < 1 {
        return Err(domain("K must be at least 1"));
    }
    if !(l > 0.0) || !(lambda > 0.0) || !offset.is_finite() || !l.is_finite() {
        return Err(domain("need l > 0, lambda > 0 and a finite offset"));
    }
    let p = -0.5 + j as f64;
    let k = k_max as i64;
    Ok((-k..=k)
        .map(|i| (1.0 + lambda * (offset + i as f64 * l).abs()).powf(p))
        .collect::<CompensatedSum>()
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Isometry;
    use crate::group::{cylinder_group, enumerate_orbit, EnumerationOptions};

    fn cyl(t: f64) -> OrbitCache {
        enumerate_orbit(&cylinder_group(1.0).unwrap(), &EnumerationOptions::new(t)).unwrap()
    }

    #[test]
    fn reduction_recovers_translate() {
        let cache = cyl(20.0);
        let x = HalfSpacePoint::from_coords(0.1, 0.0, 1.0).unwrap();
        let y0 = HalfSpacePoint::from_coords(0.0, 0.2, 1.3).unwrap();
        let y = Isometry::dilation(1.0).unwrap().pow(5).apply(&y0).unwrap();
        let red = reduce_to_dirichlet(&cache, &x, &y).unwrap();
        assert_eq!(red.word.letters(), &[-1, -1, -1, -1, -1]);
        assert!((red.reduced_distance - distance(&x, &y0)).abs() < 1e-10);
        assert!(red.certified);
        let same = reduce_to_dirichlet(&cache, &x, &y0).unwrap();
        assert!(same.word.is_empty());
        assert!(reduce_to_dirichlet(&cyl(2.0), &x, &y)
            .unwrap()
            .warning
            .is_some());
    }

    #[test]
    fn single_image_is_model_kernel() {
        let cache = enumerate_orbit(
            &cylinder_group(25.0).unwrap(),
            &EnumerationOptions::new(10.0),
        )
        .unwrap();
        let ctx = AutomorphicSum::new(&cache, 0.0, 25.0, None).unwrap();
        let x = HalfSpacePoint::origin();
        let y = HalfSpacePoint::from_coords(0.3, -0.1, 1.4).unwrap();
        let v = ctx.evaluate(&x, &y, 3.0, 1).unwrap();
        let direct = kernel_h3(&KernelQuery::new(3.0, distance(&x, &y), 1).unwrap()).unwrap();
        assert_eq!(v.terms_used, 1);
        assert_eq!(v.value, direct);
        assert_eq!(v.identity_term, direct);
        assert_eq!(v.nonidentity_sum, 0.0);
        // G_s reduces to its single term
        let red = reduce_to_dirichlet(&cache, &x, &y).unwrap();
        let tail = ctx.prepare(&x, &red.y_star).unwrap().tail(3.0, 1);
        assert_eq!(tail.poincare_factor, (-ctx.s() * distance(&x, &y)).exp());
        assert_eq!(tail.formula_value, v.tail_bound);
    }

    #[test]
    fn cylinder_sum_against_closed_form_terms() {
        let o = HalfSpacePoint::origin();
        for lambda in [1.0, 5.0, 25.0] {
            let oracle: f64 = (1..200)
                .map(|k| {
                    let k = k as f64;
                    lambda * (lambda * k).sin() / (2.0 * PI * PI * k.sinh())
                })
                .sum::<f64>()
                * 2.0
                + lambda * lambda / (2.0 * PI * PI);
            let c10 = cyl(10.0);
            let ctx = AutomorphicSum::new(&c10, 0.0, 1.0, None).unwrap();
            let v10 = ctx.evaluate(&o, &o, lambda, 0).unwrap();
            let c20 = cyl(20.0);
            let v20 = AutomorphicSum::new(&c20, 0.0, 1.0, None)
                .unwrap()
                .evaluate(&o, &o, lambda, 0)
                .unwrap();
            assert!((v10.value - oracle).abs() <= v10.tail_bound);
            assert!((v10.value - v20.value).abs() <= v10.tail_bound);
            assert!(v20.tail_bound < v10.tail_bound);
        }
    }

    #[test]
    fn s_must_sit_between_delta_and_half_n() {
        let cache = cyl(5.0);
        assert!(matches!(
            AutomorphicSum::new(&cache, 0.4, 1.0, Some(0.3)),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(matches!(
            AutomorphicSum::new(&cache, 0.4, 1.0, Some(1.0)),
            Err(Error::HypothesisViolation(_))
        ));
        assert!((AutomorphicSum::new(&cache, 0.4, 1.0, None).unwrap().s() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn unreduced_pair_is_rejected() {
        let cache = cyl(12.0);
        let ctx = AutomorphicSum::new(&cache, 0.0, 1.0, None).unwrap();
        let x = HalfSpacePoint::origin();
        let y = HalfSpacePoint::from_coords(0.0, 0.0, 2.0f64.exp()).unwrap();
        assert!(matches!(ctx.prepare(&x, &y), Err(Error::CaseViolation(_))));
        let red = reduce_to_dirichlet(&cache, &x, &y).unwrap();
        let p = ctx.prepare(&x, &red.y_star).unwrap();
        assert_eq!(p.case(), PairCase::Near);
    }

    #[test]
    fn euclidean_sums() {
        let three = euclidean_cylinder_sum(1.0, 0.0, 1.0, 1, 1).unwrap();
        assert!((three - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(euclidean_cylinder_sum(1.0, 0.0, 1.0, 2, 1).is_err());
        assert!(euclidean_cylinder_sum(1.0, 0.0, 1.0, 1, 0).is_err());
        // Σ_{|k|≤K} (1+|k|)^{1/2} ≈ (4/3) K^{3/2}
        let k = 10_000u64;
        let v = euclidean_cylinder_sum(1.0, 0.0, 1.0, 1, k).unwrap();
        assert!((v / (4.0 / 3.0 * (k as f64).powf(1.5)) - 1.0).abs() < 1e-3);
    }
}
