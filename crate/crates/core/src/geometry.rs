//! Exact geometry of hyperbolic 3-space.
//!
//! Points live in the upper half-space model `{(z, t) : z ∈ ℂ, t > 0}`;
//! orientation-preserving isometries are unit-determinant 2×2 complex
//! matrices acting by the quaternionic extension of the Möbius action.
//! The Poincaré ball model is only used through [`BallPoint`] conversions.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `|det - 1|` allowed after normalization.
pub const DETERMINANT_TOL: f64 = 1e-12;
/// Width of the refusal band around the trace segment `[-2, 2]`.
pub const CLASSIFY_BAND: f64 = 1e-9;
/// Traces closer than this to `±2` (or to the real axis) count as exact.
pub const TRACE_EXACT_TOL: f64 = 1e-12;
/// Heights below this after an action are rejected.
pub const MIN_HEIGHT: f64 = 1e-300;
/// Ball points with `1 - |b|` below this are too close to the sphere at infinity.
pub const BALL_BOUNDARY_TOL: f64 = 1e-15;

const IDENTITY_TOL: f64 = 1e-9;

/// A point of H³ in the upper half-space model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    horizontal: Complex64,
    height: f64,
}

impl HalfSpacePoint {
    pub fn new(horizontal: Complex64, height: f64) -> Result<Self> {
        if !(horizontal.re.is_finite() && horizontal.im.is_finite() && height.is_finite()) {
            return Err(domain("point coordinates must be finite"));
        }
        if height <= 0.0 {
            return Err(domain("point height must be positive"));
        }
        Ok(Self { horizontal, height })
    }

    pub fn from_coords(x: f64, y: f64, height: f64) -> Result<Self> {
        Self::new(Complex64::new(x, y), height)
    }

    /// The point `(0, 0; 1)`, image of the ball origin.
    pub fn origin() -> Self {
        Self {
            horizontal: Complex64::new(0.0, 0.0),
            height: 1.0,
        }
    }

    pub fn horizontal(&self) -> Complex64 {
        self.horizontal
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn distance(&self, other: &HalfSpacePoint) -> f64 {
        distance(self, other)
    }
}

/// Hyperbolic distance, `cosh d = 1 + (|z - z'|² + (t - t')²) / (2 t t')`.
///
/// Evaluated as `2 asinh(|p - q|_E / (2 sqrt(t t')))`, which has no
/// cancellation for nearby points.
pub fn distance(p: &HalfSpacePoint, q: &HalfSpacePoint) -> f64 {
    let dz = p.horizontal - q.horizontal;
    let dt = p.height - q.height;
    let euclid = libm::hypot(libm::hypot(dz.re, dz.im), dt);
    let scale = 2.0 * p.height.sqrt() * q.height.sqrt();
    2.0 * (euclid / scale).asinh()
}

/// A point of the Poincaré ball model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: [f64; 3],
}

impl BallPoint {
    pub fn new(coords: [f64; 3]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("ball coordinates must be finite"));
        }
        if norm3(&coords) >= 1.0 {
            return Err(domain("ball point must have Euclidean norm < 1"));
        }
        Ok(Self { coords })
    }

    pub fn origin() -> Self {
        Self { coords: [0.0; 3] }
    }

    /// The point at hyperbolic distance `d` from the origin in direction `dir`.
    pub fn at_distance(dir: [f64; 3], d: f64) -> Result<Self> {
        let n = norm3(&dir);
        if !(n > 0.0) || !n.is_finite() || !(d >= 0.0) || !d.is_finite() {
            return Err(domain("direction must be nonzero and distance finite"));
        }
        let rho = (d / 2.0).tanh();
        if 1.0 - rho < BALL_BOUNDARY_TOL {
            return Err(Error::Precision(
                "point too close to the ideal boundary".into(),
            ));
        }
        Self::new([rho * dir[0] / n, rho * dir[1] / n, rho * dir[2] / n])
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.coords)
    }

    /// Ball-model distance, `arccosh(1 + 2|x - y|² / ((1 - |x|²)(1 - |y|²)))`.
    pub fn distance(&self, other: &BallPoint) -> f64 {
        let diff = [
            self.coords[0] - other.coords[0],
            self.coords[1] - other.coords[1],
            self.coords[2] - other.coords[2],
        ];
        let num = norm3(&diff);
        let den = ((1.0 - self.norm_sqr()) * (1.0 - other.norm_sqr())).sqrt();
        // arccosh(1 + 2u²) = 2 asinh(u)
        2.0 * (num / den).asinh()
    }

    /// `log((1 + |y|) / (1 - |y|))`, the distance from the origin.
    pub fn distance_from_origin(&self) -> f64 {
        let r = self.norm();
        2.0 * r.atanh()
    }

    fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    libm::hypot(libm::hypot(v[0], v[1]), v[2])
}

/// Map from half-space to ball sending `(0, 0; 1)` to the origin.
///
/// `b = (2z, |z|² + t² - 1) / (|z|² + (t + 1)²)`.
pub fn ball_from_halfspace(p: &HalfSpacePoint) -> Result<BallPoint> {
    let z = p.horizontal;
    let t = p.height;
    let zz = z.norm_sqr();
    let den = zz + (t + 1.0) * (t + 1.0);
    let coords = [2.0 * z.re / den, 2.0 * z.im / den, (zz + t * t - 1.0) / den];
    // 1 - |b|² = 4t / den
    if 4.0 * t / den < 2.0 * BALL_BOUNDARY_TOL {
        return Err(Error::Precision("image lies on the ideal boundary".into()));
    }
    BallPoint::new(coords)
}

/// Inverse of [`ball_from_halfspace`].
pub fn halfspace_from_ball(b: &BallPoint) -> Result<HalfSpacePoint> {
    let [u1, u2, w] = b.coords;
    let one_minus_w = 1.0 - w;
    let den = u1 * u1 + u2 * u2 + one_minus_w * one_minus_w;
    let one_minus_r2 = (1.0 - b.norm()) * (1.0 + b.norm());
    if one_minus_r2 < BALL_BOUNDARY_TOL || den < BALL_BOUNDARY_TOL {
        return Err(Error::Precision(
            "ball point adjacent to the ideal boundary".into(),
        ));
    }
    let t = one_minus_r2 / den;
    if t < MIN_HEIGHT {
        return Err(Error::Precision("height underflow".into()));
    }
    HalfSpacePoint::new(Complex64::new(2.0 * u1 / den, 2.0 * u2 / den), t)
}

/// Conjugacy type of an isometry, read off its trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// An orientation-preserving isometry of H³: `[[a, b], [c, d]]` with `ad - bc = 1`.
///
/// `g` and `-g` act identically; [`Isometry::is_identity`] and
/// [`Isometry::approx_eq`] compare up to that sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Isometry {
    /// Build from entries, rescaling so the determinant is exactly one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if [a, b, c, d]
            .iter()
            .any(|x| !(x.re.is_finite() && x.im.is_finite()))
        {
            return Err(domain("matrix entries must be finite"));
        }
        let det = a * d - b * c;
        let scale = [a, b, c, d]
            .iter()
            .map(|x| x.norm_sqr())
            .fold(0.0, f64::max);
        if !(det.norm() > 1e-14 * scale) || !det.norm().is_finite() {
            return Err(Error::Precision("matrix is (nearly) singular".into()));
        }
        let k = det.sqrt().inv();
        let g = Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        };
        if (g.determinant() - 1.0).norm() > DETERMINANT_TOL {
            return Err(Error::Precision(
                "normalization lost the unit determinant".into(),
            ));
        }
        Ok(g)
    }

    /// Entries that are already normalized (read back from disk): the
    /// determinant is checked, not rescaled, so stored bits survive.
    pub fn from_unit_entries(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self> {
        if [a, b, c, d]
            .iter()
            .any(|x| !(x.re.is_finite() && x.im.is_finite()))
        {
            return Err(domain("matrix entries must be finite"));
        }
        let g = Self { a, b, c, d };
        let scale = [a, b, c, d]
            .iter()
            .map(|x| x.norm_sqr())
            .fold(1.0, f64::max);
        if (g.determinant() - 1.0).norm() > 1e-9 * scale {
            return Err(Error::Precision(
                "entries do not have unit determinant".into(),
            ));
        }
        Ok(g)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `diag(e^{l/2}, e^{-l/2})`: translation by `l` along the vertical axis.
    pub fn dilation(l: f64) -> Result<Self> {
        if !l.is_finite() {
            return Err(domain("dilation length must be finite"));
        }
        let h = (l / 2.0).exp();
        Self::from_real(h, 0.0, 0.0, 1.0 / h)
    }

    /// `z ↦ e^{iθ} z`, an elliptic rotation about the vertical axis.
    pub fn rotation(theta: f64) -> Result<Self> {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        Self::new(h, 0.0.into(), 0.0.into(), h.inv())
    }

    /// The isometry taking `(0, 0; 1)` to `p` (a similarity `z ↦ t z + w`).
    pub fn moving_origin_to(p: &HalfSpacePoint) -> Self {
        let s = p.height().sqrt();
        Self {
            a: s.into(),
            b: p.horizontal() / s,
            c: 0.0.into(),
            d: (1.0 / s).into(),
        }
    }

    /// Action on the sphere at infinity, `z ↦ (az + b) / (cz + d)`.
    pub fn mobius(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// All entries have zero imaginary part (up to `tol`).
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries().iter().all(|x| x.im.abs() <= tol)
    }

    /// `self ∘ other` (apply `other` first). No renormalization: for large
    /// entries the computed determinant is dominated by cancellation, so
    /// rescaling by it would add error rather than remove drift.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self^n` for any integer `n` (negative powers use the inverse).
    pub fn pow(&self, n: i32) -> Isometry {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Isometry::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Entrywise comparison up to the global sign.
    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        let close = |s: f64| {
            self.entries()
                .iter()
                .zip(other.entries())
                .all(|(x, y)| (*x - y * s).norm() <= tol)
        };
        close(1.0) || close(-1.0)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::identity(), tol)
    }

    /// Action on the upper half-space.
    ///
    /// `(z, t) ↦ (((az + b)·conj(cz + d) + a·conj(c)·t²) / D, t / D)` with
    /// `D = |cz + d|² + |c|² t²`.
    pub fn apply(&self, p: &HalfSpacePoint) -> Result<HalfSpacePoint> {
        let z = p.horizontal();
        let t = p.height();
        let w = self.c * z + self.d;
        let t2 = t * t;
        let den = w.norm_sqr() + self.c.norm_sqr() * t2;
        let num = (self.a * z + self.b) * w.conj() + self.a * self.c.conj() * t2;
        let height = t / den;
        if !(height >= MIN_HEIGHT) || !height.is_finite() {
            return Err(Error::Precision("height underflow after isometry".into()));
        }
        let horizontal = num / den;
        if !(horizontal.re.is_finite() && horizontal.im.is_finite()) {
            return Err(Error::Precision("non-finite image".into()));
        }
        Ok(HalfSpacePoint { horizontal, height })
    }

    /// Classify by trace. Inside the tolerance band around `[-2, 2]` the
    /// result is refused rather than guessed.
    pub fn classify(&self) -> Result<Class> {
        let tr = self.trace();
        let (re, im) = (tr.re, tr.im.abs());
        let dist_to_segment = if re.abs() <= 2.0 {
            im
        } else {
            libm::hypot(re.abs() - 2.0, im)
        };
        if dist_to_segment > CLASSIFY_BAND {
            return Ok(Class::Loxodromic);
        }
        if self.is_identity(IDENTITY_TOL) {
            return Ok(Class::Identity);
        }
        if im <= TRACE_EXACT_TOL && re.abs() <= 2.0 - CLASSIFY_BAND {
            return Ok(Class::Elliptic);
        }
        if (re.abs() - 2.0).abs() <= TRACE_EXACT_TOL && im <= TRACE_EXACT_TOL {
            return Ok(Class::Parabolic);
        }
        Err(Error::AmbiguousClassification { trace: tr })
    }

    /// Translation length `l = min_z d(z, g z) = 2 Re arccosh(tr / 2)`.
    ///
    /// Computed as `2 log|μ|` where `μ` is the larger-modulus root of
    /// `μ² - tr·μ + 1`. The identity returns 0.
    pub fn displacement_length(&self) -> Result<f64> {
        match self.classify()? {
            Class::Identity => Ok(0.0),
            Class::Loxodromic => Ok(translation_length_from_trace(self.trace())),
            other => Err(Error::UnsupportedElement(other)),
        }
    }
}

/// `2 log|μ|`, `μ + 1/μ = tr`, `|μ| ≥ 1`.
pub fn translation_length_from_trace(tr: Complex64) -> f64 {
    let disc = ((tr - 2.0) * (tr + 2.0)).sqrt();
    let m1 = (tr + disc) * 0.5;
    let m2 = (tr - disc) * 0.5;
    let mu = if m1.norm_sqr() >= m2.norm_sqr() {
        m1
    } else {
        m2
    };
    2.0 * mu.norm().ln()
}

/// Unit vector helper used by sample placement: spherical angles to a 3-vector.
pub(crate) fn unit_vector(cos_polar: f64, azimuth: f64) -> [f64; 3] {
    let sin_polar = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
    [
        sin_polar * azimuth.cos(),
        sin_polar * azimuth.sin(),
        cos_polar,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn pt(x: f64, y: f64, t: f64) -> HalfSpacePoint {
        HalfSpacePoint::from_coords(x, y, t).unwrap()
    }

    #[test]
    fn vertical_distance_is_log_height_ratio() {
        let d = distance(&pt(0.0, 0.0, 1.0), &pt(0.0, 0.0, core::f64::consts::E));
        assert!((d - 1.0).abs() < 1e-15);
        assert_eq!(distance(&pt(0.3, -0.2, 2.0), &pt(0.3, -0.2, 2.0)), 0.0);
    }

    #[test]
    fn horizontal_distance_matches_model_formula() {
        let d = distance(&pt(0.0, 0.0, 1.0), &pt(3.0, 0.0, 1.0));
        assert!((d - 5.5f64.acosh()).abs() < 1e-14);
        assert!((d - 2.389_526_4).abs() < 1e-6);
    }

    /// Length of the Euclidean segment between the two points measured in the
    /// hyperbolic metric is an upper bound; the geodesic (a semicircle
    /// orthogonal to the boundary) realizes the distance. Integrate along it.
    #[test]
    fn horizontal_distance_matches_geodesic_integration() {
        // geodesic between (0,1) and (3,1) in the vertical plane y = 0:
        // circle centered at (1.5, 0) of radius sqrt(1.5² + 1).
        let rad = (1.5f64 * 1.5 + 1.0).sqrt();
        let th0 = (1.0 / rad).asin();
        let th1 = core::f64::consts::PI - th0;
        let n = 200_000;
        let h = (th1 - th0) / n as f64;
        // ds/t = rad dθ / (rad sin θ) = dθ / sin θ
        let mut acc = 0.0;
        for i in 0..n {
            let th = th0 + (i as f64 + 0.5) * h;
            acc += h / th.sin();
        }
        assert!((acc - 5.5f64.acosh()).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(HalfSpacePoint::from_coords(0.0, 0.0, 0.0).is_err());
        assert!(HalfSpacePoint::from_coords(f64::NAN, 0.0, 1.0).is_err());
        assert!(HalfSpacePoint::from_coords(0.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn dilation_moves_origin_up() {
        let g = Isometry::dilation(1.0).unwrap();
        let p = g.apply(&HalfSpacePoint::origin()).unwrap();
        assert!(p.horizontal().norm() < 1e-15);
        assert!((p.height() - core::f64::consts::E).abs() < 1e-14);
        assert!((distance(&HalfSpacePoint::origin(), &p) - 1.0).abs() < 1e-14);
        assert_eq!(Isometry::identity().apply(&p).unwrap(), p);
    }

    #[test]
    fn inverse_law() {
        let g = Isometry::new(
            Complex64::new(1.2, 0.3),
            Complex64::new(-0.5, 2.0),
            Complex64::new(0.7, -0.1),
            Complex64::new(2.0, 0.4),
        )
        .unwrap();
        let p = pt(0.4, -1.3, 0.7);
        let q = g.apply(&g.inverse().apply(&p).unwrap()).unwrap();
        assert!(distance(&p, &q) < 1e-10);
        assert!(g.compose(&g.inverse()).is_identity(1e-12));
    }

    #[test]
    fn normalization() {
        let g = Isometry::from_real(2.0, 1.0, 1.0, 3.0).unwrap();
        assert!((g.determinant() - 1.0).norm() < 1e-15);
        assert!(matches!(
            Isometry::from_real(1.0, 2.0, 2.0, 4.0),
            Err(Error::Precision(_))
        ));
        assert!(Isometry::from_real(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(Isometry::identity().classify().unwrap(), Class::Identity);
        assert_eq!(
            Isometry::dilation(1.0).unwrap().classify().unwrap(),
            Class::Loxodromic
        );
        assert_eq!(
            Isometry::rotation(0.7).unwrap().classify().unwrap(),
            Class::Elliptic
        );
        let parabolic = Isometry::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(parabolic.classify().unwrap(), Class::Parabolic);
        // -Id is the identity isometry
        let minus = Isometry::from_real(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(minus.classify().unwrap(), Class::Identity);
        // trace 2 + 5e-10: inside the band, not exactly parabolic
        let e = 5e-10;
        let borderline = Isometry::from_real(1.0, 1.0, e, 1.0 + e).unwrap();
        assert!(matches!(
            borderline.classify(),
            Err(Error::AmbiguousClassification { .. })
        ));
        // purely imaginary trace is loxodromic
        let g = Isometry::new(
            Complex64::new(0.0, 1.5),
            0.0.into(),
            0.0.into(),
            Complex64::new(0.0, -1.0 / 1.5),
        )
        .unwrap();
        assert_eq!(g.classify().unwrap(), Class::Loxodromic);
    }

    #[test]
    fn displacement_of_dilation() {
        assert_eq!(Isometry::identity().displacement_length().unwrap(), 0.0);
        let g = Isometry::dilation(1.0).unwrap();
        assert!((g.displacement_length().unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            Isometry::rotation(1.0).unwrap().displacement_length(),
            Err(Error::UnsupportedElement(Class::Elliptic))
        ));
    }

    #[test]
    fn displacement_is_minimal_over_sampled_points() {
        let g = Isometry::new(
            Complex64::new(1.5, 0.4),
            Complex64::new(0.3, -0.8),
            Complex64::new(-0.2, 0.6),
            Complex64::new(0.9, 0.1),
        )
        .unwrap();
        let l = g.displacement_length().unwrap();
        let mut min_seen = f64::INFINITY;
        for i in 0..100 {
            let f = i as f64;
            let p = pt(
                (f * 0.37).sin() * 2.0,
                (f * 0.73).cos() * 2.0,
                0.2 + (f * 0.11).fract() * 3.0,
            );
            let d = distance(&p, &g.apply(&p).unwrap());
            assert!(l <= d + 1e-12);
            min_seen = min_seen.min(d);
        }
        assert!(min_seen.is_finite());
    }

    #[test]
    fn ball_conversion() {
        let b = ball_from_halfspace(&HalfSpacePoint::origin()).unwrap();
        assert!(b.norm() < 1e-16);
        let samples: Vec<HalfSpacePoint> = (0..100)
            .map(|i| {
                let f = i as f64;
                pt(
                    (f * 1.3).sin() * 3.0,
                    (f * 0.7).cos() * 3.0,
                    0.05 + (f * 0.37).fract() * 4.0,
                )
            })
            .collect();
        for w in samples.windows(2) {
            let (p, q) = (w[0], w[1]);
            let bp = ball_from_halfspace(&p).unwrap();
            let bq = ball_from_halfspace(&q).unwrap();
            let back = halfspace_from_ball(&bp).unwrap();
            assert!(
                (back.horizontal() - p.horizontal()).norm() < 1e-12 * (1.0 + p.horizontal().norm())
            );
            assert!((back.height() - p.height()).abs() < 1e-12 * p.height().max(1.0));
            let d = distance(&p, &q);
            assert!((bp.distance(&bq) - d).abs() < 1e-10 * (1.0 + d));
            let d0 = distance(&HalfSpacePoint::origin(), &q);
            assert!((bq.distance_from_origin() - d0).abs() < 1e-10 * (1.0 + d0));
        }
    }

    #[test]
    fn ball_rejects_boundary() {
        assert!(BallPoint::new([1.0, 0.0, 0.0]).is_err());
        let near = BallPoint::new([0.0, 0.0, 1.0 - 1e-17]);
        assert!(near.is_err() || halfspace_from_ball(&near.unwrap()).is_err());
    }

    #[test]
    fn at_distance_places_points() {
        let b = BallPoint::at_distance([1.0, 2.0, -0.5], 2.5).unwrap();
        assert!((b.distance_from_origin() - 2.5).abs() < 1e-13);
        let p = halfspace_from_ball(&b).unwrap();
        assert!((distance(&HalfSpacePoint::origin(), &p) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn moving_origin() {
        let p = pt(1.5, -0.25, 0.3);
        let g = Isometry::moving_origin_to(&p);
        let q = g.apply(&HalfSpacePoint::origin()).unwrap();
        assert!(distance(&p, &q) < 1e-14);
    }
}
