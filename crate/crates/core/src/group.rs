//! Group presentations, reduced words and orbit enumeration.
//!
//! Groups are given by loxodromic generators and are treated as free on
//! them (Schottky groups). Elements are reduced words in the generators and
//! their inverses; an [`OrbitCache`] holds every word whose orbit point
//! `γo` lies within a radius `T` of the basepoint `o`.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{distance, translation_length_from_trace, Class, HalfSpacePoint, Isometry};

/// Default cap on the number of cached elements.
pub const DEFAULT_MAX_ELEMENTS: usize = 5_000_000;
/// Orbit distances up to this much beyond the radius still count as inside,
/// so lattice-aligned orbits (e.g. the cylinder at integer `T`) are not split by rounding.
pub const RADIUS_SLACK: f64 = 1e-9;

pub(crate) fn within(d: f64, radius: f64) -> bool {
    d <= radius + RADIUS_SLACK
}

/// Matrices of distinct short words closer than this trigger a discreteness warning.
const DUPLICATE_TOL: f64 = 1e-6;
const DUPLICATE_CHECK_MAX_LEN: usize = 4;

/// A reduced word. Letter `k > 0` is generator `k - 1`, letter `-k` its inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Build a word, rejecting zero letters and unreduced adjacency.
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        let w = Word(letters);
        if w.0.contains(&0) {
            return Err(domain("word letters must be nonzero"));
        }
        if !w.is_reduced() {
            return Err(domain("word is not reduced"));
        }
        Ok(w)
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduce(letters: &[i32]) -> Result<Self> {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 {
                return Err(domain("word letters must be nonzero"));
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Free product `self · other`, reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        // letters are nonzero by construction
        Word::reduce(&letters).unwrap_or_default()
    }

    fn with_letter(&self, letter: i32) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(letter);
        Word(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A circle in ℂ, standing for the geodesic plane (hemisphere) above it.
///
/// `contains_infinity` selects which complementary disk is the closed
/// Schottky disk: the bounded one (`false`) or the one through ∞ (`true`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
    pub contains_infinity: bool,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0)
            || !radius.is_finite()
            || !center.re.is_finite()
            || !center.im.is_finite()
        {
            return Err(domain("circle needs finite center and positive radius"));
        }
        Ok(Circle {
            center,
            radius,
            contains_infinity: false,
        })
    }

    pub fn outer(center: Complex64, radius: f64) -> Result<Self> {
        Ok(Circle {
            contains_infinity: true,
            ..Circle::new(center, radius)?
        })
    }

    /// Hyperbolic distance between the two planes, `None` if they meet.
    ///
    /// `cosh d = |(|c₁ - c₂|² - r₁² - r₂²) / (2 r₁ r₂)|` (inversive distance).
    pub fn plane_distance(&self, other: &Circle) -> Option<f64> {
        let inv = ((self.center - other.center).norm_sqr()
            - self.radius * self.radius
            - other.radius * other.radius)
            / (2.0 * self.radius * other.radius);
        let a = inv.abs();
        if a > 1.0 {
            Some(a.acosh())
        } else {
            None
        }
    }

    /// Hyperbolic distance from a point to the plane,
    /// `sinh d = ||z - c|² + t² - r²| / (2 r t)`.
    pub fn point_distance(&self, p: &HalfSpacePoint) -> f64 {
        let t = p.height();
        let num = (p.horizontal() - self.center).norm_sqr() + t * t - self.radius * self.radius;
        (num.abs() / (2.0 * self.radius * t)).asinh()
    }

    /// Whether the closed Schottky disks of the two circles are disjoint.
    pub fn disk_disjoint(&self, other: &Circle) -> bool {
        let gap = (self.center - other.center).norm();
        match (self.contains_infinity, other.contains_infinity) {
            (false, false) => gap > self.radius + other.radius,
            (false, true) => gap + self.radius < other.radius,
            (true, false) => gap + other.radius < self.radius,
            (true, true) => false,
        }
    }

    /// Whether the point lies strictly inside the closed Schottky disk's half-ball.
    pub fn encloses(&self, p: &HalfSpacePoint) -> bool {
        let t = p.height();
        let s = (p.horizontal() - self.center).norm_sqr() + t * t;
        let inside_ball = s < self.radius * self.radius;
        inside_ball != self.contains_infinity
    }
}

/// Pairwise disjoint Schottky planes with the basepoint outside all of them.
///
/// Every reduced word `w` then satisfies
/// `d(o, w o) ≥ b₀ + (|w| - 1)·m`, where `m` is the least distance between
/// distinct planes and `b₀` the distance from `o` to the nearest plane: the
/// geodesic from `o` to `w o` crosses `|w|` nested planes, consecutive ones
/// at least `m` apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyCertificate {
    planes: Vec<Circle>,
    separation: f64,
    basepoint_clearance: f64,
}

impl SchottkyCertificate {
    pub fn new(planes: Vec<Circle>, basepoint: &HalfSpacePoint) -> Result<Self> {
        if planes.len() < 2 {
            return Err(Error::InvalidGroup(
                "certificate needs at least two planes".into(),
            ));
        }
        let mut separation = f64::INFINITY;
        for (i, p) in planes.iter().enumerate() {
            for q in &planes[i + 1..] {
                match p.plane_distance(q) {
                    Some(d) if p.disk_disjoint(q) => separation = separation.min(d),
                    _ => {
                        return Err(Error::InvalidGroup("Schottky disks overlap".into()));
                    }
                }
            }
            if p.encloses(basepoint) {
                return Err(Error::InvalidGroup(
                    "basepoint lies inside a Schottky disk".into(),
                ));
            }
        }
        let basepoint_clearance = planes
            .iter()
            .map(|p| p.point_distance(basepoint))
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            planes,
            separation,
            basepoint_clearance,
        })
    }

    pub fn planes(&self) -> &[Circle] {
        &self.planes
    }

    /// Least distance between distinct planes.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn basepoint_clearance(&self) -> f64 {
        self.basepoint_clearance
    }

    /// Certified lower bound on `d(o, w o)` for reduced words of length `len`.
    pub fn distance_lower_bound(&self, len: usize) -> f64 {
        if len == 0 {
            0.0
        } else {
            self.basepoint_clearance + (len - 1) as f64 * self.separation
        }
    }

    /// Longest word length that can still have `d(o, w o) ≤ radius`.
    pub fn max_word_length(&self, radius: f64) -> usize {
        if radius < self.basepoint_clearance {
            return 0;
        }
        1 + ((radius - self.basepoint_clearance) / self.separation).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub matrix: Isometry,
}

/// Loxodromic generators of a (free) Kleinian group, with a basepoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPresentation {
    name: String,
    generators: Vec<Generator>,
    basepoint: HalfSpacePoint,
    known_delta: Option<f64>,
    certificate: Option<SchottkyCertificate>,
}

impl GroupPresentation {
    /// Validate generators: nonempty, unique labels, all loxodromic.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<(String, Isometry)>,
        basepoint: HalfSpacePoint,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidGroup(
                "at least one generator is required".into(),
            ));
        }
        let mut labels = BTreeSet::new();
        let mut gens = Vec::with_capacity(generators.len());
        for (label, matrix) in generators {
            if label.is_empty() || !labels.insert(label.clone()) {
                return Err(Error::InvalidGroup(format!(
                    "generator labels must be unique and nonempty (got {label:?})"
                )));
            }
            // re-normalize in case the matrix was built field by field
            let [a, b, c, d] = matrix.entries();
            let matrix = Isometry::new(a, b, c, d)?;
            match matrix.classify() {
                Ok(Class::Loxodromic) => {}
                Ok(class) => {
                    return Err(Error::InvalidGroup(format!(
                        "generator {label} is {class:?}, not loxodromic"
                    )));
                }
                Err(Error::AmbiguousClassification { trace }) => {
                    return Err(Error::InvalidGroup(format!(
                        "generator {label} has borderline trace {}{:+}i",
                        trace.re, trace.im
                    )));
                }
                Err(e) => return Err(e),
            }
            gens.push(Generator { label, matrix });
        }
        Ok(Self {
            name: name.into(),
            generators: gens,
            basepoint,
            known_delta: None,
            certificate: None,
        })
    }

    /// Attach a critical exponent known in closed form.
    pub fn with_known_delta(mut self, delta: f64) -> Self {
        self.known_delta = Some(delta);
        self
    }

    /// Attach Schottky planes certifying a word-length lower bound.
    pub fn with_certificate(mut self, planes: Vec<Circle>) -> Result<Self> {
        self.certificate = Some(SchottkyCertificate::new(planes, &self.basepoint)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn basepoint(&self) -> &HalfSpacePoint {
        &self.basepoint
    }

    pub fn known_delta(&self) -> Option<f64> {
        self.known_delta
    }

    pub fn certificate(&self) -> Option<&SchottkyCertificate> {
        self.certificate.as_ref()
    }

    /// `1` when every generator is real (the group preserves a copy of H²), else `2`.
    pub fn dimension(&self) -> u32 {
        if self.generators.iter().all(|g| g.matrix.is_real(1e-14)) {
            1
        } else {
            2
        }
    }

    /// Matrix of a single signed letter.
    pub fn letter_matrix(&self, letter: i32) -> Result<Isometry> {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > self.generators.len() {
            return Err(domain(format!("letter {letter} out of range")));
        }
        let g = self.generators[idx - 1].matrix;
        Ok(if letter > 0 { g } else { g.inverse() })
    }

    pub fn word_matrix(&self, word: &Word) -> Result<Isometry> {
        word.letters()
            .iter()
            .try_fold(Isometry::identity(), |acc, &l| {
                Ok(acc.compose(&self.letter_matrix(l)?))
            })
    }

    /// All letters `±1..=±rank`.
    pub fn letters(&self) -> Vec<i32> {
        let r = self.generators.len() as i32;
        (1..=r).flat_map(|k| [k, -k]).collect()
    }

    /// `max_g d(o, g o)` over generators (inverses move `o` equally far).
    pub fn max_step(&self) -> Result<f64> {
        let o = self.basepoint;
        self.generators
            .iter()
            .try_fold(0.0f64, |m, g| Ok(m.max(distance(&o, &g.matrix.apply(&o)?))))
    }

    pub fn min_step(&self) -> Result<f64> {
        let o = self.basepoint;
        self.generators.iter().try_fold(f64::INFINITY, |m, g| {
            Ok(m.min(distance(&o, &g.matrix.apply(&o)?)))
        })
    }

    /// Word-level element record: matrix, `d(o, γo)` and `l_γ`.
    pub fn element(&self, word: Word) -> Result<OrbitElement> {
        let matrix = self.word_matrix(&word)?;
        OrbitElement::from_parts(word, matrix, &self.basepoint)
    }
}

/// Cyclic group generated by `diag(e^{l/2}, e^{-l/2})`; basepoint on the axis.
///
/// Limit set `{0, ∞}`, so the critical exponent is 0.
pub fn cylinder_group(l: f64) -> Result<GroupPresentation> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(domain("cylinder length must be positive and finite"));
    }
    let h = (l / 2.0).exp();
    let zero = Complex64::new(0.0, 0.0);
    GroupPresentation::new(
        format!("cylinder(l={l})"),
        vec![("g".into(), Isometry::dilation(l)?)],
        HalfSpacePoint::origin(),
    )?
    .with_known_delta(0.0)
    .with_certificate(vec![Circle::new(zero, 1.0 / h)?, Circle::outer(zero, h)?])
}

/// Two real translations of length `translation` along perpendicular axes
/// (the unit semicircle and the imaginary axis) meeting at the basepoint
/// `(0, 0; 1)`. Schottky, hence free and discrete, iff `sinh(translation/2) > 1`;
/// larger translations push the Schottky planes apart and lower δ.
pub fn fuchsian_schottky(translation: f64) -> Result<GroupPresentation> {
    if !translation.is_finite() || !((translation / 2.0).sinh() > 1.0) {
        return Err(Error::InvalidGroup(
            "perpendicular translations need sinh(L/2) > 1 to be Schottky".into(),
        ));
    }
    let half = translation / 2.0;
    let a = Isometry::from_real(half.cosh(), half.sinh(), half.sinh(), half.cosh())?;
    let b = Isometry::dilation(translation)?;
    // bisector planes at distance L/2 from o along each axis
    let t = (translation / 4.0).tanh();
    let side_center = (t + 1.0 / t) / 2.0;
    let side_radius = (1.0 / t - t) / 2.0;
    let zero = Complex64::new(0.0, 0.0);
    let planes = vec![
        Circle::new(Complex64::new(-side_center, 0.0), side_radius)?,
        Circle::new(Complex64::new(side_center, 0.0), side_radius)?,
        Circle::new(zero, (-half).exp())?,
        Circle::outer(zero, half.exp())?,
    ];
    GroupPresentation::new(
        format!("fuchsian-schottky(L={translation})"),
        vec![("a".into(), a), ("b".into(), b)],
        HalfSpacePoint::origin(),
    )?
    .with_certificate(planes)
}

/// Classical Schottky data: the generator for a pair maps the exterior of
/// `from` onto the interior of `to` by `z ↦ c' + r r' u / (z - c)` with
/// `|u| = 1`. Real centers with `u = -1` give a Fuchsian generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePairing {
    pub from: Circle,
    pub to: Circle,
    pub twist: Complex64,
}

impl CirclePairing {
    pub fn matrix(&self) -> Result<Isometry> {
        if self.from.contains_infinity || self.to.contains_infinity {
            return Err(domain("pairing circles must bound disks in ℂ"));
        }
        if ((self.twist.norm()) - 1.0).abs() > 1e-12 {
            return Err(domain("pairing twist must have unit modulus"));
        }
        let (c, r) = (self.from.center, self.from.radius);
        let (cp, rp) = (self.to.center, self.to.radius);
        Isometry::new(cp, self.twist * (r * rp) - c * cp, 1.0.into(), -c)
    }
}

pub fn schottky_from_circles(
    name: impl Into<String>,
    pairings: &[CirclePairing],
    basepoint: HalfSpacePoint,
) -> Result<GroupPresentation> {
    if pairings.is_empty() {
        return Err(Error::InvalidGroup(
            "at least one circle pairing is required".into(),
        ));
    }
    let mut gens = Vec::with_capacity(pairings.len());
    let mut planes = Vec::with_capacity(2 * pairings.len());
    for (i, p) in pairings.iter().enumerate() {
        gens.push((format!("g{}", i + 1), p.matrix()?));
        planes.push(p.from);
        planes.push(p.to);
    }
    GroupPresentation::new(name, gens, basepoint)?.with_certificate(planes)
}

/// One cached group element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitElement {
    pub word: Word,
    pub matrix: Isometry,
    /// `d(o, γo)`.
    pub orbit_distance: f64,
    /// Translation length `l_γ` (0 for the identity).
    pub displacement: f64,
}

impl OrbitElement {
    pub fn from_parts(word: Word, matrix: Isometry, basepoint: &HalfSpacePoint) -> Result<Self> {
        let orbit_distance = distance(basepoint, &matrix.apply(basepoint)?);
        let displacement = if word.is_empty() {
            0.0
        } else {
            translation_length_from_trace(matrix.trace())
        };
        Ok(Self {
            word,
            matrix,
            orbit_distance,
            displacement,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

fn element_order(a: &OrbitElement, b: &OrbitElement) -> Ordering {
    a.orbit_distance
        .total_cmp(&b.orbit_distance)
        .then_with(|| a.word.len().cmp(&b.word.len()))
        .then_with(|| a.word.cmp(&b.word))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    pub radius: f64,
    pub max_elements: usize,
    /// Words are expanded while `d(o, wo) - lookahead·max_step ≤ radius`.
    /// Zero disables lookahead and forfeits the completeness flag.
    pub lookahead: u32,
}

impl EnumerationOptions {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            radius: 10.0,
            max_elements: DEFAULT_MAX_ELEMENTS,
            lookahead: 1,
        }
    }
}

/// Every reduced word with `d(o, γo) ≤ radius`, sorted by orbit distance.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitCache {
    group: GroupPresentation,
    radius: f64,
    elements: Vec<OrbitElement>,
    complete: bool,
    warnings: Vec<String>,
}

impl core::fmt::Debug for OrbitCache {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OrbitCache")
            .field("group", &self.group.name())
            .field("radius", &self.radius)
            .field("elements", &self.elements.len())
            .field("complete", &self.complete)
            .field("warnings", &self.warnings.len())
            .finish()
    }
}

impl OrbitCache {
    /// Assemble a cache from stored elements (e.g. read back from disk).
    /// Elements are re-sorted; the identity must be present and words unique.
    pub fn from_elements(
        group: GroupPresentation,
        radius: f64,
        mut elements: Vec<OrbitElement>,
        complete: bool,
    ) -> Result<Self> {
        elements.sort_by(element_order);
        if !elements.first().is_some_and(|e| e.is_identity()) {
            return Err(domain("orbit cache must contain the identity"));
        }
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !e.word.is_reduced() || !seen.insert(e.word.clone()) {
                return Err(domain(format!("duplicate or unreduced word {}", e.word)));
            }
        }
        Ok(Self {
            group,
            radius,
            elements,
            complete,
            warnings: Vec::new(),
        })
    }

    pub fn group(&self) -> &GroupPresentation {
        &self.group
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> &[OrbitElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Set when enumeration finished within budget with a conservative prune.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn basepoint(&self) -> &HalfSpacePoint {
        self.group.basepoint()
    }

    pub fn max_orbit_distance(&self) -> f64 {
        self.elements.last().map_or(0.0, |e| e.orbit_distance)
    }

    pub fn find(&self, word: &Word) -> Option<&OrbitElement> {
        self.elements.iter().find(|e| &e.word == word)
    }

    /// Restrict to elements with `d(o, γo) ≤ radius` (a smaller cache).
    pub fn truncated(&self, radius: f64) -> OrbitCache {
        let r = radius.min(self.radius);
        OrbitCache {
            group: self.group.clone(),
            radius: r,
            elements: self
                .elements
                .iter()
                .filter(|e| within(e.orbit_distance, r))
                .cloned()
                .collect(),
            complete: self.complete,
            warnings: self.warnings.clone(),
        }
    }
}

/// Breadth-first enumeration over reduced words with distance pruning.
///
/// A word is kept when `d(o, wo) ≤ T` and extended while
/// `d(o, wo) - lookahead·max_g d(o, go) ≤ T`; by the triangle inequality a
/// child moves at most one generator step from its parent.
pub fn enumerate_orbit(group: &GroupPresentation, opts: &EnumerationOptions) -> Result<OrbitCache> {
    let radius = opts.radius;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(domain("enumeration radius must be finite and nonnegative"));
    }
    let o = *group.basepoint();
    let slack = opts.lookahead as f64 * group.max_step()?;
    let letters = group.letters();
    let letter_mats: Vec<Isometry> = letters
        .iter()
        .map(|&l| group.letter_matrix(l))
        .collect::<Result<_>>()?;

    let mut kept = vec![OrbitElement::from_parts(
        Word::identity(),
        Isometry::identity(),
        &o,
    )?];
    let mut frontier: Vec<(Word, Isometry)> = vec![(Word::identity(), Isometry::identity())];
    let mut budget_hit = false;

    'levels: while !frontier.is_empty() {
        let mut next = Vec::new();
        for (word, mat) in &frontier {
            let last = word.letters().last().copied();
            for (&letter, lm) in letters.iter().zip(&letter_mats) {
                if last == Some(-letter) {
                    continue;
                }
                let child_mat = mat.compose(lm);
                let d = distance(&o, &child_mat.apply(&o)?);
                let child = word.with_letter(letter);
                if within(d, radius) {
                    kept.push(OrbitElement::from_parts(child.clone(), child_mat, &o)?);
                }
                if d - slack <= radius {
                    next.push((child, child_mat));
                }
                if kept.len() > opts.max_elements || next.len() > opts.max_elements {
                    budget_hit = true;
                    break 'levels;
                }
            }
        }
        frontier = next;
    }

    kept.sort_by(element_order);
    let mut cache = OrbitCache {
        group: group.clone(),
        radius,
        elements: kept,
        complete: !budget_hit && opts.lookahead >= 1,
        warnings: Vec::new(),
    };
    cache.warnings = duplicate_warnings(&cache.elements);
    if budget_hit {
        cache.complete = false;
        return Err(Error::BudgetExceeded(Box::new(cache)));
    }
    Ok(cache)
}

/// Discreteness heuristic: distinct short words with (nearly) equal matrices.
const MAX_WARNINGS: usize = 16;

fn duplicate_warnings(elements: &[OrbitElement]) -> Vec<String> {
    let short: Vec<&OrbitElement> = elements
        .iter()
        .filter(|e| e.word.len() <= DUPLICATE_CHECK_MAX_LEN)
        .collect();
    let mut out = Vec::new();
    let mut total = 0usize;
    for (i, a) in short.iter().enumerate() {
        for b in &short[i + 1..] {
            if (a.orbit_distance - b.orbit_distance).abs() > DUPLICATE_TOL {
                continue;
            }
            if a.matrix.approx_eq(&b.matrix, DUPLICATE_TOL) {
                total += 1;
                if out.len() < MAX_WARNINGS {
                    out.push(format!(
                        "words [{}] and [{}] give equal matrices; the group may not be free or discrete",
                        a.word, b.word
                    ));
                }
            }
        }
    }
    if total > out.len() {
        out.push(format!(
            "{} further coincident pairs not listed",
            total - out.len()
        ));
    }
    out
}

/// Unpruned enumeration: every reduced word of length `≤ max_len`, filtered by
/// distance. With `max_len` from a [`SchottkyCertificate`] this is exact.
pub fn exhaustive_orbit(
    group: &GroupPresentation,
    radius: f64,
    max_len: usize,
) -> Result<Vec<OrbitElement>> {
    let o = *group.basepoint();
    let letters = group.letters();
    let mut out = vec![OrbitElement::from_parts(
        Word::identity(),
        Isometry::identity(),
        &o,
    )?];
    let mut layer: Vec<(Word, Isometry)> = vec![(Word::identity(), Isometry::identity())];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for (w, m) in &layer {
            for &l in &letters {
                if w.letters().last() == Some(&-l) {
                    continue;
                }
                let child = w.with_letter(l);
                let cm = m.compose(&group.letter_matrix(l)?);
                next.push((child, cm));
            }
        }
        for (w, m) in &next {
            let e = OrbitElement::from_parts(w.clone(), *m, &o)?;
            if within(e.orbit_distance, radius) {
                out.push(e);
            }
        }
        layer = next;
    }
    out.sort_by(element_order);
    Ok(out)
}

/// Shortest nonidentity displacement `l₀` found in a cache.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortestDisplacement {
    pub value: f64,
    /// `T ≥ 2 l₀`: any shorter element would have appeared.
    pub certified: bool,
}

pub fn shortest_displacement(cache: &OrbitCache) -> Result<ShortestDisplacement> {
    let value = cache
        .elements
        .iter()
        .filter(|e| !e.is_identity())
        .map(|e| e.displacement)
        .fold(f64::INFINITY, f64::min);
    if !value.is_finite() {
        return Err(Error::InsufficientData(
            "cache holds only the identity; cannot determine l0".into(),
        ));
    }
    Ok(ShortestDisplacement {
        value,
        certified: cache.radius >= 2.0 * value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementCount {
    pub count: usize,
    /// `false` when `R` exceeds the cache radius or the cache is incomplete.
    pub certified: bool,
}

/// `N(R) = #{γ : l_γ ≤ R}` over the cache, identity included (`l_Id = 0`).
pub fn count_by_displacement(cache: &OrbitCache, r: f64) -> Result<DisplacementCount> {
    if !(r >= 0.0) || r.is_nan() {
        return Err(domain("count radius must be nonnegative"));
    }
    let count = cache
        .elements
        .iter()
        .filter(|e| e.displacement <= r)
        .count();
    Ok(DisplacementCount {
        count,
        certified: cache.complete && r <= cache.radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    #[test]
    fn word_reduction() {
        let w = Word::reduce(&[1, 2, -2, -1, 1]).unwrap();
        assert_eq!(w.letters(), &[1]);
        assert!(Word::new(vec![1, -1]).is_err());
        assert!(Word::new(vec![0]).is_err());
        let a = Word::new(vec![1, 2]).unwrap();
        assert_eq!(a.concat(&a.inverse()), Word::identity());
        assert_eq!(std::format!("{}", Word::new(vec![1, -2]).unwrap()), "1 -2");
    }

    #[test]
    fn cylinder_orbit_is_axis_translates() {
        let g = cylinder_group(1.0).unwrap();
        assert!((g.generators()[0].matrix.trace().re - 2.0 * 0.5f64.cosh()).abs() < 1e-14);
        assert_eq!(g.known_delta(), Some(0.0));
        let cache = enumerate_orbit(&g, &EnumerationOptions::new(3.5)).unwrap();
        assert_eq!(cache.len(), 7);
        assert!(cache.is_complete());
        for e in cache.elements() {
            let k = e.word.len() as f64;
            assert!((e.orbit_distance - k).abs() < 1e-12);
            assert!((e.displacement - k).abs() < 1e-12);
        }
        let only_id = enumerate_orbit(&g, &EnumerationOptions::new(0.0)).unwrap();
        assert_eq!(only_id.len(), 1);
        assert!(only_id.elements()[0].is_identity());
    }

    #[test]
    fn cylinder_rejects_nonpositive_length() {
        assert!(matches!(cylinder_group(0.0), Err(Error::Domain(_))));
        assert!(matches!(cylinder_group(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn validation_rejects_elliptic_and_duplicates() {
        let o = HalfSpacePoint::origin();
        let rot = Isometry::rotation(0.9).unwrap();
        assert!(matches!(
            GroupPresentation::new("x", vec![("r".into(), rot)], o),
            Err(Error::InvalidGroup(_))
        ));
        let g = Isometry::dilation(1.0).unwrap();
        assert!(matches!(
            GroupPresentation::new("x", vec![("g".into(), g), ("g".into(), g)], o),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            GroupPresentation::new("x", Vec::new(), o),
            Err(Error::InvalidGroup(_))
        ));
    }

    #[test]
    fn circle_pairing_builds_loxodromic_generators() {
        let c = |x: f64, r: f64| Circle::new(Complex64::new(x, 0.0), r).unwrap();
        let pairs = [
            CirclePairing {
                from: c(-3.0, 1.0),
                to: c(3.0, 1.0),
                twist: (-1.0).into(),
            },
            CirclePairing {
                from: c(-0.4, 0.1),
                to: c(0.4, 0.1),
                twist: (-1.0).into(),
            },
        ];
        let o = HalfSpacePoint::from_coords(1.5, 0.0, 1.0).unwrap();
        let g = schottky_from_circles("pair", &pairs, o).unwrap();
        assert_eq!(g.dimension(), 1);
        for (p, gen) in pairs.iter().zip(g.generators()) {
            assert_eq!(gen.matrix.classify().unwrap(), Class::Loxodromic);
            // the point of `from` nearest the origin of ℂ maps onto `to`
            let z = p.from.center + p.from.radius;
            let w = gen.matrix.mobius(z);
            assert!(((w - p.to.center).norm() - p.to.radius).abs() < 1e-12);
        }
    }

    #[test]
    fn fuchsian_planes_are_paired_by_generators() {
        let g = fuchsian_schottky(3.0).unwrap();
        let cert = g.certificate().unwrap();
        let l: f64 = 3.0;
        let expected = l.min(((l / 2.0).sinh().powi(2)).acosh());
        assert!((cert.separation() - expected).abs() < 1e-12);
        assert!((cert.basepoint_clearance() - l / 2.0).abs() < 1e-12);
        // b maps the inner circle onto the outer one; a maps left onto right
        let planes = cert.planes();
        for (gen, from, to) in [(1usize, 2usize, 3usize), (0, 0, 1)] {
            let m = g.generators()[gen].matrix;
            for k in 0..8 {
                let z = planes[from].center
                    + Complex64::from_polar(planes[from].radius, k as f64 * 0.7 + 0.1);
                let w = m.mobius(z);
                assert!(((w - planes[to].center).norm() - planes[to].radius).abs() < 1e-10);
            }
        }
        assert!(fuchsian_schottky(1.5).is_err());
    }

    #[test]
    fn shortest_displacement_and_counts() {
        for l in [1.0, 0.3] {
            let g = cylinder_group(l).unwrap();
            let cache = enumerate_orbit(&g, &EnumerationOptions::new(3.5)).unwrap();
            let s = shortest_displacement(&cache).unwrap();
            assert!((s.value - l).abs() < 1e-12);
            assert!(s.certified);
        }
        let g = cylinder_group(1.0).unwrap();
        let cache = enumerate_orbit(&g, &EnumerationOptions::new(3.5)).unwrap();
        assert_eq!(count_by_displacement(&cache, 3.2).unwrap().count, 7);
        assert_eq!(count_by_displacement(&cache, 2.5).unwrap().count, 5);
        assert_eq!(count_by_displacement(&cache, 0.0).unwrap().count, 1);
        assert!(!count_by_displacement(&cache, 5.0).unwrap().certified);
        let id_only = enumerate_orbit(&g, &EnumerationOptions::new(0.0)).unwrap();
        assert!(matches!(
            shortest_displacement(&id_only),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn budget_exceeded_carries_partial_cache() {
        let g = fuchsian_schottky(2.5).unwrap();
        let opts = EnumerationOptions {
            radius: 12.0,
            max_elements: 50,
            lookahead: 1,
        };
        match enumerate_orbit(&g, &opts) {
            Err(Error::BudgetExceeded(partial)) => {
                assert!(!partial.is_complete());
                assert!(partial.len() >= 50);
                assert!(partial.elements()[0].is_identity());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_matrices_warn() {
        // a and a² generate a non-free presentation: words "2" and "1 1" coincide
        let a = Isometry::dilation(1.0).unwrap();
        let g = GroupPresentation::new(
            "nonfree",
            vec![("a".into(), a), ("b".into(), a.compose(&a))],
            HalfSpacePoint::origin(),
        )
        .unwrap();
        // relators such as a b⁻¹ a have zero displacement, so the orbit is
        // infinite and the budget trips; the partial cache still carries warnings
        let opts = EnumerationOptions {
            radius: 2.0,
            max_elements: 500,
            lookahead: 1,
        };
        match enumerate_orbit(&g, &opts) {
            Err(Error::BudgetExceeded(partial)) => assert!(!partial.warnings().is_empty()),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
