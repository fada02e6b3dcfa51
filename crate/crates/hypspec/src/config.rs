//! Run configuration: group spec, radii, grids, seeds. Parsed from TOML and
//! validated before anything is computed.

use std::path::Path;

use hypspec_core::group::{cylinder_group, fuchsian_schottky};
use hypspec_core::{GroupPresentation, HalfSpacePoint, Isometry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Cylinder,
    FuchsianSchottky,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub label: String,
    pub a: ComplexSpec,
    pub b: ComplexSpec,
    pub c: ComplexSpec,
    pub d: ComplexSpec,
}

/// Either a builtin with its length parameter or inline generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub builtin: Option<Builtin>,
    /// Cylinder translation length `l`, or the Fuchsian Schottky translation `L`.
    pub length: Option<f64>,
    pub name: Option<String>,
    pub basepoint: Option<PointSpec>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    pub known_delta: Option<f64>,
}

impl GroupSpec {
    pub fn cylinder(l: f64) -> Self {
        Self {
            builtin: Some(Builtin::Cylinder),
            length: Some(l),
            name: None,
            basepoint: None,
            generators: Vec::new(),
            known_delta: None,
        }
    }

    pub fn fuchsian_schottky(l: f64) -> Self {
        Self {
            builtin: Some(Builtin::FuchsianSchottky),
            ..Self::cylinder(l)
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match (self.builtin, self.generators.is_empty()) {
            (Some(_), false) => {
                return Err(invalid(
                    "group: give either `builtin` or `generators`, not both",
                ))
            }
            (None, true) => return Err(invalid("group: needs `builtin` or `generators`")),
            (Some(_), true) => {
                let l = self
                    .length
                    .ok_or_else(|| invalid("group: builtin groups need `length`"))?;
                positive("group.length", l)?;
                if self.basepoint.is_some() {
                    return Err(invalid("group: builtin groups fix their own basepoint"));
                }
            }
            (None, false) => {
                if self.length.is_some() {
                    return Err(invalid("group: `length` only applies to builtins"));
                }
            }
        }
        if let Some(p) = &self.basepoint {
            positive("group.basepoint.height", p.height)?;
            finite("group.basepoint.x", p.x)?;
            finite("group.basepoint.y", p.y)?;
        }
        if let Some(d) = self.known_delta {
            if !(0.0..2.0).contains(&d) {
                return Err(invalid("group.known_delta must lie in [0, 2)"));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<GroupPresentation, CliError> {
        self.validate()?;
        let g = match self.builtin {
            Some(Builtin::Cylinder) => cylinder_group(self.length.unwrap_or_default())?,
            Some(Builtin::FuchsianSchottky) => fuchsian_schottky(self.length.unwrap_or_default())?,
            None => {
                let gens = self
                    .generators
                    .iter()
                    .map(|g| {
                        Isometry::new(g.a.into(), g.b.into(), g.c.into(), g.d.into())
                            .map(|m| (g.label.clone(), m))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let base = match self.basepoint {
                    Some(p) => HalfSpacePoint::from_coords(p.x, p.y, p.height)?,
                    None => HalfSpacePoint::origin(),
                };
                GroupPresentation::new(
                    self.name.clone().unwrap_or_else(|| "custom".into()),
                    gens,
                    base,
                )?
            }
        };
        Ok(match self.known_delta {
            Some(d) => g.with_known_delta(d),
            None => g,
        })
    }
}

/// `count` log-spaced values in `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl LogGridSpec {
    fn validate(&self, what: &str) -> Result<(), CliError> {
        positive(&format!("{what}.min"), self.min)?;
        positive(&format!("{what}.max"), self.max)?;
        if self.max < self.min || self.count == 0 {
            return Err(invalid(&format!("{what}: need min <= max and count >= 1")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        hypspec_core::verify::log_grid(self.min, self.max, self.count).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairSpec {
    pub count: usize,
    pub d_min: f64,
    pub d_max: f64,
}

impl Default for PairSpec {
    fn default() -> Self {
        Self {
            count: 12,
            d_min: 0.05,
            d_max: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaMethod {
    Slope,
    Bisection,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeltaSpec {
    pub method: DeltaMethod,
    pub min_radius: f64,
    /// Enumerate a separate cache of this radius for δ estimation.
    pub radius: Option<f64>,
}

impl Default for DeltaSpec {
    fn default() -> Self {
        Self {
            method: DeltaMethod::Both,
            min_radius: hypspec_core::exponent::DEFAULT_MIN_RADIUS,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoincareSpec {
    /// Exponents to tabulate; empty means `δ̂ ± 0.3`.
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub l0: Vec<f64>,
    pub lambda: LogGridSpec,
    pub r_max: f64,
    pub r_count: usize,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            l0: vec![0.5, 1.0, 2.0],
            lambda: LogGridSpec {
                min: 1.0,
                max: 100.0,
                count: 40,
            },
            r_max: 20.0,
            r_count: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    /// Larger radius for the truncation comparison (off when absent).
    pub larger_radius: Option<f64>,
    /// `R₀` for the distance lemma; defaults to `2 l₀`.
    pub lemma_r0: Option<f64>,
    /// Radius decrement for the lemma stability comparison.
    pub lemma_step: f64,
    pub model: bool,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            larger_radius: None,
            lemma_r0: None,
            lemma_step: 2.0,
            model: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleSpec {
    pub lambda: f64,
    pub l: f64,
    pub ks: Vec<u64>,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            l: 1.0,
            ks: vec![1_000, 10_000, 100_000, 1_000_000],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_lambda")]
    pub lambda: LogGridSpec,
    #[serde(default = "default_orders")]
    pub orders: Vec<u32>,
    pub s: Option<f64>,
    #[serde(default)]
    pub pairs: PairSpec,
    #[serde(default)]
    pub delta: DeltaSpec,
    #[serde(default)]
    pub poincare: PoincareSpec,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub counterexample: CounterexampleSpec,
}

fn default_radius() -> f64 {
    14.0
}
fn default_budget() -> usize {
    hypspec_core::group::DEFAULT_MAX_ELEMENTS
}
fn default_seed() -> u64 {
    1
}
fn default_lambda() -> LogGridSpec {
    LogGridSpec {
        min: 1.0,
        max: 50.0,
        count: 12,
    }
}
fn default_orders() -> Vec<u32> {
    vec![0, 2]
}

impl RunConfig {
    pub fn new(group: GroupSpec) -> Self {
        Self {
            group,
            radius: default_radius(),
            budget: default_budget(),
            seed: default_seed(),
            lambda: default_lambda(),
            orders: default_orders(),
            s: None,
            pairs: PairSpec::default(),
            delta: DeltaSpec::default(),
            poincare: PoincareSpec::default(),
            model: ModelSpec::default(),
            verify: VerifySpec::default(),
            counterexample: CounterexampleSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.group.validate()?;
        nonnegative("radius", self.radius)?;
        if self.budget == 0 {
            return Err(invalid("budget must be at least 1"));
        }
        self.lambda.validate("lambda")?;
        if self.orders.is_empty()
            || self
                .orders
                .iter()
                .any(|&j| j > hypspec_core::kernel::MAX_ORDER)
        {
            return Err(invalid("orders must be a nonempty subset of 0..=4"));
        }
        if let Some(s) = self.s {
            if !(s > 0.0 && s < 1.0) {
                return Err(invalid("s must lie in (0, 1)"));
            }
        }
        if self.pairs.count == 0 {
            return Err(invalid("pairs.count must be at least 1"));
        }
        positive("pairs.d_min", self.pairs.d_min)?;
        positive("pairs.d_max", self.pairs.d_max)?;
        if self.pairs.d_max < self.pairs.d_min {
            return Err(invalid("pairs: need d_min <= d_max"));
        }
        nonnegative("delta.min_radius", self.delta.min_radius)?;
        if let Some(r) = self.delta.radius {
            positive("delta.radius", r)?;
        }
        for &s in &self.poincare.s {
            positive("poincare.s", s)?;
        }
        if self.model.l0.is_empty() {
            return Err(invalid("model.l0 must be nonempty"));
        }
        for &l in &self.model.l0 {
            positive("model.l0", l)?;
        }
        self.model.lambda.validate("model.lambda")?;
        positive("model.r_max", self.model.r_max)?;
        if self.model.r_count == 0 {
            return Err(invalid("model.r_count must be at least 1"));
        }
        if let Some(r) = self.verify.larger_radius {
            if !r.is_finite() || r <= self.radius {
                return Err(invalid("verify.larger_radius must exceed radius"));
            }
        }
        if let Some(r) = self.verify.lemma_r0 {
            nonnegative("verify.lemma_r0", r)?;
        }
        positive("verify.lemma_step", self.verify.lemma_step)?;
        positive("counterexample.lambda", self.counterexample.lambda)?;
        positive("counterexample.l", self.counterexample.l)?;
        if self.counterexample.ks.len() < 4 || self.counterexample.ks.contains(&0) {
            return Err(invalid(
                "counterexample.ks needs at least 4 positive values",
            ));
        }
        Ok(())
    }
}

fn invalid(msg: &str) -> CliError {
    CliError::Config(msg.into())
}

fn finite(what: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(&format!("{what} must be finite")))
    }
}

fn positive(what: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(&format!("{what} must be positive and finite")))
    }
}

fn nonnegative(what: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(&format!("{what} must be nonnegative and finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_with_defaults() {
        let cfg =
            RunConfig::from_toml_str("[group]\nbuiltin = \"cylinder\"\nlength = 1.0\n").unwrap();
        assert_eq!(cfg.radius, 14.0);
        assert_eq!(cfg.pairs.count, 12);
        let g = cfg.group.build().unwrap();
        assert_eq!(g.known_delta(), Some(0.0));
    }

    #[test]
    fn inline_generators() {
        let text = r#"
radius = 6.0
[group]
name = "dilation"
known_delta = 0.0
[[group.generators]]
label = "a"
a = { re = 2.0 }
b = { re = 0.0 }
c = { re = 0.0 }
d = { re = 0.5 }
"#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        let g = cfg.group.build().unwrap();
        assert_eq!(g.rank(), 1);
        assert_eq!(g.name(), "dilation");
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::new(GroupSpec::fuchsian_schottky(3.0));
        let back = RunConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            "[group]\nbuiltin = \"cylinder\"\n",
            "[group]\nbuiltin = \"cylinder\"\nlength = -1.0\n",
            "radius = -2.0\n[group]\nbuiltin = \"cylinder\"\nlength = 1.0\n",
            "s = 1.5\n[group]\nbuiltin = \"cylinder\"\nlength = 1.0\n",
            "orders = [5]\n[group]\nbuiltin = \"cylinder\"\nlength = 1.0\n",
            "[group]\nbuiltin = \"torus\"\nlength = 1.0\n",
            "bogus = 1\n[group]\nbuiltin = \"cylinder\"\nlength = 1.0\n",
            "[group]\nname = \"empty\"\n",
        ] {
            assert!(
                matches!(RunConfig::from_toml_str(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }
}
