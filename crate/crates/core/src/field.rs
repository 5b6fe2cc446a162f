//! External magnetic fields h: Z² → ℝ and their norms.
//!
//! Four families are supported: a constant field, a finite table (optionally
//! overriding another field), an isotropic power law
//! `h_i = ±A (1 + ‖i‖)^{-p}` and a constant plus a power law.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Region, Site};

/// Tail tolerance used when a caller needs ‖h‖₁ but did not ask for one.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub amplitude: f64,
    pub exponent: f64,
    /// +1 or −1.
    pub sign: f64,
}

impl PowerLaw {
    pub fn new(amplitude: f64, exponent: f64) -> Self {
        Self {
            amplitude,
            exponent,
            sign: 1.0,
        }
    }

    pub fn negative(amplitude: f64, exponent: f64) -> Self {
        Self {
            amplitude,
            exponent,
            sign: -1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Parse(format!(
                "power-law amplitude must be finite and non-negative, got {}",
                self.amplitude
            )));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::Parse(format!(
                "power-law exponent must be positive, got {}",
                self.exponent
            )));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::Parse(format!("power-law sign must be ±1, got {}", self.sign)));
        }
        Ok(())
    }

    pub fn value(&self, site: Site) -> f64 {
        self.sign * self.magnitude_at_radius(site.norm())
    }

    fn magnitude_at_radius(&self, r: i64) -> f64 {
        self.amplitude * (1.0 + r as f64).powf(-self.exponent)
    }

    fn summable(&self) -> bool {
        self.amplitude == 0.0 || self.exponent > 2.0
    }

    /// Σ over the shell ‖i‖ = r of |h_i|, divided by the amplitude.
    fn unit_shell(&self, r: u64) -> f64 {
        let count = if r == 0 { 1.0 } else { 4.0 * r as f64 };
        count * (1.0 + r as f64).powf(-self.exponent)
    }

    /// ∫_a^∞ 4r(1+r)^{-p} dr.
    fn unit_tail_integral(&self, a: f64) -> f64 {
        let p = self.exponent;
        let u = 1.0 + a;
        4.0 * (u.powf(2.0 - p) / (p - 2.0) - u.powf(1.0 - p) / (p - 1.0))
    }

    /// Certified bracket `(upper, lower)` for Σ_{i∈Z²} |h_i| with
    /// `upper − lower ≤ tolerance`.
    ///
    /// The shells r ≤ R are summed directly. For r ≥ 2 the shell function
    /// 4r(1+r)^{-p} is convex, so the remaining sum lies between the
    /// trapezoid estimate ∫_{R+1}^∞ + f(R+1)/2 and the midpoint estimate
    /// ∫_{R+½}^∞.
    pub fn l1_bracket(&self, tolerance: f64) -> (f64, f64) {
        if self.amplitude == 0.0 {
            return (0.0, 0.0);
        }
        if !self.summable() {
            return (f64::INFINITY, f64::INFINITY);
        }
        let a = self.amplitude;
        let mut sum = NeumaierSum::default();
        let mut next: u64 = 0;
        let mut radius: u64 = 8;
        loop {
            while next <= radius {
                sum.add(self.unit_shell(next));
                next += 1;
            }
            let r = radius as f64;
            let upper_tail = self.unit_tail_integral(r + 0.5);
            let lower_tail = self.unit_tail_integral(r + 1.0) + 0.5 * self.unit_shell(radius + 1);
            let partial = sum.value();
            let upper = a * (partial + upper_tail);
            let lower = a * (partial + lower_tail);
            if upper - lower <= tolerance || radius >= 1 << 30 {
                return (upper, lower.min(upper));
            }
            radius *= 2;
        }
    }

    /// Sup of h over Z² minus `excluded`.
    fn sup_outside(&self, excluded: &BTreeSet<Site>) -> f64 {
        if self.amplitude == 0.0 || self.sign < 0.0 {
            // negative values approach 0 from below at infinity
            return 0.0;
        }
        let mut per_radius: BTreeMap<i64, usize> = BTreeMap::new();
        for s in excluded {
            *per_radius.entry(s.norm()).or_default() += 1;
        }
        let mut r = 0i64;
        loop {
            let shell = if r == 0 { 1 } else { 4 * r as usize };
            if per_radius.get(&r).copied().unwrap_or(0) < shell {
                return self.magnitude_at_radius(r);
            }
            r += 1;
        }
    }
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldSpec {
    Uniform(f64),
    /// Explicit values on a finite support; elsewhere `base`, or 0 without one.
    Table {
        values: BTreeMap<Site, f64>,
        base: Option<Box<FieldSpec>>,
    },
    PowerLaw(PowerLaw),
    /// `offset + decay`.
    Shifted { offset: f64, decay: PowerLaw },
}

/// Norms of a field. `l1` is never below the true ‖h‖₁; `l1_lower` is a
/// certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l1: f64,
    pub l1_lower: f64,
    pub sup: f64,
    /// lim inf of h_i as ‖i‖ → ∞.
    pub inf_outside_every_box: f64,
}

impl FieldNorms {
    pub fn is_summable(&self) -> bool {
        self.l1.is_finite()
    }
}

impl FieldSpec {
    pub fn zero() -> Self {
        FieldSpec::Uniform(0.0)
    }

    pub fn table(values: impl IntoIterator<Item = (Site, f64)>) -> Self {
        FieldSpec::Table {
            values: values.into_iter().collect(),
            base: None,
        }
    }

    pub fn power_law(amplitude: f64, exponent: f64) -> Self {
        FieldSpec::PowerLaw(PowerLaw::new(amplitude, exponent))
    }

    /// A constant `value` on every site of `window`, zero elsewhere.
    pub fn constant_on(window: &Region, value: f64) -> Self {
        FieldSpec::table(window.sites().map(|s| (s, value)))
    }

    /// This field with `values` taking precedence on their support.
    pub fn with_overrides(self, values: impl IntoIterator<Item = (Site, f64)>) -> Self {
        FieldSpec::Table {
            values: values.into_iter().collect(),
            base: Some(Box::new(self)),
        }
    }

    /// The same field with h_i replaced by zero on `window`.
    pub fn zeroed_on(&self, window: &Region) -> Self {
        self.clone().with_overrides(window.sites().map(|s| (s, 0.0)))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Uniform(h) => finite("uniform field", *h),
            FieldSpec::Table { values, base } => {
                for (s, v) in values {
                    finite(&format!("table value at {s}"), *v)?;
                }
                base.as_deref().map_or(Ok(()), FieldSpec::validate)
            }
            FieldSpec::PowerLaw(p) => p.validate(),
            FieldSpec::Shifted { offset, decay } => {
                finite("shift", *offset)?;
                decay.validate()
            }
        }
    }

    pub fn value(&self, site: Site) -> f64 {
        match self {
            FieldSpec::Uniform(h) => *h,
            FieldSpec::Table { values, base } => match values.get(&site) {
                Some(v) => *v,
                None => base.as_ref().map_or(0.0, |b| b.value(site)),
            },
            FieldSpec::PowerLaw(p) => p.value(site),
            FieldSpec::Shifted { offset, decay } => offset + decay.value(site),
        }
    }

    /// Field values on the sites of `region`, in region index order.
    pub fn values_on(&self, region: &Region) -> Vec<f64> {
        region.sites().map(|s| self.value(s)).collect()
    }

    /// Whether h_i ≥ 0 on every site of Z².
    pub fn is_nonnegative(&self) -> bool {
        match self {
            FieldSpec::Uniform(h) => *h >= 0.0,
            FieldSpec::Table { values, base } => {
                values.values().all(|v| *v >= 0.0)
                    && base.as_ref().is_none_or(|b| b.is_nonnegative())
            }
            FieldSpec::PowerLaw(p) => p.sign > 0.0 || p.amplitude == 0.0,
            FieldSpec::Shifted { offset, decay } => {
                let low = if decay.sign > 0.0 { 0.0 } else { -decay.amplitude };
                offset + low >= 0.0
            }
        }
    }

    pub fn norms(&self, tail_tolerance: f64) -> FieldNorms {
        let (l1, l1_lower) = self.l1_outside(&BTreeSet::new(), tail_tolerance);
        FieldNorms {
            l1,
            l1_lower,
            sup: self.sup_outside(&BTreeSet::new()),
            inf_outside_every_box: self.liminf(),
        }
    }

    /// Certified ‖h‖₁ upper value with the default tail tolerance.
    pub fn l1_norm(&self) -> f64 {
        self.norms(DEFAULT_TAIL_TOLERANCE).l1
    }

    fn l1_outside(&self, excluded: &BTreeSet<Site>, tol: f64) -> (f64, f64) {
        match self {
            FieldSpec::Uniform(h) => {
                if *h == 0.0 {
                    (0.0, 0.0)
                } else {
                    (f64::INFINITY, f64::INFINITY)
                }
            }
            FieldSpec::PowerLaw(p) => {
                let (hi, lo) = p.l1_bracket(tol);
                if !hi.is_finite() {
                    return (hi, lo);
                }
                let removed: f64 = excluded.iter().map(|&s| p.value(s).abs()).sum();
                ((hi - removed).max(0.0), (lo - removed).max(0.0))
            }
            FieldSpec::Shifted { offset, decay } => {
                if *offset == 0.0 {
                    FieldSpec::PowerLaw(*decay).l1_outside(excluded, tol)
                } else {
                    (f64::INFINITY, f64::INFINITY)
                }
            }
            FieldSpec::Table { values, base } => {
                let own: f64 = values
                    .iter()
                    .filter(|(s, _)| !excluded.contains(s))
                    .map(|(_, v)| v.abs())
                    .sum();
                match base {
                    None => (own, own),
                    Some(b) => {
                        let mut ex = excluded.clone();
                        ex.extend(values.keys().copied());
                        let (hi, lo) = b.l1_outside(&ex, tol);
                        (own + hi, own + lo)
                    }
                }
            }
        }
    }

    fn sup_outside(&self, excluded: &BTreeSet<Site>) -> f64 {
        match self {
            FieldSpec::Uniform(h) => *h,
            FieldSpec::PowerLaw(p) => p.sup_outside(excluded),
            FieldSpec::Shifted { offset, decay } => offset + decay.sup_outside(excluded),
            FieldSpec::Table { values, base } => {
                let own = values
                    .iter()
                    .filter(|(s, _)| !excluded.contains(s))
                    .map(|(_, v)| *v)
                    .fold(f64::NEG_INFINITY, f64::max);
                let rest = match base {
                    None => 0.0,
                    Some(b) => {
                        let mut ex = excluded.clone();
                        ex.extend(values.keys().copied());
                        b.sup_outside(&ex)
                    }
                };
                own.max(rest)
            }
        }
    }

    fn liminf(&self) -> f64 {
        match self {
            FieldSpec::Uniform(h) => *h,
            FieldSpec::PowerLaw(_) => 0.0,
            FieldSpec::Shifted { offset, .. } => *offset,
            FieldSpec::Table { base, .. } => base.as_ref().map_or(0.0, |b| b.liminf()),
        }
    }

    /// Reads a table field from a JSON object mapping `"x,y"` to values.
    pub fn table_from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("table JSON: {e}")))?;
        let mut values = BTreeMap::new();
        for (k, v) in raw {
            values.insert(k.parse::<Site>()?, v);
        }
        let spec = FieldSpec::table(values);
        spec.validate()?;
        Ok(spec)
    }

    pub fn table_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
        Self::table_from_json(&text)
    }
}

fn finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parse(format!("{what} must be finite, got {v}")))
    }
}

/// Textual field grammar:
///
/// ```text
/// uniform:h=0.3
/// powerlaw:A=0.02,p=3[,sign=-1]
/// shifted:c=0.5,A=0.1,p=3[,sign=-1]
/// table:@values.json[+SPEC]
/// table:square=3,h=0.2[,x=0,y=0][+SPEC]
/// ```
///
/// A table followed by `+SPEC` overrides SPEC on its support.
impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (family, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("`{text}` has no `family:` prefix")))?;
        let spec = match family {
            "uniform" => {
                let kv = KeyValues::parse(rest)?;
                kv.only(&["h"])?;
                FieldSpec::Uniform(kv.get("h")?)
            }
            "powerlaw" => {
                let kv = KeyValues::parse(rest)?;
                kv.only(&["A", "p", "sign"])?;
                FieldSpec::PowerLaw(kv.power_law()?)
            }
            "shifted" => {
                let kv = KeyValues::parse(rest)?;
                kv.only(&["c", "A", "p", "sign"])?;
                FieldSpec::Shifted {
                    offset: kv.get("c")?,
                    decay: kv.power_law()?,
                }
            }
            "table" => {
                let (own, base) = match rest.split_once('+') {
                    Some((own, base)) => (own, Some(base.parse::<FieldSpec>()?)),
                    None => (rest, None),
                };
                let table = if let Some(path) = own.strip_prefix('@') {
                    FieldSpec::table_from_file(Path::new(path))?
                } else {
                    let kv = KeyValues::parse(own)?;
                    kv.only(&["square", "h", "x", "y"])?;
                    let side = kv.get("square")?;
                    if side < 1.0 || side.fract() != 0.0 {
                        return Err(Error::Parse(format!("square side must be a positive integer, got {side}")));
                    }
                    let center = Site::new(kv.get_or("x", 0.0)? as i64, kv.get_or("y", 0.0)? as i64);
                    let window = Region::new(center, side as usize)?;
                    FieldSpec::constant_on(&window, kv.get("h")?)
                };
                match (table, base) {
                    (FieldSpec::Table { values, .. }, Some(b)) => b.with_overrides(values),
                    (t, _) => t,
                }
            }
            other => return Err(Error::Parse(format!("unknown field family `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn pl(f: &mut std::fmt::Formatter<'_>, p: &PowerLaw) -> std::fmt::Result {
            write!(f, "A={},p={}", p.amplitude, p.exponent)?;
            if p.sign < 0.0 {
                write!(f, ",sign=-1")?;
            }
            Ok(())
        }
        match self {
            FieldSpec::Uniform(h) => write!(f, "uniform:h={h}"),
            FieldSpec::PowerLaw(p) => {
                write!(f, "powerlaw:")?;
                pl(f, p)
            }
            FieldSpec::Shifted { offset, decay } => {
                write!(f, "shifted:c={offset},")?;
                pl(f, decay)
            }
            FieldSpec::Table { values, base } => {
                write!(f, "table:{{{} sites}}", values.len())?;
                if let Some(b) = base {
                    write!(f, "+{b}")?;
                }
                Ok(())
            }
        }
    }
}

struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("`{part}` is not key=value")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unexpected key `{k}`, expected one of {allowed:?}"))),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str) -> Result<f64> {
        let raw = self
            .0
            .get(key)
            .ok_or_else(|| Error::Parse(format!("missing key `{key}`")))?;
        raw.parse::<f64>()
            .map_err(|e| Error::Parse(format!("value of `{key}`: {e}")))
    }

    fn get_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.0.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    fn power_law(&self) -> Result<PowerLaw> {
        let sign = match self.0.get("sign").map(String::as_str) {
            None | Some("+") | Some("1") | Some("+1") => 1.0,
            Some("-") | Some("-1") => -1.0,
            Some(other) => return Err(Error::Parse(format!("sign must be +1 or -1, got `{other}`"))),
        };
        let p = PowerLaw {
            amplitude: self.get("A")?,
            exponent: self.get("p")?,
            sign,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Coupling, inverse temperature and field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub coupling: f64,
    pub beta: f64,
    pub field: FieldSpec,
}

impl ModelParams {
    pub fn new(coupling: f64, beta: f64, field: FieldSpec) -> Result<Self> {
        let p = Self {
            coupling,
            beta,
            field,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "coupling J must be positive (ferromagnetic), got {}",
                self.coupling
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "inverse temperature must be finite and non-negative, got {}",
                self.beta
            )));
        }
        self.field.validate()
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            beta,
            ..self.clone()
        }
    }

    pub fn with_field(&self, field: FieldSpec) -> Self {
        Self {
            field,
            ..self.clone()
        }
    }
}
