//! Functions on `[0,1]` with integer boundary values, and their moduli of
//! continuity.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Default distance within which `f(0)` and `f(1)` are snapped to integers.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Grid size used when no modulus is supplied.
pub const DEFAULT_EMPIRICAL_GRID: usize = 4097;

pub type Evaluator = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Piecewise-linear `delta -> omega` table, from `(0, 0)` to `(1, omega(1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusTable {
    points: Vec<(f64, f64)>,
}

impl ModulusTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidModulus(format!("modulus table: {msg}")));
        if points.len() < 2 {
            return bad("needs at least two rows");
        }
        if points[0] != (0.0, 0.0) {
            return bad("must start at (0, 0)");
        }
        if points.last().map(|p| p.0) != Some(1.0) {
            return bad("last delta must be 1");
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("deltas must be strictly increasing");
            }
            if !(w[1].1 >= w[0].1) || !w[1].1.is_finite() {
                return bad("omega must be finite and nondecreasing");
            }
        }
        Ok(ModulusTable { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn eval(&self, delta: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= delta).clamp(1, self.points.len() - 1);
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        y0 + (y1 - y0) * ((delta - x0) / (x1 - x0)).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModulusSpec {
    /// `omega(d) = min(L d, cap)`.
    Lipschitz { constant: f64, cap: Option<f64> },
    /// `omega(d) = C d^alpha`.
    Hoelder { constant: f64, exponent: f64 },
    /// Sliding-window estimate on an `grid`-point uniform sample. A lower
    /// estimate of the true modulus; never used to assert bounds.
    Empirical { grid: usize },
    Table(ModulusTable),
}

impl ModulusSpec {
    pub fn lipschitz(constant: f64) -> Self {
        ModulusSpec::Lipschitz { constant, cap: None }
    }

    pub fn hoelder(constant: f64, exponent: f64) -> Self {
        ModulusSpec::Hoelder { constant, exponent }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModulusSpec::Lipschitz { constant, cap } => {
                if !(constant >= 0.0) || !constant.is_finite() {
                    return Err(Error::InvalidModulus(format!("Lipschitz constant {constant}")));
                }
                if let Some(c) = cap {
                    if !(c > 0.0) {
                        return Err(Error::InvalidModulus(format!("modulus cap {c}")));
                    }
                }
            }
            ModulusSpec::Hoelder { constant, exponent } => {
                if !(exponent > 0.0 && exponent <= 1.0) {
                    return Err(Error::InvalidAlpha(exponent));
                }
                if !(constant > 0.0) || !constant.is_finite() {
                    return Err(Error::InvalidModulus(format!("Hoelder constant {constant}")));
                }
            }
            ModulusSpec::Empirical { grid } => {
                if grid < 2 {
                    return Err(Error::InvalidModulus(format!("empirical grid {grid} < 2")));
                }
            }
            ModulusSpec::Table(_) => {}
        }
        Ok(())
    }

    /// Whether bound assertions may rely on this modulus.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, ModulusSpec::Empirical { .. })
    }

    /// Evaluates an analytic modulus. Returns `None` for the empirical kind,
    /// which needs samples of the function.
    pub fn eval_analytic(&self, delta: f64) -> Option<f64> {
        match self {
            ModulusSpec::Lipschitz { constant, cap } => {
                let v = constant * delta;
                Some(cap.map_or(v, |c| v.min(c)))
            }
            ModulusSpec::Hoelder { constant, exponent } => {
                Some(if delta == 0.0 { 0.0 } else { constant * delta.powf(*exponent) })
            }
            ModulusSpec::Table(t) => Some(t.eval(delta)),
            ModulusSpec::Empirical { .. } => None,
        }
    }
}

impl fmt::Display for ModulusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusSpec::Lipschitz { constant, cap: None } => write!(f, "lipschitz:{constant}"),
            ModulusSpec::Lipschitz { constant, cap: Some(c) } => write!(f, "lipschitz:{constant},{c}"),
            ModulusSpec::Hoelder { constant, exponent } => write!(f, "hoelder:{constant},{exponent}"),
            ModulusSpec::Empirical { grid } => write!(f, "empirical:{grid}"),
            ModulusSpec::Table(t) => write!(f, "table({} rows)", t.points.len()),
        }
    }
}

/// Sliding-window oscillation of a uniform sample, cached per window width.
struct EmpiricalProfile {
    samples: Vec<f64>,
    cache: Mutex<HashMap<usize, f64>>,
}

impl EmpiricalProfile {
    fn width_for(&self, delta: f64) -> usize {
        let steps = (self.samples.len() - 1) as f64;
        // Guard against t/n * (m-1) landing a hair below an integer.
        ((delta * steps + 1e-9).floor() as usize).min(self.samples.len() - 1)
    }

    fn oscillation(&self, width: usize) -> f64 {
        if let Some(&v) = self.cache.lock().unwrap().get(&width) {
            return v;
        }
        let v = window_oscillation(&self.samples, width);
        self.cache.lock().unwrap().insert(width, v);
        v
    }
}

/// `max_i (max - min)` of `samples[i..=i+width]`, using monotone queues.
pub fn window_oscillation(samples: &[f64], width: usize) -> f64 {
    if samples.len() < 2 || width == 0 {
        return 0.0;
    }
    let width = width.min(samples.len() - 1);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (j, &v) in samples.iter().enumerate() {
        while maxq.back().is_some_and(|&i| samples[i] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&i| samples[i] >= v) {
            minq.pop_back();
        }
        minq.push_back(j);
        let lo = j.saturating_sub(width);
        while maxq.front().is_some_and(|&i| i < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i < lo) {
            minq.pop_front();
        }
        if j >= width || j + 1 == samples.len() {
            best = best.max(samples[maxq[0]] - samples[minq[0]]);
        }
    }
    best
}

/// A certified member of the class of continuous functions on `[0,1]` with
/// integer values at both endpoints.
#[derive(Clone)]
pub struct FunctionSpec {
    evaluator: Evaluator,
    f0: i64,
    f1: i64,
    modulus: ModulusSpec,
    label: String,
    profile: Arc<OnceLock<EmpiricalProfile>>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("label", &self.label)
            .field("f0", &self.f0)
            .field("f1", &self.f1)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn snap(at: f64, value: f64, tolerance: f64) -> Result<i64> {
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("f({at}) = {value}")));
    }
    let r = value.round();
    if (value - r).abs() > tolerance || r.abs() > (1i64 << 53) as f64 {
        return Err(Error::BoundaryNotInteger { at, value, tolerance });
    }
    Ok(r as i64)
}

/// Checks that the endpoint values are within `tolerance` of integers and
/// records those integers. The modulus defaults to an empirical estimate.
pub fn certify(evaluator: Evaluator, tolerance: f64) -> Result<FunctionSpec> {
    let v0 = evaluator(0.0)?;
    let v1 = evaluator(1.0)?;
    let f0 = snap(0.0, v0, tolerance)?;
    let f1 = snap(1.0, v1, tolerance)?;
    Ok(FunctionSpec {
        evaluator,
        f0,
        f1,
        modulus: ModulusSpec::Empirical { grid: DEFAULT_EMPIRICAL_GRID },
        label: String::from("<closure>"),
        profile: Arc::new(OnceLock::new()),
    })
}

impl FunctionSpec {
    pub fn from_fn<F>(f: F, tolerance: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        certify(Arc::new(move |x| Ok(f(x))), tolerance)
    }

    pub fn from_expr(text: &str, tolerance: f64) -> Result<Self> {
        let e: Expr = expr::parse(text)?;
        let spec = certify(Arc::new(move |x| e.eval(x)), tolerance)?;
        Ok(spec.with_label(text))
    }

    /// Piecewise-linear interpolant of `(x, f)` rows with strictly
    /// increasing `x` from 0 to 1. The modulus is the exact Lipschitz
    /// constant of the interpolant.
    pub fn from_table(rows: Vec<(f64, f64)>, tolerance: f64) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Table("need at least two rows".into()));
        }
        if rows[0].0 != 0.0 || rows[rows.len() - 1].0 != 1.0 {
            return Err(Error::Table("x must start at 0 and end at 1".into()));
        }
        let mut slope = 0.0f64;
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Table(format!("x not strictly increasing at x={}", w[1].0)));
            }
            if !w[0].1.is_finite() || !w[1].1.is_finite() {
                return Err(Error::NonFinite("table value".into()));
            }
            slope = slope.max(((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs());
        }
        let rows = Arc::new(rows);
        let table = Arc::clone(&rows);
        let spec = certify(
            Arc::new(move |x| {
                let i = table.partition_point(|r| r.0 <= x).clamp(1, table.len() - 1);
                let (x0, y0) = table[i - 1];
                let (x1, y1) = table[i];
                Ok(y0 + (y1 - y0) * ((x - x0) / (x1 - x0)))
            }),
            tolerance,
        )?;
        Ok(spec.with_modulus(ModulusSpec::lipschitz(slope))?.with_label("<table>"))
    }

    pub fn with_modulus(mut self, modulus: ModulusSpec) -> Result<Self> {
        modulus.validate()?;
        self.modulus = modulus;
        self.profile = Arc::new(OnceLock::new());
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn f0(&self) -> i64 {
        self.f0
    }

    pub fn f1(&self) -> i64 {
        self.f1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modulus_spec(&self) -> &ModulusSpec {
        &self.modulus
    }

    /// Evaluates `f`. The endpoints return the certified integers.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(self.f0 as f64);
        }
        if x == 1.0 {
            return Ok(self.f1 as f64);
        }
        let v = (self.evaluator)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("f({x}) = {v}")))
        }
    }

    /// `omega_f(delta)` for the configured modulus kind.
    pub fn modulus(&self, delta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::domain(format!("delta {delta} outside [0,1]")));
        }
        if let Some(v) = self.modulus.eval_analytic(delta) {
            return Ok(v);
        }
        let ModulusSpec::Empirical { grid } = self.modulus else {
            unreachable!("non-analytic modulus is empirical");
        };
        let profile = match self.profile.get() {
            Some(p) => p,
            None => {
                let samples = self.sample_uniform(grid)?;
                let _ = self.profile.set(EmpiricalProfile { samples, cache: Mutex::new(HashMap::new()) });
                self.profile.get().expect("profile initialized")
            }
        };
        Ok(profile.oscillation(profile.width_for(delta)))
    }

    /// Values at `j/(m-1)`, `j = 0..m`.
    pub fn sample_uniform(&self, m: usize) -> Result<Vec<f64>> {
        if m < 2 {
            return Err(Error::domain(format!("sample count {m} < 2")));
        }
        crate::bernstein::uniform_grid(m).into_iter().map(|x| self.eval(x)).collect()
    }
}

pub fn modulus(spec: &FunctionSpec, delta: f64) -> Result<f64> {
    spec.modulus(delta)
}

pub fn sample_uniform(spec: &FunctionSpec, m: usize) -> Result<Vec<f64>> {
    spec.sample_uniform(m)
}
