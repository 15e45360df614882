//! Construction of the integer coefficients `q_k` of `Q_n = sum q_k p_{n,k}`.
//!
//! Starting from the Bernstein coefficients `f(k/n)`, the outer `t` entries
//! on each side are pinned to `f(0)` and `f(1)`, the middle block is shifted
//! by a common `epsilon_n` so that its sum is an integer, and the result is
//! rounded with a first-order error-feedback recurrence:
//!
//! ```text
//! u_{-1} = 0,  q_k = [u_{k-1} + y_k],  u_k = u_{k-1} + y_k - q_k
//! ```
//!
//! The recurrence is carried out in exact fixed-point arithmetic, so the
//! residues satisfy `|u_k| <= 1/2` and `u_j = sum_{k<=j} (y_k - q_k)` without
//! any floating-point drift. Each stored `u_k` is the correctly rounded
//! `f64` of the exact residue.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;

/// Default bound on `|u_{n-t}|` and the residues after it.
pub const RESIDUE_TOLERANCE: f64 = 1e-6;

/// How `[w]` picks an integer within 1/2 of `w`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RoundingRule {
    #[default]
    TiesToEven,
    TiesAwayFromZero,
    TiesUp,
}

impl RoundingRule {
    pub fn name(self) -> &'static str {
        match self {
            RoundingRule::TiesToEven => "nearest-ties-even",
            RoundingRule::TiesAwayFromZero => "nearest-ties-away",
            RoundingRule::TiesUp => "nearest-ties-up",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [RoundingRule::TiesToEven, RoundingRule::TiesAwayFromZero, RoundingRule::TiesUp]
            .into_iter()
            .find(|r| r.name() == name)
    }

    pub fn round(self, w: f64) -> f64 {
        match self {
            RoundingRule::TiesToEven => w.round_ties_even(),
            RoundingRule::TiesAwayFromZero => w.round(),
            RoundingRule::TiesUp => {
                let f = w.floor();
                if w - f >= 0.5 {
                    f + 1.0
                } else {
                    f
                }
            }
        }
    }

    /// Resolves a tie `w = floor + 1/2`.
    fn tie_rounds_up(self, floor_is_even: bool, floor_is_negative: bool) -> bool {
        match self {
            RoundingRule::TiesToEven => !floor_is_even,
            RoundingRule::TiesAwayFromZero => !floor_is_negative,
            RoundingRule::TiesUp => true,
        }
    }
}

/// Real Bernstein coefficients of a degree-`n` polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    pub n: usize,
    pub values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        Ok(CoefficientVector { n: values.len() - 1, values })
    }
}

/// An element of the Bernstein lattice together with how it was built.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeApproximant {
    pub n: usize,
    pub t: usize,
    pub q: Vec<i64>,
    pub epsilon_n: f64,
}

impl LatticeApproximant {
    pub fn eval(&self, x: f64) -> Result<f64> {
        crate::bernstein::eval_lattice_poly(self.n, &self.q, x)
    }
}

/// Residues `u_0..u_n` of the rounding recurrence (`u_{-1} = 0` implied).
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationTrace {
    pub u: Vec<f64>,
}

fn check_cutoff(n: usize, t: usize) -> Result<()> {
    if t > n / 2 {
        return Err(Error::CutoffOutOfRange { n, t });
    }
    Ok(())
}

fn node(k: usize, n: usize) -> f64 {
    k as f64 / n as f64
}

/// Neumaier-compensated left-to-right sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `f(k/n)` for `k = 0..=n`.
pub fn bernstein_coefficients(f: &FunctionSpec, n: usize) -> Result<CoefficientVector> {
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let values = (0..=n).map(|k| f.eval(node(k, n))).collect::<Result<Vec<_>>>()?;
    Ok(CoefficientVector { n, values })
}

/// Shift that makes the middle block `k = t..=n-t` of `f(k/n)` sum to an
/// integer.
pub fn epsilon(f: &FunctionSpec, n: usize, t: usize) -> Result<f64> {
    epsilon_with(f, n, t, RoundingRule::default())
}

pub fn epsilon_with(f: &FunctionSpec, n: usize, t: usize, rule: RoundingRule) -> Result<f64> {
    check_cutoff(n, t)?;
    let values = (t..=n - t).map(|k| f.eval(node(k, n))).collect::<Result<Vec<_>>>()?;
    Ok(middle_shift(&values, rule))
}

fn middle_shift(middle: &[f64], rule: RoundingRule) -> f64 {
    let s = compensated_sum(middle.iter().copied());
    (rule.round(s) - s) / middle.len() as f64
}

/// The perturbed coefficients `y_k` and the shift `epsilon_n` they use.
pub fn perturbed_with_epsilon(
    f: &FunctionSpec,
    n: usize,
    t: usize,
    rule: RoundingRule,
) -> Result<(CoefficientVector, f64)> {
    check_cutoff(n, t)?;
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let middle = (t..=n - t).map(|k| f.eval(node(k, n))).collect::<Result<Vec<_>>>()?;
    let eps = middle_shift(&middle, rule);
    let mut values = Vec::with_capacity(n + 1);
    values.extend(std::iter::repeat_n(f.f0() as f64, t));
    values.extend(middle.iter().map(|v| v + eps));
    values.extend(std::iter::repeat_n(f.f1() as f64, t));
    Ok((CoefficientVector { n, values }, eps))
}

pub fn perturbed_coefficients(f: &FunctionSpec, n: usize, t: usize) -> Result<CoefficientVector> {
    perturbed_with_epsilon(f, n, t, RoundingRule::default()).map(|(y, _)| y)
}

/// `(m, e)` with `v = m * 2^e`, `m` odd or zero.
fn decompose(v: f64) -> (bool, u64, i32) {
    let bits = v.to_bits();
    let neg = bits >> 63 == 1;
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    if m == 0 {
        return (false, 0, 0);
    }
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (neg, m, e)
}

/// `mant * 2^e`, exact whenever the result is representable.
fn scale_exact(mant: u64, e: i32) -> f64 {
    let pow = |e: i32| f64::from_bits(((e + 1023) as u64) << 52);
    let v = mant as f64;
    if e > 1023 {
        if mant == 0 { 0.0 } else { f64::INFINITY }
    } else if e >= -1022 {
        v * pow(e)
    } else {
        // The product is representable, so the final multiply is exact.
        v * pow(e + 1074) * f64::from_bits(1)
    }
}

/// Correctly rounded (ties to even) `mag * 2^-frac_bits`.
fn fixed_to_f64(neg: bool, mag: u128, frac_bits: i64) -> f64 {
    if mag == 0 {
        return 0.0;
    }
    let bits = 128 - mag.leading_zeros() as i64;
    let ulp = (bits - 1 - frac_bits - 52).max(-1074);
    let drop = ulp + frac_bits;
    let mant = if drop <= 0 {
        mag << (-drop) as u32
    } else if drop >= 128 {
        0
    } else {
        let kept = mag >> drop as u32;
        let rem = mag - (kept << drop as u32);
        let half = 1u128 << (drop - 1) as u32;
        if rem > half || (rem == half && kept & 1 == 1) {
            kept + 1
        } else {
            kept
        }
    };
    let v = scale_exact(mant as u64, ulp.clamp(-1074, 1100) as i32);
    if neg {
        -v
    } else {
        v
    }
}

/// Fixed-point integer with `frac_bits` fractional bits.
trait FixedInt: Sized + Clone {
    fn from_parts(neg: bool, m: u64, shift: u32) -> Self;
    fn add(&self, other: &Self) -> Self;
    /// Rounds to an integer, returning it and the residual in fixed point.
    fn round(&self, frac_bits: u32, rule: RoundingRule) -> Result<(i64, Self)>;
    fn to_f64_scaled(&self, frac_bits: u32) -> f64;
}

impl FixedInt for i128 {
    fn from_parts(neg: bool, m: u64, shift: u32) -> Self {
        let v = (m as i128) << shift;
        if neg {
            -v
        } else {
            v
        }
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn round(&self, frac_bits: u32, rule: RoundingRule) -> Result<(i64, Self)> {
        let floor = self >> frac_bits;
        let rem = self - (floor << frac_bits);
        let q = if frac_bits == 0 {
            floor
        } else {
            let half = 1i128 << (frac_bits - 1);
            match rem.cmp(&half) {
                std::cmp::Ordering::Less => floor,
                std::cmp::Ordering::Greater => floor + 1,
                std::cmp::Ordering::Equal => floor + rule.tie_rounds_up(floor % 2 == 0, floor < 0) as i128,
            }
        };
        let qi = i64::try_from(q).map_err(|_| Error::Overflow(format!("coefficient {q}")))?;
        Ok((qi, self - (q << frac_bits)))
    }

    fn to_f64_scaled(&self, frac_bits: u32) -> f64 {
        fixed_to_f64(*self < 0, self.unsigned_abs(), frac_bits as i64)
    }
}

impl FixedInt for BigInt {
    fn from_parts(neg: bool, m: u64, shift: u32) -> Self {
        let v = BigInt::from(m) << shift as usize;
        if neg {
            -v
        } else {
            v
        }
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn round(&self, frac_bits: u32, rule: RoundingRule) -> Result<(i64, Self)> {
        let unit = BigInt::one() << frac_bits as usize;
        let (floor, rem) = self.div_mod_floor(&unit);
        let q = if frac_bits == 0 {
            floor
        } else {
            let twice = &rem << 1usize;
            match twice.cmp(&unit) {
                std::cmp::Ordering::Less => floor,
                std::cmp::Ordering::Greater => floor + 1,
                std::cmp::Ordering::Equal => {
                    let up = rule.tie_rounds_up(floor.is_even(), floor.is_negative());
                    if up {
                        floor + 1
                    } else {
                        floor
                    }
                }
            }
        };
        let qi = q.to_i64().ok_or_else(|| Error::Overflow(format!("coefficient {q}")))?;
        Ok((qi, self - (q << frac_bits as usize)))
    }

    fn to_f64_scaled(&self, frac_bits: u32) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Keep 126 significant bits plus a sticky bit; rounding to 53 bits
        // afterwards is unaffected.
        let mag = self.magnitude();
        let drop = mag.bits().saturating_sub(126);
        let top = mag >> drop as usize;
        let sticky = (&top << drop as usize) != *mag;
        let top = top.to_u128().expect("126 bits") | sticky as u128;
        fixed_to_f64(self.is_negative(), top, frac_bits as i64 - drop as i64)
    }
}

fn run_recurrence<T: FixedInt>(
    parts: &[(bool, u64, i32)],
    frac_bits: u32,
    rule: RoundingRule,
) -> Result<(Vec<i64>, QuantizationTrace)> {
    let mut q = Vec::with_capacity(parts.len());
    let mut u = Vec::with_capacity(parts.len());
    let mut residue = T::from_parts(false, 0, 0);
    for &(neg, m, e) in parts {
        let shift = (e + frac_bits as i32) as u32;
        let y = T::from_parts(neg, m, shift);
        let w = residue.add(&y);
        let (qk, r) = w.round(frac_bits, rule)?;
        u.push(r.to_f64_scaled(frac_bits));
        q.push(qk);
        residue = r;
    }
    Ok((q, QuantizationTrace { u }))
}

/// Rounds `y` to integers with error feedback, ties to even.
pub fn quantize(y: &CoefficientVector) -> Result<(Vec<i64>, QuantizationTrace)> {
    quantize_with(&y.values, RoundingRule::default())
}

pub fn quantize_with(y: &[f64], rule: RoundingRule) -> Result<(Vec<i64>, QuantizationTrace)> {
    if let Some((k, v)) = y.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(format!("y_{k} = {v}")));
    }
    let parts: Vec<_> = y.iter().map(|&v| decompose(v)).collect();
    let lowest = parts.iter().filter(|p| p.1 != 0).map(|p| p.2).min().unwrap_or(0);
    let frac_bits = (-lowest).max(0) as u32;
    let highest = parts
        .iter()
        .filter(|p| p.1 != 0)
        .map(|p| p.2 + 64 - p.1.leading_zeros() as i32)
        .max()
        .unwrap_or(0)
        .max(1);
    // |w| < 2^highest + 1/2, so this many bits (plus sign and carry) suffice.
    if highest + frac_bits as i32 + 3 <= 126 {
        run_recurrence::<i128>(&parts, frac_bits, rule)
    } else {
        run_recurrence::<BigInt>(&parts, frac_bits, rule)
    }
}

/// Options for [`quantize_function_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizerOptions {
    pub rule: RoundingRule,
    pub residue_tolerance: f64,
}

impl Default for QuantizerOptions {
    fn default() -> Self {
        QuantizerOptions { rule: RoundingRule::default(), residue_tolerance: RESIDUE_TOLERANCE }
    }
}

pub fn quantize_function(f: &FunctionSpec, n: usize, t: usize) -> Result<(LatticeApproximant, QuantizationTrace)> {
    quantize_function_with(f, n, t, QuantizerOptions::default())
}

/// Builds `Q_n` for cutoff `t` and checks the boundary-locking structure:
/// `q_k = f(0)`, `u_k = 0` below `t`; `|u_{n-t}|` within tolerance; and
/// `q_k = f(1)` with small residues above `n - t`.
pub fn quantize_function_with(
    f: &FunctionSpec,
    n: usize,
    t: usize,
    options: QuantizerOptions,
) -> Result<(LatticeApproximant, QuantizationTrace)> {
    let (y, epsilon_n) = perturbed_with_epsilon(f, n, t, options.rule)?;
    let (q, trace) = quantize_with(&y.values, options.rule)?;
    let tol = options.residue_tolerance;

    for k in 0..t {
        if q[k] != f.f0() || trace.u[k] != 0.0 {
            return Err(Error::StructuralViolation(format!(
                "k={k} < t={t}: q={} (f0={}), u={}",
                q[k],
                f.f0(),
                trace.u[k]
            )));
        }
    }
    let pivot = n - t;
    if !(trace.u[pivot].abs() <= tol) {
        return Err(Error::StructuralViolation(format!(
            "|u_(n-t)| = {} exceeds {tol} (n={n}, t={t})",
            trace.u[pivot].abs()
        )));
    }
    for k in pivot + 1..=n {
        if q[k] != f.f1() || !(trace.u[k].abs() <= tol) {
            return Err(Error::StructuralViolation(format!(
                "k={k} > n-t={pivot}: q={} (f1={}), u={}",
                q[k],
                f.f1(),
                trace.u[k]
            )));
        }
    }
    Ok((LatticeApproximant { n, t, q, epsilon_n }, trace))
}

/// How to pick the cutoff `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutoffMode {
    /// `floor(n^(2/3) / 2)`.
    Default,
    /// `floor(n^theta / 2)` with the growth exponent suited to Hoelder
    /// exponent `alpha`.
    Hoelder(f64),
}

/// Optimal cutoff growth exponent for a Hoelder-`alpha` modulus.
pub fn theta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(if alpha <= 0.5 { 0.5 } else { 2.0 * alpha / (2.0 * alpha + 1.0) })
}

/// Largest `t` with `(2t)^p <= n^r`, computed exactly.
fn floor_half_power(n: usize, r: u32, p: u32) -> usize {
    let target = (n as u128).pow(r);
    let ok = |t: u128| (2 * t).checked_pow(p).is_some_and(|v| v <= target);
    let mut lo = 0u128;
    let mut hi = n as u128 + 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as usize
}

pub fn choose_t(n: usize, mode: CutoffMode) -> Result<usize> {
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let t = match mode {
        CutoffMode::Default => floor_half_power(n, 2, 3),
        CutoffMode::Hoelder(alpha) => {
            let th = theta(alpha)?;
            if th == 0.5 {
                floor_half_power(n, 1, 2)
            } else if th == 2.0 / 3.0 {
                floor_half_power(n, 2, 3)
            } else {
                let ln_n = (n as f64).ln();
                let mut t = (0.5 * (th * ln_n).exp()).floor() as usize;
                while ((2 * (t + 1)) as f64).ln() <= th * ln_n + 1e-12 {
                    t += 1;
                }
                while t > 0 && ((2 * t) as f64).ln() > th * ln_n + 1e-12 {
                    t -= 1;
                }
                t
            }
        }
    };
    Ok(t.min(n / 2))
}

/// The optimized middle term `rho(f, n)` and its smallest minimizing cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rho {
    pub value: f64,
    pub t: usize,
}

/// Objective minimized by `rho` at one cutoff, given `omega(t/n)`.
pub fn rho_term(n: usize, t: usize, omega: f64) -> f64 {
    let shift = 1.0 / (2.0 * (n + 1 - 2 * t) as f64);
    omega.max(shift) + 1.0 / (2.0 * (t + 1) as f64).sqrt()
}

pub fn rho(f: &FunctionSpec, n: usize) -> Result<Rho> {
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let mut best = Rho { value: f64::INFINITY, t: 0 };
    for t in 0..=n / 2 {
        let v = rho_term(n, t, f.modulus(node(t, n))?);
        if v < best.value {
            best = Rho { value: v, t };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::function::ModulusSpec;

    fn spec(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> FunctionSpec {
        FunctionSpec::from_fn(f, 1e-9).unwrap()
    }

    #[test]
    fn bernstein_coefficient_examples() {
        assert_eq!(bernstein_coefficients(&spec(|x| x), 4).unwrap().values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(bernstein_coefficients(&spec(|_| 2.0), 3).unwrap().values, vec![2.0; 4]);
        let v = bernstein_coefficients(&spec(|x| (PI * x).sin()), 2).unwrap().values;
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 1.0);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&spec(|_| 4.0), 9, 2).unwrap(), 0.0);
        let e = epsilon(&spec(|x| x), 4, 1).unwrap();
        assert!((e - 1.0 / 6.0).abs() < 1e-15);
        // S = 0.5 rounds to 0 under ties-to-even.
        assert_eq!(epsilon(&spec(|x| x), 2, 1).unwrap(), -0.5);
        assert!(matches!(epsilon(&spec(|x| x), 4, 3), Err(Error::CutoffOutOfRange { n: 4, t: 3 })));
    }

    #[test]
    fn perturbed_examples() {
        let y = perturbed_coefficients(&spec(|x| x), 4, 1).unwrap().values;
        let expect = [0.0, 5.0 / 12.0, 8.0 / 12.0, 11.0 / 12.0, 1.0];
        for (a, b) in y.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{y:?}");
        }
        assert_eq!(perturbed_coefficients(&spec(|_| 2.0), 3, 0).unwrap().values, vec![2.0; 4]);
        assert_eq!(perturbed_coefficients(&spec(|x| 3.0 - 2.0 * x), 2, 1).unwrap().values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn quantize_examples() {
        let (q, tr) = quantize_with(&[2.0, 2.0, 2.0], RoundingRule::TiesToEven).unwrap();
        assert_eq!(q, vec![2, 2, 2]);
        assert_eq!(tr.u, vec![0.0; 3]);

        let (q, tr) = quantize_with(&[0.0, 0.4, 0.8, 1.0], RoundingRule::TiesToEven).unwrap();
        assert_eq!(q, vec![0, 0, 1, 1]);
        let expect = [0.0, 0.4, 0.2, 0.2];
        for (a, b) in tr.u.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{:?}", tr.u);
        }

        let y = [0.0, 5.0 / 12.0, 8.0 / 12.0, 11.0 / 12.0, 1.0];
        let (q, tr) = quantize_with(&y, RoundingRule::TiesToEven).unwrap();
        assert_eq!(q, vec![0, 0, 1, 1, 1]);
        assert!((tr.u[1] - 5.0 / 12.0).abs() < 1e-15);
        assert!((tr.u[2] - 1.0 / 12.0).abs() < 1e-15);
        assert!(tr.u[3].abs() < 1e-15);
        assert!(tr.u[4].abs() < 1e-15);
    }

    #[test]
    fn quantize_rejects_non_finite() {
        assert!(matches!(quantize_with(&[0.0, f64::NAN], RoundingRule::TiesToEven), Err(Error::NonFinite(_))));
    }

    #[test]
    fn tie_handling_per_rule() {
        let y = [0.5, 0.5, -0.5, 1.5];
        assert_eq!(quantize_with(&y, RoundingRule::TiesToEven).unwrap().0, vec![0, 1, 0, 1]);
        assert_eq!(quantize_with(&[2.5], RoundingRule::TiesToEven).unwrap().0, vec![2]);
        assert_eq!(quantize_with(&[2.5], RoundingRule::TiesAwayFromZero).unwrap().0, vec![3]);
        assert_eq!(quantize_with(&[-2.5], RoundingRule::TiesAwayFromZero).unwrap().0, vec![-3]);
        assert_eq!(quantize_with(&[-2.5], RoundingRule::TiesUp).unwrap().0, vec![-2]);
    }

    #[test]
    fn subnormal_inputs_use_wide_arithmetic() {
        // 1074 fractional bits do not fit the i128 fast path.
        let y = [3.0, 5e-324, 0.25, 1e-300, 0.25];
        let (q, tr) = quantize_with(&y, RoundingRule::TiesToEven).unwrap();
        assert_eq!(q, vec![3, 0, 0, 0, 1]);
        assert_eq!(tr.u[1], 5e-324);
        assert_eq!(tr.u[2], 0.25);
        assert_eq!(tr.u[3], 0.25);
        assert_eq!(tr.u[4], -0.5);
    }

    #[test]
    fn overflowing_coefficients_are_reported() {
        assert!(matches!(quantize_with(&[1e30], RoundingRule::TiesToEven), Err(Error::Overflow(_))));
    }

    #[test]
    fn quantize_function_examples() {
        let (a, tr) = quantize_function(&spec(|_| 5.0), 10, 3).unwrap();
        assert_eq!(a.q, vec![5; 11]);
        assert!(tr.u.iter().all(|&u| u == 0.0));

        let (a, _) = quantize_function(&spec(|x| x), 4, 1).unwrap();
        assert_eq!(a.q, vec![0, 0, 1, 1, 1]);

        let (a, _) = quantize_function(&spec(|x| x), 1, 0).unwrap();
        assert_eq!(a.q, vec![0, 1]);
    }

    #[test]
    fn half_degree_cutoff_reproduces_perturbed_polynomial() {
        // t = n/2: the middle block is a single index and Q_n = P_n.
        let f = spec(|x| 2.0 * x + (PI * x).sin());
        let (a, tr) = quantize_function(&f, 8, 4).unwrap();
        assert_eq!(a.q[..4], [0; 4]);
        assert_eq!(a.q[5..], [2; 4]);
        assert!(tr.u.iter().all(|u| u.abs() <= 1e-12));
    }

    #[test]
    fn choose_t_examples() {
        assert_eq!(choose_t(1000, CutoffMode::Default).unwrap(), 50);
        assert_eq!(choose_t(2, CutoffMode::Default).unwrap(), 0);
        assert_eq!(choose_t(100, CutoffMode::Default).unwrap(), 10);
        assert_eq!(choose_t(1024, CutoffMode::Hoelder(0.5)).unwrap(), 16);
        assert_eq!(choose_t(1024, CutoffMode::Hoelder(0.3)).unwrap(), 16);
        assert_eq!(choose_t(1000, CutoffMode::Hoelder(1.0)).unwrap(), 50);
        // theta(0.75) = 0.6; 0.5 * 1024^0.6 = 32.0 exactly in real arithmetic.
        assert_eq!(choose_t(1024, CutoffMode::Hoelder(0.75)).unwrap(), 32);
        assert!(matches!(choose_t(10, CutoffMode::Hoelder(0.0)), Err(Error::InvalidAlpha(_))));
        assert!(matches!(choose_t(10, CutoffMode::Hoelder(1.5)), Err(Error::InvalidAlpha(_))));
        assert_eq!(choose_t(1, CutoffMode::Default).unwrap(), 0);
    }

    #[test]
    fn choose_t_matches_floating_formula_away_from_integers() {
        for n in 1..3000usize {
            let v = 0.5 * (n as f64).powf(2.0 / 3.0);
            if (v - v.round()).abs() > 1e-9 {
                assert_eq!(choose_t(n, CutoffMode::Default).unwrap(), v.floor() as usize, "n={n}");
            }
        }
    }

    #[test]
    fn rho_examples() {
        let zero = spec(|_| 1.0).with_modulus(ModulusSpec::lipschitz(0.0)).unwrap();
        let r = rho(&zero, 2).unwrap();
        assert_eq!(r.t, 0);
        assert!((r.value - (1.0 / 6.0 + 1.0 / 2f64.sqrt())).abs() < 1e-15);

        let r = rho(&zero, 1).unwrap();
        assert_eq!(r.t, 0);
        assert!((r.value - (0.25 + 1.0 / 2f64.sqrt())).abs() < 1e-15);

        let lip = spec(|x| x).with_modulus(ModulusSpec::lipschitz(1.0)).unwrap();
        let r = rho(&lip, 1000).unwrap();
        assert!((30..=80).contains(&r.t), "t*={}", r.t);
    }
}
