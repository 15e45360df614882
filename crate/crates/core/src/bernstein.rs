//! Bernstein basis `p_{n,k}(x) = C(n,k) x^k (1-x)^(n-k)` on `[0,1]`.
//!
//! Single basis values are computed with Loader's saddle-point form of the
//! binomial probability mass, which keeps full relative accuracy without ever
//! forming `C(n,k)`. Whole rows are anchored at the mode with the same
//! routine and spread outward with the two-term ratio recurrence, stopping at
//! the first value that falls below the smallest positive normal number.

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn check_abscissa(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("abscissa {x} outside [0,1]")));
    }
    Ok(())
}

/// `ln(n!) - ((n + 1/2) ln n - n + ln sqrt(2 pi))`, the Stirling remainder.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n <= 15.0 {
        // n! is exact in f64 up to 18!, so the difference is only limited by
        // cancellation against a value of size ~30.
        let mut fact = 1.0f64;
        let mut i = 2.0;
        while i <= n {
            fact *= i;
            i += 1.0;
        }
        return fact.ln() - (n + 0.5) * n.ln() + n - 0.5 * LN_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/m) + m - x`, evaluated without cancellation when
/// `x` is close to `m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / m).ln() + m - x
}

/// Binomial mass `C(n,k) p^k q^(n-k)` for `0 < p < 1`, `q = 1 - p`.
fn binomial_mass(k: usize, n: usize, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    if k == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if k == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let lc = stirlerr(nf) - stirlerr(kf) - stirlerr(nf - kf) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = LN_2PI + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

fn flush(v: f64) -> f64 {
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// Degrees up to this use the plain product form and de Casteljau.
const DIRECT_MAX_DEGREE: usize = 64;

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// `C(n,k) x^k (1-x)^(n-k)` by direct product; `None` when a power leaves the
/// normal range and the product would lose accuracy.
fn direct_basis(n: usize, k: usize, x: f64) -> Option<f64> {
    let a = x.powi(k as i32);
    let b = (1.0 - x).powi((n - k) as i32);
    if a < 1e-290 || b < 1e-290 {
        return None;
    }
    Some(flush(binomial_u128(n, k) as f64 * a * b))
}

/// de Casteljau in the form `a + x (b - a)`, which reproduces constant and
/// linear coefficient data exactly.
fn de_casteljau(coefficients: impl ExactSizeIterator<Item = f64>, x: f64) -> f64 {
    let mut c = [0.0f64; DIRECT_MAX_DEGREE + 1];
    let n = coefficients.len() - 1;
    for (slot, v) in c.iter_mut().zip(coefficients) {
        *slot = v;
    }
    for r in 1..=n {
        for i in 0..=n - r {
            c[i] += x * (c[i + 1] - c[i]);
        }
    }
    c[0]
}

/// `sum_k c_k p_k` over a band, taken relative to the coefficient at the
/// mode so that constant data come back unchanged.
fn band_sum(band: &Band, c: impl Fn(usize) -> f64) -> f64 {
    let mid = band.start + band.values.len() / 2;
    let reference = c(mid);
    reference + band.iter().map(|(k, p)| (c(k) - reference) * p).sum::<f64>()
}

/// Evaluates `p_{n,k}(x)`. Indices outside `0..=n` give 0.
pub fn eval_basis(n: usize, k: i64, x: f64) -> Result<f64> {
    check_abscissa(x)?;
    if k < 0 || k as u64 > n as u64 {
        return Ok(0.0);
    }
    let k = k as usize;
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    if n <= DIRECT_MAX_DEGREE {
        if let Some(v) = direct_basis(n, k, x) {
            return Ok(v);
        }
    }
    // Reflect so that the smaller of x, 1-x is the exactly represented one.
    let v = if x <= 0.5 {
        binomial_mass(k, n, x, 1.0 - x)
    } else {
        let y = 1.0 - x;
        binomial_mass(n - k, n, y, x)
    };
    Ok(flush(v))
}

/// The nonzero band of a basis row: entries `start..start + values.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub start: usize,
    pub values: Vec<f64>,
}

impl Band {
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i, v))
    }

    /// `sum_k c_k p_{n,k}(x)` over the band.
    pub fn dot(&self, coefficients: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&coefficients[self.start..self.end()])
            .map(|(p, c)| p * c)
            .sum()
    }
}

/// Computes the band of basis values at `x` that do not underflow.
pub fn basis_band(n: usize, x: f64) -> Result<Band> {
    check_abscissa(x)?;
    if x == 0.0 {
        return Ok(Band { start: 0, values: vec![1.0] });
    }
    if x == 1.0 {
        return Ok(Band { start: n, values: vec![1.0] });
    }
    let mode = (((n + 1) as f64 * x).floor() as usize).min(n);
    let peak = eval_basis(n, mode as i64, x)?;
    let ratio = x / (1.0 - x);

    let mut upper = Vec::new();
    let mut v = peak;
    for k in mode..n {
        v *= ratio * (n - k) as f64 / (k + 1) as f64;
        if v < f64::MIN_POSITIVE {
            break;
        }
        upper.push(v);
    }

    let mut lower = Vec::new();
    let mut v = peak;
    for k in (1..=mode).rev() {
        v *= k as f64 / ((n - k + 1) as f64 * ratio);
        if v < f64::MIN_POSITIVE {
            break;
        }
        lower.push(v);
    }

    let start = mode - lower.len();
    let mut values = Vec::with_capacity(lower.len() + 1 + upper.len());
    values.extend(lower.into_iter().rev());
    values.push(peak);
    values.extend(upper);
    Ok(Band { start, values })
}

/// All `n + 1` basis values at one abscissa.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRow {
    pub n: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

impl BasisRow {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn basis_row(n: usize, x: f64) -> Result<BasisRow> {
    let band = basis_band(n, x)?;
    let mut values = vec![0.0; n + 1];
    values[band.start..band.end()].copy_from_slice(&band.values);
    Ok(BasisRow { n, x, values })
}

/// Evaluates `sum_k q_k p_{n,k}(x)`. Exact at both endpoints.
pub fn eval_lattice_poly(n: usize, q: &[i64], x: f64) -> Result<f64> {
    if q.len() != n + 1 {
        return Err(Error::LengthMismatch { expected: n + 1, got: q.len() });
    }
    check_abscissa(x)?;
    if n <= DIRECT_MAX_DEGREE {
        return Ok(de_casteljau(q.iter().map(|&v| v as f64), x));
    }
    let band = basis_band(n, x)?;
    Ok(band_sum(&band, |k| q[k] as f64))
}

/// Evaluates `sum_k c_k p_{n,k}(x)` for real coefficients, `n = c.len() - 1`.
pub fn eval_bernstein(coefficients: &[f64], x: f64) -> Result<f64> {
    if coefficients.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    check_abscissa(x)?;
    if coefficients.len() <= DIRECT_MAX_DEGREE + 1 {
        return Ok(de_casteljau(coefficients.iter().copied(), x));
    }
    let band = basis_band(coefficients.len() - 1, x)?;
    Ok(band_sum(&band, |k| coefficients[k]))
}

/// Absolute residuals of the low-order moment identities at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentResiduals {
    /// `|sum p - 1|`
    pub partition: f64,
    /// `|sum (k - nx) p|`
    pub first: f64,
    /// `|sum (k - nx)^2 p - n x (1-x)|`
    pub second: f64,
    /// `|sum k (n-k) p - n (n-1) x (1-x)|`
    pub complement: f64,
}

impl MomentResiduals {
    /// Largest residual after dividing each by the natural size of its terms
    /// (`1`, `n`, `n^2`, `n^2`).
    pub fn max_scaled(&self, n: usize) -> f64 {
        let n = (n as f64).max(1.0);
        let n2 = n * n;
        self.partition
            .max(self.first / n)
            .max(self.second / n2)
            .max(self.complement / n2)
    }
}

pub fn moment_residuals(n: usize, x: f64) -> Result<MomentResiduals> {
    if n == 0 {
        return Err(Error::domain("moment identities need n >= 1"));
    }
    let band = basis_band(n, x)?;
    let nf = n as f64;
    let nx = nf * x;
    let (mut m0, mut m1, mut m2, mut mc) = (0.0, 0.0, 0.0, 0.0);
    for (k, p) in band.iter() {
        let kf = k as f64;
        let d = kf - nx;
        m0 += p;
        m1 += d * p;
        m2 += d * d * p;
        mc += kf * (nf - kf) * p;
    }
    let var = nx * (1.0 - x);
    Ok(MomentResiduals {
        partition: (m0 - 1.0).abs(),
        first: m1.abs(),
        second: (m2 - var).abs(),
        complement: (mc - (nf - 1.0) * var).abs(),
    })
}

/// `|x(1-x)(p_{n,k} - p_{n,k+1}) - ((k+1)/(n+1) - x) p_{n+1,k+1}|` at `x`.
pub fn difference_identity_residual(n: usize, k: i64, x: f64) -> Result<f64> {
    let lhs = x * (1.0 - x) * (eval_basis(n, k, x)? - eval_basis(n, k + 1, x)?);
    let rhs = ((k + 1) as f64 / (n + 1) as f64 - x) * eval_basis(n + 1, k + 1, x)?;
    Ok((lhs - rhs).abs())
}

/// Residuals of the difference identity for every `k` in `-1..=n` at once,
/// using two basis rows instead of `3(n+2)` single evaluations.
pub fn difference_identity_residuals(n: usize, x: f64) -> Result<Vec<f64>> {
    let row = basis_row(n, x)?.values;
    let next = basis_row(n + 1, x)?.values;
    let at = |k: i64| -> f64 {
        if k < 0 || k as usize > n {
            0.0
        } else {
            row[k as usize]
        }
    };
    Ok((-1..=n as i64)
        .map(|k| {
            let lhs = x * (1.0 - x) * (at(k) - at(k + 1));
            let rhs = ((k + 1) as f64 / (n + 1) as f64 - x) * next[(k + 1) as usize];
            (lhs - rhs).abs()
        })
        .collect())
}

/// Uniform abscissae `j/(m-1)`, `j = 0..m`. Both endpoints are exact.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    assert!(m >= 2, "grid needs at least two points");
    let last = (m - 1) as f64;
    (0..m).map(|j| j as f64 / last).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn eval_basis_examples() {
        assert_eq!(eval_basis(2, 1, 0.5).unwrap(), 0.5);
        assert_eq!(eval_basis(7, -1, 0.3).unwrap(), 0.0);
        assert_eq!(eval_basis(7, 8, 0.3).unwrap(), 0.0);
        // 120 * (1/4)^3 * (3/4)^7 = 262440 / 1048576
        let v = eval_basis(10, 3, 0.25).unwrap();
        assert!(close(v, 0.25028228759765625, 1e-14), "{v}");
    }

    #[test]
    fn eval_basis_rejects_outside_unit_interval() {
        assert!(matches!(eval_basis(3, 1, -0.1), Err(Error::Domain(_))));
        assert!(matches!(eval_basis(3, 1, 1.5), Err(Error::Domain(_))));
        assert!(eval_basis(3, 1, f64::NAN).is_err());
    }

    #[test]
    fn basis_row_examples() {
        assert_eq!(basis_row(1, 0.25).unwrap().values, vec![0.75, 0.25]);
        assert_eq!(basis_row(3, 0.0).unwrap().values, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(basis_row(3, 1.0).unwrap().values, vec![0.0, 0.0, 0.0, 1.0]);
        let row = basis_row(4, 0.5).unwrap().values;
        let expect = [0.0625, 0.25, 0.375, 0.25, 0.0625];
        for (a, b) in row.iter().zip(expect) {
            assert!(close(*a, b, 1e-15), "{row:?}");
        }
    }

    #[test]
    fn degree_zero_row() {
        assert_eq!(basis_row(0, 0.3).unwrap().values, vec![1.0]);
    }

    #[test]
    fn lattice_poly_examples() {
        assert!(close(eval_lattice_poly(2, &[3, 3, 3], 0.7).unwrap(), 3.0, 1e-15));
        assert!(close(eval_lattice_poly(2, &[0, 1, 0], 0.5).unwrap(), 0.5, 1e-15));
        assert!(close(eval_lattice_poly(4, &[0, 0, 1, 1, 1], 0.25).unwrap(), 67.0 / 256.0, 1e-15));
        assert!(matches!(
            eval_lattice_poly(3, &[1, 2], 0.5),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn lattice_poly_is_exact_at_endpoints() {
        let q = [-7, 4, 19, 3, 11];
        assert_eq!(eval_lattice_poly(4, &q, 0.0).unwrap(), -7.0);
        assert_eq!(eval_lattice_poly(4, &q, 1.0).unwrap(), 11.0);
    }

    #[test]
    fn moment_examples() {
        let r = moment_residuals(1, 0.5).unwrap();
        for v in [r.partition, r.first, r.second, r.complement] {
            assert!(v <= 1e-15);
        }
        let r = moment_residuals(100, 0.3).unwrap();
        for v in [r.partition, r.first, r.second, r.complement] {
            assert!(v <= 1e-10 * 100.0 * 100.0);
        }
        let r = moment_residuals(2, 1.0).unwrap();
        assert_eq!((r.partition, r.first, r.second, r.complement), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn difference_identity_examples() {
        assert!(difference_identity_residual(1, 0, 0.5).unwrap() <= 1e-15);
        assert_eq!(difference_identity_residual(5, 7, 0.4).unwrap(), 0.0);
        assert!(difference_identity_residual(50, 20, 0.9).unwrap() <= 1e-12);
    }

    #[test]
    fn row_and_batch_residuals_agree_with_pointwise() {
        let n = 37;
        let x = 0.61;
        let batch = difference_identity_residuals(n, x).unwrap();
        for (i, k) in (-1..=n as i64).enumerate() {
            let single = difference_identity_residual(n, k, x).unwrap();
            assert!((batch[i] - single).abs() <= 1e-14);
        }
    }

    #[test]
    fn large_degree_row_stays_normalized() {
        for &x in &[1e-9, 0.003, 0.5, 0.77, 1.0 - 1e-12] {
            let row = basis_row(10_000, x).unwrap();
            assert!((row.sum() - 1.0).abs() <= 1e-12 * 10_001.0, "x={x}");
            assert!(row.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn extreme_tails_flush_to_zero() {
        assert_eq!(eval_basis(5000, 5000, 1e-3).unwrap(), 0.0);
        let band = basis_band(5000, 1e-3).unwrap();
        assert!(band.end() > 150 && band.end() < 300, "{}", band.end());
    }
}
