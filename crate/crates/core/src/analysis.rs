//! Error measurement, theoretical bounds and exact certification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bernstein::{basis_band, eval_bernstein, eval_lattice_poly, uniform_grid};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::quantizer::{rho, LatticeApproximant};

/// Grid size used for sup-norm estimates at degree `n`.
pub fn default_grid(n: usize) -> usize {
    2049.max(8 * n + 1)
}

/// Allowance added to bounds when they are compared against grid maxima:
/// `2 omega(1/(m-1))`.
pub fn grid_slack(f: &FunctionSpec, m: usize) -> Result<f64> {
    Ok(2.0 * f.modulus(1.0 / (m - 1) as f64)?)
}

fn check_grid(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(format!("grid size {m} < 2")));
    }
    Ok(())
}

/// `max_j |f(x_j) - Q(x_j)|` over an `m`-point uniform grid.
pub fn sup_error(f: &FunctionSpec, approximant: &LatticeApproximant, m: usize) -> Result<f64> {
    check_grid(m)?;
    let mut worst = 0.0f64;
    for x in uniform_grid(m) {
        let p = eval_lattice_poly(approximant.n, &approximant.q, x)?;
        worst = worst.max((f.eval(x)? - p).abs());
    }
    Ok(worst)
}

/// `max_j |f(x_j) - B_n f(x_j)|` over an `m`-point uniform grid.
pub fn bernstein_error(f: &FunctionSpec, n: usize, m: usize) -> Result<f64> {
    check_grid(m)?;
    let coefficients = crate::quantizer::bernstein_coefficients(f, n)?.values;
    let mut worst = 0.0f64;
    for x in uniform_grid(m) {
        worst = worst.max((f.eval(x)? - eval_bernstein(&coefficients, x)?).abs());
    }
    Ok(worst)
}

/// `S_{n,t}(x) = sum_{k=t}^{n-t} |k/n - x| p_{n,k}(x)`.
pub fn snt(n: usize, t: usize, x: f64) -> Result<f64> {
    let band = basis_band(n, x)?;
    let hi = n.saturating_sub(t);
    Ok(band
        .iter()
        .filter(|&(k, _)| k >= t && k <= hi)
        .map(|(k, p)| (k as f64 / n as f64 - x).abs() * p)
        .sum())
}

fn check_snt_cutoff(n: usize, t: usize) -> Result<()> {
    if t == 0 || 2 * t > n {
        return Err(Error::CutoffOutOfRange { n, t });
    }
    Ok(())
}

/// Largest value of `S_{n,t}(x) - x(1-x)/sqrt(t/2)` on an `m`-point grid.
/// Nonpositive when the bound holds at every grid point.
pub fn snt_check(n: usize, t: usize, m: usize) -> Result<f64> {
    check_snt_cutoff(n, t)?;
    check_grid(m)?;
    let scale = (t as f64 / 2.0).sqrt();
    let mut worst = f64::NEG_INFINITY;
    for x in uniform_grid(m) {
        worst = worst.max(snt(n, t, x)? - x * (1.0 - x) / scale);
    }
    Ok(worst)
}

/// Violations of the `S_{n,t}` bound at one abscissa for every
/// `t = 1..=n/2`, from a single basis row and a prefix sum.
pub fn snt_violations_all_cutoffs(n: usize, x: f64) -> Result<Vec<f64>> {
    let band = basis_band(n, x)?;
    let mut weighted = vec![0.0f64; n + 1];
    for (k, p) in band.iter() {
        weighted[k] = (k as f64 / n as f64 - x).abs() * p;
    }
    let mut prefix = vec![0.0f64; n + 2];
    for k in 0..=n {
        prefix[k + 1] = prefix[k] + weighted[k];
    }
    let var = x * (1.0 - x);
    Ok((1..=n / 2)
        .map(|t| {
            let s = prefix[n - t + 1] - prefix[t];
            s - var / (t as f64 / 2.0).sqrt()
        })
        .collect())
}

/// `Q(x) = sum_j c_j x^j` with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerBasisPoly {
    pub coefficients: Vec<BigInt>,
}

impl PowerBasisPoly {
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }
}

/// Rows `0..=n` of Pascal's triangle.
pub fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    rows.push(vec![BigInt::one()]);
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(i + 1);
        row.push(BigInt::one());
        for j in 1..i {
            row.push(&prev[j - 1] + &prev[j]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows
}

/// Exact conversion of `sum q_k p_{n,k}` to the monomial basis:
/// `c_j = sum_{k<=j} q_k C(n,k) C(n-k, j-k) (-1)^(j-k)`.
pub fn to_power_basis(approximant: &LatticeApproximant) -> PowerBasisPoly {
    lattice_to_power_basis(approximant.n, &approximant.q)
}

pub fn lattice_to_power_basis(n: usize, q: &[i64]) -> PowerBasisPoly {
    let binom = binomial_table(n);
    let mut c = vec![BigInt::zero(); n + 1];
    for (k, &qk) in q.iter().enumerate().take(n + 1) {
        if qk == 0 {
            continue;
        }
        let scale = BigInt::from(qk) * &binom[n][k];
        for j in k..=n {
            let term = &scale * &binom[n - k][j - k];
            if (j - k) % 2 == 0 {
                c[j] += term;
            } else {
                c[j] -= term;
            }
        }
    }
    PowerBasisPoly { coefficients: c }
}

/// `sum q_k C(n,k) x^k (1-x)^(n-k)` in exact rational arithmetic.
pub fn eval_bernstein_rational(n: usize, q: &[i64], x: &BigRational) -> BigRational {
    let binom = binomial_table(n);
    let one_minus = BigRational::one() - x;
    let mut total = BigRational::zero();
    for (k, &qk) in q.iter().enumerate().take(n + 1) {
        let weight = BigRational::from_integer(BigInt::from(qk) * &binom[n][k]);
        total += weight * num_traits::pow(x.clone(), k) * num_traits::pow(one_minus.clone(), n - k);
    }
    total
}

/// Expands `x^k = sum_l C(n-k, l) x^(k+l) (1-x)^(n-k-l)` and confirms the
/// identity exactly at `n + 1` distinct rationals in `(0, 1)`.
pub fn monomial_membership_check(n: usize, k: usize) -> bool {
    if k > n {
        return false;
    }
    let binom = binomial_table(n - k);
    (0..=n).all(|i| {
        let x = BigRational::new(BigInt::from(i + 1), BigInt::from(n + 2));
        let y = BigRational::one() - &x;
        let expanded = (0..=n - k).fold(BigRational::zero(), |acc, l| {
            acc + BigRational::from_integer(binom[n - k][l].clone())
                * num_traits::pow(x.clone(), k + l)
                * num_traits::pow(y.clone(), n - k - l)
        });
        expanded == num_traits::pow(x, k)
    })
}

pub const BRUTE_FORCE_MAX_DEGREE: usize = 6;
pub const BRUTE_FORCE_MAX_RADIUS: i64 = 3;

/// Exhaustive search for the lattice point with the smallest grid sup error
/// among `q_k in round(f(k/n)) +- radius`. Ties go to the lexicographically
/// smallest coefficient vector.
pub fn brute_force_best(f: &FunctionSpec, n: usize, radius: i64, m: usize) -> Result<(Vec<i64>, f64)> {
    if n == 0 || n > BRUTE_FORCE_MAX_DEGREE || !(0..=BRUTE_FORCE_MAX_RADIUS).contains(&radius) {
        return Err(Error::SearchSpaceTooLarge(format!(
            "n={n}, radius={radius}; limits are 1 <= n <= {BRUTE_FORCE_MAX_DEGREE}, 0 <= radius <= {BRUTE_FORCE_MAX_RADIUS}"
        )));
    }
    check_grid(m)?;
    let grid = uniform_grid(m);
    let target = grid.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let centre: Vec<i64> = (0..=n)
        .map(|k| f.eval(k as f64 / n as f64).map(|v| v.round() as i64))
        .collect::<Result<_>>()?;

    let lo: Vec<i64> = centre.iter().map(|c| c - radius).collect();
    let mut q = lo.clone();
    let mut best: Option<(Vec<i64>, f64)> = None;
    loop {
        let bound = best.as_ref().map_or(f64::INFINITY, |b| b.1);
        let mut err = 0.0f64;
        for (&x, fx) in grid.iter().zip(&target) {
            let v = eval_lattice_poly(n, &q, x)?;
            err = err.max((fx - v).abs());
            if err >= bound {
                break;
            }
        }
        if err < bound {
            best = Some((q.clone(), err));
        }
        // Odometer with the last coefficient fastest: lexicographic order.
        let mut i = n as isize;
        while i >= 0 {
            let idx = i as usize;
            if q[idx] < lo[idx] + 2 * radius {
                q[idx] += 1;
                break;
            }
            q[idx] = lo[idx];
            i -= 1;
        }
        if i < 0 {
            break;
        }
    }
    Ok(best.expect("search space is nonempty"))
}

fn require_analytic(f: &FunctionSpec, strict: bool) -> Result<()> {
    if strict && !f.modulus_spec().is_analytic() {
        return Err(Error::EstimateOnlyModulus);
    }
    Ok(())
}

/// `(9/4) omega(n^(-1/3)) + 2 n^(-1/3)`.
pub fn bound_simple(f: &FunctionSpec, n: usize, strict: bool) -> Result<f64> {
    require_analytic(f, strict)?;
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let h = (n as f64).cbrt().recip();
    Ok(2.25 * f.modulus(h)? + 2.0 * h)
}

/// `(5/4) omega(n^(-1/2)) + rho(f, n)`.
pub fn bound_main(f: &FunctionSpec, n: usize, strict: bool) -> Result<f64> {
    require_analytic(f, strict)?;
    let r = rho(f, n)?;
    Ok(1.25 * f.modulus((n as f64).sqrt().recip())? + r.value)
}

/// `(5/4) omega(n^(-1/2)) + omega(n^(-1/3)/2) + 2 n^(-1/3)`, the bound
/// obtained with the default cutoff.
pub fn bound_default_cutoff(f: &FunctionSpec, n: usize) -> Result<f64> {
    let h = (n as f64).cbrt().recip();
    Ok(1.25 * f.modulus((n as f64).sqrt().recip())? + f.modulus(0.5 * h)? + 2.0 * h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub t: usize,
    pub epsilon_n: f64,
    pub sup_error: f64,
    pub grid_points: usize,
    pub grid_slack: f64,
    pub bound_main: f64,
    pub bound_simple: f64,
    pub bernstein_error: f64,
    /// The bounds were computed from an empirical (lower) modulus estimate.
    pub estimate_only: bool,
}

impl ErrorReport {
    pub fn measure(f: &FunctionSpec, approximant: &LatticeApproximant, m: usize) -> Result<Self> {
        let n = approximant.n;
        Ok(ErrorReport {
            n,
            t: approximant.t,
            epsilon_n: approximant.epsilon_n,
            sup_error: sup_error(f, approximant, m)?,
            grid_points: m,
            grid_slack: grid_slack(f, m)?,
            bound_main: bound_main(f, n, false)?,
            bound_simple: bound_simple(f, n, false)?,
            bernstein_error: bernstein_error(f, n, m)?,
            estimate_only: !f.modulus_spec().is_analytic(),
        })
    }

    /// `sup_error <= bound_main + grid_slack`.
    pub fn within_main_bound(&self) -> bool {
        self.sup_error <= self.bound_main + self.grid_slack
    }

    pub fn render(&self) -> String {
        let tag = if self.estimate_only { " (empirical modulus, estimate only)" } else { "" };
        let rows: [(&str, String); 10] = [
            ("n", self.n.to_string()),
            ("t", self.t.to_string()),
            ("epsilon_n", format!("{:.16e}", self.epsilon_n)),
            ("sup_error", format!("{:.16e}", self.sup_error)),
            ("bernstein_error", format!("{:.16e}", self.bernstein_error)),
            ("bound_main", format!("{:.16e}{tag}", self.bound_main)),
            ("bound_simple", format!("{:.16e}{tag}", self.bound_simple)),
            ("grid_points", self.grid_points.to_string()),
            ("grid_slack", format!("{:.16e}", self.grid_slack)),
            ("within_bound", self.within_main_bound().to_string()),
        ];
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}
