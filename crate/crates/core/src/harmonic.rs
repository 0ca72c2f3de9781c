//! The smooth weight `w`, its Fourier transform and the Poisson identity that
//! links them, plus the exponent bookkeeping used to pick the auxiliary prime.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{is_prime, next_prime};

fn sinc_sq(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let s = (PI * x).sin() / (PI * x);
    s * s
}

/// `Π (sin πx / πx)²` over the entries.
pub fn weight_w(x: &[f64]) -> f64 {
    x.iter().map(|&v| sinc_sq(v)).product()
}

/// `Π max(1 - |a|, 0)` over the entries.
pub fn weight_what(a: &[f64]) -> f64 {
    a.iter().map(|&v| (1.0 - v.abs()).max(0.0)).product()
}

/// Compensated (Neumaier) sum.
fn neumaier(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for t in terms {
        let u = s + t;
        if s.abs() >= t.abs() {
            c += (s - u) + t;
        } else {
            c += (t - u) + s;
        }
        s = u;
    }
    s + c
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightParams {
    pub n: usize,
    pub t: f64,
    pub p: u32,
    /// Truncation radius of the lattice sum; `None` picks the smallest power
    /// of two that meets `tolerance`.
    pub radius: Option<u64>,
    pub tolerance: f64,
}

impl WeightParams {
    pub const MAX_RADIUS: u64 = 1 << 24;

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::Size(format!("Poisson check supports n <= 2, got {}", self.n)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::contract(format!("T must be positive, got {}", self.t)));
        }
        if !is_prime(self.p as u64) {
            return Err(Error::contract(format!("{} is not prime", self.p)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::contract("tolerance must be positive"));
        }
        Ok(())
    }

    /// Whether `p` lies in `[T, 2T²]`.
    pub fn prime_in_range(&self) -> bool {
        let p = self.p as f64;
        p >= self.t && p <= 2.0 * self.t * self.t
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonReport {
    pub n: usize,
    pub t: f64,
    pub p: u32,
    pub radius: u64,
    pub u: Vec<i64>,
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_imag: f64,
    pub tail_bound: f64,
    pub difference: f64,
    pub holds: bool,
}

/// Bound on `Σ_{|m|>R} w₁((u+pm)/2T)` for `0 <= u < p`.
fn coordinate_tail(t: f64, p: u32, r: u64) -> f64 {
    let c = 2.0 * t / (PI * p as f64);
    let r = r as f64;
    // m > R contributes at most Σ 1/m², m < -R at most Σ_{k>=R} 1/k².
    c * c * (2.0 / r + 1.0 / (r * r))
}

fn coordinate_sum(u: u32, t: f64, p: u32, r: u64) -> f64 {
    let r = r as i64;
    let at = |m: i64| sinc_sq((u as f64 + p as f64 * m as f64) / (2.0 * t));
    // Largest terms first.
    neumaier((0..=r).flat_map(|m| {
        let neg = if m > 0 { Some(at(-m)) } else { None };
        std::iter::once(at(m)).chain(neg)
    }))
}

fn truncated_lhs(u: &[u32], t: f64, p: u32, r: u64) -> (f64, f64) {
    let tail = coordinate_tail(t, p, r);
    let mut cache = std::collections::HashMap::new();
    let sums: Vec<f64> = u
        .iter()
        .map(|&v| *cache.entry(v).or_insert_with(|| coordinate_sum(v, t, p, r)))
        .collect();
    let lhs: f64 = sums.iter().product();
    let upper: f64 = sums.iter().map(|s| s + tail).product();
    (lhs, upper - lhs)
}

/// Both sides of
/// `Σ_{X ≡ U} w(X/2T) = (2T/p)^{n²} Σ_A e_p(-tr(AU)) ŵ(2TA/p)`
/// with a certified bound on the truncated left side.
pub fn poisson_check(u: &[i64], params: WeightParams) -> Result<PoissonReport> {
    params.validate()?;
    let n = params.n;
    if u.len() != n * n {
        return Err(Error::mismatch(format!("U has {} entries, expected {}", u.len(), n * n)));
    }
    let (t, p) = (params.t, params.p);
    let residues: Vec<u32> = u.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect();

    let (radius, lhs, tail_bound) = match params.radius {
        Some(r) => {
            let (lhs, tail) = truncated_lhs(&residues, t, p, r.max(1));
            if tail >= params.tolerance {
                return Err(Error::contract(format!(
                    "tail bound {tail:.3e} at R = {r} does not meet tolerance {:.3e}",
                    params.tolerance
                )));
            }
            (r.max(1), lhs, tail)
        }
        None => {
            let mut r = 64;
            loop {
                let (lhs, tail) = truncated_lhs(&residues, t, p, r);
                if tail < params.tolerance {
                    break (r, lhs, tail);
                }
                if r >= WeightParams::MAX_RADIUS {
                    return Err(Error::contract(format!(
                        "tolerance {:.3e} unreachable with R <= {}",
                        params.tolerance,
                        WeightParams::MAX_RADIUS
                    )));
                }
                r *= 2;
            }
        }
    };

    let scale = 2.0 * t / p as f64;
    // ŵ(scale·a) ≠ 0 exactly when |a| < 1/scale.
    let mut amax = (1.0 / scale).floor() as i64;
    if amax as f64 * scale >= 1.0 {
        amax -= 1;
    }
    let width = (2 * amax + 1) as u64;
    let terms = width.checked_pow((n * n) as u32).filter(|&c| c <= 50_000_000).ok_or_else(|| {
        Error::Size(format!("{width}^{} frequency terms", n * n))
    })?;
    let mut re = Vec::with_capacity(terms as usize);
    let mut im = Vec::with_capacity(terms as usize);
    for idx in 0..terms {
        let mut rest = idx;
        let a: Vec<i64> = (0..n * n)
            .map(|_| {
                let d = (rest % width) as i64 - amax;
                rest /= width;
                d
            })
            .collect();
        let weight: f64 = a.iter().map(|&x| (1.0 - (scale * x as f64).abs()).max(0.0)).product();
        let mut tr = 0i64;
        for i in 0..n {
            for j in 0..n {
                tr += a[i * n + j] * residues[j * n + i] as i64;
            }
        }
        let phase = -2.0 * PI * tr.rem_euclid(p as i64) as f64 / p as f64;
        let z = Complex64::from_polar(weight, phase);
        re.push(z.re);
        im.push(z.im);
    }
    let factor = scale.powi((n * n) as i32);
    let rhs = factor * neumaier(re.into_iter());
    let rhs_imag = factor * neumaier(im.into_iter());
    if rhs_imag.abs() >= 1e-9 {
        return Err(Error::Consistency(format!("Poisson right side has imaginary part {rhs_imag:e}")));
    }
    let difference = (lhs - rhs).abs();
    Ok(PoissonReport {
        n,
        t,
        p,
        radius,
        u: u.to_vec(),
        lhs,
        rhs,
        rhs_imag,
        tail_bound,
        difference,
        holds: difference <= tail_bound + 1e-6,
    })
}

pub type Rational = Ratio<i64>;

/// Parses `3`, `3/2` or `1.5` as a rational with denominator 1 or 2.
pub fn parse_half_integer(s: &str) -> Result<Rational> {
    let bad = || Error::contract(format!("'{s}' is not a half-integer"));
    let r = if let Some((a, b)) = s.split_once('/') {
        let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        Rational::new(a, b)
    } else if let Some((a, b)) = s.split_once('.') {
        let whole: i64 = if a.is_empty() { 0 } else { a.parse().map_err(|_| bad())? };
        match b.trim_end_matches('0') {
            "" => Rational::from_integer(whole),
            "5" if !a.starts_with('-') => Rational::new(2 * whole + 1, 2),
            _ => return Err(bad()),
        }
    } else {
        Rational::from_integer(s.trim().parse().map_err(|_| bad())?)
    };
    if (r * 2).is_integer() {
        Ok(r)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    #[serde(rename = "N")]
    pub big_n: i64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "L")]
    pub l: String,
    /// `D - L + L²/(N - D + L)`.
    pub exponent: String,
    pub exponent_value: f64,
    /// The dimension-growth exponent `D - 1`.
    pub dimension_growth: i64,
    pub improves_dimension_growth: bool,
}

pub fn exponent_general(big_n: i64, d: i64, l: Rational) -> Result<ExponentReport> {
    if !(l * 2).is_integer() {
        return Err(Error::contract(format!("2L must be an integer, got L = {l}")));
    }
    if !(big_n > d && Rational::from_integer(d) >= l && l >= Rational::from_integer(0)) {
        return Err(Error::contract(format!("need N > D >= L >= 0, got N={big_n}, D={d}, L={l}")));
    }
    let dq = Rational::from_integer(d);
    let e = dq - l + l * l / (Rational::from_integer(big_n - d) + l);
    let value = *e.numer() as f64 / *e.denom() as f64;
    Ok(ExponentReport {
        big_n,
        d,
        l: l.to_string(),
        exponent: e.to_string(),
        exponent_value: value,
        dimension_growth: d - 1,
        improves_dimension_growth: e < Rational::from_integer(d - 1),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub n: usize,
    pub t: f64,
    /// `(n² + n - 2)/(n² - 1)`.
    pub exponent: String,
    pub target: f64,
    pub p: u64,
    /// `T^{2n²} / p^{n² - n}`.
    pub term_major: f64,
    /// `T^{n² - n + 2} p^{n - 1}`.
    pub term_error: f64,
    pub total: f64,
}

pub fn optimize_p(n: usize, t: f64) -> Result<OptimizeReport> {
    if n < 2 {
        return Err(Error::contract("the prime optimizer needs n >= 2"));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::contract(format!("T must be at least 1, got {t}")));
    }
    let n2 = (n * n) as i64;
    let exponent = Rational::new(n2 + n as i64 - 2, n2 - 1);
    let target = t.powf(*exponent.numer() as f64 / *exponent.denom() as f64);
    let lo = t.ceil() as u64;
    let hi = (2.0 * t * t).floor() as u64;
    let mut p = next_prime(target.ceil().max(lo as f64) as u64);
    if p > hi {
        // A prime in [T, 2T] always exists.
        p = next_prime(lo);
    }
    let pf = p as f64;
    let term_major = t.powi(2 * n2 as i32) / pf.powi((n2 - n as i64) as i32);
    let term_error = t.powi((n2 - n as i64 + 2) as i32) * pf.powi(n as i32 - 1);
    Ok(OptimizeReport {
        n,
        t,
        exponent: exponent.to_string(),
        target,
        p,
        term_major,
        term_error,
        total: term_major + term_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        assert_eq!(weight_w(&[0.0; 4]), 1.0);
        assert!(weight_w(&[0.3, 2.0]).abs() < 1e-30);
        let expected = (4.0 / (PI * PI)).powi(4);
        assert!((weight_w(&[0.5; 4]) - expected).abs() < 1e-15);
        assert_eq!(weight_what(&[0.0; 4]), 1.0);
        assert_eq!(weight_what(&[0.2, -1.0]), 0.0);
        assert_eq!(weight_what(&[0.5, 0.0, 0.0, 0.0]), 0.5);
    }

    #[test]
    fn weight_lower_bound_on_grid() {
        let floor = (4.0 / (PI * PI)).powi(4);
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 / 10.0).collect();
        for &a in &grid {
            for &b in &grid {
                let x = [a / 2.0, b / 2.0, -a / 2.0, (a + b) / 4.0];
                assert!(weight_w(&x) >= floor - 1e-15);
                if a.abs() < 1.0 && b.abs() < 1.0 {
                    assert!(weight_w(&[a, b]) > 0.0);
                }
                assert_eq!(weight_what(&[a, b]), weight_what(&[-a, -b]));
            }
        }
    }

    /// Independent evaluation: brute-force box over `X'` rather than a
    /// product of one-dimensional sums.
    fn brute_lhs_1d(u: i64, t: f64, p: i64, r: i64) -> f64 {
        (-r..=r).map(|m| sinc_sq((u + p * m) as f64 / (2.0 * t))).sum()
    }

    #[test]
    fn poisson_n1_zero() {
        let params = WeightParams { n: 1, t: 2.0, p: 5, radius: None, tolerance: 1e-4 };
        let r = poisson_check(&[0], params).unwrap();
        assert!(r.holds, "{r:?}");
        let direct = brute_lhs_1d(0, 2.0, 5, r.radius as i64);
        assert!((direct - r.lhs).abs() < 1e-9);
        // Right side by hand: (4/5)(1 + 2(1 - 4/5)) = 1.12.
        assert!((r.rhs - 1.12).abs() < 1e-12);
    }

    #[test]
    fn poisson_n2_e12() {
        let params = WeightParams { n: 2, t: 2.0, p: 5, radius: None, tolerance: 1e-4 };
        let r = poisson_check(&[0, 1, 0, 0], params).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.rhs_imag.abs() < 1e-9);
    }

    #[test]
    fn poisson_fixed_radius_too_small() {
        let params = WeightParams { n: 1, t: 2.0, p: 5, radius: Some(2), tolerance: 1e-6 };
        assert!(poisson_check(&[1], params).is_err());
    }

    #[test]
    fn exponent_examples() {
        let r = exponent_general(8, 6, Rational::from_integer(1)).unwrap();
        assert_eq!(r.exponent, "16/3");
        assert_eq!(r.dimension_growth, 5);
        let r = exponent_general(18, 12, Rational::from_integer(2)).unwrap();
        assert_eq!(r.exponent, "21/2");
        assert_eq!(exponent_general(9, 4, Rational::from_integer(0)).unwrap().exponent, "4");
        assert!(exponent_general(8, 6, Rational::new(1, 3)).is_err());
        assert!(exponent_general(6, 6, Rational::from_integer(1)).is_err());
    }

    #[test]
    fn exponent_matches_closed_form() {
        for n in 2..=10i64 {
            let r = exponent_general(2 * n * n, n * n + n, Rational::from_integer(n - 1)).unwrap();
            let closed = Rational::from_integer(n * n + 2) - Rational::new(2, n + 1);
            assert_eq!(r.exponent, closed.to_string());
        }
    }

    #[test]
    fn half_integers() {
        assert_eq!(parse_half_integer("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_half_integer("1.5").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_half_integer("2").unwrap(), Rational::from_integer(2));
        assert!(parse_half_integer("1/3").is_err());
        assert!(parse_half_integer("x").is_err());
    }

    #[test]
    fn optimizer_examples() {
        let r = optimize_p(2, 10.0).unwrap();
        assert!((r.target - 10f64.powf(4.0 / 3.0)).abs() < 1e-9);
        assert_eq!(r.p, 23);
        for t in [10.0, 100.0, 1000.0] {
            let r = optimize_p(2, t).unwrap();
            let ratio = r.term_major / r.term_error;
            assert!((0.01..=100.0).contains(&ratio), "T={t}: {ratio}");
            assert!(r.p as f64 >= t && r.p as f64 <= 2.0 * t * t);
        }
        assert_eq!(optimize_p(3, 10.0).unwrap().exponent, "5/4");
        assert!(optimize_p(1, 10.0).is_err());
    }
}
