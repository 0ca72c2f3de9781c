//! Prime-field scalars and dense univariate polynomials.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{pow_sat, Error, Result};
use crate::matfp::MatF;

/// Largest modulus accepted by [`FieldCtx::new`].
pub const MAX_MODULUS: u64 = 1 << 31;

/// Arithmetic context for `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

impl FieldCtx {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) {
            return Err(Error::Size(format!("modulus {p} outside [2, 2^31]")));
        }
        if !is_prime(p) {
            return Err(Error::contract(format!("modulus {p} is not prime")));
        }
        Ok(FieldCtx { p: p as u32 })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn reduce_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric lift of a residue to `(-p/2, p/2]`.
    pub fn lift_signed(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// Dense polynomial over `F_p`, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ctx: FieldCtx,
    coeffs: Vec<u32>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (d, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}t")?,
                (d, 1) => write!(f, "t^{d}")?,
                (d, c) => write!(f, "{c}t^{d}")?,
            }
        }
        Ok(())
    }
}

/// Orders by degree, then coefficients compared from the constant term up.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn new(ctx: FieldCtx, coeffs: &[i64]) -> Self {
        Self::from_residues(ctx, coeffs.iter().map(|&c| ctx.reduce_i64(c)).collect())
    }

    pub(crate) fn from_residues(ctx: FieldCtx, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { ctx, coeffs }
    }

    pub fn zero(ctx: FieldCtx) -> Self {
        Poly {
            ctx,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: FieldCtx) -> Self {
        Poly {
            ctx,
            coeffs: vec![1],
        }
    }

    /// `t - a`.
    pub fn linear_root(ctx: FieldCtx, a: u32) -> Self {
        Self::from_residues(ctx, vec![ctx.neg(a % ctx.p()), 1])
    }

    /// `t^d`.
    pub fn monomial(ctx: FieldCtx, d: usize) -> Self {
        let mut c = vec![0; d + 1];
        c[d] = 1;
        Poly { ctx, coeffs: c }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.ctx);
        }
        let f = self.ctx;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_residues(f, out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(self.ctx), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; `divisor` must be non-zero.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let Some(dd) = divisor.degree() else {
            return Err(Error::contract("division by the zero polynomial"));
        };
        let f = self.ctx;
        let lead_inv = f.inv(divisor.leading());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], lead_inv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(rem[idx], f.mul(c, dc));
            }
        }
        Ok((Poly::from_residues(f, quot), Poly::from_residues(f, rem)))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        matches!(other.div_rem(self), Ok((_, r)) if r.is_zero())
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.ctx;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// All monic polynomials of degree `d`, lowest coefficients varying
    /// fastest.
    pub fn monic_of_degree(ctx: FieldCtx, d: usize) -> impl Iterator<Item = Poly> {
        let p = ctx.p() as u64;
        let count = p.pow(d as u32);
        (0..count).map(move |mut idx| {
            let mut c = vec![0u32; d + 1];
            for slot in c.iter_mut().take(d) {
                *slot = (idx % p) as u32;
                idx /= p;
            }
            c[d] = 1;
            Poly { ctx, coeffs: c }
        })
    }
}

/// Largest degree accepted by [`enumerate_irreducibles`].
pub const MAX_IRREDUCIBLE_DEGREE: usize = 6;
/// Upper limit on `p^d_max` for [`enumerate_irreducibles`].
pub const MAX_IRREDUCIBLE_SEARCH: u128 = 20_000_000;

/// All monic irreducibles of degree `1..=d_max`, sorted by degree and then
/// coefficients. Irreducibility is decided by trial division against the
/// irreducibles of degree at most `d/2` found so far.
pub fn enumerate_irreducibles(ctx: FieldCtx, d_max: usize) -> Result<Vec<Poly>> {
    if d_max == 0 || d_max > MAX_IRREDUCIBLE_DEGREE {
        return Err(Error::Size(format!(
            "irreducible enumeration needs 1 <= d_max <= {MAX_IRREDUCIBLE_DEGREE}, got {d_max}"
        )));
    }
    let work = pow_sat(ctx.p() as u64, d_max as u32);
    if work > MAX_IRREDUCIBLE_SEARCH {
        return Err(Error::Size(format!(
            "p^d_max = {work} exceeds the search limit {MAX_IRREDUCIBLE_SEARCH}"
        )));
    }
    let mut out: Vec<Poly> = Vec::new();
    for d in 1..=d_max {
        let small: Vec<Poly> = out
            .iter()
            .filter(|g| g.degree().unwrap() <= d / 2)
            .cloned()
            .collect();
        for f in Poly::monic_of_degree(ctx, d) {
            if !small.iter().any(|g| g.divides(&f)) {
                out.push(f);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Factorization of a monic polynomial by trial division: `(factor,
/// multiplicity)` pairs in the order of `irr`.
pub fn factor_monic(f: &Poly, irr: &[Poly]) -> Result<Vec<(Poly, usize)>> {
    if !f.is_monic() {
        return Err(Error::contract(format!("{f} is not monic")));
    }
    let mut rest = f.clone();
    let mut out = Vec::new();
    for g in irr {
        if rest.degree() == Some(0) {
            break;
        }
        if g.degree() > rest.degree() {
            continue;
        }
        let mut mult = 0;
        loop {
            let (q, r) = rest.div_rem(g)?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((g.clone(), mult));
        }
    }
    if rest.degree() != Some(0) {
        return Err(Error::contract(format!(
            "{f} has a factor {rest} beyond the supplied irreducibles"
        )));
    }
    Ok(out)
}

/// Product of the distinct monic irreducible factors of `f`.
pub fn radical(f: &Poly, irr: &[Poly]) -> Result<Poly> {
    Ok(factor_monic(f, irr)?
        .iter()
        .fold(Poly::one(f.ctx), |acc, (g, _)| acc.mul(g)))
}

/// `det(tI - V)` by Berkowitz's division-free recursion.
pub fn char_poly(v: &MatF) -> Poly {
    let f = v.ctx();
    let n = v.n();
    // Coefficient vectors are stored highest degree first: [1, c1, ..., cm].
    let mut cur: Vec<u32> = vec![1];
    for start in (0..n).rev() {
        // Trailing principal submatrix A = [[a, R], [C, A1]] at `start`.
        let m = n - start;
        let a = v.get(start, start);
        let rest: Vec<usize> = (start + 1..n).collect();
        // Column of the Toeplitz matrix: 1, -a, -R C, -R A1 C, ...
        let mut col = vec![1u32, f.neg(a)];
        let mut w: Vec<u32> = rest.iter().map(|&i| v.get(i, start)).collect();
        for _ in 0..m.saturating_sub(1) {
            let rc = rest
                .iter()
                .zip(&w)
                .fold(0u32, |acc, (&j, &x)| f.add(acc, f.mul(v.get(start, j), x)));
            col.push(f.neg(rc));
            w = rest
                .iter()
                .map(|&i| {
                    rest.iter()
                        .zip(&w)
                        .fold(0u32, |acc, (&j, &x)| f.add(acc, f.mul(v.get(i, j), x)))
                })
                .collect();
        }
        col.truncate(m + 1);
        let next: Vec<u32> = (0..=m)
            .map(|row| {
                (0..cur.len())
                    .filter(|&k| k <= row)
                    .fold(0u32, |acc, k| f.add(acc, f.mul(col[row - k], cur[k])))
            })
            .collect();
        cur = next;
    }
    Poly::from_residues(f, cur.into_iter().rev().collect())
}

/// Companion matrix of a monic polynomial: ones on the subdiagonal and
/// `-a_i` in the last column.
pub fn companion(fpoly: &Poly) -> Result<MatF> {
    if !fpoly.is_monic() || fpoly.degree().unwrap_or(0) == 0 {
        return Err(Error::contract(format!(
            "companion matrix needs a monic polynomial of positive degree, got {fpoly}"
        )));
    }
    let f = fpoly.ctx;
    let d = fpoly.degree().unwrap();
    let mut m = MatF::zero(f, d, d);
    for i in 1..d {
        m.set(i, i - 1, 1);
    }
    for i in 0..d {
        m.set(i, d - 1, f.neg(fpoly.coeffs[i]));
    }
    Ok(m)
}

/// Number of monic irreducibles of degree `d` over `F_p` by the necklace
/// formula `(1/d) sum_{e | d} mu(e) p^{d/e}`.
pub fn necklace_count(p: u64, d: u32) -> u64 {
    fn mobius(mut n: u32) -> i64 {
        let mut result = 1;
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                n /= q;
                if n % q == 0 {
                    return 0;
                }
                result = -result;
            }
            q += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }
    let total: i64 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mobius(e) * (p as i64).pow(d / e))
        .sum();
    (total / d as i64) as u64
}
