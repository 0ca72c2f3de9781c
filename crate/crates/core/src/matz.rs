//! Integer matrices: exact `N(T)` through commutant lattices, and the count
//! of box pairs whose commutator vanishes modulo a prime.

use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{pow_sat, Budget, Error, Result};
use crate::ff::FieldCtx;
use crate::matfp::{ad_matrix, MatF};

/// Largest sup-norm accepted by [`commutant_lattice`].
pub const MAX_LATTICE_NORM: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    n: usize,
    entries: Vec<i64>,
}

impl IntMat {
    pub fn new(n: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::mismatch(format!(
                "{} entries for an {n}x{n} integer matrix",
                entries.len()
            )));
        }
        Ok(IntMat { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        IntMat {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = c;
        }
        m
    }

    /// The `idx`-th matrix of the box `‖X‖ <= t`, entries in `[-t, t]`,
    /// first entry varying fastest.
    pub fn from_box_index(n: usize, t: i64, mut idx: u64) -> Self {
        let side = (2 * t + 1) as u64;
        let entries = (0..n * n)
            .map(|_| {
                let d = (idx % side) as i64 - t;
                idx /= side;
                d
            })
            .collect();
        IntMat { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    /// Maximum absolute entry.
    pub fn sup_norm(&self) -> i64 {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &IntMat) -> Result<IntMat> {
        if self.n != other.n {
            return Err(Error::mismatch("integer matrix sizes differ"));
        }
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i64;
                for k in 0..n {
                    acc = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .and_then(|x| acc.checked_add(x))
                        .ok_or_else(|| Error::Overflow("integer matrix product".into()))?;
                }
                out[i * n + j] = acc;
            }
        }
        Ok(IntMat { n, entries: out })
    }

    pub fn commutator(&self, other: &IntMat) -> Result<IntMat> {
        let a = self.mul(other)?;
        let b = other.mul(self)?;
        let entries = a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| x.checked_sub(*y))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Overflow("integer commutator".into()))?;
        Ok(IntMat { n: self.n, entries })
    }

    pub fn reduce(&self, ctx: FieldCtx) -> MatF {
        MatF::from_i64(ctx, self.n, self.n, &self.entries).expect("square by construction")
    }
}

/// Integer solutions `Y` of `XY = YX`, as a lattice basis in Hermite normal
/// form: rows in echelon form with strictly increasing pivot columns,
/// positive pivots, and entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantLattice {
    n: usize,
    basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl CommutantLattice {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

fn ovf(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// Integer row echelon form by repeated Euclidean reduction. Only the first
/// `key_cols` columns are used to choose pivots; the remaining columns are
/// carried along. Returns the pivot columns.
fn integer_echelon(rows: &mut [Vec<i128>], key_cols: usize) -> Result<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..key_cols {
        if r == rows.len() {
            break;
        }
        loop {
            // Row with the smallest non-zero entry in column c moves to r.
            let Some(best) = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].unsigned_abs())
            else {
                break;
            };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c] == 0 {
                    continue;
                }
                let q = rows[i][c].div_euclid(rows[r][c]);
                for j in 0..rows[i].len() {
                    let sub = q.checked_mul(rows[r][j]).ok_or_else(|| ovf("integer echelon"))?;
                    rows[i][j] = rows[i][j].checked_sub(sub).ok_or_else(|| ovf("integer echelon"))?;
                }
                if rows[i][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c] != 0 {
            pivots.push(c);
            r += 1;
        }
    }
    Ok(pivots)
}

/// Basis of the integer kernel `{v ∈ Z^N : A v = 0}` of an `m x N` matrix.
fn integer_kernel(a: &[Vec<i64>], cols: usize) -> Result<Vec<Vec<i128>>> {
    // Row-reduce [A^T | I]; rows whose A^T part vanishes carry kernel vectors.
    let m = a.len();
    let mut rows: Vec<Vec<i128>> = (0..cols)
        .map(|j| {
            let mut row: Vec<i128> = a.iter().map(|r| r[j] as i128).collect();
            row.extend((0..cols).map(|k| (k == j) as i128));
            row
        })
        .collect();
    let pivots = integer_echelon(&mut rows, m)?;
    Ok(rows
        .into_iter()
        .skip(pivots.len())
        .map(|r| r[m..].to_vec())
        .collect())
}

/// Hermite normal form of a full-rank list of row vectors.
fn hermite(mut rows: Vec<Vec<i128>>, cols: usize) -> Result<(Vec<Vec<i128>>, Vec<usize>)> {
    let pivots = integer_echelon(&mut rows, cols)?;
    rows.truncate(pivots.len());
    for (r, &c) in pivots.iter().enumerate() {
        if rows[r][c] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        for above in 0..r {
            let q = rows[above][c].div_euclid(rows[r][c]);
            if q != 0 {
                for j in 0..cols {
                    let sub = q.checked_mul(rows[r][j]).ok_or_else(|| ovf("hermite reduction"))?;
                    rows[above][j] = rows[above][j].checked_sub(sub).ok_or_else(|| ovf("hermite reduction"))?;
                }
            }
        }
    }
    Ok((rows, pivots))
}

/// Lattice of integer matrices commuting with `x`, from the integer kernel of
/// its ad-operator.
pub fn commutant_lattice(x: &IntMat) -> Result<CommutantLattice> {
    if x.sup_norm() > MAX_LATTICE_NORM {
        return Err(Error::Size(format!(
            "sup-norm {} exceeds {MAX_LATTICE_NORM}",
            x.sup_norm()
        )));
    }
    let n = x.n;
    let nn = n * n;
    // Row (i,j) of the map Y -> YX - XY.
    let mut a = vec![vec![0i64; nn]; nn];
    for i in 0..n {
        for j in 0..n {
            let row = &mut a[i * n + j];
            for k in 0..n {
                row[i * n + k] += x.get(k, j);
                row[k * n + j] -= x.get(i, k);
            }
        }
    }
    let kernel = integer_kernel(&a, nn)?;
    let (hnf, pivots) = hermite(kernel, nn)?;
    let basis = hnf
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| i64::try_from(v).map_err(|_| ovf("commutant basis")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutantLattice { n, basis, pivots })
}

/// Shared step counter enforcing a [`Budget`] across workers.
pub(crate) struct StepCounter<'a> {
    used: AtomicU64,
    budget: Budget,
    what: &'a str,
}

impl<'a> StepCounter<'a> {
    pub(crate) fn new(budget: Budget, what: &'a str) -> Self {
        StepCounter {
            used: AtomicU64::new(0),
            budget,
            what,
        }
    }

    pub(crate) fn charge(&self, steps: u64) -> Result<()> {
        let used = self.used.fetch_add(steps, Ordering::Relaxed).saturating_add(steps);
        if used > self.budget.max_steps {
            return Err(Error::Budget {
                what: self.what.to_string(),
                needed: used as u128,
                limit: self.budget.max_steps,
            });
        }
        Ok(())
    }
}

fn count_in_box_with(l: &CommutantLattice, t: i64, steps: &StepCounter) -> Result<u128> {
    if t < 0 {
        return Err(Error::contract("box radius must be non-negative"));
    }
    let r = l.rank();
    let dim = l.n * l.n;
    if r == 0 {
        return Ok(1);
    }
    // Columns fully determined once coefficients 0..=level are fixed.
    let checks: Vec<std::ops::Range<usize>> = (0..r)
        .map(|i| l.pivots[i]..if i + 1 < r { l.pivots[i + 1] } else { dim })
        .collect();
    let basis: Vec<Vec<i128>> = l
        .basis
        .iter()
        .map(|b| b.iter().map(|&x| x as i128).collect())
        .collect();
    let t = t as i128;

    struct Walk<'a> {
        basis: &'a [Vec<i128>],
        pivots: &'a [usize],
        checks: &'a [std::ops::Range<usize>],
        t: i128,
        local: u64,
    }

    fn rec(w: &mut Walk, level: usize, partial: &mut Vec<i128>, steps: &StepCounter) -> Result<u128> {
        let c = w.pivots[level];
        let piv = w.basis[level][c];
        let s = partial[c];
        // |s + a*piv| <= t with piv > 0.
        let lo = (-w.t - s).div_euclid(piv) + i128::from((-w.t - s).rem_euclid(piv) != 0);
        let hi = (w.t - s).div_euclid(piv);
        let mut total = 0u128;
        for a in lo..=hi {
            w.local += 1;
            if w.local >= 4096 {
                steps.charge(w.local)?;
                w.local = 0;
            }
            let row = &w.basis[level];
            for (slot, &b) in partial.iter_mut().zip(row) {
                *slot += a * b;
            }
            let ok = w.checks[level].clone().all(|j| partial[j].abs() <= w.t);
            if ok {
                total += if level + 1 == w.pivots.len() {
                    1
                } else {
                    rec(w, level + 1, partial, steps)?
                };
            }
            for (slot, &b) in partial.iter_mut().zip(row) {
                *slot -= a * b;
            }
        }
        Ok(total)
    }

    let mut walk = Walk {
        basis: &basis,
        pivots: &l.pivots,
        checks: &checks,
        t,
        local: 0,
    };
    let out = rec(&mut walk, 0, &mut vec![0i128; dim], steps)?;
    steps.charge(walk.local)?;
    Ok(out)
}

/// Number of lattice points `Y` with `‖Y‖ <= t`, by depth-first search over
/// Hermite coordinates with exact per-level bounds.
pub fn count_lattice_in_box(l: &CommutantLattice, t: i64, budget: Budget) -> Result<u128> {
    let steps = StepCounter::new(budget, "lattice box enumeration");
    count_in_box_with(l, t, &steps)
}

fn check_box(n: usize, t: i64) -> Result<u64> {
    if n == 0 || t < 0 {
        return Err(Error::contract("need n >= 1 and T >= 0"));
    }
    let total = pow_sat((2 * t + 1) as u64, (n * n) as u32);
    if total > u64::MAX as u128 {
        return Err(Error::Size("box too large".into()));
    }
    Ok(total as u64)
}

/// `N(T) = #{(X,Y) ∈ M_n(Z)^2 : ‖X‖,‖Y‖ <= T, XY = YX}`.
pub fn count_n(n: usize, t: i64, budget: Budget) -> Result<u128> {
    let total = check_box(n, t)?;
    budget.check("N(T) outer loop", total as u128)?;
    let steps = StepCounter::new(budget, "N(T) enumeration");
    let chunks = 256u64.min(total);
    let per = total.div_ceil(chunks);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = 0u128;
            for idx in c * per..((c + 1) * per).min(total) {
                let x = IntMat::from_box_index(n, t, idx);
                let lat = commutant_lattice(&x)?;
                acc += count_in_box_with(&lat, t, &steps)?;
            }
            steps.charge(per)?;
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().sum())
}

/// `#{x ∈ [-T, T] : x ≡ r mod p}` for each residue `r`.
fn residue_weights(t: i64, p: u32) -> Vec<u128> {
    let mut w = vec![0u128; p as usize];
    for x in -t..=t {
        w[x.rem_euclid(p as i64) as usize] += 1;
    }
    w
}

/// `#{(X,Y) in the box : p | XY - YX}`, summing over residues `V = X mod p`
/// the box weight of `V` times the weighted count of box residues commuting
/// with `V` modulo `p`.
pub fn congruence_count(n: usize, t: i64, p: u32, budget: Budget) -> Result<u128> {
    let ctx = FieldCtx::new(p as u64)?;
    check_box(n, t)?;
    let w = residue_weights(t, p);
    let support: Vec<u32> = (0..p).filter(|&r| w[r as usize] > 0).collect();
    let s = support.len() as u64;
    let nn = n * n;
    let outer = pow_sat(s, nn as u32);
    budget.check("congruence count", outer.saturating_mul(outer.min(pow_sat(p as u64, nn as u32))))?;
    let outer = outer as u64;

    let support_mat = |mut idx: u64| -> (MatF, u128) {
        let mut data = vec![0i64; nn];
        let mut weight = 1u128;
        for slot in data.iter_mut() {
            let r = support[(idx % s) as usize];
            idx /= s;
            *slot = r as i64;
            weight *= w[r as usize];
        }
        (MatF::from_i64(ctx, n, n, &data).unwrap(), weight)
    };
    let weight_of = |m: &[u32]| -> u128 { m.iter().map(|&r| w[r as usize]).product() };

    let total = (0..outer)
        .into_par_iter()
        .map(|vi| {
            let (v, wv) = support_mat(vi);
            let ad = ad_matrix(&v);
            let kernel = ad.kernel();
            let kernel_size = pow_sat(p as u64, kernel.len() as u32);
            let inner: u128 = if kernel_size <= outer as u128 {
                // Walk the kernel of ad(V) mod p.
                (0..kernel_size as u64)
                    .map(|ki| {
                        let mut u = vec![0u32; nn];
                        let mut rest = ki;
                        for b in &kernel {
                            let c = (rest % p as u64) as u32;
                            rest /= p as u64;
                            for (slot, &e) in u.iter_mut().zip(b) {
                                *slot = ctx.add(*slot, ctx.mul(c, e));
                            }
                        }
                        weight_of(&u)
                    })
                    .sum()
            } else {
                // Scan box residues and test membership in the kernel.
                (0..outer)
                    .map(|ui| {
                        let (u, wu) = support_mat(ui);
                        if ad.mul_vec(u.entries()).iter().all(|&x| x == 0) {
                            wu
                        } else {
                            0
                        }
                    })
                    .sum()
            };
            wv * inner
        })
        .sum::<u128>();
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub t: i64,
    pub count: String,
    /// `(2T+1)^{n²+1}`: pairs with `X` scalar already give this many.
    pub lower_bound: String,
    pub lower_bound_holds: bool,
    /// `T^{n² + 2 - 2/(n+1)}`.
    pub upper_reference: f64,
    /// `log(N(T_i)/N(T_{i-1})) / log((2T_i+1)/(2T_{i-1}+1))`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub n: usize,
    /// `n² + 2 - 2/(n+1)` as an exact fraction.
    pub upper_exponent: String,
    pub lower_exponent: usize,
    pub rows: Vec<ScalingRow>,
}

/// `n² + 2 - 2/(n+1)`.
pub fn upper_exponent(n: usize) -> Ratio<i64> {
    let n = n as i64;
    Ratio::from_integer(n * n + 2) - Ratio::new(2, n + 1)
}

pub fn scaling_report(n: usize, ts: &[i64], budget: Budget) -> Result<ScalingReport> {
    let up = upper_exponent(n);
    let up_f = *up.numer() as f64 / *up.denom() as f64;
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(ts.len());
    let mut prev: Option<(i64, u128)> = None;
    for &t in ts {
        let count = count_n(n, t, budget)?;
        let lower = pow_sat((2 * t + 1) as u64, (n * n + 1) as u32);
        let slope = prev.and_then(|(pt, pc)| {
            (pc > 0 && pt != t).then(|| {
                (count as f64 / pc as f64).ln() / ((2 * t + 1) as f64 / (2 * pt + 1) as f64).ln()
            })
        });
        rows.push(ScalingRow {
            t,
            count: count.to_string(),
            lower_bound: lower.to_string(),
            lower_bound_holds: count >= lower,
            upper_reference: (t as f64).powf(up_f),
            slope,
        });
        prev = Some((t, count));
    }
    Ok(ScalingReport {
        n,
        upper_exponent: up.to_string(),
        lower_exponent: n * n + 1,
        rows,
    })
}
