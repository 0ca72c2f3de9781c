//! Exact matrix exponential sums
//! `S(A,B;p) = Σ_{UV=VU} e_p(tr(AU + BV))` in a cyclotomic representation.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conjugacy::enumerate_classes;
use crate::error::{pow_sat, Budget, Error, Result};
use crate::ff::FieldCtx;
use crate::matfp::{centralizer_basis, MatF};

/// An element `Σ_k counts[k] ζ_p^k` of `Z[ζ_p]`.
///
/// The only integer relation among `1, ζ, ..., ζ^{p-1}` is that their sum
/// vanishes, so two count vectors represent the same number exactly when
/// they differ by a constant vector.
#[derive(Debug, Clone, Serialize)]
pub struct ExpSumCounts {
    p: u32,
    counts: Vec<i64>,
}

impl PartialEq for ExpSumCounts {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.normalized() == other.normalized()
    }
}

impl Eq for ExpSumCounts {}

impl ExpSumCounts {
    pub fn zero(p: u32) -> Self {
        ExpSumCounts {
            p,
            counts: vec![0; p as usize],
        }
    }

    pub fn from_counts(p: u32, counts: Vec<i64>) -> Result<Self> {
        if counts.len() != p as usize {
            return Err(Error::mismatch(format!(
                "count vector of length {} for modulus {p}",
                counts.len()
            )));
        }
        Ok(ExpSumCounts { p, counts })
    }

    /// The rational integer `m`.
    pub fn integer(p: u32, m: i64) -> Self {
        let mut s = Self::zero(p);
        s.counts[0] = m;
        s
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    #[inline]
    pub fn add_at(&mut self, k: u32, c: i64) {
        self.counts[k as usize] += c;
    }

    pub fn add_assign(&mut self, other: &ExpSumCounts) {
        debug_assert_eq!(self.p, other.p);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Representative with `counts[0] = 0`.
    pub fn normalized(&self) -> Vec<i64> {
        let c0 = self.counts[0];
        self.counts.iter().map(|&c| c - c0).collect()
    }

    pub fn normalize(&mut self) {
        self.counts = self.normalized();
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == self.counts[0])
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.p == 2 {
            return Some(self.counts[0] - self.counts[1]);
        }
        let c1 = self.counts[1];
        self.counts[1..]
            .iter()
            .all(|&c| c == c1)
            .then(|| self.counts[0] - c1)
    }

    /// Exact division of the value by `d`, if possible within `Z[ζ]`.
    pub fn div_exact(&self, d: i64) -> Option<ExpSumCounts> {
        let norm = self.normalized();
        if norm.iter().any(|&c| c % d != 0) {
            return None;
        }
        Some(ExpSumCounts {
            p: self.p,
            counts: norm.into_iter().map(|c| c / d).collect(),
        })
    }

    /// `|Σ counts[k] ζ^k|` as a float; see [`magnitude`].
    pub fn magnitude(&self) -> f64 {
        magnitude(self)
    }
}

/// Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo|` at
/// most half an ulp of `hi`.
#[derive(Debug, Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(r.hi, r.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::from(d).mul(Dd::from(-q1)));
        let q2 = r.hi / d;
        Dd::two_sum(q1, q2)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    /// `(cos x, sin x)` by Taylor series; accurate for `|x| <= 2π`.
    fn cos_sin(x: Dd) -> (Dd, Dd) {
        let x2 = x.mul(x).neg();
        let (mut c, mut s) = (Dd::from(1.0), x);
        let (mut tc, mut ts) = (Dd::from(1.0), x);
        for k in 1..40 {
            let k = k as f64;
            tc = tc.mul(x2).div_f64((2.0 * k - 1.0) * (2.0 * k));
            ts = ts.mul(x2).div_f64((2.0 * k) * (2.0 * k + 1.0));
            c = c.add(tc);
            s = s.add(ts);
        }
        (c, s)
    }
}

/// `|Σ counts[k] ζ^k|`. Trigonometric values and the accumulation are
/// carried in double-double precision, so the returned `f64` is within a few
/// ulps of the true magnitude for counts up to `2^53`.
pub fn magnitude(s: &ExpSumCounts) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let p = s.p as usize;
    let (mut re, mut im) = (Dd::default(), Dd::default());
    for (k, &c) in s.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        // Use the angle in (-π, π] to keep the series short.
        let kk = if 2 * k > p { k as f64 - p as f64 } else { k as f64 };
        let theta = Dd::PI.mul(Dd::from(2.0 * kk)).div_f64(p as f64);
        let (cos, sin) = Dd::cos_sin(theta);
        let cd = Dd::from(c as f64);
        re = re.add(cd.mul(cos));
        im = im.add(cd.mul(sin));
    }
    (re.hi + re.lo).hypot(im.hi + im.lo)
}

/// For every `V` in `M_n(F_p)`, a basis of its centralizer. Indexed by
/// [`MatF::index`].
pub struct CentralizerTable {
    ctx: FieldCtx,
    n: usize,
    bases: Vec<Vec<MatF>>,
}

impl CentralizerTable {
    pub fn build(ctx: FieldCtx, n: usize, budget: Budget) -> Result<Self> {
        let total = pow_sat(ctx.p() as u64, (n * n) as u32);
        budget.check("centralizer table", total * (n as u128).pow(6))?;
        let bases = (0..total as u64)
            .into_par_iter()
            .map(|idx| centralizer_basis(&MatF::from_index(ctx, n, idx)))
            .collect();
        Ok(CentralizerTable { ctx, n, bases })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn dim(&self, idx: usize) -> usize {
        self.bases[idx].len()
    }

    pub fn basis(&self, idx: usize) -> &[MatF] {
        &self.bases[idx]
    }

    /// For each `V`: `p^{dim C(V)}` if `tr(A·)` vanishes on `C(V)`, else 0.
    /// This is the inner character sum over `U ∈ C(V)` of `e_p(tr(AU))`.
    pub fn inner_weights(&self, a: &MatF) -> Vec<i64> {
        let p = self.ctx.p() as i64;
        self.bases
            .iter()
            .map(|basis| {
                if basis.iter().all(|z| a.trace_pairing(z) == 0) {
                    p.pow(basis.len() as u32)
                } else {
                    0
                }
            })
            .collect()
    }

    /// `S(A,B;p)` from precomputed inner weights of `A`.
    pub fn exp_sum_weighted(&self, weights: &[i64], b: &MatF) -> ExpSumCounts {
        let mut out = ExpSumCounts::zero(self.ctx.p());
        for (idx, &w) in weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let v = MatF::from_index(self.ctx, self.n, idx as u64);
            out.add_at(b.trace_pairing(&v), w);
        }
        out
    }

    pub fn exp_sum(&self, a: &MatF, b: &MatF) -> ExpSumCounts {
        self.exp_sum_weighted(&self.inner_weights(a), b)
    }
}

fn check_pair(a: &MatF, b: &MatF) -> Result<()> {
    if a.ctx() != b.ctx() || !a.is_square() || !b.is_square() || a.n() != b.n() {
        return Err(Error::mismatch("exponential sum arguments must be square over one field"));
    }
    Ok(())
}

/// `S(A,B;p)` by a single loop over `V`: the sum over `U ∈ C(V)` of
/// `e_p(tr(AU))` is `p^{dim C(V)}` when `tr(A·)` vanishes on `C(V)` and 0
/// otherwise.
pub fn exp_sum(a: &MatF, b: &MatF, budget: Budget) -> Result<ExpSumCounts> {
    check_pair(a, b)?;
    let ctx = a.ctx();
    let n = a.n();
    let p = ctx.p() as i64;
    let total = pow_sat(ctx.p() as u64, (n * n) as u32);
    budget.check("exp_sum V-loop", total * (n as u128).pow(6))?;
    let chunks = 64u64;
    let per = (total as u64).div_ceil(chunks);
    let partials: Vec<ExpSumCounts> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = ExpSumCounts::zero(ctx.p());
            let hi = ((c + 1) * per).min(total as u64);
            for idx in c * per..hi {
                let v = MatF::from_index(ctx, n, idx);
                let basis = centralizer_basis(&v);
                if basis.iter().all(|z| a.trace_pairing(z) == 0) {
                    acc.add_at(b.trace_pairing(&v), p.pow(basis.len() as u32));
                }
            }
            acc
        })
        .collect();
    let mut out = ExpSumCounts::zero(ctx.p());
    for part in &partials {
        out.add_assign(part);
    }
    Ok(out)
}

/// Evaluator of the triple sum
/// `p^{-n²} Σ_{U,V,Z} e_p(tr(Z(UV-VU)) + tr(AU) + tr(BV))`, with the
/// `tr(Z(UV-VU))` values tabulated once.
pub struct TripleOracle {
    ctx: FieldCtx,
    n: usize,
    size: usize,
    /// `tr(Z[U,V])` indexed by `(u * size + v) * size + z`.
    table: Vec<u32>,
    /// `u` for the row `(u,v)`, restricted to the pairs.
    mats: Vec<MatF>,
}

impl TripleOracle {
    pub fn new(ctx: FieldCtx, n: usize, budget: Budget) -> Result<Self> {
        let size = pow_sat(ctx.p() as u64, (n * n) as u32);
        budget.check("triple-sum oracle", size.saturating_pow(3))?;
        let size = size as usize;
        let mats: Vec<MatF> = (0..size as u64).map(|i| MatF::from_index(ctx, n, i)).collect();
        let table = (0..size * size)
            .into_par_iter()
            .flat_map_iter(|uv| {
                let (u, v) = (&mats[uv / size], &mats[uv % size]);
                let c = u.mul(v).unwrap().sub(&v.mul(u).unwrap()).unwrap();
                mats.iter().map(move |z| z.trace_pairing(&c)).collect::<Vec<_>>()
            })
            .collect();
        Ok(TripleOracle {
            ctx,
            n,
            size,
            table,
            mats,
        })
    }

    pub fn eval(&self, a: &MatF, b: &MatF) -> Result<ExpSumCounts> {
        check_pair(a, b)?;
        if a.ctx() != self.ctx || a.n() != self.n {
            return Err(Error::mismatch("oracle built for another field or size"));
        }
        let f = self.ctx;
        let tr_a: Vec<u32> = self.mats.iter().map(|u| a.trace_pairing(u)).collect();
        let tr_b: Vec<u32> = self.mats.iter().map(|v| b.trace_pairing(v)).collect();
        let mut acc = ExpSumCounts::zero(f.p());
        for u in 0..self.size {
            for v in 0..self.size {
                let shift = f.add(tr_a[u], tr_b[v]);
                let row = &self.table[(u * self.size + v) * self.size..][..self.size];
                for &t in row {
                    acc.add_at(f.add(t, shift), 1);
                }
            }
        }
        acc.div_exact(self.size as i64).ok_or_else(|| {
            Error::Consistency("triple sum is not divisible by p^(n^2)".to_string())
        })
    }
}

/// `S(A,B;p)` from the triple-sum identity. Only feasible for tiny `p^{n²}`.
pub fn exp_sum_triple_oracle(a: &MatF, b: &MatF, budget: Budget) -> Result<ExpSumCounts> {
    check_pair(a, b)?;
    TripleOracle::new(a.ctx(), a.n(), budget)?.eval(a, b)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutingCount {
    pub n: usize,
    pub p: u32,
    /// `Σ_classes orbit · p^{dim C(V)}`.
    pub by_classes: u128,
    /// All-pairs count, when within budget.
    pub brute_force: Option<u128>,
}

impl CommutingCount {
    pub fn value(&self) -> u128 {
        self.by_classes
    }
}

/// `#{(U,V) : UV = VU}` over `F_p`, by the class formula and (when the
/// budget allows) by brute force; disagreement is a consistency error.
pub fn commuting_count(n: usize, p: u32, budget: Budget) -> Result<CommutingCount> {
    let classes = enumerate_classes(n, p, budget)?;
    let by_classes: u128 = classes
        .iter()
        .map(|c| c.orbit * pow_sat(p as u64, c.dim_c as u32))
        .sum();
    let pairs = pow_sat(p as u64, (2 * n * n) as u32);
    let brute_force = if budget.check("commuting brute force", pairs * (n as u128).pow(3)).is_ok() {
        Some(commuting_brute_force(FieldCtx::new(p as u64)?, n))
    } else {
        None
    };
    if let Some(bf) = brute_force {
        if bf != by_classes {
            return Err(Error::Consistency(format!(
                "commuting count: class formula {by_classes} != brute force {bf}"
            )));
        }
    }
    Ok(CommutingCount {
        n,
        p,
        by_classes,
        brute_force,
    })
}

fn commuting_brute_force(ctx: FieldCtx, n: usize) -> u128 {
    let size = (ctx.p() as u64).pow((n * n) as u32);
    let mats: Vec<MatF> = (0..size).map(|i| MatF::from_index(ctx, n, i)).collect();
    mats.par_iter()
        .map(|u| {
            mats.iter()
                .filter(|v| u.mul(v).unwrap() == v.mul(u).unwrap())
                .count() as u128
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SampleMode {
    Exhaustive,
    Sample { seed: u64, count: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub counts: Vec<i64>,
    pub magnitude: f64,
    pub p_divides_tr_a: bool,
    pub p_divides_tr_b: bool,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaExpReport {
    pub n: usize,
    pub p: u32,
    pub mode: SampleMode,
    pub pairs_tested: u64,
    /// Pairs with a non-vanishing trace where `S ≠ 0`.
    pub zero_violations: u64,
    /// Pairs where `|S(A,B)| > S(A,0)`.
    pub bound_violations: u64,
    /// Pairs where `S(A,0)` is not a non-negative integer.
    pub count_violations: u64,
    pub max_magnitude: f64,
    /// `max |S| / p^{n²+1}`.
    pub max_ratio: f64,
    pub argmax: (Vec<u32>, Vec<u32>),
    /// Magnitude histogram: `"zero"` or half-integer bins of `log_p |S|`.
    pub histogram: BTreeMap<String, u64>,
    pub rows: Vec<PairRow>,
}

/// Histogram key: `"zero"`, or `log_p|S|` rounded down to a multiple of 1/2.
pub fn magnitude_bin(mag: f64, exact_zero: bool, p: u32) -> String {
    if exact_zero {
        return "zero".to_string();
    }
    let e = mag.ln() / (p as f64).ln();
    // Guard against values like 2.9999999 for exact powers of p.
    let half = ((e * 2.0) + 1e-9).floor() / 2.0;
    format!("{half:.1}")
}

#[derive(Default)]
struct Acc {
    pairs: u64,
    zero_viol: u64,
    bound_viol: u64,
    count_viol: u64,
    max_mag: f64,
    argmax: Option<(u64, u64)>,
    hist: BTreeMap<String, u64>,
    rows: Vec<PairRow>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        self.pairs += other.pairs;
        self.zero_viol += other.zero_viol;
        self.bound_viol += other.bound_viol;
        self.count_viol += other.count_viol;
        if other.max_mag > self.max_mag || self.argmax.is_none() {
            if other.argmax.is_some() {
                self.max_mag = other.max_mag;
                self.argmax = other.argmax;
            }
        }
        for (k, v) in other.hist {
            *self.hist.entry(k).or_default() += v;
        }
        self.rows.extend(other.rows);
        self
    }
}

/// Tests the vanishing and bounded-ratio claims for `S(A,B;p)` over
/// `(A,B) ≠ (0,0)`, exhaustively or on a seeded sample.
pub fn lemma_exp_report(n: usize, p: u32, mode: SampleMode, budget: Budget) -> Result<LemmaExpReport> {
    let ctx = FieldCtx::new(p as u64)?;
    let size = pow_sat(p as u64, (n * n) as u32);
    let table = CentralizerTable::build(ctx, n, budget)?;
    let norm = (p as f64).powi((n * n + 1) as i32);
    let keep_rows = matches!(mode, SampleMode::Sample { .. });

    let eval = |ai: u64, bi: u64, wa: &[i64], s_a0: i64, acc: &mut Acc| {
        let a = MatF::from_index(ctx, n, ai);
        let b = MatF::from_index(ctx, n, bi);
        let s = table.exp_sum_weighted(wa, &b);
        let (ta, tb) = (a.trace() == 0, b.trace() == 0);
        let zero = s.is_zero();
        if (!ta || !tb) && !zero {
            acc.zero_viol += 1;
        }
        let mag = s.magnitude();
        if mag > s_a0 as f64 + 1e-6 * (1.0 + s_a0 as f64) {
            acc.bound_viol += 1;
        }
        if mag > acc.max_mag || acc.argmax.is_none() {
            acc.max_mag = mag;
            acc.argmax = Some((ai, bi));
        }
        *acc.hist.entry(magnitude_bin(mag, zero, p)).or_default() += 1;
        acc.pairs += 1;
        if keep_rows {
            acc.rows.push(PairRow {
                a: a.flatten(),
                b: b.flatten(),
                counts: s.normalized(),
                magnitude: mag,
                p_divides_tr_a: ta,
                p_divides_tr_b: tb,
                ratio: mag / norm,
            });
        }
    };

    let per_a = |ai: u64, bs: &mut dyn Iterator<Item = u64>| -> Acc {
        let a = MatF::from_index(ctx, n, ai);
        let wa = table.inner_weights(&a);
        let s_a0 = table.exp_sum_weighted(&wa, &MatF::zero(ctx, n, n));
        let mut acc = Acc::default();
        let s_a0 = match s_a0.as_integer() {
            Some(v) if v >= 0 => v,
            _ => {
                acc.count_viol += 1;
                i64::MAX
            }
        };
        for bi in bs {
            if ai == 0 && bi == 0 {
                continue;
            }
            eval(ai, bi, &wa, s_a0, &mut acc);
        }
        acc
    };

    let acc = match mode {
        SampleMode::Exhaustive => {
            budget.check("exhaustive lemma report", size * size * size)?;
            (0..size as u64)
                .into_par_iter()
                .map(|ai| per_a(ai, &mut (0..size as u64)))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Acc::default(), Acc::merge)
        }
        SampleMode::Sample { seed, count } => {
            budget.check("sampled lemma report", count as u128 * size)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pairs = Vec::with_capacity(count as usize);
            while (pairs.len() as u64) < count {
                let ai = rand::Rng::gen_range(&mut rng, 0..size as u64);
                let bi = rand::Rng::gen_range(&mut rng, 0..size as u64);
                if ai != 0 || bi != 0 {
                    pairs.push((ai, bi));
                }
            }
            pairs
                .par_iter()
                .map(|&(ai, bi)| per_a(ai, &mut std::iter::once(bi)))
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Acc::default(), Acc::merge)
        }
    };

    let (ai, bi) = acc.argmax.unwrap_or((0, 0));
    Ok(LemmaExpReport {
        n,
        p,
        mode,
        pairs_tested: acc.pairs,
        zero_violations: acc.zero_viol,
        bound_violations: acc.bound_viol,
        count_violations: acc.count_viol,
        max_magnitude: acc.max_mag,
        max_ratio: acc.max_mag / norm,
        argmax: (
            MatF::from_index(ctx, n, ai).flatten(),
            MatF::from_index(ctx, n, bi).flatten(),
        ),
        histogram: acc.hist,
        rows: acc.rows,
    })
}
