//! Fibres of the commutator map and the group averages that bound them.
//!
//! Everything here is exact: counts are integers and averages are ratios of
//! integers. Conjugation is `M ↦ g⁻¹Mg` for the block averages and
//! `V ↦ gVg⁻¹` for `L(V,M)`, matching the definitions they check.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::conjugacy::{enumerate_classes, ClassRecord};
use crate::error::{pow_sat, Budget, Error, Result};
use crate::ff::FieldCtx;
use crate::matfp::{
    ad_image_contains, blocks_vanish, centralizer_basis, general_linear, space_size,
    Block, BlockSplit, GroupElement, MatF,
};

pub type Q = Ratio<i128>;

fn q_pow(p: u32, e: usize) -> Q {
    Q::from_integer(p as i128).pow(e as i32)
}

fn q_inv_pow(p: u32, e: usize) -> Q {
    Q::new(1, (p as i128).pow(e as u32))
}

fn q_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct FibreReport {
    pub n: usize,
    pub p: u32,
    pub m: Vec<u32>,
    /// `#{(U,V) : UV - VU = M}`.
    pub count: u128,
    /// `count / p^{n²+1}`.
    pub normalized: f64,
}

/// Exact size of the fibre of `(U,V) ↦ UV - VU` over `M`: for each `V`, the
/// solutions `U` form a coset of `C(V)` when `M` lies in the image of
/// `U ↦ UV - VU`, and are empty otherwise.
pub fn fibre_count(m: &MatF, budget: Budget) -> Result<FibreReport> {
    if !m.is_square() {
        return Err(Error::mismatch("fibre target must be square"));
    }
    let ctx = m.ctx();
    let n = m.n();
    let p = ctx.p();
    let total = space_size(ctx, n, budget, "fibre V-loop")?;
    let nn = (n * n) as u32;
    let chunks = 64u64.min(total);
    let per = total.div_ceil(chunks);
    let count: u128 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = 0u128;
            for idx in c * per..((c + 1) * per).min(total) {
                let v = MatF::from_index(ctx, n, idx);
                let (inside, rank) = ad_image_contains(&v, m);
                if inside {
                    acc += pow_sat(p as u64, nn - rank as u32);
                }
            }
            acc
        })
        .sum();
    Ok(FibreReport {
        n,
        p,
        m: m.flatten(),
        count,
        normalized: count as f64 / (p as f64).powi(nn as i32 + 1),
    })
}

/// `C(V) ⊆ M^⊥` tested on a basis of `C(V)`.
fn centralizer_in_perp(basis: &[MatF], m: &MatF) -> bool {
    basis.iter().all(|z| z.trace_pairing(m) == 0)
}

/// Cached group data for averages over `GL_n(F_p)`.
pub struct GroupCache {
    pub ctx: FieldCtx,
    pub n: usize,
    pub elements: Vec<GroupElement>,
}

impl GroupCache {
    pub fn new(ctx: FieldCtx, n: usize, budget: Budget) -> Result<Self> {
        Ok(GroupCache {
            ctx,
            n,
            elements: general_linear(ctx, n, budget)?,
        })
    }

    pub fn order(&self) -> u128 {
        self.elements.len() as u128
    }

    /// `g⁻¹Mg` for every `g`, in group order.
    pub fn conjugates(&self, m: &MatF) -> Vec<MatF> {
        self.elements.par_iter().map(|e| e.conjugate(m)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageReport {
    pub lemma: String,
    pub n: usize,
    pub p: u32,
    pub k: Option<usize>,
    pub m: Vec<u32>,
    pub v: Option<Vec<u32>>,
    pub numerator: String,
    pub denominator: String,
    pub average: f64,
    /// The right-hand side the average is compared with.
    pub bound: String,
    pub bound_value: f64,
    /// Whether `average <= bound` (exact). `None` when the claim carries an
    /// unspecified constant.
    pub holds: Option<bool>,
    /// `average / bound`.
    pub ratio: f64,
    #[serde(skip)]
    pub exact: Q,
}

impl AverageReport {
    fn build(lemma: String, n: usize, p: u32, num: u128, den: u128, bound: Q, exact_claim: bool) -> Self {
        let exact = Q::new(num as i128, den as i128);
        AverageReport {
            lemma,
            n,
            p,
            k: None,
            m: Vec::new(),
            v: None,
            numerator: num.to_string(),
            denominator: den.to_string(),
            average: q_f64(&exact),
            bound: bound.to_string(),
            bound_value: q_f64(&bound),
            holds: exact_claim.then(|| exact <= bound),
            ratio: if *bound.numer() == 0 { f64::INFINITY } else { q_f64(&(exact / bound)) },
            exact,
        }
    }
}

/// `L(V,M) = E_g 1[C(gVg⁻¹) ⊆ M^⊥]`, using
/// `C(gVg⁻¹) ⊆ M^⊥ ⇔ C(V) ⊆ (g⁻¹Mg)^⊥`.
pub fn lvm(v: &MatF, m: &MatF, group: &GroupCache) -> Result<AverageReport> {
    check_same(v, m, group)?;
    let conj = group.conjugates(m);
    Ok(lvm_with(v, m, &centralizer_basis(v), &conj, group))
}

fn lvm_with(v: &MatF, m: &MatF, basis: &[MatF], conj: &[MatF], group: &GroupCache) -> AverageReport {
    let hits = conj.iter().filter(|cm| centralizer_in_perp(basis, cm)).count() as u128;
    let mut r = AverageReport::build(
        "L(V,M)".into(),
        group.n,
        group.ctx.p(),
        hits,
        group.order(),
        Q::from_integer(1),
        true,
    );
    r.m = m.flatten();
    r.v = Some(v.flatten());
    r
}

fn check_same(v: &MatF, m: &MatF, group: &GroupCache) -> Result<()> {
    if v.ctx() != group.ctx || m.ctx() != group.ctx || v.n() != group.n || m.n() != group.n {
        return Err(Error::mismatch("matrices and group cache disagree on field or size"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    pub n: usize,
    pub p: u32,
    pub m: Vec<u32>,
    /// `(1/p) Σ_{λ≠0} #fibre(λM)`.
    pub direct: String,
    /// `Σ_V p^{dim C(V)} (1 - 1/p) 1[C(V) ⊆ M^⊥]`.
    pub closed_form: String,
    /// `Σ_{classes} orbit · p^{dim C(V)} (1 - 1/p) L(V,M)`, when the group
    /// enumeration fits the budget.
    pub orbit_collapsed: Option<String>,
    pub agree: bool,
    /// `Σ(M) / p^{n²+1}`.
    pub normalized: f64,
    #[serde(skip)]
    pub value: u128,
}

/// `Σ(M)` three ways; any disagreement is a consistency error.
pub fn sigma(m: &MatF, budget: Budget) -> Result<SigmaReport> {
    let classes = enumerate_classes(m.n(), m.p(), budget).ok();
    let group = GroupCache::new(m.ctx(), m.n(), budget).ok();
    sigma_with(m, classes.as_deref(), group.as_ref(), budget)
}

pub fn sigma_with(
    m: &MatF,
    classes: Option<&[ClassRecord]>,
    group: Option<&GroupCache>,
    budget: Budget,
) -> Result<SigmaReport> {
    if m.is_zero() {
        return Err(Error::contract("Σ(M) needs M ≠ 0"));
    }
    let ctx = m.ctx();
    let n = m.n();
    let p = ctx.p();

    let mut fibre_total = 0u128;
    for lambda in 1..p {
        fibre_total += fibre_count(&m.scale(lambda), budget)?.count;
    }
    if fibre_total % p as u128 != 0 {
        return Err(Error::Consistency(format!(
            "fibre total {fibre_total} not divisible by p = {p}"
        )));
    }
    let direct = fibre_total / p as u128;

    let total = space_size(ctx, n, budget, "Σ(M) closed form")?;
    let closed: u128 = (0..total)
        .into_par_iter()
        .map(|idx| {
            let basis = centralizer_basis(&MatF::from_index(ctx, n, idx));
            if centralizer_in_perp(&basis, m) {
                pow_sat(p as u64, basis.len() as u32 - 1) * (p as u128 - 1)
            } else {
                0
            }
        })
        .sum();

    let orbit = match (classes, group) {
        (Some(classes), Some(group)) => {
            let conj = group.conjugates(m);
            let mut acc = Q::from_integer(0);
            for c in classes {
                let l = lvm_with(&c.representative, m, &centralizer_basis(&c.representative), &conj, group);
                let weight = Q::from_integer(c.orbit as i128)
                    * q_pow(p, c.dim_c)
                    * (Q::from_integer(1) - Q::new(1, p as i128));
                acc += weight * l.exact;
            }
            if !acc.is_integer() {
                return Err(Error::Consistency(format!("orbit-collapsed Σ(M) = {acc} is not an integer")));
            }
            Some(*acc.numer() as u128)
        }
        _ => None,
    };

    let agree = direct == closed && orbit.is_none_or(|o| o == direct);
    if !agree {
        return Err(Error::Consistency(format!(
            "Σ(M) paths disagree: direct {direct}, closed form {closed}, orbit {orbit:?}"
        )));
    }
    Ok(SigmaReport {
        n,
        p,
        m: m.flatten(),
        direct: direct.to_string(),
        closed_form: closed.to_string(),
        orbit_collapsed: orbit.map(|o| o.to_string()),
        agree,
        normalized: direct as f64 / (p as f64).powi((n * n + 1) as i32),
        value: direct,
    })
}

/// Variants of the averages over the unipotent subgroup `1 + E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EVariant {
    /// `p11(h⁻¹Mh) = 0`
    One,
    /// `(p11, p22)(h⁻¹Mh) = 0`
    Two,
    /// `(p11, p12, p22)(h⁻¹Mh) = 0`
    Three,
}

impl EVariant {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(EVariant::One),
            2 => Ok(EVariant::Two),
            3 => Ok(EVariant::Three),
            _ => Err(Error::contract(format!("variant must be 1, 2 or 3, got {i}"))),
        }
    }

    fn blocks(self) -> &'static [Block] {
        match self {
            EVariant::One => &[Block::B11],
            EVariant::Two => &[Block::B11, Block::B22],
            EVariant::Three => &[Block::B11, Block::B12, Block::B22],
        }
    }

    /// Blocks whose simultaneous vanishing is the min-term, if any.
    fn min_blocks(self) -> Option<&'static [Block]> {
        match self {
            EVariant::One => Some(&[Block::B11, Block::B21]),
            EVariant::Two => Some(&[Block::B11, Block::B21, Block::B22]),
            EVariant::Three => None,
        }
    }

    fn decay(self, n: usize, k: usize) -> usize {
        match self {
            EVariant::One => k,
            _ => n - 1,
        }
    }
}

/// The elements `N` of `E` (only the `p12` block non-zero).
pub fn e_elements(ctx: FieldCtx, split: BlockSplit) -> Vec<MatF> {
    let (n, k) = (split.n(), split.k());
    let cells = k * (n - k);
    let count = (ctx.p() as u64).pow(cells as u32);
    (0..count)
        .map(|mut idx| {
            let mut m = MatF::zero(ctx, n, n);
            for i in 0..k {
                for j in k..n {
                    m.set(i, j, (idx % ctx.p() as u64) as u32);
                    idx /= ctx.p() as u64;
                }
            }
            m
        })
        .collect()
}

/// Average over `h ∈ 1 + E` of the variant's block indicator for `h⁻¹Mh`,
/// compared exactly with `p^{-k}` or `p^{-(n-1)}` plus the min-term.
pub fn e_average(m: &MatF, k: usize, variant: EVariant) -> Result<AverageReport> {
    if m.is_zero() {
        return Err(Error::contract("E-average needs M ≠ 0"));
    }
    let n = m.n();
    let split = BlockSplit::new(n, k)?;
    let ctx = m.ctx();
    let p = ctx.p();
    let id = MatF::identity(ctx, n);
    let mut hits = 0u128;
    let mut min_term = 1u8;
    let elems = e_elements(ctx, split);
    for nm in &elems {
        let h = id.add(nm)?;
        let h_inv = id.sub(nm)?;
        let c = h_inv.mul(m)?.mul(&h)?;
        if blocks_vanish(&c, split, variant.blocks()) {
            hits += 1;
        }
        if let Some(mb) = variant.min_blocks() {
            if !blocks_vanish(&c, split, mb) {
                min_term = 0;
            }
        }
    }
    let min_term = if variant.min_blocks().is_some() { min_term } else { 0 };
    let bound = q_inv_pow(p, variant.decay(n, k)) + Q::from_integer(min_term as i128);
    let mut r = AverageReport::build(
        format!("E-average variant {:?}", variant),
        n,
        p,
        hits,
        elems.len() as u128,
        bound,
        true,
    );
    r.k = Some(k);
    r.m = m.flatten();
    Ok(r)
}

/// A `k`-subset of indices (zero-based, increasing) with non-zero coordinate
/// sum, or `None` when `x = 0`. Requires `p >= n`.
pub fn kcomb_witness(ctx: FieldCtx, x: &[u32], k: usize) -> Result<Option<Vec<usize>>> {
    let n = x.len();
    if k == 0 || k >= n {
        return Err(Error::contract(format!("need 1 <= k <= n-1, got k={k}, n={n}")));
    }
    if (ctx.p() as usize) < n {
        return Err(Error::contract(format!("need p >= n, got p={}, n={n}", ctx.p())));
    }
    let sum = |idx: &[usize]| idx.iter().fold(0u32, |acc, &i| ctx.add(acc, x[i] % ctx.p()));
    if x.iter().all(|&v| v % ctx.p() == 0) {
        return Ok(None);
    }
    // Two unequal coordinates a, b: one of S+{a}, S+{b} works for any S.
    let first = x[0] % ctx.p();
    if let Some(b) = (1..n).find(|&i| x[i] % ctx.p() != first) {
        let a = 0;
        let rest: Vec<usize> = (0..n).filter(|&i| i != a && i != b).take(k - 1).collect();
        for extra in [a, b] {
            let mut idx = rest.clone();
            idx.push(extra);
            idx.sort_unstable();
            if sum(&idx) != 0 {
                return Ok(Some(idx));
            }
        }
    } else {
        // All coordinates equal and non-zero: k·x_1 ≠ 0 since k < p.
        let idx: Vec<usize> = (0..k).collect();
        if sum(&idx) != 0 {
            return Ok(Some(idx));
        }
    }
    // Exhaustive fallback over k-subsets.
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if sum(&idx) != 0 {
            return Ok(Some(idx));
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Err(Error::Consistency(format!("no k-subset witness for non-zero {x:?}")))
}

/// The seven indicators averaged over `GL_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuxPart {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
}

impl AuxPart {
    pub const ALL: [AuxPart; 7] = [
        AuxPart::P1,
        AuxPart::P2,
        AuxPart::P3,
        AuxPart::P4,
        AuxPart::P5,
        AuxPart::P6,
        AuxPart::P7,
    ];

    pub fn from_index(i: u8) -> Result<Self> {
        AuxPart::ALL
            .get((i as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::contract(format!("part must be in 1..=7, got {i}")))
    }

    pub fn index(self) -> u8 {
        AuxPart::ALL.iter().position(|&x| x == self).unwrap() as u8 + 1
    }

    /// Exponent `e` of the asserted decay `p^{-e}`.
    pub fn decay(self, n: usize, k: usize) -> usize {
        match self {
            AuxPart::P1 | AuxPart::P2 => k,
            AuxPart::P3 | AuxPart::P4 | AuxPart::P5 => n - 1,
            AuxPart::P6 => n - k,
            AuxPart::P7 => 1,
        }
    }

    fn indicator(self, c: &MatF, split: BlockSplit) -> bool {
        use Block::*;
        match self {
            AuxPart::P1 => blocks_vanish(c, split, &[B11, B21]),
            AuxPart::P2 => blocks_vanish(c, split, &[B11]),
            AuxPart::P3 => blocks_vanish(c, split, &[B11, B12, B22]),
            AuxPart::P4 => blocks_vanish(c, split, &[B11, B21, B22]),
            AuxPart::P5 => blocks_vanish(c, split, &[B11, B22]),
            AuxPart::P6 => blocks_vanish(c, split, &[B22]),
            AuxPart::P7 => (0..split.k()).fold(0u32, |acc, i| c.ctx().add(acc, c.get(i, i))) == 0,
        }
    }
}

/// Average over `g ∈ GL_n` of the part's indicator for `g⁻¹Mg`, with the
/// ratio to the asserted decay.
pub fn aux_average(m: &MatF, k: usize, part: AuxPart, group: &GroupCache) -> Result<AverageReport> {
    let conj = group.conjugates(m);
    aux_average_with(m, k, part, &conj, group)
}

pub fn aux_average_with(
    m: &MatF,
    k: usize,
    part: AuxPart,
    conj: &[MatF],
    group: &GroupCache,
) -> Result<AverageReport> {
    if m.is_zero() {
        return Err(Error::contract("GL-average needs M ≠ 0"));
    }
    let n = m.n();
    let split = BlockSplit::new(n, k)?;
    let hits = conj.iter().filter(|c| part.indicator(c, split)).count() as u128;
    let mut r = AverageReport::build(
        format!("GL-average part {}", part.index()),
        n,
        group.ctx.p(),
        hits,
        group.order(),
        q_inv_pow(group.ctx.p(), part.decay(n, k)),
        false,
    );
    r.k = Some(k);
    r.m = m.flatten();
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct MainLemRow {
    pub class: String,
    pub v: Vec<u32>,
    pub rad_deg: usize,
    pub m: Vec<u32>,
    pub numerator: String,
    pub denominator: String,
    /// `L(V,M) · p^{deg f_V - 1}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MainLemReport {
    pub n: usize,
    pub p: u32,
    pub rows: Vec<MainLemRow>,
    /// Class pairs with `tr(M) ≠ 0` but `L(V,M) ≠ 0`.
    pub trace_violations: u64,
    pub sup_ratio: f64,
    pub sup_at: Option<(String, Vec<u32>)>,
    /// `q = p` only; the extension-field step is not modelled.
    pub field_note: &'static str,
}

/// Traceless non-zero class representatives: a complete set of traceless
/// `M ≠ 0` up to conjugacy.
pub fn traceless_representatives(classes: &[ClassRecord]) -> Vec<MatF> {
    classes
        .iter()
        .map(|c| c.representative.clone())
        .filter(|m| m.trace() == 0 && !m.is_zero())
        .collect()
}

/// `L(V,M) · p^{deg f_V - 1}` over class representatives `V` and traceless
/// `M ≠ 0` up to conjugacy; also confirms `L(V,M) = 0` whenever `tr M ≠ 0`.
pub fn main_lem_report(n: usize, p: u32, budget: Budget) -> Result<MainLemReport> {
    let ctx = FieldCtx::new(p as u64)?;
    let classes = enumerate_classes(n, p, budget)?;
    let group = GroupCache::new(ctx, n, budget)?;
    budget.check(
        "main lemma report",
        (classes.len() as u128).pow(2) * group.order(),
    )?;
    let bases: Vec<Vec<MatF>> = classes.iter().map(|c| centralizer_basis(&c.representative)).collect();
    let mut rows = Vec::new();
    let mut trace_violations = 0u64;
    let mut sup: Option<(f64, String, Vec<u32>)> = None;
    for mc in &classes {
        let m = &mc.representative;
        if m.is_zero() {
            continue;
        }
        let conj = group.conjugates(m);
        for (vc, basis) in classes.iter().zip(&bases) {
            let l = lvm_with(&vc.representative, m, basis, &conj, &group);
            if m.trace() != 0 {
                if *l.exact.numer() != 0 {
                    trace_violations += 1;
                }
                continue;
            }
            let scaled = l.exact * q_pow(p, vc.rad_deg - 1);
            let ratio = q_f64(&scaled);
            if sup.as_ref().is_none_or(|s| ratio > s.0) {
                sup = Some((ratio, vc.cf.label(), m.flatten()));
            }
            rows.push(MainLemRow {
                class: vc.cf.label(),
                v: vc.representative.flatten(),
                rad_deg: vc.rad_deg,
                m: m.flatten(),
                numerator: l.numerator,
                denominator: l.denominator,
                ratio,
            });
        }
    }
    let (sup_ratio, sup_at) = match sup {
        Some((r, c, m)) => (r, Some((c, m))),
        None => (0.0, None),
    };
    Ok(MainLemReport {
        n,
        p,
        rows,
        trace_violations,
        sup_ratio,
        sup_at,
        field_note: "verified over F_p only",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u32) -> FieldCtx {
        FieldCtx::new(p as u64).unwrap()
    }

    /// All-pairs fibre count.
    fn brute_fibre(m: &MatF) -> u128 {
        let ctx = m.ctx();
        let n = m.n();
        let size = (ctx.p() as u64).pow((n * n) as u32);
        let mats: Vec<MatF> = (0..size).map(|i| MatF::from_index(ctx, n, i)).collect();
        let mut c = 0;
        for u in &mats {
            for v in &mats {
                if &u.mul(v).unwrap().sub(&v.mul(u).unwrap()).unwrap() == m {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn fibre_examples() {
        let b = Budget::default();
        let k2 = f(2);
        for idx in 0..16 {
            let m = MatF::from_index(k2, 2, idx);
            assert_eq!(fibre_count(&m, b).unwrap().count, brute_fibre(&m));
        }
        let k3 = f(3);
        let zero = MatF::zero(k3, 2, 2);
        let cc = crate::expsum::commuting_count(2, 3, b).unwrap().value();
        assert_eq!(fibre_count(&zero, b).unwrap().count, cc);
        assert_eq!(fibre_count(&MatF::identity(k3, 2), b).unwrap().count, 0);
        let e12 = MatF::unit(k3, 2, 0, 1);
        assert_eq!(fibre_count(&e12, b).unwrap().count, brute_fibre(&e12));
    }

    #[test]
    fn fibre_is_conjugation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let k = f(3);
        let b = Budget::default();
        for _ in 0..10 {
            let m = MatF::random(k, 2, &mut rng);
            let g = MatF::random_invertible(k, 2, &mut rng);
            let c = crate::matfp::conjugate(&g, &m).unwrap();
            assert_eq!(fibre_count(&c, b).unwrap().count, fibre_count(&m, b).unwrap().count);
        }
    }

    #[test]
    fn sigma_paths_agree_e12() {
        let k = f(3);
        let r = sigma(&MatF::unit(k, 2, 0, 1), Budget::default()).unwrap();
        assert!(r.agree);
        assert_eq!(r.orbit_collapsed.as_deref(), Some(r.direct.as_str()));
        let r = sigma(&MatF::identity(k, 2), Budget::default()).unwrap();
        assert_eq!(r.value, 0);
        assert!(sigma(&MatF::zero(k, 2, 2), Budget::default()).is_err());
    }

    #[test]
    fn lvm_examples() {
        let k = f(3);
        let g = GroupCache::new(k, 2, Budget::default()).unwrap();
        let v = MatF::diag(k, &[0, 1]);
        assert_eq!(*lvm(&v, &MatF::identity(k, 2), &g).unwrap().exact.numer(), 0);
        let e12 = MatF::unit(k, 2, 0, 1);
        assert_eq!(*lvm(&MatF::scalar(k, 2, 2), &e12, &g).unwrap().exact.numer(), 0);
        // Oracle: direct average of 1[C(gVg⁻¹) ⊆ M^⊥] forming gVg⁻¹.
        let hits = g
            .elements
            .iter()
            .filter(|e| {
                let w = e.g.mul(&v).unwrap().mul(&e.g_inv).unwrap();
                centralizer_basis(&w).iter().all(|z| z.mul(&e12).unwrap().trace() == 0)
            })
            .count();
        assert_eq!(lvm(&v, &e12, &g).unwrap().exact, Q::new(hits as i128, 48));
    }

    #[test]
    fn e_average_examples() {
        let k = f(3);
        let e21 = MatF::unit(k, 2, 1, 0);
        let r = e_average(&e21, 1, EVariant::One).unwrap();
        assert_eq!(r.exact, Q::new(1, 3));
        assert_eq!(r.holds, Some(true));

        // p21 = p11 = 0: every conjugate keeps both blocks zero.
        let e12 = MatF::unit(k, 2, 0, 1);
        let r = e_average(&e12, 1, EVariant::One).unwrap();
        assert_eq!(r.exact, Q::from_integer(1));
        assert_eq!(r.bound, (Q::new(1, 3) + Q::from_integer(1)).to_string());

        assert!(e_average(&MatF::zero(k, 2, 2), 1, EVariant::One).is_err());
        assert!(e_average(&e12, 2, EVariant::One).is_err());
    }

    #[test]
    fn e_average_variant3_bound() {
        let k = f(3);
        let m = MatF::unit(k, 3, 2, 0);
        for kk in 1..3 {
            let r = e_average(&m, kk, EVariant::Three).unwrap();
            assert!(r.exact <= Q::new(1, 9));
        }
    }

    #[test]
    fn kcomb_examples() {
        let k7 = f(7);
        assert_eq!(kcomb_witness(k7, &[1, 1, 1, 1], 3).unwrap(), Some(vec![0, 1, 2]));
        assert_eq!(kcomb_witness(k7, &[0, 0, 0], 2).unwrap(), None);
        assert_eq!(kcomb_witness(k7, &[1, 6, 0], 1).unwrap(), Some(vec![0]));
        assert!(kcomb_witness(f(2), &[1, 0, 0], 1).is_err());
        assert!(kcomb_witness(k7, &[1, 0, 0], 3).is_err());
    }

    #[test]
    fn aux_examples() {
        let k = f(3);
        let g = GroupCache::new(k, 2, Budget::default()).unwrap();
        let inv = MatF::square(k, &[1, 1, 0, 2]).unwrap();
        assert_eq!(*aux_average(&inv, 1, AuxPart::P1, &g).unwrap().exact.numer(), 0);

        let e12 = MatF::unit(k, 2, 0, 1);
        let r = aux_average(&e12, 1, AuxPart::P7, &g).unwrap();
        let hits = g
            .elements
            .iter()
            .filter(|e| e.g_inv.mul(&e12).unwrap().mul(&e.g).unwrap().get(0, 0) == 0)
            .count();
        assert_eq!(r.exact, Q::new(hits as i128, 48));
    }

    #[test]
    fn aux_part6_is_part2_after_swap() {
        let k = f(3);
        let g3 = GroupCache::new(k, 3, Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // Reversal permutation swaps the leading k and trailing n-k blocks.
        let mut w = MatF::zero(k, 3, 3);
        for i in 0..3 {
            w.set(i, 2 - i, 1);
        }
        for _ in 0..5 {
            let m = MatF::random(k, 3, &mut rng);
            if m.is_zero() {
                continue;
            }
            let swapped = crate::matfp::conjugate(&w, &m).unwrap();
            for kk in 1..3 {
                let six = aux_average(&m, kk, AuxPart::P6, &g3).unwrap().exact;
                let two = aux_average(&swapped, 3 - kk, AuxPart::P2, &g3).unwrap().exact;
                assert_eq!(six, two);
            }
        }
    }

    #[test]
    fn main_lem_small() {
        let r = main_lem_report(2, 3, Budget::default()).unwrap();
        assert_eq!(r.trace_violations, 0);
        for row in r.rows.iter().filter(|r| r.rad_deg == 1) {
            assert!(row.ratio <= 1.0);
        }
        assert!(r.sup_ratio <= 8.0);
    }
}
