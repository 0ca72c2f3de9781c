//! Conjugacy classes of `M_n(F_p)` via rational canonical forms.
//!
//! A class is determined by assigning a partition `λ_φ` to finitely many
//! monic irreducibles `φ` with `Σ deg(φ)·|λ_φ| = n`. The representative is
//! the block-diagonal matrix of companion matrices of `φ^{λ_φ,i}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{pow_sat, Budget, Error, Result};
use crate::ff::{char_poly, companion, enumerate_irreducibles, radical, FieldCtx, Poly};
use crate::matfp::{ad_rank, centralizer_basis, gl_order, MatF};

/// Partitions of `m` in decreasing lexicographic order.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    /// `(φ, λ_φ)` pairs ordered by `φ`.
    pub assignment: Vec<(Poly, Vec<usize>)>,
}

impl CanonicalForm {
    pub fn dimension(&self) -> usize {
        self.assignment
            .iter()
            .map(|(phi, lam)| phi.degree().unwrap() * lam.iter().sum::<usize>())
            .sum()
    }

    /// `deg f_V = Σ deg φ`.
    pub fn radical_degree(&self) -> usize {
        self.assignment.iter().map(|(phi, _)| phi.degree().unwrap()).sum()
    }

    /// Block-diagonal matrix of companion matrices of `φ^{λ_i}`.
    pub fn representative(&self, ctx: FieldCtx) -> MatF {
        let n = self.dimension();
        let mut m = MatF::zero(ctx, n, n);
        let mut at = 0;
        for (phi, lam) in &self.assignment {
            for &part in lam {
                let c = companion(&phi.pow(part)).expect("phi is monic of positive degree");
                let d = c.n();
                for i in 0..d {
                    for j in 0..d {
                        m.set(at + i, at + j, c.get(i, j));
                    }
                }
                at += d;
            }
        }
        m
    }

    /// `Π φ^{|λ_φ|}`.
    pub fn char_poly(&self, ctx: FieldCtx) -> Poly {
        self.assignment.iter().fold(Poly::one(ctx), |acc, (phi, lam)| {
            acc.mul(&phi.pow(lam.iter().sum()))
        })
    }

    /// `Σ_φ deg(φ) Σ_{i,j} min(λ_i, λ_j)`, the classical centralizer
    /// dimension formula. Used only as a cross-check.
    pub fn min_sum_dimension(&self) -> usize {
        self.assignment
            .iter()
            .map(|(phi, lam)| {
                let s: usize = lam
                    .iter()
                    .flat_map(|&a| lam.iter().map(move |&b| a.min(b)))
                    .sum();
                phi.degree().unwrap() * s
            })
            .sum()
    }

    /// Whether the characteristic polynomial splits into linear factors.
    pub fn splits(&self) -> bool {
        self.assignment.iter().all(|(phi, _)| phi.degree() == Some(1))
    }

    pub fn label(&self) -> String {
        self.assignment
            .iter()
            .map(|(phi, lam)| {
                let parts: Vec<String> = lam.iter().map(|x| x.to_string()).collect();
                format!("({phi})^[{}]", parts.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct ClassRecord {
    pub cf: CanonicalForm,
    pub representative: MatF,
    pub dim_c: usize,
    /// Invertible elements of the centralizer.
    pub units: u128,
    pub orbit: u128,
    pub rad_deg: usize,
}

/// Summary row for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub label: String,
    pub representative: Vec<u32>,
    pub dim_c: usize,
    pub min_sum_dim: usize,
    pub units: String,
    pub orbit: String,
    pub rad_deg: usize,
}

impl ClassRecord {
    pub fn row(&self) -> ClassRow {
        ClassRow {
            label: self.cf.label(),
            representative: self.representative.flatten(),
            dim_c: self.dim_c,
            min_sum_dim: self.cf.min_sum_dimension(),
            units: self.units.to_string(),
            orbit: self.orbit.to_string(),
            rad_deg: self.rad_deg,
        }
    }
}

fn check_class_size(n: usize, p: u32) -> Result<()> {
    let ok = match n {
        1 => true,
        2 | 3 => p <= 7,
        4 => p <= 3,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Size(format!(
            "class enumeration supports n <= 3 with p <= 7 and n = 4 with p <= 3, got n={n}, p={p}"
        )))
    }
}

/// All canonical forms of size `n`, in deterministic order.
pub fn canonical_forms(ctx: FieldCtx, n: usize) -> Result<Vec<CanonicalForm>> {
    let irr = enumerate_irreducibles(ctx, n)?;
    fn rec(
        irr: &[Poly],
        from: usize,
        rest: usize,
        cur: &mut Vec<(Poly, Vec<usize>)>,
        out: &mut Vec<CanonicalForm>,
    ) {
        if rest == 0 {
            out.push(CanonicalForm {
                assignment: cur.clone(),
            });
            return;
        }
        for i in from..irr.len() {
            let d = irr[i].degree().unwrap();
            if d > rest {
                break;
            }
            for m in 1..=rest / d {
                for lam in partitions(m) {
                    cur.push((irr[i].clone(), lam));
                    rec(irr, i + 1, rest - d * m, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(&irr, 0, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Number of invertible matrices in the centralizer of `v`, by enumerating
/// the centralizer over a kernel basis of the ad-operator.
pub fn centralizer_units_of(v: &MatF, budget: Budget) -> Result<u128> {
    let n = v.n();
    let p = v.p();
    if v.is_scalar() {
        return Ok(gl_order(n, p));
    }
    let basis = centralizer_basis(v);
    let total = pow_sat(p as u64, basis.len() as u32);
    budget.check("centralizer enumeration", total * (n * n) as u128)?;
    let ctx = v.ctx();
    let count = (0..total as u64)
        .into_par_iter()
        .filter(|&idx| {
            let mut z = vec![0u32; n * n];
            let mut rest = idx;
            for b in &basis {
                let c = (rest % p as u64) as u32;
                rest /= p as u64;
                if c == 0 {
                    continue;
                }
                for (slot, &e) in z.iter_mut().zip(b.entries()) {
                    *slot = ctx.add(*slot, ctx.mul(c, e));
                }
            }
            MatF::from_residues(ctx, n, n, z).is_invertible()
        })
        .count();
    Ok(count as u128)
}

pub fn centralizer_units(rec: &ClassRecord, budget: Budget) -> Result<u128> {
    centralizer_units_of(&rec.representative, budget)
}

fn build_record(ctx: FieldCtx, cf: CanonicalForm, irr: &[Poly], budget: Budget) -> Result<ClassRecord> {
    let rep = cf.representative(ctx);
    let n = rep.n();
    let dim_c = n * n - ad_rank(&rep);
    let units = centralizer_units_of(&rep, budget)?;
    let gl = gl_order(n, ctx.p());
    if units == 0 || gl % units != 0 {
        return Err(Error::Consistency(format!(
            "centralizer unit count {units} does not divide |GL_{n}| = {gl}"
        )));
    }
    let rad = radical(&char_poly(&rep), irr)?;
    Ok(ClassRecord {
        rad_deg: rad.degree().unwrap_or(0),
        representative: rep,
        dim_c,
        units,
        orbit: gl / units,
        cf,
    })
}

/// One record per conjugacy class of `M_n(F_p)`.
pub fn enumerate_classes(n: usize, p: u32, budget: Budget) -> Result<Vec<ClassRecord>> {
    let ctx = FieldCtx::new(p as u64)?;
    check_class_size(n, p)?;
    let irr = enumerate_irreducibles(ctx, n)?;
    let forms = canonical_forms(ctx, n)?;
    let records = forms
        .into_par_iter()
        .map(|cf| build_record(ctx, cf, &irr, budget))
        .collect::<Result<Vec<_>>>()?;
    let total: u128 = records.iter().map(|r| r.orbit).sum();
    if total != pow_sat(p as u64, (n * n) as u32) {
        return Err(Error::Consistency(format!(
            "orbit sizes sum to {total}, expected p^(n^2)"
        )));
    }
    Ok(records)
}

pub fn count_by_degree(classes: &[ClassRecord], d: usize) -> usize {
    classes.iter().filter(|c| c.rad_deg == d).count()
}

/// Number of classes whose characteristic polynomial has a radical of
/// degree `d`.
pub fn class_count_by_degree(n: usize, p: u32, d: usize, budget: Budget) -> Result<usize> {
    if d > n {
        return Ok(0);
    }
    Ok(count_by_degree(&enumerate_classes(n, p, budget)?, d))
}
