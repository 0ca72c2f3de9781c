//! Dense linear algebra over a prime field.
//!
//! Matrices are stored row-major with canonical residues in `[0, p)`. The
//! flattening of an `n x n` matrix `U` is the row-major vector with
//! `vec(U)[i*n + j] = U[i][j]`; every n²-dimensional object in the crate
//! (ad-operators, centralizer bases, kernels) uses this convention.

use std::fmt;

use rand::Rng;

use crate::error::{pow_sat, Budget, Error, Result};
use crate::ff::FieldCtx;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for MatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatF<{}>[", self.ctx.p())?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// Which of the four blocks of a `k | n-k` split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    B11,
    B12,
    B21,
    B22,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::B11, Block::B12, Block::B21, Block::B22];
}

/// Split of an `n x n` matrix into blocks of sizes `k` and `n - k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSplit {
    n: usize,
    k: usize,
}

impl BlockSplit {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::contract(format!(
                "block split needs 1 <= k <= n-1, got k={k}, n={n}"
            )));
        }
        Ok(BlockSplit { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row and column ranges of a block.
    pub fn ranges(&self, which: Block) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let (lo, hi) = (0..self.k, self.k..self.n);
        match which {
            Block::B11 => (lo.clone(), lo),
            Block::B12 => (lo, hi),
            Block::B21 => (hi, lo),
            Block::B22 => (hi.clone(), hi),
        }
    }
}

/// Solution set of a linear system `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    /// `particular` solves the system with every free variable set to zero;
    /// `kernel` has one vector per free variable, carrying a 1 in that
    /// variable and 0 in the other free variables.
    Solved {
        particular: Vec<u32>,
        kernel: Vec<Vec<u32>>,
    },
    Inconsistent,
}

/// Reduced row echelon form of a matrix, with the pivot column of each
/// non-zero row.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: MatF,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl MatF {
    /// Builds a rectangular matrix from signed integers, reducing mod p.
    pub fn from_i64(ctx: FieldCtx, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::mismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(MatF {
            ctx,
            rows,
            cols,
            data: entries.iter().map(|&x| ctx.reduce_i64(x)).collect(),
        })
    }

    /// Square matrix from row-major signed entries; `entries.len()` must be a
    /// perfect square.
    pub fn square(ctx: FieldCtx, entries: &[i64]) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() || n == 0 {
            return Err(Error::mismatch(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Self::from_i64(ctx, n, n, entries)
    }

    pub(crate) fn from_residues(ctx: FieldCtx, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| x < ctx.p()));
        MatF {
            ctx,
            rows,
            cols,
            data,
        }
    }

    pub fn zero(ctx: FieldCtx, rows: usize, cols: usize) -> Self {
        MatF {
            ctx,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Self {
        Self::scalar(ctx, n, 1)
    }

    pub fn scalar(ctx: FieldCtx, n: usize, c: u32) -> Self {
        let mut m = Self::zero(ctx, n, n);
        let c = c % ctx.p();
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    /// The matrix unit `E_ij` (zero-based indices).
    pub fn unit(ctx: FieldCtx, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(ctx, n, n);
        m.data[i * n + j] = 1;
        m
    }

    pub fn diag(ctx: FieldCtx, d: &[i64]) -> Self {
        let n = d.len();
        let mut m = Self::zero(ctx, n, n);
        for (i, &x) in d.iter().enumerate() {
            m.data[i * n + i] = ctx.reduce_i64(x);
        }
        m
    }

    /// The `idx`-th `n x n` matrix in the base-p enumeration of
    /// `M_n(F_p)`, first entry least significant.
    pub fn from_index(ctx: FieldCtx, n: usize, mut idx: u64) -> Self {
        let p = ctx.p() as u64;
        let mut data = vec![0u32; n * n];
        for slot in data.iter_mut() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
        MatF {
            ctx,
            rows: n,
            cols: n,
            data,
        }
    }

    /// Inverse of [`MatF::from_index`].
    pub fn index(&self) -> u64 {
        let p = self.ctx.p() as u64;
        self.data.iter().rev().fold(0u64, |acc, &x| acc * p + x as u64)
    }

    pub fn random<R: Rng + ?Sized>(ctx: FieldCtx, n: usize, rng: &mut R) -> Self {
        let data = (0..n * n).map(|_| rng.gen_range(0..ctx.p())).collect();
        MatF {
            ctx,
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn random_invertible<R: Rng + ?Sized>(ctx: FieldCtx, n: usize, rng: &mut R) -> Self {
        loop {
            let g = Self::random(ctx, n, rng);
            if g.is_invertible() {
                return g;
            }
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dimension of a square matrix.
    pub fn n(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.ctx.p();
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    /// Row-major flattening of the matrix as a vector.
    pub fn flatten(&self) -> Vec<u32> {
        self.data.clone()
    }

    pub fn unflatten(ctx: FieldCtx, n: usize, v: &[u32]) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::mismatch(format!(
                "vector of length {} is not an {n}x{n} matrix",
                v.len()
            )));
        }
        Ok(MatF::from_residues(ctx, n, n, v.iter().map(|&x| x % ctx.p()).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Whether the matrix is `c * I` for some `c`.
    pub fn is_scalar(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let c = self.get(0, 0);
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == if i == j { c } else { 0 }))
    }

    fn same_shape(&self, other: &MatF, op: &str) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::mismatch(format!(
                "{op}: moduli {} and {} differ",
                self.p(),
                other.p()
            )));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::mismatch(format!(
                "{op}: shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatF) -> Result<MatF> {
        self.same_shape(other, "add")?;
        let f = self.ctx;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(MatF::from_residues(f, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &MatF) -> Result<MatF> {
        self.same_shape(other, "sub")?;
        let f = self.ctx;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(MatF::from_residues(f, self.rows, self.cols, data))
    }

    pub fn scale(&self, c: u32) -> MatF {
        let f = self.ctx;
        let data = self.data.iter().map(|&a| f.mul(a, c % f.p())).collect();
        MatF::from_residues(f, self.rows, self.cols, data)
    }

    pub fn neg(&self) -> MatF {
        let f = self.ctx;
        MatF::from_residues(f, self.rows, self.cols, self.data.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn mul(&self, other: &MatF) -> Result<MatF> {
        if self.ctx != other.ctx || self.cols != other.rows {
            return Err(Error::mismatch(format!(
                "mul: {}x{} (mod {}) times {}x{} (mod {})",
                self.rows,
                self.cols,
                self.p(),
                other.rows,
                other.cols,
                other.p()
            )));
        }
        let p = self.p() as u64;
        let mut data = vec![0u32; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * other.get(k, j) as u64;
                    if acc >= 1 << 62 {
                        acc %= p;
                    }
                }
                data[i * other.cols + j] = (acc % p) as u32;
            }
        }
        Ok(MatF::from_residues(self.ctx, self.rows, other.cols, data))
    }

    pub fn transpose(&self) -> MatF {
        let mut data = vec![0u32; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        MatF::from_residues(self.ctx, self.cols, self.rows, data)
    }

    pub fn trace(&self) -> u32 {
        let f = self.ctx;
        (0..self.rows.min(self.cols)).fold(0, |acc, i| f.add(acc, self.get(i, i)))
    }

    /// The trace pairing `tr(XY)`, computed without forming `XY`.
    pub fn trace_pairing(&self, other: &MatF) -> u32 {
        debug_assert!(self.rows == other.cols && self.cols == other.rows);
        let p = self.p() as u64;
        let mut acc = 0u64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) as u64 * other.get(j, i) as u64;
            }
            acc %= p;
        }
        acc as u32
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m.data, m.rows, m.cols, self.ctx);
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rref_in_place(&mut buf, self.rows, self.cols, self.ctx).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<MatF> {
        if !self.is_square() {
            return Err(Error::mismatch("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let w = 2 * n;
        let mut buf = vec![0u32; n * w];
        for i in 0..n {
            for j in 0..n {
                buf[i * w + j] = self.get(i, j);
            }
            buf[i * w + n + i] = 1;
        }
        let pivots = rref_in_place(&mut buf, n, w, self.ctx);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut data = vec![0u32; n * n];
        for i in 0..n {
            data[i * n..(i + 1) * n].copy_from_slice(&buf[i * w + n..(i + 1) * w]);
        }
        Ok(MatF::from_residues(self.ctx, n, n, data))
    }

    /// Basis of the right null space `{x : A x = 0}` in reduced echelon
    /// coordinates.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let ech = self.echelon();
        kernel_from_echelon(&ech.reduced, &ech.pivots)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.cols);
        let p = self.p() as u64;
        (0..self.rows)
            .map(|i| {
                let acc = (0..self.cols).fold(0u64, |acc, j| {
                    (acc + self.get(i, j) as u64 * v[j] as u64) % p
                });
                acc as u32
            })
            .collect()
    }

    pub fn commutator(&self, other: &MatF) -> Result<MatF> {
        commutator(self, other)
    }

    pub fn block(&self, split: BlockSplit, which: Block) -> Result<MatF> {
        block(self, split, which)
    }
}

/// Gauss-Jordan elimination on a row-major buffer; returns pivot columns.
fn rref_in_place(buf: &mut [u32], rows: usize, cols: usize, f: FieldCtx) -> Vec<usize> {
    let p = f.p() as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| buf[i * cols + c] != 0) else {
            continue;
        };
        if sel != r {
            for j in 0..cols {
                buf.swap(sel * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(buf[r * cols + c]) as u64;
        for j in c..cols {
            buf[r * cols + j] = ((buf[r * cols + j] as u64 * inv) % p) as u32;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = buf[i * cols + c] as u64;
            if factor == 0 {
                continue;
            }
            let neg = p - factor;
            for j in c..cols {
                let x = buf[i * cols + j] as u64 + neg * buf[r * cols + j] as u64;
                buf[i * cols + j] = (x % p) as u32;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn kernel_from_echelon(reduced: &MatF, pivots: &[usize]) -> Vec<Vec<u32>> {
    let f = reduced.ctx;
    let cols = reduced.cols;
    let mut is_pivot = vec![false; cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(reduced.get(r, free));
            }
            v
        })
        .collect()
}

/// `XY - YX`.
pub fn commutator(x: &MatF, y: &MatF) -> Result<MatF> {
    if !x.is_square() {
        return Err(Error::mismatch("commutator of non-square matrices"));
    }
    x.same_shape(y, "commutator")?;
    x.mul(y)?.sub(&y.mul(x)?)
}

/// Matrix of the linear map `U -> UV - VU` on row-major flattened `U`.
pub fn ad_matrix(v: &MatF) -> MatF {
    let n = v.n();
    let nn = n * n;
    let f = v.ctx;
    let mut a = MatF::zero(f, nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // (UV)_ij picks up U_ik V_kj.
                let c = row * nn + i * n + k;
                a.data[c] = f.add(a.data[c], v.get(k, j));
                // (VU)_ij picks up V_ik U_kj.
                let c = row * nn + k * n + j;
                a.data[c] = f.sub(a.data[c], v.get(i, k));
            }
        }
    }
    a
}

/// Exact solution set of `A x = b`.
pub fn solve_linear(a: &MatF, b: &[u32]) -> Result<LinearSolution> {
    if b.len() != a.rows {
        return Err(Error::mismatch(format!(
            "right-hand side has length {}, system has {} rows",
            b.len(),
            a.rows
        )));
    }
    let f = a.ctx;
    let w = a.cols + 1;
    let mut buf = vec![0u32; a.rows * w];
    for i in 0..a.rows {
        buf[i * w..i * w + a.cols].copy_from_slice(&a.data[i * a.cols..(i + 1) * a.cols]);
        buf[i * w + a.cols] = b[i] % f.p();
    }
    let pivots = rref_in_place(&mut buf, a.rows, w, f);
    if pivots.last() == Some(&a.cols) {
        return Ok(LinearSolution::Inconsistent);
    }
    let aug = MatF::from_residues(f, a.rows, w, buf);
    let mut particular = vec![0u32; a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug.get(r, a.cols);
    }
    // Drop the augmented column before reading off the kernel.
    let mut coeff = MatF::zero(f, a.rows, a.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            coeff.data[i * a.cols + j] = aug.get(i, j);
        }
    }
    Ok(LinearSolution::Solved {
        particular,
        kernel: kernel_from_echelon(&coeff, &pivots),
    })
}

/// `g^{-1} M g`.
pub fn conjugate(g: &MatF, m: &MatF) -> Result<MatF> {
    let g_inv = g.inverse()?;
    g_inv.mul(m)?.mul(g)
}

/// Extracts one block `p_ij(M)` of a split square matrix.
pub fn block(m: &MatF, split: BlockSplit, which: Block) -> Result<MatF> {
    if !m.is_square() || m.rows != split.n {
        return Err(Error::mismatch(format!(
            "block split for n={} applied to a {}x{} matrix",
            split.n, m.rows, m.cols
        )));
    }
    let (rr, cr) = split.ranges(which);
    let mut data = Vec::with_capacity(rr.len() * cr.len());
    for i in rr.clone() {
        for j in cr.clone() {
            data.push(m.get(i, j));
        }
    }
    Ok(MatF::from_residues(m.ctx, rr.len(), cr.len(), data))
}

/// Whether the listed blocks of `m` all vanish.
pub fn blocks_vanish(m: &MatF, split: BlockSplit, which: &[Block]) -> bool {
    which.iter().all(|&b| {
        let (rr, cr) = split.ranges(b);
        rr.clone().all(|i| cr.clone().all(|j| m.get(i, j) == 0))
    })
}

/// Reassembles a square matrix from its four blocks.
pub fn assemble_blocks(split: BlockSplit, blocks: [&MatF; 4]) -> Result<MatF> {
    let ctx = blocks[0].ctx;
    let mut m = MatF::zero(ctx, split.n, split.n);
    for (which, b) in Block::ALL.iter().zip(blocks) {
        let (rr, cr) = split.ranges(*which);
        if b.rows != rr.len() || b.cols != cr.len() || b.ctx != ctx {
            return Err(Error::mismatch(format!("block {which:?} has the wrong shape")));
        }
        for (bi, i) in rr.enumerate() {
            for (bj, j) in cr.clone().enumerate() {
                m.data[i * split.n + j] = b.get(bi, bj);
            }
        }
    }
    Ok(m)
}

/// Basis of the centralizer `C(V) = {Z : VZ = ZV}`, as matrices.
pub fn centralizer_basis(v: &MatF) -> Vec<MatF> {
    let n = v.n();
    ad_matrix(v)
        .kernel()
        .into_iter()
        .map(|z| MatF::from_residues(v.ctx, n, n, z))
        .collect()
}

/// Rank of the ad-operator of `v`; `n² - rank` is `dim C(V)`.
pub fn ad_rank(v: &MatF) -> usize {
    ad_matrix(v).rank()
}

/// Whether `M` lies in the image of `U -> UV - VU`, together with the rank of
/// that map.
pub fn ad_image_contains(v: &MatF, m: &MatF) -> (bool, usize) {
    let a = ad_matrix(v);
    let nn = a.rows;
    let f = v.ctx;
    let w = nn + 1;
    let mut buf = vec![0u32; nn * w];
    for i in 0..nn {
        buf[i * w..i * w + nn].copy_from_slice(&a.data[i * nn..(i + 1) * nn]);
        buf[i * w + nn] = m.data[i];
    }
    let pivots = rref_in_place(&mut buf, nn, w, f);
    match pivots.last() {
        Some(&c) if c == nn => (false, pivots.len() - 1),
        _ => (true, pivots.len()),
    }
}

/// Element of `GL_n(F_p)` stored with its inverse.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub g: MatF,
    pub g_inv: MatF,
}

impl GroupElement {
    /// `g^{-1} M g`.
    pub fn conjugate(&self, m: &MatF) -> MatF {
        self.g_inv.mul(m).and_then(|x| x.mul(&self.g)).expect("shapes checked")
    }
}

/// `|GL_n(F_p)| = prod_{i<n} (p^n - p^i)`.
pub fn gl_order(n: usize, p: u32) -> u128 {
    let pn = pow_sat(p as u64, n as u32);
    (0..n as u32).map(|i| pn - pow_sat(p as u64, i)).product()
}

/// Every element of `GL_n(F_p)`, in the order of [`MatF::from_index`].
pub fn general_linear(ctx: FieldCtx, n: usize, budget: Budget) -> Result<Vec<GroupElement>> {
    let total = pow_sat(ctx.p() as u64, (n * n) as u32);
    budget.check("GL_n enumeration", total)?;
    let out = (0..total as u64)
        .filter_map(|idx| {
            let g = MatF::from_index(ctx, n, idx);
            g.inverse().ok().map(|g_inv| GroupElement { g, g_inv })
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(out.len() as u128, gl_order(n, ctx.p()));
    Ok(out)
}

/// Number of matrices in `M_n(F_p)`, with a budget check.
pub fn space_size(ctx: FieldCtx, n: usize, budget: Budget, what: &str) -> Result<u64> {
    let total = pow_sat(ctx.p() as u64, (n * n) as u32);
    budget.check(what, total)?;
    Ok(total as u64)
}
