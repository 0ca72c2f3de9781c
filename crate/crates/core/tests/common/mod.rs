//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use commutant::{FieldCtx, MatF};

/// `#{(U,V) in M_n(F_p)² : UV = VU}` from the generating function
/// `Σ_n c_n/|GL_n| xⁿ = Π_{i≥1} Π_{j≥0} (1 - q^{1-j} xⁱ)^{-1}`, evaluated
/// exactly in rational arithmetic and frozen here as `(n, p, count)`.
pub const COMMUTING_COUNTS: [(usize, u32, u128); 8] = [
    (2, 2, 88),
    (2, 3, 945),
    (2, 5, 18_625),
    (2, 7, 134_113),
    (3, 2, 7_456),
    (3, 3, 809_433),
    (3, 5, 311_565_625),
    (3, 7, 16_370_404_561),
];

/// `N(T)` for `n = 2` and `T = 1..=4`, from the scalar form of `XY = YX`
/// (see [`n2_commuting_box`]) evaluated in a separate script.
pub const N2_COUNTS: [(i64, u128); 4] = [(1, 817), (2, 12_465), (3, 68_673), (4, 254_657)];

/// `N(T)` for `n = 2`. For `X = [[a,b],[c,d]]`, `Y = [[e,f],[g,h]]`,
/// `XY = YX` iff `bg = cf`, `(a-d)f = b(e-h)` and `(a-d)g = c(e-h)`, so only
/// `f, g` and `δ = e - h` need enumerating.
pub fn n2_commuting_box(t: i64) -> u128 {
    let mut total = 0u128;
    let r = -t..=t;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    for f in r.clone() {
                        for g in r.clone() {
                            if b * g != c * f {
                                continue;
                            }
                            for delta in -2 * t..=2 * t {
                                if (a - d) * f == b * delta && (a - d) * g == c * delta {
                                    total += (2 * t + 1 - delta.abs()) as u128;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    total
}

/// All-pairs integer count of commuting `n×n` matrices in the box.
pub fn brute_commuting_box(n: usize, t: i64) -> u128 {
    let side = (2 * t + 1) as u64;
    let size = side.pow((n * n) as u32);
    let mats: Vec<Vec<i64>> = (0..size)
        .map(|mut idx| {
            (0..n * n)
                .map(|_| {
                    let v = (idx % side) as i64 - t;
                    idx /= side;
                    v
                })
                .collect()
        })
        .collect();
    let mul = |x: &[i64], y: &[i64], i: usize, j: usize| (0..n).map(|k| x[i * n + k] * y[k * n + j]).sum::<i64>();
    let mut total = 0u128;
    for x in &mats {
        for y in &mats {
            if (0..n).all(|i| (0..n).all(|j| mul(x, y, i, j) == mul(y, x, i, j))) {
                total += 1;
            }
        }
    }
    total
}

pub fn all_matrices(ctx: FieldCtx, n: usize) -> Vec<MatF> {
    let size = (ctx.p() as u64).pow((n * n) as u32);
    (0..size).map(|i| MatF::from_index(ctx, n, i)).collect()
}

/// All-pairs count of `(U,V)` with `UV - VU = M`.
pub fn brute_fibre(m: &MatF) -> u128 {
    let mats = all_matrices(m.ctx(), m.n());
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

/// Conjugation orbits of `M_2(F_p)`, found by acting with every `g` of
/// non-zero determinant `ad - bc` and using the explicit 2×2 inverse.
/// Returns the orbit id of each matrix index and the orbit sizes.
pub fn orbits_2x2(ctx: FieldCtx) -> (Vec<usize>, Vec<u64>) {
    let p = ctx.p();
    let mats = all_matrices(ctx, 2);
    let group: Vec<(MatF, MatF)> = mats
        .iter()
        .filter_map(|g| {
            let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
            let det = ctx.sub(ctx.mul(a, d), ctx.mul(b, c));
            if det == 0 {
                return None;
            }
            let di = ctx.inv(det);
            let inv = MatF::square(
                ctx,
                &[
                    ctx.mul(d, di) as i64,
                    ctx.mul(ctx.neg(b), di) as i64,
                    ctx.mul(ctx.neg(c), di) as i64,
                    ctx.mul(a, di) as i64,
                ],
            )
            .unwrap();
            Some((g.clone(), inv))
        })
        .collect();
    assert_eq!(group.len() as u64, (p as u64 * p as u64 - 1) * (p as u64 * p as u64 - p as u64));
    let mut orbit = vec![usize::MAX; mats.len()];
    let mut sizes = Vec::new();
    for (i, m) in mats.iter().enumerate() {
        if orbit[i] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut seen: HashMap<u64, ()> = HashMap::new();
        for (g, gi) in &group {
            let c = gi.mul(m).unwrap().mul(g).unwrap();
            seen.insert(c.index(), ());
        }
        for &k in seen.keys() {
            orbit[k as usize] = id;
        }
        sizes.push(seen.len() as u64);
    }
    (orbit, sizes)
}

/// Whether some `k`-subset of `x` has non-zero sum modulo `p`.
pub fn some_kcomb(x: &[u32], k: usize, p: u32) -> bool {
    let n = x.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .any(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| x[i] as u64).sum::<u64>() % p as u64 != 0)
}

pub fn primes_up_to(n: u32) -> Vec<u32> {
    (2..=n).filter(|&q| (2..q).all(|d| q % d != 0)).collect()
}
