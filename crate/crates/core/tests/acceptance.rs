//! Acceptance criteria. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; the process fails if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use commutant::conjugacy::enumerate_classes;
use commutant::expsum::{commuting_count, exp_sum, lemma_exp_report, SampleMode, TripleOracle};
use commutant::flatcheck::{
    aux_average_with, e_average, fibre_count, kcomb_witness, main_lem_report, sigma_with,
    traceless_representatives, AuxPart, EVariant, GroupCache,
};
use commutant::harmonic::{exponent_general, poisson_check, Rational, WeightParams};
use commutant::matz::count_n;
use commutant::{Budget, FieldCtx, MatF};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ctx(p: u32) -> FieldCtx {
    FieldCtx::new(p as u64).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

fn c1_lower_bound() -> Outcome {
    let mut parts = Vec::new();
    for &(t, frozen) in &common::N2_COUNTS {
        let n = count_n(2, t, budget()).map_err(|e| e.to_string())?;
        let lower = (2 * t as u128 + 1).pow(5);
        ensure(n == frozen, || format!("N({t}) = {n}, oracle {frozen}"))?;
        ensure(n >= lower, || format!("N({t}) = {n} < {lower}"))?;
        parts.push(format!("N({t})={n}>={lower}"));
    }
    for t in 1..=4 {
        let oracle = common::n2_commuting_box(t);
        ensure(oracle == common::N2_COUNTS[t as usize - 1].1, || format!("oracle drift at T={t}"))?;
    }
    let n3 = count_n(3, 1, budget()).map_err(|e| e.to_string())?;
    let brute = common::brute_commuting_box(3, 1);
    ensure(n3 == brute, || format!("n=3, T=1: {n3} vs brute force {brute}"))?;
    parts.push(format!("n=3 N(1)={n3} matches brute force"));
    Ok(parts.join(", "))
}

fn c2_identity_chain() -> Outcome {
    let k2 = ctx(2);
    let oracle = TripleOracle::new(k2, 2, budget()).map_err(|e| e.to_string())?;
    let mats = common::all_matrices(k2, 2);
    let mut pairs = 0;
    for a in &mats {
        for b in &mats {
            let s = exp_sum(a, b, budget()).map_err(|e| e.to_string())?;
            let t = oracle.eval(a, b).map_err(|e| e.to_string())?;
            ensure(s == t, || format!("p=2 mismatch at A={a:?}, B={b:?}: {s:?} vs {t:?}"))?;
            pairs += 1;
        }
    }
    let k3 = ctx(3);
    let oracle = TripleOracle::new(k3, 2, budget()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let a = MatF::random(k3, 2, &mut rng);
        let b = MatF::random(k3, 2, &mut rng);
        let s = exp_sum(&a, &b, budget()).map_err(|e| e.to_string())?;
        let t = oracle.eval(&a, &b).map_err(|e| e.to_string())?;
        ensure(s == t, || format!("p=3 mismatch at A={a:?}, B={b:?}"))?;
    }
    Ok(format!("{pairs} pairs at p=2 and 200 seeded pairs at p=3 agree exactly"))
}

fn lemma_reports() -> Result<[commutant::expsum::LemmaExpReport; 2], String> {
    let r3 = lemma_exp_report(2, 3, SampleMode::Exhaustive, budget()).map_err(|e| e.to_string())?;
    let r5 = lemma_exp_report(2, 5, SampleMode::Exhaustive, budget()).map_err(|e| e.to_string())?;
    Ok([r3, r5])
}

fn c3_vanishing(reports: &[commutant::expsum::LemmaExpReport; 2]) -> Outcome {
    let mut parts = Vec::new();
    for r in reports {
        let expected = (r.p as u64).pow(8) - 1;
        ensure(r.pairs_tested == expected, || format!("p={}: tested {} of {expected}", r.p, r.pairs_tested))?;
        ensure(r.zero_violations == 0, || format!("p={}: {} vanishing violations", r.p, r.zero_violations))?;
        ensure(r.bound_violations == 0 && r.count_violations == 0, || {
            format!("p={}: {} bound, {} count violations", r.p, r.bound_violations, r.count_violations)
        })?;
        parts.push(format!("p={}: {} pairs, 0 violations", r.p, r.pairs_tested));
    }
    Ok(parts.join("; "))
}

fn c4_bounded_ratio(reports: &[commutant::expsum::LemmaExpReport; 2]) -> Outcome {
    let (a, b) = (reports[0].max_ratio, reports[1].max_ratio);
    ensure(a <= 4.0 && b <= 4.0, || format!("max |S|/p^5: {a} (p=3), {b} (p=5)"))?;
    let spread = a.max(b) / a.min(b);
    ensure(spread <= 2.0, || format!("ratios {a} and {b} differ by {spread}"))?;
    Ok(format!("max |S|/p^5 = {a:.4} (p=3), {b:.4} (p=5), spread {spread:.3}"))
}

fn spread_of(values: &[f64]) -> (f64, f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(0.0, f64::max);
    (lo, hi, hi / lo)
}

fn c5_fibre_probe() -> Outcome {
    let mut parts = Vec::new();
    for (n, primes) in [(2usize, vec![2u32, 3, 5, 7, 11, 13]), (3, vec![2, 3, 5])] {
        let mut ratios = Vec::new();
        for &p in &primes {
            let m = MatF::unit(ctx(p), n, 0, 1);
            let f = fibre_count(&m, budget()).map_err(|e| e.to_string())?;
            if n == 2 && p <= 3 || n == 3 && p == 2 {
                let brute = common::brute_fibre(&m);
                ensure(f.count == brute, || format!("n={n}, p={p}: {} vs brute force {brute}", f.count))?;
            }
            ratios.push(f.normalized);
        }
        let (lo, hi, spread) = spread_of(&ratios);
        ensure(lo > 0.0 && spread <= 8.0, || format!("n={n}: ratios {ratios:?}"))?;
        parts.push(format!("n={n}: fibre/p^{} in [{lo:.4}, {hi:.4}], C/c = {spread:.3}", n * n + 1));
    }
    Ok(parts.join("; "))
}

fn c6_sigma() -> Outcome {
    let mut parts = Vec::new();
    for p in [3u32, 5] {
        let classes = enumerate_classes(2, p, budget()).map_err(|e| e.to_string())?;
        let group = GroupCache::new(ctx(p), 2, budget()).map_err(|e| e.to_string())?;
        let reps = traceless_representatives(&classes);
        for m in &reps {
            let s = sigma_with(m, Some(&classes), Some(&group), budget()).map_err(|e| e.to_string())?;
            ensure(
                s.agree && s.orbit_collapsed.as_deref() == Some(s.direct.as_str()) && s.closed_form == s.direct,
                || format!("p={p}, M={m:?}: {s:?}"),
            )?;
        }
        parts.push(format!("p={p}: {} traceless classes agree", reps.len()));
    }
    Ok(parts.join("; "))
}

fn c7_averaging_lemmas() -> Outcome {
    let mut e_cases = 0u64;
    for n in [2usize, 3] {
        for m in common::all_matrices(ctx(3), n).iter().filter(|m| !m.is_zero()) {
            for k in 1..n {
                for v in [EVariant::One, EVariant::Two, EVariant::Three] {
                    let r = e_average(m, k, v).map_err(|e| e.to_string())?;
                    ensure(r.holds == Some(true), || format!("E-average fails: {r:?}"))?;
                    e_cases += 1;
                }
            }
        }
    }

    let mut witnesses = 0u64;
    for n in 2..=4usize {
        for p in common::primes_up_to(7).into_iter().filter(|&p| p as usize >= n) {
            let k = ctx(p);
            let total = (p as u64).pow(n as u32);
            for idx in 0..total {
                let mut rest = idx;
                let x: Vec<u32> = (0..n)
                    .map(|_| {
                        let d = (rest % p as u64) as u32;
                        rest /= p as u64;
                        d
                    })
                    .collect();
                for kk in 1..n {
                    let w = kcomb_witness(k, &x, kk).map_err(|e| e.to_string())?;
                    match w {
                        None => ensure(idx == 0, || format!("no witness for {x:?}, k={kk}, p={p}"))?,
                        Some(idx_set) => {
                            let distinct = idx_set.windows(2).all(|w| w[0] < w[1]);
                            let sum = idx_set.iter().map(|&i| x[i] as u64).sum::<u64>() % p as u64;
                            ensure(idx_set.len() == kk && distinct && sum != 0, || {
                                format!("bad witness {idx_set:?} for {x:?}, k={kk}, p={p}")
                            })?;
                            ensure(common::some_kcomb(&x, kk, p), || "oracle disagrees".into())?;
                            witnesses += 1;
                        }
                    }
                }
            }
        }
    }

    let mut worst = [0.0f64; 7];
    for p in [2u32, 3] {
        let group = GroupCache::new(ctx(p), 2, budget()).map_err(|e| e.to_string())?;
        for m in common::all_matrices(ctx(p), 2).iter().filter(|m| !m.is_zero()) {
            let conj = group.conjugates(m);
            for part in AuxPart::ALL {
                let r = aux_average_with(m, 1, part, &conj, &group).map_err(|e| e.to_string())?;
                let slot = &mut worst[part.index() as usize - 1];
                *slot = slot.max(r.ratio);
            }
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    ensure(max <= 8.0, || format!("GL-average constants {worst:?} exceed 8"))?;
    Ok(format!(
        "{e_cases} E-averages hold, {witnesses} witnesses valid, GL-average constants {:?}",
        worst.map(|w| (w * 1000.0).round() / 1000.0)
    ))
}

fn c8_main_lemma() -> Outcome {
    let mut sups = Vec::new();
    for p in [3u32, 5, 7] {
        let r = main_lem_report(2, p, budget()).map_err(|e| e.to_string())?;
        ensure(r.trace_violations == 0, || format!("p={p}: L(V,M) ≠ 0 with tr M ≠ 0 ({})", r.trace_violations))?;
        sups.push(r.sup_ratio);
    }
    let max = sups.iter().cloned().fold(0.0, f64::max);
    ensure(max <= 8.0, || format!("sup ratios {sups:?}"))?;
    Ok(format!("sup L(V,M)·p^(deg f_V - 1) = {sups:?} for p = 3, 5, 7; trace-vanishing exact"))
}

fn c9_conjugacy() -> Outcome {
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        for p in [2u32, 3, 5] {
            let classes = enumerate_classes(n, p, budget()).map_err(|e| e.to_string())?;
            let total: u128 = classes.iter().map(|c| c.orbit).sum();
            let expected = (p as u128).pow((n * n) as u32);
            ensure(total == expected, || format!("n={n}, p={p}: orbit sum {total} vs {expected}"))?;
            for c in &classes {
                ensure(c.dim_c == c.cf.min_sum_dimension(), || {
                    format!("n={n}, p={p}, class {}: dim {} vs {}", c.cf.label(), c.dim_c, c.cf.min_sum_dimension())
                })?;
            }
            parts.push(format!("n={n},p={p}:{}", classes.len()));
        }
    }
    for p in [2u32, 3] {
        let (orbit_of, sizes) = common::orbits_2x2(ctx(p));
        let classes = enumerate_classes(2, p, budget()).map_err(|e| e.to_string())?;
        ensure(classes.len() == sizes.len(), || format!("p={p}: {} classes vs {} orbits", classes.len(), sizes.len()))?;
        let mut hit = vec![false; sizes.len()];
        for c in &classes {
            let o = orbit_of[c.representative.index() as usize];
            ensure(!hit[o], || format!("p={p}: two classes share an orbit"))?;
            hit[o] = true;
            ensure(sizes[o] as u128 == c.orbit, || format!("p={p}: orbit size {} vs {}", sizes[o], c.orbit))?;
        }
    }
    Ok(format!("class counts {}; partition matches orbit oracle for p = 2, 3", parts.join(" ")))
}

fn c10_harmonic() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, t, p) in [(1usize, 2.0, 5u32), (2, 2.0, 5), (2, 3.0, 7)] {
        let params = WeightParams { n, t, p, radius: None, tolerance: 1e-6 };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let u: Vec<i64> = MatF::random(ctx(p), n, &mut rng).flatten().iter().map(|&v| v as i64).collect();
            let r = poisson_check(&u, params).map_err(|e| e.to_string())?;
            ensure(r.holds && r.rhs_imag.abs() < 1e-9, || format!("{r:?}"))?;
            worst = worst.max(r.difference);
        }
    }
    for n in 2..=10i64 {
        let r = exponent_general(2 * n * n, n * n + n, Rational::from_integer(n - 1)).map_err(|e| e.to_string())?;
        let closed = Rational::from_integer(n * n + 2) - Rational::new(2, n + 1);
        ensure(r.exponent == closed.to_string(), || format!("n={n}: {} vs {closed}", r.exponent))?;
    }
    Ok(format!("60 Poisson checks within bound (max |lhs - rhs| = {worst:.2e}); exponents exact for n = 2..10"))
}

fn c11_commuting_counts() -> Outcome {
    let mut parts = Vec::new();
    for &(n, p, frozen) in &common::COMMUTING_COUNTS {
        let c = commuting_count(n, p, budget()).map_err(|e| e.to_string())?;
        ensure(c.by_classes == frozen, || format!("n={n}, p={p}: {} vs {frozen}", c.by_classes))?;
        if n == 2 && p <= 3 {
            ensure(c.brute_force == Some(frozen), || format!("n=2, p={p}: brute force {:?}", c.brute_force))?;
        }
        let ratio = c.by_classes as f64 / (p as f64).powi((n * n + n) as i32);
        ensure(ratio <= 8.0, || format!("n={n}, p={p}: ratio {ratio}"))?;
        parts.push(format!("({n},{p}):{ratio:.3}"));
    }
    Ok(format!("class formula = brute force at (2,2), (2,3); ratios {}", parts.join(" ")))
}

fn run(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|d| {
        if elapsed <= limit {
            Ok(d)
        } else {
            Err(format!("took {elapsed:.1?}, limit {limit:?}; {d}"))
        }
    });
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {tag} [{:>7.2}s] {title}: {detail}", elapsed.as_secs_f64());
    outcome.is_ok()
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let unlimited = Duration::from_secs(u64::MAX / 4);
    let mut ok = true;
    ok &= run(1, "integer lower bound N(T) >= (2T+1)^5", min(5), c1_lower_bound);
    ok &= run(2, "exponential sum equals triple-sum oracle", min(1), c2_identity_chain);
    let mut reports = None;
    ok &= run(3, "exact vanishing of S(A,B;p)", min(30), || {
        let r = lemma_reports()?;
        let detail = c3_vanishing(&r);
        reports = Some(r);
        detail
    });
    ok &= run(4, "bounded and stable max |S|/p^5", unlimited, || {
        c4_bounded_ratio(reports.as_ref().ok_or("sweep did not complete")?)
    });
    ok &= run(5, "commutator fibre over E12 scales like p^(n²+1)", min(20), c5_fibre_probe);
    ok &= run(6, "three-way agreement of Σ(M)", unlimited, c6_sigma);
    ok &= run(7, "averaging lemmas and k-subset witnesses", unlimited, c7_averaging_lemmas);
    ok &= run(8, "L(V,M)·p^(deg f_V - 1) bounded", unlimited, c8_main_lemma);
    ok &= run(9, "conjugacy class bookkeeping", unlimited, c9_conjugacy);
    ok &= run(10, "Poisson summation and exponent formula", unlimited, c10_harmonic);
    ok &= run(11, "commuting pair counts", unlimited, c11_commuting_counts);
    if !ok {
        std::process::exit(1);
    }
}
