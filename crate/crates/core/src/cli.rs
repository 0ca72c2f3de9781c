//! Command-line front end. Every subcommand builds a [`Report`], which is
//! written as JSON or CSV; the exit code follows the report status.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::conjugacy::enumerate_classes;
use crate::error::{pow_sat, Budget, Error, Result};
use crate::expsum::{exp_sum, lemma_exp_report, SampleMode};
use crate::ff::FieldCtx;
use crate::flatcheck::{
    aux_average_with, e_average, fibre_count, kcomb_witness, lvm, main_lem_report, sigma, AuxPart,
    EVariant, GroupCache,
};
use crate::harmonic::{exponent_general, optimize_p, parse_half_integer, poisson_check, WeightParams};
use crate::matfp::MatF;
use crate::matz::{congruence_count, scaling_report};
use crate::report::{Check, Report};

#[derive(Debug, Parser)]
#[command(name = "commutant", version, about = "Exact counts and checks for commuting matrices")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "COMMUTANT_THREADS")]
    pub threads: Option<usize>,

    /// Step limit for exhaustive enumerations.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_STEPS)]
    pub budget: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// N(T) for one or more box sizes, with the scaling columns.
    CountInteger(CountIntegerArgs),
    /// Box pairs commuting modulo p.
    Congruence(CongruenceArgs),
    /// A single exponential sum S(A,B;p).
    Expsum(ExpsumArgs),
    /// Vanishing and size of S(A,B;p) over all or sampled pairs.
    LemmaExp(SampledArgs),
    /// Conjugacy classes with centralizer data.
    Classes(NpArgs),
    /// Size of the commutator fibre over M.
    Fibre(MatrixArgs),
    /// Σ(M) by three independent routes.
    Sigma(MatrixArgs),
    /// L(V,M), the probability that C(gVg⁻¹) lies in M^⊥.
    Lvm(LvmArgs),
    /// Averages over the unipotent subgroup 1 + E.
    EAvg(EAvgArgs),
    /// Block-vanishing averages over GL_n.
    AuxAvg(AuxAvgArgs),
    /// sup of L(V,M)·p^{deg f_V - 1} over classes.
    MainLem(NpArgs),
    /// A k-subset of coordinates with non-zero sum.
    Kcomb(KcombArgs),
    /// Truncated Poisson summation check for the weight w.
    Poisson(PoissonArgs),
    /// D - L + L²/(N - D + L) as an exact fraction.
    Exponent(ExponentArgs),
    /// Auxiliary prime balancing the two bound terms.
    OptimizeP(OptimizeArgs),
    /// Histogram of log_p |S(A,B;p)| in half-integer bins.
    StrataProbe(SampledArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CountIntegerArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated box sizes.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    #[serde(rename = "T")]
    pub t: Vec<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CongruenceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    #[serde(rename = "T")]
    pub t: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long = "A", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[arg(long = "B", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "B")]
    pub b: Vec<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampledArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Required in sample mode.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct NpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    /// Matrix size; inferred from `--M` when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: u32,
    /// Row-major entries, or a single value c for the scalar matrix c·I.
    #[arg(long = "M", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "M")]
    pub m: Vec<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct LvmArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: u32,
    #[arg(long = "V", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "V")]
    pub v: Vec<i64>,
    #[arg(long = "M", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "M")]
    pub m: Vec<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EAvgArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: u32,
    #[arg(long = "M", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "M")]
    pub m: Vec<i64>,
    /// Block split; all of 1..n-1 when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// 1, 2 or 3; all when omitted.
    #[arg(long)]
    pub variant: Option<u8>,
}

#[derive(Debug, Args, Serialize)]
pub struct AuxAvgArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: u32,
    #[arg(long = "M", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "M")]
    pub m: Vec<i64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// 1 to 7; all when omitted.
    #[arg(long)]
    pub part: Option<u8>,
    /// Empirical constant the ratio is compared with.
    #[arg(long, default_value_t = 8.0)]
    pub constant: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct KcombArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<i64>,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PoissonArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: f64,
    #[arg(long)]
    pub p: u32,
    /// Residue matrix; when omitted, `--samples` matrices are drawn from `--seed`.
    #[arg(long = "U", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "U")]
    pub u: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub samples: u64,
    /// Truncation radius; chosen automatically when omitted.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<u64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: i64,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub d: i64,
    /// Integer or half-integer, e.g. `1`, `3/2` or `1.5`.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    #[serde(rename = "T")]
    pub t: Vec<f64>,
}

fn matrix(ctx: FieldCtx, n: Option<usize>, entries: &[i64], name: &str) -> Result<MatF> {
    let len = entries.len();
    match (n, len) {
        (_, 0) => Err(Error::contract(format!("--{name} is empty"))),
        (Some(n), 1) if n > 1 => Ok(MatF::scalar(ctx, n, ctx.reduce_i64(entries[0]))),
        _ => {
            let side = (len as f64).sqrt().round() as usize;
            if side * side != len {
                return Err(Error::mismatch(format!("--{name} has {len} entries, not a square")));
            }
            if let Some(n) = n {
                if n != side {
                    return Err(Error::mismatch(format!("--{name} is {side}x{side} but n = {n}")));
                }
            }
            MatF::square(ctx, entries)
        }
    }
}

fn sample_mode(a: &SampledArgs) -> Result<SampleMode> {
    match a.mode {
        Mode::Exhaustive => Ok(SampleMode::Exhaustive),
        Mode::Sample => {
            let seed = a.seed.ok_or_else(|| Error::contract("sample mode requires --seed"))?;
            Ok(SampleMode::Sample { seed, count: a.samples })
        }
    }
}

fn config<T: Serialize>(args: &T, budget: Budget) -> serde_json::Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    v["budget"] = json!(budget.max_steps);
    v
}

fn execute(command: &Command, budget: Budget) -> Report {
    let (name, cfg, columns): (&str, serde_json::Value, &[&str]) = match command {
        Command::CountInteger(a) => (
            "count-integer",
            config(a, budget),
            &["n", "T", "count", "lower_bound", "lower_bound_holds", "upper_reference", "slope"],
        ),
        Command::Congruence(a) => (
            "congruence",
            config(a, budget),
            &["n", "T", "p", "count", "box_pairs", "lower_bound", "normalized"],
        ),
        Command::Expsum(a) => (
            "expsum",
            config(a, budget),
            &["n", "p", "A", "B", "counts", "is_zero", "integer_value", "magnitude"],
        ),
        Command::LemmaExp(a) => (
            "lemma-exp",
            config(a, budget),
            &["a", "b", "counts", "magnitude", "p_divides_tr_a", "p_divides_tr_b", "ratio"],
        ),
        Command::Classes(a) => (
            "classes",
            config(a, budget),
            &["label", "representative", "dim_c", "min_sum_dim", "units", "orbit", "rad_deg"],
        ),
        Command::Fibre(a) => ("fibre", config(a, budget), &["n", "p", "m", "count", "normalized"]),
        Command::Sigma(a) => (
            "sigma",
            config(a, budget),
            &["n", "p", "m", "direct", "closed_form", "orbit_collapsed", "agree", "normalized"],
        ),
        Command::Lvm(a) => (
            "lvm",
            config(a, budget),
            &["n", "p", "v", "m", "numerator", "denominator", "average"],
        ),
        Command::EAvg(a) => (
            "e-avg",
            config(a, budget),
            &["lemma", "n", "p", "k", "m", "numerator", "denominator", "average", "bound", "holds", "ratio"],
        ),
        Command::AuxAvg(a) => (
            "aux-avg",
            config(a, budget),
            &["lemma", "n", "p", "k", "m", "numerator", "denominator", "average", "bound", "ratio"],
        ),
        Command::MainLem(a) => (
            "main-lem",
            config(a, budget),
            &["class", "v", "rad_deg", "m", "numerator", "denominator", "ratio"],
        ),
        Command::Kcomb(a) => ("kcomb", config(a, budget), &["p", "x", "k", "witness", "sum"]),
        Command::Poisson(a) => (
            "poisson",
            config(a, budget),
            &["n", "t", "p", "radius", "u", "lhs", "rhs", "rhs_imag", "tail_bound", "difference", "holds"],
        ),
        Command::Exponent(a) => (
            "exponent",
            config(a, budget),
            &["N", "D", "L", "exponent", "exponent_value", "dimension_growth", "improves_dimension_growth"],
        ),
        Command::OptimizeP(a) => (
            "optimize-p",
            config(a, budget),
            &["n", "t", "exponent", "target", "p", "term_major", "term_error", "total"],
        ),
        Command::StrataProbe(a) => ("strata-probe", config(a, budget), &["bin", "pairs", "fraction"]),
    };
    let mut report = Report::new(name, cfg, columns);
    if let Err(e) = fill(command, budget, &mut report) {
        report.fail(&e);
    }
    report
}

fn fill(command: &Command, budget: Budget, r: &mut Report) -> Result<()> {
    match command {
        Command::CountInteger(a) => {
            let s = scaling_report(a.n, &a.t, budget)?;
            for row in &s.rows {
                let mut v = serde_json::to_value(row).unwrap();
                v["n"] = json!(a.n);
                v["T"] = json!(row.t);
                r.rows.push(v);
                r.check(Check::exact(
                    format!("N({}) >= (2T+1)^{}", row.t, s.lower_exponent),
                    row.lower_bound_holds,
                    format!("{} vs {}", row.count, row.lower_bound),
                ));
            }
        }
        Command::Congruence(a) => {
            for &p in &a.p {
                for &t in &a.t {
                    let count = congruence_count(a.n, t, p, budget)?;
                    let side = (2 * t + 1) as u64;
                    let nn = (a.n * a.n) as u32;
                    let box_pairs = pow_sat(side, 2 * nn);
                    let lower = pow_sat(side, nn + 1);
                    r.rows.push(json!({
                        "n": a.n, "T": t, "p": p,
                        "count": count.to_string(),
                        "box_pairs": box_pairs.to_string(),
                        "lower_bound": lower.to_string(),
                        "normalized": count as f64 / box_pairs as f64,
                    }));
                    r.check(Check::exact(
                        format!("count(T={t}, p={p}) >= (2T+1)^(n²+1)"),
                        count >= lower,
                        format!("{count} vs {lower}"),
                    ));
                }
            }
        }
        Command::Expsum(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let am = matrix(ctx, None, &a.a, "A")?;
            let bm = matrix(ctx, None, &a.b, "B")?;
            if am.n() != bm.n() {
                return Err(Error::mismatch("A and B differ in size"));
            }
            let s = exp_sum(&am, &bm, budget)?;
            r.rows.push(json!({
                "n": am.n(), "p": a.p,
                "A": am.flatten(), "B": bm.flatten(),
                "counts": s.normalized(),
                "is_zero": s.is_zero(),
                "integer_value": s.as_integer(),
                "magnitude": s.magnitude(),
            }));
            if am.trace() != 0 || bm.trace() != 0 {
                r.check(Check::exact("S = 0 when p does not divide tr A or tr B", s.is_zero(), ""));
            }
        }
        Command::LemmaExp(a) => {
            let rep = lemma_exp_report(a.n, a.p, sample_mode(a)?, budget)?;
            for row in &rep.rows {
                r.push_row(row);
            }
            r.check(Check::exact(
                "S = 0 when p does not divide tr A or tr B",
                rep.zero_violations == 0,
                format!("{} violations in {} pairs", rep.zero_violations, rep.pairs_tested),
            ));
            r.check(Check::exact(
                "|S(A,B)| <= S(A,0)",
                rep.bound_violations == 0,
                format!("{} violations", rep.bound_violations),
            ));
            r.check(Check::exact(
                "S(A,0) is a non-negative integer",
                rep.count_violations == 0,
                format!("{} violations", rep.count_violations),
            ));
            r.check(Check::empirical(
                "max |S|/p^(n²+1) <= 4",
                rep.max_ratio <= 4.0,
                format!("max ratio {} at A={:?}, B={:?}", rep.max_ratio, rep.argmax.0, rep.argmax.1),
            ));
        }
        Command::Classes(a) => {
            let classes = enumerate_classes(a.n, a.p, budget)?;
            let mut total = 0u128;
            let mut dims_agree = true;
            for c in &classes {
                let row = c.row();
                dims_agree &= row.dim_c == row.min_sum_dim;
                total += c.orbit;
                r.push_row(&row);
            }
            let expected = pow_sat(a.p as u64, (a.n * a.n) as u32);
            r.check(Check::exact("Σ orbit = p^(n²)", total == expected, format!("{total} vs {expected}")));
            r.check(Check::exact("dim C(V) matches the partition formula", dims_agree, ""));
        }
        Command::Fibre(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let m = matrix(ctx, a.n, &a.m, "M")?;
            let f = fibre_count(&m, budget)?;
            if m.trace() != 0 {
                r.check(Check::exact("empty fibre when tr M ≠ 0", f.count == 0, f.count.to_string()));
            } else {
                r.check(Check::exact("non-empty fibre when tr M = 0", f.count > 0, f.count.to_string()));
            }
            let mut v = serde_json::to_value(&f).unwrap();
            v["count"] = json!(f.count.to_string());
            r.rows.push(v);
        }
        Command::Sigma(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let m = matrix(ctx, a.n, &a.m, "M")?;
            let s = sigma(&m, budget)?;
            r.check(Check::exact("three computations of Σ(M) agree", s.agree, ""));
            r.push_row(&s);
        }
        Command::Lvm(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let v = matrix(ctx, a.n, &a.v, "V")?;
            let m = matrix(ctx, Some(v.n()), &a.m, "M")?;
            let group = GroupCache::new(ctx, v.n(), budget)?;
            let l = lvm(&v, &m, &group)?;
            if m.trace() != 0 {
                r.check(Check::exact("L(V,M) = 0 when tr M ≠ 0", l.numerator == "0", l.numerator.clone()));
            }
            r.push_row(&l);
        }
        Command::EAvg(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let m = matrix(ctx, a.n, &a.m, "M")?;
            let ks: Vec<usize> = a.k.map_or_else(|| (1..m.n()).collect(), |k| vec![k]);
            let variants: Vec<u8> = a.variant.map_or_else(|| vec![1, 2, 3], |v| vec![v]);
            for &k in &ks {
                for &var in &variants {
                    let e = e_average(&m, k, EVariant::from_index(var)?)?;
                    r.check(Check::exact(
                        format!("variant {var}, k={k}: average <= bound"),
                        e.holds == Some(true),
                        format!("{}/{} vs {}", e.numerator, e.denominator, e.bound),
                    ));
                    r.push_row(&e);
                }
            }
        }
        Command::AuxAvg(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let m = matrix(ctx, a.n, &a.m, "M")?;
            let group = GroupCache::new(ctx, m.n(), budget)?;
            let conj = group.conjugates(&m);
            let ks: Vec<usize> = a.k.map_or_else(|| (1..m.n()).collect(), |k| vec![k]);
            let parts: Vec<AuxPart> = match a.part {
                Some(i) => vec![AuxPart::from_index(i)?],
                None => AuxPart::ALL.to_vec(),
            };
            for &k in &ks {
                for &part in &parts {
                    let e = aux_average_with(&m, k, part, &conj, &group)?;
                    r.check(Check::empirical(
                        format!("part {}, k={k}: average·p^e <= {}", part.index(), a.constant),
                        e.ratio <= a.constant,
                        format!("ratio {}", e.ratio),
                    ));
                    r.push_row(&e);
                }
            }
        }
        Command::MainLem(a) => {
            let rep = main_lem_report(a.n, a.p, budget)?;
            for row in &rep.rows {
                r.push_row(row);
            }
            r.check(Check::exact(
                "L(V,M) = 0 when tr M ≠ 0",
                rep.trace_violations == 0,
                format!("{} violations", rep.trace_violations),
            ));
            r.check(Check::empirical(
                "sup L(V,M)·p^(deg f_V - 1) <= 8",
                rep.sup_ratio <= 8.0,
                format!("sup {} at {:?}; {}", rep.sup_ratio, rep.sup_at, rep.field_note),
            ));
        }
        Command::Kcomb(a) => {
            let ctx = FieldCtx::new(a.p as u64)?;
            let x: Vec<u32> = a.x.iter().map(|&v| ctx.reduce_i64(v)).collect();
            let w = kcomb_witness(ctx, &x, a.k)?;
            let sum = w.as_ref().map(|idx| idx.iter().fold(0, |s, &i| ctx.add(s, x[i])));
            let nonzero = x.iter().any(|&v| v != 0);
            r.check(Check::exact(
                "witness exists exactly when x ≠ 0",
                w.is_some() == nonzero && sum != Some(0),
                String::new(),
            ));
            r.rows.push(json!({"p": a.p, "x": x, "k": a.k, "witness": w, "sum": sum}));
        }
        Command::Poisson(a) => {
            let params = WeightParams { n: a.n, t: a.t, p: a.p, radius: a.r, tolerance: a.tolerance };
            let us: Vec<Vec<i64>> = match &a.u {
                Some(u) => vec![u.clone()],
                None => {
                    let ctx = FieldCtx::new(a.p as u64)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                    (0..a.samples)
                        .map(|_| MatF::random(ctx, a.n, &mut rng).flatten().iter().map(|&v| v as i64).collect())
                        .collect()
                }
            };
            for u in &us {
                let rep = poisson_check(u, params)?;
                r.check(Check::exact(
                    format!("U={u:?}: |lhs - rhs| <= tail + 1e-6"),
                    rep.holds,
                    format!("difference {:e}, tail {:e}", rep.difference, rep.tail_bound),
                ));
                r.push_row(&rep);
            }
        }
        Command::Exponent(a) => {
            let rep = exponent_general(a.big_n, a.d, parse_half_integer(&a.l)?)?;
            r.push_row(&rep);
        }
        Command::OptimizeP(a) => {
            for &t in &a.t {
                let rep = optimize_p(a.n, t)?;
                let ratio = rep.term_major / rep.term_error;
                r.check(Check::empirical(
                    format!("T={t}: terms balanced within a factor 100"),
                    (0.01..=100.0).contains(&ratio),
                    format!("ratio {ratio}"),
                ));
                r.push_row(&rep);
            }
        }
        Command::StrataProbe(a) => {
            let rep = lemma_exp_report(a.n, a.p, sample_mode(a)?, budget)?;
            let total = rep.pairs_tested.max(1) as f64;
            for (bin, &count) in &rep.histogram {
                r.rows.push(json!({"bin": bin, "pairs": count, "fraction": count as f64 / total}));
            }
            r.check(Check::empirical(
                "bins are empirical magnitude levels, not recovered strata",
                true,
                format!("{} pairs", rep.pairs_tested),
            ));
        }
    }
    Ok(())
}

/// Parses arguments, runs the subcommand, writes the report and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let report = execute(&cli.command, Budget::new(cli.budget));
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("commutant: cannot write report: {e}");
        return 1;
    }
    if let Some(e) = &report.error {
        eprintln!("commutant: {}", e.message);
    }
    report.status.exit_code()
}
