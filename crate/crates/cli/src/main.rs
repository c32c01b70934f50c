use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use formlab_core::areas::{area, coef_bounds, coef_qminus, coef_qplus, CoefReport};
use formlab_core::arith::parse_rational;
use formlab_core::checks::{self, CHECK_NAMES, DEFAULT_SEED};
use formlab_core::counting::{common_values, count_m, count_nn, count_r, fit_csv, fit_report, CountReport, FitRow};
use formlab_core::exponents::{table, ExponentRow};
use formlab_core::families::{
    cyclotomic_indices, l_primes, lambda_full, parse_member, BinomialEntry, FamilyId, SquarefreeSequence,
};
use formlab_core::quadrature::Piece;
use formlab_core::structure::{automorphisms, is_isomorphic, DEFAULT_DENOMINATOR_BOUND};
use formlab_core::{BinaryForm, CheckOutcome, CountOptions};
use serde::{Deserialize, Serialize};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "formlab", version, about = "Binary forms: values, counts, areas and isomorphisms over Q")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    /// Worker threads (falls back to FORMLAB_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// List family members up to a form degree.
    FamilyList {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 8)]
        dmax: u32,
    },
    /// Evaluate a form at an integer point.
    Eval {
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
    },
    /// Count N(F, F; B), zero included.
    CountNn {
        #[arg(long)]
        form: String,
        #[command(flatten)]
        count: CountArgs,
    },
    /// Count common values of two forms in [-N, N].
    CountCommon {
        #[arg(long)]
        form1: String,
        #[arg(long)]
        form2: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 1000)]
        box_cap: u64,
        #[arg(long)]
        rigorous_only: bool,
        /// Also print the common values.
        #[arg(long)]
        list: bool,
    },
    /// Count 4-tuples in [-B, B]^4 with F1(x1, x2) = F2(x3, x4).
    CountM {
        #[arg(long)]
        form1: String,
        #[arg(long)]
        form2: String,
        #[arg(long = "B")]
        b: u64,
        /// Only tuples with a nonzero common value.
        #[arg(long)]
        star: bool,
    },
    /// Count R_{>=d}(family, B, A).
    CountR {
        #[command(flatten)]
        family: FamilyArgs,
        /// Minimum form degree.
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[command(flatten)]
        count: CountArgs,
        #[arg(long = "A", default_value_t = 0)]
        a: u64,
        /// Degree limit for the small-point scan.
        #[arg(long, default_value_t = 200)]
        degree_cap: u32,
    },
    /// Area of the fundamental domain |F| <= 1.
    Area {
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Area sums over a Q+ or Q- degree block, with their bounds.
    Coef {
        /// qplus or qminus.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        dmin: u32,
        #[arg(long, default_value_t = 12)]
        dmax: u32,
        /// Lambda for the bounds (default 381/230 for qplus, 2 for qminus).
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Automorphism group over Q.
    Aut {
        #[arg(long)]
        form: String,
    },
    /// Decide whether F1 = F2 o gamma for some rational gamma.
    Iso {
        #[arg(long)]
        form1: String,
        #[arg(long)]
        form2: String,
        #[arg(long, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
        denominator_bound: u64,
    },
    /// Exponent table eta_d, kappa_d, theta_d.
    Exponents {
        #[arg(long, default_value_t = 8)]
        dmax: u32,
        /// Truncate to this many decimals, as in the printed table.
        #[arg(long)]
        decimals: Option<u32>,
    },
    /// Run a verification suite by name, or all of them.
    Verify {
        name: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Same as --format json.
        #[arg(long)]
        json: bool,
    },
    /// Count at several B and report count / B^e for plotting.
    Fit {
        /// nn, common or r.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        form2: Option<String>,
        #[command(flatten)]
        family: OptFamilyArgs,
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long = "A", default_value_t = 0)]
        a: u64,
        /// Comma-separated increasing B values.
        #[arg(long = "B", value_delimiter = ',', num_args = 1..)]
        bs: Vec<u64>,
        /// Exponent e in count / B^e (default 2/d).
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        box_cap: u64,
        /// Write a gnuplot script for the CSV to this path.
        #[arg(long)]
        gnuplot: Option<std::path::PathBuf>,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// qplus, qminus, L, cyclo or binom.
    #[arg(long)]
    family: String,
    /// JSON catalog [{"a":..,"b":..,"d":..}] for binom.
    #[arg(long)]
    catalog: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct OptFamilyArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    catalog: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long = "B")]
    b: u64,
    /// Box half-width used when no certificate applies.
    #[arg(long, default_value_t = 1000)]
    box_cap: u64,
    /// Fail unless every search box is certified.
    #[arg(long)]
    rigorous_only: bool,
}

#[derive(Serialize, Deserialize)]
struct MemberOut {
    name: String,
    degree: usize,
    form: BinaryForm,
}

#[derive(Serialize, Deserialize)]
struct EvalOut {
    form: BinaryForm,
    x: i64,
    y: i64,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct CountOut {
    #[serde(flatten)]
    report: CountReport,
    /// "exact" or "lower bound".
    status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    values: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct AreaOut {
    value: f64,
    error: f64,
    pieces: Vec<Piece>,
    panels: usize,
}

#[derive(Serialize, Deserialize)]
struct CoefRow {
    d: u32,
    coef: f64,
    lower_bound: f64,
    upper_bound: f64,
    pass: bool,
    report: CoefReport,
}

#[derive(Serialize, Deserialize)]
struct VerifyOut {
    seed: u64,
    pass: bool,
    outcomes: Vec<CheckOutcome>,
}

/// A form spec: a member name (`L:d=5,p=7`) or `coeffs:a0,a1,...,ad`
/// with `a0` the coefficient of `X^d`.
fn parse_form(spec: &str) -> Result<BinaryForm> {
    if let Some(rest) = spec.strip_prefix("coeffs:") {
        let cs: Option<Vec<_>> = rest.split(',').map(|c| parse_rational(c.trim())).collect();
        let cs = cs.ok_or_else(|| anyhow!("bad coefficient list {rest:?}"))?;
        return Ok(BinaryForm::new(cs)?);
    }
    Ok(parse_member(spec)?)
}

fn read_catalog(path: &Option<std::path::PathBuf>) -> Result<Vec<BinomialEntry>> {
    let path = path.as_ref().ok_or_else(|| anyhow!("--catalog is required for binom"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_family(name: &str, catalog: &Option<std::path::PathBuf>) -> Result<FamilyId> {
    Ok(match name {
        "qplus" => FamilyId::qplus(),
        "qminus" => FamilyId::qminus(),
        "L" | "l" => FamilyId::Lfamily,
        "cyclo" => FamilyId::Cyclotomic,
        "binom" => FamilyId::binomial(read_catalog(catalog)?)?,
        _ => bail!("unknown family {name:?} (qplus, qminus, L, cyclo, binom)"),
    })
}

/// Member names of degree at most `dmax`, sorted by degree, then
/// parameter, then coefficients.
fn member_names(fam: &FamilyId, dmax: u32) -> Vec<(u32, u64, String)> {
    let mut out = Vec::new();
    match fam {
        FamilyId::QPlus(_) | FamilyId::QMinus(_) => {
            let tag = if matches!(fam, FamilyId::QPlus(_)) { "qplus" } else { "qminus" };
            for h in 2..=dmax / 2 {
                for nu in 1..=h + 1 {
                    out.push((2 * h, nu as u64, format!("{tag}:d={h},nu={nu}")));
                }
            }
        }
        FamilyId::Lfamily => {
            for d in 5..=dmax {
                for p in l_primes(d) {
                    out.push((d, p, format!("L:d={d},p={p}")));
                }
            }
        }
        FamilyId::Cyclotomic => {
            for d in 4..=dmax {
                for n in cyclotomic_indices(d) {
                    out.push((d, n, format!("cyclo:n={n}")));
                }
            }
        }
        FamilyId::Binomial(c) => {
            for e in c.iter().filter(|e| e.d <= dmax) {
                out.push((e.d, e.a, format!("binom:a={},b={},d={}", e.a, e.b, e.d)));
            }
        }
    }
    out
}

fn options(box_cap: u64, degree_cap: u32) -> CountOptions {
    CountOptions { user_cap: box_cap, small_point_degree_cap: degree_cap, ..CountOptions::default() }
}

fn count_out(report: CountReport, rigorous_only: bool, values: Option<Vec<String>>) -> Result<CountOut> {
    if rigorous_only && !report.rigorous {
        bail!("search box is not certified; count {} is a lower bound", report.count);
    }
    let status = if report.rigorous { "exact" } else { "lower bound" }.to_string();
    Ok(CountOut { report, status, values })
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn count_csv(r: &CountOut, exponent: f64) -> String {
    let b = r.report.b;
    let ratio = r.report.count as f64 / (b.max(1) as f64).powf(exponent);
    format!("B,count,ratio\n{b},{},{ratio}\n", r.report.count)
}

fn emit_count(out: &CountOut, fmt: Format, exponent: f64) -> Result<String> {
    match fmt {
        Format::Json => json(out),
        Format::Csv => Ok(count_csv(out, exponent)),
    }
}

fn truncate(x: f64, decimals: u32) -> String {
    let s = 10f64.powi(decimals as i32);
    format!("{:.*}", decimals as usize, (x * s + 1e-9).floor() / s)
}

/// Output text and whether the command counts as a success.
fn run(cli: Cli) -> Result<(String, bool)> {
    let fmt = cli.format;
    let text = match cli.cmd {
        Cmd::FamilyList { family, dmax } => {
            let fam = parse_family(&family.family, &family.catalog)?;
            let mut rows = Vec::new();
            for (_, _, name) in member_names(&fam, dmax) {
                let form = parse_form(&name)?;
                rows.push(MemberOut { name, degree: form.degree(), form });
            }
            rows.sort_by(|a, b| {
                let key = |m: &MemberOut| (m.degree, member_param(&m.name));
                key(a).cmp(&key(b)).then_with(|| a.form.coeffs().cmp(b.form.coeffs()))
            });
            match fmt {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("name,degree,form\n");
                    for r in &rows {
                        s += &format!("\"{}\",{},\"{}\"\n", r.name, r.degree, r.form);
                    }
                    s
                }
            }
        }
        Cmd::Eval { form, x, y } => {
            let f = parse_form(&form)?;
            if !f.is_integral() {
                bail!("form has non-integral coefficients");
            }
            let v = f.evaluate_big(&x.into(), &y.into()).numer().to_string();
            match fmt {
                Format::Json => json(&EvalOut { form: f, x, y, value: v })?,
                Format::Csv => format!("x,y,value\n{x},{y},{v}\n"),
            }
        }
        Cmd::CountNn { form, count } => {
            let f = parse_form(&form)?;
            let r = count_nn(&f, count.b, &options(count.box_cap, 200))?;
            emit_count(&count_out(r, count.rigorous_only, None)?, fmt, 2.0 / f.degree() as f64)?
        }
        Cmd::CountCommon { form1, form2, n, box_cap, rigorous_only, list } => {
            let (f1, f2) = (parse_form(&form1)?, parse_form(&form2)?);
            let (r, vals) = common_values(&f1, &f2, n, &options(box_cap, 200))?;
            let vals = list.then(|| vals.iter().map(i128::to_string).collect());
            let e = 2.0 / f1.degree().max(f2.degree()) as f64;
            emit_count(&count_out(r, rigorous_only, vals)?, fmt, e)?
        }
        Cmd::CountM { form1, form2, b, star } => {
            let (f1, f2) = (parse_form(&form1)?, parse_form(&form2)?);
            let r = count_m(&f1, &f2, b, star)?;
            emit_count(&count_out(r, false, None)?, fmt, 2.0)?
        }
        Cmd::CountR { family, d, count, a, degree_cap } => {
            let fam = parse_family(&family.family, &family.catalog)?;
            let r = count_r(&fam, d, count.b, a, &options(count.box_cap, degree_cap))?;
            emit_count(&count_out(r, count.rigorous_only, None)?, fmt, 2.0 / d as f64)?
        }
        Cmd::Area { form, tol } => {
            let q = area(&parse_form(&form)?, tol)?;
            let out = AreaOut { value: q.value, error: q.abs_error_estimate, pieces: q.pieces, panels: q.panels };
            match fmt {
                Format::Json => json(&out)?,
                Format::Csv => {
                    let mut s = String::from("a,b,value,error\n");
                    for p in &out.pieces {
                        s += &format!("{},{},{},{}\n", p.a, p.b, p.value, p.error);
                    }
                    s
                }
            }
        }
        Cmd::Coef { family, dmin, dmax, lambda, tol } => {
            let plus = match family.as_str() {
                "qplus" => true,
                "qminus" => false,
                _ => bail!("coef needs --family qplus or qminus"),
            };
            let lambda = match lambda {
                Some(s) => parse_rational(&s).ok_or_else(|| anyhow!("bad lambda {s:?}"))?,
                None if plus => lambda_full(),
                None => SquarefreeSequence::shifted().lambda,
            };
            let mut rows = Vec::new();
            for d in dmin..=dmax {
                let report = if plus { coef_qplus(d, tol)? } else { coef_qminus(d, tol)? };
                let (lo, hi) = coef_bounds(d, &lambda);
                let c = report.combined;
                let pass = if plus { lo < c && c < hi } else { c >= lo };
                rows.push(CoefRow { d, coef: c, lower_bound: lo, upper_bound: hi, pass, report });
            }
            let ok = rows.iter().all(|r| r.pass);
            let text = match fmt {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("d,coef,lower_bound,upper_bound,pass\n");
                    for r in &rows {
                        s += &format!("{},{},{},{},{}\n", r.d, r.coef, r.lower_bound, r.upper_bound, r.pass);
                    }
                    s
                }
            };
            return Ok((text, ok));
        }
        Cmd::Aut { form } => {
            let g = automorphisms(&parse_form(&form)?)?;
            match fmt {
                Format::Json => json(&g)?,
                Format::Csv => {
                    let mut s = String::from("a1,a2,a3,a4\n");
                    for m in &g.elements {
                        s += &(m.to_strings().join(",") + "\n");
                    }
                    s
                }
            }
        }
        Cmd::Iso { form1, form2, denominator_bound } => {
            let v = is_isomorphic(&parse_form(&form1)?, &parse_form(&form2)?, denominator_bound)?;
            match fmt {
                Format::Json => json(&v)?,
                Format::Csv => {
                    let g = v.gamma().map(|m| m.to_strings().join(" ")).unwrap_or_default();
                    format!("verdict,gamma\n{},{g}\n", v.kind())
                }
            }
        }
        Cmd::Exponents { dmax, decimals } => {
            if dmax < 3 {
                bail!("--dmax must be at least 3");
            }
            let rows: Vec<ExponentRow> = table(dmax);
            let show = |x: f64| decimals.map_or_else(|| x.to_string(), |k| truncate(x, k));
            match fmt {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("d,eta,kappa,theta\n");
                    for r in &rows {
                        s += &format!("{},{},{},{}\n", r.d, show(r.eta), show(r.kappa), show(r.theta));
                    }
                    s
                }
            }
        }
        Cmd::Verify { name, seed, json: as_json } => {
            let outcomes = if name == "all" {
                checks::run_all(seed)
            } else {
                checks::run_check(&name, seed)
                    .ok_or_else(|| anyhow!("unknown check {name:?}; one of all, {}", CHECK_NAMES.join(", ")))?
            };
            let pass = outcomes.iter().all(|o| o.pass);
            let out = VerifyOut { seed, pass, outcomes };
            let text = if as_json || fmt == Format::Json {
                json(&out)?
            } else {
                let mut s = String::from("name,pass,observed,bound,witness\n");
                for o in &out.outcomes {
                    s += &format!("{},{},{},{},\"{}\"\n", o.name, o.pass, o.observed, o.bound, o.witness.clone().unwrap_or_default());
                }
                s
            };
            return Ok((text, pass));
        }
        Cmd::Fit { kind, form, form2, family, d, a, bs, exponent, box_cap, gnuplot } => {
            let opts = options(box_cap, 200);
            let need = |f: &Option<String>, flag: &str| -> Result<BinaryForm> {
                parse_form(f.as_deref().ok_or_else(|| anyhow!("fit --kind {kind} needs {flag}"))?)
            };
            let rows: Vec<FitRow> = match kind.as_str() {
                "nn" => {
                    let f = need(&form, "--form")?;
                    let e = exponent.unwrap_or(2.0 / f.degree() as f64);
                    fit_report(&bs, e, |b| count_nn(&f, b, &opts))?
                }
                "common" => {
                    let (f1, f2) = (need(&form, "--form")?, need(&form2, "--form2")?);
                    let e = exponent.unwrap_or(2.0 / f1.degree().max(f2.degree()) as f64);
                    fit_report(&bs, e, |b| Ok(common_values(&f1, &f2, b, &opts)?.0))?
                }
                "r" => {
                    let name = family.family.as_deref().ok_or_else(|| anyhow!("fit --kind r needs --family"))?;
                    let fam = parse_family(name, &family.catalog)?;
                    let e = exponent.unwrap_or(2.0 / d as f64);
                    fit_report(&bs, e, |b| count_r(&fam, d, b, a, &opts))?
                }
                _ => bail!("--kind must be nn, common or r"),
            };
            if let Some(path) = gnuplot {
                std::fs::write(&path, gnuplot_script())?;
            }
            match fmt {
                Format::Json => json(&rows)?,
                Format::Csv => fit_csv(&rows),
            }
        }
    };
    Ok((text, true))
}

fn member_param(name: &str) -> u64 {
    name.rsplit(['=', ',']).find_map(|t| t.parse().ok()).unwrap_or(0)
}

fn gnuplot_script() -> &'static str {
    "set datafile separator ','\n\
     set logscale x\n\
     set xlabel 'B'\n\
     set ylabel 'count / B^e'\n\
     plot 'fit.csv' using 1:3 skip 1 with linespoints title 'ratio'\n"
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli.threads.or_else(|| std::env::var("FORMLAB_THREADS").ok()?.parse().ok());
    if let Some(n) = threads.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let msg = serde_json::to_string(&ErrorOut { error: format!("{e:#}") }).unwrap_or_default();
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
