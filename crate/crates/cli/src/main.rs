use std::error::Error;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use combpol::classify::{
    classify, construct_counterexample, correspondence_dimension_check, counterexample_digits,
    quadratic_correspondence_demo, ClassifyOptions, DEFAULT_SEMANTIC_BUDGET,
};
use combpol::field::{Characteristic, Field};
use combpol::forms::{defect_as_form, realize, recover_small_arity, DefectForm, FormDocument};
use combpol::polarize::{
    comb_degree, comb_degree_oracle, defect_table, defect_table_recurrence, formal_defect, formal_defect_via_chains,
    longest_regular_chains, DEFAULT_EXPANSION_BUDGET,
};
use combpol::poly::{parse_poly, FunctionTable, MultiExponent, SparsePolynomial};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser, Debug)]
#[command(name = "combpol", version, about = "Combinatorial degree and n-applications over finite fields and Q")]
struct Cli {
    /// Field: `p`, `p^e` or `Q`.
    #[arg(long, global = true, default_value = "2")]
    field: String,
    /// Number of variables; inferred from the input when omitted.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Arity.
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on exhaustive enumeration work.
    #[arg(long, global = true, default_value_t = DEFAULT_SEMANTIC_BUDGET)]
    budget: u64,
    /// Also run an independent check of the result.
    #[arg(long, global = true)]
    verify: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// n-th defect of a polynomial (formal) or of a table file (pointwise).
    Polarize {
        #[arg(allow_hyphen_values = true)]
        polynomial: Option<String>,
        /// JSON array of value encodings in point order.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Combinatorial degree.
    Combdeg {
        #[arg(allow_hyphen_values = true)]
        polynomial: Option<String>,
    },
    /// Reduced representative.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        polynomial: Option<String>,
    },
    /// Polynomial realizing a characteristic symmetric form.
    Realize {
        #[arg(long)]
        form: PathBuf,
    },
    /// Is the polynomial an n-application? Exit status 0 if so, 1 if not.
    Classify {
        #[arg(allow_hyphen_values = true)]
        polynomial: Option<String>,
    },
    /// Longest regular chains of a multiexponent such as `(7,4)`.
    Chains {
        multiexponent: String,
        /// Characteristic: a prime or `inf`; defaults to that of `--field`.
        #[arg(long)]
        p: Option<String>,
        /// Print only the length.
        #[arg(long)]
        length_only: bool,
    },
    /// Non-homogeneous n-application of degree n + q - 1.
    Counterexample,
    /// Reduced polynomial of a table file.
    Interp {
        #[arg(long)]
        table: PathBuf,
    },
    /// Quadratic forms versus 2-applications, or with `--dimension` the
    /// dimension comparison for arity `--n`.
    Demo {
        #[arg(long)]
        dimension: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct PolyOut {
    field: String,
    d: usize,
    polynomial: String,
}

#[derive(Serialize, Deserialize)]
struct FormalOut {
    field: String,
    d: usize,
    n: usize,
    defect: String,
    verified: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct TableEntryOut {
    args: Vec<Vec<u64>>,
    value: u64,
}

#[derive(Serialize, Deserialize)]
struct CombdegOut {
    comb_degree: i64,
    oracle: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct ChainsOut {
    multiexponent: Vec<u32>,
    p: String,
    length: u64,
    chains: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct CounterexampleOut {
    field: String,
    n: u64,
    d: usize,
    digits: Vec<u64>,
    polynomial: String,
    degree: i64,
    verified: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct RealizeOut {
    field: String,
    d: usize,
    n: usize,
    polynomial: String,
    verified: Option<bool>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Text => text(),
    };
    match writeln!(std::io::stdout().lock(), "{body}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn read_input(arg: &Option<String>) -> CliResult<String> {
    match arg {
        Some(s) => Ok(s.clone()),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s.trim().to_string())
        }
    }
}

/// Largest `k` among variables `xk` (and `k` in `xk_j`).
fn infer_dim(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'x' {
            let digits: String = text[i + 1..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(k) = digits.parse::<usize>() {
                best = best.max(k);
            }
        }
    }
    best.max(1)
}

fn need_n(cli: &Cli) -> CliResult<u64> {
    cli.n.ok_or_else(|| "this subcommand needs --n".into())
}

fn parse_input(cli: &Cli, field: &Field, arg: &Option<String>) -> CliResult<SparsePolynomial> {
    let text = read_input(arg)?;
    let d = cli.dim.unwrap_or_else(|| infer_dim(&text));
    Ok(parse_poly(&text, field, d)?)
}

fn load_table(cli: &Cli, field: &Field, path: &Path) -> CliResult<FunctionTable> {
    let raw = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let encodings: Vec<u64> = serde_json::from_str(&raw)?;
    Ok(FunctionTable::from_encodings(field, cli.dim, &encodings, cli.budget)?)
}

fn run(cli: &Cli) -> CliResult<u8> {
    let field: Field = cli.field.parse()?;
    match &cli.command {
        Command::Polarize { polynomial, table } => {
            let n = need_n(cli)? as usize;
            match table {
                Some(path) => polarize_table(cli, &load_table(cli, &field, path)?, n)?,
                None => {
                    let f = parse_input(cli, &field, polynomial)?;
                    let defect = formal_defect(&f, n)?;
                    let verified = if cli.verify {
                        let mut sum = SparsePolynomial::zero(&field, n * f.nvars());
                        for mono in f.monomials() {
                            sum = &sum + formal_defect_via_chains(&mono, n)?.poly();
                        }
                        Some(&sum == defect.poly())
                    } else {
                        None
                    };
                    let out = FormalOut { field: field.to_string(), d: f.nvars(), n, defect: defect.to_string(), verified };
                    emit(cli.format, &out, || match verified {
                        Some(ok) => format!("{}\nchain formula agrees: {ok}", out.defect),
                        None => out.defect.clone(),
                    })?;
                    if verified == Some(false) {
                        return Err("formal defect disagrees with the chain formula".into());
                    }
                }
            }
            Ok(0)
        }
        Command::Combdeg { polynomial } => {
            let f = parse_input(cli, &field, polynomial)?;
            let value = comb_degree(&f)?;
            let oracle = if cli.verify { Some(comb_degree_oracle(&f, DEFAULT_EXPANSION_BUDGET)?) } else { None };
            let out = CombdegOut { comb_degree: value, oracle };
            emit(cli.format, &out, || match oracle {
                Some(o) => format!("{value}\noracle: {o}"),
                None => value.to_string(),
            })?;
            if oracle.is_some_and(|o| o != value) {
                return Err("formula and oracle disagree".into());
            }
            Ok(0)
        }
        Command::Reduce { polynomial } => {
            let f = parse_input(cli, &field, polynomial)?.reduce();
            let out = PolyOut { field: field.to_string(), d: f.nvars(), polynomial: f.to_string() };
            emit(cli.format, &out, || out.polynomial.clone())?;
            Ok(0)
        }
        Command::Realize { form } => {
            let raw = std::fs::read_to_string(form).map_err(|e| format!("{}: {e}", form.display()))?;
            let doc: FormDocument = serde_json::from_str(&raw)?;
            let phi = doc.to_form()?;
            let alpha = realize(&phi)?;
            let verified = if cli.verify { Some(verify_realization(cli, &phi, &alpha)?) } else { None };
            let out = RealizeOut {
                field: phi.field().to_string(),
                d: phi.dim(),
                n: phi.arity(),
                polynomial: alpha.to_string(),
                verified,
            };
            emit(cli.format, &out, || match verified {
                Some(ok) => format!("{}\nverified: {ok}", out.polynomial),
                None => out.polynomial.clone(),
            })?;
            Ok(0)
        }
        Command::Classify { polynomial } => {
            let n = need_n(cli)?;
            let f = parse_input(cli, &field, polynomial)?;
            let opts = ClassifyOptions { budget: cli.budget, seed: cli.seed, semantic: true };
            let report = classify(&f, n, opts)?;
            emit(cli.format, &report, || {
                let mut lines = vec![
                    format!("polynomial: {}", report.polynomial),
                    format!("degree: {}", report.degree),
                    format!("comb_degree: {}", report.comb_degree),
                    format!("pl: {}", report.pl),
                    format!("tpl: {}", report.tpl),
                    format!("dpl: {}", report.dpl),
                    format!("homogeneous_of_degree_n: {}", report.homogeneous_of_degree_n),
                    format!("is_n_application: {}", report.is_n_application),
                    format!("semantic_check: {}", serde_json::to_string(&report.semantic_check).unwrap_or_default()),
                ];
                if let Some(m) = &report.tpl_violation {
                    lines.push(format!("tpl_violation: {}", MultiExponent::new(m.clone())));
                }
                if let Some(m) = &report.dpl_violation {
                    lines.push(format!("dpl_violation: {}", MultiExponent::new(m.clone())));
                }
                lines.join("\n")
            })?;
            Ok(if report.is_n_application { 0 } else { 1 })
        }
        Command::Chains { multiexponent, p, length_only } => {
            let chr = match p.as_deref() {
                None => field.characteristic(),
                Some("inf") | Some("Q") => Characteristic::Infinite,
                Some(s) => {
                    let p: u64 = s.parse().map_err(|_| format!("bad characteristic `{s}`"))?;
                    Field::finite(p, 1)?.characteristic()
                }
            };
            let m = parse_multiexponent(multiexponent)?;
            let report = longest_regular_chains(&m, chr, !length_only)?;
            let out = ChainsOut {
                multiexponent: m.as_slice().to_vec(),
                p: chr.to_string(),
                length: report.length,
                chains: report.chains.map(|cs| cs.iter().map(ToString::to_string).collect()),
            };
            emit(cli.format, &out, || {
                let mut lines = vec![format!("length: {}", out.length)];
                lines.extend(out.chains.iter().flatten().cloned());
                lines.join("\n")
            })?;
            Ok(0)
        }
        Command::Counterexample => {
            let n = need_n(cli)?;
            let d = cli.dim.unwrap_or(n as usize);
            let g = construct_counterexample(&field, n, d)?;
            let p = field.characteristic().prime().unwrap_or(0);
            let digits = counterexample_digits(p, field.degree(), n).unwrap_or_default();
            let verified = if cli.verify {
                let opts = ClassifyOptions { budget: cli.budget, seed: cli.seed, semantic: true };
                let r = classify(&g, n, opts)?;
                Some(r.is_n_application && r.semantic_check.verdict() != Some(false))
            } else {
                None
            };
            let out = CounterexampleOut {
                field: field.to_string(),
                n,
                d,
                digits,
                polynomial: g.to_string(),
                degree: g.degree(),
                verified,
            };
            emit(cli.format, &out, || out.polynomial.clone())?;
            Ok(0)
        }
        Command::Interp { table } => {
            let tab = load_table(cli, &field, table)?;
            let f = tab.interpolate();
            let out = PolyOut { field: field.to_string(), d: f.nvars(), polynomial: f.to_string() };
            emit(cli.format, &out, || out.polynomial.clone())?;
            Ok(0)
        }
        Command::Demo { dimension } => {
            let d = cli.dim.unwrap_or(2);
            if *dimension {
                let report = correspondence_dimension_check(&field, d, need_n(cli)? as usize, cli.budget)?;
                emit(cli.format, &report, || {
                    format!(
                        "monomials: {} - {} = {}\nform dimension: {} ({} unknowns, rank {})\nequal: {}",
                        report.upper_monomials,
                        report.lower_monomials,
                        report.upper_monomials - report.lower_monomials,
                        report.form_dimension,
                        report.form_unknowns,
                        report.constraint_rank,
                        report.equal
                    )
                })?;
            } else {
                let report = quadratic_correspondence_demo(&field, d, cli.budget)?;
                emit(cli.format, &report, || serde_json::to_string_pretty(&report).unwrap_or_default())?;
            }
            Ok(0)
        }
    }
}

fn polarize_table(cli: &Cli, tab: &FunctionTable, n: usize) -> CliResult<()> {
    let table = defect_table(tab, n, cli.budget)?;
    if cli.verify && defect_table_recurrence(tab, n, cli.budget)? != table {
        return Err("inclusion-exclusion and recurrence disagree".into());
    }
    let space = tab.space();
    let entries: Vec<TableEntryOut> = table
        .entries()
        .into_iter()
        .map(|e| TableEntryOut {
            args: e.args.iter().map(|&a| space.coords(a)).collect(),
            value: e.value.encoding().unwrap_or_default(),
        })
        .collect();
    emit(cli.format, &entries, || {
        entries
            .iter()
            .map(|e| {
                let args: Vec<String> = e.args.iter().map(|a| format!("{a:?}")).collect();
                format!("{} -> {}", args.join(" "), e.value)
            })
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn verify_realization(cli: &Cli, phi: &combpol::forms::SymmetricForm, alpha: &SparsePolynomial) -> CliResult<bool> {
    let shape = alpha.is_homogeneous_of_degree(phi.arity() as u64) && alpha.is_totally_reduced();
    if phi.field().is_finite() {
        let tab = alpha.to_table(cli.budget)?;
        let back = matches!(
            defect_as_form(&tab, phi.arity(), cli.budget, cli.seed)?,
            DefectForm::Linear { form, .. } if form == *phi
        );
        Ok(shape && back)
    } else {
        Ok(shape && recover_small_arity(phi)? == *alpha)
    }
}

fn parse_multiexponent(s: &str) -> CliResult<MultiExponent> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let exps = inner
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad exponent `{t}` in `{s}`")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiExponent::new(exps))
}
