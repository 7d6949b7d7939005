mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use twarrow::artifact::{self, table_meta, Artifact, Document, Meta, Table, TwDump, SCHEMA_VERSION};
use twarrow::collections::{build_operad, check_action_laws, check_operad_axioms, OperadSpec};
use twarrow::exactla::{Field, FieldDesc, PrimeField, Rationals};
use twarrow::qcohom::{ext, les_check_ass, quillen_cohomology, random_cokernel, stable_cohomotopy, ExtBackend, ExtOptions};
use twarrow::sset::{check_quasi_bijection, un_point, FinSimplicialSet, Variance};
use twarrow::twisted::{certify_tw_ass, certify_tw_com};

use spec::{Base, FunctorSpec};

#[derive(Parser)]
#[command(name = "twarrow", version, about = "Twisted arrow categories of discrete operads and their functor cohomology")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operad axiom and action-law checks.
    Operad {
        #[command(subcommand)]
        command: OperadCommand,
    },
    /// Twisted arrow categories and their certificates.
    Tw {
        #[command(subcommand)]
        command: TwCommand,
    },
    /// Quasi-simplices and unstraightening over a point.
    Sset {
        #[command(subcommand)]
        command: SsetCommand,
    },
    /// `dim Ext^k(source, target)` over a finite base.
    Ext(ExtArgs),
    /// Quillen cohomology `H^n_Q(P; F) = Ext^{n+1}(F_P, F)`.
    Qcohom(QcohomArgs),
    /// Γ-module computations.
    Gamma {
        #[command(subcommand)]
        command: GammaCommand,
    },
    /// The long exact sequence over Δ.
    Ass {
        #[command(subcommand)]
        command: AssCommand,
    },
}

#[derive(Subcommand)]
enum OperadCommand {
    Check {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        max_arity: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum TwCommand {
    Build {
        #[arg(long)]
        operad: String,
        #[arg(long)]
        max_arity: usize,
        #[arg(long)]
        out: PathBuf,
    },
    CertifyCom {
        #[arg(long)]
        max_arity: usize,
        #[command(flatten)]
        out: Output,
    },
    CertifyAss {
        #[arg(long)]
        max_arity: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum SsetCommand {
    Quasi {
        #[arg(long)]
        input: String,
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        out: Output,
    },
    Un {
        #[arg(long)]
        variance: Variance,
        #[arg(long)]
        input: String,
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum GammaCommand {
    ExtT {
        #[arg(long)]
        target: FunctorSpec,
        /// One truncation or a comma-separated list.
        #[arg(long, value_delimiter = ',', required = true)]
        trunc: Vec<usize>,
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum AssCommand {
    LesCheck {
        #[arg(long)]
        trunc: usize,
        #[arg(long)]
        top_degree: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "fp:101")]
        field: FieldDesc,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct ExtArgs {
    /// `gamma:N`, `delta:N`, `tw:OPERAD:N` or a category file.
    #[arg(long)]
    base: String,
    #[arg(long)]
    source: FunctorSpec,
    #[arg(long)]
    target: FunctorSpec,
    #[arg(long, allow_hyphen_values = true)]
    degrees: String,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct QcohomArgs {
    #[arg(long)]
    operad: String,
    #[arg(long)]
    coeff: FunctorSpec,
    #[arg(long, allow_hyphen_values = true)]
    degrees: String,
    #[arg(long)]
    max_arity: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value = "fp:101")]
    field: FieldDesc,
    #[arg(long, default_value = "cover-dual")]
    backend: ExtBackend,
    /// Seed for `random:` functors.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// What a subcommand produced: a report and whether its checks passed.
struct Outcome {
    doc: Document,
    table: Option<Table>,
    passed: bool,
}

fn document(kind: &str, meta: Meta, data: Value) -> Document {
    Document { schema_version: SCHEMA_VERSION, kind: kind.to_string(), meta, data }
}

fn meta(pairs: &[(&str, String)]) -> Meta {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn emit(outcome: &Outcome, out: &Output) -> Result<()> {
    let text = artifact::render(&outcome.doc)?;
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(table)) = (&out.csv, &outcome.table) {
        std::fs::write(path, table.to_csv()?)?;
    }
    Ok(())
}

fn operad_check(spec: &str, n: usize) -> Result<Outcome> {
    let p = build_operad(&spec.parse::<OperadSpec>()?, n)?;
    let axioms = check_operad_axioms(&p, n)?;
    let actions = check_action_laws(&p, n)?;
    let passed = axioms.is_empty() && actions.is_empty();
    let data = json!({"operad": p.name(), "axiom_violations": axioms, "action_violations": actions, "passed": passed});
    let m = meta(&[("truncation", n.to_string())]);
    Ok(Outcome { doc: document("operad_check", m, data), table: None, passed })
}

fn sset_input(s: &str) -> Result<FinSimplicialSet> {
    let path = std::path::Path::new(s);
    if path.exists() {
        return Ok(artifact::load(path)?);
    }
    Ok(match s.split_once(':') {
        Some(("std", n)) => FinSimplicialSet::standard(n.parse()?),
        Some(("boundary", n)) => FinSimplicialSet::boundary(n.parse()?)?,
        None if s == "grid" => FinSimplicialSet::grid(),
        _ => bail!("{s} is neither a file nor one of std:N, boundary:N, grid"),
    })
}

fn sset_quasi(input: &str, dim: usize) -> Result<Outcome> {
    let x = sset_input(input)?;
    let reports = (0..=dim).map(|n| check_quasi_bijection(&x, n)).collect::<twarrow::Result<Vec<_>>>()?;
    let m = meta(&[("input", x.name().to_string())]);
    Ok(Outcome { doc: document("quasi_report", m, json!({"degrees": reports})), table: None, passed: true })
}

fn sset_un(variance: Variance, input: &str, dim: usize) -> Result<Outcome> {
    let x = sset_input(input)?;
    let counts: Vec<usize> = (0..=dim).map(|n| un_point(&x, variance, n).len()).collect();
    let m = meta(&[("input", x.name().to_string()), ("variance", format!("{variance:?}").to_lowercase())]);
    Ok(Outcome { doc: document("un_report", m, json!({"simplices": counts})), table: None, passed: true })
}

fn ext_table<F: Field>(field: &F, args: &ExtArgs) -> Result<Outcome> {
    let base = Base::parse(&args.base)?;
    let (lo, hi) = spec::degrees(&args.degrees)?;
    if lo < 0 {
        bail!("Ext degrees start at 0");
    }
    let cat = base.category();
    let m = args.source.build(&base, field, args.run.seed)?;
    let n = args.target.build(&base, field, args.run.seed)?;
    let dims = ext(cat, &m, &n, hi as usize, ExtOptions::with_backend(args.run.backend))?;
    let degrees: Vec<i64> = (lo..=hi).collect();
    let values: Vec<Vec<usize>> = degrees.iter().map(|&k| vec![dims[k as usize]]).collect();
    let seeded = args.source.is_random() || args.target.is_random();
    let mut tm = table_meta(&field.descriptor().to_string(), &args.base, &args.run.backend.to_string(), seeded.then_some(args.run.seed));
    tm.insert("source".into(), args.source.to_string());
    tm.insert("target".into(), args.target.to_string());
    let mut table = Table::new(tm.clone(), vec!["degree".into(), "dim".into()]);
    for (d, v) in degrees.iter().zip(&values) {
        table.push(vec![d.to_string(), v[0].to_string()]);
    }
    let data = json!({"base": cat.name(), "degrees": degrees.iter().zip(&values).map(|(d, v)| (d, v[0])).collect::<Vec<_>>()});
    Ok(Outcome { doc: document("ext_table", tm, data), table: Some(table), passed: true })
}

fn qcohom<F: Field>(field: &F, args: &QcohomArgs) -> Result<Outcome> {
    let base = Base::Tw(spec::tw_base(&args.operad, args.max_arity)?);
    let (lo, hi) = spec::degrees(&args.degrees)?;
    let coeff = args.coeff.build(&base, field, args.run.seed)?;
    let Base::Tw(tw) = &base else { unreachable!() };
    let table = quillen_cohomology(tw, &coeff, lo, hi, ExtOptions::with_backend(args.run.backend))?;
    let seed = args.coeff.is_random().then_some(args.run.seed);
    let mut csv = table.to_table(seed);
    csv.meta.insert("coeff".into(), args.coeff.to_string());
    Ok(Outcome { doc: table.to_document(csv.meta.clone())?, table: Some(csv), passed: true })
}

fn gamma_ext_t<F: Field>(field: &F, target: &FunctorSpec, truncs: &[usize], degrees: &str, run: &RunArgs) -> Result<Outcome> {
    let (lo, hi) = spec::degrees(degrees)?;
    if lo < 0 {
        bail!("Ext degrees start at 0");
    }
    let table = stable_cohomotopy(field, truncs, hi as usize, ExtOptions::with_backend(run.backend), |_, cat| {
        let base = Base::Gamma(cat.clone());
        target.build(&base, field, run.seed).map_err(|e| twarrow::Error::Invalid(e.to_string()))
    })?;
    let mut csv = table.to_table(target.is_random().then_some(run.seed));
    csv.rows.drain(..lo as usize);
    csv.meta.insert("target".into(), target.to_string());
    Ok(Outcome { doc: table.to_document(csv.meta.clone())?, table: Some(csv), passed: true })
}

fn les_check<F: Field>(field: &F, trunc: usize, top: usize, trials: usize, seed: u64) -> Result<Outcome> {
    use rand::SeedableRng;
    let cat = twarrow::category::simplex_category(trunc);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(trials);
    for _ in 0..trials {
        let f = random_cokernel(&cat, field, 3, 2, &mut rng)?;
        reports.push(les_check_ass(&cat, &f, top)?);
    }
    let failures: usize = reports.iter().filter(|r| !r.passed()).count();
    let m = table_meta(&field.descriptor().to_string(), &trunc.to_string(), "cover-dual", Some(seed));
    let data = json!({"trials": reports, "failed_trials": failures});
    Ok(Outcome { doc: document("les_check", m, data), table: None, passed: failures == 0 })
}

fn with_field<T>(field: FieldDesc, run_q: impl FnOnce(&Rationals) -> T, run_p: impl FnOnce(&PrimeField) -> T) -> Result<T> {
    Ok(match field {
        FieldDesc::Rationals => run_q(&Rationals),
        FieldDesc::Prime(p) => run_p(&PrimeField::new(p)?),
    })
}

fn run(command: Command) -> Result<bool> {
    let (outcome, out) = match command {
        Command::Operad { command: OperadCommand::Check { spec, max_arity, out } } => (operad_check(&spec, max_arity)?, out),
        Command::Tw { command } => match command {
            TwCommand::Build { operad, max_arity, out } => {
                let base = spec::tw_base(&operad, max_arity)?;
                let m = meta(&[("truncation", max_arity.to_string())]);
                artifact::persist(&TwDump::new(&base.tw)?, m, &out)?;
                return Ok(true);
            }
            TwCommand::CertifyCom { max_arity, out } => {
                let cert = certify_tw_com(max_arity)?;
                let m = meta(&[("truncation", max_arity.to_string())]);
                (Outcome { doc: cert.to_document(m)?, table: None, passed: true }, out)
            }
            TwCommand::CertifyAss { max_arity, out } => {
                let cert = certify_tw_ass(max_arity)?;
                let m = table_meta("none", &max_arity.to_string(), "none", None);
                let mut table = Table::new(m.clone(), vec!["m".into(), "n".into(), "homs".into()]);
                for (a, b, c) in &cert.hom_counts {
                    table.push(vec![a.to_string(), b.to_string(), c.to_string()]);
                }
                (Outcome { doc: cert.to_document(m)?, table: Some(table), passed: true }, out)
            }
        },
        Command::Sset { command } => match command {
            SsetCommand::Quasi { input, dim, out } => (sset_quasi(&input, dim)?, out),
            SsetCommand::Un { variance, input, dim, out } => (sset_un(variance, &input, dim)?, out),
        },
        Command::Ext(args) => {
            let outcome = with_field(args.run.field, |f| ext_table(f, &args), |f| ext_table(f, &args))??;
            (outcome, args.out)
        }
        Command::Qcohom(args) => {
            let outcome = with_field(args.run.field, |f| qcohom(f, &args), |f| qcohom(f, &args))??;
            (outcome, args.out)
        }
        Command::Gamma { command: GammaCommand::ExtT { target, trunc, degrees, run, out } } => {
            let outcome = with_field(
                run.field,
                |f| gamma_ext_t(f, &target, &trunc, &degrees, &run),
                |f| gamma_ext_t(f, &target, &trunc, &degrees, &run),
            )??;
            (outcome, out)
        }
        Command::Ass { command: AssCommand::LesCheck { trunc, top_degree, trials, seed, field, out } } => {
            let outcome = with_field(
                field,
                |f| les_check(f, trunc, top_degree, trials, seed),
                |f| les_check(f, trunc, top_degree, trials, seed),
            )??;
            (outcome, out)
        }
    };
    emit(&outcome, &out)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let certified = matches!(e.downcast_ref::<twarrow::Error>(), Some(twarrow::Error::Certificate(_)));
            ExitCode::from(if certified { 1 } else { 2 })
        }
    }
}
