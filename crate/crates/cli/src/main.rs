mod output;
mod store;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use paramodular::config::{parse_records as parse_algebras, SUPPORTED_PRIMES};
use paramodular::context::ContextPool;
use paramodular::eigenform::{bundled_records, ingest_records, EigenformRecord};
use paramodular::harder::{
    bundled_table, check_congruence, parse_table, verify_table, TableRow, Verdict,
};
use paramodular::hecke::reps_explicit;
use paramodular::trace::{dimensions, full_trace, new_eigenvalue, Dimensions};
use paramodular::Error;

use output::{render_all, Format, Table};
use store::JsonStore;

#[derive(Parser, Debug)]
#[command(
    name = "paramodular",
    version,
    about = "Hecke eigenvalues of paramodular forms of prime level"
)]
struct Cli {
    /// Output layout.
    #[arg(long, value_enum, default_value_t = Format::Aligned, global = true)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached `W_theta` sets and characters.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Data directory with `algebras.toml`, `congruences.toml` and `*.txt`
    /// eigenform records; each present file replaces the bundled data.
    #[arg(long, env = "PARAMODULAR_DATA", global = true)]
    data: Option<PathBuf>,
    /// Algebra records replacing the bundled ones for their primes.
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Group {
    Gamma1,
    Gamma2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orders of the finite groups and the mass checks.
    Gamma {
        #[arg(long)]
        p: u64,
    },
    /// New-space dimensions; the whole table when `--j`/`--k` are omitted.
    Dims {
        #[arg(long)]
        p: u64,
        #[arg(long, requires = "k")]
        j: Option<u32>,
        #[arg(long, requires = "j")]
        k: Option<u32>,
    },
    /// Coset representatives for `T_q`.
    HeckeReps {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Group::Gamma2)]
        group: Group,
    },
    /// Trace of `T_q^power` on the full space.
    Trace {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Old and new traces and the new eigenvalue `b_q`.
    Eigenvalue {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
    },
    /// Checks the congruence against newforms of weight `j + 2k - 2`.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        /// Congruence prime; defaults to the one stored with the form.
        #[arg(long)]
        ell: Option<u64>,
        /// Eigenform records to check against.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Recomputes every row of the congruence table.
    VerifyTable,
}

struct Outcome {
    tables: Vec<Table>,
    ok: bool,
}

impl Outcome {
    fn ok(tables: Vec<Table>) -> Self {
        Outcome { tables, ok: true }
    }
}

struct Data {
    records: Vec<EigenformRecord>,
    table: Vec<TableRow>,
}

fn load_data(cli: &Cli) -> paramodular::Result<(ContextPool, Data)> {
    let mut pool = match &cli.cache_dir {
        Some(dir) => ContextPool::with_store(Arc::new(JsonStore::new(dir)?)),
        None => ContextPool::new(),
    };
    let mut records = bundled_records();
    let mut table = bundled_table();
    let mut algebra_files: Vec<PathBuf> = Vec::new();
    if let Some(dir) = &cli.data {
        if !dir.is_dir() {
            return Err(Error::Validation(format!(
                "data directory {} does not exist",
                dir.display()
            )));
        }
        let has_txt = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .any(|e| e.path().extension().is_some_and(|x| x == "txt"));
        if has_txt {
            records = ingest_records(dir)?;
        }
        let congruences = dir.join("congruences.toml");
        if congruences.exists() {
            table = parse_table(&std::fs::read_to_string(congruences)?)?;
        }
        let algebras = dir.join("algebras.toml");
        if algebras.exists() {
            algebra_files.push(algebras);
        }
    }
    algebra_files.extend(cli.algebra.clone());
    for file in algebra_files {
        for rec in parse_algebras(&std::fs::read_to_string(file)?)? {
            pool.override_record(rec);
        }
    }
    Ok((pool, Data { records, table }))
}

fn check_p(p: u64) -> paramodular::Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::UnsupportedPrime(p))
    }
}

fn opt(x: Option<u64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn gamma(pool: &ContextPool, p: u64) -> paramodular::Result<Outcome> {
    let ctx = pool.context(p)?;
    let report = ctx.mass_report()?;
    let mut t =
        Table::new(["group", "order", "1/order", "mass", "check"]).title(format!("p = {p}"));
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" }.to_string();
    if let Some((n, m, e)) = &report.gamma1 {
        t.push(vec![
            "Gamma1".into(),
            n.to_string(),
            m.to_string(),
            e.to_string(),
            verdict(m == e),
        ]);
    }
    t.push(vec![
        "Gamma2".into(),
        report.gamma2_size.to_string(),
        report.gamma2_mass.to_string(),
        report.gamma2_expected.to_string(),
        verdict(report.gamma2_mass == report.gamma2_expected),
    ]);
    Ok(Outcome {
        ok: report.passed(),
        tables: vec![t],
    })
}

fn dims_cell(d: &Dimensions) -> String {
    match d.new {
        Some(n) => n.to_string(),
        None => format!("{}*", d.full),
    }
}

fn dims(pool: &ContextPool, p: u64, jk: Option<(u32, u32)>) -> paramodular::Result<Outcome> {
    if let Some((j, k)) = jk {
        let d = dimensions(pool, p, j, k)?;
        let mut t = Table::new(["p", "j", "k", "full", "old", "new"]);
        t.push(vec![
            p.to_string(),
            j.to_string(),
            k.to_string(),
            d.full.to_string(),
            opt(d.old),
            opt(d.new),
        ]);
        return Ok(Outcome::ok(vec![t]));
    }
    let cols: Vec<u32> = (0..16).collect();
    let mut header = vec!["j\\k-3".to_string()];
    header.extend(cols.iter().map(u32::to_string));
    let mut t = Table::new(header).title(format!("dim of the new space, p = {p}"));
    let mut undetermined = false;
    for j in (0..=20).step_by(2) {
        let mut row = vec![j.to_string()];
        for &c in &cols {
            let d = dimensions(pool, p, j, c + 3)?;
            undetermined |= d.new.is_none();
            row.push(dims_cell(&d));
        }
        t.push(row);
    }
    if undetermined {
        t.note("* full dimension; the old space is not determined for this weight");
    }
    Ok(Outcome::ok(vec![t]))
}

fn hecke_reps(pool: &ContextPool, p: u64, q: u64, group: Group) -> paramodular::Result<Outcome> {
    let ctx = pool.context(p)?;
    let reps = match group {
        Group::Gamma2 => ctx.hecke_reps(q)?.reps().to_vec(),
        Group::Gamma1 => {
            if q == p {
                return Err(Error::Unsupported(format!("q = {q} must differ from p")));
            }
            reps_explicit(ctx.order(), q)?
        }
    };
    let label = match group {
        Group::Gamma1 => "Gamma1",
        Group::Gamma2 => "Gamma2",
    };
    let mut t = Table::new(["#", "representative"]).title(format!(
        "{} representatives for T_{q} on {label}, p = {p}",
        reps.len()
    ));
    for (i, r) in reps.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), r.to_string()]);
    }
    Ok(Outcome::ok(vec![t]))
}

fn trace(
    pool: &ContextPool,
    p: u64,
    q: u64,
    j: u32,
    k: u32,
    power: u32,
) -> paramodular::Result<Outcome> {
    let d = dimensions(pool, p, j, k)?;
    let tr = full_trace(pool, p, q, j, k, power)?;
    let mut t = Table::new(["p", "q", "j", "k", "power", "dim", "trace"]);
    t.push(vec![
        p.to_string(),
        q.to_string(),
        j.to_string(),
        k.to_string(),
        power.to_string(),
        d.full.to_string(),
        tr.to_string(),
    ]);
    Ok(Outcome::ok(vec![t]))
}

fn eigenvalue(
    pool: &ContextPool,
    data: &Data,
    p: u64,
    q: u64,
    j: u32,
    k: u32,
) -> paramodular::Result<Outcome> {
    let r = new_eigenvalue(pool, &data.records, p, q, j, k)?;
    let mut t = Table::new([
        "p",
        "q",
        "j",
        "k",
        "full",
        "old",
        "new",
        "trace",
        "old_trace",
        "b_q",
    ]);
    t.push(vec![
        p.to_string(),
        q.to_string(),
        j.to_string(),
        k.to_string(),
        r.dims.full.to_string(),
        opt(r.dims.old),
        opt(r.dims.new),
        r.total.to_string(),
        r.old.to_string(),
        r.new.to_string(),
    ]);
    Ok(Outcome::ok(vec![t]))
}

fn verify(
    pool: &ContextPool,
    data: &Data,
    (p, q, j, k): (u64, u64, u32, u32),
    ell: Option<u64>,
    record: Option<&Path>,
) -> paramodular::Result<Outcome> {
    let candidates_from = match record {
        Some(path) => ingest_records(path)?,
        None => data.records.clone(),
    };
    let weight = (j + 2 * k - 2) as u64;
    let mut candidates: Vec<&EigenformRecord> = candidates_from
        .iter()
        .filter(|r| r.level == p && r.weight == weight && r.eigenvalue(q).is_some())
        .collect();
    if let Some(l) = ell {
        if candidates
            .iter()
            .any(|r| r.ell.is_some_and(|(e, _)| e == l))
        {
            candidates.retain(|r| r.ell.is_some_and(|(e, _)| e == l));
        }
    }
    if candidates.is_empty() {
        return Err(Error::DataMissing { level: p, weight });
    }
    let b = new_eigenvalue(pool, &data.records, p, q, j, k)?.new;
    let mut t = Table::new([
        "p", "q", "j", "k", "ell", "form", "b_q", "c", "residual", "verdict",
    ]);
    let mut any = false;
    let mut warnings = Vec::new();
    for rec in candidates {
        let Some(l) = ell.or(rec.ell.map(|(e, _)| e)) else {
            return Err(Error::Validation(format!(
                "no congruence prime given and record {} has none",
                rec.label
            )));
        };
        let r = check_congruence(rec, &b, p, q, j, k, l)?;
        any |= r.verdict != Verdict::Fails;
        warnings.extend(
            r.warnings
                .iter()
                .map(|w| format!("warning: {}: {w}", rec.label)),
        );
        t.push(vec![
            p.to_string(),
            q.to_string(),
            j.to_string(),
            k.to_string(),
            l.to_string(),
            rec.label.clone(),
            r.b_q.to_string(),
            r.c.to_string(),
            r.residual_norm
                .map_or_else(|| "-".into(), |n| n.to_string()),
            r.verdict.to_string(),
        ]);
    }
    for w in warnings {
        t.note(w);
    }
    Ok(Outcome {
        tables: vec![t],
        ok: any,
    })
}

fn verify_all(pool: &ContextPool, data: &Data) -> paramodular::Result<Outcome> {
    let outcomes = verify_table(pool, &data.records, &data.table);
    let mut t = Table::new([
        "p", "j", "k", "q", "ell", "trace", "b", "trace'", "b'", "form", "verdict", "status",
    ])
    .title("congruence table; primed columns are recomputed");
    for o in &outcomes {
        let r = &o.row;
        let mut row = vec![
            r.p.to_string(),
            r.j.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            r.ell.to_string(),
            r.trace.to_string(),
            r.b.to_string(),
        ];
        match &o.result {
            Ok(rep) => {
                row.extend([
                    rep.trace.total.to_string(),
                    rep.trace.new.to_string(),
                    rep.congruence.label.clone().unwrap_or_else(|| "-".into()),
                    rep.congruence.verdict.to_string(),
                    if o.passed() { "ok" } else { "MISMATCH" }.to_string(),
                ]);
            }
            Err(e) => {
                row.extend([
                    "-".into(),
                    "-".into(),
                    r.form.clone().unwrap_or_else(|| "-".into()),
                    "-".into(),
                    "ERROR".into(),
                ]);
                t.note(format!(
                    "error at p = {}, (j, k) = ({}, {}): {e}",
                    r.p, r.j, r.k
                ));
            }
        }
        t.push(row);
    }
    Ok(Outcome {
        ok: outcomes.iter().all(|o| o.passed()),
        tables: vec![t],
    })
}

fn run(cli: &Cli) -> paramodular::Result<Outcome> {
    let (pool, data) = load_data(cli)?;
    match &cli.command {
        Command::Gamma { p } => {
            check_p(*p)?;
            gamma(&pool, *p)
        }
        Command::Dims { p, j, k } => {
            check_p(*p)?;
            dims(&pool, *p, j.zip(*k))
        }
        Command::HeckeReps { p, q, group } => {
            check_p(*p)?;
            hecke_reps(&pool, *p, *q, *group)
        }
        Command::Trace { p, q, j, k, power } => {
            check_p(*p)?;
            trace(&pool, *p, *q, *j, *k, *power)
        }
        Command::Eigenvalue { p, q, j, k } => {
            check_p(*p)?;
            eigenvalue(&pool, &data, *p, *q, *j, *k)
        }
        Command::Verify {
            p,
            q,
            j,
            k,
            ell,
            record,
        } => {
            check_p(*p)?;
            verify(&pool, &data, (*p, *q, *j, *k), *ell, record.as_deref())
        }
        Command::VerifyTable => verify_all(&pool, &data),
    }
}

/// Failed internal checks are verification failures; everything else is
/// a problem with the input.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) | Error::ClassNumberNotOne { .. } | Error::DegreeMismatch { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", render_all(&out.tables, cli.format));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
