use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use secdeg::analytic::{
    c_table, identity_checks, p_bound_check, p_table, tail::TailConfig, IdentityOptions,
};
use secdeg::experiments::{
    bound_checks, concentration_report, cv_trend, monte_carlo, theorem1_report, theorem2_report,
    with_threads, BoundOptions, ExperimentConfig, Theorem2Source,
};
use secdeg::oracle::{dp_expectations, dp_vs_enum, enumerate_exact_with_cap, ExpectationTable};
use secdeg::{edgelist, generate, joint_counts, Mode};

use crate::args::*;
use crate::{diagnostic, Outcome};

pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl From<secdeg::Error> for Failure {
    fn from(e: secdeg::Error) -> Self {
        let kind = match e {
            secdeg::Error::Io(_) => "io",
            secdeg::Error::Parse { .. } => "parse",
            _ => "runtime",
        };
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            kind: "io",
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        message: message.into(),
    }
}

type Run = Result<Outcome, Failure>;

fn open_out(out: &OutArgs) -> io::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &OutArgs, v: &Value) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Failure {
        kind: "io",
        message: e.to_string(),
    })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn verdict(pass: bool, details: impl FnOnce() -> Value) -> Outcome {
    if pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed(details())
    }
}

pub fn dispatch(cli: Cli) -> Run {
    match cli.command {
        Command::Generate(a) => generate_cmd(a),
        Command::Stats(a) => stats_cmd(a),
        Command::Analytic(AnalyticCommand::Ctable(a)) => ctable_cmd(a),
        Command::Analytic(AnalyticCommand::Ptable(a)) => ptable_cmd(a),
        Command::Oracle(OracleCommand::Dp(a)) => dp_cmd(a),
        Command::Oracle(OracleCommand::Enum(a)) => enum_cmd(a),
        Command::Oracle(OracleCommand::Diff(a)) => diff_cmd(a),
        Command::Mc(a) => mc_cmd(a),
        Command::Report(ReportCommand::Theorem1(a)) => theorem1_cmd(a),
        Command::Report(ReportCommand::Theorem2(a)) => theorem2_cmd(a),
        Command::Report(ReportCommand::Concentration(a)) => concentration_cmd(a),
        Command::Report(ReportCommand::Bounds(a)) => bounds_cmd(a),
    }
}

fn generate_cmd(a: GenerateArgs) -> Run {
    if a.m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    let total =
        a.n.checked_mul(a.m)
            .ok_or_else(|| usage("n * m overflows"))?;
    let h = generate(total, a.seed)?;
    edgelist::write(open_out(&a.out)?, &h, a.m)?;
    Ok(Outcome::Ok)
}

fn read_edgelist(path: &Path) -> Result<edgelist::EdgeList, Failure> {
    let file = File::open(path).map_err(|e| Failure {
        kind: "io",
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(edgelist::read(BufReader::new(file))?)
}

fn stats_cmd(a: StatsArgs) -> Run {
    let list = read_edgelist(&a.input)?;
    let g = list.history.into_graph().collapse(list.m)?;
    let census = joint_counts(&g);
    match a.format {
        Format::Csv => census.write_csv(open_out(&a.out)?)?,
        Format::Json => write_json(&a.out, &census.to_json())?,
    }
    if a.check {
        let errs = census.consistency_errors();
        return Ok(verdict(
            errs.is_empty(),
            || json!({"check": "census", "errors": errs}),
        ));
    }
    Ok(Outcome::Ok)
}

fn ctable_cmd(a: CtableArgs) -> Run {
    let t = &a.table;
    let c = c_table(t.lmax, t.kmax, t.mode.into())?;
    c.write_csv(open_out(&t.out)?)?;
    if !a.check {
        return Ok(Outcome::Ok);
    }
    let opts = IdentityOptions {
        tol: a.tol,
        z_tol: a.z_tol,
        rows: a.rows.min(t.lmax),
        z_columns: a.z_columns.min(t.kmax),
        tail: (!a.no_tail).then(TailConfig::default),
    };
    let report = identity_checks(&c, None, &opts);
    let v = serde_json::to_value(&report).expect("report serializes");
    diagnostic(json!({"level": "info", "check": "identities", "report": v}));
    Ok(verdict(
        report.pass,
        || json!({"check": "identities", "lmax": t.lmax, "kmax": t.kmax}),
    ))
}

fn ptable_cmd(a: PtableArgs) -> Run {
    let t = &a.table;
    let p = p_table(t.lmax, t.kmax, t.mode.into())?;
    p.write_csv(open_out(&t.out)?)?;
    if !a.check {
        return Ok(Outcome::Ok);
    }
    let check = p_bound_check(&p);
    let v = serde_json::to_value(&check).expect("report serializes");
    diagnostic(json!({"level": "info", "check": "p_bound", "report": v}));
    Ok(verdict(
        check.pass,
        || json!({"check": "p_bound", "violations": check.violations.len()}),
    ))
}

fn write_table(t: &ExpectationTable, format: Format, out: &OutArgs) -> Result<(), Failure> {
    match format {
        Format::Csv => t.write_csv(open_out(out)?)?,
        Format::Json => write_json(out, &t.to_json())?,
    }
    Ok(())
}

fn dp_cmd(a: DpArgs) -> Run {
    let t = dp_expectations(a.n, a.lmax, a.kmax, a.dmax.unwrap_or(a.lmax), a.mode.into())?;
    write_table(&t, a.format, &a.out)?;
    Ok(Outcome::Ok)
}

fn enum_cmd(a: EnumArgs) -> Run {
    let t = with_threads(a.threads.threads, || enumerate_exact_with_cap(a.n, a.cap))??;
    write_table(&t, a.format, &a.out)?;
    Ok(Outcome::Ok)
}

fn diff_cmd(a: DiffArgs) -> Run {
    let mode: Mode = a.mode.into();
    let r = with_threads(a.threads.threads, || dp_vs_enum(a.n, mode, a.cap))??;
    let mut v = serde_json::to_value(&r).expect("report serializes");
    v["version"] = secdeg::VERSION_TAG.into();
    v["kind"] = "diff".into();
    v["pass"] = r.pass(a.tol).into();
    write_json(&a.out, &v)?;
    for e in &r.lemma2_exceptions {
        diagnostic(
            json!({"level": "warning", "kind": "lemma2_exception", "l": e.l, "k": e.k, "value": e.value, "bound": e.bound}),
        );
    }
    Ok(verdict(
        r.pass(a.tol),
        || json!({"check": "diff", "mismatches": r.mismatches, "max_abs_diff": r.max_abs_diff, "uncovered": r.uncovered.len()}),
    ))
}

fn mc_cmd(a: McArgs) -> Run {
    let cfg = ExperimentConfig {
        n: a.n,
        m: a.m,
        reps: a.reps,
        kmax: a.kmax,
        dmax: a.dmax,
        seed: a.seed,
        threads: a.threads.threads,
        first_replicate: a.first_replicate,
    };
    let mut r = monte_carlo(&cfg)?;
    if a.compare {
        r.attach_expectations()?;
    }
    match a.format {
        Format::Csv => r.write_csv(open_out(&a.out)?)?,
        Format::Json => write_json(&a.out, &r.to_json())?,
    }
    Ok(Outcome::Ok)
}

fn emit<C: serde::Serialize, R: serde::Serialize>(
    r: &secdeg::experiments::Report<C, R>,
    out: &ReportOut,
) -> Result<(), Failure> {
    match out.format {
        Format::Csv => r.write_csv(open_out(&out.out)?)?,
        Format::Json => r.write_json(open_out(&out.out)?)?,
    }
    Ok(())
}

fn theorem1_cmd(a: Theorem1Args) -> Run {
    if a.m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    let r = theorem1_report(a.n, a.m, a.dmax, a.reps, a.seed, a.threads.threads, a.tol)?;
    emit(&r, &a.report)?;
    Ok(verdict(r.pass, || {
        let bad: Vec<_> = r.rows.iter().filter(|x| !x.within).map(|x| x.d).collect();
        json!({"check": "theorem1", "degrees_outside": bad})
    }))
}

fn theorem2_cmd(a: Theorem2Args) -> Run {
    let source = match a.source {
        Source::Dp => Theorem2Source::Dp,
        Source::Mc => Theorem2Source::Mc {
            reps: a.reps,
            seed: a
                .seed
                .ok_or_else(|| usage("--seed is required with --source mc"))?,
            threads: a.threads.threads,
        },
    };
    let r = theorem2_report(a.n, a.kmin, a.kmax, source, a.envelope_c)?;
    emit(&r, &a.report)?;
    Ok(verdict(r.pass, || {
        let bad: Vec<_> = r.rows.iter().filter(|x| !x.within).map(|x| x.k).collect();
        json!({"check": "theorem2", "k_outside": bad})
    }))
}

fn concentration_cmd(a: ConcentrationArgs) -> Run {
    let threads = a.threads.threads;
    let r = concentration_report(a.n, &a.klist, a.reps, a.seed, threads, a.cv_max)?;
    let trend = match a.compare_n {
        Some(n) => {
            let base = concentration_report(n, &a.klist, a.reps, a.seed, threads, f64::INFINITY)?;
            Some(cv_trend(&base, &r))
        }
        None => None,
    };
    match (a.report.format, &trend) {
        (Format::Json, Some(t)) => {
            let mut v = r.to_json();
            v["trend"] = t.to_json();
            write_json(&a.report.out, &v)?;
        }
        _ => emit(&r, &a.report)?,
    }
    let trend_pass = trend.as_ref().is_none_or(|t| t.pass);
    Ok(verdict(r.pass && trend_pass, || {
        let exceed: Vec<_> = r
            .rows
            .iter()
            .filter(|x| x.exceedances > 0)
            .map(|x| x.k)
            .collect();
        let cv: Vec<_> = r.rows.iter().filter(|x| !x.cv_ok).map(|x| x.k).collect();
        json!({"check": "concentration", "k_with_exceedances": exceed, "k_cv_above_max": cv, "trend_pass": trend_pass})
    }))
}

fn bounds_cmd(a: BoundsArgs) -> Run {
    if a.n_grid.is_empty() || a.n_grid.contains(&0) {
        return Err(usage("--n-grid needs positive vertex counts"));
    }
    let opts = BoundOptions {
        lmax: a.lmax,
        kmax: a.kmax,
        ..BoundOptions::default()
    };
    let r = bound_checks(&a.n_grid, &opts)?;
    match a.report.format {
        Format::Csv => r.write_csv(open_out(&a.report.out)?)?,
        Format::Json => r.write_json(open_out(&a.report.out)?)?,
    }
    for x in &r.lemma2 {
        for e in &x.boundary_exceptions {
            diagnostic(
                json!({"level": "warning", "kind": "lemma2_exception", "n": x.n, "l": e.l, "k": e.k, "value": e.value, "bound": e.bound}),
            );
        }
    }
    Ok(verdict(r.pass, || {
        json!({
            "check": "bounds",
            "lemma1": r.lemma1.iter().filter(|x| !x.pass).map(|x| json!({"n": x.n, "failing_d": x.failures})).collect::<Vec<_>>(),
            "theorem4": r.theorem4.iter().filter(|x| !x.pass).map(|x| json!({"n": x.n, "failing_cells": x.failures})).collect::<Vec<_>>(),
            "lemma2": r.lemma2.iter().filter(|x| !x.pass).map(|x| json!({"n": x.n, "violations": x.violations.len(), "worst_ratio": x.worst_ratio})).collect::<Vec<_>>(),
        })
    }))
}
