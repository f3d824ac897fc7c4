//! Subcommands that work on a file of p-values.

use std::path::Path;
use std::sync::Arc;

use coma_core::calibration::empirical_calibration;
use coma_core::closure::ClosedTesting;
use coma_core::{Calibration, CalibrationTable, Error, LocalTestSpec, ScoreSet, SubsetQuery};

use crate::args::{BackendArg, DataArgs, SelectMode, TestArgs};
use crate::error::{CliError, CliResult};
use crate::input::{read_scores, Scores};
use crate::output::{Report, Value};

pub const DEFAULT_R: f64 = -1.0;

pub fn load_table(path: &Path) -> CliResult<CalibrationTable> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    CalibrationTable::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Local test for the given flags. An empirical table supplies `r` when
/// `--r` is absent.
pub fn build_spec(r: Option<f64>, backend: BackendArg, table: Option<&Path>) -> CliResult<LocalTestSpec> {
    match (backend, table) {
        (BackendArg::Empirical, None) => Err(CliError::Usage("--backend empirical requires --table".into())),
        (BackendArg::Empirical, Some(path)) => {
            let table = load_table(path)?;
            let r = r.unwrap_or(table.r);
            Ok(LocalTestSpec::new(r, Calibration::Empirical(Arc::new(table)))?)
        }
        (_, Some(_)) => Err(CliError::Usage("--table is only used with --backend empirical".into())),
        (BackendArg::Arbitrary, None) => Ok(LocalTestSpec::arbitrary(r.unwrap_or(DEFAULT_R))?),
        (BackendArg::Gauss, None) => Ok(LocalTestSpec::gauss(r.unwrap_or(DEFAULT_R))?),
    }
}

struct Loaded {
    scores: Scores,
    set: ScoreSet,
    spec: LocalTestSpec,
}

fn load(data: &DataArgs) -> CliResult<Loaded> {
    let scores = read_scores(&data.input)?;
    let set = ScoreSet::new(&scores.values)?;
    let t = &data.test;
    let spec = build_spec(t.r, t.backend, t.table.as_deref())?;
    Ok(Loaded { scores, set, spec })
}

/// `all`, `top-K`, or a comma-separated list of ids.
pub fn parse_set(text: &str, scores: &Scores, set: &ScoreSet) -> CliResult<SubsetQuery> {
    let text = text.trim();
    if text == "all" {
        return Ok(SubsetQuery::all(set));
    }
    if let Some(k) = text.strip_prefix("top-") {
        let k: usize = k.parse().map_err(|_| CliError::Usage(format!("invalid --set '{text}'")))?;
        if k == 0 || k > set.m() {
            return Err(Error::IndexOutOfRange { index: k, m: set.m() }.into());
        }
        return Ok(SubsetQuery::smallest(k, set));
    }
    let index = scores.index_of();
    let members = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|id| index.get(id).copied().ok_or_else(|| CliError::Usage(format!("unknown id '{id}' in --set"))))
        .collect::<CliResult<Vec<usize>>>()?;
    if members.is_empty() {
        return Err(CliError::Usage("--set is empty".into()));
    }
    Ok(SubsetQuery::new(&members, set)?)
}

fn with_test(report: Report, input: &Path, t: &TestArgs, spec: &LocalTestSpec) -> Report {
    report
        .config("input", input.display().to_string())
        .config("r", spec.r())
        .config("alpha", t.alpha)
        .config("backend", t.backend.name())
        .config("table", t.table.as_ref().map(|p| p.display().to_string()))
}

fn ids_of(scores: &Scores, members: &[usize]) -> Value {
    Value::List(members.iter().map(|&i| scores.ids[i].clone()).collect())
}

pub fn combine(data: &DataArgs) -> CliResult<Report> {
    let d = load(data)?;
    let alpha = data.test.alpha;
    let ct = ClosedTesting::new(&d.set, &d.spec, alpha)?;
    let all = SubsetQuery::all(&d.set);
    let m = d.set.m();
    let mean = ct.mean(&all)?;
    let critical = ct.threshold().critical_value(m, alpha)?;
    let rejected = ct.local_test(&all);
    let p_local = if ct.threshold().has_inverse() { Some(ct.adjusted_p_local(&all)?) } else { None };
    let mut report = with_test(
        Report::new("command", "combine", &["m", "mean", "critical_value", "decision", "p_local"]),
        &data.input,
        &data.test,
        &d.spec,
    );
    report.push(vec![
        m.into(),
        mean.into(),
        critical.into(),
        if rejected { "reject" } else { "accept" }.into(),
        p_local.into(),
    ]);
    Ok(report)
}

pub fn calibrate(r: f64, alpha: f64, max_m: usize, trials: u64, seed: u64) -> CliResult<Vec<u8>> {
    let table = empirical_calibration(r, alpha, max_m, trials, seed)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let mut text = table.to_json().into_bytes();
    text.push(b'\n');
    Ok(text)
}

pub fn adjust(data: &DataArgs, set: Option<&str>) -> CliResult<Report> {
    let d = load(data)?;
    let alpha = data.test.alpha;
    if !matches!(d.spec.calibration(), Calibration::ArbitraryDep | Calibration::GaussAsymptotic) {
        return Err(Error::UnsupportedInverse.into());
    }
    let ct = ClosedTesting::new(&d.set, &d.spec, alpha)?;
    let report = with_test(Report::new("command", "adjust", &[]), &data.input, &data.test, &d.spec);
    match set {
        None => {
            let mut report = Report { columns: vec!["id", "p", "p_closed", "rejected"], ..report };
            for (i, &p) in d.scores.values.iter().enumerate() {
                let q = SubsetQuery::new(&[i], &d.set)?;
                let pc = ct.adjusted_p_closed(&q)?;
                report.push(vec![d.scores.ids[i].clone().into(), p.into(), pc.into(), (pc <= alpha).into()]);
            }
            Ok(report)
        }
        Some(text) => {
            let q = parse_set(text, &d.scores, &d.set)?;
            let mut report =
                Report { columns: vec!["ids", "size", "p_local", "p_closed", "rejected"], ..report }.config("set", text);
            let pc = ct.adjusted_p_closed(&q)?;
            report.push(vec![
                ids_of(&d.scores, q.members()),
                q.len().into(),
                ct.adjusted_p_local(&q)?.into(),
                pc.into(),
                (pc <= alpha).into(),
            ]);
            Ok(report)
        }
    }
}

pub fn coma(data: &DataArgs, set: &str) -> CliResult<Report> {
    let d = load(data)?;
    if !matches!(d.spec.calibration(), Calibration::ArbitraryDep | Calibration::GaussAsymptotic) {
        return Err(Error::UnsupportedInverse.into());
    }
    let ct = ClosedTesting::new(&d.set, &d.spec, data.test.alpha)?;
    let q = parse_set(set, &d.scores, &d.set)?;
    let mut report = with_test(
        Report::new("command", "coma", &["size", "p_local", "p_closed", "coma"]),
        &data.input,
        &data.test,
        &d.spec,
    )
    .config("set", set);
    report.push(vec![
        q.len().into(),
        ct.adjusted_p_local(&q)?.into(),
        ct.adjusted_p_closed(&q)?.into(),
        ct.coma(&q)?.into(),
    ]);
    Ok(report)
}

pub fn bound(data: &DataArgs, set: &str) -> CliResult<Report> {
    let d = load(data)?;
    let ct = ClosedTesting::new(&d.set, &d.spec, data.test.alpha)?;
    let q = parse_set(set, &d.scores, &d.set)?;
    let e = ct.fdp_bound(&q);
    let mut report = with_test(
        Report::new("command", "bound", &["size", "false_bound", "true_discoveries", "rejected"]),
        &data.input,
        &data.test,
        &d.spec,
    )
    .config("set", set);
    report.push(vec![q.len().into(), e.into(), (q.len() - e).into(), ct.post_hoc_reject(&q).into()]);
    Ok(report)
}

pub fn select(data: &DataArgs, mode: &SelectMode) -> CliResult<Report> {
    let d = load(data)?;
    let ct = ClosedTesting::new(&d.set, &d.spec, data.test.alpha)?;
    let result = match mode.gamma {
        Some(gamma) => ct.largest_fdp_set(gamma, None)?,
        None => ct.largest_fwer_set(),
    };
    let mut report = with_test(
        Report::new("command", "select", &["ids", "size", "guarantee"]),
        &data.input,
        &data.test,
        &d.spec,
    )
    .config("gamma", mode.gamma);
    report.push(vec![ids_of(&d.scores, &result.selected), result.size.into(), result.guarantee.to_string().into()]);
    Ok(report)
}
