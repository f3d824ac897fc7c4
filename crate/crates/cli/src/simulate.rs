//! Experiments under the equicorrelated Gaussian model.

use coma_core::closure::ClosedTesting;
use coma_core::gaussmodel::{
    asymptotic_power, asymptotic_type1, combine_noise, draw_noise, draw_signal, draw_trial, p_value, rejection_curve,
    EstimateKind, GaussianModelConfig, MeanTest, SignalMean,
};
use coma_core::{threshold_fn, Backend, Error, LocalTestSpec, ScoreSet, SubsetQuery};
use rayon::prelude::*;

use crate::args::{Experiment, SimulateArgs};
use crate::commands::build_spec;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Value};

pub fn simulate(a: &SimulateArgs) -> CliResult<Report> {
    validate(a)?;
    let specs = a
        .r
        .iter()
        .map(|&r| build_spec(Some(r), a.backend, a.table.as_deref()))
        .collect::<CliResult<Vec<_>>>()?;
    let report = Report::new("experiment", a.experiment.name(), &[])
        .config("m", a.m)
        .config("trials", a.trials)
        .config("alpha", a.alpha)
        .config("backend", a.backend.name())
        .config("seed", a.seed)
        .config("r", Value::List(a.r.iter().map(|&r| crate::output::format_g(r)).collect()))
        .config("rho", Value::List(a.rho.iter().map(|&r| crate::output::format_g(r)).collect()));
    match a.experiment {
        Experiment::Type1Curve => curve(a, &specs, report, false),
        Experiment::PowerCurve => curve(a, &specs, report.config("mu", a.mu).config("pi", a.pi), true),
        Experiment::ComaCurve => {
            let sizes = Value::List(a.set_sizes().iter().map(usize::to_string).collect());
            coma_curve(a, &specs, report.config("mu", a.mu).config("pi", a.pi).config("pi_in", a.pi_in).config("sizes", sizes))
        }
        Experiment::FdpExp => selection(a, &specs, report.config("mu", a.mu).config("pi", a.pi).config("gamma", a.gamma), true),
        Experiment::FwerExp => selection(a, &specs, report.config("mu", a.mu).config("pi", a.pi), false),
    }
}

fn validate(a: &SimulateArgs) -> CliResult<()> {
    for &rho in &a.rho {
        GaussianModelConfig { m: a.m, rho, mu: a.mu, pi: a.pi, seed: a.seed }.validate()?;
    }
    if !(0.0..=1.0).contains(&a.pi_in) {
        return Err(CliError::Usage(format!("--pi-in {} must lie in [0, 1]", a.pi_in)));
    }
    if !(0.0..1.0).contains(&a.gamma) {
        return Err(Error::InvalidGamma(a.gamma).into());
    }
    if let Some(&k) = a.set_sizes().iter().find(|&&k| k == 0 || k > a.m) {
        return Err(CliError::Usage(format!("--sizes entry {k} is outside 1..={}", a.m)));
    }
    if a.rho.is_empty() || a.r.is_empty() {
        return Err(CliError::Usage("--r and --rho need at least one value".into()));
    }
    Ok(())
}

fn curve(a: &SimulateArgs, specs: &[LocalTestSpec], report: Report, with_signal: bool) -> CliResult<Report> {
    let kind = if with_signal { EstimateKind::Power } else { EstimateKind::TypeI };
    let columns: &[&'static str] = if with_signal {
        &["rho", "r", "mu", "pi", "threshold", "power", "std_err", "asymptotic"]
    } else {
        &["rho", "r", "threshold", "type1", "std_err", "asymptotic"]
    };
    let mut report = Report { columns: columns.to_vec(), ..report };
    let (mu, pi) = if with_signal { (a.mu, a.pi) } else { (0.0, 0.0) };
    let base = GaussianModelConfig { m: a.m, rho: a.rho[0], mu, pi, seed: a.seed };
    let thresholds = specs
        .iter()
        .map(|s| threshold_fn(s, a.m)?.critical_value(a.m, a.alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let tests =
        specs.iter().zip(&thresholds).map(|(s, &c)| MeanTest::new(s.r(), c)).collect::<Result<Vec<_>, _>>()?;
    let rates = rejection_curve(&base, &a.rho, &tests, a.trials, kind)?;
    for (ri, &rho) in a.rho.iter().enumerate() {
        for (ti, spec) in specs.iter().enumerate() {
            let r = spec.r();
            let limit = if spec.backend() == Backend::GaussAsymptotic {
                let v = if with_signal {
                    asymptotic_power(rho, r, a.alpha, SignalMean::Finite(mu), pi)
                } else {
                    asymptotic_type1(rho, r, a.alpha)
                };
                v.ok()
            } else {
                None
            };
            let est = rates[ri][ti];
            let mut row: Vec<Value> = vec![rho.into(), r.into()];
            if with_signal {
                row.extend([mu.into(), pi.into()]);
            }
            row.extend([thresholds[ti].into(), est.value.into(), est.std_err.into(), limit.into()]);
            report.push(row);
        }
    }
    Ok(report)
}

/// Mean and standard error of the mean.
fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `coma(S_k)` for `S_k` the first `k` coordinates, which carry signal with
/// probability `pi_in`; the rest with probability `pi`.
fn coma_curve(a: &SimulateArgs, specs: &[LocalTestSpec], report: Report) -> CliResult<Report> {
    let mut report = Report { columns: vec!["rho", "r", "size", "coma_mean", "coma_std_err"], ..report };
    let m = a.m;
    let sizes = a.set_sizes();
    let per_trial = (0..a.trials)
        .into_par_iter()
        .map(|t| {
            let mut z = vec![0.0; m];
            let z0 = draw_noise(a.seed, t, &mut z);
            // the same uniforms decide both masks
            let (mut inside, mut outside) = (vec![false; m], vec![false; m]);
            draw_signal(a.seed, t, a.pi_in, &mut inside);
            draw_signal(a.seed, t, a.pi, &mut outside);
            let mut x = vec![0.0; m];
            let mut out = Vec::with_capacity(a.rho.len() * specs.len() * sizes.len());
            for &rho in &a.rho {
                for spec in specs {
                    for &k in &sizes {
                        let mask: Vec<bool> = (0..m).map(|i| if i < k { inside[i] } else { outside[i] }).collect();
                        combine_noise(z0, &z, rho, a.mu, &mask, &mut x);
                        let p: Vec<f64> = x.iter().map(|&xi| p_value(xi)).collect();
                        let sc = ScoreSet::new(&p)?;
                        let members: Vec<usize> = (0..k).collect();
                        let q = SubsetQuery::new(&members, &sc)?;
                        out.push(ClosedTesting::new(&sc, spec, a.alpha)?.coma(&q)?);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>, Error>>()?;
    let mut cell = 0;
    for &rho in &a.rho {
        for spec in specs {
            for &k in &sizes {
                let (mean, se) = mean_se(per_trial.iter().map(|v| v[cell]));
                report.push(vec![rho.into(), spec.r().into(), k.into(), mean.into(), se.into()]);
                cell += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    fdp: f64,
    error: bool,
    power: Option<f64>,
}

fn selection(a: &SimulateArgs, specs: &[LocalTestSpec], report: Report, fdp: bool) -> CliResult<Report> {
    let columns: &[&'static str] = if fdp {
        &["rho", "r", "mean_fdp", "prob_fdp_exceeds", "std_err", "power"]
    } else {
        &["rho", "r", "fwer", "std_err", "power"]
    };
    let mut report = Report { columns: columns.to_vec(), ..report };
    for &rho in &a.rho {
        let cfg = GaussianModelConfig { m: a.m, rho, mu: a.mu, pi: a.pi, seed: a.seed };
        for spec in specs {
            let outcomes = (0..a.trials)
                .into_par_iter()
                .map(|t| {
                    let trial = draw_trial(&cfg, t);
                    let sc = ScoreSet::new(&trial.p_values())?;
                    let ct = ClosedTesting::new(&sc, spec, a.alpha)?;
                    let selected =
                        if fdp { ct.largest_fdp_set(a.gamma, None)?.selected } else { ct.largest_fwer_set().selected };
                    let false_hits = selected.iter().filter(|&&i| !trial.signal[i]).count();
                    let signals = trial.signal.iter().filter(|&&s| s).count();
                    let share = if selected.is_empty() { 0.0 } else { false_hits as f64 / selected.len() as f64 };
                    Ok(Outcome {
                        fdp: share,
                        error: if fdp { share > a.gamma } else { false_hits > 0 },
                        power: (signals > 0).then(|| (selected.len() - false_hits) as f64 / signals as f64),
                    })
                })
                .collect::<Result<Vec<Outcome>, Error>>()?;
            let n = outcomes.len() as f64;
            let rate = outcomes.iter().filter(|o| o.error).count() as f64 / n;
            let se = (rate * (1.0 - rate) / n).sqrt();
            let powers: Vec<f64> = outcomes.iter().filter_map(|o| o.power).collect();
            let power = (!powers.is_empty()).then(|| powers.iter().sum::<f64>() / powers.len() as f64);
            let mut row: Vec<Value> = vec![rho.into(), spec.r().into()];
            if fdp {
                row.push((outcomes.iter().map(|o| o.fdp).sum::<f64>() / n).into());
            }
            row.extend([rate.into(), se.into(), power.into()]);
            report.push(row);
        }
    }
    Ok(report)
}
