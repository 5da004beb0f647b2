use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

use pmh_core::datasets::{self, SV_INITIAL_PARAMS, SV_NAIVE_STEP_SIZES, SV_SYNTHETIC_PARAMS};
use pmh_core::diagnostics::{
    default_thinning_lag, ks_stationarity_test, loglik_std_study_lgss, loglik_std_study_sv, mixing_report,
    posterior_summary, state_error_metrics,
};
use pmh_core::io::{
    compute_log_returns, fmt_f64, read_matrix_file, read_prices_file, read_series_file, read_trace_file,
    write_matrix, write_series, write_trace, Summary,
};
use pmh_core::models::{simulate_lgss, simulate_sv};
use pmh_core::particle_filter::fully_adapted_lgss;
use pmh_core::pmh::{estimate_preconditioner, estimate_preconditioner_unconstrained, run_pmh_lgss, run_pmh_sv};
use pmh_core::{kalman_filter, stream, ChainConfig, ChainTrace, LgssParameters, ProposalConfig, SvParameters, TimeSeries};

use crate::{
    ChainArgs, Command, DiagnoseArgs, FilterArgs, GenerateArgs, ModelKind, NStudyArgs, PmhLgssArgs, PmhSvArgs,
    TuneArgs,
};

/// Posterior mean reported for the OMXS30 data, used as the default N-study point.
const SV_STUDY_PARAMS: SvParameters = SvParameters {
    mu: -0.23,
    phi: 0.97,
    sigma_v: 0.15,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::GenerateData(a) => generate(a),
        Command::FilterLgss(a) => filter_lgss(a),
        Command::PmhLgss(a) => pmh_lgss(a),
        Command::PmhSv(a) => pmh_sv(a),
        Command::TuneProposal(a) => tune(a),
        Command::NStudy(a) => n_study(a),
        Command::Diagnose(a) => diagnose(a),
    }
}

fn out_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).with_context(|| format!("--out: cannot create {}", dir.display()))?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> pmh_core::Result<()>) -> Result<PathBuf> {
    let mut w = create(dir, name)?;
    f(&mut w)?;
    w.flush()?;
    Ok(dir.join(name))
}

fn load_series(path: &Path) -> Result<TimeSeries> {
    if !path.exists() {
        bail!("--data: {} does not exist", path.display());
    }
    read_series_file(path).with_context(|| format!("--data: cannot read {}", path.display()))
}

/// Series files are used as they are; price files are turned into log-returns.
fn load_returns(path: &Path, from: Option<&str>, to: Option<&str>) -> Result<TimeSeries> {
    if !path.exists() {
        bail!("--data: {} does not exist", path.display());
    }
    let header = fs::read_to_string(path)
        .with_context(|| format!("--data: cannot read {}", path.display()))?
        .lines()
        .next()
        .unwrap_or_default()
        .to_ascii_lowercase();
    if !header.split(',').any(|h| h.trim() == "date") {
        return load_series(path);
    }
    let prices = read_prices_file(path).with_context(|| format!("--data: cannot read {}", path.display()))?;
    let prices = match (from, to) {
        (None, None) => prices,
        (f, t) => prices.window(f.unwrap_or("0000-01-01"), t.unwrap_or("9999-12-31")),
    };
    Ok(compute_log_returns(&prices)?)
}

fn generate(a: GenerateArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let mut rng = stream(a.common.seed);
    let (series, name) = match a.kind {
        ModelKind::Lgss => {
            let d = LgssParameters::default();
            let params = LgssParameters::new(
                a.phi.unwrap_or(d.phi),
                a.sigma_v.unwrap_or(d.sigma_v),
                a.sigma_e.unwrap_or(d.sigma_e),
            );
            (simulate_lgss(&params, a.length, a.x0, &mut rng)?, "lgss.csv")
        }
        ModelKind::Sv => {
            let d = SV_SYNTHETIC_PARAMS;
            let params = SvParameters {
                mu: a.mu.unwrap_or(d.mu),
                phi: a.phi.unwrap_or(d.phi),
                sigma_v: a.sigma_v.unwrap_or(d.sigma_v),
            };
            (simulate_sv(&params, a.length, &mut rng)?, "sv.csv")
        }
    };
    let path = write_file(dir, name, |w| write_series(&series, w))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn filter_lgss(a: FilterArgs) -> Result<()> {
    let data = match &a.data {
        Some(p) => load_series(p)?,
        None => datasets::reference_lgss(),
    };
    let params = LgssParameters::new(a.model.phi, a.model.sigma_v, a.model.sigma_e);
    let pf = fully_adapted_lgss(&data.observations, &params, a.particles, a.model.x0, &mut stream(a.common.seed))?;
    let kf = kalman_filter(&data.observations, &params, a.model.x0)?;
    let metrics = state_error_metrics(&pf.state_estimates[1..], &kf.filtered_means)?;

    let dir = out_dir(&a.common.out)?;
    write_file(dir, "states.csv", |w| {
        let mut s = String::from("t,x_pf,x_kf\n");
        s.push_str(&format!("0,{},{}\n", fmt_f64(pf.state_estimates[0]), fmt_f64(a.model.x0)));
        for (t, kf_mean) in kf.filtered_means.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", t + 1, fmt_f64(pf.state_estimates[t + 1]), fmt_f64(*kf_mean)));
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    })?;
    let mut summary = Summary::new();
    summary
        .text("experiment", "filter-lgss")
        .text("particles", a.particles)
        .text("seed", a.common.seed)
        .text("observations", data.len())
        .number("loglik_pf", pf.log_likelihood)
        .number("loglik_kf", kf.log_likelihood)
        .number("bias", metrics.bias)
        .number("mse", metrics.mse)
        .number("log_bias", metrics.log_bias)
        .number("log_mse", metrics.log_mse);
    write_file(dir, "summary.txt", |w| summary.write(w))?;
    println!(
        "log-bias {:.2}  log-MSE {:.2}  loglik pf {:.3} kf {:.3}",
        metrics.log_bias, metrics.log_mse, pf.log_likelihood, kf.log_likelihood
    );
    Ok(())
}

fn proposal_from(chain: &ChainArgs, default_steps: &[f64]) -> Result<ProposalConfig> {
    if let Some(path) = &chain.covariance {
        if !path.exists() {
            bail!("--covariance: {} does not exist", path.display());
        }
        let m = read_matrix_file(path).with_context(|| format!("--covariance: cannot read {}", path.display()))?;
        return Ok(ProposalConfig::preconditioned(m));
    }
    let steps = chain.step_size.as_deref().unwrap_or(default_steps);
    if steps.len() != default_steps.len() {
        bail!("--step-size: expected {} values, got {}", default_steps.len(), steps.len());
    }
    if steps.iter().any(|s| *s < 0.0 || !s.is_finite()) {
        bail!("--step-size: values must be finite and non-negative");
    }
    Ok(ProposalConfig::diagonal(steps))
}

fn chain_config(chain: &ChainArgs, seed: u64, defaults: (usize, usize, usize), initial: &[f64]) -> Result<ChainConfig> {
    let (particles, iterations, burn_in) = defaults;
    let config = ChainConfig {
        particles: chain.particles.unwrap_or(particles),
        iterations: chain.iterations.unwrap_or(iterations),
        burn_in: chain.burnin.unwrap_or(burn_in),
        initial_parameters: chain.initial.clone().unwrap_or_else(|| initial.to_vec()),
        seed,
    };
    if config.initial_parameters.len() != initial.len() {
        bail!("--initial: expected {} values, got {}", initial.len(), config.initial_parameters.len());
    }
    config.validate().context("--iterations/--burnin/--particles")?;
    Ok(config)
}

fn chain_summary(trace: &ChainTrace, config: &ChainConfig, lags: usize, experiment: &str) -> Result<Summary> {
    let post = posterior_summary(trace, config.burn_in)?;
    let mixing = mixing_report(trace, config.burn_in, lags)?;
    let mut s = Summary::new();
    s.text("experiment", experiment)
        .text("particles", config.particles)
        .text("iterations", config.iterations)
        .text("burn_in", config.burn_in)
        .text("seed", config.seed)
        .text("lags", lags)
        .number("acceptance_rate", mixing.acceptance_rate);
    for (j, name) in post.parameter_names.iter().enumerate() {
        s.number(format!("{name}.mean"), post.mean[j])
            .number(format!("{name}.std"), post.std[j])
            .number(format!("{name}.ci_lower"), post.credible_interval_95[j].0)
            .number(format!("{name}.ci_upper"), post.credible_interval_95[j].1)
            .number(format!("{name}.iact"), mixing.iact[j]);
    }
    Ok(s)
}

fn report(summary: &Summary) {
    for (k, v) in summary.entries() {
        println!("{k} = {v}");
    }
}

fn pmh_lgss(a: PmhLgssArgs) -> Result<()> {
    let data = match &a.data {
        Some(p) => load_series(p)?,
        None => datasets::reference_lgss(),
    };
    let config = chain_config(&a.chain, a.common.seed, (100, 5000, 1000), &[0.5])?;
    let proposal = proposal_from(&a.chain, &[0.1])?;
    let trace = run_pmh_lgss(&data, &config, &proposal, a.sigma_v, a.sigma_e, a.x0)?;

    let dir = out_dir(&a.common.out)?;
    write_file(dir, "trace.csv", |w| write_trace(&trace, w))?;
    let summary = chain_summary(&trace, &config, a.chain.lags, "pmh-lgss")?;
    write_file(dir, "summary.txt", |w| summary.write(w))?;
    report(&summary);
    Ok(())
}

fn pmh_sv(a: PmhSvArgs) -> Result<()> {
    let data = match &a.data {
        Some(p) => load_returns(p, a.from.as_deref(), a.to.as_deref())?,
        None => datasets::synthetic_sv(),
    };
    let config = chain_config(&a.chain, a.common.seed, (500, 7500, 2500), &SV_INITIAL_PARAMS.to_array())?;
    let proposal = proposal_from(&a.chain, &SV_NAIVE_STEP_SIZES)?.with_reparametrization(a.reparam);
    let trace = run_pmh_sv(&data, &config, &proposal)?;

    let dir = out_dir(&a.common.out)?;
    write_file(dir, "trace.csv", |w| write_trace(&trace, w))?;
    if let Some(paths) = &trace.state_trajectories {
        let kept = &paths[config.burn_in..];
        let n = kept.len() as f64;
        write_file(dir, "states.csv", |w| {
            let mut s = String::from("t,y,x_mean\n");
            for t in 0..=data.len() {
                let mean = kept.iter().map(|p| p[t]).sum::<f64>() / n;
                let y = if t == 0 { String::new() } else { fmt_f64(data.observations[t - 1]) };
                s.push_str(&format!("{t},{y},{}\n", fmt_f64(mean)));
            }
            w.write_all(s.as_bytes())?;
            Ok(())
        })?;
    }
    let mut summary = chain_summary(&trace, &config, a.chain.lags, "pmh-sv")?;
    summary.text("reparametrized", a.reparam);
    write_file(dir, "summary.txt", |w| summary.write(w))?;
    report(&summary);
    Ok(())
}

fn tune(a: TuneArgs) -> Result<()> {
    if !a.trace.exists() {
        bail!("--trace: {} does not exist", a.trace.display());
    }
    let trace = read_trace_file(&a.trace).with_context(|| format!("--trace: cannot read {}", a.trace.display()))?;
    let matrix: DMatrix<f64> = if a.reparam {
        estimate_preconditioner_unconstrained(&trace, a.burnin)?
    } else {
        estimate_preconditioner(&trace, a.burnin)?
    };
    let dir = out_dir(&a.common.out)?;
    let path = write_file(dir, "covariance.csv", |w| write_matrix(&matrix, w))?;
    println!("wrote {}", path.display());
    println!("{matrix}");
    Ok(())
}

fn n_study(a: NStudyArgs) -> Result<()> {
    if a.particles.is_empty() || a.particles.contains(&0) {
        bail!("--particles: need a non-empty list of positive counts");
    }
    if a.runs < 2 {
        bail!("--runs: need at least 2 runs");
    }
    let rows = match a.model {
        ModelKind::Sv => {
            let data = match &a.data {
                Some(p) => load_returns(p, a.from.as_deref(), a.to.as_deref())?,
                None => datasets::synthetic_sv(),
            };
            let params = match a.theta.as_deref() {
                None => SV_STUDY_PARAMS,
                Some([mu, phi, sigma_v]) => SvParameters { mu: *mu, phi: *phi, sigma_v: *sigma_v },
                Some(t) => bail!("--theta: expected mu,phi,sigma_v, got {} values", t.len()),
            };
            loglik_std_study_sv(&data.observations, &params, &a.particles, a.runs, a.common.seed)?
        }
        ModelKind::Lgss => {
            let data = match &a.data {
                Some(p) => load_series(p)?,
                None => datasets::reference_lgss(),
            };
            let params = match a.theta.as_deref() {
                None => LgssParameters::default(),
                Some([phi, sigma_v, sigma_e]) => LgssParameters::new(*phi, *sigma_v, *sigma_e),
                Some(t) => bail!("--theta: expected phi,sigma_v,sigma_e, got {} values", t.len()),
            };
            loglik_std_study_lgss(&data.observations, &params, a.x0, &a.particles, a.runs, a.common.seed)?
        }
    };
    let dir = out_dir(&a.common.out)?;
    write_file(dir, "nstudy.csv", |w| {
        let mut s = String::from("particles,mean_loglik,std_loglik,successful_runs,failed_runs\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.particles,
                fmt_f64(r.mean_log_likelihood),
                fmt_f64(r.std_log_likelihood),
                r.successful_runs,
                r.failed_runs
            ));
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    })?;
    for r in &rows {
        println!("N = {:>5}  std = {:.3}  mean = {:.3}", r.particles, r.std_log_likelihood, r.mean_log_likelihood);
    }
    Ok(())
}

fn diagnose(a: DiagnoseArgs) -> Result<()> {
    if !a.trace.exists() {
        bail!("--trace: {} does not exist", a.trace.display());
    }
    let trace = read_trace_file(&a.trace).with_context(|| format!("--trace: cannot read {}", a.trace.display()))?;
    let mixing = mixing_report(&trace, a.burnin, a.lags)?;
    let post = posterior_summary(&trace, a.burnin)?;

    let mut s = Summary::new();
    s.text("experiment", "diagnose")
        .text("samples", post.samples)
        .text("lags", a.lags)
        .number("acceptance_rate", mixing.acceptance_rate);
    for (j, name) in trace.parameter_names.iter().enumerate() {
        let column = trace.column(j, a.burnin);
        let lag = match a.thin {
            Some(l) => l,
            None => default_thinning_lag(&column)?,
        };
        let ks = ks_stationarity_test(&column, 0, Some(lag), a.alpha)?;
        s.number(format!("{name}.mean"), post.mean[j])
            .number(format!("{name}.std"), post.std[j])
            .number(format!("{name}.iact"), mixing.iact[j])
            .text(format!("{name}.ks_thinning_lag"), ks.thinning_lag)
            .number(format!("{name}.ks_statistic"), ks.statistic)
            .number(format!("{name}.ks_critical_value"), ks.critical_value)
            .text(format!("{name}.ks_passed"), ks.passed);
    }

    let dir = out_dir(&a.common.out)?;
    write_file(dir, "acf.csv", |w| {
        let mut text = format!("lag,{}\n", trace.parameter_names.join(","));
        for lag in 0..a.lags {
            let row: Vec<String> = mixing.acf.iter().map(|c| fmt_f64(c[lag])).collect();
            text.push_str(&format!("{},{}\n", lag + 1, row.join(",")));
        }
        w.write_all(text.as_bytes())?;
        Ok(())
    })?;
    write_file(dir, "diagnostics.txt", |w| s.write(w))?;
    report(&s);
    Ok(())
}
