//! One experiment: build the stream and solvers from a config, run them, and
//! write the CSV outputs and the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use tvopt_core::distributed::{build_metropolis_weights, run_fig6_experiment, Fig6Config};
use tvopt_core::metrics::{
    contraction_certificate, dynamic_regret, path_length, pd_path_length, pd_tracking_error,
    primal_dual_certificate, regret_bound_check, tracking_error, BoundReport, CertificateOptions,
    Comparator, ContractionParams, PrimalDualParams, RegretParams,
};
use tvopt_core::problems::{
    gen_fig1_instance, Drift, FeedbackConfig, Jump, LambdaSchedule, NetworkFeedbackGen, QuadraticStream,
    QuadraticStreamConfig, RobustPCAStreamGen, RpcaStreamConfig, SSCStreamGen, SscStreamConfig, TVLassoGen,
    TVLeastSquaresGen,
};
use tvopt_core::solvers::{
    heavy_ball_polyak, pd_lipschitz, BatchOptions, BatchOracleResult, DualRule, OnlineSolver,
    PrimalDualState, ProxGradState, StaticMethod, StaticMethodConfig, StaticSolver,
};
use tvopt_core::{
    AffineConstraint, DirectionRule, FeasibleSet, GradientNoiseModel, IterateTrace, Matrix, ProblemSlice,
    RegularizerSpec, StaticProblem, TimeVaryingProblem, Vector,
};

use crate::config::{
    ComparatorConfig, ConsensusConfig, ConstraintConfig, DirectionConfig, DriftConfig, DualRuleConfig,
    ExperimentConfig, NoiseConfig, ProblemConfig, RegConfig, SetConfig, SolverConfig, StepRule, StepSize,
    Tuning,
};
use crate::output::{fmt_f64, CsvOut, RunManifest, MANIFEST_FILE, TIMING_FILE};
use crate::{Error, Result};

/// Headline numbers of one method in a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub final_tracking_error: f64,
    /// `Reg_T`; `None` when the method is not compared against `f_t*`.
    pub regret: Option<f64>,
    /// Per-step violations summed over the method's bound checks.
    pub violations: usize,
    /// Constraint violation `||max(c(x_T*(r)), 0)||` of the final regularized
    /// saddle point (primal-dual methods only).
    pub reg_gap: Option<f64>,
    /// Bound checks run for the method.
    pub bounds: Vec<BoundReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub methods: Vec<MethodSummary>,
    pub manifest: RunManifest,
}

/// The stream described by the problem section plus its default start point.
pub struct BuiltProblem {
    pub problem: Box<dyn TimeVaryingProblem>,
    pub x0: Vector,
}

fn drift(d: &DriftConfig) -> Drift {
    Drift {
        amplitude: d.amplitude,
        omega: d.omega,
        velocity: d.velocity,
        jumps: d
            .jumps
            .iter()
            .map(|j| Jump {
                t: j.t,
                magnitude: j.magnitude,
            })
            .collect(),
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("{what} must be a nonempty list of equal-length rows")));
    }
    Ok(Matrix::from_fn(m, n, |i, j| rows[i][j]))
}

fn reg(r: &RegConfig) -> Result<RegularizerSpec> {
    Ok(match *r {
        RegConfig::Zero => RegularizerSpec::Zero,
        RegConfig::L1 { weight } => RegularizerSpec::l1(weight)?,
        RegConfig::Nuclear { weight, rows, cols } => RegularizerSpec::nuclear(weight, rows, cols)?,
    })
}

fn set(s: &SetConfig) -> Result<FeasibleSet> {
    Ok(match s {
        SetConfig::AllSpace => FeasibleSet::AllSpace,
        SetConfig::Nonneg => FeasibleSet::NonnegOrthant,
        SetConfig::Box { lower, upper } => {
            FeasibleSet::boxed(Vector::from_vec(lower.clone()), Vector::from_vec(upper.clone()))?
        }
        SetConfig::Affine { matrix, rhs } => {
            FeasibleSet::affine(rows_to_matrix(matrix, "set.matrix")?, Vector::from_vec(rhs.clone()))?
        }
    })
}

fn constraint(c: &ConstraintConfig) -> Result<AffineConstraint> {
    Ok(AffineConstraint::new(rows_to_matrix(&c.g, "constraint.g")?, Vector::from_vec(c.h.clone()))?)
}

fn frozen(problem: Box<dyn TimeVaryingProblem>, freeze_at: Option<usize>) -> Result<Box<dyn TimeVaryingProblem>> {
    Ok(match freeze_at {
        None => problem,
        Some(t) => {
            let name = format!("{}_static", problem.name());
            Box::new(StaticProblem::new(name, problem.slice(t)?, problem.horizon()))
        }
    })
}

/// Builds the stream of a non-network problem section.
pub fn build_problem(cfg: &ProblemConfig) -> Result<BuiltProblem> {
    let zeros = |p: &dyn TimeVaryingProblem| Vector::zeros(p.dim());
    let (problem, freeze_at, x0): (Box<dyn TimeVaryingProblem>, _, Option<Vector>) = match cfg {
        ProblemConfig::Quadratic {
            dim,
            eig_min,
            eig_max,
            rank,
            horizon,
            drift: d,
            cost_shift,
            reg: r,
            set: s,
            constraint: c,
            freeze_at,
            seed,
        } => {
            let mut q = QuadraticStreamConfig::new(*dim, *eig_min, *eig_max, *horizon, *seed);
            q.rank = *rank;
            q.drift = drift(d);
            q.cost_shift = *cost_shift;
            q.reg = reg(r)?;
            q.set = set(s)?;
            q.constraint = c.as_ref().map(constraint).transpose()?;
            (Box::new(QuadraticStream::new(q)?), *freeze_at, None)
        }
        ProblemConfig::LeastSquares {
            dim,
            rows,
            window,
            horizon,
            drift: d,
            noise_std,
            lambda,
            freeze_at,
            seed,
        } => {
            let ls = TVLeastSquaresGen::with_rows(*dim, *rows, *window, *horizon, drift(d), *noise_std, *seed)?;
            let p: Box<dyn TimeVaryingProblem> = match lambda {
                None => Box::new(ls),
                Some(l) => Box::new(TVLassoGen::new(
                    ls,
                    LambdaSchedule {
                        base: l.base,
                        amplitude: l.amplitude,
                        omega: l.omega,
                    },
                )?),
            };
            (p, *freeze_at, None)
        }
        ProblemConfig::Fig1 { freeze_at, seed } => (Box::new(gen_fig1_instance(*seed)), *freeze_at, None),
        ProblemConfig::Rpca {
            side,
            frames,
            clips,
            rank,
            sparse_fraction,
            noise_std,
            rotation,
            lambda,
            rho,
            freeze_at,
            seed,
        } => {
            let c = RpcaStreamConfig {
                side: *side,
                frames: *frames,
                clips: *clips,
                rank: *rank,
                sparse_fraction: *sparse_fraction,
                noise_std: *noise_std,
                rotation: *rotation,
                lambda: *lambda,
                rho: *rho,
                seed: *seed,
            };
            (Box::new(RobustPCAStreamGen::new(&c)?), *freeze_at, None)
        }
        ProblemConfig::Ssc {
            ambient,
            subspace_dim,
            subspaces,
            points,
            horizon,
            arrival_period,
            lambda,
            noise_std,
            freeze_at,
            seed,
        } => {
            let c = SscStreamConfig {
                ambient: *ambient,
                subspace_dim: *subspace_dim,
                subspaces: *subspaces,
                points: *points,
                horizon: *horizon,
                arrival_period: *arrival_period,
                lambda: *lambda,
                noise_std: *noise_std,
                seed: *seed,
            };
            let g = SSCStreamGen::new(&c)?;
            let start = g.uniform_start();
            (Box::new(g), *freeze_at, Some(start))
        }
        ProblemConfig::Feedback {
            outputs,
            inputs,
            exogenous,
            horizon,
            sensor_radius,
            model_error,
            w_omega,
            target_amplitude,
            target_omega,
            input_limit,
            freeze_at,
            seed,
        } => {
            let c = FeedbackConfig {
                outputs: *outputs,
                inputs: *inputs,
                exogenous: *exogenous,
                horizon: *horizon,
                sensor_radius: *sensor_radius,
                model_error: *model_error,
                w_omega: *w_omega,
                target_amplitude: *target_amplitude,
                target_omega: *target_omega,
                input_limit: input_limit.unwrap_or(f64::INFINITY),
                seed: *seed,
            };
            (Box::new(NetworkFeedbackGen::new(&c)?), *freeze_at, None)
        }
        ProblemConfig::Consensus(_) => {
            return Err(Error::Config("the consensus problem is not a single stream".into()));
        }
    };
    let problem = frozen(problem, freeze_at)?;
    let x0 = x0.unwrap_or_else(|| zeros(problem.as_ref()));
    Ok(BuiltProblem { problem, x0 })
}

pub fn noise_model(cfg: &NoiseConfig) -> Result<GradientNoiseModel> {
    Ok(match *cfg {
        NoiseConfig::None => GradientNoiseModel::none(),
        NoiseConfig::Bounded { radius, direction, seed } => {
            let rule = match direction {
                DirectionConfig::Fixed => DirectionRule::Fixed,
                DirectionConfig::AlongGradient => DirectionRule::AlongGradient,
                DirectionConfig::RandomUnit => DirectionRule::RandomUnit,
            };
            GradientNoiseModel::bounded(radius, rule, seed)?
        }
        NoiseConfig::Gaussian { std, clip, seed } => GradientNoiseModel::gaussian(std, clip, seed)?,
        NoiseConfig::Measurement { seed } => GradientNoiseModel::measurement(seed),
    })
}

/// Curvature constants over the whole run.
#[derive(Debug, Clone, Copy)]
struct Constants {
    mu_min: f64,
    lip_max: f64,
    mu_first: f64,
    lip_first: f64,
}

fn constants(slices: &[ProblemSlice]) -> Constants {
    Constants {
        mu_min: slices.iter().map(|s| s.smooth.mu()).fold(f64::INFINITY, f64::min),
        lip_max: slices.iter().map(|s| s.smooth.lip()).fold(0.0, f64::max),
        mu_first: slices[0].smooth.mu(),
        lip_first: slices[0].smooth.lip(),
    }
}

fn step(a: StepSize, k: &Constants) -> f64 {
    match a {
        StepSize::Value(v) => v,
        StepSize::Rule(StepRule::InverseLipschitz) => 1.0 / k.lip_max,
    }
}

/// A configured solver with the step-size it resolved to.
struct Prepared {
    label: String,
    solver: Box<dyn OnlineSolver>,
    alpha: f64,
    certified: bool,
    pd: Option<f64>,
}

fn prepare(cfg: &SolverConfig, x0: &Vector, k: &Constants, duals: usize) -> Result<Prepared> {
    let label = cfg.label();
    let static_solver = |method, alpha: f64, restart: bool, sc: Option<(f64, f64)>| -> Result<Box<dyn OnlineSolver>> {
        let mut c = StaticMethodConfig::new(method, alpha)?;
        c.restart_on_slice = restart;
        c.strong_convexity = sc;
        c.validate()?;
        Ok(Box::new(StaticSolver::new(c, x0.clone())?.named(label.clone())))
    };
    let (solver, alpha, certified, pd): (Box<dyn OnlineSolver>, f64, bool, Option<f64>) = match *cfg {
        SolverConfig::ProxGrad { alpha, steps, .. } => {
            let a = step(alpha, k);
            (Box::new(ProxGradState::new(x0.clone(), a, steps)?.named(label.clone())), a, true, None)
        }
        SolverConfig::PrimalDual {
            alpha,
            r,
            dual_rule,
            steps,
            ..
        } => {
            let rule = match dual_rule {
                DualRuleConfig::AsPrinted => DualRule::AsPrinted,
                DualRuleConfig::GradientAscent => DualRule::GradientAscent,
            };
            let s = PrimalDualState::new(x0.clone(), Vector::zeros(duals), alpha, r, rule)?
                .with_steps_per_slice(steps)?
                .named(label.clone());
            (Box::new(s), alpha, true, Some(r))
        }
        SolverConfig::Gd { alpha, .. } => {
            let a = step(alpha, k);
            (static_solver(StaticMethod::GradientDescent, a, false, None)?, a, true, None)
        }
        SolverConfig::NesterovV1 {
            alpha,
            restart_on_slice,
            ..
        } => {
            let a = step(alpha, k);
            (static_solver(StaticMethod::NesterovV1, a, restart_on_slice, None)?, a, false, None)
        }
        SolverConfig::NesterovV2 {
            alpha,
            strong_convexity,
            restart_on_slice,
            ..
        } => {
            let a = step(alpha, k);
            let s = static_solver(StaticMethod::NesterovV2, a, restart_on_slice, strong_convexity)?;
            (s, a, false, None)
        }
        SolverConfig::HeavyBall {
            alpha,
            beta,
            tuning,
            restart_on_slice,
            ..
        } => {
            let (a, b) = match tuning {
                Some(Tuning::Polyak) => heavy_ball_polyak(k.mu_first, k.lip_first),
                None => (step(alpha, k), beta.unwrap_or(0.9)),
            };
            let s = static_solver(StaticMethod::HeavyBall { beta: b }, a, restart_on_slice, None)?;
            (s, a, false, None)
        }
        SolverConfig::Nlcg { restart_on_slice, .. } => {
            let a = 1.0 / k.lip_max;
            (static_solver(StaticMethod::NonlinearCg, a, restart_on_slice, None)?, a, false, None)
        }
    };
    Ok(Prepared {
        label,
        solver,
        alpha,
        certified,
        pd,
    })
}

fn cert_options(m: &crate::config::MetricsConfig) -> CertificateOptions {
    CertificateOptions {
        tol: m.tol,
        plateau_tol: m.plateau_tol,
        burn_in: m.burn_in,
        tail_fraction: m.tail_fraction,
        inner_error_bound: None,
    }
}

/// Output files of a run, named with the configured prefix.
struct Files<'a> {
    dir: &'a Path,
    prefix: &'a str,
}

impl Files<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{}{name}", self.prefix))
    }
}

/// Results of one method kept for the output writers.
struct MethodRun {
    label: String,
    trace: IterateTrace,
    /// Oracle the method is measured against (plain or regularized saddle).
    reference: usize,
    bounds: Vec<BoundReport>,
    pd: Option<f64>,
}

/// Runs `cfg` and writes its outputs to `dir`. Relative paths inside the config
/// resolve against `base`.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&Path>, dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = Files {
        dir,
        prefix: &cfg.output.prefix,
    };
    if let ProblemConfig::Consensus(c) = &cfg.problem {
        return run_network(cfg, c, base, &files);
    }
    let built = build_problem(&cfg.problem)?;
    let problem = built.problem.as_ref();
    let slices = (1..=problem.horizon())
        .map(|t| problem.slice(t))
        .collect::<tvopt_core::Result<Vec<_>>>()?;
    if slices.is_empty() {
        return Err(Error::Config("the problem horizon is zero".into()));
    }
    let k = constants(&slices);
    let duals = slices[0].constraints.as_ref().map_or(0, |c| c.dim_out());
    let noise = noise_model(&cfg.noise)?;
    let opts = BatchOptions::with_tol(cfg.metrics.oracle_tol);
    let m = &cfg.metrics;

    // Reference solutions: index 0 is the plain oracle, then one saddle
    // sequence per distinct r.
    let mut references: Vec<(String, Vec<BatchOracleResult>)> = Vec::new();
    let mut prepared = Vec::new();
    for s in &cfg.solvers {
        prepared.push(prepare(s, &built.x0, &k, duals)?);
    }
    if prepared.iter().any(|p| p.pd.is_none()) {
        references.push(("oracle".into(), tvopt_core::runner::oracle_sequence(problem, &opts)?));
    }

    let mut runs = Vec::new();
    let mut timings = Vec::new();
    for mut p in prepared {
        let start = Instant::now();
        let mut clock = move || start.elapsed().as_secs_f64();
        let trace = tvopt_core::runner::run_online(problem, p.solver.as_mut(), &noise, Some(&mut clock))?;
        timings.push((p.label.clone(), trace.records().iter().map(|r| r.wall_time).collect::<Vec<_>>()));
        let reference = match p.pd {
            None => 0,
            Some(r) => {
                let name = format!("saddle_r{}", fmt_f64(r));
                match references.iter().position(|(n, _)| *n == name) {
                    Some(i) => i,
                    None => {
                        let seq = tvopt_core::runner::saddle_sequence(problem, r, &opts)?;
                        references.push((name, seq));
                        references.len() - 1
                    }
                }
            }
        };
        let oracle = &references[reference].1;
        let mut bounds = Vec::new();
        if m.certificates && p.certified {
            match p.pd {
                None => {
                    let mut params = ContractionParams::new(p.alpha, k.mu_min, k.lip_max);
                    params.options = cert_options(m);
                    bounds.push(contraction_certificate(&trace, oracle, &params)?);
                }
                Some(r) => {
                    let l_pd = slices
                        .iter()
                        .map(|s| pd_lipschitz(s, r))
                        .collect::<tvopt_core::Result<Vec<_>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    let mut params = PrimalDualParams::new(p.alpha, k.mu_min, r, l_pd);
                    params.options = cert_options(m);
                    bounds.push(primal_dual_certificate(&trace, oracle, &params)?);
                }
            }
        }
        if m.regret && p.certified && p.pd.is_none() {
            let mut params = RegretParams::new(p.alpha, k.lip_max);
            params.tol = m.tol;
            if m.comparator == ComparatorConfig::FinalOracle {
                params.comparator = Comparator::Fixed(oracle.last().expect("nonempty").x_star.clone());
            }
            bounds.push(regret_bound_check(&trace, oracle, &params)?);
        }
        runs.push(MethodRun {
            label: p.label,
            trace,
            reference,
            bounds,
            pd: p.pd,
        });
    }

    let mut written = Vec::new();
    written.push(write_trace(&files, &runs)?);
    let (metrics_path, methods) = write_metrics(&files, &runs, &references, &slices)?;
    written.push(metrics_path);
    written.push(write_bounds(&files, &runs)?);
    written.push(write_bound_summaries(&files, &runs)?);
    let timing = write_timing(&files, &timings)?;
    finish(cfg, dir, &files, written, vec![timing], methods)
}

fn finish(
    cfg: &ExperimentConfig,
    dir: &Path,
    files: &Files,
    written: Vec<PathBuf>,
    unchecked: Vec<PathBuf>,
    methods: Vec<MethodSummary>,
) -> Result<RunSummary> {
    let manifest = RunManifest::new(cfg, dir, &written, &unchecked)?;
    manifest.write(&files.path(MANIFEST_FILE))?;
    Ok(RunSummary {
        dir: dir.to_path_buf(),
        methods,
        manifest,
    })
}

fn write_trace(files: &Files, runs: &[MethodRun]) -> Result<PathBuf> {
    let n = runs.first().map_or(0, |r| r.trace.x0.len());
    let m = runs
        .iter()
        .filter_map(|r| r.trace.lambda0.as_ref().map(|l| l.len()))
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = ["method", "t", "objective", "grad_error"].map(String::from).to_vec();
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=m).map(|i| format!("lambda_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = CsvOut::create(files.path("trace.csv"), &header)?;
    for run in runs {
        for rec in run.trace.records() {
            let mut row = vec![
                run.label.clone(),
                rec.t.to_string(),
                fmt_f64(rec.objective),
                fmt_f64(rec.grad_error),
            ];
            row.extend(rec.x.iter().map(|v| fmt_f64(*v)));
            match &rec.lambda {
                Some(l) => row.extend(l.iter().map(|v| fmt_f64(*v))),
                None => row.extend((0..m).map(|_| String::new())),
            }
            out.row(&row)?;
        }
    }
    out.finish()
}

fn metric_rows(out: &mut CsvOut, method: &str, metric: &str, values: &[f64]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        out.row([method, metric, &(i + 1).to_string(), &fmt_f64(*v)])?;
    }
    Ok(())
}

fn write_metrics(
    files: &Files,
    runs: &[MethodRun],
    references: &[(String, Vec<BatchOracleResult>)],
    slices: &[ProblemSlice],
) -> Result<(PathBuf, Vec<MethodSummary>)> {
    let mut out = CsvOut::create(files.path("metrics.csv"), &["method", "metric", "t", "value"])?;
    for (name, seq) in references {
        let saddle = seq.first().is_some_and(|r| r.lambda_star.is_some());
        let (sigma, _) = if saddle { pd_path_length(seq)? } else { path_length(seq)? };
        metric_rows(&mut out, name, "path_increment", &sigma.values)?;
        metric_rows(&mut out, name, "path_length", &sigma.cumulative)?;
        metric_rows(&mut out, name, "f_star", &seq.iter().map(|r| r.f_star).collect::<Vec<_>>())?;
        metric_rows(&mut out, name, "oracle_residual", &seq.iter().map(|r| r.certificate).collect::<Vec<_>>())?;
    }
    let mut summaries = Vec::new();
    for run in runs {
        let oracle = &references[run.reference].1;
        let track = tracking_error(&run.trace, oracle)?;
        metric_rows(&mut out, &run.label, "tracking_error", &track.values)?;
        let errors: Vec<f64> = run.trace.records().iter().map(|r| r.grad_error).collect();
        metric_rows(&mut out, &run.label, "grad_error", &errors)?;
        let mut regret = None;
        let mut reg_gap = None;
        match run.pd {
            None => {
                let gap: Vec<f64> = run
                    .trace
                    .records()
                    .iter()
                    .zip(oracle)
                    .map(|(r, o)| (r.objective - o.f_star).abs())
                    .collect();
                metric_rows(&mut out, &run.label, "objective_gap", &gap)?;
                let reg = dynamic_regret(&run.trace, oracle)?;
                metric_rows(&mut out, &run.label, "dynamic_regret", &reg.cumulative)?;
                regret = Some(reg.total());
            }
            Some(_) => {
                let z = pd_tracking_error(&run.trace, oracle)?;
                metric_rows(&mut out, &run.label, "saddle_tracking_error", &z.values)?;
                let viol: Vec<f64> = run
                    .trace
                    .records()
                    .iter()
                    .zip(slices)
                    .map(|(r, s)| violation(s, &r.x))
                    .collect();
                metric_rows(&mut out, &run.label, "constraint_violation", &viol)?;
                let last = oracle.last().expect("nonempty");
                reg_gap = Some(violation(slices.last().expect("nonempty"), &last.x_star));
            }
        }
        summaries.push(MethodSummary {
            method: run.label.clone(),
            final_tracking_error: track.values.last().copied().unwrap_or(f64::NAN),
            regret,
            violations: run.bounds.iter().map(|b| b.violations).sum(),
            reg_gap,
            bounds: run.bounds.clone(),
        });
    }
    Ok((out.finish()?, summaries))
}

fn violation(slice: &ProblemSlice, x: &Vector) -> f64 {
    slice
        .constraints
        .as_ref()
        .map_or(0.0, |c| c.eval(x).map(|v| v.max(0.0)).norm())
}

fn write_bounds(files: &Files, runs: &[MethodRun]) -> Result<PathBuf> {
    let mut out = CsvOut::create(files.path("bounds.csv"), &["method", "bound", "t", "lhs", "rhs", "violated"])?;
    for run in runs {
        for b in &run.bounds {
            for i in 0..b.t.len() {
                out.row([
                    run.label.as_str(),
                    &b.name,
                    &b.t[i].to_string(),
                    &fmt_f64(b.lhs[i]),
                    &fmt_f64(b.rhs[i]),
                    if b.is_violated(i) { "1" } else { "0" },
                ])?;
            }
        }
    }
    out.finish()
}

fn write_bound_summaries(files: &Files, runs: &[MethodRun]) -> Result<PathBuf> {
    let mut text = String::new();
    for run in runs {
        for b in &run.bounds {
            text.push_str(&format!("method: {}\n{b}\n", run.label));
        }
    }
    let path = files.path("bounds_summary.txt");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_timing(files: &Files, timings: &[(String, Vec<f64>)]) -> Result<PathBuf> {
    let mut out = CsvOut::create(files.path(TIMING_FILE), &["method", "t", "wall_time"])?;
    for (label, times) in timings {
        for (i, w) in times.iter().enumerate() {
            out.row([label.as_str(), &(i + 1).to_string(), &fmt_f64(*w)])?;
        }
    }
    out.finish()
}

/// Network settings of a consensus section.
pub fn fig6_config(c: &ConsensusConfig, base: Option<&Path>) -> Result<Fig6Config> {
    let graph = match &c.graph_file {
        None => None,
        Some(p) => {
            let path = match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p.clone(),
            };
            Some(crate::graph_io::read_graph(&path)?)
        }
    };
    Ok(Fig6Config {
        nodes: c.nodes,
        horizon: c.horizon,
        radius: c.radius,
        graph,
        max_delay: c.max_delay,
        dgd_alpha: c.dgd_alpha,
        dgd_alpha0: c.dgd_alpha0,
        extra_alpha: c.extra_alpha,
        dual_beta: c.dual_beta,
        admm_rho: c.admm_rho,
        seed: c.seed,
    })
}

fn run_network(cfg: &ExperimentConfig, c: &ConsensusConfig, base: Option<&Path>, files: &Files) -> Result<RunSummary> {
    let start = Instant::now();
    let f6 = fig6_config(c, base)?;
    let graph = f6.graph()?;
    build_metropolis_weights(&graph)?;
    let series = run_fig6_experiment(&f6)?;
    let elapsed = start.elapsed().as_secs_f64();

    let graph_path = files.path("graph.txt");
    crate::graph_io::write_graph(&graph_path, &graph)?;
    let mut out = CsvOut::create(
        files.path("consensus.csv"),
        &["scenario", "method", "t", "avg_tracking_error"],
    )?;
    let mut methods = Vec::new();
    for s in &series {
        for (i, v) in s.error.values.iter().enumerate() {
            out.row([s.scenario.label(), s.method, &(i + 1).to_string(), &fmt_f64(*v)])?;
        }
        methods.push(MethodSummary {
            method: format!("{}/{}", s.scenario.label(), s.method),
            final_tracking_error: s.error.values.last().copied().unwrap_or(f64::NAN),
            regret: None,
            violations: 0,
            reg_gap: None,
            bounds: Vec::new(),
        });
    }
    let consensus = out.finish()?;
    let mut timing = CsvOut::create(files.path(TIMING_FILE), &["method", "t", "wall_time"])?;
    timing.row(["all", "0", &fmt_f64(elapsed)])?;
    let timing = timing.finish()?;
    finish(cfg, files.dir, files, vec![consensus, graph_path], vec![timing], methods)
}
