//! Performance metrics of online runs and empirical checks of the tracking and
//! regret bounds.

#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{check_dim, invalid};
use crate::solvers::BatchOracleResult;
use crate::{Error, IterateTrace, ProblemSlice, Result, Vector};

/// A per-step quantity together with its accumulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    /// Value at steps `t = 1..=T` (index `t - 1`).
    pub values: Vec<f64>,
    /// Running sum of `values`, or running max where the producer says so.
    pub cumulative: Vec<f64>,
}

impl MetricSeries {
    pub fn running_sum(name: impl Into<String>, values: Vec<f64>) -> Self {
        let cumulative = values
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Self {
            name: name.into(),
            values,
            cumulative,
        }
    }

    pub fn running_max(name: impl Into<String>, values: Vec<f64>) -> Self {
        let cumulative = values
            .iter()
            .scan(f64::NEG_INFINITY, |acc, v| {
                *acc = acc.max(*v);
                Some(*acc)
            })
            .collect();
        Self {
            name: name.into(),
            values,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Accumulated value at the final step (0 for an empty series).
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Largest per-step value among steps `t >= from` (1-based).
    pub fn max_from(&self, from: usize) -> Option<f64> {
        self.values
            .iter()
            .skip(from.saturating_sub(1))
            .copied()
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }
}

/// The asymptotic part of a tracking bound: worst error over the tail of the
/// run against the limit-superior bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauCheck {
    /// First step (1-based) of the tail window.
    pub from_t: usize,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Per-step comparison `lhs_t <= rhs_t + tol` of a bound against a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub t: Vec<usize>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub tol: f64,
    pub violations: usize,
    /// `max(lhs - rhs)` over checked steps; negative when every step has slack.
    pub max_violation: f64,
    pub params: Vec<(String, f64)>,
    /// False when the bound's hypotheses fail (e.g. `q >= 1`); nothing was checked.
    pub applicable: bool,
    pub plateau: Option<PlateauCheck>,
    pub note: String,
}

impl BoundReport {
    fn new(name: &str, tol: f64) -> Self {
        Self {
            name: name.into(),
            t: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            tol,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
            params: Vec::new(),
            applicable: true,
            plateau: None,
            note: String::new(),
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }

    fn not_applicable(mut self, note: String) -> Self {
        self.applicable = false;
        self.note = note;
        self
    }

    fn record(&mut self, t: usize, lhs: f64, rhs: f64) {
        let gap = lhs - rhs;
        if gap > self.tol || gap.is_nan() {
            self.violations += 1;
        }
        if gap > self.max_violation || gap.is_nan() {
            self.max_violation = gap;
        }
        self.t.push(t);
        self.lhs.push(lhs);
        self.rhs.push(rhs);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn is_violated(&self, i: usize) -> bool {
        !(self.lhs[i] - self.rhs[i] <= self.tol)
    }

    /// Applicable, no per-step violation, and the plateau (if any) holds.
    pub fn passes(&self) -> bool {
        self.applicable && self.violations == 0 && self.plateau.as_ref().is_none_or(|p| p.holds)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound: {}", self.name)?;
        writeln!(f, "applicable: {}", self.applicable)?;
        for (k, v) in &self.params {
            writeln!(f, "{k}: {v:.6e}")?;
        }
        writeln!(f, "checked steps: {}", self.t.len())?;
        writeln!(f, "tolerance: {:.1e}", self.tol)?;
        writeln!(f, "violations: {}", self.violations)?;
        if !self.t.is_empty() {
            writeln!(f, "max violation: {:.6e}", self.max_violation)?;
        }
        if let Some(p) = &self.plateau {
            writeln!(
                f,
                "plateau (t >= {}): measured {:.6e}, bound {:.6e}, holds: {}",
                p.from_t, p.measured, p.bound, p.holds
            )?;
        }
        if !self.note.is_empty() {
            writeln!(f, "note: {}", self.note)?;
        }
        Ok(())
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// `||x_t - x_t*||`.
pub fn tracking_error(trace: &IterateTrace, oracle: &[BatchOracleResult]) -> Result<MetricSeries> {
    check_lengths(trace.len(), oracle.len())?;
    let mut values = Vec::with_capacity(oracle.len());
    for (rec, o) in trace.records().iter().zip(oracle) {
        check_dim(o.x_star.len(), rec.x.len())?;
        values.push((&rec.x - &o.x_star).norm());
    }
    Ok(MetricSeries::running_sum("tracking_error", values))
}

fn stacked(x: &Vector, lambda: Option<&Vector>) -> Vector {
    match lambda {
        Some(l) => Vector::from_iterator(x.len() + l.len(), x.iter().chain(l.iter()).copied()),
        None => x.clone(),
    }
}

/// `||z_t - z_t*||` with `z = (x, lambda)`.
pub fn pd_tracking_error(trace: &IterateTrace, saddles: &[BatchOracleResult]) -> Result<MetricSeries> {
    check_lengths(trace.len(), saddles.len())?;
    let mut values = Vec::with_capacity(saddles.len());
    for (rec, o) in trace.records().iter().zip(saddles) {
        let z = stacked(&rec.x, rec.lambda.as_ref());
        let zs = stacked(&o.x_star, o.lambda_star.as_ref());
        check_dim(zs.len(), z.len())?;
        values.push((z - zs).norm());
    }
    Ok(MetricSeries::running_sum("pd_tracking_error", values))
}

/// `E_t = sum e_tau` and `E'_t = sum e_tau^2`.
pub fn gradient_error_accumulators(trace: &IterateTrace) -> (MetricSeries, MetricSeries) {
    let e: Vec<f64> = trace.records().iter().map(|r| r.grad_error).collect();
    let e2 = e.iter().map(|v| v * v).collect();
    (
        MetricSeries::running_sum("E", e),
        MetricSeries::running_sum("E_prime", e2),
    )
}

fn drift_series(points: &[Vector], name: &str) -> Result<(MetricSeries, MetricSeries)> {
    let mut sigma = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i == 0 {
            sigma.push(0.0);
        } else {
            check_dim(points[i - 1].len(), p.len())?;
            sigma.push((p - &points[i - 1]).norm());
        }
    }
    let per_step = MetricSeries::running_sum(format!("{name}_step"), sigma.clone());
    Ok((per_step, MetricSeries::running_sum(name, sigma)))
}

/// `sigma_t = ||x_t* - x_{t-1}*||` and the path length `Sigma_t`. There is no
/// `x_0*`, so `sigma_1 = 0`.
pub fn path_length(oracle: &[BatchOracleResult]) -> Result<(MetricSeries, MetricSeries)> {
    let pts: Vec<Vector> = oracle.iter().map(|o| o.x_star.clone()).collect();
    let (mut sigma, mut total) = drift_series(&pts, "Sigma")?;
    sigma.name = "sigma".into();
    total.name = "Sigma".into();
    Ok((sigma, total))
}

/// Path length of the stacked saddle points `z_t*`.
pub fn pd_path_length(saddles: &[BatchOracleResult]) -> Result<(MetricSeries, MetricSeries)> {
    let pts: Vec<Vector> = saddles
        .iter()
        .map(|o| stacked(&o.x_star, o.lambda_star.as_ref()))
        .collect();
    let (mut sigma, mut total) = drift_series(&pts, "Sigma_pd")?;
    sigma.name = "sigma_pd".into();
    total.name = "Sigma_pd".into();
    Ok((sigma, total))
}

/// Mean of the oracle minimizers, the center of the solution trajectory.
pub fn trajectory_center(oracle: &[BatchOracleResult]) -> Result<Vector> {
    let first = oracle.first().ok_or_else(|| invalid("empty oracle sequence"))?;
    let mut sum = Vector::zeros(first.x_star.len());
    for o in oracle {
        check_dim(sum.len(), o.x_star.len())?;
        sum += &o.x_star;
    }
    Ok(sum / oracle.len() as f64)
}

/// `Sigma^c_t(w) = sum_{tau <= t} ||w - x_tau||^2` for a fixed comparator.
pub fn comparator_variation(trace: &IterateTrace, w: &Vector) -> Result<MetricSeries> {
    let mut values = Vec::with_capacity(trace.len());
    for rec in trace.records() {
        check_dim(w.len(), rec.x.len())?;
        values.push((w - &rec.x).norm_squared());
    }
    Ok(MetricSeries::running_sum("Sigma_c", values))
}

/// Probe-sampled cost variation. `slices[0]` is the reference `f_0`; entry
/// `tau` of each output compares `slices[tau]` with `slices[tau - 1]`:
///
/// * `Sigma^f`: `max_p |f_tau(p) - f_{tau-1}(p)|`
/// * `Sigma^g`: `max_p ||grad h_tau(p) - grad h_{tau-1}(p)||`
///
/// A maximum over finitely many probes is a lower bound on the supremum over
/// the feasible set. Every probe must lie in every slice's set.
pub fn cost_variation(slices: &[ProblemSlice], probes: &[Vector]) -> Result<(MetricSeries, MetricSeries)> {
    if probes.is_empty() {
        return Err(invalid("cost variation needs at least one probe"));
    }
    for s in slices {
        for p in probes {
            check_dim(s.dim(), p.len())?;
            if s.set.residual(p)? > 1e-9 {
                return Err(invalid("probe outside the feasible set"));
            }
        }
    }
    let mut sf = Vec::new();
    let mut sg = Vec::new();
    for pair in slices.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let mut best_f: f64 = 0.0;
        let mut best_g: f64 = 0.0;
        for p in probes {
            best_f = best_f.max((cur.value(p) - prev.value(p)).abs());
            best_g = best_g.max((cur.gradient(p) - prev.gradient(p)).norm());
        }
        sf.push(best_f);
        sg.push(best_g);
    }
    Ok((
        MetricSeries::running_sum("Sigma_f", sf),
        MetricSeries::running_sum("Sigma_g", sg),
    ))
}

/// `Reg_t = sum_{tau <= t} f_tau(x_tau) - f_tau*`, using the objective logged in
/// the trace.
pub fn dynamic_regret(trace: &IterateTrace, oracle: &[BatchOracleResult]) -> Result<MetricSeries> {
    check_lengths(trace.len(), oracle.len())?;
    let values = trace
        .records()
        .iter()
        .zip(oracle)
        .map(|(r, o)| r.objective - o.f_star)
        .collect();
    Ok(MetricSeries::running_sum("Reg", values))
}

/// `Reg_t / (1 + E_t + Sigma_t)`; the cumulative entry is the running max.
pub fn regret_growth_ratio(regret: &MetricSeries, e: &MetricSeries, sigma: &MetricSeries) -> Result<MetricSeries> {
    check_lengths(regret.len(), e.len())?;
    check_lengths(regret.len(), sigma.len())?;
    let values = (0..regret.len())
        .map(|i| regret.cumulative[i] / (1.0 + e.cumulative[i] + sigma.cumulative[i]))
        .collect();
    Ok(MetricSeries::running_max("regret_ratio", values))
}

/// `(alpha e + q sigma) / (1 - q)`.
pub fn plateau_bound(alpha: f64, q: f64, e: f64, sigma: f64) -> f64 {
    (alpha * e + q * sigma) / (1.0 - q)
}

/// Limit-superior bound for `K` contracting steps per slice, each with
/// gradient error at most `e`: `(alpha e (1 + q + ... + q^{K-1}) + q^K sigma) / (1 - q^K)`.
/// Equals [`plateau_bound`] for `K = 1`.
pub fn plateau_bound_k(alpha: f64, q: f64, e: f64, sigma: f64, k: usize) -> f64 {
    let qk = q.powi(k as i32);
    let geometric: f64 = (0..k).map(|i| q.powi(i as i32)).sum();
    (alpha * e * geometric + qk * sigma) / (1.0 - qk)
}

/// Index (0-based) where the final `fraction` of a run of `len` steps starts.
pub fn tail_start(len: usize, fraction: f64) -> usize {
    let tail = ((len as f64) * fraction).ceil() as usize;
    len - tail.clamp(1.min(len), len)
}

/// Knobs shared by the two tracking certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateOptions {
    /// Per-step tolerance.
    pub tol: f64,
    /// Tolerance of the plateau comparison.
    pub plateau_tol: f64,
    /// Steps `t <= burn_in` are not checked.
    pub burn_in: usize,
    /// Share of the horizon used for the plateau check.
    pub tail_fraction: f64,
    /// Bound on the gradient error of the inner steps after the first, which
    /// the trace does not record. `None` reuses the recorded `e_t`.
    pub inner_error_bound: Option<f64>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            plateau_tol: 1e-8,
            burn_in: 5,
            tail_fraction: 0.2,
            inner_error_bound: None,
        }
    }
}

/// Checks `d_t <= q^K (d_{t-1} + sigma_t) + alpha e_t (1 + ... + q^{K-1})` for the
/// distances `d`, plus the plateau.
fn certify(
    mut report: BoundReport,
    dist: &[f64],
    sigma: &[f64],
    errors: &[f64],
    alpha: f64,
    q: f64,
    k: usize,
    opts: &CertificateOptions,
) -> BoundReport {
    let qk = q.powi(k as i32);
    let geometric: f64 = (0..k).map(|i| q.powi(i as i32)).sum();
    let step_error = |e: f64| match (k, opts.inner_error_bound) {
        (1, _) | (_, None) => e,
        (_, Some(b)) => e.max(b),
    };
    for t in 2..=dist.len() {
        if t <= opts.burn_in {
            continue;
        }
        let i = t - 1;
        let rhs = qk * (dist[i - 1] + sigma[i]) + alpha * geometric * step_error(errors[i]);
        report.record(t, dist[i], rhs);
    }
    let e_max = errors.iter().copied().map(step_error).fold(0.0, f64::max);
    let s_max = sigma.iter().copied().fold(0.0, f64::max);
    let bound = plateau_bound_k(alpha, q, e_max, s_max, k);
    if !dist.is_empty() {
        let start = tail_start(dist.len(), opts.tail_fraction);
        let measured = dist[start..].iter().copied().fold(0.0, f64::max);
        report.plateau = Some(PlateauCheck {
            from_t: start + 1,
            measured,
            bound,
            holds: measured <= bound + opts.plateau_tol,
        });
    }
    report
        .param("e", e_max)
        .param("sigma", s_max)
        .param("plateau_bound", bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionParams {
    pub alpha: f64,
    /// Lower bound on every `mu_t`.
    pub mu: f64,
    /// Upper bound on every `L_t`.
    pub lip: f64,
    pub options: CertificateOptions,
}

impl ContractionParams {
    pub fn new(alpha: f64, mu: f64, lip: f64) -> Self {
        Self {
            alpha,
            mu,
            lip,
            options: CertificateOptions::default(),
        }
    }

    pub fn q(&self) -> f64 {
        crate::solvers::contraction_factor(self.alpha, self.mu, self.lip)
    }
}

/// Tracking certificate of online proximal gradient:
/// `||x_t - x_t*|| <= q ||x_{t-1} - x_{t-1}*|| + q sigma_t + alpha e_t` with
/// `q = max{|1 - alpha mu|, |1 - alpha L|}`, and the plateau
/// `max_{tail} ||x_t - x_t*|| <= (alpha e + q sigma) / (1 - q)`.
/// With `K` steps per slice the contraction is `q^K` per slice.
pub fn contraction_certificate(
    trace: &IterateTrace,
    oracle: &[BatchOracleResult],
    params: &ContractionParams,
) -> Result<BoundReport> {
    let opts = &params.options;
    let q = params.q();
    let report = BoundReport::new("contraction", opts.tol)
        .param("q", q)
        .param("alpha", params.alpha)
        .param("mu", params.mu)
        .param("L", params.lip)
        .param("K", trace.steps_per_slice as f64);
    if !(params.mu > 0.0) || !(q < 1.0) {
        return Ok(report.not_applicable(format!(
            "contraction factor q = {q} is not below 1 (needs mu > 0 and alpha < 2/L)"
        )));
    }
    let dist = tracking_error(trace, oracle)?.values;
    let (sigma, _) = path_length(oracle)?;
    let errors: Vec<f64> = trace.records().iter().map(|r| r.grad_error).collect();
    Ok(certify(report, &dist, &sigma.values, &errors, params.alpha, q, trace.steps_per_slice.max(1), opts))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualParams {
    pub alpha: f64,
    pub mu: f64,
    pub r: f64,
    /// Lipschitz constant of the primal-dual operator.
    pub l_pd: f64,
    pub options: CertificateOptions,
}

impl PrimalDualParams {
    pub fn new(alpha: f64, mu: f64, r: f64, l_pd: f64) -> Self {
        Self {
            alpha,
            mu,
            r,
            l_pd,
            options: CertificateOptions::default(),
        }
    }

    /// `min{mu, r}`.
    pub fn mu_low(&self) -> f64 {
        self.mu.min(self.r)
    }

    /// `(1 - 2 alpha mu_low + alpha^2 L_pd^2)^{1/2}`.
    pub fn q(&self) -> f64 {
        pd_contraction_factor(self.alpha, self.mu_low(), self.l_pd)
    }
}

/// `(1 - 2 alpha mu + alpha^2 L^2)^{1/2}`.
pub fn pd_contraction_factor(alpha: f64, mu: f64, l_pd: f64) -> f64 {
    (1.0 - 2.0 * alpha * mu + alpha * alpha * l_pd * l_pd).max(0.0).sqrt()
}

/// The same certificate as [`contraction_certificate`] on `z = (x, lambda)`
/// against the regularized saddle points, with
/// `q = (1 - 2 alpha min{mu, r} + alpha^2 L_pd^2)^{1/2}`. The coefficient without
/// the `alpha^2` factor is reported as `q_unscaled`. Valid for the
/// gradient-ascent dual rule.
pub fn primal_dual_certificate(
    trace: &IterateTrace,
    saddles: &[BatchOracleResult],
    params: &PrimalDualParams,
) -> Result<BoundReport> {
    let opts = &params.options;
    let q = params.q();
    let q_unscaled = (1.0 - 2.0 * params.alpha * params.mu_low() + params.l_pd * params.l_pd)
        .max(0.0)
        .sqrt();
    let report = BoundReport::new("primal_dual_contraction", opts.tol)
        .param("q", q)
        .param("q_unscaled", q_unscaled)
        .param("alpha", params.alpha)
        .param("mu", params.mu)
        .param("r", params.r)
        .param("mu_low", params.mu_low())
        .param("L_pd", params.l_pd)
        .param("K", trace.steps_per_slice as f64);
    if !(params.r > 0.0) {
        return Ok(report.not_applicable("r = 0: the Lagrangian is not strongly concave in lambda".into()));
    }
    if !(params.mu_low() > 0.0) || !(q < 1.0) {
        return Ok(report.not_applicable(format!(
            "contraction factor q = {q} is not below 1 (needs alpha < 2 mu_low / L_pd^2)"
        )));
    }
    let dist = pd_tracking_error(trace, saddles)?.values;
    let (sigma, _) = pd_path_length(saddles)?;
    let errors: Vec<f64> = trace.records().iter().map(|r| r.grad_error).collect();
    Ok(certify(report, &dist, &sigma.values, &errors, params.alpha, q, trace.steps_per_slice.max(1), opts))
}

/// The comparator `w_t` of the regret bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparator {
    /// `w_t = (1/t) sum_{i <= t} x_i*`.
    OracleMean,
    Fixed(Vector),
    /// One comparator per step.
    PerStep(Vec<Vector>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretParams {
    /// Step-size used by the run.
    pub alpha: f64,
    /// Uniform smoothness constant, `L >= L_t` for all `t`.
    pub lip: f64,
    pub comparator: Comparator,
    pub tol: f64,
}

impl RegretParams {
    pub fn new(alpha: f64, lip: f64) -> Self {
        Self {
            alpha,
            lip,
            comparator: Comparator::OracleMean,
            tol: 1e-8,
        }
    }
}

/// `Reg_t <= (L/2)(||x_0 - w_t||^2 + Sigma^c_t(w_t)) + E'_t / (2L)` for every
/// `t`. Only stated for `alpha = 1/L`.
pub fn regret_bound_check(
    trace: &IterateTrace,
    oracle: &[BatchOracleResult],
    params: &RegretParams,
) -> Result<BoundReport> {
    let l = params.lip;
    let report = BoundReport::new("dynamic_regret", params.tol)
        .param("alpha", params.alpha)
        .param("L", l);
    if !(l > 0.0) || (params.alpha * l - 1.0).abs() > 1e-9 {
        return Ok(report.not_applicable("the bound is stated for alpha = 1/L".into()));
    }
    let reg = dynamic_regret(trace, oracle)?;
    let (_, e2) = gradient_error_accumulators(trace);
    let n = trace.x0.len();
    let mut report = report;
    // Running sums give Sigma^c_t(w) = S2 - 2 <w, S1> + t ||w||^2 for any w.
    let mut s1 = Vector::zeros(n);
    let mut s2 = 0.0;
    let mut center = Vector::zeros(n);
    for (i, rec) in trace.records().iter().enumerate() {
        check_dim(n, rec.x.len())?;
        let t = i + 1;
        s1 += &rec.x;
        s2 += rec.x.norm_squared();
        center += &oracle[i].x_star;
        let w = match &params.comparator {
            Comparator::OracleMean => &center / t as f64,
            Comparator::Fixed(w) => w.clone(),
            Comparator::PerStep(ws) => ws.get(i).cloned().ok_or(Error::LengthMismatch {
                left: trace.len(),
                right: ws.len(),
            })?,
        };
        check_dim(n, w.len())?;
        let sigma_c = (s2 - 2.0 * w.dot(&s1) + t as f64 * w.norm_squared()).max(0.0);
        let rhs = 0.5 * l * ((&trace.x0 - &w).norm_squared() + sigma_c) + e2.cumulative[i] / (2.0 * l);
        report.record(t, reg.cumulative[i], rhs);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TraceRecord;
    use alloc::vec;

    fn oracle_at(x: Vector, f_star: f64) -> BatchOracleResult {
        BatchOracleResult {
            x_star: x,
            lambda_star: None,
            f_star,
            certificate: 0.0,
            iterations: 0,
        }
    }

    fn trace_of(points: &[Vector], objectives: &[f64], errors: &[f64]) -> IterateTrace {
        let mut tr = IterateTrace::new("test", Vector::zeros(points[0].len()), None, 1);
        for (i, p) in points.iter().enumerate() {
            tr.push(TraceRecord {
                t: i + 1,
                x: p.clone(),
                lambda: None,
                objective: objectives[i],
                v: Vector::zeros(p.len()),
                grad_error: errors[i],
                wall_time: 0.0,
            });
        }
        tr
    }

    fn v2(a: f64, b: f64) -> Vector {
        Vector::from_vec(vec![a, b])
    }

    #[test]
    fn tracking_error_of_oracle_is_zero() {
        let pts = vec![v2(1.0, 2.0), v2(3.0, -1.0)];
        let tr = trace_of(&pts, &[0.0, 0.0], &[0.0, 0.0]);
        let or: Vec<_> = pts.iter().map(|p| oracle_at(p.clone(), 0.0)).collect();
        let m = tracking_error(&tr, &or).unwrap();
        assert_eq!(m.values, vec![0.0, 0.0]);
    }

    #[test]
    fn tracking_error_is_euclidean() {
        let stars = [v2(1.0, 1.0), v2(-2.0, 0.5)];
        let pts: Vec<_> = stars.iter().map(|s| s + v2(3.0, 4.0)).collect();
        let tr = trace_of(&pts, &[0.0, 0.0], &[0.0, 0.0]);
        let or: Vec<_> = stars.iter().map(|p| oracle_at(p.clone(), 0.0)).collect();
        let m = tracking_error(&tr, &or).unwrap();
        for v in m.values {
            assert!((v - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let tr = trace_of(&[v2(0.0, 0.0)], &[0.0], &[0.0]);
        assert!(matches!(tracking_error(&tr, &[]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(dynamic_regret(&tr, &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn constant_error_accumulates() {
        let pts = vec![Vector::zeros(1); 100];
        let tr = trace_of(&pts, &[0.0; 100], &[0.1; 100]);
        let (e, e2) = gradient_error_accumulators(&tr);
        assert!((e.total() - 10.0).abs() < 1e-12);
        assert!((e2.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_jump_path_length() {
        let or = vec![
            oracle_at(v2(0.0, 0.0), 0.0),
            oracle_at(v2(0.0, 0.0), 0.0),
            oracle_at(v2(3.0, 4.0), 0.0),
            oracle_at(v2(3.0, 4.0), 0.0),
        ];
        let (sigma, total) = path_length(&or).unwrap();
        assert_eq!(sigma.values, vec![0.0, 0.0, 5.0, 0.0]);
        assert_eq!(total.total(), 5.0);
    }

    #[test]
    fn comparator_variation_example() {
        let pts = vec![Vector::from_element(1, 0.0), Vector::from_element(1, 2.0)];
        let tr = trace_of(&pts, &[0.0, 0.0], &[0.0, 0.0]);
        let m = comparator_variation(&tr, &Vector::from_element(1, 1.0)).unwrap();
        assert_eq!(m.total(), 2.0);
    }

    #[test]
    fn one_step_regret() {
        let tr = trace_of(&[Vector::from_element(1, 2.0)], &[2.0], &[0.0]);
        let reg = dynamic_regret(&tr, &[oracle_at(Vector::zeros(1), 0.0)]).unwrap();
        assert_eq!(reg.total(), 2.0);
    }

    #[test]
    fn plateau_spot_value() {
        let q = crate::solvers::contraction_factor(0.5, 1.0, 2.0);
        assert_eq!(q, 0.5);
        assert!((plateau_bound(0.5, q, 0.0, 0.1) - 0.1).abs() < 1e-15);
        assert!((plateau_bound_k(0.5, q, 0.0, 0.1, 1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pd_coefficient_with_alpha_squared() {
        let p = PrimalDualParams::new(0.1, 1.0, 1.0, 2.0);
        assert!((p.q() - 0.84f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_regularization_is_not_applicable() {
        let tr = trace_of(&[Vector::zeros(1)], &[0.0], &[0.0]);
        let rep = primal_dual_certificate(&tr, &[oracle_at(Vector::zeros(1), 0.0)], &PrimalDualParams::new(0.1, 1.0, 0.0, 1.0)).unwrap();
        assert!(!rep.applicable);
    }

    #[test]
    fn non_contracting_step_is_not_applicable() {
        let tr = trace_of(&[Vector::zeros(1)], &[0.0], &[0.0]);
        let rep = contraction_certificate(&tr, &[oracle_at(Vector::zeros(1), 0.0)], &ContractionParams::new(1.0, 1.0, 2.0)).unwrap();
        assert!(!rep.applicable);
        assert!(!rep.passes());
    }

    #[test]
    fn regret_bound_needs_unit_over_l_step() {
        let tr = trace_of(&[Vector::zeros(1)], &[0.0], &[0.0]);
        let rep = regret_bound_check(&tr, &[oracle_at(Vector::zeros(1), 0.0)], &RegretParams::new(0.5, 1.0)).unwrap();
        assert!(!rep.applicable);
    }

    #[test]
    fn running_max_and_tail() {
        let m = MetricSeries::running_max("m", vec![1.0, 3.0, 2.0]);
        assert_eq!(m.cumulative, vec![1.0, 3.0, 3.0]);
        assert_eq!(m.max_from(3), Some(2.0));
        assert_eq!(tail_start(10, 0.2), 8);
        assert_eq!(tail_start(3, 0.2), 2);
        assert_eq!(tail_start(0, 0.2), 0);
    }
}
