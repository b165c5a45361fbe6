//! Monte Carlo sweeps over sample sizes.
//!
//! Every trial draws its samples from seeds derived as
//! `mix64(mix64(seed, n), trial)`, runs independently (in parallel under
//! rayon) and is folded back in ascending trial order, so tables do not depend
//! on the thread count.
//!
//! The estimators are:
//!
//! * [`projection_rate_sweep`]: `E sup_θ W(μ_{n,θ}, μ_θ)`. Against a
//!   rotation-invariant continuous target the 1D distance is integrated
//!   exactly from the closed-form projected law; finitely supported targets
//!   are used as they are; other families fall back to a reference sample.
//!   The supremum is a 512-direction grid in the plane and restarted ascent
//!   otherwise, so it is a lower bound.
//! * [`full_rate_sweep`]: `E W(μ_n, μ)` through the two-sample proxy
//!   `W(μ_n, μ'_m)` with a fresh reference sample of size `m`. The proxy is
//!   biased upwards by the reference's own error, of order `m^{-1/d}`, which
//!   flattens fitted slopes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use cwot_core::cramer_wold::{alpha_exponent, verify_cw_with, BoundReport, VerifyOptions};
use cwot_core::maxsliced::{grid_maximize_2d, maximize, MeasurePair, SlicedObjective};
use cwot_core::ot1d::w1_1d;
use cwot_core::otlp::w1_exact;
use cwot_core::seeding::mix64;
use cwot_core::{
    DiscreteMeasure, Direction, DistributionSpec, Family, MaxSlicedConfig, MomentOrder, ProjectedLaw,
};

use crate::error::{Error, Result};
use crate::io::{write_measure, KeyValues};

/// Grid size for the planar supremum when no budget is given.
pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub spec: DistributionSpec,
    /// Strictly increasing sample sizes, each at least 2.
    pub n_grid: Vec<usize>,
    pub trials: usize,
    /// Grid size in the plane, optimizer restarts in higher dimension.
    pub theta_budget: usize,
    /// Size of the reference sample standing in for the continuous target.
    pub reference_size: Option<usize>,
    pub seed: u64,
}

impl SweepConfig {
    pub const KEYS: [&'static str; 8] = [
        "family",
        "dim",
        "params",
        "seed",
        "n_grid",
        "trials",
        "theta_budget",
        "reference_size",
    ];

    /// Reads a sweep from `key = value` pairs; see [`Self::KEYS`].
    /// `params` holds the family parameters, the spec seed equals `seed`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(&Self::KEYS)?;
        let dim: usize = kv.require("dim")?;
        let family: String = kv.require("family")?;
        let params: Vec<f64> = kv.list("params")?;
        let seed: u64 = kv.get("seed")?.unwrap_or(0);
        let spec = DistributionSpec::new(Family::from_parts(&family, dim, &params)?, dim, seed)?;
        let cfg = SweepConfig {
            spec,
            n_grid: kv.list("n_grid")?,
            trials: kv.require("trials")?,
            theta_budget: kv.get("theta_budget")?.unwrap_or(default_budget(dim)),
            reference_size: kv.get("reference_size")?,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::input("n_grid is empty"));
        }
        if self.n_grid[0] < 2 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("n_grid must be strictly increasing with entries >= 2"));
        }
        if self.trials == 0 {
            return Err(Error::input("trials must be >= 1"));
        }
        if self.theta_budget == 0 {
            return Err(Error::input("theta_budget must be >= 1"));
        }
        if let Some(m) = self.reference_size {
            let need = 16 * self.n_grid[self.n_grid.len() - 1];
            if m < need {
                return Err(Error::input(format!(
                    "reference_size must be at least 16 * max(n_grid) = {need}"
                )));
            }
        }
        Ok(())
    }

    fn require_reference(&self) -> Result<usize> {
        self.reference_size
            .ok_or_else(|| Error::input("this sweep needs reference_size"))
    }
}

/// Grid size in the plane, `16 + 8d` restarts otherwise.
pub fn default_budget(dim: usize) -> usize {
    if dim == 2 {
        DEFAULT_GRID
    } else {
        16 + 8 * dim
    }
}

pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    mix64(mix64(seed, n as u64), trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// OLS fit of `ln mean = intercept + slope · ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// `NaN` with only two points.
    pub slope_se: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    /// `None` when some mean is zero and the log-log fit is undefined.
    pub fit: Option<LogLogFit>,
}

impl RateTable {
    pub fn from_rows(rows: Vec<RateRow>) -> Self {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean)).collect();
        let fit = fit_log_log(&pts);
        RateTable { rows, fit }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean,stderr,trials\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:?},{:?},{}\n", r.n, r.mean, r.stderr, r.trials));
        }
        out
    }
}

/// Least squares on `(ln x, ln y)`. `None` unless there are at least two
/// distinct positive `x` and all `y` are positive.
pub fn fit_log_log(points: &[(f64, f64)]) -> Option<LogLogFit> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if logs.len() > 2 {
        let ssr: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr / (k - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LogLogFit {
        slope,
        slope_se,
        intercept,
    })
}

/// Sample mean and its standard error (`sd / √T`, `0` for one trial).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Runs `trial(seed)` for every trial of sample size `n` and returns the
/// results in trial order.
fn run_trials<F>(cfg: &SweepConfig, n: usize, trial: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(trial_seed(cfg.seed, n, t)))
        .collect()
}

fn sweep<F>(cfg: &SweepConfig, trial: F) -> Result<RateTable>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let values = run_trials(cfg, n, |seed| trial(n, seed))?;
        let (mean, stderr) = mean_and_stderr(&values);
        rows.push(RateRow {
            n,
            mean,
            stderr,
            trials: cfg.trials,
        });
    }
    Ok(RateTable::from_rows(rows))
}

/// `W(μ_{n,θ}, λ)` for a fixed continuous law `λ` of the projections,
/// integrated exactly in quantile form:
/// `Σ_k ∫_{c_{k-1}}^{c_k} |s_(k) - Q(u)| du` with `Q` the quantile function
/// of `λ` and `s_(k)` the sorted projections.
pub struct LawObjective<'a> {
    sample: &'a DiscreteMeasure,
    law: ProjectedLaw,
    /// Cumulative levels `c_k` and `Φ(c_k) = ∫_0^{c_k} Q`, when the sample
    /// weights are all equal so that the levels do not depend on `θ`.
    levels: Option<Vec<(f64, f64)>>,
}

impl<'a> LawObjective<'a> {
    pub fn new(sample: &'a DiscreteMeasure, law: ProjectedLaw) -> Result<Self> {
        if !law.is_continuous() {
            return Err(Error::input("law objective needs a continuous law"));
        }
        let w = sample.weights();
        let uniform = w.iter().all(|x| *x == w[0]);
        let levels = uniform.then(|| {
            let mut out = Vec::with_capacity(w.len() + 1);
            let mut c = 0.0;
            out.push((0.0, 0.0));
            for (k, x) in w.iter().enumerate() {
                c += x;
                let level = if k + 1 == w.len() { 1.0 } else { c };
                out.push((level, integrated_quantile(&law, level)));
            }
            out
        });
        Ok(LawObjective { sample, law, levels })
    }

    fn evaluate(&self, theta: &Direction, want_grad: bool) -> (f64, Vec<f64>) {
        let proj = self.sample.project_values(theta);
        let mut order: Vec<usize> = (0..proj.len()).collect();
        order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
        let dim = self.sample.dim();
        let mut grad = vec![0.0; if want_grad { dim } else { 0 }];
        let mut total = 0.0;
        let (mut a, mut phi_a) = (0.0, 0.0);
        for (rank, &k) in order.iter().enumerate() {
            let (b, phi_b) = match &self.levels {
                Some(levels) => levels[rank + 1],
                None => {
                    let b = if rank + 1 == order.len() { 1.0 } else { a + self.sample.weight(k) };
                    (b, integrated_quantile(&self.law, b))
                }
            };
            let s = proj[k];
            let f = self.law.cdf(s);
            let (u, phi_u) = if f <= a {
                (a, phi_a)
            } else if f >= b {
                (b, phi_b)
            } else {
                (f, self.law.partial_mean(s))
            };
            total += s * (u - a) - (phi_u - phi_a) + (phi_b - phi_u) - s * (b - u);
            if want_grad {
                let slope = (u - a) - (b - u);
                for (g, x) in grad.iter_mut().zip(self.sample.point(k)) {
                    *g += slope * x;
                }
            }
            a = b;
            phi_a = phi_b;
        }
        (total.max(0.0), grad)
    }
}

/// `∫_0^u Q(v) dv`, the partial mean below the `u`-quantile.
fn integrated_quantile(law: &ProjectedLaw, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    law.partial_mean(law.quantile(u.min(1.0)))
}

impl SlicedObjective for LawObjective<'_> {
    fn dim(&self) -> usize {
        self.sample.dim()
    }

    fn value(&self, theta: &Direction) -> f64 {
        self.evaluate(theta, false).0
    }

    /// The law does not move with `θ`, so only the sample contributes.
    fn value_and_supergradient(&self, theta: &Direction) -> (f64, Vec<f64>) {
        self.evaluate(theta, true)
    }
}

fn sup_over_directions<O: SlicedObjective>(obj: &O, budget: usize, seed: u64) -> Result<f64> {
    match obj.dim() {
        1 => Ok(obj.value(&Direction::axis(1, 0)?)),
        2 => Ok(grid_maximize_2d(obj, budget.max(4))?.0),
        _ => Ok(maximize(obj, &MaxSlicedConfig::with_restarts(budget, seed))?.value),
    }
}

/// One trial of the projected-rate estimator.
pub fn projection_trial(cfg: &SweepConfig, n: usize, seed: u64) -> Result<f64> {
    let spec = &cfg.spec;
    let sample = spec.with_seed(mix64(seed, 0)).sample_empirical(n)?;
    let budget = cfg.theta_budget;
    let opt_seed = mix64(seed, 2);
    if let Some(target) = spec.as_discrete() {
        return sup_over_directions(&MeasurePair::new(&sample, &target)?, budget, opt_seed);
    }
    if spec.is_rotation_invariant() {
        let law = spec.projected_law(&Direction::axis(spec.dim(), 0)?)?;
        return match law.as_atoms() {
            Some(atoms) => sup_over_directions(&MeasurePair::new(&sample, atoms)?, budget, opt_seed),
            None => sup_over_directions(&LawObjective::new(&sample, law)?, budget, opt_seed),
        };
    }
    let m = cfg.require_reference()?;
    let reference = spec.with_seed(mix64(seed, 1)).sample_empirical(m)?;
    sup_over_directions(&MeasurePair::new(&sample, &reference)?, budget, opt_seed)
}

/// `E sup_θ W(μ_{n,θ}, μ_θ)` for each `n`, with a log-log fit.
pub fn projection_rate_sweep(cfg: &SweepConfig) -> Result<RateTable> {
    cfg.validate()?;
    let spec = &cfg.spec;
    if spec.as_discrete().is_none() && !spec.is_rotation_invariant() {
        cfg.require_reference()?;
    }
    sweep(cfg, |n, seed| projection_trial(cfg, n, seed))
}

/// One trial of the two-sample proxy `W(μ_n, μ'_m)`.
pub fn full_trial(cfg: &SweepConfig, n: usize, seed: u64) -> Result<f64> {
    let spec = &cfg.spec;
    let sample = spec.with_seed(mix64(seed, 0)).sample_empirical(n)?;
    let reference = match spec.as_discrete() {
        // A finitely supported target needs no proxy.
        Some(target) => target,
        None => spec.with_seed(mix64(seed, 1)).sample_empirical(cfg.require_reference()?)?,
    };
    if spec.dim() == 1 {
        Ok(w1_1d(&sample, &reference)?)
    } else {
        Ok(w1_exact(&sample, &reference)?.value)
    }
}

/// `E W(μ_n, μ)` for each `n` through the two-sample proxy.
pub fn full_rate_sweep(cfg: &SweepConfig) -> Result<RateTable> {
    cfg.validate()?;
    if cfg.spec.as_discrete().is_none() {
        cfg.require_reference()?;
    }
    sweep(cfg, |n, seed| full_trial(cfg, n, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferRow {
    pub n: usize,
    /// Estimate of `E W(μ_n, μ)`.
    pub lhs: f64,
    pub lhs_se: f64,
    /// Estimate of `E sup_θ W(μ_{n,θ}, μ_θ)`.
    pub sliced: f64,
    pub sliced_se: f64,
    /// `18 · sliced^α`.
    pub rhs: f64,
    /// `lhs / rhs`, `0` when both vanish.
    pub ratio: f64,
    /// Delta-method standard error of `ratio`.
    pub ratio_se: f64,
    /// `ratio ≤ 1 + 3 · ratio_se`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    pub alpha: f64,
    pub rows: Vec<TransferRow>,
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Compares `E W(μ_n, μ)` with `18 [E sup_θ W(μ_{n,θ}, μ_θ)]^α`,
/// `α = 2/(d+2)`. The inner supremum is a lower bound and the proxy for the
/// left side is biased upwards, so the check errs towards failing.
pub fn concavity_transfer_check(cfg: &SweepConfig) -> Result<TransferReport> {
    cfg.validate()?;
    let alpha = alpha_exponent(MomentOrder::Infinity, cfg.spec.dim())?;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let lhs_values = run_trials(cfg, n, |seed| full_trial(cfg, n, seed))?;
        let sliced_values = run_trials(cfg, n, |seed| projection_trial(cfg, n, seed))?;
        let (lhs, lhs_se) = mean_and_stderr(&lhs_values);
        let (sliced, sliced_se) = mean_and_stderr(&sliced_values);
        let rhs = 18.0 * sliced.powf(alpha);
        let (ratio, ratio_se) = if lhs == 0.0 {
            (0.0, 0.0)
        } else {
            let ratio = lhs / rhs;
            let rel = (lhs_se / lhs).powi(2) + (alpha * sliced_se / sliced).powi(2);
            (ratio, ratio * rel.sqrt())
        };
        rows.push(TransferRow {
            n,
            lhs,
            lhs_se,
            sliced,
            sliced_se,
            rhs,
            ratio,
            ratio_se,
            pass: ratio <= 1.0 + 3.0 * ratio_se,
        });
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(TransferReport {
        alpha,
        rows,
        worst_ratio,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScanConfig {
    pub pairs: Vec<(DistributionSpec, DistributionSpec)>,
    pub p: MomentOrder,
    pub budget: usize,
    /// Sample size of each measure.
    pub atoms: usize,
    pub verify: VerifyOptions,
}

impl RatioScanConfig {
    pub const KEYS: [&'static str; 7] = ["dim", "p", "budget", "atoms", "seed", "pairs", "params"];

    /// `pairs` lists `familyA/familyB` entries; `params` gives parameters as
    /// `family: values; family: values`. Specs in a pair get seeds
    /// `mix64(seed, 2k)` and `mix64(seed, 2k + 1)` for pair index `k`,
    /// unless both sides name the same family, in which case they share one.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(&Self::KEYS)?;
        let dim: usize = kv.require("dim")?;
        let seed: u64 = kv.get("seed")?.unwrap_or(0);
        let params = parse_family_params(kv.raw("params").unwrap_or(""))?;
        let lookup = |name: &str| params.iter().find(|(f, _)| f == name).map(|(_, p)| p.clone()).unwrap_or_default();
        let mut pairs = Vec::new();
        for (k, entry) in kv.list::<String>("pairs")?.iter().enumerate() {
            let (a, b) = entry
                .split_once('/')
                .ok_or_else(|| Error::input(format!("pair `{entry}` must read `familyA/familyB`")))?;
            let sa = mix64(seed, 2 * k as u64);
            let sb = if a == b { sa } else { mix64(seed, 2 * k as u64 + 1) };
            pairs.push((
                DistributionSpec::new(Family::from_parts(a, dim, &lookup(a))?, dim, sa)?,
                DistributionSpec::new(Family::from_parts(b, dim, &lookup(b))?, dim, sb)?,
            ));
        }
        let cfg = RatioScanConfig {
            pairs,
            p: kv.get("p")?.unwrap_or(MomentOrder::Infinity),
            budget: kv.require("budget")?,
            atoms: kv.get("atoms")?.unwrap_or(8),
            verify: VerifyOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::input("ratio scan needs at least one pair"));
        }
        if self.budget == 0 || self.atoms == 0 {
            return Err(Error::input("budget and atoms must be >= 1"));
        }
        Ok(())
    }

    /// Instance `i`: pair `i mod len`, each side sampled with
    /// `mix64(spec seed, i)`. Equal specs give equal measures.
    pub fn instance(&self, i: usize) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
        let (a, b) = &self.pairs[i % self.pairs.len()];
        let mu = a.with_seed(mix64(a.seed(), i as u64)).sample_empirical(self.atoms)?;
        let nu = b.with_seed(mix64(b.seed(), i as u64)).sample_empirical(self.atoms)?;
        Ok((mu, nu))
    }
}

fn parse_family_params(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let (name, values) = entry
                .split_once(':')
                .ok_or_else(|| Error::input(format!("params entry `{entry}` must read `family: values`")))?;
            let values = values
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| Error::input(format!("cannot parse `{t}`"))))
                .collect::<Result<Vec<f64>>>()?;
            Ok((name.trim().to_string(), values))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScanReport {
    pub max_ratio: f64,
    /// Index of the first instance reaching `max_ratio`.
    pub argmax: usize,
    pub pair: (String, String),
    pub report: BoundReport,
    pub instance: (DiscreteMeasure, DiscreteMeasure),
    /// Where the argmax instance was written, if anywhere.
    pub files: Option<(PathBuf, PathBuf)>,
}

/// Runs the bound check on `budget` instances and keeps the largest ratio.
/// With `out_dir`, the argmax pair is written there as `argmax_mu.msr` and
/// `argmax_nu.msr`, which `verify` replays with its default settings.
pub fn ratio_scan(cfg: &RatioScanConfig, out_dir: Option<&Path>) -> Result<RatioScanReport> {
    cfg.validate()?;
    let reports: Vec<BoundReport> = (0..cfg.budget)
        .into_par_iter()
        .map(|i| {
            let (mu, nu) = cfg.instance(i)?;
            Ok(verify_cw_with(&mu, &nu, cfg.p, &cfg.verify)?)
        })
        .collect::<Result<_>>()?;
    let mut argmax = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.ratio > reports[argmax].ratio {
            argmax = i;
        }
    }
    let instance = cfg.instance(argmax)?;
    let files = match out_dir {
        Some(dir) => {
            let paths = (dir.join("argmax_mu.msr"), dir.join("argmax_nu.msr"));
            write_measure(&paths.0, &instance.0)?;
            write_measure(&paths.1, &instance.1)?;
            Some(paths)
        }
        None => None,
    };
    let (a, b) = &cfg.pairs[argmax % cfg.pairs.len()];
    let report = reports[argmax].clone();
    Ok(RatioScanReport {
        max_ratio: report.ratio,
        argmax,
        pair: (a.family().to_string(), b.family().to_string()),
        report,
        instance,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(family: Family, dim: usize) -> SweepConfig {
        SweepConfig {
            spec: DistributionSpec::new(family, dim, 3).unwrap(),
            n_grid: vec![8, 16, 32],
            trials: 4,
            theta_budget: default_budget(dim),
            reference_size: Some(16 * 32),
            seed: 9,
        }
    }

    #[test]
    fn log_log_fit_recovers_a_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.5))).collect();
        let fit = fit_log_log(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.slope_se < 1e-12);
        assert!(fit_log_log(&[(1.0, 1.0), (2.0, 0.0)]).is_none());
        assert!(fit_log_log(&[(2.0, 1.0)]).is_none());
        assert!(fit_log_log(&[(2.0, 1.0), (4.0, 0.5)]).unwrap().slope_se.is_nan());
    }

    #[test]
    fn mean_and_stderr_formulas() {
        assert_eq!(mean_and_stderr(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut cfg = config(Family::UniformBall, 2);
        assert!(cfg.validate().is_ok());
        cfg.n_grid = vec![8, 8];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![1, 8];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![8, 16, 32];
        cfg.reference_size = Some(100);
        assert!(cfg.validate().is_err());
        cfg.reference_size = None;
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn degenerate_spec_gives_zero_rows_and_no_fit() {
        let a = vec![0.3, -0.2];
        let fam = Family::TwoPointMixture { a: a.clone(), b: a, weight_a: 0.5 };
        let cfg = config(fam, 2);
        for table in [projection_rate_sweep(&cfg).unwrap(), full_rate_sweep(&cfg).unwrap()] {
            assert!(table.rows.iter().all(|r| r.mean == 0.0 && r.stderr == 0.0));
            assert!(table.fit.is_none());
        }
        let t = concavity_transfer_check(&cfg).unwrap();
        assert!(t.pass && t.worst_ratio == 0.0);
    }

    #[test]
    fn missing_reference_is_an_input_error() {
        let mut cfg = config(Family::ProductUniformRescaled, 2);
        cfg.reference_size = None;
        assert!(matches!(projection_rate_sweep(&cfg), Err(Error::Input(_))));
        assert!(matches!(full_rate_sweep(&cfg), Err(Error::Input(_))));
        // A closed-form target needs no reference for the projected sweep.
        let mut cfg = config(Family::UniformSphere, 3);
        cfg.reference_size = None;
        assert!(projection_rate_sweep(&cfg).is_ok());
    }

    #[test]
    fn law_objective_matches_quadrature() {
        // ∫ |F_n - F| dx by composite Simpson on a fine grid.
        for (dim, law) in [(2, ProjectedLaw::ball(2)), (3, ProjectedLaw::ball(3)), (3, ProjectedLaw::sphere(3)), (4, ProjectedLaw::sphere(4))] {
            let spec = DistributionSpec::new(Family::UniformBall, dim, 17).unwrap();
            let sample = spec.sample_empirical(25).unwrap();
            let obj = LawObjective::new(&sample, law.clone()).unwrap();
            let theta = Direction::new((0..dim).map(|k| 1.0 + k as f64).collect()).unwrap();
            let proj = sample.project(&theta).unwrap();
            let f_n = |x: f64| proj.atoms().take_while(|(y, _)| y[0] <= x).map(|(_, w)| w).sum::<f64>();
            let steps = 400_000;
            let h = 2.0 / steps as f64;
            let g = |x: f64| (f_n(x) - law.cdf(x)).abs();
            let mut quad = 0.0;
            for i in 0..steps {
                let a = -1.0 + i as f64 * h;
                quad += h / 6.0 * (g(a) + 4.0 * g(a + h / 2.0) + g(a + h));
            }
            let v = obj.value(&theta);
            assert!((v - quad).abs() < 1e-6, "d={dim}: {v} vs {quad}");
        }
    }

    #[test]
    fn law_objective_handles_unequal_weights() {
        let m = DiscreteMeasure::new(2, vec![0.1, 0.2, -0.5, 0.3, 0.4, -0.1], vec![1.0, 2.0, 3.0]).unwrap();
        let law = ProjectedLaw::ball(2);
        let obj = LawObjective::new(&m, law.clone()).unwrap();
        assert!(obj.levels.is_none());
        let uniform = DiscreteMeasure::uniform(2, vec![0.1, 0.2, -0.5, 0.3, 0.4, -0.1]).unwrap();
        let fast = LawObjective::new(&uniform, law.clone()).unwrap();
        let slow = LawObjective { sample: &uniform, law, levels: None };
        for k in 0..8 {
            let theta = Direction::from_angle(0.4 * k as f64);
            assert!((fast.value(&theta) - slow.value(&theta)).abs() < 1e-12);
            assert!(obj.value(&theta) > 0.0);
        }
    }

    #[test]
    fn law_gradient_matches_finite_differences() {
        let spec = DistributionSpec::new(Family::UniformBall, 3, 4).unwrap();
        let sample = spec.sample_empirical(12).unwrap();
        let obj = LawObjective::new(&sample, ProjectedLaw::ball(3)).unwrap();
        let t = Direction::new(vec![0.3, -0.5, 0.8]).unwrap();
        let (_, g) = obj.value_and_supergradient(&t);
        // A tangent vector at θ: moving along it changes θ only to second order in length.
        let raw = [0.5, 0.3, 0.0];
        let c = t.dot(&raw);
        let v: Vec<f64> = raw.iter().zip(t.components()).map(|(r, x)| r - c * x).collect();
        let h = 1e-6;
        let at = |s: f64| {
            let p: Vec<f64> = t.components().iter().zip(&v).map(|(a, b)| a + s * b).collect();
            obj.value(&Direction::new(p).unwrap())
        };
        let numeric = (at(h) - at(-h)) / (2.0 * h);
        let analytic: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((numeric - analytic).abs() < 1e-5, "{numeric} vs {analytic}");
    }

    #[test]
    fn sweeps_do_not_depend_on_thread_count() {
        let cfg = config(Family::UniformBall, 3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| projection_rate_sweep(&cfg)).unwrap();
        let b = four.install(|| projection_rate_sweep(&cfg)).unwrap();
        assert_eq!(a, b);
        let a = one.install(|| full_rate_sweep(&cfg)).unwrap();
        let b = four.install(|| full_rate_sweep(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ratio_scan_examples() {
        let spec = DistributionSpec::new(Family::UniformBall, 2, 5).unwrap();
        let same = RatioScanConfig {
            pairs: vec![(spec.clone(), spec)],
            p: MomentOrder::Infinity,
            budget: 5,
            atoms: 6,
            verify: VerifyOptions::default(),
        };
        let rep = ratio_scan(&same, None).unwrap();
        assert_eq!(rep.max_ratio, 0.0);

        // Point masses: W = M = |a - b| and b = max(|a|, |b|).
        let point = |x: Vec<f64>, seed| {
            DistributionSpec::new(Family::TwoPointMixture { a: x.clone(), b: x, weight_a: 1.0 }, 2, seed).unwrap()
        };
        let cfg = RatioScanConfig {
            pairs: vec![(point(vec![0.6, 0.0], 1), point(vec![-0.2, 0.0], 2))],
            p: MomentOrder::Infinity,
            budget: 2,
            atoms: 3,
            verify: VerifyOptions::default(),
        };
        let rep = ratio_scan(&cfg, None).unwrap();
        let expected = 0.8 / (18.0 * 0.6f64.sqrt() * 0.8f64.sqrt());
        assert!((rep.max_ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn ratio_scan_config_parsing() {
        let kv = KeyValues::parse(
            "dim = 2\nbudget = 3\np = 4\npairs = uniform-ball/uniform-ball, two-point-mixture/uniform-sphere\nparams = two-point-mixture: 0.5 0 -0.5 0 0.3\n",
        )
        .unwrap();
        let cfg = RatioScanConfig::from_key_values(&kv).unwrap();
        assert_eq!(cfg.pairs.len(), 2);
        assert_eq!(cfg.pairs[0].0, cfg.pairs[0].1);
        assert_ne!(cfg.pairs[1].0.seed(), cfg.pairs[1].1.seed());
        assert_eq!(cfg.p, MomentOrder::Finite(4.0));
        let (mu, nu) = cfg.instance(0).unwrap();
        assert_eq!(mu, nu);
        let bad = KeyValues::parse("dim = 2\nbudget = 3\npairs = two-point-mixture/uniform-ball\n").unwrap();
        assert!(RatioScanConfig::from_key_values(&bad).is_err());
    }
}
