use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::distributions::{CdfSpec, Univariate};
use crate::empirical::default_bandwidth;
use crate::error::{Error, Result};
use crate::functionals::{evaluate, FunctionalKind};
use crate::grid::{GridDomain, GridFunction};
use crate::limits::{
    bj_spec, compare_distributions, copula_symmetry_spec, copula_tn_spec, finite_n_surrogate,
    mmd_spec, simulate_limit, summarize, LimitSpec, Summary, DEFAULT_TIE_TOLERANCE,
};
use crate::parallel::{default_workers, parallel_map};
use crate::reference::{
    bj_reference, ks_reference, radial_gap, weighted_bridge_sd, Provenance, Reference,
};
use crate::rng::{replicate_rng, streams};
use crate::samplers::{bridge_sampler, mixture_sampler};
use crate::statistics::{
    berk_jones_bn, berk_jones_dn, berk_jones_null_centered, copula_stat_tn, copula_symmetry_stat,
    kl, ks_one_sample, ks_two_sample, mmd_statistic, two_sample_scale,
};

/// Quantile-quadrature nodes for class moments.
const QUADRATURE_NODES: usize = 200_000;
/// Dense-grid resolution of the copula reference constants.
const COPULA_REFERENCE_NODES: usize = 400;

/// Finite-rate diagnostic: `rate (phi(q + g / rate) - phi(q))` on the limit
/// paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateReport {
    pub summary: Summary,
    pub ks_to_statistic: f64,
    pub ks_to_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub functional: FunctionalKind,
    /// Normalizing rate `r_n`.
    pub rate: f64,
    pub eps: f64,
    pub references: Vec<Reference>,
    pub statistic: Summary,
    pub limit: Summary,
    /// Two-sample Kolmogorov-Smirnov distance between the replicate sets.
    pub ks_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortcut_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<SurrogateReport>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn reference(&self, name: &str) -> Option<&Reference> {
        self.references.iter().find(|r| r.name == name)
    }
}

/// Report plus the raw replicate sets it summarizes.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub statistic: Vec<f64>,
    pub limit: Vec<f64>,
}

struct Plan {
    rate: f64,
    eps: f64,
    references: Vec<Reference>,
    statistic: Vec<f64>,
    limit: Vec<f64>,
    shortcut_variance: Option<f64>,
    surrogate: Option<Vec<f64>>,
}

fn reference(name: &str, value: f64, provenance: Provenance) -> Result<Reference> {
    if !value.is_finite() {
        return Err(Error::oracle(name, "evaluated to a non-finite value"));
    }
    Ok(Reference {
        name: name.to_string(),
        value,
        provenance,
        argmax: None,
    })
}

fn collect(values: Vec<Result<f64>>) -> Result<Vec<f64>> {
    values.into_iter().collect()
}

/// Line with `nodes` points equispaced in the compactified coordinate,
/// augmented with the atoms of the laws involved.
fn line_grid(nodes: usize, laws: &[&Univariate]) -> Result<Arc<GridDomain>> {
    let base = GridDomain::<f64>::compactified_line(nodes)?;
    let mut interior: Vec<f64> = base.axis(0)[1..nodes - 1].to_vec();
    for law in laws {
        interior.extend_from_slice(law.atoms());
    }
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    Ok(Arc::new(GridDomain::compactified_with(interior)?))
}

/// `F - G` on a line, cadlag when either law has atoms.
fn cdf_difference(grid: &Arc<GridDomain>, f: &Univariate, g: &Univariate) -> Result<GridFunction> {
    let xs = grid.axis(0);
    let values = xs.iter().map(|&x| f.cdf(x) - g.cdf(x)).collect();
    if f.is_continuous() && g.is_continuous() {
        GridFunction::new(Arc::clone(grid), values)
    } else {
        let left = xs.iter().map(|&x| f.cdf_left(x) - g.cdf_left(x)).collect();
        GridFunction::cadlag(Arc::clone(grid), values, left)
    }
}

/// Line on the interior quantiles `F^{-1}((k + 1/2) / nodes)` of `F`.
fn quantile_grid(nodes: usize, f: &Univariate) -> Result<Arc<GridDomain>> {
    let mut xs: Vec<f64> = (0..nodes)
        .map(|k| f.quantile((k as f64 + 0.5) / nodes as f64))
        .collect();
    xs.dedup();
    Ok(Arc::new(GridDomain::line(xs)?))
}

fn limit_side(
    spec: &LimitSpec,
    cfg: &ExperimentConfig,
    rate: f64,
    workers: usize,
) -> Result<(Vec<f64>, Option<f64>, Vec<f64>)> {
    let reps = simulate_limit(spec, cfg.limit_paths, workers)?;
    let surrogate = finite_n_surrogate(spec, rate, cfg.limit_paths, workers)?;
    Ok((reps.values, reps.shortcut.map(|s| s.variance), surrogate))
}

/// Runs one experiment: statistic replicates from fresh seeded samples,
/// limit replicates from seeded paths, and their comparison.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let workers = cfg.workers.unwrap_or_else(default_workers);
    let plan = match cfg.experiment {
        ExperimentKind::Ks1 | ExperimentKind::Kuiper => plan_ks1(cfg, workers)?,
        ExperimentKind::Ks2 => plan_ks2(cfg, workers)?,
        ExperimentKind::CopulaTn => plan_copula_tn(cfg, workers)?,
        ExperimentKind::CopulaSymmetry => plan_copula_symmetry(cfg, workers)?,
        ExperimentKind::BerkJones => plan_berk_jones(cfg, workers)?,
        ExperimentKind::BerkJonesNull => plan_berk_jones_null(cfg, workers)?,
        ExperimentKind::MmdFinite => plan_mmd(cfg, workers)?,
    };
    let ks_distance = compare_distributions(&plan.statistic, &plan.limit)?;
    let surrogate = match &plan.surrogate {
        Some(s) => Some(SurrogateReport {
            summary: summarize(s)?,
            ks_to_statistic: compare_distributions(s, &plan.statistic)?,
            ks_to_limit: compare_distributions(s, &plan.limit)?,
        }),
        None => None,
    };
    let report = ExperimentReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        functional: cfg.functional(),
        rate: plan.rate,
        eps: plan.eps,
        references: plan.references,
        statistic: summarize(&plan.statistic)?,
        limit: summarize(&plan.limit)?,
        ks_distance,
        shortcut_variance: plan.shortcut_variance,
        surrogate,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(RunOutput {
        report,
        statistic: plan.statistic,
        limit: plan.limit,
    })
}

fn plan_ks1(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let (f, g) = (cfg.x_univariate()?, cfg.y_univariate()?);
    let kind = cfg.functional();
    let phi = ks_reference(f, g, kind).map_err(|e| Error::oracle("phi(F - G)", e.to_string()))?;
    let references = vec![reference("phi(F - G)", phi, Provenance::DenseGrid)?];
    let gs = CdfSpec::Univariate(g.clone());
    let rate = (cfg.n as f64).sqrt();
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        let s = crate::empirical::Sample::univariate(f.draw(&mut rng, cfg.n))?;
        Ok(ks_one_sample(&s, &gs, kind, phi)?.centered)
    }))?;
    let grid = line_grid(cfg.grid_nodes, &[f, g])?;
    let q = cdf_difference(&grid, f, g)?;
    let sampler = bridge_sampler(&f.clone().into(), &grid)?.with_seed(cfg.seed, streams::LIMIT);
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = LimitSpec::new(kind, q, sampler, eps);
    let (limit, shortcut_variance, surrogate) = limit_side(&spec, cfg, rate, workers)?;
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit,
        shortcut_variance,
        surrogate: Some(surrogate),
    })
}

fn plan_ks2(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let (f, g) = (cfg.x_univariate()?, cfg.y_univariate()?);
    let m = cfg.m_size()?;
    let kind = cfg.functional();
    let phi = ks_reference(f, g, kind).map_err(|e| Error::oracle("phi(F - G)", e.to_string()))?;
    let references = vec![reference("phi(F - G)", phi, Provenance::DenseGrid)?];
    let rate = two_sample_scale(cfg.n, m);
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        let sx = crate::empirical::Sample::univariate(f.draw(&mut rng, cfg.n))?;
        let sy = crate::empirical::Sample::univariate(g.draw(&mut rng, m))?;
        Ok(ks_two_sample(&sx, &sy, kind, phi)?.centered)
    }))?;
    let grid = line_grid(cfg.grid_nodes, &[f, g])?;
    let q = cdf_difference(&grid, f, g)?;
    let lambda = cfg.n as f64 / (cfg.n + m) as f64;
    let a = bridge_sampler(&f.clone().into(), &grid)?;
    let b = bridge_sampler(&g.clone().into(), &grid)?;
    let sampler = mixture_sampler(lambda, a, b)?.with_seed(cfg.seed, streams::LIMIT);
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = LimitSpec::new(kind, q, sampler, eps);
    let (limit, shortcut_variance, surrogate) = limit_side(&spec, cfg, rate, workers)?;
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit,
        shortcut_variance,
        surrogate: Some(surrogate),
    })
}

fn copula_grid(cfg: &ExperimentConfig) -> Result<(Arc<GridDomain>, f64)> {
    let grid = Arc::new(GridDomain::unit_lattice(cfg.grid_nodes, 2)?);
    let h = cfg.bandwidth.unwrap_or_else(|| default_bandwidth(cfg.n, &grid));
    Ok((grid, h))
}

fn plan_copula_tn(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let (c, d) = (cfg.x_copula()?, cfg.y_copula()?);
    let last = (COPULA_REFERENCE_NODES - 1) as f64;
    let mut gap = 0.0f64;
    for i in 0..COPULA_REFERENCE_NODES {
        for j in 0..COPULA_REFERENCE_NODES {
            let u = [i as f64 / last, j as f64 / last];
            gap = gap.max((c.cdf(&u) - d.cdf(&u)).abs());
        }
    }
    let references = vec![reference("||C - D||", gap, Provenance::DenseGrid)?];
    let rate = (cfg.n as f64).sqrt();
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        Ok(copula_stat_tn(&c.draw(&mut rng, cfg.n), d, gap)?.centered)
    }))?;
    let (grid, h) = copula_grid(cfg)?;
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = copula_tn_spec(c, d, &grid, eps, h, cfg.seed)?;
    let (limit, shortcut_variance, surrogate) = limit_side(&spec, cfg, rate, workers)?;
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit,
        shortcut_variance,
        surrogate: Some(surrogate),
    })
}

fn plan_copula_symmetry(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let c = cfg.x_copula()?;
    let gap = radial_gap(c, COPULA_REFERENCE_NODES);
    let references = vec![reference("||C - C̄||", gap, Provenance::DenseGrid)?];
    let rate = (cfg.n as f64).sqrt();
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        Ok(copula_symmetry_stat(&c.draw(&mut rng, cfg.n), gap)?.centered)
    }))?;
    let (grid, h) = copula_grid(cfg)?;
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = copula_symmetry_spec(c, &grid, eps, h, cfg.seed)?;
    let (limit, shortcut_variance, surrogate) = limit_side(&spec, cfg, rate, workers)?;
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit,
        shortcut_variance,
        surrogate: Some(surrogate),
    })
}

fn plan_berk_jones(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let (f, g) = (cfg.x_univariate()?, cfg.y_univariate()?);
    let (r_fg, x_star) = bj_reference(f, g);
    let mut r_ref = reference("R(F, G)", r_fg, Provenance::DenseGrid)?;
    r_ref.argmax = Some(vec![x_star]);
    let sd = weighted_bridge_sd(f.cdf(x_star), g.cdf(x_star));
    let references = vec![r_ref, reference("limit sd at argmax", sd, Provenance::DenseGrid)?];
    let rate = (cfg.n as f64).sqrt();
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        let s = crate::empirical::Sample::univariate(f.draw(&mut rng, cfg.n))?;
        Ok(berk_jones_bn(&s, g, r_fg)?.centered)
    }))?;
    let grid = quantile_grid(cfg.grid_nodes, f)?;
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = bj_spec(f, g, &grid, eps, cfg.seed)?;
    let reps = simulate_limit(&spec, cfg.limit_paths, workers)?;
    // The statistic is not a functional of F_n - F, so the finite-rate
    // counterpart perturbs F by the unweighted bridge read on the same
    // normals and recomputes sup K(F + B / r, G).
    let bridge = bridge_sampler(&f.clone().into(), &grid)?.with_seed(cfg.seed, streams::LIMIT);
    let fx: Vec<f64> = grid.axis(0).iter().map(|&x| f.cdf(x)).collect();
    let gx: Vec<f64> = grid.axis(0).iter().map(|&x| g.cdf(x)).collect();
    let base = evaluate(FunctionalKind::Sup, &spec.q);
    let surrogate = parallel_map(cfg.limit_paths, workers, |r| {
        let b = bridge.sample_path(r as u64);
        let sup = b
            .values()
            .iter()
            .zip(fx.iter().zip(&gx))
            .map(|(bv, (&fv, &gv))| kl((fv + bv / rate).clamp(0.0, 1.0), gv))
            .fold(f64::NEG_INFINITY, f64::max);
        rate * (sup - base)
    });
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit: reps.values,
        shortcut_variance: reps.shortcut.map(|s| s.variance),
        surrogate: Some(surrogate),
    })
}

fn plan_berk_jones_null(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let f = cfg.x_univariate()?;
    let dn = berk_jones_dn(cfg.n)?;
    let references = vec![
        reference("d_n", dn, Provenance::Analytic)?,
        reference("limit median", (4.0 / 2f64.ln()).ln(), Provenance::Analytic)?,
    ];
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        let s = crate::empirical::Sample::univariate(f.draw(&mut rng, cfg.n))?;
        berk_jones_null_centered(&s, f)
    }))?;
    // Exact draws from the double-exponential limit exp(-4 exp(-x)).
    let limit = parallel_map(cfg.limit_paths, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::LIMIT, r as u64);
        let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        -(-u.ln() / 4.0).ln()
    });
    Ok(Plan {
        rate: cfg.n as f64,
        eps: 0.0,
        references,
        statistic,
        limit,
        shortcut_variance: None,
        surrogate: None,
    })
}

fn plan_mmd(cfg: &ExperimentConfig, workers: usize) -> Result<Plan> {
    let (p, q) = (cfg.x_univariate()?, cfg.y_univariate()?);
    let m = cfg.m_size()?;
    let class = cfg.class.as_ref().expect("validated class");
    let (_, sigma_p) = class.moments_under(p, QUADRATURE_NODES);
    let (_, sigma_q) = class.moments_under(q, QUADRATURE_NODES);
    let analytic = class.members.iter().all(|mem| mem.mean_under(p).is_some());
    let gaps: Vec<f64> = class
        .means_under(p, QUADRATURE_NODES)
        .iter()
        .zip(class.means_under(q, QUADRATURE_NODES))
        .map(|(a, b)| a - b)
        .collect();
    let value = gaps
        .iter()
        .map(|&g| if class.symmetric { g.abs() } else { g })
        .fold(f64::NEG_INFINITY, f64::max);
    let provenance = if analytic {
        Provenance::Analytic
    } else {
        Provenance::PlugIn
    };
    let references = vec![reference("MMD[F, P, Q]", value, provenance)?];
    let rate = two_sample_scale(cfg.n, m);
    let statistic = collect(parallel_map(cfg.stat_replicates, workers, |r| {
        let mut rng = replicate_rng(cfg.seed, streams::STATISTIC, r as u64);
        let sx = crate::empirical::Sample::univariate(p.draw(&mut rng, cfg.n))?;
        let sy = crate::empirical::Sample::univariate(q.draw(&mut rng, m))?;
        Ok(mmd_statistic(&sx, &sy, class, value)?.centered)
    }))?;
    let lambda = cfg.n as f64 / (cfg.n + m) as f64;
    let eps = cfg.eps.unwrap_or(DEFAULT_TIE_TOLERANCE);
    let spec = mmd_spec(&gaps, &sigma_p, &sigma_q, lambda, class.symmetric, eps, cfg.seed)?;
    let (limit, shortcut_variance, surrogate) = limit_side(&spec, cfg, rate, workers)?;
    Ok(Plan {
        rate,
        eps,
        references,
        statistic,
        limit,
        shortcut_variance,
        surrogate: Some(surrogate),
    })
}
