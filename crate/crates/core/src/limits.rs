//! Simulation of the limit laws: the directional derivative of the
//! functional at the population contrast, applied to sampled Gaussian paths.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::distributions::{Copula, Univariate};
use crate::empirical::copula_partials;
use crate::error::{Error, Result};
use crate::functionals::{
    difference_quotient, full_differentiability_witness, FunctionalKind, PreparedDerivative,
    Witness,
};
use crate::grid::{GridDomain, GridFunction};
use crate::parallel::parallel_map;
use crate::rng::streams;
use crate::samplers::{
    copula_limit_sampler, finite_class_sampler, weighted_bridge_sampler, PathSampler, Truncation,
};
use crate::statistics::kl;

/// Tie tolerance used as the level-set width for analytically known
/// contrasts: exact ties up to rounding are kept, nothing else.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

/// Level-set width `c sqrt(2 log log n / n)` for contrasts estimated from
/// data.
pub fn lil_epsilon(n: usize, c: f64) -> f64 {
    let n = (n as f64).max(16.0);
    c * (2.0 * n.ln().ln()).sqrt() / n.sqrt()
}

/// Map applied to each sampled path before the derivative is read.
#[derive(Debug, Clone)]
pub enum PathTransform {
    /// `g(u) - g(r(u))` with `r` the reflection `u -> 1 - u` as a node map.
    ReflectionDifference(Vec<usize>),
    /// `(g, -g)` on a class of twice the size (symmetric finite classes).
    SignExpansion,
}

/// Everything needed to simulate `phi'_q(path)`.
#[derive(Debug, Clone)]
pub struct LimitSpec {
    pub kind: FunctionalKind,
    pub q: GridFunction,
    pub sampler: PathSampler,
    pub eps: f64,
    pub transform: Option<PathTransform>,
}

impl LimitSpec {
    pub fn new(kind: FunctionalKind, q: GridFunction, sampler: PathSampler, eps: f64) -> Self {
        LimitSpec {
            kind,
            q,
            sampler,
            eps,
            transform: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0) {
            return Err(Error::NegativeTolerance(self.eps));
        }
        let path_grid = match self.transform {
            Some(PathTransform::SignExpansion) => {
                Arc::new(GridDomain::finite_class(2 * self.sampler.grid().len())?)
            }
            _ => Arc::clone(self.sampler.grid()),
        };
        if *path_grid != **self.q.domain() {
            return Err(Error::GridMismatch(
                "contrast and sampler live on different grids".into(),
            ));
        }
        Ok(())
    }

    fn transform(&self, g: GridFunction) -> GridFunction {
        match &self.transform {
            None => g,
            Some(PathTransform::ReflectionDifference(map)) => {
                let v = g.values();
                let values = map.iter().enumerate().map(|(k, &r)| v[k] - v[r]).collect();
                GridFunction::from_parts_unchecked(Arc::clone(self.q.domain()), values, None)
            }
            Some(PathTransform::SignExpansion) => {
                let v = g.values();
                let values = v.iter().copied().chain(v.iter().map(|x| -x)).collect();
                GridFunction::from_parts_unchecked(Arc::clone(self.q.domain()), values, None)
            }
        }
    }
}

/// Exact normal limit available under full differentiability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shortcut {
    pub variance: f64,
    pub witness: Witness,
}

/// Simulated limit variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReplicates {
    pub values: Vec<f64>,
    pub eps: f64,
    pub shortcut: Option<Shortcut>,
}

impl LimitReplicates {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `phi'_q(g_r)` for paths `r = 0 .. n_paths`. The extremal sets of `q` are
/// extracted once; paths are generated and read in parallel but returned
/// in replicate order.
pub fn simulate_limit(spec: &LimitSpec, n_paths: usize, workers: usize) -> Result<LimitReplicates> {
    spec.validate()?;
    let prepared = PreparedDerivative::new(spec.kind, &spec.q, spec.eps)?;
    let values = parallel_map(n_paths, workers, |r| {
        let g = spec.transform(spec.sampler.sample_path(r as u64));
        prepared.apply_unchecked(&g)
    });
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("limit replicate {k}")));
    }
    Ok(LimitReplicates {
        values,
        eps: spec.eps,
        shortcut: gaussian_shortcut(spec)?,
    })
}

/// Variance of the normal limit when the functional is fully differentiable
/// at `q`, read from the sampler covariance at the witness points.
pub fn gaussian_shortcut(spec: &LimitSpec) -> Result<Option<Shortcut>> {
    if spec.transform.is_some() {
        // The witness would have to be pulled back through the transform;
        // only plain specs get the shortcut.
        return Ok(None);
    }
    let Some(w) = full_differentiability_witness(spec.kind, &spec.q, spec.eps)? else {
        return Ok(None);
    };
    let cov = |a, b| spec.sampler.covariance(a, b);
    let variance = match (w.plus, w.minus) {
        (Some(p), Some(m)) => cov(p, p) + cov(m, m) - 2.0 * cov(p, m),
        (Some(p), None) => cov(p, p),
        (None, Some(m)) => cov(m, m),
        (None, None) => 0.0,
    };
    Ok(Some(Shortcut { variance, witness: w }))
}

/// Limit spec of the Berk-Jones statistic under an alternative:
/// `sup_{M+(K(F,G))} W` with `W = B_F w`.
pub fn bj_spec(
    f: &Univariate,
    g: &Univariate,
    grid: &Arc<GridDomain>,
    eps: f64,
    seed: u64,
) -> Result<LimitSpec> {
    if f == g {
        return Err(Error::invalid("Berk-Jones alternative limit needs F != G"));
    }
    let q = GridFunction::from_fn(Arc::clone(grid), |x| kl(f.cdf(x[0]), g.cdf(x[0])))?;
    if q.is_zero() {
        return Err(Error::invalid("K(F, G) vanishes on the grid"));
    }
    let truncation = Truncation::default();
    let sampler = weighted_bridge_sampler(f, g, grid, truncation)?.with_seed(seed, streams::LIMIT);
    let prepared = PreparedDerivative::new(FunctionalKind::Sup, &q, eps)?;
    let truncated = prepared.plus_points().iter().any(|(p, _)| {
        let fx = f.cdf(grid.coords(p.node)[0]);
        fx * (1.0 - fx) < truncation.min_variance
    });
    if truncated {
        return Err(Error::NonFinite("log weight on the argmax region".into()));
    }
    Ok(LimitSpec::new(FunctionalKind::Sup, q, sampler, eps))
}

pub fn bj_limit(
    f: &Univariate,
    g: &Univariate,
    grid: &Arc<GridDomain>,
    n_paths: usize,
    eps: f64,
    seed: u64,
    workers: usize,
) -> Result<LimitReplicates> {
    simulate_limit(&bj_spec(f, g, grid, eps, seed)?, n_paths, workers)
}

fn copula_sampler(c: &Copula, grid: &Arc<GridDomain>, h: f64, seed: u64) -> Result<PathSampler> {
    let partials = copula_partials(|u| c.cdf(u), grid, h)?;
    Ok(copula_limit_sampler(c, grid, partials)?.with_seed(seed, streams::LIMIT))
}

/// Limit spec of `sqrt(n)(||C_n - D|| - ||C - D||)`: `delta'_{C-D}` of the
/// copula limit process.
pub fn copula_tn_spec(
    c: &Copula,
    d: &Copula,
    grid: &Arc<GridDomain>,
    eps: f64,
    h: f64,
    seed: u64,
) -> Result<LimitSpec> {
    let q = GridFunction::from_fn(Arc::clone(grid), |u| c.cdf(u) - d.cdf(u))?;
    if q.sup_abs() <= DEFAULT_TIE_TOLERANCE {
        return Err(Error::ZeroFunction);
    }
    let sampler = copula_sampler(c, grid, h, seed)?;
    Ok(LimitSpec::new(FunctionalKind::SupNorm, q, sampler, eps))
}

#[allow(clippy::too_many_arguments)]
pub fn copula_limit_tn(
    c: &Copula,
    d: &Copula,
    grid: &Arc<GridDomain>,
    n_paths: usize,
    eps: f64,
    h: f64,
    seed: u64,
    workers: usize,
) -> Result<LimitReplicates> {
    simulate_limit(&copula_tn_spec(c, d, grid, eps, h, seed)?, n_paths, workers)
}

/// `C - C̄` on a reflection-closed lattice.
pub fn radial_contrast(c: &Copula, grid: &Arc<GridDomain>) -> Result<GridFunction> {
    if c.dim() != 2 {
        return Err(Error::invalid("radial symmetry is handled for bivariate copulas"));
    }
    GridFunction::from_fn(Arc::clone(grid), |u| c.cdf(u) - c.survival_cdf(u[0], u[1]))
}

/// Limit spec of the radial-symmetry statistic: `delta'_{C - C̄}` applied
/// to `g(u) - g(1 - u)` for copula limit paths `g`.
pub fn copula_symmetry_spec(
    c: &Copula,
    grid: &Arc<GridDomain>,
    eps: f64,
    h: f64,
    seed: u64,
) -> Result<LimitSpec> {
    let reflect = grid.reflection_map()?;
    let q = radial_contrast(c, grid)?;
    if q.sup_abs() <= DEFAULT_TIE_TOLERANCE {
        return Err(Error::invalid("copula is radially symmetric; the contrast vanishes"));
    }
    let sampler = copula_sampler(c, grid, h, seed)?;
    Ok(LimitSpec {
        kind: FunctionalKind::SupNorm,
        q,
        sampler,
        eps,
        transform: Some(PathTransform::ReflectionDifference(reflect)),
    })
}

pub fn copula_symmetry_limit(
    c: &Copula,
    grid: &Arc<GridDomain>,
    n_paths: usize,
    eps: f64,
    h: f64,
    seed: u64,
    workers: usize,
) -> Result<LimitReplicates> {
    simulate_limit(&copula_symmetry_spec(c, grid, eps, h, seed)?, n_paths, workers)
}

/// Limit spec of the finite-class discrepancy: the maximum of
/// `sqrt(1 - lambda) G_P - sqrt(lambda) G_Q` over the near-maximal gaps.
/// A symmetric class is expanded to `{f, -f}`.
pub fn mmd_spec(
    gaps: &[f64],
    sigma_p: &Array2<f64>,
    sigma_q: &Array2<f64>,
    lambda: f64,
    symmetric: bool,
    tol: f64,
    seed: u64,
) -> Result<LimitSpec> {
    let k = gaps.len();
    if k == 0 {
        return Err(Error::invalid("function class is empty"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    for s in [sigma_p, sigma_q] {
        if s.dim() != (k, k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: s.nrows(),
            });
        }
    }
    let sigma = sigma_p * (1.0 - lambda) + sigma_q * lambda;
    let sampler = finite_class_sampler(sigma)?.with_seed(seed, streams::LIMIT);
    let (values, transform) = if symmetric {
        let ext = gaps.iter().copied().chain(gaps.iter().map(|g| -g)).collect();
        (ext, Some(PathTransform::SignExpansion))
    } else {
        (gaps.to_vec(), None)
    };
    let domain = Arc::new(GridDomain::finite_class(values.len())?);
    let q = GridFunction::new(domain, values)?;
    Ok(LimitSpec {
        kind: FunctionalKind::Sup,
        q,
        sampler,
        eps: tol,
        transform,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn mmd_limit(
    gaps: &[f64],
    sigma_p: &Array2<f64>,
    sigma_q: &Array2<f64>,
    lambda: f64,
    symmetric: bool,
    n_paths: usize,
    tol: f64,
    seed: u64,
    workers: usize,
) -> Result<LimitReplicates> {
    let spec = mmd_spec(gaps, sigma_p, sigma_q, lambda, symmetric, tol, seed)?;
    simulate_limit(&spec, n_paths, workers)
}

/// Finite-rate counterpart of the limit: `rate (phi(q + g / rate) - phi(q))`
/// on the same paths. It is what the statistic would be if the empirical
/// process were exactly Gaussian, so its distance to the statistic isolates
/// the Gaussian approximation from the linearization.
pub fn finite_n_surrogate(
    spec: &LimitSpec,
    rate: f64,
    n_paths: usize,
    workers: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if !(rate > 0.0) {
        return Err(Error::invalid("rate must be positive"));
    }
    parallel_map(n_paths, workers, |r| {
        let g = spec.transform(spec.sampler.sample_path(r as u64));
        difference_quotient(spec.kind, &spec.q, &g, 1.0 / rate)
    })
    .into_iter()
    .collect()
}

/// Two-sample Kolmogorov-Smirnov distance between replicate sets.
pub fn compare_distributions(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let sort = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    let (a, b) = (sort(a), sort(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(best)
}

/// Quantile levels reported in summaries.
pub const SUMMARY_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

/// Moments and quantiles of a replicate set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    /// `(level, value)` pairs at [`SUMMARY_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
}

/// Linearly interpolated sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let sd = if values.len() > 1 { (m2 / (n - 1.0)).sqrt() } else { 0.0 };
    let pop_sd = (m2 / n).sqrt();
    let skewness = if pop_sd > 0.0 { m3 / pop_sd.powi(3) } else { 0.0 };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        count: values.len(),
        mean,
        sd,
        skewness,
        quantiles: SUMMARY_LEVELS
            .iter()
            .map(|&p| (p, quantile_sorted(&sorted, p)))
            .collect(),
    })
}
