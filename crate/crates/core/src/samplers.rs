//! Seeded Gaussian path samplers for the limit processes: F-Brownian
//! bridges and sheets, copula limit processes, the weighted bridge of the
//! Berk-Jones limit, two-sample mixtures and finite-class processes.

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::{CdfSpec, Copula, Univariate};
use crate::error::{Error, Result};
use crate::grid::{Channel, GridDomain, GridFunction, GridPoint};
use crate::linalg::{pivoted_cholesky, LowRankFactor, DEFAULT_PIVOT_TOLERANCE};
use crate::rng::{replicate_rng, streams};

/// Covariance of a zero-mean Gaussian process on a grid.
#[derive(Debug, Clone)]
pub enum CovarianceKind {
    /// `F(x ^ y) - F(x) F(y)`.
    Bridge { f: CdfSpec },
    /// Copula limit `B_C(u) - sum_i d_i C(u) B_C(1, .., u_i, .., 1)`.
    CopulaLimit { c: Copula, partials: Vec<GridFunction> },
    /// `w(x) w(y) (F(x ^ y) - F(x) F(y))`; `weights` lists `w` per node,
    /// zero where truncated.
    WeightedBridge { f: Univariate, g: Univariate, weights: Vec<f64> },
    /// `(1 - lambda) Sigma_a + lambda Sigma_b`.
    Mixture { lambda: f64, a: Box<PathSampler>, b: Box<PathSampler> },
    FiniteClass { sigma: Array2<f64> },
}

#[derive(Debug, Clone)]
pub struct CovarianceSpec {
    pub grid: Arc<GridDomain>,
    pub kind: CovarianceKind,
}

fn bridge_cov(s: f64, t: f64) -> f64 {
    s.min(t) - s * t
}

fn cdf_at(f: &CdfSpec, grid: &GridDomain, p: GridPoint) -> f64 {
    let x = grid.coords(p.node);
    match p.channel {
        Channel::Value => f.cdf(&x),
        Channel::Left => f.cdf_left(&x),
    }
}

fn meet(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

impl CovarianceSpec {
    /// Analytic covariance between two grid points.
    pub fn covariance(&self, a: GridPoint, b: GridPoint) -> f64 {
        let grid = &self.grid;
        match &self.kind {
            CovarianceKind::Bridge { f } => {
                if grid.dim() == 1 {
                    bridge_cov(cdf_at(f, grid, a), cdf_at(f, grid, b))
                } else {
                    let (x, y) = (grid.coords(a.node), grid.coords(b.node));
                    f.cdf(&meet(&x, &y)) - f.cdf(&x) * f.cdf(&y)
                }
            }
            CovarianceKind::WeightedBridge { f, weights, .. } => {
                let spec = CdfSpec::Univariate(f.clone());
                weights[a.node]
                    * weights[b.node]
                    * bridge_cov(cdf_at(&spec, grid, a), cdf_at(&spec, grid, b))
            }
            CovarianceKind::CopulaLimit { c, partials } => {
                let gamma = |x: &[f64], y: &[f64]| c.cdf(&meet(x, y)) - c.cdf(x) * c.cdf(y);
                let margin = |u: &[f64], i: usize| {
                    let mut m = vec![1.0; u.len()];
                    m[i] = u[i];
                    m
                };
                let (u, v) = (grid.coords(a.node), grid.coords(b.node));
                let du: Vec<f64> = partials.iter().map(|p| p.values()[a.node]).collect();
                let dv: Vec<f64> = partials.iter().map(|p| p.values()[b.node]).collect();
                let d = u.len();
                let mut cov = gamma(&u, &v);
                for i in 0..d {
                    cov -= dv[i] * gamma(&u, &margin(&v, i));
                    cov -= du[i] * gamma(&margin(&u, i), &v);
                    for (j, dvj) in dv.iter().enumerate() {
                        cov += du[i] * dvj * gamma(&margin(&u, i), &margin(&v, j));
                    }
                }
                cov
            }
            CovarianceKind::Mixture { lambda, a: sa, b: sb } => {
                (1.0 - lambda) * sa.covariance(a, b) + lambda * sb.covariance(a, b)
            }
            CovarianceKind::FiniteClass { sigma } => sigma[[a.node, b.node]],
        }
    }
}

/// How paths are generated.
#[derive(Debug, Clone)]
enum Method {
    /// Sequential conditional recursion of a standard bridge at the
    /// non-decreasing times `times[k]`, multiplied by `weights[k]`.
    Recursion { times: Vec<f64>, weights: Option<Vec<f64>> },
    /// Independent normal increments on the lattice cells, weighted by the
    /// square root of each cell's mass, then tied down.
    Cells(Box<CellSheet>),
    /// `L z` from a factored covariance matrix.
    Dense(LowRankFactor),
    Mixture,
}

#[derive(Debug, Clone)]
struct CellSheet {
    shape: Vec<usize>,
    /// Square root of the mass of every cell `(x_{k-1}, x_k]` of the lattice,
    /// with `x_{-1} = -inf`.
    root_mass: Vec<f64>,
    /// Mass outside the lattice's upper corner.
    outer_root_mass: f64,
    cdf: Vec<f64>,
    /// Copula limit correction: node indices of the margins and partials.
    copula: Option<CopulaCorrection>,
}

#[derive(Debug, Clone)]
struct CopulaCorrection {
    margins: Vec<Vec<usize>>,
    partials: Vec<Vec<f64>>,
}

/// Zero-mean Gaussian path generator on a grid.
#[derive(Debug, Clone)]
pub struct PathSampler {
    spec: CovarianceSpec,
    method: Method,
    cadlag: bool,
    scale: f64,
    seed: u64,
    stream: u64,
}

impl PathSampler {
    fn new(spec: CovarianceSpec, method: Method, cadlag: bool) -> Self {
        PathSampler {
            spec,
            method,
            cadlag,
            scale: 1.0,
            seed: 0,
            stream: streams::LIMIT,
        }
    }

    /// Sets the base seed and stream id of the replicate sequence.
    pub fn with_seed(mut self, seed: u64, stream: u64) -> Self {
        self.seed = seed;
        self.stream = stream;
        self
    }

    /// Multiplies every path by `c` (covariance by `c^2`).
    pub fn with_scale(mut self, c: f64) -> Self {
        self.scale = c;
        self
    }

    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<GridDomain> {
        &self.spec.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_cadlag(&self) -> bool {
        self.cadlag
    }

    /// Covariance between two points, including the scale factor.
    pub fn covariance(&self, a: GridPoint, b: GridPoint) -> f64 {
        self.scale * self.scale * self.spec.covariance(a, b)
    }

    /// Points carried by every path, in storage order.
    pub fn points(&self) -> Vec<GridPoint> {
        let n = self.spec.grid.len();
        if self.cadlag {
            (0..n)
                .flat_map(|k| [GridPoint::left(k), GridPoint::value(k)])
                .collect()
        } else {
            (0..n).map(GridPoint::value).collect()
        }
    }

    /// Dense covariance over [`points`](Self::points).
    pub fn covariance_matrix(&self) -> Array2<f64> {
        let pts = self.points();
        Array2::from_shape_fn((pts.len(), pts.len()), |(i, j)| self.covariance(pts[i], pts[j]))
    }

    /// Replicate `index`: a deterministic function of `(seed, stream, index)`.
    pub fn sample_path(&self, index: u64) -> GridFunction {
        let mut rng = replicate_rng(self.seed, self.stream, index);
        self.sample_with(&mut rng)
    }

    /// Path drawn from an explicit generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let grid = Arc::clone(&self.spec.grid);
        let n = grid.len();
        let (values, left) = match &self.method {
            Method::Recursion { times, weights } => {
                let mut path = bridge_recursion(times, rng);
                if let Some(w) = weights {
                    path.iter_mut().zip(w).for_each(|(p, w)| *p *= w);
                }
                split_channels(path, self.cadlag)
            }
            Method::Cells(sheet) => (sheet.sample(rng), None),
            Method::Dense(factor) => {
                let z: Vec<f64> = (0..factor.rank()).map(|_| rng.sample(StandardNormal)).collect();
                split_channels(factor.apply(&z), self.cadlag)
            }
            Method::Mixture => {
                let CovarianceKind::Mixture { lambda, a, b } = &self.spec.kind else {
                    unreachable!("mixture method without mixture covariance")
                };
                let pa = a.sample_with(rng);
                let pb = b.sample_with(rng);
                let (ca, cb) = ((1.0 - lambda).sqrt(), lambda.sqrt());
                let combined = pa
                    .zip_with(&pb, |x, y| ca * x - cb * y)
                    .expect("mixture components share a grid");
                (
                    combined.values().to_vec(),
                    combined.left_limits().map(<[f64]>::to_vec),
                )
            }
        };
        debug_assert_eq!(values.len(), n);
        let scale = |v: Vec<f64>| -> Vec<f64> {
            if self.scale == 1.0 {
                v
            } else {
                v.into_iter().map(|x| x * self.scale).collect()
            }
        };
        match left {
            Some(l) => GridFunction::from_parts_unchecked(grid, scale(values), Some(scale(l))),
            None => GridFunction::from_parts_unchecked(grid, scale(values), None),
        }
    }
}

fn split_channels(path: Vec<f64>, cadlag: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    if !cadlag {
        return (path, None);
    }
    let left = path.iter().step_by(2).copied().collect();
    let values = path.iter().skip(1).step_by(2).copied().collect();
    (values, Some(left))
}

/// Standard Brownian bridge at non-decreasing times in `[0, 1]`.
fn bridge_recursion<R: Rng + ?Sized>(times: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let (mut s_prev, mut b) = (0.0f64, 0.0f64);
    for &s in times {
        if s >= 1.0 {
            b = 0.0;
            s_prev = 1.0;
        } else if s > s_prev {
            let rest = 1.0 - s_prev;
            let mean = b * (1.0 - s) / rest;
            let var = (s - s_prev) * (1.0 - s) / rest;
            let z: f64 = rng.sample(StandardNormal);
            b = mean + var.sqrt() * z;
            s_prev = s;
        }
        out.push(b);
    }
    out
}

impl CellSheet {
    fn build(grid: &GridDomain, cdf: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let shape = grid.shape();
        let len = grid.len();
        let values: Vec<f64> = (0..len).map(|k| cdf(&grid.coords(k))).collect();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("cdf at lattice node {k}")));
        }
        // Cell mass by inclusion-exclusion over the 2^d lower neighbours; a
        // missing neighbour (index -1) carries cdf 0.
        let d = shape.len();
        let mut root_mass = Vec::with_capacity(len);
        for node in 0..len {
            let idx = grid.multi_index(node);
            let mut mass = 0.0;
            'corners: for mask in 0..(1usize << d) {
                let mut corner = idx.clone();
                for (j, c) in corner.iter_mut().enumerate() {
                    if mask >> j & 1 == 1 {
                        if *c == 0 {
                            continue 'corners;
                        }
                        *c -= 1;
                    }
                }
                let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                mass += sign * values[grid.flat_index(&corner)];
            }
            if mass < -1e-10 {
                return Err(Error::invalid(format!(
                    "cdf is not a distribution function: cell {node} has mass {mass}"
                )));
            }
            root_mass.push(mass.max(0.0).sqrt());
        }
        let top = values[len - 1];
        if top > 1.0 + 1e-10 {
            return Err(Error::invalid("cdf exceeds 1 on the lattice"));
        }
        Ok(CellSheet {
            shape,
            root_mass,
            outer_root_mass: (1.0 - top).max(0.0).sqrt(),
            cdf: values,
            copula: None,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut w: Vec<f64> = self
            .root_mass
            .iter()
            .map(|m| m * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let outer = self.outer_root_mass * rng.sample::<f64, _>(StandardNormal);
        let len = w.len();
        let mut stride = 1;
        for &s in self.shape.iter().rev() {
            let block = stride * s;
            for base in (0..len).step_by(block) {
                for off in 0..stride {
                    for k in 1..s {
                        let here = base + k * stride + off;
                        w[here] += w[here - stride];
                    }
                }
            }
            stride = block;
        }
        let total = w[len - 1] + outer;
        let bridge: Vec<f64> = w.iter().zip(&self.cdf).map(|(wi, f)| wi - f * total).collect();
        match &self.copula {
            None => bridge,
            Some(corr) => (0..len)
                .map(|node| {
                    let mut v = bridge[node];
                    for (m, p) in corr.margins.iter().zip(&corr.partials) {
                        v -= p[node] * bridge[m[node]];
                    }
                    v
                })
                .collect(),
        }
    }
}

fn check_monotone_line(f: &CdfSpec, grid: &GridDomain) -> Result<Vec<f64>> {
    let mut times = Vec::with_capacity(2 * grid.len());
    for node in 0..grid.len() {
        let x = grid.coords(node);
        times.push(f.cdf_left(&x));
        times.push(f.cdf(&x));
    }
    if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::invalid("cdf leaves [0, 1] on the grid"));
    }
    if times.windows(2).any(|w| w[1] < w[0] - 1e-15) {
        return Err(Error::invalid("cdf is not monotone on the grid"));
    }
    Ok(times)
}

fn has_atoms_on(f: &CdfSpec, grid: &GridDomain) -> bool {
    (0..grid.len()).any(|k| {
        let x = grid.coords(k);
        f.cdf_left(&x) != f.cdf(&x)
    })
}

/// F-Brownian bridge on `grid`.
///
/// On a line the path is a standard bridge read at the times `F(x)` (and
/// `F(x-)` on the left channel when `F` has atoms on the grid), generated by
/// exact conditional recursion. On a lattice it is built from independent
/// cell increments of the F-Brownian sheet and tied down.
pub fn bridge_sampler(f: &CdfSpec, grid: &Arc<GridDomain>) -> Result<PathSampler> {
    f.validate()?;
    if f.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: f.dim(),
        });
    }
    let spec = CovarianceSpec {
        grid: Arc::clone(grid),
        kind: CovarianceKind::Bridge { f: f.clone() },
    };
    if grid.dim() == 1 {
        let times = check_monotone_line(f, grid)?;
        let cadlag = has_atoms_on(f, grid);
        let times = if cadlag {
            times
        } else {
            times.into_iter().skip(1).step_by(2).collect()
        };
        return Ok(PathSampler::new(spec, Method::Recursion { times, weights: None }, cadlag));
    }
    let sheet = CellSheet::build(grid, |x| f.cdf(x))?;
    Ok(PathSampler::new(spec, Method::Cells(Box::new(sheet)), false))
}

/// F-Brownian bridge from a dense pivoted factorization of its covariance;
/// the reference route for small grids.
pub fn bridge_sampler_dense(f: &CdfSpec, grid: &Arc<GridDomain>) -> Result<PathSampler> {
    let template = bridge_sampler(f, grid)?;
    let factor = pivoted_cholesky(&template.covariance_matrix(), DEFAULT_PIVOT_TOLERANCE)?;
    let cadlag = template.cadlag;
    Ok(PathSampler::new(template.spec, Method::Dense(factor), cadlag))
}

/// Limit process of the empirical copula process for a copula with
/// continuous partials, given on a lattice of `[0,1]^d` whose axes end at 1.
///
/// The margins `B_C(1, .., u_i, .., 1)` are read from the same bridge path.
pub fn copula_limit_sampler(
    c: &Copula,
    grid: &Arc<GridDomain>,
    partials: Vec<GridFunction>,
) -> Result<PathSampler> {
    c.validate()?;
    let d = grid.dim();
    if c.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
    }
    if partials.len() != d {
        return Err(Error::invalid(format!("expected {d} partial derivatives, got {}", partials.len())));
    }
    if partials.iter().any(|p| **p.domain() != **grid) {
        return Err(Error::GridMismatch("partials live on a different lattice".into()));
    }
    for j in 0..d {
        let axis = grid.axis(j);
        if axis[0] < 0.0 || axis[axis.len() - 1] != 1.0 {
            return Err(Error::invalid("copula lattice axes must lie in [0, 1] and end at 1"));
        }
    }
    let mut sheet = CellSheet::build(grid, |u| c.cdf(u))?;
    let margins = (0..d)
        .map(|i| {
            (0..grid.len())
                .map(|node| {
                    let idx = grid.multi_index(node);
                    let m: Vec<usize> = (0..d)
                        .map(|j| if j == i { idx[j] } else { grid.axis(j).len() - 1 })
                        .collect();
                    grid.flat_index(&m)
                })
                .collect()
        })
        .collect();
    sheet.copula = Some(CopulaCorrection {
        margins,
        partials: partials.iter().map(|p| p.values().to_vec()).collect(),
    });
    let spec = CovarianceSpec {
        grid: Arc::clone(grid),
        kind: CovarianceKind::CopulaLimit { c: c.clone(), partials },
    };
    Ok(PathSampler::new(spec, Method::Cells(Box::new(sheet)), false))
}

/// Tail truncation of the weighted bridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Nodes with `F (1 - F)` below this are dropped.
    pub min_variance: f64,
    /// Nodes with `|w|` above this are dropped.
    pub max_weight: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            min_variance: 1e-6,
            max_weight: 50.0,
        }
    }
}

/// Log weight `log(F (1 - G) / (G (1 - F)))`.
pub fn log_weight(f: f64, g: f64) -> f64 {
    (f * (1.0 - g) / (g * (1.0 - f))).ln()
}

/// Weighted bridge `W = B_F w` on a line, zero on truncated nodes.
pub fn weighted_bridge_sampler(
    f: &Univariate,
    g: &Univariate,
    grid: &Arc<GridDomain>,
    truncation: Truncation,
) -> Result<PathSampler> {
    f.validate()?;
    g.validate()?;
    if grid.dim() != 1 {
        return Err(Error::invalid("the weighted bridge lives on a line"));
    }
    if !(f.is_continuous() && g.is_continuous()) {
        return Err(Error::invalid("the weighted bridge needs continuous F and G"));
    }
    let fs = CdfSpec::Univariate(f.clone());
    let times: Vec<f64> = check_monotone_line(&fs, grid)?
        .into_iter()
        .skip(1)
        .step_by(2)
        .collect();
    let mut weights = Vec::with_capacity(grid.len());
    for (node, &x) in grid.axis(0).iter().enumerate() {
        let (fv, gv) = (f.cdf(x), g.cdf(x));
        if fv * (1.0 - fv) < truncation.min_variance {
            weights.push(0.0);
            continue;
        }
        let w = log_weight(fv, gv);
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("log weight at interior node {node} (x = {x})")));
        }
        weights.push(if w.abs() > truncation.max_weight { 0.0 } else { w });
    }
    let spec = CovarianceSpec {
        grid: Arc::clone(grid),
        kind: CovarianceKind::WeightedBridge {
            f: f.clone(),
            g: g.clone(),
            weights: weights.clone(),
        },
    };
    Ok(PathSampler::new(
        spec,
        Method::Recursion {
            times,
            weights: Some(weights),
        },
        false,
    ))
}

/// `sqrt(1 - lambda) a - sqrt(lambda) b`, with both components drawn from
/// one replicate stream in turn so they are independent.
pub fn mixture_sampler(lambda: f64, a: PathSampler, b: PathSampler) -> Result<PathSampler> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid("mixture weight must lie in (0, 1)"));
    }
    if **a.grid() != **b.grid() {
        return Err(Error::GridMismatch("mixture components live on different grids".into()));
    }
    let grid = Arc::clone(a.grid());
    let cadlag = a.cadlag || b.cadlag;
    let spec = CovarianceSpec {
        grid,
        kind: CovarianceKind::Mixture {
            lambda,
            a: Box::new(a),
            b: Box::new(b),
        },
    };
    Ok(PathSampler::new(spec, Method::Mixture, cadlag))
}

/// `K`-variate zero-mean Gaussian with covariance `sigma`, indexed by the
/// members of a finite class.
pub fn finite_class_sampler(sigma: Array2<f64>) -> Result<PathSampler> {
    let k = sigma.nrows();
    let grid = Arc::new(GridDomain::finite_class(k)?);
    let factor = pivoted_cholesky(&sigma, DEFAULT_PIVOT_TOLERANCE)?;
    let spec = CovarianceSpec {
        grid,
        kind: CovarianceKind::FiniteClass { sigma },
    };
    Ok(PathSampler::new(spec, Method::Dense(factor), false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_covariance;

    fn paths_matrix(s: &PathSampler, count: u64) -> Array2<f64> {
        let pts = s.points();
        let mut m = Array2::zeros((count as usize, pts.len()));
        for r in 0..count {
            let p = s.sample_path(r);
            for (j, &pt) in pts.iter().enumerate() {
                m[[r as usize, j]] = p.at(pt);
            }
        }
        m
    }

    fn assert_cov_close(s: &PathSampler, count: u64, rel: f64) {
        let emp = sample_covariance(&paths_matrix(s, count));
        let th = s.covariance_matrix();
        for ((i, j), &t) in th.indexed_iter() {
            if t.abs() >= 0.01 {
                let e = emp[[i, j]];
                assert!((e - t).abs() <= rel * t.abs(), "entry ({i},{j}): {e} vs {t}");
            }
        }
    }

    #[test]
    fn bridge_variance_and_pinning() {
        let grid = Arc::new(GridDomain::compactified_line(41).unwrap());
        let s = bridge_sampler(&Univariate::standard_normal().into(), &grid)
            .unwrap()
            .with_seed(5, 9);
        let mid = s.points().iter().position(|p| grid.coords(p.node)[0] == 0.0).unwrap();
        assert!((s.covariance(s.points()[mid], s.points()[mid]) - 0.25).abs() < 1e-15);
        let p = s.sample_path(3);
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(p.values()[40], 0.0);
        assert_eq!(p, s.sample_path(3));
    }

    #[test]
    fn bridge_covariance_matches_mc() {
        let grid = Arc::new(GridDomain::line(vec![-0.5, -0.2, 0.1, 0.4]).unwrap());
        let s = bridge_sampler(&Univariate::standard_normal().into(), &grid)
            .unwrap()
            .with_seed(1, 1);
        assert_cov_close(&s, 100_000, 0.03);
    }

    #[test]
    fn atoms_populate_left_channel() {
        let f = Univariate::Discrete {
            atoms: vec![0.0, 1.0],
            probs: vec![0.4, 0.6],
        };
        let grid = Arc::new(GridDomain::line(vec![-1.0, 0.0, 0.5, 1.0]).unwrap());
        let s = bridge_sampler(&f.into(), &grid).unwrap().with_seed(2, 1);
        assert!(s.is_cadlag());
        assert_cov_close(&s, 100_000, 0.03);
        let p = s.sample_path(0);
        assert_eq!(p.at(GridPoint::value(3)), 0.0);
        assert_eq!(p.at(GridPoint::left(1)), 0.0);
    }

    #[test]
    fn sheet_cells_match_covariance_and_dense() {
        let axis = vec![0.4, 0.7, 1.0];
        let grid = Arc::new(GridDomain::lattice(vec![axis.clone(), axis]).unwrap());
        let c: CdfSpec = Copula::Clayton { theta: 1.0, dim: 2 }.into();
        let cells = bridge_sampler(&c, &grid).unwrap().with_seed(3, 1);
        assert_cov_close(&cells, 100_000, 0.03);
        let dense = bridge_sampler_dense(&c, &grid).unwrap().with_seed(3, 1);
        assert_cov_close(&dense, 100_000, 0.03);
    }

    #[test]
    fn copula_limit_independence_variance() {
        let grid = Arc::new(GridDomain::unit_lattice(6, 2).unwrap());
        let pi = Copula::Independence { dim: 2 };
        let partials = crate::empirical::copula_partials(|u| pi.cdf(u), &grid, 0.01).unwrap();
        let s = copula_limit_sampler(&pi, &grid, partials).unwrap().with_seed(4, 1);
        for node in 0..grid.len() {
            let u = grid.coords(node);
            let p = GridPoint::value(node);
            let want = u[0] * u[1] * (1.0 - u[0]) * (1.0 - u[1]);
            assert!((s.covariance(p, p) - want).abs() < 1e-12);
        }
        assert_cov_close(&s, 100_000, 0.03);
        let corner = s.sample_path(7);
        assert!(corner.values()[grid.len() - 1].abs() < 1e-12);
    }

    #[test]
    fn weighted_bridge_weight_and_null() {
        let grid = Arc::new(GridDomain::line(vec![0.25, 0.5, 0.75]).unwrap());
        let u = Univariate::unit_uniform();
        let sq = Univariate::Power { theta: 2.0 };
        let s = weighted_bridge_sampler(&u, &sq, &grid, Truncation::default()).unwrap();
        let p = GridPoint::value(1);
        assert!((s.covariance(p, p) - 0.25 * 3f64.ln().powi(2)).abs() < 1e-12);
        let null = weighted_bridge_sampler(&u, &u, &grid, Truncation::default()).unwrap();
        assert!(null.sample_path(0).is_zero());
    }

    #[test]
    fn mixture_and_finite_class() {
        let mut sigma = Array2::eye(3);
        sigma[[0, 1]] = 0.5;
        sigma[[1, 0]] = 0.5;
        let a = finite_class_sampler(sigma.clone()).unwrap();
        let b = finite_class_sampler(Array2::eye(3) * 2.0).unwrap();
        let m = mixture_sampler(0.5, a, b).unwrap().with_seed(8, 1);
        let p = GridPoint::value(0);
        assert!((m.covariance(p, p) - 1.5).abs() < 1e-15);
        assert_cov_close(&m, 100_000, 0.03);
        assert!(finite_class_sampler(Array2::zeros((2, 2))).unwrap().sample_path(1).is_zero());
    }
}
