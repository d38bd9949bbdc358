//! Empirical distribution functions, empirical processes and empirical
//! copulas.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::distributions::CdfSpec;
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction};

/// `n` observations of a `d`-dimensional variable, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Sample {
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("sample dimension must be >= 1"));
        }
        if data.is_empty() {
            return Err(Error::EmptySample);
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::invalid("flat sample length is not a multiple of d"));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("observation {} coordinate {}", k / d, k % d)));
        }
        let n = data.len() / d;
        Ok(Sample { data, n, d })
    }

    pub fn univariate(xs: Vec<f64>) -> Result<Self> {
        Self::from_flat(xs, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().ok_or(Error::EmptySample)?.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Self::from_flat(rows.concat(), d)
    }

    /// Reads one observation per row; a first row that does not parse as
    /// numbers is taken as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if k == 0 => continue,
                Err(e) => {
                    return Err(Error::invalid(format!("csv row {}: {e}", k + 1)));
                }
            }
        }
        Self::from_rows(&rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.iter().skip(j).step_by(self.d).copied().collect()
    }

    pub fn sorted_column(&self, j: usize) -> Vec<f64> {
        let mut c = self.column(j);
        c.sort_by(f64::total_cmp);
        c
    }

    /// `(min rank - 1)` of every observation on axis `j`, i.e. the number of
    /// strictly smaller coordinates.
    pub fn strict_ranks(&self, j: usize) -> Vec<usize> {
        let sorted = self.sorted_column(j);
        self.data
            .iter()
            .skip(j)
            .step_by(self.d)
            .map(|x| sorted.partition_point(|v| v < x))
            .collect()
    }
}

pub(crate) fn sorted_distinct(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Counts on a lattice of shape `shape`: cell `k` of point `i` is its first
/// node index per axis, and node `m` receives `#{i : cell(i) <= m}`.
/// Points whose cell lies beyond an axis are dropped.
pub(crate) fn cumulative_counts(shape: &[usize], cells: impl Iterator<Item = Vec<usize>>) -> Vec<f64> {
    let len: usize = shape.iter().product();
    let mut counts = vec![0.0; len];
    'points: for cell in cells {
        let mut flat = 0;
        for (&c, &s) in cell.iter().zip(shape) {
            if c >= s {
                continue 'points;
            }
            flat = flat * s + c;
        }
        counts[flat] += 1.0;
    }
    let mut stride = 1;
    for &s in shape.iter().rev() {
        let block = stride * s;
        for chunk in counts.chunks_exact_mut(block) {
            if stride == 1 {
                let mut run = 0.0;
                for c in chunk.iter_mut() {
                    run += *c;
                    *c = run;
                }
                continue;
            }
            for k in 1..s {
                let (done, rest) = chunk.split_at_mut(k * stride);
                let prev = &done[(k - 1) * stride..];
                for (c, p) in rest[..stride].iter_mut().zip(prev) {
                    *c += p;
                }
            }
        }
        stride = block;
    }
    counts
}

/// Empirical distribution function.
///
/// In `d = 1` the result is cadlag on the distinct sample points wrapped by
/// the `-inf`/`+inf` sentinels. In higher dimension it is evaluated on the
/// lattice of per-axis distinct coordinates.
pub fn ecdf(s: &Sample) -> Result<GridFunction> {
    let n = s.n() as f64;
    if s.dim() == 1 {
        let sorted = s.sorted_column(0);
        let distinct = sorted_distinct(sorted.clone());
        let domain = Arc::new(GridDomain::compactified_with(distinct.clone())?);
        let mut values = Vec::with_capacity(distinct.len() + 2);
        let mut left = Vec::with_capacity(distinct.len() + 2);
        values.push(0.0);
        left.push(0.0);
        for x in &distinct {
            left.push(sorted.partition_point(|v| v < x) as f64 / n);
            values.push(sorted.partition_point(|v| v <= x) as f64 / n);
        }
        values.push(1.0);
        left.push(1.0);
        return GridFunction::cadlag(domain, values, left);
    }
    let axes: Vec<Vec<f64>> = (0..s.dim()).map(|j| sorted_distinct(s.column(j))).collect();
    let domain = Arc::new(GridDomain::lattice(axes)?);
    lattice_ecdf(s, domain)
}

fn lattice_ecdf(s: &Sample, domain: Arc<GridDomain>) -> Result<GridFunction> {
    let n = s.n() as f64;
    let shape = domain.shape();
    let cells = (0..s.n()).map(|i| {
        s.row(i)
            .iter()
            .enumerate()
            .map(|(j, x)| domain.axis(j).partition_point(|v| v < x))
            .collect()
    });
    let counts = cumulative_counts(&shape, cells);
    GridFunction::new(domain, counts.into_iter().map(|c| c / n).collect())
}

/// Empirical distribution function evaluated on an arbitrary grid, with the
/// left-limit channel in `d = 1`.
pub fn ecdf_on(s: &Sample, grid: &Arc<GridDomain>) -> Result<GridFunction> {
    if s.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: s.dim(),
        });
    }
    if s.dim() == 1 {
        let n = s.n() as f64;
        let sorted = s.sorted_column(0);
        let xs = grid.axis(0);
        let values = xs.iter().map(|x| sorted.partition_point(|v| v <= x) as f64 / n).collect();
        let left = xs.iter().map(|x| sorted.partition_point(|v| v < x) as f64 / n).collect();
        return GridFunction::cadlag(Arc::clone(grid), values, left);
    }
    lattice_ecdf(s, Arc::clone(grid))
}

/// `sqrt(n) (F_n - F)` on `grid`.
pub fn empirical_process(s: &Sample, f: &CdfSpec, grid: &Arc<GridDomain>) -> Result<GridFunction> {
    if f.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: f.dim(),
        });
    }
    let fn_grid = ecdf_on(s, grid)?;
    let scale = (s.n() as f64).sqrt();
    let mut vals = Vec::with_capacity(grid.len());
    let mut lefts = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let x = grid.coords(node);
        let (v, l) = (f.cdf(&x), f.cdf_left(&x));
        if !(v.is_finite() && l.is_finite()) {
            return Err(Error::NonFinite(format!("cdf at node {node}")));
        }
        vals.push(scale * (fn_grid.values()[node] - v));
        if let Some(left) = fn_grid.left_limits() {
            lefts.push(scale * (left[node] - l));
        }
    }
    if fn_grid.is_cadlag() {
        GridFunction::cadlag(Arc::clone(grid), vals, lefts)
    } else {
        GridFunction::new(Arc::clone(grid), vals)
    }
}

/// Empirical copula `C_n(u) = F_n(F_{n,1}^-(u_1), ..., F_{n,d}^-(u_d))` on a
/// lattice in `[0,1]^d`, with the generalized inverse
/// `F^-(u) = inf { x : F(x) >= u }`.
///
/// Observation `i` lies below `F_{n,j}^-(u)` exactly when `F_{n,j}(X_ij-) < u`,
/// so only the strict ranks are needed.
pub fn empirical_copula(s: &Sample, grid: &Arc<GridDomain>) -> Result<GridFunction> {
    if s.dim() < 2 {
        return Err(Error::invalid("empirical copula needs d >= 2"));
    }
    if grid.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: s.dim(),
        });
    }
    let n = s.n() as f64;
    let ranks: Vec<Vec<usize>> = (0..s.dim()).map(|j| s.strict_ranks(j)).collect();
    let cells = (0..s.n()).map(|i| {
        (0..s.dim())
            .map(|j| {
                let level = ranks[j][i] as f64 / n;
                grid.axis(j).partition_point(|&u| u <= level)
            })
            .collect()
    });
    let counts = cumulative_counts(&grid.shape(), cells);
    GridFunction::new(Arc::clone(grid), counts.into_iter().map(|c| c / n).collect())
}

/// Survival copula `u + v - 1 + C(1 - u, 1 - v)` of a bivariate copula on a
/// reflection-closed lattice.
pub fn survival_copula(c: &GridFunction) -> Result<GridFunction> {
    let domain = c.domain();
    if domain.dim() != 2 {
        return Err(Error::invalid("survival copula is defined here for d = 2"));
    }
    let reflect = domain.reflection_map()?;
    let values = (0..domain.len())
        .map(|node| {
            let u = domain.coords(node);
            u[0] + u[1] - 1.0 + c.values()[reflect[node]]
        })
        .collect();
    GridFunction::new(Arc::clone(domain), values)
}

/// Default bandwidth `n^{-1/2}`, never below one lattice cell.
pub fn default_bandwidth(n: usize, grid: &GridDomain) -> f64 {
    let cell = (0..grid.dim())
        .map(|j| {
            let a = grid.axis(j);
            a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    (1.0 / (n.max(1) as f64).sqrt()).max(cell)
}

fn difference(c: impl Fn(&[f64]) -> f64, u: &[f64], axis: usize, h: f64) -> f64 {
    let shifted = |delta: f64| {
        let mut v = u.to_vec();
        v[axis] += delta;
        c(&v)
    };
    let x = u[axis];
    let raw = if x - h < 0.0 {
        (shifted(h) - c(u)) / h
    } else if x + h > 1.0 {
        (c(u) - shifted(-h)) / h
    } else {
        (shifted(h) - shifted(-h)) / (2.0 * h)
    };
    raw.clamp(0.0, 1.0)
}

/// Partial derivatives `d_i C` of a copula given as a function, by central
/// differences of step `h` (one-sided within `h` of the boundary).
pub fn copula_partials(
    c: impl Fn(&[f64]) -> f64,
    grid: &Arc<GridDomain>,
    h: f64,
) -> Result<Vec<GridFunction>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("bandwidth must be positive"));
    }
    (0..grid.dim())
        .map(|axis| GridFunction::from_fn(Arc::clone(grid), |u| difference(&c, u, axis, h)))
        .collect()
}

/// Partial derivatives of a copula sampled on a lattice; the step is `h`
/// rounded to a whole number of cells (at least one), and the function is
/// read only at lattice nodes.
pub fn copula_partials_on_grid(c: &GridFunction, h: f64) -> Result<Vec<GridFunction>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("bandwidth must be positive"));
    }
    let domain = c.domain();
    (0..domain.dim())
        .map(|axis| {
            let xs = domain.axis(axis);
            let cell = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
            let k = ((h / cell).round() as usize).max(1);
            let values = (0..domain.len())
                .map(|node| {
                    let idx = domain.multi_index(node);
                    let i = idx[axis];
                    let lo = i.saturating_sub(k);
                    let hi = (i + k).min(xs.len() - 1);
                    let (lo, hi) = if i < k {
                        (i, hi)
                    } else if i + k > xs.len() - 1 {
                        (lo, i)
                    } else {
                        (lo, hi)
                    };
                    let at = |j: usize| {
                        let mut m = idx.clone();
                        m[axis] = j;
                        c.values()[domain.flat_index(&m)]
                    };
                    if hi == lo {
                        return 0.0;
                    }
                    ((at(hi) - at(lo)) / (xs[hi] - xs[lo])).clamp(0.0, 1.0)
                })
                .collect();
            GridFunction::new(Arc::clone(domain), values)
        })
        .collect()
}
