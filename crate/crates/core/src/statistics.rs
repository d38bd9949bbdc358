//! Exact computation of the normalized statistics from raw samples.
//!
//! Empirical distribution functions are step functions, so every supremum
//! here is taken over a finite scan set on which it is attained (or
//! approached) exactly; no evaluation grid is involved.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::distributions::{CdfSpec, Copula, Univariate};
use crate::empirical::{cumulative_counts, sorted_distinct, Sample};
use crate::error::{Error, Result};
use crate::functionals::FunctionalKind;

/// Raw functional value, its centred and scaled version, and metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub raw: f64,
    pub reference: f64,
    pub scale: f64,
    /// `scale * (raw - reference)`.
    pub centered: f64,
    pub n: usize,
    pub m: Option<usize>,
}

impl StatResult {
    pub fn new(raw: f64, reference: f64, scale: f64, n: usize, m: Option<usize>) -> Self {
        StatResult {
            raw,
            reference,
            scale,
            centered: scale * (raw - reference),
            n,
            m,
        }
    }
}

/// Two-sample normalization `sqrt(n m / (n + m))`.
pub fn two_sample_scale(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (n * m / (n + m)).sqrt()
}

/// Supremum and infimum of a difference of distribution functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub sup: f64,
    pub inf: f64,
}

impl Extremes {
    fn start() -> Self {
        // Both differences vanish at -inf and +inf.
        Extremes { sup: 0.0, inf: 0.0 }
    }

    fn push(&mut self, v: f64) {
        self.sup = self.sup.max(v);
        self.inf = self.inf.min(v);
    }

    pub fn functional(&self, kind: FunctionalKind) -> Result<f64> {
        match kind {
            FunctionalKind::SupNorm => Ok(self.sup.max(-self.inf)),
            FunctionalKind::Sup => Ok(self.sup),
            FunctionalKind::Amp => Ok(self.sup - self.inf),
            FunctionalKind::Inf => Err(Error::invalid(
                "the infimum functional is not a Kolmogorov-Smirnov statistic",
            )),
        }
    }
}

fn reject_inf(kind: FunctionalKind) -> Result<()> {
    Extremes::start().functional(kind).map(|_| ())
}

/// `sup` and `inf` of `F_n - G` over the whole space.
///
/// On a line `F_n` is constant between distinct sample points and `G` is
/// non-decreasing, so both extremes are attained or approached at the
/// sample points on one of the two channels. On a lattice the same holds
/// cell by cell: the supremum at the lower corner, the infimum towards the
/// upper corner (exact for continuous `G`).
pub fn one_sample_extremes(s: &Sample, g: &CdfSpec) -> Result<Extremes> {
    if s.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: s.dim(),
        });
    }
    let n = s.n() as f64;
    let mut ext = Extremes::start();
    if s.dim() == 1 {
        let sorted = s.sorted_column(0);
        let mut below = 0usize;
        let mut i = 0;
        while i < sorted.len() {
            let x = sorted[i];
            let mut j = i;
            while j < sorted.len() && sorted[j] == x {
                j += 1;
            }
            ext.push(below as f64 / n - g.cdf_left(&[x]));
            ext.push(j as f64 / n - g.cdf(&[x]));
            below = j;
            i = j;
        }
        return Ok(ext);
    }
    let axes = extended_axes(&[s]);
    let fn_lattice = counts_on(&axes, s);
    scan_lattice(&axes, &mut ext, |node, lower, upper| {
        let fv = fn_lattice[node] / n;
        [fv - g.cdf(lower), fv - g.cdf(upper)]
    });
    Ok(ext)
}

/// Per-axis distinct pooled coordinates preceded by `-inf` and followed by
/// `+inf`.
fn extended_axes(samples: &[&Sample]) -> Vec<Vec<f64>> {
    let d = samples[0].dim();
    (0..d)
        .map(|j| {
            let pooled: Vec<f64> = samples.iter().flat_map(|s| s.column(j)).collect();
            let mut axis = vec![f64::NEG_INFINITY];
            axis.extend(sorted_distinct(pooled));
            axis.push(f64::INFINITY);
            axis
        })
        .collect()
}

/// Counts `#{i : X_i <= node}` on the extended lattice without its `+inf`
/// layer (shape `len - 1` per axis).
fn counts_on(axes: &[Vec<f64>], s: &Sample) -> Vec<f64> {
    let shape: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
    let cells = (0..s.n()).map(|i| {
        s.row(i)
            .iter()
            .zip(axes)
            .map(|(x, a)| a[..a.len() - 1].partition_point(|v| v < x))
            .collect()
    });
    cumulative_counts(&shape, cells)
}

/// Visits every cell `[lower, upper)` of the extended lattice; `f` returns
/// candidate values for the cell.
fn scan_lattice<const K: usize>(
    axes: &[Vec<f64>],
    ext: &mut Extremes,
    mut f: impl FnMut(usize, &[f64], &[f64]) -> [f64; K],
) {
    let shape: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
    let len: usize = shape.iter().product();
    let d = shape.len();
    let mut idx = vec![0usize; d];
    let mut lower = vec![0.0; d];
    let mut upper = vec![0.0; d];
    for node in 0..len {
        for j in 0..d {
            lower[j] = axes[j][idx[j]];
            upper[j] = axes[j][idx[j] + 1];
        }
        for v in f(node, &lower, &upper) {
            ext.push(v);
        }
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < shape[j] {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// One-sample Kolmogorov-Smirnov (`SupNorm`, `Sup`) or Kuiper (`Amp`)
/// statistic `sqrt(n) (phi(F_n - G) - reference)`.
pub fn ks_one_sample(
    s: &Sample,
    g: &CdfSpec,
    kind: FunctionalKind,
    reference: f64,
) -> Result<StatResult> {
    reject_inf(kind)?;
    let raw = one_sample_extremes(s, g)?.functional(kind)?;
    Ok(StatResult::new(raw, reference, (s.n() as f64).sqrt(), s.n(), None))
}

/// `sup` and `inf` of `F_n - G_m` for two samples (exact in any dimension,
/// both functions being constant on the cells of the pooled lattice).
pub fn two_sample_extremes(sx: &Sample, sy: &Sample) -> Result<Extremes> {
    if sx.dim() != sy.dim() {
        return Err(Error::DimensionMismatch {
            expected: sx.dim(),
            got: sy.dim(),
        });
    }
    let (n, m) = (sx.n() as f64, sy.n() as f64);
    let mut ext = Extremes::start();
    if sx.dim() == 1 {
        let (a, b) = (sx.sorted_column(0), sy.sorted_column(0));
        let (mut i, mut j) = (0, 0);
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
            ext.push(i as f64 / n - j as f64 / m);
        }
        return Ok(ext);
    }
    let axes = extended_axes(&[sx, sy]);
    let (cx, cy) = (counts_on(&axes, sx), counts_on(&axes, sy));
    scan_lattice(&axes, &mut ext, |node, _, _| [cx[node] / n - cy[node] / m]);
    Ok(ext)
}

/// Two-sample Kolmogorov-Smirnov or Kuiper statistic
/// `sqrt(n m / (n + m)) (phi(F_n - G_m) - reference)`.
pub fn ks_two_sample(
    sx: &Sample,
    sy: &Sample,
    kind: FunctionalKind,
    reference: f64,
) -> Result<StatResult> {
    reject_inf(kind)?;
    let raw = two_sample_extremes(sx, sy)?.functional(kind)?;
    Ok(StatResult::new(
        raw,
        reference,
        two_sample_scale(sx.n(), sy.n()),
        sx.n(),
        Some(sy.n()),
    ))
}

/// Empirical copula on the rank lattice `{0, 1/n, .., 1}^d`, flattened with
/// the last axis fastest.
pub fn rank_lattice_copula(s: &Sample) -> Result<Vec<f64>> {
    let d = s.dim();
    if d < 2 {
        return Err(Error::invalid("empirical copula needs d >= 2"));
    }
    let n = s.n();
    if (n + 1).checked_pow(d as u32).is_none_or(|len| len > 100_000_000) {
        return Err(Error::invalid("rank lattice too large"));
    }
    let ranks: Vec<Vec<usize>> = (0..d).map(|j| s.strict_ranks(j)).collect();
    let shape = vec![n + 1; d];
    let cells = (0..n).map(|i| (0..d).map(|j| ranks[j][i] + 1).collect());
    let nf = n as f64;
    Ok(cumulative_counts(&shape, cells).into_iter().map(|c| c / nf).collect())
}

/// `||C_n - D||_inf`, exact up to evaluating `D` at both corners of every
/// rank cell: `C_n` is constant on `(i/n, (i+1)/n]` per axis.
pub fn copula_distance(s: &Sample, d_cop: &Copula) -> Result<f64> {
    if s.dim() != d_cop.dim() {
        return Err(Error::DimensionMismatch {
            expected: d_cop.dim(),
            got: s.dim(),
        });
    }
    let cn = rank_lattice_copula(s)?;
    let n = s.n();
    let d = s.dim();
    let side = n + 1;
    let mut dv = vec![0.0; cn.len()];
    let mut idx = vec![0usize; d];
    let mut u = vec![0.0; d];
    for slot in dv.iter_mut() {
        for j in 0..d {
            u[j] = idx[j] as f64 / n as f64;
        }
        *slot = d_cop.cdf(&u);
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < side {
                break;
            }
            idx[j] = 0;
        }
    }
    // Cell with upper corner `node` (all indices >= 1) has lower corner
    // `node - (1, .., 1)`.
    let diag_step: usize = (0..d).map(|j| side.pow(j as u32)).sum();
    let mut best = 0.0f64;
    for (node, &c) in cn.iter().enumerate() {
        best = best.max((c - dv[node]).abs());
        let all_inner = (0..d).all(|j| (node / side.pow(j as u32)) % side >= 1);
        if all_inner {
            best = best.max((c - dv[node - diag_step]).abs());
        }
    }
    Ok(best)
}

/// `sqrt(n) (||C_n - D||_inf - reference)`.
pub fn copula_stat_tn(s: &Sample, d_cop: &Copula, reference: f64) -> Result<StatResult> {
    let raw = copula_distance(s, d_cop)?;
    Ok(StatResult::new(raw, reference, (s.n() as f64).sqrt(), s.n(), None))
}

/// `||C_n - C̄_n||_inf` over the whole unit square.
///
/// Along each axis `u` is either a rank point `i/n` or inside an open rank
/// cell; on each of the `(2n + 1)^2` state pairs both step terms are
/// constant and only the linear part `u + v - 1` moves, so the supremum is
/// read at the ends of its range.
pub fn radial_asymmetry(s: &Sample) -> Result<f64> {
    if s.dim() != 2 {
        return Err(Error::invalid("radial symmetry statistic needs d = 2"));
    }
    let n = s.n();
    let side = n + 1;
    let cn = rank_lattice_copula(s)?;
    let nf = n as f64;
    // Per axis state: (index of C_n, index of the reflected C_n, low, high).
    // Per axis state: (index of C_n, index of the reflected C_n, low, high).
    let mut states = Vec::with_capacity(2 * n + 1);
    for i in 0..=n {
        let u = i as f64 / nf;
        states.push((i, n - i, u, u));
        if i < n {
            states.push((i + 1, n - i, u, (i + 1) as f64 / nf));
        }
    }
    // For a fixed first-axis state the second-axis terms separate: track
    // the range of `jump - v` at the low and at the high end of every
    // second-axis state.
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / nf).collect();
    let mut reflected = vec![0.0; side];
    let mut best = 0.0f64;
    for &(a1, b1, lo1, hi1) in &states {
        let row_a = &cn[a1 * side..(a1 + 1) * side];
        for (r, &c) in reflected.iter_mut().zip(cn[b1 * side..(b1 + 1) * side].iter().rev()) {
            *r = c;
        }
        let at = |i: usize| row_a[i] - reflected[i] - grid[i];
        let (mut top_lo, mut bot_lo) = (at(n), at(n));
        let (mut top_hi, mut bot_hi) = (top_lo, bot_lo);
        for i in 0..n {
            let at_point = row_a[i] - reflected[i] - grid[i];
            let jump = row_a[i + 1] - reflected[i];
            let lo = jump - grid[i];
            let hi = jump - grid[i + 1];
            top_lo = max_fast(max_fast(top_lo, at_point), lo);
            bot_lo = min_fast(min_fast(bot_lo, at_point), lo);
            top_hi = max_fast(max_fast(top_hi, at_point), hi);
            bot_hi = min_fast(min_fast(bot_hi, at_point), hi);
        }
        let (c_lo, c_hi) = (lo1 - 1.0, hi1 - 1.0);
        best = best
            .max((top_lo - c_lo).abs())
            .max((bot_lo - c_lo).abs())
            .max((top_hi - c_hi).abs())
            .max((bot_hi - c_hi).abs());
    }
    Ok(best)
}

#[inline]
fn max_fast(a: f64, b: f64) -> f64 {
    if b > a {
        b
    } else {
        a
    }
}

#[inline]
fn min_fast(a: f64, b: f64) -> f64 {
    if b < a {
        b
    } else {
        a
    }
}

/// `sqrt(n) (||C_n - C̄_n||_inf - reference)`.
pub fn copula_symmetry_stat(s: &Sample, reference: f64) -> Result<StatResult> {
    let raw = radial_asymmetry(s)?;
    Ok(StatResult::new(raw, reference, (s.n() as f64).sqrt(), s.n(), None))
}

/// Bernoulli Kullback-Leibler divergence with the continuity conventions
/// at the boundary; `+inf` when `y` is 0 or 1 and `x != y`.
pub(crate) fn kl(x: f64, y: f64) -> f64 {
    let term = |a: f64, b: f64| {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    term(x, y) + term(1.0 - x, 1.0 - y)
}

/// `K(x, y) = x log(x/y) + (1 - x) log((1 - x)/(1 - y))`.
pub fn kl_bernoulli(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("x = {x} outside [0, 1]")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::invalid(format!("y = {y} outside (0, 1)")));
    }
    Ok(kl(x, y).max(0.0))
}

/// Berk-Jones statistic `R(F_n, G) = sup_x K(F_n(x), G(x))`.
///
/// `K(c, .)` is convex with its minimum at `c`, so on each constancy
/// interval of `F_n` the supremum sits at one of the interval's ends.
pub fn berk_jones_r(s: &Sample, g: &Univariate) -> Result<f64> {
    if s.dim() != 1 {
        return Err(Error::invalid("Berk-Jones statistic needs d = 1"));
    }
    let sorted = s.sorted_column(0);
    let n = sorted.len() as f64;
    let mut best = 0.0f64;
    let mut level = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let gx = g.cdf(x);
        // Interval ending at x (F_n = level), approached from the left.
        best = best.max(kl(level, g.cdf_left(x)));
        while i < sorted.len() && sorted[i] == x {
            i += 1;
        }
        level = i as f64 / n;
        best = best.max(kl(level, gx));
    }
    Ok(best)
}

/// Centring sequence `log log n - log log log n / 2 - log(4 pi) / 2`.
pub fn berk_jones_dn(n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::invalid(format!("the null centring needs n >= 16, got {n}")));
    }
    let ll = (n as f64).ln().ln();
    Ok(ll - 0.5 * ll.ln() - 0.5 * (4.0 * std::f64::consts::PI).ln())
}

/// `n R(F_n, F) - d_n`.
pub fn berk_jones_null_centered(s: &Sample, f: &Univariate) -> Result<f64> {
    let dn = berk_jones_dn(s.n())?;
    Ok(s.n() as f64 * berk_jones_r(s, f)? - dn)
}

/// `sqrt(n) (R(F_n, G) - reference)`.
pub fn berk_jones_bn(s: &Sample, g: &Univariate, reference: f64) -> Result<StatResult> {
    let raw = berk_jones_r(s, g)?;
    Ok(StatResult::new(raw, reference, (s.n() as f64).sqrt(), s.n(), None))
}

/// Member of a finite function class on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ClassMember {
    /// `1{x <= t}`.
    Indicator { t: f64 },
    /// Decreases linearly from 1 at `center - half_width` to 0 at
    /// `center + half_width`.
    Ramp { center: f64, half_width: f64 },
    Identity,
}

impl ClassMember {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ClassMember::Indicator { t } => {
                if x <= t {
                    1.0
                } else {
                    0.0
                }
            }
            ClassMember::Ramp { center, half_width } => {
                ((center + half_width - x) / (2.0 * half_width)).clamp(0.0, 1.0)
            }
            ClassMember::Identity => x,
        }
    }

    /// `E f(X)` in closed form where one exists.
    pub fn mean_under(&self, p: &Univariate) -> Option<f64> {
        match *self {
            ClassMember::Indicator { t } => Some(p.cdf(t)),
            ClassMember::Ramp { center, half_width } => {
                Some(p.integral_cdf(center - half_width, center + half_width) / (2.0 * half_width))
            }
            ClassMember::Identity => None,
        }
    }
}

/// Finite class `{f_1, .., f_K}`; a symmetric class is closed under
/// negation, which is realized by taking absolute mean gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteFunctionClass {
    pub members: Vec<ClassMember>,
    #[serde(default)]
    pub symmetric: bool,
}

impl FiniteFunctionClass {
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::invalid("function class is empty"));
        }
        for m in &self.members {
            if let ClassMember::Ramp { half_width, .. } = m {
                if !(*half_width > 0.0) {
                    return Err(Error::invalid("ramp half width must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `n x K` matrix of `f_k(X_i)`.
    pub fn evaluate(&self, s: &Sample) -> Result<Array2<f64>> {
        if s.dim() != 1 {
            return Err(Error::invalid("function classes act on univariate samples"));
        }
        let xs = s.as_flat();
        Ok(Array2::from_shape_fn((xs.len(), self.len()), |(i, k)| {
            self.members[k].eval(xs[i])
        }))
    }

    /// Population means `E_P f_k`, closed form where available and
    /// quantile quadrature with `nodes` points otherwise.
    pub fn means_under(&self, p: &Univariate, nodes: usize) -> Vec<f64> {
        let quad = std::cell::OnceCell::new();
        self.members
            .iter()
            .enumerate()
            .map(|(k, m)| {
                m.mean_under(p).unwrap_or_else(|| {
                    let (mean, _) = quad.get_or_init(|| self.moments_under(p, nodes));
                    mean[k]
                })
            })
            .collect()
    }

    /// Quadrature means and covariance `E f_k f_l - E f_k E f_l` over the
    /// quantile midpoints `Q((j + 1/2) / nodes)`.
    pub fn moments_under(&self, p: &Univariate, nodes: usize) -> (Vec<f64>, Array2<f64>) {
        let k = self.len();
        let mut sum = vec![0.0; k];
        let mut cross = Array2::<f64>::zeros((k, k));
        let mut row = vec![0.0; k];
        for j in 0..nodes {
            let x = p.quantile((j as f64 + 0.5) / nodes as f64);
            for (r, m) in row.iter_mut().zip(&self.members) {
                *r = m.eval(x);
            }
            for a in 0..k {
                sum[a] += row[a];
                for b in a..k {
                    cross[[a, b]] += row[a] * row[b];
                }
            }
        }
        let w = 1.0 / nodes as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s * w).collect();
        let cov = Array2::from_shape_fn((k, k), |(a, b)| {
            let (lo, hi) = (a.min(b), a.max(b));
            cross[[lo, hi]] * w - mean[a] * mean[b]
        });
        (mean, cov)
    }
}

/// Finite-class discrepancy and the per-member mean gaps it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MmdValue {
    pub value: f64,
    pub gaps: Vec<f64>,
}

/// `max_k gap_k` (or `max_k |gap_k|` for a symmetric class) with
/// `gap_k = mean_x f_k - mean_y f_k`.
pub fn mmd_finite(evals_x: &Array2<f64>, evals_y: &Array2<f64>, symmetric: bool) -> Result<MmdValue> {
    if evals_x.ncols() != evals_y.ncols() {
        return Err(Error::DimensionMismatch {
            expected: evals_x.ncols(),
            got: evals_y.ncols(),
        });
    }
    if evals_x.ncols() == 0 {
        return Err(Error::invalid("function class is empty"));
    }
    if evals_x.nrows() == 0 || evals_y.nrows() == 0 {
        return Err(Error::EmptySample);
    }
    let column_means = |e: &Array2<f64>| -> Vec<f64> {
        e.axis_iter(Axis(1))
            .map(|c| c.iter().sum::<f64>() / e.nrows() as f64)
            .collect()
    };
    let gaps: Vec<f64> = column_means(evals_x)
        .iter()
        .zip(column_means(evals_y))
        .map(|(a, b)| a - b)
        .collect();
    let value = gaps
        .iter()
        .map(|&g| if symmetric { g.abs() } else { g })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MmdValue { value, gaps })
}

/// `sqrt(n m / (n + m)) (MMD[F, P_n, Q_m] - reference)`.
pub fn mmd_statistic(
    sx: &Sample,
    sy: &Sample,
    class: &FiniteFunctionClass,
    reference: f64,
) -> Result<StatResult> {
    class.validate()?;
    let v = mmd_finite(&class.evaluate(sx)?, &class.evaluate(sy)?, class.symmetric)?;
    Ok(StatResult::new(
        v.value,
        reference,
        two_sample_scale(sx.n(), sy.n()),
        sx.n(),
        Some(sy.n()),
    ))
}

/// Positive definite kernels for the kernel distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "kebab-case")]
pub enum Kernel {
    Gaussian { bandwidth: f64 },
    Laplace { scale: f64 },
}

impl Kernel {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
        match *self {
            Kernel::Gaussian { bandwidth } => (-sq / (2.0 * bandwidth * bandwidth)).exp(),
            Kernel::Laplace { scale } => (-sq.sqrt() / scale).exp(),
        }
    }
}

/// Kernel distance: the RKHS norm of the difference of the empirical mean
/// embeddings (V-statistic, clamped at 0 before the square root).
pub fn kernel_mmd(sx: &Sample, sy: &Sample, kernel: Kernel) -> Result<f64> {
    let width = match kernel {
        Kernel::Gaussian { bandwidth } => bandwidth,
        Kernel::Laplace { scale } => scale,
    };
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::invalid("kernel bandwidth must be positive"));
    }
    if sx.dim() != sy.dim() {
        return Err(Error::DimensionMismatch {
            expected: sx.dim(),
            got: sy.dim(),
        });
    }
    let mean_k = |a: &Sample, b: &Sample| {
        let mut total = 0.0;
        for i in 0..a.n() {
            for j in 0..b.n() {
                total += kernel.eval(a.row(i), b.row(j));
            }
        }
        total / (a.n() * b.n()) as f64
    };
    let v = mean_k(sx, sx) - 2.0 * mean_k(sx, sy) + mean_k(sy, sy);
    Ok(v.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(xs: &[f64]) -> Sample {
        Sample::univariate(xs.to_vec()).unwrap()
    }

    #[test]
    fn ks_three_points_against_uniform() {
        let s = uni(&[0.1, 0.5, 0.9]);
        let g: CdfSpec = Univariate::unit_uniform().into();
        let d = ks_one_sample(&s, &g, FunctionalKind::SupNorm, 0.0).unwrap();
        assert!((d.raw - 7.0 / 30.0).abs() < 1e-15);
        let a = ks_one_sample(&s, &g, FunctionalKind::Amp, 0.0).unwrap();
        assert!((a.raw - 14.0 / 30.0).abs() < 1e-15);
        assert!(ks_one_sample(&s, &g, FunctionalKind::Inf, 0.0).is_err());
    }

    #[test]
    fn ks_two_sample_cases() {
        let s = uni(&[0.3, 0.1, 0.7]);
        let r = ks_two_sample(&s, &s, FunctionalKind::SupNorm, 0.0).unwrap();
        assert_eq!(r.raw, 0.0);
        assert!((r.scale - 1.5f64.sqrt()).abs() < 1e-15);
        let r = ks_two_sample(&uni(&[0.1]), &uni(&[0.9]), FunctionalKind::SupNorm, 0.0).unwrap();
        assert_eq!(r.raw, 1.0);
    }

    #[test]
    fn lattice_ks_two_points() {
        let s = Sample::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = Sample::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let e = two_sample_extremes(&s, &y).unwrap();
        assert_eq!((e.sup, e.inf), (0.5, 0.0));
    }

    #[test]
    fn copula_distance_comonotone_vs_product() {
        let n = 400;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, i as f64]).collect();
        let s = Sample::from_rows(&rows).unwrap();
        let d = copula_distance(&s, &Copula::Independence { dim: 2 }).unwrap();
        assert!((d - 0.25).abs() < 3.0 / n as f64, "{d}");
    }

    fn radial_pairwise(s: &Sample) -> f64 {
        let n = s.n();
        let (side, nf) = (n + 1, n as f64);
        let cn = rank_lattice_copula(s).unwrap();
        let mut states = Vec::new();
        for i in 0..=n {
            let u = i as f64 / nf;
            states.push((i, n - i, u, u));
            if i < n {
                states.push((i + 1, n - i, u, (i + 1) as f64 / nf));
            }
        }
        let mut best = 0.0f64;
        for &(a1, b1, lo1, hi1) in &states {
            for &(a2, b2, lo2, hi2) in &states {
                let jump = cn[a1 * side + a2] - cn[b1 * side + b2];
                best = best
                    .max((jump - (lo1 + lo2 - 1.0)).abs())
                    .max((jump - (hi1 + hi2 - 1.0)).abs());
            }
        }
        best
    }

    #[test]
    fn radial_scan_matches_pairwise_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 17, 40] {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(0..6) as f64, rng.random::<f64>()])
                .collect();
            let s = Sample::from_rows(&rows).unwrap();
            let (fast, slow) = (radial_asymmetry(&s).unwrap(), radial_pairwise(&s));
            assert!((fast - slow).abs() < 1e-15, "n = {n}: {fast} vs {slow}");
        }
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_bernoulli(0.3, 0.3).unwrap(), 0.0);
        let want = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl_bernoulli(0.5, 0.25).unwrap() - want).abs() < 1e-15);
        assert!((kl_bernoulli(0.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(kl_bernoulli(0.5, 1.0).is_err());
    }

    #[test]
    fn berk_jones_single_point() {
        let r = berk_jones_r(&uni(&[0.5]), &Univariate::unit_uniform()).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn berk_jones_centring() {
        assert!(berk_jones_dn(15).is_err());
        assert!((berk_jones_dn(10_000).unwrap() - 0.55599).abs() < 1e-4);
        assert!((0.5 * (4.0 * std::f64::consts::PI).ln() - 1.265512).abs() < 1e-6);
    }

    #[test]
    fn mmd_finite_cases() {
        let x = Array2::from_shape_vec((1, 2), vec![0.3, -0.5]).unwrap();
        let y = Array2::zeros((1, 2));
        assert_eq!(mmd_finite(&x, &y, true).unwrap().value, 0.5);
        assert_eq!(mmd_finite(&x, &y, false).unwrap().value, 0.3);
        assert_eq!(mmd_finite(&x, &x, true).unwrap().value, 0.0);
    }

    #[test]
    fn kernel_distance_two_points() {
        let k = Kernel::Gaussian { bandwidth: 1.0 };
        assert_eq!(kernel_mmd(&uni(&[0.0]), &uni(&[0.0]), k).unwrap(), 0.0);
        let far = kernel_mmd(&uni(&[0.0]), &uni(&[50.0]), k).unwrap();
        assert!((far - 2f64.sqrt()).abs() < 1e-12);
        assert!(kernel_mmd(&uni(&[0.0]), &uni(&[1.0]), Kernel::Laplace { scale: 0.0 }).is_err());
    }
}
