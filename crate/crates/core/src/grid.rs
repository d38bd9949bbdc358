//! Finite grids standing in for the index set of a bounded function, and
//! real functions sampled on them.
//!
//! A [`GridDomain`] is either an ordered line (`d = 1`), a product lattice
//! (`d >= 2`), or a discrete index set without geometry (a finite class of
//! functions). A line may be *compactified*: its first and last abscissae are
//! the sentinels `-inf` and `+inf`, and distances are measured after the map
//! `x -> 1/2 + atan(x)/pi` onto `[0, 1]`.
//!
//! A [`GridFunction`] on a line may carry a second channel of left limits,
//! which is how cadlag functions (and both one-sided limits at a jump) are
//! represented. Node values are always right limits.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Map of the extended real line onto `[0, 1]`.
pub fn compactify(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else {
        0.5 + x.atan() / std::f64::consts::PI
    }
}

/// Inverse of [`compactify`].
pub fn decompactify(u: f64) -> f64 {
    if u <= 0.0 {
        f64::NEG_INFINITY
    } else if u >= 1.0 {
        f64::INFINITY
    } else {
        (std::f64::consts::PI * (u - 0.5)).tan()
    }
}

/// Which one-sided value of a function a grid point refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    /// Limit from below (`v = -1`).
    Left,
    /// Node value, equal to the limit from above (`v = +1`).
    Value,
}

/// A node together with the channel it is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub node: usize,
    pub channel: Channel,
}

impl GridPoint {
    pub fn value(node: usize) -> Self {
        GridPoint {
            node,
            channel: Channel::Value,
        }
    }

    pub fn left(node: usize) -> Self {
        GridPoint {
            node,
            channel: Channel::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Nodes are neighbours when every coordinate index differs by at most one.
    Lattice,
    /// No two distinct nodes are neighbours.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    Cadlag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain<T = f64> {
    axes: Vec<Vec<T>>,
    compactified: bool,
    topology: Topology,
    len: usize,
}

fn check_axis<T: Scalar>(axis: &[T], allow_infinite_ends: bool) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::invalid("every axis needs at least two abscissae"));
    }
    for (k, x) in axis.iter().enumerate() {
        let end = k == 0 || k + 1 == axis.len();
        if x.is_nan() || (x.is_infinite() && !(allow_infinite_ends && end)) {
            return Err(Error::invalid(format!("abscissa {k} is not finite")));
        }
    }
    if axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("abscissae must be strictly increasing"));
    }
    Ok(())
}

impl<T: Scalar> GridDomain<T> {
    /// Ordered line with the given finite abscissae.
    pub fn line(xs: Vec<T>) -> Result<Self> {
        check_axis(&xs, false)?;
        Ok(Self::from_axes(vec![xs], false, Topology::Lattice))
    }

    /// Line of `nodes` points equispaced in the compactified coordinate, with
    /// sentinels at both ends.
    pub fn compactified_line(nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::invalid("a compactified line needs at least three nodes"));
        }
        let last = (nodes - 1) as f64;
        let xs = (0..nodes)
            .map(|k| T::from_f64_lossy(decompactify(k as f64 / last)))
            .collect();
        Ok(Self::from_axes(vec![xs], true, Topology::Lattice))
    }

    /// Finite interior abscissae wrapped by the `-inf`/`+inf` sentinels.
    pub fn compactified_with(interior: Vec<T>) -> Result<Self> {
        let mut xs = Vec::with_capacity(interior.len() + 2);
        xs.push(T::neg_infinity());
        xs.extend(interior);
        xs.push(T::infinity());
        check_axis(&xs, true)?;
        Ok(Self::from_axes(vec![xs], true, Topology::Lattice))
    }

    /// Product lattice of the given axes (`d = axes.len()`).
    pub fn lattice(axes: Vec<Vec<T>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("a lattice needs at least one axis"));
        }
        for axis in &axes {
            check_axis(axis, false)?;
        }
        Ok(Self::from_axes(axes, false, Topology::Lattice))
    }

    /// `[0,1]^d` lattice with `nodes_per_axis` equispaced points on each axis,
    /// endpoints included.
    pub fn unit_lattice(nodes_per_axis: usize, dim: usize) -> Result<Self> {
        if nodes_per_axis < 2 || dim == 0 {
            return Err(Error::invalid("unit lattice needs >= 2 nodes per axis and d >= 1"));
        }
        let last = (nodes_per_axis - 1) as f64;
        let axis: Vec<T> = (0..nodes_per_axis)
            .map(|k| T::from_f64_lossy(k as f64 / last))
            .collect();
        Self::lattice(vec![axis; dim])
    }

    /// Index set `0..k` of a finite function class. Carries no geometry.
    pub fn finite_class(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("a function class needs at least one member"));
        }
        let axis = (0..k).map(|i| T::from_f64_lossy(i as f64)).collect();
        Ok(Self::from_axes(vec![axis], false, Topology::Discrete))
    }

    fn from_axes(axes: Vec<Vec<T>>, compactified: bool, topology: Topology) -> Self {
        let len = axes.iter().map(Vec::len).product();
        GridDomain {
            axes,
            compactified,
            topology,
            len,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axis(&self, i: usize) -> &[T] {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Vec<T>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn is_compactified(&self) -> bool {
        self.compactified
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Per-axis indices of a node; the last axis varies fastest.
    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (slot, axis) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = node % axis.len();
            node /= axis.len();
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, axis)| acc * axis.len() + i)
    }

    pub fn coords(&self, node: usize) -> Vec<T> {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    }

    /// Whether two nodes lie within one grid cell of each other.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        match self.topology {
            Topology::Discrete => false,
            Topology::Lattice => {
                if self.dim() == 1 {
                    return a.abs_diff(b) <= 1;
                }
                self.multi_index(a)
                    .iter()
                    .zip(self.multi_index(b))
                    .all(|(&i, j)| i.abs_diff(j) <= 1)
            }
        }
    }

    /// Node at the reflected position `u -> 1 - u` on every axis, for
    /// lattices whose axes are symmetric about `1/2`.
    pub fn reflection_map(&self) -> Result<Vec<usize>> {
        let one = T::one();
        let tol = T::from_f64_lossy(1e-12);
        for axis in &self.axes {
            let n = axis.len();
            for k in 0..n {
                if (axis[k] + axis[n - 1 - k] - one).abs() > tol {
                    return Err(Error::GridMismatch(
                        "lattice is not closed under u -> 1 - u".into(),
                    ));
                }
            }
        }
        Ok((0..self.len)
            .map(|node| {
                let idx: Vec<usize> = self
                    .multi_index(node)
                    .iter()
                    .zip(&self.axes)
                    .map(|(&i, axis)| axis.len() - 1 - i)
                    .collect();
                self.flat_index(&idx)
            })
            .collect())
    }
}

/// Real function sampled on a [`GridDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T = f64> {
    domain: Arc<GridDomain<T>>,
    values: Vec<T>,
    left: Option<Vec<T>>,
}

fn check_finite<T: Scalar>(values: &[T], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::NonFinite(format!("{what} at node {k}"))),
        None => Ok(()),
    }
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(domain: Arc<GridDomain<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DimensionMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        check_finite(&values, "value")?;
        Ok(GridFunction {
            domain,
            values,
            left: None,
        })
    }

    /// Cadlag function on a line: `values` are right limits, `left` the
    /// limits from below.
    pub fn cadlag(domain: Arc<GridDomain<T>>, values: Vec<T>, left: Vec<T>) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::invalid("left-limit channel is only defined for d = 1"));
        }
        let mut f = Self::new(domain, values)?;
        if left.len() != f.values.len() {
            return Err(Error::DimensionMismatch {
                expected: f.values.len(),
                got: left.len(),
            });
        }
        check_finite(&left, "left limit")?;
        f.left = Some(left);
        Ok(f)
    }

    pub fn from_fn(domain: Arc<GridDomain<T>>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let values = (0..domain.len()).map(|k| f(&domain.coords(k))).collect();
        Self::new(domain, values)
    }

    pub fn constant(domain: Arc<GridDomain<T>>, c: T) -> Result<Self> {
        let n = domain.len();
        Self::new(domain, vec![c; n])
    }

    pub(crate) fn from_parts_unchecked(
        domain: Arc<GridDomain<T>>,
        values: Vec<T>,
        left: Option<Vec<T>>,
    ) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        GridFunction {
            domain,
            values,
            left,
        }
    }

    pub fn domain(&self) -> &Arc<GridDomain<T>> {
        &self.domain
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn left_limits(&self) -> Option<&[T]> {
        self.left.as_deref()
    }

    pub fn continuity(&self) -> Continuity {
        if self.left.is_some() {
            Continuity::Cadlag
        } else {
            Continuity::Continuous
        }
    }

    pub fn is_cadlag(&self) -> bool {
        self.left.is_some()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at a grid point; the left channel of a continuous function is
    /// its node value.
    pub fn at(&self, p: GridPoint) -> T {
        match (p.channel, &self.left) {
            (Channel::Left, Some(left)) => left[p.node],
            _ => self.values[p.node],
        }
    }

    pub fn channels(&self) -> &'static [Channel] {
        if self.is_cadlag() {
            &[Channel::Left, Channel::Value]
        } else {
            &[Channel::Value]
        }
    }

    /// All grid points of this function, ordered by node then channel.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let channels = self.channels();
        (0..self.len()).flat_map(move |node| {
            channels
                .iter()
                .map(move |&channel| GridPoint { node, channel })
        })
    }

    pub fn same_domain(&self, other: &GridFunction<T>) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain
    }

    pub fn map(&self, op: impl Fn(T) -> T) -> Self {
        GridFunction {
            domain: Arc::clone(&self.domain),
            values: self.values.iter().map(|&v| op(v)).collect(),
            left: self.left.as_ref().map(|l| l.iter().map(|&v| op(v)).collect()),
        }
    }

    /// Pointwise combination. The result is cadlag when either input is.
    pub fn zip_with(&self, other: &GridFunction<T>, op: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.same_domain(other) {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let left = if self.is_cadlag() || other.is_cadlag() {
            Some(
                (0..self.len())
                    .map(|k| op(self.at(GridPoint::left(k)), other.at(GridPoint::left(k))))
                    .collect(),
            )
        } else {
            None
        };
        Ok(GridFunction {
            domain: Arc::clone(&self.domain),
            values,
            left,
        })
    }

    /// Copy with an explicit left channel (equal to the node values) when the
    /// function is continuous.
    pub fn to_cadlag(&self) -> Result<Self> {
        match &self.left {
            Some(_) => Ok(self.clone()),
            None => Self::cadlag(
                Arc::clone(&self.domain),
                self.values.clone(),
                self.values.clone(),
            ),
        }
    }

    pub fn sup_abs(&self) -> T {
        self.points()
            .map(|p| self.at(p).abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_zero(&self) -> bool {
        self.points().all(|p| self.at(p) == T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compactify_roundtrips_and_pins_sentinels() {
        assert_eq!(compactify(f64::NEG_INFINITY), 0.0);
        assert_eq!(compactify(f64::INFINITY), 1.0);
        assert_eq!(compactify(0.0), 0.5);
        for x in [-3.0, -0.2, 0.7, 12.0] {
            assert!((decompactify(compactify(x)) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn compactified_line_carries_sentinels() {
        let g = GridDomain::<f64>::compactified_line(5).unwrap();
        assert!(g.is_compactified());
        assert_eq!(g.axis(0)[0], f64::NEG_INFINITY);
        assert_eq!(g.axis(0)[4], f64::INFINITY);
        assert!(g.axis(0)[2].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(GridDomain::line(vec![0.0]).is_err());
        assert!(GridDomain::line(vec![0.0, 0.0]).is_err());
        assert!(GridDomain::line(vec![1.0, 0.0]).is_err());
        assert!(GridDomain::line(vec![0.0, f64::NAN]).is_err());
        assert!(GridDomain::lattice(vec![vec![0.0, 1.0], vec![0.5]]).is_err());
    }

    #[test]
    fn lattice_indexing_is_row_major() {
        let g = GridDomain::lattice(vec![vec![0.0, 1.0, 2.0], vec![10.0, 20.0]]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.multi_index(3), vec![1, 1]);
        assert_eq!(g.flat_index(&[2, 0]), 4);
        assert_eq!(g.coords(5), vec![2.0, 20.0]);
        assert!(g.adjacent(0, 3));
        assert!(!g.adjacent(0, 4));
    }

    #[test]
    fn reflection_map_on_unit_lattice() {
        let g = GridDomain::<f64>::unit_lattice(4, 2).unwrap();
        let r = g.reflection_map().unwrap();
        assert_eq!(r[0], 15);
        assert_eq!(r[g.flat_index(&[1, 2])], g.flat_index(&[2, 1]));
        let skew = GridDomain::lattice(vec![vec![0.0, 0.3, 1.0], vec![0.0, 0.5, 1.0]]).unwrap();
        assert!(skew.reflection_map().is_err());
    }

    #[test]
    fn left_channel_requires_line() {
        let g = Arc::new(GridDomain::<f64>::unit_lattice(2, 2).unwrap());
        assert!(GridFunction::cadlag(g, vec![0.0; 4], vec![0.0; 4]).is_err());
    }

    #[test]
    fn zip_with_lifts_to_cadlag() {
        let d = Arc::new(GridDomain::line(vec![0.0, 1.0]).unwrap());
        let f = GridFunction::new(Arc::clone(&d), vec![1.0, 2.0]).unwrap();
        let g = GridFunction::cadlag(d, vec![0.5, 0.5], vec![0.0, 0.25]).unwrap();
        let h = f.zip_with(&g, |a, b| a + b).unwrap();
        assert!(h.is_cadlag());
        assert_eq!(h.at(GridPoint::left(1)), 2.25);
        assert_eq!(h.at(GridPoint::value(1)), 2.5);
    }

    #[test]
    fn non_finite_values_rejected() {
        let d = Arc::new(GridDomain::line(vec![0.0, 1.0]).unwrap());
        assert!(GridFunction::new(d, vec![0.0, f64::INFINITY]).is_err());
    }
}
