//! The four supremum-type functionals (sup-norm, supremum, infimum,
//! amplitude) on grid functions, their near-extremal level sets, and their
//! directional derivatives.
//!
//! For a functional `phi` and a base function `f`, the directional derivative
//! in direction `g` is read off the `eps`-superlevel set `A_eps(f)` (points
//! where `f >= sup f - eps`) or the sublevel set `B_eps(f)`:
//!
//! | kind       | derivative                                   |
//! |------------|----------------------------------------------|
//! | `SupNorm`  | `sup over A_eps(|f|) of g * sgn(f)`          |
//! | `Sup`      | `sup over A_eps(f) of g`                     |
//! | `Inf`      | `inf over B_eps(f) of g`                     |
//! | `Amp`      | `Sup` term minus `Inf` term                  |
//!
//! On a finite grid the supremum is attained, so `eps = 0` gives the exact
//! argmax set. For cadlag functions both channels (left limit and node value)
//! take part, and `g * sgn(f)` pairs each channel of `g` with the same
//! channel of `f`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction, GridPoint, Topology};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// `||f||_inf`
    SupNorm,
    /// `sup f`
    Sup,
    /// `inf f`
    Inf,
    /// `sup f - inf f`
    Amp,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 4] = [
        FunctionalKind::SupNorm,
        FunctionalKind::Sup,
        FunctionalKind::Inf,
        FunctionalKind::Amp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionalKind::SupNorm => "sup-norm",
            FunctionalKind::Sup => "sup",
            FunctionalKind::Inf => "inf",
            FunctionalKind::Amp => "amp",
        }
    }
}

impl std::str::FromStr for FunctionalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionalKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown functional `{s}`")))
    }
}

fn sup_of<T: Scalar>(f: &GridFunction<T>) -> T {
    f.points().map(|p| f.at(p)).fold(T::neg_infinity(), T::max)
}

fn inf_of<T: Scalar>(f: &GridFunction<T>) -> T {
    f.points().map(|p| f.at(p)).fold(T::infinity(), T::min)
}

/// Value of the functional. Suprema and infima range over both channels of a
/// cadlag function.
pub fn evaluate<T: Scalar>(kind: FunctionalKind, f: &GridFunction<T>) -> T {
    match kind {
        FunctionalKind::SupNorm => f.sup_abs(),
        FunctionalKind::Sup => sup_of(f),
        FunctionalKind::Inf => inf_of(f),
        FunctionalKind::Amp => sup_of(f) - inf_of(f),
    }
}

/// Grid points realizing a near-extremal set, sorted by node then channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet<T = f64> {
    points: Vec<GridPoint>,
    tolerance: T,
}

impl<T: Scalar> LevelSet<T> {
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// Distinct nodes, ignoring channels.
    pub fn nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.points.iter().map(|p| p.node).collect();
        nodes.dedup();
        nodes
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

fn check_tolerance<T: Scalar>(eps: T) -> Result<()> {
    if eps < T::zero() || eps.is_nan() {
        return Err(Error::NegativeTolerance(eps.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `A_eps(f)`: points with `f >= sup f - eps`.
pub fn superlevel_set<T: Scalar>(f: &GridFunction<T>, eps: T) -> Result<LevelSet<T>> {
    check_tolerance(eps)?;
    let threshold = sup_of(f) - eps;
    let points = f.points().filter(|&p| f.at(p) >= threshold).collect();
    Ok(LevelSet {
        points,
        tolerance: eps,
    })
}

/// `B_eps(f)`: points with `f <= inf f + eps`.
pub fn sublevel_set<T: Scalar>(f: &GridFunction<T>, eps: T) -> Result<LevelSet<T>> {
    check_tolerance(eps)?;
    let threshold = inf_of(f) + eps;
    let points = f.points().filter(|&p| f.at(p) <= threshold).collect();
    Ok(LevelSet {
        points,
        tolerance: eps,
    })
}

/// A group of extremal points lying within one grid cell of each other
/// (transitively).
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<GridPoint>,
    /// Member with the most extreme value (first in grid order on ties).
    pub representative: GridPoint,
}

impl Cluster {
    /// Whether all members sit on one node (possibly on both channels).
    pub fn is_single_node(&self) -> bool {
        self.members.iter().all(|p| p.node == self.members[0].node)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSet<T = f64> {
    pub level: LevelSet<T>,
    pub clusters: Vec<Cluster>,
}

impl<T: Scalar> ExtremalSet<T> {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }
}

fn neighbours(domain: &GridDomain<impl Scalar>, node: usize) -> Vec<usize> {
    if domain.topology() == Topology::Discrete {
        return Vec::new();
    }
    let shape = domain.shape();
    let base = domain.multi_index(node);
    let mut out = Vec::new();
    let mut offset = vec![-1i64; shape.len()];
    loop {
        if offset.iter().any(|&o| o != 0) {
            let idx: Option<Vec<usize>> = base
                .iter()
                .zip(&offset)
                .zip(&shape)
                .map(|((&b, &o), &n)| {
                    let v = b as i64 + o;
                    (v >= 0 && v < n as i64).then_some(v as usize)
                })
                .collect();
            if let Some(idx) = idx {
                out.push(domain.flat_index(&idx));
            }
        }
        let mut axis = 0;
        loop {
            if axis == offset.len() {
                return out;
            }
            offset[axis] += 1;
            if offset[axis] <= 1 {
                break;
            }
            offset[axis] = -1;
            axis += 1;
        }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn cluster_points<T: Scalar>(
    f: &GridFunction<T>,
    level: &LevelSet<T>,
    prefer_max: bool,
) -> Vec<Cluster> {
    let points = level.points();
    let domain = f.domain();
    let mut parent: Vec<usize> = (0..points.len()).collect();
    let mut by_node: HashMap<usize, usize> = HashMap::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        match by_node.get(&p.node) {
            Some(&first) => {
                let (a, b) = (find(&mut parent, first), find(&mut parent, k));
                parent[b] = a;
            }
            None => {
                by_node.insert(p.node, k);
            }
        }
    }
    for (k, p) in points.iter().enumerate() {
        for nb in neighbours(domain, p.node) {
            if let Some(&j) = by_node.get(&nb) {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<GridPoint>)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (k, &p) in points.iter().enumerate() {
        let root = find(&mut parent, k);
        let s = *slot.entry(root).or_insert_with(|| {
            groups.push((root, Vec::new()));
            groups.len() - 1
        });
        groups[s].1.push(p);
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let mut representative = members[0];
            for &p in &members[1..] {
                let better = if prefer_max {
                    f.at(p) > f.at(representative)
                } else {
                    f.at(p) < f.at(representative)
                };
                if better {
                    representative = p;
                }
            }
            Cluster {
                members,
                representative,
            }
        })
        .collect()
}

/// Superlevel set at tolerance `tol`, grouped into clusters of adjacent nodes.
pub fn argmax_set<T: Scalar>(f: &GridFunction<T>, tol: T) -> Result<ExtremalSet<T>> {
    let level = superlevel_set(f, tol)?;
    let clusters = cluster_points(f, &level, true);
    Ok(ExtremalSet { level, clusters })
}

/// Sublevel set at tolerance `tol`, grouped into clusters of adjacent nodes.
pub fn argmin_set<T: Scalar>(f: &GridFunction<T>, tol: T) -> Result<ExtremalSet<T>> {
    let level = sublevel_set(f, tol)?;
    let clusters = cluster_points(f, &level, false);
    Ok(ExtremalSet { level, clusters })
}

fn sign<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

/// Extremal sets of a base function, extracted once and applied to many
/// directions.
#[derive(Debug, Clone)]
pub struct PreparedDerivative<T = f64> {
    kind: FunctionalKind,
    domain: Arc<GridDomain<T>>,
    /// Points of `A_eps` with the sign of the base function there.
    plus: Vec<(GridPoint, T)>,
    /// Points of `B_eps`.
    minus: Vec<GridPoint>,
    base_cadlag: bool,
    eps: T,
}

impl<T: Scalar> PreparedDerivative<T> {
    pub fn new(kind: FunctionalKind, f: &GridFunction<T>, eps: T) -> Result<Self> {
        check_tolerance(eps)?;
        let (plus, minus) = match kind {
            FunctionalKind::SupNorm => {
                if f.is_zero() {
                    return Err(Error::ZeroFunction);
                }
                let abs = f.map(T::abs);
                let set = superlevel_set(&abs, eps)?;
                let plus = set.points().iter().map(|&p| (p, sign(f.at(p)))).collect();
                (plus, Vec::new())
            }
            FunctionalKind::Sup => (
                superlevel_set(f, eps)?
                    .points()
                    .iter()
                    .map(|&p| (p, T::one()))
                    .collect(),
                Vec::new(),
            ),
            FunctionalKind::Inf => (Vec::new(), sublevel_set(f, eps)?.points().to_vec()),
            FunctionalKind::Amp => (
                superlevel_set(f, eps)?
                    .points()
                    .iter()
                    .map(|&p| (p, T::one()))
                    .collect(),
                sublevel_set(f, eps)?.points().to_vec(),
            ),
        };
        Ok(PreparedDerivative {
            kind,
            domain: Arc::clone(f.domain()),
            plus,
            minus,
            base_cadlag: f.is_cadlag(),
            eps,
        })
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Points entering the supremum term, each with its sign weight.
    pub fn plus_points(&self) -> &[(GridPoint, T)] {
        &self.plus
    }

    /// Points entering the infimum term.
    pub fn minus_points(&self) -> &[GridPoint] {
        &self.minus
    }

    // A continuous base function has identical extremal sets on both
    // channels, so a cadlag direction is read on both.
    fn channel_values<'a>(
        &self,
        g: &'a GridFunction<T>,
        p: GridPoint,
    ) -> impl Iterator<Item = T> + 'a {
        let both = !self.base_cadlag && g.is_cadlag();
        let extra = both.then(|| g.at(GridPoint::left(p.node)));
        std::iter::once(g.at(p)).chain(extra)
    }

    fn sup_term(&self, g: &GridFunction<T>) -> T {
        self.plus
            .iter()
            .flat_map(|&(p, s)| self.channel_values(g, p).map(move |v| v * s))
            .fold(T::neg_infinity(), T::max)
    }

    fn inf_term(&self, g: &GridFunction<T>) -> T {
        self.minus
            .iter()
            .flat_map(|&p| self.channel_values(g, p))
            .fold(T::infinity(), T::min)
    }

    /// Derivative in direction `g`.
    pub fn apply(&self, g: &GridFunction<T>) -> Result<T> {
        if !(Arc::ptr_eq(&self.domain, g.domain()) || *self.domain == **g.domain()) {
            return Err(Error::GridMismatch(
                "direction lives on a different grid".into(),
            ));
        }
        Ok(self.apply_unchecked(g))
    }

    pub(crate) fn apply_unchecked(&self, g: &GridFunction<T>) -> T {
        match self.kind {
            FunctionalKind::SupNorm | FunctionalKind::Sup => self.sup_term(g),
            FunctionalKind::Inf => self.inf_term(g),
            FunctionalKind::Amp => self.sup_term(g) - self.inf_term(g),
        }
    }
}

/// Directional derivative of `kind` at `f` in direction `g`, read on the
/// `eps`-level sets of `f`.
pub fn directional_derivative<T: Scalar>(
    kind: FunctionalKind,
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    eps: T,
) -> Result<T> {
    PreparedDerivative::new(kind, f, eps)?.apply(g)
}

/// `(phi(f + t g) - phi(f)) / t`.
pub fn difference_quotient<T: Scalar>(
    kind: FunctionalKind,
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    t: T,
) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::invalid("difference quotient needs t > 0"));
    }
    let moved = f.zip_with(g, |a, b| a + t * b)?;
    Ok((evaluate(kind, &moved) - evaluate(kind, f)) / t)
}

/// Points at which the derivative reduces to evaluation, when the functional
/// is fully differentiable at the base function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T = f64> {
    /// Maximizer (sup-norm, sup, amp).
    pub plus: Option<GridPoint>,
    /// Minimizer (inf, amp).
    pub minus: Option<GridPoint>,
    /// Sign of the base function at the maximizer of `|f|` (sup-norm only;
    /// `+1` otherwise).
    pub sign: T,
}

fn sole_point<T: Scalar>(set: &ExtremalSet<T>) -> Option<GridPoint> {
    match set.clusters.as_slice() {
        [c] if c.is_single_node() => Some(c.representative),
        _ => None,
    }
}

/// Witness of full differentiability: the relevant extremal set is one
/// isolated node (for the sup-norm, with a constant sign of `f` there).
/// Returns `None` when the derivative is genuinely non-linear.
pub fn full_differentiability_witness<T: Scalar>(
    kind: FunctionalKind,
    f: &GridFunction<T>,
    tol: T,
) -> Result<Option<Witness<T>>> {
    check_tolerance(tol)?;
    let witness = match kind {
        FunctionalKind::SupNorm => {
            if f.is_zero() {
                return Err(Error::ZeroFunction);
            }
            let set = argmax_set(&f.map(T::abs), tol)?;
            sole_point(&set).and_then(|p| {
                let members = &set.clusters[0].members;
                let s = sign(f.at(members[0]));
                members
                    .iter()
                    .all(|&m| sign(f.at(m)) == s)
                    .then_some(Witness {
                        plus: Some(p),
                        minus: None,
                        sign: s,
                    })
            })
        }
        FunctionalKind::Sup => sole_point(&argmax_set(f, tol)?).map(|p| Witness {
            plus: Some(p),
            minus: None,
            sign: T::one(),
        }),
        FunctionalKind::Inf => sole_point(&argmin_set(f, tol)?).map(|p| Witness {
            plus: None,
            minus: Some(p),
            sign: T::one(),
        }),
        FunctionalKind::Amp => {
            match (
                sole_point(&argmax_set(f, tol)?),
                sole_point(&argmin_set(f, tol)?),
            ) {
                (Some(a), Some(b)) => Some(Witness {
                    plus: Some(a),
                    minus: Some(b),
                    sign: T::one(),
                }),
                _ => None,
            }
        }
    };
    Ok(witness)
}

/// Channel-aware copy of the points of a witness, for reading a direction.
pub fn witness_value<T: Scalar>(w: &Witness<T>, g: &GridFunction<T>) -> T {
    let plus = w.plus.map(|p| w.sign * g.at(p)).unwrap_or(T::zero());
    let minus = w.minus.map(|p| g.at(p)).unwrap_or(T::zero());
    match (w.plus, w.minus) {
        (Some(_), Some(_)) => plus - minus,
        (Some(_), None) => plus,
        (None, Some(_)) => minus,
        (None, None) => T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Arc<GridDomain<f64>> {
        let xs = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        Arc::new(GridDomain::line(xs).unwrap())
    }

    fn func(d: &Arc<GridDomain<f64>>, f: impl Fn(f64) -> f64) -> GridFunction<f64> {
        GridFunction::from_fn(Arc::clone(d), |x| f(x[0])).unwrap()
    }

    fn bimodal(x: f64) -> f64 {
        -(x - 0.25).powi(2) * (x - 0.75).powi(2)
    }

    #[test]
    fn evaluate_examples() {
        let d = line(101);
        assert_eq!(evaluate(FunctionalKind::Sup, &func(&d, |_| 1.0)), 1.0);
        assert_eq!(evaluate(FunctionalKind::Amp, &func(&d, |x| x)), 1.0);
        let d3 = line(3);
        let step = GridFunction::new(d3, vec![-0.3, 0.7, -0.9]).unwrap();
        assert_eq!(evaluate(FunctionalKind::SupNorm, &step), 0.9);
        assert_eq!(evaluate(FunctionalKind::Inf, &step), -0.9);
    }

    #[test]
    fn evaluate_reads_both_channels() {
        let d = line(2);
        let f = GridFunction::cadlag(d, vec![0.0, 0.5], vec![0.0, 2.0]).unwrap();
        assert_eq!(evaluate(FunctionalKind::Sup, &f), 2.0);
    }

    #[test]
    fn level_set_examples() {
        let d = line(3);
        let f = func(&d, |x| x);
        let nodes = |s: LevelSet<f64>| s.nodes();
        assert_eq!(nodes(superlevel_set(&f, 0.0).unwrap()), vec![2]);
        assert_eq!(nodes(superlevel_set(&f, 0.6).unwrap()), vec![1, 2]);
        assert_eq!(nodes(sublevel_set(&f, 0.0).unwrap()), vec![0]);
        assert_eq!(nodes(sublevel_set(&f, 0.6).unwrap()), vec![0, 1]);
        let c = func(&d, |_| 3.0);
        assert_eq!(nodes(superlevel_set(&c, 0.0).unwrap()), vec![0, 1, 2]);
        assert_eq!(nodes(sublevel_set(&c, 0.0).unwrap()), vec![0, 1, 2]);
        assert!(matches!(
            superlevel_set(&f, -1.0),
            Err(Error::NegativeTolerance(_))
        ));
    }

    #[test]
    fn derivative_examples() {
        let d = line(101);
        let one = func(&d, |_| 1.0);
        let g = func(&d, |x| 1.0 - x);
        let v = directional_derivative(FunctionalKind::Sup, &one, &g, 0.0).unwrap();
        assert_eq!(v, 1.0);

        let zero = func(&d, |_| 0.0);
        let wiggle = func(&d, |x| (7.0 * x).sin());
        let v = directional_derivative(FunctionalKind::Sup, &zero, &wiggle, 0.0).unwrap();
        assert_eq!(v, evaluate(FunctionalKind::Sup, &wiggle));
        assert!(matches!(
            directional_derivative(FunctionalKind::SupNorm, &zero, &wiggle, 0.0),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn bimodal_derivative_matches_quotient_oracle() {
        let d = line(1001);
        let f = func(&d, bimodal);
        let g = func(&d, |x| x);
        let v = directional_derivative(FunctionalKind::Sup, &f, &g, 0.0).unwrap();
        let q = difference_quotient(FunctionalKind::Sup, &f, &g, 1e-6).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert!((v - q).abs() < 1e-4);
    }

    #[test]
    fn quotient_examples() {
        let d = line(101);
        let zero = func(&d, |_| 0.0);
        let g = func(&d, |x| (3.0 * x).cos() - 0.2);
        let q = difference_quotient(FunctionalKind::Sup, &zero, &g, 0.37).unwrap();
        assert!((q - evaluate(FunctionalKind::Sup, &g)).abs() < 1e-12);

        let f = func(&d, |x| x);
        let ones = func(&d, |_| 1.0);
        let q = difference_quotient(FunctionalKind::SupNorm, &f, &ones, 0.01).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
        assert!(difference_quotient(FunctionalKind::Sup, &f, &ones, 0.0).is_err());
    }

    #[test]
    fn argmax_clusters() {
        let d = line(1001);
        let set = argmax_set(&func(&d, bimodal), 1e-12).unwrap();
        assert_eq!(set.cluster_count(), 2);
        let xs: Vec<f64> = set
            .clusters
            .iter()
            .map(|c| d.axis(0)[c.representative.node])
            .collect();
        assert!((xs[0] - 0.25).abs() < 1e-12 && (xs[1] - 0.75).abs() < 1e-12);

        let lin = argmax_set(&func(&d, |x| x), 0.0).unwrap();
        assert_eq!(lin.cluster_count(), 1);
        assert_eq!(lin.clusters[0].representative.node, 1000);

        let flat = argmax_set(&func(&d, |_| 2.0), 0.0).unwrap();
        assert_eq!(flat.cluster_count(), 1);
        assert_eq!(flat.clusters[0].members.len(), 1001);
    }

    #[test]
    fn lattice_clusters_merge_diagonals() {
        let d = Arc::new(GridDomain::<f64>::unit_lattice(5, 2).unwrap());
        let mut v = vec![0.0; 25];
        v[d.flat_index(&[1, 1])] = 1.0;
        v[d.flat_index(&[2, 2])] = 1.0;
        v[d.flat_index(&[4, 0])] = 1.0;
        let f = GridFunction::new(Arc::clone(&d), v).unwrap();
        assert_eq!(argmax_set(&f, 0.0).unwrap().cluster_count(), 2);
    }

    #[test]
    fn discrete_domain_never_merges() {
        let d = Arc::new(GridDomain::<f64>::finite_class(3).unwrap());
        let f = GridFunction::new(d, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(argmax_set(&f, 0.0).unwrap().cluster_count(), 3);
    }

    #[test]
    fn witness_examples() {
        let d = line(101);
        let peak = func(&d, |x| x * (1.0 - x));
        let w = full_differentiability_witness(FunctionalKind::SupNorm, &peak, 1e-12)
            .unwrap()
            .unwrap();
        assert_eq!(d.axis(0)[w.plus.unwrap().node], 0.5);
        assert_eq!(w.sign, 1.0);

        let neg = peak.map(|v| -v);
        let w = full_differentiability_witness(FunctionalKind::SupNorm, &neg, 1e-12)
            .unwrap()
            .unwrap();
        assert_eq!(w.sign, -1.0);

        let bi = func(&d, bimodal);
        assert!(full_differentiability_witness(FunctionalKind::Sup, &bi, 1e-12)
            .unwrap()
            .is_none());

        let w = full_differentiability_witness(FunctionalKind::Amp, &func(&d, |x| x), 0.0)
            .unwrap()
            .unwrap();
        assert_eq!(w.plus.unwrap().node, 100);
        assert_eq!(w.minus.unwrap().node, 0);
    }

    #[test]
    fn cadlag_direction_on_continuous_base_uses_left_limits() {
        let d = line(3);
        let f = func(&d, |x| -(x - 0.5).abs());
        let g = GridFunction::cadlag(Arc::clone(&d), vec![0.0, 1.0, 0.0], vec![0.0, 3.0, 0.0])
            .unwrap();
        let v = directional_derivative(FunctionalKind::Sup, &f, &g, 0.0).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn sup_norm_sign_follows_channel() {
        // f jumps from +1 (left limit) to -1 (value) at the middle node.
        let d = line(3);
        let f =
            GridFunction::cadlag(Arc::clone(&d), vec![0.5, -1.0, 0.5], vec![0.5, 1.0, 0.5]).unwrap();
        let g = GridFunction::new(Arc::clone(&d), vec![0.0, 2.0, 0.0]).unwrap();
        // both channels attain |f| = 1: max(2 * (+1), 2 * (-1)) = 2
        let v = directional_derivative(FunctionalKind::SupNorm, &f, &g, 0.0).unwrap();
        assert_eq!(v, 2.0);
        let q = difference_quotient(FunctionalKind::SupNorm, &f, &g, 1e-6).unwrap();
        assert!((q - v).abs() < 1e-6);
    }

    #[test]
    fn generic_over_f32() {
        let d = Arc::new(GridDomain::<f32>::line(vec![0.0, 0.5, 1.0]).unwrap());
        let f = GridFunction::new(Arc::clone(&d), vec![0.0f32, 1.0, 0.0]).unwrap();
        let g = GridFunction::new(d, vec![5.0f32, -2.0, 5.0]).unwrap();
        assert_eq!(
            directional_derivative(FunctionalKind::Sup, &f, &g, 0.0f32).unwrap(),
            -2.0
        );
    }
}
