use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::Univariate;
use crate::empirical::Sample;
use crate::error::Result;
use crate::functionals::{difference_quotient, directional_derivative, FunctionalKind};
use crate::grid::{GridDomain, GridFunction};
use crate::limits::{simulate_limit, LimitSpec, DEFAULT_TIE_TOLERANCE};
use crate::rng::{replicate_rng, streams};
use crate::samplers::{bridge_sampler, finite_class_sampler};
use crate::statistics::{
    mmd_finite, two_sample_extremes, ClassMember, FiniteFunctionClass,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

/// Piecewise-linear function on `domain` (a line) with knots every `stride`
/// nodes and knot values drawn from `{-2, ..., 2} / 4`. Equal neighbouring
/// knots give exactly flat stretches, hence tied extrema.
pub fn random_piecewise_linear<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &Arc<GridDomain>,
    stride: usize,
) -> Result<GridFunction> {
    let n = domain.len();
    let stride = stride.max(1);
    let knots: Vec<f64> = (0..=n.div_ceil(stride))
        .map(|_| rng.random_range(-2i32..=2) as f64 / 4.0)
        .collect();
    let values = (0..n)
        .map(|i| {
            let (k, r) = (i / stride, i % stride);
            if r == 0 {
                knots[k]
            } else {
                let w = r as f64 / stride as f64;
                knots[k] + w * (knots[k + 1] - knots[k])
            }
        })
        .collect();
    GridFunction::new(Arc::clone(domain), values)
}

fn derivative_oracle(seed: u64) -> Result<(bool, String)> {
    let domain = Arc::new(GridDomain::line((0..61).map(|i| i as f64 / 60.0).collect())?);
    let mut rng = replicate_rng(seed, streams::SELFTEST, 0);
    let t = 1e-7;
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 200 {
        let f = random_piecewise_linear(&mut rng, &domain, 6)?;
        if f.is_zero() {
            continue;
        }
        let values = (0..domain.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = GridFunction::new(Arc::clone(&domain), values)?;
        for kind in [
            FunctionalKind::SupNorm,
            FunctionalKind::Sup,
            FunctionalKind::Inf,
            FunctionalKind::Amp,
        ] {
            let d = directional_derivative(kind, &f, &g, DEFAULT_TIE_TOLERANCE)?;
            let q = difference_quotient(kind, &f, &g, t)?;
            worst = worst.max((d - q).abs());
        }
        cases += 1;
    }
    Ok((worst < 1e-6, format!("max |derivative - quotient| = {worst:.2e} over {cases} pairs")))
}

fn non_linearity() -> Result<(bool, String)> {
    let domain = Arc::new(GridDomain::finite_class(3)?);
    let f = GridFunction::new(Arc::clone(&domain), vec![1.0, 0.0, 1.0])?;
    let g = GridFunction::new(Arc::clone(&domain), vec![1.0, 0.0, -1.0])?;
    let up = directional_derivative(FunctionalKind::Sup, &f, &g, DEFAULT_TIE_TOLERANCE)?;
    let down = directional_derivative(FunctionalKind::Sup, &f, &g.map(|x| -x), DEFAULT_TIE_TOLERANCE)?;
    Ok((
        up + down > 0.5,
        format!("sup' at a tied maximum: g -> {up}, -g -> {down}"),
    ))
}

fn bridge_covariance(seed: u64) -> Result<(bool, String)> {
    let domain = Arc::new(GridDomain::line(vec![0.25, 0.5, 0.75])?);
    let sampler = bridge_sampler(&Univariate::unit_uniform().into(), &domain)?
        .with_seed(seed, streams::SELFTEST);
    let paths = 20_000;
    let mut acc = Array2::<f64>::zeros((3, 3));
    for r in 0..paths {
        let p = sampler.sample_path(r);
        let v = p.values();
        for i in 0..3 {
            for j in 0..3 {
                acc[[i, j]] += v[i] * v[j];
            }
        }
    }
    acc /= paths as f64;
    let xs = [0.25f64, 0.5, 0.75];
    let exact = |i: usize, j: usize| xs[i].min(xs[j]) - xs[i] * xs[j];
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let se = ((exact(i, i) * exact(j, j) + exact(i, j).powi(2)) / paths as f64).sqrt();
            worst = worst.max((acc[[i, j]] - exact(i, j)).abs() / se);
        }
    }
    Ok((worst < 5.0, format!("max standardized covariance error = {worst:.2}")))
}

fn determinism(seed: u64) -> Result<(bool, String)> {
    let domain = Arc::new(GridDomain::compactified_line(101)?);
    let f = Univariate::standard_normal();
    let g = Univariate::Normal { mean: 0.5, sd: 1.0 };
    let q = GridFunction::from_fn(Arc::clone(&domain), |x| f.cdf(x[0]) - g.cdf(x[0]))?;
    let sampler = bridge_sampler(&f.clone().into(), &domain)?.with_seed(seed, streams::SELFTEST);
    let spec = LimitSpec::new(FunctionalKind::SupNorm, q, sampler, DEFAULT_TIE_TOLERANCE);
    let a = simulate_limit(&spec, 500, 1)?.values;
    let b = simulate_limit(&spec, 500, 4)?.values;
    let c = simulate_limit(&spec, 500, 3)?.values;
    Ok((a == b && b == c, "1, 3 and 4 workers give bitwise identical replicates".into()))
}

fn mmd_matches_ks(seed: u64) -> Result<(bool, String)> {
    let mut rng = replicate_rng(seed, streams::SELFTEST, 1);
    let x = Univariate::standard_normal().draw(&mut rng, 40);
    let y = Univariate::Normal { mean: 0.3, sd: 1.5 }.draw(&mut rng, 55);
    let class = FiniteFunctionClass {
        members: x
            .iter()
            .chain(&y)
            .map(|&t| ClassMember::Indicator { t })
            .collect(),
        symmetric: true,
    };
    let (sx, sy) = (Sample::univariate(x)?, Sample::univariate(y)?);
    let mmd = mmd_finite(&class.evaluate(&sx)?, &class.evaluate(&sy)?, true)?.value;
    let ks = two_sample_extremes(&sx, &sy)?.functional(FunctionalKind::SupNorm)?;
    Ok((
        (mmd - ks).abs() < 1e-12,
        format!("indicator-class discrepancy {mmd:.6} vs two-sample KS {ks:.6}"),
    ))
}

fn tied_argmax_mean(seed: u64) -> Result<(bool, String)> {
    let domain = Arc::new(GridDomain::finite_class(2)?);
    let q = GridFunction::new(domain, vec![1.0, 1.0])?;
    let sampler = finite_class_sampler(Array2::eye(2))?.with_seed(seed, streams::SELFTEST);
    let spec = LimitSpec::new(FunctionalKind::Sup, q, sampler, DEFAULT_TIE_TOLERANCE);
    let paths = 40_000;
    let v = simulate_limit(&spec, paths, 1)?.values;
    let mean = v.iter().sum::<f64>() / paths as f64;
    let target = 1.0 / std::f64::consts::PI.sqrt();
    let se = ((1.0 - 1.0 / std::f64::consts::PI) / paths as f64).sqrt();
    Ok((
        (mean - target).abs() < 4.0 * se,
        format!("E max(Z1, Z2): {mean:.4} vs {target:.4} (se {se:.4})"),
    ))
}

/// Internal consistency checks of the derivative, the samplers and the
/// statistics. Deterministic given `seed`.
pub fn selftest(seed: u64) -> Vec<Check> {
    vec![
        Check::from_result("derivative-vs-difference-quotient", derivative_oracle(seed)),
        Check::from_result("non-linear-at-ties", non_linearity()),
        Check::from_result("bridge-covariance", bridge_covariance(seed)),
        Check::from_result("worker-count-determinism", determinism(seed)),
        Check::from_result("indicator-class-equals-ks2", mmd_matches_ks(seed)),
        Check::from_result("tied-argmax-mean", tied_argmax_mean(seed)),
    ]
}
