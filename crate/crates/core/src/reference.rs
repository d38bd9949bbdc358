//! Reference constants `phi(q)` and other oracle values, each recorded with
//! how it was obtained.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::distributions::{Copula, Univariate};
use crate::error::{Error, Result};
use crate::functionals::FunctionalKind;
use crate::statistics::{kl, Extremes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    DenseGrid,
    PlugIn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<Vec<f64>>,
}

impl Reference {
    fn new(name: &str, value: f64, provenance: Provenance) -> Self {
        Reference {
            name: name.to_string(),
            value,
            provenance,
            argmax: None,
        }
    }
}

/// Names accepted by [`named`].
pub const NAMES: &[&str] = &[
    "ks-normal-shift",
    "ks-normal-shift-variance",
    "two-sample-normal-shift-variance",
    "clayton1-radial-gap",
    "bj-uniform-square",
    "bj-uniform-square-sd",
    "bj-null-median",
    "e-max-two-normals",
    "half-log-4pi",
];

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Maximizes `h` on `[lo, hi]`: scan of `nodes` equispaced points, then
/// golden-section refinement in the two cells around the best node.
pub fn dense_maximize(h: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> (f64, f64) {
    let step = (hi - lo) / (nodes - 1) as f64;
    let (mut best_x, mut best) = (lo, h(lo));
    for k in 1..nodes {
        let x = lo + k as f64 * step;
        let v = h(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = ((best_x - step).max(lo), (best_x + step).min(hi));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d);
        }
        if b - a < 1e-15 * (1.0 + best_x.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let v = h(x);
    if v > best {
        (x, v)
    } else {
        (best_x, best)
    }
}

fn support(f: &Univariate, g: &Univariate) -> (f64, f64) {
    let lo = f.quantile(1e-12).min(g.quantile(1e-12));
    let hi = f.quantile(1.0 - 1e-12).max(g.quantile(1.0 - 1e-12));
    (lo, hi)
}

/// `phi(F - G)` on the line by dense maximization (both channels at atoms).
pub fn ks_reference(f: &Univariate, g: &Univariate, kind: FunctionalKind) -> Result<f64> {
    let (lo, hi) = support(f, g);
    let diff = |x: f64| f.cdf(x) - g.cdf(x);
    let mut ext = Extremes { sup: 0.0, inf: 0.0 };
    let (_, sup) = dense_maximize(diff, lo, hi, 100_001);
    let (_, neg_inf) = dense_maximize(|x| -diff(x), lo, hi, 100_001);
    ext.sup = ext.sup.max(sup);
    ext.inf = ext.inf.min(-neg_inf);
    for &a in f.atoms().iter().chain(g.atoms()) {
        for v in [diff(a), f.cdf_left(a) - g.cdf_left(a)] {
            ext.sup = ext.sup.max(v);
            ext.inf = ext.inf.min(v);
        }
    }
    ext.functional(kind)
}

/// `sup_x K(F(x), G(x))` and its maximizer.
pub fn bj_reference(f: &Univariate, g: &Univariate) -> (f64, f64) {
    let (lo, hi) = support(f, g);
    let (x, v) = dense_maximize(|x| kl(f.cdf(x), g.cdf(x)), lo, hi, 100_001);
    (v, x)
}

/// `max |C - C̄|` over the `nodes x nodes` grid `{k / (nodes - 1)}^2`.
pub fn radial_gap(c: &Copula, nodes: usize) -> f64 {
    let last = (nodes - 1) as f64;
    let mut best = 0.0f64;
    for i in 0..nodes {
        for j in 0..nodes {
            let (u, v) = (i as f64 / last, j as f64 / last);
            best = best.max((c.cdf(&[u, v]) - c.survival_cdf(u, v)).abs());
        }
    }
    best
}

/// Limit standard deviation `sqrt(F(1 - F)) |w|` at a point.
pub fn weighted_bridge_sd(fx: f64, gx: f64) -> f64 {
    (fx * (1.0 - fx)).sqrt() * crate::samplers::log_weight(fx, gx).abs()
}

/// Named oracle constant.
pub fn named(name: &str) -> Result<Reference> {
    let phi = std_normal();
    let p = phi.cdf(0.25);
    let value = match name {
        "ks-normal-shift" => Reference::new(name, 2.0 * p - 1.0, Provenance::Analytic),
        "ks-normal-shift-variance" => Reference::new(name, p * (1.0 - p), Provenance::Analytic),
        "two-sample-normal-shift-variance" => {
            let q = phi.cdf(-0.25);
            Reference::new(
                name,
                0.5 * p * (1.0 - p) + 0.5 * q * (1.0 - q),
                Provenance::Analytic,
            )
        }
        "clayton1-radial-gap" => Reference::new(
            name,
            radial_gap(&Copula::Clayton { theta: 1.0, dim: 2 }, 400),
            Provenance::DenseGrid,
        ),
        "bj-uniform-square" | "bj-uniform-square-sd" => {
            let (v, x) = bj_reference(&Univariate::unit_uniform(), &Univariate::Power { theta: 2.0 });
            let value = if name == "bj-uniform-square" {
                v
            } else {
                weighted_bridge_sd(x, x * x)
            };
            Reference {
                argmax: Some(vec![x]),
                ..Reference::new(name, value, Provenance::DenseGrid)
            }
        }
        "bj-null-median" => Reference::new(name, (4.0 / 2f64.ln()).ln(), Provenance::Analytic),
        "e-max-two-normals" => {
            Reference::new(name, 1.0 / std::f64::consts::PI.sqrt(), Provenance::Analytic)
        }
        "half-log-4pi" => Reference::new(
            name,
            0.5 * (4.0 * std::f64::consts::PI).ln(),
            Provenance::Analytic,
        ),
        _ => {
            return Err(Error::oracle(
                name,
                format!("unknown constant; known: {}", NAMES.join(", ")),
            ))
        }
    };
    if !value.value.is_finite() {
        return Err(Error::oracle(name, "evaluated to a non-finite value"));
    }
    Ok(value)
}
