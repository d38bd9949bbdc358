//! Distribution and copula families with closed-form cdfs, plus seeded
//! generators for them.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta as BetaDist, ContinuousCDF, Normal as NormalDist};

use crate::empirical::Sample;
use crate::error::{Error, Result};

/// Univariate distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Univariate {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    Beta { a: f64, b: f64 },
    /// `F(x) = x^theta` on `[0, 1]`.
    Power { theta: f64 },
    /// Finitely many atoms.
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
    /// Continuous cdf interpolated linearly between knots `(x[k], p[k])`,
    /// with `p` rising from 0 to 1.
    Table { x: Vec<f64>, p: Vec<f64> },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Univariate {
    pub fn standard_normal() -> Self {
        Univariate::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn unit_uniform() -> Self {
        Univariate::Uniform { lo: 0.0, hi: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Univariate::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::invalid("uniform needs finite lo < hi"));
                }
            }
            Univariate::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::invalid("normal mean must be finite"));
                }
                positive("normal sd", *sd)?;
            }
            Univariate::Beta { a, b } => {
                positive("beta a", *a)?;
                positive("beta b", *b)?;
            }
            Univariate::Power { theta } => positive("power theta", *theta)?,
            Univariate::Discrete { atoms, probs } => {
                if atoms.is_empty() || atoms.len() != probs.len() {
                    return Err(Error::invalid("discrete law needs matching atoms/probs"));
                }
                if atoms.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid("discrete atoms must be strictly increasing"));
                }
                if probs.iter().any(|&p| !(p > 0.0)) {
                    return Err(Error::invalid("discrete probabilities must be positive"));
                }
                if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid("discrete probabilities must sum to 1"));
                }
            }
            Univariate::Table { x, p } => {
                if x.len() < 2 || x.len() != p.len() {
                    return Err(Error::invalid("cdf table needs >= 2 matching knots"));
                }
                if x.windows(2).any(|w| w[0] >= w[1]) || p.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::invalid("cdf table must be increasing"));
                }
                if p[0] != 0.0 || p[p.len() - 1] != 1.0 {
                    return Err(Error::invalid("cdf table must run from 0 to 1"));
                }
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match self {
            Univariate::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Univariate::Normal { mean, sd } => normal(*mean, *sd).cdf(x),
            Univariate::Beta { a, b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta(*a, *b).cdf(x)
                }
            }
            Univariate::Power { theta } => x.clamp(0.0, 1.0).powf(*theta),
            Univariate::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .take_while(|(a, _)| **a <= x)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
            Univariate::Table { x: xs, p } => interpolate(xs, p, x),
        }
    }

    /// `F(x-)`; differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self {
            Univariate::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .take_while(|(a, _)| **a < x)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
            _ => self.cdf(x),
        }
    }

    /// Jump points of the cdf.
    pub fn atoms(&self) -> &[f64] {
        match self {
            Univariate::Discrete { atoms, .. } => atoms,
            _ => &[],
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.atoms().is_empty()
    }

    /// Generalized inverse `inf { x : F(x) >= p }`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            Univariate::Uniform { lo, hi } => lo + p * (hi - lo),
            Univariate::Normal { mean, sd } => normal(*mean, *sd).inverse_cdf(p),
            Univariate::Beta { a, b } => beta(*a, *b).inverse_cdf(p),
            Univariate::Power { theta } => p.powf(1.0 / theta),
            Univariate::Discrete { atoms, probs } => {
                let mut acc = 0.0;
                for (a, q) in atoms.iter().zip(probs) {
                    acc += q;
                    if acc >= p - 1e-15 {
                        return *a;
                    }
                }
                atoms[atoms.len() - 1]
            }
            Univariate::Table { x, p: ps } => {
                let k = ps.partition_point(|&q| q < p);
                if k == 0 {
                    return x[0];
                }
                if k >= ps.len() {
                    return x[x.len() - 1];
                }
                let (p0, p1) = (ps[k - 1], ps[k]);
                x[k - 1] + (x[k] - x[k - 1]) * (p - p0) / (p1 - p0)
            }
        }
    }

    /// `n` independent draws.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        match self {
            Univariate::Normal { mean, sd } => (0..n)
                .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            Univariate::Beta { a, b } => {
                let dist = rand_distr::Beta::new(*a, *b).expect("validated beta parameters");
                (0..n).map(|_| dist.sample(rng)).collect()
            }
            _ => (0..n).map(|_| self.quantile(rng.random::<f64>())).collect(),
        }
    }

    /// `integral_a^b F(x) dx` (finite `a <= b`).
    pub fn integral_cdf(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        match self {
            Univariate::Uniform { lo, hi } => {
                let anti = |x: f64| {
                    if x <= *lo {
                        0.0
                    } else if x < *hi {
                        (x - lo).powi(2) / (2.0 * (hi - lo))
                    } else {
                        (hi - lo) / 2.0 + (x - hi)
                    }
                };
                anti(b) - anti(a)
            }
            Univariate::Normal { mean, sd } => {
                let anti = |x: f64| {
                    let z = (x - mean) / sd;
                    let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                    (x - mean) * normal(*mean, *sd).cdf(x) + sd * phi
                };
                anti(b) - anti(a)
            }
            Univariate::Power { theta } => {
                let anti = |x: f64| {
                    if x <= 0.0 {
                        0.0
                    } else if x < 1.0 {
                        x.powf(theta + 1.0) / (theta + 1.0)
                    } else {
                        1.0 / (theta + 1.0) + (x - 1.0)
                    }
                };
                anti(b) - anti(a)
            }
            Univariate::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .map(|(&x, p)| p * (b - x.max(a)).max(0.0))
                .sum(),
            Univariate::Table { x, p } => {
                let mut knots: Vec<f64> = x.iter().copied().filter(|&k| k > a && k < b).collect();
                knots.insert(0, a);
                knots.push(b);
                knots
                    .windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (interpolate(x, p, w[0]) + interpolate(x, p, w[1])))
                    .sum()
            }
            Univariate::Beta { .. } => simpson(|x| self.cdf(x), a, b, 4000),
        }
    }
}

fn normal(mean: f64, sd: f64) -> NormalDist {
    NormalDist::new(mean, sd).expect("validated normal parameters")
}

fn beta(a: f64, b: f64) -> BetaDist {
    BetaDist::new(a, b).expect("validated beta parameters")
}

fn interpolate(xs: &[f64], ps: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return 0.0;
    }
    if x >= xs[xs.len() - 1] {
        return 1.0;
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[k - 1], xs[k]);
    ps[k - 1] + (ps[k] - ps[k - 1]) * (x - x0) / (x1 - x0)
}

pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m)
        .map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn default_dim() -> usize {
    2
}

/// Copula families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Copula {
    Independence {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Clayton family with `theta > 0`.
    Clayton {
        theta: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Upper Frechet bound `min(u)`.
    Comonotone {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Lower Frechet bound `max(u + v - 1, 0)` (bivariate only).
    Countermonotone,
}

impl Copula {
    pub fn dim(&self) -> usize {
        match self {
            Copula::Independence { dim } | Copula::Clayton { dim, .. } | Copula::Comonotone { dim } => {
                *dim
            }
            Copula::Countermonotone => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::invalid("copulas need dimension >= 2"));
        }
        if let Copula::Clayton { theta, .. } = self {
            positive("clayton theta", *theta)?;
        }
        Ok(())
    }

    pub fn cdf(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim());
        if u.iter().any(|&x| x <= 0.0) {
            return 0.0;
        }
        let u: Vec<f64> = u.iter().map(|x| x.min(1.0)).collect();
        match self {
            Copula::Independence { .. } => u.iter().product(),
            Copula::Comonotone { .. } => u.iter().copied().fold(1.0, f64::min),
            Copula::Countermonotone => (u[0] + u[1] - 1.0).max(0.0),
            Copula::Clayton { theta, dim } => {
                let s: f64 = u.iter().map(|x| x.powf(-theta)).sum::<f64>() - (*dim as f64 - 1.0);
                s.powf(-1.0 / theta).clamp(0.0, 1.0)
            }
        }
    }

    /// Bivariate survival copula `u + v - 1 + C(1-u, 1-v)`.
    pub fn survival_cdf(&self, u: f64, v: f64) -> f64 {
        u + v - 1.0 + self.cdf(&[1.0 - u, 1.0 - v])
    }

    /// `n` draws with uniform margins.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Sample {
        let d = self.dim();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            match self {
                Copula::Independence { .. } => data.extend((0..d).map(|_| rng.random::<f64>())),
                Copula::Comonotone { .. } => {
                    let u: f64 = rng.random();
                    data.extend(std::iter::repeat_n(u, d));
                }
                Copula::Countermonotone => {
                    let u: f64 = rng.random();
                    data.extend([u, 1.0 - u]);
                }
                Copula::Clayton { theta, .. } => {
                    // Marshall-Olkin: frailty V ~ Gamma(1/theta), U_i = (1 + E_i / V)^(-1/theta)
                    let frailty = Gamma::new(1.0 / theta, 1.0)
                        .expect("validated clayton theta")
                        .sample(rng);
                    data.extend((0..d).map(|_| {
                        let e: f64 = rng.sample(Exp1);
                        (1.0 + e / frailty).powf(-1.0 / theta)
                    }));
                }
            }
        }
        Sample::from_flat(data, d).expect("copula draws are finite")
    }
}

/// Joint distribution assembled from a copula and univariate margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub copula: Copula,
    pub margins: Vec<Univariate>,
}

impl Joint {
    pub fn validate(&self) -> Result<()> {
        self.copula.validate()?;
        if self.margins.len() != self.copula.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.copula.dim(),
                got: self.margins.len(),
            });
        }
        self.margins.iter().try_for_each(Univariate::validate)
    }

    pub fn cdf(&self, x: &[f64]) -> f64 {
        let u: Vec<f64> = x.iter().zip(&self.margins).map(|(&xi, m)| m.cdf(xi)).collect();
        self.copula.cdf(&u)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Sample {
        let u = self.copula.draw(rng, n);
        let d = self.margins.len();
        let data = (0..n)
            .flat_map(|i| {
                let row = u.row(i).to_vec();
                self.margins
                    .iter()
                    .zip(row)
                    .map(|(m, ui)| m.quantile(ui))
                    .collect::<Vec<_>>()
            })
            .collect();
        Sample::from_flat(data, d).expect("joint draws are finite")
    }
}

/// Any cumulative distribution function the library can evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CdfSpec {
    Univariate(Univariate),
    Copula(Copula),
    Joint(Joint),
}

impl CdfSpec {
    pub fn dim(&self) -> usize {
        match self {
            CdfSpec::Univariate(_) => 1,
            CdfSpec::Copula(c) => c.dim(),
            CdfSpec::Joint(j) => j.margins.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CdfSpec::Univariate(u) => u.validate(),
            CdfSpec::Copula(c) => c.validate(),
            CdfSpec::Joint(j) => j.validate(),
        }
    }

    pub fn cdf(&self, x: &[f64]) -> f64 {
        match self {
            CdfSpec::Univariate(u) => u.cdf(x[0]),
            CdfSpec::Copula(c) => c.cdf(x),
            CdfSpec::Joint(j) => j.cdf(x),
        }
    }

    /// Left limit along the line (`d = 1`); equals [`cdf`](Self::cdf)
    /// otherwise.
    pub fn cdf_left(&self, x: &[f64]) -> f64 {
        match self {
            CdfSpec::Univariate(u) => u.cdf_left(x[0]),
            _ => self.cdf(x),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Sample {
        match self {
            CdfSpec::Univariate(u) => Sample::univariate(u.draw(rng, n)).expect("finite draws"),
            CdfSpec::Copula(c) => c.draw(rng, n),
            CdfSpec::Joint(j) => j.draw(rng, n),
        }
    }
}

impl From<Univariate> for CdfSpec {
    fn from(u: Univariate) -> Self {
        CdfSpec::Univariate(u)
    }
}

impl From<Copula> for CdfSpec {
    fn from(c: Copula) -> Self {
        CdfSpec::Copula(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;

    #[test]
    fn closed_form_cdfs() {
        let n = Univariate::standard_normal();
        assert!((n.cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((n.cdf(0.25) - 0.598_706_325_683_017_2).abs() < 1e-12);
        assert_eq!(n.cdf(f64::NEG_INFINITY), 0.0);
        let p = Univariate::Power { theta: 2.0 };
        assert_eq!(p.cdf(0.5), 0.25);
        assert_eq!(p.quantile(0.25), 0.5);
        let d = Univariate::Discrete {
            atoms: vec![0.0, 1.0],
            probs: vec![0.3, 0.7],
        };
        assert_eq!(d.cdf(0.0), 0.3);
        assert_eq!(d.cdf_left(0.0), 0.0);
        assert_eq!(d.quantile(0.3), 0.0);
        assert_eq!(d.quantile(0.31), 1.0);
    }

    #[test]
    fn integral_cdf_matches_simpson() {
        let cases = [
            Univariate::unit_uniform(),
            Univariate::Normal { mean: 0.5, sd: 2.0 },
            Univariate::Power { theta: 3.0 },
            Univariate::Table {
                x: vec![0.0, 0.3, 1.0],
                p: vec![0.0, 0.8, 1.0],
            },
        ];
        for u in cases {
            let exact = u.integral_cdf(-0.2, 1.4);
            let num = simpson(|x| u.cdf(x), -0.2, 1.4, 200_000);
            assert!((exact - num).abs() < 1e-8, "{u:?}: {exact} vs {num}");
        }
    }

    #[test]
    fn copula_margins_are_uniform() {
        for c in [
            Copula::Independence { dim: 2 },
            Copula::Clayton { theta: 1.0, dim: 2 },
            Copula::Comonotone { dim: 2 },
            Copula::Countermonotone,
        ] {
            for u in [0.1, 0.5, 0.93] {
                assert!((c.cdf(&[u, 1.0]) - u).abs() < 1e-12);
                assert!((c.cdf(&[1.0, u]) - u).abs() < 1e-12);
                assert!((c.survival_cdf(1.0, u) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clayton_draws_match_cdf() {
        let c = Copula::Clayton { theta: 1.0, dim: 2 };
        let mut rng = replicate_rng(11, 0, 0);
        let s = c.draw(&mut rng, 200_000);
        let hits = (0..s.n())
            .filter(|&i| s.row(i)[0] <= 0.3 && s.row(i)[1] <= 0.6)
            .count() as f64
            / s.n() as f64;
        assert!((hits - c.cdf(&[0.3, 0.6])).abs() < 0.005);
    }

    #[test]
    fn cdf_spec_parses_both_kinds() {
        let u: CdfSpec = serde_json::from_str(r#"{"family":"normal","mean":0.5,"sd":1}"#).unwrap();
        assert_eq!(u.dim(), 1);
        let c: CdfSpec = serde_json::from_str(r#"{"family":"clayton","theta":1}"#).unwrap();
        assert_eq!(c.dim(), 2);
    }
}
