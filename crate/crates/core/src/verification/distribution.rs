use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::kl::UnitValue;

/// Per-trial random stream.
pub type TrialRng = ChaCha8Rng;

/// Stream for trial `trial` of an experiment seeded with `seed`.
///
/// ChaCha8 keyed by `seed` with the trial index as the stream id: the
/// stream depends only on `(seed, trial)`, never on which thread runs the
/// trial or in what order.
pub fn trial_stream(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    Bernoulli { p: f64 },
    Beta { alpha: f64, beta: f64 },
    PointMass { v: f64 },
    Uniform,
    /// `v1` with probability `w`, otherwise `v0`.
    TwoPoint { v0: f64, v1: f64, w: f64 },
}

/// A distribution on `[0, 1]` with its analytic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionKind", into = "DistributionKind")]
pub struct DistributionSpec {
    kind: DistributionKind,
    true_mean: UnitValue,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistributionError {
    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    BadParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("cannot parse distribution spec `{0}`")]
    Syntax(String),
}

fn unit_param(name: &'static str, value: f64) -> Result<f64, DistributionError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(DistributionError::BadParameter {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}

fn shape_param(name: &'static str, value: f64) -> Result<f64, DistributionError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(DistributionError::BadParameter {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind) -> Result<Self, DistributionError> {
        let mean = match kind {
            DistributionKind::Bernoulli { p } => unit_param("p", p)?,
            DistributionKind::Beta { alpha, beta } => {
                let a = shape_param("a", alpha)?;
                let b = shape_param("b", beta)?;
                a / (a + b)
            }
            DistributionKind::PointMass { v } => unit_param("v", v)?,
            DistributionKind::Uniform => 0.5,
            DistributionKind::TwoPoint { v0, v1, w } => {
                let v0 = unit_param("v0", v0)?;
                let v1 = unit_param("v1", v1)?;
                let w = unit_param("w", w)?;
                ((1.0 - w) * v0 + w * v1).clamp(0.0, 1.0)
            }
        };
        Ok(DistributionSpec {
            kind,
            true_mean: UnitValue::new(mean).expect("mean of [0,1] parameters"),
        })
    }

    pub fn bernoulli(p: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::Bernoulli { p })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::Beta { alpha, beta })
    }

    pub fn point_mass(v: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::PointMass { v })
    }

    pub fn uniform() -> Self {
        Self::new(DistributionKind::Uniform).expect("uniform has no parameters")
    }

    pub fn two_point(v0: f64, v1: f64, w: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::TwoPoint { v0, v1, w })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn true_mean(&self) -> UnitValue {
        self.true_mean
    }

    /// Every draw is exactly 0 or 1, so sample sums are exact integers.
    pub fn is_binary(&self) -> bool {
        match self.kind {
            DistributionKind::Bernoulli { .. } => true,
            DistributionKind::TwoPoint { v0, v1, .. } => {
                (v0 == 0.0 || v0 == 1.0) && (v1 == 0.0 || v1 == 1.0)
            }
            DistributionKind::PointMass { v } => v == 0.0 || v == 1.0,
            _ => false,
        }
    }

    pub fn sampler(&self) -> Sampler {
        let inner = match self.kind {
            DistributionKind::Bernoulli { p } => SamplerKind::Bernoulli(p),
            DistributionKind::Beta { alpha, beta } if alpha >= 1.0 && beta >= 1.0 => SamplerKind::GammaRatio(
                Gamma::new(alpha, 1.0).expect("validated shape parameters"),
                Gamma::new(beta, 1.0).expect("validated shape parameters"),
            ),
            DistributionKind::Beta { alpha, beta } => {
                SamplerKind::Beta(Beta::new(alpha, beta).expect("validated shape parameters"))
            }
            DistributionKind::PointMass { v } => SamplerKind::Point(v),
            DistributionKind::Uniform => SamplerKind::Uniform,
            DistributionKind::TwoPoint { v0, v1, w } => SamplerKind::TwoPoint { v0, v1, w },
        };
        Sampler(inner)
    }
}

impl TryFrom<DistributionKind> for DistributionSpec {
    type Error = DistributionError;

    fn try_from(kind: DistributionKind) -> Result<Self, Self::Error> {
        DistributionSpec::new(kind)
    }
}

impl From<DistributionSpec> for DistributionKind {
    fn from(spec: DistributionSpec) -> Self {
        spec.kind
    }
}

/// Renders the command-line grammar, e.g. `beta:a=2,b=5`.
impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DistributionKind::Bernoulli { p } => write!(f, "bernoulli:p={p}"),
            DistributionKind::Beta { alpha, beta } => write!(f, "beta:a={alpha},b={beta}"),
            DistributionKind::PointMass { v } => write!(f, "point:v={v}"),
            DistributionKind::Uniform => f.write_str("uniform"),
            DistributionKind::TwoPoint { v0, v1, w } => write!(f, "twopoint:v0={v0},v1={v1},w={w}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = DistributionError;

    /// Parses `bernoulli:p=0.1`, `beta:a=2,b=5`, `point:v=0.3`, `uniform`
    /// or `twopoint:v0=0,v1=1,w=0.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || DistributionError::Syntax(s.to_string());
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, args),
            None => (s, ""),
        };
        let mut params: Vec<(&str, f64)> = Vec::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(syntax)?;
            let value: f64 = value.trim().parse().map_err(|_| syntax())?;
            params.push((key.trim(), value));
        }
        let take = |want: &[&str]| -> Result<Vec<f64>, DistributionError> {
            if params.len() != want.len() {
                return Err(syntax());
            }
            want.iter()
                .map(|k| {
                    params
                        .iter()
                        .find(|(key, _)| key == k)
                        .map(|(_, v)| *v)
                        .ok_or_else(syntax)
                })
                .collect()
        };
        match name {
            "bernoulli" => {
                let v = take(&["p"])?;
                Self::bernoulli(v[0])
            }
            "beta" => {
                let v = take(&["a", "b"])?;
                Self::beta(v[0], v[1])
            }
            "point" => {
                let v = take(&["v"])?;
                Self::point_mass(v[0])
            }
            "uniform" => {
                take(&[])?;
                Ok(Self::uniform())
            }
            "twopoint" => {
                let v = take(&["v0", "v1", "w"])?;
                Self::two_point(v[0], v[1], v[2])
            }
            _ => Err(syntax()),
        }
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Bernoulli(f64),
    /// `X / (X + Y)` with `X ~ Gamma(alpha)`, `Y ~ Gamma(beta)`.
    GammaRatio(Gamma<f64>, Gamma<f64>),
    Beta(Beta<f64>),
    Point(f64),
    Uniform,
    TwoPoint { v0: f64, v1: f64, w: f64 },
}

/// A [`DistributionSpec`] prepared for repeated draws.
#[derive(Debug, Clone)]
pub struct Sampler(SamplerKind);

impl Sampler {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            SamplerKind::GammaRatio(x, y) => {
                let x = x.sample(rng);
                x / (x + y.sample(rng))
            }
            // Shapes below 1 can underflow a gamma draw to zero; Cheng's
            // algorithms sample those directly.
            SamplerKind::Beta(beta) => beta.sample(rng),
            SamplerKind::Point(v) => *v,
            SamplerKind::Uniform => rng.random::<f64>(),
            SamplerKind::TwoPoint { v0, v1, w } => {
                if rng.random::<f64>() < *w {
                    *v1
                } else {
                    *v0
                }
            }
        }
    }

    /// Sum of `n` draws, accumulated left to right.
    pub fn sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..n {
            total += self.draw(rng);
        }
        total
    }
}

/// `n` i.i.d. draws from `dist`.
pub fn sample<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, stream: &mut R) -> Vec<UnitValue> {
    let sampler = dist.sampler();
    (0..n)
        .map(|_| UnitValue::new(sampler.draw(stream)).expect("sampler support is [0, 1]"))
        .collect()
}
