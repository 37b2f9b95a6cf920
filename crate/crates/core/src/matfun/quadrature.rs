//! Quadrature rules on the unit interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the rule's unit-interval variable stands for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureDomain {
    /// Plain integration over `[0, 1]`.
    #[default]
    UnitInterval,
    /// `t ∈ (0, 1)` parametrises `λ = t / (1 - t) ∈ (0, ∞)`.
    SemiInfinite,
}

fn is_unit(d: &QuadratureDomain) -> bool {
    *d == QuadratureDomain::UnitInterval
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_unit")]
    pub domain: QuadratureDomain,
    /// Highest polynomial degree integrated exactly, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton's
/// method on the three-term recurrence.
pub fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let rule = QuadratureRule {
            nodes,
            weights,
            domain: QuadratureDomain::UnitInterval,
            degree: None,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes.len() != self.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "quadrature rule needs matching non-empty nodes/weights ({} vs {})",
                self.nodes.len(),
                self.weights.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidArgument(format!("non-positive quadrature weight {w}")));
        }
        if let Some(t) = self.nodes.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::InvalidArgument(format!("quadrature node {t} outside (0, 1)")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `n`-point Gauss–Legendre rule on `[0, 1]`.
    pub fn gauss_legendre(n: usize) -> Self {
        Self::composite(&[0.0, 1.0], &[n])
    }

    /// Composite Gauss–Legendre rule on the panels `[b_k, b_{k+1}]`, with
    /// `points[k]` nodes on panel `k`.
    pub fn composite(breakpoints: &[f64], points: &[usize]) -> Self {
        assert_eq!(breakpoints.len(), points.len() + 1);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (k, &p) in points.iter().enumerate() {
            let (a, b) = (breakpoints[k], breakpoints[k + 1]);
            let (x, w) = gauss_legendre_reference(p);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * (b - a) * (xi + 1.0));
                weights.push(0.5 * (b - a) * wi);
            }
        }
        let degree = points.iter().map(|&p| 2 * p - 1).min();
        QuadratureRule {
            nodes,
            weights,
            domain: QuadratureDomain::UnitInterval,
            degree,
        }
    }

    /// Composite rule graded geometrically toward both endpoints: on
    /// `[0, 1/2]` the breakpoints are `0, ratio^levels/2, ..., ratio/2, 1/2`
    /// with node counts rising linearly from `inner` to `outer`, and the
    /// layout is mirrored on `[1/2, 1]`.
    pub fn graded(levels: usize, ratio: f64, inner: usize, outer: usize) -> Self {
        let mut half = vec![0.0];
        for k in (1..=levels).rev() {
            half.push(0.5 * ratio.powi(k as i32));
        }
        half.push(0.5);
        let panels = half.len() - 1;
        let counts: Vec<usize> = (0..panels)
            .map(|i| inner + (outer - inner) * i / (panels - 1).max(1))
            .collect();
        let mut breakpoints = half.clone();
        breakpoints.extend(half.iter().rev().skip(1).map(|b| 1.0 - b));
        let mut points = counts.clone();
        points.extend(counts.iter().rev());
        Self::composite(&breakpoints, &points)
    }

    /// Default rule for the fractional-power integral after the
    /// substitution `λ = t/(1-t)`: 200 nodes, twelve geometric levels per
    /// endpoint with ratio 0.1.
    pub fn balakrishnan_default() -> Self {
        let mut r = Self::graded(12, 0.1, 4, 12);
        r.domain = QuadratureDomain::SemiInfinite;
        r
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}
