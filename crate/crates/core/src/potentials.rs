//! Polynomial confining potentials `V(x) = Σ c_k x^k`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};

/// Which constructor produced a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrapKind {
    Harmonic,
    DoubleWell { a: f64 },
    TripleWell { a: f64 },
    Custom,
}

impl TrapKind {
    pub fn name(&self) -> &'static str {
        match self {
            TrapKind::Harmonic => "harmonic",
            TrapKind::DoubleWell { .. } => "double_well",
            TrapKind::TripleWell { .. } => "triple_well",
            TrapKind::Custom => "custom",
        }
    }

    pub fn shape_parameter(&self) -> Option<f64> {
        match *self {
            TrapKind::DoubleWell { a } | TrapKind::TripleWell { a } => Some(a),
            _ => None,
        }
    }
}

/// Confining polynomial potential. The leading coefficient has even degree
/// and is positive, so `V(x) → +∞` as `|x| → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    coefficients: Vec<f64>,
    kind: TrapKind,
}

impl PotentialSpec {
    /// `V(x) = x²/2`
    pub fn harmonic() -> Self {
        PotentialSpec { coefficients: vec![0.0, 0.0, 0.5], kind: TrapKind::Harmonic }
    }

    /// `V(x) = (2/(27a))(1 − a x²)²`, minima at `±1/√a`, barrier `2/(27a)`.
    pub fn double_well(a: f64) -> Result<Self> {
        check_shape(a)?;
        let coefficients = vec![2.0 / (27.0 * a), 0.0, -4.0 / 27.0, 0.0, 2.0 * a / 27.0];
        Ok(PotentialSpec { coefficients, kind: TrapKind::DoubleWell { a } })
    }

    /// `V(x) = x²/2 − a x⁴ + a² x⁶ / 2`, three equal minima at `0, ±1/√a`.
    pub fn triple_well(a: f64) -> Result<Self> {
        check_shape(a)?;
        let coefficients = vec![0.0, 0.0, 0.5, 0.0, -a, 0.0, 0.5 * a * a];
        Ok(PotentialSpec { coefficients, kind: TrapKind::TripleWell { a } })
    }

    /// Arbitrary polynomial; trailing zeros are trimmed.
    pub fn from_coefficients(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("potential coefficients must be finite".into()));
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        let degree = coefficients.len().checked_sub(1).ok_or_else(|| {
            Error::InvalidParameter("potential needs at least one nonzero coefficient".into())
        })?;
        if degree == 0 || degree % 2 != 0 || coefficients[degree] <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "potential is not confining: leading degree {degree} must be even and positive with c_p > 0"
            )));
        }
        Ok(PotentialSpec { coefficients, kind: TrapKind::Custom })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn kind(&self) -> TrapKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// No odd powers: `V(x) = V(−x)`.
    pub fn is_even(&self) -> bool {
        self.coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    /// Local minima of `V`, ascending in `x`.
    pub fn minima(&self) -> Vec<f64> {
        self.stationary_points().into_iter().filter(|&(_, is_min)| is_min).map(|(x, _)| x).collect()
    }

    /// Real stationary points with a flag telling minima from maxima.
    pub fn stationary_points(&self) -> Vec<(f64, bool)> {
        let p = self.degree();
        let lead = p as f64 * self.coefficients[p];
        // Cauchy bound on the roots of V'
        let bound = 1.0
            + (1..p)
                .map(|k| (k as f64 * self.coefficients[k]).abs() / lead)
                .fold(0.0, f64::max);
        let n = 8001;
        let step = 2.0 * bound / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| if i == n / 2 { 0.0 } else { -bound + i as f64 * step }).collect();
        let fs: Vec<f64> = xs.iter().map(|&x| self.derivative(x)).collect();
        let mut out = Vec::new();
        for i in 0..n - 1 {
            if fs[i] == 0.0 {
                if i > 0 && fs[i - 1] * fs[i + 1] < 0.0 {
                    out.push((xs[i], fs[i - 1] < 0.0));
                }
                continue;
            }
            if fs[i] * fs[i + 1] < 0.0 {
                let (mut lo, mut hi) = (xs[i], xs[i + 1]);
                let rising = fs[i] < 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = self.derivative(mid);
                    if (fm < 0.0) == rising {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push((0.5 * (lo + hi), rising));
            }
        }
        out
    }

    /// Largest `|x|` over the local minima (0 for a single central well).
    pub fn outermost_minimum(&self) -> f64 {
        self.minima().iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

fn check_shape(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("shape parameter a must be positive, got {a}")))
    }
}
