//! The flat torus `[0, n)^d` with the wrapped Euclidean metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model symbol table: dimension, torus side, kernel exponent and clique size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: usize,
    pub side: f64,
    pub alpha: f64,
    pub k: usize,
}

impl ModelParams {
    pub fn new(dim: usize, side: f64, alpha: f64, k: usize) -> Result<Self> {
        let params = ModelParams {
            dim,
            side,
            alpha,
            k,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::InvalidParams(format!(
                "torus side must be positive and finite, got {}",
                self.side
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > self.dim as f64) {
            return Err(Error::InvalidParams(format!(
                "alpha must exceed the dimension ({}), got {}",
                self.dim, self.alpha
            )));
        }
        if self.k < 3 {
            return Err(Error::InvalidParams(format!(
                "clique size must be at least 3, got {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Torus volume `n^d` (the volume constant is 1 for the side-`n` cube).
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Largest possible torus distance, `(n/2)·sqrt(d)`.
    pub fn diameter(&self) -> f64 {
        0.5 * self.side * (self.dim as f64).sqrt()
    }

    /// Fréchet shape `(k-1)α - d`.
    pub fn theta(&self) -> f64 {
        (self.k as f64 - 1.0) * self.alpha - self.dim as f64
    }
}

/// A point of the torus with every coordinate in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    /// Wraps an already reduced coordinate vector, checking the fundamental domain.
    pub fn new(coords: Vec<f64>, params: &ModelParams) -> Result<Self> {
        if coords.len() != params.dim {
            return Err(Error::DimensionMismatch {
                expected: params.dim,
                got: coords.len(),
            });
        }
        for &c in &coords {
            if !c.is_finite() {
                return Err(Error::NonFinite(c));
            }
            if !(0.0..params.side).contains(&c) {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} outside [0, {})",
                    params.side
                )));
            }
        }
        Ok(TorusPoint(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// One-dimensional wrapped distance `min(|a-b|, n-|a-b|)` for `a, b` in `[0, n)`.
#[inline]
pub fn wrapped_gap(a: f64, b: f64, side: f64) -> f64 {
    let delta = (a - b).abs();
    delta.min(side - delta)
}

/// Torus distance between two raw coordinate slices of equal length.
#[inline]
pub fn torus_distance_raw(x: &[f64], y: &[f64], side: f64) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let g = wrapped_gap(a, b, side);
            g * g
        })
        .sum::<f64>()
        .sqrt()
}

/// `sqrt(Σ_i min(|x_i - y_i|, n - |x_i - y_i|)^2)`.
pub fn torus_distance(x: &TorusPoint, y: &TorusPoint, params: &ModelParams) -> Result<f64> {
    for p in [x, y] {
        if p.dim() != params.dim {
            return Err(Error::DimensionMismatch {
                expected: params.dim,
                got: p.dim(),
            });
        }
    }
    Ok(torus_distance_raw(x.coords(), y.coords(), params.side))
}

/// Reduces a single coordinate modulo `side` into `[0, side)`.
#[inline]
pub fn wrap_coord(c: f64, side: f64) -> f64 {
    let w = c.rem_euclid(side);
    // rem_euclid can round up to `side` for tiny negative inputs
    if w >= side {
        0.0
    } else {
        w
    }
}

/// Reduces every coordinate modulo `n` into the fundamental domain.
pub fn wrap_point(raw: &[f64], params: &ModelParams) -> Result<TorusPoint> {
    if raw.len() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            got: raw.len(),
        });
    }
    let mut coords = Vec::with_capacity(raw.len());
    for &c in raw {
        if !c.is_finite() {
            return Err(Error::NonFinite(c));
        }
        coords.push(wrap_coord(c, params.side));
    }
    Ok(TorusPoint(coords))
}
