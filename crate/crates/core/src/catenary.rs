//! Catenary model of a single buckled ribbon.
//!
//! A ribbon of rest length `L` whose endpoints are pulled to a distance
//! `dy < L` apart hangs as `z(y) = a cosh(y/a) - (a + dz)` on
//! `y in [-dy/2, dy/2]`, where `a` solves `2a sinh(dy / 2a) = L` and the sag
//! `dz` is the positive root of `dz^2 + 2a dz - (L/2)^2 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a ribbon after its endpoints have moved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Catenary {
    /// Endpoints at or beyond the rest length: the ribbon stays straight.
    Flat,
    /// Buckled arch. `a == 0` is the fully folded limit (`dy == 0`).
    Buckled { a: f64, dz: f64 },
}

impl Catenary {
    pub fn is_flat(&self) -> bool {
        matches!(self, Catenary::Flat)
    }

    /// Shape parameter, `None` when flat.
    pub fn a(&self) -> Option<f64> {
        match *self {
            Catenary::Flat => None,
            Catenary::Buckled { a, .. } => Some(a),
        }
    }

    /// Maximum sag below the endpoint plane (mm); zero when flat.
    pub fn dz(&self) -> f64 {
        match *self {
            Catenary::Flat => 0.0,
            Catenary::Buckled { dz, .. } => dz,
        }
    }
}

const BRACKET_LO: f64 = 1e-6;
const BRACKET_HI: f64 = 1e6;
const BISECT_RTOL: f64 = 1e-6;
const NEWTON_RTOL: f64 = 1e-12;
const NEWTON_MAX_STEPS: usize = 50;

/// Solves the buckled shape of a ribbon with rest length `rest_length` whose
/// endpoints sit `dy` apart (both mm).
pub fn solve_catenary(rest_length: f64, dy: f64) -> Result<Catenary> {
    if !(rest_length.is_finite() && rest_length > 0.0 && dy.is_finite() && dy >= 0.0) {
        return Err(Error::InvalidRibbon { rest_length, dy });
    }
    if dy >= rest_length {
        return Ok(Catenary::Flat);
    }
    let half = 0.5 * rest_length;
    if dy == 0.0 {
        return Ok(Catenary::Buckled { a: 0.0, dz: half });
    }
    let a = solve_shape_parameter(rest_length, dy);
    Ok(Catenary::Buckled {
        a,
        dz: sag_from_length(a, rest_length),
    })
}

/// Positive root of `dz^2 + 2a dz - (L/2)^2 = 0`.
pub fn sag_from_length(a: f64, rest_length: f64) -> f64 {
    let h = 0.5 * rest_length;
    // h^2 / (a + sqrt(a^2 + h^2)) avoids the cancellation in -a + sqrt(..)
    h * h / (a + a.hypot(h))
}

/// Sag of a catenary with parameter `a` over a level span `dy`:
/// `a (cosh(dy / 2a) - 1)`.
pub fn sag_from_span(a: f64, dy: f64) -> f64 {
    let s = (dy / (4.0 * a)).sinh();
    2.0 * a * s * s
}

/// Arc length of a catenary with parameter `a` over a level span `dy`.
pub fn arc_length(a: f64, dy: f64) -> f64 {
    2.0 * a * (dy / (2.0 * a)).sinh()
}

fn solve_shape_parameter(rest_length: f64, dy: f64) -> f64 {
    // f(a) = 2a sinh(dy/2a) - L decreases strictly from +inf towards dy - L < 0.
    let f = |a: f64| arc_length(a, dy) - rest_length;

    let mut lo = rest_length * BRACKET_LO;
    let mut hi = rest_length * BRACKET_HI;
    while f(lo) <= 0.0 && lo > f64::MIN_POSITIVE * 1e3 {
        hi = lo;
        lo *= 1e-3;
    }
    while f(hi) >= 0.0 && hi < f64::MAX / 1e3 {
        lo = hi;
        hi *= 1e3;
    }

    // geometric bisection: the bracket spans many decades
    while hi / lo - 1.0 > BISECT_RTOL {
        let mid = (lo * hi).sqrt();
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut a = (lo * hi).sqrt();
    for _ in 0..NEWTON_MAX_STEPS {
        let fa = f(a);
        if fa == 0.0 {
            break;
        }
        let next = a - fa / arc_length_derivative(a, dy);
        let next = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if fa > 0.0 {
            lo = lo.max(a);
        } else {
            hi = hi.min(a);
        }
        let step = (next - a).abs();
        a = next;
        if step <= NEWTON_RTOL * a {
            break;
        }
    }
    a
}

/// d/da of `2a sinh(dy/2a)`, i.e. `2 (sinh u - u cosh u)` with `u = dy/2a`.
fn arc_length_derivative(a: f64, dy: f64) -> f64 {
    let u = dy / (2.0 * a);
    if u < 0.1 {
        let u2 = u * u;
        -2.0 * u * u2 * (1.0 / 3.0 + u2 * (1.0 / 30.0 + u2 / 840.0))
    } else {
        2.0 * (u.sinh() - u * u.cosh())
    }
}

/// Samples `n_samples` points `(y, z)` of the buckled profile, uniformly in
/// `y` over `[-dy/2, dy/2]`. Endpoints have `z = 0`; the sag is negative.
pub fn ribbon_profile(shape: &Catenary, dy: f64, n_samples: usize) -> Result<Vec<(f64, f64)>> {
    let (a, dz) = match *shape {
        Catenary::Flat => return Err(Error::FlatRibbon),
        Catenary::Buckled { a, dz } => (a, dz),
    };
    if n_samples < 3 {
        return Err(Error::InvalidRibbon {
            rest_length: f64::NAN,
            dy,
        });
    }
    let last = (n_samples - 1) as f64;
    let half = 0.5 * dy;
    let points = (0..n_samples)
        .map(|i| {
            let t = i as f64 / last;
            if a == 0.0 {
                // folded flat onto itself: straight down and back up
                return (0.0, -dz * (1.0 - (2.0 * t - 1.0).abs()));
            }
            let y = if 2 * i + 1 == n_samples {
                0.0
            } else {
                -half + dy * t
            };
            // a cosh(y/a) - (a + dz), rearranged to avoid cancellation at large a
            let s = (y / (2.0 * a)).sinh();
            let z = if i == 0 || i + 1 == n_samples {
                0.0
            } else {
                2.0 * a * s * s - dz
            };
            (y, z)
        })
        .collect();
    Ok(points)
}
