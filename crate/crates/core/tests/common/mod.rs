//! Shared helpers for the integration suites: surface builders, the
//! closed-form sphere oracle and finite-difference stencils over the plain
//! evaluator (independent of the jet path they check).

#![allow(dead_code)]

use relgeo4::expr::{self, Expression};
use relgeo4::frame::NormalizationMode;
use relgeo4::surface::{Orientation, SurfaceSpec};

pub const BOX_DOMAIN: [[f64; 2]; 3] = [[0.2, 1.2], [-0.5, 0.5], [-0.5, 0.5]];

pub fn surface(name: &str, coords: [String; 4], normalization: NormalizationMode) -> SurfaceSpec {
    SurfaceSpec {
        name: name.to_string(),
        x: coords.map(|s| expr::parse(&s).expect("fixture expression parses")),
        domain: BOX_DOMAIN,
        normalization,
        orientation: Orientation::Auto,
        grid: [7, 7, 7],
    }
}

fn sphere_coords(radius: f64) -> [String; 4] {
    [
        format!("{radius}*cos(u1)*cos(u2)*cos(u3)"),
        format!("{radius}*sin(u1)*cos(u2)*cos(u3)"),
        format!("{radius}*sin(u2)*cos(u3)"),
        format!("{radius}*sin(u3)"),
    ]
}

pub fn sphere(radius: f64) -> SurfaceSpec {
    surface(
        &format!("sphere-r{radius}"),
        sphere_coords(radius),
        NormalizationMode::Euclidean,
    )
}

pub fn sphere_with_mode(radius: f64, normalization: NormalizationMode) -> SurfaceSpec {
    surface(
        &format!("sphere-r{radius}"),
        sphere_coords(radius),
        normalization,
    )
}

pub fn custom_q(source: &str) -> NormalizationMode {
    NormalizationMode::Custom {
        expr: expr::parse(source).expect("q expression parses"),
        source: source.to_string(),
    }
}

fn ellipsoid_coords(axes: [f64; 4]) -> [String; 4] {
    [
        format!("{}*cos(u1)*cos(u2)*cos(u3)", axes[0]),
        format!("{}*sin(u1)*cos(u2)*cos(u3)", axes[1]),
        format!("{}*sin(u2)*cos(u3)", axes[2]),
        format!("{}*sin(u3)", axes[3]),
    ]
}

/// The generic ellipsoid with semi-axes 1, 1.2, 1.5, 2.
pub fn ellipsoid() -> SurfaceSpec {
    surface(
        "ellipsoid",
        ellipsoid_coords([1.0, 1.2, 1.5, 2.0]),
        NormalizationMode::Euclidean,
    )
}

pub fn ellipsoid_with_mode(normalization: NormalizationMode) -> SurfaceSpec {
    surface(
        "ellipsoid",
        ellipsoid_coords([1.0, 1.2, 1.5, 2.0]),
        normalization,
    )
}

pub fn ellipsoid_with_axes(axes: [f64; 4]) -> SurfaceSpec {
    surface(
        "ellipsoid",
        ellipsoid_coords(axes),
        NormalizationMode::Euclidean,
    )
}

/// Closed-form expectations for the radius-`r` sphere with inward normal
/// and constant support function `c`.
pub struct SphereOracle {
    pub radius: f64,
    pub q: f64,
}

impl SphereOracle {
    pub fn new(radius: f64, q: f64) -> Self {
        Self { radius, q }
    }
    pub fn kappa(&self) -> f64 {
        self.q / self.radius
    }
    pub fn h(&self) -> f64 {
        self.kappa()
    }
    pub fn h2(&self) -> f64 {
        self.kappa() * self.kappa()
    }
    pub fn k(&self) -> f64 {
        self.kappa().powi(3)
    }
    pub fn ktilde(&self) -> f64 {
        1.0 / self.radius.powi(3)
    }
    /// Radius of the offset sphere at relative distance `mu`.
    pub fn offset_radius(&self, mu: f64) -> f64 {
        self.radius - mu * self.q
    }
}

/// 5-point central finite differences over the plain `f64` evaluator.
pub mod fd {
    use super::Expression;
    use relgeo4::expr::eval_value;

    fn value(expr: &Expression, p: [f64; 3]) -> f64 {
        eval_value(expr, p).expect("finite-difference probe inside the domain")
    }

    pub fn first(expr: &Expression, p: [f64; 3], axis: usize, h: f64) -> f64 {
        let s = |k: f64| {
            let mut q = p;
            q[axis] += k * h;
            value(expr, q)
        };
        (-s(2.0) + 8.0 * s(1.0) - 8.0 * s(-1.0) + s(-2.0)) / (12.0 * h)
    }

    pub fn second(expr: &Expression, p: [f64; 3], i: usize, j: usize, h: f64) -> f64 {
        if i == j {
            let s = |k: f64| {
                let mut q = p;
                q[i] += k * h;
                value(expr, q)
            };
            (-s(2.0) + 16.0 * s(1.0) - 30.0 * s(0.0) + 16.0 * s(-1.0) - s(-2.0)) / (12.0 * h * h)
        } else {
            let dj = |p: [f64; 3]| {
                let s = |k: f64| {
                    let mut q = p;
                    q[j] += k * h;
                    value(expr, q)
                };
                (-s(2.0) + 8.0 * s(1.0) - 8.0 * s(-1.0) + s(-2.0)) / (12.0 * h)
            };
            let si = |k: f64| {
                let mut q = p;
                q[i] += k * h;
                dj(q)
            };
            (-si(2.0) + 8.0 * si(1.0) - 8.0 * si(-1.0) + si(-2.0)) / (12.0 * h)
        }
    }
}
