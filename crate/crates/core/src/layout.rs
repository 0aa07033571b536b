use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for Point {
    fn sub_assign(&mut self, o: Point) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

/// 2D coordinates for every vertex of one graph level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub points: Vec<Point>,
}

impl Layout {
    pub fn new(points: Vec<Point>) -> Self {
        Layout { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Uniform random positions in `[0, side]²`.
    pub fn random<R: Rng + ?Sized>(n: usize, side: f64, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
            .collect();
        Layout { points }
    }

    pub fn validate(&self) -> Result<()> {
        match self.points.iter().position(|p| !p.is_finite()) {
            Some(i) => Err(Error::NonFiniteCoordinate(i)),
            None => Ok(()),
        }
    }

    /// Axis-aligned bounding box as `(min, max)`; `None` for an empty layout.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (
                Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    pub fn translated(&self, t: Point) -> Layout {
        Layout::new(self.points.iter().map(|&p| p + t).collect())
    }

    /// Applies `p ↦ scale · R(angle) · p + t`.
    pub fn similarity(&self, scale: f64, angle: f64, t: Point) -> Layout {
        let (s, c) = angle.sin_cos();
        Layout::new(
            self.points
                .iter()
                .map(|p| Point::new(scale * (c * p.x - s * p.y), scale * (s * p.x + c * p.y)) + t)
                .collect(),
        )
    }
}

impl From<Vec<Point>> for Layout {
    fn from(points: Vec<Point>) -> Self {
        Layout { points }
    }
}

impl From<Vec<(f64, f64)>> for Layout {
    fn from(points: Vec<(f64, f64)>) -> Self {
        Layout {
            points: points.into_iter().map(|(x, y)| Point::new(x, y)).collect(),
        }
    }
}
