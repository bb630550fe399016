//! Convex polygons, the disk, and the regular polygon families used to
//! approximate the disk.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on consecutive-edge cross products, scaled by the
/// squared maximum vertex norm.
pub const CONVEXITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl Triangle {
    pub fn new(a: Point2, b: Point2, c: Point2) -> Result<Self> {
        let t = Self { a, b, c };
        if !(t.signed_area() > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "triangle {a:?}, {b:?}, {c:?} has non-positive signed area"
            )));
        }
        Ok(t)
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Maps barycentric weights `(l0, l1, l2)` to a physical point.
    pub fn point_at(&self, bary: [f64; 3]) -> Point2 {
        Point2::new(
            bary[0] * self.a.x + bary[1] * self.b.x + bary[2] * self.c.x,
            bary[0] * self.a.y + bary[1] * self.b.y + bary[2] * self.c.y,
        )
    }
}

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates the vertex list. Clockwise input is reversed, not rejected.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite vertex {p:?}")));
        }
        let n = vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidArgument(format!(
                        "repeated vertex {:?} at positions {i} and {j}",
                        vertices[i]
                    )));
                }
            }
        }
        if shoelace(&vertices) < 0.0 {
            vertices.reverse();
        }
        let scale = vertices.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let tol = CONVEXITY_TOL * scale * scale;
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let cur = vertices[i];
            let next = vertices[(i + 1) % n];
            let turn = (cur - prev).cross(next - cur);
            if !(turn > tol) {
                return Err(Error::InvalidArgument(format!(
                    "polygon is not strictly convex at vertex {i} (turn {turn:e})"
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs in counterclockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point2 {
        // Shift to the first vertex to keep the cross products well scaled.
        let o = self.vertices[0];
        let (mut cx, mut cy, mut twice_area) = (0.0, 0.0, 0.0);
        for (a, b) in self.edges() {
            let (a, b) = (a - o, b - o);
            let c = a.cross(b);
            twice_area += c;
            cx += (a.x + b.x) * c;
            cy += (a.y + b.y) * c;
        }
        Point2::new(o.x + cx / (3.0 * twice_area), o.y + cy / (3.0 * twice_area))
    }

    /// Largest distance from the centroid to a vertex.
    pub fn circumradius(&self) -> f64 {
        let c = self.centroid();
        self.vertices.iter().map(|v| v.dist(c)).fold(0.0, f64::max)
    }

    /// One triangle per edge, apex at the centroid.
    pub fn triangulate_fan(&self) -> Vec<Triangle> {
        let c = self.centroid();
        self.edges()
            .map(|(a, b)| Triangle { a: c, b: a, c: b })
            .collect()
    }

    /// Whether `p` lies in the closed polygon, up to `tol` in length units.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) / e.norm() >= -tol
        })
    }

    /// Applies `x -> scale * R(angle) x + shift` to every vertex.
    pub fn transformed(&self, scale: f64, angle: f64, shift: Point2) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Self::new(
            self.vertices
                .iter()
                .map(|v| v.rotated(angle) * scale + shift)
                .collect(),
        )
    }

    /// Cyclic shift of the vertex list; the point set is unchanged.
    pub fn rotate_vertex_list(&self, by: usize) -> Self {
        let mut vertices = self.vertices.clone();
        let n = vertices.len();
        vertices.rotate_left(by % n);
        Self { vertices }
    }

    pub fn unit_square() -> Self {
        Self::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .expect("unit square is convex")
    }
}

fn shoelace(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let o = vertices[0];
    let mut twice = 0.0;
    for i in 0..n {
        twice += (vertices[i] - o).cross(vertices[(i + 1) % n] - o);
    }
    0.5 * twice
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "disk needs a finite center and positive radius, got {center:?}, {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self {
            center: Point2::default(),
            radius: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }
}

/// Whether a regular polygon sits inside or around its reference circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum PolygonMode {
    Inscribed,
    Circumscribed,
}

impl fmt::Display for PolygonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolygonMode::Inscribed => "inscribed",
            PolygonMode::Circumscribed => "circumscribed",
        })
    }
}

impl FromStr for PolygonMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inscribed" => Ok(Self::Inscribed),
            "circumscribed" => Ok(Self::Circumscribed),
            other => Err(Error::InvalidArgument(format!(
                "unknown polygon mode `{other}`"
            ))),
        }
    }
}

fn check_regular_args(k: usize, radius: f64) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "regular polygon needs k >= 3, got {k}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(())
}

/// Regular `k`-gon centered at the origin with a vertex on the positive x-axis.
///
/// Inscribed polygons have their vertices on the circle of the given radius;
/// circumscribed polygons have their edges tangent to it.
pub fn regular_polygon(k: usize, radius: f64, mode: PolygonMode) -> Result<ConvexPolygon> {
    check_regular_args(k, radius)?;
    let vertex_radius = match mode {
        PolygonMode::Inscribed => radius,
        PolygonMode::Circumscribed => radius / (PI / k as f64).cos(),
    };
    let vertices = (0..k)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / k as f64;
            Point2::new(vertex_radius * t.cos(), vertex_radius * t.sin())
        })
        .collect();
    ConvexPolygon::new(vertices)
}

/// Hausdorff distance between the regular `k`-gon and the disk it approximates.
pub fn hausdorff_to_disk(k: usize, radius: f64, mode: PolygonMode) -> Result<f64> {
    check_regular_args(k, radius)?;
    let c = (PI / k as f64).cos();
    Ok(match mode {
        PolygonMode::Inscribed => radius * (1.0 - c),
        PolygonMode::Circumscribed => radius * (1.0 / c - 1.0),
    })
}

/// Either kind of domain the solver accepts.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Polygon(ConvexPolygon),
    Disk(Disk),
}

impl Domain {
    pub fn area(&self) -> f64 {
        match self {
            Domain::Polygon(p) => p.area(),
            Domain::Disk(d) => d.area(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Polygon(p) => p.perimeter(),
            Domain::Disk(d) => d.perimeter(),
        }
    }

    pub fn centroid(&self) -> Point2 {
        match self {
            Domain::Polygon(p) => p.centroid(),
            Domain::Disk(d) => d.center,
        }
    }

    pub fn circumradius(&self) -> f64 {
        match self {
            Domain::Polygon(p) => p.circumradius(),
            Domain::Disk(d) => d.radius,
        }
    }

    /// Perimeter over area: the Rayleigh quotient of the constant function.
    pub fn constant_quotient(&self) -> f64 {
        self.perimeter() / self.area()
    }

    pub fn describe(&self) -> String {
        match self {
            Domain::Polygon(p) => format!("polygon with {} vertices", p.len()),
            Domain::Disk(d) => format!(
                "disk radius {} centered at ({}, {})",
                d.radius, d.center.x, d.center.y
            ),
        }
    }
}

impl From<ConvexPolygon> for Domain {
    fn from(p: ConvexPolygon) -> Self {
        Domain::Polygon(p)
    }
}

impl From<Disk> for Domain {
    fn from(d: Disk) -> Self {
        Domain::Disk(d)
    }
}
