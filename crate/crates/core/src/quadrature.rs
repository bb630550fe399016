//! Segment, triangle and disk quadrature rules with declared polynomial
//! exactness.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Disk, Point2, Triangle};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Gauss rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Legendre polynomial `P_n(x)` and its derivative, by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<SegmentRule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs n >= 1".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    // Roots come in symmetric pairs; solve for the positive half only.
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(SegmentRule {
        nodes,
        weights,
        exact_degree: 2 * n - 1,
    })
}

impl SegmentRule {
    /// Smallest Gauss rule exact to `degree`.
    pub fn for_degree(degree: usize) -> Self {
        gauss_legendre(degree / 2 + 1).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Rule on a triangle in barycentric coordinates. Weights sum to one, so a
/// physical integral is `area * sum(w_i f(x_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Collapsed-tensor (Duffy) rule exact for total degree `degree`.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    // (1 - u) Jacobian raises the degree in u by one.
    let rule_u = SegmentRule::for_degree(degree + 1);
    let rule_v = SegmentRule::for_degree(degree);
    let mut points = Vec::with_capacity(rule_u.len() * rule_v.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&tu, &wu) in rule_u.nodes.iter().zip(&rule_u.weights) {
        let u = 0.5 * (1.0 + tu);
        for (&tv, &wv) in rule_v.nodes.iter().zip(&rule_v.weights) {
            let v = 0.5 * (1.0 + tv);
            let s = u;
            let t = v * (1.0 - u);
            points.push([1.0 - s - t, s, t]);
            // 0.25 from the two interval maps, 2 from normalizing by the reference area 1/2
            weights.push(0.5 * wu * wv * (1.0 - u));
        }
    }
    TriangleRule {
        points,
        weights,
        exact_degree: degree,
    }
}

impl TriangleRule {
    pub fn integrate(&self, tri: &Triangle, f: impl Fn(Point2) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&b, &w)| w * f(tri.point_at(b)))
            .collect();
        tri.area() * pairwise_sum(&terms)
    }
}

/// Tensor rule on a disk: Gauss in the radius (with the polar Jacobian folded
/// into the weights) and the equally spaced trapezoid rule in the angle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRule {
    /// Radial nodes on `[0, 1]`.
    pub radial_nodes: Vec<f64>,
    /// Radial weights including the factor `r`.
    pub radial_weights: Vec<f64>,
    pub angular_m: usize,
    /// Exact for `r^a` with `a` up to this value.
    pub radial_exact_degree: usize,
    /// Exact for trigonometric polynomials up to this degree.
    pub trig_degree: usize,
}

pub fn disk_rule(radial_n: usize, angular_m: usize) -> Result<DiskRule> {
    if radial_n == 0 || angular_m == 0 {
        return Err(Error::InvalidArgument(format!(
            "disk rule needs radial_n >= 1 and angular_m >= 1, got {radial_n}, {angular_m}"
        )));
    }
    let g = gauss_legendre(radial_n)?;
    let radial_nodes: Vec<f64> = g.nodes.iter().map(|t| 0.5 * (1.0 + t)).collect();
    let radial_weights = g
        .weights
        .iter()
        .zip(&radial_nodes)
        .map(|(w, r)| 0.5 * w * r)
        .collect();
    Ok(DiskRule {
        radial_nodes,
        radial_weights,
        angular_m,
        radial_exact_degree: 2 * radial_n - 2,
        trig_degree: angular_m - 1,
    })
}

impl DiskRule {
    fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angular_m as f64
    }

    fn unit_direction(&self, j: usize) -> Point2 {
        let (s, c) = self.angle(j).sin_cos();
        Point2::new(c, s)
    }
}

/// Quadrature nodes in physical coordinates with their weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedPoints {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl WeightedPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Gauss nodes mapped onto every edge, weighted by arclength.
pub fn boundary_points(poly: &ConvexPolygon, rule: &SegmentRule) -> WeightedPoints {
    let mut out = WeightedPoints::default();
    for (a, b) in poly.edges() {
        let half = a.dist(b) * 0.5;
        let mid = (a + b) * 0.5;
        let dir = (b - a) * 0.5;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            out.points.push(mid + dir * t);
            out.weights.push(w * half);
        }
    }
    out
}

/// Triangle rule mapped onto every triangle of the centroid fan.
pub fn interior_points(poly: &ConvexPolygon, rule: &TriangleRule) -> WeightedPoints {
    let mut out = WeightedPoints::default();
    for tri in poly.triangulate_fan() {
        let area = tri.area();
        for (&b, &w) in rule.points.iter().zip(&rule.weights) {
            out.points.push(tri.point_at(b));
            out.weights.push(w * area);
        }
    }
    out
}

pub fn disk_interior_points(disk: &Disk, rule: &DiskRule) -> WeightedPoints {
    let mut out = WeightedPoints::default();
    let r2 = disk.radius * disk.radius;
    let dtheta = 2.0 * PI / rule.angular_m as f64;
    for (&r, &w) in rule.radial_nodes.iter().zip(&rule.radial_weights) {
        for j in 0..rule.angular_m {
            out.points
                .push(disk.center + rule.unit_direction(j) * (disk.radius * r));
            out.weights.push(r2 * w * dtheta);
        }
    }
    out
}

/// Trapezoid nodes on the bounding circle.
pub fn disk_boundary_points(disk: &Disk, rule: &DiskRule) -> WeightedPoints {
    let w = 2.0 * PI * disk.radius / rule.angular_m as f64;
    WeightedPoints {
        points: (0..rule.angular_m)
            .map(|j| disk.center + rule.unit_direction(j) * disk.radius)
            .collect(),
        weights: vec![w; rule.angular_m],
    }
}

pub fn integrate_boundary(
    poly: &ConvexPolygon,
    f: impl Fn(Point2) -> f64,
    rule: &SegmentRule,
) -> f64 {
    boundary_points(poly, rule).integrate(f)
}

pub fn integrate_interior(
    poly: &ConvexPolygon,
    f: impl Fn(Point2) -> f64,
    rule: &TriangleRule,
) -> f64 {
    interior_points(poly, rule).integrate(f)
}

pub fn integrate_disk(disk: &Disk, f: impl Fn(Point2) -> f64, rule: &DiskRule) -> f64 {
    disk_interior_points(disk, rule).integrate(f)
}

pub fn integrate_circle(disk: &Disk, f: impl Fn(Point2) -> f64, rule: &DiskRule) -> f64 {
    disk_boundary_points(disk, rule).integrate(f)
}

/// Pairwise summation in a fixed split order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{regular_polygon, PolygonMode};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn beta_monomial(a: u32, b: u32) -> f64 {
        // integral of x^a y^b over the unit right triangle: a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn reference_triangle() -> Triangle {
        Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn small_gauss_rules() {
        let g1 = gauss_legendre(1).unwrap();
        assert_eq!(g1.nodes, vec![0.0]);
        assert_eq!(g1.weights, vec![2.0]);
        let g2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(g2.nodes[0], -s, epsilon = 1e-16);
        assert_relative_eq!(g2.nodes[1], s, epsilon = 1e-16);
        assert_relative_eq!(g2.weights[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g2.weights[1], 1.0, epsilon = 1e-15);
        let g3 = gauss_legendre(3).unwrap();
        assert!((g3.integrate(|t| t.powi(4)) - 0.4).abs() < 1e-14);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_monomial_exactness() {
        for n in 1..=40 {
            let g = gauss_legendre(n).unwrap();
            assert_eq!(g.exact_degree, 2 * n - 1);
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for (i, t) in g.nodes.iter().enumerate() {
                assert_eq!(*t, -g.nodes[n - 1 - i]);
            }
            for m in 0..=g.exact_degree {
                let exact = if m % 2 == 0 {
                    2.0 / (m as f64 + 1.0)
                } else {
                    0.0
                };
                let got = g.integrate(|t| t.powi(m as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.max(1.0),
                    "n={n} m={m}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn triangle_small_cases() {
        let tri = reference_triangle();
        let rule = triangle_rule(4);
        assert_relative_eq!(rule.integrate(&tri, |_| 1.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(rule.integrate(&tri, |p| p.x), 1.0 / 6.0, epsilon = 1e-15);
        let v = rule.integrate(&tri, |p| p.x * p.x * p.y * p.y);
        assert!((v - 1.0 / 180.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn triangle_monomial_exactness() {
        let tri = reference_triangle();
        for q in 0..=30u32 {
            let rule = triangle_rule(q as usize);
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            for a in 0..=q {
                for b in 0..=(q - a) {
                    let exact = beta_monomial(a, b);
                    let got = rule.integrate(&tri, |p| p.x.powi(a as i32) * p.y.powi(b as i32));
                    assert!((got - exact).abs() <= 1e-12 * exact, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn boundary_integrals() {
        let sq = ConvexPolygon::unit_square();
        let g = SegmentRule::for_degree(4);
        assert_relative_eq!(
            integrate_boundary(&sq, |_| 1.0, &g),
            4.0,
            max_relative = 1e-15
        );
        let diamond = regular_polygon(4, 1.0, PolygonMode::Inscribed).unwrap();
        assert!(integrate_boundary(&diamond, |p| p.x, &g).abs() < 1e-14);
        let rule = disk_rule(2, 16).unwrap();
        let v = integrate_circle(&Disk::unit(), |p| p.x * p.x, &rule);
        assert_relative_eq!(v, PI, max_relative = 1e-14);
    }

    /// Composite Simpson on the iterated integral over the diamond |x| + |y| <= 1.
    fn simpson_diamond(f: impl Fn(f64, f64) -> f64, n: usize) -> f64 {
        let simpson = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let h = (b - a) / n as f64;
            let mut s = g(a) + g(b);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * g(a + h * i as f64);
            }
            s * h / 3.0
        };
        let inner = |x: f64| {
            let half = 1.0 - x.abs();
            if half <= 0.0 {
                0.0
            } else {
                simpson(&|y| f(x, y), -half, half)
            }
        };
        // split at the kink x = 0
        simpson(&inner, -1.0, 0.0) + simpson(&inner, 0.0, 1.0)
    }

    #[test]
    fn interior_integrals() {
        let sq = ConvexPolygon::unit_square();
        assert_relative_eq!(
            integrate_interior(&sq, |_| 1.0, &triangle_rule(0)),
            1.0,
            max_relative = 1e-15
        );

        let oracle = simpson_diamond(|x, y| x * x + y * y, 2048);
        assert!((oracle - 2.0 / 3.0).abs() < 1e-13, "oracle {oracle}");
        let diamond = regular_polygon(4, 1.0, PolygonMode::Inscribed).unwrap();
        let got = integrate_interior(&diamond, |p| p.x * p.x + p.y * p.y, &triangle_rule(2));
        assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");

        for k in [3, 5, 8, 17] {
            let poly = regular_polygon(k, 1.3, PolygonMode::Circumscribed).unwrap();
            assert!(integrate_interior(&poly, |p| p.x, &triangle_rule(1)).abs() < 1e-14);
        }
    }

    #[test]
    fn disk_rule_cases() {
        let rule = disk_rule(3, 8).unwrap();
        let d = Disk::unit();
        assert_relative_eq!(integrate_disk(&d, |_| 1.0, &rule), PI, max_relative = 1e-13);
        let v = integrate_disk(&d, |p| p.x * p.x, &rule);
        assert!((v - PI / 4.0).abs() < 1e-13);
        let circle = disk_rule(1, 64).unwrap();
        let v = integrate_circle(&d, |p| (3.0 * p.y.atan2(p.x)).cos().powi(2), &circle);
        assert_relative_eq!(v, PI, max_relative = 1e-13);
        assert!(disk_rule(0, 4).is_err());
        assert!(disk_rule(4, 0).is_err());
    }

    #[test]
    fn disk_rule_exactness_class() {
        // r^a cos(j theta) over the unit disk: zero unless j = 0, then 2 pi / (a + 2)
        let d = Disk::unit();
        for (n, m) in [(1, 1), (3, 5), (6, 13), (10, 21)] {
            let rule = disk_rule(n, m).unwrap();
            for a in 0..=rule.radial_exact_degree {
                for j in 0..=rule.trig_degree {
                    let f = |p: Point2| {
                        let r = p.norm();
                        r.powi(a as i32) * (j as f64 * p.y.atan2(p.x)).cos()
                    };
                    let exact = if j == 0 {
                        2.0 * PI / (a as f64 + 2.0)
                    } else {
                        0.0
                    };
                    let got = integrate_disk(&d, f, &rule);
                    assert!(
                        (got - exact).abs() <= 1e-12 * exact.max(1.0),
                        "n={n} m={m} a={a} j={j}: {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn measures_from_unit_integrand() {
        for k in [3, 4, 7, 32] {
            let poly = regular_polygon(k, 0.7, PolygonMode::Inscribed).unwrap();
            let b = integrate_boundary(&poly, |_| 1.0, &SegmentRule::for_degree(0));
            let i = integrate_interior(&poly, |_| 1.0, &triangle_rule(0));
            assert_relative_eq!(b, poly.perimeter(), max_relative = 1e-13);
            assert_relative_eq!(i, poly.area(), max_relative = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn interior_additive_and_rotation_invariant(
            k in 3usize..20,
            shift in 0usize..20,
            a in 0i32..5,
            b in 0i32..5,
        ) {
            let poly = regular_polygon(k, 1.0, PolygonMode::Inscribed)
                .unwrap()
                .transformed(1.0, 0.1, Point2::new(0.3, -0.2))
                .unwrap();
            let rule = triangle_rule((a + b) as usize);
            let f = |p: Point2| p.x.powi(a) * p.y.powi(b) + 1.0;
            let whole = integrate_interior(&poly, f, &rule);
            let parts: f64 = poly.triangulate_fan().iter().map(|t| rule.integrate(t, f)).sum();
            prop_assert!((whole - parts).abs() <= 1e-13 * whole.abs());
            let rotated = integrate_interior(&poly.rotate_vertex_list(shift), f, &rule);
            prop_assert!((whole - rotated).abs() <= 1e-13 * whole.abs());
        }
    }
}
