//! Finite-dimensional spaces of harmonic trial functions.
//!
//! Two families are provided: scaled harmonic polynomials
//! `{1, Re z^d, Im z^d : 1 <= d <= p}` with `z = (x - center) / scale`, and
//! fundamental solutions `{1, ln|x - y_j|}` with sources `y_j` on a circle
//! outside the domain. Element 0 is the constant in both.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};

/// Source circle radius as a multiple of the domain circumradius.
pub const MFS_SOURCE_RATIO: f64 = 1.5;
/// Minimum gap between the source circle and the domain, relative to the circumradius.
pub const MFS_MIN_MARGIN: f64 = 0.1;

/// Anything that can evaluate a fixed list of trial functions at a point.
pub trait TrialSpace {
    fn dim(&self) -> usize;

    /// Writes the value of every element at `p` into `out[..dim]`.
    fn eval_point(&self, p: Point2, out: &mut [f64]) -> Result<()>;

    fn eval(&self, points: &[Point2]) -> Result<BasisEvaluation> {
        let dim = self.dim();
        let mut values = DMatrix::zeros(points.len(), dim);
        let mut row = vec![0.0; dim];
        for (i, &p) in points.iter().enumerate() {
            self.eval_point(p, &mut row)?;
            for (j, v) in row.iter().enumerate() {
                values[(i, j)] = *v;
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationDomain(
                "basis evaluation produced a non-finite value".into(),
            ));
        }
        Ok(BasisEvaluation { values })
    }
}

/// Rows are evaluation points, columns are basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEvaluation {
    pub values: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicPolyBasis {
    pub center: Point2,
    pub scale: f64,
    pub max_degree: usize,
}

impl HarmonicPolyBasis {
    pub fn new(center: Point2, scale: f64, max_degree: usize) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "polynomial basis needs finite center and positive scale, got {center:?}, {scale}"
            )));
        }
        Ok(Self {
            center,
            scale,
            max_degree,
        })
    }

    /// Polynomial degree of element `j`.
    pub fn element_degree(j: usize) -> usize {
        j.div_ceil(2)
    }
}

impl TrialSpace for HarmonicPolyBasis {
    fn dim(&self) -> usize {
        2 * self.max_degree + 1
    }

    fn eval_point(&self, p: Point2, out: &mut [f64]) -> Result<()> {
        let zr = (p.x - self.center.x) / self.scale;
        let zi = (p.y - self.center.y) / self.scale;
        out[0] = 1.0;
        let (mut re, mut im) = (1.0, 0.0);
        for d in 1..=self.max_degree {
            let next_re = re * zr - im * zi;
            im = re * zi + im * zr;
            re = next_re;
            out[2 * d - 1] = re;
            out[2 * d] = im;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MfsBasis {
    pub center: Point2,
    pub source_radius: f64,
    pub sources: Vec<Point2>,
}

impl MfsBasis {
    pub fn size(&self) -> usize {
        self.sources.len()
    }
}

impl TrialSpace for MfsBasis {
    fn dim(&self) -> usize {
        self.sources.len() + 1
    }

    fn eval_point(&self, p: Point2, out: &mut [f64]) -> Result<()> {
        out[0] = 1.0;
        for (j, &y) in self.sources.iter().enumerate() {
            let r = p.dist(y);
            if !(r > 0.0) {
                return Err(Error::EvaluationDomain(format!(
                    "point {p:?} coincides with MFS source {j} at {y:?}"
                )));
            }
            out[j + 1] = r.ln();
        }
        Ok(())
    }
}

/// Either trial family; what the solver consumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Basis {
    Poly(HarmonicPolyBasis),
    Mfs(MfsBasis),
}

impl TrialSpace for Basis {
    fn dim(&self) -> usize {
        match self {
            Basis::Poly(b) => b.dim(),
            Basis::Mfs(b) => b.dim(),
        }
    }

    fn eval_point(&self, p: Point2, out: &mut [f64]) -> Result<()> {
        match self {
            Basis::Poly(b) => b.eval_point(p, out),
            Basis::Mfs(b) => b.eval_point(p, out),
        }
    }
}

/// Polynomial basis centered at the centroid and scaled by the circumradius.
pub fn make_poly_basis(domain: &Domain, max_degree: usize) -> HarmonicPolyBasis {
    HarmonicPolyBasis {
        center: domain.centroid(),
        scale: domain.circumradius(),
        max_degree,
    }
}

/// `size` equally spaced sources on the circle of radius
/// [`MFS_SOURCE_RATIO`] times the circumradius about the centroid.
pub fn make_mfs_basis(domain: &Domain, size: usize) -> Result<MfsBasis> {
    make_mfs_basis_with_ratio(domain, size, MFS_SOURCE_RATIO)
}

pub fn make_mfs_basis_with_ratio(domain: &Domain, size: usize, ratio: f64) -> Result<MfsBasis> {
    if !(ratio >= 1.0 + MFS_MIN_MARGIN) {
        return Err(Error::InvalidArgument(format!(
            "MFS source ratio {ratio} leaves less than {MFS_MIN_MARGIN} x circumradius of margin"
        )));
    }
    let center = domain.centroid();
    let source_radius = ratio * domain.circumradius();
    let sources = (0..size)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / size as f64;
            center + Point2::new(t.cos(), t.sin()) * source_radius
        })
        .collect();
    Ok(MfsBasis {
        center,
        source_radius,
        sources,
    })
}

const FD_OFFSETS: [(f64, f64); 4] = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];

/// Fourth-order central-difference Laplacian of `f` at `p`.
pub fn fd_laplacian(f: impl Fn(Point2) -> f64, p: Point2, h: f64) -> f64 {
    let mut near = 0.0;
    let mut far = 0.0;
    for (dx, dy) in FD_OFFSETS {
        let d = Point2::new(dx * h, dy * h);
        near += f(p + d);
        far += f(p + d * 2.0);
    }
    (16.0 * near - far - 60.0 * f(p)) / (12.0 * h * h)
}

/// Largest finite-difference Laplacian over all elements and sample points,
/// each relative to `max(1, |element value|)` at that point.
pub fn laplacian_residual(space: &impl TrialSpace, points: &[Point2], h: f64) -> Result<f64> {
    let dim = space.dim();
    let mut worst: f64 = 0.0;
    let mut center = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    let mut lap = vec![0.0; dim];
    for &p in points {
        space.eval_point(p, &mut center)?;
        lap.iter_mut()
            .zip(&center)
            .for_each(|(l, c)| *l = -60.0 * c);
        for (dx, dy) in FD_OFFSETS {
            let d = Point2::new(dx * h, dy * h);
            space.eval_point(p + d, &mut row)?;
            lap.iter_mut().zip(&row).for_each(|(l, v)| *l += 16.0 * v);
            space.eval_point(p + d * 2.0, &mut row)?;
            lap.iter_mut().zip(&row).for_each(|(l, v)| *l -= v);
        }
        for (l, c) in lap.iter().zip(&center) {
            let l = l / (12.0 * h * h);
            worst = worst.max(l.abs() / c.abs().max(1.0));
        }
    }
    Ok(worst)
}
