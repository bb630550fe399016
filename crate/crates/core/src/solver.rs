//! Rayleigh-Ritz solver for the dual eigenproblem
//!
//! ```text
//! find h in V:  ∫_∂Ω h ψ dσ = δ ∫_Ω h ψ dx   for all ψ in V
//! ```
//!
//! over a finite harmonic trial space `V`. In matrix form this is the pencil
//! `B c = δ A c` with `A` the interior Gram matrix and `B` the boundary Gram
//! matrix. Near-null directions of `A` are filtered out before whitening, so
//! the returned values are exact min-max values of the boundary/interior
//! Rayleigh quotient over the retained subspace.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::{make_mfs_basis, make_poly_basis, Basis, TrialSpace};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quadrature::{
    boundary_points, disk_boundary_points, disk_interior_points, disk_rule, interior_points,
    triangle_rule, SegmentRule, WeightedPoints,
};

pub const DEFAULT_NULL_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
/// Segment and triangle exactness used for fundamental-solution bases.
pub const MFS_QUADRATURE_DEGREE: usize = 63;
/// Angular trapezoid points used for fundamental-solution bases on the disk.
pub const MFS_DISK_ANGULAR: usize = 256;
/// Relative asymmetry above which a Gram matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

const ASSEMBLY_CHUNK: usize = 1024;

/// Which trial family to build, and how large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Poly { degree: usize },
    Mfs { size: usize },
}

impl Method {
    pub fn build_basis(&self, domain: &Domain) -> Result<Basis> {
        Ok(match *self {
            Method::Poly { degree } => Basis::Poly(make_poly_basis(domain, degree)),
            Method::Mfs { size } => Basis::Mfs(make_mfs_basis(domain, size)?),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Method::Poly { degree } => format!("harmonic polynomials of degree <= {degree}"),
            Method::Mfs { size } => format!("{size} fundamental solutions plus constant"),
        }
    }
}

/// Quadrature exactness used to assemble the Gram matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadConfig {
    pub segment_degree: usize,
    pub triangle_degree: usize,
    pub disk_radial_n: usize,
    pub disk_angular_m: usize,
}

impl QuadConfig {
    /// Exact for products of two polynomial elements, with a margin of two on edges.
    pub fn for_poly(degree: usize) -> Self {
        Self {
            segment_degree: 2 * degree + 2,
            triangle_degree: 2 * degree,
            disk_radial_n: degree + 2,
            disk_angular_m: 2 * degree + 4,
        }
    }

    pub fn for_mfs(size: usize) -> Self {
        Self {
            segment_degree: MFS_QUADRATURE_DEGREE,
            triangle_degree: MFS_QUADRATURE_DEGREE,
            disk_radial_n: MFS_QUADRATURE_DEGREE / 2 + 2,
            disk_angular_m: MFS_DISK_ANGULAR.max(4 * size),
        }
    }

    pub fn for_method(method: Method) -> Self {
        match method {
            Method::Poly { degree } => Self::for_poly(degree),
            Method::Mfs { size } => Self::for_mfs(size),
        }
    }

    /// Refuses configurations that cannot integrate the Gram entries.
    pub fn check(&self, basis: &Basis, domain: &Domain) -> Result<()> {
        let need = match basis {
            Basis::Poly(b) => 2 * b.max_degree,
            Basis::Mfs(_) => MFS_QUADRATURE_DEGREE,
        };
        let have = match domain {
            Domain::Polygon(_) => self.segment_degree.min(self.triangle_degree),
            Domain::Disk(_) => {
                let radial = (2 * self.disk_radial_n).saturating_sub(2);
                let trig = self.disk_angular_m.saturating_sub(1);
                radial.min(trig)
            }
        };
        if have < need || self.disk_radial_n == 0 || self.disk_angular_m == 0 {
            return Err(Error::Configuration(format!(
                "quadrature exactness {have} is below the required {need} for this basis ({self:?})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisDescriptor {
    Poly {
        degree: usize,
    },
    Mfs {
        size: usize,
    },
    /// Matrices supplied directly rather than assembled.
    Raw {
        dim: usize,
    },
}

impl From<&Basis> for BasisDescriptor {
    fn from(b: &Basis) -> Self {
        match b {
            Basis::Poly(p) => BasisDescriptor::Poly {
                degree: p.max_degree,
            },
            Basis::Mfs(m) => BasisDescriptor::Mfs { size: m.size() },
        }
    }
}

/// Interior Gram matrix `A_ij = ∫_Ω φ_i φ_j dx` and boundary Gram matrix
/// `B_ij = ∫_∂Ω φ_i φ_j dσ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    pub interior: DMatrix<f64>,
    pub boundary: DMatrix<f64>,
    pub basis: BasisDescriptor,
    pub quadrature: Option<QuadConfig>,
}

impl GramPair {
    /// Wraps user-supplied matrices; shapes are checked, symmetry is checked when solving.
    pub fn from_matrices(interior: DMatrix<f64>, boundary: DMatrix<f64>) -> Result<Self> {
        let n = interior.nrows();
        if n == 0 || !interior.is_square() || boundary.shape() != interior.shape() {
            return Err(Error::InvalidInput(format!(
                "Gram matrices must be square and the same size, got {:?} and {:?}",
                interior.shape(),
                boundary.shape()
            )));
        }
        Ok(Self {
            interior,
            boundary,
            basis: BasisDescriptor::Raw { dim: n },
            quadrature: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.interior.nrows()
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Weighted Gram matrix `Σ_q w_q φ(x_q) φ(x_q)^T`, summed chunk by chunk in a
/// fixed order so the result does not depend on the thread count.
fn weighted_gram(space: &impl TrialSpaceSync, pts: &WeightedPoints) -> Result<DMatrix<f64>> {
    let dim = space.dim();
    let chunk = |range: std::ops::Range<usize>| -> Result<DMatrix<f64>> {
        let e = space.eval(&pts.points[range.clone()])?.values;
        let mut weighted = e.clone();
        for (mut row, &w) in weighted.row_iter_mut().zip(&pts.weights[range]) {
            row *= w;
        }
        Ok(e.tr_mul(&weighted))
    };
    let ranges: Vec<_> = (0..pts.len())
        .step_by(ASSEMBLY_CHUNK)
        .map(|s| s..(s + ASSEMBLY_CHUNK).min(pts.len()))
        .collect();
    #[cfg(feature = "parallel")]
    let partials: Vec<Result<DMatrix<f64>>> = {
        use rayon::prelude::*;
        ranges.into_par_iter().map(chunk).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Result<DMatrix<f64>>> = ranges.into_iter().map(chunk).collect();
    let mut total = DMatrix::zeros(dim, dim);
    for p in partials {
        total += p?;
    }
    Ok(symmetrize(&total))
}

#[cfg(feature = "parallel")]
trait TrialSpaceSync: TrialSpace + Sync {}
#[cfg(feature = "parallel")]
impl<T: TrialSpace + Sync> TrialSpaceSync for T {}
#[cfg(not(feature = "parallel"))]
trait TrialSpaceSync: TrialSpace {}
#[cfg(not(feature = "parallel"))]
impl<T: TrialSpace> TrialSpaceSync for T {}

/// Builds the interior and boundary Gram matrices of `basis` on `domain`.
pub fn assemble(domain: &Domain, basis: &Basis, quad: &QuadConfig) -> Result<GramPair> {
    quad.check(basis, domain)?;
    let (inner, outer) = match domain {
        Domain::Polygon(poly) => (
            interior_points(poly, &triangle_rule(quad.triangle_degree)),
            boundary_points(poly, &SegmentRule::for_degree(quad.segment_degree)),
        ),
        Domain::Disk(disk) => {
            let rule = disk_rule(quad.disk_radial_n, quad.disk_angular_m)?;
            (
                disk_interior_points(disk, &rule),
                disk_boundary_points(disk, &rule),
            )
        }
    };
    Ok(GramPair {
        interior: weighted_gram(basis, &inner)?,
        boundary: weighted_gram(basis, &outer)?,
        basis: basis.into(),
        quadrature: Some(*quad),
    })
}

/// Ascending dual eigenvalues with conditioning diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Directions of the interior Gram matrix kept after null-space filtering.
    pub retained_dim: usize,
    /// Largest over smallest retained eigenvalue of the interior Gram matrix.
    pub cond_a: f64,
    pub basis_size: usize,
    pub basis: BasisDescriptor,
    pub domain: Option<String>,
    /// Set when fewer values than requested were available.
    pub truncated: bool,
}

impl Spectrum {
    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn check_symmetric(name: &str, m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{name} Gram matrix has non-finite entries"
        )));
    }
    let asym = max_abs(&(m - m.transpose()));
    let scale = max_abs(m);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "{name} Gram matrix is not symmetric (max |M - M^T| = {asym:e}, max |M| = {scale:e})"
        )));
    }
    Ok(())
}

/// Symmetric eigendecomposition with pairs sorted by ascending eigenvalue;
/// ties keep the solver's column order.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Solves `B c = δ A c` after discarding eigendirections of `A` below
/// `rel_threshold` times its largest eigenvalue.
pub fn solve_generalized(gram: &GramPair, rel_threshold: f64) -> Result<Spectrum> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "null-space threshold must lie in (0, 1), got {rel_threshold}"
        )));
    }
    if !gram.interior.is_square() || gram.boundary.shape() != gram.interior.shape() {
        return Err(Error::InvalidInput(
            "Gram matrices must be square and the same size".into(),
        ));
    }
    check_symmetric("interior", &gram.interior)?;
    check_symmetric("boundary", &gram.boundary)?;
    let a = symmetrize(&gram.interior);
    let b = symmetrize(&gram.boundary);

    let (a_vals, a_vecs) = sorted_eigen(a);
    let a_max = a_vals.last().copied().unwrap_or(0.0);
    if !(a_max > 0.0) {
        return Err(Error::DegenerateBasis {
            threshold: rel_threshold,
        });
    }
    let cutoff = rel_threshold * a_max;
    let keep: Vec<usize> = (0..a_vals.len()).filter(|&i| a_vals[i] > cutoff).collect();
    if keep.is_empty() {
        return Err(Error::DegenerateBasis {
            threshold: rel_threshold,
        });
    }
    let whitening = DMatrix::from_fn(a_vecs.nrows(), keep.len(), |r, c| {
        a_vecs[(r, keep[c])] / a_vals[keep[c]].sqrt()
    });
    let projected = symmetrize(&(whitening.transpose() * &b * &whitening));
    let (values, _) = sorted_eigen(projected);

    Ok(Spectrum {
        values,
        retained_dim: keep.len(),
        cond_a: a_max / a_vals[keep[0]],
        basis_size: gram.dim(),
        basis: gram.basis,
        domain: None,
        truncated: false,
    })
}

/// Assembles and solves, keeping the first `n_max` values.
pub fn compute_spectrum(
    domain: &Domain,
    method: Method,
    n_max: usize,
    rel_threshold: f64,
) -> Result<Spectrum> {
    let basis = method.build_basis(domain)?;
    let gram = assemble(domain, &basis, &QuadConfig::for_method(method))?;
    let mut spectrum = solve_generalized(&gram, rel_threshold)?;
    spectrum.truncated = spectrum.values.len() < n_max;
    spectrum.values.truncate(n_max);
    spectrum.domain = Some(domain.describe());
    Ok(spectrum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Groups numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MultiplicityClusters(pub Vec<Cluster>);

impl MultiplicityClusters {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.0.iter().map(|c| c.multiplicity).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.value).collect()
    }
}

/// Merges consecutive values closer than `cluster_tol * max(1, value)`; each
/// cluster reports the mean of its members.
pub fn cluster_multiplicities(values: &[f64], cluster_tol: f64) -> MultiplicityClusters {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        match groups.last_mut() {
            Some(g) if (v - g[g.len() - 1]).abs() <= cluster_tol * v.abs().max(1.0) => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    MultiplicityClusters(
        groups
            .into_iter()
            .map(|g| Cluster {
                value: g.iter().sum::<f64>() / g.len() as f64,
                multiplicity: g.len(),
            })
            .collect(),
    )
}
