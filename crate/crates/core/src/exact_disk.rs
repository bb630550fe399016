//! Closed-form spectra of the unit ball in `R^N`.
//!
//! Eigenfunctions of degree `d` (homogeneous harmonic polynomials times the
//! boundary-vanishing factor) give DBS value `2d + N` and MDBS value `2d + 1`.
//! The difference `N - 1` is the mean curvature of the unit sphere.

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// `Δu = λ ∂_ν u` on the boundary.
    Dbs,
    /// `∂²_νν u = μ ∂_ν u` on the boundary.
    Mdbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSpectrumEntry {
    pub degree: usize,
    pub dimension: usize,
    pub dbs_value: f64,
    pub mdbs_value: f64,
    pub multiplicity: u64,
}

fn check_dimension(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "ball dimension must be >= 2, got {dim}"
        )));
    }
    Ok(())
}

pub fn ball_dbs(degree: usize, dim: usize) -> Result<f64> {
    check_dimension(dim)?;
    Ok((2 * degree + dim) as f64)
}

pub fn ball_mdbs(degree: usize, dim: usize) -> Result<f64> {
    check_dimension(dim)?;
    Ok((2 * degree + 1) as f64)
}

/// Dimension of the homogeneous harmonic polynomials of degree `d` in `R^N`.
pub fn harmonic_multiplicity(degree: usize, dim: usize) -> u64 {
    let d = degree as u64;
    let n = dim as u64;
    let all = binomial(n + d - 1, d);
    let divisible = if d >= 2 {
        binomial(n + d - 3, d - 2)
    } else {
        0
    };
    all - divisible
}

pub fn ball_entry(degree: usize, dim: usize) -> Result<BallSpectrumEntry> {
    Ok(BallSpectrumEntry {
        degree,
        dimension: dim,
        dbs_value: ball_dbs(degree, dim)?,
        mdbs_value: ball_mdbs(degree, dim)?,
        multiplicity: harmonic_multiplicity(degree, dim),
    })
}

/// First `count` eigenvalues of the unit ball, each repeated by multiplicity.
pub fn enumerate_ball_spectrum(count: usize, dim: usize, which: Problem) -> Result<Vec<f64>> {
    check_dimension(dim)?;
    let mut out = Vec::with_capacity(count);
    let mut degree = 0;
    while out.len() < count {
        let e = ball_entry(degree, dim)?;
        let value = match which {
            Problem::Dbs => e.dbs_value,
            Problem::Mdbs => e.mdbs_value,
        };
        let room = (count - out.len()) as u64;
        out.extend(std::iter::repeat_n(
            value,
            e.multiplicity.min(room) as usize,
        ));
        degree += 1;
    }
    Ok(out)
}

/// Same as [`enumerate_ball_spectrum`] for a ball of radius `radius`; values scale as `1/radius`.
pub fn enumerate_scaled(count: usize, dim: usize, which: Problem, radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(enumerate_ball_spectrum(count, dim, which)?
        .into_iter()
        .map(|v| v / radius)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn values() {
        assert_eq!(ball_dbs(0, 2).unwrap(), 2.0);
        assert_eq!(ball_dbs(1, 2).unwrap(), 4.0);
        assert_eq!(ball_dbs(0, 3).unwrap(), 3.0);
        assert_eq!(ball_mdbs(0, 2).unwrap(), 1.0);
        assert_eq!(ball_mdbs(2, 2).unwrap(), 5.0);
        assert!(ball_dbs(0, 1).is_err());
        assert!(ball_mdbs(0, 1).is_err());
    }

    #[test]
    fn multiplicities() {
        assert_eq!(harmonic_multiplicity(0, 2), 1);
        assert_eq!(harmonic_multiplicity(3, 2), 2);
        assert_eq!(harmonic_multiplicity(2, 3), 5);
        for n in 2..8 {
            assert_eq!(harmonic_multiplicity(1, n), n as u64);
        }
        assert_eq!(
            (0..30)
                .map(|d| harmonic_multiplicity(d, 2))
                .collect::<Vec<_>>()[..4],
            [1, 2, 2, 2]
        );
        assert!((1..200).all(|d| harmonic_multiplicity(d, 2) == 2));
        // spherical harmonics in R^3 have dimension 2d + 1
        assert!((0..50).all(|d| harmonic_multiplicity(d, 3) == 2 * d as u64 + 1));
    }

    #[test]
    fn enumeration() {
        assert_eq!(
            enumerate_ball_spectrum(9, 2, Problem::Dbs).unwrap(),
            vec![2.0, 4.0, 4.0, 6.0, 6.0, 8.0, 8.0, 10.0, 10.0]
        );
        assert_eq!(
            enumerate_ball_spectrum(5, 2, Problem::Mdbs).unwrap(),
            vec![1.0, 3.0, 3.0, 5.0, 5.0]
        );
        assert_eq!(
            enumerate_ball_spectrum(4, 3, Problem::Dbs).unwrap(),
            vec![3.0, 5.0, 5.0, 5.0]
        );
        assert!(enumerate_ball_spectrum(0, 2, Problem::Dbs)
            .unwrap()
            .is_empty());
        assert_eq!(
            enumerate_scaled(3, 2, Problem::Dbs, 2.0).unwrap(),
            vec![1.0, 2.0, 2.0]
        );
    }

    proptest! {
        #[test]
        fn shift_is_curvature(d in 0usize..500, n in 2usize..12) {
            prop_assert_eq!(ball_dbs(d, n).unwrap() - ball_mdbs(d, n).unwrap(), (n - 1) as f64);
        }

        #[test]
        fn enumeration_sorted_with_constant_shift(count in 1usize..300, n in 2usize..6) {
            let dbs = enumerate_ball_spectrum(count, n, Problem::Dbs).unwrap();
            let mdbs = enumerate_ball_spectrum(count, n, Problem::Mdbs).unwrap();
            prop_assert_eq!(dbs.len(), count);
            prop_assert!(dbs.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(dbs.iter().zip(&mdbs).all(|(a, b)| a - b == (n - 1) as f64));
        }
    }
}
