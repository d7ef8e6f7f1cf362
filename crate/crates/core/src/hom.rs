//! *-homomorphisms between block algebras, stored by their values on the
//! matrix units of the source.

use crate::algebra::{Element, FdAlgebra, MatrixUnit};
use crate::error::{Error, Result};
use crate::linalg::{Mat, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct StarHom {
    source: FdAlgebra,
    target: FdAlgebra,
    /// Image of each matrix unit, in the order of `source.matrix_units()`.
    units: Vec<Element>,
}

impl StarHom {
    /// Wraps images of matrix units without checking multiplicativity.
    pub fn new(source: FdAlgebra, target: FdAlgebra, units: Vec<Element>) -> Result<Self> {
        if units.len() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a source of dimension {}",
                units.len(),
                source.dim()
            )));
        }
        if units.iter().any(|u| !u.conforms(&target)) {
            return Err(Error::ShapeMismatch {
                expected: target.block_sizes().to_vec(),
            });
        }
        Ok(StarHom {
            source,
            target,
            units,
        })
    }

    /// Builds the map from a function evaluated on the matrix units.
    pub fn from_fn(source: FdAlgebra, target: FdAlgebra, f: impl Fn(&Element) -> Element) -> Result<Self> {
        let units = source
            .matrix_units()
            .into_iter()
            .map(|u| f(&source.matrix_unit(u)))
            .collect();
        StarHom::new(source, target, units)
    }

    /// Like `new`, but rejects maps that are not *-homomorphisms within `tol`.
    pub fn validated(source: FdAlgebra, target: FdAlgebra, units: Vec<Element>, tol: f64) -> Result<Self> {
        let h = StarHom::new(source, target, units)?;
        let residual = h.homomorphism_residual();
        if residual > tol {
            return Err(Error::NotHomomorphism { residual });
        }
        Ok(h)
    }

    pub fn identity(algebra: &FdAlgebra) -> Self {
        StarHom::from_fn(algebra.clone(), algebra.clone(), |x| x.clone()).expect("identity conforms")
    }

    pub fn source(&self) -> &FdAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FdAlgebra {
        &self.target
    }

    pub fn unit_image(&self, unit: MatrixUnit) -> &Element {
        let offset: usize = self.source.block_sizes()[..unit.block]
            .iter()
            .map(|n| n * n)
            .sum();
        let n = self.source.block_size(unit.block);
        &self.units[offset + unit.row * n + unit.col]
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut y = self.target.zero();
        for (c, u) in x.coordinates().into_iter().zip(&self.units) {
            if c != ZERO {
                y = &y + &u.scale(c);
            }
        }
        y
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &StarHom) -> Result<StarHom> {
        if other.target != self.source {
            return Err(Error::AlgebraMismatch);
        }
        let units = other.units.iter().map(|u| self.apply(u)).collect();
        StarHom::new(other.source.clone(), self.target.clone(), units)
    }

    /// Worst deviation from multiplicativity and adjoint preservation on
    /// pairs of matrix units.
    pub fn homomorphism_residual(&self) -> f64 {
        let units = self.source.matrix_units();
        let mut worst: f64 = 0.0;
        for (a, ua) in units.iter().zip(&self.units) {
            let adj = MatrixUnit {
                block: a.block,
                row: a.col,
                col: a.row,
            };
            worst = worst.max(self.unit_image(adj).distance(&ua.adjoint()));
            for (b, ub) in units.iter().zip(&self.units) {
                if a.block != b.block {
                    worst = worst.max((ua * ub).norm());
                    continue;
                }
                let prod = &(ua * ub);
                let expected = if a.col == b.row {
                    self.unit_image(MatrixUnit {
                        block: a.block,
                        row: a.row,
                        col: b.col,
                    })
                    .clone()
                } else {
                    self.target.zero()
                };
                worst = worst.max(prod.distance(&expected));
            }
        }
        worst
    }

    /// The image of the minimal projection `e_00` of a source block.
    pub fn minimal_projection_image(&self, block: usize) -> &Element {
        self.unit_image(MatrixUnit {
            block,
            row: 0,
            col: 0,
        })
    }

    /// Concrete matrices of a representation into `M_d` (target must have
    /// a single block).
    pub fn as_matrices(&self) -> Vec<Mat> {
        self.units.iter().map(|u| u.to_matrix()).collect()
    }
}

/// Representation of `source` on `C^d` given by concrete images of its
/// matrix units.
pub fn representation(source: FdAlgebra, images: Vec<Mat>) -> Result<StarHom> {
    let d = images.first().map(|m| m.nrows()).unwrap_or(0);
    let target = if d == 0 {
        FdAlgebra::commutative(0)
    } else {
        FdAlgebra::full_matrix(d)?
    };
    let units = images
        .into_iter()
        .map(|m| {
            if d == 0 {
                Ok(target.zero())
            } else {
                Element::from_blocks(vec![m])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    StarHom::new(source, target, units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn diagonal_embedding_is_a_homomorphism() {
        // C^2 -> M_2 as diagonal matrices
        let src = FdAlgebra::commutative(2);
        let tgt = FdAlgebra::full_matrix(2).unwrap();
        let h = StarHom::from_fn(src, tgt, |x| {
            let mut m = Mat::zeros(2, 2);
            m[(0, 0)] = x.block(0)[(0, 0)];
            m[(1, 1)] = x.block(1)[(0, 0)];
            Element::from_blocks(vec![m]).unwrap()
        })
        .unwrap();
        assert!(h.homomorphism_residual() < 1e-14);
    }

    #[test]
    fn non_multiplicative_map_is_flagged() {
        let src = FdAlgebra::commutative(1);
        let tgt = FdAlgebra::commutative(1);
        let two = Element::from_blocks(vec![Mat::from_element(1, 1, ONE * 2.0)]).unwrap();
        let err = StarHom::validated(src, tgt, vec![two], 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotHomomorphism { .. }));
    }

    #[test]
    fn composition_applies_right_to_left() {
        let a = FdAlgebra::commutative(2);
        let swap = StarHom::from_fn(a.clone(), a.clone(), |x| {
            Element::from_blocks(vec![x.block(1).clone(), x.block(0).clone()]).unwrap()
        })
        .unwrap();
        let id = swap.compose(&swap).unwrap();
        assert_eq!(id, StarHom::identity(&a));
    }
}
