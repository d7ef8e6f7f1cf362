//! Finite-dimensional C*-algebras as direct sums of full matrix blocks,
//! their ideals, and partial automorphisms between ideals.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, spectral_norm, unitarity_residual, Mat, Vector, C64, ONE, ZERO};

/// Blocks whose norm is below this fraction of the element norm count as zero
/// when testing membership in an ideal.
pub const SUPPORT_EPS: f64 = 1e-12;

/// The algebra `M_{n_1} ⊕ ... ⊕ M_{n_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FdAlgebra {
    block_sizes: Vec<usize>,
}

/// A matrix unit `e_{row,col}` in a given block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl FdAlgebra {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if let Some(i) = block_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidBlockSizes(format!("block {i} has size 0")));
        }
        Ok(FdAlgebra { block_sizes })
    }

    /// `C^k`.
    pub fn commutative(k: usize) -> Self {
        FdAlgebra {
            block_sizes: vec![1; k],
        }
    }

    /// `M_n`.
    pub fn full_matrix(n: usize) -> Result<Self> {
        FdAlgebra::new(vec![n])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_size(&self, i: usize) -> usize {
        self.block_sizes[i]
    }

    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|n| n * n).sum()
    }

    /// Dimension of the defining (block-diagonal) representation.
    pub fn carrier_dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn carrier_offset(&self, block: usize) -> usize {
        self.block_sizes[..block].iter().sum()
    }

    pub fn check_block(&self, index: usize) -> Result<()> {
        if index >= self.num_blocks() {
            return Err(Error::BlockOutOfRange {
                index,
                blocks: self.num_blocks(),
            });
        }
        Ok(())
    }

    pub fn zero(&self) -> Element {
        Element {
            blocks: self.block_sizes.iter().map(|&n| Mat::zeros(n, n)).collect(),
        }
    }

    pub fn one(&self) -> Element {
        Element {
            blocks: self.block_sizes.iter().map(|&n| Mat::identity(n, n)).collect(),
        }
    }

    pub fn matrix_units(&self) -> Vec<MatrixUnit> {
        let mut units = Vec::with_capacity(self.dim());
        for (block, &n) in self.block_sizes.iter().enumerate() {
            for row in 0..n {
                for col in 0..n {
                    units.push(MatrixUnit { block, row, col });
                }
            }
        }
        units
    }

    pub fn matrix_unit(&self, unit: MatrixUnit) -> Element {
        let mut e = self.zero();
        e.blocks[unit.block][(unit.row, unit.col)] = ONE;
        e
    }

    /// Uniformly random entries in the unit square on every block.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Element {
        Element {
            blocks: self
                .block_sizes
                .iter()
                .map(|&n| linalg::random_matrix(n, n, rng))
                .collect(),
        }
    }

    pub fn element_from_coordinates(&self, coords: &[C64]) -> Result<Element> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        let mut blocks = Vec::with_capacity(self.num_blocks());
        let mut offset = 0;
        for &n in &self.block_sizes {
            blocks.push(Mat::from_row_slice(n, n, &coords[offset..offset + n * n]));
            offset += n * n;
        }
        Ok(Element { blocks })
    }

    /// Splits a block-diagonal matrix on the carrier space into blocks.
    pub fn element_from_matrix(&self, m: &Mat) -> Result<Element> {
        let d = self.carrier_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::ShapeMismatch {
                expected: self.block_sizes.clone(),
            });
        }
        let mut blocks = Vec::with_capacity(self.num_blocks());
        let mut offset = 0;
        for &n in &self.block_sizes {
            blocks.push(m.view((offset, offset), (n, n)).into_owned());
            offset += n;
        }
        Ok(Element { blocks })
    }
}

/// An element of a block algebra, stored block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    blocks: Vec<Mat>,
}

impl Element {
    pub fn from_blocks(blocks: Vec<Mat>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.nrows() != b.ncols() || b.nrows() == 0 {
                return Err(Error::InvalidBlockSizes(format!(
                    "block {i} is {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Element { blocks })
    }

    pub fn algebra(&self) -> FdAlgebra {
        FdAlgebra {
            block_sizes: self.blocks.iter().map(|b| b.nrows()).collect(),
        }
    }

    pub fn conforms(&self, algebra: &FdAlgebra) -> bool {
        self.blocks.len() == algebra.num_blocks()
            && self
                .blocks
                .iter()
                .zip(algebra.block_sizes())
                .all(|(b, &n)| b.nrows() == n)
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Mat {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut Mat {
        &mut self.blocks[i]
    }

    pub fn adjoint(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    /// C*-norm: the largest spectral norm over the blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|c| *c == ZERO))
    }

    /// Blocks on which the element is (numerically) nonzero.
    pub fn support(&self) -> BTreeSet<usize> {
        let scale = self.norm().max(1.0);
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| spectral_norm(b) > SUPPORT_EPS * scale)
            .map(|(i, _)| i)
            .collect()
    }

    /// Row-major coordinates in the matrix-unit basis.
    pub fn coordinates(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out.push(b[(r, c)]);
                }
            }
        }
        out
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_vec(self.coordinates())
    }

    /// Trace pairing `Σ_i tr(a_i^* b_i)`.
    pub fn hs_inner(&self, other: &Element) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| linalg::hs_inner(a, b))
            .sum()
    }

    /// Block-diagonal matrix on the carrier space `C^{Σ n_i}`.
    pub fn to_matrix(&self) -> Mat {
        let d: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut m = Mat::zeros(d, d);
        let mut offset = 0;
        for b in &self.blocks {
            let n = b.nrows();
            m.view_mut((offset, offset), (n, n)).copy_from(b);
            offset += n;
        }
        m
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&Mat, &Mat) -> Mat) -> Element {
        assert!(
            self.blocks.len() == other.blocks.len()
                && self
                    .blocks
                    .iter()
                    .zip(&other.blocks)
                    .all(|(a, b)| a.shape() == b.shape()),
            "block structure mismatch"
        );
        Element {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn distance(&self, other: &Element) -> f64 {
        (self - other).norm()
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<&Element> for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// A closed two-sided ideal, i.e. a subset of the blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    algebra: FdAlgebra,
    blocks: BTreeSet<usize>,
}

impl Ideal {
    pub fn new(algebra: FdAlgebra, blocks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let blocks: BTreeSet<usize> = blocks.into_iter().collect();
        for &b in &blocks {
            algebra.check_block(b)?;
        }
        Ok(Ideal { algebra, blocks })
    }

    pub fn zero(algebra: FdAlgebra) -> Self {
        Ideal {
            algebra,
            blocks: BTreeSet::new(),
        }
    }

    pub fn full(algebra: FdAlgebra) -> Self {
        let blocks = (0..algebra.num_blocks()).collect();
        Ideal { algebra, blocks }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &BTreeSet<usize> {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|&b| self.algebra.block_size(b).pow(2))
            .sum()
    }

    /// Product of ideals, which for closed ideals is their intersection.
    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Ideal {
            algebra: self.algebra.clone(),
            blocks: self.blocks.intersection(&other.blocks).cloned().collect(),
        })
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.conforms(&self.algebra) && x.support().is_subset(&self.blocks)
    }

    /// The identity of the ideal: `1` on member blocks, `0` elsewhere.
    pub fn unit(&self) -> Element {
        let mut e = self.algebra.zero();
        for &b in &self.blocks {
            let n = self.algebra.block_size(b);
            e.blocks[b] = Mat::identity(n, n);
        }
        e
    }

    /// Zeroes every block outside the ideal.
    pub fn restrict(&self, x: &Element) -> Element {
        let mut y = x.clone();
        for (i, b) in y.blocks.iter_mut().enumerate() {
            if !self.blocks.contains(&i) {
                b.fill(ZERO);
            }
        }
        y
    }

    /// The ideal as an algebra in its own right, blocks in ascending order.
    pub fn as_algebra(&self) -> FdAlgebra {
        FdAlgebra {
            block_sizes: self.blocks.iter().map(|&b| self.algebra.block_size(b)).collect(),
        }
    }

    /// Inclusion of `as_algebra()` into the ambient algebra.
    pub fn embed(&self, x: &Element) -> Element {
        let mut y = self.algebra.zero();
        for (k, &b) in self.blocks.iter().enumerate() {
            y.blocks[b] = x.blocks[k].clone();
        }
        y
    }

    /// Left inverse of `embed`.
    pub fn compress(&self, x: &Element) -> Element {
        Element {
            blocks: self.blocks.iter().map(|&b| x.blocks[b].clone()).collect(),
        }
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Element {
        self.restrict(&self.algebra.random_element(rng))
    }
}

/// Whether the domain chains `D_n` vanish beyond some level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainBound {
    /// `D_n = {0}` for all `|n| ≥ N`.
    Bounded(usize),
    Unbounded,
}

impl ChainBound {
    pub fn finite(self) -> Option<usize> {
        match self {
            ChainBound::Bounded(n) => Some(n),
            ChainBound::Unbounded => None,
        }
    }
}

/// A partial automorphism `θ: I → J`, stored as a block bijection plus a
/// unitary per source block: `θ(x)_{σ(i)} = u_i x_i u_i^*`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialAutomorphism {
    algebra: FdAlgebra,
    source: Ideal,
    target: Ideal,
    block_map: BTreeMap<usize, usize>,
    inverse_map: BTreeMap<usize, usize>,
    unitaries: BTreeMap<usize, Mat>,
}

impl PartialAutomorphism {
    /// Validates the block map and unitaries (unitarity within `tol`).
    pub fn new(
        algebra: FdAlgebra,
        block_map: BTreeMap<usize, usize>,
        mut unitaries: BTreeMap<usize, Mat>,
        tol: f64,
    ) -> Result<Self> {
        let mut inverse_map = BTreeMap::new();
        for (&i, &j) in &block_map {
            algebra.check_block(i)?;
            algebra.check_block(j)?;
            if algebra.block_size(i) != algebra.block_size(j) {
                return Err(Error::InvalidBlockMap(format!(
                    "block {i} has size {} but its image {j} has size {}",
                    algebra.block_size(i),
                    algebra.block_size(j)
                )));
            }
            if let Some(prev) = inverse_map.insert(j, i) {
                return Err(Error::InvalidBlockMap(format!(
                    "blocks {prev} and {i} both map to {j}"
                )));
            }
        }
        if let Some(extra) = unitaries.keys().find(|k| !block_map.contains_key(k)) {
            return Err(Error::InvalidBlockMap(format!(
                "unitary given for block {extra} outside the domain"
            )));
        }
        for &i in block_map.keys() {
            let n = algebra.block_size(i);
            let u = unitaries.entry(i).or_insert_with(|| Mat::identity(n, n));
            if u.nrows() != n || u.ncols() != n {
                return Err(Error::InvalidBlockMap(format!(
                    "unitary for block {i} is {}x{}, expected {n}x{n}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let residual = unitarity_residual(u);
            if residual > tol {
                return Err(Error::NotUnitary { block: i, residual });
            }
        }
        let source = Ideal::new(algebra.clone(), block_map.keys().cloned())?;
        let target = Ideal::new(algebra.clone(), block_map.values().cloned())?;
        Ok(PartialAutomorphism {
            algebra,
            source,
            target,
            block_map,
            inverse_map,
            unitaries,
        })
    }

    /// Block map with identity unitaries.
    pub fn from_block_map(algebra: FdAlgebra, pairs: &[(usize, usize)]) -> Result<Self> {
        PartialAutomorphism::new(algebra, pairs.iter().cloned().collect(), BTreeMap::new(), 1e-9)
    }

    /// The forward shift on `C^m`: `(x_1, ..., x_{m-1}, 0) ↦ (0, x_1, ..., x_{m-1})`.
    pub fn shift(m: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        PartialAutomorphism::from_block_map(FdAlgebra::commutative(m), &pairs).expect("shift is well formed")
    }

    /// `I = J = {0}`.
    pub fn trivial(algebra: FdAlgebra) -> Self {
        PartialAutomorphism::from_block_map(algebra, &[]).expect("empty map is well formed")
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    /// The ideal `I`.
    pub fn source(&self) -> &Ideal {
        &self.source
    }

    /// The ideal `J`.
    pub fn target(&self) -> &Ideal {
        &self.target
    }

    pub fn block_map(&self) -> &BTreeMap<usize, usize> {
        &self.block_map
    }

    pub fn unitaries(&self) -> &BTreeMap<usize, Mat> {
        &self.unitaries
    }

    pub fn inverse(&self) -> PartialAutomorphism {
        let unitaries = self
            .unitaries
            .iter()
            .map(|(&i, u)| (self.block_map[&i], u.adjoint()))
            .collect();
        PartialAutomorphism {
            algebra: self.algebra.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
            block_map: self.inverse_map.clone(),
            inverse_map: self.block_map.clone(),
            unitaries,
        }
    }

    fn step_forward(&self, x: &Element) -> Element {
        let mut y = self.algebra.zero();
        for (&i, &j) in &self.block_map {
            let u = &self.unitaries[&i];
            y.blocks[j] = u * &x.blocks[i] * u.adjoint();
        }
        y
    }

    fn step_backward(&self, x: &Element) -> Element {
        let mut y = self.algebra.zero();
        for (&j, &i) in &self.inverse_map {
            let u = &self.unitaries[&i];
            y.blocks[i] = u.adjoint() * &x.blocks[j] * u;
        }
        y
    }

    /// `θ^n(x)`, with `θ^0` the identity and `θ^{-n} = (θ^{-1})^n`.
    /// Requires `x ∈ Dom(θ^n) = D_{-n}`.
    pub fn apply(&self, x: &Element, n: i64) -> Result<Element> {
        if !x.conforms(&self.algebra) {
            return Err(Error::ShapeMismatch {
                expected: self.algebra.block_sizes.clone(),
            });
        }
        let domain = self.domain_chain(-n);
        let outside: Vec<usize> = x.support().difference(domain.blocks()).cloned().collect();
        if !outside.is_empty() {
            return Err(Error::DomainViolation {
                power: n,
                blocks: outside,
            });
        }
        Ok(self.apply_unchecked(x, n))
    }

    /// `θ^n` applied after restricting `x` to its domain.
    pub(crate) fn apply_unchecked(&self, x: &Element, n: i64) -> Element {
        let mut y = x.clone();
        if n >= 0 {
            for _ in 0..n {
                y = self.step_forward(&self.source.restrict(&y));
            }
        } else {
            for _ in 0..(-n) {
                y = self.step_backward(&self.target.restrict(&y));
            }
        }
        y
    }

    /// `D_n = Dom(θ^{-n}) = Im(θ^n)`, computed inductively:
    /// `D_{n+1} = θ(D_n ∩ I)` for `n ≥ 0` and `D_{n-1} = θ^{-1}(D_n ∩ J)` for `n ≤ 0`.
    pub fn domain_chain(&self, n: i64) -> Ideal {
        let mut blocks: BTreeSet<usize> = (0..self.algebra.num_blocks()).collect();
        if n >= 0 {
            for _ in 0..n {
                blocks = blocks
                    .iter()
                    .filter_map(|b| self.block_map.get(b).cloned())
                    .collect();
            }
        } else {
            for _ in 0..(-n) {
                blocks = blocks
                    .iter()
                    .filter_map(|b| self.inverse_map.get(b).cloned())
                    .collect();
            }
        }
        Ideal {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// `D_n` as the domain of `θ^{-n}`: blocks from which the inverse map can
    /// be iterated `n` times (or the forward map `|n|` times when `n < 0`).
    pub fn domain_chain_backward(&self, n: i64) -> Ideal {
        let map = if n >= 0 {
            &self.inverse_map
        } else {
            &self.block_map
        };
        let steps = n.unsigned_abs();
        let blocks = (0..self.algebra.num_blocks())
            .filter(|&b| {
                let mut cur = b;
                for _ in 0..steps {
                    match map.get(&cur) {
                        Some(&next) => cur = next,
                        None => return false,
                    }
                }
                true
            })
            .collect();
        Ideal {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Smallest `N ≥ 1` with `D_n = {0}` for every `|n| ≥ N`, or `Unbounded`
    /// when the block map has a cycle.
    pub fn chain_bound(&self) -> ChainBound {
        for &start in self.block_map.keys() {
            let mut cur = start;
            while let Some(&next) = self.block_map.get(&cur) {
                if next == start {
                    return ChainBound::Unbounded;
                }
                cur = next;
            }
        }
        let mut n = 1;
        while !self.domain_chain(n as i64).is_zero() || !self.domain_chain(-(n as i64)).is_zero() {
            n += 1;
        }
        ChainBound::Bounded(n)
    }

    /// Largest deviation from being a multiplicative, adjoint-preserving
    /// isometry on the supplied pairs of elements of `I`.
    pub fn homomorphism_residual(&self, pairs: &[(Element, Element)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, y) in pairs {
            let x = self.source.restrict(x);
            let y = self.source.restrict(y);
            let tx = self.apply_unchecked(&x, 1);
            let ty = self.apply_unchecked(&y, 1);
            let scale = (x.norm() * y.norm()).max(1.0);
            worst = worst.max(self.apply_unchecked(&(&x * &y), 1).distance(&(&tx * &ty)) / scale);
            worst = worst.max(self.apply_unchecked(&x.adjoint(), 1).distance(&tx.adjoint()) / scale);
            worst = worst.max((tx.norm() - x.norm()).abs() / x.norm().max(1.0));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> Element {
        Element::from_blocks(values.iter().map(|&v| Mat::from_element(1, 1, c(v))).collect()).unwrap()
    }

    #[test]
    fn ideal_product_is_intersection() {
        let a = FdAlgebra::commutative(3);
        let p = Ideal::new(a.clone(), [0, 1]).unwrap();
        let q = Ideal::new(a.clone(), [1, 2]).unwrap();
        assert_eq!(p.product(&q).unwrap().blocks(), &BTreeSet::from([1]));
        assert_eq!(p.product(&p).unwrap(), p);
        let r = Ideal::new(a, [2]).unwrap();
        assert!(Ideal::new(FdAlgebra::commutative(3), [0])
            .unwrap()
            .product(&r)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn ideal_product_rejects_foreign_algebra() {
        let p = Ideal::full(FdAlgebra::commutative(2));
        let q = Ideal::full(FdAlgebra::commutative(3));
        assert_eq!(p.product(&q), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn shift_squared_moves_two_places() {
        let theta = PartialAutomorphism::shift(3);
        let x = diag(&[5.0, 0.0, 0.0]);
        let y = theta.apply(&x, 2).unwrap();
        assert_eq!(y, diag(&[0.0, 0.0, 5.0]));
        assert_eq!(theta.apply(&x, 0).unwrap(), x);
    }

    #[test]
    fn apply_rejects_domain_violation() {
        let theta = PartialAutomorphism::shift(3);
        let x = diag(&[0.0, 1.0, 0.0]);
        assert!(matches!(
            theta.apply(&x, 2),
            Err(Error::DomainViolation { power: 2, .. })
        ));
        assert_eq!(theta.apply(&x, -1).unwrap(), diag(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn unit_of_domain_maps_to_unit_of_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = FdAlgebra::new(vec![2, 2, 1]).unwrap();
        let u = linalg::random_unitary(2, &mut rng);
        let theta =
            PartialAutomorphism::new(a, BTreeMap::from([(0, 1)]), BTreeMap::from([(0, u)]), 1e-9).unwrap();
        let image = theta.apply(&theta.source().unit(), 1).unwrap();
        assert!(image.distance(&theta.target().unit()) < 1e-12);
    }

    #[test]
    fn shift_domain_chain_has_leading_zeros() {
        let theta = PartialAutomorphism::shift(4);
        for n in 0..4i64 {
            let expected: BTreeSet<usize> = (n as usize..4).collect();
            assert_eq!(theta.domain_chain(n).blocks(), &expected);
            let trailing: BTreeSet<usize> = (0..4 - n as usize).collect();
            assert_eq!(theta.domain_chain(-n).blocks(), &trailing);
        }
        assert!(theta.domain_chain(4).is_zero());
    }

    #[test]
    fn disjoint_ideals_kill_chain_beyond_one() {
        // I = {0}, J = {1}, θ swaps into a disjoint block.
        let theta = PartialAutomorphism::from_block_map(FdAlgebra::commutative(3), &[(0, 1)]).unwrap();
        assert!(!theta.domain_chain(1).is_zero());
        for n in [2i64, -2, 3, -3] {
            assert!(theta.domain_chain(n).is_zero());
        }
        assert_eq!(theta.chain_bound(), ChainBound::Bounded(2));
    }

    #[test]
    fn chain_bounds() {
        assert_eq!(
            PartialAutomorphism::shift(5).chain_bound(),
            ChainBound::Bounded(5)
        );
        let auto = PartialAutomorphism::from_block_map(FdAlgebra::commutative(2), &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(auto.chain_bound(), ChainBound::Unbounded);
        let zero = PartialAutomorphism::trivial(FdAlgebra::commutative(2));
        assert_eq!(zero.chain_bound(), ChainBound::Bounded(1));
        assert!(zero.domain_chain(1).is_zero() && zero.domain_chain(-1).is_zero());
        assert_eq!(zero.domain_chain(0), Ideal::full(FdAlgebra::commutative(2)));
    }

    #[test]
    fn shift_chain_bound_matches_iteration() {
        for m in 1..7 {
            let theta = PartialAutomorphism::shift(m);
            let first_zero = (1..).find(|&n| theta.domain_chain(n).is_zero()).unwrap();
            assert_eq!(theta.chain_bound(), ChainBound::Bounded(first_zero as usize));
        }
    }

    #[test]
    fn rejects_size_mismatch_and_non_unitary() {
        let a = FdAlgebra::new(vec![1, 2]).unwrap();
        assert!(matches!(
            PartialAutomorphism::from_block_map(a.clone(), &[(0, 1)]),
            Err(Error::InvalidBlockMap(_))
        ));
        let b = FdAlgebra::new(vec![2, 2]).unwrap();
        let bad = Mat::identity(2, 2) * c(2.0);
        assert!(matches!(
            PartialAutomorphism::new(b, BTreeMap::from([(0, 1)]), BTreeMap::from([(0, bad)]), 1e-9),
            Err(Error::NotUnitary { block: 0, .. })
        ));
    }

    #[test]
    fn rejects_non_injective_map() {
        let a = FdAlgebra::commutative(3);
        assert!(PartialAutomorphism::from_block_map(a, &[(0, 2), (1, 2)]).is_err());
    }

    #[test]
    fn theta_is_isometric_star_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = FdAlgebra::new(vec![3, 3, 2]).unwrap();
        let u = linalg::random_unitary(3, &mut rng);
        let theta = PartialAutomorphism::new(
            a.clone(),
            BTreeMap::from([(0, 1)]),
            BTreeMap::from([(0, u)]),
            1e-9,
        )
        .unwrap();
        let pairs: Vec<_> = (0..20)
            .map(|_| (a.random_element(&mut rng), a.random_element(&mut rng)))
            .collect();
        assert!(theta.homomorphism_residual(&pairs) < 1e-9);
    }

    #[test]
    fn ideal_embed_compress_round_trip() {
        let a = FdAlgebra::new(vec![1, 2, 3]).unwrap();
        let i = Ideal::new(a.clone(), [0, 2]).unwrap();
        assert_eq!(i.as_algebra().block_sizes(), &[1, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = i.as_algebra().random_element(&mut rng);
        assert_eq!(i.compress(&i.embed(&x)), x);
        assert!(i.contains(&i.embed(&x)));
        assert!(!i.contains(&a.one()));
    }
}
