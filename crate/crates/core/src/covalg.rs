//! The involutive algebra `L` of a partial automorphism, its regular
//! representation, and the concrete realization of the covariance algebra
//! when the domain chains terminate.
//!
//! An element of `L` is a finitely supported sequence `n ↦ a(n)` with
//! `a(n) ∈ D_n`. Products and adjoints follow the twisted convolution
//!
//! ```text
//! (a * b)(n) = Σ_k θ^k(θ^{-k}(a(k)) b(n-k)),     (a*)(n) = θ^n(a(-n)^*).
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::{ChainBound, Element, FdAlgebra, PartialAutomorphism};
use crate::error::{Error, Result};
use crate::hom::StarHom;
use crate::linalg::{self, Mat, Tolerances, Vector, C64, ZERO};
use crate::wedderburn::{wedderburn, Decomposition, WedderburnOptions};

/// A finitely supported `D_n`-valued sequence.
#[derive(Clone, Debug)]
pub struct LElement {
    system: Arc<PartialAutomorphism>,
    terms: BTreeMap<i64, Element>,
}

fn same_system(a: &Arc<PartialAutomorphism>, b: &Arc<PartialAutomorphism>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LElement {
    /// Checks that every term lies in the matching `D_n`; zero terms are dropped.
    pub fn new(system: Arc<PartialAutomorphism>, terms: BTreeMap<i64, Element>) -> Result<Self> {
        for (&n, a) in &terms {
            if !a.conforms(system.algebra()) {
                return Err(Error::ShapeMismatch {
                    expected: system.algebra().block_sizes().to_vec(),
                });
            }
            let d = system.domain_chain(n);
            let outside: Vec<usize> = a.support().difference(d.blocks()).cloned().collect();
            if !outside.is_empty() {
                return Err(Error::DomainViolation {
                    power: -n,
                    blocks: outside,
                });
            }
        }
        Ok(LElement::from_terms(system, terms))
    }

    fn from_terms(system: Arc<PartialAutomorphism>, terms: BTreeMap<i64, Element>) -> Self {
        let terms = terms.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        LElement { system, terms }
    }

    pub fn zero(system: Arc<PartialAutomorphism>) -> Self {
        LElement {
            system,
            terms: BTreeMap::new(),
        }
    }

    /// `a δ_n`.
    pub fn monomial(system: Arc<PartialAutomorphism>, a: Element, n: i64) -> Result<Self> {
        LElement::new(system, BTreeMap::from([(n, a)]))
    }

    /// The unit `1_A δ_0`.
    pub fn one(system: Arc<PartialAutomorphism>) -> Self {
        let one = system.algebra().one();
        LElement::from_terms(system, BTreeMap::from([(0, one)]))
    }

    pub fn system(&self) -> &Arc<PartialAutomorphism> {
        &self.system
    }

    pub fn terms(&self) -> &BTreeMap<i64, Element> {
        &self.terms
    }

    /// `a(n)`, zero outside the support.
    pub fn term(&self, n: i64) -> Element {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| self.system.algebra().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_system(&self, other: &LElement) -> Result<()> {
        if same_system(&self.system, &other.system) {
            Ok(())
        } else {
            Err(Error::SystemMismatch)
        }
    }

    fn combine(&self, other: &LElement, f: impl Fn(&Element, &Element) -> Element) -> Result<LElement> {
        self.check_system(other)?;
        let zero = self.system.algebra().zero();
        let mut terms = BTreeMap::new();
        for n in self.terms.keys().chain(other.terms.keys()) {
            if terms.contains_key(n) {
                continue;
            }
            let a = self.terms.get(n).unwrap_or(&zero);
            let b = other.terms.get(n).unwrap_or(&zero);
            terms.insert(*n, f(a, b));
        }
        Ok(LElement::from_terms(self.system.clone(), terms))
    }

    pub fn add(&self, other: &LElement) -> Result<LElement> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LElement) -> Result<LElement> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> LElement {
        let terms = self.terms.iter().map(|(&n, a)| (n, a.scale(c))).collect();
        LElement::from_terms(self.system.clone(), terms)
    }

    /// The twisted convolution product.
    pub fn mul(&self, other: &LElement) -> Result<LElement> {
        self.check_system(other)?;
        let theta = &self.system;
        let mut terms: BTreeMap<i64, Element> = BTreeMap::new();
        for (&k, a) in &self.terms {
            let pulled = theta.apply_unchecked(a, -k);
            for (&m, b) in &other.terms {
                let c = theta.apply_unchecked(&(&pulled * b), k);
                let n = k + m;
                match terms.get_mut(&n) {
                    Some(t) => *t = &*t + &c,
                    None => {
                        terms.insert(n, c);
                    }
                }
            }
        }
        Ok(LElement::from_terms(self.system.clone(), terms))
    }

    pub fn star(&self) -> LElement {
        let terms = self
            .terms
            .iter()
            .map(|(&n, a)| (-n, self.system.apply_unchecked(&a.adjoint(), -n)))
            .collect();
        LElement::from_terms(self.system.clone(), terms)
    }

    /// `Σ_n ‖a(n)‖`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Element::norm).sum()
    }

    /// ℓ1 distance.
    pub fn distance(&self, other: &LElement) -> Result<f64> {
        Ok(self.sub(other)?.l1_norm())
    }

    /// `E(a) = a(0) δ_0`.
    pub fn cond_expect(&self) -> LElement {
        self.spectral_component(0)
    }

    /// `a(n) δ_n`.
    pub fn spectral_component(&self, n: i64) -> LElement {
        let terms = self
            .terms
            .get(&n)
            .map(|a| BTreeMap::from([(n, a.clone())]))
            .unwrap_or_default();
        LElement::from_terms(self.system.clone(), terms)
    }

    /// `α_z(a)(n) = z^n a(n)`; `|z|` must be 1 within `tol`.
    pub fn dual_act(&self, z: C64, tol: f64) -> Result<LElement> {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > tol {
            return Err(Error::NotUnitModulus { modulus });
        }
        let terms = self
            .terms
            .iter()
            .map(|(&n, a)| (n, a.scale(z.powi(n as i32))))
            .collect();
        Ok(LElement::from_terms(self.system.clone(), terms))
    }

    /// A random element supported on `|n| ≤ max_level`, one random term in
    /// each nonzero `D_n`.
    pub fn random<R: Rng>(system: Arc<PartialAutomorphism>, max_level: usize, rng: &mut R) -> Self {
        let k = max_level as i64;
        let terms = (-k..=k)
            .map(|n| (n, system.domain_chain(n).random_element(rng)))
            .collect();
        LElement::from_terms(system, terms)
    }

    /// `x δ_n` with `x` a random element of `D_n`.
    pub fn random_monomial<R: Rng>(system: Arc<PartialAutomorphism>, n: i64, rng: &mut R) -> Self {
        let x = system.domain_chain(n).random_element(rng);
        LElement::from_terms(system, BTreeMap::from([(n, x)]))
    }
}

/// The canonical partial isometry `u = θ(e_I) δ_1 = e_J δ_1`.
pub fn u_element(system: Arc<PartialAutomorphism>) -> LElement {
    let e = system.target().unit();
    LElement::from_terms(system, BTreeMap::from([(1, e)]))
}

/// A basis element `e δ_n` of `L`, with `e` a matrix unit of a block of `D_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LBasisElement {
    pub level: i64,
    pub unit: crate::algebra::MatrixUnit,
}

/// Matrix-unit basis of `L` (finite only when the chains terminate).
pub fn l_basis(system: &PartialAutomorphism) -> Result<Vec<LBasisElement>> {
    let bound = system.chain_bound().finite().ok_or(Error::UnboundedChain)? as i64;
    let alg = system.algebra();
    let mut out = Vec::new();
    for n in (1 - bound)..bound {
        let d = system.domain_chain(n);
        for unit in alg.matrix_units() {
            if d.blocks().contains(&unit.block) {
                out.push(LBasisElement { level: n, unit });
            }
        }
    }
    Ok(out)
}

impl LBasisElement {
    pub fn to_l(&self, system: Arc<PartialAutomorphism>) -> LElement {
        let e = system.algebra().matrix_unit(self.unit);
        LElement::from_terms(system, BTreeMap::from([(self.level, e)]))
    }
}

/// The representation of `L` induced from the identity representation of
/// `A` on `C^d`, on the carrier `⊕_{|n| ≤ N} K_n` with `K_n = π(D_{-n}) C^d`.
#[derive(Clone, Debug)]
pub struct RegularRep {
    system: Arc<PartialAutomorphism>,
    level: usize,
    /// Start of each `(n, block)` stretch of coordinates in the carrier.
    offsets: BTreeMap<(i64, usize), usize>,
    /// Level of every carrier coordinate.
    grading: Vec<i64>,
    level_dims: BTreeMap<i64, usize>,
}

impl RegularRep {
    /// Requires terminating chains and `level ≥ chain_bound - 1`.
    pub fn new(system: Arc<PartialAutomorphism>, level: Option<usize>) -> Result<Self> {
        let bound = match system.chain_bound() {
            ChainBound::Bounded(n) => n,
            ChainBound::Unbounded => return Err(Error::UnboundedChain),
        };
        let level = level.unwrap_or(bound - 1);
        if level + 1 < bound {
            return Err(Error::LevelTooSmall { level, bound });
        }
        let alg = system.algebra();
        let mut offsets = BTreeMap::new();
        let mut grading = Vec::new();
        let mut level_dims = BTreeMap::new();
        let k = level as i64;
        for n in -k..=k {
            let kn = system.domain_chain(-n);
            let mut dim = 0;
            for &b in kn.blocks() {
                offsets.insert((n, b), grading.len());
                let size = alg.block_size(b);
                grading.extend(std::iter::repeat_n(n, size));
                dim += size;
            }
            level_dims.insert(n, dim);
        }
        Ok(RegularRep {
            system,
            level,
            offsets,
            grading,
            level_dims,
        })
    }

    pub fn system(&self) -> &Arc<PartialAutomorphism> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn carrier_dim(&self) -> usize {
        self.grading.len()
    }

    /// `dim K_n` for `|n| ≤ N`.
    pub fn level_dims(&self) -> &BTreeMap<i64, usize> {
        &self.level_dims
    }

    /// Level of each carrier coordinate; `π̃(a δ_m)` has degree `m`.
    pub fn grading(&self) -> &[i64] {
        &self.grading
    }

    /// `π̃(x δ_m)`, mapping `K_n → K_{n+m}` by `θ^{-n}(θ^{-m}(x) e_{D_n})`.
    pub fn monomial(&self, x: &Element, m: i64) -> Mat {
        let d = self.carrier_dim();
        let mut out = Mat::zeros(d, d);
        let theta = &self.system;
        let pulled = theta.apply_unchecked(x, -m);
        let k = self.level as i64;
        for n in -k..=k {
            let target = n + m;
            if target.abs() > k {
                continue;
            }
            let dn = theta.domain_chain(n).unit();
            let y = theta.apply_unchecked(&(&pulled * &dn), -n);
            for b in y.support() {
                let (Some(&col), Some(&row)) = (self.offsets.get(&(n, b)), self.offsets.get(&(target, b)))
                else {
                    continue;
                };
                let blk = y.block(b);
                out.view_mut((row, col), blk.shape()).copy_from(blk);
            }
        }
        out
    }

    pub fn apply(&self, a: &LElement) -> Mat {
        let d = self.carrier_dim();
        let mut out = Mat::zeros(d, d);
        for (&m, x) in a.terms() {
            out += self.monomial(x, m);
        }
        out
    }

    /// Smallest singular value of the linear map `L → M_d` on the
    /// matrix-unit basis of `L`; positive iff the representation is faithful.
    pub fn faithfulness(&self) -> Result<f64> {
        let basis = l_basis(&self.system)?;
        let d = self.carrier_dim();
        let mut f = Mat::zeros(d * d, basis.len());
        for (j, e) in basis.iter().enumerate() {
            let img = self.apply(&e.to_l(self.system.clone()));
            f.set_column(j, &Vector::from_column_slice(img.as_slice()));
        }
        Ok(linalg::singular_values(&f)
            .first()
            .cloned()
            .unwrap_or(f64::INFINITY))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RealizeOptions {
    pub tol: Tolerances,
    pub seed: u64,
    /// Regular-representation level; defaults to `chain_bound - 1`.
    pub level: Option<usize>,
}

/// `C*(A, Θ)` as a block algebra, with the maps relating it to `L`.
#[derive(Clone, Debug)]
pub struct Realization {
    rep: RegularRep,
    decomposition: Decomposition,
    basis: Vec<LBasisElement>,
    /// Pseudo-inverse of the basis-to-matrix map, for solving back into `L`.
    solve: Mat,
}

/// Realizes the covariance algebra through the regular representation and
/// decomposes it into matrix blocks. The dual action is recorded as the
/// weights of the decomposition.
pub fn realize_covariance(system: Arc<PartialAutomorphism>, opts: &RealizeOptions) -> Result<Realization> {
    let rep = RegularRep::new(system.clone(), opts.level)?;
    let basis = l_basis(&system)?;
    let d = rep.carrier_dim();
    let images: Vec<Mat> = basis.iter().map(|e| rep.apply(&e.to_l(system.clone()))).collect();
    let decomposition = if images.is_empty() {
        wedderburn(&[Mat::zeros(d.max(1), d.max(1))], &WedderburnOptions::default())?
    } else {
        wedderburn(
            &images,
            &WedderburnOptions {
                tol: opts.tol,
                seed: opts.seed,
                grading: Some(rep.grading().to_vec()),
                ..Default::default()
            },
        )?
    };
    let mut f = Mat::zeros(d * d, basis.len());
    for (j, img) in images.iter().enumerate() {
        f.set_column(j, &Vector::from_column_slice(img.as_slice()));
    }
    let solve = if basis.is_empty() {
        Mat::zeros(0, d * d)
    } else {
        f.pseudo_inverse(opts.tol.singular_cutoff)
            .map_err(|e| Error::Precondition(e.to_string()))?
    };
    Ok(Realization {
        rep,
        decomposition,
        basis,
        solve,
    })
}

impl Realization {
    pub fn system(&self) -> &Arc<PartialAutomorphism> {
        self.rep.system()
    }

    pub fn algebra(&self) -> &FdAlgebra {
        self.decomposition.algebra()
    }

    pub fn rep(&self) -> &RegularRep {
        &self.rep
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    /// Weights of the dual action on each block of the realized algebra.
    pub fn dual_weights(&self) -> Vec<Vec<i64>> {
        self.decomposition
            .weights()
            .map(|w| w.to_vec())
            .unwrap_or_default()
    }

    pub fn l_basis(&self) -> &[LBasisElement] {
        &self.basis
    }

    pub fn dim_l(&self) -> usize {
        self.basis.len()
    }

    pub fn concrete(&self, a: &LElement) -> Mat {
        self.rep.apply(a)
    }

    /// Image of `a ∈ L` in the abstract block algebra.
    pub fn to_abstract(&self, a: &LElement) -> Element {
        self.decomposition.to_abstract(&self.rep.apply(a))
    }

    /// Inverse of `to_abstract`.
    pub fn to_l(&self, x: &Element) -> LElement {
        let m = self.decomposition.to_concrete(x);
        let coeffs = &self.solve * Vector::from_column_slice(m.as_slice());
        let system = self.system().clone();
        let alg = system.algebra().clone();
        let mut terms: BTreeMap<i64, Element> = BTreeMap::new();
        for (e, c) in self.basis.iter().zip(coeffs.iter()) {
            if *c == ZERO {
                continue;
            }
            let t = terms.entry(e.level).or_insert_with(|| alg.zero());
            t.block_mut(e.unit.block)[(e.unit.row, e.unit.col)] += *c;
        }
        LElement::from_terms(system, terms)
    }

    /// Operator norm in the (faithful) regular representation.
    pub fn realized_norm(&self, a: &LElement) -> f64 {
        linalg::spectral_norm(&self.rep.apply(a))
    }

    /// The embedding `a ↦ a δ_0` of `A` into the realized algebra.
    pub fn embedding(&self) -> Result<StarHom> {
        let system = self.system().clone();
        StarHom::from_fn(system.algebra().clone(), self.algebra().clone(), |a| {
            self.to_abstract(&LElement::from_terms(
                system.clone(),
                BTreeMap::from([(0, a.clone())]),
            ))
        })
    }

    /// The realized `u`.
    pub fn u(&self) -> Element {
        self.to_abstract(&u_element(self.system().clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> Element {
        Element::from_blocks(
            values
                .iter()
                .map(|&v| Mat::from_element(1, 1, C64::new(v, 0.0)))
                .collect(),
        )
        .unwrap()
    }

    fn shift(m: usize) -> Arc<PartialAutomorphism> {
        Arc::new(PartialAutomorphism::shift(m))
    }

    #[test]
    fn shift_products_on_c2() {
        let s = shift(2);
        let a = LElement::monomial(s.clone(), diag(&[0.0, 5.0]), 1).unwrap();
        let b = LElement::monomial(s.clone(), diag(&[3.0, 0.0]), -1).unwrap();
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        assert_eq!(ab.terms().keys().collect::<Vec<_>>(), vec![&0]);
        assert_eq!(ab.term(0), diag(&[0.0, 15.0]));
        assert_eq!(ba.term(0), diag(&[15.0, 0.0]));
    }

    #[test]
    fn adjoint_of_shift_monomial() {
        let s = shift(2);
        let a = LElement::monomial(s, diag(&[0.0, 5.0]), 1).unwrap();
        let a_star = a.star();
        assert_eq!(a_star.terms().keys().collect::<Vec<_>>(), vec![&-1]);
        assert_eq!(a_star.term(-1), diag(&[5.0, 0.0]));
    }

    #[test]
    fn monomial_outside_domain_is_rejected() {
        let s = shift(2);
        assert!(LElement::monomial(s, diag(&[1.0, 0.0]), 1).is_err());
    }

    #[test]
    fn regular_rep_carrier_dims() {
        let rep = RegularRep::new(shift(2), None).unwrap();
        let dims: Vec<usize> = rep.level_dims().values().cloned().collect();
        assert_eq!(dims, vec![1, 2, 1]);
        assert!(RegularRep::new(shift(3), Some(1)).is_err());
    }

    #[test]
    fn shift_realizes_full_matrix_algebra() {
        for m in 2..=4 {
            let r = realize_covariance(shift(m), &RealizeOptions::default()).unwrap();
            assert_eq!(r.algebra().block_sizes(), &[m]);
        }
    }

    #[test]
    fn u_relations_hold_in_l() {
        let s = shift(3);
        let u = u_element(s.clone());
        let e_i = LElement::monomial(s.clone(), s.source().unit(), 0).unwrap();
        let e_j = LElement::monomial(s.clone(), s.target().unit(), 0).unwrap();
        assert!(u.star().mul(&u).unwrap().distance(&e_i).unwrap() < 1e-14);
        assert!(u.mul(&u.star()).unwrap().distance(&e_j).unwrap() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = s.source().random_element(&mut rng);
        let xl = LElement::monomial(s.clone(), x.clone(), 0).unwrap();
        let lhs = u.mul(&xl).unwrap().mul(&u.star()).unwrap();
        let rhs = LElement::monomial(s.clone(), s.apply(&x, 1).unwrap(), 0).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn to_l_inverts_to_abstract() {
        let s = shift(3);
        let r = realize_covariance(s.clone(), &RealizeOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = LElement::random(s, 2, &mut rng);
        let back = r.to_l(&r.to_abstract(&a));
        assert!(back.distance(&a).unwrap() < 1e-9);
    }

    #[test]
    fn trivial_system_realizes_a() {
        let a = FdAlgebra::new(vec![1, 2]).unwrap();
        let s = Arc::new(PartialAutomorphism::trivial(a));
        let r = realize_covariance(s, &RealizeOptions::default()).unwrap();
        assert_eq!(r.algebra().block_sizes(), &[1, 2]);
    }

    #[test]
    fn dual_action_rejects_off_circle() {
        let s = shift(2);
        let a = LElement::one(s);
        assert!(matches!(
            a.dual_act(C64::new(2.0, 0.0), 1e-9),
            Err(Error::NotUnitModulus { .. })
        ));
    }
}
