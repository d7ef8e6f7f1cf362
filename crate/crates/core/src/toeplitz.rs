//! The Toeplitz extension `0 → Λ → 𝓔 → B → 0` of the covariance algebra
//! `B = C*(A, Θ)`, in an exact symbol-plus-correction model.
//!
//! An element is `Σ_k s_k ⊗ T_k + Σ_{ij} c_ij ⊗ e_ij` on `H ⊗ ℓ²(N*)` with
//! `T_k = S^k` for `k ≥ 0`, `T_k = S*^{|k|}` for `k < 0` and `e_ij` the
//! matrix units (`i, j ≥ 1`). Products use `S*S = 1` and
//!
//! ```text
//! S^a S*^b = T_{a-b} - Σ_{j ≤ b, j+a-b ≥ 1} e_{j+a-b, j}
//! e_ij = S^{i-1} S*^{j-1} - S^i S*^j
//! ```
//!
//! so the correction spill of every product is captured exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Element, FdAlgebra, Ideal, PartialAutomorphism};
use crate::covalg::{realize_covariance, LElement, Realization, RealizeOptions};
use crate::error::{Error, Result};
use crate::hom::{representation, StarHom};
use crate::linalg::{self, spectral_norm, Mat, Subspace, Tolerances, Vector, C64, ONE};
use crate::report::Check;
use crate::structure::{
    product_span, verify_structure_theorem, CircleAction, StructureOptions, StructureReport,
};
use crate::wedderburn::{wedderburn, Decomposition, WedderburnOptions};

/// `Σ_k s_k ⊗ T_k + Σ_{ij} c_ij ⊗ e_ij` with coefficients in a block algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzElement {
    algebra: FdAlgebra,
    symbol: BTreeMap<i64, Element>,
    correction: BTreeMap<(usize, usize), Element>,
}

impl ToeplitzElement {
    pub fn zero(algebra: FdAlgebra) -> Self {
        ToeplitzElement {
            algebra,
            symbol: BTreeMap::new(),
            correction: BTreeMap::new(),
        }
    }

    /// `s ⊗ T_k`.
    pub fn symbol_term(algebra: &FdAlgebra, s: Element, k: i64) -> Result<Self> {
        let mut x = ToeplitzElement::zero(algebra.clone());
        x.check(&s)?;
        x.add_symbol(k, s);
        Ok(x)
    }

    /// `c ⊗ e_ij` with `i, j ≥ 1`.
    pub fn correction_term(algebra: &FdAlgebra, c: Element, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 {
            return Err(Error::Precondition(format!(
                "matrix units are indexed from 1, got e_({i},{j})"
            )));
        }
        let mut x = ToeplitzElement::zero(algebra.clone());
        x.check(&c)?;
        x.add_correction(i, j, c);
        Ok(x)
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.conforms(&self.algebra) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.algebra.block_sizes().to_vec(),
            })
        }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn symbol(&self) -> &BTreeMap<i64, Element> {
        &self.symbol
    }

    pub fn correction(&self) -> &BTreeMap<(usize, usize), Element> {
        &self.correction
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_empty() && self.correction.is_empty()
    }

    /// Membership in `Λ`: the symbol vanishes.
    pub fn lambda_membership(&self) -> bool {
        self.symbol.is_empty()
    }

    /// Largest shift or matrix-unit index that occurs.
    pub fn max_shift(&self) -> usize {
        let s = self
            .symbol
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let c = self.correction.keys().map(|&(i, j)| i.max(j)).max().unwrap_or(0);
        s.max(c)
    }

    fn add_symbol(&mut self, k: i64, s: Element) {
        let merged = match self.symbol.remove(&k) {
            Some(t) => &t + &s,
            None => s,
        };
        if !merged.is_zero() {
            self.symbol.insert(k, merged);
        }
    }

    fn add_correction(&mut self, i: usize, j: usize, c: Element) {
        let merged = match self.correction.remove(&(i, j)) {
            Some(t) => &t + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.correction.insert((i, j), merged);
        }
    }

    fn same_algebra(&self, other: &ToeplitzElement) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &ToeplitzElement) -> Result<ToeplitzElement> {
        self.same_algebra(other)?;
        let mut out = self.clone();
        for (&k, s) in &other.symbol {
            out.add_symbol(k, s.clone());
        }
        for (&(i, j), c) in &other.correction {
            out.add_correction(i, j, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, z: C64) -> ToeplitzElement {
        let mut out = ToeplitzElement::zero(self.algebra.clone());
        for (&k, s) in &self.symbol {
            out.add_symbol(k, s.scale(z));
        }
        for (&(i, j), c) in &self.correction {
            out.add_correction(i, j, c.scale(z));
        }
        out
    }

    pub fn sub(&self, other: &ToeplitzElement) -> Result<ToeplitzElement> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// The product, by exhaustive rule application on support pairs.
    pub fn t_mul(&self, other: &ToeplitzElement) -> Result<ToeplitzElement> {
        self.same_algebra(other)?;
        let mut out = ToeplitzElement::zero(self.algebra.clone());
        for (&a, s) in &self.symbol {
            for (&b, t) in &other.symbol {
                let p = s * t;
                if a > 0 && b < 0 {
                    let q = -b;
                    for j in 1..=q {
                        let i = j + a - q;
                        if i >= 1 {
                            out.add_correction(i as usize, j as usize, -&p);
                        }
                    }
                }
                out.add_symbol(a + b, p);
            }
            for (&(i, j), c) in &other.correction {
                let row = i as i64 + a;
                if row >= 1 {
                    out.add_correction(row as usize, j, s * c);
                }
            }
        }
        for (&(i, j), c) in &self.correction {
            for (&b, t) in &other.symbol {
                let col = j as i64 - b;
                if col >= 1 {
                    out.add_correction(i, col as usize, c * t);
                }
            }
            for (&(k, l), d) in &other.correction {
                if j == k {
                    out.add_correction(i, l, c * d);
                }
            }
        }
        Ok(out)
    }

    /// `(s ⊗ T_k)* = s* ⊗ T_{-k}`, `(c ⊗ e_ij)* = c* ⊗ e_ji`.
    pub fn t_star(&self) -> ToeplitzElement {
        let mut out = ToeplitzElement::zero(self.algebra.clone());
        for (&k, s) in &self.symbol {
            out.add_symbol(-k, s.adjoint());
        }
        for (&(i, j), c) in &self.correction {
            out.add_correction(j, i, c.adjoint());
        }
        out
    }

    /// `Σ_k s_k`, the image in `B` after dropping the correction.
    pub fn symbol_sum(&self) -> Element {
        let mut out = self.algebra.zero();
        for s in self.symbol.values() {
            out = &out + s;
        }
        out
    }

    /// Largest coefficient norm of `self - other`.
    pub fn distance(&self, other: &ToeplitzElement) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.symbol
            .values()
            .chain(d.correction.values())
            .map(Element::norm)
            .fold(0.0, f64::max))
    }

    /// Explicit matrix on `C^d ⊗ C^m` (coefficient matrices from `conc`),
    /// i.e. the compression of the operator to the first `m` basis vectors
    /// of `ℓ²(N*)`. Row index is `α m + (j - 1)`.
    pub fn truncated_matrix(&self, conc: impl Fn(&Element) -> Mat, d: usize, m: usize) -> Mat {
        let mut out = Mat::zeros(d * m, d * m);
        for (&k, s) in &self.symbol {
            let t = Mat::from_fn(m, m, |r, c| {
                if r as i64 - c as i64 == k {
                    ONE
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            out += conc(s).kronecker(&t);
        }
        for (&(i, j), c) in &self.correction {
            if i <= m && j <= m {
                let mut e = Mat::zeros(m, m);
                e[(i - 1, j - 1)] = ONE;
                out += conc(c).kronecker(&e);
            }
        }
        out
    }

    /// A random element with symbol shifts in `-k..=k` and corrections in
    /// `1..=k`, coefficients drawn from the whole coefficient algebra.
    pub fn random<R: Rng>(algebra: &FdAlgebra, k: usize, rng: &mut R) -> ToeplitzElement {
        let mut x = ToeplitzElement::zero(algebra.clone());
        let k = k.max(1);
        for _ in 0..rng.random_range(1..=3) {
            let shift = rng.random_range(-(k as i64)..=(k as i64));
            x.add_symbol(shift, algebra.random_element(rng));
        }
        for _ in 0..rng.random_range(0..=3) {
            let i = rng.random_range(1..=k);
            let j = rng.random_range(1..=k);
            x.add_correction(i, j, algebra.random_element(rng));
        }
        x
    }
}

/// First `m` of `m_pad` copies in each carrier coordinate.
fn compress(x: &Mat, d: usize, m_pad: usize, m: usize) -> Mat {
    let idx: Vec<usize> = (0..d).flat_map(|a| (0..m).map(move |j| a * m_pad + j)).collect();
    Mat::from_fn(idx.len(), idx.len(), |r, c| x[(idx[r], idx[c])])
}

/// A linearly independent list of elements together with their span.
#[derive(Clone, Debug)]
pub struct ToeplitzSpan {
    pub elements: Vec<ToeplitzElement>,
    span: Subspace,
}

impl ToeplitzSpan {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.span.contains(v, tol)
    }

    pub fn residual(&self, v: &Vector) -> f64 {
        self.span.residual(v)
    }
}

/// `(A, Θ)` with its realized covariance algebra `B`, the dual grading of
/// `B`, and the layout used to vectorize Toeplitz elements.
#[derive(Clone, Debug)]
pub struct ToeplitzSystem {
    system: Arc<PartialAutomorphism>,
    realization: Realization,
    action: CircleAction,
    embedding: StarHom,
    bound: usize,
    tol: Tolerances,
}

impl ToeplitzSystem {
    /// Requires terminating domain chains.
    pub fn new(system: Arc<PartialAutomorphism>, opts: &RealizeOptions) -> Result<Self> {
        let bound = system.chain_bound().finite().ok_or(Error::UnboundedChain)?;
        let realization = realize_covariance(system.clone(), opts)?;
        let action = CircleAction::new(realization.algebra().clone(), realization.dual_weights())?;
        let embedding = realization.embedding()?;
        Ok(ToeplitzSystem {
            system,
            realization,
            action,
            embedding,
            bound,
            tol: opts.tol,
        })
    }

    pub fn system(&self) -> &Arc<PartialAutomorphism> {
        &self.system
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// `B` with the dual circle action.
    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    pub fn b(&self) -> &FdAlgebra {
        self.realization.algebra()
    }

    pub fn chain_bound(&self) -> usize {
        self.bound
    }

    /// `a ↦ a δ_0`, from `A` into `B`.
    pub fn embed(&self, a: &Element) -> Element {
        self.embedding.apply(a)
    }

    /// The realized `u ∈ B_1`.
    pub fn u(&self) -> Element {
        self.realization.u()
    }

    /// `u ⊗ S`.
    pub fn w(&self) -> ToeplitzElement {
        ToeplitzElement::symbol_term(self.b(), self.u(), 1).expect("u lies in B")
    }

    /// Basis of `B_n` (matrix units of the realized algebra).
    pub fn b_n(&self, n: i64) -> Vec<Element> {
        self.action.spectral_subspace(n).basis
    }

    /// Basis of `B_i B_j^*`.
    pub fn b_i_b_j_star(&self, i: i64, j: i64) -> Vec<Element> {
        let right: Vec<Element> = self.b_n(j).iter().map(Element::adjoint).collect();
        product_span(self.b(), &self.b_n(i), &right, self.tol.identity)
    }

    /// Basis of an ideal of `A`, embedded in `B`.
    pub fn ideal_basis(&self, ideal: &Ideal) -> Vec<Element> {
        let alg = self.system.algebra();
        alg.matrix_units()
            .into_iter()
            .filter(|u| ideal.blocks().contains(&u.block))
            .map(|u| self.embed(&alg.matrix_unit(u)))
            .collect()
    }

    /// Grade-`n` part under `γ`: the grade-`n` part of every coefficient.
    pub fn gamma_component(&self, x: &ToeplitzElement, n: i64) -> ToeplitzElement {
        let mut out = ToeplitzElement::zero(x.algebra.clone());
        for (&k, s) in &x.symbol {
            out.add_symbol(k, self.action.project(s, n));
        }
        for (&(i, j), c) in &x.correction {
            out.add_correction(i, j, self.action.project(c, n));
        }
        out
    }

    /// Residual of `x` from the model of `𝓔`: symbol coefficients of shift
    /// `k` must lie in `B_k`, corrections at `(i, j)` in `B_i B_j^*`.
    pub fn membership_residual(&self, x: &ToeplitzElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (&k, s) in &x.symbol {
            worst = worst.max(self.action.grade_residual(s, k));
        }
        for (&(i, j), c) in &x.correction {
            let span = Subspace::spanned_by(
                self.b().dim(),
                self.b_i_b_j_star(i as i64, j as i64)
                    .iter()
                    .map(Element::to_vector)
                    .collect::<Vec<_>>()
                    .iter(),
                self.tol.identity,
            );
            worst = worst.max(span.residual(&c.to_vector()));
        }
        worst
    }

    /// `φ`: drops the correction and reads the symbol as an element of `L`.
    pub fn quotient_phi(&self, x: &ToeplitzElement) -> LElement {
        self.realization.to_l(&x.symbol_sum())
    }

    fn slots(&self) -> usize {
        let k = self.bound;
        2 * k + 1 + k * k
    }

    /// Coordinates in the fixed layout: shifts `-N..=N`, then corrections
    /// `(i, j)` with `1 ≤ i, j ≤ N`, where `N` is the chain bound.
    pub fn coords(&self, x: &ToeplitzElement) -> Result<Vector> {
        let k = self.bound;
        let dim = self.b().dim();
        let mut v = Vector::zeros(self.slots() * dim);
        let mut put = |slot: usize, e: &Element| {
            v.rows_mut(slot * dim, dim).copy_from(&e.to_vector());
        };
        for (&s, e) in &x.symbol {
            if s.unsigned_abs() as usize > k {
                return Err(Error::Precondition(format!(
                    "shift {s} beyond the chain bound {k}"
                )));
            }
            put((s + k as i64) as usize, e);
        }
        for (&(i, j), e) in &x.correction {
            if i > k || j > k {
                return Err(Error::Precondition(format!(
                    "correction e_({i},{j}) beyond the chain bound {k}"
                )));
            }
            put(2 * k + 1 + (i - 1) * k + (j - 1), e);
        }
        Ok(v)
    }

    /// Independent subset of `elements` spanning the same space.
    pub fn span(&self, elements: impl IntoIterator<Item = ToeplitzElement>) -> Result<ToeplitzSpan> {
        let mut span = Subspace::new(self.slots() * self.b().dim());
        let mut kept = Vec::new();
        for e in elements {
            if span.insert(&self.coords(&e)?, self.tol.identity) {
                kept.push(e);
            }
        }
        Ok(ToeplitzSpan { elements: kept, span })
    }

    /// The *-algebra generated by `gens`: closure under left multiplication
    /// by the generators and their adjoints.
    pub fn generated(&self, gens: &[ToeplitzElement]) -> Result<ToeplitzSpan> {
        let mut all: Vec<ToeplitzElement> = gens.to_vec();
        all.extend(gens.iter().map(ToeplitzElement::t_star));
        let mut out = self.span(all.iter().cloned())?;
        let mut pending: Vec<ToeplitzElement> = out.elements.clone();
        while let Some(x) = pending.pop() {
            for g in &all {
                let p = g.t_mul(&x)?;
                if out.span.insert(&self.coords(&p)?, self.tol.identity) {
                    out.elements.push(p.clone());
                    pending.push(p);
                }
            }
        }
        Ok(out)
    }

    /// `(B_0 ⊗ 1) ∪ (B_1 ⊗ S)`.
    pub fn generators(&self) -> Vec<ToeplitzElement> {
        let b = self.b();
        let mut gens = Vec::new();
        for (n, basis) in [(0, self.b_n(0)), (1, self.b_n(1))] {
            for e in basis {
                gens.push(ToeplitzElement::symbol_term(b, e, n).expect("basis conforms"));
            }
        }
        gens
    }

    /// `𝓔` as the algebra generated by `(B_0 ⊗ 1) ∪ (B_1 ⊗ S)`.
    pub fn toeplitz_span(&self) -> Result<ToeplitzSpan> {
        self.generated(&self.generators())
    }

    /// `Λ = ⊕ B_i B_j^* ⊗ e_ij`, built directly from its definition.
    pub fn lambda_span(&self) -> Result<ToeplitzSpan> {
        let b = self.b();
        let n = self.bound;
        let mut elems = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                for c in self.b_i_b_j_star(i as i64, j as i64) {
                    elems.push(ToeplitzElement::correction_term(b, c, i, j)?);
                }
            }
        }
        self.span(elems)
    }

    /// `𝓔_n`: the grade-`n` parts of a basis of `𝓔`.
    pub fn graded_span(&self, e: &ToeplitzSpan, n: i64) -> Result<ToeplitzSpan> {
        self.span(e.elements.iter().map(|x| self.gamma_component(x, n)))
    }

    pub fn product_span(&self, left: &ToeplitzSpan, right: &ToeplitzSpan) -> Result<ToeplitzSpan> {
        let mut products = Vec::new();
        for x in &left.elements {
            for y in &right.elements {
                products.push(x.t_mul(y)?);
            }
        }
        self.span(products)
    }

    pub fn adjoint_span(&self, s: &ToeplitzSpan) -> Result<ToeplitzSpan> {
        self.span(s.elements.iter().map(ToeplitzElement::t_star))
    }

    /// The four graded pieces predicted for `𝓔_0`, `𝓔_1`, `𝓔_1^*𝓔_1` and
    /// `𝓔_1𝓔_1^*`, in that order.
    pub fn predicted_pieces(&self) -> Result<[ToeplitzSpan; 4]> {
        let b = self.b();
        let th = &self.system;
        let n = self.bound;
        let sym = |e: Element, k| ToeplitzElement::symbol_term(b, e, k).expect("conforms");
        let cor = |e: Element, i, j| ToeplitzElement::correction_term(b, e, i, j).expect("indices >= 1");
        let a_full = Ideal::full(th.algebra().clone());

        let mut e0 = Vec::new();
        e0.extend(self.ideal_basis(&a_full).into_iter().map(|e| sym(e, 0)));
        for k in 1..=n {
            e0.extend(
                self.ideal_basis(&th.domain_chain(k as i64))
                    .into_iter()
                    .map(|e| cor(e, k, k)),
            );
        }

        let mut e1: Vec<ToeplitzElement> = self.b_n(1).into_iter().map(|e| sym(e, 1)).collect();
        for k in 1..=n {
            e1.extend(
                self.b_i_b_j_star(k as i64 + 1, k as i64)
                    .into_iter()
                    .map(|e| cor(e, k + 1, k)),
            );
        }

        let dm1 = th.domain_chain(-1);
        let mut src: Vec<ToeplitzElement> = self.ideal_basis(&dm1).into_iter().map(|e| sym(e, 0)).collect();
        for k in 1..=n {
            let meet = dm1.product(&th.domain_chain(k as i64))?;
            src.extend(self.ideal_basis(&meet).into_iter().map(|e| cor(e, k, k)));
        }

        let mut dst = Vec::new();
        for e in self.ideal_basis(&th.domain_chain(1)) {
            // a ⊗ Q = a ⊗ 1 - a ⊗ e_11
            dst.push(sym(e.clone(), 0).sub(&cor(e, 1, 1))?);
        }
        for k in 2..=n {
            dst.extend(
                self.ideal_basis(&th.domain_chain(k as i64))
                    .into_iter()
                    .map(|e| cor(e, k, k)),
            );
        }
        Ok([self.span(e0)?, self.span(e1)?, self.span(src)?, self.span(dst)?])
    }

    /// `θ_𝓔(x) = (u ⊗ S) x (u ⊗ S)^*` for `x` in the span of `𝓔_1^*𝓔_1`.
    pub fn theta_e(&self, source: &ToeplitzSpan, x: &ToeplitzElement) -> Result<ToeplitzElement> {
        let v = self.coords(x)?;
        let residual = source.residual(&v);
        if residual > self.tol.identity * v.norm().max(1.0) {
            return Err(Error::NotInSpan { residual });
        }
        let w = self.w();
        w.t_mul(x)?.t_mul(&w.t_star())
    }

    /// Span equalities for the graded pieces of `𝓔` against their closed forms.
    pub fn span_checks(&self, e: &ToeplitzSpan) -> Result<Vec<Check>> {
        let tol = self.tol.identity;
        let e0 = self.graded_span(e, 0)?;
        let e1 = self.graded_span(e, 1)?;
        let e1s = self.adjoint_span(&e1)?;
        let computed = [
            e0,
            e1.clone(),
            self.product_span(&e1s, &e1)?,
            self.product_span(&e1, &e1s)?,
        ];
        let predicted = self.predicted_pieces()?;
        let names = ["e0", "e1", "e1_star_e1", "e1_e1_star"];
        let mut checks = Vec::new();
        for ((name, c), p) in names.iter().zip(&computed).zip(&predicted) {
            let mut worst: f64 = 0.0;
            for x in &c.elements {
                worst = worst.max(p.residual(&self.coords(x)?));
            }
            for x in &p.elements {
                worst = worst.max(c.residual(&self.coords(x)?));
            }
            let equal = c.dim() == p.dim() && worst < tol;
            checks.push(Check::boolean(
                format!("toeplitz.span.{name}"),
                equal,
                format!(
                    "computed dim {}, closed form dim {}, residual {worst:.3e}",
                    c.dim(),
                    p.dim()
                ),
            ));
        }
        Ok(checks)
    }

    /// Largest deviation between model products and products of explicit
    /// matrices on `H ⊗ C^M`, `H` the regular carrier of `B`.
    pub fn truncation_residual(&self, x: &ToeplitzElement, y: &ToeplitzElement, m: usize) -> Result<f64> {
        let dec = self.realization.decomposition();
        let conc = |e: &Element| dec.to_concrete(e);
        let d = dec.carrier_dim();
        let m_pad = m + x.max_shift().max(y.max_shift());
        let xy = x.t_mul(y)?.truncated_matrix(conc, d, m);
        let explicit = x.truncated_matrix(conc, d, m_pad) * y.truncated_matrix(conc, d, m_pad);
        Ok(spectral_norm(&(compress(&explicit, d, m_pad, m) - xy)))
    }
}

/// A faithful representation of `𝓔` on `⊕_c H^(c)`, where `H` is the
/// weight carrier of `B` and `H^(c)` is spanned by `ξ ⊗ e_j` with `ξ` of
/// weight `w` and `j - w = c`. Pieces with `c ≥ 1` are all equivalent and
/// carry the quotient; pieces with `c < 2 - N` are zero.
#[derive(Clone, Debug)]
pub struct FaithfulRep {
    weights: Vec<i64>,
    /// `(c, carrier coordinates present in H^(c))`.
    pieces: Vec<(i64, Vec<usize>)>,
    offsets: Vec<usize>,
    dim: usize,
}

impl FaithfulRep {
    pub fn new(ts: &ToeplitzSystem) -> Self {
        let weights: Vec<i64> = ts.action().weights().iter().flatten().cloned().collect();
        let n = ts.chain_bound() as i64;
        let mut pieces = Vec::new();
        let mut offsets = Vec::new();
        let mut dim = 0;
        for c in (2 - n)..=1 {
            let coords: Vec<usize> = (0..weights.len()).filter(|&a| weights[a] + c >= 1).collect();
            if coords.is_empty() {
                continue;
            }
            offsets.push(dim);
            dim += coords.len();
            pieces.push((c, coords));
        }
        FaithfulRep {
            weights,
            pieces,
            offsets,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `γ` weight `j` of every carrier coordinate `ξ ⊗ e_j`.
    pub fn grading(&self) -> Vec<i64> {
        self.pieces
            .iter()
            .flat_map(|(c, coords)| coords.iter().map(move |&a| self.weights[a] + c))
            .collect()
    }

    /// Only entries that map `H^(c)` into itself are kept, which is exact on `𝓔`.
    pub fn apply(&self, x: &ToeplitzElement) -> Mat {
        let mut out = Mat::zeros(self.dim, self.dim);
        for ((c, coords), &off) in self.pieces.iter().zip(&self.offsets) {
            let local: BTreeMap<usize, usize> = coords.iter().enumerate().map(|(k, &a)| (a, k)).collect();
            let mut put = |m: &Mat, shift: Box<dyn Fn(i64) -> Option<i64>>| {
                for (&alpha, &col) in &local {
                    let Some(j) = shift(self.weights[alpha] + c) else {
                        continue;
                    };
                    for (&beta, &row) in &local {
                        if self.weights[beta] + c == j {
                            out[(off + row, off + col)] += m[(beta, alpha)];
                        }
                    }
                }
            };
            for (&k, s) in &x.symbol {
                put(&s.to_matrix(), Box::new(move |j| Some(j + k).filter(|&t| t >= 1)));
            }
            for (&(i, j0), e) in &x.correction {
                let (i, j0) = (i as i64, j0 as i64);
                put(&e.to_matrix(), Box::new(move |j| (j == j0).then_some(i)));
            }
        }
        out
    }

    /// Restriction to the summand with the largest `c`, where `Λ` acts as zero.
    pub fn quotient_block(&self, m: &Mat) -> Mat {
        let (off, len) = match (self.offsets.last(), self.pieces.last()) {
            (Some(&o), Some((_, coords))) => (o, coords.len()),
            _ => (0, 0),
        };
        m.view((off, off), (len, len)).into_owned()
    }
}

/// `𝓔` and `Λ` realized as block algebras through the faithful representation.
#[derive(Clone, Debug)]
pub struct ToeplitzRealization {
    pub e: ToeplitzSpan,
    pub lambda: ToeplitzSpan,
    pub rep: FaithfulRep,
    pub e_decomposition: Decomposition,
    pub lambda_decomposition: Decomposition,
}

impl ToeplitzRealization {
    pub fn new(ts: &ToeplitzSystem, seed: u64) -> Result<Self> {
        let e = ts.toeplitz_span()?;
        let lambda = ts.lambda_span()?;
        let rep = FaithfulRep::new(ts);
        let opts = WedderburnOptions {
            tol: ts.tol,
            seed,
            grading: Some(rep.grading()),
            ..Default::default()
        };
        let images: Vec<Mat> = e.elements.iter().map(|x| rep.apply(x)).collect();
        let e_decomposition = wedderburn(&images, &opts)?;
        let l_images: Vec<Mat> = if lambda.elements.is_empty() {
            vec![Mat::zeros(rep.dim(), rep.dim())]
        } else {
            lambda.elements.iter().map(|x| rep.apply(x)).collect()
        };
        let lambda_decomposition = wedderburn(&l_images, &opts)?;
        Ok(ToeplitzRealization {
            e,
            lambda,
            rep,
            e_decomposition,
            lambda_decomposition,
        })
    }

    pub fn e_algebra(&self) -> &FdAlgebra {
        self.e_decomposition.algebra()
    }

    pub fn lambda_algebra(&self) -> &FdAlgebra {
        self.lambda_decomposition.algebra()
    }

    /// `𝓔` with its `γ` action, as a graded block algebra.
    pub fn gamma_action(&self) -> Result<CircleAction> {
        let weights = self
            .e_decomposition
            .weights()
            .map(|w| w.to_vec())
            .unwrap_or_default();
        CircleAction::new(self.e_algebra().clone(), weights)
    }

    pub fn e_element(&self, x: &ToeplitzElement) -> Element {
        self.e_decomposition.to_abstract(&self.rep.apply(x))
    }

    /// `d: a ↦ a ⊗ 1`, from `A` into `𝓔`.
    pub fn d_map(&self, ts: &ToeplitzSystem) -> Result<StarHom> {
        StarHom::from_fn(ts.system().algebra().clone(), self.e_algebra().clone(), |a| {
            let x = ToeplitzElement::symbol_term(ts.b(), ts.embed(a), 0).expect("conforms");
            self.e_element(&x)
        })
    }

    /// `j: x ↦ x ⊗ e_11`, from `J` into `Λ`.
    pub fn j_map(&self, ts: &ToeplitzSystem) -> Result<StarHom> {
        let target = ts.system().target().clone();
        StarHom::from_fn(target.as_algebra(), self.lambda_algebra().clone(), |x| {
            let c = ts.embed(&target.embed(x));
            let y = ToeplitzElement::correction_term(ts.b(), c, 1, 1).expect("indices >= 1");
            self.lambda_decomposition.to_abstract(&self.rep.apply(&y))
        })
    }

    /// The inclusion `Λ → 𝓔`.
    pub fn inclusion(&self) -> Result<StarHom> {
        StarHom::from_fn(self.lambda_algebra().clone(), self.e_algebra().clone(), |x| {
            self.e_decomposition
                .to_abstract(&self.lambda_decomposition.to_concrete(x))
        })
    }
}

/// Builds a representation of `𝓔` from `(π, V)` satisfying
/// `V π(x) = π(θ(x)) V` and `V*V π(x) = π(x)` for `x ∈ I`.
#[derive(Clone, Debug)]
pub struct ToeplitzRepBuilder {
    pi: StarHom,
    v: Mat,
    dim: usize,
}

impl ToeplitzRepBuilder {
    /// `pi` lists the images of the matrix units of `A`.
    pub fn new(ts: &ToeplitzSystem, pi: Vec<Mat>, v: Mat, tol: f64) -> Result<Self> {
        let dim = v.nrows();
        if v.ncols() != dim || pi.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::InvalidRepresentation(
                "pi and V act on different spaces".into(),
            ));
        }
        let th = ts.system();
        let pi = representation(th.algebra().clone(), pi)?;
        let out = ToeplitzRepBuilder { pi, v, dim };
        let residual = out.pi.homomorphism_residual();
        if residual > tol {
            return Err(Error::NotHomomorphism { residual });
        }
        let alg = th.algebra();
        let mut worst: f64 = 0.0;
        for unit in alg.matrix_units() {
            if !th.source().blocks().contains(&unit.block) {
                continue;
            }
            let x = alg.matrix_unit(unit);
            let px = out.pi_of(&x);
            let tx = out.pi_of(&th.apply(&x, 1)?);
            worst = worst
                .max(spectral_norm(&(&out.v * &px - tx * &out.v)))
                .max(spectral_norm(&(out.v.adjoint() * &out.v * &px - &px)));
        }
        let pi_res = spectral_norm(&(&out.v * out.v.adjoint() * &out.v - &out.v));
        if worst.max(pi_res) > tol {
            return Err(Error::InvalidRepresentation(format!(
                "covariance conditions fail with residual {:.3e}",
                worst.max(pi_res)
            )));
        }
        Ok(out)
    }

    fn pi_of(&self, a: &Element) -> Mat {
        if self.dim == 0 {
            return Mat::zeros(0, 0);
        }
        self.pi.apply(a).to_matrix()
    }

    fn v_pow(&self, n: i64) -> Mat {
        crate::reprs::pisometry_pow(&self.v, n)
    }

    /// `π_n(a) = V^{n-1} π(θ^{-(n-1)}(a)) V^{n-1*} - V^n π(θ^{-n}(a)) V^{n*}` for `a ∈ D_n`.
    pub fn pi_n(&self, ts: &ToeplitzSystem, n: usize, a: &Element) -> Result<Mat> {
        let th = ts.system();
        let n = n as i64;
        let a = th.domain_chain(n).restrict(a);
        let first = self.v_pow(n - 1) * self.pi_of(&th.apply(&a, -(n - 1))?) * self.v_pow(n - 1).adjoint();
        let second = self.v_pow(n) * self.pi_of(&th.apply(&a, -n)?) * self.v_pow(n).adjoint();
        Ok(first - second)
    }

    /// `π_𝓔(x)`: `a_k u^k ⊗ S^k ↦ π(a_k) V^k` on the symbol and
    /// `a u^{i-j} ⊗ e_ij ↦ π_i(a) π(e_{D_{i-j}}) V^{i-j}` on the correction.
    pub fn apply(&self, ts: &ToeplitzSystem, x: &ToeplitzElement) -> Result<Mat> {
        let th = ts.system();
        let real = ts.realization();
        let mut out = Mat::zeros(self.dim, self.dim);
        for (&k, s) in x.symbol() {
            let a = th.domain_chain(k).restrict(&real.to_l(s).term(k));
            out += self.pi_of(&a) * self.v_pow(k);
        }
        for (&(i, j), c) in x.correction() {
            let m = i as i64 - j as i64;
            let a = real.to_l(c).term(m);
            let e = th.domain_chain(m).unit();
            out += self.pi_n(ts, i, &a)? * self.pi_of(&e) * self.v_pow(m);
        }
        Ok(out)
    }
}

/// Outcome of the Toeplitz checks for one system.
#[derive(Clone, Debug)]
pub struct ToeplitzReport {
    pub dim_e: usize,
    pub dim_lambda: usize,
    pub dim_b: usize,
    pub graded_dims: BTreeMap<i64, usize>,
    pub e_blocks: Vec<usize>,
    pub lambda_blocks: Vec<usize>,
    pub structure: StructureReport,
    pub checks: Vec<Check>,
}

impl ToeplitzReport {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

#[derive(Clone, Debug)]
pub struct ToeplitzOptions {
    pub realize: RealizeOptions,
    /// Random pairs for the truncation oracle and the ideal checks.
    pub samples: usize,
}

impl Default for ToeplitzOptions {
    fn default() -> Self {
        ToeplitzOptions {
            realize: RealizeOptions::default(),
            samples: 100,
        }
    }
}

/// Runs every check of the Toeplitz extension for `system`.
pub fn verify_toeplitz(system: Arc<PartialAutomorphism>, opts: &ToeplitzOptions) -> Result<ToeplitzReport> {
    use rand::SeedableRng;
    let ts = ToeplitzSystem::new(system, &opts.realize)?;
    let tol = opts.realize.tol.identity;
    let seed = opts.realize.seed;
    let tr = ToeplitzRealization::new(&ts, seed)?;
    let (e, lambda) = (&tr.e, &tr.lambda);
    let dim_b = ts.b().dim();
    let n = ts.chain_bound() as i64;
    let mut checks = Vec::new();

    // Λ ⊆ 𝓔 and ker φ = Λ
    let mut outside: f64 = 0.0;
    for x in &lambda.elements {
        outside = outside.max(e.residual(&ts.coords(x)?));
    }
    let images: Vec<Element> = e.elements.iter().map(ToeplitzElement::symbol_sum).collect();
    let rank = crate::structure::span_basis(ts.b(), images, tol).len();
    checks.push(Check::boolean(
        "toeplitz.exact_sequence",
        outside < tol && e.dim() == lambda.dim() + dim_b && e.dim() - rank == lambda.dim() && rank == dim_b,
        format!(
            "dim E = {}, dim Lambda = {}, dim B = {dim_b}, rank phi = {rank}",
            e.dim(),
            lambda.dim()
        ),
    ));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7e);
    let random_e = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut x = ToeplitzElement::zero(ts.b().clone());
        for b in &e.elements {
            x = x
                .add(&b.scale(linalg::random_complex(rng)))
                .expect("same algebra");
        }
        x
    };
    let random_lambda = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut x = ToeplitzElement::zero(ts.b().clone());
        for b in &lambda.elements {
            x = x
                .add(&b.scale(linalg::random_complex(rng)))
                .expect("same algebra");
        }
        x
    };

    let mut ideal = true;
    let mut phi_hom: f64 = 0.0;
    let mut grading: f64 = 0.0;
    let mut faithful: f64 = 0.0;
    let mut truncation: f64 = 0.0;
    let m = ts.chain_bound() + 3;
    let rep = &tr.rep;
    let real = ts.realization();
    for _ in 0..opts.samples {
        let x = random_e(&mut rng);
        let y = random_e(&mut rng);
        let l = random_lambda(&mut rng);
        ideal &= x.t_mul(&l)?.lambda_membership() && l.t_mul(&x)?.lambda_membership();
        let xy = x.t_mul(&y)?;
        let scale = (x.symbol_sum().norm() * y.symbol_sum().norm()).max(1.0);
        let lhs = real.concrete(&ts.quotient_phi(&xy));
        let rhs = real.concrete(&ts.quotient_phi(&x)) * real.concrete(&ts.quotient_phi(&y));
        phi_hom = phi_hom.max(spectral_norm(&(lhs - rhs)) / scale);
        for k in -n..=n {
            let mut sum = ToeplitzElement::zero(ts.b().clone());
            for p in -n..=n {
                sum = sum.add(&ts.gamma_component(&x, p).t_mul(&ts.gamma_component(&y, k - p))?)?;
            }
            grading = grading.max(ts.gamma_component(&xy, k).distance(&sum)?);
        }
        faithful = faithful.max(spectral_norm(&(rep.apply(&xy) - rep.apply(&x) * rep.apply(&y))) / scale);
        let gx = ToeplitzElement::random(ts.b(), ts.chain_bound(), &mut rng);
        let gy = ToeplitzElement::random(ts.b(), ts.chain_bound(), &mut rng);
        truncation = truncation.max(ts.truncation_residual(&gx, &gy, m)?);
    }
    checks.push(Check::boolean(
        "toeplitz.lambda_ideal",
        ideal,
        "products of Lambda with E stay in Lambda",
    ));
    checks.push(Check::residual(
        "toeplitz.phi.homomorphism",
        phi_hom,
        1e-10,
        "phi(xy) = phi(x)phi(y)",
    ));
    checks.push(Check::residual(
        "toeplitz.gamma.grading",
        grading,
        1e-10,
        "graded parts multiply additively",
    ));
    checks.push(Check::residual(
        "toeplitz.faithful_rep",
        faithful,
        1e-10,
        "model products match the faithful representation",
    ));
    checks.push(Check::residual(
        "toeplitz.truncation",
        truncation,
        1e-10,
        format!("model products match explicit matrices compressed to M = {m}"),
    ));

    // every element of 𝓔 lies in the model of 𝓔
    let mut member: f64 = 0.0;
    for x in &e.elements {
        member = member.max(ts.membership_residual(x));
    }
    checks.push(Check::residual(
        "toeplitz.membership",
        member,
        tol,
        "coefficients lie in B_k and B_iB_j*",
    ));
    checks.extend(ts.span_checks(e)?);

    // θ_𝓔 maps 𝓔_1^*𝓔_1 onto 𝓔_1𝓔_1^*
    let e1 = ts.graded_span(e, 1)?;
    let e1s = ts.adjoint_span(&e1)?;
    let src = ts.product_span(&e1s, &e1)?;
    let dst = ts.product_span(&e1, &e1s)?;
    let mut images = Vec::new();
    for x in &src.elements {
        images.push(ts.theta_e(&src, x)?);
    }
    let image = ts.span(images)?;
    let mut into: f64 = 0.0;
    for x in &image.elements {
        into = into.max(dst.residual(&ts.coords(x)?));
    }
    checks.push(Check::boolean(
        "toeplitz.theta_e",
        into < tol && image.dim() == dst.dim(),
        format!(
            "image dim {} of target dim {}, residual {into:.3e}",
            image.dim(),
            dst.dim()
        ),
    ));

    // Builder check: π = a ↦ a ⊗ 1 and V = u ⊗ S reproduce the faithful rep
    let alg = ts.system().algebra();
    let pi: Vec<Mat> = alg
        .matrix_units()
        .into_iter()
        .map(|u| {
            let x = ToeplitzElement::symbol_term(ts.b(), ts.embed(&alg.matrix_unit(u)), 0).expect("conforms");
            rep.apply(&x)
        })
        .collect();
    let builder = ToeplitzRepBuilder::new(&ts, pi, rep.apply(&ts.w()), 1e-9)?;
    let mut built: f64 = 0.0;
    for x in &e.elements {
        built = built.max(spectral_norm(&(builder.apply(&ts, x)? - rep.apply(x))));
    }
    checks.push(Check::residual(
        "toeplitz.builder",
        built,
        tol,
        "pi_E built from (pi, V) matches the faithful rep",
    ));

    // γ is semi-saturated and regular: 𝓔 ≅ C*(𝓔_0, θ_𝓔)
    let structure = verify_structure_theorem(
        &tr.gamma_action()?,
        &StructureOptions {
            tol: opts.realize.tol,
            seed,
            ..Default::default()
        },
    )?;
    let e_blocks = tr.e_algebra().block_sizes().to_vec();
    let mut sorted_e = e_blocks.clone();
    sorted_e.sort_unstable();
    let round_trip = structure.passed()
        && structure.realized_blocks.as_ref().map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b == sorted_e
        }) == Some(true);
    checks.push(Check::boolean(
        "toeplitz.structure",
        round_trip,
        format!(
            "E blocks {:?}, reconstructed {:?}",
            e_blocks, structure.realized_blocks
        ),
    ));
    checks.push(Check::boolean(
        "toeplitz.realized_dimension",
        tr.e_algebra().dim() == e.dim() && tr.lambda_algebra().dim() == lambda.dim(),
        format!(
            "realized E dim {}, realized Lambda dim {}",
            tr.e_algebra().dim(),
            tr.lambda_algebra().dim()
        ),
    ));

    let mut graded_dims = BTreeMap::new();
    for k in -n..=n {
        graded_dims.insert(k, ts.graded_span(e, k)?.dim());
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ToeplitzReport {
        dim_e: e.dim(),
        dim_lambda: lambda.dim(),
        dim_b,
        graded_dims,
        e_blocks,
        lambda_blocks: tr.lambda_algebra().block_sizes().to_vec(),
        structure,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covalg::u_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shift(m: usize) -> ToeplitzSystem {
        ToeplitzSystem::new(
            Arc::new(PartialAutomorphism::shift(m)),
            &RealizeOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn same_sign_powers_compose() {
        let ts = shift(3);
        let b = ts.b_n(1)[0].clone();
        let c = ts.b_n(1)[1].clone();
        let x = ToeplitzElement::symbol_term(ts.b(), b.clone(), 1).unwrap();
        let y = ToeplitzElement::symbol_term(ts.b(), c.clone(), 1).unwrap();
        let expected = ToeplitzElement::symbol_term(ts.b(), &b * &c, 2).unwrap();
        assert_eq!(x.t_mul(&y).unwrap(), expected);
    }

    #[test]
    fn w_w_star_has_correction_at_one() {
        let ts = shift(2);
        let w = ts.w();
        let p = w.t_mul(&w.t_star()).unwrap();
        let uu = &ts.u() * &ts.u().adjoint();
        let mut expected = ToeplitzElement::symbol_term(ts.b(), uu.clone(), 0).unwrap();
        expected = expected
            .sub(&ToeplitzElement::correction_term(ts.b(), uu, 1, 1).unwrap())
            .unwrap();
        assert!(p.distance(&expected).unwrap() < 1e-12);
        let ws_w = w.t_star().t_mul(&w).unwrap();
        let expected = ToeplitzElement::symbol_term(ts.b(), &ts.u().adjoint() * &ts.u(), 0).unwrap();
        assert_eq!(ws_w, expected);
    }

    #[test]
    fn corner_identity_for_matrix_units() {
        // (b_{n-1} ⊗ S^{n-1})(b_m b_1* ⊗ S^{m-1})* - (b_{n-1} b_1 ⊗ S^n)(b_m ⊗ S^m)* = b_{n-1} b_1 b_m* ⊗ e_nm
        let ts = shift(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = ts.b();
        let pick = |k: i64, rng: &mut ChaCha8Rng| ts.action().spectral_subspace(k).random_element(b, rng);
        for (n, m) in [(1i64, 1i64), (2, 1), (2, 3), (3, 2)] {
            let bn1 = pick(n - 1, &mut rng);
            let b1 = pick(1, &mut rng);
            let bm = pick(m, &mut rng);
            let sym = |e: Element, k| ToeplitzElement::symbol_term(b, e, k).unwrap();
            let lhs = sym(bn1.clone(), n - 1)
                .t_mul(&sym(&bm * &b1.adjoint(), m - 1).t_star())
                .unwrap()
                .sub(&sym(&bn1 * &b1, n).t_mul(&sym(bm.clone(), m).t_star()).unwrap())
                .unwrap();
            let rhs =
                ToeplitzElement::correction_term(b, &(&bn1 * &b1) * &bm.adjoint(), n as usize, m as usize)
                    .unwrap();
            assert!(lhs.distance(&rhs).unwrap() < 1e-12, "n={n} m={m}");
        }
    }

    #[test]
    fn shift_c2_dimensions() {
        let ts = shift(2);
        let e = ts.toeplitz_span().unwrap();
        assert_eq!(e.dim(), 5);
        assert_eq!(ts.lambda_span().unwrap().dim(), 1);
        assert_eq!(ts.graded_span(&e, 0).unwrap().dim(), 3);
        assert_eq!(ts.graded_span(&e, 1).unwrap().dim(), 1);
        assert_eq!(ts.graded_span(&e, -1).unwrap().dim(), 1);
        assert_eq!(ts.graded_span(&e, 2).unwrap().dim(), 0);
    }

    #[test]
    fn membership_and_quotient_of_pure_corrections() {
        let ts = shift(2);
        let c = ToeplitzElement::correction_term(ts.b(), ts.b_i_b_j_star(1, 1)[0].clone(), 1, 1).unwrap();
        assert!(c.lambda_membership());
        assert!(ts.quotient_phi(&c).is_zero());
        assert!(!ts.w().lambda_membership());
    }

    #[test]
    fn theta_e_of_zero_is_zero() {
        let ts = shift(2);
        let e = ts.toeplitz_span().unwrap();
        let e1 = ts.graded_span(&e, 1).unwrap();
        let src = ts.product_span(&ts.adjoint_span(&e1).unwrap(), &e1).unwrap();
        assert!(ts
            .theta_e(&src, &ToeplitzElement::zero(ts.b().clone()))
            .unwrap()
            .is_zero());
        let outside = ToeplitzElement::symbol_term(ts.b(), ts.b().one(), 0).unwrap();
        assert!(matches!(ts.theta_e(&src, &outside), Err(Error::NotInSpan { .. })));
    }

    #[test]
    fn builder_with_regular_pair_gives_the_quotient() {
        // π = π̃ restricted to A, V = realized u: Λ goes to zero, symbols to φ
        let ts = shift(3);
        let real = ts.realization();
        let alg = ts.system().algebra();
        let pi = alg
            .matrix_units()
            .into_iter()
            .map(|u| real.rep().monomial(&alg.matrix_unit(u), 0))
            .collect();
        let v = real.concrete(&u_element(ts.system().clone()));
        let builder = ToeplitzRepBuilder::new(&ts, pi, v, 1e-9).unwrap();
        let e = ts.toeplitz_span().unwrap();
        for x in &e.elements {
            let expected = real.concrete(&ts.quotient_phi(x));
            assert!(spectral_norm(&(builder.apply(&ts, x).unwrap() - expected)) < 1e-9);
        }
    }

    #[test]
    fn shift_c2_full_report() {
        let report = verify_toeplitz(
            Arc::new(PartialAutomorphism::shift(2)),
            &ToeplitzOptions {
                samples: 20,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        let mut blocks = report.e_blocks.clone();
        blocks.sort_unstable();
        assert_eq!(blocks, vec![1, 2]);
        assert_eq!(report.lambda_blocks, vec![1]);
    }
}
