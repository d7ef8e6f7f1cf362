//! Circle actions on block algebras as integer gradings, semi-saturation and
//! regularity, and the reconstruction of a graded algebra `B` as the
//! covariance algebra of a partial automorphism of its fixed-point algebra.
//!
//! A circle action on `B = ⊕ M_{n_i}` is conjugation by `diag(z^{w})` in each
//! block, so entry `(r, s)` of block `i` has degree `w_r - w_s`. Regularity
//! is witnessed by a partial isometry `v ∈ B_1` whose source and range
//! projections are the units of `B_1^*B_1` and `B_1B_1^*`. With such a `v`:
//!
//! ```text
//! θ(a) = v a v*,  λ(x*) = v x*,  ρ(x*) = x* v,  λ†(x) = v* x,  ρ†(x) = x v*
//! ```
//!
//! and the inductively defined `i_n` become `x ↦ x v*^n` (`n ≥ 0`) and
//! `x ↦ x v^{|n|}` (`n < 0`).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, FdAlgebra, Ideal, MatrixUnit, PartialAutomorphism};
use crate::covalg::{l_basis, realize_covariance, LElement, Realization, RealizeOptions};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Subspace, Tolerances, C64};
use crate::report::Check;

/// Integer weights per basis vector of every block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleAction {
    algebra: FdAlgebra,
    weights: Vec<Vec<i64>>,
}

/// A graded piece `B_n` with an orthonormal (trace inner product) basis.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    pub grade: i64,
    pub basis: Vec<Element>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Random linear combination with complex coefficients.
    pub fn random_element<R: Rng>(&self, algebra: &FdAlgebra, rng: &mut R) -> Element {
        let mut x = algebra.zero();
        for b in &self.basis {
            x = &x + &b.scale(linalg::random_complex(rng));
        }
        x
    }
}

/// Orthonormal basis of the span of `elements`.
pub fn span_basis(
    algebra: &FdAlgebra,
    elements: impl IntoIterator<Item = Element>,
    tol: f64,
) -> Vec<Element> {
    let mut span = Subspace::new(algebra.dim());
    for e in elements {
        span.insert(&e.to_vector(), tol);
    }
    span.basis()
        .iter()
        .map(|v| {
            algebra
                .element_from_coordinates(v.as_slice())
                .expect("coordinates have the algebra's dimension")
        })
        .collect()
}

/// Orthonormal basis of `span{x y : x ∈ left, y ∈ right}`.
pub fn product_span(algebra: &FdAlgebra, left: &[Element], right: &[Element], tol: f64) -> Vec<Element> {
    let products = left.iter().flat_map(|x| right.iter().map(move |y| x * y));
    span_basis(algebra, products, tol)
}

impl CircleAction {
    pub fn new(algebra: FdAlgebra, weights: Vec<Vec<i64>>) -> Result<Self> {
        if weights.len() != algebra.num_blocks()
            || weights
                .iter()
                .zip(algebra.block_sizes())
                .any(|(w, &n)| w.len() != n)
        {
            return Err(Error::DimensionMismatch(format!(
                "weights {:?} do not match block sizes {:?}",
                weights,
                algebra.block_sizes()
            )));
        }
        Ok(CircleAction { algebra, weights })
    }

    /// All weights zero.
    pub fn trivial(algebra: FdAlgebra) -> Self {
        let weights = algebra.block_sizes().iter().map(|&n| vec![0; n]).collect();
        CircleAction { algebra, weights }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn grade(&self, unit: MatrixUnit) -> i64 {
        let w = &self.weights[unit.block];
        w[unit.row] - w[unit.col]
    }

    /// Largest `|n|` with `B_n ≠ 0`.
    pub fn spread(&self) -> i64 {
        self.weights
            .iter()
            .map(|w| w.iter().max().unwrap_or(&0) - w.iter().min().unwrap_or(&0))
            .max()
            .unwrap_or(0)
    }

    /// `α_z(x)`.
    pub fn act(&self, z: C64, x: &Element) -> Element {
        let mut y = x.clone();
        for (i, w) in self.weights.iter().enumerate() {
            let b = y.block_mut(i);
            for r in 0..w.len() {
                for s in 0..w.len() {
                    b[(r, s)] *= z.powi((w[r] - w[s]) as i32);
                }
            }
        }
        y
    }

    /// The spectral projection `P_n`, evaluated exactly by grade selection.
    pub fn project(&self, x: &Element, n: i64) -> Element {
        let mut y = x.clone();
        for (i, w) in self.weights.iter().enumerate() {
            let b = y.block_mut(i);
            for r in 0..w.len() {
                for s in 0..w.len() {
                    if w[r] - w[s] != n {
                        b[(r, s)] = C64::new(0.0, 0.0);
                    }
                }
            }
        }
        y
    }

    /// `‖x - P_n(x)‖`.
    pub fn grade_residual(&self, x: &Element, n: i64) -> f64 {
        x.distance(&self.project(x, n))
    }

    /// Basis of `B_n`: the matrix units of degree `n`.
    pub fn spectral_subspace(&self, n: i64) -> GradedSubspace {
        let basis = self
            .algebra
            .matrix_units()
            .into_iter()
            .filter(|&u| self.grade(u) == n)
            .map(|u| self.algebra.matrix_unit(u))
            .collect();
        GradedSubspace { grade: n, basis }
    }

    pub fn fixed_point_algebra(&self) -> FixedPointAlgebra {
        let mut parts = Vec::new();
        for (i, w) in self.weights.iter().enumerate() {
            let distinct: BTreeSet<i64> = w.iter().cloned().collect();
            for wt in distinct {
                let coords = (0..w.len()).filter(|&r| w[r] == wt).collect();
                parts.push(FixedPart {
                    block: i,
                    weight: wt,
                    coords,
                });
            }
        }
        let algebra =
            FdAlgebra::new(parts.iter().map(|p| p.coords.len()).collect()).expect("parts are nonempty");
        FixedPointAlgebra {
            ambient: self.algebra.clone(),
            algebra,
            parts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FixedPart {
    block: usize,
    weight: i64,
    coords: Vec<usize>,
}

/// `B_0` as a block algebra: one block per (block of `B`, weight value).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointAlgebra {
    ambient: FdAlgebra,
    algebra: FdAlgebra,
    parts: Vec<FixedPart>,
}

impl FixedPointAlgebra {
    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    /// `(block of B, weight)` for each block of `B_0`.
    pub fn labels(&self) -> Vec<(usize, i64)> {
        self.parts.iter().map(|p| (p.block, p.weight)).collect()
    }

    pub fn index_of(&self, block: usize, weight: i64) -> Option<usize> {
        self.parts
            .iter()
            .position(|p| p.block == block && p.weight == weight)
    }

    pub fn embed(&self, x: &Element) -> Element {
        let mut y = self.ambient.zero();
        for (k, p) in self.parts.iter().enumerate() {
            let src = x.block(k);
            let dst = y.block_mut(p.block);
            for (a, &r) in p.coords.iter().enumerate() {
                for (b, &s) in p.coords.iter().enumerate() {
                    dst[(r, s)] = src[(a, b)];
                }
            }
        }
        y
    }

    /// Left inverse of `embed` (drops the off-degree-zero entries).
    pub fn compress(&self, y: &Element) -> Element {
        let blocks = self
            .parts
            .iter()
            .map(|p| {
                let src = y.block(p.block);
                Mat::from_fn(p.coords.len(), p.coords.len(), |a, b| {
                    src[(p.coords[a], p.coords[b])]
                })
            })
            .collect();
        Element::from_blocks(blocks).expect("parts are nonempty")
    }

    /// The ideal of `B_0` spanned by a set of degree-zero elements.
    pub fn ideal_of_span(&self, span: &[Element]) -> Ideal {
        let mut blocks = BTreeSet::new();
        for x in span {
            blocks.extend(self.compress(x).support());
        }
        Ideal::new(self.algebra.clone(), blocks).expect("indices come from the algebra")
    }
}

/// Certificate for semi-saturation: dimensions of `(B_1)^n` and `B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiSaturation {
    pub holds: bool,
    /// `(n, dim (B_1)^n, dim B_n)` for `1 ≤ n ≤ spread`.
    pub dims: Vec<(i64, usize, usize)>,
    pub first_failure: Option<i64>,
}

/// Checks `B_n = (B_1)^n` for every positive `n` up to the weight spread.
pub fn is_semisaturated(act: &CircleAction, tol: f64) -> SemiSaturation {
    let alg = act.algebra();
    let b1 = act.spectral_subspace(1).basis;
    let mut power = b1.clone();
    let mut dims = Vec::new();
    let mut first_failure = None;
    for n in 1..=act.spread() {
        if n > 1 {
            power = product_span(alg, &power, &b1, tol);
        }
        let bn = act.spectral_subspace(n).dim();
        dims.push((n, power.len(), bn));
        if power.len() != bn && first_failure.is_none() {
            first_failure = Some(n);
        }
    }
    SemiSaturation {
        holds: first_failure.is_none(),
        dims,
        first_failure,
    }
}

/// A partial isometry `v ∈ B_1` with `v*v = 1_{B_1^*B_1}` and `vv* = 1_{B_1B_1^*}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityWitness {
    pub v: Element,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WitnessOutcome {
    Found(RegularityWitness),
    /// Some weight space and its successor have different dimensions, so no
    /// element of `B_1` can carry one unit onto the other.
    Obstruction {
        block: usize,
        weight: i64,
        source_rank: usize,
        target_rank: usize,
    },
    RetriesExhausted {
        attempts: usize,
        residual: f64,
    },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&RegularityWitness> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            WitnessOutcome::Found(w) => format!("witness found after {} attempt(s)", w.attempts),
            WitnessOutcome::Obstruction {
                block,
                weight,
                source_rank,
                target_rank,
            } => format!(
                "no witness: block {block} has {source_rank} vector(s) of weight {weight} but {target_rank} of weight {}",
                weight + 1
            ),
            WitnessOutcome::RetriesExhausted { attempts, residual } => format!(
                "no witness found after {attempts} attempts (best residual {residual:.3e})"
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StructureOptions {
    pub tol: Tolerances,
    pub seed: u64,
    pub max_retries: usize,
    /// Random samples per identity check.
    pub samples: usize,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions {
            tol: Tolerances::default(),
            seed: 0,
            max_retries: 8,
            samples: 20,
        }
    }
}

fn weight_counts(w: &[i64]) -> BTreeMap<i64, usize> {
    let mut counts = BTreeMap::new();
    for &x in w {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts
}

/// Unit of `B_1^*B_1` (`source = true`) or of `B_1B_1^*`, read off the weights.
fn b1_unit(act: &CircleAction, source: bool) -> Element {
    let mut e = act.algebra().zero();
    for (i, w) in act.weights().iter().enumerate() {
        let present: BTreeSet<i64> = w.iter().cloned().collect();
        let b = e.block_mut(i);
        for (r, &wr) in w.iter().enumerate() {
            let partner = if source { wr + 1 } else { wr - 1 };
            if present.contains(&partner) {
                b[(r, r)] = C64::new(1.0, 0.0);
            }
        }
    }
    e
}

/// Polar part `x (x*x)^{+1/2}` of a random `x ∈ B_1`, retried until its
/// source and range projections are the units of `B_1^*B_1` and `B_1B_1^*`.
pub fn regularity_witness(act: &CircleAction, opts: &StructureOptions) -> WitnessOutcome {
    for (i, w) in act.weights().iter().enumerate() {
        let counts = weight_counts(w);
        for (&wt, &m) in &counts {
            if let Some(&next) = counts.get(&(wt + 1)) {
                if next != m {
                    return WitnessOutcome::Obstruction {
                        block: i,
                        weight: wt,
                        source_rank: m,
                        target_rank: next,
                    };
                }
            }
        }
    }
    let alg = act.algebra();
    let b1 = act.spectral_subspace(1);
    let p = b1_unit(act, true);
    let q = b1_unit(act, false);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::INFINITY;
    for attempt in 1..=opts.max_retries.max(1) {
        let mut x = alg.zero();
        for b in &b1.basis {
            x = &x + &b.scale(C64::new(rng.random_range(0.5..1.5), 0.0));
        }
        let blocks = x
            .blocks()
            .iter()
            .map(|xb| xb * linalg::pinv_sqrt(&(xb.adjoint() * xb), opts.tol.singular_cutoff))
            .collect();
        let v = Element::from_blocks(blocks).expect("same shapes as x");
        let vs = v.adjoint();
        let residual = (&vs * &v).distance(&p).max((&v * &vs).distance(&q));
        if residual < opts.tol.identity {
            return WitnessOutcome::Found(RegularityWitness { v, attempts: attempt });
        }
        best = best.min(residual);
    }
    WitnessOutcome::RetriesExhausted {
        attempts: opts.max_retries.max(1),
        residual: best,
    }
}

/// The maps derived from a regularity witness, and the partial automorphism
/// `Θ = (θ, B_1^*B_1, B_1B_1^*)` of the fixed-point algebra.
#[derive(Clone, Debug)]
pub struct StructureMaps {
    action: CircleAction,
    fixed: FixedPointAlgebra,
    v: Element,
    theta: Arc<PartialAutomorphism>,
}

/// Builds `θ` structurally: the block `(i, w)` of `B_0` goes to `(i, w+1)`
/// via the corresponding sub-block of `v`.
pub fn build_theta_lambda(
    act: &CircleAction,
    witness: &RegularityWitness,
    tol: f64,
) -> Result<StructureMaps> {
    let v = &witness.v;
    if !v.conforms(act.algebra()) {
        return Err(Error::InvalidWitness("v does not conform to B".into()));
    }
    let grade = act.grade_residual(v, 1);
    if grade > tol * v.norm().max(1.0) {
        return Err(Error::InvalidWitness(format!(
            "v is not in B_1 (residual {grade:.3e})"
        )));
    }
    let vs = v.adjoint();
    let residual = (&vs * v)
        .distance(&b1_unit(act, true))
        .max((v * &vs).distance(&b1_unit(act, false)));
    if residual > tol {
        return Err(Error::InvalidWitness(format!(
            "v*v and vv* miss the units of B_1*B_1 and B_1B_1* by {residual:.3e}"
        )));
    }
    let fixed = act.fixed_point_algebra();
    let mut block_map = BTreeMap::new();
    let mut unitaries = BTreeMap::new();
    for (k, part) in fixed.parts.iter().enumerate() {
        let Some(target) = fixed.index_of(part.block, part.weight + 1) else {
            continue;
        };
        let dst = &fixed.parts[target];
        let vb = v.block(part.block);
        let u = Mat::from_fn(dst.coords.len(), part.coords.len(), |r, s| {
            vb[(dst.coords[r], part.coords[s])]
        });
        block_map.insert(k, target);
        unitaries.insert(k, u);
    }
    let theta = PartialAutomorphism::new(fixed.algebra().clone(), block_map, unitaries, tol.sqrt())
        .map_err(|e| Error::InvalidWitness(e.to_string()))?;
    Ok(StructureMaps {
        action: act.clone(),
        fixed,
        v: v.clone(),
        theta: Arc::new(theta),
    })
}

impl StructureMaps {
    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    pub fn fixed(&self) -> &FixedPointAlgebra {
        &self.fixed
    }

    pub fn v(&self) -> &Element {
        &self.v
    }

    /// `Θ` on `B_0`.
    pub fn theta(&self) -> &Arc<PartialAutomorphism> {
        &self.theta
    }

    /// `θ(a) = v a v*` computed inside `B`.
    pub fn theta_in_b(&self, a: &Element) -> Element {
        &(&self.v * a) * &self.v.adjoint()
    }

    /// `θ^n` of a degree-zero element of `B`, via the structural `Θ`.
    pub fn theta_pow(&self, a: &Element, n: i64) -> Result<Element> {
        Ok(self.fixed.embed(&self.theta.apply(&self.fixed.compress(a), n)?))
    }

    /// `λ(x*) = v x*` for `x* ∈ B_1^*`.
    pub fn lambda(&self, xs: &Element) -> Element {
        &self.v * xs
    }

    /// `ρ(x*) = x* v`.
    pub fn rho(&self, xs: &Element) -> Element {
        xs * &self.v
    }

    /// `λ†(x) = v* x`.
    pub fn lambda_dag(&self, x: &Element) -> Element {
        &self.v.adjoint() * x
    }

    /// `ρ†(x) = x v*`.
    pub fn rho_dag(&self, x: &Element) -> Element {
        x * &self.v.adjoint()
    }

    /// `v^n`, with `v^{-n} = (v*)^n`.
    pub fn v_pow(&self, n: i64) -> Element {
        let base = if n >= 0 { self.v.clone() } else { self.v.adjoint() };
        let mut out = self.action.algebra().one();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// `i_n: B_n → B_0`.
    pub fn i_map(&self, n: i64, x: &Element, tol: f64) -> Result<Element> {
        if self.action.grade_residual(x, n) > tol * x.norm().max(1.0) {
            return Err(Error::GradeMismatch { expected: n });
        }
        Ok(x * &self.v_pow(-n))
    }

    /// `φ(Σ a_n δ_n) = Σ a_n v^n`, from `L` of `(B_0, Θ)` into `B`.
    pub fn phi(&self, a: &LElement) -> Element {
        let mut out = self.action.algebra().zero();
        for (&n, x) in a.terms() {
            out = &out + &(&self.fixed.embed(x) * &self.v_pow(n));
        }
        out
    }
}

/// Outcome of the reconstruction `C*(B_0, Θ) ≅ B`.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub semisaturation: SemiSaturation,
    pub witness: WitnessOutcome,
    pub fixed_blocks: Vec<usize>,
    pub realized_blocks: Option<Vec<usize>>,
    pub checks: Vec<Check>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn random_in(alg: &FdAlgebra, span: &[Element], rng: &mut ChaCha8Rng) -> Element {
    GradedSubspace {
        grade: 0,
        basis: span.to_vec(),
    }
    .random_element(alg, rng)
}

/// Residuals of the algebraic identities relating `θ, λ, ρ, λ†, ρ†` and the
/// `i_n`, evaluated on random elements.
pub fn identity_checks(maps: &StructureMaps, opts: &StructureOptions) -> Result<Vec<Check>> {
    let act = maps.action();
    let alg = act.algebra();
    let tol = opts.tol.identity;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let b1 = act.spectral_subspace(1);
    let b1_adj: Vec<Element> = b1.basis.iter().map(Element::adjoint).collect();
    let src = product_span(alg, &b1_adj, &b1.basis, tol);
    let dst = product_span(alg, &b1.basis, &b1_adj, tol);

    let mut defining: f64 = 0.0;
    let mut derived: f64 = 0.0;
    let mut extended: f64 = 0.0;
    let mut conjugation: f64 = 0.0;
    let mut multiplier: f64 = 0.0;
    let rel = |a: &Element, b: &Element, scale: f64| a.distance(b) / scale.max(1.0);
    let th = |a: &Element| maps.theta_pow(a, 1);
    let th_inv = |a: &Element| maps.theta_pow(a, -1);

    for _ in 0..opts.samples {
        let x = b1.random_element(alg, &mut rng);
        let y = b1.random_element(alg, &mut rng);
        let a = random_in(alg, &src, &mut rng);
        let b = random_in(alg, &dst, &mut rng);
        let c = alg.random_element(&mut rng);
        let (xs, ys) = (x.adjoint(), y.adjoint());
        let s = x.norm() * y.norm() * (1.0 + a.norm() + b.norm());

        // defining identities of θ and λ
        defining = defining
            .max(rel(&maps.lambda(&(&xs * &b)), &(&maps.lambda(&xs) * &b), s))
            .max(rel(&maps.lambda(&(&a * &xs)), &(&th(&a)? * &maps.lambda(&xs)), s))
            .max(rel(
                &(&maps.lambda(&xs).adjoint() * &maps.lambda(&ys)),
                &(&x * &ys),
                s,
            ))
            .max(rel(
                &(&maps.lambda(&xs) * &maps.lambda(&ys).adjoint()),
                &th(&(&xs * &y))?,
                s,
            ));

        // the twelve identities for ρ, λ†, ρ†
        let rho = |e: &Element| maps.rho(e);
        let ld = |e: &Element| maps.lambda_dag(e);
        let rd = |e: &Element| maps.rho_dag(e);
        derived = derived
            .max(rel(&rho(&(&a * &xs)), &(&a * &rho(&xs)), s))
            .max(rel(&rho(&(&xs * &b)), &(&rho(&xs) * &th_inv(&b)?), s))
            .max(rel(&(&rho(&xs) * &rho(&ys).adjoint()), &(&xs * &y), s))
            .max(rel(&(&rho(&xs).adjoint() * &rho(&ys)), &th_inv(&(&x * &ys))?, s))
            .max(rel(&ld(&(&b * &x)), &(&th_inv(&b)? * &ld(&x)), s))
            .max(rel(&ld(&(&x * &a)), &(&ld(&x) * &a), s))
            .max(rel(&(&ld(&x).adjoint() * &ld(&y)), &(&xs * &y), s))
            .max(rel(&(&ld(&x) * &ld(&y).adjoint()), &th_inv(&(&x * &ys))?, s))
            .max(rel(&rd(&(&b * &x)), &(&b * &rd(&x)), s))
            .max(rel(&rd(&(&x * &a)), &(&rd(&x) * &th(&a)?), s))
            .max(rel(&(&rd(&x) * &rd(&y).adjoint()), &(&x * &ys), s))
            .max(rel(&(&rd(&x).adjoint() * &rd(&y)), &th(&(&xs * &y))?, s));

        // extensions to B_1^*B, BB_1^*, B_1B, BB_1 and their inverses
        let c2 = alg.random_element(&mut rng);
        let s_l = &xs * &c;
        let t_l = &ys * &c2;
        let s_r = &c * &xs;
        let t_r = &c2 * &ys;
        let s_ld = &x * &c;
        let s_rd = &c * &x;
        let t_rd = &c2 * &y;
        let sc = s * c.norm().max(1.0) * c2.norm().max(1.0);
        extended = extended
            .max(rel(
                &(&maps.lambda(&s_l).adjoint() * &maps.lambda(&t_l)),
                &(&s_l.adjoint() * &t_l),
                sc,
            ))
            .max(rel(
                &(&rho(&s_r) * &rho(&t_r).adjoint()),
                &(&s_r * &t_r.adjoint()),
                sc,
            ))
            .max(rel(
                &(&ld(&s_ld).adjoint() * &ld(&(&y * &c2))),
                &(&s_ld.adjoint() * &(&y * &c2)),
                sc,
            ))
            .max(rel(
                &(&rd(&s_rd) * &rd(&t_rd).adjoint()),
                &(&s_rd * &t_rd.adjoint()),
                sc,
            ))
            .max(rel(&ld(&maps.lambda(&s_l)), &s_l, sc))
            .max(rel(&maps.lambda(&ld(&s_ld)), &s_ld, sc))
            .max(rel(&rho(&rd(&s_rd)), &s_rd, sc))
            .max(rel(&rd(&rho(&s_r)), &s_r, sc));

        // ρ†∘λ on B_1^* B B_1 is a *-homomorphism extending θ
        let p = &(&xs * &c) * &y;
        let q = &(&ys * &c2) * &x;
        let f = |e: &Element| rd(&maps.lambda(e));
        conjugation = conjugation
            .max(rel(&(&f(&p) * &f(&q)), &f(&(&p * &q)), sc * sc))
            .max(rel(&f(&p).adjoint(), &f(&p.adjoint()), sc))
            .max(rel(&f(&(&xs * &y)), &th(&(&xs * &y))?, s));

        // ρ(s) t = s λ(t)
        multiplier = multiplier.max(rel(&(&rho(&s_r) * &t_l), &(&s_r * &maps.lambda(&t_l)), sc * sc));
    }

    // graded identities for i_n
    let spread = act.spread();
    let mut i_mult: f64 = 0.0;
    let mut i_theta: f64 = 0.0;
    let mut i_adjoint: f64 = 0.0;
    for n in -spread..=spread {
        let bn = act.spectral_subspace(n);
        if bn.is_zero() {
            continue;
        }
        let bn_adj: Vec<Element> = bn.basis.iter().map(Element::adjoint).collect();
        let dom = product_span(alg, &bn_adj, &bn.basis, tol);
        for m in -spread..=spread {
            let bm = act.spectral_subspace(m);
            if bm.is_zero() {
                continue;
            }
            for _ in 0..opts.samples.div_ceil(4).max(1) {
                let xn = bn.random_element(alg, &mut rng);
                let ym = bm.random_element(alg, &mut rng);
                let lhs = maps.i_map(n + m, &(&xn * &ym), tol)?;
                let rhs = maps.i_map(n, &(&xn * &maps.i_map(m, &ym, tol)?), tol)?;
                i_mult = i_mult.max(rel(&lhs, &rhs, xn.norm() * ym.norm()));
            }
        }
        for _ in 0..opts.samples.div_ceil(4).max(1) {
            let xn = bn.random_element(alg, &mut rng);
            let a = random_in(alg, &dom, &mut rng);
            let lhs = maps.i_map(n, &(&xn * &a), tol)?;
            let rhs = &maps.i_map(n, &xn, tol)? * &maps.theta_pow(&a, n)?;
            i_theta = i_theta.max(rel(&lhs, &rhs, xn.norm() * a.norm()));
            let lhs = maps.theta_pow(&maps.i_map(n, &xn, tol)?, -n)?;
            let rhs = maps.i_map(-n, &xn.adjoint(), tol)?.adjoint();
            i_adjoint = i_adjoint.max(rel(&lhs, &rhs, xn.norm()));
        }
    }

    let check = |name: &str, r: f64, what: &str| Check::residual(name, r, tol, what);
    Ok(vec![
        check(
            "structure.identities.defining",
            defining,
            "lambda and theta satisfy the four defining identities",
        ),
        check(
            "structure.identities.derived",
            derived,
            "rho, lambda-dagger and rho-dagger identities",
        ),
        check(
            "structure.identities.extended",
            extended,
            "extended maps are isometric and mutually inverse",
        ),
        check(
            "structure.identities.conjugation",
            conjugation,
            "rho-dagger after lambda is a *-homomorphism extending theta",
        ),
        check(
            "structure.identities.multiplier",
            multiplier,
            "rho(s) t = s lambda(t)",
        ),
        check(
            "structure.i_map.multiplicative",
            i_mult,
            "i_{n+m}(x y) = i_n(x i_m(y))",
        ),
        check("structure.i_map.theta", i_theta, "i_n(x a) = i_n(x) theta^n(a)"),
        check(
            "structure.i_map.adjoint",
            i_adjoint,
            "theta^{-n}(i_n(x)) = i_{-n}(x*)*",
        ),
    ])
}

/// `Dom(θ^n) = B_n^* B_n` as ideals of `B_0`, for `|n| ≤ spread + 1`.
pub fn domain_check(maps: &StructureMaps, tol: f64) -> Check {
    let act = maps.action();
    let alg = act.algebra();
    let mut mismatches = Vec::new();
    let spread = act.spread();
    for n in -(spread + 1)..=(spread + 1) {
        let bn = act.spectral_subspace(n).basis;
        let bn_adj: Vec<Element> = bn.iter().map(Element::adjoint).collect();
        let span = product_span(alg, &bn_adj, &bn, tol);
        let ideal = maps.fixed().ideal_of_span(&span);
        let dom = maps.theta().domain_chain(-n);
        if ideal != dom || span.len() != dom.dim() {
            mismatches.push(n);
        }
    }
    Check::boolean(
        "structure.domain_chain",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "Dom(theta^n) = B_n* B_n for every n".to_string()
        } else {
            format!("mismatch at n = {mismatches:?}")
        },
    )
}

/// Checks that `φ: C*(B_0, Θ) → B` is a grading-preserving *-isomorphism.
pub fn phi_checks(
    maps: &StructureMaps,
    realization: &Realization,
    opts: &StructureOptions,
) -> Result<Vec<Check>> {
    let act = maps.action();
    let alg = act.algebra();
    let tol = opts.tol.identity;
    let theta = maps.theta().clone();
    let basis = l_basis(&theta)?;
    let images: Vec<Element> = basis.iter().map(|e| maps.phi(&e.to_l(theta.clone()))).collect();

    let rank = span_basis(alg, images.iter().cloned(), tol).len();
    let rank0 = span_basis(
        alg,
        basis
            .iter()
            .zip(&images)
            .filter(|(e, _)| e.level == 0)
            .map(|(_, x)| x.clone()),
        tol,
    )
    .len();
    let dim0 = theta.algebra().dim();

    let mut grade: f64 = 0.0;
    for (e, x) in basis.iter().zip(&images) {
        grade = grade.max(act.grade_residual(x, e.level));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1);
    let level = realization.rep().level();
    let mut hom: f64 = 0.0;
    for _ in 0..opts.samples {
        let a = LElement::random(theta.clone(), level, &mut rng);
        let b = LElement::random(theta.clone(), level, &mut rng);
        let scale = (a.l1_norm() * b.l1_norm()).max(1.0);
        let prod = maps.phi(&a.mul(&b)?);
        hom = hom.max(prod.distance(&(&maps.phi(&a) * &maps.phi(&b))) / scale);
        hom = hom.max(maps.phi(&a.star()).distance(&maps.phi(&a).adjoint()) / a.l1_norm().max(1.0));
    }

    let b_blocks = sorted(alg.block_sizes().to_vec());
    let c_blocks = sorted(realization.algebra().block_sizes().to_vec());
    Ok(vec![
        Check::boolean(
            "structure.dimension",
            basis.len() == alg.dim() && realization.algebra().dim() == alg.dim(),
            format!(
                "dim L = {}, dim C*(B_0, Theta) = {}, dim B = {}",
                basis.len(),
                realization.algebra().dim(),
                alg.dim()
            ),
        ),
        Check::boolean(
            "structure.blocks",
            b_blocks == c_blocks,
            format!("realized blocks {c_blocks:?}, B blocks {b_blocks:?}"),
        ),
        Check::residual(
            "structure.phi.homomorphism",
            hom,
            tol,
            "phi(ab) = phi(a)phi(b), phi(a*) = phi(a)*",
        ),
        Check::boolean(
            "structure.phi.bijective",
            rank == alg.dim() && rank == basis.len() && rank0 == dim0,
            format!(
                "rank {rank} of {} basis images, degree-zero rank {rank0} of {dim0}",
                basis.len()
            ),
        ),
        Check::residual("structure.phi.grading", grade, tol, "phi(a delta_n) lies in B_n"),
    ])
}

/// Reconstructs `B` as `C*(B_0, Θ)` and reports every step.
pub fn verify_structure_theorem(act: &CircleAction, opts: &StructureOptions) -> Result<StructureReport> {
    let tol = opts.tol.identity;
    let semisaturation = is_semisaturated(act, tol);
    let fixed = act.fixed_point_algebra();
    let mut checks = vec![Check::boolean(
        "structure.semisaturated",
        semisaturation.holds,
        match semisaturation.first_failure {
            None => "B_n = (B_1)^n for all n > 0".to_string(),
            Some(n) => format!("not semi-saturated at n = {n}"),
        },
    )];
    let witness = regularity_witness(act, opts);
    checks.push(Check::boolean(
        "structure.witness",
        witness.witness().is_some(),
        witness.describe(),
    ));
    let mut report = StructureReport {
        semisaturation,
        witness: witness.clone(),
        fixed_blocks: fixed.algebra().block_sizes().to_vec(),
        realized_blocks: None,
        checks,
    };
    let (true, Some(w)) = (report.semisaturation.holds, witness.witness()) else {
        return Ok(report);
    };
    let maps = build_theta_lambda(act, w, tol)?;
    report.checks.extend(identity_checks(&maps, opts)?);
    report.checks.push(domain_check(&maps, tol));
    let realization = realize_covariance(
        maps.theta().clone(),
        &RealizeOptions {
            tol: opts.tol,
            seed: opts.seed,
            level: None,
        },
    )?;
    report.realized_blocks = Some(realization.algebra().block_sizes().to_vec());
    report.checks.extend(phi_checks(&maps, &realization, opts)?);
    report.checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(weights: [i64; 2]) -> CircleAction {
        CircleAction::new(FdAlgebra::full_matrix(2).unwrap(), vec![weights.to_vec()]).unwrap()
    }

    fn unit(r: usize, c: usize) -> Element {
        let alg = FdAlgebra::full_matrix(2).unwrap();
        alg.matrix_unit(MatrixUnit {
            block: 0,
            row: r,
            col: c,
        })
    }

    #[test]
    fn m2_spectral_subspaces() {
        let act = m2([0, 1]);
        let b1 = act.spectral_subspace(1);
        assert_eq!(b1.basis, vec![unit(1, 0)]);
        let b0 = act.spectral_subspace(0);
        assert_eq!(b0.basis, vec![unit(0, 0), unit(1, 1)]);
        assert!(act.spectral_subspace(2).is_zero());
    }

    #[test]
    fn semisaturation_certificates() {
        assert!(is_semisaturated(&m2([0, 1]), 1e-9).holds);
        let s = is_semisaturated(&m2([0, 2]), 1e-9);
        assert!(!s.holds);
        assert_eq!(s.first_failure, Some(2));
        assert!(is_semisaturated(&m2([0, 0]), 1e-9).holds);
    }

    #[test]
    fn m2_witness_is_e21() {
        let act = m2([0, 1]);
        let w = regularity_witness(&act, &StructureOptions::default());
        let w = w.witness().unwrap();
        assert!(w.v.distance(&unit(1, 0)) < 1e-12);
        let maps = build_theta_lambda(&act, w, 1e-9).unwrap();
        assert!(maps.theta_in_b(&unit(0, 0)).distance(&unit(1, 1)) < 1e-12);
        assert!(maps.lambda(&unit(0, 1)).distance(&unit(1, 1)) < 1e-12);
        assert!(maps.rho_dag(&unit(1, 0)).distance(&unit(1, 1)) < 1e-12);
        assert!(maps.i_map(1, &unit(1, 0), 1e-9).unwrap().distance(&unit(1, 1)) < 1e-12);
        assert!(matches!(
            maps.i_map(1, &unit(0, 0), 1e-9),
            Err(Error::GradeMismatch { .. })
        ));
    }

    #[test]
    fn unequal_weight_spaces_obstruct() {
        let act = CircleAction::new(FdAlgebra::full_matrix(3).unwrap(), vec![vec![0, 1, 1]]).unwrap();
        assert!(matches!(
            regularity_witness(&act, &StructureOptions::default()),
            WitnessOutcome::Obstruction { .. }
        ));
    }

    #[test]
    fn m2_structure_theorem() {
        let report = verify_structure_theorem(&m2([0, 1]), &StructureOptions::default()).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.realized_blocks, Some(vec![2]));
    }

    #[test]
    fn trivial_action_reconstructs_b0() {
        let act = CircleAction::trivial(FdAlgebra::commutative(1));
        let report = verify_structure_theorem(&act, &StructureOptions::default()).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.realized_blocks, Some(vec![1]));
    }

    #[test]
    fn non_semisaturated_action_fails_early() {
        let report = verify_structure_theorem(&m2([0, 2]), &StructureOptions::default()).unwrap();
        assert!(!report.passed());
        assert!(report.realized_blocks.is_none());
    }
}
