//! Numerical Artin-Wedderburn decomposition of a concrete *-algebra of
//! matrices.
//!
//! The algebra generated by a list of `d × d` matrices is computed by span
//! closure. Its center is the null space of the commutators with the
//! generators; a random self-adjoint central element separates the minimal
//! central projections, and a random self-adjoint element of each simple
//! summand yields minimal projections and hence a full system of matrix units.
//!
//! When a grading of the carrier space is supplied (an integer weight per
//! coordinate, so that entry `(r, s)` of a matrix has degree `w_r - w_s`), the
//! minimal projections are drawn from the degree-zero part and the resulting
//! matrix units are homogeneous. Their degrees give the weights of the induced
//! circle action on the abstract block algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, FdAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, Mat, Subspace, Tolerances, Vector, C64};

#[derive(Clone, Debug)]
pub struct WedderburnOptions {
    pub tol: Tolerances,
    pub seed: u64,
    pub max_retries: usize,
    /// Weight of each carrier coordinate, if the algebra is graded.
    pub grading: Option<Vec<i64>>,
}

impl Default for WedderburnOptions {
    fn default() -> Self {
        WedderburnOptions {
            tol: Tolerances::default(),
            seed: 0,
            max_retries: 8,
            grading: None,
        }
    }
}

/// The block structure of a concrete algebra together with a
/// *-isomorphism onto the abstract block algebra.
#[derive(Clone, Debug)]
pub struct Decomposition {
    algebra: FdAlgebra,
    carrier: usize,
    /// `units[i][j * n + k]` is the concrete image of `e_{jk}` in block `i`.
    units: Vec<Vec<Mat>>,
    multiplicities: Vec<usize>,
    central_projections: Vec<Mat>,
    weights: Option<Vec<Vec<i64>>>,
}

fn to_vec(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

fn from_vec(v: &Vector, d: usize) -> Mat {
    Mat::from_column_slice(d, d, v.as_slice())
}

fn combine(basis: &[Mat], coeffs: impl Iterator<Item = C64>, d: usize) -> Mat {
    let mut m = Mat::zeros(d, d);
    for (b, c) in basis.iter().zip(coeffs) {
        m += b * c;
    }
    m
}

const CENTER_PROBES: usize = 3;

/// Degree of a homogeneous matrix under the grading, or `None` if mixed.
pub fn homogeneous_degree(m: &Mat, grading: &[i64], tol: f64) -> Option<i64> {
    let mut norms: std::collections::BTreeMap<i64, f64> = Default::default();
    for r in 0..m.nrows() {
        for s in 0..m.ncols() {
            *norms.entry(grading[r] - grading[s]).or_default() += m[(r, s)].norm_sqr();
        }
    }
    let total: f64 = norms.values().sum();
    let (&deg, &best) = norms.iter().max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if total - best <= tol * tol * total.max(1e-300) {
        Some(deg)
    } else {
        None
    }
}

/// Degree-`n` part of `m` under the grading.
pub fn graded_part(m: &Mat, grading: &[i64], n: i64) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |r, s| {
        if grading[r] - grading[s] == n {
            m[(r, s)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Orthonormal (Hilbert-Schmidt) basis of the *-algebra generated by `generators`.
pub fn generated_algebra(generators: &[Mat], tol: f64) -> Result<Vec<Mat>> {
    let d = generators.first().map(|g| g.nrows()).unwrap_or(0);
    let mut span = Subspace::new(d * d);
    let mut pending: Vec<Mat> = Vec::new();
    for g in generators {
        if span.insert(&to_vec(g), tol) {
            pending.push(g.clone());
        }
    }
    // The defect of closure is bilinear, so a random pair detects it generically.
    if !pending.is_empty() && !closed_on_random_pair(&span, d, tol) {
        while let Some(x) = pending.pop() {
            for g in generators {
                let p = &x * g;
                if span.insert(&to_vec(&p), tol) {
                    pending.push(p);
                }
            }
        }
    }
    let basis: Vec<Mat> = span.basis().iter().map(|v| from_vec(v, d)).collect();
    let mut worst: f64 = 0.0;
    for b in &basis {
        let adj = to_vec(&b.adjoint());
        worst = worst.max(span.residual(&adj));
    }
    if worst > tol.sqrt().max(1e-6) {
        return Err(Error::NotSelfAdjoint { residual: worst });
    }
    Ok(basis)
}

fn closed_on_random_pair(span: &Subspace, d: usize, tol: f64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let basis: Vec<Mat> = span.basis().iter().map(|v| from_vec(v, d)).collect();
    (0..2).all(|_| {
        let x = combine(
            &basis,
            (0..basis.len()).map(|_| linalg::random_complex(&mut rng)),
            d,
        );
        let y = combine(
            &basis,
            (0..basis.len()).map(|_| linalg::random_complex(&mut rng)),
            d,
        );
        let p = to_vec(&(&x * &y));
        span.residual(&p) <= tol * p.norm().max(1.0)
    })
}

impl Decomposition {
    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn carrier_dim(&self) -> usize {
        self.carrier
    }

    /// Multiplicity of each irreducible block in the concrete representation.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn central_projections(&self) -> &[Mat] {
        &self.central_projections
    }

    /// Weights of the circle action induced on each abstract block (only for
    /// graded input). Each block's weights are normalised to start at 0.
    pub fn weights(&self) -> Option<&[Vec<i64>]> {
        self.weights.as_deref()
    }

    pub fn matrix_unit(&self, block: usize, row: usize, col: usize) -> &Mat {
        let n = self.algebra.block_size(block);
        &self.units[block][row * n + col]
    }

    /// The *-isomorphism from the abstract block algebra into the concrete one.
    pub fn to_concrete(&self, x: &Element) -> Mat {
        let mut m = Mat::zeros(self.carrier, self.carrier);
        for (i, block) in x.blocks().iter().enumerate() {
            let n = block.nrows();
            for j in 0..n {
                for k in 0..n {
                    let c = block[(j, k)];
                    if c != C64::new(0.0, 0.0) {
                        m += &self.units[i][j * n + k] * c;
                    }
                }
            }
        }
        m
    }

    /// Inverse of `to_concrete` on the concrete algebra.
    pub fn to_abstract(&self, m: &Mat) -> Element {
        let blocks = self
            .units
            .iter()
            .zip(&self.multiplicities)
            .map(|(units, &mult)| {
                let n = (units.len() as f64).sqrt().round() as usize;
                Mat::from_fn(n, n, |j, k| {
                    linalg::hs_inner(&units[j * n + k], m) / C64::new(mult as f64, 0.0)
                })
            })
            .collect();
        Element::from_blocks(blocks).unwrap_or_else(|_| self.algebra.zero())
    }

    /// Distance from `m` to the concrete algebra.
    pub fn membership_residual(&self, m: &Mat) -> f64 {
        linalg::spectral_norm(&(self.to_concrete(&self.to_abstract(m)) - m))
    }
}

/// Decomposes the *-algebra generated by `generators` into full matrix blocks.
///
/// Blocks are reported sorted by size, ties broken by the trace of the first
/// generator against each minimal central projection.
pub fn wedderburn(generators: &[Mat], opts: &WedderburnOptions) -> Result<Decomposition> {
    let d = match generators.first() {
        Some(g) => g.nrows(),
        None => return Err(Error::Precondition("no generators".into())),
    };
    if let Some(bad) = generators.iter().find(|g| g.nrows() != d || g.ncols() != d) {
        return Err(Error::DimensionMismatch(format!(
            "generator of shape {:?} in a {d}x{d} family",
            bad.shape()
        )));
    }
    if let Some(grading) = &opts.grading {
        if grading.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "grading has {} weights for carrier dimension {d}",
                grading.len()
            )));
        }
    }
    let tol = opts.tol.identity;
    let basis = generated_algebra(generators, tol)?;
    let dim = basis.len();
    if dim == 0 {
        return Ok(Decomposition {
            algebra: FdAlgebra::commutative(0),
            carrier: d,
            units: Vec::new(),
            multiplicities: Vec::new(),
            central_projections: Vec::new(),
            weights: opts.grading.as_ref().map(|_| Vec::new()),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let center = center_basis(&basis, tol, &mut rng);
    let mut attempts = 0;
    let projections = loop {
        attempts += 1;
        if let Some(p) = central_projections(&center, d, opts.tol.spectral_gap, &mut rng) {
            break p;
        }
        if attempts > opts.max_retries {
            return Err(Error::Degenerate { attempts });
        }
    };

    let mut blocks = Vec::with_capacity(projections.len());
    for p in &projections {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match simple_block(p, &basis, opts, &mut rng)? {
                Some(b) => {
                    blocks.push(b);
                    break;
                }
                None if attempts > opts.max_retries => return Err(Error::Degenerate { attempts }),
                None => {}
            }
        }
    }

    let total: usize = blocks.iter().map(|b| b.size * b.size).sum();
    if total != dim {
        return Err(Error::Degenerate { attempts: 0 });
    }

    let fingerprint = |p: &Mat| {
        let t = linalg::hs_inner(p, &generators[0]);
        ((t.re * 1e9).round() as i64, (t.im * 1e9).round() as i64)
    };
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&i| (blocks[i].size, fingerprint(&projections[i])));

    let algebra = FdAlgebra::new(order.iter().map(|&i| blocks[i].size).collect())?;
    let mut units = Vec::new();
    let mut multiplicities = Vec::new();
    let mut central = Vec::new();
    let mut weights = Vec::new();
    for &i in &order {
        let b = &blocks[i];
        units.push(b.units.clone());
        multiplicities.push(b.multiplicity);
        central.push(projections[i].clone());
        weights.push(b.weights.clone());
    }
    Ok(Decomposition {
        algebra,
        carrier: d,
        units,
        multiplicities,
        central_projections: central,
        weights: opts.grading.as_ref().map(|_| weights),
    })
}

/// Elements of the span commuting with a few random self-adjoint elements.
/// Generic self-adjoint pairs generate the whole algebra, so this is the center.
fn center_basis<R: Rng>(basis: &[Mat], tol: f64, rng: &mut R) -> Vec<Mat> {
    let d = basis[0].nrows();
    let dim = basis.len();
    let checks: Vec<Mat> = (0..CENTER_PROBES)
        .map(|_| random_self_adjoint(basis, d, rng))
        .collect();
    let mut system = Mat::zeros(checks.len() * d * d, dim);
    for (k, b) in basis.iter().enumerate() {
        for (c, g) in checks.iter().enumerate() {
            let comm = b * g - g * b;
            system
                .view_mut((c * d * d, k), (d * d, 1))
                .copy_from_slice(comm.as_slice());
        }
    }
    let null = linalg::null_space(&system, tol.sqrt().min(1e-7));
    (0..null.ncols())
        .map(|j| combine(basis, null.column(j).iter().cloned(), d))
        .collect()
}

fn random_self_adjoint<R: Rng>(basis: &[Mat], d: usize, rng: &mut R) -> Mat {
    let h = combine(basis, (0..basis.len()).map(|_| linalg::random_complex(rng)), d);
    (&h + h.adjoint()).scale(0.5)
}

fn central_projections<R: Rng>(center: &[Mat], d: usize, gap: f64, rng: &mut R) -> Option<Vec<Mat>> {
    let r = center.len();
    let h = random_self_adjoint(center, d, rng);
    let op = Mat::from_fn(r, r, |i, j| linalg::hs_inner(&center[i], &(&h * &center[j])));
    let (values, vectors) = hermitian_eigen(&op);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if values.windows(2).any(|w| (w[1] - w[0]) < gap * scale) {
        return None;
    }
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let z = combine(center, vectors.column(j).iter().cloned(), d);
        let tr = z.trace();
        let tr2 = (&z * &z).trace();
        if tr2.norm() < 1e-300 {
            return None;
        }
        let p = z * (tr / tr2);
        out.push((&p + p.adjoint()).scale(0.5));
    }
    Some(out)
}

struct SimpleBlock {
    size: usize,
    multiplicity: usize,
    units: Vec<Mat>,
    weights: Vec<i64>,
}

fn simple_block<R: Rng>(
    p: &Mat,
    basis: &[Mat],
    opts: &WedderburnOptions,
    rng: &mut R,
) -> Result<Option<SimpleBlock>> {
    let d = p.nrows();
    let tol = opts.tol.identity;
    let mut corner = Subspace::new(d * d);
    let mut corner_basis = Vec::new();
    for b in basis {
        let pb = p * b;
        if corner.insert(&to_vec(&pb), tol) {
            corner_basis.push(pb);
        }
    }
    let corner_basis: Vec<Mat> = corner.basis().iter().map(|v| from_vec(v, d)).collect();
    let dim = corner_basis.len();
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim || n == 0 {
        return Ok(None);
    }

    // degree-zero part of the corner, if graded
    let fixed: Vec<Mat> = match &opts.grading {
        Some(g) => {
            let mut s = Subspace::new(d * d);
            for b in &corner_basis {
                s.insert(&to_vec(&graded_part(b, g, 0)), tol);
            }
            s.basis().iter().map(|v| from_vec(v, d)).collect()
        }
        None => corner_basis.clone(),
    };

    let range = linalg::column_space(p, 1e-8);
    let rank = range.ncols();
    if !rank.is_multiple_of(n) {
        return Ok(None);
    }
    let mult = rank / n;

    let a = random_self_adjoint(&fixed, d, rng);
    let compressed = range.adjoint() * &a * &range;
    let (values, vectors) = hermitian_eigen(&compressed);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..values.len() {
        if values[i] - values[i - 1] > opts.tol.spectral_gap * scale {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
    }
    if groups.len() != n || groups.iter().any(|g| g.len() != mult) {
        return Ok(None);
    }
    let projections: Vec<Mat> = groups
        .iter()
        .map(|g| {
            let mut v = Mat::zeros(rank, g.len());
            for (c, &i) in g.iter().enumerate() {
                v.set_column(c, &vectors.column(i));
            }
            let w = &range * v;
            &w * w.adjoint()
        })
        .collect();

    let q1 = &projections[0];
    let mut column = Vec::with_capacity(n);
    column.push(q1.clone());
    for qj in &projections[1..] {
        let b = combine(&corner_basis, (0..dim).map(|_| linalg::random_complex(rng)), d);
        let x = qj * b * q1;
        let c = (x.adjoint() * &x).trace().re / mult as f64;
        if c < 1e-12 {
            return Ok(None);
        }
        column.push(x / C64::new(c.sqrt(), 0.0));
    }

    let mut degrees = vec![0i64; n];
    if let Some(g) = &opts.grading {
        for (j, e) in column.iter().enumerate() {
            match homogeneous_degree(e, g, 1e-6) {
                Some(deg) => degrees[j] = deg,
                None => return Ok(None),
            }
        }
    }
    // order basis vectors by weight for a readable presentation
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&j| degrees[j]);
    let column: Vec<Mat> = perm.iter().map(|&j| column[j].clone()).collect();
    let base = degrees[perm[0]];
    let weights: Vec<i64> = perm.iter().map(|&j| degrees[j] - base).collect();

    // e_{jk} = e_{j0} e_{k0}^* after re-anchoring at the new first vector
    let anchor = column[0].clone();
    let col: Vec<Mat> = column.iter().map(|e| e * anchor.adjoint()).collect();
    let mut units = Vec::with_capacity(dim);
    for j in 0..n {
        for k in 0..n {
            units.push(&col[j] * col[k].adjoint());
        }
    }
    Ok(Some(SimpleBlock {
        size: n,
        multiplicity: mult,
        units,
        weights,
    }))
}
