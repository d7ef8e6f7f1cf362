//! K₀ of block algebras as integer dimension vectors, induced maps as
//! multiplicity matrices, and exactness of integer sequences decided by
//! Smith normal form with arbitrary-precision arithmetic.
//!
//! Every algebra here is finite dimensional, so `K₁ = 0` throughout and the
//! six-term sequence of a partial automorphism collapses to
//!
//! ```text
//! 0 → K₀(J) --(i_* - θ⁻¹_*)--> K₀(A) --i_*--> K₀(C*(A, Θ)) → 0
//! ```

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::algebra::{Element, FdAlgebra, PartialAutomorphism};
use crate::covalg::{realize_covariance, RealizeOptions};
use crate::error::{Error, Result};
use crate::hom::StarHom;
use crate::linalg::{self, Mat};
use crate::report::Check;
use crate::toeplitz::{ToeplitzRealization, ToeplitzSystem};

/// Dense integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    /// Entries as `i64`; panics on overflow.
    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| i64::try_from(self.get(i, j)).expect("entry fits in i64"))
                    .collect()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} minus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Rows `from..` as a new matrix.
    pub fn tail_rows(&self, from: usize) -> IntMatrix {
        let from = from.min(self.rows);
        IntMatrix {
            rows: self.rows - from,
            cols: self.cols,
            data: self.data[from * self.cols..].to_vec(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row_dst += q row_src`.
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + q * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// `col_dst += q col_src`.
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + q * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    /// Fraction-free (Bareiss) elimination; `None` unless square.
    pub fn determinant(&self) -> Option<BigInt> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return Some(BigInt::zero());
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        Some(if n == 0 { sign } else { sign * m.get(n - 1, n - 1) })
    }

    /// Determinant `±1`.
    pub fn is_unimodular(&self) -> bool {
        self.determinant().is_some_and(|d| d.abs().is_one())
    }
}

/// `U m V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn divisors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

/// Smith normal form by repeated minimal-pivot reduction.
pub fn snf(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let pivot = (t..r)
                .flat_map(|i| (t..c).map(move |j| (i, j)))
                .filter(|&(i, j)| !d.get(i, j).is_zero())
                .min_by_key(|&(i, j)| d.get(i, j).abs());
            let Some((pi, pj)) = pivot else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = -d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = -d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    v_inv.add_row(t, j, &-&q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v, v_inv }
}

/// `K₀(⊕ M_{n_i}) = Z^k`, one generator per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Group {
    pub rank: usize,
    /// Block sizes, labelling the generators.
    pub labels: Vec<usize>,
}

pub fn k0(algebra: &FdAlgebra) -> K0Group {
    K0Group {
        rank: algebra.num_blocks(),
        labels: algebra.block_sizes().to_vec(),
    }
}

/// `K₁` of a finite-dimensional algebra.
pub const K1_RANK: usize = 0;

/// Multiplicity matrix of a *-homomorphism: entry `(j, i)` is the rank in
/// target block `j` of the image of a minimal projection of source block `i`.
pub fn induced_map(h: &StarHom) -> Result<IntMatrix> {
    let residual = h.homomorphism_residual();
    if residual > 1e-8 {
        return Err(Error::NotHomomorphism { residual });
    }
    let (src, tgt) = (h.source(), h.target());
    let mut m = IntMatrix::zeros(tgt.num_blocks(), src.num_blocks());
    for i in 0..src.num_blocks() {
        let p = h.minimal_projection_image(i);
        for j in 0..tgt.num_blocks() {
            let tr = p.block(j).trace().re;
            let rounded = tr.round();
            if (tr - rounded).abs() > 1e-6 {
                return Err(Error::NotHomomorphism {
                    residual: (tr - rounded).abs(),
                });
            }
            m.set(j, i, BigInt::from(rounded as i64));
        }
    }
    Ok(m)
}

/// A *-homomorphism with prescribed multiplicities, each target block
/// conjugated by a random unitary. Requires `Σ_i m_ji n_i ≤ size_j`.
pub fn hom_from_multiplicities<R: Rng>(
    source: &FdAlgebra,
    target: &FdAlgebra,
    mult: &[Vec<usize>],
    rng: &mut R,
) -> Result<StarHom> {
    if mult.len() != target.num_blocks() || mult.iter().any(|r| r.len() != source.num_blocks()) {
        return Err(Error::DimensionMismatch("multiplicity matrix shape".into()));
    }
    for (j, row) in mult.iter().enumerate() {
        let used: usize = row.iter().zip(source.block_sizes()).map(|(m, n)| m * n).sum();
        if used > target.block_size(j) {
            return Err(Error::DimensionMismatch(format!(
                "block {j} of size {} cannot hold {used} dimensions",
                target.block_size(j)
            )));
        }
    }
    let unitaries: Vec<Mat> = target
        .block_sizes()
        .iter()
        .map(|&n| linalg::random_unitary(n, rng))
        .collect();
    StarHom::from_fn(source.clone(), target.clone(), |x| {
        let blocks = mult
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let n = target.block_size(j);
                let mut b = Mat::zeros(n, n);
                let mut off = 0;
                for (i, &k) in row.iter().enumerate() {
                    let s = source.block_size(i);
                    for _ in 0..k {
                        b.view_mut((off, off), (s, s)).copy_from(x.block(i));
                        off += s;
                    }
                }
                &unitaries[j] * b * unitaries[j].adjoint()
            })
            .collect();
        Element::from_blocks(blocks).expect("blocks are square")
    })
}

/// Verdict on `ker g / im f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exactness {
    pub exact: bool,
    /// `g f = 0`.
    pub composite_zero: bool,
    pub kernel_rank: usize,
    pub image_rank: usize,
    /// Elementary divisors of `im f` inside `ker g`; all `1` when exact.
    pub divisors: Vec<BigInt>,
}

impl Exactness {
    pub fn certificate(&self) -> String {
        if !self.composite_zero {
            return "g f is not zero".into();
        }
        let divs: Vec<String> = self.divisors.iter().map(ToString::to_string).collect();
        format!(
            "ker g has rank {}, im f has rank {}, elementary divisors [{}]",
            self.kernel_rank,
            self.image_rank,
            divs.join(", ")
        )
    }
}

/// Exactness of `Z^a --f--> Z^b --g--> Z^c` at `Z^b`, including torsion.
pub fn exact_at(f: &IntMatrix, g: &IntMatrix) -> Result<Exactness> {
    if g.cols != f.rows {
        return Err(Error::DimensionMismatch(format!(
            "f lands in Z^{} but g starts from Z^{}",
            f.rows, g.cols
        )));
    }
    let gf = g.mul(f)?;
    if !gf.is_zero() {
        return Ok(Exactness {
            exact: false,
            composite_zero: false,
            kernel_rank: 0,
            image_rank: 0,
            divisors: Vec::new(),
        });
    }
    let sg = snf(g);
    let r = sg.rank();
    let kernel_rank = f.rows - r;
    // kernel coordinates of im f
    let coords = sg.v_inv.mul(f)?.tail_rows(r);
    let sf = snf(&coords);
    let divisors = sf.divisors();
    let exact = divisors.len() == kernel_rank && divisors.iter().all(One::is_one);
    Ok(Exactness {
        exact,
        composite_zero: true,
        kernel_rank,
        image_rank: divisors.len(),
        divisors,
    })
}

/// The K-theory sequence of a partial automorphism with its exactness verdicts.
#[derive(Clone, Debug)]
pub struct PvReport {
    pub k0_j: K0Group,
    pub k0_a: K0Group,
    pub k0_b: K0Group,
    /// `i_* - θ⁻¹_*: K₀(J) → K₀(A)`.
    pub f: IntMatrix,
    /// `i_*: K₀(A) → K₀(C*(A, Θ))`.
    pub g: IntMatrix,
    /// Exactness at `K₀(J)`, `K₀(A)`, `K₀(C*(A, Θ))`.
    pub at_j: Exactness,
    pub at_a: Exactness,
    pub at_b: Exactness,
    pub checks: Vec<Check>,
}

impl PvReport {
    pub fn exact(&self) -> bool {
        self.at_j.exact && self.at_a.exact && self.at_b.exact
    }
}

/// The maps `i_*` and `θ⁻¹_*` from `K₀(J)` to `K₀(A)`.
pub fn j_to_a_maps(system: &PartialAutomorphism) -> Result<(IntMatrix, IntMatrix)> {
    let j = system.target().clone();
    let alg = system.algebra().clone();
    let incl = StarHom::from_fn(j.as_algebra(), alg.clone(), |x| j.embed(x))?;
    let back = StarHom::from_fn(j.as_algebra(), alg, |x| {
        system.apply(&j.embed(x), -1).expect("J is the range of θ")
    })?;
    Ok((induced_map(&incl)?, induced_map(&back)?))
}

fn exactness_check(name: &str, e: &Exactness) -> Check {
    Check::boolean(name, e.exact, e.certificate())
}

/// Checks `0 → K₀(J) → K₀(A) → K₀(C*(A, Θ)) → 0` for exactness everywhere.
pub fn pv_verify(system: Arc<PartialAutomorphism>, opts: &RealizeOptions) -> Result<PvReport> {
    if system.chain_bound().finite().is_none() {
        return Err(Error::UnboundedChain);
    }
    let realization = realize_covariance(system.clone(), opts)?;
    let (incl, back) = j_to_a_maps(&system)?;
    let f = incl.sub(&back)?;
    let g = induced_map(&realization.embedding()?)?;
    let (kj, kb) = (f.cols, g.rows);
    let at_j = exact_at(&IntMatrix::zeros(kj, 0), &f)?;
    let at_a = exact_at(&f, &g)?;
    let at_b = exact_at(&g, &IntMatrix::zeros(0, kb))?;
    let checks = vec![
        exactness_check("pv.exact_at_a", &at_a),
        exactness_check("pv.exact_at_b", &at_b),
        exactness_check("pv.exact_at_j", &at_j),
        Check::boolean(
            "pv.k1_vanishes",
            K1_RANK == 0,
            "K1 of a finite-dimensional algebra is 0",
        ),
    ];
    Ok(PvReport {
        k0_j: k0(&system.target().as_algebra()),
        k0_a: k0(system.algebra()),
        k0_b: k0(realization.algebra()),
        f,
        g,
        at_j,
        at_a,
        at_b,
        checks,
    })
}

/// The square `i_* j_* = d_* (i_* - θ⁻¹_*)` from `K₀(J)` to `K₀(𝓔)`.
#[derive(Clone, Debug)]
pub struct DiagramReport {
    pub j_star: IntMatrix,
    pub i_star: IntMatrix,
    pub d_star: IntMatrix,
    pub f: IntMatrix,
    pub commutes: bool,
    pub checks: Vec<Check>,
}

pub fn diagram_check(system: Arc<PartialAutomorphism>, opts: &RealizeOptions) -> Result<DiagramReport> {
    let ts = ToeplitzSystem::new(system.clone(), opts)?;
    let tr = ToeplitzRealization::new(&ts, opts.seed)?;
    let j_star = induced_map(&tr.j_map(&ts)?)?;
    let i_star = induced_map(&tr.inclusion()?)?;
    let d_star = induced_map(&tr.d_map(&ts)?)?;
    let (incl, back) = j_to_a_maps(&system)?;
    let f = incl.sub(&back)?;
    let lhs = i_star.mul(&j_star)?;
    let rhs = d_star.mul(&f)?;
    let commutes = lhs == rhs;
    let checks = vec![
        Check::boolean(
            "diagram.commutes",
            commutes,
            format!("i_* j_* = {lhs:?}, d_* (i_* - theta^-1_*) = {rhs:?}"),
        ),
        Check::boolean(
            "diagram.d_unimodular",
            d_star.is_unimodular(),
            format!("d_* = {d_star:?}"),
        ),
        Check::boolean(
            "diagram.j_unimodular",
            j_star.is_unimodular(),
            format!("j_* = {j_star:?}"),
        ),
    ];
    Ok(DiagramReport {
        j_star,
        i_star,
        d_star,
        f,
        commutes,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check_snf(a: &IntMatrix) -> Snf {
        let s = snf(a);
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        s
    }

    #[test]
    fn snf_of_diag_2_3() {
        let s = check_snf(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn snf_of_identity_and_zero() {
        assert_eq!(check_snf(&IntMatrix::identity(3)).d, IntMatrix::identity(3));
        assert_eq!(check_snf(&IntMatrix::zeros(2, 3)).d, IntMatrix::zeros(2, 3));
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).determinant(), Some(BigInt::from(1)));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), Some(BigInt::from(-1)));
        assert_eq!(
            m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).determinant(),
            Some(BigInt::from(-3))
        );
        assert_eq!(IntMatrix::zeros(0, 0).determinant(), Some(BigInt::from(1)));
    }

    #[test]
    fn exactness_verdicts() {
        let f = m(&[&[-1, 0], &[1, -1], &[0, 1]]);
        let g = m(&[&[1, 1, 1]]);
        assert!(exact_at(&f, &g).unwrap().exact);
        // f = 0, g injective
        assert!(
            exact_at(&IntMatrix::zeros(2, 1), &IntMatrix::identity(2))
                .unwrap()
                .exact
        );
        // Z --2--> Z --0--> 0
        let e = exact_at(&m(&[&[2]]), &IntMatrix::zeros(0, 1)).unwrap();
        assert!(!e.exact);
        assert_eq!(e.divisors, vec![BigInt::from(2)]);
        assert!(!exact_at(&m(&[&[1]]), &m(&[&[1]])).unwrap().composite_zero);
    }

    #[test]
    fn identity_hom_induces_identity() {
        let alg = FdAlgebra::new(vec![1, 2, 3]).unwrap();
        assert_eq!(
            induced_map(&StarHom::identity(&alg)).unwrap(),
            IntMatrix::identity(3)
        );
    }

    #[test]
    fn multiplicities_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let src = FdAlgebra::new(vec![1, 2]).unwrap();
        let tgt = FdAlgebra::new(vec![5, 2]).unwrap();
        let mult = vec![vec![1, 2], vec![0, 1]];
        let h = hom_from_multiplicities(&src, &tgt, &mult, &mut rng).unwrap();
        assert_eq!(induced_map(&h).unwrap(), m(&[&[1, 2], &[0, 1]]));
    }

    #[test]
    fn shift_pv_sequences_are_exact() {
        for k in 2..=4 {
            let r = pv_verify(
                Arc::new(PartialAutomorphism::shift(k)),
                &RealizeOptions::default(),
            )
            .unwrap();
            assert!(r.exact(), "{:?}", r);
            assert_eq!(r.g, IntMatrix::from_rows(&[vec![1; k]]));
        }
    }

    #[test]
    fn zero_ideals_give_identity_sequence() {
        let system = Arc::new(PartialAutomorphism::trivial(FdAlgebra::commutative(2)));
        let r = pv_verify(system.clone(), &RealizeOptions::default()).unwrap();
        assert!(r.exact());
        // a permutation: the realized blocks may come in another order
        let rows = r.g.to_rows();
        assert!(r.g.is_unimodular() && rows.iter().all(|row| row.iter().sum::<i64>() == 1));
        let d = diagram_check(system, &RealizeOptions::default()).unwrap();
        assert!(d.commutes);
    }

    #[test]
    fn shift_c2_square_commutes() {
        let d = diagram_check(
            Arc::new(PartialAutomorphism::shift(2)),
            &RealizeOptions::default(),
        )
        .unwrap();
        assert!(d.checks.iter().all(|c| c.passed), "{:?}", d.checks);
    }
}
