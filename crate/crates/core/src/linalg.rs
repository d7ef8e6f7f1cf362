//! Dense complex linear algebra helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Numerical thresholds used across the workbench.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for identity checks.
    pub identity: f64,
    /// Minimum separation of central eigenvalues in the Wedderburn step.
    pub spectral_gap: f64,
    /// Singular values below this are treated as zero in pseudo-inverses.
    pub singular_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-9,
            spectral_gap: 1e-6,
            singular_cutoff: 1e-10,
        }
    }
}

pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Moore-Penrose inverse square root of a positive semidefinite matrix.
pub fn pinv_sqrt(m: &Mat, cutoff: f64) -> Mat {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut d = Mat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        if v > cutoff * cutoff {
            d[(i, i)] = C64::new(1.0 / v.sqrt(), 0.0);
        }
    }
    &vectors * d * vectors.adjoint()
}

/// Orthonormal basis of the null space of `m`, as columns.
pub fn null_space(m: &Mat, tol: f64) -> Mat {
    let cols = m.ncols();
    if cols == 0 {
        return Mat::zeros(0, 0);
    }
    // tall systems are first reduced to their square R factor
    let square = if m.nrows() > cols {
        m.clone().qr().r()
    } else {
        let mut padded = Mat::zeros(cols, cols);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let scale = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1.0);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol * scale)
        .collect();
    let mut out = Mat::zeros(cols, kept.len());
    for (j, &i) in kept.iter().enumerate() {
        let row = v_t.row(i);
        for r in 0..cols {
            out[(r, j)] = row[r].conj();
        }
    }
    out
}

pub fn rank(m: &Mat, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = singular_values(m);
    let scale = s.last().cloned().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&v| v > tol * scale).count()
}

/// Orthonormal basis for the column space of `m`.
pub fn column_space(m: &Mat, tol: f64) -> Mat {
    let mut span = Subspace::new(m.nrows());
    for c in 0..m.ncols() {
        span.insert(&m.column(c).into_owned(), tol);
    }
    span.to_matrix()
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Haar-ish random unitary from the QR factorisation of a random matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Mat {
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let qr = random_matrix(n, n, rng).qr();
    let q = qr.q();
    let r = qr.r();
    let mut phases = Mat::identity(n, n);
    for i in 0..n {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            phases[(i, i)] = d / C64::new(d.norm(), 0.0);
        }
    }
    q * phases
}

pub fn unitarity_residual(u: &Mat) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    spectral_norm(&(u.adjoint() * u - Mat::identity(n, n)))
}

pub fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Incrementally grown orthonormal basis of a subspace of C^n.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn spanned_by<'a, I>(ambient: usize, vectors: I, tol: f64) -> Self
    where
        I: IntoIterator<Item = &'a Vector>,
    {
        let mut s = Subspace::new(ambient);
        for v in vectors {
            s.insert(v, tol);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    fn orthogonal_part(&self, v: &Vector) -> Vector {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, C64::new(1.0, 0.0));
            }
        }
        w
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &Vector, tol: f64) -> bool {
        assert_eq!(v.len(), self.ambient);
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let w = self.orthogonal_part(v);
        let wn = w.norm();
        if wn <= tol * norm.max(1.0) {
            return false;
        }
        self.basis.push(w / C64::new(wn, 0.0));
        true
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        self.orthogonal_part(v).norm()
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        self.residual(v) <= tol * v.norm().max(1.0)
    }

    pub fn coordinates(&self, v: &Vector) -> Vector {
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dotc(v)))
    }

    pub fn to_matrix(&self) -> Mat {
        let mut m = Mat::zeros(self.ambient, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, b);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            assert!(unitarity_residual(&random_unitary(n, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn pinv_sqrt_of_projection_is_projection() {
        let p = Mat::from_diagonal(&Vector::from_vec(vec![ONE, ZERO, C64::new(4.0, 0.0)]));
        let r = pinv_sqrt(&p, 1e-10);
        assert!((r[(0, 0)] - ONE).norm() < 1e-12);
        assert!(r[(1, 1)].norm() < 1e-12);
        assert!((r[(2, 2)] - C64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn subspace_ignores_dependent_vectors() {
        let a = Vector::from_vec(vec![ONE, ZERO]);
        let b = Vector::from_vec(vec![C64::new(2.0, 0.0), ZERO]);
        let s = Subspace::spanned_by(2, [&a, &b], 1e-10);
        assert_eq!(s.dim(), 1);
    }
}
