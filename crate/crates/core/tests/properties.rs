use std::sync::Arc;

use covalg_core::algebra::{FdAlgebra, PartialAutomorphism};
use covalg_core::covalg::{LElement, RealizeOptions};
use covalg_core::ktheory::{hom_from_multiplicities, induced_map, j_to_a_maps, snf, IntMatrix};
use covalg_core::linalg::{hermitian_eigen, spectral_norm, C64};
use covalg_core::toeplitz::{ToeplitzElement, ToeplitzSystem};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// gcd of all k×k minors, by cofactor expansion.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        if m.is_empty() {
            return BigInt::from(1);
        }
        let mut total = BigInt::zero();
        for j in 0..m.len() {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (k - 1..n)
            .flat_map(|last| {
                subsets(last, k - 1).into_iter().map(move |mut s| {
                    s.push(last);
                    s
                })
            })
            .collect()
    }
    let (r, c) = (m.len(), m[0].len());
    let mut g = BigInt::zero();
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let sub: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| BigInt::from(m[i][j])).collect())
                .collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

/// Invariant factors from determinantal divisors.
fn invariant_factors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len().min(m[0].len());
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for k in 1..=n {
        let dk = determinantal_divisor(m, k);
        if dk.is_zero() {
            break;
        }
        out.push(&dk / &prev);
        prev = dk;
    }
    out
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-12i64..=12, c), r))
}

#[test]
fn snf_of_diag_two_three() {
    let s = snf(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
    assert_eq!(s.divisors(), vec![BigInt::from(1), BigInt::from(6)]);
}

#[test]
fn shift_f_matrix_has_difference_columns() {
    for m in 2..=6usize {
        let s = PartialAutomorphism::shift(m);
        let (incl, back) = j_to_a_maps(&s).unwrap();
        let f = incl.sub(&back).unwrap().to_rows();
        // J is blocks 1..m, θ⁻¹ sends block j to j - 1
        let expected: Vec<Vec<i64>> = (0..m)
            .map(|row| {
                (1..m)
                    .map(|j| (row == j) as i64 - (row == j - 1) as i64)
                    .collect()
            })
            .collect();
        assert_eq!(f, expected, "shift C^{m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_round_trips_and_matches_minors(m in small_matrix()) {
        let a = IntMatrix::from_rows(&m);
        let s = snf(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.u.is_unimodular());
        prop_assert!(s.v.is_unimodular());
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        let divs = s.divisors();
        prop_assert!(divs.iter().all(|d| d.is_positive()));
        prop_assert!(divs.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                prop_assert!(i == j || s.d.get(i, j).is_zero());
            }
        }
        prop_assert_eq!(divs, invariant_factors(&m));
    }

    #[test]
    fn induced_maps_are_functorial(
        a_sizes in prop::collection::vec(1usize..=2, 1..=2),
        m1 in prop::collection::vec(prop::collection::vec(0usize..=2, 2), 1..=2),
        m2 in prop::collection::vec(prop::collection::vec(0usize..=2, 2), 1..=2),
        slack in 0usize..=1,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FdAlgebra::new(a_sizes.clone()).unwrap();
        let m1: Vec<Vec<usize>> = m1.iter().map(|r| r[..a_sizes.len()].to_vec()).collect();
        let b_sizes: Vec<usize> = m1
            .iter()
            .map(|r| r.iter().zip(&a_sizes).map(|(m, n)| m * n).sum::<usize>() + slack + 1)
            .collect();
        let m2: Vec<Vec<usize>> = m2.iter().map(|r| r.iter().cycle().take(b_sizes.len()).cloned().collect()).collect();
        let c_sizes: Vec<usize> = m2
            .iter()
            .map(|r| r.iter().zip(&b_sizes).map(|(m, n)| m * n).sum::<usize>() + slack)
            .map(|s| s.max(1))
            .collect();
        let b = FdAlgebra::new(b_sizes).unwrap();
        let c = FdAlgebra::new(c_sizes).unwrap();
        let tau = hom_from_multiplicities(&a, &b, &m1, &mut rng).unwrap();
        let sigma = hom_from_multiplicities(&b, &c, &m2, &mut rng).unwrap();
        let t = induced_map(&tau).unwrap();
        let s = induced_map(&sigma).unwrap();
        let as_i64 = |m: &Vec<Vec<usize>>| m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect::<Vec<Vec<i64>>>();
        prop_assert_eq!(t.to_rows(), as_i64(&m1));
        prop_assert_eq!(s.to_rows(), as_i64(&m2));
        let composite = induced_map(&sigma.compose(&tau).unwrap()).unwrap();
        prop_assert_eq!(composite, s.mul(&t).unwrap());
    }
}

fn test_systems() -> Vec<Arc<PartialAutomorphism>> {
    let mut out: Vec<Arc<PartialAutomorphism>> =
        (2..=4).map(|m| Arc::new(PartialAutomorphism::shift(m))).collect();
    let u = covalg_core::linalg::Mat::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    );
    let twisted = PartialAutomorphism::new(
        FdAlgebra::new(vec![2, 2, 1]).unwrap(),
        [(0, 1)].into_iter().collect(),
        [(0, u)].into_iter().collect(),
        1e-9,
    )
    .unwrap();
    out.push(Arc::new(twisted));
    out.push(Arc::new(
        PartialAutomorphism::from_block_map(FdAlgebra::new(vec![1, 1]).unwrap(), &[(0, 1), (1, 0)]).unwrap(),
    ));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn l_is_a_normed_star_algebra(which in 0usize..5, seed in any::<u64>()) {
        let s = test_systems()[which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let level = s.chain_bound().finite().unwrap_or(3);
        let a = LElement::random(s.clone(), level, &mut rng);
        let b = LElement::random(s.clone(), level, &mut rng);
        let c = LElement::random(s.clone(), level, &mut rng);
        let scale = (a.l1_norm() * b.l1_norm() * c.l1_norm()).max(1.0);
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(left.distance(&right).unwrap() < 1e-9 * scale);
        let ab = a.mul(&b).unwrap();
        let ab_scale = (a.l1_norm() * b.l1_norm()).max(1.0);
        prop_assert!(ab.star().distance(&b.star().mul(&a.star()).unwrap()).unwrap() < 1e-9 * ab_scale);
        prop_assert!(ab.l1_norm() <= a.l1_norm() * b.l1_norm() * (1.0 + 1e-12) + 1e-12);
        let e = a.star().mul(&a).unwrap().cond_expect().term(0);
        for block in e.blocks() {
            let (vals, _) = hermitian_eigen(&((block + block.adjoint()) * C64::new(0.5, 0.0)));
            prop_assert!(vals.iter().all(|&v| v >= -1e-9 * ab_scale));
        }
    }
}

fn toeplitz_system(m: usize) -> ToeplitzSystem {
    ToeplitzSystem::new(
        Arc::new(PartialAutomorphism::shift(m)),
        &RealizeOptions::default(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compact_part_is_an_ideal(m in 2usize..=3, seed in any::<u64>()) {
        let ts = toeplitz_system(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ToeplitzElement::random(ts.b(), m, &mut rng);
        let y = ToeplitzElement::random(ts.b(), m, &mut rng);
        let z = ToeplitzElement::random(ts.b(), m, &mut rng);
        let mut lambda = z.clone();
        for (&k, s) in z.symbol() {
            lambda = lambda.sub(&ToeplitzElement::symbol_term(ts.b(), s.clone(), k).unwrap()).unwrap();
        }
        prop_assert!(lambda.lambda_membership());
        prop_assert!(x.t_mul(&lambda).unwrap().lambda_membership());
        prop_assert!(lambda.t_mul(&y).unwrap().lambda_membership());
        prop_assert!(lambda.t_star().lambda_membership());
    }

    #[test]
    fn gamma_grading_is_multiplicative(m in 2usize..=3, n in -2i64..=2, seed in any::<u64>()) {
        let ts = toeplitz_system(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ToeplitzElement::random(ts.b(), m, &mut rng);
        let y = ToeplitzElement::random(ts.b(), m, &mut rng);
        let lhs = ts.gamma_component(&x.t_mul(&y).unwrap(), n);
        let spread = (2 * m) as i64;
        let mut rhs = ToeplitzElement::zero(ts.b().clone());
        for k in -spread..=spread {
            let term = ts.gamma_component(&x, k).t_mul(&ts.gamma_component(&y, n - k)).unwrap();
            rhs = rhs.add(&term).unwrap();
        }
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn model_matches_truncated_matrices(m in 2usize..=3, seed in any::<u64>()) {
        let ts = toeplitz_system(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ToeplitzElement::random(ts.b(), m, &mut rng);
        let y = ToeplitzElement::random(ts.b(), m, &mut rng);
        prop_assert!(ts.truncation_residual(&x, &y, ts.chain_bound() + 3).unwrap() < 1e-10);
        let dec = ts.realization().decomposition();
        let d = dec.carrier_dim();
        let size = x.max_shift() + 2;
        let conc = |e: &covalg_core::algebra::Element| dec.to_concrete(e);
        let star = x.t_star().truncated_matrix(conc, d, size);
        prop_assert!(spectral_norm(&(star - x.truncated_matrix(conc, d, size).adjoint())) < 1e-10);
    }
}
