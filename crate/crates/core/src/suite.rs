//! Seeded check batteries behind the `validate` and `build` commands.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ChainBound, PartialAutomorphism};
use crate::covalg::{realize_covariance, LElement, Realization, RealizeOptions};
use crate::linalg::{hermitian_eigen, unitarity_residual, Tolerances, C64};
use crate::report::Check;
use crate::reprs::{extract_covrep, random_representation, round_trip_residual};
use crate::structure::CircleAction;

/// Smallest singular value accepted as faithful.
pub const FAITHFUL_MIN_SV: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub tol: Tolerances,
    pub seed: u64,
    /// Random samples per check.
    pub samples: usize,
    /// Regular-representation level, or the sampling level for unbounded chains.
    pub max_level: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            tol: Tolerances::default(),
            seed: 0,
            samples: 50,
            max_level: None,
        }
    }
}

impl SuiteOptions {
    pub fn realize(&self) -> RealizeOptions {
        RealizeOptions {
            tol: self.tol,
            seed: self.seed,
            level: self.max_level,
        }
    }

    fn sample_level(&self, system: &PartialAutomorphism) -> usize {
        match (self.max_level, system.chain_bound()) {
            (Some(k), _) => k,
            (None, ChainBound::Bounded(n)) => n,
            (None, ChainBound::Unbounded) => 3,
        }
    }
}

/// Checks on `Θ` itself and the algebraic laws of `L`.
pub fn validate_suite(system: &Arc<PartialAutomorphism>, opts: &SuiteOptions) -> Vec<Check> {
    let tol = opts.tol.identity;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let alg = system.algebra();
    let mut checks = Vec::new();

    let unitary = system
        .unitaries()
        .values()
        .map(unitarity_residual)
        .fold(0.0, f64::max);
    checks.push(Check::residual(
        "system.unitaries",
        unitary,
        tol,
        format!("{} unitaries", system.unitaries().len()),
    ));
    let pairs: Vec<_> = (0..opts.samples)
        .map(|_| (alg.random_element(&mut rng), alg.random_element(&mut rng)))
        .collect();
    checks.push(Check::residual(
        "system.theta_homomorphism",
        system.homomorphism_residual(&pairs),
        tol,
        "θ multiplicative, adjoint-preserving and isometric on I",
    ));
    checks.push(Check::boolean(
        "system.domain_chain",
        true,
        match system.chain_bound() {
            ChainBound::Bounded(n) => format!("D_n = 0 for |n| >= {n}"),
            ChainBound::Unbounded => "domain chain does not terminate".to_string(),
        },
    ));

    let k = opts.sample_level(system);
    let (mut assoc, mut star, mut norm, mut unit): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut positivity = f64::INFINITY;
    let one = LElement::one(system.clone());
    for _ in 0..opts.samples {
        let a = LElement::random(system.clone(), k, &mut rng);
        let b = LElement::random(system.clone(), k, &mut rng);
        let c = LElement::random(system.clone(), k, &mut rng);
        let (na, nb, nc) = (a.l1_norm(), b.l1_norm(), c.l1_norm());
        let ab = a.mul(&b).expect("same system");
        let left = ab.mul(&c).expect("same system");
        let right = a.mul(&b.mul(&c).expect("same system")).expect("same system");
        assoc = assoc.max(left.distance(&right).expect("same system") / (na * nb * nc).max(1.0));
        let rev = b.star().mul(&a.star()).expect("same system");
        star = star.max(ab.star().distance(&rev).expect("same system") / (na * nb).max(1.0));
        norm = norm.max((ab.l1_norm() - na * nb).max(0.0) / (na * nb).max(1.0));
        unit = unit.max(
            a.mul(&one)
                .expect("same system")
                .distance(&a)
                .expect("same system")
                / na.max(1.0),
        );
        let e = a.star().mul(&a).expect("same system").cond_expect().term(0);
        for block in e.blocks() {
            let h = (block + block.adjoint()) * C64::new(0.5, 0.0);
            let (vals, _) = hermitian_eigen(&h);
            let min = vals.into_iter().fold(f64::INFINITY, f64::min);
            positivity = positivity.min(min / (na * na).max(1.0));
        }
    }
    let negativity = (-positivity).max(0.0);
    checks.push(Check::residual(
        "l.associative",
        assoc,
        tol,
        format!("{} random triples", opts.samples),
    ));
    checks.push(Check::residual(
        "l.star_reverses_products",
        star,
        tol,
        "(ab)* = b*a*",
    ));
    checks.push(Check::residual(
        "l.l1_submultiplicative",
        norm,
        tol,
        "|ab|_1 <= |a|_1 |b|_1",
    ));
    checks.push(Check::residual("l.unit", unit, tol, "a · 1 = a"));
    checks.push(Check::residual(
        "l.expectation_positive",
        negativity,
        tol,
        format!("min eigenvalue of E(a*a) {:.3e}", positivity.min(f64::MAX)),
    ));
    checks
}

/// Checks on the realized algebra; requires a terminating domain chain.
pub fn build_suite(realization: &Realization, opts: &SuiteOptions) -> Vec<Check> {
    let tol = opts.tol.identity;
    let system = realization.system().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let blocks = realization.algebra().block_sizes().to_vec();
    checks.push(Check::boolean(
        "build.blocks",
        blocks.iter().map(|n| n * n).sum::<usize>() == realization.dim_l(),
        format!("blocks {blocks:?}, dim L = {}", realization.dim_l()),
    ));
    match realization.rep().faithfulness() {
        Ok(sv) => checks.push(Check::boolean(
            "build.faithful",
            sv > FAITHFUL_MIN_SV,
            format!("smallest singular value {sv:.3e}"),
        )),
        Err(e) => checks.push(Check::boolean("build.faithful", false, e.to_string())),
    }

    let n = system.chain_bound().finite().unwrap_or(1) as i64;
    let (mut isometry, mut mult, mut grading): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let action = CircleAction::new(realization.algebra().clone(), realization.dual_weights());
    for _ in 0..opts.samples {
        let level = (n - 1).max(0);
        let m = if level == 0 {
            0
        } else {
            rand::Rng::random_range(&mut rng, -level..=level)
        };
        let a = LElement::random_monomial(system.clone(), m, &mut rng);
        let x = a.term(m);
        isometry = isometry.max((realization.realized_norm(&a) - x.norm()).abs() / x.norm().max(1.0));
        if let Ok(act) = &action {
            grading = grading.max(act.grade_residual(&realization.to_abstract(&a), m));
        }
        let b = LElement::random(system.clone(), level as usize, &mut rng);
        let ab = a.mul(&b).expect("same system");
        let lhs = realization.to_abstract(&ab);
        let rhs = &realization.to_abstract(&a) * &realization.to_abstract(&b);
        mult = mult.max(lhs.distance(&rhs) / (a.l1_norm() * b.l1_norm()).max(1.0));
    }
    checks.push(Check::residual(
        "build.embedding_isometry",
        isometry,
        tol,
        "|a δ_n| = |a| in the realization",
    ));
    checks.push(Check::residual(
        "build.multiplicative",
        mult,
        tol,
        "L → C*(A, Θ) is multiplicative",
    ));
    checks.push(match action {
        Ok(_) => Check::residual(
            "build.dual_grading",
            grading,
            tol,
            format!("dual weights {:?}", realization.dual_weights()),
        ),
        Err(e) => Check::boolean("build.dual_grading", false, e.to_string()),
    });

    let mut worst: f64 = 0.0;
    let mut failure = None;
    for _ in 0..opts.samples.min(10) {
        let outcome = random_representation(realization.algebra(), &mut rng).and_then(|sigma| {
            let rep = extract_covrep(realization, &sigma, tol)?;
            let report = rep.validate();
            let r = round_trip_residual(realization, &sigma, &rep)?;
            Ok(r.max(report.max_residual()))
        });
        match outcome {
            Ok(r) => worst = worst.max(r),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    checks.push(match failure {
        None => Check::residual(
            "build.covariant_round_trip",
            worst,
            tol,
            "σ = π × u for (π, u) extracted from σ",
        ),
        Some(e) => Check::boolean("build.covariant_round_trip", false, e),
    });
    checks
}

/// Realizes and runs [`build_suite`], or reports why it cannot.
pub fn realize_and_build(
    system: &Arc<PartialAutomorphism>,
    opts: &SuiteOptions,
) -> (Option<Realization>, Vec<Check>) {
    match realize_covariance(system.clone(), &opts.realize()) {
        Ok(r) => {
            let checks = build_suite(&r, opts);
            (Some(r), checks)
        }
        Err(e) => (None, vec![Check::boolean("build.realize", false, e.to_string())]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_passed;

    #[test]
    fn shift_passes_both_suites() {
        let s = Arc::new(PartialAutomorphism::shift(3));
        let opts = SuiteOptions {
            samples: 10,
            ..Default::default()
        };
        assert!(all_passed(&validate_suite(&s, &opts)));
        let (r, checks) = realize_and_build(&s, &opts);
        assert!(all_passed(&checks), "{checks:?}");
        assert_eq!(r.unwrap().algebra().block_sizes(), &[3]);
    }

    #[test]
    fn unbounded_chain_validates_but_does_not_realize() {
        let alg = crate::algebra::FdAlgebra::commutative(2);
        let s = Arc::new(PartialAutomorphism::from_block_map(alg, &[(0, 1), (1, 0)]).unwrap());
        let opts = SuiteOptions {
            samples: 10,
            ..Default::default()
        };
        assert!(all_passed(&validate_suite(&s, &opts)));
        let (r, checks) = realize_and_build(&s, &opts);
        assert!(r.is_none());
        assert!(!all_passed(&checks));
    }
}
