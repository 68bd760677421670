mod common;

use std::sync::Arc;

use frontidx::indexcheck::{poincare_hopf, TangentField};
use frontidx::morin::{GaussMapHomomorphism, SyntheticField};
use frontidx::surfaces::{BumpyBody, FrontField};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};

use common::checks::{self, strata_of, Check};
use common::winding_index;

fn cfg() -> Config {
    Config {
        cases: 24,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn lift(c: Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn swallowtail_verdicts_ignore_eta_sign(u in -0.3f64..0.3) {
        lift(checks::swallowtail_flip(u))?;
    }

    #[test]
    fn a3_signs_ignore_eta_sign(seed in 0u64..1_000_000) {
        lift(checks::eta_flip(seed))?;
    }

    #[test]
    fn phi_rescaling_preserves_verdicts(seed in 0u64..1_000_000) {
        lift(checks::phi_rescaling(seed))?;
    }

    #[test]
    fn signed_euler_characteristics_add_up(seed in 0u64..1_000_000) {
        lift(checks::euler_split(seed))?;
    }

    #[test]
    fn a3_points_pair_up_on_closed_curves(seed in 0u64..1_000_000) {
        lift(checks::even_a3(seed))?;
    }

    #[test]
    fn poincare_hopf_matches_winding(seed in 0u64..1_000_000) {
        lift(checks::poincare_hopf_winding(seed))?;
    }

    #[test]
    fn blaschke_normal_is_unimodular_equivariant(
        seed in 0u64..1_000_000,
        u in 0.0f64..std::f64::consts::TAU,
        v in -1.2f64..1.2,
    ) {
        lift(checks::blaschke_equivariance(seed, u, v))?;
    }

    #[test]
    fn gauss_degree_is_half_euler_characteristic(
        seed in 0u64..1_000_000,
        amp in 0.0f64..0.1,
        major in 1.5f64..3.0,
        ratio in 0.15f64..0.6,
    ) {
        lift(checks::gauss_degree_half_euler(seed, amp, major, ratio))?;
    }

    #[test]
    fn integer_outputs_survive_grid_doubling(seed in 0u64..1_000_000) {
        lift(checks::grid_doubling(seed))?;
    }
}

#[test]
fn sphere_height_gradient_indices() {
    let field = TangentField::height_gradient();
    let rep = poincare_hopf(&field).unwrap();
    assert_eq!(rep.sum, 2);
    for z in &rep.zeros {
        assert_eq!(z.index, winding_index(&field, z.point, 0.05));
    }
}

#[test]
fn fixed_synthetic_models() {
    let s = strata_of(&SyntheticField::torus_fold_model(), 64).unwrap();
    assert_eq!((s.curves.len(), s.a3_points.len()), (2, 0));
    assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (0, 0));
    let s = strata_of(&SyntheticField::sphere_height_model(), 64).unwrap();
    assert_eq!(s.curves.len(), 1);
    assert_eq!((s.complex.chi_plus, s.complex.chi_minus), (1, 1));
}

#[test]
fn a3_parity_follows_null_line_monodromy() {
    // Gauss map of a strongly bumped body: some singular curves carry a Möbius null
    // line field, and those carry an odd number of A3 points
    let front: Arc<dyn FrontField> = Arc::new(BumpyBody::random(2, 0.25));
    let field = GaussMapHomomorphism::new(front);
    let s = strata_of(&field, 128).unwrap();
    let mut flipped = 0;
    for c in s.curves.iter().filter(|c| c.closed) {
        assert_eq!(s.a3_on_curve(c.id) % 2 == 1, c.eta_flips_on_closing, "curve {}", c.id);
        flipped += c.eta_flips_on_closing as usize;
    }
    assert!(flipped > 0);
}
