//! Cross-module property suites: valuation axioms on random exact
//! elements, reduction/orbit consistency, and the proof-side identities of
//! the escaping case on the running quadratic family.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use berklim_core::algebraic::ResidueValue;
use berklim_core::dynamics::{image_of_gauss, GaussOrbit};
use berklim_core::geometry::TypeIIPoint;
use berklim_core::measures::{
    quantized_balance_check, Cell, PartitionGamma, QuantizedMeasure,
};
use berklim_core::puiseux::{PuiseuxElem, ValExp};
use berklim_core::reduction::{reduce_map, RationalMapFamily};
use berklim_core::scalar::{rat, rat_i, Rat, Scalar};

fn t_pow(e: i64) -> PuiseuxElem {
    PuiseuxElem::t_pow(rat_i(e))
}

fn pe(n: i64) -> PuiseuxElem {
    PuiseuxElem::from_i64(n)
}

fn golden_family() -> RationalMapFamily {
    RationalMapFamily::new(vec![PuiseuxElem::zero(), t_pow(-1), pe(1)], vec![pe(1)], 2).unwrap()
}

/// Random exact element: up to 4 terms with small rational data.
fn arb_elem() -> impl Strategy<Value = PuiseuxElem> {
    proptest::collection::vec(
        (
            -6i64..=6,            // exponent numerator
            1i64..=3,             // exponent denominator
            -5i64..=5,            // re numerator
            1i64..=4,             // re denominator
            -5i64..=5,            // im numerator
        ),
        0..4,
    )
    .prop_map(|terms| {
        PuiseuxElem::from_terms(terms.into_iter().map(|(en, ed, rn, rd, im)| {
            (rat(en, ed), Scalar::new(rat(rn, rd), rat(im, 3)))
        }))
    })
}

fn val(x: &PuiseuxElem) -> ValExp {
    x.valuation().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ultrametric_inequality(a in arb_elem(), b in arb_elem()) {
        let sum = a.add(&b);
        let va = val(&a);
        let vb = val(&b);
        let vs = val(&sum);
        let min = va.clone().min(vb.clone());
        prop_assert!(vs >= min);
        if va != vb {
            prop_assert_eq!(vs, min);
        }
    }

    #[test]
    fn valuation_is_multiplicative(a in arb_elem(), b in arb_elem()) {
        let prod = a.mul(&b);
        match (val(&a), val(&b)) {
            (ValExp::Finite(x), ValExp::Finite(y)) => {
                prop_assert_eq!(val(&prod), ValExp::Finite(x + y));
            }
            _ => prop_assert_eq!(val(&prod), ValExp::Infinity),
        }
    }

    #[test]
    fn reduction_is_a_ring_morphism(a in arb_elem(), b in arb_elem()) {
        // restrict to integral elements
        let integral = |x: &PuiseuxElem| match val(x) {
            ValExp::Infinity => true,
            ValExp::Finite(q) => q >= Rat::zero(),
        };
        prop_assume!(integral(&a) && integral(&b));
        let ra = a.reduce_scalar().unwrap();
        let rb = b.reduce_scalar().unwrap();
        prop_assert_eq!(a.mul(&b).reduce_scalar().unwrap(), &ra * &rb);
        prop_assert_eq!(a.add(&b).reduce_scalar().unwrap(), &ra + &rb);
    }

    #[test]
    fn textual_round_trip(a in arb_elem()) {
        let s = a.canonical_string();
        let back = PuiseuxElem::parse(&s).unwrap();
        prop_assert_eq!(back, a, "{}", s);
    }

    #[test]
    fn field_inverse_on_units(a in arb_elem()) {
        prop_assume!(!a.is_exact_zero());
        let inv = a.inv().unwrap();
        let prod = a.mul(&inv);
        // exact for monomials, 1 + O(t^W) otherwise
        prop_assert_eq!(prod.reduce_scalar().is_ok(), true);
        let lead = prod.leading().unwrap();
        prop_assert_eq!(lead.0, &Rat::zero());
        prop_assert!(lead.1.is_one());
    }
}

#[test]
fn constant_reduction_iff_gauss_moves() {
    // deg(phi) > 0 iff h(S_G) = S_G, on random families
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 40 {
        let d = rng.gen_range(1..=3usize);
        let coeff = |rng: &mut rand_chacha::ChaCha8Rng| {
            PuiseuxElem::monomial(
                Scalar::from_i64(rng.gen_range(-2..=2)),
                rat_i(rng.gen_range(-2..=2)),
            )
        };
        let num: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
        let den: Vec<PuiseuxElem> = (0..=d).map(|_| coeff(&mut rng)).collect();
        let f = match RationalMapFamily::new(num, den, d) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let r = reduce_map(&f).unwrap();
        let image = match image_of_gauss(&f) {
            Ok(p) => p,
            Err(_) => continue,
        };
        assert_eq!(r.phi_degree() > 0, image.is_gauss(), "family {f}");
        checked += 1;
    }
}

#[test]
fn escaping_case_identities() {
    // the proof-side identities of the escaping case, on the running family
    let f = golden_family();
    let orbit = GaussOrbit::compute(&f, 5).unwrap();
    let d = BigInt::from(2);

    for n in 1..=4usize {
        // s_v(f^n) = 0 for directions away from the exceptional one
        for v in [rv(0), rv(-1), rv(5)] {
            let dd = orbit.iterated_directional_data(&v, n).unwrap();
            assert!(dd.s.is_zero(), "s_{v}(f^{n}) = {}", dd.s);
            // and those directions never push onto the exceptional one
            assert_ne!(dd.pushforward, ResidueValue::Infinity);
        }
        // (f^n)_* of the exceptional direction stays exceptional, and its
        // surplus is d^n - deg_{S_G}(f^n)
        let de = orbit.iterated_directional_data(&ResidueValue::Infinity, n).unwrap();
        assert_eq!(de.pushforward, ResidueValue::Infinity);
        let mut dn = BigInt::one();
        for _ in 0..n {
            dn *= &d;
        }
        let expected = dn - orbit.gauss_local_degree_of_iterate(n).unwrap();
        assert_eq!(de.s, expected);
    }

    // directions with zero equilibrium mass eventually map with per-step
    // directional degree 1
    for v in [rv(5), rv(7)] {
        let pushed = orbit.iterated_directional_data(&v, 3).unwrap().pushforward;
        let step = orbit.step(3).unwrap();
        assert_eq!(step.reduction.phi().local_degree(&pushed).unwrap(), 1);
    }
}

fn rv(n: i64) -> ResidueValue {
    ResidueValue::from_i64(n)
}

#[test]
fn balance_residual_bounded_by_leftover() {
    // the projection of the equilibrium measure at level 3 (exactly
    // balanced) with mass eps shaved off the annulus cell into the leftover
    let f = golden_family();
    let orbit = GaussOrbit::compute(&f, 3).unwrap();
    let gamma = PartitionGamma::from_orbit(&orbit, 3).unwrap();
    let eps = rat(1, 16);
    let mut omega = QuantizedMeasure::zero(gamma);
    omega.add_mass(Cell::GaussDir(rv(0)), rat(1, 4)).unwrap();
    omega.add_mass(Cell::GaussDir(rv(-1)), rat(1, 4)).unwrap();
    omega.add_mass(Cell::Annulus, rat(1, 2) - &eps).unwrap();
    omega.set_leftover(eps.clone()).unwrap();
    let report = quantized_balance_check(&orbit, 3, &omega).unwrap();
    assert!(report.balanced, "residual {} leftover {}", report.max_residual, eps);
    assert!(report.max_residual <= eps);
    assert!(!report.max_residual.is_zero());
    // with the full annulus mass the same table is exactly balanced
    let mut exact = QuantizedMeasure::zero(PartitionGamma::from_orbit(&orbit, 3).unwrap());
    exact.add_mass(Cell::GaussDir(rv(0)), rat(1, 4)).unwrap();
    exact.add_mass(Cell::GaussDir(rv(-1)), rat(1, 4)).unwrap();
    exact.add_mass(Cell::Annulus, rat(1, 2)).unwrap();
    let report = quantized_balance_check(&orbit, 3, &exact).unwrap();
    assert!(report.balanced && report.max_residual.is_zero());
}

#[test]
fn projection_is_mass_preserving_and_monotone() {
    let f = golden_family();
    let orbit = GaussOrbit::compute(&f, 1).unwrap();
    let gamma = PartitionGamma::from_orbit(&orbit, 1).unwrap();
    let mut omega = QuantizedMeasure::zero(gamma);
    omega.add_mass(Cell::Annulus, rat(1, 3)).unwrap();
    omega.add_mass(Cell::GaussDir(rv(4)), rat(1, 3)).unwrap();
    omega.add_mass(Cell::ImageVertex, rat(1, 3)).unwrap();
    let proj = berklim_core::measures::project_to_gauss(&omega).unwrap();
    assert_eq!(proj.total(), Rat::one());
    for (_, m) in proj.support() {
        assert!(m > Rat::zero());
    }
}

#[test]
fn canonical_disk_strings() {
    let s = TypeIIPoint::new(t_pow(-2), rat(1, 2)).unwrap();
    assert_eq!(s.canonical_string(), "disk((1/1+0/1i)*t^(-2/1); 1/2)");
    let gauss = TypeIIPoint::gauss();
    assert_eq!(gauss.canonical_string(), "disk(0; 0/1)");
}
