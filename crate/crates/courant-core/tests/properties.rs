//! Randomized algebraic properties of the engine, run with exact equality.
//! Each block states an identity that holds for every input in its domain;
//! proptest supplies the inputs, the engine supplies no tolerance.

use num_traits::Zero;
use proptest::prelude::*;

use courant_core::algebroid::{samples, CourantModel, Section};
use courant_core::curvature::is_flat;
use courant_core::genconn::{bismut_family, torsion_closed_form};
use courant_core::liealg::LieAlgebra;
use courant_core::linalg::{Mat, Metric};
use courant_core::model::{export_model, parse_model, build_model};
use courant_core::modspace::homotopy_preimage;
use courant_core::rat::{fmt_q, parse_q, qi, qr, qzero, Q};
use courant_core::tensor::{
    alt, bianchator, constrained_basis, square_form, DenseTensor, SymmetryConstraint,
};

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| qr(p, q))
}

fn q_vec(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), len)
}

fn combine(basis: &[DenseTensor], coeffs: &[Q]) -> DenseTensor {
    let mut out = DenseTensor::zeros(basis[0].shape());
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&b.scale(c));
        }
    }
    out
}

fn alternating_form(n: usize, k: usize, coeffs: &[Q]) -> DenseTensor {
    let slots: Vec<usize> = (0..k).collect();
    let basis =
        constrained_basis(n, k, &[SymmetryConstraint::Alternating(slots)]).unwrap();
    combine(&basis, coeffs)
}

fn section(model: &CourantModel, coeffs: &[Q]) -> Section {
    let n = model.n();
    Section {
        vec: coeffs[..n].to_vec(),
        cov: coeffs[n..2 * n].to_vec(),
        fib: coeffs[2 * n..].to_vec(),
    }
}

fn zero_section(model: &CourantModel) -> Section {
    Section {
        vec: vec![qzero(); model.n()],
        cov: vec![qzero(); model.n()],
        fib: vec![qzero(); model.m()],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ce_differential_squares_to_zero(coeffs in q_vec(6)) {
        let l = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
        let omega = alternating_form(4, 2, &coeffs);
        let d1 = l.ce_differential(&omega, None).unwrap();
        let d2 = l.ce_differential(&d1, None).unwrap();
        prop_assert!(d2.is_zero());
    }

    #[test]
    fn bianchator_of_a_two_three_alternating_tensor_is_fully_alternating(
        raw in q_vec(27)
    ) {
        let t = DenseTensor::from_fn(&[3, 3, 3], |idx| {
            raw[idx[0] * 9 + idx[1] * 3 + idx[2]].clone()
        });
        let a = alt(&t, 1, 2);
        let bi = bianchator(&a).unwrap();
        prop_assert!(bi.is_alternating_in(&[0, 1, 2]));
    }

    #[test]
    fn bianchator_triples_three_forms(coeffs in q_vec(4)) {
        let f = alternating_form(4, 3, &coeffs);
        prop_assert_eq!(bianchator(&f).unwrap(), f.scale(&qi(3)));
    }

    #[test]
    fn square_form_is_pair_symmetric(coeffs in q_vec(4), diag in prop::collection::vec(1i64..=4, 4)) {
        let h = alternating_form(4, 3, &coeffs);
        let g = Metric::new(Mat::from_fn(4, 4, |i, j| {
            if i == j { qi(diag[i]) } else { qzero() }
        }))
        .unwrap();
        let h2 = square_form(&h, &g);
        prop_assert_eq!(h2.permute(&[2, 3, 0, 1]), h2);
    }

    #[test]
    fn alt_is_a_projection(raw in q_vec(27)) {
        let t = DenseTensor::from_fn(&[3, 3, 3], |idx| {
            raw[idx[0] * 9 + idx[1] * 3 + idx[2]].clone()
        });
        let once = alt(&t, 0, 1);
        prop_assert!(once.is_alternating_in(&[0, 1]));
        prop_assert_eq!(alt(&once, 0, 1), once);
    }

    #[test]
    fn parse_q_round_trips_fmt_q(p in -100_000i64..=100_000, q in 1i64..=100_000) {
        let v = qr(p, q);
        prop_assert_eq!(parse_q(&fmt_q(&v)), Some(v));
    }

    #[test]
    fn kernel_dimension_complements_rank(entries in q_vec(12)) {
        let a = Mat::from_fn(3, 4, |i, j| entries[i * 4 + j].clone());
        let rank = a.rank();
        let kernel = a.kernel_basis();
        prop_assert_eq!(rank + kernel.len(), 4);
        for v in &kernel {
            prop_assert!(a.mul_vec(v).iter().all(|q| q.is_zero()));
        }
    }

    #[test]
    fn solve_returns_an_exact_solution_when_one_exists(
        entries in q_vec(9),
        x0 in q_vec(3)
    ) {
        let a = Mat::from_fn(3, 3, |i, j| entries[i * 3 + j].clone());
        let b = a.mul_vec(&x0);
        let x = a.solve(&b).expect("constructed to be solvable");
        prop_assert_eq!(a.mul_vec(&x), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dorfman_satisfies_the_leibniz_identity(
        ca in q_vec(9), cb in q_vec(9), cc in q_vec(9)
    ) {
        let model = samples::su2_twisted();
        let a = section(&model, &ca);
        let b = section(&model, &cb);
        let c = section(&model, &cc);
        let lhs = model.dorfman(&a, &model.dorfman(&b, &c));
        let rhs = model
            .dorfman(&model.dorfman(&a, &b), &c)
            .add(&model.dorfman(&b, &model.dorfman(&a, &c)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dorfman_preserves_the_pairing_on_constants(
        ca in q_vec(9), cb in q_vec(9), cc in q_vec(9)
    ) {
        let model = samples::su2_twisted();
        let a = section(&model, &ca);
        let b = section(&model, &cb);
        let c = section(&model, &cc);
        let lhs = model.pairing_e(&model.dorfman(&a, &b), &c)
            + model.pairing_e(&b, &model.dorfman(&a, &c));
        prop_assert_eq!(lhs, qzero());
    }

    #[test]
    fn dorfman_square_vanishes_on_constants(ca in q_vec(9)) {
        let model = samples::su2_twisted();
        let a = section(&model, &ca);
        prop_assert_eq!(model.dorfman(&a, &a), zero_section(&model));
    }

    #[test]
    fn generalized_metric_is_an_involutive_isometry(
        ca in q_vec(9), cb in q_vec(9)
    ) {
        let model = samples::su2_twisted();
        let a = section(&model, &ca);
        let b = section(&model, &cb);
        prop_assert_eq!(model.endo_g(&model.endo_g(&a)), a.clone());
        prop_assert_eq!(
            model.pairing_e(&model.endo_g(&a), &model.endo_g(&b)),
            model.pairing_e(&a, &b)
        );
    }

    #[test]
    fn split_assemble_round_trips_sections(ca in q_vec(9)) {
        let model = samples::su2_twisted();
        let a = section(&model, &ca);
        let (plus, minus, fib) = model.split(&a);
        prop_assert_eq!(model.assemble(&plus, &minus, &fib), a);
    }

    #[test]
    fn homotopy_preimage_splits_the_alternation_map(coeffs in q_vec(18)) {
        let basis = constrained_basis(
            3,
            3,
            &[SymmetryConstraint::Symmetric(vec![0, 1])],
        )
        .unwrap();
        prop_assert_eq!(basis.len(), 18);
        let s = combine(&basis, &coeffs);
        let b = alt(&s, 1, 2);
        let preimage = homotopy_preimage(&b).expect("alternation image lies in ker Bi");
        prop_assert_eq!(alt(&preimage, 1, 2), b);
    }

    #[test]
    fn whole_family_is_flat_on_a_bi_invariant_cartan_model(
        lp in small_q(), lm in small_q(), mu in small_q()
    ) {
        let model = samples::su2_cartan_fiber();
        let d = bismut_family(&model, &lp, &lm, &mu);
        prop_assert!(torsion_closed_form(&model, &d).oracle_matches);
        let (flat, witness) = is_flat(&model, &d);
        prop_assert!(flat, "witness {witness:?}");
    }

    #[test]
    fn scaled_cartan_form_is_flat_exactly_at_unit_scales(t in -4i64..=4) {
        let base = LieAlgebra::su2();
        let h = base.cartan_form().unwrap().scale(&qi(t));
        let model = CourantModel::new("su2_tc", base, Mat::identity(3), h, None).unwrap();
        let d = bismut_family(&model, &qr(-1, 3), &qr(1, 3), &qr(1, 3));
        let (flat, witness) = is_flat(&model, &d);
        prop_assert_eq!(flat, t == 1 || t == -1);
        if let Some(w) = witness {
            // First obstruction is quadratic in the scale.
            prop_assert_eq!(w.block, "(X+,Y-)Z+");
            prop_assert_eq!(w.value, qr(t * t - 1, 4));
        }
    }

    #[test]
    fn model_files_round_trip_random_rational_forms(coeffs in q_vec(4)) {
        let base = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
        let h = alternating_form(4, 3, &coeffs);
        let model =
            CourantModel::new("random_h", base, Mat::identity(4), h, None).unwrap();
        let text = export_model(&model);
        let reread = build_model(&parse_model(&text).unwrap()).unwrap();
        prop_assert_eq!(export_model(&reread), text);
        prop_assert_eq!(reread.h, model.h);
    }
}
