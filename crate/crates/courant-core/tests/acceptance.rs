//! Acceptance gate: the eight headline guarantees of the engine, checked
//! with exact rational equality and a printed pass/fail line per criterion.
//! Run with `--nocapture` to see the lines for passing criteria too.

use std::path::PathBuf;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use courant_core::algebroid::{samples, CourantModel};
use courant_core::curvature::{
    bianchi_residual, check_bismut_riemann_lemma, cov_deriv_all, flat_consequences,
    gen_curvature_closed, gen_curvature_oracle, is_flat, levi_civita_coeffs, lower_last_slot,
    riemann_curvature, sec_scal, Sign, SlotRole,
};
use courant_core::genconn::{
    bismut_family, is_levi_civita, sample_connection, sample_levi_civita, torsion_closed_form,
};
use courant_core::liealg::LieAlgebra;
use courant_core::linalg::{Mat, Metric};
use courant_core::model::load_model;
use courant_core::modspace::{flat_lc_space, homotopy_preimage, koszul_sequence_check, sample_lc};
use courant_core::rat::{qi, qr, qzero, Q};
use courant_core::tensor::{alt, constrained_basis, invariant_subspace, DenseTensor, SymmetryConstraint};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(number: usize, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("[criterion {number}] {name}: PASS"),
        Err(e) => {
            println!("[criterion {number}] {name}: FAIL ({e})");
            panic!("criterion {number} ({name}): {e}");
        }
    }
}

fn corpus(name: &str) -> CourantModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.json"));
    load_model(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    qr(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

fn random_symmetric_metric(n: usize, rng: &mut ChaCha8Rng, indefinite: bool) -> Metric {
    loop {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = random_q(rng);
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        for i in 0..n {
            let anchor = if indefinite && i == 0 { qi(-5) } else { qi(5) };
            let d = m[(i, i)].clone();
            m[(i, i)] = d + anchor;
        }
        if m.det().is_zero() {
            continue;
        }
        let metric = Metric::new(m).unwrap();
        if indefinite != metric.is_definite() {
            return metric;
        }
    }
}

fn random_alternating_form(n: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    let basis =
        constrained_basis(n, 3, &[SymmetryConstraint::Alternating(vec![0, 1, 2])]).unwrap();
    let mut out = DenseTensor::zeros(&[n, n, n]);
    for b in &basis {
        let c = random_q(rng);
        if !c.is_zero() {
            out = out.add(&b.scale(&c));
        }
    }
    out
}

fn random_sym_tensor(n: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    let basis = constrained_basis(n, 3, &[SymmetryConstraint::Symmetric(vec![0, 1])]).unwrap();
    let mut out = DenseTensor::zeros(&[n, n, n]);
    for b in &basis {
        let c = random_q(rng);
        if !c.is_zero() {
            out = out.add(&b.scale(&c));
        }
    }
    out
}

/// Every corpus model with bi-invariant metric, H equal to its Cartan form,
/// and no curving: the domain of the canonical-flatness theorem.
fn bi_invariant_cartan_corpus() -> Vec<CourantModel> {
    [
        "abelian2",
        "abelian4",
        "su2_cartan",
        "su2_killing",
        "su2_plus_r",
        "su2su2_cartan",
        "su3_cartan",
        "su2_cartan_fiber",
        "su3_cartan_fiber",
    ]
    .iter()
    .map(|n| corpus(n))
    .collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    criterion(1, "oracle equivalence on random connections", || {
        let fiber_model = samples::su2_cartan_fiber();
        for seed in 0..100u64 {
            let d = sample_connection(&fiber_model, seed);
            let tr = torsion_closed_form(&fiber_model, &d);
            ensure!(tr.oracle_matches, "torsion mismatch at seed {seed}");
            ensure!(
                tr.closed_tensor.is_zero() == tr.is_levi_civita(),
                "torsion vanishing is not equivalent to vanishing residuals at seed {seed}"
            );
            let closed = gen_curvature_closed(&fiber_model, &d);
            let oracle = gen_curvature_oracle(&fiber_model, &d);
            ensure!(closed == oracle, "curvature mismatch at seed {seed}");
        }
        // The torsion-free direction of the iff, on exactly torsion-free draws.
        for seed in 0..20u64 {
            let d = sample_levi_civita(&fiber_model, seed);
            let tr = torsion_closed_form(&fiber_model, &d);
            ensure!(tr.oracle_matches && tr.closed_tensor.is_zero() && tr.is_levi_civita(),
                "Levi-Civita sample has torsion at seed {seed}");
        }
        let su3_model = samples::su3_cartan_fiber();
        for seed in 0..20u64 {
            let d = sample_connection(&su3_model, seed);
            let tr = torsion_closed_form(&su3_model, &d);
            ensure!(tr.oracle_matches, "su3 torsion mismatch at seed {seed}");
            ensure!(
                tr.closed_tensor.is_zero() == tr.is_levi_civita(),
                "su3 torsion iff fails at seed {seed}"
            );
            let closed = gen_curvature_closed(&su3_model, &d);
            let oracle = gen_curvature_oracle(&su3_model, &d);
            ensure!(closed == oracle, "su3 curvature mismatch at seed {seed}");
        }
        Ok(())
    });
}

#[test]
fn criterion_2_canonical_flatness() {
    criterion(2, "canonical family is Levi-Civita and flat", || {
        let canonical = (qr(-1, 3), qr(1, 3), qr(1, 3));
        for model in bi_invariant_cartan_corpus() {
            let d = bismut_family(&model, &canonical.0, &canonical.1, &canonical.2);
            let tr = torsion_closed_form(&model, &d);
            ensure!(tr.oracle_matches, "{}: oracle mismatch", model.name);
            ensure!(tr.is_levi_civita(), "{}: canonical point is not Levi-Civita", model.name);
            let (flat, witness) = is_flat(&model, &d);
            ensure!(flat, "{}: canonical point not flat, witness {witness:?}", model.name);

            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
            for trial in 0..10 {
                let lp = random_q(&mut rng);
                let lm = random_q(&mut rng);
                let mu = random_q(&mut rng);
                let d = bismut_family(&model, &lp, &lm, &mu);
                let (flat, witness) = is_flat(&model, &d);
                ensure!(
                    flat,
                    "{}: family point {trial} at ({lp}, {lm}, {mu}) not flat, witness {witness:?}",
                    model.name
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_3_flatness_consequences() {
    criterion(3, "flatness-consequence ledger", || {
        let canonical = (qr(-1, 3), qr(1, 3), qr(1, 3));
        for name in ["su2_cartan", "su2_killing", "su2su2_cartan", "su3_cartan"] {
            let model = corpus(name);
            let d = bismut_family(&model, &canonical.0, &canonical.1, &canonical.2);
            let rep = flat_consequences(&model, &d).unwrap();
            ensure!(rep.flat, "{name}: expected flat");
            ensure!(rep.riemannian, "{name}: expected Riemannian mode");
            for item in &rep.items {
                ensure!(
                    !item.implied || item.holds,
                    "{name}: implied item '{}' fails: {}",
                    item.name,
                    item.detail
                );
            }
            ensure!(
                rep.items.iter().any(|i| i.name == "nabla^g R^g = 0 (locally symmetric)"
                    && i.implied
                    && i.holds),
                "{name}: locally-symmetric item missing or failing"
            );
        }

        // Frozen numbers on the round three-sphere model.
        let model = corpus("su2_cartan");
        let report = sec_scal(&model.base, &model.metric);
        ensure!(report.scalar == qr(3, 2), "scal = {}", report.scalar);
        ensure!(report.degenerate.is_empty(), "unexpected degenerate planes");
        for (i, j, v) in &report.sectional {
            ensure!(*v == qr(1, 4), "sec(e{}, e{}) = {v}", i + 1, j + 1);
        }
        let mut h_norm2 = qzero();
        for idx in model.h.indices() {
            let v = model.h.get(&idx);
            h_norm2 += v * v;
        }
        ensure!(h_norm2 == qi(6), "|H|^2 = {h_norm2}");
        ensure!(report.scalar == qr(1, 4) * &h_norm2, "scal != |H|^2/4");

        let lc = levi_civita_coeffs(&model.base, &model.metric);
        let rg4 = lower_last_slot(&riemann_curvature(&lc, &model.base), &model.metric);
        let nabla_rg = cov_deriv_all(&rg4, &[SlotRole::BaseIn; 4], &lc, None);
        ensure!(nabla_rg.is_zero(), "nabla^g R^g != 0");
        Ok(())
    });
}

#[test]
fn criterion_4_non_flat_levi_civita_space() {
    criterion(4, "flat space dimensions and non-flat Levi-Civita points", || {
        let model = corpus("su2_cartan");
        let space = flat_lc_space(&model).map_err(|e| e.to_string())?;
        ensure!(space.bi_invariant, "expected the bi-invariant description");
        ensure!(space.plus_dim() == 0, "plus dim = {}", space.plus_dim());
        ensure!(space.minus_dim() == 8, "minus dim = {}", space.minus_dim());
        ensure!(space.lc_dim == 16, "lc dim = {}", space.lc_dim);

        // Dual route: invariant and full dimension counts of the two tensor
        // spaces whose difference models each side.
        let sym01 = [SymmetryConstraint::Symmetric(vec![0, 1])];
        let sym012 = [SymmetryConstraint::Symmetric(vec![0, 1, 2])];
        let inv_s2v = invariant_subspace(&model.base, 3, &sym01).unwrap().len();
        let inv_s3 = invariant_subspace(&model.base, 3, &sym012).unwrap().len();
        ensure!(inv_s2v == 0 && inv_s3 == 0, "invariant dims ({inv_s2v}, {inv_s3})");
        ensure!(inv_s2v - inv_s3 == space.plus_dim(), "plus dim dual route");
        let full_s2v = constrained_basis(3, 3, &sym01).unwrap().len();
        let full_s3 = constrained_basis(3, 3, &sym012).unwrap().len();
        ensure!(full_s2v == 18 && full_s3 == 10, "full dims ({full_s2v}, {full_s3})");
        ensure!(full_s2v - full_s3 == space.minus_dim(), "minus dim dual route");

        for seed in 0..5u64 {
            let flat_point = sample_lc(&model, seed, true).map_err(|e| e.to_string())?;
            ensure!(is_levi_civita(&model, &flat_point), "flat sample {seed} has torsion");
            let (flat, _) = is_flat(&model, &flat_point);
            ensure!(flat, "flat sample {seed} is not flat");

            let bent = sample_lc(&model, seed, false).map_err(|e| e.to_string())?;
            ensure!(is_levi_civita(&model, &bent), "non-flat sample {seed} has torsion");
            let (flat, witness) = is_flat(&model, &bent);
            ensure!(!flat, "non-flat sample {seed} is flat");
            ensure!(witness.is_some(), "missing witness at seed {seed}");
        }
        Ok(())
    });
}

#[test]
fn criterion_5_sequence_exactness_and_homotopy() {
    criterion(5, "sequence exactness and homotopy splitting", || {
        for n in 2..=6 {
            let rep = koszul_sequence_check(&LieAlgebra::abelian(n));
            ensure!(rep.fully_exact(), "abelian {n} not exact");
            let c3 = |k: usize| k * (k + 1) * (k + 2) / 6;
            let want = [
                c3(n),
                n * (n + 1) / 2 * n,
                n * (n * (n - 1) / 2),
                n * (n - 1) * (n - 2) / 6,
            ];
            ensure!(rep.dims == want, "abelian {n} dims {:?} != {want:?}", rep.dims);
            ensure!(rep.euler_characteristic() == 0, "abelian {n} euler");
        }
        for alg in [LieAlgebra::su2(), LieAlgebra::su3()] {
            let n = alg.dim;
            let rep = koszul_sequence_check(&alg);
            ensure!(rep.fully_exact(), "dim {n}: not exact");
            ensure!(rep.invariant_asserted, "dim {n}: invariant branch skipped");
            ensure!(rep.invariant_fully_exact(), "dim {n}: invariant branch not exact");

            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for trial in 0..50 {
                let s = random_sym_tensor(n, &mut rng);
                let b = alt(&s, 1, 2);
                let p = homotopy_preimage(&b)
                    .map_err(|e| format!("dim {n} trial {trial}: {e}"))?;
                ensure!(alt(&p, 1, 2) == b, "dim {n} trial {trial}: preimage does not split");
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_6_classical_bracket_curvature_layer() {
    criterion(6, "Bismut bracket lemma and Bianchi identities", || {
        let algebras: Vec<(&str, LieAlgebra)> = vec![
            ("abelian2", LieAlgebra::abelian(2)),
            ("abelian4", LieAlgebra::abelian(4)),
            ("su2", LieAlgebra::su2()),
            ("su2+R", LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1))),
            ("su2+su2", LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::su2())),
            ("su3", LieAlgebra::su3()),
        ];
        for (name, l) in &algebras {
            let mut rng = ChaCha8Rng::seed_from_u64(0xB15);
            let mut indefinite_seen = 0;
            for trial in 0..20 {
                let indefinite = trial % 2 == 1;
                let g = random_symmetric_metric(l.dim, &mut rng, indefinite);
                if !g.is_definite() {
                    indefinite_seen += 1;
                }
                let h = random_alternating_form(l.dim, &mut rng);
                let br = check_bismut_riemann_lemma(l, &g, &h);
                for (residual_name, t) in br.residuals() {
                    ensure!(
                        t.is_zero(),
                        "{name} trial {trial}: residual '{residual_name}' nonzero"
                    );
                }
                for sign in [Sign::Plus, Sign::Minus] {
                    ensure!(
                        bianchi_residual(l, &g, &h, sign).is_zero(),
                        "{name} trial {trial}: Bianchi residual nonzero"
                    );
                }
            }
            ensure!(indefinite_seen >= 5, "{name}: only {indefinite_seen} indefinite metrics");
        }
        Ok(())
    });
}

#[test]
fn criterion_7_negative_controls() {
    criterion(7, "negative controls", || {
        let canonical = (qr(-1, 3), qr(1, 3), qr(1, 3));

        let doubled = corpus("su2_h2");
        let d = bismut_family(&doubled, &canonical.0, &canonical.1, &canonical.2);
        let (flat, witness) = is_flat(&doubled, &d);
        ensure!(!flat, "doubled Cartan form stayed flat");
        let w = witness.ok_or("missing witness")?;
        ensure!(
            w.block == "(X+,Y-)Z+" && w.index == vec![1, 2, 1, 2] && w.value == qr(3, 4),
            "unexpected witness {w:?}"
        );

        let twisted = corpus("su2_twisted");
        ensure!(twisted.metric.is_positive_definite(), "twisted model not Riemannian");
        ensure!(!twisted.f.is_zero(), "twisted model has no curving");
        let d = bismut_family(&twisted, &canonical.0, &canonical.1, &canonical.2);
        let (flat, _) = is_flat(&twisted, &d);
        ensure!(!flat, "nonzero curving stayed flat");
        let blocks = gen_curvature_closed(&twisted, &d);
        // The fiber-input block obstructs at every r = s pair, with the
        // engine-derived coefficient on F_r².
        let b6 = &blocks.b6_base;
        ensure!(!b6.is_zero(), "block (r,Y+)s base vanishes");
        ensure!(*b6.get(&[0, 1, 0, 1]) == qi(8), "R(f1,e2)f1 = {}", b6.get(&[0, 1, 0, 1]));
        for r in 0..twisted.m() {
            let diagonal_hit = (0..twisted.n())
                .any(|y| (0..twisted.n()).any(|out| !b6.get(&[r, y, r, out]).is_zero()));
            ensure!(diagonal_hit, "no obstruction on the r = s diagonal for r = {r}");
        }

        let fbad = corpus("su2_plus_r_fbad");
        let violations = fbad.check_axioms();
        ensure!(
            violations.iter().any(|v| v.axiom == "jacobi"),
            "non-closed curving passed the bracket Jacobi check: {violations:?}"
        );
        Ok(())
    });
}

#[test]
fn criterion_8_chevalley_eilenberg_layer() {
    criterion(8, "Chevalley-Eilenberg layer", || {
        let su2 = LieAlgebra::su2();
        let betti = su2.ce_betti(3).unwrap();
        ensure!(betti == vec![1, 0, 0, 1], "betti {betti:?}");

        let alt3 = [SymmetryConstraint::Alternating(vec![0, 1, 2])];
        let basis = invariant_subspace(&su2, 3, &alt3).unwrap();
        ensure!(basis.len() == 1, "invariant 3-form space has dim {}", basis.len());
        let cartan = su2.cartan_form().unwrap();
        let (idx, lead) = basis[0].first_nonzero().ok_or("zero basis element")?;
        let ratio = cartan.get(&idx) / &lead;
        ensure!(
            basis[0].scale(&ratio) == cartan,
            "invariant 3-form is not proportional to the Cartan form"
        );
        Ok(())
    });
}
