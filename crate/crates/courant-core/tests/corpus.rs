//! The shipped model corpus under corpus/ is generated by this file. The
//! ignored `regenerate_corpus` test rewrites the directory; the default tests
//! pin every file byte-for-byte against the generator and check that each
//! file loads (or is rejected) as advertised.

use std::fs;
use std::path::PathBuf;

use courant_core::algebroid::{samples, CourantModel};
use courant_core::liealg::LieAlgebra;
use courant_core::linalg::{Mat, Metric};
use courant_core::model::{export_model, load_model, FileError};
use courant_core::rat::{qi, qzero};
use courant_core::tensor::DenseTensor;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn volume_form() -> DenseTensor {
    let mut h = DenseTensor::zeros(&[3, 3, 3]);
    for (i, j, k, s) in
        [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)]
    {
        h.set(&[i, j, k], qi(s));
    }
    h
}

fn su2_killing() -> CourantModel {
    let base = LieAlgebra::su2();
    let g = Mat::identity(3).scale(&qi(4));
    let h = base.cartan_form_with(&Metric::new(g.clone()).unwrap()).unwrap();
    CourantModel::new("su2_killing", base, g, h, None).unwrap()
}

fn su2_indef() -> CourantModel {
    let base = LieAlgebra::su2();
    let g = Mat::from_fn(3, 3, |i, j| {
        if i != j {
            qzero()
        } else if i == 1 {
            qi(-1)
        } else {
            qi(1)
        }
    });
    CourantModel::new("su2_indef", base, g, volume_form(), None).unwrap()
}

fn su2_plus_r() -> CourantModel {
    let base = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
    let g = Mat::identity(4);
    let h = base.cartan_form_with(&Metric::new(g.clone()).unwrap()).unwrap();
    CourantModel::new("su2_plus_r", base, g, h, None).unwrap()
}

fn su2su2_h2() -> CourantModel {
    let base = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::su2());
    let h = base.cartan_form().unwrap().scale(&qi(2));
    CourantModel::new("su2su2_h2", base, Mat::identity(6), h, None).unwrap()
}

fn su3_h2() -> CourantModel {
    let base = LieAlgebra::su3();
    let g = base.pairing.as_ref().unwrap().mat.clone();
    let h = base.cartan_form().unwrap().scale(&qi(2));
    CourantModel::new("su3_h2", base, g, h, None).unwrap()
}

fn abelian_named(name: &str, dim: usize) -> CourantModel {
    CourantModel::new(
        name,
        LieAlgebra::abelian(dim),
        Mat::identity(dim),
        DenseTensor::zeros(&[dim, dim, dim]),
        None,
    )
    .unwrap()
}

fn su3_cartan_fiber_named() -> CourantModel {
    samples::su3_cartan_fiber()
}

/// Structure constants that violate the Jacobi identity: the loader must
/// reject this file with a mathematical error (exit class 1), not a parse
/// error.
const BAD_JACOBI: &str = r#"{
  "name": "bad_jacobi",
  "base": {
    "dim": 3,
    "bracket": {
      "1,2,1": 1,
      "1,3,2": 1,
      "2,1,1": -1,
      "3,1,2": -1
    },
    "metric": {
      "1,1": 1,
      "2,2": 1,
      "3,3": 1
    }
  },
  "h": {}
}
"#;

/// A curving two-form on su(2)⊕R that every pointwise model check accepts
/// but whose Dorfman bracket fails the Jacobi identity, because the form is
/// not closed. Detected by `validate`, not by the loader.
const SU2_PLUS_R_FBAD: &str = r#"{
  "name": "su2_plus_r_fbad",
  "base": {
    "dim": 4,
    "bracket": {
      "1,2,3": 1,
      "2,1,3": -1,
      "2,3,1": 1,
      "3,1,2": 1,
      "1,3,2": -1,
      "3,2,1": -1
    },
    "metric": {
      "1,1": 1,
      "2,2": 1,
      "3,3": 1,
      "4,4": 1
    }
  },
  "h": {},
  "fiber": {
    "dim": 1,
    "bracket": {},
    "pairing": {
      "1,1": 1
    }
  },
  "f": {
    "1,4,1": 1,
    "4,1,1": -1
  }
}
"#;

/// Every corpus file as (file stem, exact contents).
fn generated_corpus() -> Vec<(&'static str, String)> {
    vec![
        ("abelian2", export_model(&abelian_named("abelian2", 2))),
        ("abelian4", export_model(&abelian_named("abelian4", 4))),
        ("su2_cartan", export_model(&samples::su2_cartan())),
        ("su2_h2", export_model(&samples::su2_h2())),
        ("su2_diag123", export_model(&samples::su2_diag123())),
        ("su2_killing", export_model(&su2_killing())),
        ("su2_indef", export_model(&su2_indef())),
        ("su2_plus_r", export_model(&su2_plus_r())),
        ("su2_cartan_fiber", export_model(&samples::su2_cartan_fiber())),
        ("su2_twisted", export_model(&samples::su2_twisted())),
        ("su2su2_cartan", export_model(&samples::su2su2_cartan())),
        ("su2su2_h2", export_model(&su2su2_h2())),
        ("su3_cartan", export_model(&samples::su3_cartan())),
        ("su3_h2", export_model(&su3_h2())),
        ("su3_cartan_fiber", export_model(&su3_cartan_fiber_named())),
        ("bad_jacobi", BAD_JACOBI.to_string()),
        ("su2_plus_r_fbad", SU2_PLUS_R_FBAD.to_string()),
    ]
}

/// Rewrites corpus/ from the generator. Run explicitly:
/// `cargo test -p courant-core --test corpus -- --ignored regenerate_corpus`
#[test]
#[ignore]
fn regenerate_corpus() {
    let dir = corpus_dir();
    fs::create_dir_all(&dir).unwrap();
    for (stem, text) in generated_corpus() {
        fs::write(dir.join(format!("{stem}.json")), text).unwrap();
    }
}

#[test]
fn shipped_corpus_matches_the_generator() {
    for (stem, want) in generated_corpus() {
        let path = corpus_dir().join(format!("{stem}.json"));
        let got = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; regenerate the corpus", path.display()));
        assert_eq!(got, want, "{stem}.json drifted from its generator");
    }
    let mut shipped: Vec<String> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    shipped.sort();
    let mut expected: Vec<String> =
        generated_corpus().iter().map(|(s, _)| format!("{s}.json")).collect();
    expected.sort();
    assert_eq!(shipped, expected, "stray or missing corpus files");
}

#[test]
fn well_formed_corpus_files_load_and_round_trip() {
    for (stem, _) in generated_corpus() {
        if stem == "bad_jacobi" {
            continue;
        }
        let path = corpus_dir().join(format!("{stem}.json"));
        let model = load_model(&path).unwrap_or_else(|e| panic!("{stem}: {e}"));
        assert_eq!(model.name, stem);
        if stem != "su2_plus_r_fbad" {
            assert_eq!(export_model(&model), fs::read_to_string(&path).unwrap(), "{stem}");
        }
    }
}

#[test]
fn bad_jacobi_is_rejected_as_a_mathematical_error() {
    let err = load_model(&corpus_dir().join("bad_jacobi.json")).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(matches!(err, FileError::Model(_)), "got {err:?}");
    assert!(err.to_string().to_lowercase().contains("jacobi"), "{err}");
}

#[test]
fn non_closed_curving_builds_but_fails_the_bracket_axioms() {
    let model = load_model(&corpus_dir().join("su2_plus_r_fbad.json")).unwrap();
    let violations = model.check_axioms();
    assert!(!violations.is_empty());
    assert!(violations.iter().any(|v| v.axiom == "jacobi"), "{violations:?}");
}
