//! The four-term sequence controlling torsion-free connections and the
//! affine moduli of flat ones. Everything is exact linear algebra over ℚ:
//! the quotient (S²𝔤*⊗𝔤*)/S³𝔤* is never formed abstractly, it is realized
//! as the kernel of the cyclic sum inside 𝔤*⊗∧²𝔤*.

use crate::algebroid::CourantModel;
use crate::curvature::{
    bismut_coeffs, cov_deriv_all, invariant_covariant_derivative, is_flat, Sign, SlotRole,
};
use crate::genconn::{is_levi_civita, GenConnection};
use crate::liealg::LieAlgebra;
use crate::linalg::Mat;
use crate::rat::{fmt_q, qr, qzero, Q};
use crate::tensor::{
    alt, bianchator, constrained_basis, invariant_subspace, DenseTensor, SymTag,
    SymmetryConstraint,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModError {
    #[error("not in the kernel of the cyclic sum: {residual}")]
    NotInKernel { residual: String },
    #[error("base metric is not bi-invariant with matching Cartan three-form; only the constraint-system description applies")]
    NotBiInvariantBase,
    #[error("every torsion-free point of this model is flat; no non-flat sample exists")]
    EmptyModel,
    #[error("model has a nonzero fiber-valued two-form, first entry F{index:?} = {value}; the flat space is only described for F = 0")]
    CurvingPresent { index: Vec<usize>, value: String },
}

/// Dimensions and ranks of
///   0 → S³V* → S²V*⊗V* → V*⊗∧²V* → ∧³V* → 0
/// with the inclusion, the alternation in the last two slots and the cyclic
/// sum, over the underlying space of a Lie algebra, plus the same data on
/// the infinitesimally invariant subspaces. Exactness is always derived
/// from the stored ranks, never recorded separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceReport {
    /// dims of (S³, S²⊗V, V⊗∧², ∧³)
    pub dims: [usize; 4],
    pub rank_inclusion: usize,
    pub rank_alt: usize,
    pub rank_bi: usize,
    pub invariant_dims: [usize; 4],
    pub invariant_rank_inclusion: usize,
    pub invariant_rank_alt: usize,
    pub invariant_rank_bi: usize,
    /// exactness of the invariant restriction is asserted only when the
    /// algebra carries a definite invariant pairing
    pub invariant_asserted: bool,
}

fn exactness(dims: &[usize; 4], r_inc: usize, r_alt: usize, r_bi: usize) -> [bool; 4] {
    [
        r_inc == dims[0],
        dims[1] - r_alt == r_inc,
        dims[2] - r_bi == r_alt,
        r_bi == dims[3],
    ]
}

impl SequenceReport {
    pub fn exact(&self) -> [bool; 4] {
        exactness(&self.dims, self.rank_inclusion, self.rank_alt, self.rank_bi)
    }

    pub fn invariant_exact(&self) -> [bool; 4] {
        exactness(
            &self.invariant_dims,
            self.invariant_rank_inclusion,
            self.invariant_rank_alt,
            self.invariant_rank_bi,
        )
    }

    pub fn fully_exact(&self) -> bool {
        self.exact().iter().all(|&b| b)
    }

    pub fn invariant_fully_exact(&self) -> bool {
        self.invariant_exact().iter().all(|&b| b)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let d = &self.dims;
        d[0] as i64 - d[1] as i64 + d[2] as i64 - d[3] as i64
    }
}

fn flatten(t: &DenseTensor) -> Vec<Q> {
    t.indices().map(|i| t.get(&i).clone()).collect()
}

fn cols_to_mat(rows: usize, cols: &[Vec<Q>]) -> Mat {
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
}

fn combine_tensors(n: usize, basis: &[DenseTensor], coeffs: &[Q]) -> DenseTensor {
    let mut acc = DenseTensor::zeros(&[n, n, n]);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

/// Infinitesimal adjoint action on a covariant 3-tensor. Vanishing for
/// every direction is infinitesimal invariance.
fn lie_action(l: &LieAlgebra, y: usize, t: &DenseTensor) -> DenseTensor {
    invariant_covariant_derivative(t, &[SlotRole::BaseIn; 3], &l.ad(y), None)
}

fn is_invariant(l: &LieAlgebra, t: &DenseTensor) -> bool {
    (0..l.dim).all(|y| lie_action(l, y, t).is_zero())
}

/// Rank and exactness data for the four-term sequence on `l`, full and
/// invariant-restricted. Full exactness is a characteristic-zero fact and
/// is always asserted; the invariant restriction is asserted only when the
/// pairing is definite, otherwise merely reported.
pub fn koszul_sequence_check(l: &LieAlgebra) -> SequenceReport {
    let n = l.dim;
    let cons: [Vec<SymmetryConstraint>; 4] = [
        vec![SymmetryConstraint::Symmetric(vec![0, 1, 2])],
        vec![SymmetryConstraint::Symmetric(vec![0, 1])],
        vec![SymmetryConstraint::Alternating(vec![1, 2])],
        vec![SymmetryConstraint::Alternating(vec![0, 1, 2])],
    ];
    let full: Vec<Vec<DenseTensor>> = cons
        .iter()
        .map(|c| constrained_basis(n, 3, c).expect("slot groups are disjoint"))
        .collect();
    let inv: Vec<Vec<DenseTensor>> = cons
        .iter()
        .map(|c| invariant_subspace(l, 3, c).expect("slot groups are disjoint"))
        .collect();

    let n3 = n * n * n;
    let rank_of = |ts: &[DenseTensor], f: &dyn Fn(&DenseTensor) -> DenseTensor| {
        let cols: Vec<Vec<Q>> = ts.iter().map(|t| flatten(&f(t))).collect();
        cols_to_mat(n3, &cols).rank()
    };
    let include = |t: &DenseTensor| t.clone();
    let alt23 = |t: &DenseTensor| alt(t, 1, 2);
    let cyc = |t: &DenseTensor| bianchator(t).expect("alternating in the last two slots");

    let report = SequenceReport {
        dims: [full[0].len(), full[1].len(), full[2].len(), full[3].len()],
        rank_inclusion: rank_of(&full[0], &include),
        rank_alt: rank_of(&full[1], &alt23),
        rank_bi: rank_of(&full[2], &cyc),
        invariant_dims: [inv[0].len(), inv[1].len(), inv[2].len(), inv[3].len()],
        invariant_rank_inclusion: rank_of(&inv[0], &include),
        invariant_rank_alt: rank_of(&inv[1], &alt23),
        invariant_rank_bi: rank_of(&inv[2], &cyc),
        invariant_asserted: l.pairing.as_ref().is_some_and(|p| p.is_definite()),
    };
    assert!(
        report.fully_exact(),
        "four-term sequence must be exact over the rationals"
    );
    if report.invariant_asserted {
        assert!(
            report.invariant_fully_exact(),
            "invariant restriction must stay exact for a definite pairing"
        );
    }
    report
}

/// Canonical preimage under the alternation map: for B in the kernel of the
/// cyclic sum, B′(X,Y,Z) = ⅔(B(X,Y,Z) + B(Y,X,Z)) is symmetric in its
/// first two slots and Alt₂₃(B′) = B exactly. Preimages are unique up to
/// fully symmetric tensors; this is the one orthogonal to that ambiguity in
/// the sense of the cyclic grading.
pub fn homotopy_preimage(b: &DenseTensor) -> Result<DenseTensor, ModError> {
    assert_eq!(b.rank(), 3, "expected a 3-tensor");
    let n = b.shape()[0];
    assert!(b.shape().iter().all(|&s| s == n), "expected cubical shape");
    assert!(
        b.is_alternating_in(&[1, 2]),
        "input must be alternating in its last two slots"
    );
    let bi = bianchator(b).expect("alternating in the last two slots");
    if let Some((idx, val)) = bi.first_nonzero() {
        let shown: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        return Err(ModError::NotInKernel {
            residual: format!("Bi(B){shown:?} = {}", fmt_q(&val)),
        });
    }
    let w = qr(2, 3);
    let prim = DenseTensor::from_fn(b.shape(), |i| {
        let swapped = [i[1], i[0], i[2]];
        (b.get(i) + b.get(&swapped)) * &w
    });
    Ok(prim
        .with_tag(SymTag::Symmetric(vec![0, 1]))
        .expect("symmetrized in the first two slots by construction"))
}

/// Affine description of the torsion-free base pairs (B⁺, B⁻) of a model
/// with vanishing fiber-valued two-form, and of the flat ones when that is
/// a linear condition.
///
/// Bi-invariant mode (the base metric is ad-invariant and H is its Cartan
/// three-form): the base point is (−⅓H, +⅓H), `plus_basis` spans the
/// infinitesimally invariant part of ker Bi, `minus_basis` all of ker Bi,
/// and a point of the affine space is flat exactly when its offsets lie in
/// the spanned subspaces.
///
/// Otherwise the bases span the solutions of the homogeneous system
/// ∇±B = 0, Bi(B) = 0 and the base point solves the inhomogeneous one;
/// membership then makes no flatness claim.
#[derive(Clone, Debug)]
pub struct FlatLCSpace {
    pub bi_invariant: bool,
    /// (B⁺₀, B⁻₀); None when the constraint system is infeasible
    pub base_point: Option<(DenseTensor, DenseTensor)>,
    pub plus_basis: Vec<DenseTensor>,
    pub minus_basis: Vec<DenseTensor>,
    /// dimension of the affine space of all torsion-free base pairs, two
    /// copies of ker Bi, with no flatness constraint
    pub lc_dim: usize,
}

impl FlatLCSpace {
    pub fn plus_dim(&self) -> usize {
        self.plus_basis.len()
    }

    pub fn minus_dim(&self) -> usize {
        self.minus_basis.len()
    }

    pub fn flat_dim(&self) -> usize {
        self.plus_dim() + self.minus_dim()
    }
}

pub fn flat_lc_space(model: &CourantModel) -> Result<FlatLCSpace, ModError> {
    if let Some((index, value)) = model.f.first_nonzero() {
        return Err(ModError::CurvingPresent {
            index: index.iter().map(|i| i + 1).collect(),
            value: fmt_q(&value),
        });
    }
    let l = &model.base;
    let g = &model.metric;
    let n = l.dim;
    let n3 = n * n * n;

    let basis = constrained_basis(n, 3, &[SymmetryConstraint::Alternating(vec![1, 2])])
        .expect("slot groups are disjoint");
    let bi_cols: Vec<Vec<Q>> = basis
        .iter()
        .map(|b| flatten(&bianchator(b).expect("alternating in the last two slots")))
        .collect();
    let kernel: Vec<DenseTensor> = cols_to_mat(n3, &bi_cols)
        .kernel_basis()
        .iter()
        .map(|c| combine_tensors(n, &basis, c))
        .collect();
    let lc_dim = 2 * kernel.len();

    // bi-invariance of g and the Cartan match are one condition each on the
    // lowered bracket g([x,y],z)
    let lowered_bracket = l.bracket_tensor().contract_slot(2, &g.mat);
    let bi_invariant =
        lowered_bracket.is_alternating_in(&[1, 2]) && model.h == lowered_bracket;

    if bi_invariant {
        let mut cols = Vec::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            let mut col = bi_cols[i].clone();
            for y in 0..n {
                col.extend(flatten(&lie_action(l, y, b)));
            }
            cols.push(col);
        }
        let plus_basis: Vec<DenseTensor> = cols_to_mat(n3 + n * n3, &cols)
            .kernel_basis()
            .iter()
            .map(|c| combine_tensors(n, &basis, c))
            .collect();
        return Ok(FlatLCSpace {
            bi_invariant: true,
            base_point: Some((model.h.scale(&qr(-1, 3)), model.h.scale(&qr(1, 3)))),
            plus_basis,
            minus_basis: kernel,
            lc_dim,
        });
    }

    let roles = [SlotRole::BaseIn; 3];
    let mut solved = Vec::with_capacity(2);
    for sign in [Sign::Plus, Sign::Minus] {
        let gamma = bismut_coeffs(l, g, &model.h, sign);
        let mut cols = Vec::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            let mut col = bi_cols[i].clone();
            col.extend(flatten(&cov_deriv_all(b, &roles, &gamma, None)));
            cols.push(col);
        }
        let rows = n3 + n * n3;
        let mat = cols_to_mat(rows, &cols);
        let hom: Vec<DenseTensor> = mat
            .kernel_basis()
            .iter()
            .map(|c| combine_tensors(n, &basis, c))
            .collect();
        let mut rhs = flatten(&model.h.scale(&-sign.as_q()));
        rhs.resize(rows, qzero());
        let particular = mat.solve(&rhs).map(|c| combine_tensors(n, &basis, &c));
        solved.push((hom, particular));
    }
    let (minus_basis, minus_part) = solved.pop().expect("two solved systems");
    let (plus_basis, plus_part) = solved.pop().expect("two solved systems");
    let base_point = match (plus_part, minus_part) {
        (Some(p), Some(m)) => Some((p, m)),
        _ => None,
    };
    Ok(FlatLCSpace {
        bi_invariant: false,
        base_point,
        plus_basis,
        minus_basis,
        lc_dim,
    })
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=3);
    qr(num, den)
}

/// Deterministic seeded sample from the torsion-free affine space, flat or
/// certified non-flat. Only available in bi-invariant mode, where flatness
/// of a sample is readable off its offsets. The fiber sector is filled with
/// its canonical flat point.
pub fn sample_lc(
    model: &CourantModel,
    seed: u64,
    want_flat: bool,
) -> Result<GenConnection, ModError> {
    let space = flat_lc_space(model)?;
    if !space.bi_invariant {
        return Err(ModError::NotBiInvariantBase);
    }
    let (mut bp, mut bm) = space
        .base_point
        .clone()
        .expect("bi-invariant mode always carries its canonical base point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for b in &space.minus_basis {
        bm = bm.add(&b.scale(&random_q(&mut rng)));
    }
    for b in &space.plus_basis {
        bp = bp.add(&b.scale(&random_q(&mut rng)));
    }
    if !want_flat {
        let l = &model.base;
        let noninv = space.minus_basis.iter().find(|b| !is_invariant(l, b));
        let Some(noninv) = noninv else {
            return Err(ModError::EmptyModel);
        };
        bp = bp.add(noninv);
    }
    let (bn, fm) = (model.n(), model.m());
    let lten = if fm > 0 {
        model
            .fiber
            .cartan_form()
            .expect("fiber pairing is ad-invariant")
            .scale(&qr(1, 3))
    } else {
        DenseTensor::zeros(&[0, 0, 0])
    };
    let conn = GenConnection::new(
        model,
        DenseTensor::zeros(&[fm, bn, bn]),
        bp,
        bm,
        DenseTensor::zeros(&[bn, fm, fm]),
        lten,
        DenseTensor::zeros(&[fm, bn, bn]),
        DenseTensor::zeros(&[bn, fm, fm]),
    )
    .expect("sampled tensors satisfy the shape and skew constraints");
    assert!(
        is_levi_civita(model, &conn),
        "sampled point must be torsion-free"
    );
    let (flat, _) = is_flat(model, &conn);
    assert_eq!(flat, want_flat, "flatness of the sample must match the request");
    Ok(conn)
}
