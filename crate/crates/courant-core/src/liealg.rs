//! Finite-dimensional Lie algebras given by rational structure constants in
//! a fixed basis, with an optional ad-invariant pairing. Provides the adjoint
//! action, Killing form, Cartan three-form, and the Chevalley-Eilenberg
//! differential (scalar or vector valued) with Betti numbers.

use crate::linalg::{Mat, Metric, MetricError};
use crate::rat::{fmt_q, qi, qr, qzero, Q};
use crate::tensor::{DenseTensor, SymTag};
use num_integer::binomial;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("structure constants have shape {shape:?}, expected [{dim}, {dim}, {dim}]")]
    BadShape { shape: Vec<usize>, dim: usize },
    #[error("antisymmetry fails: c[{i}][{j}][{k}] + c[{j}][{i}][{k}] = {value}")]
    Antisymmetry { i: usize, j: usize, k: usize, value: String },
    #[error(
        "Jacobi identity fails on basis triple ({i},{j},{k}): component {m} of the cyclic sum is {residual}"
    )]
    Jacobi { i: usize, j: usize, k: usize, m: usize, residual: String },
    #[error("pairing is not a valid metric: {0}")]
    Pairing(#[from] MetricError),
    #[error(
        "pairing is not ad-invariant: <[e{x},e{y}],e{z}> + <e{y},[e{x},e{z}]> = {residual}"
    )]
    PairingNotInvariant { x: usize, y: usize, z: usize, residual: String },
    #[error("operation requires a pairing but none is attached")]
    MissingPairing,
    #[error("form is not alternating in its argument slots (witness index {index:?}, value {value})")]
    FormNotAlternating { index: Vec<usize>, value: String },
    #[error("form has shape {shape:?}, which does not fit algebra dimension {dim}")]
    FormShape { shape: Vec<usize>, dim: usize },
    #[error("representation supplies {got} matrices, expected {expected}")]
    RepCount { expected: usize, got: usize },
    #[error("representation matrix {index} is {rows}x{cols}, expected square of size {value_dim}")]
    RepShape { index: usize, rows: usize, cols: usize, value_dim: usize },
    #[error("degree {degree} exceeds algebra dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
}

/// Structure constants c[i][j][k]: [e_i, e_j] = Σ_k c[i][j][k] e_k.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub dim: usize,
    bracket: DenseTensor,
    pub pairing: Option<Metric>,
}

impl LieAlgebra {
    pub fn new(
        dim: usize,
        bracket: DenseTensor,
        pairing: Option<Mat>,
    ) -> Result<Self, LieError> {
        if bracket.shape() != [dim, dim, dim] {
            return Err(LieError::BadShape { shape: bracket.shape().to_vec(), dim });
        }
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    let s = bracket.get(&[i, j, k]) + bracket.get(&[j, i, k]);
                    if !s.is_zero() {
                        return Err(LieError::Antisymmetry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            value: fmt_q(&s),
                        });
                    }
                }
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    for m in 0..dim {
                        let mut r = qzero();
                        for l in 0..dim {
                            r += bracket.get(&[i, j, l]) * bracket.get(&[l, k, m]);
                            r += bracket.get(&[j, k, l]) * bracket.get(&[l, i, m]);
                            r += bracket.get(&[k, i, l]) * bracket.get(&[l, j, m]);
                        }
                        if !r.is_zero() {
                            return Err(LieError::Jacobi {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                m: m + 1,
                                residual: fmt_q(&r),
                            });
                        }
                    }
                }
            }
        }
        let alg = LieAlgebra { dim, bracket, pairing: None };
        let pairing = match pairing {
            None => None,
            Some(mat) => {
                let metric = Metric::new(mat)?;
                if let Some((x, y, z, r)) = alg.invariance_witness(&metric) {
                    return Err(LieError::PairingNotInvariant {
                        x: x + 1,
                        y: y + 1,
                        z: z + 1,
                        residual: fmt_q(&r),
                    });
                }
                Some(metric)
            }
        };
        Ok(LieAlgebra { pairing, ..alg })
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Q {
        self.bracket.get(&[i, j, k])
    }

    pub fn bracket_tensor(&self) -> &DenseTensor {
        &self.bracket
    }

    /// Coefficients of [e_i, e_j].
    pub fn basis_bracket(&self, i: usize, j: usize) -> Vec<Q> {
        (0..self.dim).map(|k| self.c(i, j, k).clone()).collect()
    }

    pub fn bracket_vec(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![qzero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let w = xi * yj;
                for (k, out_k) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *out_k += &w * c;
                    }
                }
            }
        }
        out
    }

    /// ad(e_i) as a matrix: column j holds the coefficients of [e_i, e_j].
    pub fn ad(&self, i: usize) -> Mat {
        Mat::from_fn(self.dim, self.dim, |k, j| self.c(i, j, k).clone())
    }

    pub fn killing(&self) -> Mat {
        Mat::from_fn(self.dim, self.dim, |i, j| {
            let mut acc = qzero();
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let u = self.c(i, a, b);
                    if u.is_zero() {
                        continue;
                    }
                    let v = self.c(j, b, a);
                    if !v.is_zero() {
                        acc += u * v;
                    }
                }
            }
            acc
        })
    }

    /// First failure of <[e_x,e_y],e_z> + <e_y,[e_x,e_z]> = 0, if any.
    pub fn invariance_witness(&self, g: &Metric) -> Option<(usize, usize, usize, Q)> {
        for x in 0..self.dim {
            for y in 0..self.dim {
                for z in 0..self.dim {
                    let mut r = qzero();
                    for l in 0..self.dim {
                        let a = self.c(x, y, l);
                        if !a.is_zero() {
                            r += a * &g.mat[(l, z)];
                        }
                        let b = self.c(x, z, l);
                        if !b.is_zero() {
                            r += &g.mat[(y, l)] * b;
                        }
                    }
                    if !r.is_zero() {
                        return Some((x, y, z, r));
                    }
                }
            }
        }
        None
    }

    pub fn is_invariant_metric(&self, g: &Metric) -> bool {
        self.invariance_witness(g).is_none()
    }

    /// The three-form g([x,y],z) for an ad-invariant metric g.
    pub fn cartan_form_with(&self, g: &Metric) -> Result<DenseTensor, LieError> {
        if let Some((x, y, z, r)) = self.invariance_witness(g) {
            return Err(LieError::PairingNotInvariant {
                x: x + 1,
                y: y + 1,
                z: z + 1,
                residual: fmt_q(&r),
            });
        }
        let t = self.bracket.contract_slot(2, &g.mat);
        Ok(t.with_tag(SymTag::Alternating(vec![0, 1, 2]))
            .expect("invariant metric yields an alternating three-form"))
    }

    pub fn cartan_form(&self) -> Result<DenseTensor, LieError> {
        let g = self.pairing.as_ref().ok_or(LieError::MissingPairing)?;
        self.cartan_form_with(g)
    }

    /// Differential of an alternating k-form. A scalar form has shape
    /// [dim; k]; with `rep` the form carries one trailing value slot and
    /// rep supplies one square matrix per basis element acting on values.
    pub fn ce_differential(
        &self,
        form: &DenseTensor,
        rep: Option<&[Mat]>,
    ) -> Result<DenseTensor, LieError> {
        let n = self.dim;
        let shape = form.shape().to_vec();
        let (k, value_dim) = match rep {
            None => {
                if shape.iter().any(|&d| d != n) {
                    return Err(LieError::FormShape { shape, dim: n });
                }
                (shape.len(), None)
            }
            Some(mats) => {
                if shape.is_empty() || shape[..shape.len() - 1].iter().any(|&d| d != n) {
                    return Err(LieError::FormShape { shape, dim: n });
                }
                let p = shape[shape.len() - 1];
                if mats.len() != n {
                    return Err(LieError::RepCount { expected: n, got: mats.len() });
                }
                for (index, m) in mats.iter().enumerate() {
                    if m.rows != p || m.cols != p {
                        return Err(LieError::RepShape {
                            index: index + 1,
                            rows: m.rows,
                            cols: m.cols,
                            value_dim: p,
                        });
                    }
                }
                (shape.len() - 1, Some(p))
            }
        };
        let arg_slots: Vec<usize> = (0..k).collect();
        if !form.is_alternating_in(&arg_slots) {
            let err = form
                .clone()
                .with_tag(SymTag::Alternating(arg_slots))
                .expect_err("alternation check already failed");
            if let crate::tensor::TensorError::SymmetryViolation { index, value, .. } = err {
                return Err(LieError::FormNotAlternating { index, value });
            }
            unreachable!("with_tag reports symmetry violations");
        }

        let mut out_shape = vec![n; k + 1];
        if let Some(p) = value_dim {
            out_shape.push(p);
        }
        let mut args = vec![0usize; k + 1];
        let mut inner = vec![0usize; form.rank()];
        let out = DenseTensor::from_fn(&out_shape, |idx| {
            args.copy_from_slice(&idx[..k + 1]);
            let value_index = value_dim.map(|_| idx[k + 1]);
            let mut acc = qzero();
            // bracket terms: (-1)^{a+b} α([x_a, x_b], ... others ...)
            for a in 0..k + 1 {
                for b in a + 1..k + 1 {
                    let mut w = 0;
                    for (pos, &arg) in args.iter().enumerate() {
                        if pos == a || pos == b {
                            continue;
                        }
                        w += 1;
                        inner[w] = arg;
                    }
                    if let Some(v) = value_index {
                        inner[k] = v;
                    }
                    let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                    for l in 0..n {
                        let c = self.c(args[a], args[b], l);
                        if c.is_zero() {
                            continue;
                        }
                        inner[0] = l;
                        let t = form.get(&inner[..form.rank()]);
                        if !t.is_zero() {
                            acc += c * t * qi(sign);
                        }
                    }
                }
            }
            // value action terms: (-1)^a ρ(x_a) α(... others ...)
            if let (Some(mats), Some(v)) = (rep, value_index) {
                for a in 0..k + 1 {
                    let mut w = 0;
                    for (pos, &arg) in args.iter().enumerate() {
                        if pos == a {
                            continue;
                        }
                        inner[w] = arg;
                        w += 1;
                    }
                    let sign = if a % 2 == 0 { 1 } else { -1 };
                    let m = &mats[args[a]];
                    for bb in 0..m.cols {
                        let coeff = &m[(v, bb)];
                        if coeff.is_zero() {
                            continue;
                        }
                        inner[k] = bb;
                        let t = form.get(&inner[..form.rank()]);
                        if !t.is_zero() {
                            acc += coeff * t * qi(sign);
                        }
                    }
                }
            }
            acc
        });
        Ok(out
            .with_tag(SymTag::Alternating((0..k + 1).collect()))
            .expect("differential of an alternating form is alternating"))
    }

    /// Matrix of d: Λ^k → Λ^{k+1} in the basis of sorted index subsets.
    fn ce_matrix(&self, k: usize) -> Mat {
        let n = self.dim;
        let cols_sets = k_subsets(n, k);
        let rows_sets = k_subsets(n, k + 1);
        let col_pos: BTreeMap<&[usize], usize> =
            cols_sets.iter().enumerate().map(|(p, s)| (s.as_slice(), p)).collect();
        let mut m = Mat::zeros(rows_sets.len(), cols_sets.len());
        let mut merged = Vec::with_capacity(k);
        for (row, jset) in rows_sets.iter().enumerate() {
            for a in 0..jset.len() {
                for b in a + 1..jset.len() {
                    let pair_sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                    let rest: Vec<usize> = jset
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != a && p != b)
                        .map(|(_, &v)| v)
                        .collect();
                    for l in 0..n {
                        let c = self.c(jset[a], jset[b], l);
                        if c.is_zero() || rest.contains(&l) {
                            continue;
                        }
                        let insert_at = rest.iter().take_while(|&&r| r < l).count();
                        merged.clear();
                        merged.extend_from_slice(&rest[..insert_at]);
                        merged.push(l);
                        merged.extend_from_slice(&rest[insert_at..]);
                        let insert_sign = if insert_at % 2 == 0 { 1 } else { -1 };
                        let col = col_pos[merged.as_slice()];
                        let add = c * qi(pair_sign * insert_sign);
                        m[(row, col)] = &m[(row, col)] + &add;
                    }
                }
            }
        }
        m
    }

    /// Betti numbers b_0..b_max of the scalar cochain complex.
    pub fn ce_betti(&self, max_degree: usize) -> Result<Vec<usize>, LieError> {
        let n = self.dim;
        if max_degree > n {
            return Err(LieError::DegreeOutOfRange { degree: max_degree, dim: n });
        }
        let ranks: Vec<usize> = (0..=max_degree).map(|k| self.ce_matrix(k).rank()).collect();
        Ok((0..=max_degree)
            .map(|k| {
                let dim_k = binomial(n as u64, k as u64) as usize;
                let prev = if k == 0 { 0 } else { ranks[k - 1] };
                dim_k - ranks[k] - prev
            })
            .collect())
    }

    pub fn abelian(dim: usize) -> LieAlgebra {
        LieAlgebra::new(dim, DenseTensor::zeros(&[dim, dim, dim]), None)
            .expect("zero bracket is a Lie algebra")
    }

    /// [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e2, with the standard pairing.
    pub fn su2() -> LieAlgebra {
        let pairs: PairTable = &[(0, 1, &[(2, 1)]), (1, 2, &[(0, 1)]), (2, 0, &[(1, 1)])];
        from_pairs(3, pairs, Some(Mat::identity(3))).expect("su(2) table is a Lie algebra")
    }

    /// The compact real form of the rank-two simple algebra of dimension 8,
    /// in the basis (t1, t2, x1, y1, x2, y2, x3, y3) built from a Chevalley
    /// basis; all structure constants are integers. The attached pairing is
    /// -1/6 of the Killing form, which is positive definite.
    pub fn su3() -> LieAlgebra {
        let pairs: PairTable = &[
            (0, 2, &[(3, 2)]),
            (0, 3, &[(2, -2)]),
            (0, 4, &[(5, -1)]),
            (0, 5, &[(4, 1)]),
            (0, 6, &[(7, 1)]),
            (0, 7, &[(6, -1)]),
            (1, 2, &[(3, -1)]),
            (1, 3, &[(2, 1)]),
            (1, 4, &[(5, 2)]),
            (1, 5, &[(4, -2)]),
            (1, 6, &[(7, 1)]),
            (1, 7, &[(6, -1)]),
            (2, 3, &[(0, 2)]),
            (2, 4, &[(6, 1)]),
            (2, 5, &[(7, 1)]),
            (2, 6, &[(4, -1)]),
            (2, 7, &[(5, -1)]),
            (3, 4, &[(7, 1)]),
            (3, 5, &[(6, -1)]),
            (3, 6, &[(5, 1)]),
            (3, 7, &[(4, -1)]),
            (4, 5, &[(1, 2)]),
            (4, 6, &[(2, 1)]),
            (4, 7, &[(3, 1)]),
            (5, 6, &[(3, -1)]),
            (5, 7, &[(2, 1)]),
            (6, 7, &[(0, 2), (1, 2)]),
        ];
        let bare = from_pairs(8, pairs, None).expect("su(3) table is a Lie algebra");
        let pairing = bare.killing().scale(&qr(-1, 6));
        LieAlgebra::new(8, bare.bracket, Some(pairing))
            .expect("rescaled Killing form is an invariant metric")
    }

    /// Block sum; the pairing is kept only when both summands carry one.
    pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
        let n = a.dim + b.dim;
        let bracket = DenseTensor::from_fn(&[n, n, n], |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            if i < a.dim && j < a.dim && k < a.dim {
                a.c(i, j, k).clone()
            } else if i >= a.dim && j >= a.dim && k >= a.dim {
                b.c(i - a.dim, j - a.dim, k - a.dim).clone()
            } else {
                qzero()
            }
        });
        let pairing = match (&a.pairing, &b.pairing) {
            (Some(pa), Some(pb)) => Some(Mat::from_fn(n, n, |i, j| {
                if i < a.dim && j < a.dim {
                    pa.mat[(i, j)].clone()
                } else if i >= a.dim && j >= a.dim {
                    pb.mat[(i - a.dim, j - a.dim)].clone()
                } else {
                    qzero()
                }
            })),
            _ => None,
        };
        LieAlgebra::new(n, bracket, pairing).expect("direct sum of Lie algebras")
    }
}

type PairTable<'a> = &'a [(usize, usize, &'a [(usize, i64)])];

/// Build from one entry per unordered basis pair; the antisymmetric
/// counterparts are filled in automatically.
pub fn from_pairs(
    dim: usize,
    pairs: PairTable,
    pairing: Option<Mat>,
) -> Result<LieAlgebra, LieError> {
    let mut t = DenseTensor::zeros(&[dim, dim, dim]);
    for &(i, j, terms) in pairs {
        for &(k, v) in terms {
            t.set(&[i, j, k], qi(v));
            t.set(&[j, i, k], qi(-v));
        }
    }
    LieAlgebra::new(dim, t, pairing)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        if cur[i] == i + n - k {
            return out;
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    #[test]
    fn su2_killing_is_minus_two_identity() {
        let k = LieAlgebra::su2().killing();
        assert_eq!(k, Mat::identity(3).scale(&qi(-2)));
    }

    #[test]
    fn direct_sum_killing_has_zero_center_block() {
        let alg = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
        let k = alg.killing();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && i < 3 { qi(-2) } else { qi(0) };
                assert_eq!(k[(i, j)], want);
            }
        }
    }

    #[test]
    fn su2_cartan_form_is_volume() {
        let alg = LieAlgebra::su2();
        let h = alg.cartan_form().unwrap();
        assert_eq!(h.get(&[0, 1, 2]).clone(), qi(1));
        assert_eq!(h.get(&[1, 0, 2]).clone(), qi(-1));
        assert_eq!(h.get(&[2, 0, 1]).clone(), qi(1));
        assert!(h.get(&[0, 0, 1]).is_zero());
    }

    #[test]
    fn differential_of_first_dual_vector_on_su2() {
        let alg = LieAlgebra::su2();
        let mut e1s = DenseTensor::zeros(&[3]);
        e1s.set(&[0], qi(1));
        let d = alg.ce_differential(&e1s, None).unwrap();
        // d e1* = -e2* ∧ e3*
        assert_eq!(d.get(&[1, 2]).clone(), qi(-1));
        assert_eq!(d.get(&[2, 1]).clone(), qi(1));
        assert!(d.get(&[0, 1]).is_zero());
        assert!(d.get(&[0, 2]).is_zero());
    }

    #[test]
    fn differential_squares_to_zero() {
        let alg = LieAlgebra::su2();
        let mut e1s = DenseTensor::zeros(&[3]);
        e1s.set(&[0], qi(1));
        let d1 = alg.ce_differential(&e1s, None).unwrap();
        let d2 = alg.ce_differential(&d1, None).unwrap();
        assert!(d2.is_zero());

        let su3 = LieAlgebra::su3();
        let mut a = DenseTensor::zeros(&[8]);
        a.set(&[2], qi(1));
        a.set(&[6], qi(-3));
        let dd = su3.ce_differential(&su3.ce_differential(&a, None).unwrap(), None).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn cartan_form_is_closed() {
        let alg = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
        let pairing = Metric::new(Mat::identity(4)).unwrap();
        let h = alg.cartan_form_with(&pairing).unwrap();
        assert!(alg.ce_differential(&h, None).unwrap().is_zero());
    }

    #[test]
    fn betti_numbers_of_small_algebras() {
        assert_eq!(LieAlgebra::su2().ce_betti(3).unwrap(), vec![1, 0, 0, 1]);
        assert_eq!(LieAlgebra::abelian(2).ce_betti(2).unwrap(), vec![1, 2, 1]);
        let sum = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1));
        assert_eq!(sum.ce_betti(4).unwrap(), vec![1, 1, 0, 1, 1]);
    }

    #[test]
    fn su3_killing_matches_root_data() {
        let alg = LieAlgebra::su3();
        let k = alg.killing();
        assert_eq!(k[(0, 0)], qi(-12));
        assert_eq!(k[(1, 1)], qi(-12));
        assert_eq!(k[(0, 1)], qi(6));
        for i in 2..8 {
            assert_eq!(k[(i, i)], qi(-12));
            assert_eq!(k[(0, i)], qi(0));
            assert_eq!(k[(1, i)], qi(0));
            for j in 2..8 {
                if i != j {
                    assert_eq!(k[(i, j)], qi(0));
                }
            }
        }
        let pairing = alg.pairing.as_ref().unwrap();
        assert!(pairing.is_positive_definite());
    }

    #[test]
    fn constructor_rejects_broken_antisymmetry() {
        let mut t = DenseTensor::zeros(&[3, 3, 3]);
        t.set(&[0, 1, 2], qi(1));
        let err = LieAlgebra::new(3, t, None).unwrap_err();
        assert!(matches!(err, LieError::Antisymmetry { i: 1, j: 2, k: 3, .. }));
    }

    #[test]
    fn constructor_rejects_broken_jacobi() {
        // [e1,e2] = e3 and [e1,e3] = e1 fails on the (1,2,3) triple
        let pairs: PairTable = &[(0, 1, &[(2, 1)]), (0, 2, &[(0, 1)])];
        let err = from_pairs(3, pairs, None).unwrap_err();
        assert!(matches!(err, LieError::Jacobi { i: 1, j: 2, k: 3, .. }));
    }

    #[test]
    fn constructor_rejects_noninvariant_pairing() {
        let mut p = Mat::identity(3);
        p[(2, 2)] = qi(2);
        let pairs: PairTable = &[(0, 1, &[(2, 1)]), (1, 2, &[(0, 1)]), (2, 0, &[(1, 1)])];
        let err = from_pairs(3, pairs, Some(p)).unwrap_err();
        assert!(matches!(err, LieError::PairingNotInvariant { .. }));
    }

    #[test]
    fn invariant_two_form_satisfies_subalgebra_identity() {
        // α = e1* ∧ e2* on su(2) is invariant under the subalgebra spanned
        // by e3; then dα(e3, y, z) = α(e3, [y,z]).
        let alg = LieAlgebra::su2();
        let mut a = DenseTensor::zeros(&[3, 3]);
        a.set(&[0, 1], qi(1));
        a.set(&[1, 0], qi(-1));
        let ad3 = alg.ad(2);
        // invariance under e3: α(ad3 y, z) + α(y, ad3 z) = 0
        for y in 0..3 {
            for z in 0..3 {
                let mut r = qzero();
                for l in 0..3 {
                    r += &ad3[(l, y)] * a.get(&[l, z]);
                    r += a.get(&[y, l]) * &ad3[(l, z)];
                }
                assert!(r.is_zero());
            }
        }
        let da = alg.ce_differential(&a, None).unwrap();
        for y in 0..3 {
            for z in 0..3 {
                let mut rhs = qzero();
                for l in 0..3 {
                    rhs += alg.c(y, z, l) * a.get(&[2, l]);
                }
                assert_eq!(da.get(&[2, y, z]).clone(), rhs);
            }
        }
    }

    #[test]
    fn vector_valued_differential_reduces_to_scalar_for_zero_action() {
        // with the trivial action on a 1-dim value space, d matches the
        // scalar differential componentwise
        let alg = LieAlgebra::su2();
        let rep: Vec<Mat> = (0..3).map(|_| Mat::zeros(1, 1)).collect();
        let mut f = DenseTensor::zeros(&[3, 1]);
        f.set(&[0, 0], qi(1));
        let d = alg.ce_differential(&f, Some(&rep)).unwrap();
        assert_eq!(d.get(&[1, 2, 0]).clone(), qi(-1));
        assert_eq!(d.get(&[2, 1, 0]).clone(), qi(1));
        assert!(d.get(&[0, 1, 0]).is_zero());
    }

    #[test]
    fn adjoint_valued_differential_of_identity_is_bracket() {
        // dφ(x,y) = ρ(x)φ(y) - ρ(y)φ(x) - φ([x,y]) with φ = id and ρ = ad
        // gives [x,y] - [y,x] - [x,y] = [x,y]
        let alg = LieAlgebra::su2();
        let rep: Vec<Mat> = (0..3).map(|i| alg.ad(i)).collect();
        let phi = DenseTensor::from_fn(&[3, 3], |i| if i[0] == i[1] { qi(1) } else { qi(0) });
        let d = alg.ce_differential(&phi, Some(&rep)).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                for v in 0..3 {
                    assert_eq!(d.get(&[x, y, v]), alg.c(x, y, v));
                }
            }
        }
    }
}
