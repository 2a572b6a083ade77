//! Dense tensors over the rationals with explicit symmetry metadata, and
//! the multilinear operators the connection/curvature machinery is built
//! from. Storage is row-major; indices are 0-based internally (reports
//! render them 1-based).

use crate::liealg::LieAlgebra;
use crate::linalg::{Mat, Metric};
use crate::rat::{fmt_q, qi, qr, qzero, Q};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymTag {
    None,
    /// Claimed alternating in the given slot set.
    Alternating(Vec<usize>),
    /// Claimed symmetric in the given slot set.
    Symmetric(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("tensor shape {shape:?} does not match expected {expected:?}")]
    ShapeMismatch { shape: Vec<usize>, expected: Vec<usize> },
    #[error("slots {slots:?} do not all have equal dimension in shape {shape:?}")]
    UnequalSlots { slots: Vec<usize>, shape: Vec<usize> },
    #[error("claimed {claim} symmetry fails at index {index:?} (component {value})")]
    SymmetryViolation { claim: String, index: Vec<usize>, value: String },
    #[error("symmetry constraint groups overlap on slot {slot}")]
    OverlappingGroups { slot: usize },
}

#[derive(Clone, Debug)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<Q>,
    tag: SymTag,
}

/// Value equality: shape and entries. The symmetry tag is bookkeeping and
/// two tensors with the same components are the same tensor.
impl PartialEq for DenseTensor {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.data == other.data
    }
}

impl Eq for DenseTensor {}

impl DenseTensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        DenseTensor { shape: shape.to_vec(), data: vec![qzero(); len], tag: SymTag::None }
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> Q) -> Self {
        let mut t = DenseTensor::zeros(shape);
        let mut idx = vec![0usize; shape.len()];
        for off in 0..t.data.len() {
            t.data[off] = f(&idx);
            Self::step(&mut idx, shape);
        }
        t
    }

    fn step(idx: &mut [usize], shape: &[usize]) {
        for k in (0..shape.len()).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                return;
            }
            idx[k] = 0;
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn tag(&self) -> &SymTag {
        &self.tag
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        let mut stride = 1;
        for k in (0..self.shape.len()).rev() {
            debug_assert!(idx[k] < self.shape[k]);
            off += idx[k] * stride;
            stride *= self.shape[k];
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Q {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Q) {
        let off = self.offset(idx);
        self.data[off] = v;
        self.tag = SymTag::None;
    }

    pub fn add_at(&mut self, idx: &[usize], v: &Q) {
        let off = self.offset(idx);
        self.data[off] = &self.data[off] + v;
        self.tag = SymTag::None;
    }

    /// Iterates multi-indices in row-major order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.shape.clone())
    }

    pub fn add(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.shape, other.shape, "tensor shape mismatch in add");
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            tag: SymTag::None,
        }
    }

    pub fn sub(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.shape, other.shape, "tensor shape mismatch in sub");
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            tag: SymTag::None,
        }
    }

    pub fn neg(&self) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|a| -a.clone()).collect(),
            tag: self.tag.clone(),
        }
    }

    pub fn scale(&self, s: &Q) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|a| a * s).collect(),
            tag: self.tag.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|q| q.is_zero())
    }

    /// First nonzero component in row-major order, if any.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, Q)> {
        let mut idx = vec![0usize; self.shape.len()];
        for off in 0..self.data.len() {
            if !self.data[off].is_zero() {
                return Some((idx, self.data[off].clone()));
            }
            Self::step(&mut idx, &self.shape);
        }
        None
    }

    /// Reroute slots: out[j] = self[i] with i[perm[k]] = j[k].
    pub fn permute(&self, perm: &[usize]) -> DenseTensor {
        assert_eq!(perm.len(), self.shape.len());
        let out_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut src = vec![0usize; perm.len()];
        DenseTensor::from_fn(&out_shape, |j| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = j[k];
            }
            self.get(&src).clone()
        })
    }

    /// Exchange two slots.
    pub fn swap_slots(&self, a: usize, b: usize) -> DenseTensor {
        let mut perm: Vec<usize> = (0..self.shape.len()).collect();
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Apply `mat` to one slot: out[.., a, ..] = Σ_b mat[a][b] · in[.., b, ..].
    pub fn contract_slot(&self, slot: usize, mat: &Mat) -> DenseTensor {
        assert_eq!(mat.cols, self.shape[slot], "contraction dimension mismatch");
        let mut out_shape = self.shape.clone();
        out_shape[slot] = mat.rows;
        let mut idx = Vec::new();
        DenseTensor::from_fn(&out_shape, |j| {
            idx.clear();
            idx.extend_from_slice(j);
            let mut acc = qzero();
            for b in 0..mat.cols {
                let m = &mat[(j[slot], b)];
                if m.is_zero() {
                    continue;
                }
                idx[slot] = b;
                let v = self.get(&idx);
                if !v.is_zero() {
                    acc += m * v;
                }
            }
            acc
        })
    }

    /// Evaluate against one vector in the given slot (rank drops by one).
    pub fn apply_vec(&self, slot: usize, v: &[Q]) -> DenseTensor {
        assert_eq!(v.len(), self.shape[slot]);
        let out_shape: Vec<usize> =
            self.shape.iter().enumerate().filter(|&(k, _)| k != slot).map(|(_, &d)| d).collect();
        let mut idx = vec![0usize; self.shape.len()];
        DenseTensor::from_fn(&out_shape, |j| {
            let mut jj = j.iter();
            for (k, slot_idx) in idx.iter_mut().enumerate() {
                if k != slot {
                    *slot_idx = *jj.next().unwrap();
                }
            }
            let mut acc = qzero();
            for (b, coeff) in v.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                idx[slot] = b;
                let t = self.get(&idx);
                if !t.is_zero() {
                    acc += coeff * t;
                }
            }
            acc
        })
    }

    pub fn is_alternating_in(&self, slots: &[usize]) -> bool {
        slots.windows(2).all(|w| {
            let swapped = self.swap_slots(w[0], w[1]);
            swapped.data.iter().zip(&self.data).all(|(a, b)| -a.clone() == *b)
        })
    }

    pub fn is_symmetric_in(&self, slots: &[usize]) -> bool {
        slots.windows(2).all(|w| {
            let swapped = self.swap_slots(w[0], w[1]);
            swapped.data == self.data
        })
    }

    /// Attach a symmetry claim, verifying it first.
    pub fn with_tag(mut self, tag: SymTag) -> Result<DenseTensor, TensorError> {
        let ok = match &tag {
            SymTag::None => true,
            SymTag::Alternating(slots) => self.is_alternating_in(slots),
            SymTag::Symmetric(slots) => self.is_symmetric_in(slots),
        };
        if !ok {
            let (index, value) = self.witness_for_tag(&tag);
            let claim = match &tag {
                SymTag::Alternating(s) => format!("alternating{:?}", one_based(s)),
                SymTag::Symmetric(s) => format!("symmetric{:?}", one_based(s)),
                SymTag::None => unreachable!(),
            };
            return Err(TensorError::SymmetryViolation { claim, index: one_based(&index), value });
        }
        self.tag = tag;
        Ok(self)
    }

    fn witness_for_tag(&self, tag: &SymTag) -> (Vec<usize>, String) {
        let slots = match tag {
            SymTag::Alternating(s) | SymTag::Symmetric(s) => s.clone(),
            SymTag::None => vec![],
        };
        for w in slots.windows(2) {
            let swapped = self.swap_slots(w[0], w[1]);
            let delta = match tag {
                SymTag::Alternating(_) => swapped.add(self),
                _ => swapped.sub(self),
            };
            if let Some((idx, v)) = delta.first_nonzero() {
                return (idx, fmt_q(&v));
            }
        }
        (vec![], String::new())
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&i| i + 1).collect()
}

pub struct MultiIndexIter {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    fn new(shape: Vec<usize>) -> Self {
        let empty = shape.iter().any(|&d| d == 0);
        let start = vec![0usize; shape.len()];
        MultiIndexIter { shape, next: if empty { None } else { Some(start) } }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.clone()?;
        let mut n = cur.clone();
        let mut done = true;
        for k in (0..self.shape.len()).rev() {
            n[k] += 1;
            if n[k] < self.shape[k] {
                done = false;
                break;
            }
            n[k] = 0;
        }
        if self.shape.is_empty() {
            done = true;
        }
        self.next = if done { None } else { Some(n) };
        Some(cur)
    }
}

/// Cyclic sum over the first three slots:
/// Bi(T)(v1,v2,v3,...) = T(v1,v2,v3,...) + T(v2,v3,v1,...) + T(v3,v1,v2,...).
///
/// If the input is tagged alternating in slots {2,3} (1-based), the output is
/// checked to be alternating in slots {1,2,3} and tagged accordingly.
pub fn bianchator(t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    let shape = t.shape();
    if shape.len() < 3 || shape[0] != shape[1] || shape[1] != shape[2] {
        return Err(TensorError::UnequalSlots { slots: vec![1, 2, 3], shape: shape.to_vec() });
    }
    let mut perm: Vec<usize> = (0..shape.len()).collect();
    perm[0] = 1;
    perm[1] = 2;
    perm[2] = 0;
    let cyc1 = t.permute(&perm);
    perm[0] = 2;
    perm[1] = 0;
    perm[2] = 1;
    let cyc2 = t.permute(&perm);
    let out = t.add(&cyc1).add(&cyc2);
    if matches!(t.tag(), SymTag::Alternating(slots) if slots.contains(&1) && slots.contains(&2)) {
        return out.with_tag(SymTag::Alternating(vec![0, 1, 2]));
    }
    Ok(out)
}

/// Antisymmetrization of two slots: ½(T(..vi..vj..) − T(..vj..vi..)).
pub fn alt(t: &DenseTensor, i: usize, j: usize) -> DenseTensor {
    t.sub(&t.swap_slots(i, j)).scale(&qr(1, 2))
}

/// H²(X,Y,Z,W) = g(H(X,Y), H(Z,W)) for an alternating three-tensor H, where
/// H(X,Y) is the g-dual vector of H(X,Y,·).
pub fn square_form(h: &DenseTensor, g: &Metric) -> DenseTensor {
    let n = g.dim();
    assert_eq!(h.shape(), &[n, n, n]);
    // H with the last slot raised: Hup[a][b][e] = Σ_c H[a][b][c] g^{ce}
    let hup = h.contract_slot(2, &g.inv.transpose());
    DenseTensor::from_fn(&[n, n, n, n], |idx| {
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = qzero();
        for e in 0..n {
            let x = hup.get(&[a, b, e]);
            if x.is_zero() {
                continue;
            }
            let y = h.get(&[c, d, e]);
            if !y.is_zero() {
                acc += x * y;
            }
        }
        acc
    })
}

/// F²(X,Y,Z,W) = ⟨F(X,Y), F(Z,W)⟩ for a fiber-valued two-form F (stored
/// [n,n,m]) and fiber pairing ⟨,⟩ (m×m).
pub fn square_f(f: &DenseTensor, pairing: &Mat) -> DenseTensor {
    let n = f.shape()[0];
    let m = pairing.rows;
    assert_eq!(f.shape(), &[n, n, m]);
    let fp = f.contract_slot(2, pairing); // fp[a][b][r] = Σ_s F[a][b][s] ⟨r,s⟩
    DenseTensor::from_fn(&[n, n, n, n], |idx| {
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = qzero();
        for r in 0..m {
            let x = fp.get(&[a, b, r]);
            if x.is_zero() {
                continue;
            }
            let y = f.get(&[c, d, r]);
            if !y.is_zero() {
                acc += x * y;
            }
        }
        acc
    })
}

/// ‖H‖² = Σ_{j,k} ‖H(E_j, E_k)‖², the full ordered double sum; computed as
/// the frame-independent triple contraction with g⁻¹ on every slot.
pub fn hs_norm_sq(h: &DenseTensor, g: &Metric) -> Q {
    let n = g.dim();
    assert_eq!(h.shape(), &[n, n, n]);
    let up = h
        .contract_slot(0, &g.inv.transpose())
        .contract_slot(1, &g.inv.transpose())
        .contract_slot(2, &g.inv.transpose());
    let mut acc = qzero();
    for idx in h.indices() {
        let a = h.get(&idx);
        if a.is_zero() {
            continue;
        }
        let b = up.get(&idx);
        if !b.is_zero() {
            acc += a * b;
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryConstraint {
    Symmetric(Vec<usize>),
    Alternating(Vec<usize>),
}

/// Canonicalize a multi-index under the constraint groups: sort each group's
/// slots ascending. Returns the canonical index and the coefficient relating
/// the basis tensor's value at `idx` to its value at the canonical index
/// (0 for repeated indices in an alternating group).
fn canonicalize(
    idx: &[usize],
    constraints: &[SymmetryConstraint],
) -> Option<(Vec<usize>, i32)> {
    let mut out = idx.to_vec();
    let mut coeff = 1i32;
    for c in constraints {
        match c {
            SymmetryConstraint::Symmetric(slots) => {
                let mut vals: Vec<usize> = slots.iter().map(|&s| out[s]).collect();
                vals.sort_unstable();
                for (k, &s) in slots.iter().enumerate() {
                    out[s] = vals[k];
                }
            }
            SymmetryConstraint::Alternating(slots) => {
                let mut vals: Vec<usize> = slots.iter().map(|&s| out[s]).collect();
                // repeated index in an alternating group: component vanishes
                let mut sorted = vals.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return None;
                }
                // parity of the sort
                let mut sign = 1i32;
                for a in 0..vals.len() {
                    for b in a + 1..vals.len() {
                        if vals[a] > vals[b] {
                            vals.swap(a, b);
                            sign = -sign;
                        }
                    }
                }
                coeff *= sign;
                for (k, &s) in slots.iter().enumerate() {
                    out[s] = vals[k];
                }
            }
        }
    }
    Some((out, coeff))
}

fn validate_constraints(
    arity: usize,
    constraints: &[SymmetryConstraint],
) -> Result<(), TensorError> {
    let mut seen = vec![false; arity];
    for c in constraints {
        let slots = match c {
            SymmetryConstraint::Symmetric(s) | SymmetryConstraint::Alternating(s) => s,
        };
        for &s in slots {
            assert!(s < arity, "constraint slot out of range");
            if seen[s] {
                return Err(TensorError::OverlappingGroups { slot: s + 1 });
            }
            seen[s] = true;
        }
    }
    Ok(())
}

/// Basis of the symmetry-constrained subspace of covariant `arity`-tensors
/// on `alg` that are infinitesimally invariant under the adjoint action:
/// Σ_s T(v1, …, [x, v_s], …, v_arity) = 0 for every basis x.
///
/// The basis is deterministic: canonical representatives in lexicographic
/// order, kernels through RREF with left-to-right pivoting.
pub fn invariant_subspace(
    alg: &LieAlgebra,
    arity: usize,
    constraints: &[SymmetryConstraint],
) -> Result<Vec<DenseTensor>, TensorError> {
    validate_constraints(arity, constraints)?;
    let n = alg.dim;
    let (reps, pos) = canonical_reps(n, arity, constraints);
    let d = reps.len();
    if d == 0 {
        return Ok(Vec::new());
    }

    // current subspace: columns of `basis` are coefficient vectors over reps
    let mut basis = Mat::identity(d);
    for x in 0..n {
        if basis.cols == 0 {
            break;
        }
        let rho = rho_matrix(alg, x, &reps, &pos, constraints);
        let restricted = rho.mul(&basis);
        let kern = restricted.kernel_basis();
        let mut next = Mat::zeros(d, kern.len());
        for (col, coeffs) in kern.iter().enumerate() {
            for row in 0..d {
                let mut acc = qzero();
                for (b, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() && !basis[(row, b)].is_zero() {
                        acc += c * &basis[(row, b)];
                    }
                }
                next[(row, col)] = acc;
            }
        }
        basis = next;
    }

    let mut out = Vec::new();
    for col in 0..basis.cols {
        let coeffs: Vec<Q> = (0..d).map(|r| basis[(r, col)].clone()).collect();
        out.push(expand_class_vector(n, arity, constraints, &reps, &pos, &coeffs));
    }
    Ok(out)
}

/// Deterministic basis of the full symmetry-constrained subspace of
/// covariant `arity`-tensors on an `n`-dimensional space: one tensor per
/// canonical representative, in lexicographic representative order.
pub fn constrained_basis(
    n: usize,
    arity: usize,
    constraints: &[SymmetryConstraint],
) -> Result<Vec<DenseTensor>, TensorError> {
    validate_constraints(arity, constraints)?;
    let (reps, pos) = canonical_reps(n, arity, constraints);
    let d = reps.len();
    Ok((0..d)
        .map(|k| {
            let mut coeffs = vec![qzero(); d];
            coeffs[k] = qr(1, 1);
            expand_class_vector(n, arity, constraints, &reps, &pos, &coeffs)
        })
        .collect())
}

/// All canonical representatives (group slots sorted, alternating strict),
/// in lexicographic order, plus a position lookup.
fn canonical_reps(
    n: usize,
    arity: usize,
    constraints: &[SymmetryConstraint],
) -> (Vec<Vec<usize>>, BTreeMap<Vec<usize>, usize>) {
    let shape = vec![n; arity];
    let mut reps = Vec::new();
    let mut pos = BTreeMap::new();
    for idx in MultiIndexIter::new(shape) {
        match canonicalize(&idx, constraints) {
            Some((canon, _)) if canon == idx => {
                pos.insert(idx.clone(), reps.len());
                reps.push(idx);
            }
            _ => {}
        }
    }
    (reps, pos)
}

/// Matrix of T ↦ Σ_s T(…, [e_x, ·_s], …) on the constrained subspace in the
/// canonical-representative coordinates.
fn rho_matrix(
    alg: &LieAlgebra,
    x: usize,
    reps: &[Vec<usize>],
    pos: &BTreeMap<Vec<usize>, usize>,
    constraints: &[SymmetryConstraint],
) -> Mat {
    let n = alg.dim;
    let mut m = Mat::zeros(reps.len(), reps.len());
    for (u, rep) in reps.iter().enumerate() {
        for s in 0..rep.len() {
            for l in 0..n {
                let c = alg.c(x, rep[s], l);
                if c.is_zero() {
                    continue;
                }
                let mut j = rep.clone();
                j[s] = l;
                if let Some((canon, coeff)) = canonicalize(&j, constraints) {
                    let t = pos[&canon];
                    let add = c * qi(coeff as i64);
                    m[(u, t)] = &m[(u, t)] + &add;
                }
            }
        }
    }
    m
}

fn expand_class_vector(
    n: usize,
    arity: usize,
    constraints: &[SymmetryConstraint],
    _reps: &[Vec<usize>],
    pos: &BTreeMap<Vec<usize>, usize>,
    coeffs: &[Q],
) -> DenseTensor {
    DenseTensor::from_fn(&vec![n; arity], |idx| match canonicalize(idx, constraints) {
        Some((canon, sign)) => &coeffs[pos[&canon]] * qi(sign as i64),
        None => qzero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    fn e3_form() -> DenseTensor {
        // volume-type form on dim 3: ε_{ijk}
        DenseTensor::from_fn(&[3, 3, 3], |i| {
            let (a, b, c) = (i[0] as i64, i[1] as i64, i[2] as i64);
            qi(((b - a) * (c - b) * (c - a)).signum())
        })
    }

    #[test]
    fn permute_and_swap() {
        let t = DenseTensor::from_fn(&[2, 3], |i| qi((i[0] * 10 + i[1]) as i64));
        let s = t.permute(&[1, 0]);
        assert_eq!(s.shape(), &[3, 2]);
        assert_eq!(s.get(&[2, 1]), t.get(&[1, 2]));
    }

    #[test]
    fn bianchator_of_three_form_is_triple() {
        let h = e3_form();
        let bi = bianchator(&h).unwrap();
        for idx in h.indices() {
            assert_eq!(bi.get(&idx).clone(), h.get(&idx) * qi(3));
        }
    }

    #[test]
    fn bianchator_tags_alternating_output() {
        // B = e1* ⊗ (e1* ∧ e2*) on dim 3, alternating in the last two slots
        let mut b = DenseTensor::zeros(&[3, 3, 3]);
        b.set(&[0, 0, 1], qi(1));
        b.set(&[0, 1, 0], qi(-1));
        let b = b.with_tag(SymTag::Alternating(vec![1, 2])).unwrap();
        let bi = bianchator(&b).unwrap();
        assert!(bi.is_zero());
        assert_eq!(bi.tag(), &SymTag::Alternating(vec![0, 1, 2]));
    }

    #[test]
    fn alt_splits_antisymmetric_part() {
        // T(0,1)=1, T(1,0)=2
        let t = DenseTensor::from_fn(&[2, 2], |i| qi((i[0] * 2 + i[1]) as i64));
        let a = alt(&t, 0, 1);
        assert_eq!(a.get(&[0, 1]).clone(), qr(-1, 2));
        assert_eq!(a.get(&[1, 0]).clone(), qr(1, 2));
        assert!(a.get(&[0, 0]).is_zero());
        assert!(a.is_alternating_in(&[0, 1]));
    }

    #[test]
    fn tag_validation_rejects_false_claims() {
        let t = DenseTensor::from_fn(&[2, 2], |i| qi((i[0] + 2 * i[1]) as i64));
        assert!(t.clone().with_tag(SymTag::Symmetric(vec![0, 1])).is_err());
        let sym = DenseTensor::from_fn(&[2, 2], |i| qi((i[0] + i[1]) as i64));
        assert!(sym.with_tag(SymTag::Symmetric(vec![0, 1])).is_ok());
    }

    #[test]
    fn square_form_identity_metric_volume() {
        let h = e3_form();
        let g = Metric::new(Mat::identity(3)).unwrap();
        let h2 = square_form(&h, &g);
        // H(e1,e2)=e3 so H²(e1,e2,e1,e2) = 1
        assert_eq!(h2.get(&[0, 1, 0, 1]).clone(), qi(1));
        assert_eq!(h2.get(&[0, 1, 1, 0]).clone(), qi(-1));
        assert_eq!(h2.get(&[0, 1, 0, 2]).clone(), qi(0));
        // pair symmetry
        for idx in h2.indices() {
            let swapped = [idx[2], idx[3], idx[0], idx[1]];
            assert_eq!(h2.get(&idx), h2.get(&swapped));
        }
    }

    #[test]
    fn hs_norm_of_volume_is_six() {
        let h = e3_form();
        let g = Metric::new(Mat::identity(3)).unwrap();
        assert_eq!(hs_norm_sq(&h, &g), qi(6));
        // orthonormal-frame double-sum reading agrees
        let mut double_sum = qzero();
        for j in 0..3 {
            for k in 0..3 {
                for c in 0..3 {
                    let v = h.get(&[j, k, c]);
                    double_sum += v * v;
                }
            }
        }
        assert_eq!(double_sum, qi(6));
    }

    #[test]
    fn invariant_subspaces_of_su2_have_known_dimensions() {
        let alg = LieAlgebra::su2();
        let s3 = invariant_subspace(&alg, 3, &[SymmetryConstraint::Symmetric(vec![0, 1, 2])])
            .unwrap();
        assert_eq!(s3.len(), 0);
        let s2v = invariant_subspace(&alg, 3, &[SymmetryConstraint::Symmetric(vec![0, 1])])
            .unwrap();
        assert_eq!(s2v.len(), 0);
        let v_wedge2 =
            invariant_subspace(&alg, 3, &[SymmetryConstraint::Alternating(vec![1, 2])]).unwrap();
        assert_eq!(v_wedge2.len(), 1);
        let wedge3 =
            invariant_subspace(&alg, 3, &[SymmetryConstraint::Alternating(vec![0, 1, 2])])
                .unwrap();
        assert_eq!(wedge3.len(), 1);
        // the alternating invariant is a multiple of the volume form
        let w = &wedge3[0];
        let v = e3_form();
        let scale = w.get(&[0, 1, 2]).clone();
        assert!(!scale.is_zero());
        assert_eq!(w.data, v.scale(&scale).data);
    }

    #[test]
    fn invariant_symmetric_two_tensors_of_su2_are_multiples_of_identity() {
        let alg = LieAlgebra::su2();
        let basis =
            invariant_subspace(&alg, 2, &[SymmetryConstraint::Symmetric(vec![0, 1])]).unwrap();
        assert_eq!(basis.len(), 1);
        let b = &basis[0];
        assert_eq!(b.get(&[0, 0]), b.get(&[1, 1]));
        assert_eq!(b.get(&[0, 0]), b.get(&[2, 2]));
        assert!(b.get(&[0, 1]).is_zero());
        assert!(!b.get(&[0, 0]).is_zero());
    }

    #[test]
    fn invariance_really_means_annihilated_by_every_generator() {
        let alg = LieAlgebra::su2();
        let basis =
            invariant_subspace(&alg, 3, &[SymmetryConstraint::Alternating(vec![1, 2])]).unwrap();
        let t = &basis[0];
        for x in 0..3 {
            for idx in t.indices() {
                // Σ_s T(..., [e_x, e_{i_s}], ...) over all slots
                let mut acc = qzero();
                for s in 0..3 {
                    for l in 0..3 {
                        let c = alg.c(x, idx[s], l);
                        if c.is_zero() {
                            continue;
                        }
                        let mut j = idx.clone();
                        j[s] = l;
                        acc += c * t.get(&j);
                    }
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn overlapping_constraint_groups_are_rejected() {
        let alg = LieAlgebra::su2();
        let err = invariant_subspace(
            &alg,
            3,
            &[
                SymmetryConstraint::Symmetric(vec![0, 1]),
                SymmetryConstraint::Alternating(vec![1, 2]),
            ],
        )
        .unwrap_err();
        assert_eq!(err, TensorError::OverlappingGroups { slot: 2 });
    }

    #[test]
    fn hs_norm_scales_with_inverse_metric() {
        let h = e3_form();
        let g4 = Metric::new(Mat::identity(3).scale(&qi(4))).unwrap();
        // each of the six unit components picks up (1/4) from every slot
        assert_eq!(hs_norm_sq(&h, &g4), qr(6, 64));
    }
}
