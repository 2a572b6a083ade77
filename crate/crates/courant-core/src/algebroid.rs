//! The transitive Courant algebroid TM ⊕ ad P over a Lie group, written in
//! the left-invariant frame. The data is a quadruple (g, H, ω, F) over a
//! base Lie algebra and a fiber Lie algebra with invariant pairing. All
//! sections handled here are invariant (constant coefficients), which makes
//! the Dorfman bracket an algebraic operation.

use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::{Mat, Metric, MetricError};
use crate::rat::{fmt_q, qi, qr, qzero, Q};
use crate::tensor::{bianchator, square_f, DenseTensor, SymTag, TensorError};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("base algebra: {0}")]
    Base(#[from] LieError),
    #[error("metric: {0}")]
    Metric(#[from] MetricError),
    #[error("metric is {got}x{got}, base dimension is {dim}")]
    MetricDim { got: usize, dim: usize },
    #[error("three-form: {0}")]
    Form(#[from] TensorError),
    #[error("fiber algebra of dimension {dim} has no pairing attached")]
    FiberPairingMissing { dim: usize },
    #[error("omega supplies {got} matrices, expected one per base direction ({expected})")]
    OmegaCount { expected: usize, got: usize },
    #[error("omega[{x}] is {rows}x{cols}, expected {m}x{m}")]
    OmegaShape { x: usize, rows: usize, cols: usize, m: usize },
    #[error(
        "omega is not compatible with the fiber pairing: <ω_e{x} f{r}, f{s}> + <f{r}, ω_e{x} f{s}> = {residual}"
    )]
    OmegaNotMetric { x: usize, r: usize, s: usize, residual: String },
    #[error(
        "omega is not a derivation of the fiber bracket at (e{x}; f{r}, f{s}), component f{t}: residual {residual}"
    )]
    OmegaNotDerivation { x: usize, r: usize, s: usize, t: usize, residual: String },
    #[error(
        "curvature of omega differs from ad of F on (e{x}, e{y}): matrix entry ({r},{s}) residual {residual}"
    )]
    CurvatureCondition { x: usize, y: usize, r: usize, s: usize, residual: String },
    #[error("dH = <F ∧ F> fails at index {index:?}: residual {residual}")]
    BianchiFailure { index: Vec<usize>, residual: String },
}

pub struct FiberBlock {
    pub algebra: LieAlgebra,
    /// One m×m matrix per base basis direction; ω_x f_b = Σ_a omega[x][a][b] f_a.
    pub omega: Vec<Mat>,
    /// F stored [n, n, m], alternating in the two base slots.
    pub f: DenseTensor,
}

/// Invariant model of a transitive Courant algebroid. A section is
/// X + α + r with X a vector, α a covector, r a fiber element; the split
/// pairing is ⟨X+α+r, Y+β+s⟩ = ½(β(X) + α(Y)) + ⟨r,s⟩.
#[derive(Clone, Debug)]
pub struct CourantModel {
    pub name: String,
    pub base: LieAlgebra,
    pub metric: Metric,
    pub h: DenseTensor,
    pub fiber: LieAlgebra,
    pub omega: Vec<Mat>,
    pub f: DenseTensor,
}

impl CourantModel {
    pub fn new(
        name: &str,
        base: LieAlgebra,
        metric: Mat,
        h: DenseTensor,
        fiber: Option<FiberBlock>,
    ) -> Result<Self, ModelError> {
        let n = base.dim;
        if metric.rows != n || metric.cols != n {
            return Err(ModelError::MetricDim { got: metric.rows, dim: n });
        }
        let metric = Metric::new(metric)?;
        if h.shape() != [n, n, n] {
            return Err(ModelError::Form(TensorError::ShapeMismatch {
                shape: h.shape().to_vec(),
                expected: vec![n, n, n],
            }));
        }
        let h = h.with_tag(SymTag::Alternating(vec![0, 1, 2]))?;

        let (fiber, omega, f) = match fiber {
            None => {
                let algebra = LieAlgebra::abelian(0);
                (algebra, vec![Mat::zeros(0, 0); n], DenseTensor::zeros(&[n, n, 0]))
            }
            Some(block) => {
                let m = block.algebra.dim;
                if m > 0 && block.algebra.pairing.is_none() {
                    return Err(ModelError::FiberPairingMissing { dim: m });
                }
                if block.omega.len() != n {
                    return Err(ModelError::OmegaCount { expected: n, got: block.omega.len() });
                }
                for (x, w) in block.omega.iter().enumerate() {
                    if w.rows != m || w.cols != m {
                        return Err(ModelError::OmegaShape {
                            x: x + 1,
                            rows: w.rows,
                            cols: w.cols,
                            m,
                        });
                    }
                }
                if block.f.shape() != [n, n, m] {
                    return Err(ModelError::Form(TensorError::ShapeMismatch {
                        shape: block.f.shape().to_vec(),
                        expected: vec![n, n, m],
                    }));
                }
                let f = block.f.with_tag(SymTag::Alternating(vec![0, 1]))?;
                (block.algebra, block.omega, f)
            }
        };

        let model = CourantModel { name: name.to_string(), base, metric, h, fiber, omega, f };
        model.check_omega_metric()?;
        model.check_omega_derivation()?;
        model.check_curvature_condition()?;
        model.check_bianchi()?;
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.base.dim
    }

    pub fn m(&self) -> usize {
        self.fiber.dim
    }

    pub fn fiber_pairing(&self) -> Option<&Metric> {
        self.fiber.pairing.as_ref()
    }

    fn pairing_mat(&self) -> Mat {
        match &self.fiber.pairing {
            Some(p) => p.mat.clone(),
            None => Mat::zeros(0, 0),
        }
    }

    fn check_omega_metric(&self) -> Result<(), ModelError> {
        let m = self.m();
        if m == 0 {
            return Ok(());
        }
        let p = &self.fiber.pairing.as_ref().expect("validated").mat;
        for (x, w) in self.omega.iter().enumerate() {
            // ωᵀ P + P ω = 0
            let lhs = w.transpose().mul(p).add(&p.mul(w));
            for r in 0..m {
                for s in 0..m {
                    if !lhs[(r, s)].is_zero() {
                        return Err(ModelError::OmegaNotMetric {
                            x: x + 1,
                            r: r + 1,
                            s: s + 1,
                            residual: fmt_q(&lhs[(r, s)]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_omega_derivation(&self) -> Result<(), ModelError> {
        let m = self.m();
        for (x, w) in self.omega.iter().enumerate() {
            for r in 0..m {
                for s in 0..m {
                    // ω_x [f_r, f_s] - [ω_x f_r, f_s] - [f_r, ω_x f_s]
                    for t in 0..m {
                        let mut res = qzero();
                        for l in 0..m {
                            res += &w[(t, l)] * self.fiber.c(r, s, l);
                            res -= &w[(l, r)] * self.fiber.c(l, s, t);
                            res -= self.fiber.c(r, l, t) * &w[(l, s)];
                        }
                        if !res.is_zero() {
                            return Err(ModelError::OmegaNotDerivation {
                                x: x + 1,
                                r: r + 1,
                                s: s + 1,
                                t: t + 1,
                                residual: fmt_q(&res),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_curvature_condition(&self) -> Result<(), ModelError> {
        let n = self.n();
        let m = self.m();
        for x in 0..n {
            for y in x + 1..n {
                // [ω_x, ω_y] - ω_{[x,y]} = ad_{F(x,y)}
                let mut lhs = self.omega[x].mul(&self.omega[y]).sub(&self.omega[y].mul(&self.omega[x]));
                for l in 0..n {
                    let c = self.base.c(x, y, l);
                    if !c.is_zero() {
                        lhs = lhs.sub(&self.omega[l].scale(c));
                    }
                }
                let mut ad_f = Mat::zeros(m, m);
                for r in 0..m {
                    let coeff = self.f.get(&[x, y, r]);
                    if !coeff.is_zero() {
                        ad_f = ad_f.add(&self.fiber.ad(r).scale(coeff));
                    }
                }
                let delta = lhs.sub(&ad_f);
                for r in 0..m {
                    for s in 0..m {
                        if !delta[(r, s)].is_zero() {
                            return Err(ModelError::CurvatureCondition {
                                x: x + 1,
                                y: y + 1,
                                r: r + 1,
                                s: s + 1,
                                residual: fmt_q(&delta[(r, s)]),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_bianchi(&self) -> Result<(), ModelError> {
        let dh = self.base.ce_differential(&self.h, None).expect("H is alternating");
        let ff = if self.m() == 0 {
            DenseTensor::zeros(&[self.n(), self.n(), self.n(), self.n()])
        } else {
            let f2 = square_f(&self.f, &self.pairing_mat());
            bianchator(&f2).expect("F² has three equal leading slots").scale(&qr(2, 1))
        };
        let delta = dh.sub(&ff);
        if let Some((index, residual)) = delta.first_nonzero() {
            return Err(ModelError::BianchiFailure {
                index: index.iter().map(|&i| i + 1).collect(),
                residual: fmt_q(&residual),
            });
        }
        Ok(())
    }

    /// ω_X for a base vector X in coordinates.
    pub fn omega_of(&self, x: &[Q]) -> Mat {
        let m = self.m();
        let mut out = Mat::zeros(m, m);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                out = out.add(&self.omega[i].scale(xi));
            }
        }
        out
    }

    /// F(X, Y) as a fiber vector.
    pub fn f_of(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let m = self.m();
        let mut out = vec![qzero(); m];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let w = xi * yj;
                for (r, out_r) in out.iter_mut().enumerate() {
                    let c = self.f.get(&[i, j, r]);
                    if !c.is_zero() {
                        *out_r += &w * c;
                    }
                }
            }
        }
        out
    }

    /// The endomorphism F_{f_r} of the base defined by g(F_r X, Y) = ⟨F(X,Y), f_r⟩.
    pub fn f_endo(&self, r: usize) -> Mat {
        let n = self.n();
        let p = self.pairing_mat();
        // K[b][c] = ⟨F(e_b, e_c), f_r⟩
        let k = Mat::from_fn(n, n, |b, c| {
            let mut acc = qzero();
            for s in 0..self.m() {
                let fv = self.f.get(&[b, c, s]);
                if !fv.is_zero() {
                    acc += fv * &p[(s, r)];
                }
            }
            acc
        });
        self.metric.inv.mul(&k.transpose())
    }

    pub fn zero_section(&self) -> Section {
        Section {
            vec: vec![qzero(); self.n()],
            cov: vec![qzero(); self.n()],
            fib: vec![qzero(); self.m()],
        }
    }

    /// X⁺ = X + g(X): the plus eigenbundle lift.
    pub fn lift_plus(&self, x: &[Q]) -> Section {
        Section { vec: x.to_vec(), cov: self.metric.lower(x), fib: vec![qzero(); self.m()] }
    }

    /// X⁻ = X − g(X): the minus eigenbundle lift.
    pub fn lift_minus(&self, x: &[Q]) -> Section {
        Section {
            vec: x.to_vec(),
            cov: self.metric.lower(x).iter().map(|q| -q.clone()).collect(),
            fib: vec![qzero(); self.m()],
        }
    }

    pub fn lift_fiber(&self, r: &[Q]) -> Section {
        Section { vec: vec![qzero(); self.n()], cov: vec![qzero(); self.n()], fib: r.to_vec() }
    }

    /// α⁺ = g⁻¹α + α: the plus eigenbundle lift of a covector.
    pub fn lift_cov_plus(&self, alpha: &[Q]) -> Section {
        Section {
            vec: self.metric.raise(alpha),
            cov: alpha.to_vec(),
            fib: vec![qzero(); self.m()],
        }
    }

    /// α⁻ = g⁻¹α − α: the minus eigenbundle lift of a covector.
    pub fn lift_cov_minus(&self, alpha: &[Q]) -> Section {
        Section {
            vec: self.metric.raise(alpha),
            cov: alpha.iter().map(|q| -q.clone()).collect(),
            fib: vec![qzero(); self.m()],
        }
    }

    /// a₊ = ½(1 + 𝒢)a: projection onto the plus eigenbundle.
    pub fn project_plus(&self, a: &Section) -> Section {
        a.add(&self.endo_g(a)).scale(&qr(1, 2))
    }

    /// a₋ = ½(1 − 𝒢)a: projection onto the minus eigenbundle.
    pub fn project_minus(&self, a: &Section) -> Section {
        a.sub(&self.endo_g(a)).scale(&qr(1, 2))
    }

    /// ⟨a, b⟩ in the split form.
    pub fn pairing_e(&self, a: &Section, b: &Section) -> Q {
        let mut acc = qzero();
        for i in 0..self.n() {
            acc += &(&a.cov[i] * &b.vec[i] + &a.vec[i] * &b.cov[i]) * qr(1, 2);
        }
        if self.m() > 0 {
            let p = &self.fiber.pairing.as_ref().expect("fiber pairing").mat;
            for r in 0..self.m() {
                for s in 0..self.m() {
                    if !p[(r, s)].is_zero() {
                        acc += &a.fib[r] * &p[(r, s)] * &b.fib[s];
                    }
                }
            }
        }
        acc
    }

    /// The generalized metric endomorphism: X+α+r ↦ g⁻¹α + gX − r.
    pub fn endo_g(&self, a: &Section) -> Section {
        Section {
            vec: self.metric.raise(&a.cov),
            cov: self.metric.lower(&a.vec),
            fib: a.fib.iter().map(|q| -q.clone()).collect(),
        }
    }

    /// Split a section into (plus part, minus part, fiber part) where the
    /// V± parts are reported as base vectors: a = x⁺ lifted plus + x⁻ lifted
    /// minus + fiber.
    pub fn split(&self, a: &Section) -> (Vec<Q>, Vec<Q>, Vec<Q>) {
        let ga = self.metric.raise(&a.cov);
        let half = qr(1, 2);
        let plus: Vec<Q> = (0..self.n()).map(|i| (&a.vec[i] + &ga[i]) * &half).collect();
        let minus: Vec<Q> = (0..self.n()).map(|i| (&a.vec[i] - &ga[i]) * &half).collect();
        (plus, minus, a.fib.clone())
    }

    pub fn assemble(&self, plus: &[Q], minus: &[Q], fib: &[Q]) -> Section {
        let gp = self.metric.lower(plus);
        let gm = self.metric.lower(minus);
        Section {
            vec: plus.iter().zip(minus).map(|(a, b)| a + b).collect(),
            cov: gp.iter().zip(&gm).map(|(a, b)| a - b).collect(),
            fib: fib.to_vec(),
        }
    }

    /// Dorfman bracket of invariant sections.
    pub fn dorfman(&self, a: &Section, b: &Section) -> Section {
        let n = self.n();
        let m = self.m();
        let x = &a.vec;
        let alpha = &a.cov;
        let r = &a.fib;
        let y = &b.vec;
        let beta = &b.cov;
        let s = &b.fib;

        let vec = self.base.bracket_vec(x, y);

        let p = self.pairing_mat();
        let pr: Vec<Q> = (0..m)
            .map(|u| (0..m).map(|v| &p[(u, v)] * &r[v]).sum::<Q>())
            .collect();
        let ps: Vec<Q> = (0..m)
            .map(|u| (0..m).map(|v| &p[(u, v)] * &s[v]).sum::<Q>())
            .collect();

        let mut cov = vec![qzero(); n];
        for (z, cov_z) in cov.iter_mut().enumerate() {
            let mut acc = qzero();
            // −β([X, e_z]) + α([Y, e_z])
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for l in 0..n {
                    let c = self.base.c(i, z, l);
                    if !c.is_zero() {
                        acc -= xi * c * &beta[l];
                    }
                }
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                for l in 0..n {
                    let c = self.base.c(j, z, l);
                    if !c.is_zero() {
                        acc += yj * c * &alpha[l];
                    }
                }
            }
            // + H(X, Y, e_z)
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (j, yj) in y.iter().enumerate() {
                    if yj.is_zero() {
                        continue;
                    }
                    let hv = self.h.get(&[i, j, z]);
                    if !hv.is_zero() {
                        acc += xi * yj * hv;
                    }
                }
            }
            // − 2⟨F(X, e_z), s⟩ + 2⟨F(Y, e_z), r⟩
            //
            // Weight 2 on all three fiber couplings (here and the ω term
            // below): the fiber block of the pairing carries no ½, unlike
            // the vector/covector block, and invariance of the pairing
            // under the bracket forces the compensating factor.
            let two = qi(2);
            for u in 0..m {
                if ps[u].is_zero() && pr[u].is_zero() {
                    continue;
                }
                for (i, xi) in x.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    let fv = self.f.get(&[i, z, u]);
                    if !fv.is_zero() {
                        acc -= xi * fv * &ps[u] * &two;
                    }
                }
                for (j, yj) in y.iter().enumerate() {
                    if yj.is_zero() {
                        continue;
                    }
                    let fv = self.f.get(&[j, z, u]);
                    if !fv.is_zero() {
                        acc += yj * fv * &pr[u] * &two;
                    }
                }
            }
            // + 2⟨ω_{e_z} r, s⟩
            if m > 0 {
                let w = &self.omega[z];
                for u in 0..m {
                    if ps[u].is_zero() {
                        continue;
                    }
                    for v in 0..m {
                        if !w[(u, v)].is_zero() && !r[v].is_zero() {
                            acc += &w[(u, v)] * &r[v] * &ps[u] * &two;
                        }
                    }
                }
            }
            *cov_z = acc;
        }

        // fiber: F(X,Y) + ω_X s − ω_Y r + [r, s]
        let mut fib = self.f_of(x, y);
        if m > 0 {
            let wx = self.omega_of(x);
            let wy = self.omega_of(y);
            let ws = wx.mul_vec(s);
            let wr = wy.mul_vec(r);
            let rs = self.fiber.bracket_vec(r, s);
            for u in 0..m {
                fib[u] = &fib[u] + &ws[u] - &wr[u] + &rs[u];
            }
        }
        Section { vec, cov, fib }
    }

    /// Labeled basis sections: base vectors, base covectors, fiber vectors.
    pub fn basis_sections(&self) -> Vec<(String, Section)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            let mut s = self.zero_section();
            s.vec[i] = crate::rat::qone();
            out.push((format!("e{}", i + 1), s));
        }
        for i in 0..self.n() {
            let mut s = self.zero_section();
            s.cov[i] = crate::rat::qone();
            out.push((format!("e{}*", i + 1), s));
        }
        for r in 0..self.m() {
            let mut s = self.zero_section();
            s.fib[r] = crate::rat::qone();
            out.push((format!("f{}", r + 1), s));
        }
        out
    }

    /// Check the Courant axioms on all triples of basis sections. For
    /// invariant sections every pairing is constant, so the right-hand
    /// sides of the invariance and symmetric-part axioms vanish.
    pub fn check_axioms(&self) -> Vec<AxiomViolation> {
        let basis = self.basis_sections();
        let mut out = Vec::new();
        for (la, a) in &basis {
            for (lb, b) in &basis {
                for (lc, c) in &basis {
                    let lhs = self.dorfman(a, &self.dorfman(b, c));
                    let rhs = self
                        .dorfman(&self.dorfman(a, b), c)
                        .add(&self.dorfman(b, &self.dorfman(a, c)));
                    let delta = lhs.sub(&rhs);
                    if !delta.is_zero() {
                        out.push(AxiomViolation {
                            axiom: "jacobi",
                            sections: vec![la.clone(), lb.clone(), lc.clone()],
                            residual: delta.to_string(),
                        });
                    }
                    let inv = self.pairing_e(&self.dorfman(a, b), c)
                        + self.pairing_e(b, &self.dorfman(a, c));
                    if !inv.is_zero() {
                        out.push(AxiomViolation {
                            axiom: "invariance",
                            sections: vec![la.clone(), lb.clone(), lc.clone()],
                            residual: fmt_q(&inv),
                        });
                    }
                }
                let sym = self.dorfman(a, b).add(&self.dorfman(b, a));
                if !sym.is_zero() {
                    out.push(AxiomViolation {
                        axiom: "symmetric_part",
                        sections: vec![la.clone(), lb.clone()],
                        residual: sym.to_string(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub vec: Vec<Q>,
    pub cov: Vec<Q>,
    pub fib: Vec<Q>,
}

impl Section {
    pub fn add(&self, other: &Section) -> Section {
        Section {
            vec: self.vec.iter().zip(&other.vec).map(|(a, b)| a + b).collect(),
            cov: self.cov.iter().zip(&other.cov).map(|(a, b)| a + b).collect(),
            fib: self.fib.iter().zip(&other.fib).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section {
            vec: self.vec.iter().zip(&other.vec).map(|(a, b)| a - b).collect(),
            cov: self.cov.iter().zip(&other.cov).map(|(a, b)| a - b).collect(),
            fib: self.fib.iter().zip(&other.fib).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Section {
        Section {
            vec: self.vec.iter().map(|a| a * s).collect(),
            cov: self.cov.iter().map(|a| a * s).collect(),
            fib: self.fib.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Section {
        Section {
            vec: self.vec.iter().map(|a| -a.clone()).collect(),
            cov: self.cov.iter().map(|a| -a.clone()).collect(),
            fib: self.fib.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vec.iter().all(Zero::is_zero)
            && self.cov.iter().all(Zero::is_zero)
            && self.fib.iter().all(Zero::is_zero)
    }
}

impl std::fmt::Display for Section {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        let mut push = |coeff: &Q, label: String| {
            if coeff.is_zero() {
                return;
            }
            if coeff == &crate::rat::qone() {
                terms.push(label);
            } else {
                terms.push(format!("{} {}", fmt_q(coeff), label));
            }
        };
        for (i, q) in self.vec.iter().enumerate() {
            push(q, format!("e{}", i + 1));
        }
        for (i, q) in self.cov.iter().enumerate() {
            push(q, format!("e{}*", i + 1));
        }
        for (r, q) in self.fib.iter().enumerate() {
            push(q, format!("f{}", r + 1));
        }
        if terms.is_empty() {
            return write!(out, "0");
        }
        write!(out, "{}", terms.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub sections: Vec<String>,
    pub residual: String,
}

/// Ready-made models shared by the test suites and the corpus generator.
pub mod samples {
    use super::{CourantModel, FiberBlock};
    use crate::liealg::LieAlgebra;
    use crate::linalg::Mat;
    use crate::rat::{qi, qzero};
    use crate::tensor::DenseTensor;

    /// su(2), g = Id, H = Cartan form, no fiber.
    pub fn su2_cartan() -> CourantModel {
        let base = LieAlgebra::su2();
        let h = base.cartan_form().unwrap();
        CourantModel::new("su2_cartan", base, Mat::identity(3), h, None).unwrap()
    }

    /// su(2), g = Id, H = 2·Cartan: breaks flatness of the whole family.
    pub fn su2_h2() -> CourantModel {
        let base = LieAlgebra::su2();
        let h = base.cartan_form().unwrap().scale(&qi(2));
        CourantModel::new("su2_h2", base, Mat::identity(3), h, None).unwrap()
    }

    /// su(2) with the generic metric diag(1,2,3) and the volume form.
    pub fn su2_diag123() -> CourantModel {
        let base = LieAlgebra::su2();
        let mut h = DenseTensor::zeros(&[3, 3, 3]);
        for (i, j, k, s) in
            [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)]
        {
            h.set(&[i, j, k], qi(s));
        }
        let g = Mat::from_fn(3, 3, |i, j| if i == j { qi(i as i64 + 1) } else { qzero() });
        CourantModel::new("su2_diag123", base, g, h, None).unwrap()
    }

    /// su(2) base with an su(2) fiber, ω = 0, F = 0.
    pub fn su2_cartan_fiber() -> CourantModel {
        let base = LieAlgebra::su2();
        let h = base.cartan_form().unwrap();
        let fiber = FiberBlock {
            algebra: LieAlgebra::su2(),
            omega: vec![Mat::zeros(3, 3); 3],
            f: DenseTensor::zeros(&[3, 3, 3]),
        };
        CourantModel::new("su2_cartan_fiber", base, Mat::identity(3), h, Some(fiber)).unwrap()
    }

    /// su(2) base and fiber with ω = 2 ad and F = 2[·,·]: the curvature
    /// condition holds with equality and dH = ⟨F∧F⟩ reduces to Jacobi.
    pub fn su2_twisted() -> CourantModel {
        let base = LieAlgebra::su2();
        let h = base.cartan_form().unwrap();
        let omega: Vec<Mat> = (0..3).map(|i| base.ad(i).scale(&qi(2))).collect();
        let f = base.bracket_tensor().scale(&qi(2));
        let fiber = FiberBlock { algebra: LieAlgebra::su2(), omega, f };
        CourantModel::new("su2_twisted", base, Mat::identity(3), h, Some(fiber)).unwrap()
    }

    /// Abelian base of the given dimension, g = Id, H = 0, no fiber.
    pub fn abelian(dim: usize) -> CourantModel {
        let base = LieAlgebra::abelian(dim);
        let h = DenseTensor::zeros(&[dim, dim, dim]);
        CourantModel::new("abelian", base, Mat::identity(dim), h, None).unwrap()
    }

    /// su(2)⊕su(2), g = pairing, H = Cartan form of the sum.
    pub fn su2su2_cartan() -> CourantModel {
        let base = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::su2());
        let h = base.cartan_form().unwrap();
        CourantModel::new("su2su2_cartan", base, Mat::identity(6), h, None).unwrap()
    }

    /// su(3), g = the built-in rational invariant pairing, H = Cartan form.
    pub fn su3_cartan() -> CourantModel {
        let base = LieAlgebra::su3();
        let g = base.pairing.as_ref().unwrap().mat.clone();
        let h = base.cartan_form().unwrap();
        CourantModel::new("su3_cartan", base, g, h, None).unwrap()
    }

    /// su(3) base with an su(2) fiber, ω = 0, F = 0.
    pub fn su3_cartan_fiber() -> CourantModel {
        let base = LieAlgebra::su3();
        let g = base.pairing.as_ref().unwrap().mat.clone();
        let h = base.cartan_form().unwrap();
        let fiber = FiberBlock {
            algebra: LieAlgebra::su2(),
            omega: vec![Mat::zeros(3, 3); 8],
            f: DenseTensor::zeros(&[8, 8, 3]),
        };
        CourantModel::new("su3_cartan_fiber", base, g, h, Some(fiber)).unwrap()
    }
}
