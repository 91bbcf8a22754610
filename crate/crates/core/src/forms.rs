//! Left-invariant exterior calculus: wedge, interior product, musical
//! isomorphisms, Chevalley–Eilenberg differential, codifferential and Hodge
//! star.
//!
//! A p-form stores its values on increasing basis tuples `e_I`, in
//! [`combinations`] order, so `e^1 ∧ e^2` has coefficient 1 at `(0, 1)`.
//! Evaluation on arbitrary vectors uses the determinant convention.

use nalgebra::DMatrix;

use crate::connection::Connection;
use crate::liealg::{Endo, MetricLieAlgebra, Vector};
use crate::multi_index::{binomial, combinations, complement, concat_sign, rank_of, sort_with_sign};

#[derive(Debug, Clone, PartialEq)]
pub struct PForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl PForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let degree = degree.min(dim);
        Self {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Self {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// Panics if the length does not match `C(dim, degree)`.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), binomial(dim, degree), "coefficient count");
        Self { dim, degree, coeffs }
    }

    /// `value · e^{i_1} ∧ … ∧ e^{i_p}` for any (not necessarily sorted) index list.
    pub fn monomial(dim: usize, idx: &[usize], value: f64) -> Self {
        let mut f = Self::zero(dim, idx.len());
        f.add_term(idx, value);
        f
    }

    /// The 1-form `Σ v_i e^i`.
    pub fn covector(v: &Vector) -> Self {
        Self::from_coeffs(v.len(), 1, v.iter().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_vector(&self) -> Vector {
        Vector::from_column_slice(&self.coeffs)
    }

    /// Nonzero `(index, value)` pairs in lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        combinations(self.dim, self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect()
    }

    /// Adds `value` at an arbitrary index tuple, with the permutation sign.
    /// Repeated indices are ignored.
    pub fn add_term(&mut self, idx: &[usize], value: f64) {
        assert_eq!(idx.len(), self.degree, "index length");
        let mut sorted = idx.to_vec();
        if let Some(sign) = sort_with_sign(&mut sorted) {
            self.coeffs[rank_of(self.dim, &sorted)] += sign * value;
        }
    }

    /// Antisymmetric extension: value on `(e_{i_1}, …, e_{i_p})` in any order.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            Some(sign) => sign * self.coeffs[rank_of(self.dim, &sorted)],
            None => 0.0,
        }
    }

    /// `η(v_1, …, v_p)`.
    pub fn eval(&self, vectors: &[Vector]) -> f64 {
        assert_eq!(vectors.len(), self.degree, "argument count");
        if self.degree == 0 {
            return self.coeffs[0];
        }
        let p = self.degree;
        combinations(self.dim, p)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(idx, &c)| {
                let minor = DMatrix::from_fn(p, p, |a, b| vectors[b][idx[a]]);
                c * minor.determinant()
            })
            .sum()
    }

    /// `(Mᵀη)(v, …) = η(Mv, …)`.
    pub fn pullback(&self, m: &DMatrix<f64>) -> Self {
        let cols: Vec<Vector> = (0..m.ncols()).map(|j| m.column(j).into_owned()).collect();
        let coeffs = combinations(m.ncols(), self.degree)
            .iter()
            .map(|idx| {
                let args: Vec<Vector> = idx.iter().map(|&j| cols[j].clone()).collect();
                self.eval(&args)
            })
            .collect();
        Self {
            dim: m.ncols(),
            degree: self.degree,
            coeffs,
        }
    }

    /// Degree overflow yields the zero form of degree `dim`.
    pub fn wedge(&self, other: &PForm) -> Self {
        assert_eq!(self.dim, other.dim, "ambient dimension");
        let n = self.dim;
        let degree = self.degree + other.degree;
        if degree > n {
            return Self::zero(n, n);
        }
        let mut out = Self::zero(n, degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let sign = concat_sign(&a, &b);
                if sign != 0.0 {
                    let mut k: Vec<usize> = a.iter().chain(&b).copied().collect();
                    k.sort_unstable();
                    out.coeffs[rank_of(n, &k)] += sign * ca * cb;
                }
            }
        }
        out
    }

    /// `ι_x η`; the interior product of a 0-form is zero.
    pub fn interior(&self, x: &Vector) -> Self {
        if self.degree == 0 {
            return Self::zero(self.dim, 0);
        }
        let coeffs = combinations(self.dim, self.degree - 1)
            .iter()
            .map(|rest| {
                let mut idx = Vec::with_capacity(self.degree);
                idx.push(0);
                idx.extend_from_slice(rest);
                (0..self.dim)
                    .filter(|&i| x[i] != 0.0)
                    .map(|i| {
                        idx[0] = i;
                        x[i] * self.get(&idx)
                    })
                    .sum()
            })
            .collect();
        Self {
            dim: self.dim,
            degree: self.degree - 1,
            coeffs,
        }
    }

    /// Natural action of an endomorphism as a derivation:
    /// `(A·η)(y_1, …, y_p) = −Σ_k η(…, A y_k, …)`.
    pub fn derivation(&self, a: &Endo) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n, self.degree);
        for (pos, idx) in combinations(n, self.degree).iter().enumerate() {
            let mut acc = 0.0;
            let mut tuple = idx.clone();
            for k in 0..idx.len() {
                for m in 0..n {
                    let am = a[(m, idx[k])];
                    if am != 0.0 {
                        tuple[k] = m;
                        acc += am * self.get(&tuple);
                    }
                }
                tuple[k] = idx[k];
            }
            out.coeffs[pos] = -acc;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &PForm) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape");
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &PForm) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Largest absolute coefficient.
    pub fn amax(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// `x ↦ ⟨x, ·⟩`.
pub fn flat(algebra: &MetricLieAlgebra, x: &Vector) -> PForm {
    PForm::covector(&(algebra.gram() * x))
}

/// Inverse of [`flat`] on 1-forms.
pub fn sharp(algebra: &MetricLieAlgebra, theta: &PForm) -> Vector {
    assert_eq!(theta.degree(), 1, "sharp expects a 1-form");
    algebra.gram_inv() * theta.as_vector()
}

/// Chevalley–Eilenberg differential
/// `dη(x_0, …, x_p) = Σ_{i<j} (−1)^{i+j} η([x_i, x_j], x_0, …, x̂_i, …, x̂_j, …, x_p)`.
pub fn exterior_derivative(algebra: &MetricLieAlgebra, eta: &PForm) -> PForm {
    let n = algebra.dim();
    let p = eta.degree();
    if p >= n {
        return PForm::zero(n, n);
    }
    let mut out = PForm::zero(n, p + 1);
    for (pos, idx) in combinations(n, p + 1).iter().enumerate() {
        let mut acc = 0.0;
        for a in 0..=p {
            for b in a + 1..=p {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                let mut tuple = Vec::with_capacity(p);
                tuple.push(0);
                tuple.extend(idx.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, &v)| v));
                for m in 0..n {
                    let c = algebra.c(idx[a], idx[b], m);
                    if c != 0.0 {
                        tuple[0] = m;
                        acc += sign * c * eta.get(&tuple);
                    }
                }
            }
        }
        out.coeffs[pos] = acc;
    }
    out
}

/// `∇_x η`.
pub fn covariant_derivative_form(conn: &Connection<'_>, x: &Vector, eta: &PForm) -> PForm {
    eta.derivation(&conn.along(x))
}

/// `d*η = −Σ_a ι_{E_a} ∇_{E_a} η` over the orthonormal frame `E_a`.
pub fn codifferential(conn: &Connection<'_>, eta: &PForm) -> PForm {
    let algebra = conn.algebra();
    let n = algebra.dim();
    if eta.degree() == 0 {
        return PForm::zero(n, 0);
    }
    let frame = algebra.frame();
    let mut out = PForm::zero(n, eta.degree() - 1);
    for a in 0..n {
        let e = frame.column(a).into_owned();
        let term = covariant_derivative_form(conn, &e, eta).interior(&e);
        out = out.sub(&term);
    }
    out
}

/// Sign `ε` in `d* = ε · *d*` on p-forms in dimension n.
pub fn hodge_codifferential_sign(n: usize, p: usize) -> f64 {
    if (n * (p + 1) + 1).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Codifferential through the Hodge star, `(−1)^{n(p+1)+1} *d*`.
pub fn codifferential_hodge(algebra: &MetricLieAlgebra, eta: &PForm) -> PForm {
    let n = algebra.dim();
    let p = eta.degree();
    if p == 0 {
        return PForm::zero(n, 0);
    }
    let inner = exterior_derivative(algebra, &hodge_star(algebra, eta));
    hodge_star(algebra, &inner).scale(hodge_codifferential_sign(n, p))
}

/// Coefficients with respect to the orthonormal coframe.
fn frame_coefficients(algebra: &MetricLieAlgebra, eta: &PForm) -> PForm {
    eta.pullback(algebra.frame())
}

/// Hodge star for the orientation of the ordered input basis.
pub fn hodge_star(algebra: &MetricLieAlgebra, eta: &PForm) -> PForm {
    let n = algebra.dim();
    let p = eta.degree();
    let framed = frame_coefficients(algebra, eta);
    let mut starred = PForm::zero(n, n - p);
    for (idx, c) in framed.terms() {
        let rest = complement(n, &idx);
        starred.coeffs[rank_of(n, &rest)] += concat_sign(&idx, &rest) * c;
    }
    let back = algebra
        .frame()
        .clone()
        .try_inverse()
        .expect("frame is invertible");
    starred.pullback(&back)
}

/// `√det G · e^1 ∧ … ∧ e^n`.
pub fn volume(algebra: &MetricLieAlgebra) -> PForm {
    let n = algebra.dim();
    let all: Vec<usize> = (0..n).collect();
    PForm::monomial(n, &all, algebra.gram().determinant().sqrt())
}

/// Pointwise inner product of p-forms induced by the metric.
pub fn form_inner(algebra: &MetricLieAlgebra, a: &PForm, b: &PForm) -> f64 {
    assert_eq!(a.degree(), b.degree(), "degrees differ");
    let fa = frame_coefficients(algebra, a);
    let fb = frame_coefficients(algebra, b);
    fa.coeffs.iter().zip(&fb.coeffs).map(|(x, y)| x * y).sum()
}

pub fn form_norm(algebra: &MetricLieAlgebra, a: &PForm) -> f64 {
    form_inner(algebra, a, a).max(0.0).sqrt()
}

/// `T` with `ω(x, y) = ⟨Tx, y⟩`.
pub fn endo_from_two_form(algebra: &MetricLieAlgebra, omega: &PForm) -> Endo {
    assert_eq!(omega.degree(), 2, "expected a 2-form");
    let n = algebra.dim();
    let big_omega = DMatrix::from_fn(n, n, |i, j| omega.get(&[i, j]));
    algebra.gram_inv() * big_omega.transpose()
}

/// `ω(x, y) = ⟨Tx, y⟩`, skew part only.
pub fn two_form_from_endo(algebra: &MetricLieAlgebra, t: &Endo) -> PForm {
    let n = algebra.dim();
    let m = t.transpose() * algebra.gram();
    let coeffs = combinations(n, 2)
        .iter()
        .map(|ij| 0.5 * (m[(ij[0], ij[1])] - m[(ij[1], ij[0])]))
        .collect();
    PForm::from_coeffs(n, 2, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::levi_civita;
    use crate::liealg::{Bracket, ToleranceConfig};
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        crate::liealg::default_labels(n)
    }

    /// g_{r,s} in the orthonormal basis (ξ, z1, z2, x, y).
    fn grs(r: f64, s: f64) -> MetricLieAlgebra {
        let a4 = (s * s - r * r) / s;
        MetricLieAlgebra::from_brackets(
            labels(5),
            &[
                Bracket::new(0, 3, &[(1, r), (4, a4)]),
                Bracket::new(0, 4, &[(2, r), (3, -a4)]),
                Bracket::new(3, 4, &[(0, s)]),
            ],
            DMatrix::identity(5, 5),
            ToleranceConfig::default(),
        )
        .unwrap()
    }

    fn grs_form(r: f64, s: f64) -> PForm {
        let mut w = PForm::zero(5, 2);
        w.add_term(&[1, 2], 2.0 * (s * s + 2.0 * r * r) / (r * r * s));
        w.add_term(&[1, 3], 2.0 / r);
        w.add_term(&[2, 4], 2.0 / r);
        w.add_term(&[3, 4], 4.0 / s);
        w
    }

    /// A non-unimodular algebra with a non-diagonal metric.
    fn skewed() -> MetricLieAlgebra {
        let mut g = DMatrix::identity(4, 4);
        g[(0, 1)] = 0.3;
        g[(1, 0)] = 0.3;
        g[(2, 2)] = 2.0;
        g[(3, 3)] = 0.5;
        MetricLieAlgebra::from_brackets(
            labels(4),
            &[
                Bracket::new(0, 1, &[(1, 1.0)]),
                Bracket::new(0, 2, &[(2, 1.0)]),
                Bracket::new(0, 3, &[(3, 2.0)]),
                Bracket::new(1, 2, &[(3, 1.0)]),
            ],
            g,
            ToleranceConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn interior_of_monomial() {
        let w = PForm::monomial(5, &[3, 4], 1.0);
        let x = Vector::from_fn(5, |i, _| if i == 3 { 1.0 } else { 0.0 });
        assert_eq!(w.interior(&x), PForm::monomial(5, &[4], 1.0));
    }

    #[test]
    fn monomial_wedge_is_volume_coefficient() {
        let a = PForm::monomial(5, &[0, 1], 1.0);
        let b = PForm::monomial(5, &[2, 3], 1.0);
        let w = a.wedge(&b);
        assert_eq!(w.degree(), 4);
        assert_eq!(w.get(&[0, 1, 2, 3]), 1.0);
        assert_eq!(w.amax(), 1.0);
    }

    #[test]
    fn wedge_overflow_is_zero() {
        let a = PForm::monomial(3, &[0, 1], 1.0);
        let w = a.wedge(&a);
        assert_eq!(w.degree(), 3);
        assert_eq!(w.amax(), 0.0);
    }

    #[test]
    fn eval_uses_determinant_convention() {
        let w = PForm::monomial(3, &[0, 1], 1.0);
        let x = Vector::from_vec(vec![1.0, 2.0, 0.0]);
        let y = Vector::from_vec(vec![3.0, 4.0, 0.0]);
        assert_eq!(w.eval(&[x, y]), 1.0 * 4.0 - 2.0 * 3.0);
    }

    #[test]
    fn flat_of_xi_in_grs() {
        let a = grs(1.0, 2.0);
        let xi = a.basis_vector(0);
        let theta = flat(&a, &xi);
        assert_eq!(theta.eval(std::slice::from_ref(&xi)), 1.0);
        assert_eq!(sharp(&a, &theta), xi);
    }

    #[test]
    fn grs_derivative_value() {
        for (r, s) in [(1.0, 2.0), (2.0, 1.0), (0.5, 1.5)] {
            let a = grs(r, s);
            let d = exterior_derivative(&a, &grs_form(r, s));
            // dω(x, z2, ξ)
            let v = d.get(&[3, 2, 0]);
            assert!((v + 6.0 * r / s).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn grs_codifferential_routes_agree() {
        let a = grs(1.0, 2.0);
        let conn = levi_civita(&a);
        let w = grs_form(1.0, 2.0);
        let frame_sum = codifferential(&conn, &w);
        let hodge = codifferential_hodge(&a, &w);
        let expected = flat(&a, &a.basis_vector(0)).scale(-4.0);
        assert!(frame_sum.sub(&expected).amax() < 1e-12);
        assert!(hodge.sub(&expected).amax() < 1e-12);
    }

    #[test]
    fn monomial_star_orthonormal() {
        let a = MetricLieAlgebra::abelian(5);
        let s = hodge_star(&a, &PForm::monomial(5, &[0, 1], 1.0));
        assert!(s.sub(&PForm::monomial(5, &[2, 3, 4], 1.0)).amax() < 1e-15);
    }

    #[test]
    fn star_of_one_is_volume() {
        let a = skewed();
        let s = hodge_star(&a, &PForm::scalar(4, 1.0));
        let v = volume(&a);
        assert!(s.sub(&v).amax() < 1e-14);
        assert!((v.coeffs()[0] - a.gram().determinant().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn endo_round_trip() {
        let a = skewed();
        let mut w = PForm::zero(4, 2);
        w.add_term(&[0, 2], 1.5);
        w.add_term(&[1, 3], -0.25);
        let t = endo_from_two_form(&a, &w);
        // ⟨T e_0, e_2⟩ = ω(e_0, e_2)
        let lhs = a.inner(&(&t * a.basis_vector(0)), &a.basis_vector(2));
        assert!((lhs - 1.5).abs() < 1e-14);
        assert!(two_form_from_endo(&a, &t).sub(&w).amax() < 1e-14);
    }

    #[test]
    fn codifferential_sign_table() {
        assert_eq!(hodge_codifferential_sign(5, 2), 1.0);
        assert_eq!(hodge_codifferential_sign(4, 2), -1.0);
        assert_eq!(hodge_codifferential_sign(5, 1), -1.0);
    }

    fn random_form(n: usize, p: usize, seed: &[f64]) -> PForm {
        let k = binomial(n, p);
        PForm::from_coeffs(n, p, (0..k).map(|i| seed[i % seed.len()] * (1.0 + i as f64 * 0.37).sin()).collect())
    }

    proptest! {
        #[test]
        fn d_squared_vanishes(seed in prop::collection::vec(-2.0f64..2.0, 1..12), p in 0usize..4) {
            let a = grs(1.0, 2.0);
            let eta = random_form(5, p, &seed);
            let dd = exterior_derivative(&a, &exterior_derivative(&a, &eta));
            prop_assert!(dd.amax() < 1e-10);
            let b = skewed();
            let eta = random_form(4, p.min(3), &seed);
            let dd = exterior_derivative(&b, &exterior_derivative(&b, &eta));
            prop_assert!(dd.amax() < 1e-10);
        }

        #[test]
        fn double_star_sign(seed in prop::collection::vec(-2.0f64..2.0, 1..12), p in 0usize..5) {
            let b = skewed();
            let eta = random_form(4, p, &seed);
            let ss = hodge_star(&b, &hodge_star(&b, &eta));
            let sign = if (p * (4 - p)) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(ss.sub(&eta.scale(sign)).amax() < 1e-12);
        }

        #[test]
        fn star_defines_inner_product(s1 in prop::collection::vec(-2.0f64..2.0, 1..8),
                                      s2 in prop::collection::vec(-2.0f64..2.0, 1..8), p in 0usize..5) {
            let b = skewed();
            let x = random_form(4, p, &s1);
            let y = random_form(4, p, &s2);
            let lhs = x.wedge(&hodge_star(&b, &y));
            let rhs = volume(&b).scale(form_inner(&b, &x, &y));
            prop_assert!(lhs.sub(&rhs).amax() < 1e-12);
        }

        #[test]
        fn codifferential_routes_agree(seed in prop::collection::vec(-2.0f64..2.0, 1..12), p in 1usize..5) {
            // pointwise identity, so it holds without unimodularity
            for a in [grs(1.0, 2.0), grs(2.0, 1.0), skewed()] {
                let conn = levi_civita(&a);
                let eta = random_form(a.dim(), p.min(a.dim() - 1), &seed);
                let diff = codifferential(&conn, &eta).sub(&codifferential_hodge(&a, &eta));
                prop_assert!(diff.amax() < 1e-10);
            }
        }

        #[test]
        fn adjointness_on_unimodular(s1 in prop::collection::vec(-2.0f64..2.0, 1..8),
                                     s2 in prop::collection::vec(-2.0f64..2.0, 1..8), p in 0usize..4) {
            let a = grs(0.5, 1.5);
            let conn = levi_civita(&a);
            let alpha = random_form(5, p, &s1);
            let beta = random_form(5, p + 1, &s2);
            let lhs = form_inner(&a, &exterior_derivative(&a, &alpha), &beta);
            let rhs = form_inner(&a, &alpha, &codifferential(&conn, &beta));
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
