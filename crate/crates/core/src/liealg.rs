//! Metric Lie algebras given by structure constants and a Gram matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Coordinate vector in the algebra basis.
pub type Vector = DVector<f64>;
/// Endomorphism of the algebra, acting on coordinate vectors.
pub type Endo = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Maximum Jacobi residual accepted at construction.
    pub jacobi: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank_rel: f64,
    /// Maximum residual of identity checks.
    pub residual: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            jacobi: 1e-10,
            rank_rel: 1e-10,
            residual: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("jacobi", self.jacobi),
            ("rank_rel", self.rank_rel),
            ("residual", self.residual),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTolerance(format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = residual;
        self
    }
}

/// One nonzero bracket `[e_i, e_j] = Σ coeff · e_k`, used by
/// [`MetricLieAlgebra::from_brackets`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(usize, f64)>,
}

impl Bracket {
    pub fn new(i: usize, j: usize, terms: &[(usize, f64)]) -> Self {
        Self {
            i,
            j,
            terms: terms.to_vec(),
        }
    }
}

/// A real Lie algebra with a positive-definite inner product.
///
/// `structure[(i * n + j) * n + k]` is the coefficient of `e_k` in `[e_i, e_j]`.
/// Values are immutable after construction; the Gram inverse and an
/// orthonormal frame are computed once here.
#[derive(Debug, Clone)]
pub struct MetricLieAlgebra {
    labels: Vec<String>,
    structure: Vec<f64>,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    frame: DMatrix<f64>,
    tol: ToleranceConfig,
}

impl MetricLieAlgebra {
    pub fn new(
        labels: Vec<String>,
        structure: Vec<f64>,
        gram: DMatrix<f64>,
        tol: ToleranceConfig,
    ) -> Result<Self> {
        tol.validate()?;
        let n = labels.len();
        if n == 0 {
            return Err(Error::Input("algebra must have positive dimension".into()));
        }
        if structure.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: structure.len(),
            });
        }
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.nrows().max(gram.ncols()),
            });
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = structure[(i * n + j) * n + k];
                    let b = structure[(j * n + i) * n + k];
                    if !a.is_finite() || (a + b).abs() > tol.jacobi {
                        return Err(Error::NotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        if gram.iter().any(|v| !v.is_finite()) || !linalg::is_symmetric(&gram, 1e-12) {
            return Err(Error::NotPositiveDefinite);
        }
        let frame = linalg::orthonormal_frame(&gram).ok_or(Error::NotPositiveDefinite)?;
        let gram_inv = &frame * frame.transpose();
        let algebra = Self {
            labels,
            structure,
            gram,
            gram_inv,
            frame,
            tol,
        };
        let jac = algebra.jacobi_residual();
        if jac > tol.jacobi {
            return Err(Error::Jacobi(jac));
        }
        Ok(algebra)
    }

    /// Builds the algebra from a list of brackets; antisymmetric completion is
    /// automatic and omitted pairs are zero.
    pub fn from_brackets(
        labels: Vec<String>,
        brackets: &[Bracket],
        gram: DMatrix<f64>,
        tol: ToleranceConfig,
    ) -> Result<Self> {
        let n = labels.len();
        let mut structure = vec![0.0; n * n * n];
        for b in brackets {
            if b.i >= n || b.j >= n {
                return Err(Error::Input(format!(
                    "bracket ({}, {}) out of range for dimension {n}",
                    b.i, b.j
                )));
            }
            for &(k, v) in &b.terms {
                if k >= n {
                    return Err(Error::Input(format!("basis index {k} out of range")));
                }
                if b.i == b.j && v != 0.0 {
                    return Err(Error::Input(format!("bracket [e{0}, e{0}] must vanish", b.i)));
                }
                structure[(b.i * n + b.j) * n + k] += v;
                structure[(b.j * n + b.i) * n + k] -= v;
            }
        }
        Self::new(labels, structure, gram, tol)
    }

    /// Abelian algebra `ℝⁿ` with the identity metric.
    pub fn abelian(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        Self::new(
            labels,
            vec![0.0; n * n * n],
            DMatrix::identity(n, n),
            ToleranceConfig::default(),
        )
        .expect("abelian algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure(&self) -> &[f64] {
        &self.structure
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Columns form an orthonormal basis: `Fᵀ G F = I`.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn with_tol(&self, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        let mut out = self.clone();
        out.tol = tol;
        Ok(out)
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        let n = self.dim();
        Vector::from_fn(n, |k, _| self.c(i, j, k))
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim();
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_{e_i}`; column `j` holds `[e_i, e_j]`.
    pub fn ad_basis(&self, i: usize) -> Endo {
        let n = self.dim();
        Endo::from_fn(n, n, |k, j| self.c(i, j, k))
    }

    pub fn ad(&self, x: &Vector) -> Result<Endo> {
        self.check_len(x)?;
        let n = self.dim();
        let mut m = Endo::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                m += self.ad_basis(i) * x[i];
            }
        }
        Ok(m)
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.gram * y))
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Maximum over basis triples of the Euclidean norm of
    /// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = Vector::zeros(n);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for m in 0..n {
                            let w = self.c(a, b, m);
                            if w != 0.0 {
                                for l in 0..n {
                                    acc[l] += w * self.c(m, c, l);
                                }
                            }
                        }
                    }
                    worst = worst.max(acc.norm());
                }
            }
        }
        worst
    }

    /// Basis of the center `{z : ad_z = 0}` (Euclidean-orthonormal coordinates).
    pub fn center(&self) -> Vec<Vector> {
        let n = self.dim();
        // Row (j, k), column i: coefficient of e_k in [e_i, e_j].
        let stacked = DMatrix::from_fn(n * n, n, |row, i| self.c(i, row / n, row % n));
        let (basis, _) = linalg::nullspace(&stacked, self.tol.rank_rel);
        basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Basis of the derived algebra `[g, g]` (Euclidean-orthonormal coordinates).
    pub fn derived_algebra(&self) -> Vec<Vector> {
        let n = self.dim();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        if pairs.is_empty() {
            return Vec::new();
        }
        let images = DMatrix::from_fn(n, pairs.len(), |k, p| self.c(pairs[p].0, pairs[p].1, k));
        if images.amax() == 0.0 {
            return Vec::new();
        }
        let (basis, _) = linalg::range(&images, self.tol.rank_rel);
        basis.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.dim()).all(|i| self.ad_basis(i).trace().abs() <= self.tol.residual)
    }

    /// `G`-orthonormal basis of the span of `vectors`.
    pub fn orthonormalize(&self, vectors: &[Vector]) -> Vec<Vector> {
        linalg::gram_schmidt(vectors, &self.gram, 1e-8)
    }

    /// `G`-orthonormal basis of the orthogonal complement of `span(vectors)`.
    pub fn orthogonal_complement(&self, vectors: &[Vector]) -> Vec<Vector> {
        let mut all = self.orthonormalize(vectors);
        let k = all.len();
        let candidates: Vec<Vector> = self.frame.column_iter().map(|c| c.into_owned()).collect();
        for c in candidates {
            all.push(c);
            all = linalg::gram_schmidt(&all, &self.gram, 1e-8);
        }
        all.split_off(k)
    }

    /// The same algebra written in a new basis whose vectors are the columns
    /// of `p` (in current coordinates).
    pub fn change_basis(&self, p: &DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let n = self.dim();
        if p.nrows() != n || p.ncols() != n || labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.ncols(),
            });
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Input("change of basis is singular".into()))?;
        let mut structure = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let image = self.bracket_unchecked(&p.column(i).into_owned(), &p.column(j).into_owned());
                let coords = &p_inv * image;
                for k in 0..n {
                    structure[(i * n + j) * n + k] = coords[k];
                }
            }
        }
        let gram = p.transpose() * &self.gram * p;
        let gram = (&gram + gram.transpose()) * 0.5;
        Self::new(labels, structure, gram, self.tol)
    }

    fn check_len(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Plain labels `e1..en`.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn grs(r: f64, s: f64) -> MetricLieAlgebra {
        let a4 = (s * s - r * r) / s;
        MetricLieAlgebra::from_brackets(
            labels(&["xi", "z1", "z2", "x", "y"]),
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

    #[test]
    fn bracket_of_grs() {
        let g = grs(1.0, 2.0);
        let v = g.bracket(&g.basis_vector(3), &g.basis_vector(4)).unwrap();
        assert_eq!(v, g.basis_vector(0) * 2.0);
        let w = g.bracket(&g.basis_vector(4), &g.basis_vector(3)).unwrap();
        assert_eq!(w, g.basis_vector(0) * -2.0);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let g = grs(1.0, 2.0);
        assert!(matches!(
            g.bracket(&Vector::zeros(3), &g.basis_vector(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn abelian_invariants() {
        let a = MetricLieAlgebra::abelian(5);
        assert_eq!(a.jacobi_residual(), 0.0);
        assert_eq!(a.center().len(), 5);
        assert!(a.derived_algebra().is_empty());
        assert!(a.is_unimodular());
    }

    fn raw(n: usize, entries: &[(usize, usize, usize, f64)]) -> Vec<f64> {
        let mut c = vec![0.0; n * n * n];
        for &(i, j, k, v) in entries {
            c[(i * n + j) * n + k] = v;
            c[(j * n + i) * n + k] = -v;
        }
        c
    }

    #[test]
    fn jacobi_residual_by_direct_evaluation() {
        let loose = ToleranceConfig {
            jacobi: 10.0,
            ..Default::default()
        };
        // [e1,e2] = e3, [e2,e3] = e1: the cyclic sum is [e3,e3] + [e1,e1] + 0 = 0,
        // so this tensor is a Lie algebra.
        let c = raw(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0)]);
        let a = MetricLieAlgebra::new(labels(&["a", "b", "c"]), c, DMatrix::identity(3, 3), loose).unwrap();
        assert_eq!(a.jacobi_residual(), 0.0);

        // Adding [e3,e1] = e3 leaves [[e3,e1],e2] = [e3,e2] = -e1 uncompensated.
        let c = raw(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 2, 1.0)]);
        let a = MetricLieAlgebra::new(labels(&["a", "b", "c"]), c.clone(), DMatrix::identity(3, 3), loose)
            .unwrap();
        assert_eq!(a.jacobi_residual(), 1.0);
        let strict = MetricLieAlgebra::new(
            labels(&["a", "b", "c"]),
            c,
            DMatrix::identity(3, 3),
            ToleranceConfig::default(),
        );
        assert!(matches!(strict, Err(Error::Jacobi(_))));
    }

    #[test]
    fn grs_structure() {
        let g = grs(1.0, 1.0);
        assert_eq!(g.center().len(), 2);
        assert_eq!(g.derived_algebra().len(), 3);
        assert!(g.is_unimodular());
        assert!(g.jacobi_residual() < 1e-12);
    }

    #[test]
    fn non_unimodular_detected() {
        // [E1, E2] = E2 - E5
        let a = MetricLieAlgebra::from_brackets(
            default_labels(5),
            &[Bracket::new(0, 1, &[(1, 1.0), (4, -1.0)]), Bracket::new(2, 3, &[(4, -1.0)])],
            DMatrix::identity(5, 5),
            ToleranceConfig::default(),
        )
        .unwrap();
        assert!((a.ad_basis(0).trace() - 1.0).abs() < 1e-15);
        assert!(!a.is_unimodular());
    }

    #[test]
    fn rejects_indefinite_metric() {
        let mut g = DMatrix::identity(2, 2);
        g[(1, 1)] = -1.0;
        let r = MetricLieAlgebra::from_brackets(default_labels(2), &[], g, ToleranceConfig::default());
        assert!(matches!(r, Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn complement_is_orthogonal() {
        let g = grs(1.0, 2.0);
        let z = g.center();
        let perp = g.orthogonal_complement(&z);
        assert_eq!(perp.len(), 3);
        for p in &perp {
            for c in &z {
                assert!(g.inner(p, c).abs() < 1e-12);
            }
        }
    }
}
