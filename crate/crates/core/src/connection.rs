//! Levi-Civita connection of a left-invariant metric, curvature, and the
//! infinitesimal holonomy algebra.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::liealg::{Endo, MetricLieAlgebra, Vector};
use crate::linalg;

/// `nabla[i]` is the matrix of `∇_{e_i}`: column `j` holds `∇_{e_i} e_j`.
#[derive(Debug, Clone)]
pub struct Connection<'a> {
    algebra: &'a MetricLieAlgebra,
    nabla: Vec<Endo>,
}

/// Koszul formula on basis vectors:
/// `2⟨∇_{e_i}e_j, e_k⟩ = ⟨[e_i,e_j],e_k⟩ − ⟨[e_j,e_k],e_i⟩ + ⟨[e_k,e_i],e_j⟩`.
pub fn levi_civita(algebra: &MetricLieAlgebra) -> Connection<'_> {
    let n = algebra.dim();
    let g = algebra.gram();
    // lowered[i][j][k] = ⟨[e_i, e_j], e_k⟩
    let mut lowered = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let b = algebra.bracket_basis(i, j);
            let low = g * b;
            for k in 0..n {
                lowered[(i * n + j) * n + k] = low[k];
            }
        }
    }
    let at = |i: usize, j: usize, k: usize| lowered[(i * n + j) * n + k];
    let nabla = (0..n)
        .map(|i| {
            let mut koszul = DMatrix::zeros(n, n);
            for j in 0..n {
                for k in 0..n {
                    koszul[(k, j)] = 0.5 * (at(i, j, k) - at(j, k, i) + at(k, i, j));
                }
            }
            algebra.gram_inv() * koszul
        })
        .collect();
    Connection { algebra, nabla }
}

impl<'a> Connection<'a> {
    pub fn algebra(&self) -> &'a MetricLieAlgebra {
        self.algebra
    }

    pub fn nabla(&self, i: usize) -> &Endo {
        &self.nabla[i]
    }

    /// `∇_x` for an arbitrary direction.
    pub fn along(&self, x: &Vector) -> Endo {
        let n = self.algebra.dim();
        let mut m = Endo::zeros(n, n);
        for (i, nab) in self.nabla.iter().enumerate() {
            if x[i] != 0.0 {
                m += nab * x[i];
            }
        }
        m
    }

    /// `∇_x T = ∇_x ∘ T − T ∘ ∇_x`.
    pub fn covariant_derivative(&self, x: &Vector, t: &Endo) -> Endo {
        let nx = self.along(x);
        &nx * t - t * &nx
    }

    /// `R(x, y) = ∇_{[x,y]} − [∇_x, ∇_y]`.
    pub fn curvature(&self, x: &Vector, y: &Vector) -> Endo {
        let nx = self.along(x);
        let ny = self.along(y);
        let bracket = self.algebra.bracket_unchecked(x, y);
        self.along(&bracket) - (&nx * &ny - &ny * &nx)
    }

    pub fn curvature_basis(&self, i: usize, j: usize) -> Endo {
        let nb = self.along(&self.algebra.bracket_basis(i, j));
        nb - (&self.nabla[i] * &self.nabla[j] - &self.nabla[j] * &self.nabla[i])
    }

    /// Max entry of `G ∇_i + (G ∇_i)ᵀ` over all `i`.
    pub fn compatibility_residual(&self) -> f64 {
        let g = self.algebra.gram();
        self.nabla
            .iter()
            .map(|m| {
                let gm = g * m;
                (&gm + gm.transpose()).amax()
            })
            .fold(0.0, f64::max)
    }

    /// Max over basis pairs of `|∇_{e_i}e_j − ∇_{e_j}e_i − [e_i,e_j]|`.
    pub fn torsion_residual(&self) -> f64 {
        let n = self.algebra.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let t = self.nabla[i].column(j) - self.nabla[j].column(i) - self.algebra.bracket_basis(i, j);
                worst = worst.max(t.amax());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyReport {
    pub dimension: usize,
    #[serde(skip)]
    pub basis: Vec<Endo>,
    pub iterations: usize,
    pub converged: bool,
}

pub const DEFAULT_HOLONOMY_CAP: usize = 20;

pub fn holonomy_algebra(algebra: &MetricLieAlgebra) -> HolonomyReport {
    holonomy_algebra_with_cap(algebra, DEFAULT_HOLONOMY_CAP)
}

/// Span of the curvature endomorphisms `R(e_i, e_j)`, closed under commutators
/// and under `B ↦ [∇_{e_k}, B]` until the dimension stabilizes. Reaching
/// `dim so(n)` also counts as convergence.
pub fn holonomy_algebra_with_cap(algebra: &MetricLieAlgebra, cap: usize) -> HolonomyReport {
    let n = algebra.dim();
    let conn = levi_civita(algebra);
    let max_dim = n * (n - 1) / 2;
    let rank_rel = algebra.tol().rank_rel;

    let mut generators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            generators.push(conn.curvature_basis(i, j));
        }
    }
    let mut basis = span_basis(&generators, n, rank_rel);
    let mut iterations = 0;
    let mut converged = basis.is_empty() || basis.len() == max_dim;
    while !converged && iterations < cap {
        iterations += 1;
        let mut candidates = basis.clone();
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                candidates.push(&basis[a] * &basis[b] - &basis[b] * &basis[a]);
            }
        }
        for nab in &conn.nabla {
            for b in &basis {
                candidates.push(nab * b - b * nab);
            }
        }
        let next = span_basis(&candidates, n, rank_rel);
        converged = next.len() == basis.len() || next.len() == max_dim;
        basis = next;
    }
    HolonomyReport {
        dimension: basis.len(),
        basis,
        iterations,
        converged,
    }
}

/// Orthonormal basis (Frobenius inner product) of the span of `mats`.
fn span_basis(mats: &[Endo], n: usize, rank_rel: f64) -> Vec<Endo> {
    if mats.is_empty() {
        return Vec::new();
    }
    let stacked = DMatrix::from_fn(n * n, mats.len(), |r, c| mats[c][(r / n, r % n)]);
    // Entries at roundoff level relative to the connection are zero.
    if stacked.amax() <= 1e-13 {
        return Vec::new();
    }
    let (range, _) = linalg::range(&stacked, rank_rel);
    range
        .column_iter()
        .map(|col| DMatrix::from_fn(n, n, |r, c| col[r * n + c]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{Bracket, ToleranceConfig};

    fn g11() -> MetricLieAlgebra {
        // [ξ,x] = z1, [ξ,y] = z2, [x,y] = ξ in the orthonormal basis (ξ,z1,z2,x,y).
        MetricLieAlgebra::from_brackets(
            ["xi", "z1", "z2", "x", "y"].iter().map(|s| s.to_string()).collect(),
            &[
                Bracket::new(0, 3, &[(1, 1.0)]),
                Bracket::new(0, 4, &[(2, 1.0)]),
                Bracket::new(3, 4, &[(0, 1.0)]),
            ],
            DMatrix::identity(5, 5),
            ToleranceConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn abelian_is_flat() {
        let a = MetricLieAlgebra::abelian(5);
        let c = levi_civita(&a);
        for i in 0..5 {
            assert_eq!(c.nabla(i).amax(), 0.0);
        }
        let h = holonomy_algebra(&a);
        assert_eq!(h.dimension, 0);
        assert!(h.converged);
    }

    #[test]
    fn hand_evaluated_koszul_on_g11() {
        // 2⟨∇_x y, ξ⟩ = ⟨[x,y],ξ⟩ − ⟨[y,ξ],x⟩ + ⟨[ξ,x],y⟩ = 1 − 0 + 0,
        // and every other component vanishes, so ∇_x y = ½ξ.
        let a = g11();
        let c = levi_civita(&a);
        let nxy = c.nabla(3).column(4).into_owned();
        let mut expected = Vector::zeros(5);
        expected[0] = 0.5;
        assert!((nxy - expected).amax() < 1e-15);
        // ∇_ξ ξ = 0
        assert!(c.nabla(0).column(0).amax() < 1e-15);
    }

    #[test]
    fn curvature_nonzero_on_g11() {
        let a = g11();
        let c = levi_civita(&a);
        let r = c.curvature(&a.basis_vector(3), &a.basis_vector(4));
        // independent expansion ∇_{[x,y]} − ∇_x∇_y + ∇_y∇_x
        let nx = c.nabla(3);
        let ny = c.nabla(4);
        let oracle = c.nabla(0) - (nx * ny - ny * nx);
        assert!((&r - oracle).amax() < 1e-15);
        assert!(r.amax() > 0.1);
    }

    #[test]
    fn covariant_derivative_of_identity_vanishes() {
        let a = g11();
        let c = levi_civita(&a);
        let id = Endo::identity(5, 5);
        assert!(c.covariant_derivative(&a.basis_vector(0), &id).amax() < 1e-15);
    }

    #[test]
    fn compatibility_and_torsion() {
        let a = g11();
        let c = levi_civita(&a);
        assert!(c.compatibility_residual() < 1e-12);
        assert!(c.torsion_residual() < 1e-12);
    }
}
