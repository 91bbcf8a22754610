//! Exact rational arithmetic path used as an oracle.
//!
//! Deliberately independent of [`crate::forms`]: forms are full antisymmetric
//! tensors with `n^p` entries evaluated tuple by tuple, and ranks come from
//! Gaussian elimination over `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cky::FormKind;
use crate::liealg::MetricLieAlgebra;

pub type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Small rational equal to `x` up to a few ulps, found by continued fractions:
/// denominator at most `1e6`, error at most `8ε·max(1, |x|)`. Convergents of
/// an irrational with such denominators miss by at least ~`1e-13`, so `√2`
/// yields `None`.
pub fn rationalize(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let tol = 8.0 * f64::EPSILON * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > 1_000_000 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some(Q::new(BigInt::from(h2), BigInt::from(k2)));
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Rank by exact Gaussian elimination over rows of equal length.
#[allow(clippy::needless_range_loop)]
pub fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = rows[r][c].recip();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] * &inv;
            for k in c..cols {
                let sub = &f * &rows[r][k];
                rows[i][k] -= sub;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Inverse by Gauss-Jordan; `None` if singular.
#[allow(clippy::needless_range_loop)]
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, pivot);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let sub = &f * &a[c][k];
                    a[i][k] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Debug, Clone)]
pub struct ExactAlgebra {
    n: usize,
    /// `c[(i*n + j)*n + k]`.
    c: Vec<Q>,
    g: Vec<Vec<Q>>,
    ginv: Vec<Vec<Q>>,
}

impl ExactAlgebra {
    pub fn new(n: usize, c: Vec<Q>, g: Vec<Vec<Q>>) -> Option<Self> {
        if c.len() != n * n * n || g.len() != n {
            return None;
        }
        let ginv = inverse(&g)?;
        Some(Self { n, c, g, ginv })
    }

    /// `None` unless every structure constant and Gram entry is (numerically)
    /// a small rational.
    pub fn from_float(a: &MetricLieAlgebra) -> Option<Self> {
        let n = a.dim();
        let c = a.structure().iter().map(|&v| rationalize(v)).collect::<Option<Vec<_>>>()?;
        let g = (0..n)
            .map(|i| (0..n).map(|j| rationalize(a.gram()[(i, j)])).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Self::new(n, c, g)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn structure(&self) -> &[Q] {
        &self.c
    }

    fn c(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[(i * self.n + j) * self.n + k]
    }

    /// `nabla[(i*n + j)*n + k]` = coefficient of `e_k` in `∇_{e_i} e_j`, from
    /// the Koszul formula solved with the exact Gram inverse.
    pub fn connection(&self) -> Vec<Q> {
        let n = self.n;
        // low[i][j][k] = ⟨[e_i, e_j], e_k⟩
        let low = |i: usize, j: usize, k: usize| -> Q {
            (0..n).fold(Q::zero(), |acc, m| acc + self.c(i, j, m) * &self.g[m][k])
        };
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        let mut out = vec![Q::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                let rhs: Vec<Q> = (0..n)
                    .map(|k| &half * (low(i, j, k) - low(j, k, i) + low(k, i, j)))
                    .collect();
                for k in 0..n {
                    out[(i * n + j) * n + k] =
                        (0..n).fold(Q::zero(), |acc, m| acc + &self.ginv[k][m] * &rhs[m]);
                }
            }
        }
        out
    }
}

/// Full covariant tensor of rank `p`, row-major over `n^p` tuples.
#[derive(Debug, Clone, PartialEq)]
struct Tensor {
    n: usize,
    p: usize,
    data: Vec<Q>,
}

impl Tensor {
    fn zero(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            data: vec![Q::zero(); n.pow(p as u32)],
        }
    }

    fn tuple(&self, mut flat: usize) -> Vec<usize> {
        let mut t = vec![0; self.p];
        for slot in t.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        t
    }

    fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &v| acc * self.n + v)
    }

    fn at(&self, t: &[usize]) -> &Q {
        &self.data[self.index(t)]
    }

    /// `e^{i_1} ∧ … ∧ e^{i_p}` for strictly increasing `idx`: its value on a
    /// tuple is the sign of the permutation, zero off the orbit.
    fn unit(n: usize, idx: &[usize]) -> Self {
        let mut out = Self::zero(n, idx.len());
        for flat in 0..out.data.len() {
            let t = out.tuple(flat);
            let mut sorted = t.clone();
            sorted.sort_unstable();
            if sorted == idx {
                let mut inversions = 0;
                for a in 0..t.len() {
                    for b in a + 1..t.len() {
                        if t[a] > t[b] {
                            inversions += 1;
                        }
                    }
                }
                out.data[flat] = q(if inversions % 2 == 0 { 1 } else { -1 });
            }
        }
        out
    }

    fn sub_assign(&mut self, other: &Tensor, factor: &Q) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= factor * b;
        }
    }
}

fn increasing(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, p, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, 0, &mut Vec::new(), &mut out);
    out
}

struct Calculus<'a> {
    alg: &'a ExactAlgebra,
    nabla: Vec<Q>,
}

impl<'a> Calculus<'a> {
    fn new(alg: &'a ExactAlgebra) -> Self {
        Self {
            alg,
            nabla: alg.connection(),
        }
    }

    fn d(&self, eta: &Tensor) -> Tensor {
        let n = self.alg.n;
        let mut out = Tensor::zero(n, eta.p + 1);
        for flat in 0..out.data.len() {
            let t = out.tuple(flat);
            let mut acc = Q::zero();
            for a in 0..t.len() {
                for b in a + 1..t.len() {
                    let rest: Vec<usize> = (0..t.len()).filter(|&k| k != a && k != b).map(|k| t[k]).collect();
                    let mut args = vec![0];
                    args.extend(rest);
                    let mut term = Q::zero();
                    for m in 0..n {
                        let c = self.alg.c(t[a], t[b], m);
                        if !c.is_zero() {
                            args[0] = m;
                            term += c * eta.at(&args);
                        }
                    }
                    if (a + b) % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
            out.data[flat] = acc;
        }
        out
    }

    /// `(∇_{e_i}η)(y_1..y_p) = −Σ_k η(…, ∇_{e_i} y_k, …)`.
    fn nabla_form(&self, i: usize, eta: &Tensor) -> Tensor {
        let n = self.alg.n;
        let mut out = Tensor::zero(n, eta.p);
        for flat in 0..out.data.len() {
            let t = out.tuple(flat);
            let mut acc = Q::zero();
            let mut args = t.clone();
            for k in 0..t.len() {
                for m in 0..n {
                    let coeff = &self.nabla[(i * n + t[k]) * n + m];
                    if !coeff.is_zero() {
                        args[k] = m;
                        acc += coeff * eta.at(&args);
                    }
                }
                args[k] = t[k];
            }
            out.data[flat] = -acc;
        }
        out
    }

    fn interior(&self, i: usize, eta: &Tensor) -> Tensor {
        let n = self.alg.n;
        let mut out = Tensor::zero(n, eta.p - 1);
        for flat in 0..out.data.len() {
            let mut args = vec![i];
            args.extend(out.tuple(flat));
            out.data[flat] = eta.at(&args).clone();
        }
        out
    }

    /// `−Σ_{ij} G^{ij} ι_{e_j} ∇_{e_i} η`.
    fn dstar(&self, eta: &Tensor) -> Tensor {
        let n = self.alg.n;
        let mut out = Tensor::zero(n, eta.p - 1);
        for i in 0..n {
            let nab = self.nabla_form(i, eta);
            for j in 0..n {
                let g = &self.alg.ginv[i][j];
                if !g.is_zero() {
                    out.sub_assign(&self.interior(j, &nab), g);
                }
            }
        }
        out
    }

    /// `e_i♭ ∧ β` with the determinant convention.
    fn flat_wedge(&self, i: usize, beta: &Tensor) -> Tensor {
        let n = self.alg.n;
        let mut out = Tensor::zero(n, beta.p + 1);
        for flat in 0..out.data.len() {
            let t = out.tuple(flat);
            let mut acc = Q::zero();
            for a in 0..t.len() {
                let g = &self.alg.g[i][t[a]];
                if g.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = (0..t.len()).filter(|&k| k != a).map(|k| t[k]).collect();
                let term = g * beta.at(&rest);
                if a % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            out.data[flat] = acc;
        }
        out
    }

    fn rows(&self, eta: &Tensor, kind: FormKind) -> Vec<Q> {
        let n = self.alg.n;
        let p = eta.p;
        let mut rows = Vec::new();
        if kind == FormKind::Parallel {
            for i in 0..n {
                rows.extend(self.nabla_form(i, eta).data);
            }
            return rows;
        }
        let d = self.d(eta);
        let ds = self.dstar(eta);
        let a = Q::new(BigInt::from(1), BigInt::from((p + 1) as i64));
        let b = Q::new(BigInt::from(1), BigInt::from((n - p + 1) as i64));
        for i in 0..n {
            let mut term = self.nabla_form(i, eta);
            term.sub_assign(&self.interior(i, &d), &a);
            term.sub_assign(&self.flat_wedge(i, &ds), &(-b.clone()));
            rows.extend(term.data);
        }
        match kind {
            FormKind::Ky => rows.extend(ds.data),
            FormKind::StarKy => rows.extend(d.data),
            _ => {}
        }
        rows
    }
}

/// Exact dimension of the solution space of the given kind in degree `p`
/// (`1 ≤ p ≤ n−1`).
pub fn nullity(alg: &ExactAlgebra, p: usize, kind: FormKind) -> usize {
    let n = alg.n;
    assert!(p >= 1 && p < n, "degree out of range");
    let calc = Calculus::new(alg);
    // One row per unknown: rank of the transposed system.
    let system: Vec<Vec<Q>> = increasing(n, p)
        .iter()
        .map(|idx| calc.rows(&Tensor::unit(n, idx), kind))
        .collect();
    system.len() - rank(system)
}

/// Brackets of `h ⊕_μ ℝξ` with `μ(x, y) = −2⟨S⁻¹x, y⟩` and ξ appended as the
/// last basis vector. `h_c` holds the `m³` structure constants of `h`, `s`
/// the matrix of `S` acting on column vectors. `None` if `S` is singular.
pub fn central_extension(h_c: &[Q], h_g: &[Vec<Q>], s: &[Vec<Q>]) -> Option<Vec<Q>> {
    let m = h_g.len();
    let s_inv = inverse(s)?;
    let n = m + 1;
    let mut c = vec![Q::zero(); n * n * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                c[(i * n + j) * n + k] = h_c[(i * m + j) * m + k].clone();
            }
            // ⟨S⁻¹e_i, e_j⟩ = Σ_k (S⁻¹)_{ki} G_{kj}
            let ip = (0..m).fold(Q::zero(), |acc, k| acc + &s_inv[k][i] * &h_g[k][j]);
            c[(i * n + j) * n + m] = q(-2) * ip;
        }
    }
    Some(c)
}

/// Largest `|a − b|` entrywise, as a float (zero means exact agreement).
pub fn max_abs_diff(a: &[Q], b: &[Q]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rationalizes_simple_values() {
        assert_eq!(rationalize(0.5), Some(frac(1, 2)));
        assert_eq!(rationalize(-1.5), Some(frac(-3, 2)));
        assert_eq!(rationalize(4.0 / 9.0), Some(frac(4, 9)));
        assert_eq!(rationalize(0.0), Some(frac(0, 1)));
        assert_eq!(rationalize(2f64.sqrt()), None);
        assert_eq!(rationalize(std::f64::consts::PI), None);
        assert_eq!(rationalize(2.0 / 27f64.sqrt()), None);
        assert_eq!(rationalize(0.1 + 0.2), Some(frac(3, 10)));
    }

    #[test]
    fn rank_and_inverse() {
        let rows = vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(0)]];
        assert_eq!(rank(rows), 1);
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(inverse(&[vec![q(1), q(1)], vec![q(1), q(1)]]).is_none());
    }

    #[test]
    fn unit_tensor_signs() {
        let t = Tensor::unit(3, &[0, 2]);
        assert_eq!(t.at(&[0, 2]), &q(1));
        assert_eq!(t.at(&[2, 0]), &q(-1));
        assert_eq!(t.at(&[0, 1]), &q(0));
    }

    #[test]
    fn abelian_nullities() {
        let n = 5;
        let g = (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect();
        let a = ExactAlgebra::new(n, vec![Q::zero(); n * n * n], g).unwrap();
        for kind in FormKind::ALL {
            assert_eq!(nullity(&a, 2, kind), 10);
        }
    }

    #[test]
    fn heisenberg_extension_brackets() {
        // abelian ℝ⁴ with S = J(1, 1) on (e1, f1, e2, f2)
        let m = 4;
        let g: Vec<Vec<Q>> = (0..m).map(|i| (0..m).map(|j| q((i == j) as i64)).collect()).collect();
        let mut s = vec![vec![q(0); m]; m];
        s[1][0] = q(1);
        s[0][1] = q(-1);
        s[3][2] = q(1);
        s[2][3] = q(-1);
        let c = central_extension(&vec![Q::zero(); m * m * m], &g, &s).unwrap();
        let n = 5;
        assert_eq!(c[n + 4], q(2)); // [e1, f1] = 2ξ
        assert_eq!(c[n * n + 4], q(-2));
        assert_eq!(c[(2 * n + 3) * n + 4], q(2));
    }
}
