//! Dense numerical linear algebra on small matrices: rank decisions,
//! nullspaces, orthonormal frames and subspace angles.

use nalgebra::{DMatrix, DVector};

/// Outcome of a rank decision on a singular-value spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Absolute threshold used for the cut.
    pub threshold: f64,
    /// Smallest kept singular value divided by the largest dropped one.
    /// Infinite when nothing non-zero was dropped, zero when nothing was kept.
    pub sv_gap: f64,
}

struct SortedSvd {
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    values: Vec<f64>,
}

/// Full SVD with the spectrum sorted in descending order; `u` and `v_t` are
/// square. Computed with faer: nalgebra's default convergence test can stop
/// early and return factors that do not reconstruct the input.
fn sorted_svd(a: &DMatrix<f64>) -> SortedSvd {
    let (rows, cols) = a.shape();
    let m = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = m.svd().expect("SVD of a finite matrix");
    let s = svd.S().column_vector();
    let raw: Vec<f64> = (0..s.nrows()).map(|k| s[k]).collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));
    let values = order.iter().map(|&k| raw[k]).collect();
    let (fu, fv) = (svd.U(), svd.V());
    // sorted columns first, then the remaining (kernel) columns unchanged
    let perm = |len: usize| -> Vec<usize> { order.iter().copied().chain(order.len()..len).collect() };
    let (pu, pv) = (perm(rows), perm(cols));
    let u = DMatrix::from_fn(rows, rows, |r, c| fu[(r, pu[c])]);
    let v_t = DMatrix::from_fn(cols, cols, |r, c| fv[(c, pv[r])]);
    SortedSvd { u, v_t, values }
}

fn decide_rank(values: &[f64], rank_rel: f64) -> RankReport {
    let largest = values.first().copied().unwrap_or(0.0);
    let threshold = rank_rel * largest;
    let rank = values.iter().filter(|&&s| s > threshold && s > 0.0).count();
    let kept = if rank > 0 { Some(values[rank - 1]) } else { None };
    let dropped = values.get(rank).copied().unwrap_or(0.0);
    let sv_gap = match kept {
        _ if dropped == 0.0 => f64::INFINITY,
        None => 0.0,
        Some(k) => k / dropped,
    };
    RankReport {
        rank,
        singular_values: values.to_vec(),
        threshold,
        sv_gap,
    }
}

pub fn rank(a: &DMatrix<f64>, rank_rel: f64) -> RankReport {
    if a.nrows() == 0 || a.ncols() == 0 {
        return decide_rank(&[], rank_rel);
    }
    decide_rank(&sorted_svd(a).values, rank_rel)
}

/// Orthonormal (Euclidean) basis of the nullspace, one column per vector.
pub fn nullspace(a: &DMatrix<f64>, rank_rel: f64) -> (DMatrix<f64>, RankReport) {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return (DMatrix::identity(cols, cols), decide_rank(&[], rank_rel));
    }
    let svd = sorted_svd(a);
    let report = decide_rank(&svd.values[..svd.values.len().min(cols)], rank_rel);
    let k = cols - report.rank;
    let basis = DMatrix::from_fn(cols, k, |r, c| svd.v_t[(report.rank + c, r)]);
    (basis, report)
}

/// Orthonormal (Euclidean) basis of the column space.
pub fn range(a: &DMatrix<f64>, rank_rel: f64) -> (DMatrix<f64>, RankReport) {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return (DMatrix::zeros(rows, 0), decide_rank(&[], rank_rel));
    }
    let svd = sorted_svd(a);
    let report = decide_rank(&svd.values, rank_rel);
    let basis = DMatrix::from_fn(rows, report.rank, |r, c| svd.u[(r, c)]);
    (basis, report)
}

/// Columns `F` with `Fᵀ G F = I`, from the Cholesky factor of `G`.
/// `None` when `G` is not symmetric positive-definite.
pub fn orthonormal_frame(gram: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = gram.clone().cholesky()?;
    let l = chol.l();
    let l_t_inv = l.transpose().try_inverse()?;
    Some(l_t_inv)
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square() && (m - m.transpose()).amax() <= tol * m.amax().max(1.0)
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns. Computed from sines so that tiny angles keep full
/// relative precision. Spans of different dimension are at angle π/2.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.transpose() * b);
    let s = sorted_svd(&residual).values.first().copied().unwrap_or(0.0);
    s.clamp(0.0, 1.0).asin()
}

/// Gram-Schmidt with respect to the inner product `⟨u, v⟩ = uᵀ G v`; vectors
/// whose remainder falls below `tol` (relative to their norm) are skipped.
pub fn gram_schmidt(vectors: &[DVector<f64>], gram: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let scale = v.dot(&(gram * v)).sqrt();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&(gram * &w));
                w -= q * c;
            }
        }
        let norm = w.dot(&(gram * &w)).sqrt();
        if norm > tol * scale {
            out.push(w / norm);
        }
    }
    out
}
