//! Linear systems for conformal Killing-Yano, Killing-Yano, closed CKY and
//! parallel p-forms, plus the geometry of the associated vector of a CKY
//! 2-form.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::connection::{levi_civita, Connection};
use crate::error::{Error, Result};
use crate::forms::{self, PForm};
use crate::liealg::{Endo, MetricLieAlgebra, Vector};
use crate::linalg::{self, RankReport};
use crate::multi_index::{binomial, combinations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `∇_xη − ι_x dη/(p+1) + x♭ ∧ d*η/(n−p+1) = 0`.
    General,
    /// `⟨(∇_xT)y,z⟩ + ⟨(∇_yT)x,z⟩ = 2⟨x,y⟩θ(z) − ⟨y,z⟩θ(x) − ⟨x,z⟩θ(y)`,
    /// 2-forms only, with `θ = −d*ω/(n−1)`.
    Symmetrized,
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Self::General),
            "symmetrized" => Ok(Self::Symmetrized),
            other => Err(Error::Input(format!("unknown formulation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Cky,
    /// Co-closed CKY.
    Ky,
    /// Closed CKY.
    StarKy,
    Parallel,
}

impl FormKind {
    pub const ALL: [FormKind; 4] = [Self::Cky, Self::Ky, Self::StarKy, Self::Parallel];
}

impl FromStr for FormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cky" => Ok(Self::Cky),
            "ky" => Ok(Self::Ky),
            "star-ky" | "star_ky" | "starky" => Ok(Self::StarKy),
            "parallel" => Ok(Self::Parallel),
            other => Err(Error::Input(format!("unknown kind '{other}'"))),
        }
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cky => "cky",
            Self::Ky => "ky",
            Self::StarKy => "star-ky",
            Self::Parallel => "parallel",
        })
    }
}

fn check_degree(algebra: &MetricLieAlgebra, p: usize) -> Result<()> {
    let n = algebra.dim();
    if p == 0 || p >= n {
        return Err(Error::InvalidDegree { degree: p, dim: n });
    }
    Ok(())
}

/// Matrix of a linear map on p-forms, one column per unit monomial.
fn operator_matrix(n: usize, p: usize, op: impl Fn(&PForm) -> Vec<f64>) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = combinations(n, p)
        .iter()
        .map(|idx| op(&PForm::monomial(n, idx, 1.0)))
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

fn general_rows(conn: &Connection<'_>, eta: &PForm) -> Vec<f64> {
    let algebra = conn.algebra();
    let n = algebra.dim();
    let p = eta.degree();
    let d = forms::exterior_derivative(algebra, eta);
    let dstar = forms::codifferential(conn, eta);
    let mut out = Vec::new();
    for i in 0..n {
        let x = algebra.basis_vector(i);
        let term = forms::covariant_derivative_form(conn, &x, eta)
            .sub(&d.interior(&x).scale(1.0 / (p + 1) as f64))
            .add(&forms::flat(algebra, &x).wedge(&dstar).scale(1.0 / (n - p + 1) as f64));
        out.extend_from_slice(term.coeffs());
    }
    out
}

fn symmetrized_rows(conn: &Connection<'_>, omega: &PForm) -> Vec<f64> {
    let algebra = conn.algebra();
    let n = algebra.dim();
    let g = algebra.gram();
    let theta = forms::codifferential(conn, omega).scale(-1.0 / (n - 1) as f64);
    let th = theta.coeffs();
    let nabla: Vec<PForm> = (0..n)
        .map(|i| forms::covariant_derivative_form(conn, &algebra.basis_vector(i), omega))
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                // ⟨(∇_x T)y, z⟩ = (∇_x ω)(y, z) since ∇ is metric.
                let lhs = nabla[i].get(&[j, k]) + nabla[j].get(&[i, k]);
                let rhs = 2.0 * g[(i, j)] * th[k] - g[(j, k)] * th[i] - g[(i, k)] * th[j];
                out.push(lhs - rhs);
            }
        }
    }
    out
}

/// Coefficient matrix of the CKY condition on p-forms. Columns follow the
/// lexicographic multi-index order.
pub fn assemble_cky_system(algebra: &MetricLieAlgebra, p: usize, formulation: Formulation) -> Result<DMatrix<f64>> {
    check_degree(algebra, p)?;
    let conn = levi_civita(algebra);
    let n = algebra.dim();
    match formulation {
        Formulation::General => Ok(operator_matrix(n, p, |eta| general_rows(&conn, eta))),
        Formulation::Symmetrized if p == 2 => Ok(operator_matrix(n, p, |w| symmetrized_rows(&conn, w))),
        Formulation::Symmetrized => Err(Error::InvalidFormulation(p)),
    }
}

/// Full system for a kind: CKY rows plus the extra constraint rows.
pub fn assemble_system(algebra: &MetricLieAlgebra, p: usize, kind: FormKind) -> Result<DMatrix<f64>> {
    check_degree(algebra, p)?;
    let conn = levi_civita(algebra);
    let n = algebra.dim();
    Ok(operator_matrix(n, p, |eta| system_rows(&conn, eta, kind)))
}

fn system_rows(conn: &Connection<'_>, eta: &PForm, kind: FormKind) -> Vec<f64> {
    let algebra = conn.algebra();
    match kind {
        FormKind::Parallel => (0..algebra.dim())
            .flat_map(|i| {
                forms::covariant_derivative_form(conn, &algebra.basis_vector(i), eta)
                    .coeffs()
                    .to_vec()
            })
            .collect(),
        FormKind::Cky => general_rows(conn, eta),
        FormKind::Ky => {
            let mut rows = general_rows(conn, eta);
            rows.extend_from_slice(forms::codifferential(conn, eta).coeffs());
            rows
        }
        FormKind::StarKy => {
            let mut rows = general_rows(conn, eta);
            rows.extend_from_slice(forms::exterior_derivative(algebra, eta).coeffs());
            rows
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub degree: usize,
    pub kind: FormKind,
    /// Orthonormal in the form inner product, deterministic for a given space.
    pub basis: Vec<PForm>,
    pub system_rank: usize,
    pub sv_gap: f64,
    pub rank_report: RankReport,
    /// Largest `|A v|` over the basis coefficient vectors `v`.
    pub max_residual: f64,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `‖η − Pη‖ / ‖η‖` with `P` the orthogonal projection onto the span,
    /// in the form norm. Zero for `η = 0`.
    pub fn projection_residual(&self, algebra: &MetricLieAlgebra, eta: &PForm) -> f64 {
        let norm = forms::form_norm(algebra, eta);
        if norm == 0.0 {
            return 0.0;
        }
        let mut rest = eta.clone();
        for b in &self.basis {
            rest = rest.sub(&b.scale(forms::form_inner(algebra, eta, b)));
        }
        forms::form_norm(algebra, &rest) / norm
    }

    /// Coefficient vectors as columns.
    pub fn matrix(&self, dim: usize) -> DMatrix<f64> {
        let rows = binomial(dim, self.degree);
        DMatrix::from_fn(rows, self.basis.len(), |r, c| self.basis[c].coeffs()[r])
    }
}

/// Gram matrix of the form inner product on the monomial basis of p-forms.
pub fn coefficient_gram(algebra: &MetricLieAlgebra, p: usize) -> DMatrix<f64> {
    let n = algebra.dim();
    let frame = algebra.frame();
    let cols: Vec<Vec<f64>> = combinations(n, p)
        .iter()
        .map(|idx| PForm::monomial(n, idx, 1.0).pullback(frame).coeffs().to_vec())
        .collect();
    let c = DMatrix::from_fn(cols.first().map_or(0, Vec::len), cols.len(), |r, k| cols[k][r]);
    c.transpose() * c
}

pub fn solve_form_space(algebra: &MetricLieAlgebra, p: usize, kind: FormKind) -> Result<SolutionSpace> {
    let system = assemble_system(algebra, p, kind)?;
    Ok(solve_system(algebra, p, kind, &system))
}

fn solve_system(algebra: &MetricLieAlgebra, p: usize, kind: FormKind, system: &DMatrix<f64>) -> SolutionSpace {
    let n = algebra.dim();
    let (null, report) = linalg::nullspace(system, algebra.tol().rank_rel);
    let vectors = canonical_basis(&null, &coefficient_gram(algebra, p));
    let max_residual = vectors.iter().map(|v| (system * v).amax()).fold(0.0, f64::max);
    SolutionSpace {
        degree: p,
        kind,
        basis: vectors
            .into_iter()
            .map(|v| PForm::from_coeffs(n, p, v.iter().copied().collect()))
            .collect(),
        system_rank: report.rank,
        sv_gap: report.sv_gap,
        rank_report: report,
        max_residual,
    }
}

/// Projects the unit coefficient vectors, in lexicographic order, onto the
/// span of `null`, orthonormalizes them in the inner product `m` and makes
/// the first significant coefficient of each positive. The result depends
/// only on the subspace.
fn canonical_basis(null: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<Vector> {
    let k = null.ncols();
    if k == 0 {
        return Vec::new();
    }
    let small = null.transpose() * m * null;
    let small_inv = small.try_inverse().expect("form Gram matrix is positive-definite");
    let projector = null * small_inv * null.transpose() * m;
    let dim = null.nrows();
    let mut out: Vec<Vector> = Vec::with_capacity(k);
    for i in 0..dim {
        if out.len() == k {
            break;
        }
        let candidate = projector.column(i).into_owned();
        // A unit vector M-orthogonal to the span projects to rounding noise,
        // which must not be normalized into a basis vector.
        let size = candidate.dot(&(m * &candidate)).sqrt();
        if size <= 1e-8 * m[(i, i)].sqrt() {
            continue;
        }
        let mut all = out.clone();
        all.push(candidate);
        let next = linalg::gram_schmidt(&all, m, 1e-8);
        if next.len() > out.len() {
            out = next;
        }
    }
    for v in &mut out {
        let scale = v.amax();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-9 * scale).copied() {
            if first < 0.0 {
                *v = -v.clone();
            }
        }
    }
    out
}

/// Relative size of the CKY operator on `η`: `max |rows| / max |coeff|`.
pub fn cky_residual(algebra: &MetricLieAlgebra, eta: &PForm) -> f64 {
    let scale = eta.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let conn = levi_civita(algebra);
    general_rows(&conn, eta).iter().fold(0.0_f64, |m, v| m.max(v.abs())) / scale
}

#[derive(Debug, Clone, Serialize)]
pub struct CkyClassification {
    pub is_strict: bool,
    #[serde(skip)]
    pub theta: PForm,
    #[serde(skip)]
    pub xi: Vector,
    pub xi_norm: f64,
    pub closed: bool,
    pub coclosed: bool,
    pub parallel: bool,
    /// Only meaningful for strict forms; false otherwise.
    pub xi_in_center: bool,
    /// Only meaningful for strict forms; false otherwise.
    pub xi_perp_center: bool,
    /// `|Tξ|` relative to `‖ω‖`.
    pub t_xi_residual: f64,
    /// Rank of `T` restricted to `ξ⊥` (strict forms only).
    pub restricted_rank: Option<usize>,
    /// Norm of the projection of `ξ/|ξ|` onto the derived algebra.
    pub derived_projection: f64,
    pub cky_residual: f64,
    /// `max |dω|`, `max |d*ω|` and `max_i |∇_{e_i}ω|`, relative to `‖ω‖`.
    pub d_norm: f64,
    pub dstar_norm: f64,
    pub nabla_norm: f64,
}

/// θ = −d*ω/(n−1), ξ = θ♯ and the flags derived from them. Flags compare
/// quantities relative to the form norm of `ω` against `tol.residual`.
pub fn extract_associated_vector(algebra: &MetricLieAlgebra, omega: &PForm) -> Result<CkyClassification> {
    let n = algebra.dim();
    if omega.degree() != 2 || omega.dim() != n {
        return Err(Error::Input("expected a 2-form on the algebra".into()));
    }
    let tol = algebra.tol().residual;
    let residual = cky_residual(algebra, omega);
    if residual > tol {
        return Err(Error::NotCky(residual));
    }
    let conn = levi_civita(algebra);
    let norm = forms::form_norm(algebra, omega);
    if norm == 0.0 {
        return Ok(CkyClassification {
            is_strict: false,
            theta: PForm::zero(n, 1),
            xi: Vector::zeros(n),
            xi_norm: 0.0,
            closed: true,
            coclosed: true,
            parallel: true,
            xi_in_center: false,
            xi_perp_center: false,
            t_xi_residual: 0.0,
            restricted_rank: None,
            derived_projection: 0.0,
            cky_residual: 0.0,
            d_norm: 0.0,
            dstar_norm: 0.0,
            nabla_norm: 0.0,
        });
    }
    let dstar = forms::codifferential(&conn, omega);
    let theta = dstar.scale(-1.0 / (n - 1) as f64);
    let xi = forms::sharp(algebra, &theta);
    let xi_norm = algebra.norm(&xi);
    let d_norm = forms::exterior_derivative(algebra, omega).amax() / norm;
    let dstar_norm = dstar.amax() / norm;
    let nabla_norm = (0..n)
        .map(|i| forms::covariant_derivative_form(&conn, &algebra.basis_vector(i), omega).amax())
        .fold(0.0, f64::max)
        / norm;
    let is_strict = xi_norm / norm > tol;
    let t = forms::endo_from_two_form(algebra, omega);
    let t_xi_residual = algebra.norm(&(&t * &xi)) / norm;

    let (mut xi_in_center, mut xi_perp_center) = (false, false);
    let mut restricted_rank = None;
    let mut derived_projection = 0.0;
    if is_strict {
        let unit = &xi / xi_norm;
        let center = algebra.orthonormalize(&algebra.center());
        let along_center = projection_norm(algebra, &unit, &center);
        xi_in_center = (1.0 - along_center * along_center).max(0.0).sqrt() <= tol.sqrt();
        xi_perp_center = along_center <= tol;
        let complement = algebra.orthogonal_complement(std::slice::from_ref(&unit));
        let tw = DMatrix::from_fn(n, complement.len(), |r, c| (&t * &complement[c])[r]);
        restricted_rank = Some(linalg::rank(&tw, algebra.tol().rank_rel).rank);
        let derived = algebra.orthonormalize(&algebra.derived_algebra());
        derived_projection = projection_norm(algebra, &unit, &derived);
    }
    Ok(CkyClassification {
        is_strict,
        theta,
        xi,
        xi_norm,
        closed: d_norm <= tol,
        coclosed: dstar_norm <= tol,
        parallel: nabla_norm <= tol,
        xi_in_center,
        xi_perp_center,
        t_xi_residual,
        restricted_rank,
        derived_projection,
        cky_residual: residual,
        d_norm,
        dstar_norm,
        nabla_norm,
    })
}

/// Norm of the projection of `v` onto the span of `G`-orthonormal `basis`.
fn projection_norm(algebra: &MetricLieAlgebra, v: &Vector, basis: &[Vector]) -> f64 {
    basis
        .iter()
        .map(|b| algebra.inner(v, b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identities: Vec<IdentityResidual>,
    /// `|ξ| = 1` within tolerance; the identities assume a unit ξ.
    pub xi_unit: bool,
    pub xi_perp_center: bool,
    pub t_skew_residual: f64,
    pub t_xi_residual: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Evaluates the identities a strict CKY tensor must satisfy when the
/// center has dimension at least two, over bases of the relevant subspaces:
/// `𝔷`, `𝔷⊥` and `W = 𝔷⊥ ∩ ξ⊥`. Together with `Tξ = 0`, skewness and a unit
/// ξ orthogonal to the center, passing them certifies that `T` is strict CKY.
pub fn structural_identity_report(algebra: &MetricLieAlgebra, t: &Endo, xi: &Vector) -> Result<IdentityReport> {
    let n = algebra.dim();
    if t.nrows() != n || t.ncols() != n || xi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi.len(),
        });
    }
    let center = algebra.orthonormalize(&algebra.center());
    if center.len() < 2 {
        return Err(Error::CenterTooSmall(center.len()));
    }
    let tol = algebra.tol().residual;
    let conn = levi_civita(algebra);
    let z_perp = algebra.orthogonal_complement(&center);
    let mut with_xi = center.clone();
    if algebra.norm(xi) > 0.0 {
        with_xi.push(xi.clone());
    }
    let w = algebra.orthogonal_complement(&with_xi);

    let ip = |a: &Vector, b: &Vector| algebra.inner(a, b);
    let br = |a: &Vector, b: &Vector| algebra.bracket_unchecked(a, b);
    let theta = |x: &Vector| ip(xi, x);
    let tv = |x: &Vector| t * x;

    let mut ids = Vec::new();
    let mut push = |name: &'static str, residual: f64| ids.push(IdentityResidual { name, residual });

    // ⟨[x,Tz1],z2⟩ = ⟨[x,Tz2],z1⟩ = 2⟨z1,z2⟩θ(x)
    let mut r: f64 = 0.0;
    for x in &z_perp {
        for z1 in &center {
            for z2 in &center {
                let a = ip(&br(x, &tv(z1)), z2);
                let b = ip(&br(x, &tv(z2)), z1);
                let c = 2.0 * ip(z1, z2) * theta(x);
                r = r.max((a - c).abs()).max((b - c).abs());
            }
        }
    }
    push("central_pair", r);

    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    for z in &center {
        let tz = tv(z);
        for x in &z_perp {
            for y in &z_perp {
                let e1 = ip(&br(x, &tv(y)), z) + 2.0 * ip(&br(&tz, x), y) + 2.0 * ip(&br(&tz, y), x)
                    + ip(&br(y, &tv(x)), z);
                let e2 = -ip(&br(&tz, x), y) - ip(&br(&tz, y), x) + ip(&br(y, x), &tz) + 2.0 * ip(&br(&tv(y), x), z)
                    - ip(&br(&tv(x), y), z);
                r1 = r1.max(e1.abs());
                r2 = r2.max(e2.abs());
            }
        }
    }
    push("central_mixed_sym", r1);
    push("central_mixed_skew", r2);

    let (mut r1, mut r2, mut r3): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for x in &w {
        let tx = tv(x);
        r3 = r3.max(ip(&br(xi, &tx), xi).abs());
        for y in &w {
            let ty = tv(y);
            let e1 = ip(&br(xi, &tx), y) - ip(&br(&tx, y), xi) + ip(&br(y, xi), &tx) + 2.0 * ip(&br(&ty, xi), x)
                + 2.0 * ip(&br(&ty, x), xi)
                + 2.0 * ip(x, y);
            let e2 = ip(&br(x, &ty), xi) - ip(&br(&ty, xi), x) + ip(&br(xi, x), &ty) + ip(&br(y, &tx), xi)
                - ip(&br(&tx, xi), y)
                + ip(&br(xi, y), &tx)
                - 4.0 * ip(x, y);
            r1 = r1.max(e1.abs());
            r2 = r2.max(e2.abs());
        }
    }
    push("xi_pair_first", r1);
    push("xi_pair_second", r2);
    push("xi_xi", r3);

    let mut r: f64 = 0.0;
    let nabla_t: Vec<Endo> = w.iter().map(|x| conn.covariant_derivative(x, t)).collect();
    for (a, x) in w.iter().enumerate() {
        for (b, y) in w.iter().enumerate() {
            for z in &w {
                let v = ip(&(&nabla_t[a] * y), z) + ip(&(&nabla_t[b] * x), z);
                r = r.max(v.abs());
            }
        }
    }
    push("killing_on_w", r);

    // Specializations: orthogonal central pairs and the diagonal case.
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    for x in &z_perp {
        for (i, z1) in center.iter().enumerate() {
            for (j, z2) in center.iter().enumerate() {
                if i != j {
                    r1 = r1.max(ip(&br(&tv(z1), x), z2).abs());
                }
            }
            let v = ip(&br(&tv(z1), x), z1) + 2.0 * ip(z1, z1) * theta(x);
            r2 = r2.max(v.abs());
        }
    }
    push("central_orthogonal", r1);
    push("central_diagonal", r2);

    let xi_norm = algebra.norm(xi);
    let xi_unit = (xi_norm - 1.0).abs() <= tol.sqrt();
    let along_center = projection_norm(algebra, xi, &center);
    let xi_perp_center = xi_norm > 0.0 && along_center <= tol * xi_norm.max(1.0);
    let gt = algebra.gram() * t;
    let t_skew_residual = (&gt + gt.transpose()).amax();
    let t_xi_residual = algebra.norm(&(t * xi));
    let passed = xi_unit
        && xi_perp_center
        && t_skew_residual <= tol
        && t_xi_residual <= tol
        && ids.iter().all(|r| r.residual <= tol);
    Ok(IdentityReport {
        identities: ids,
        xi_unit,
        xi_perp_center,
        t_skew_residual,
        t_xi_residual,
        passed,
    })
}
