use ckylab::catalog::{self, build_family, FamilyId, FamilySpec};
use ckylab::cky::{self, FormKind};
use ckylab::exact::{self, ExactAlgebra};
use ckylab::forms::{self, PForm};
use ckylab::{holonomy_algebra, levi_civita, MetricLieAlgebra, Vector};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn family(id: FamilyId, params: &str) -> catalog::FamilyInstance {
    build_family(&FamilySpec::parse(id, params).unwrap()).unwrap()
}

fn samples() -> Vec<MetricLieAlgebra> {
    FamilyId::ALL
        .iter()
        .flat_map(|&id| catalog::sample_specs(id))
        .map(|s| build_family(&s).unwrap().algebra)
        .collect()
}

fn span_dim(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(vectors);
    ckylab::linalg::rank(&m, 1e-10).rank
}

fn random_orthogonal(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_column_slice(n, n, &entries[..n * n]) + DMatrix::identity(n, n) * 3.0;
    a.qr().q()
}

fn basis_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("b{i}")).collect()
}

#[test]
fn center_of_l59_is_z1_z2() {
    let a = family(FamilyId::L59, "r=1").algebra;
    let center = a.center();
    assert_eq!(center.len(), 2);
    for z in &center {
        // no E, X, Y components
        assert!(z[0].abs() < 1e-12 && z[3].abs() < 1e-12 && z[4].abs() < 1e-12);
    }
}

#[test]
fn derived_algebras() {
    let grs = family(FamilyId::Grs, "r=1,s=1").algebra;
    let derived = grs.derived_algebra();
    assert_eq!(derived.len(), 3);
    // spans ξ, z1, z2
    for v in &derived {
        assert!(v[3].abs() < 1e-12 && v[4].abs() < 1e-12);
    }
    let h5 = family(FamilyId::H5, "a1=1,a2=1").algebra;
    assert_eq!(h5.derived_algebra().len(), 1);
    assert!(MetricLieAlgebra::abelian(5).derived_algebra().is_empty());
}

#[test]
fn unimodularity() {
    assert!(family(FamilyId::Grs, "r=1,s=2").algebra.is_unimodular());
    assert!(!family(FamilyId::G2, "").algebra.is_unimodular());
    let g2 = family(FamilyId::G2, "").algebra;
    assert!((g2.ad_basis(0).trace() - 1.0).abs() < 1e-15);
}

#[test]
fn xi_is_geodesic_in_grs() {
    let a = family(FamilyId::Grs, "r=1,s=2").algebra;
    let conn = levi_civita(&a);
    assert!(conn.nabla(0).column(0).amax() < 1e-15);
}

#[test]
fn covariant_derivative_of_t_is_a_commutator() {
    let inst = family(FamilyId::Grs, "r=1,s=2");
    let a = &inst.algebra;
    let t = forms::endo_from_two_form(a, inst.reference_form.as_ref().unwrap());
    let conn = levi_civita(a);
    let xi = a.basis_vector(0);
    let n = conn.nabla(0);
    let expected = n * &t - &t * n;
    let got = conn.covariant_derivative(&xi, &t);
    assert!((&got - &expected).amax() < 1e-14);
    assert!(got.amax() > 1e-3);
}

#[test]
fn example_parallel_tensor() {
    let ing = catalog::table1_ingredients(&FamilySpec::parse(FamilyId::G3, "t=2,a1=3,a2=2").unwrap()).unwrap();
    let conn = levi_civita(&ing.h);
    for i in 0..4 {
        assert!(conn.covariant_derivative(&ing.h.basis_vector(i), &ing.s).amax() < 1e-14);
    }
}

#[test]
fn curvature_identities_on_catalog() {
    let mut seed = 1u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for a in samples() {
        let n = a.dim();
        let conn = levi_civita(&a);
        let mut v = || Vector::from_fn(n, |_, _| next());
        let (x, y, z, w) = (v(), v(), v(), v());
        let rxy = conn.curvature(&x, &y);
        assert!((&rxy + conn.curvature(&y, &x)).amax() < 1e-12);
        let g = a.gram();
        assert!((g * &rxy + (g * &rxy).transpose()).amax() < 1e-10);
        let bianchi = &rxy * &z + conn.curvature(&y, &z) * &x + conn.curvature(&z, &x) * &y;
        assert!(bianchi.amax() < 1e-10);
        let lhs = a.inner(&(&rxy * &z), &w);
        let rhs = a.inner(&(conn.curvature(&z, &w) * &x), &y);
        assert!((lhs - rhs).abs() < 1e-9);
    }
    let grs = family(FamilyId::Grs, "r=1,s=1").algebra;
    assert!(levi_civita(&grs).curvature_basis(3, 4).amax() > 1e-3);
}

#[test]
fn flat_algebra_has_trivial_holonomy() {
    let h = holonomy_algebra(&MetricLieAlgebra::abelian(5));
    assert_eq!(h.dimension, 0);
    assert!(h.converged);
}

#[test]
fn table1_form_codifferential_and_closedness() {
    let h = catalog::central_extension(&MetricLieAlgebra::abelian(4), &catalog::complex_structure(1.0, 1.0), 1.0).unwrap();
    let a = &h.algebra;
    let w = h.reference_form.as_ref().unwrap();
    assert!(forms::exterior_derivative(a, w).amax() < 1e-14);
    let dstar = forms::codifferential(&levi_civita(a), w);
    let target = forms::flat(a, &a.basis_vector(4)).scale(-4.0);
    assert!(dstar.sub(&target).amax() < 1e-13);
}

#[test]
fn hodge_dual_of_grs_form_is_cky() {
    let inst = family(FamilyId::Grs, "r=1,s=2");
    let a = &inst.algebra;
    let star = forms::hodge_star(a, inst.reference_form.as_ref().unwrap());
    assert_eq!(star.degree(), 3);
    assert!(cky::cky_residual(a, &star) < 1e-12);
}

#[test]
fn interior_of_wedge_in_orthonormal_basis() {
    let a = family(FamilyId::Grs, "r=1,s=2").algebra;
    let x = forms::flat(&a, &a.basis_vector(3));
    let y = forms::flat(&a, &a.basis_vector(4));
    let got = x.wedge(&y).interior(&a.basis_vector(3));
    assert!(got.sub(&y).amax() < 1e-15);
}

#[test]
fn subspace_inclusions_and_hodge_transport() {
    for a in samples() {
        for p in [2, 3] {
            let spaces: Vec<_> = FormKind::ALL.iter().map(|&k| cky::solve_form_space(&a, p, k).unwrap()).collect();
            let by = |k: FormKind| spaces.iter().find(|s| s.kind == k).unwrap();
            let inside = |small: FormKind, big: FormKind| {
                by(small).basis.iter().map(|b| by(big).projection_residual(&a, b)).fold(0.0, f64::max)
            };
            assert!(inside(FormKind::Parallel, FormKind::Ky) < 1e-9);
            assert!(inside(FormKind::Ky, FormKind::Cky) < 1e-9);
            assert!(inside(FormKind::StarKy, FormKind::Cky) < 1e-9);
            for s in &spaces {
                assert!(s.max_residual < 1e-9);
            }
            // * maps CKY^p to CKY^{n-p} and KY^p into *KY^{n-p}
            let other = |k| cky::solve_form_space(&a, a.dim() - p, k).unwrap();
            let (cky_dual, star_dual) = (other(FormKind::Cky), other(FormKind::StarKy));
            for b in &by(FormKind::Cky).basis {
                let s = forms::hodge_star(&a, b);
                let r = cky_dual.projection_residual(&a, &s);
                assert!(r < 1e-9, "{:?} gram={} p={p} r={r} cky={} dual={} res={}", a.labels(), a.gram(), by(FormKind::Cky).dim(), cky_dual.dim(), cky::cky_residual(&a, &s));
            }
            for b in &by(FormKind::Ky).basis {
                let r = star_dual.projection_residual(&a, &forms::hodge_star(&a, b));
                assert!(r < 1e-9, "{:?} p={p} r={r} ky={} starky_dual={} d={}", a.labels(), by(FormKind::Ky).dim(), star_dual.dim(), forms::exterior_derivative(&a, &forms::hodge_star(&a, b)).amax());
            }
        }
    }
}

#[test]
fn strictness_dichotomy() {
    for a in samples() {
        let cky2 = cky::solve_form_space(&a, 2, FormKind::Cky).unwrap();
        let ky2 = cky::solve_form_space(&a, 2, FormKind::Ky).unwrap();
        for b in &cky2.basis {
            let c = cky::extract_associated_vector(&a, b).unwrap();
            if c.is_strict {
                assert_eq!(a.dim() % 2, 1);
                assert_eq!(c.restricted_rank, Some(a.dim() - 1));
                assert!(c.t_xi_residual < 1e-10);
            } else {
                assert!(ky2.projection_residual(&a, b) < 1e-9);
            }
        }
    }
}

#[test]
fn zero_form_is_nonstrict_parallel() {
    let a = family(FamilyId::Grs, "").algebra;
    let c = cky::extract_associated_vector(&a, &PForm::zero(5, 2)).unwrap();
    assert!(!c.is_strict && c.parallel);
}

fn rational_bases() -> Vec<MetricLieAlgebra> {
    vec![
        family(FamilyId::H5, "a1=1,a2=2").algebra,
        family(FamilyId::Grs, "r=1,s=1").algebra,
        family(FamilyId::G5, "").algebra,
        family(FamilyId::Dim3Center, "a1=1,a2=-1/2").algebra,
        family(FamilyId::G7Delta, "delta=2").algebra,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn center_lies_in_every_kernel(which in 0usize..5, x in prop::collection::vec(-2.0f64..2.0, 5)) {
        let a = &rational_bases()[which];
        let x = Vector::from_vec(x);
        for z in a.center() {
            prop_assert!(a.bracket(&x, &z).unwrap().amax() <= a.tol().residual);
        }
    }

    #[test]
    fn derived_dimension_is_basis_invariant(which in 0usize..5, e in prop::collection::vec(-1.0f64..1.0, 25)) {
        let a = &rational_bases()[which];
        let p = random_orthogonal(5, &e);
        let b = a.change_basis(&p, basis_labels(5)).unwrap();
        prop_assert_eq!(span_dim(&a.derived_algebra()), span_dim(&b.derived_algebra()));
        prop_assert_eq!(a.center().len(), b.center().len());
    }

    #[test]
    fn holonomy_and_cky_dimension_are_basis_invariant(which in 0usize..4, e in prop::collection::vec(-1.0f64..1.0, 25)) {
        let a = [
            family(FamilyId::Grs, "r=1,s=2").algebra,
            family(FamilyId::L59, "r=1").algebra,
            family(FamilyId::H5, "a1=1,a2=1").algebra,
            family(FamilyId::Dim3Center, "").algebra,
        ][which].clone();
        // identity metrics, so an orthogonal change keeps the basis orthonormal
        let p = random_orthogonal(5, &e);
        let b = a.change_basis(&p, basis_labels(5)).unwrap();
        prop_assert_eq!(holonomy_algebra(&a).dimension, holonomy_algebra(&b).dimension);
        for k in FormKind::ALL {
            prop_assert_eq!(
                cky::solve_form_space(&a, 2, k).unwrap().dim(),
                cky::solve_form_space(&b, 2, k).unwrap().dim()
            );
        }
    }

    #[test]
    fn float_and_exact_dimensions_agree(
        which in 0usize..5,
        diag in prop::collection::vec(1i32..5, 5),
        kind in 0usize..4,
    ) {
        // rescale the metric by positive half-integers: a rational input
        let base = &rational_bases()[which];
        let mut g = base.gram().clone();
        for i in 0..5 {
            for j in 0..5 {
                g[(i, j)] *= (diag[i] as f64 / 2.0) * (diag[j] as f64 / 2.0);
            }
        }
        let a = MetricLieAlgebra::new(base.labels().to_vec(), base.structure().to_vec(), g, *base.tol()).unwrap();
        let e = ExactAlgebra::from_float(&a).expect("rational input");
        let kind = FormKind::ALL[kind];
        prop_assert_eq!(cky::solve_form_space(&a, 2, kind).unwrap().dim(), exact::nullity(&e, 2, kind));
    }
}
