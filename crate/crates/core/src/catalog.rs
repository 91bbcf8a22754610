//! Named, parametrized metric Lie algebras together with their reference CKY
//! 2-forms and the dimensions the theory predicts for them.
//!
//! Families with a one-dimensional center (`g3 … h5`) are written in the
//! `E_1 … E_5` basis; each also has a description as a central extension of a
//! 4-dimensional metric Lie algebra carrying a parallel skew endomorphism
//! ([`table1_ingredients`]), related to the `E` basis by a fixed relabeling.
//! `grs` is the normal form for a two-dimensional center; `L59`, `su2xR2` and
//! `sl2xR2` are the same algebras in adapted bases.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connection::levi_civita;
use crate::error::{Error, Result};
use crate::forms::{self, PForm};
use crate::liealg::{Bracket, Endo, MetricLieAlgebra, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FamilyId {
    G3,
    G2,
    G8Lambda,
    G4,
    G5,
    G6,
    G7Delta,
    H5,
    Grs,
    L59,
    Su2xR2,
    Sl2xR2,
    Dim3Center,
    Abelian,
}

impl FamilyId {
    pub const ALL: [FamilyId; 14] = [
        Self::G3,
        Self::G2,
        Self::G8Lambda,
        Self::G4,
        Self::G5,
        Self::G6,
        Self::G7Delta,
        Self::H5,
        Self::Grs,
        Self::L59,
        Self::Su2xR2,
        Self::Sl2xR2,
        Self::Dim3Center,
        Self::Abelian,
    ];

    /// Families whose center is spanned by the associated vector.
    pub const CENTRAL: [FamilyId; 8] = [
        Self::G3,
        Self::G2,
        Self::G8Lambda,
        Self::G4,
        Self::G5,
        Self::G6,
        Self::G7Delta,
        Self::H5,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::G3 => "g3",
            Self::G2 => "g2",
            Self::G8Lambda => "g8_lambda",
            Self::G4 => "g4",
            Self::G5 => "g5",
            Self::G6 => "g6",
            Self::G7Delta => "g7_delta",
            Self::H5 => "h5",
            Self::Grs => "grs",
            Self::L59 => "L59",
            Self::Su2xR2 => "su2xR2",
            Self::Sl2xR2 => "sl2xR2",
            Self::Dim3Center => "dim3center",
            Self::Abelian => "abelian",
        }
    }

    /// Parameter names with their defaults.
    pub fn parameters(&self) -> &'static [(&'static str, f64)] {
        match self {
            Self::G3 | Self::G2 => &[("t", 1.0), ("a1", 1.0), ("a2", 2.0)],
            Self::G8Lambda => &[("t", 1.0), ("a1", 1.0), ("a2", 2.0), ("lambda", 1.0)],
            Self::G4 => &[("t", 1.0), ("a1", 1.0), ("a2", 2.0), ("s", 0.5)],
            Self::G5 | Self::G6 => &[("t", 1.0), ("c", 1.0)],
            Self::G7Delta => &[("t", 1.0), ("c", 1.0), ("delta", 1.0)],
            Self::H5 => &[("a1", 1.0), ("a2", 1.0)],
            Self::Grs => &[("r", 1.0), ("s", 2.0)],
            Self::L59 => &[("r", 1.0)],
            Self::Su2xR2 => &[("r", 1.0), ("s", 2.0)],
            Self::Sl2xR2 => &[("r", 2.0), ("s", 1.0)],
            Self::Dim3Center => &[("a1", 0.0), ("a2", 0.0), ("a3", 2.0), ("a4", 1.0), ("a5", 1.0)],
            Self::Abelian => &[],
        }
    }

    pub fn constraints(&self) -> &'static str {
        match self {
            Self::G3 | Self::G2 => "t, a1, a2 > 0",
            Self::G8Lambda => "t, a1, a2, lambda > 0",
            Self::G4 => "t, a1, a2 > 0; 0 < s <= 1; a1 >= a2 when s = 1",
            Self::G5 | Self::G6 => "t, c > 0",
            Self::G7Delta => "t, delta > 0; c != 0",
            Self::H5 => "a1, a2 > 0",
            Self::Grs => "r, s > 0",
            Self::L59 => "r > 0",
            Self::Su2xR2 => "s > r > 0",
            Self::Sl2xR2 => "r > s > 0",
            Self::Dim3Center => "(a1, ..., a5) != 0",
            Self::Abelian => "none",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::G3 => "R x e(2) extended by a central xi",
            Self::G2 => "R^2 x aff(R) extended by a central xi",
            Self::G8Lambda => "r'_{4,lambda,0} extended by a central xi",
            Self::G4 => "aff(R) x aff(R) extended by a central xi",
            Self::G5 => "d_{4,1/2} extended by a central xi",
            Self::G6 => "d_{4,2} extended by a central xi",
            Self::G7Delta => "d'_{4,delta/2} extended by a central xi",
            Self::H5 => "Heisenberg algebra R^4 extended by a central xi",
            Self::Grs => "two-dimensional center normal form g_{r,s}",
            Self::L59 => "g_{r,r} as the 3-step nilpotent L_{5,9}",
            Self::Su2xR2 => "g_{r,s}, s > r, as R^2 x su(2)",
            Self::Sl2xR2 => "g_{r,s}, r > s, as R^2 x sl(2,R)",
            Self::Dim3Center => "three-dimensional center, one bracket [x, xi]",
            Self::Abelian => "abelian R^5",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|id| id.as_str() == s)
            .copied()
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub params: BTreeMap<String, f64>,
}

/// Parses `a/b` fractions as well as plain numbers.
fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    match text.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => text.parse().ok(),
    }
}

impl FamilySpec {
    /// All parameters at their defaults.
    pub fn new(id: FamilyId) -> Self {
        Self {
            id,
            params: id.parameters().iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    /// Overrides from a list of `(name, value)` pairs.
    pub fn with(id: FamilyId, overrides: &[(&str, f64)]) -> Result<Self> {
        let mut spec = Self::new(id);
        for &(k, v) in overrides {
            spec.set(k, v)?;
        }
        Ok(spec)
    }

    /// Overrides from `"k=v,k=v"`; values may be fractions such as `1/2`.
    pub fn parse(id: FamilyId, params: &str) -> Result<Self> {
        let mut spec = Self::new(id);
        for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected name=value, got '{part}'")))?;
            let value = parse_number(v).ok_or_else(|| Error::Input(format!("bad number '{v}' for {k}")))?;
            spec.set(k.trim(), value)?;
        }
        Ok(spec)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.params.contains_key(name) {
            return Err(Error::Input(format!("family {} has no parameter '{name}'", self.id)));
        }
        if !value.is_finite() {
            return Err(Error::Constraint(format!("{name} must be finite")));
        }
        self.params.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.params[name]
    }
}

/// Dimensions and flags predicted by the theory. `None` means no claim.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Expected {
    pub cky2: Option<usize>,
    pub ky2: Option<usize>,
    pub starky2: Option<usize>,
    pub parallel2: Option<usize>,
    pub cky3: Option<usize>,
    pub ky3: Option<usize>,
    pub starky3: Option<usize>,
    pub strict: Option<bool>,
    pub closed: Option<bool>,
    pub xi_in_center: Option<bool>,
    pub xi_perp_center: Option<bool>,
}

impl Expected {
    fn central() -> Self {
        Self {
            cky2: Some(1),
            ky2: Some(0),
            starky2: Some(1),
            parallel2: Some(0),
            // Hodge duality: CKY² ≅ CKY³, KY² ≅ *KY³, *KY² ≅ KY³
            cky3: Some(1),
            ky3: Some(1),
            starky3: Some(0),
            strict: Some(true),
            closed: Some(true),
            xi_in_center: Some(true),
            xi_perp_center: Some(false),
        }
    }

    fn two_dim_center() -> Self {
        Self {
            cky2: Some(1),
            ky2: Some(0),
            starky2: Some(0),
            parallel2: Some(0),
            cky3: Some(1),
            ky3: Some(0),
            starky3: Some(0),
            strict: Some(true),
            closed: Some(false),
            xi_in_center: Some(false),
            xi_perp_center: Some(true),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub spec: Option<FamilySpec>,
    pub algebra: MetricLieAlgebra,
    pub reference_form: Option<PForm>,
    pub expected: Expected,
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn positive(spec: &FamilySpec, names: &[&str]) -> Result<()> {
    for &n in names {
        if spec.get(n) <= 0.0 {
            return Err(Error::Constraint(format!("{n} must be positive (got {})", spec.get(n))));
        }
    }
    Ok(())
}

fn form(n: usize, terms: &[(&[usize], f64)]) -> PForm {
    let mut w = PForm::zero(n, 2);
    for (idx, v) in terms {
        w.add_term(idx, *v);
    }
    w
}

fn algebra(names: &[&str], brackets: &[Bracket], gram: DMatrix<f64>) -> Result<MetricLieAlgebra> {
    MetricLieAlgebra::from_brackets(labels(names), brackets, gram, ToleranceConfig::default())
}

const E: [&str; 5] = ["E1", "E2", "E3", "E4", "E5"];

fn b(i: usize, j: usize, terms: &[(usize, f64)]) -> Bracket {
    Bracket::new(i, j, terms)
}

pub fn build_family(spec: &FamilySpec) -> Result<FamilyInstance> {
    let p = |n: &str| spec.get(n);
    let diag = |d: &[f64]| DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d));
    let (alg, w, expected) = match spec.id {
        FamilyId::G3 => {
            positive(spec, &["t", "a1", "a2"])?;
            let (t, a1, a2) = (p("t"), p("a1"), p("a2"));
            let alg = algebra(
                &E,
                &[b(0, 1, &[(2, -1.0)]), b(0, 2, &[(1, 1.0)]), b(0, 3, &[(4, -1.0)]), b(1, 2, &[(4, -1.0)])],
                diag(&[t, t, t, a1 * a1 * t / (a2 * a2), 4.0 * t * t / (a2 * a2)]),
            )?;
            let w = form(5, &[(&[0, 3], a1 * a1 * t / a2), (&[1, 2], a2 * t)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G2 => {
            positive(spec, &["t", "a1", "a2"])?;
            let (t, a1, a2) = (p("t"), p("a1"), p("a2"));
            let alg = algebra(
                &E,
                &[b(0, 1, &[(1, 1.0), (4, -1.0)]), b(2, 3, &[(4, -1.0)])],
                diag(&[t, t, a1 * a1 * t, t / (a2 * a2), 4.0 * t * t / (a2 * a2)]),
            )?;
            let w = form(5, &[(&[0, 1], t * a2), (&[2, 3], t * a1 * a1 / a2)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G8Lambda => {
            positive(spec, &["t", "a1", "a2", "lambda"])?;
            let (t, a1, a2, l) = (p("t"), p("a1"), p("a2"), p("lambda"));
            let alg = algebra(
                &E,
                &[
                    b(0, 3, &[(0, -1.0), (4, -1.0)]),
                    b(1, 2, &[(4, -1.0)]),
                    b(1, 3, &[(2, 1.0 / l)]),
                    b(2, 3, &[(1, -1.0 / l)]),
                ],
                diag(&[(a1 * l / a2).powi(2) * t, t, t, t / (l * l), 4.0 * t * t / (a2 * a2)]),
            )?;
            let w = form(5, &[(&[0, 3], -a1 * a1 * t / a2), (&[1, 2], -a2 * t)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G4 => {
            positive(spec, &["t", "a1", "a2", "s"])?;
            let (t, a1, a2, s) = (p("t"), p("a1"), p("a2"), p("s"));
            if s > 1.0 {
                return Err(Error::Constraint(format!("s must be at most 1 (got {s})")));
            }
            if s == 1.0 && a1 < a2 {
                return Err(Error::Constraint("a1 >= a2 is required when s = 1".into()));
            }
            let alg = algebra(
                &E,
                &[b(0, 1, &[(1, 1.0), (4, -1.0)]), b(2, 3, &[(3, 1.0), (4, -1.0)])],
                diag(&[t, t * a1 * a1, t * s, t * a2 * a2 / s, 4.0 * t * t]),
            )?;
            let w = form(5, &[(&[0, 1], t * a1 * a1), (&[2, 3], t * a2 * a2)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G5 => {
            positive(spec, &["t", "c"])?;
            let (t, c) = (p("t"), p("c"));
            let alg = algebra(
                &E,
                &[
                    b(0, 1, &[(2, 1.0), (4, -1.0)]),
                    b(0, 3, &[(0, -0.5)]),
                    b(1, 3, &[(1, -0.5)]),
                    b(2, 3, &[(2, -1.0), (4, 1.0)]),
                ],
                diag(&[t, t, t, t, 4.0 * t * t / (c * c)]),
            )?;
            let w = form(5, &[(&[0, 1], t * c), (&[2, 3], -t * c)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G6 => {
            positive(spec, &["t", "c"])?;
            let (t, c) = (p("t"), p("c"));
            let q = 4.0 * t * t / (c * c);
            let mut g = diag(&[t + q, t, t, 4.0 * t, q]);
            g[(0, 4)] = q;
            g[(4, 0)] = q;
            let alg = algebra(
                &E,
                &[
                    b(0, 1, &[(2, 1.0)]),
                    b(0, 3, &[(0, -2.0)]),
                    b(1, 2, &[(4, -1.0)]),
                    b(1, 3, &[(1, 1.0)]),
                    b(2, 3, &[(2, -1.0)]),
                ],
                g,
            )?;
            let w = form(5, &[(&[0, 3], 2.0 * t * c), (&[1, 2], t * c)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::G7Delta => {
            positive(spec, &["t", "delta"])?;
            let (t, c, d) = (p("t"), p("c"), p("delta"));
            if c == 0.0 {
                return Err(Error::Constraint("c must be non-zero".into()));
            }
            let alg = algebra(
                &E,
                &[
                    b(0, 1, &[(2, 1.0), (4, -1.0)]),
                    b(0, 3, &[(0, -d / 2.0), (1, 1.0)]),
                    b(1, 3, &[(0, -1.0), (1, -d / 2.0)]),
                    b(2, 3, &[(2, -d), (4, d)]),
                ],
                diag(&[t, t, t, d * d * t, 4.0 * t * t / (c * c)]),
            )?;
            let w = form(5, &[(&[0, 1], t * c), (&[2, 3], -t * c * d)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::H5 => {
            positive(spec, &["a1", "a2"])?;
            let (a1, a2) = (p("a1"), p("a2"));
            let alg = algebra(
                &E,
                &[b(0, 1, &[(4, 1.0)]), b(2, 3, &[(4, 1.0)])],
                diag(&[a1 * a1, 1.0 / (a2 * a2), 1.0, 1.0, 4.0 / (a2 * a2)]),
            )?;
            let w = form(5, &[(&[0, 1], a1 * a1 / a2), (&[2, 3], a2)]);
            (alg, Some(w), Expected::central())
        }
        FamilyId::Grs => {
            positive(spec, &["r", "s"])?;
            let (alg, w) = grs(p("r"), p("s"))?;
            (alg, Some(w), Expected::two_dim_center())
        }
        FamilyId::L59 => {
            positive(spec, &["r"])?;
            let r = p("r");
            let alg = algebra(
                &["E", "Z1", "Z2", "X", "Y"],
                &[b(3, 0, &[(1, 1.0)]), b(4, 0, &[(2, 1.0)]), b(3, 4, &[(0, 1.0)])],
                diag(&[r * r, r.powi(4), r.powi(4), 1.0, 1.0]),
            )?;
            let w = form(
                5,
                &[(&[1, 2], 6.0 * r.powi(3)), (&[1, 3], -2.0 * r), (&[2, 4], -2.0 * r), (&[3, 4], 4.0 / r)],
            );
            (alg, Some(w), Expected::two_dim_center())
        }
        FamilyId::Su2xR2 | FamilyId::Sl2xR2 => {
            positive(spec, &["r", "s"])?;
            let (r, s) = (p("r"), p("s"));
            let compact = spec.id == FamilyId::Su2xR2;
            if compact && s <= r {
                return Err(Error::Constraint(format!("su2xR2 needs s > r (got r={r}, s={s})")));
            }
            if !compact && r <= s {
                return Err(Error::Constraint(format!("sl2xR2 needs r > s (got r={r}, s={s})")));
            }
            let a4 = (s * s - r * r) / s;
            let cube = a4.abs().powi(3) * s;
            let k = r / cube.sqrt();
            let m = (r * r + a4 * a4) / cube;
            let mut g = diag(&[1.0 / (a4 * a4), 1.0, 1.0, m, m]);
            g[(1, 3)] = k;
            g[(3, 1)] = k;
            let g24 = if compact { -k } else { k };
            g[(2, 4)] = g24;
            g[(4, 2)] = g24;
            let xy = if compact { 1.0 } else { -1.0 };
            let alg = algebra(
                &["E", "Z1", "Z2", "X", "Y"],
                &[b(0, 3, &[(4, 1.0)]), b(3, 4, &[(0, xy)]), b(4, 0, &[(3, 1.0)])],
                g,
            )?;
            let gap = (s * s - r * r).abs();
            let mixed = 6.0 * r / gap.powf(1.5);
            let top = 2.0 * (s * s + 2.0 * r * r) / (r * r * s);
            let bottom = -2.0 * (s.powi(4) + 2.0 * r.powi(4)) / (s * (s * s - r * r).powi(3));
            let w = if compact {
                form(5, &[(&[1, 2], top), (&[1, 4], -mixed), (&[2, 3], -mixed), (&[3, 4], bottom)])
            } else {
                form(5, &[(&[1, 2], top), (&[1, 4], mixed), (&[2, 3], -mixed), (&[3, 4], bottom)])
            };
            (alg, Some(w), Expected::two_dim_center())
        }
        FamilyId::Dim3Center => {
            let a: Vec<f64> = (1..=5).map(|i| p(&format!("a{i}"))).collect();
            if a.iter().all(|&v| v == 0.0) {
                return Err(Error::Constraint("the bracket [x, xi] must be non-zero".into()));
            }
            // basis (xi, z1, z2, z3, x); [x, xi] = a1 x + a2 xi + a3 z1 + a4 z2 + a5 z3
            let alg = algebra(
                &["xi", "z1", "z2", "z3", "x"],
                &[b(4, 0, &[(4, a[0]), (0, a[1]), (1, a[2]), (2, a[3]), (3, a[4])])],
                DMatrix::identity(5, 5),
            )?;
            let expected = Expected {
                strict: Some(false),
                ..Expected::default()
            };
            (alg, None, expected)
        }
        FamilyId::Abelian => {
            let expected = Expected {
                cky2: Some(10),
                ky2: Some(10),
                starky2: Some(10),
                parallel2: Some(10),
                cky3: Some(10),
                ky3: Some(10),
                starky3: Some(10),
                strict: Some(false),
                closed: Some(true),
                ..Expected::default()
            };
            (MetricLieAlgebra::abelian(5), None, expected)
        }
    };
    Ok(FamilyInstance {
        spec: Some(spec.clone()),
        algebra: alg,
        reference_form: w,
        expected,
    })
}

/// `g_{r,s}` in the orthonormal basis `(ξ, z1, z2, x, y)` with its CKY form.
fn grs(r: f64, s: f64) -> Result<(MetricLieAlgebra, PForm)> {
    let a4 = (s * s - r * r) / s;
    let alg = algebra(
        &["xi", "z1", "z2", "x", "y"],
        &[b(0, 3, &[(1, r), (4, a4)]), b(0, 4, &[(2, r), (3, -a4)]), b(3, 4, &[(0, s)])],
        DMatrix::identity(5, 5),
    )?;
    let w = form(
        5,
        &[
            (&[1, 2], 2.0 * (s * s + 2.0 * r * r) / (r * r * s)),
            (&[1, 3], 2.0 / r),
            (&[2, 4], 2.0 / r),
            (&[3, 4], 4.0 / s),
        ],
    );
    Ok((alg, w))
}

/// Skew endomorphism `e1 ↦ a1 f1, f1 ↦ −a1 e1, e2 ↦ a2 f2, f2 ↦ −a2 e2` on
/// the ordered basis `(e1, f1, e2, f2)`.
pub fn complex_structure(a1: f64, a2: f64) -> Endo {
    let mut s = Endo::zeros(4, 4);
    s[(1, 0)] = a1;
    s[(0, 1)] = -a1;
    s[(3, 2)] = a2;
    s[(2, 3)] = -a2;
    s
}

/// A 4-dimensional metric Lie algebra with a parallel skew endomorphism `S`,
/// and the matrix whose columns are `E_1 … E_5` written in the basis
/// `(e1, f1, e2, f2, ξ)` of the central extension.
#[derive(Debug, Clone)]
pub struct Ingredients {
    pub h: MetricLieAlgebra,
    pub s: Endo,
    pub relabel: DMatrix<f64>,
}

const H: [&str; 4] = ["e1", "f1", "e2", "f2"];

pub fn table1_ingredients(spec: &FamilySpec) -> Result<Ingredients> {
    let p = |n: &str| spec.get(n);
    let id = DMatrix::<f64>::identity(4, 4);
    let rows = |r: [[f64; 5]; 5]| DMatrix::from_fn(5, 5, |i, j| r[j][i]);
    let (brackets, gram, s, relabel) = match spec.id {
        FamilyId::G3 => {
            positive(spec, &["t", "a1", "a2"])?;
            let (t, a1, a2) = (p("t"), p("a1"), p("a2"));
            (
                vec![b(0, 2, &[(3, -1.0)]), b(0, 3, &[(2, 1.0)])],
                id * t,
                complex_structure(a1, a2),
                rows([
                    [1.0, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, a1 / a2, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t / a2],
                ]),
            )
        }
        FamilyId::G2 => {
            positive(spec, &["t", "a1", "a2"])?;
            let (t, a1, a2) = (p("t"), p("a1"), p("a2"));
            (
                vec![b(2, 3, &[(3, 1.0)])],
                id * t,
                complex_structure(a1, a2),
                rows([
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [a1, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0 / a2, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t / a2],
                ]),
            )
        }
        FamilyId::G8Lambda => {
            positive(spec, &["t", "a1", "a2", "lambda"])?;
            let (t, a1, a2, l) = (p("t"), p("a1"), p("a2"), p("lambda"));
            (
                vec![b(0, 1, &[(1, l)]), b(0, 3, &[(2, -1.0)]), b(0, 2, &[(3, 1.0)])],
                id * t,
                complex_structure(a1, a2),
                rows([
                    [0.0, l * a1 / a2, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [1.0 / l, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, 2.0 * t / a2],
                ]),
            )
        }
        FamilyId::G4 => {
            positive(spec, &["t", "a1", "a2", "s"])?;
            let (t, a1, a2, s) = (p("t"), p("a1"), p("a2"), p("s"));
            (
                vec![b(0, 1, &[(1, 1.0)]), b(2, 3, &[(3, 1.0)])],
                DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[t, t, t * s, t * s])),
                complex_structure(a1, a2),
                rows([
                    [1.0, 0.0, 0.0, 0.0, 0.0],
                    [0.0, a1, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, a2 / s, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t],
                ]),
            )
        }
        FamilyId::G5 => {
            positive(spec, &["t", "c"])?;
            let (t, c) = (p("t"), p("c"));
            (
                vec![
                    b(0, 1, &[(1, 1.0)]),
                    b(0, 2, &[(2, 0.5)]),
                    b(0, 3, &[(3, 0.5)]),
                    b(2, 3, &[(1, 1.0)]),
                ],
                id * t,
                complex_structure(c, c),
                rows([
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t / c],
                ]),
            )
        }
        FamilyId::G6 => {
            positive(spec, &["t", "c"])?;
            let (t, c) = (p("t"), p("c"));
            (
                vec![
                    b(0, 1, &[(0, -1.0)]),
                    b(0, 2, &[(3, 1.0)]),
                    b(1, 2, &[(2, -0.5)]),
                    b(1, 3, &[(3, 0.5)]),
                ],
                id * t,
                complex_structure(c, c),
                rows([
                    [1.0, 0.0, 0.0, 0.0, -2.0 * t / c],
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, 2.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t / c],
                ]),
            )
        }
        FamilyId::G7Delta => {
            positive(spec, &["t", "delta"])?;
            let (t, c, d) = (p("t"), p("c"), p("delta"));
            if c == 0.0 {
                return Err(Error::Constraint("c must be non-zero".into()));
            }
            (
                vec![
                    b(0, 1, &[(1, 1.0)]),
                    b(0, 2, &[(2, 0.5), (3, -1.0 / d)]),
                    b(0, 3, &[(2, 1.0 / d), (3, 0.5)]),
                    b(2, 3, &[(1, 1.0)]),
                ],
                id * t,
                complex_structure(c, c),
                rows([
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0, 0.0],
                    [d, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, -2.0 * t / c],
                ]),
            )
        }
        FamilyId::H5 => {
            positive(spec, &["a1", "a2"])?;
            let (a1, a2) = (p("a1"), p("a2"));
            (
                vec![],
                id,
                complex_structure(a1, a2),
                rows([
                    [a1, 0.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0 / a2, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0, 2.0 / a2],
                ]),
            )
        }
        other => {
            return Err(Error::Input(format!("{other} is not a central-extension family")));
        }
    };
    let h = algebra(&H, &brackets, gram)?;
    Ok(Ingredients { h, s, relabel })
}

/// `h ⊕_μ ℝξ` with `μ(x, y) = −2⟨S⁻¹x, y⟩`, `⟨h, ξ⟩ = 0` and `‖ξ‖ = xi_norm`;
/// the reference form is that of `T = S ⊕ 0`. ξ is the last basis vector.
pub fn central_extension(h: &MetricLieAlgebra, s: &Endo, xi_norm: f64) -> Result<FamilyInstance> {
    let m = h.dim();
    if m != 4 {
        return Err(Error::Input(format!("expected a 4-dimensional algebra, got dimension {m}")));
    }
    if s.nrows() != m || s.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: s.nrows() });
    }
    if xi_norm.is_nan() || xi_norm <= 0.0 {
        return Err(Error::Constraint("xi_norm must be positive".into()));
    }
    let tol = h.tol().residual;
    let scale = s.amax().max(1.0);
    let s_inv = match s.clone().try_inverse() {
        Some(inv) if s.determinant().abs() > 1e-12 * scale.powi(m as i32) => inv,
        _ => return Err(Error::SingularEndomorphism),
    };
    let gs = h.gram() * s;
    let skew = (&gs + gs.transpose()).amax();
    if skew > tol * scale {
        return Err(Error::NotSkew(skew));
    }
    let conn = levi_civita(h);
    let nabla_s = (0..m)
        .map(|i| conn.covariant_derivative(&h.basis_vector(i), s).amax())
        .fold(0.0, f64::max);
    if nabla_s > tol * scale {
        return Err(Error::NotParallel(nabla_s));
    }
    // μ(e_i, e_j) = −2⟨S⁻¹e_i, e_j⟩ = −2 (S⁻ᵀ G)_{ij}
    let mu_matrix = s_inv.transpose() * h.gram() * -2.0;
    let mut mu = PForm::zero(m, 2);
    for i in 0..m {
        for j in i + 1..m {
            mu.add_term(&[i, j], mu_matrix[(i, j)]);
        }
    }
    let dmu = forms::exterior_derivative(h, &mu).amax();
    if dmu > tol * mu.amax().max(1.0) {
        return Err(Error::NotClosed(dmu));
    }

    let n = m + 1;
    let mut structure = vec![0.0; n * n * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                structure[(i * n + j) * n + k] = h.c(i, j, k);
            }
            structure[(i * n + j) * n + m] = mu_matrix[(i, j)];
        }
    }
    let mut gram = DMatrix::zeros(n, n);
    gram.view_mut((0, 0), (m, m)).copy_from(h.gram());
    gram[(m, m)] = xi_norm * xi_norm;
    let mut names = h.labels().to_vec();
    names.push("xi".into());
    let alg = MetricLieAlgebra::new(names, structure, gram, *h.tol())?;
    let mut t = Endo::zeros(n, n);
    t.view_mut((0, 0), (m, m)).copy_from(s);
    let w = forms::two_form_from_endo(&alg, &t);
    Ok(FamilyInstance {
        spec: None,
        algebra: alg,
        reference_form: Some(w),
        expected: Expected::central(),
    })
}

/// The example extension of `ℝ × e(2)` with metric `t·Id` and `S = J(a1, a2)`.
pub fn example_extension(t: f64, a1: f64, a2: f64) -> Result<FamilyInstance> {
    let spec = FamilySpec::with(FamilyId::G3, &[("t", t), ("a1", a1), ("a2", a2)])?;
    let ing = table1_ingredients(&spec)?;
    central_extension(&ing.h, &ing.s, 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct RelabelCheck {
    pub family: FamilyId,
    pub bracket_residual: f64,
    pub metric_residual: f64,
    pub form_residual: f64,
}

/// Builds the family both ways (central extension, then relabeling; and
/// directly) and compares structure constants, Gram matrices and forms.
pub fn relabel_check(spec: &FamilySpec) -> Result<RelabelCheck> {
    let ing = table1_ingredients(spec)?;
    let ext = central_extension(&ing.h, &ing.s, 1.0)?;
    let moved = ext.algebra.change_basis(&ing.relabel, labels(&E))?;
    let direct = build_family(spec)?;
    let bracket_residual = moved
        .structure()
        .iter()
        .zip(direct.algebra.structure())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let metric_residual = (moved.gram() - direct.algebra.gram()).amax();
    let pulled = ext.reference_form.as_ref().expect("extension has a form").pullback(&ing.relabel);
    let reference = direct.reference_form.expect("family has a form");
    let form_residual = pulled.sub(&reference).amax() / reference.amax();
    Ok(RelabelCheck {
        family: spec.id,
        bracket_residual,
        metric_residual,
        form_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisChangeReport {
    pub r: f64,
    pub s: f64,
    pub regime: FamilyId,
    pub a4: f64,
    pub bracket_residual: f64,
    pub metric_residual: f64,
    /// Pulled-back `g_{r,s}` form against the target's form, relative.
    pub form_residual: f64,
    /// `⟨E, E⟩` of the transformed metric.
    pub corner: f64,
    /// `⟨Z1, X⟩` of the transformed metric.
    pub off_diagonal: f64,
}

/// Moves `g_{r,s}` to the adapted basis of its isomorphism type and compares
/// against the directly built target.
pub fn basis_change_verify(r: f64, s: f64) -> Result<BasisChangeReport> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::Constraint("r and s must be positive".into()));
    }
    let (source, w) = grs(r, s)?;
    let a4 = (s * s - r * r) / s;
    // columns: new basis (E, Z1, Z2, X, Y) in (ξ, z1, z2, x, y) coordinates
    let mut p = DMatrix::zeros(5, 5);
    let regime = if (r - s).abs() <= 1e-12 * r.max(s) {
        p[(0, 0)] = r;
        p[(1, 1)] = -r * r;
        p[(2, 2)] = -r * r;
        p[(3, 3)] = 1.0;
        p[(4, 4)] = 1.0;
        FamilyId::L59
    } else {
        let root = (a4.abs().powi(3) * s).sqrt();
        // X̄ = r z1 + a4 y, Ȳ = r z2 − a4 x
        let (e, y_sign, regime) = if s > r {
            (-1.0 / a4, -1.0, FamilyId::Su2xR2)
        } else {
            (1.0 / a4, 1.0, FamilyId::Sl2xR2)
        };
        p[(0, 0)] = e;
        p[(1, 1)] = 1.0;
        p[(2, 2)] = 1.0;
        p[(1, 3)] = r / root;
        p[(4, 3)] = a4 / root;
        p[(2, 4)] = y_sign * r / root;
        p[(3, 4)] = -y_sign * a4 / root;
        regime
    };
    let moved = source.change_basis(&p, labels(&["E", "Z1", "Z2", "X", "Y"]))?;
    let target_spec = match regime {
        FamilyId::L59 => FamilySpec::with(FamilyId::L59, &[("r", r)])?,
        id => FamilySpec::with(id, &[("r", r), ("s", s)])?,
    };
    let target = build_family(&target_spec)?;
    let bracket_residual = moved
        .structure()
        .iter()
        .zip(target.algebra.structure())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let metric_residual = (moved.gram() - target.algebra.gram()).amax();
    let reference = target.reference_form.expect("target has a form");
    let form_residual = w.pullback(&p).sub(&reference).amax() / reference.amax();
    Ok(BasisChangeReport {
        r,
        s,
        regime,
        a4,
        bracket_residual,
        metric_residual,
        form_residual,
        corner: moved.gram()[(0, 0)],
        off_diagonal: moved.gram()[(1, 3)],
    })
}

/// Fixed-seed parameter draws for the three-dimensional-center family:
/// half-integers in `[−3/2, 3/2]`, never all zero, so the exact oracle
/// applies.
pub fn dim3center_draws(count: usize, seed: u64) -> Vec<[f64; 5]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let draw: [f64; 5] = std::array::from_fn(|_| rng.random_range(-3i32..=3) as f64 / 2.0);
        if draw.iter().any(|&v| v != 0.0) {
            out.push(draw);
        }
    }
    out
}

pub fn dim3center_spec(a: &[f64; 5]) -> FamilySpec {
    let pairs: Vec<(String, f64)> = (0..5).map(|i| (format!("a{}", i + 1), a[i])).collect();
    let refs: Vec<(&str, f64)> = pairs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    FamilySpec::with(FamilyId::Dim3Center, &refs).expect("known parameters")
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
    pub constraints: &'static str,
    pub description: &'static str,
}

pub fn catalog_list() -> Vec<CatalogEntry> {
    FamilyId::ALL
        .iter()
        .map(|id| CatalogEntry {
            id: id.as_str(),
            parameters: id.parameters().to_vec(),
            constraints: id.constraints(),
            description: id.description(),
        })
        .collect()
}

/// Parameter samples used by the verification sweeps.
pub fn sample_specs(id: FamilyId) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    match id {
        FamilyId::G3 | FamilyId::G2 | FamilyId::G8Lambda | FamilyId::G4 => {
            for t in [1.0, 2.0] {
                for a1 in [1.0, 3.0] {
                    let mut pairs = vec![("t", t), ("a1", a1), ("a2", 2.0)];
                    match id {
                        FamilyId::G8Lambda => pairs.push(("lambda", 1.0)),
                        FamilyId::G4 => pairs.push(("s", if a1 >= 2.0 { 1.0 } else { 0.5 })),
                        _ => {}
                    }
                    out.push(FamilySpec::with(id, &pairs).expect("valid sample"));
                }
            }
        }
        FamilyId::G5 | FamilyId::G6 => {
            for t in [1.0, 2.0] {
                out.push(FamilySpec::with(id, &[("t", t), ("c", 1.0)]).expect("valid sample"));
            }
        }
        FamilyId::G7Delta => {
            for t in [1.0, 2.0] {
                out.push(FamilySpec::with(id, &[("t", t), ("c", 1.0), ("delta", 1.0)]).expect("valid sample"));
            }
        }
        FamilyId::H5 => {
            for a1 in [1.0, 3.0] {
                out.push(FamilySpec::with(id, &[("a1", a1), ("a2", 2.0)]).expect("valid sample"));
            }
        }
        FamilyId::Grs => {
            for (r, s) in GRS_SAMPLES {
                out.push(FamilySpec::with(id, &[("r", r), ("s", s)]).expect("valid sample"));
            }
        }
        FamilyId::L59 => {
            for r in [1.0, 2.0] {
                out.push(FamilySpec::with(id, &[("r", r)]).expect("valid sample"));
            }
        }
        FamilyId::Su2xR2 => out.push(FamilySpec::with(id, &[("r", 1.0), ("s", 2.0)]).expect("valid sample")),
        FamilyId::Sl2xR2 => out.push(FamilySpec::with(id, &[("r", 2.0), ("s", 1.0)]).expect("valid sample")),
        FamilyId::Dim3Center | FamilyId::Abelian => out.push(FamilySpec::new(id)),
    }
    out
}

pub const GRS_SAMPLES: [(f64, f64); 4] = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (0.5, 1.5)];
