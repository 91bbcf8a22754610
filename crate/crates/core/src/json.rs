//! JSON encodings of algebras and forms.
//!
//! Algebra: `{"dim", "basis", "brackets": [{"i", "j", "coeffs"}], "metric"}`
//! with 0-based indices, plus an optional `"reference_form"`. Coefficient keys
//! are basis labels or decimal indices (a key that parses as an integer is an
//! index). Omitted brackets are zero and antisymmetric completion is automatic.
//!
//! Form: `{"degree": p, "terms": [{"index": [i_1 < … < i_p], "value"}]}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::forms::PForm;
use crate::liealg::{default_labels, Bracket, MetricLieAlgebra, ToleranceConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub index: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormJson {
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<BracketJson>,
    pub metric: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_form: Option<FormJson>,
}

pub fn form_to_json(form: &PForm) -> FormJson {
    FormJson {
        degree: form.degree(),
        terms: form
            .terms()
            .into_iter()
            .map(|(index, value)| TermJson { index, value })
            .collect(),
    }
}

pub fn form_from_json(f: &FormJson, dim: usize) -> Result<PForm> {
    if f.degree > dim {
        return Err(Error::InvalidDegree {
            degree: f.degree,
            dim,
        });
    }
    let mut out = PForm::zero(dim, f.degree);
    let mut seen = std::collections::BTreeSet::new();
    for t in &f.terms {
        if t.index.len() != f.degree {
            return Err(Error::Input(format!("term {:?} does not have {} indices", t.index, f.degree)));
        }
        if t.index.windows(2).any(|w| w[0] >= w[1]) || t.index.iter().any(|&i| i >= dim) {
            return Err(Error::Input(format!(
                "term index {:?} must be strictly increasing and below {dim}",
                t.index
            )));
        }
        if !t.value.is_finite() {
            return Err(Error::Input(format!("non-finite value at {:?}", t.index)));
        }
        if !seen.insert(t.index.clone()) {
            return Err(Error::Input(format!("duplicate term {:?}", t.index)));
        }
        out.add_term(&t.index, t.value);
    }
    Ok(out)
}

fn resolve_key(key: &str, labels: &[String]) -> Result<usize> {
    if let Ok(i) = key.trim().parse::<usize>() {
        if i < labels.len() {
            return Ok(i);
        }
        return Err(Error::Input(format!("coefficient index {i} out of range")));
    }
    labels
        .iter()
        .position(|l| l == key)
        .ok_or_else(|| Error::Input(format!("unknown basis label '{key}'")))
}

impl AlgebraJson {
    pub fn from_algebra(algebra: &MetricLieAlgebra, reference_form: Option<&PForm>) -> Self {
        let n = algebra.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let coeffs: BTreeMap<String, f64> = (0..n)
                    .filter(|&k| algebra.c(i, j, k) != 0.0)
                    .map(|k| (k.to_string(), algebra.c(i, j, k)))
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketJson { i, j, coeffs });
                }
            }
        }
        Self {
            dim: n,
            basis: Some(algebra.labels().to_vec()),
            brackets,
            metric: (0..n).map(|i| (0..n).map(|j| algebra.gram()[(i, j)]).collect()).collect(),
            reference_form: reference_form.map(form_to_json),
        }
    }

    pub fn to_algebra(&self, tol: ToleranceConfig) -> Result<(MetricLieAlgebra, Option<PForm>)> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Input("dim must be positive".into()));
        }
        let labels = match &self.basis {
            Some(b) if b.len() != n => {
                return Err(Error::Input(format!("basis has {} labels for dim {n}", b.len())));
            }
            Some(b) => b.clone(),
            None => default_labels(n),
        };
        if self.metric.len() != n || self.metric.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!("metric must be {n}×{n}")));
        }
        let gram = DMatrix::from_fn(n, n, |i, j| self.metric[i][j]);

        // Dense (i, j) table to catch duplicates and inconsistent pairs.
        let mut table: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for b in &self.brackets {
            if b.i >= n || b.j >= n {
                return Err(Error::Input(format!("bracket ({}, {}) out of range", b.i, b.j)));
            }
            let mut v = vec![0.0; n];
            for (key, &val) in &b.coeffs {
                if !val.is_finite() {
                    return Err(Error::Input(format!("non-finite coefficient in ({}, {})", b.i, b.j)));
                }
                v[resolve_key(key, &labels)?] += val;
            }
            if b.i == b.j && v.iter().any(|&x| x != 0.0) {
                return Err(Error::Input(format!("bracket ({0}, {0}) must vanish", b.i)));
            }
            if table.insert((b.i, b.j), v).is_some() {
                return Err(Error::Input(format!("bracket ({}, {}) given twice", b.i, b.j)));
            }
        }
        let mut brackets = Vec::new();
        for (&(i, j), v) in &table {
            if i == j {
                continue;
            }
            if let Some(w) = table.get(&(j, i)) {
                let scale = v.iter().chain(w).fold(1.0_f64, |m, x| m.max(x.abs()));
                if v.iter().zip(w).any(|(a, b)| (a + b).abs() > tol.jacobi * scale) {
                    return Err(Error::Input(format!("brackets ({i}, {j}) and ({j}, {i}) are inconsistent")));
                }
                if i > j {
                    continue;
                }
            }
            let terms: Vec<(usize, f64)> = v.iter().copied().enumerate().filter(|&(_, x)| x != 0.0).collect();
            brackets.push(Bracket::new(i, j, &terms));
        }
        let algebra = MetricLieAlgebra::from_brackets(labels, &brackets, gram, tol)?;
        let form = self.reference_form.as_ref().map(|f| form_from_json(f, n)).transpose()?;
        Ok((algebra, form))
    }
}

pub fn parse_algebra(text: &str, tol: ToleranceConfig) -> Result<(MetricLieAlgebra, Option<PForm>)> {
    let raw: AlgebraJson = serde_json::from_str(text)?;
    raw.to_algebra(tol)
}

pub fn algebra_to_value(algebra: &MetricLieAlgebra, reference_form: Option<&PForm>) -> Value {
    serde_json::to_value(AlgebraJson::from_algebra(algebra, reference_form)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = r#"{
        "dim": 3,
        "basis": ["x", "y", "z"],
        "brackets": [{"i": 0, "j": 1, "coeffs": {"z": 1.0}}],
        "metric": [[1,0,0],[0,1,0],[0,0,1]]
    }"#;

    #[test]
    fn parses_labels_and_indices() {
        let (a, f) = parse_algebra(H3, ToleranceConfig::default()).unwrap();
        assert_eq!(a.c(0, 1, 2), 1.0);
        assert_eq!(a.c(1, 0, 2), -1.0);
        assert!(f.is_none());
        let by_index = H3.replace(r#""z": 1.0"#, r#""2": 1.0"#);
        let (b, _) = parse_algebra(&by_index, ToleranceConfig::default()).unwrap();
        assert_eq!(a.structure(), b.structure());
    }

    #[test]
    fn rejects_inconsistent_pairs_and_duplicates() {
        let bad = H3.replace(
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}]"#,
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}, {"i": 1, "j": 0, "coeffs": {"z": 1.0}}]"#,
        );
        assert!(matches!(parse_algebra(&bad, ToleranceConfig::default()), Err(Error::Input(_))));
        let ok = H3.replace(
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}]"#,
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}, {"i": 1, "j": 0, "coeffs": {"z": -1.0}}]"#,
        );
        let (a, _) = parse_algebra(&ok, ToleranceConfig::default()).unwrap();
        assert_eq!(a.c(0, 1, 2), 1.0);
        let dup = H3.replace(
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}]"#,
            r#"[{"i": 0, "j": 1, "coeffs": {"z": 1.0}}, {"i": 0, "j": 1, "coeffs": {"z": 1.0}}]"#,
        );
        assert!(parse_algebra(&dup, ToleranceConfig::default()).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(parse_algebra(&H3.replace("\"dim\": 3", "\"dim\": 4"), ToleranceConfig::default()).is_err());
        assert!(parse_algebra(&H3.replace("\"z\": 1.0", "\"w\": 1.0"), ToleranceConfig::default()).is_err());
        assert!(matches!(parse_algebra("{", ToleranceConfig::default()), Err(Error::Json(_))));
    }

    #[test]
    fn round_trip() {
        let (a, _) = parse_algebra(H3, ToleranceConfig::default()).unwrap();
        let mut w = PForm::zero(3, 2);
        w.add_term(&[0, 2], 0.1);
        let text = serde_json::to_string(&algebra_to_value(&a, Some(&w))).unwrap();
        let (b, g) = parse_algebra(&text, ToleranceConfig::default()).unwrap();
        assert_eq!(a.structure(), b.structure());
        assert_eq!(a.gram(), b.gram());
        assert_eq!(g.unwrap(), w);
    }

    #[test]
    fn form_terms_must_increase() {
        let f = FormJson {
            degree: 2,
            terms: vec![TermJson {
                index: vec![1, 0],
                value: 1.0,
            }],
        };
        assert!(form_from_json(&f, 3).is_err());
    }
}
