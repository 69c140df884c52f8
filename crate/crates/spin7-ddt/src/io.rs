//! JSON serialization of forms, structures and reports.
//!
//! Canonical form layout:
//! `{"dim":8,"deg":2,"terms":[{"idx":[0,1],"num":"1","den":"1"}, ...]}`
//! with float terms `{"idx":[...],"val":0.5}`. Terms are emitted in
//! lexicographic tuple order with zero coefficients dropped, so
//! serialize -> parse -> serialize is byte-identical.

use crate::forms::{Dim, KForm};
use crate::matrix::Mat;
use crate::scalar::Rat;
use num::bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid form data: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
pub struct FormJson {
    pub dim: usize,
    pub deg: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub idx: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub den: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val: Option<f64>,
}

fn dim_of(n: usize) -> Result<Dim, IoError> {
    match n {
        7 => Ok(Dim::R7),
        8 => Ok(Dim::R8),
        _ => Err(IoError::Invalid(format!("dim must be 7 or 8, got {}", n))),
    }
}

pub fn form_to_json_rat(f: &KForm<Rat>) -> FormJson {
    FormJson {
        dim: f.dim().n(),
        deg: f.degree(),
        terms: f
            .terms()
            .into_iter()
            .map(|(idx, c)| TermJson {
                idx,
                num: Some(c.numer().to_string()),
                den: Some(c.denom().to_string()),
                val: None,
            })
            .collect(),
    }
}

pub fn form_to_json_f64(f: &KForm<f64>) -> FormJson {
    FormJson {
        dim: f.dim().n(),
        deg: f.degree(),
        terms: f
            .terms()
            .into_iter()
            .map(|(idx, c)| TermJson {
                idx,
                num: None,
                den: None,
                val: Some(c),
            })
            .collect(),
    }
}

fn validate_tuple(idx: &[usize], deg: usize, dim: Dim) -> Result<(), IoError> {
    if idx.len() != deg {
        return Err(IoError::Invalid(format!(
            "tuple {:?} has length {}, expected degree {}",
            idx,
            idx.len(),
            deg
        )));
    }
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(IoError::Invalid(format!(
                "tuple {:?} is not strictly increasing",
                idx
            )));
        }
    }
    for &i in idx {
        if !dim.index_range().contains(&i) {
            return Err(IoError::Invalid(format!(
                "index {} outside the {:?} index range",
                i, dim
            )));
        }
    }
    Ok(())
}

pub fn form_from_json_rat(j: &FormJson) -> Result<KForm<Rat>, IoError> {
    let dim = dim_of(j.dim)?;
    let mut f = KForm::zero(dim, j.deg);
    for t in &j.terms {
        validate_tuple(&t.idx, j.deg, dim)?;
        let num = t
            .num
            .as_ref()
            .ok_or_else(|| IoError::Invalid("exact term needs num".into()))?;
        let den = t.den.as_deref().unwrap_or("1");
        let n = BigInt::from_str(num)
            .map_err(|e| IoError::Invalid(format!("bad numerator {:?}: {}", num, e)))?;
        let d = BigInt::from_str(den)
            .map_err(|e| IoError::Invalid(format!("bad denominator {:?}: {}", den, e)))?;
        if d == BigInt::from(0) {
            return Err(IoError::Invalid("zero denominator".into()));
        }
        let c = Rat::new(n, d);
        f = f.add_form(&KForm::from_terms(dim, j.deg, &[(&t.idx[..], c)]));
    }
    Ok(f)
}

pub fn form_from_json_f64(j: &FormJson) -> Result<KForm<f64>, IoError> {
    let dim = dim_of(j.dim)?;
    let mut f = KForm::zero(dim, j.deg);
    for t in &j.terms {
        validate_tuple(&t.idx, j.deg, dim)?;
        let c = match (t.val, &t.num) {
            (Some(v), _) => v,
            (None, Some(num)) => {
                let den = t.den.as_deref().unwrap_or("1");
                let n: f64 = num
                    .parse()
                    .map_err(|_| IoError::Invalid(format!("bad numerator {:?}", num)))?;
                let d: f64 = den
                    .parse()
                    .map_err(|_| IoError::Invalid(format!("bad denominator {:?}", den)))?;
                n / d
            }
            _ => return Err(IoError::Invalid("term needs val or num/den".into())),
        };
        f = f.add_form(&KForm::from_terms(dim, j.deg, &[(&t.idx[..], c)]));
    }
    Ok(f)
}

pub fn parse_form_rat(s: &str) -> Result<KForm<Rat>, IoError> {
    form_from_json_rat(&serde_json::from_str(s)?)
}

pub fn parse_form_f64(s: &str) -> Result<KForm<f64>, IoError> {
    form_from_json_f64(&serde_json::from_str(s)?)
}

pub fn canonical_json_rat(f: &KForm<Rat>) -> String {
    serde_json::to_string(&form_to_json_rat(f)).expect("serialization cannot fail")
}

pub fn canonical_json_f64(f: &KForm<f64>) -> String {
    serde_json::to_string(&form_to_json_f64(f)).expect("serialization cannot fail")
}

/// Structures serialize as the conjugator only; projectors are recomputed
/// on load.
#[derive(Serialize, Deserialize)]
pub struct StructureJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Vec<Vec<f64>>>,
}

pub fn structure_to_json(s: &crate::structures::Spin7Structure<f64>) -> StructureJson {
    if s.is_standard() {
        StructureJson {
            standard: Some(true),
            conjugator: None,
        }
    } else {
        let m = s.conjugator();
        StructureJson {
            standard: None,
            conjugator: Some((0..8).map(|i| m.row(i).to_vec()).collect()),
        }
    }
}

pub fn structure_from_json(j: &StructureJson) -> Result<crate::structures::Spin7Structure<f64>, IoError> {
    if j.standard == Some(true) {
        return Ok(crate::structures::Spin7Structure::standard());
    }
    let rows = j
        .conjugator
        .as_ref()
        .ok_or_else(|| IoError::Invalid("structure needs standard flag or conjugator".into()))?;
    if rows.len() != 8 || rows.iter().any(|r| r.len() != 8) {
        return Err(IoError::Invalid("conjugator must be 8x8".into()));
    }
    let mut m = Mat::<f64>::zeros(8, 8);
    for (i, r) in rows.iter().enumerate() {
        for (j2, v) in r.iter().enumerate() {
            m[(i, j2)] = *v;
        }
    }
    if m.inverse().is_none() {
        return Err(IoError::Invalid("conjugator must be invertible".into()));
    }
    Ok(crate::structures::Spin7Structure::standard().pullback_structure(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    #[test]
    fn round_trip_is_byte_identical() {
        let f = KForm::from_terms(
            Dim::R8,
            2,
            &[(&[0usize, 1][..], ratio(3, 7)), (&[2, 5][..], rat(-2))],
        );
        let s1 = canonical_json_rat(&f);
        let parsed = parse_form_rat(&s1).unwrap();
        let s2 = canonical_json_rat(&parsed);
        assert_eq!(s1, s2);
        assert_eq!(parsed, f);
        // float path
        let g = f.map_to_f64();
        let t1 = canonical_json_f64(&g);
        let t2 = canonical_json_f64(&parse_form_f64(&t1).unwrap());
        assert_eq!(t1, t2);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_form_rat("{").is_err());
        assert!(parse_form_rat(r#"{"dim":9,"deg":2,"terms":[]}"#).is_err());
        assert!(parse_form_rat(r#"{"dim":8,"deg":2,"terms":[{"idx":[1,0],"num":"1"}]}"#).is_err());
        assert!(parse_form_rat(r#"{"dim":8,"deg":2,"terms":[{"idx":[0,1],"num":"1","den":"0"}]}"#)
            .is_err());
        assert!(parse_form_rat(r#"{"dim":7,"deg":1,"terms":[{"idx":[0],"num":"1"}]}"#).is_err());
    }

    #[test]
    fn structure_round_trip() {
        let s = crate::structures::Spin7Structure::<f64>::standard();
        let j = structure_to_json(&s);
        assert_eq!(j.standard, Some(true));
        let s2 = structure_from_json(&j).unwrap();
        assert!(s2.is_standard());
    }
}
