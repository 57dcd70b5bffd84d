//! JSON interchange: input documents for groups, elements, matrices,
//! complexes and self-maps, and report encodings for certificates.
//!
//! Exact values are always strings `"num/den"` (or `"n"`).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::character::VirtualCharacter;
use crate::complexes::{ChainComplex, ChainMap, RingTag};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational};
use crate::group::{FiniteGroup, GroupAlgebraMatrix, GroupRingElement};
use crate::laurent::LaurentMatrix;
use crate::spectral::{Attachment, IndexModel};
use crate::telescope::{ContractionCertificate, NovikovCertificate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroupJson {
    pub fn build(&self) -> Result<Arc<FiniteGroup>> {
        if self.mult.len() != self.order {
            return Err(Error::TableShape);
        }
        let mut g = FiniteGroup::from_table(self.mult.clone())?;
        if let Some(labels) = &self.labels {
            g = g.with_labels(labels.clone())?;
        }
        Ok(Arc::new(g))
    }

    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupJson { order: g.order(), mult: g.table().to_vec(), labels: Some(g.labels().to_vec()) }
    }
}

/// Coefficients of a group-ring element, one string per group element.
pub type ElementJson = Vec<String>;

/// A matrix over the group ring: rows of elements.
pub type MatrixJson = Vec<Vec<ElementJson>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentTermJson {
    pub deg: i64,
    pub coeffs: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<LaurentTermJson>,
}

pub fn parse_element(group: &Arc<FiniteGroup>, e: &ElementJson) -> Result<GroupRingElement> {
    let coeffs = e.iter().map(|s| parse_rational(s)).collect::<Result<Vec<Rational>>>()?;
    GroupRingElement::new(group.clone(), coeffs)
}

pub fn element_json(e: &GroupRingElement) -> ElementJson {
    e.coeffs().iter().map(format_rational).collect()
}

pub fn parse_matrix(group: &Arc<FiniteGroup>, m: &MatrixJson, rows: usize, cols: usize) -> Result<GroupAlgebraMatrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!("expected a {rows}x{cols} matrix")));
    }
    let elems = m.iter().flatten().map(|e| parse_element(group, e)).collect::<Result<Vec<_>>>()?;
    GroupAlgebraMatrix::from_elements(group.clone(), rows, cols, elems)
}

pub fn matrix_json(m: &GroupAlgebraMatrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| element_json(&m.entry(i, j))).collect()).collect()
}

pub fn parse_laurent(group: &Arc<FiniteGroup>, m: &LaurentMatrixJson) -> Result<LaurentMatrix> {
    let mut out = LaurentMatrix::zeros(group.clone(), m.rows, m.cols);
    for t in &m.terms {
        let c = parse_matrix(group, &t.coeffs, m.rows, m.cols)?;
        out = out.add(&LaurentMatrix::monomial(t.deg, c))?;
    }
    Ok(out)
}

pub fn laurent_json(m: &LaurentMatrix) -> LaurentMatrixJson {
    LaurentMatrixJson {
        rows: m.nrows(),
        cols: m.ncols(),
        terms: m.terms().iter().map(|(&deg, c)| LaurentTermJson { deg, coeffs: matrix_json(c) }).collect(),
    }
}

/// A differential either over the group ring or over the Laurent ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DifferentialJson {
    Laurent(LaurentMatrixJson),
    Plain(MatrixJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(default)]
    pub d_min: i64,
    pub ranks: Vec<usize>,
    /// `differentials[i]` maps degree `d_min + i + 1` to `d_min + i`.
    pub differentials: Vec<DifferentialJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallJson {
    pub p: ElementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttachmentJson {
    pub complex: ComplexJson,
    pub map: Vec<LaurentMatrixJson>,
}

/// The input document read by the command-line tool. Each command uses
/// the sections it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InputDoc {
    /// Defaults to the trivial group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexJson>,
    /// Chain self-map `h` of `complex`, one matrix per degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<MatrixJson>>,
    /// Optional `g` with `h g = I`, for the `z^-1` Novikov side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<WallJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attachment: Option<AttachmentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_sided: Option<bool>,
}

/// A parsed complex over one of the supported rings.
#[derive(Clone, Debug)]
pub enum AnyComplex {
    GroupRing(ChainComplex<GroupAlgebraMatrix>),
    Laurent(ChainComplex<LaurentMatrix>),
}

fn parse_doc_error(e: serde_json::Error) -> Error {
    Error::Parse { what: "input", detail: e.to_string() }
}

impl InputDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(parse_doc_error)
    }

    pub fn group(&self) -> Result<Arc<FiniteGroup>> {
        match &self.group {
            Some(g) => g.build(),
            None => Ok(Arc::new(FiniteGroup::trivial())),
        }
    }

    pub fn complex(&self) -> Result<AnyComplex> {
        let c = self.complex.as_ref().ok_or_else(|| Error::InvalidArgument("input has no complex".into()))?;
        parse_complex(&self.group()?, c)
    }

    pub fn group_ring_complex(&self) -> Result<ChainComplex<GroupAlgebraMatrix>> {
        match self.complex()? {
            AnyComplex::GroupRing(c) => Ok(c),
            AnyComplex::Laurent(_) => Err(Error::LaurentRing),
        }
    }

    fn maps_of(&self, c: &ChainComplex<GroupAlgebraMatrix>, maps: &[MatrixJson]) -> Result<ChainMap<GroupAlgebraMatrix>> {
        if maps.len() != c.ranks().len() {
            return Err(Error::DimensionMismatch(format!("expected {} map components", c.ranks().len())));
        }
        let g = c.group().clone();
        let parsed = maps
            .iter()
            .zip(c.degrees())
            .map(|(m, j)| parse_matrix(&g, m, c.rank(j), c.rank(j)))
            .collect::<Result<Vec<_>>>()?;
        ChainMap::new(c.clone(), c.clone(), parsed)
    }

    pub fn self_map(&self) -> Result<ChainMap<GroupAlgebraMatrix>> {
        let c = self.group_ring_complex()?;
        let maps = self.map.as_ref().ok_or_else(|| Error::InvalidArgument("input has no self-map".into()))?;
        self.maps_of(&c, maps)
    }

    pub fn inverse_map(&self) -> Result<Option<ChainMap<GroupAlgebraMatrix>>> {
        match &self.inverse {
            None => Ok(None),
            Some(maps) => self.maps_of(&self.group_ring_complex()?, maps).map(Some),
        }
    }

    pub fn wall_element(&self) -> Result<(GroupRingElement, Option<i64>)> {
        let w = self.wall.as_ref().ok_or_else(|| Error::InvalidArgument("input has no wall section".into()))?;
        Ok((parse_element(&self.group()?, &w.p)?, w.ell))
    }

    pub fn index_model(&self) -> Result<IndexModel> {
        let h = self.self_map()?;
        let attachment = match &self.attachment {
            None => None,
            Some(a) => {
                let g = self.group()?;
                let complex = match parse_complex(&g, &a.complex)? {
                    AnyComplex::GroupRing(c) => c,
                    AnyComplex::Laurent(_) => return Err(Error::LaurentRing),
                };
                let map = a.map.iter().map(|m| parse_laurent(&g, m)).collect::<Result<Vec<_>>>()?;
                Some(Attachment { complex, map })
            }
        };
        Ok(IndexModel { h, attachment, two_sided: self.two_sided.unwrap_or(false) })
    }
}

pub fn parse_complex(group: &Arc<FiniteGroup>, c: &ComplexJson) -> Result<AnyComplex> {
    let ring = match &c.ring {
        Some(tag) => RingTag::parse(tag)?,
        None => {
            if c.differentials.iter().any(|d| matches!(d, DifferentialJson::Laurent(_))) {
                RingTag::Laurent
            } else {
                RingTag::GroupRing
            }
        }
    };
    if c.differentials.len() + 1 != c.ranks.len().max(1) {
        return Err(Error::DimensionMismatch(format!(
            "{} ranks need {} differentials, found {}",
            c.ranks.len(),
            c.ranks.len().saturating_sub(1),
            c.differentials.len()
        )));
    }
    let shape = |i: usize| (c.ranks[i], c.ranks[i + 1]);
    match ring {
        RingTag::Laurent => {
            let diffs = c
                .differentials
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let (r, k) = shape(i);
                    let m = match d {
                        DifferentialJson::Laurent(l) => parse_laurent(group, l)?,
                        DifferentialJson::Plain(m) => LaurentMatrix::constant(parse_matrix(group, m, r, k)?),
                    };
                    if m.nrows() != r || m.ncols() != k {
                        return Err(Error::DimensionMismatch(format!("differential {} should be {r}x{k}", c.d_min + i as i64 + 1)));
                    }
                    Ok(m)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyComplex::Laurent(ChainComplex::new(group.clone(), c.d_min, c.ranks.clone(), diffs)?))
        }
        RingTag::Q | RingTag::GroupRing => {
            if ring == RingTag::Q && !group.is_trivial() {
                return Err(Error::InvalidArgument("ring Q needs the trivial group".into()));
            }
            let diffs = c
                .differentials
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let (r, k) = shape(i);
                    match d {
                        DifferentialJson::Plain(m) => parse_matrix(group, m, r, k),
                        DifferentialJson::Laurent(_) => Err(Error::InvalidArgument("Laurent differential in a group-ring complex".into())),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyComplex::GroupRing(ChainComplex::new(group.clone(), c.d_min, c.ranks.clone(), diffs)?))
        }
        other => Err(Error::InvalidArgument(format!("complexes over {other} are not read from input"))),
    }
}

pub fn complex_json(c: &ChainComplex<GroupAlgebraMatrix>) -> ComplexJson {
    ComplexJson {
        ring: Some(c.ring().as_str().to_string()),
        d_min: c.d_min(),
        ranks: c.ranks().to_vec(),
        differentials: c.differentials().iter().map(|d| DifferentialJson::Plain(matrix_json(d))).collect(),
    }
}

pub fn laurent_complex_json(c: &ChainComplex<LaurentMatrix>) -> ComplexJson {
    ComplexJson {
        ring: Some(RingTag::Laurent.as_str().to_string()),
        d_min: c.d_min(),
        ranks: c.ranks().to_vec(),
        differentials: c.differentials().iter().map(|d| DifferentialJson::Laurent(laurent_json(d))).collect(),
    }
}

pub fn character_json(chi: &VirtualCharacter) -> Value {
    json!(chi.to_strings())
}

pub fn certificate_json(c: &ContractionCertificate) -> Value {
    json!({
        "identity": c.identity.as_str(),
        "depth": c.depth,
        "weight": format_rational(&c.weight),
        "interior": [c.interior.0, c.interior.1],
        "overflow_band": [c.overflow_band.0, c.overflow_band.1],
        "defect_degrees": c.defect_degrees,
        "verified": c.verified,
        "margin_k": c.margin_k,
        "norm_h": c.norm_h,
        "threshold": c.threshold,
        "homotopies": c.homotopies.iter().map(|(j, h)| json!({"degree": j, "matrix": laurent_json(h)})).collect::<Vec<_>>(),
    })
}

pub fn novikov_json(c: &NovikovCertificate) -> Value {
    json!({
        "identity": "novikov",
        "side": c.side.as_str(),
        "depth": c.depth,
        "remainder_exponent": c.remainder_exponent,
        "remainder_zero": c.remainder_zero,
        "verified": true,
        "inverses": c.inverses.iter().map(|(j, r)| json!({"degree": j, "matrix": laurent_json(r)})).collect::<Vec<_>>(),
    })
}

/// Machine-readable error payload.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({
        "error": e.code(),
        "message": e.to_string(),
        "input_error": e.is_input_error(),
    });
    let extra = match e {
        Error::NotAComplex { degree, row, col } | Error::NotAChainMap { degree, row, col } => {
            json!({"degree": degree, "row": row, "col": col})
        }
        Error::NonAssociative { a, b, c } => json!({"triple": [a, b, c]}),
        Error::NoInverse { element } => json!({"element": element}),
        Error::IdentityFailed { identity, degree, z_degree } => json!({"identity": identity, "degree": degree, "z_degree": z_degree}),
        _ => json!({}),
    };
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let doc = InputDoc::from_json(
            r#"{"group": {"order": 2, "mult": [[0,1],[1,0]]},
                "complex": {"ranks": [1, 1], "differentials": [[[["1", "-1"]]]]},
                "map": [[[["1/2","0"]]], [[["1/2","0"]]]]}"#,
        )
        .unwrap();
        let c = doc.group_ring_complex().unwrap();
        assert_eq!(c.ranks(), &[1, 1]);
        let again = parse_complex(c.group(), &complex_json(&c)).unwrap();
        assert!(matches!(again, AnyComplex::GroupRing(ref d) if *d == c));
        assert_eq!(doc.self_map().unwrap().maps().len(), 2);
    }

    #[test]
    fn laurent_round_trip() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let doc = r#"{"rows":1,"cols":1,"terms":[{"deg":-1,"coeffs":[[["0","1"]]]},{"deg":0,"coeffs":[[["1","0"]]]}]}"#;
        let m: LaurentMatrixJson = serde_json::from_str(doc).unwrap();
        let parsed = parse_laurent(&g, &m).unwrap();
        assert_eq!(parsed.degree_range(), Some((-1, 0)));
        assert_eq!(laurent_json(&parsed), m);
    }

    #[test]
    fn broken_complex_reports_degree() {
        let doc = InputDoc::from_json(r#"{"complex": {"ranks": [1,1,1], "differentials": [[[["1"]]], [[["1"]]]]}}"#).unwrap();
        let e = doc.complex().unwrap_err();
        assert_eq!(e.code(), "NotAComplex");
        assert_eq!(error_json(&e)["degree"], json!(2));
    }
}
