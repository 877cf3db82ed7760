//! File formats: representation JSON, moment CSV and coefficient JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{FitResult, HomogeneousLaurent};
use crate::numkernel::{CMatrix, CVector};
use crate::representation::{from_discrete_measure, DiscreteMeasure, TypeIRep};
use crate::scalar::{c, C};

/// Largest measure expanded to a dense diagonal representation.
pub const DENSE_ATOM_LIMIT: usize = 2048;

/// What a representation file describes. Measures keep their atoms and are
/// expanded to a diagonal representation when small enough.
#[derive(Clone, Debug)]
pub enum RepSource {
    Operator(TypeIRep<f64>),
    Measure {
        measure: DiscreteMeasure<f64>,
        rep: Option<TypeIRep<f64>>,
    },
}

impl RepSource {
    pub fn rep(&self) -> Result<&TypeIRep<f64>> {
        match self {
            RepSource::Operator(r) => Ok(r),
            RepSource::Measure { rep: Some(r), .. } => Ok(r),
            RepSource::Measure { measure, rep: None } => Err(Error::InvalidInput(format!(
                "measure has {} atoms; operator routines take at most {DENSE_ATOM_LIMIT}",
                measure.atoms().len()
            ))),
        }
    }

    pub fn measure(&self) -> Option<&DiscreteMeasure<f64>> {
        match self {
            RepSource::Operator(_) => None,
            RepSource::Measure { measure, .. } => Some(measure),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct MeasureFile {
    atoms: Vec<[f64; 2]>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none")]
    y: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<MeasureFile>,
}

fn matrix(name: &str, rows: Vec<Vec<[f64; 2]>>, dim: usize) -> Result<CMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidRep(format!("{name} must be a {dim}x{dim} array of [re, im] pairs")));
    }
    CMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|[re, im]| c(re, im)).collect()).collect())
}

pub fn parse_rep(text: &str) -> Result<RepSource> {
    let file: RepFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidRep(format!("malformed representation JSON: {e}")))?;
    if let Some(m) = file.measure {
        if file.a.is_some() || file.y.is_some() || file.alpha.is_some() {
            return Err(Error::InvalidRep("give either A/Y/alpha or measure, not both".into()));
        }
        let measure = DiscreteMeasure::new(m.atoms.into_iter().map(|[t, w]| (t, w)).collect())?;
        if let Some(d) = file.dim {
            if d != measure.atoms().len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: measure.atoms().len(),
                });
            }
        }
        let rep = (measure.atoms().len() <= DENSE_ATOM_LIMIT).then(|| from_discrete_measure(&measure));
        return Ok(RepSource::Measure { measure, rep });
    }
    let (Some(a), Some(y), Some(alpha)) = (file.a, file.y, file.alpha) else {
        return Err(Error::InvalidRep("representation needs A, Y and alpha (or measure)".into()));
    };
    let dim = file.dim.unwrap_or(alpha.len());
    if alpha.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: alpha.len(),
        });
    }
    let a = matrix("A", a, dim)?;
    let y = matrix("Y", y, dim)?;
    let alpha = CVector::from_vec(alpha.into_iter().map(|[re, im]| c(re, im)).collect());
    Ok(RepSource::Operator(TypeIRep::new(a, y, alpha)?))
}

pub fn load_rep(path: &Path) -> Result<RepSource> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_rep(&text)
}

fn pairs(v: &[C<f64>]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn rows(m: &CMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim()).map(|i| pairs(m.row(i))).collect()
}

pub fn rep_to_json(rep: &TypeIRep<f64>) -> String {
    let file = RepFile {
        dim: Some(rep.dim()),
        a: Some(rows(rep.a())),
        y: Some(rows(rep.y())),
        alpha: Some(pairs(rep.alpha().as_slice())),
        measure: None,
    };
    serde_json::to_string_pretty(&file).expect("representation serializes")
}

pub fn measure_to_json(m: &DiscreteMeasure<f64>) -> String {
    let file = RepFile {
        dim: None,
        a: None,
        y: None,
        alpha: None,
        measure: Some(MeasureFile {
            atoms: m.atoms().iter().map(|&(t, w)| [t, w]).collect(),
        }),
    };
    serde_json::to_string_pretty(&file).expect("measure serializes")
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of a moment table.
#[derive(Clone, Debug)]
pub struct MomentRow {
    pub k: usize,
    pub b1: f64,
    pub b2: f64,
    pub r: f64,
    pub im: f64,
    pub residual: Option<f64>,
}

pub fn moments_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("k,b1,b2,re_r_k,im_r_k,fit_residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k,
            fmt17(r.b1),
            fmt17(r.b2),
            fmt17(r.r),
            fmt17(r.im),
            r.residual.map_or(String::new(), fmt17)
        ));
    }
    out
}

#[derive(Serialize)]
struct CoeffEntry {
    n: [usize; 2],
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CoeffTable {
    degree: usize,
    coeffs: Vec<CoeffEntry>,
    residual: f64,
}

pub fn laurent_json(layer: &HomogeneousLaurent<f64>, residual: f64) -> serde_json::Value {
    serde_json::to_value(CoeffTable {
        degree: layer.degree(),
        coeffs: layer
            .terms()
            .map(|(n, v)| CoeffEntry {
                n: [n.n1, n.n2],
                re: v.re,
                im: v.im,
            })
            .collect(),
        residual,
    })
    .expect("coefficient table serializes")
}

pub fn fit_json(fit: &FitResult<f64, HomogeneousLaurent<f64>>) -> serde_json::Value {
    laurent_json(&fit.coeffs, fit.relative_residual)
}
