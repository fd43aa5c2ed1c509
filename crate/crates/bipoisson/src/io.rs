//! Pinned JSON file formats: four-index tensors, gauge generators, and
//! bracket tables.
//!
//! The formats are part of the command-line contract, so writers emit
//! canonical byte-stable documents (fixed field order, entries in index
//! order, two-space indentation, trailing newline) and loaders are strict:
//! duplicate entries, out-of-range indices, zero coefficients, unknown
//! coordinates, misdeclared symmetry, or variables that do not belong in a
//! slot are hard errors, never silent normalisations.
//!
//! A tensor document stores one representative per pair-swap orbit together
//! with a `symmetry` header (`"skew"`, `"sym"`, or `"none"`) that tells the
//! loader how to expand it; a bracket-table document stores only `u < v`
//! pairs (antisymmetry is structural) plus the S₀-row scale and an optional
//! provenance block recording which catalog case and parameter bindings
//! produced it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::brackets::{BracketTable, CoordSet};
use crate::poly::{parse_rational, PolyError, Polynomial, Rational, VarId};
use crate::tensor::{MatrixX, Tensor4};

/// Everything that can go wrong reading or writing the pinned formats.
/// Loader variants map to the command-line "malformed input" exit path.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("i/o failure")]
    File(#[from] std::io::Error),
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("dimension N={0} is out of range (need at least 2)")]
    BadDimension(u8),
    #[error("unknown symmetry tag {0:?} (expected \"skew\", \"sym\" or \"none\")")]
    BadSymmetry(String),
    #[error("index ({0},{1},{2},{3}) outside 1..={4}")]
    IndexOutOfRange(u8, u8, u8, u8, u8),
    #[error("duplicate entry at ({0},{1},{2},{3}) after symmetry expansion")]
    DuplicateTensorEntry(u8, u8, u8, u8),
    #[error("entry at ({0},{1},{2},{3}) has coefficient zero")]
    ZeroTensorEntry(u8, u8, u8, u8),
    #[error("coefficient at ({0},{1},{2},{3}) uses variable {5}; only parameters (t, a, y0..y9) are allowed, not {4}")]
    NonParameterVariable(u8, u8, u8, u8, &'static str, String),
    #[error("a skew tensor cannot store the diagonal pair ({0},{1},{0},{1})")]
    SkewDiagonal(u8, u8),
    #[error("tensor is not {0} across the pair swap at ({1},{2},{3},{4}); refusing to write it with that header")]
    HeaderMismatch(&'static str, u8, u8, u8, u8),
    #[error("matrix index ({0},{1}) outside 1..={2}")]
    MatrixIndexOutOfRange(u8, u8, u8),
    #[error("duplicate matrix entry at ({0},{1})")]
    DuplicateMatrixEntry(u8, u8),
    #[error("matrix entry at ({0},{1}) is zero")]
    ZeroMatrixEntry(u8, u8),
    #[error("unknown coordinate {0:?} (expected \"S[i,j]\" or \"S0\")")]
    BadCoordinate(String),
    #[error("coordinate {0} is not a member of the table's coordinate set")]
    ForeignCoordinate(String),
    #[error("bracket entries are stored with u < v; found ({0}, {1})")]
    UnorderedPair(String, String),
    #[error("duplicate bracket entry for ({0}, {1})")]
    DuplicateBracketEntry(String, String),
    #[error("bracket entry ({0}, {1}) is the zero polynomial; omit it instead")]
    ZeroBracketEntry(String, String),
    #[error("bracket entry ({0}, {1}) uses variable {2}, which is neither a member coordinate nor a parameter")]
    ForeignEntryVariable(String, String, String),
    #[error("lambda must be a nonzero rational, got {0:?}")]
    BadLambda(String),
}

/// Pair-swap behaviour declared by a tensor document's `symmetry` header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// T_{klij} = −T_{ijkl}; the loader adds the negated partner.
    Skew,
    /// T_{klij} = T_{ijkl}; the loader adds the equal partner.
    Sym,
    /// No relation; the document stores every nonzero entry.
    Plain,
}

impl Symmetry {
    fn tag(self) -> &'static str {
        match self {
            Symmetry::Skew => "skew",
            Symmetry::Sym => "sym",
            Symmetry::Plain => "none",
        }
    }

    fn from_tag(s: &str) -> Result<Symmetry, IoError> {
        match s {
            "skew" => Ok(Symmetry::Skew),
            "sym" => Ok(Symmetry::Sym),
            "none" => Ok(Symmetry::Plain),
            other => Err(IoError::BadSymmetry(other.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    #[serde(rename = "N")]
    n: u8,
    symmetry: String,
    entries: Vec<TensorEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct TensorEntryDoc {
    i: u8,
    j: u8,
    k: u8,
    l: u8,
    coeff: String,
}

fn finish(doc: &impl Serialize) -> Result<String, IoError> {
    let mut out = serde_json::to_string_pretty(doc)?;
    out.push('\n');
    Ok(out)
}

/// Variables admissible in tensor/matrix coefficients: the scalar catalog
/// parameters only — coordinates belong in bracket entries, λ in neither.
fn is_parameter(v: VarId) -> bool {
    matches!(v, VarId::T | VarId::A | VarId::Y(_))
}

fn check_parameters_only(
    p: &Polynomial,
    idx: (u8, u8, u8, u8),
    what: &'static str,
) -> Result<(), IoError> {
    for v in p.variables() {
        if !is_parameter(v) {
            return Err(IoError::NonParameterVariable(
                idx.0,
                idx.1,
                idx.2,
                idx.3,
                what,
                v.to_string(),
            ));
        }
    }
    Ok(())
}

/// Render a tensor under the given symmetry header, storing one
/// representative per pair-swap orbit. Fails if the tensor does not actually
/// satisfy the declared relation.
pub fn tensor_to_string(t: &Tensor4, symmetry: Symmetry) -> Result<String, IoError> {
    let mut entries = Vec::new();
    for (&(i, j, k, l), p) in t.entries() {
        let partner = t.get(k, l, i, j);
        match symmetry {
            Symmetry::Skew => {
                if !(&partner + p).is_zero() {
                    return Err(IoError::HeaderMismatch("skew", i, j, k, l));
                }
            }
            Symmetry::Sym => {
                if !(&partner - p).is_zero() {
                    return Err(IoError::HeaderMismatch("sym", i, j, k, l));
                }
            }
            Symmetry::Plain => {}
        }
        let keep = symmetry == Symmetry::Plain || (i, j, k, l) <= (k, l, i, j);
        if keep {
            entries.push(TensorEntryDoc {
                i,
                j,
                k,
                l,
                coeff: p.to_string(),
            });
        }
    }
    finish(&TensorDoc {
        n: t.n(),
        symmetry: symmetry.tag().to_string(),
        entries,
    })
}

/// Parse a tensor document, expanding the symmetry header.
pub fn tensor_from_str(text: &str) -> Result<Tensor4, IoError> {
    let doc: TensorDoc = serde_json::from_str(text)?;
    if doc.n < 2 {
        return Err(IoError::BadDimension(doc.n));
    }
    let symmetry = Symmetry::from_tag(&doc.symmetry)?;
    let mut out = Tensor4::new(doc.n);
    let mut seen: BTreeSet<(u8, u8, u8, u8)> = BTreeSet::new();
    for e in &doc.entries {
        let idx = (e.i, e.j, e.k, e.l);
        for ix in [e.i, e.j, e.k, e.l] {
            if ix == 0 || ix > doc.n {
                return Err(IoError::IndexOutOfRange(e.i, e.j, e.k, e.l, doc.n));
            }
        }
        let p = Polynomial::parse(&e.coeff)?;
        if p.is_zero() {
            return Err(IoError::ZeroTensorEntry(e.i, e.j, e.k, e.l));
        }
        check_parameters_only(&p, idx, "tensor entry")?;
        if !seen.insert(idx) {
            return Err(IoError::DuplicateTensorEntry(e.i, e.j, e.k, e.l));
        }
        let swapped = (e.k, e.l, e.i, e.j);
        match symmetry {
            Symmetry::Plain => {
                out.add_to(idx, p);
            }
            Symmetry::Skew => {
                if idx == swapped {
                    return Err(IoError::SkewDiagonal(e.i, e.j));
                }
                if !seen.insert(swapped) {
                    return Err(IoError::DuplicateTensorEntry(e.k, e.l, e.i, e.j));
                }
                out.add_to(swapped, -&p);
                out.add_to(idx, p);
            }
            Symmetry::Sym => {
                if idx != swapped {
                    if !seen.insert(swapped) {
                        return Err(IoError::DuplicateTensorEntry(e.k, e.l, e.i, e.j));
                    }
                    out.add_to(swapped, p.clone());
                }
                out.add_to(idx, p);
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    #[serde(rename = "N")]
    n: u8,
    entries: Vec<MatrixEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct MatrixEntryDoc {
    i: u8,
    j: u8,
    coeff: String,
}

/// Render a gauge generator (or any square matrix of rationals).
pub fn matrix_to_string(m: &MatrixX) -> Result<String, IoError> {
    let entries = m
        .entries()
        .map(|(&(i, j), v)| MatrixEntryDoc {
            i,
            j,
            coeff: v.to_string(),
        })
        .collect();
    finish(&MatrixDoc { n: m.n(), entries })
}

/// Parse a matrix document. Tracelessness is not enforced here — the gauge
/// transform itself refuses non-traceless generators.
pub fn matrix_from_str(text: &str) -> Result<MatrixX, IoError> {
    let doc: MatrixDoc = serde_json::from_str(text)?;
    if doc.n < 2 {
        return Err(IoError::BadDimension(doc.n));
    }
    let mut out = MatrixX::new(doc.n);
    let mut seen: BTreeSet<(u8, u8)> = BTreeSet::new();
    for e in &doc.entries {
        if e.i == 0 || e.i > doc.n || e.j == 0 || e.j > doc.n {
            return Err(IoError::MatrixIndexOutOfRange(e.i, e.j, doc.n));
        }
        if !seen.insert((e.i, e.j)) {
            return Err(IoError::DuplicateMatrixEntry(e.i, e.j));
        }
        let v = parse_rational(&e.coeff)?;
        if v == Rational::from_integer(0.into()) {
            return Err(IoError::ZeroMatrixEntry(e.i, e.j));
        }
        out.set(e.i, e.j, v);
    }
    Ok(out)
}

/// Optional provenance block a table document may carry: the catalog case it
/// was built from and the parameter bindings used (`"symbolic"` or a
/// rational literal per parameter).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableProvenance {
    pub case: Option<String>,
    pub params: BTreeMap<String, String>,
}

impl TableProvenance {
    pub fn is_empty(&self) -> bool {
        self.case.is_none() && self.params.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    #[serde(rename = "N")]
    n: u8,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lambda: Option<String>,
    restricted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    case: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    params: BTreeMap<String, String>,
    entries: Vec<TableEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct TableEntryDoc {
    u: String,
    v: String,
    poly: String,
}

fn parse_coord(text: &str) -> Result<VarId, IoError> {
    if text == "S0" {
        return Ok(VarId::S0);
    }
    let bad = || IoError::BadCoordinate(text.to_string());
    let inner = text
        .strip_prefix("S[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let i: u8 = a.trim().parse().map_err(|_| bad())?;
    let j: u8 = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok(VarId::S(i, j))
}

/// Render a bracket table (stored `u < v` pairs, canonical order), with an
/// optional provenance block.
pub fn table_to_string(
    t: &BracketTable,
    provenance: Option<&TableProvenance>,
) -> Result<String, IoError> {
    let entries = t
        .entries()
        .map(|(&(u, v), p)| TableEntryDoc {
            u: u.to_string(),
            v: v.to_string(),
            poly: p.to_string(),
        })
        .collect();
    let prov = provenance.cloned().unwrap_or_default();
    finish(&TableDoc {
        n: t.n(),
        lambda: t.lambda().map(|l| l.to_string()),
        restricted: t.is_restricted(),
        case: prov.case,
        params: prov.params,
        entries,
    })
}

/// Parse a bracket-table document together with whatever provenance it
/// carries.
pub fn table_from_str(text: &str) -> Result<(BracketTable, TableProvenance), IoError> {
    let doc: TableDoc = serde_json::from_str(text)?;
    if doc.n < 2 {
        return Err(IoError::BadDimension(doc.n));
    }
    let lambda = match &doc.lambda {
        None => None,
        Some(s) => {
            let l = parse_rational(s).map_err(|_| IoError::BadLambda(s.clone()))?;
            if l == Rational::from_integer(0.into()) {
                return Err(IoError::BadLambda(s.clone()));
            }
            Some(l)
        }
    };
    let coords = if doc.restricted {
        CoordSet::restricted(doc.n)
    } else {
        CoordSet::full(doc.n)
    };
    let mut table = BracketTable::empty(coords, lambda);
    let mut seen: BTreeSet<(VarId, VarId)> = BTreeSet::new();
    for e in &doc.entries {
        let u = parse_coord(&e.u)?;
        let v = parse_coord(&e.v)?;
        for (coord, name) in [(u, &e.u), (v, &e.v)] {
            if !coords.contains(coord) {
                return Err(IoError::ForeignCoordinate(name.clone()));
            }
        }
        if u >= v {
            return Err(IoError::UnorderedPair(e.u.clone(), e.v.clone()));
        }
        if !seen.insert((u, v)) {
            return Err(IoError::DuplicateBracketEntry(e.u.clone(), e.v.clone()));
        }
        let p = Polynomial::parse(&e.poly)?;
        if p.is_zero() {
            return Err(IoError::ZeroBracketEntry(e.u.clone(), e.v.clone()));
        }
        for var in p.variables() {
            if !coords.contains(var) && !is_parameter(var) {
                return Err(IoError::ForeignEntryVariable(
                    e.u.clone(),
                    e.v.clone(),
                    var.to_string(),
                ));
            }
        }
        table.set_entry(u, v, p);
    }
    Ok((
        table,
        TableProvenance {
            case: doc.case,
            params: doc.params,
        },
    ))
}

pub fn read_tensor(path: &Path) -> Result<Tensor4, IoError> {
    tensor_from_str(&fs::read_to_string(path)?)
}

pub fn write_tensor(path: &Path, t: &Tensor4, symmetry: Symmetry) -> Result<(), IoError> {
    fs::write(path, tensor_to_string(t, symmetry)?)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<MatrixX, IoError> {
    matrix_from_str(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, m: &MatrixX) -> Result<(), IoError> {
    fs::write(path, matrix_to_string(m)?)?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<(BracketTable, TableProvenance), IoError> {
    table_from_str(&fs::read_to_string(path)?)
}

pub fn write_table(
    path: &Path,
    t: &BracketTable,
    provenance: Option<&TableProvenance>,
) -> Result<(), IoError> {
    fs::write(path, table_to_string(t, provenance)?)?;
    Ok(())
}
