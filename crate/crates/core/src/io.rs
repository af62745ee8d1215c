//! JSON and qbsolv-style text formats for models.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::Technique;
use crate::layout::{Label, VariableLayout};
use crate::model::{parse_rational, Kind, ModelError, QuadraticModel, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    QuboText,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "qubo" | "qubo-text" => Ok(Format::QuboText),
            other => Err(format!("unknown format '{other}' (expected json or qubo)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("QUBO text needs a qubo model, got {0}")]
    KindMismatch(Kind),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Serde helper for `{"num": p, "den": q}`.
pub mod ratio_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Frac {
        num: i64,
        den: i64,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Frac { num: *r.numer(), den: *r.denom() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let f = Frac::deserialize(d)?;
        if f.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(f.num, f.den))
    }
}

/// Decoding metadata carried by kernel and composed-problem files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMeta {
    pub technique: Technique,
    pub m: usize,
    pub n: usize,
    #[serde(with = "ratio_json")]
    pub optimal: Rational,
    #[serde(default = "one")]
    pub lambda: i64,
    #[serde(default = "one")]
    pub objective_scale: i64,
    #[serde(default, with = "ratio_json")]
    pub objective_shift: Rational,
}

fn one() -> i64 {
    1
}

/// A model with its labels and optional decoding metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub model: QuadraticModel,
    pub layout: VariableLayout,
    pub encoding: Option<EncodingMeta>,
}

#[derive(Serialize, Deserialize)]
struct Guard {
    #[serde(flatten)]
    label: Label,
    value: i8,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    kind: Kind,
    variables: Vec<Label>,
    linear: Vec<(u32, i64)>,
    quadratic: Vec<(u32, u32, i64)>,
    #[serde(with = "ratio_json")]
    offset: Rational,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    guards: Vec<Guard>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<EncodingMeta>,
}

pub fn export(file: &ModelFile, format: Format) -> Result<Vec<u8>, FormatError> {
    match format {
        Format::Json => Ok(to_json(file).into_bytes()),
        Format::QuboText => to_qubo_text(&file.model).map(String::into_bytes),
    }
}

/// Reads either format; JSON is recognised by a leading `{`.
pub fn import(bytes: &[u8]) -> Result<ModelFile, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err(1, format!("not UTF-8: {e}")))?;
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_qubo_text(text)
    }
}

pub fn to_json(file: &ModelFile) -> String {
    let m = &file.model;
    let doc = ModelJson {
        kind: m.kind(),
        variables: file.layout.labels().to_vec(),
        linear: m.linear().to_vec(),
        quadratic: m.quadratic().iter().map(|c| (c.i, c.j, c.weight)).collect(),
        offset: m.offset(),
        guards: file.layout.guards().map(|(l, &v)| Guard { label: *l, value: v }).collect(),
        encoding: file.encoding.clone(),
    };
    let mut s = serde_json::to_string(&doc).expect("model JSON serialises");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<ModelFile, FormatError> {
    let doc: ModelJson = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let mut layout = VariableLayout::new();
    for l in doc.variables {
        layout.push(l)?;
    }
    for g in doc.guards {
        layout.add_guard(g.label, g.value)?;
    }
    let n = layout.len();
    check_sorted(doc.linear.iter().map(|t| (t.0, 0)), "linear")?;
    check_sorted(doc.quadratic.iter().map(|t| (t.0, t.1)), "quadratic")?;
    if let Some(t) = doc.quadratic.iter().find(|t| t.0 >= t.1) {
        return Err(parse_err(1, format!("quadratic key ({}, {}) is not upper-triangular", t.0, t.1)));
    }
    let model = QuadraticModel::from_terms(
        doc.kind,
        n,
        doc.linear.into_iter().map(|(v, w)| (v as usize, w)),
        doc.quadratic.into_iter().map(|(i, j, w)| (i as usize, j as usize, w)),
        doc.offset,
    )?;
    Ok(ModelFile { model, layout, encoding: doc.encoding })
}

fn check_sorted<I: Iterator<Item = (u32, u32)>>(keys: I, what: &str) -> Result<(), FormatError> {
    let mut prev: Option<(u32, u32)> = None;
    for k in keys {
        if prev.is_some_and(|p| p >= k) {
            return Err(parse_err(1, format!("{what} terms are not in strictly ascending order")));
        }
        prev = Some(k);
    }
    Ok(())
}

pub fn to_qubo_text(model: &QuadraticModel) -> Result<String, FormatError> {
    if model.kind() != Kind::Qubo {
        return Err(FormatError::KindMismatch(model.kind()));
    }
    let off = model.offset();
    let mut s = String::new();
    writeln!(s, "c offset {}/{}", off.numer(), off.denom()).unwrap();
    writeln!(s, "p qubo 0 {} {} {}", model.num_vars(), model.linear().len(), model.quadratic().len()).unwrap();
    for &(v, w) in model.linear() {
        writeln!(s, "{v} {v} {w}").unwrap();
    }
    for c in model.quadratic() {
        writeln!(s, "{} {} {}", c.i, c.j, c.weight).unwrap();
    }
    Ok(s)
}

pub fn from_qubo_text(text: &str) -> Result<ModelFile, FormatError> {
    let mut offset = Rational::from_integer(0);
    let mut seen_offset = false;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut linear: Vec<(usize, i64)> = Vec::new();
    let mut quadratic: Vec<(usize, usize, i64)> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('c') {
            if header.is_some() {
                return Err(parse_err(line, "comment after header"));
            }
            let rest = rest.trim();
            if !seen_offset {
                if let Some(v) = rest.strip_prefix("offset") {
                    offset = parse_rational(v).ok_or_else(|| parse_err(line, "bad offset"))?;
                    seen_offset = true;
                }
            }
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 6 || fields[0] != "p" || fields[1] != "qubo" {
                    return Err(parse_err(line, "expected header 'p qubo 0 <vars> <diagonals> <couplers>'"));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| parse_err(line, format!("bad count '{s}'")));
                header = Some((num(fields[3])?, num(fields[4])?, num(fields[5])?));
            }
            Some((n, nd, nc)) => {
                if fields.len() != 3 {
                    return Err(parse_err(line, "expected 'i j w'"));
                }
                let idx = |s: &str| s.parse::<usize>().map_err(|_| parse_err(line, format!("bad index '{s}'")));
                let (i, j) = (idx(fields[0])?, idx(fields[1])?);
                let w: i64 = fields[2].parse().map_err(|_| parse_err(line, format!("bad weight '{}'", fields[2])))?;
                if i >= n || j >= n {
                    return Err(parse_err(line, format!("index out of range for {n} variables")));
                }
                if linear.len() < nd {
                    if i != j {
                        return Err(parse_err(line, "expected a diagonal entry"));
                    }
                    if linear.last().is_some_and(|&(p, _)| p >= i) {
                        return Err(parse_err(line, "diagonal entries not ascending"));
                    }
                    linear.push((i, w));
                } else if quadratic.len() < nc {
                    if i >= j {
                        return Err(parse_err(line, "coupler needs i < j"));
                    }
                    if quadratic.last().is_some_and(|&(p, q, _)| (p, q) >= (i, j)) {
                        return Err(parse_err(line, "couplers not in lexicographic order"));
                    }
                    quadratic.push((i, j, w));
                } else {
                    return Err(parse_err(line, "more entries than the header declares"));
                }
            }
        }
    }
    let (n, nd, nc) = header.ok_or_else(|| parse_err(last_line.max(1), "missing header"))?;
    if linear.len() != nd || quadratic.len() != nc {
        return Err(parse_err(last_line.max(1), "fewer entries than the header declares"));
    }
    let model = QuadraticModel::from_terms(Kind::Qubo, n, linear, quadratic, offset)?;
    Ok(ModelFile { model, layout: VariableLayout::flat(n), encoding: None })
}
