//! Structured variable labels and guard constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatrixId {
    A,
    B,
    X,
    #[serde(rename = "FLAT")]
    Flat,
}

impl fmt::Display for MatrixId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixId::A => "A",
            MatrixId::B => "B",
            MatrixId::X => "X",
            MatrixId::Flat => "FLAT",
        };
        f.write_str(s)
    }
}

/// Cell of a named matrix. Guard cells use row or column -1 or the first index past the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub matrix: MatrixId,
    pub row: i64,
    pub col: i64,
}

impl Label {
    pub fn new(matrix: MatrixId, row: i64, col: i64) -> Self {
        Label { matrix, row, col }
    }

    pub fn flat(index: usize) -> Self {
        Label { matrix: MatrixId::Flat, row: 0, col: index as i64 }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.matrix, self.row, self.col)
    }
}

/// What a label resolves to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Var(usize),
    Const(i8),
}

/// Bijection between labels and `0..len()`, plus the table of guard constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableLayout {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
    guards: BTreeMap<Label, i8>,
}

impl VariableLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` variables labelled `FLAT[0,i]`.
    pub fn flat(n: usize) -> Self {
        let mut l = Self::new();
        for i in 0..n {
            l.push(Label::flat(i)).expect("flat labels are distinct");
        }
        l
    }

    pub fn push(&mut self, label: Label) -> Result<usize, ModelError> {
        if self.index.contains_key(&label) || self.guards.contains_key(&label) {
            return Err(ModelError::LabelCollision(label));
        }
        let v = self.labels.len();
        self.labels.push(label);
        self.index.insert(label, v);
        Ok(v)
    }

    /// Pushes a `rows x cols` block row-major.
    pub fn push_matrix(&mut self, matrix: MatrixId, rows: usize, cols: usize) -> Result<(), ModelError> {
        for r in 0..rows {
            for c in 0..cols {
                self.push(Label::new(matrix, r as i64, c as i64))?;
            }
        }
        Ok(())
    }

    pub fn add_guard(&mut self, label: Label, value: i8) -> Result<(), ModelError> {
        if self.index.contains_key(&label) {
            return Err(ModelError::LabelCollision(label));
        }
        match self.guards.insert(label, value) {
            Some(old) if old != value => Err(ModelError::LabelCollision(label)),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn guards(&self) -> impl Iterator<Item = (&Label, &i8)> {
        self.guards.iter()
    }

    pub fn resolve(&self, label: &Label) -> Option<Cell> {
        if let Some(v) = self.index_of(label) {
            return Some(Cell::Var(v));
        }
        self.guards.get(label).map(|&c| Cell::Const(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_a_bijection() {
        let mut l = VariableLayout::new();
        l.push_matrix(MatrixId::A, 2, 3).unwrap();
        assert_eq!(l.len(), 6);
        for (v, lab) in l.labels().iter().enumerate() {
            assert_eq!(l.index_of(lab), Some(v));
        }
        assert_eq!(l.label(4), Label::new(MatrixId::A, 1, 1));
    }

    #[test]
    fn collisions_are_rejected() {
        let mut l = VariableLayout::new();
        l.push(Label::new(MatrixId::X, 0, 0)).unwrap();
        assert!(l.push(Label::new(MatrixId::X, 0, 0)).is_err());
        assert!(l.add_guard(Label::new(MatrixId::X, 0, 0), 1).is_err());
        l.add_guard(Label::new(MatrixId::X, 0, -1), 1).unwrap();
        assert!(l.push(Label::new(MatrixId::X, 0, -1)).is_err());
        assert_eq!(l.resolve(&Label::new(MatrixId::X, 0, -1)), Some(Cell::Const(1)));
    }
}
