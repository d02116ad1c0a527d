use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total Hilbert-space dimension handled by the dense engine.
pub const MAX_TOTAL_DIM: usize = 256;

/// A labeled tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled subsystems. The order is the Kronecker order of
/// every operator carried on this layout; the last subsystem varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subsystem>", into = "Vec<Subsystem>")]
pub struct TensorLayout {
    subsystems: Vec<Subsystem>,
}

impl TryFrom<Vec<Subsystem>> for TensorLayout {
    type Error = Error;

    fn try_from(subsystems: Vec<Subsystem>) -> Result<Self> {
        Self::from_subsystems(subsystems)
    }
}

impl From<TensorLayout> for Vec<Subsystem> {
    fn from(layout: TensorLayout) -> Self {
        layout.subsystems
    }
}

impl TensorLayout {
    pub fn new<S: AsRef<str>>(subsystems: &[(S, usize)]) -> Result<Self> {
        Self::from_subsystems(
            subsystems
                .iter()
                .map(|(label, dim)| Subsystem {
                    label: label.as_ref().to_string(),
                    dim: *dim,
                })
                .collect(),
        )
    }

    /// Layout made of qubits only.
    pub fn qubits<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::from_subsystems(
            labels
                .iter()
                .map(|l| Subsystem {
                    label: l.as_ref().to_string(),
                    dim: 2,
                })
                .collect(),
        )
    }

    pub fn from_subsystems(subsystems: Vec<Subsystem>) -> Result<Self> {
        let mut total: usize = 1;
        for (k, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::InvalidDimension {
                    label: s.label.clone(),
                    dim: s.dim,
                });
            }
            if subsystems[..k].iter().any(|o| o.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
            total = total.saturating_mul(s.dim);
        }
        if total > MAX_TOTAL_DIM {
            return Err(Error::DimensionTooLarge(total));
        }
        Ok(Self { subsystems })
    }

    /// The trivial layout with no subsystems (dimension one).
    pub fn empty() -> Self {
        Self {
            subsystems: Vec::new(),
        }
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.subsystems.iter().any(|s| s.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.position(label)?].dim)
    }

    /// Positions of `labels`, in the order given. Rejects unknown and repeated labels.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l.as_ref())?;
            if out.contains(&p) {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &TensorLayout) -> Result<Self> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        Self::from_subsystems(subsystems)
    }

    /// Sub-layout holding `labels`, kept in this layout's order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mut pos = self.positions(labels)?;
        pos.sort_unstable();
        Ok(Self {
            subsystems: pos.iter().map(|&p| self.subsystems[p].clone()).collect(),
        })
    }

    /// Sub-layout of everything not in `labels`, in this layout's order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let pos = self.positions(labels)?;
        Ok(Self {
            subsystems: self
                .subsystems
                .iter()
                .enumerate()
                .filter(|(k, _)| !pos.contains(k))
                .map(|(_, s)| s.clone())
                .collect(),
        })
    }

    /// Row-major strides: the last subsystem has stride one.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = alloc::vec![1usize; self.subsystems.len()];
        for k in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].dim;
        }
        strides
    }

    /// Offsets into the full index space for every joint index of the
    /// subsystems at `positions` (joint index in the order of `positions`).
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = alloc::vec![0usize];
        for &p in positions {
            let d = self.subsystems[p].dim;
            let mut next = Vec::with_capacity(offsets.len() * d);
            for &o in &offsets {
                for digit in 0..d {
                    next.push(o + digit * strides[p]);
                }
            }
            offsets = next;
        }
        offsets
    }

    /// Digits of a full index, one per subsystem.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0usize; self.subsystems.len()];
        for k in (0..self.subsystems.len()).rev() {
            let d = self.subsystems[k].dim;
            out[k] = index % d;
            index /= d;
        }
        out
    }

    /// Outcome label such as `"01101"`; digits above 9 are bracketed.
    pub fn outcome_label(&self, index: usize) -> String {
        let mut s = String::new();
        for d in self.digits(index) {
            if d < 10 {
                s.push(char::from(b'0' + d as u8));
            } else {
                s.push_str(&alloc::format!("[{d}]"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_large_layouts() {
        assert_eq!(
            TensorLayout::qubits(&["S", "S"]),
            Err(Error::DuplicateLabel("S".into()))
        );
        let labels: Vec<String> = (0..9).map(|k| alloc::format!("q{k}")).collect();
        assert_eq!(
            TensorLayout::qubits(&labels),
            Err(Error::DimensionTooLarge(512))
        );
        assert!(TensorLayout::new(&[("A", 0)]).is_err());
    }

    #[test]
    fn strides_and_digits() {
        let l = TensorLayout::new(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        assert_eq!(l.strides(), [6, 2, 1]);
        assert_eq!(l.digits(11), [1, 2, 1]);
        assert_eq!(l.offsets(&[2, 0]), [0, 6, 1, 7]);
        assert_eq!(l.outcome_label(11), "121");
    }

    #[test]
    fn select_keeps_canonical_order() {
        let l = TensorLayout::qubits(&["S", "E1", "E2"]).unwrap();
        let sel = l.select(&["E2", "S"]).unwrap();
        assert_eq!(sel.labels().collect::<Vec<_>>(), ["S", "E2"]);
        let rest = l.complement(&["E1"]).unwrap();
        assert_eq!(rest, sel);
    }
}
