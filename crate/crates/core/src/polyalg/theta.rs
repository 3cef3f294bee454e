use serde::{Deserialize, Serialize};

use super::{Coeff, PolyError};

/// Constant antisymmetric noncommutativity matrix `θ^{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix<C> {
    entries: Vec<Vec<C>>,
}

impl<C: Coeff> ThetaMatrix<C> {
    /// Validates squareness and entrywise antisymmetry.
    pub fn new(entries: Vec<Vec<C>>) -> Result<Self, PolyError> {
        let n = entries.len();
        if n == 0 {
            return Err(PolyError::InvalidTheta("empty matrix".into()));
        }
        if let Some(row) = entries.iter().position(|r| r.len() != n) {
            return Err(PolyError::InvalidTheta(format!(
                "row {row} has {} entries, expected {n}",
                entries[row].len()
            )));
        }
        for i in 0..n {
            for j in i..n {
                if entries[i][j] != -entries[j][i].clone() {
                    return Err(PolyError::InvalidTheta(format!(
                        "not antisymmetric at ({i}, {j}): {} vs {}",
                        entries[i][j], entries[j][i]
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            entries: vec![vec![C::zero(); n]; n],
        }
    }

    /// Two-dimensional matrix with `θ^{12} = theta`.
    pub fn planar(theta: C) -> Self {
        Self {
            entries: vec![vec![C::zero(), theta.clone()], vec![-theta, C::zero()]],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<C>] {
        &self.entries
    }

    pub fn scaled(&self, factor: &C) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|v| v.clone() * factor.clone()).collect())
            .collect();
        Self { entries }
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.is_zero())
    }

    pub fn to_f64(&self) -> ThetaMatrix<f64> {
        ThetaMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|v| v.to_f64()).collect())
                .collect(),
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|v| v.to_exchange_string()).collect())
            .collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self, PolyError> {
        let entries = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| C::parse_coeff(s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries)
    }
}

/// Serialized θ block: rows of scalar strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaRecord(pub Vec<Vec<String>>);
