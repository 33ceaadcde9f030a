use serde::{Deserialize, Serialize};

use super::{ConstraintSystem, MatrixAlgebra, TProcDims, TProcedureResult};
use crate::linalg::{row_major, to_pairs};
use crate::{CMatrix, Error, Result, C64};

/// JSON form of a constraint system.
///
/// Each constraint is a row-major list of `[re, im]` pairs of length d².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub blocks: Vec<usize>,
    pub constraints: Vec<Vec<[f64; 2]>>,
}

/// JSON form of a T-procedure result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TProcReport {
    pub blocks: Vec<usize>,
    pub first_class: bool,
    pub dims: TProcDims,
    pub q: Vec<[f64; 2]>,
    pub p: Vec<[f64; 2]>,
    pub dirac_vectors: Vec<Vec<[f64; 2]>>,
}

impl ConstraintFile {
    pub fn from_system(cs: &ConstraintSystem) -> Self {
        Self { blocks: cs.algebra().blocks().to_vec(), constraints: cs.constraints().iter().map(row_major).collect() }
    }

    pub fn to_system(&self, tol: f64) -> Result<ConstraintSystem> {
        let algebra = MatrixAlgebra::new(self.blocks.clone())?;
        let d = algebra.size();
        let constraints = self
            .constraints
            .iter()
            .map(|entries| {
                if entries.len() != d * d {
                    return Err(Error::DimensionMismatch { expected: d * d, actual: entries.len() });
                }
                Ok(CMatrix::from_row_iterator(d, d, entries.iter().map(|[re, im]| C64::new(*re, *im))))
            })
            .collect::<Result<_>>()?;
        ConstraintSystem::new(algebra, constraints, tol)
    }
}

impl TProcReport {
    pub fn from_result(res: &TProcedureResult) -> Self {
        Self {
            blocks: res.algebra.blocks().to_vec(),
            first_class: res.first_class(),
            dims: res.dims(),
            q: row_major(&res.q),
            p: row_major(&res.p),
            dirac_vectors: res.dirac_vectors.iter().map(|v| to_pairs(v.iter())).collect(),
        }
    }
}
