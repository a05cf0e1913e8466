//! JSON encodings shared by every module and the CLI.
//!
//! ```text
//! Algebra = {"blocks":[{"dim":int,"weight":float},...]}
//! Element = {"blocks":[[[ [re,im], ...],...],...]}     // block -> row -> entry
//! LinMap  = {"domain":Algebra,"codomain":Algebra,"matrix":[[[re,im],...],...]}
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Algebra, Element};
use crate::linmap::LinMap;
use crate::{Matrix, C64};

type Rows = Vec<Vec<[f64; 2]>>;

fn matrix_to_rows(m: &Matrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &Rows, square: bool) -> Result<Matrix, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    if square && nrows != ncols {
        return Err(format!("block is {nrows}x{ncols}, expected square"));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    blocks: Vec<Rows>,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementRepr { blocks: self.blocks().iter().map(matrix_to_rows).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        let blocks = repr
            .blocks
            .iter()
            .map(|r| rows_to_matrix(r, true))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(Element::from_blocks(blocks))
    }
}

#[derive(Serialize, Deserialize)]
struct LinMapRepr {
    domain: Algebra,
    codomain: Algebra,
    matrix: Rows,
}

impl Serialize for LinMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LinMapRepr {
            domain: self.domain().clone(),
            codomain: self.codomain().clone(),
            matrix: matrix_to_rows(self.matrix()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = LinMapRepr::deserialize(d)?;
        let mut matrix = rows_to_matrix(&repr.matrix, false).map_err(D::Error::custom)?;
        if repr.matrix.is_empty() {
            matrix = Matrix::zeros(0, repr.domain.total_dim());
        }
        LinMap::new(repr.domain, repr.codomain, matrix).map_err(D::Error::custom)
    }
}
