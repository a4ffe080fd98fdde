use serde::{Deserialize, Serialize};

use crate::{CttmError, Result};

/// Row-major `rows x cols` matrix of samples (time along rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CttmError::InvalidInput(format!(
                "{} values do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(CttmError::InvalidInput(format!(
                "ragged rows: expected {cols} columns, found {}",
                r.len()
            )));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(CttmError::InvalidInput("columns differ in length".into()));
        }
        let mut m = Matrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.data[i * cols + j] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: f64) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The first `n` rows.
    pub fn head(&self, n: usize) -> Matrix {
        let n = n.min(self.rows);
        Matrix {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    /// Rows at the given indices, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = CttmError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

/// Turn-event class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TurnLabel {
    /// The human keeps the turn (label 0).
    Keep,
    /// The human is about to give the turn away (label 1).
    Give,
}

impl TurnLabel {
    pub fn as_u8(self) -> u8 {
        match self {
            TurnLabel::Keep => 0,
            TurnLabel::Give => 1,
        }
    }

    pub fn is_give(self) -> bool {
        self == TurnLabel::Give
    }
}

impl TryFrom<u8> for TurnLabel {
    type Error = CttmError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(TurnLabel::Keep),
            1 => Ok(TurnLabel::Give),
            _ => Err(CttmError::InvalidInput(format!("label must be 0 or 1, got {v}"))),
        }
    }
}

impl From<TurnLabel> for u8 {
    fn from(l: TurnLabel) -> u8 {
        l.as_u8()
    }
}

/// One annotated turn-event window: `L x C` raw sensor samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEvent {
    pub event_id: u64,
    pub subject_id: u32,
    pub label: TurnLabel,
    pub samples: Matrix,
}

impl RawEvent {
    pub fn len(&self) -> usize {
        self.samples.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.rows() == 0
    }

    pub fn channels(&self) -> usize {
        self.samples.cols()
    }

    /// The leading `ceil(tau * L)` samples (at least one).
    pub fn truncate(&self, tau: f64) -> Result<RawEvent> {
        let rows = prefix_len(self.len(), tau)?;
        Ok(RawEvent {
            samples: self.samples.head(rows),
            ..self.clone()
        })
    }
}

/// Number of rows kept by a partial observation of fraction `tau`.
pub fn prefix_len(len: usize, tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(CttmError::InvalidInput(format!("tau must lie in (0, 1], got {tau}")));
    }
    // Guard against 0.3 * 10 = 3.0000000000000004 rounding up to 4.
    let exact = tau * len as f64;
    let rounded = exact.round();
    let rows = if (exact - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        exact.ceil() as usize
    };
    Ok(rows.clamp(1, len.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(len: usize) -> RawEvent {
        RawEvent {
            event_id: 1,
            subject_id: 0,
            label: TurnLabel::Give,
            samples: Matrix::from_vec(len, 2, (0..2 * len).map(|x| x as f64).collect()).unwrap(),
        }
    }

    #[test]
    fn truncation_rules() {
        let e = event(10);
        assert_eq!(e.truncate(1.0).unwrap(), e);
        assert_eq!(e.truncate(0.25).unwrap().len(), 3);
        assert_eq!(e.truncate(0.3).unwrap().len(), 3);
        assert_eq!(e.truncate(0.01).unwrap().len(), 1);
        assert_eq!(event(1).truncate(0.1).unwrap().len(), 1);
        assert_eq!(e.truncate(0.25).unwrap().samples.row(2), &[4.0, 5.0]);
        for bad in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(e.truncate(bad).is_err());
        }
    }

    #[test]
    fn prefix_len_exact_multiples() {
        for l in 1..60 {
            for k in 1..=10 {
                let tau = k as f64 / 10.0;
                let expect = ((k * l) as f64 / 10.0).ceil().max(1.0) as usize;
                assert_eq!(prefix_len(l, tau).unwrap(), expect, "l={l} tau={tau}");
            }
        }
    }

    #[test]
    fn labels_serialize_as_integers() {
        assert_eq!(serde_json::to_string(&TurnLabel::Give).unwrap(), "1");
        assert_eq!(serde_json::from_str::<TurnLabel>("0").unwrap(), TurnLabel::Keep);
        assert!(serde_json::from_str::<TurnLabel>("2").is_err());
    }

    #[test]
    fn matrix_json_is_row_lists() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        assert_eq!(serde_json::from_str::<Matrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<Matrix>("[[1.0],[2.0,3.0]]").is_err());
        assert_eq!(m.column(1), vec![2.0, 4.0]);
        assert_eq!(Matrix::from_columns(&[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap(), m);
    }
}
