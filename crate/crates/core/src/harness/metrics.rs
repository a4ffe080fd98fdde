//! Binary classification scores with turn-giving as the positive class.

use serde::{Deserialize, Serialize};

use crate::encoding::TurnLabel;
use crate::{CttmError, Result};

/// `2PR / (P + R)`, or 0 when precision and recall are both zero or
/// undefined.
pub fn f1_score(tp: u64, fp: u64, fn_: u64) -> f64 {
    if tp == 0 {
        return 0.0;
    }
    let (tp, fp, fn_) = (tp as f64, fp as f64, fn_ as f64);
    let p = tp / (tp + fp);
    let r = tp / (tp + fn_);
    2.0 * p * r / (p + r)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    /// Counts over aligned slices; extra elements of the longer one are
    /// ignored.
    pub fn from_labels(truth: &[TurnLabel], pred: &[TurnLabel]) -> Confusion {
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(pred) {
            c.record(*t, *p);
        }
        c
    }

    pub fn record(&mut self, truth: TurnLabel, pred: TurnLabel) {
        match (truth.is_give(), pred.is_give()) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        f1_score(self.tp, self.fp, self.fn_)
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / self.total() as f64
        }
    }
}

/// Cohen's kappa between two binary labelings. Perfect agreement on a
/// single class gives 1.
pub fn cohen_kappa(a: &[TurnLabel], b: &[TurnLabel]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(CttmError::InvalidInput(format!(
            "label vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(CttmError::InvalidInput("empty label vectors".into()));
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|l| l.is_give()).count() as f64 / n;
    let pb = b.iter().filter(|l| l.is_give()).count() as f64 / n;
    let pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    if pe == 1.0 {
        return Ok(if agree == 1.0 { 1.0 } else { 0.0 });
    }
    Ok((agree - pe) / (1.0 - pe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use TurnLabel::{Give as G, Keep as K};

    #[test]
    fn f1_examples() {
        assert_eq!(f1_score(5, 0, 0), 1.0);
        assert_eq!(f1_score(0, 3, 4), 0.0);
        assert!((f1_score(2, 1, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1_score(0, 0, 0), 0.0);
    }

    #[test]
    fn confusion_counts() {
        let c = Confusion::from_labels(&[G, G, K, K], &[G, K, G, K]);
        assert_eq!(c, Confusion { tp: 1, fp: 1, fn_: 1, tn: 1 });
        assert_eq!(c.f1(), 0.5);
        assert_eq!(c.accuracy(), 0.5);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(cohen_kappa(&[G, K, G], &[G, K, G]).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[G, G, K, K], &[G, K, K, G]).unwrap(), 0.0);
        assert_eq!(cohen_kappa(&[K, K], &[K, K]).unwrap(), 1.0);
        assert!(cohen_kappa(&[G], &[G, K]).is_err());
    }
}
