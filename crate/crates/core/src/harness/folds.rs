//! Leave-one-subject-out splits.

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::encoding::RawEvent;
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub index: usize,
    pub test_subject: u32,
    pub train_subjects: Vec<u32>,
}

impl Fold {
    pub fn tag(&self) -> FoldTag {
        FoldTag::new(Some(self.index), self.train_subjects.clone())
    }

    pub fn train<'a>(&self, ds: &'a Dataset) -> Vec<&'a RawEvent> {
        ds.events.iter().filter(|e| e.subject_id != self.test_subject).collect()
    }

    pub fn test<'a>(&self, ds: &'a Dataset) -> Vec<&'a RawEvent> {
        ds.events.iter().filter(|e| e.subject_id == self.test_subject).collect()
    }
}

/// One fold per subject, in ascending subject order.
pub fn loso_folds(ds: &Dataset) -> Result<Vec<Fold>> {
    let subjects = ds.subjects();
    if subjects.len() < 2 {
        return Err(CttmError::InvalidInput(
            "leave-one-subject-out needs at least two subjects".into(),
        ));
    }
    Ok(subjects
        .iter()
        .enumerate()
        .map(|(index, &s)| Fold {
            index,
            test_subject: s,
            train_subjects: subjects.iter().copied().filter(|&o| o != s).collect(),
        })
        .collect())
}
