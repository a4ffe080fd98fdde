use serde::{Deserialize, Serialize};

use crate::{CttmError, Result};

/// Which data a fitted artifact was fitted on.
///
/// Every fitted transform carries one of these so that evaluation can refuse
/// to apply a fold's artifacts to any event whose subject was in its
/// training set, and refuse to mix artifacts from different folds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldTag {
    /// Outer fold index, `None` when fitted outside cross-validation.
    pub fold: Option<usize>,
    /// Subjects whose events were visible during fitting (sorted).
    pub train_subjects: Vec<u32>,
}

impl FoldTag {
    pub fn new(fold: Option<usize>, mut train_subjects: Vec<u32>) -> Self {
        train_subjects.sort_unstable();
        train_subjects.dedup();
        FoldTag { fold, train_subjects }
    }

    pub fn saw_subject(&self, subject: u32) -> bool {
        self.train_subjects.binary_search(&subject).is_ok()
    }

    /// Fail if an event of `subject` is about to be scored in fold `fold`
    /// with an artifact that saw that subject or belongs to another fold.
    pub fn check_test_read(&self, fold: Option<usize>, subject: u32) -> Result<()> {
        if self.fold != fold {
            return Err(CttmError::FoldLeakage(format!(
                "artifact fitted for fold {:?} used in fold {:?}",
                self.fold, fold
            )));
        }
        if fold.is_some() && self.saw_subject(subject) {
            return Err(CttmError::FoldLeakage(format!(
                "test subject {subject} was part of the training data of fold {fold:?}"
            )));
        }
        Ok(())
    }

    /// Fail if two artifacts of one fitted pipeline come from different fits.
    pub fn check_same(&self, other: &FoldTag) -> Result<()> {
        if self != other {
            return Err(CttmError::FoldLeakage(format!(
                "mixed artifacts: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}
