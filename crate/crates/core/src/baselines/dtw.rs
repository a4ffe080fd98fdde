//! Multi-dimensional dynamic time warping and 1-NN template matching.
//!
//! No warping window: a distance costs O(La·Lb·m).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{Matrix, TurnLabel};
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

/// Default number of templates drawn per class.
pub const TEMPLATES_PER_CLASS: usize = 20;

/// L1 local cost and steps {(i-1,j), (i,j-1), (i-1,j-1)}.
pub fn dtw_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.rows() == 0 || b.rows() == 0 {
        return Err(CttmError::InvalidInput("dtw of an empty sequence".into()));
    }
    if a.cols() != b.cols() {
        return Err(CttmError::InvalidInput(format!(
            "dtw channel mismatch: {} vs {}",
            a.cols(),
            b.cols()
        )));
    }
    let (la, lb) = (a.rows(), b.rows());
    let mut prev = vec![f64::INFINITY; lb];
    let mut cur = vec![0.0; lb];
    for i in 0..la {
        let ra = a.row(i);
        for j in 0..lb {
            let d: f64 = ra.iter().zip(b.row(j)).map(|(x, y)| (x - y).abs()).sum();
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let left = if j > 0 { cur[j - 1] } else { f64::INFINITY };
                let diag = if j > 0 { prev[j - 1] } else { f64::INFINITY };
                prev[j].min(left).min(diag)
            };
            cur[j] = d + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[lb - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub event_id: u64,
    pub label: TurnLabel,
    pub series: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSet {
    pub templates: Vec<Template>,
    pub seed: u64,
    pub tag: FoldTag,
}

impl TemplateSet {
    /// Seeded uniform draw of `per_class` templates of each class from
    /// `pool`, or all of a class when it has fewer.
    pub fn select(pool: &[Template], per_class: usize, seed: u64, tag: FoldTag) -> Result<TemplateSet> {
        if pool.is_empty() || per_class == 0 {
            return Err(CttmError::InvalidInput("empty template pool".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut templates = Vec::new();
        for class in [TurnLabel::Keep, TurnLabel::Give] {
            let members: Vec<&Template> = pool.iter().filter(|t| t.label == class).collect();
            templates.extend(
                members
                    .choose_multiple(&mut rng, per_class.min(members.len()))
                    .map(|t| (*t).clone()),
            );
        }
        Ok(TemplateSet { templates, seed, tag })
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Label of the nearest template; on a distance tie keep wins.
    pub fn predict(&self, x: &Matrix) -> Result<TurnLabel> {
        if self.templates.is_empty() {
            return Err(CttmError::InvalidInput("empty template set".into()));
        }
        let dists = self
            .templates
            .par_iter()
            .map(|t| dtw_distance(&t.series, x))
            .collect::<Result<Vec<_>>>()?;
        let mut best = (f64::INFINITY, TurnLabel::Keep);
        for (d, t) in dists.into_iter().zip(&self.templates) {
            if d < best.0 || (d == best.0 && t.label == TurnLabel::Keep) {
                best = (d, t.label);
            }
        }
        Ok(best.1)
    }
}

pub fn knn_dtw_predict(templates: &TemplateSet, x: &Matrix) -> Result<TurnLabel> {
    templates.predict(x)
}
