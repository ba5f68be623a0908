use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::AnatomyClass;

/// Pixel totals (or per-frame averages) for each class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassPixelCounts(pub BTreeMap<AnatomyClass, f64>);

impl ClassPixelCounts {
    pub fn from_array(counts: [f64; 4]) -> Self {
        ClassPixelCounts(AnatomyClass::ALL.into_iter().zip(counts).collect())
    }

    /// Totals accumulated over a set of masks.
    pub fn from_masks<'a>(masks: impl IntoIterator<Item = &'a crate::LabelMask>) -> Self {
        let mut totals = [0u64; 4];
        for m in masks {
            for (t, c) in totals.iter_mut().zip(m.class_counts()) {
                *t += c;
            }
        }
        Self::from_array(totals.map(|t| t as f64))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights(pub BTreeMap<AnatomyClass, f64>);

impl ClassWeights {
    pub fn get(&self, class: AnatomyClass) -> Option<f64> {
        self.0.get(&class).copied()
    }
}

/// Weighted cross-entropy weights `w_i = max_j(c_j) / c_i`.
///
/// The most frequent class gets weight 1; every class must have a positive count.
pub fn class_weights(counts: &ClassPixelCounts) -> Result<ClassWeights> {
    if counts.0.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (&class, &c) in &counts.0 {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidInput(format!(
                "count for {class} must be non-negative, got {c}"
            )));
        }
        if c == 0.0 {
            return Err(Error::DegenerateClass(class));
        }
    }
    let max = counts.0.values().copied().fold(0.0, f64::max);
    Ok(ClassWeights(
        counts.0.iter().map(|(&k, &c)| (k, max / c)).collect(),
    ))
}
