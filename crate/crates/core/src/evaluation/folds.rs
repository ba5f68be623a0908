use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub mapping: BTreeMap<String, usize>,
    pub fold_images: Vec<usize>,
    pub fold_subjects: Vec<usize>,
}

impl FoldAssignment {
    pub fn subjects_in(&self, fold: usize) -> impl Iterator<Item = &str> {
        self.mapping
            .iter()
            .filter(move |(_, &f)| f == fold)
            .map(|(s, _)| s.as_str())
    }
}

/// Subject-disjoint k-fold split balanced by image count.
///
/// Subjects are shuffled with `seed`, stably sorted by image count (largest
/// first), then each goes to the fold with the fewest images so far (fewest
/// subjects, then lowest index, on ties). All images of a subject therefore
/// share a fold.
pub fn assign_folds(manifest: &[(String, usize)], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k == 0 {
        return Err(Error::InvalidInput("fold count must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    if let Some((dup, _)) = manifest.iter().find(|(s, _)| !seen.insert(s.as_str())) {
        return Err(Error::InvalidInput(format!("duplicate subject id {dup:?}")));
    }
    if manifest.len() < k {
        return Err(Error::TooFewSubjects {
            subjects: manifest.len(),
            k,
        });
    }

    let mut order: Vec<&(String, usize)> = manifest.iter().collect();
    order.sort_by(|a, b| a.0.cmp(&b.0));
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.sort_by_key(|s| std::cmp::Reverse(s.1));

    let mut fold_images = vec![0usize; k];
    let mut fold_subjects = vec![0usize; k];
    let mut mapping = BTreeMap::new();
    for (subject, count) in order {
        let fold = (0..k)
            .min_by_key(|&f| (fold_images[f], fold_subjects[f], f))
            .expect("k > 0");
        fold_images[fold] += count;
        fold_subjects[fold] += 1;
        mapping.insert(subject.clone(), fold);
    }
    Ok(FoldAssignment {
        k,
        mapping,
        fold_images,
        fold_subjects,
    })
}
