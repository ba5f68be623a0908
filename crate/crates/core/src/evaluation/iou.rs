use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{AnatomyClass, LabelMask};

/// 4×4 pixel counts; rows are ground truth, columns prediction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 4]; 4]);

impl ConfusionMatrix {
    pub fn from_pair(pred: &LabelMask, gt: &LabelMask) -> Result<Self> {
        pred.same_shape(gt)?;
        let mut m = ConfusionMatrix::default();
        for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
            m.0[g.index()][p.index()] += 1;
        }
        Ok(m)
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.0.iter_mut().zip(&other.0) {
            for (v, o) in row.iter_mut().zip(orow) {
                *v += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    /// `(intersection, union)` for one class.
    pub fn class_counts(&self, class: AnatomyClass) -> (u64, u64) {
        let i = class.index();
        let tp = self.0[i][i];
        let gt: u64 = self.0[i].iter().sum();
        let pred: u64 = self.0.iter().map(|row| row[i]).sum();
        (tp, gt + pred - tp)
    }

    /// IoU of one class; 1 when the class is absent from both sides.
    pub fn class_iou(&self, class: AnatomyClass) -> f64 {
        let (inter, union) = self.class_counts(class);
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegMetrics {
    pub per_class_iou: BTreeMap<AnatomyClass, f64>,
    pub miou: f64,
    pub confusion: ConfusionMatrix,
}

impl SegMetrics {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let per_class_iou: BTreeMap<_, _> = AnatomyClass::ALL
            .into_iter()
            .map(|c| (c, confusion.class_iou(c)))
            .collect();
        let miou = per_class_iou.values().sum::<f64>() / AnatomyClass::ALL.len() as f64;
        SegMetrics {
            per_class_iou,
            miou,
            confusion,
        }
    }
}

/// `|pred ∩ gt| / |pred ∪ gt|` for one class; 1 when the class is absent from both.
pub fn iou(pred: &LabelMask, gt: &LabelMask, class: AnatomyClass) -> Result<f64> {
    pred.same_shape(gt)?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
        let (ip, ig) = (p == class, g == class);
        inter += (ip && ig) as u64;
        union += (ip || ig) as u64;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

/// Dataset-level metrics: one confusion matrix accumulated over every pair.
pub fn aggregate_miou(pairs: &[(&LabelMask, &LabelMask)]) -> Result<SegMetrics> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut confusion = ConfusionMatrix::default();
    for (pred, gt) in pairs {
        confusion.merge(&ConfusionMatrix::from_pair(pred, gt)?);
    }
    Ok(SegMetrics::from_confusion(confusion))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerImageMiou {
    pub per_image: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Image-averaged alternative to [`aggregate_miou`]: mIoU per pair, then mean and
/// population standard deviation.
pub fn per_image_miou(pairs: &[(&LabelMask, &LabelMask)]) -> Result<PerImageMiou> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let per_image = pairs
        .iter()
        .map(|(p, g)| ConfusionMatrix::from_pair(p, g).map(|c| SegMetrics::from_confusion(c).miou))
        .collect::<Result<Vec<_>>>()?;
    let n = per_image.len() as f64;
    let mean = per_image.iter().sum::<f64>() / n;
    let std = (per_image.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PerImageMiou {
        per_image,
        mean,
        std,
    })
}
