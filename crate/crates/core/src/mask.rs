//! Label masks: the input contract shared by every stage.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anatomy label stored in a mask pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum AnatomyClass {
    Background = 0,
    Head = 1,
    Abdomen = 2,
    Femur = 3,
}

impl AnatomyClass {
    pub const ALL: [AnatomyClass; 4] = [
        AnatomyClass::Background,
        AnatomyClass::Head,
        AnatomyClass::Abdomen,
        AnatomyClass::Femur,
    ];

    pub const ANATOMY: [AnatomyClass; 3] = [
        AnatomyClass::Head,
        AnatomyClass::Abdomen,
        AnatomyClass::Femur,
    ];

    pub fn from_value(value: u8) -> Option<Self> {
        match value {
            0 => Some(AnatomyClass::Background),
            1 => Some(AnatomyClass::Head),
            2 => Some(AnatomyClass::Abdomen),
            3 => Some(AnatomyClass::Femur),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AnatomyClass::Background => "background",
            AnatomyClass::Head => "head",
            AnatomyClass::Abdomen => "abdomen",
            AnatomyClass::Femur => "femur",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "background" | "bg" => Some(AnatomyClass::Background),
            "head" | "h" => Some(AnatomyClass::Head),
            "abdomen" | "a" => Some(AnatomyClass::Abdomen),
            "femur" | "f" => Some(AnatomyClass::Femur),
            _ => None,
        }
    }
}

impl fmt::Display for AnatomyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense row-major grid of anatomy labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<AnatomyClass>,
}

impl LabelMask {
    /// An all-background mask.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(LabelMask {
            width,
            height,
            labels: vec![AnatomyClass::Background; width * height],
        })
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<AnatomyClass>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{} labels do not fill a {width}x{height} mask",
                labels.len()
            )));
        }
        Ok(LabelMask {
            width,
            height,
            labels,
        })
    }

    /// Builds a mask from raw label values, rejecting anything outside {0,1,2,3}.
    pub fn from_raw(width: usize, height: usize, values: &[u8]) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{} values do not fill a {width}x{height} mask",
                values.len()
            )));
        }
        let labels = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                AnatomyClass::from_value(v).ok_or(Error::IllegalLabelValue {
                    x: i % width,
                    y: i / width,
                    value: v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelMask {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[AnatomyClass] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> AnatomyClass {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, class: AnatomyClass) {
        self.labels[y * self.width + x] = class;
    }

    /// Raw label values, row-major.
    pub fn to_raw(&self) -> Vec<u8> {
        self.labels.iter().map(|&c| c as u8).collect()
    }

    /// Pixel totals indexed by [`AnatomyClass::index`].
    pub fn class_counts(&self) -> [u64; 4] {
        let mut counts = [0u64; 4];
        for &c in &self.labels {
            counts[c.index()] += 1;
        }
        counts
    }

    pub fn same_shape(&self, other: &LabelMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::ShapeMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_illegal_values_with_coordinate() {
        let err = LabelMask::from_raw(3, 2, &[0, 1, 2, 3, 7, 0]).unwrap_err();
        match err {
            Error::IllegalLabelValue { x, y, value } => assert_eq!((x, y, value), (1, 1, 7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_dimensions() {
        assert!(LabelMask::new(0, 4).is_err());
        assert!(LabelMask::from_labels(2, 2, vec![AnatomyClass::Head; 3]).is_err());
    }

    #[test]
    fn counts_classes() {
        let m = LabelMask::from_raw(2, 2, &[0, 1, 1, 3]).unwrap();
        assert_eq!(m.class_counts(), [1, 2, 0, 1]);
    }
}
