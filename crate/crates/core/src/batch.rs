//! Batch measurement over a directory of masks, and phantom corpus generation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biometry::{measure, MeasureConfig, PlaneClass};
use crate::error::{Error, Result};
use crate::io::{load_gray, load_mask, save_gray, save_mask, ReportDocument, ReportEntry};
use crate::phantom::{render_frame, render_mask, PhantomSampler, PhantomSpec, PhantomTruth};
use crate::scale::{detect_ruler, infer_scale, RulerConfig, RulerTemplates, ScaleEstimate};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleMode {
    /// Read the ruler from the matching frame in the image directory.
    Ruler,
    Fixed(f64),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub masks_dir: PathBuf,
    /// Frames named like the masks; required in ruler mode.
    pub images_dir: Option<PathBuf>,
    pub scale: ScaleMode,
    pub ruler: RulerConfig,
    pub templates: RulerTemplates,
    pub measure: MeasureConfig,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
}

impl RunConfig {
    pub fn new(masks_dir: impl Into<PathBuf>, scale: ScaleMode) -> Self {
        RunConfig {
            masks_dir: masks_dir.into(),
            images_dir: None,
            scale,
            ruler: RulerConfig::default(),
            templates: RulerTemplates::default(),
            measure: MeasureConfig::default(),
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.masks_dir.is_dir() {
            return Err(Error::UnreadableFile {
                path: self.masks_dir.clone(),
                reason: "mask directory does not exist".into(),
            });
        }
        match (self.scale, &self.images_dir) {
            (ScaleMode::Fixed(p), _) if !(p.is_finite() && p > 0.0) => Err(Error::InvalidInput(
                format!("px/mm must be positive, got {p}"),
            )),
            (ScaleMode::Ruler, None) => Err(Error::InvalidInput(
                "ruler scale mode needs an image directory".into(),
            )),
            (_, Some(dir)) if !dir.is_dir() => Err(Error::UnreadableFile {
                path: dir.clone(),
                reason: "image directory does not exist".into(),
            }),
            _ => Ok(()),
        }
    }
}

/// PNG files in `dir` keyed by file stem, in id order.
pub fn list_png_ids(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut ids = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png || !path.is_file() {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            ids.insert(stem.to_string(), path);
        }
    }
    Ok(ids)
}

fn measure_one(
    config: &RunConfig,
    id: &str,
    mask_path: &Path,
) -> Result<crate::biometry::BiometryReport> {
    let mask = load_mask(mask_path)?;
    let scale = match config.scale {
        ScaleMode::Fixed(p) => ScaleEstimate::fixed(p)?,
        ScaleMode::Ruler => {
            let dir = config.images_dir.as_ref().expect("validated");
            let frame = load_gray(dir.join(format!("{id}.png")))?;
            infer_scale(&detect_ruler(&frame, &config.templates, &config.ruler)?)
        }
    };
    measure(&mask, &scale, &config.measure)
}

/// Measures every mask in the configured directory.
///
/// A failing image becomes an error entry and never affects the others.
/// Entries are ordered by image id regardless of worker scheduling.
pub fn run_measure_batch(config: &RunConfig) -> Result<ReportDocument> {
    config.validate()?;
    let ids = list_png_ids(&config.masks_dir)?;
    if ids.is_empty() {
        return Err(Error::NoInputs(config.masks_dir.clone()));
    }
    let work: Vec<(&String, &PathBuf)> = ids.iter().collect();
    let run = || -> Vec<(String, ReportEntry)> {
        work.par_iter()
            .map(|(id, path)| {
                (
                    (*id).clone(),
                    ReportEntry::from_result(measure_one(config, id, path)),
                )
            })
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(run)
    } else {
        run()
    };
    Ok(ReportDocument::new(results.into_iter().collect()))
}

/// Truth file written next to each phantom mask and frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomRecord {
    pub id: String,
    pub spec: PhantomSpec,
    pub truth: PhantomTruth,
}

/// Writes `n` phantoms of `kind` as `masks/<id>.png`, `images/<id>.png` and
/// `truth/<id>.json` under `out`. Phantom `i` uses seed `seed + i`.
pub fn write_phantom_corpus(
    out: &Path,
    kind: PlaneClass,
    n: usize,
    seed: u64,
    sampler: &PhantomSampler,
) -> Result<Vec<PhantomRecord>> {
    let dirs = ["masks", "images", "truth"].map(|d| out.join(d));
    for d in &dirs {
        std::fs::create_dir_all(d)?;
    }
    (0..n)
        .map(|i| {
            let id = format!("{kind}_{i:04}");
            let spec = sampler.sample(kind, seed.wrapping_add(i as u64));
            let (mask, truth) = render_mask(&spec)?;
            let frame = render_frame(&spec, &mask, RulerConfig::default().band_fraction)?;
            save_mask(dirs[0].join(format!("{id}.png")), &mask)?;
            save_gray(dirs[1].join(format!("{id}.png")), &frame)?;
            let record = PhantomRecord {
                id: id.clone(),
                spec,
                truth,
            };
            std::fs::write(
                dirs[2].join(format!("{id}.json")),
                serde_json::to_string_pretty(&record)? + "\n",
            )?;
            Ok(record)
        })
        .collect()
}
