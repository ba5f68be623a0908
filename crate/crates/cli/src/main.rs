use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fetal_biometry::batch::{
    list_png_ids, run_measure_batch, write_phantom_corpus, RunConfig, ScaleMode,
};
use fetal_biometry::biometry::{MeasureConfig, PlaneClass};
use fetal_biometry::evaluation::{
    aggregate_miou, assign_folds, class_weights, error_stats, per_image_miou, ErrorStats,
    PerImageMiou, SegMetrics,
};
use fetal_biometry::io::{
    load_gray, load_mask, load_templates, read_class_counts, read_clinical, read_manifest,
    read_report, render_overlay, save_templates, to_canonical_json, write_json, TEMPLATE_DIR_ENV,
};
use fetal_biometry::phantom::PhantomSampler;
use fetal_biometry::scale::{RulerConfig, RulerTemplates};
use fetal_biometry::LabelMask;

#[derive(Parser)]
#[command(
    name = "fetbio",
    version,
    about = "Fetal biometry from ultrasound label masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Ruler,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Head,
    Abdomen,
    Femur,
}

impl From<KindArg> for PlaneClass {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Head => PlaneClass::Head,
            KindArg::Abdomen => PlaneClass::Abdomen,
            KindArg::Femur => PlaneClass::Femur,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Measure every mask in a directory and write a report.
    Measure {
        #[arg(long)]
        masks: PathBuf,
        /// Frames carrying the ruler, named like the masks.
        #[arg(long)]
        images: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "px_per_mm")]
        scale: Option<ScaleArg>,
        /// Skip ruler detection and use this scale for every image.
        #[arg(long)]
        px_per_mm: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Directory with major/minor template PNGs and JSON sidecars.
        #[arg(long, env = TEMPLATE_DIR_ENV)]
        templates: Option<PathBuf>,
        /// Fraction of the width, from the left, searched for the ruler.
        #[arg(long, default_value_t = 0.12)]
        band_fraction: f64,
        #[arg(long, default_value_t = 0.7)]
        ncc_threshold: f64,
        /// Force the ruler marker interval (5 or 10 mm).
        #[arg(long)]
        interval_mm: Option<u32>,
        /// Regions smaller than this are flagged TinyRegion.
        #[arg(long, default_value_t = 100)]
        min_area: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Segmentation metrics of predicted masks against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also report the image-averaged mIoU.
        #[arg(long)]
        per_image: bool,
    },
    /// Absolute-error statistics of a report against clinical measurements.
    Errors {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        clinical: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted cross-entropy class weights from per-class pixel counts.
    Weights {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subject-disjoint fold assignment.
    Folds {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate phantom masks, frames and truth files.
    Phantom {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Randomly erode or dilate each phantom by up to this many pixels.
        #[arg(long)]
        noise: Option<u32>,
    },
    /// Draw fitted shapes and measurements over the frames as SVG.
    Overlay {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the built-in ruler templates as asset files.
    Templates {
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_json(path, value).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{}", to_canonical_json(value)?);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EvalDocument {
    images: usize,
    aggregate: SegMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_image: Option<PerImageMiou>,
}

fn eval(pred: &Path, gt: &Path, out: &Path, per_image: bool) -> Result<()> {
    let pred_ids = list_png_ids(pred)?;
    let gt_ids = list_png_ids(gt)?;
    if pred_ids.is_empty() {
        bail!("no predicted masks in {}", pred.display());
    }
    let mut masks: Vec<(LabelMask, LabelMask)> = Vec::new();
    for (id, path) in &pred_ids {
        let gt_path = gt_ids
            .get(id)
            .with_context(|| format!("no ground truth for {id}"))?;
        masks.push((load_mask(path)?, load_mask(gt_path)?));
    }
    let pairs: Vec<(&LabelMask, &LabelMask)> = masks.iter().map(|(p, g)| (p, g)).collect();
    let doc = EvalDocument {
        images: pairs.len(),
        aggregate: aggregate_miou(&pairs)?,
        per_image: if per_image {
            Some(per_image_miou(&pairs)?)
        } else {
            None
        },
    };
    eprintln!("{} image(s), mIoU {:.4}", doc.images, doc.aggregate.miou);
    emit(&doc, Some(out))
}

fn errors(report: &Path, clinical: &Path, out: &Path) -> Result<()> {
    let doc = read_report(report)?;
    let mut pairs: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut unmatched = 0usize;
    for record in read_clinical(clinical)? {
        let predicted = doc
            .entries
            .get(&record.image_id)
            .and_then(|e| e.report())
            .and_then(|r| r.get(record.measurement));
        match predicted {
            Some(m) => pairs
                .entry(record.measurement.to_string())
                .or_default()
                .push((m.value_mm, record.value_mm)),
            None => unmatched += 1,
        }
    }
    if unmatched > 0 {
        eprintln!("{unmatched} clinical value(s) without a matching prediction");
    }
    let stats = pairs
        .iter()
        .map(|(name, p)| Ok((name.clone(), error_stats(p, name)?)))
        .collect::<Result<BTreeMap<String, ErrorStats>>>()?;
    if stats.is_empty() {
        bail!("no clinical value matched a prediction");
    }
    for s in stats.values() {
        eprintln!(
            "{:<5} n={:<4} median {:.2} mm, within ±15%: {:.1}%",
            s.measurement,
            s.count,
            s.median,
            100.0 * s.within_tolerance_rate
        );
    }
    emit(&stats, Some(out))
}

fn overlay(report: &Path, images: &Path, out: &Path) -> Result<()> {
    let doc = read_report(report)?;
    std::fs::create_dir_all(out)?;
    let mut written = 0;
    for (id, entry) in &doc.entries {
        let Some(r) = entry.report() else { continue };
        let frame = load_gray(images.join(format!("{id}.png")))?;
        std::fs::write(out.join(format!("{id}.svg")), render_overlay(&frame, r))?;
        written += 1;
    }
    eprintln!("wrote {written} overlay(s) to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Measure {
            masks,
            images,
            scale: _,
            px_per_mm,
            out,
            templates,
            band_fraction,
            ncc_threshold,
            interval_mm,
            min_area,
            workers,
        } => {
            let templates = match templates {
                Some(dir) => load_templates(&dir)
                    .with_context(|| format!("loading templates from {}", dir.display()))?,
                None => RulerTemplates::default(),
            };
            let config = RunConfig {
                masks_dir: masks,
                images_dir: images,
                scale: px_per_mm.map_or(ScaleMode::Ruler, ScaleMode::Fixed),
                ruler: RulerConfig {
                    band_fraction,
                    ncc_threshold,
                    interval_override_mm: interval_mm,
                    ..RulerConfig::default()
                },
                templates,
                measure: MeasureConfig {
                    min_region_area: min_area,
                    ..MeasureConfig::default()
                },
                workers,
            };
            let doc = run_measure_batch(&config)?;
            eprintln!(
                "{} image(s): {} measured, {} failed",
                doc.summary.total, doc.summary.succeeded, doc.summary.failed
            );
            emit(&doc, Some(&out))
        }
        Command::Eval {
            pred,
            gt,
            out,
            per_image,
        } => eval(&pred, &gt, &out, per_image),
        Command::Errors {
            report,
            clinical,
            out,
        } => errors(&report, &clinical, &out),
        Command::Weights { counts, out } => {
            let weights = class_weights(&read_class_counts(&counts)?)?;
            emit(&weights, out.as_deref())
        }
        Command::Folds {
            manifest,
            k,
            seed,
            out,
        } => {
            let assignment = assign_folds(&read_manifest(&manifest)?, k, seed)?;
            emit(&assignment, out.as_deref())
        }
        Command::Phantom {
            kind,
            n,
            seed,
            out,
            noise,
        } => {
            let sampler = PhantomSampler {
                noise_radius: noise,
                ..PhantomSampler::default()
            };
            let records = write_phantom_corpus(&out, kind.into(), n, seed, &sampler)?;
            eprintln!("wrote {} phantom(s) to {}", records.len(), out.display());
            Ok(())
        }
        Command::Overlay {
            report,
            images,
            out,
        } => overlay(&report, &images, &out),
        Command::Templates { out } => {
            save_templates(&out, &RulerTemplates::default())?;
            eprintln!("wrote default templates to {}", out.display());
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
