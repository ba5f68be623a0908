//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fetal_biometry::batch::{run_measure_batch, write_phantom_corpus, RunConfig, ScaleMode};
use fetal_biometry::biometry::{
    measure, BiometryReport, MeasureConfig, MeasurementName, PlaneClass,
};
use fetal_biometry::evaluation::{
    aggregate_miou, assign_folds, class_weights, error_stats, iou, ClassPixelCounts,
};
use fetal_biometry::geometry::{fit_ellipse, EllipseParams};
use fetal_biometry::io::{to_canonical_json, write_json};
use fetal_biometry::phantom::{render_frame, render_mask, PhantomSampler, PhantomSpec};
use fetal_biometry::scale::{
    detect_ruler, infer_scale, RulerConfig, RulerTemplates, ScaleEstimate,
};
use fetal_biometry::{AnatomyClass, LabelMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn ellipse_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE11);
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for _ in 0..1000 {
        let a = rng.random_range(20.0..500.0);
        let b = a * rng.random_range(0.3..1.0);
        let truth = EllipseParams::new(
            rng.random_range(-500.0..1500.0),
            rng.random_range(-500.0..1500.0),
            a,
            b,
            rng.random_range(0.0..PI),
        );
        let n = rng.random_range(20..400);
        let points: Vec<_> = (0..n)
            .map(|i| truth.point_at(2.0 * PI * i as f64 / n as f64))
            .collect();
        let start = Instant::now();
        let fit = fit_ellipse(&points).map_err(|e| format!("fit failed: {e}"))?;
        slowest = slowest.max(start.elapsed());
        let mut err = [
            fit.cx - truth.cx,
            fit.cy - truth.cy,
            fit.a - truth.a,
            fit.b - truth.b,
        ]
        .into_iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        // Orientation is undefined for circles, so its error is weighed by the eccentricity.
        err = err.max(angle_diff(fit.theta, truth.theta) * (truth.a - truth.b) / truth.a);
        worst = worst.max(err);
    }
    check(
        worst <= 1e-6 && slowest < Duration::from_millis(50),
        format!(
            "worst parameter error {worst:.2e}, slowest fit {:.3} ms",
            slowest.as_secs_f64() * 1e3
        ),
    )
}

fn ruler_scale(spec: &PhantomSpec, mask: &LabelMask) -> Result<ScaleEstimate, String> {
    let config = RulerConfig::default();
    let frame = render_frame(spec, mask, config.band_fraction).map_err(|e| e.to_string())?;
    let detection =
        detect_ruler(&frame, &RulerTemplates::default(), &config).map_err(|e| e.to_string())?;
    Ok(infer_scale(&detection))
}

fn femur_extent_diagonal(mask: &LabelMask) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) == AnatomyClass::Femur {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    ((x1 - x0) as f64).hypot((y1 - y0) as f64)
}

fn rasterization(reports: &mut Vec<BiometryReport>) -> Outcome {
    let start = Instant::now();
    let sampler = PhantomSampler::default();
    let config = MeasureConfig::default();
    let (mut worst_axis, mut worst_circ, mut worst_fl) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..400u64 {
        let kind = match i % 4 {
            0 | 1 => [PlaneClass::Head, PlaneClass::Abdomen][(i % 2) as usize],
            _ => PlaneClass::Femur,
        };
        let spec = sampler.sample(kind, 1000 + i);
        let (mask, truth) = render_mask(&spec).map_err(|e| e.to_string())?;
        let scale = ruler_scale(&spec, &mask)?;
        let report = measure(&mask, &scale, &config).map_err(|e| format!("phantom {i}: {e}"))?;
        if report.plane != kind {
            return Err(format!(
                "phantom {i}: plane {} detected as {}",
                kind, report.plane
            ));
        }
        for name in kind.measurements() {
            let got = report
                .get(*name)
                .ok_or_else(|| format!("phantom {i}: {name} missing"))?;
            let want = truth.measurements[name];
            match name {
                MeasurementName::HC | MeasurementName::AC => {
                    worst_circ =
                        worst_circ.max((got.value_mm - want.value_mm).abs() / want.value_mm);
                }
                MeasurementName::FL => {
                    let oracle = femur_extent_diagonal(&mask);
                    worst_fl = worst_fl.max((got.value_px - oracle).abs());
                    worst_fl = worst_fl.max((got.value_px - want.value_px).abs());
                }
                _ => worst_axis = worst_axis.max((got.value_px - want.value_px).abs()),
            }
        }
        reports.push(report);
    }
    let elapsed = start.elapsed();
    check(
        worst_axis <= 1.0 && worst_circ <= 0.02 && worst_fl <= 1.0 && elapsed < Duration::from_secs(60),
        format!(
            "200 ellipse + 200 femur phantoms: worst axis {worst_axis:.3} px, worst HC/AC {:.3}%, worst FL {worst_fl:.3} px, {:.1} s",
            100.0 * worst_circ,
            elapsed.as_secs_f64()
        ),
    )
}

fn circumference_formula(reports: &[BiometryReport]) -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for r in reports {
        let pairs = [
            (
                MeasurementName::HC,
                MeasurementName::BPD,
                MeasurementName::OFD,
            ),
            (
                MeasurementName::AC,
                MeasurementName::TAD,
                MeasurementName::APAD,
            ),
        ];
        for (c, d1, d2) in pairs {
            let (Some(c), Some(d1), Some(d2)) = (r.get(c), r.get(d1), r.get(d2)) else {
                continue;
            };
            for (v, a, b) in [
                (c.value_px, d1.value_px, d2.value_px),
                (c.value_mm, d1.value_mm, d2.value_mm),
            ] {
                let expected = PI * (a + b) / 2.0;
                worst = worst.max((v - expected).abs() / expected);
            }
            checked += 1;
        }
    }
    check(
        checked > 0 && worst <= 1e-9,
        format!("{checked} circumferences, worst relative deviation {worst:.1e}"),
    )
}

fn table_weights() -> Outcome {
    let counts = ClassPixelCounts::from_array([816239.0, 74127.0, 44691.0, 3833.0]);
    let weights = class_weights(&counts).map_err(|e| e.to_string())?;
    let expected = [
        (AnatomyClass::Background, 1.0),
        (AnatomyClass::Head, 816239.0 / 74127.0),
        (AnatomyClass::Abdomen, 816239.0 / 44691.0),
        (AnatomyClass::Femur, 816239.0 / 3833.0),
    ];
    let mut worst = 0.0f64;
    for (class, want) in expected {
        let got = weights.0[&class];
        worst = worst.max((got - want).abs() / want);
    }
    check(
        worst <= 1e-6,
        format!(
            "weights {:.4}/{:.4}/{:.4}/{:.4}, worst relative error {worst:.1e}",
            weights.0[&AnatomyClass::Background],
            weights.0[&AnatomyClass::Head],
            weights.0[&AnatomyClass::Abdomen],
            weights.0[&AnatomyClass::Femur]
        ),
    )
}

fn scale_recovery() -> Outcome {
    let sampler = PhantomSampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CA1E);
    let mut worst = 0.0f64;
    let mut wrong = 0;
    for i in 0..100u64 {
        let mut spec = sampler.sample(PlaneClass::Head, 5000 + i);
        spec.px_per_mm = 2.0 + 10.0 * i as f64 / 99.0;
        spec.ruler.interval_mm = if i % 2 == 0 { 5 } else { 10 };
        spec.ruler.origin_y = 8.0 + rng.random_range(0.0..4.0);
        let needed = (spec.ruler.origin_y + 5.0 * spec.tick_spacing_px() + 10.0).ceil() as usize;
        spec.height = spec.height.max(needed);
        let (mask, _) = render_mask(&spec).map_err(|e| e.to_string())?;
        let scale = ruler_scale(&spec, &mask).map_err(|e| format!("ruler {i}: {e}"))?;
        let detection = scale
            .detection
            .as_ref()
            .expect("ruler scale carries its detection");
        if detection.interval_mm != spec.ruler.interval_mm {
            wrong += 1;
        }
        worst = worst.max((scale.px_per_mm - spec.px_per_mm).abs() / spec.px_per_mm);
    }
    check(
        wrong == 0 && worst <= 0.01,
        format!(
            "100 rulers: {wrong} interval misclassifications, worst px/mm error {:.3}%",
            100.0 * worst
        ),
    )
}

fn random_mask(rng: &mut ChaCha8Rng, n: usize) -> LabelMask {
    // Blocky masks so that some classes are often absent.
    let classes: Vec<AnatomyClass> = AnatomyClass::ALL
        .into_iter()
        .filter(|_| rng.random_bool(0.7))
        .collect();
    let classes = if classes.is_empty() {
        vec![AnatomyClass::Background]
    } else {
        classes
    };
    let cell = rng.random_range(1..=8);
    let grid: Vec<AnatomyClass> = (0..n * n)
        .map(|_| classes[rng.random_range(0..classes.len())])
        .collect();
    let labels = (0..n * n)
        .map(|i| {
            let (x, y) = (i % n, i / n);
            grid[(y / cell) * n + x / cell]
        })
        .collect();
    LabelMask::from_labels(n, n, labels).unwrap()
}

fn class_pixels<'a>(
    masks: impl Iterator<Item = &'a LabelMask>,
    class: AnatomyClass,
) -> HashSet<(usize, usize)> {
    masks
        .enumerate()
        .flat_map(|(k, m)| {
            m.labels()
                .iter()
                .enumerate()
                .filter(move |(_, &l)| l == class)
                .map(move |(i, _)| (k, i))
        })
        .collect()
}

fn brute_force_miou(pairs: &[(&LabelMask, &LabelMask)]) -> f64 {
    let mut ious = Vec::new();
    for class in AnatomyClass::ALL {
        let pred = class_pixels(pairs.iter().map(|p| p.0), class);
        let gt = class_pixels(pairs.iter().map(|p| p.1), class);
        let union = pred.union(&gt).count();
        ious.push(if union == 0 {
            1.0
        } else {
            pred.intersection(&gt).count() as f64 / union as f64
        });
    }
    ious.iter().sum::<f64>() / ious.len() as f64
}

fn miou_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10);
    let masks: Vec<(LabelMask, LabelMask)> = (0..50)
        .map(|_| (random_mask(&mut rng, 64), random_mask(&mut rng, 64)))
        .collect();
    let pairs: Vec<(&LabelMask, &LabelMask)> = masks.iter().map(|(p, g)| (p, g)).collect();
    let mut mismatches = 0;
    for pair in &pairs {
        if aggregate_miou(std::slice::from_ref(pair)).unwrap().miou
            != brute_force_miou(std::slice::from_ref(pair))
        {
            mismatches += 1;
        }
    }
    let dataset = aggregate_miou(&pairs).unwrap().miou;
    let dataset_exact = dataset == brute_force_miou(&pairs);
    let identity_ok = masks
        .iter()
        .all(|(p, _)| aggregate_miou(&[(p, p)]).unwrap().miou == 1.0);

    let mut a = LabelMask::new(4, 4).unwrap();
    let mut b = LabelMask::new(4, 4).unwrap();
    for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        a.set(x, y, AnatomyClass::Head);
        b.set(x + 1, y + 1, AnatomyClass::Head);
    }
    let block = iou(&a, &b, AnatomyClass::Head).unwrap();
    let block_metrics = aggregate_miou(&[(&a, &b)]).unwrap();
    let block_ok =
        block == 1.0 / 7.0 && block_metrics.per_class_iou[&AnatomyClass::Head] == 1.0 / 7.0;
    check(
        mismatches == 0 && dataset_exact && identity_ok && block_ok,
        format!(
            "50 pairs: {mismatches} mismatches, dataset-level exact: {dataset_exact}, identity 1.0: {identity_ok}, offset blocks {block:.6}"
        ),
    )
}

fn fold_assignment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF01D);
    let k = 4;
    let mut worst_slack = i64::MIN;
    for trial in 0..100u64 {
        let manifest: Vec<(String, usize)> = (0..42)
            .map(|s| (format!("subject{s:02}"), rng.random_range(1..=20)))
            .collect();
        let folds = assign_folds(&manifest, k, trial).map_err(|e| e.to_string())?;
        if folds.mapping.len() != manifest.len() {
            return Err(format!(
                "manifest {trial}: {} of 42 subjects assigned",
                folds.mapping.len()
            ));
        }
        let mut totals = vec![0usize; k];
        let mut members: Vec<HashSet<&str>> = vec![HashSet::new(); k];
        for (subject, count) in &manifest {
            let f = *folds
                .mapping
                .get(subject)
                .ok_or_else(|| format!("{subject} unassigned"))?;
            if f >= k {
                return Err(format!("manifest {trial}: fold {f} out of range"));
            }
            totals[f] += count;
            members[f].insert(subject);
        }
        let disjoint = (0..k).all(|i| (i + 1..k).all(|j| members[i].is_disjoint(&members[j])));
        if !disjoint || members.iter().any(HashSet::is_empty) {
            return Err(format!("manifest {trial}: folds overlap or one is empty"));
        }
        let spread = (totals.iter().max().unwrap() - totals.iter().min().unwrap()) as i64;
        let largest = manifest.iter().map(|(_, c)| *c).max().unwrap() as i64;
        if spread > largest {
            return Err(format!(
                "manifest {trial}: spread {spread} exceeds largest subject {largest}"
            ));
        }
        worst_slack = worst_slack.max(spread - largest);
    }
    check(
        true,
        format!(
            "100 manifests disjoint, all {k} folds used, spread - largest count ≤ {worst_slack}"
        ),
    )
}

fn tolerance_logic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x15);
    let mut wrong = 0;
    for _ in 0..100 {
        let clinical = rng.random_range(10.0..400.0);
        for (rel, inside) in [
            (0.149, true),
            (-0.149, true),
            (0.151, false),
            (-0.151, false),
        ] {
            let stats = error_stats(&[(clinical * (1.0 + rel), clinical)], "HC").unwrap();
            if (stats.within_tolerance_rate == 1.0) != inside {
                wrong += 1;
            }
        }
    }
    let mixed = error_stats(
        &[(114.9, 100.0), (115.1, 100.0), (85.1, 100.0), (84.9, 100.0)],
        "AC",
    )
    .unwrap();
    check(
        wrong == 0 && mixed.within_tolerance_rate == 0.5,
        format!(
            "400 boundary pairs, {wrong} misclassified; mixed rate {}",
            mixed.within_tolerance_rate
        ),
    )
}

fn perturbation(reports: &mut Vec<BiometryReport>) -> Outcome {
    let sampler = PhantomSampler {
        semi_major: 150.0..300.0,
        noise_radius: Some(2),
        ..PhantomSampler::default()
    };
    let config = MeasureConfig::default();
    let mut within = 0;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let kind = if i % 2 == 0 {
            PlaneClass::Head
        } else {
            PlaneClass::Abdomen
        };
        let spec = sampler.sample(kind, 9000 + i);
        let (mask, truth) = render_mask(&spec).map_err(|e| e.to_string())?;
        let scale = ScaleEstimate::fixed(spec.px_per_mm).map_err(|e| e.to_string())?;
        let report = measure(&mask, &scale, &config).map_err(|e| format!("trial {i}: {e}"))?;
        let name = if kind == PlaneClass::Head {
            MeasurementName::HC
        } else {
            MeasurementName::AC
        };
        let want = truth.measurements[&name].value_mm;
        let err = report
            .get(name)
            .map_or(f64::INFINITY, |m| (m.value_mm - want).abs() / want);
        worst = worst.max(err);
        if err <= 0.05 {
            within += 1;
        }
        reports.push(report);
    }
    check(
        within >= 190,
        format!(
            "{within}/200 trials within 5% HC/AC error, worst {:.2}%",
            100.0 * worst
        ),
    )
}

fn batch_determinism(reports: &mut Vec<BiometryReport>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sampler = PhantomSampler::default();
    for (kind, seed) in [
        (PlaneClass::Head, 1),
        (PlaneClass::Abdomen, 2),
        (PlaneClass::Femur, 3),
    ] {
        write_phantom_corpus(dir.path(), kind, 4, seed, &sampler).map_err(|e| e.to_string())?;
    }
    let mut outputs = Vec::new();
    for (run, workers) in [1, 4, 0, 4].into_iter().enumerate() {
        let mut config = RunConfig::new(dir.path().join("masks"), ScaleMode::Ruler);
        config.images_dir = Some(dir.path().join("images"));
        config.workers = workers;
        let doc = run_measure_batch(&config).map_err(|e| e.to_string())?;
        if doc.summary.succeeded != 12 {
            return Err(format!(
                "run {run}: {} of 12 measured",
                doc.summary.succeeded
            ));
        }
        let path = dir.path().join(format!("report{run}.json"));
        write_json(&path, &doc).map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        if run == 0 {
            reports.extend(doc.entries.values().filter_map(|e| e.report().cloned()));
            let canonical = to_canonical_json(&doc).map_err(|e| e.to_string())?;
            if canonical.as_bytes() != outputs[0].as_slice() {
                return Err("written report differs from its canonical form".into());
            }
        }
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    check(
        identical,
        format!(
            "4 runs over 12 phantoms, {} bytes each, identical: {identical}",
            outputs[0].len()
        ),
    )
}

fn main() {
    let mut reports = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("ellipse fit exactness", ellipse_exactness()),
        ("rasterization pipeline", rasterization(&mut reports)),
        ("perturbation robustness", perturbation(&mut reports)),
        ("batch determinism", batch_determinism(&mut reports)),
        ("circumference formula", circumference_formula(&reports)),
        ("class weights", table_weights()),
        ("scale recovery", scale_recovery()),
        ("mIoU oracle", miou_oracle()),
        ("fold assignment", fold_assignment()),
        ("tolerance logic", tolerance_logic()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<24} {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
