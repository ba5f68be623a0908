use std::collections::HashSet;
use std::f64::consts::PI;

use fetal_biometry::biometry::{
    assign_abdomen_axes, circumference_from_diameters, measure, MeasureConfig, PlaneClass,
};
use fetal_biometry::evaluation::{
    aggregate_miou, assign_folds, class_weights, iou, ClassPixelCounts,
};
use fetal_biometry::geometry::{extract_regions, fit_ellipse, EllipseParams};
use fetal_biometry::phantom::{render_mask, render_ruler, PhantomSampler, PhantomShape};
use fetal_biometry::scale::ScaleEstimate;
use fetal_biometry::{AnatomyClass, LabelMask};
use proptest::prelude::*;

fn mask_strategy(max: usize) -> impl Strategy<Value = LabelMask> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(0u8..4, w * h)
            .prop_map(move |raw| LabelMask::from_raw(w, h, &raw).unwrap())
    })
}

fn mask_pair(max: usize) -> impl Strategy<Value = (LabelMask, LabelMask)> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec(0u8..4, w * h),
            prop::collection::vec(0u8..4, w * h),
        )
            .prop_map(move |(p, g)| {
                (
                    LabelMask::from_raw(w, h, &p).unwrap(),
                    LabelMask::from_raw(w, h, &g).unwrap(),
                )
            })
    })
}

fn ellipse_strategy() -> impl Strategy<Value = EllipseParams> {
    (
        -200.0..200.0f64,
        -200.0..200.0f64,
        10.0..300.0f64,
        0.3..0.95f64,
        0.0..PI,
    )
        .prop_map(|(cx, cy, a, r, t)| EllipseParams::new(cx, cy, a, a * r, t))
}

fn samples(e: &EllipseParams, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| e.point_at(2.0 * PI * i as f64 / n as f64))
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regions_partition_the_foreground(mask in mask_strategy(24)) {
        let regions = extract_regions(&mask);
        let mut seen = HashSet::new();
        for r in &regions {
            for &(x, y) in &r.pixels {
                prop_assert_eq!(mask.get(x, y), r.class);
                prop_assert!(seen.insert((x, y)));
            }
        }
        let foreground = mask.labels().iter().filter(|&&l| l != AnatomyClass::Background).count();
        prop_assert_eq!(seen.len(), foreground);
        prop_assert!(regions.windows(2).all(|w| w[0].area() >= w[1].area()));
    }

    #[test]
    fn fit_is_translation_and_scale_equivariant(
        e in ellipse_strategy(),
        dx in -1000.0..1000.0f64,
        dy in -1000.0..1000.0f64,
        s in 0.1..10.0f64,
    ) {
        let pts = samples(&e, 50);
        let base = fit_ellipse(&pts).unwrap();
        let moved = fit_ellipse(&pts.iter().map(|p| (p.0 + dx, p.1 + dy)).collect::<Vec<_>>()).unwrap();
        let scaled = fit_ellipse(&pts.iter().map(|p| (p.0 * s, p.1 * s)).collect::<Vec<_>>()).unwrap();
        prop_assert!(close(moved.cx, base.cx + dx, 1e-8) && close(moved.cy, base.cy + dy, 1e-8));
        prop_assert!(close(moved.a, base.a, 1e-8) && close(moved.b, base.b, 1e-8));
        prop_assert!(close(scaled.cx, base.cx * s, 1e-8) && close(scaled.cy, base.cy * s, 1e-8));
        prop_assert!(close(scaled.a, base.a * s, 1e-8) && close(scaled.b, base.b * s, 1e-8));
        prop_assert!((scaled.theta - base.theta).abs() < 1e-6);
    }

    #[test]
    fn fit_ignores_point_order(e in ellipse_strategy(), shift in 0usize..50) {
        let mut pts = samples(&e, 50);
        let base = fit_ellipse(&pts).unwrap();
        pts.rotate_left(shift);
        pts.reverse();
        let other = fit_ellipse(&pts).unwrap();
        prop_assert!(close(base.a, other.a, 1e-9) && close(base.b, other.b, 1e-9));
        prop_assert!(close(base.cx, other.cx, 1e-9) && close(base.cy, other.cy, 1e-9));
    }

    #[test]
    fn iou_is_symmetric_and_bounded((p, g) in mask_pair(16)) {
        for class in AnatomyClass::ALL {
            let forward = iou(&p, &g, class).unwrap();
            prop_assert_eq!(forward, iou(&g, &p, class).unwrap());
            prop_assert!((0.0..=1.0).contains(&forward));
        }
        let m = aggregate_miou(&[(&p, &g)]).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.miou));
        prop_assert_eq!(m.miou, aggregate_miou(&[(&g, &p)]).unwrap().miou);
        prop_assert_eq!(aggregate_miou(&[(&p, &p)]).unwrap().miou, 1.0);
    }

    #[test]
    fn folds_stay_balanced(
        counts in prop::collection::vec(1usize..=30, 4..60),
        k in 2usize..6,
        seed in any::<u64>(),
    ) {
        prop_assume!(counts.len() >= k);
        let manifest: Vec<(String, usize)> =
            counts.iter().enumerate().map(|(i, &c)| (format!("s{i}"), c)).collect();
        let folds = assign_folds(&manifest, k, seed).unwrap();
        prop_assert_eq!(folds.mapping.len(), manifest.len());
        let mut totals = vec![0usize; k];
        for (s, c) in &manifest {
            totals[folds.mapping[s]] += c;
        }
        prop_assert_eq!(&totals, &folds.fold_images);
        let spread = totals.iter().max().unwrap() - totals.iter().min().unwrap();
        prop_assert!(spread <= *counts.iter().max().unwrap());
        prop_assert!(totals.iter().all(|&t| t > 0));
        prop_assert_eq!(folds, assign_folds(&manifest, k, seed).unwrap());
    }

    #[test]
    fn abdomen_axes_do_not_depend_on_parameterisation(
        a in 5.0..300.0f64,
        r in 0.3..1.0f64,
        theta in 0.0..PI,
    ) {
        let b = a * r;
        let from_horizontal = theta.min(PI - theta);
        prop_assume!((from_horizontal - PI / 4.0).abs() > 1e-9);
        let e = EllipseParams::new(0.0, 0.0, a, b, theta);
        let swapped = EllipseParams::new(0.0, 0.0, b, a, theta + PI / 2.0);
        let flipped = EllipseParams::new(0.0, 0.0, a, b, theta + PI);
        let (tad, apad) = assign_abdomen_axes(&e);
        prop_assert_eq!((tad, apad), assign_abdomen_axes(&swapped));
        prop_assert_eq!((tad, apad), assign_abdomen_axes(&flipped));
        // The transverse diameter is the axis lying closer to horizontal.
        let major_horizontal = from_horizontal < PI / 4.0;
        prop_assert_eq!(tad, if major_horizontal { 2.0 * a } else { 2.0 * b });
        prop_assert_eq!(tad + apad, 2.0 * (a + b));
    }

    #[test]
    fn circumference_is_symmetric_and_linear(d1 in 0.0..1e4f64, d2 in 0.0..1e4f64, s in 0.01..100.0f64) {
        let c = circumference_from_diameters(d1, d2);
        prop_assert_eq!(c, circumference_from_diameters(d2, d1));
        prop_assert!(close(circumference_from_diameters(s * d1, s * d2), s * c, 1e-12));
    }

    #[test]
    fn class_weights_ignore_count_scale(
        counts in prop::array::uniform4(1.0..1e7f64),
        s in 1e-3..1e3f64,
    ) {
        let w = class_weights(&ClassPixelCounts::from_array(counts)).unwrap();
        let ws = class_weights(&ClassPixelCounts::from_array(counts.map(|c| c * s))).unwrap();
        for class in AnatomyClass::ALL {
            prop_assert!(close(w.0[&class], ws.0[&class], 1e-12));
            prop_assert!(w.0[&class] >= 1.0);
        }
        prop_assert!(w.0.values().any(|&v| v == 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_scale_halves_millimetres(seed in any::<u64>(), kind in 0usize..3, px_per_mm in 1.0..20.0f64) {
        let kind = [PlaneClass::Head, PlaneClass::Abdomen, PlaneClass::Femur][kind];
        let spec = PhantomSampler { semi_major: 20.0..60.0, femur_length: 20.0..60.0, ..PhantomSampler::default() }
            .sample(kind, seed);
        let (mask, _) = render_mask(&spec).unwrap();
        let config = MeasureConfig::default();
        let once = measure(&mask, &ScaleEstimate::fixed(px_per_mm).unwrap(), &config).unwrap();
        let twice = measure(&mask, &ScaleEstimate::fixed(2.0 * px_per_mm).unwrap(), &config).unwrap();
        prop_assert_eq!(once.measurements.len(), twice.measurements.len());
        for (name, m) in &once.measurements {
            let d = twice.measurements[name];
            prop_assert_eq!(m.value_px, d.value_px);
            prop_assert!(close(m.value_mm, 2.0 * d.value_mm, 1e-12));
            prop_assert!(close(m.value_mm * px_per_mm, m.value_px, 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phantoms_are_deterministic(seed in any::<u64>(), kind in 0usize..3, noise in proptest::option::of(0u32..3)) {
        let kind = [PlaneClass::Head, PlaneClass::Abdomen, PlaneClass::Femur][kind];
        let sampler = PhantomSampler { semi_major: 20.0..80.0, noise_radius: noise, ..PhantomSampler::default() };
        let spec = sampler.sample(kind, seed);
        prop_assert_eq!(&spec, &sampler.sample(kind, seed));
        let (m1, t1) = render_mask(&spec).unwrap();
        let (m2, t2) = render_mask(&spec).unwrap();
        prop_assert_eq!(m1, m2);
        prop_assert_eq!(t1, t2);
        prop_assert_eq!(render_ruler(&spec).unwrap(), render_ruler(&spec).unwrap());
    }

    #[test]
    fn larger_shapes_cover_more_pixels(seed in any::<u64>(), grow in 1.0..10.0f64, femur in any::<bool>()) {
        let kind = if femur { PlaneClass::Femur } else { PlaneClass::Head };
        let sampler = PhantomSampler { semi_major: 20.0..60.0, femur_length: 20.0..60.0, ..PhantomSampler::default() };
        let mut spec = sampler.sample(kind, seed);
        spec.width += 40;
        spec.height += 40;
        spec.shape = match spec.shape {
            PhantomShape::Ellipse(e) => PhantomShape::Ellipse(EllipseParams { cx: e.cx + 20.0, cy: e.cy + 20.0, ..e }),
            PhantomShape::Capsule { p0, p1, radius } => PhantomShape::Capsule {
                p0: (p0.0 + 20.0, p0.1 + 20.0),
                p1: (p1.0 + 20.0, p1.1 + 20.0),
                radius,
            },
        };
        let small = render_mask(&spec).unwrap().1.area;
        spec.shape = match spec.shape {
            PhantomShape::Ellipse(e) => PhantomShape::Ellipse(EllipseParams { a: e.a + grow, ..e }),
            PhantomShape::Capsule { p0, p1, radius } => PhantomShape::Capsule { p0, p1, radius: radius + grow },
        };
        let large = render_mask(&spec).unwrap().1.area;
        prop_assert!(large > small, "{} -> {}", small, large);
    }
}
