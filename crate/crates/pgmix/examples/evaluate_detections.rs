//! Evaluate a small in-memory detection set: overall and per-category AP
//! plus a PR curve.
//!
//! Usage: cargo run --example evaluate_detections

use pgmix::io::{Detection, InstanceAnnotation, PerImage};
use pgmix::metrics::{coco_map, pr_curve};
use pgmix::BinaryMask;

fn rect(width: usize, height: usize, x0: usize, y0: usize, w: usize, h: usize) -> BinaryMask {
    let mut bits = vec![false; width * height];
    for y in y0..(y0 + h).min(height) {
        for x in x0..(x0 + w).min(width) {
            bits[y * width + x] = true;
        }
    }
    BinaryMask::new(width, height, bits).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (w, h) = (64, 64);
    let gts = vec![PerImage {
        image_id: 0,
        items: vec![
            InstanceAnnotation::new(0, rect(w, h, 4, 4, 20, 16)),
            InstanceAnnotation::new(0, rect(w, h, 40, 30, 12, 18)),
            InstanceAnnotation::new(1, rect(w, h, 10, 40, 16, 10)),
        ],
    }];
    let dets = vec![PerImage {
        image_id: 0,
        items: vec![
            // Good hit, slightly shifted.
            Detection::new(0, 0.95, rect(w, h, 5, 4, 20, 16))?,
            // Sloppy hit on the second instance.
            Detection::new(0, 0.80, rect(w, h, 42, 34, 12, 18))?,
            // Confident false positive.
            Detection::new(0, 0.90, rect(w, h, 30, 10, 8, 8))?,
            // Miss on category 1 (no detection emitted).
        ],
    }];

    let result = coco_map(&dets, &gts)?;
    println!("{}", serde_json::to_string_pretty(&result)?);

    let cat0_dets: Vec<PerImage<Detection>> = dets
        .iter()
        .map(|p| PerImage {
            image_id: p.image_id,
            items: p
                .items
                .iter()
                .filter(|d| d.category_id() == 0)
                .cloned()
                .collect(),
        })
        .collect();
    let cat0_gts: Vec<PerImage<InstanceAnnotation>> = gts
        .iter()
        .map(|p| PerImage {
            image_id: p.image_id,
            items: p
                .items
                .iter()
                .filter(|g| g.category_id() == 0)
                .cloned()
                .collect(),
        })
        .collect();
    let curve = pr_curve(&cat0_dets, &cat0_gts, 0.5)?;
    println!("category 0 PR curve at IoU 0.5 (every 10th sample):");
    for (recall, precision) in curve.points.iter().step_by(10) {
        println!("  recall {recall:.2} -> precision {precision:.3}");
    }
    Ok(())
}
