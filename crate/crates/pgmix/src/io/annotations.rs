//! Instance annotation JSON: ground-truth masks and scored predictions.
//!
//! Schema (one file per split):
//!
//! ```json
//! {
//!   "images": [{"id": 0, "width": 16, "height": 16}],
//!   "annotations": [
//!     {"image_id": 0, "category_id": 1, "rle": [3, 2, 1]},
//!     {"image_id": 0, "category_id": 1, "mask_file": "mask0.pgm", "score": 0.9}
//!   ]
//! }
//! ```
//!
//! Every annotation carries exactly one mask encoding: an uncompressed
//! column-major `rle` (see [`decode_rle`](super::decode_rle)) or a
//! `mask_file` path (Netpbm/PFM, resolved relative to the JSON file, binary
//! samples only). `score` is required on prediction records and rejected on
//! ground truth.

use std::path::Path;

use serde::Deserialize;

use super::rle::decode_rle;
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, BoundingBox};

/// Ground-truth instance: a category and a mask with derived area and bbox.
#[derive(Debug, Clone)]
pub struct InstanceAnnotation {
    category_id: u32,
    mask: BinaryMask,
    area: usize,
    bbox: BoundingBox,
}

impl InstanceAnnotation {
    pub fn new(category_id: u32, mask: BinaryMask) -> Self {
        let area = mask.area();
        let bbox = mask.tight_bbox();
        Self {
            category_id,
            mask,
            area,
            bbox,
        }
    }

    pub fn category_id(&self) -> u32 {
        self.category_id
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn area(&self) -> usize {
        self.area
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }
}

/// Predicted instance: a category, a confidence in [0, 1], and a mask.
#[derive(Debug, Clone)]
pub struct Detection {
    category_id: u32,
    score: f64,
    mask: BinaryMask,
    area: usize,
}

impl Detection {
    pub fn new(category_id: u32, score: f64, mask: BinaryMask) -> Result<Self> {
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(Error::schema(format!(
                "detection score {score} outside [0, 1]"
            )));
        }
        let area = mask.area();
        Ok(Self {
            category_id,
            score,
            mask,
            area,
        })
    }

    pub fn category_id(&self) -> u32 {
        self.category_id
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn area(&self) -> usize {
        self.area
    }
}

/// Annotations for one image, in file order.
#[derive(Debug, Clone)]
pub struct PerImage<T> {
    pub image_id: u64,
    pub items: Vec<T>,
}

/// Which side of the evaluation a file belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationKind {
    GroundTruth,
    Predictions,
}

/// Parsed annotation file of either kind.
#[derive(Debug, Clone)]
pub enum AnnotationSet {
    GroundTruth(Vec<PerImage<InstanceAnnotation>>),
    Predictions(Vec<PerImage<Detection>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    images: Vec<ImageDoc>,
    annotations: Vec<RecordDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImageDoc {
    id: u64,
    width: usize,
    height: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    image_id: u64,
    category_id: u32,
    #[serde(default)]
    rle: Option<Vec<usize>>,
    #[serde(default)]
    mask_file: Option<String>,
    #[serde(default)]
    score: Option<f64>,
}

/// Load an annotation file, materializing every mask. The result holds one
/// entry per `images` record, in file order, including images with no
/// annotations.
pub fn load_annotations(path: impl AsRef<Path>, kind: AnnotationKind) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let doc: FileDoc = serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
        offset: 0,
        msg: format!("invalid annotation JSON: {e}"),
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut image_index: Vec<(u64, usize, usize)> = Vec::with_capacity(doc.images.len());
    for img in &doc.images {
        if img.width == 0 || img.height == 0 {
            return Err(Error::schema(format!(
                "image {} has zero dimension {}x{}",
                img.id, img.width, img.height
            )));
        }
        if image_index.iter().any(|(id, _, _)| *id == img.id) {
            return Err(Error::schema(format!("duplicate image id {}", img.id)));
        }
        image_index.push((img.id, img.width, img.height));
    }

    let mut masks: Vec<(u64, u32, Option<f64>, BinaryMask)> =
        Vec::with_capacity(doc.annotations.len());
    for rec in &doc.annotations {
        let &(_, width, height) = image_index
            .iter()
            .find(|(id, _, _)| *id == rec.image_id)
            .ok_or_else(|| {
                Error::schema(format!(
                    "annotation references unknown image {}",
                    rec.image_id
                ))
            })?;
        let mask = match (&rec.rle, &rec.mask_file) {
            (Some(counts), None) => decode_rle(counts, height, width)?,
            (None, Some(file)) => {
                let grid = super::read_grid_auto(base_dir.join(file))?;
                if grid.width() != width || grid.height() != height {
                    return Err(Error::schema(format!(
                        "mask file {file} is {}x{}, image {} is {width}x{height}",
                        grid.width(),
                        grid.height(),
                        rec.image_id
                    )));
                }
                grid.to_mask().map_err(|_| {
                    Error::schema(format!("mask file {file} contains non-binary samples"))
                })?
            }
            (None, None) => {
                return Err(Error::parse(
                    0,
                    format!(
                        "annotation for image {} has no mask encoding (rle or mask_file)",
                        rec.image_id
                    ),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::parse(
                    0,
                    format!(
                        "annotation for image {} has both rle and mask_file",
                        rec.image_id
                    ),
                ))
            }
        };
        match kind {
            AnnotationKind::Predictions if rec.score.is_none() => {
                return Err(Error::schema(format!(
                    "prediction record for image {} is missing a score",
                    rec.image_id
                )));
            }
            AnnotationKind::GroundTruth if rec.score.is_some() => {
                return Err(Error::schema(format!(
                    "ground-truth record for image {} carries a score",
                    rec.image_id
                )));
            }
            _ => {}
        }
        masks.push((rec.image_id, rec.category_id, rec.score, mask));
    }

    match kind {
        AnnotationKind::GroundTruth => {
            let mut out: Vec<PerImage<InstanceAnnotation>> = image_index
                .iter()
                .map(|&(id, _, _)| PerImage {
                    image_id: id,
                    items: Vec::new(),
                })
                .collect();
            for (image_id, category_id, _, mask) in masks {
                let slot = out.iter_mut().find(|p| p.image_id == image_id).unwrap();
                slot.items.push(InstanceAnnotation::new(category_id, mask));
            }
            Ok(AnnotationSet::GroundTruth(out))
        }
        AnnotationKind::Predictions => {
            let mut out: Vec<PerImage<Detection>> = image_index
                .iter()
                .map(|&(id, _, _)| PerImage {
                    image_id: id,
                    items: Vec::new(),
                })
                .collect();
            for (image_id, category_id, score, mask) in masks {
                let slot = out.iter_mut().find(|p| p.image_id == image_id).unwrap();
                slot.items
                    .push(Detection::new(category_id, score.unwrap(), mask)?);
            }
            Ok(AnnotationSet::Predictions(out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn ground_truth_with_rle() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":0,"category_id":0,"rle":[3,2,1]}]}"#,
        );
        let set = load_annotations(f.path(), AnnotationKind::GroundTruth).unwrap();
        let AnnotationSet::GroundTruth(gts) = set else {
            panic!("wrong kind")
        };
        assert_eq!(gts.len(), 1);
        assert_eq!(gts[0].items.len(), 1);
        assert_eq!(gts[0].items[0].area(), 2);
        assert_eq!(gts[0].items[0].category_id(), 0);
    }

    #[test]
    fn empty_file_gives_empty_result() {
        let f = write_temp(r#"{"images":[],"annotations":[]}"#);
        let set = load_annotations(f.path(), AnnotationKind::GroundTruth).unwrap();
        let AnnotationSet::GroundTruth(gts) = set else {
            panic!("wrong kind")
        };
        assert!(gts.is_empty());
    }

    #[test]
    fn prediction_with_score() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":0,"category_id":0,"rle":[3,2,1],"score":0.9}]}"#,
        );
        let set = load_annotations(f.path(), AnnotationKind::Predictions).unwrap();
        let AnnotationSet::Predictions(dets) = set else {
            panic!("wrong kind")
        };
        assert_eq!(dets[0].items[0].score(), 0.9);
        assert_eq!(dets[0].items[0].area(), 2);
    }

    #[test]
    fn detection_rejects_out_of_range_score() {
        let mask = crate::grid::BinaryMask::filled(2, 2, true).unwrap();
        assert!(Detection::new(0, 1.5, mask.clone()).is_err());
        assert!(Detection::new(0, -0.1, mask.clone()).is_err());
        assert!(Detection::new(0, f64::NAN, mask).is_err());
    }

    #[test]
    fn missing_score_on_prediction_rejected() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":0,"category_id":0,"rle":[3,2,1]}]}"#,
        );
        assert!(matches!(
            load_annotations(f.path(), AnnotationKind::Predictions),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn score_on_ground_truth_rejected() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":0,"category_id":0,"rle":[3,2,1],"score":0.5}]}"#,
        );
        assert!(matches!(
            load_annotations(f.path(), AnnotationKind::GroundTruth),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn missing_mask_encoding_rejected() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":0,"category_id":0}]}"#,
        );
        assert!(matches!(
            load_annotations(f.path(), AnnotationKind::GroundTruth),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn unknown_image_reference_rejected() {
        let f = write_temp(
            r#"{"images":[{"id":0,"width":3,"height":2}],
                "annotations":[{"image_id":7,"category_id":0,"rle":[6]}]}"#,
        );
        assert!(matches!(
            load_annotations(f.path(), AnnotationKind::GroundTruth),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn mask_file_reference_is_resolved_and_checked() {
        let dir = tempfile::tempdir().unwrap();
        // 2x2 binary mask as P5 maxval 255: one foreground pixel.
        let mask_path = dir.path().join("m.pgm");
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 0, 0]);
        std::fs::write(&mask_path, bytes).unwrap();
        let json_path = dir.path().join("gt.json");
        std::fs::write(
            &json_path,
            r#"{"images":[{"id":0,"width":2,"height":2}],
                "annotations":[{"image_id":0,"category_id":3,"mask_file":"m.pgm"}]}"#,
        )
        .unwrap();
        let set = load_annotations(&json_path, AnnotationKind::GroundTruth).unwrap();
        let AnnotationSet::GroundTruth(gts) = set else {
            panic!("wrong kind")
        };
        assert_eq!(gts[0].items[0].area(), 1);
        assert!(gts[0].items[0].mask().get(1, 0));
    }
}
