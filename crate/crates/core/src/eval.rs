//! Evaluation harness for skin rules and the end-to-end classifier.
//!
//! Metric semantics for pixel datasets: correct detection is the recall
//! on skin-labeled pixels (`100 * TP / (TP + FN)`), false positive is the
//! rate on non-skin-labeled pixels (`100 * FP / (FP + TN)`). Every report
//! carries the raw counts.

use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classifier::{screen_image, Decision, ImageBuffer, Thresholds, Verdict};
use crate::color::Rgb8;
use crate::faces::{faces_from_sidecar, FaceSet};
use crate::rules::{RuleError, RuleRegistry, SkinRuleId};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed dataset row at line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("dataset needs at least one {missing} entry")]
    MissingLabelClass { missing: &'static str },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no dataset entry could be evaluated ({failures} failures)")]
    AllEntriesFailed { failures: usize },
    #[error("duplicate rule id in comparison: {0}")]
    DuplicateRuleId(String),
    #[error("mask dimensions {mask_w}x{mask_h} do not match image {img_w}x{img_h}")]
    MaskDimensionMismatch {
        img_w: u32,
        img_h: u32,
        mask_w: u32,
        mask_h: u32,
    },
    #[error("failed to decode image {path}: {message}")]
    Decode { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelLabel {
    Skin,
    NonSkin,
}

/// Labeled pixels for rule evaluation.
#[derive(Debug, Clone)]
pub struct PixelDataset {
    pub entries: Vec<(Rgb8, PixelLabel)>,
    pub source: String,
}

fn parse_channel(field: &str, line: u64, name: &str) -> Result<u8, EvalError> {
    field
        .trim()
        .parse::<u8>()
        .map_err(|_| EvalError::MalformedRow {
            line,
            message: format!("{name} must be an integer in 0..=255, got {field:?}"),
        })
}

impl PixelDataset {
    /// Parses CSV with header `r,g,b,label`, label in {skin, nonskin}.
    pub fn from_csv_reader(reader: impl Read, source: &str) -> Result<Self, EvalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = rdr.headers().map_err(|e| EvalError::MalformedRow {
                line: 1,
                message: e.to_string(),
            })?;
            let expected = ["r", "g", "b", "label"];
            let got: Vec<&str> = headers.iter().collect();
            if got != expected {
                return Err(EvalError::MalformedRow {
                    line: 1,
                    message: format!("expected header r,g,b,label, got {}", got.join(",")),
                });
            }
        }
        let mut entries = Vec::new();
        for result in rdr.records() {
            let record = result.map_err(|e| EvalError::MalformedRow {
                line: e
                    .position()
                    .map(|p| p.line())
                    .unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 4 {
                return Err(EvalError::MalformedRow {
                    line,
                    message: format!("expected 4 fields, got {}", record.len()),
                });
            }
            let r = parse_channel(&record[0], line, "r")?;
            let g = parse_channel(&record[1], line, "g")?;
            let b = parse_channel(&record[2], line, "b")?;
            let label = match &record[3] {
                "skin" => PixelLabel::Skin,
                "nonskin" => PixelLabel::NonSkin,
                other => {
                    return Err(EvalError::MalformedRow {
                        line,
                        message: format!("label must be skin or nonskin, got {other:?}"),
                    })
                }
            };
            entries.push((Rgb8::new(r, g, b), label));
        }
        Ok(PixelDataset {
            entries,
            source: source.to_string(),
        })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| EvalError::Io {
            path: display.clone(),
            source,
        })?;
        Self::from_csv_reader(file, &display)
    }

    /// Builds a dataset from an image and a same-size mask image; any
    /// nonzero mask value labels the pixel skin.
    pub fn from_mask_pair(
        image_path: impl AsRef<Path>,
        mask_path: impl AsRef<Path>,
    ) -> Result<Self, EvalError> {
        let image_path = image_path.as_ref();
        let mask_path = mask_path.as_ref();
        let img = image::open(image_path)
            .map_err(|e| EvalError::Decode {
                path: image_path.display().to_string(),
                message: e.to_string(),
            })?
            .to_rgb8();
        let mask = image::open(mask_path)
            .map_err(|e| EvalError::Decode {
                path: mask_path.display().to_string(),
                message: e.to_string(),
            })?
            .to_luma8();
        if img.dimensions() != mask.dimensions() {
            return Err(EvalError::MaskDimensionMismatch {
                img_w: img.width(),
                img_h: img.height(),
                mask_w: mask.width(),
                mask_h: mask.height(),
            });
        }
        let entries = img
            .pixels()
            .zip(mask.pixels())
            .map(|(p, m)| {
                let label = if m.0[0] != 0 {
                    PixelLabel::Skin
                } else {
                    PixelLabel::NonSkin
                };
                (Rgb8::new(p.0[0], p.0[1], p.0[2]), label)
            })
            .collect();
        Ok(PixelDataset {
            entries,
            source: format!(
                "{} + mask {}",
                image_path.display(),
                mask_path.display()
            ),
        })
    }
}

/// Rates and raw confusion counts for one rule on one pixel dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rule: String,
    /// 100 * TP / (TP + FN), recall over skin-labeled pixels.
    pub correct_detection: f64,
    /// 100 * FP / (FP + TN), rate over non-skin-labeled pixels.
    pub false_positive: f64,
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_count: u64,
    pub fp: u64,
    pub tn: u64,
}

/// Exact counting over every entry; shard results merge by summing, so
/// the parallel tally is bit-identical to a sequential one.
pub fn eval_pixels(
    ds: &PixelDataset,
    rule: &SkinRuleId,
    registry: &RuleRegistry,
) -> Result<EvalReport, EvalError> {
    let predicate = registry.get(rule)?;
    let has_skin = ds.entries.iter().any(|(_, l)| *l == PixelLabel::Skin);
    let has_nonskin = ds.entries.iter().any(|(_, l)| *l == PixelLabel::NonSkin);
    if !has_skin {
        return Err(EvalError::MissingLabelClass { missing: "skin" });
    }
    if !has_nonskin {
        return Err(EvalError::MissingLabelClass { missing: "nonskin" });
    }
    let (tp, fn_count, fp, tn) = ds
        .entries
        .par_iter()
        .fold(
            || (0u64, 0u64, 0u64, 0u64),
            |(tp, fn_c, fp, tn), (p, label)| {
                let predicted = predicate.is_skin(*p);
                match (label, predicted) {
                    (PixelLabel::Skin, true) => (tp + 1, fn_c, fp, tn),
                    (PixelLabel::Skin, false) => (tp, fn_c + 1, fp, tn),
                    (PixelLabel::NonSkin, true) => (tp, fn_c, fp + 1, tn),
                    (PixelLabel::NonSkin, false) => (tp, fn_c, fp, tn + 1),
                }
            },
        )
        .reduce(
            || (0, 0, 0, 0),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
        );
    Ok(EvalReport {
        rule: rule.as_str().to_string(),
        correct_detection: 100.0 * tp as f64 / (tp + fn_count) as f64,
        false_positive: 100.0 * fp as f64 / (fp + tn) as f64,
        tp,
        fn_count,
        fp,
        tn,
    })
}

/// One row per rule, in the given order. Duplicate ids are rejected.
pub fn compare_rules(
    ds: &PixelDataset,
    rules: &[SkinRuleId],
    registry: &RuleRegistry,
) -> Result<Vec<EvalReport>, EvalError> {
    if rules.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    for (i, rule) in rules.iter().enumerate() {
        if rules[..i].contains(rule) {
            return Err(EvalError::DuplicateRuleId(rule.as_str().to_string()));
        }
    }
    rules
        .iter()
        .map(|rule| eval_pixels(ds, rule, registry))
        .collect()
}

/// Aligned text table for a rule comparison, Table I layout.
pub fn render_comparison_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    out.push_str(
        "correct detection = recall on skin-labeled pixels; \
         false positives = FP rate on non-skin-labeled pixels\n",
    );
    let name_width = reports
        .iter()
        .map(|r| r.rule.len())
        .chain(["Color Model".len()])
        .max()
        .unwrap_or(0);
    out.push_str(&format!(
        "{:<name_width$}  {:>17}  {:>15}\n",
        "Color Model", "Correct Detection", "False Positives"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<name_width$}  {:>17.2}  {:>15.2}\n",
            r.rule, r.correct_detection, r.false_positive
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageLabel {
    Nude,
    NonNude,
}

impl ImageLabel {
    fn parse(s: &str) -> Option<ImageLabel> {
        match s {
            "nude" => Some(ImageLabel::Nude),
            "non-nude" | "non_nude" | "nonnude" => Some(ImageLabel::NonNude),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImageEntry {
    pub image: PathBuf,
    pub faces: Option<PathBuf>,
    pub label: ImageLabel,
}

/// Labeled images with optional face sidecars.
#[derive(Debug, Clone)]
pub struct ImageDataset {
    pub entries: Vec<ImageEntry>,
    pub source: String,
}

impl ImageDataset {
    /// Parses CSV with header `path,faces_path,label`; an empty
    /// `faces_path` selects the no-face branch. Relative paths resolve
    /// against the CSV's directory.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| EvalError::Io {
            path: display.clone(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        {
            let headers = rdr.headers().map_err(|e| EvalError::MalformedRow {
                line: 1,
                message: e.to_string(),
            })?;
            let got: Vec<&str> = headers.iter().collect();
            if got != ["path", "faces_path", "label"] {
                return Err(EvalError::MalformedRow {
                    line: 1,
                    message: format!(
                        "expected header path,faces_path,label, got {}",
                        got.join(",")
                    ),
                });
            }
        }
        let mut entries = Vec::new();
        for result in rdr.records() {
            let record = result.map_err(|e| EvalError::MalformedRow {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 3 {
                return Err(EvalError::MalformedRow {
                    line,
                    message: format!("expected 3 fields, got {}", record.len()),
                });
            }
            let resolve = |p: &str| {
                let pb = PathBuf::from(p);
                if pb.is_absolute() {
                    pb
                } else {
                    base.join(pb)
                }
            };
            let image = resolve(&record[0]);
            let faces = if record[1].is_empty() {
                None
            } else {
                Some(resolve(&record[1]))
            };
            let label = ImageLabel::parse(&record[2]).ok_or_else(|| EvalError::MalformedRow {
                line,
                message: format!("label must be nude or non-nude, got {:?}", &record[2]),
            })?;
            entries.push(ImageEntry {
                image,
                faces,
                label,
            });
        }
        if entries.is_empty() {
            return Err(EvalError::EmptyDataset);
        }
        Ok(ImageDataset {
            entries,
            source: display,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageResult {
    pub path: String,
    pub label: String,
    pub verdict: String,
    pub correct: bool,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageEvalReport {
    pub rule: String,
    pub evaluated: usize,
    pub accuracy: f64,
    pub nude_accuracy: f64,
    pub non_nude_accuracy: f64,
    pub true_nude: u64,
    pub false_nude: u64,
    pub true_non_nude: u64,
    pub false_non_nude: u64,
    pub results: Vec<ImageResult>,
    pub failures: Vec<String>,
}

/// Runs the classifier over every dataset entry. Decode and sidecar
/// failures are collected per entry and the run continues; output order
/// follows the dataset.
pub fn eval_images(
    ds: &ImageDataset,
    rule: &SkinRuleId,
    thresholds: Thresholds,
    registry: &RuleRegistry,
) -> Result<ImageEvalReport, EvalError> {
    registry.get(rule)?;
    if ds.entries.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let (mut tn_, mut fn_, mut tnn, mut fnn) = (0u64, 0u64, 0u64, 0u64);
    for entry in &ds.entries {
        let decision: Result<Decision, String> = (|| {
            let dynamic = image::open(&entry.image)
                .map_err(|e| format!("{}: {}", entry.image.display(), e))?;
            let img = ImageBuffer::from_rgb_image(&dynamic.to_rgb8())
                .map_err(|e| format!("{}: {}", entry.image.display(), e))?;
            let faces = match &entry.faces {
                Some(path) => faces_from_sidecar(path, img.dims())
                    .map_err(|e| format!("{}: {}", path.display(), e))?,
                None => FaceSet::empty("none"),
            };
            screen_image(registry, &img, &faces, rule, thresholds)
                .map_err(|e| e.to_string())
        })();
        match decision {
            Ok(d) => {
                let predicted_nude = d.verdict == Verdict::Nude;
                let labeled_nude = entry.label == ImageLabel::Nude;
                match (labeled_nude, predicted_nude) {
                    (true, true) => tn_ += 1,
                    (true, false) => fnn += 1,
                    (false, false) => tnn += 1,
                    (false, true) => fn_ += 1,
                }
                results.push(ImageResult {
                    path: entry.image.display().to_string(),
                    label: match entry.label {
                        ImageLabel::Nude => "nude".to_string(),
                        ImageLabel::NonNude => "non_nude".to_string(),
                    },
                    verdict: d.verdict.as_str().to_string(),
                    correct: labeled_nude == predicted_nude,
                    ratio: d.ratio,
                });
            }
            Err(message) => failures.push(message),
        }
    }
    let evaluated = results.len();
    if evaluated == 0 {
        return Err(EvalError::AllEntriesFailed {
            failures: failures.len(),
        });
    }
    let pct = |num: u64, den: u64| {
        if den == 0 {
            100.0
        } else {
            100.0 * num as f64 / den as f64
        }
    };
    Ok(ImageEvalReport {
        rule: rule.as_str().to_string(),
        evaluated,
        accuracy: pct(tn_ + tnn, evaluated as u64),
        nude_accuracy: pct(tn_, tn_ + fnn),
        non_nude_accuracy: pct(tnn, tnn + fn_),
        true_nude: tn_,
        false_nude: fn_,
        true_non_nude: tnn,
        false_non_nude: fnn,
        results,
        failures,
    })
}
