//! The screening pipeline: scan pixels, build the skin mask, count skin
//! inside face regions, and apply the two-branch threshold decision.
//!
//! Branch logic, with both thresholds configurable:
//!
//! * face present: nude iff `face_skin / skin < face_ratio` (default 0.15);
//!   `skin == 0` forces non-nude since the ratio is undefined and zero
//!   skin pixels cannot evidence nudity.
//! * no face: nude iff `skin / total > skin_ratio` (default 0.38).
//!
//! Both comparisons are strict. The displayed ratio is truncated (not
//! rounded) to two decimals; classification always uses full precision.

use rayon::prelude::*;
use thiserror::Error;

use crate::color::Rgb8;
use crate::faces::FaceSet;
use crate::rules::{RuleError, RuleRegistry, SkinRule, SkinRuleId};

/// Row-major RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<Rgb8>,
}

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1 (got {width}x{height})")]
    EmptyImage { width: u32, height: u32 },
    #[error("pixel count {actual} does not match {width}x{height}")]
    PixelCountMismatch {
        width: u32,
        height: u32,
        actual: usize,
    },
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if pixels.len() != width as usize * height as usize {
            return Err(ImageError::PixelCountMismatch {
                width,
                height,
                actual: pixels.len(),
            });
        }
        Ok(ImageBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, pixel: Rgb8) -> Result<Self, ImageError> {
        let count = width as usize * height as usize;
        Self::new(width, height, vec![pixel; count])
    }

    pub fn from_rgb_image(img: &image::RgbImage) -> Result<Self, ImageError> {
        let pixels = img
            .pixels()
            .map(|p| Rgb8::new(p.0[0], p.0[1], p.0[2]))
            .collect();
        Self::new(img.width(), img.height(), pixels)
    }

    pub fn to_rgb_image(&self) -> image::RgbImage {
        image::RgbImage::from_fn(self.width, self.height, |x, y| {
            let p = self.get(x, y);
            image::Rgb([p.r, p.g, p.b])
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> u64 {
        self.pixels.len() as u64
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, p: Rgb8) {
        self.pixels[y as usize * self.width as usize + x as usize] = p;
    }

    pub fn row(&self, y: u32) -> &[Rgb8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.pixels[start..start + w]
    }
}

/// Per-pixel boolean skin map. Rows are padded to 64-bit word boundaries
/// so row-parallel writes stay disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkinMask {
    width: u32,
    height: u32,
    words_per_row: usize,
    words: Vec<u64>,
}

impl SkinMask {
    fn zeroed(width: u32, height: u32) -> Self {
        let words_per_row = (width as usize).div_ceil(64);
        SkinMask {
            width,
            height,
            words_per_row,
            words: vec![0; words_per_row * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        let w = y as usize * self.words_per_row + (x as usize >> 6);
        self.words[w] & (1 << (x & 63)) != 0
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn count_row_range(&self, y: u32, x0: u32, x1: u32) -> u64 {
        let base = y as usize * self.words_per_row;
        let mut count = 0u64;
        let mut x = x0;
        while x < x1 {
            let word_idx = x as usize >> 6;
            let bit = x & 63;
            let span = (64 - bit).min(x1 - x);
            let mask = if span == 64 {
                u64::MAX
            } else {
                ((1u64 << span) - 1) << bit
            };
            count += (self.words[base + word_idx] & mask).count_ones() as u64;
            x += span;
        }
        count
    }
}

fn fill_row(row_pixels: &[Rgb8], rule: &dyn SkinRule, row_words: &mut [u64]) {
    for (x, &p) in row_pixels.iter().enumerate() {
        if rule.is_skin(p) {
            row_words[x >> 6] |= 1 << (x & 63);
        }
    }
}

/// Builds the skin mask with row-parallel scanning. Bit-identical to the
/// sequential path for any worker count.
pub fn build_skin_mask(img: &ImageBuffer, rule: &dyn SkinRule) -> (SkinMask, u64) {
    let mut mask = SkinMask::zeroed(img.width, img.height);
    let wpr = mask.words_per_row;
    let width = img.width as usize;
    mask.words
        .par_chunks_mut(wpr)
        .enumerate()
        .for_each(|(y, row_words)| {
            let start = y * width;
            fill_row(&img.pixels[start..start + width], rule, row_words);
        });
    let count = mask.count_ones();
    (mask, count)
}

/// Single-threaded mask building; the parallel path must match it bit
/// for bit.
pub fn build_skin_mask_sequential(img: &ImageBuffer, rule: &dyn SkinRule) -> (SkinMask, u64) {
    let mut mask = SkinMask::zeroed(img.width, img.height);
    let wpr = mask.words_per_row;
    let width = img.width as usize;
    for (y, row_words) in mask.words.chunks_mut(wpr).enumerate() {
        let start = y * width;
        fill_row(&img.pixels[start..start + width], rule, row_words);
    }
    let count = mask.count_ones();
    (mask, count)
}

/// Counts set mask bits inside the union of all face boxes. Overlapping
/// boxes never double-count a pixel.
pub fn count_face_skin(mask: &SkinMask, faces: &FaceSet) -> u64 {
    if faces.is_empty() {
        return 0;
    }
    let mut total = 0u64;
    let mut intervals: Vec<(u32, u32)> = Vec::new();
    for y in 0..mask.height {
        intervals.clear();
        for b in &faces.boxes {
            if y >= b.y && y < b.y + b.height {
                intervals.push((b.x, (b.x + b.width).min(mask.width)));
            }
        }
        if intervals.is_empty() {
            continue;
        }
        intervals.sort_unstable();
        let mut cur = intervals[0];
        for &(x0, x1) in &intervals[1..] {
            if x0 <= cur.1 {
                cur.1 = cur.1.max(x1);
            } else {
                total += mask.count_row_range(y, cur.0, cur.1);
                cur = (x0, x1);
            }
        }
        total += mask.count_row_range(y, cur.0, cur.1);
    }
    total
}

/// Pixel totals feeding the ratio decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelCounts {
    pub total: u64,
    pub skin: u64,
    pub face_skin: u64,
}

/// Decision thresholds, both in (0, 1). Defaults are the tuned constants
/// 0.15 (face-skin ratio) and 0.38 (skin coverage).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub face_ratio: f64,
    pub skin_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            face_ratio: 0.15,
            skin_ratio: 0.38,
        }
    }
}

#[derive(Debug, Error)]
#[error("threshold {name} must lie in (0, 1), got {value}")]
pub struct ThresholdError {
    pub name: &'static str,
    pub value: f64,
}

impl Thresholds {
    pub fn new(face_ratio: f64, skin_ratio: f64) -> Result<Self, ThresholdError> {
        if !(face_ratio > 0.0 && face_ratio < 1.0) {
            return Err(ThresholdError {
                name: "face_ratio",
                value: face_ratio,
            });
        }
        if !(skin_ratio > 0.0 && skin_ratio < 1.0) {
            return Err(ThresholdError {
                name: "skin_ratio",
                value: skin_ratio,
            });
        }
        Ok(Thresholds {
            face_ratio,
            skin_ratio,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Nude,
    NonNude,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nude => "nude",
            Verdict::NonNude => "non_nude",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    FacePresent,
    NoFace,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::FacePresent => "face_present",
            Branch::NoFace => "no_face",
        }
    }
}

/// Context the pure count/threshold decision cannot know by itself.
#[derive(Debug, Clone)]
pub struct DecisionMeta {
    pub rule: SkinRuleId,
    pub face_count: usize,
    pub fallback_applied: bool,
}

impl Default for DecisionMeta {
    fn default() -> Self {
        DecisionMeta {
            rule: SkinRuleId::from("proposed"),
            face_count: 0,
            fallback_applied: false,
        }
    }
}

/// The verdict plus everything that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub branch: Branch,
    pub counts: PixelCounts,
    /// Full-precision branch ratio.
    pub ratio: f64,
    /// `floor(ratio * 100) / 100`, the printed form.
    pub ratio_display: f64,
    pub rule: SkinRuleId,
    pub thresholds: Thresholds,
    pub face_count: usize,
    pub fallback_applied: bool,
}

impl Decision {
    /// Stable JSON payload; field set is fixed and carries no timestamps.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict.as_str(),
            "branch": self.branch.as_str(),
            "total_pixels": self.counts.total,
            "skin_pixels": self.counts.skin,
            "face_skin_pixels": self.counts.face_skin,
            "ratio": self.ratio,
            "ratio_display": self.ratio_display,
            "rule": self.rule.as_str(),
            "face_ratio_threshold": self.thresholds.face_ratio,
            "skin_ratio_threshold": self.thresholds.skin_ratio,
            "face_count": self.face_count,
            "fallback_applied": self.fallback_applied,
        })
    }
}

/// Exact two-decimal truncation of `num / den`, computed in integers.
fn truncated_ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        return 0.0;
    }
    ((num as u128 * 100 / den as u128) as f64) / 100.0
}

/// Applies the two-branch threshold rule to the counts.
pub fn decide(
    counts: PixelCounts,
    face_present: bool,
    thresholds: Thresholds,
    meta: DecisionMeta,
) -> Decision {
    let (branch, ratio, ratio_display, verdict) = if face_present {
        if counts.skin == 0 {
            // Ratio undefined; zero skin pixels cannot evidence nudity.
            (Branch::FacePresent, 0.0, 0.0, Verdict::NonNude)
        } else {
            let ratio = counts.face_skin as f64 / counts.skin as f64;
            let verdict = if ratio < thresholds.face_ratio {
                Verdict::Nude
            } else {
                Verdict::NonNude
            };
            (
                Branch::FacePresent,
                ratio,
                truncated_ratio(counts.face_skin, counts.skin),
                verdict,
            )
        }
    } else {
        let ratio = if counts.total == 0 {
            0.0
        } else {
            counts.skin as f64 / counts.total as f64
        };
        let verdict = if ratio > thresholds.skin_ratio {
            Verdict::Nude
        } else {
            Verdict::NonNude
        };
        (
            Branch::NoFace,
            ratio,
            truncated_ratio(counts.skin, counts.total),
            verdict,
        )
    };
    Decision {
        verdict,
        branch,
        counts,
        ratio,
        ratio_display,
        rule: meta.rule,
        thresholds,
        face_count: meta.face_count,
        fallback_applied: meta.fallback_applied,
    }
}

/// Runs the whole pipeline and also returns the mask for rendering.
pub fn screen_image_with_mask(
    registry: &RuleRegistry,
    img: &ImageBuffer,
    faces: &FaceSet,
    rule: &SkinRuleId,
    thresholds: Thresholds,
    fallback_applied: bool,
) -> Result<(Decision, SkinMask), RuleError> {
    let predicate = registry.get(rule)?;
    let (mask, skin) = build_skin_mask(img, predicate.as_ref());
    let face_skin = count_face_skin(&mask, faces);
    let counts = PixelCounts {
        total: img.pixel_count(),
        skin,
        face_skin,
    };
    let decision = decide(
        counts,
        !faces.is_empty(),
        thresholds,
        DecisionMeta {
            rule: rule.clone(),
            face_count: faces.boxes.len(),
            fallback_applied,
        },
    );
    Ok((decision, mask))
}

/// Scan, count, and decide in one call.
pub fn screen_image(
    registry: &RuleRegistry,
    img: &ImageBuffer,
    faces: &FaceSet,
    rule: &SkinRuleId,
    thresholds: Thresholds,
) -> Result<Decision, RuleError> {
    screen_image_with_mask(registry, img, faces, rule, thresholds, false)
        .map(|(decision, _)| decision)
}

/// Pink used for skin pixels in overlays.
pub const OVERLAY_SKIN: Rgb8 = Rgb8::new(255, 105, 180);
/// Green used for face-box outlines.
pub const OVERLAY_FACE_BORDER: Rgb8 = Rgb8::new(0, 255, 0);

/// Copies the image with skin pixels recolored pink and each face box
/// outlined by a 1-pixel green border.
pub fn render_overlay(img: &ImageBuffer, mask: &SkinMask, faces: &FaceSet) -> ImageBuffer {
    let mut out = img.clone();
    for y in 0..img.height {
        for x in 0..img.width {
            if mask.get(x, y) {
                out.set(x, y, OVERLAY_SKIN);
            }
        }
    }
    for b in &faces.boxes {
        let x1 = b.x + b.width - 1;
        let y1 = b.y + b.height - 1;
        for x in b.x..=x1 {
            out.set(x, b.y, OVERLAY_FACE_BORDER);
            out.set(x, y1, OVERLAY_FACE_BORDER);
        }
        for y in b.y..=y1 {
            out.set(b.x, y, OVERLAY_FACE_BORDER);
            out.set(x1, y, OVERLAY_FACE_BORDER);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faces::FaceBox;

    const SKIN: Rgb8 = Rgb8::new(120, 80, 50);
    const BLACK: Rgb8 = Rgb8::new(0, 0, 0);

    fn registry() -> RuleRegistry {
        RuleRegistry::with_builtins()
    }

    fn proposed() -> SkinRuleId {
        SkinRuleId::from("proposed")
    }

    fn face_set(boxes: Vec<FaceBox>) -> FaceSet {
        FaceSet {
            boxes,
            source: "test".to_string(),
        }
    }

    // 10x10 image: top five rows skin, bottom five rows black.
    fn half_skin_image() -> ImageBuffer {
        let mut pixels = vec![SKIN; 50];
        pixels.extend(vec![BLACK; 50]);
        ImageBuffer::new(10, 10, pixels).unwrap()
    }

    #[test]
    fn mask_all_skin() {
        let img = ImageBuffer::filled(2, 2, SKIN).unwrap();
        let reg = registry();
        let rule = reg.get(&proposed()).unwrap();
        let (mask, count) = build_skin_mask(&img, rule.as_ref());
        assert_eq!(count, 4);
        assert_eq!(mask.count_ones(), 4);
        assert!(mask.get(1, 1));
    }

    #[test]
    fn mask_all_black() {
        let img = ImageBuffer::filled(2, 2, BLACK).unwrap();
        let reg = registry();
        let rule = reg.get(&proposed()).unwrap();
        let (_, count) = build_skin_mask(&img, rule.as_ref());
        assert_eq!(count, 0);
    }

    #[test]
    fn mask_mixed_row() {
        let img = ImageBuffer::new(1, 2, vec![SKIN, BLACK]).unwrap();
        let reg = registry();
        let rule = reg.get(&proposed()).unwrap();
        let (mask, count) = build_skin_mask(&img, rule.as_ref());
        assert_eq!(count, 1);
        assert!(mask.get(0, 0));
        assert!(!mask.get(0, 1));
    }

    #[test]
    fn unknown_rule_propagates() {
        let img = ImageBuffer::filled(1, 1, SKIN).unwrap();
        let err = screen_image(
            &registry(),
            &img,
            &FaceSet::empty("none"),
            &SkinRuleId::from("missing"),
            Thresholds::default(),
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::UnknownRule(_)));
    }

    #[test]
    fn face_skin_empty_faces() {
        let img = half_skin_image();
        let reg = registry();
        let (mask, _) = build_skin_mask(&img, reg.get(&proposed()).unwrap().as_ref());
        assert_eq!(count_face_skin(&mask, &FaceSet::empty("none")), 0);
    }

    #[test]
    fn face_skin_full_image_box() {
        let img = half_skin_image();
        let reg = registry();
        let (mask, count) = build_skin_mask(&img, reg.get(&proposed()).unwrap().as_ref());
        let faces = face_set(vec![FaceBox {
            x: 0,
            y: 0,
            width: 10,
            height: 10,
        }]);
        assert_eq!(count_face_skin(&mask, &faces), count);
    }

    #[test]
    fn face_skin_union_not_sum() {
        let img = half_skin_image();
        let reg = registry();
        let (mask, _) = build_skin_mask(&img, reg.get(&proposed()).unwrap().as_ref());
        let b = FaceBox {
            x: 0,
            y: 0,
            width: 10,
            height: 1,
        };
        let faces = face_set(vec![b, b]);
        assert_eq!(count_face_skin(&mask, &faces), 10);
    }

    #[test]
    fn decide_table2_row1() {
        // skin 292900, face skin 23411: ratio ~0.0799, printed 0.07, nude
        let d = decide(
            PixelCounts {
                total: 1_000_000,
                skin: 292_900,
                face_skin: 23_411,
            },
            true,
            Thresholds::default(),
            DecisionMeta::default(),
        );
        assert_eq!(d.verdict, Verdict::Nude);
        assert!((d.ratio - 23_411.0 / 292_900.0).abs() < 1e-12);
        assert_eq!(d.ratio_display, 0.07);
    }

    #[test]
    fn decide_face_branch_non_nude() {
        let d = decide(
            PixelCounts {
                total: 10_000,
                skin: 1000,
                face_skin: 500,
            },
            true,
            Thresholds::default(),
            DecisionMeta::default(),
        );
        assert_eq!(d.verdict, Verdict::NonNude);
        assert_eq!(d.ratio, 0.5);
        assert_eq!(d.ratio_display, 0.5);
    }

    #[test]
    fn decide_no_face_strict_boundary() {
        let at = decide(
            PixelCounts {
                total: 100,
                skin: 38,
                face_skin: 0,
            },
            false,
            Thresholds::default(),
            DecisionMeta::default(),
        );
        assert_eq!(at.verdict, Verdict::NonNude);
        let above = decide(
            PixelCounts {
                total: 100,
                skin: 39,
                face_skin: 0,
            },
            false,
            Thresholds::default(),
            DecisionMeta::default(),
        );
        assert_eq!(above.verdict, Verdict::Nude);
    }

    #[test]
    fn decide_zero_skin_with_face_is_non_nude() {
        let d = decide(
            PixelCounts {
                total: 100,
                skin: 0,
                face_skin: 0,
            },
            true,
            Thresholds::default(),
            DecisionMeta::default(),
        );
        assert_eq!(d.verdict, Verdict::NonNude);
        assert_eq!(d.ratio, 0.0);
    }

    #[test]
    fn screen_no_face_nude() {
        let img = half_skin_image();
        let d = screen_image(
            &registry(),
            &img,
            &FaceSet::empty("none"),
            &proposed(),
            Thresholds::default(),
        )
        .unwrap();
        assert_eq!(d.branch, Branch::NoFace);
        assert_eq!(d.verdict, Verdict::Nude);
        assert_eq!(d.counts.skin, 50);
        assert_eq!(d.ratio, 0.5);
    }

    #[test]
    fn screen_face_covering_skin_non_nude() {
        let img = half_skin_image();
        // Box over rows 0..4 = 40 of the 50 skin pixels.
        let faces = face_set(vec![FaceBox {
            x: 0,
            y: 0,
            width: 10,
            height: 4,
        }]);
        let d = screen_image(&registry(), &img, &faces, &proposed(), Thresholds::default())
            .unwrap();
        assert_eq!(d.branch, Branch::FacePresent);
        assert_eq!(d.counts.face_skin, 40);
        assert_eq!(d.ratio, 0.8);
        assert_eq!(d.verdict, Verdict::NonNude);
    }

    #[test]
    fn screen_face_without_skin_nude() {
        let img = half_skin_image();
        // Box over black rows only.
        let faces = face_set(vec![FaceBox {
            x: 0,
            y: 6,
            width: 10,
            height: 4,
        }]);
        let d = screen_image(&registry(), &img, &faces, &proposed(), Thresholds::default())
            .unwrap();
        assert_eq!(d.counts.face_skin, 0);
        assert_eq!(d.ratio, 0.0);
        assert_eq!(d.verdict, Verdict::Nude);
    }

    #[test]
    fn overlay_noop_on_empty() {
        let img = ImageBuffer::filled(3, 3, BLACK).unwrap();
        let mask = SkinMask::zeroed(3, 3);
        let out = render_overlay(&img, &mask, &FaceSet::empty("none"));
        assert_eq!(out, img);
    }

    #[test]
    fn overlay_paints_skin_pixel() {
        let img = ImageBuffer::new(1, 2, vec![SKIN, BLACK]).unwrap();
        let reg = registry();
        let (mask, _) = build_skin_mask(&img, reg.get(&proposed()).unwrap().as_ref());
        let out = render_overlay(&img, &mask, &FaceSet::empty("none"));
        assert_eq!(out.get(0, 0), OVERLAY_SKIN);
        assert_eq!(out.get(0, 1), BLACK);
    }

    #[test]
    fn overlay_face_border_perimeter() {
        let img = ImageBuffer::filled(5, 5, BLACK).unwrap();
        let mask = SkinMask::zeroed(5, 5);
        let faces = face_set(vec![FaceBox {
            x: 0,
            y: 0,
            width: 3,
            height: 3,
        }]);
        let out = render_overlay(&img, &mask, &faces);
        let green: usize = (0..5)
            .flat_map(|y| (0..5).map(move |x| (x, y)))
            .filter(|&(x, y)| out.get(x, y) == OVERLAY_FACE_BORDER)
            .count();
        assert_eq!(green, 8);
        assert_eq!(out.get(1, 1), BLACK); // interior untouched
        assert_eq!(out.dims(), img.dims());
    }

    #[test]
    fn parallel_matches_sequential() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let reg = registry();
        let rule = reg.get(&proposed()).unwrap();
        for _ in 0..20 {
            let w = rng.gen_range(1..=130);
            let h = rng.gen_range(1..=40);
            let pixels = (0..w as usize * h as usize)
                .map(|_| Rgb8::new(rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let img = ImageBuffer::new(w, h, pixels).unwrap();
            let (pm, pc) = build_skin_mask(&img, rule.as_ref());
            let (sm, sc) = build_skin_mask_sequential(&img, rule.as_ref());
            assert_eq!(pm, sm);
            assert_eq!(pc, sc);
        }
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::new(0.15, 0.38).is_ok());
        assert!(Thresholds::new(0.0, 0.38).is_err());
        assert!(Thresholds::new(0.15, 1.0).is_err());
    }

    #[test]
    fn threshold_monotonicity() {
        // No-face branch: raising skin_ratio never flips NonNude -> Nude.
        let counts = PixelCounts {
            total: 100,
            skin: 40,
            face_skin: 0,
        };
        let lo = decide(
            counts,
            false,
            Thresholds::new(0.38, 0.38).unwrap(),
            DecisionMeta::default(),
        );
        let hi = decide(
            counts,
            false,
            Thresholds::new(0.38, 0.5).unwrap(),
            DecisionMeta::default(),
        );
        assert_eq!(lo.verdict, Verdict::Nude);
        assert_eq!(hi.verdict, Verdict::NonNude);
        // Face branch: raising face_ratio never flips Nude -> NonNude.
        let counts = PixelCounts {
            total: 100,
            skin: 50,
            face_skin: 5,
        };
        let lo = decide(
            counts,
            true,
            Thresholds::new(0.05, 0.38).unwrap(),
            DecisionMeta::default(),
        );
        let hi = decide(
            counts,
            true,
            Thresholds::new(0.2, 0.38).unwrap(),
            DecisionMeta::default(),
        );
        assert_eq!(lo.verdict, Verdict::NonNude);
        assert_eq!(hi.verdict, Verdict::Nude);
    }
}
