//! Skin-pixel detection and nudity screening.
//!
//! The pipeline scans an image with a per-pixel skin rule (a conjunction of
//! RGB and HSV threshold constraints), intersects the resulting skin mask
//! with face bounding boxes from a pluggable provider, and flags the image
//! on one of two branches:
//!
//! * face present: nude when `face_skin / skin < 0.15`
//! * no face: nude when `skin / total > 0.38`
//!
//! Color-based rules do not work on black-and-white images: grayscale
//! pixels have `R == G` and are never classified as skin.

pub mod classifier;
pub mod color;
pub mod eval;
pub mod faces;
pub mod lut;
pub mod rules;

pub use classifier::{
    build_skin_mask, build_skin_mask_sequential, count_face_skin, decide, render_overlay,
    screen_image, screen_image_with_mask, Branch, Decision, DecisionMeta, ImageBuffer,
    PixelCounts, SkinMask, Thresholds, Verdict,
};
pub use color::{rgb_to_hsv, rgb_to_normalized, Hsv, NormRgb, Rgb8};
pub use eval::{
    compare_rules, eval_images, eval_pixels, EvalError, EvalReport, ImageDataset,
    ImageEvalReport, PixelDataset, PixelLabel,
};
pub use faces::{
    faces_from_json_bytes, faces_from_service, faces_from_sidecar, FaceBox, FaceError, FaceSet,
    FallbackPolicy,
};
pub use lut::SkinLut;
pub use rules::{is_skin_kovac, is_skin_proposed, RuleError, RuleRegistry, SkinRule, SkinRuleId};
