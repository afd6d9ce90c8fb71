//! Face bounding-box providers.
//!
//! The classifier only consumes a `FaceSet`; where the boxes come from
//! (a sidecar file, an HTTP detector service, or nothing at all) never
//! changes downstream arithmetic. Boxes are half-open rectangles
//! `[x, x+width) x [y, y+height)`, clamped to the image bounds on entry;
//! boxes fully outside the image are dropped.

use std::path::Path;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

/// Axis-aligned face bounding box, already clamped inside the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceBox {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl FaceBox {
    /// Half-open membership test.
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.x + self.width && y >= self.y && y < self.y + self.height
    }
}

/// Face boxes for one image. An empty list selects the no-face branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    pub boxes: Vec<FaceBox>,
    pub source: String,
}

impl FaceSet {
    pub fn empty(source: impl Into<String>) -> Self {
        FaceSet {
            boxes: Vec::new(),
            source: source.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

/// What the classifier should do when the detector service fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackPolicy {
    /// Propagate the detector error; the image is not classified.
    Fail,
    /// Proceed on the no-face branch and mark the decision as degraded.
    NoFaceBranch,
}

#[derive(Debug, Error)]
pub enum FaceError {
    #[error("failed to read faces file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid faces document ({source_name}) at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid face box in {source_name}: width and height must be positive (got {width}x{height})")]
    InvalidBox {
        source_name: String,
        width: i64,
        height: i64,
    },
    #[error("detector transport error: {0}")]
    Transport(String),
    #[error("detector timed out after {0:?}")]
    Timeout(Duration),
    #[error("detector returned status {0}")]
    Status(u16),
    #[error("detector response violates the faces schema: {0}")]
    Schema(String),
}

#[derive(Debug, Deserialize)]
struct RawBox {
    x: i64,
    y: i64,
    width: i64,
    height: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFaces {
    faces: Vec<RawBox>,
}

/// Clamps a raw box to `width x height` image bounds. Returns `None`
/// when the box lies fully outside the image.
fn clamp_box(raw: &RawBox, img_w: u32, img_h: u32) -> Option<FaceBox> {
    let x0 = raw.x.max(0);
    let y0 = raw.y.max(0);
    let x1 = (raw.x + raw.width).min(img_w as i64);
    let y1 = (raw.y + raw.height).min(img_h as i64);
    if x1 <= x0 || y1 <= y0 {
        return None;
    }
    Some(FaceBox {
        x: x0 as u32,
        y: y0 as u32,
        width: (x1 - x0) as u32,
        height: (y1 - y0) as u32,
    })
}

fn parse_faces(
    bytes: &[u8],
    image_dims: (u32, u32),
    source_name: &str,
) -> Result<FaceSet, FaceError> {
    let raw: RawFaces = serde_json::from_slice(bytes).map_err(|e| FaceError::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let (img_w, img_h) = image_dims;
    let mut boxes = Vec::new();
    for b in &raw.faces {
        if b.width <= 0 || b.height <= 0 {
            return Err(FaceError::InvalidBox {
                source_name: source_name.to_string(),
                width: b.width,
                height: b.height,
            });
        }
        if let Some(clamped) = clamp_box(b, img_w, img_h) {
            boxes.push(clamped);
        }
    }
    Ok(FaceSet {
        boxes,
        source: source_name.to_string(),
    })
}

/// Parses the sidecar schema `{"faces":[{"x","y","width","height"},...]}`
/// from in-memory bytes.
pub fn faces_from_json_bytes(
    bytes: &[u8],
    image_dims: (u32, u32),
    source: &str,
) -> Result<FaceSet, FaceError> {
    parse_faces(bytes, image_dims, source)
}

/// Reads face boxes from a sidecar file and clamps them to the image.
pub fn faces_from_sidecar(
    path: impl AsRef<Path>,
    image_dims: (u32, u32),
) -> Result<FaceSet, FaceError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| FaceError::Io {
        path: display.clone(),
        source,
    })?;
    parse_faces(&bytes, image_dims, &display)
}

/// POSTs the encoded image to a detector endpoint and parses the response.
///
/// Wire protocol: `POST <endpoint>` with the raw image bytes as body and
/// `Content-Type: application/octet-stream`; the detector answers 200
/// with a body in the sidecar schema. Any other status is an error.
pub fn faces_from_service(
    endpoint: &str,
    image_bytes: &[u8],
    timeout: Duration,
    image_dims: (u32, u32),
) -> Result<FaceSet, FaceError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| FaceError::Transport(e.to_string()))?;
    let response = client
        .post(endpoint)
        .header("Content-Type", "application/octet-stream")
        .body(image_bytes.to_vec())
        .send()
        .map_err(|e| {
            if e.is_timeout() {
                FaceError::Timeout(timeout)
            } else {
                FaceError::Transport(e.to_string())
            }
        })?;
    let status = response.status();
    if status != reqwest::StatusCode::OK {
        return Err(FaceError::Status(status.as_u16()));
    }
    let body = response.bytes().map_err(|e| {
        if e.is_timeout() {
            FaceError::Timeout(timeout)
        } else {
            FaceError::Transport(e.to_string())
        }
    })?;
    parse_faces(&body, image_dims, endpoint).map_err(|e| match e {
        FaceError::Parse { message, .. } => FaceError::Schema(message),
        FaceError::InvalidBox { width, height, .. } => FaceError::Schema(format!(
            "width and height must be positive (got {width}x{height})"
        )),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sidecar(contents: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), contents).unwrap();
        f
    }

    #[test]
    fn in_bounds_passthrough() {
        let f = sidecar(r#"{"faces":[{"x":10,"y":10,"width":50,"height":60}]}"#);
        let set = faces_from_sidecar(f.path(), (200, 200)).unwrap();
        assert_eq!(
            set.boxes,
            vec![FaceBox {
                x: 10,
                y: 10,
                width: 50,
                height: 60
            }]
        );
    }

    #[test]
    fn empty_faces() {
        let f = sidecar(r#"{"faces":[]}"#);
        let set = faces_from_sidecar(f.path(), (200, 200)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn clamps_right_edge() {
        let f = sidecar(r#"{"faces":[{"x":180,"y":0,"width":50,"height":50}]}"#);
        let set = faces_from_sidecar(f.path(), (200, 200)).unwrap();
        assert_eq!(
            set.boxes,
            vec![FaceBox {
                x: 180,
                y: 0,
                width: 20,
                height: 50
            }]
        );
    }

    #[test]
    fn drops_fully_outside_box() {
        let f = sidecar(r#"{"faces":[{"x":500,"y":500,"width":10,"height":10}]}"#);
        let set = faces_from_sidecar(f.path(), (200, 200)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn rejects_negative_dimensions() {
        let f = sidecar(r#"{"faces":[{"x":0,"y":0,"width":-5,"height":10}]}"#);
        let err = faces_from_sidecar(f.path(), (200, 200)).unwrap_err();
        assert!(matches!(err, FaceError::InvalidBox { width: -5, .. }));
    }

    #[test]
    fn parse_error_carries_location() {
        let f = sidecar("{\"faces\":\n[oops]}");
        let err = faces_from_sidecar(f.path(), (200, 200)).unwrap_err();
        match err {
            FaceError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = faces_from_sidecar("/nonexistent/faces.json", (10, 10)).unwrap_err();
        assert!(matches!(err, FaceError::Io { .. }));
    }

    proptest! {
        // clamp(clamp(b)) == clamp(b)
        #[test]
        fn clamp_is_idempotent(
            x in -300i64..300,
            y in -300i64..300,
            w in 1i64..400,
            h in 1i64..400,
            img_w in 1u32..300,
            img_h in 1u32..300,
        ) {
            let raw = RawBox { x, y, width: w, height: h };
            if let Some(once) = clamp_box(&raw, img_w, img_h) {
                let again = clamp_box(
                    &RawBox {
                        x: once.x as i64,
                        y: once.y as i64,
                        width: once.width as i64,
                        height: once.height as i64,
                    },
                    img_w,
                    img_h,
                );
                prop_assert_eq!(again, Some(once));
                prop_assert!(once.x + once.width <= img_w);
                prop_assert!(once.y + once.height <= img_h);
            }
        }
    }
}
