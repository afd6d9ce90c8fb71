//! Pure color-space conversions shared by every skin rule.

/// One image pixel in 8-bit RGB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb8 {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb8 { r, g, b }
    }
}

/// RGB normalized by channel sum; channels sum to 1 except for black,
/// which maps to (0, 0, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// Hexcone HSV: hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Divides each channel by `R + G + B`. Black yields (0, 0, 0) so the
/// function stays total; black is never skin under any rule.
pub fn rgb_to_normalized(p: Rgb8) -> NormRgb {
    let sum = p.r as u32 + p.g as u32 + p.b as u32;
    if sum == 0 {
        return NormRgb {
            r: 0.0,
            g: 0.0,
            b: 0.0,
        };
    }
    let sum = sum as f64;
    NormRgb {
        r: p.r as f64 / sum,
        g: p.g as f64 / sum,
        b: p.b as f64 / sum,
    }
}

/// Standard hexcone conversion: `v = max / 255`, `s = delta / max`
/// (0 when max is 0), hue by sector with the result wrapped into
/// `[0, 360)`. Achromatic pixels get `h = 0`.
pub fn rgb_to_hsv(p: Rgb8) -> Hsv {
    let max = p.r.max(p.g).max(p.b);
    let min = p.r.min(p.g).min(p.b);
    let v = max as f64 / 255.0;
    if max == 0 {
        return Hsv { h: 0.0, s: 0.0, v };
    }
    let delta = (max - min) as f64;
    let s = delta / max as f64;
    if max == min {
        return Hsv { h: 0.0, s, v };
    }
    let (r, g, b) = (p.r as f64, p.g as f64, p.b as f64);
    let mut h = if p.r == max {
        60.0 * (g - b) / delta
    } else if p.g == max {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h < 0.0 {
        h += 360.0;
    }
    Hsv { h, s, v }
}
