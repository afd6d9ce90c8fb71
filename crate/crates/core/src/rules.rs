//! Per-pixel skin rules and the rule registry.
//!
//! A skin rule is a pure, total predicate over one RGB pixel. The flagship
//! `proposed` rule combines RGB channel thresholds with HSV interval
//! bounds; `kovac` is the classic uniform-daylight baseline. Additional
//! rules can be loaded from JSON documents describing a conjunction of
//! channel constraints.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::color::{rgb_to_hsv, Rgb8};

/// Name of a registered skin rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkinRuleId(pub String);

impl SkinRuleId {
    pub fn new(name: impl Into<String>) -> Self {
        SkinRuleId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SkinRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SkinRuleId {
    fn from(s: &str) -> Self {
        SkinRuleId(s.to_string())
    }
}

/// A pure per-pixel skin predicate.
pub trait SkinRule: Send + Sync {
    fn is_skin(&self, p: Rgb8) -> bool;
}

impl<F> SkinRule for F
where
    F: Fn(Rgb8) -> bool + Send + Sync,
{
    fn is_skin(&self, p: Rgb8) -> bool {
        self(p)
    }
}

/// The combined RGB + HSV threshold rule. True iff all of:
/// `R > 95`, `G > 40`, `B > 20`, `R > G`, `R > B`, `|R - G| > 15`,
/// `0 <= H <= 50` (degrees), `0.23 <= S <= 0.78`.
/// RGB comparisons are strict; the H and S bounds are inclusive.
pub fn is_skin_proposed(p: Rgb8) -> bool {
    if !(p.r > 95 && p.g > 40 && p.b > 20 && p.r > p.g && p.r > p.b) {
        return false;
    }
    let diff = p.r as i32 - p.g as i32;
    if diff.abs() <= 15 {
        return false;
    }
    let hsv = rgb_to_hsv(p);
    (0.0..=50.0).contains(&hsv.h) && (0.23..=0.78).contains(&hsv.s)
}

/// Kovac et al. uniform-daylight rule: `R > 95`, `G > 40`, `B > 20`,
/// `max - min > 15`, `|R - G| > 15`, `R > G`, `R > B`.
pub fn is_skin_kovac(p: Rgb8) -> bool {
    let max = p.r.max(p.g).max(p.b);
    let min = p.r.min(p.g).min(p.b);
    p.r > 95
        && p.g > 40
        && p.b > 20
        && max - min > 15
        && (p.r as i32 - p.g as i32).abs() > 15
        && p.r > p.g
        && p.r > p.b
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("unknown skin rule: {0}")]
    UnknownRule(String),
    #[error("skin rule already registered: {0}")]
    DuplicateRule(String),
    #[error("failed to read rule file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid rule file {path}: {message}")]
    InvalidRuleFile { path: String, message: String },
}

/// Channel a constraint applies to. RGB and `|R-G|` take values in
/// 0..=255; H is in degrees, S and V are fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channel {
    R,
    G,
    B,
    H,
    S,
    V,
    AbsRMinusG,
}

impl Channel {
    fn parse(s: &str) -> Option<Channel> {
        match s {
            "R" => Some(Channel::R),
            "G" => Some(Channel::G),
            "B" => Some(Channel::B),
            "H" => Some(Channel::H),
            "S" => Some(Channel::S),
            "V" => Some(Channel::V),
            "|R-G|" => Some(Channel::AbsRMinusG),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ConstraintDoc {
    channel: String,
    min: f64,
    max: f64,
    strict_min: bool,
    strict_max: bool,
}

#[derive(Debug, Clone, Deserialize)]
struct RuleDoc {
    name: String,
    constraints: Vec<ConstraintDoc>,
}

#[derive(Debug, Clone)]
struct Constraint {
    channel: Channel,
    min: f64,
    max: f64,
    strict_min: bool,
    strict_max: bool,
}

impl Constraint {
    fn holds(&self, value: f64) -> bool {
        let above = if self.strict_min {
            value > self.min
        } else {
            value >= self.min
        };
        let below = if self.strict_max {
            value < self.max
        } else {
            value <= self.max
        };
        above && below
    }
}

/// A rule loaded from a config document: a conjunction of interval
/// constraints over R, G, B, H, S, V and |R-G|.
struct ConstraintRule {
    constraints: Vec<Constraint>,
}

impl SkinRule for ConstraintRule {
    fn is_skin(&self, p: Rgb8) -> bool {
        let needs_hsv = self
            .constraints
            .iter()
            .any(|c| matches!(c.channel, Channel::H | Channel::S | Channel::V));
        let hsv = if needs_hsv {
            Some(rgb_to_hsv(p))
        } else {
            None
        };
        self.constraints.iter().all(|c| {
            let value = match c.channel {
                Channel::R => p.r as f64,
                Channel::G => p.g as f64,
                Channel::B => p.b as f64,
                Channel::H => hsv.unwrap().h,
                Channel::S => hsv.unwrap().s,
                Channel::V => hsv.unwrap().v,
                Channel::AbsRMinusG => (p.r as i32 - p.g as i32).abs() as f64,
            };
            c.holds(value)
        })
    }
}

/// Immutable-after-construction registry of named skin rules.
/// `proposed` and `kovac` are always present.
pub struct RuleRegistry {
    rules: BTreeMap<String, Arc<dyn SkinRule>>,
}

impl RuleRegistry {
    pub fn with_builtins() -> Self {
        let mut rules: BTreeMap<String, Arc<dyn SkinRule>> = BTreeMap::new();
        rules.insert("proposed".to_string(), Arc::new(is_skin_proposed));
        rules.insert("kovac".to_string(), Arc::new(is_skin_kovac));
        RuleRegistry { rules }
    }

    pub fn register(
        &mut self,
        id: SkinRuleId,
        rule: Arc<dyn SkinRule>,
    ) -> Result<(), RuleError> {
        if self.rules.contains_key(id.as_str()) {
            return Err(RuleError::DuplicateRule(id.0));
        }
        self.rules.insert(id.0, rule);
        Ok(())
    }

    pub fn get(&self, id: &SkinRuleId) -> Result<&Arc<dyn SkinRule>, RuleError> {
        self.rules
            .get(id.as_str())
            .ok_or_else(|| RuleError::UnknownRule(id.0.clone()))
    }

    /// Dispatches to the named rule's predicate.
    pub fn classify(&self, id: &SkinRuleId, p: Rgb8) -> Result<bool, RuleError> {
        Ok(self.get(id)?.is_skin(p))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(|k| k.as_str())
    }

    /// Loads one rule document (JSON: `{"name": ..., "constraints": [...]}`)
    /// and registers it under its declared name.
    pub fn load_rule_file(&mut self, path: impl AsRef<Path>) -> Result<SkinRuleId, RuleError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|source| RuleError::Io {
            path: display.clone(),
            source,
        })?;
        let doc: RuleDoc =
            serde_json::from_slice(&bytes).map_err(|e| RuleError::InvalidRuleFile {
                path: display.clone(),
                message: e.to_string(),
            })?;
        if doc.constraints.is_empty() {
            return Err(RuleError::InvalidRuleFile {
                path: display,
                message: "rule has no constraints".to_string(),
            });
        }
        let mut constraints = Vec::with_capacity(doc.constraints.len());
        for c in &doc.constraints {
            let channel = Channel::parse(&c.channel).ok_or_else(|| RuleError::InvalidRuleFile {
                path: display.clone(),
                message: format!(
                    "unknown channel {:?} (expected one of R, G, B, H, S, V, |R-G|)",
                    c.channel
                ),
            })?;
            if c.min.is_nan() || c.max.is_nan() || c.min > c.max {
                return Err(RuleError::InvalidRuleFile {
                    path: display.clone(),
                    message: format!("constraint on {:?} has min > max", c.channel),
                });
            }
            constraints.push(Constraint {
                channel,
                min: c.min,
                max: c.max,
                strict_min: c.strict_min,
                strict_max: c.strict_max,
            });
        }
        let id = SkinRuleId::new(doc.name);
        self.register(id.clone(), Arc::new(ConstraintRule { constraints }))?;
        Ok(id)
    }
}

impl Default for RuleRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
