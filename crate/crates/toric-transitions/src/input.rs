//! Strict JSON input schema: the single interchange format of the toolkit.
//!
//! Rationals travel as strings (`"p/q"`) or plain integers; unknown keys are
//! rejected so silent typos cannot skew a verdict.

use num::bigint::BigInt;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::rat::{rat_from_str, rat_to_string, Rat};
use crate::presentation::GitPresentation;
use crate::transition::TransitionSpec;

/// A rational that serializes as a canonical string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatField(pub Rat);

impl Serialize for RatField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(RatField(Rat::from(BigInt::from(n)))),
            Raw::Str(s) => rat_from_str(&s)
                .map(RatField)
                .map_err(|e| D::Error::custom(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BlowupSection {
    pub center: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<RatField>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub narrow: bool,
    #[serde(default)]
    pub sectors: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Request {
    Validate,
    Fan,
    Cohomology,
    Transition,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub torus_rank: usize,
    pub characters: Vec<Vec<i64>>,
    pub stability: Vec<RatField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupSection>,
    pub request: Request,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

impl InputDocument {
    pub fn options(&self) -> Options {
        self.options.unwrap_or_default()
    }

    /// Cross-field schema checks beyond what serde enforces.
    pub fn check(&self) -> Result<()> {
        let m = self.characters.len();
        if m == 0 {
            return Err(Error::Schema("at least one character is required".into()));
        }
        for (i, c) in self.characters.iter().enumerate() {
            if c.len() != self.torus_rank {
                return Err(Error::Schema(format!(
                    "character {} has length {} but torus_rank is {}",
                    i,
                    c.len(),
                    self.torus_rank
                )));
            }
        }
        if self.stability.len() != self.torus_rank {
            return Err(Error::Schema(format!(
                "stability has length {} but torus_rank is {}",
                self.stability.len(),
                self.torus_rank
            )));
        }
        if let Some(d) = &self.divisor {
            if d.len() != m {
                return Err(Error::Schema(format!(
                    "divisor has {} coefficients for {} characters",
                    d.len(),
                    m
                )));
            }
        }
        if let Some(b) = &self.blowup {
            let mut seen = std::collections::BTreeSet::new();
            for &c in &b.center {
                if c >= m {
                    return Err(Error::Schema(format!("center index {c} out of range")));
                }
                if !seen.insert(c) {
                    return Err(Error::Schema(format!("center index {c} repeated")));
                }
            }
            if b.center.is_empty() {
                return Err(Error::Schema("blowup.center must be nonempty".into()));
            }
            if let Some(w) = &b.weights {
                if w.len() != b.center.len() {
                    return Err(Error::Schema("one weight per center index is required".into()));
                }
                if w.iter().any(|&x| x <= 0) {
                    return Err(Error::Schema("weights must be positive".into()));
                }
            }
            if let Some(eps) = &b.epsilon {
                if !num::Signed::is_positive(&eps.0) {
                    return Err(Error::Schema("epsilon must be positive".into()));
                }
            }
        }
        if matches!(self.request, Request::Transition) {
            if self.divisor.is_none() {
                return Err(Error::Schema("transition requests require a divisor".into()));
            }
            if self.blowup.is_none() {
                return Err(Error::Schema("transition requests require a blowup section".into()));
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> GitPresentation {
        GitPresentation::new(
            self.torus_rank,
            self.characters
                .iter()
                .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            self.stability.iter().map(|r| r.0.clone()).collect(),
        )
    }

    pub fn transition_spec(&self) -> Result<TransitionSpec> {
        let divisor = self
            .divisor
            .as_ref()
            .ok_or_else(|| Error::Schema("missing divisor".into()))?;
        let blowup = self
            .blowup
            .as_ref()
            .ok_or_else(|| Error::Schema("missing blowup section".into()))?;
        Ok(TransitionSpec {
            base: self.presentation(),
            divisor: divisor.iter().map(|&x| BigInt::from(x)).collect(),
            center: blowup.center.clone(),
            weights: blowup
                .weights
                .as_ref()
                .map(|w| w.iter().map(|&x| BigInt::from(x)).collect()),
            epsilon: blowup.epsilon.as_ref().map(|e| e.0.clone()),
        })
    }
}

/// Strict parse with line/column context from the JSON parser.
pub fn parse_input(text: &str) -> Result<InputDocument> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
        } else {
            Error::Schema(e.to_string())
        }
    })?;
    doc.check()?;
    Ok(doc)
}

pub fn serialize_input(doc: &InputDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("input serialization cannot fail");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUINTIC: &str = r#"{
        "torus_rank": 1,
        "characters": [[1],[1],[1],[1],[1]],
        "stability": [1],
        "divisor": [1,1,1,1,1],
        "blowup": {"center": [0,1]},
        "request": "transition"
    }"#;

    #[test]
    fn parses_quintic() {
        let doc = parse_input(QUINTIC).unwrap();
        assert_eq!(doc.characters.len(), 5);
        assert_eq!(doc.torus_rank, 1);
        assert!(doc.transition_spec().is_ok());
    }

    #[test]
    fn round_trip_is_identity() {
        let doc = parse_input(QUINTIC).unwrap();
        let text = serialize_input(&doc);
        let again = parse_input(&text).unwrap();
        assert_eq!(doc, again);
        assert_eq!(serialize_input(&again), text);
    }

    #[test]
    fn rejects_zero_denominator() {
        let bad = QUINTIC.replace("\"stability\": [1]", "\"stability\": [\"1/0\"]");
        assert!(matches!(parse_input(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn rejects_wrong_length_character() {
        let bad = QUINTIC.replace("[[1],[1],[1],[1],[1]]", "[[1],[1,2],[1],[1],[1]]");
        let err = parse_input(&bad).unwrap_err();
        assert!(err.to_string().contains("character 1"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = QUINTIC.replace("\"request\"", "\"extra\": 1, \"request\"");
        assert!(parse_input(&bad).is_err());
    }
}
