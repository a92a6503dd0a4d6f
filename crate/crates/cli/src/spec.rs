//! The flat JSON description of a game family: rule parameters plus the
//! `L C R` background and its shift.

use cagame::ca::{format_bits, parse_bits};
use cagame::{Background, Params};
use serde::{Deserialize, Serialize};

use crate::api::ApiError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub gamma: u32,
    #[serde(rename = "Gamma")]
    pub big_gamma: u32,
    #[serde(rename = "L")]
    pub left: String,
    #[serde(rename = "C", default)]
    pub center: String,
    #[serde(rename = "R")]
    pub right: String,
    #[serde(default)]
    pub xi: i64,
}

impl SpecDocument {
    pub fn params(&self) -> Params {
        Params::new(self.gamma, self.big_gamma)
    }

    pub fn background(&self) -> Result<Background, ApiError> {
        let field = |name: &str, s: &str| {
            parse_bits(s).map_err(|e| ApiError::malformed("malformed-spec", format!("{name}: {e}")))
        };
        let (l, c, r) = (
            field("L", &self.left)?,
            field("C", &self.center)?,
            field("R", &self.right)?,
        );
        Background::new(l, c, r, self.xi)
            .map_err(|e| ApiError::malformed("malformed-spec", e.to_string()))
    }

    /// Checks the document without keeping the result.
    pub fn validate(&self) -> Result<(), ApiError> {
        self.background().map(drop)
    }

    pub fn from_parts(params: Params, bg: &Background) -> Self {
        SpecDocument {
            gamma: params.reach_right,
            big_gamma: params.reach_left,
            left: format_bits(bg.left()),
            center: format_bits(bg.center()),
            right: format_bits(bg.right()),
            xi: bg.shift(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ApiError> {
        let doc: SpecDocument = serde_json::from_str(text)
            .map_err(|e| ApiError::malformed("malformed-spec", e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}
