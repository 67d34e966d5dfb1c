use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::PenaltyConfig;

/// Members of the LASSO family reachable from the two formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Lasso,
    GLasso,
    SgLasso,
    FLasso,
    Sgf,
    Lgf,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] = [
        VariantKind::Lasso,
        VariantKind::GLasso,
        VariantKind::SgLasso,
        VariantKind::FLasso,
        VariantKind::Sgf,
        VariantKind::Lgf,
    ];

    /// Config/CLI identifier.
    pub fn key(self) -> &'static str {
        match self {
            VariantKind::Lasso => "lasso",
            VariantKind::GLasso => "g_lasso",
            VariantKind::SgLasso => "sg_lasso",
            VariantKind::FLasso => "f_lasso",
            VariantKind::Sgf => "sgf",
            VariantKind::Lgf => "lgf",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            VariantKind::Lasso => "LASSO",
            VariantKind::GLasso => "G-LASSO",
            VariantKind::SgLasso => "SG-LASSO",
            VariantKind::FLasso => "F-LASSO",
            VariantKind::Sgf => "SGF-LASSO",
            VariantKind::Lgf => "LGF-LASSO",
        }
    }

    /// Whether the variant needs overlapping groups (LGF solver).
    pub fn is_latent(self) -> bool {
        self == VariantKind::Lgf
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        VariantKind::ALL
            .into_iter()
            .find(|k| k.key() == norm || k.display_name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param("variant", format!("unknown variant `{s}`")))
    }
}

/// Zeroes the penalties a variant does not use.
///
/// LASSO keeps `λ_e`; G-LASSO keeps `λ_g`; SG-LASSO drops `λ_f`; F-LASSO
/// drops `λ_g`; SGF keeps all three; LGF drops `λ_e`.
pub fn variant_config(kind: VariantKind, base: PenaltyConfig) -> PenaltyConfig {
    let PenaltyConfig { lambda_e, lambda_g, lambda_f } = base;
    let (e, g, f) = match kind {
        VariantKind::Lasso => (lambda_e, 0.0, 0.0),
        VariantKind::GLasso => (0.0, lambda_g, 0.0),
        VariantKind::SgLasso => (lambda_e, lambda_g, 0.0),
        VariantKind::FLasso => (lambda_e, 0.0, lambda_f),
        VariantKind::Sgf => (lambda_e, lambda_g, lambda_f),
        VariantKind::Lgf => (0.0, lambda_g, lambda_f),
    };
    PenaltyConfig { lambda_e: e, lambda_g: g, lambda_f: f }
}
