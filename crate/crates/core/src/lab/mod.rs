//! Axiom schemas, random models, soundness sweeps and exhaustive validity checks.

pub mod gen;
mod instantiate;
mod soundness;
mod validity;

use std::fmt;
use std::str::FromStr;

pub use instantiate::{instantiate, is_tautology, InstantiateError, InstantiationBounds};
pub use soundness::{check_soundness, LabViolation, SchemaStats, SoundnessReport};
pub use validity::{
    check_validity, enumeration_count, Counterexample, ModelEnumerationConfig, Sampling, ValidityError,
    ValidityOutcome, DEFAULT_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomSchema {
    D0,
    D1,
    D2,
    D3,
    D4,
    D5,
    D7,
    D8,
    /// The classic D9, unsound once constraints can rule out every solution.
    D9,
    D9p,
    D9pp,
    Dsc,
}

impl AxiomSchema {
    /// Every schema that must be sound for constrained models.
    pub const SOUND: [AxiomSchema; 11] = [
        AxiomSchema::D0,
        AxiomSchema::D1,
        AxiomSchema::D2,
        AxiomSchema::D3,
        AxiomSchema::D4,
        AxiomSchema::D5,
        AxiomSchema::D7,
        AxiomSchema::D8,
        AxiomSchema::D9p,
        AxiomSchema::D9pp,
        AxiomSchema::Dsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomSchema::D0 => "D0",
            AxiomSchema::D1 => "D1",
            AxiomSchema::D2 => "D2",
            AxiomSchema::D3 => "D3",
            AxiomSchema::D4 => "D4",
            AxiomSchema::D5 => "D5",
            AxiomSchema::D7 => "D7",
            AxiomSchema::D8 => "D8",
            AxiomSchema::D9 => "D9",
            AxiomSchema::D9p => "D9'",
            AxiomSchema::D9pp => "D9''",
            AxiomSchema::Dsc => "DSC",
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomSchema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "D0" => AxiomSchema::D0,
            "D1" => AxiomSchema::D1,
            "D2" => AxiomSchema::D2,
            "D3" => AxiomSchema::D3,
            "D4" => AxiomSchema::D4,
            "D5" => AxiomSchema::D5,
            "D7" => AxiomSchema::D7,
            "D8" => AxiomSchema::D8,
            "D9" => AxiomSchema::D9,
            "D9'" | "D9P" => AxiomSchema::D9p,
            "D9''" | "D9PP" => AxiomSchema::D9pp,
            "DSC" => AxiomSchema::Dsc,
            _ => return Err(format!("unknown schema `{s}`")),
        })
    }
}
