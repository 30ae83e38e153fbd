use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Type of the image `Γ̌ ⊂ SO(3)` of `Γ` acting on the sphere of lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbifoldGroupType {
    Trivial,
    Cyclic(u32),
    Dihedral(u32),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl OrbifoldGroupType {
    pub fn validate(self) -> Result<Self> {
        match self {
            OrbifoldGroupType::Cyclic(n) | OrbifoldGroupType::Dihedral(n) if n < 2 => {
                Err(Error::InvalidModel(format!(
                    "{self} needs n >= 2; use trivial for the trivial group"
                )))
            }
            _ => Ok(self),
        }
    }

    /// Orders of the cone points of `S²/Γ̌`.
    pub fn classify_singularities(self) -> Vec<u32> {
        match self {
            OrbifoldGroupType::Trivial => vec![],
            OrbifoldGroupType::Cyclic(n) => vec![n, n],
            OrbifoldGroupType::Dihedral(n) => vec![2, 2, n],
            OrbifoldGroupType::Tetrahedral => vec![2, 3, 3],
            OrbifoldGroupType::Octahedral => vec![2, 3, 4],
            OrbifoldGroupType::Icosahedral => vec![2, 5, 5],
        }
    }

    /// `|Γ̌|`.
    pub fn order(self) -> u32 {
        match self {
            OrbifoldGroupType::Trivial => 1,
            OrbifoldGroupType::Cyclic(n) => n,
            OrbifoldGroupType::Dihedral(n) => 2 * n,
            OrbifoldGroupType::Tetrahedral => 12,
            OrbifoldGroupType::Octahedral => 24,
            OrbifoldGroupType::Icosahedral => 60,
        }
    }
}

impl fmt::Display for OrbifoldGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbifoldGroupType::Trivial => write!(f, "trivial"),
            OrbifoldGroupType::Cyclic(n) => write!(f, "cyclic({n})"),
            OrbifoldGroupType::Dihedral(n) => write!(f, "dihedral({n})"),
            OrbifoldGroupType::Tetrahedral => write!(f, "tetrahedral"),
            OrbifoldGroupType::Octahedral => write!(f, "octahedral"),
            OrbifoldGroupType::Icosahedral => write!(f, "icosahedral"),
        }
    }
}

/// Accepts `trivial`, `cyclic(4)`, `cyclic:4`, `dihedral(3)`, `tetrahedral`,
/// `octahedral`, `icosahedral`.
impl FromStr for OrbifoldGroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.find(['(', ':']) {
            Some(i) => {
                let rest = s[i + 1..].trim_end_matches(')');
                (&s[..i], Some(rest.trim()))
            }
            None => (s.as_str(), None),
        };
        let n = || -> Result<u32> {
            arg.ok_or_else(|| Error::InvalidModel(format!("{name} needs an order n")))?
                .parse()
                .map_err(|_| Error::InvalidModel(format!("bad order in '{s}'")))
        };
        let kind = match (name, arg.is_some()) {
            ("trivial", false) => OrbifoldGroupType::Trivial,
            ("cyclic", _) => OrbifoldGroupType::Cyclic(n()?),
            ("dihedral", _) => OrbifoldGroupType::Dihedral(n()?),
            ("tetrahedral", false) => OrbifoldGroupType::Tetrahedral,
            ("octahedral", false) => OrbifoldGroupType::Octahedral,
            ("icosahedral", false) => OrbifoldGroupType::Icosahedral,
            _ => return Err(Error::InvalidModel(format!("unknown group type '{s}'"))),
        };
        kind.validate()
    }
}
