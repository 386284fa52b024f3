use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A trainable approach compared in the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Rules with KAN consequents.
    Xkan,
    /// Rules with least-squares linear consequents.
    Xcsf,
    /// Rules with parameter-matched MLP consequents.
    Xmlp,
    /// One global KAN.
    Kan,
    /// One global KAN whose hidden layer is widened to the rule budget.
    Widekan,
    /// One global parameter-matched MLP.
    Mlp,
    /// X-KAN with fitness set directly to accuracy.
    XkanKappa,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Self::Xkan,
        Self::Xcsf,
        Self::Xmlp,
        Self::Kan,
        Self::Widekan,
        Self::Mlp,
        Self::XkanKappa,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Xkan => "xkan",
            Self::Xcsf => "xcsf",
            Self::Xmlp => "xmlp",
            Self::Kan => "kan",
            Self::Widekan => "widekan",
            Self::Mlp => "mlp",
            Self::XkanKappa => "xkan-kappa",
        }
    }

    pub fn is_rule_based(self) -> bool {
        matches!(self, Self::Xkan | Self::Xcsf | Self::Xmlp | Self::XkanKappa)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.id() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|m| m.id()).collect();
            Error::Config(format!("unknown method '{s}' ({})", known.join("|")))
        })
    }
}
