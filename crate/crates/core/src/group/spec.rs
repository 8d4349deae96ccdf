use serde::{Deserialize, Serialize};

use super::{perm, GroupLimits, GroupName, GroupTable};
use crate::error::{Error, Result};

/// JSON group description.
///
/// ```json
/// {"name": "S", "param": 3}
/// {"generators": ["(0 1)", "(0 1 2)"]}
/// {"cayley": [[0, 1], [1, 0]]}
/// {"product": [{"name": "Z", "param": 2}, {"name": "Z", "param": 3}]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GroupSpec {
    Named {
        name: String,
        #[serde(default)]
        param: Option<usize>,
    },
    Generators {
        generators: Vec<String>,
    },
    Cayley {
        cayley: Vec<Vec<usize>>,
    },
    Product {
        product: Vec<GroupSpec>,
    },
}

impl GroupSpec {
    pub fn named(name: &str, param: usize) -> Self {
        GroupSpec::Named {
            name: name.to_string(),
            param: Some(param),
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("group spec: {e}")))
    }

    pub fn build(&self) -> Result<GroupTable> {
        self.build_with(&GroupLimits::default())
    }

    pub fn build_with(&self, limits: &GroupLimits) -> Result<GroupTable> {
        match self {
            GroupSpec::Named { name, param } => {
                let kind: GroupName = name.parse()?;
                let param = match (kind, param) {
                    (GroupName::Quaternion, p) => p.unwrap_or(8),
                    (_, Some(p)) => *p,
                    (_, None) => {
                        return Err(Error::InvalidInput(format!("group `{name}` needs a param")))
                    }
                };
                GroupTable::named_with(kind, param, limits)
            }
            GroupSpec::Generators { generators } => {
                let perms = generators
                    .iter()
                    .map(|s| perm::parse_cycles(s))
                    .collect::<Result<Vec<_>>>()?;
                GroupTable::build_from_generators_with(&perms, limits)
            }
            GroupSpec::Cayley { cayley } => GroupTable::build_from_cayley_with(cayley, limits),
            GroupSpec::Product { product } => {
                let mut factors = product.iter();
                let first = factors
                    .next()
                    .ok_or_else(|| Error::InvalidInput("empty product".into()))?
                    .build_with(limits)?;
                factors.try_fold(first, |acc, spec| {
                    GroupTable::direct_product_with(&acc, &spec.build_with(limits)?, limits)
                })
            }
        }
    }

    /// Short human-readable label such as `S3` or `Z2xZ3`.
    pub fn label(&self) -> String {
        match self {
            GroupSpec::Named { name, param } => match (name.as_str(), param) {
                ("Q8" | "Q", _) => "Q8".to_string(),
                (n, Some(p)) => format!("{n}{p}"),
                (n, None) => n.to_string(),
            },
            GroupSpec::Generators { generators } => format!("<{}>", generators.join(", ")),
            GroupSpec::Cayley { cayley } => format!("cayley({})", cayley.len()),
            GroupSpec::Product { product } => product
                .iter()
                .map(GroupSpec::label)
                .collect::<Vec<_>>()
                .join("x"),
        }
    }
}
