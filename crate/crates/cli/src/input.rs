//! Reading input files and telling the presentation kinds apart.

use std::path::Path;

use almell::decision::GroupPresentationJson;
use almell::exact::RationalLieAlgebra;
use almell::lie_algebra::LieAlgebraJson;
use almell::solvable_group::SolvablePresentationJson;
use almell::torus_rep::CompactPartJson;
use almell::{CompactPart, GroupPresentation, LieAlgebra, SolvablePresentation};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::CliError;

pub enum Input {
    Presentation(GroupPresentation),
    Compact(CompactPart),
    Solvable(SolvablePresentation),
    Algebra {
        algebra: LieAlgebra,
        exact: Option<RationalLieAlgebra>,
    },
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: "<root>".into(),
        message: format!("invalid JSON in {}: {e}", path.display()),
    })
}

/// Deserializes `value`, reporting the field path of the first mismatch.
pub fn parse<T: DeserializeOwned>(value: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn has(value: &Value, key: &str) -> bool {
    value.as_object().is_some_and(|o| o.contains_key(key))
}

/// Dispatch on the top-level keys: `kind` is a group presentation, `rank` a
/// compact part, `realization` a solvable presentation and `c` or `dim` a Lie algebra.
pub fn classify(value: Value) -> Result<Input, CliError> {
    if has(&value, "kind") {
        let j: GroupPresentationJson = parse(value)?;
        return Ok(Input::Presentation(GroupPresentation::try_from(j)?));
    }
    if has(&value, "rank") {
        let j: CompactPartJson = parse(value)?;
        return Ok(Input::Compact(CompactPart::try_from(j)?));
    }
    if has(&value, "realization") {
        let j: SolvablePresentationJson = parse(value)?;
        return Ok(Input::Solvable(SolvablePresentation::try_from(j)?));
    }
    if has(&value, "c") || has(&value, "dim") {
        let j: LieAlgebraJson = parse(value)?;
        let exact = if j.exact {
            Some(RationalLieAlgebra::from_json(&j)?)
        } else {
            None
        };
        return Ok(Input::Algebra {
            algebra: LieAlgebra::try_from(j)?,
            exact,
        });
    }
    Err(CliError::Schema {
        path: "<root>".into(),
        message: "cannot tell the input kind: expected one of the keys `kind`, `rank`, `realization`, `c`".into(),
    })
}

pub fn presentation(value: Value) -> Result<GroupPresentation, CliError> {
    match classify(value)? {
        Input::Presentation(g) => Ok(g),
        Input::Compact(k) => Ok(GroupPresentation::vector(k)),
        _ => Err(CliError::Schema {
            path: "<root>".into(),
            message: "expected a group presentation (an object with `kind`) or a compact part".into(),
        }),
    }
}
