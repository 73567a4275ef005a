//! JSON-Schema check for repository documents, plus the semantic checks
//! that a schema cannot express (unique names, overlapping intervals).

use std::collections::HashSet;
use std::sync::OnceLock;

use jsonschema::Validator;
use serde_json::Value;

use crate::model::{validate_service, Violation};
use crate::synth::RepositoryFile;

pub const REPOSITORY_SCHEMA: &str = include_str!("../../../schema/repository.schema.json");

fn validator() -> &'static Validator {
    static VALIDATOR: OnceLock<Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| {
        let schema: Value = serde_json::from_str(REPOSITORY_SCHEMA).expect("bundled schema is valid JSON");
        jsonschema::validator_for(&schema).expect("bundled schema compiles")
    })
}

/// Structural violations of the repository schema.
pub fn schema_violations(doc: &Value) -> Vec<Violation> {
    validator()
        .iter_errors(doc)
        .map(|e| {
            let path = e.instance_path().to_string();
            Violation { path: if path.is_empty() { "/".into() } else { path }, message: e.to_string() }
        })
        .collect()
}

/// Full check of a repository document: schema first, then every service
/// and name uniqueness. Returns the parsed repository when it deserializes.
pub fn validate_repository_text(text: &str) -> Result<(Option<RepositoryFile>, Vec<Violation>), serde_json::Error> {
    let doc: Value = serde_json::from_str(text)?;
    let mut violations = schema_violations(&doc);
    if !violations.is_empty() {
        return Ok((None, violations));
    }
    let repo: RepositoryFile = serde_json::from_value(doc)?;
    let mut seen = HashSet::new();
    for s in &repo.services {
        if !seen.insert(s.name.as_str()) {
            violations.push(Violation { path: s.name.clone(), message: "duplicate service name".into() });
        }
        violations.extend(validate_service(s));
    }
    Ok((Some(repo), violations))
}
