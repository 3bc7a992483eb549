//! The JSON schema every report validates against.

use serde_json::Value;

pub const REPORT_SCHEMA: &str = include_str!("../../schemas/report.schema.json");

/// Checks a report document; on failure returns one message per violation.
pub fn validate(report: &Value) -> Result<(), Vec<String>> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).map_err(|e| vec![format!("schema: {e}")])?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| vec![format!("schema: {e}")])?;
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| format!("{}: {}", e.instance_path(), e))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}
