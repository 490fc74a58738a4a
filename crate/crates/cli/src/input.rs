//! Subject CSV parsing (header `time,event,group`; event, group ∈ {0,1}).

use crate::CliError;
use std::path::Path;
use survlrt::Subject;

pub fn read_subjects_csv(path: &Path) -> Result<Vec<Subject>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;

    {
        let headers = reader
            .headers()
            .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
        let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        if got != ["time", "event", "group"] {
            return Err(CliError::bad_input(format!(
                "{}: line 1: expected header 'time,event,group', got '{}'",
                path.display(),
                got.join(",")
            )));
        }
    }

    let mut subjects = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| "?".to_string());
            CliError::bad_input(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(CliError::bad_input(format!(
                "{}: line {line}: expected 3 fields, got {}",
                path.display(),
                record.len()
            )));
        }
        let time: f64 = record[0].parse().map_err(|_| {
            CliError::bad_input(format!(
                "{}: line {line}: bad time '{}'",
                path.display(),
                &record[0]
            ))
        })?;
        let event = parse_binary(&record[1]).ok_or_else(|| {
            CliError::bad_input(format!(
                "{}: line {line}: event must be 0 or 1, got '{}'",
                path.display(),
                &record[1]
            ))
        })?;
        let group = parse_binary(&record[2]).ok_or_else(|| {
            CliError::bad_input(format!(
                "{}: line {line}: group must be 0 or 1, got '{}'",
                path.display(),
                &record[2]
            ))
        })?;
        let subject = Subject::new(time, event == 1, group).map_err(|e| {
            CliError::bad_input(format!("{}: line {line}: {e}", path.display()))
        })?;
        subjects.push(subject);
    }
    if subjects.is_empty() {
        return Err(CliError::bad_input(format!("{}: no data rows", path.display())));
    }
    Ok(subjects)
}

fn parse_binary(field: &str) -> Option<u8> {
    match field {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }
}
