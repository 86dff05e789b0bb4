//! Usage statistics CSV: `platform,time_min_per_day,freq_visits_per_week`.

use std::collections::HashSet;
use std::path::Path;

use pollinator_core::revenue::UsageRow;

pub const HEADER: [&str; 3] = ["platform", "time_min_per_day", "freq_visits_per_week"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum UsageError {
    #[error("usage file not found: {0}")]
    FileNotFound(String),
    #[error("expected header `{}`", HEADER.join(","))]
    BadHeader,
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("platform `{0}` appears more than once")]
    DuplicatePlatform(String),
    #[error("line {line}: {field} must be positive")]
    NonPositiveValue { line: u64, field: &'static str },
    #[error("{0}")]
    Io(String),
}

pub fn ingest_usage_csv(path: &Path) -> Result<Vec<UsageRow>, UsageError> {
    if !path.is_file() {
        return Err(UsageError::FileNotFound(path.display().to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| UsageError::Io(e.to_string()))?;
    parse_usage_csv(&text)
}

pub fn parse_usage_csv(text: &str) -> Result<Vec<UsageRow>, UsageError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|_| UsageError::BadHeader)?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(UsageError::BadHeader);
    }
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| UsageError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(UsageError::MalformedRow {
                line,
                reason: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let number = |i: usize| -> Result<f64, UsageError> {
            let value: f64 = record[i].parse().map_err(|_| UsageError::MalformedRow {
                line,
                reason: format!("`{}` is not a number", &record[i]),
            })?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(UsageError::NonPositiveValue { line, field: HEADER[i] });
            }
            Ok(value)
        };
        let time = number(1)?;
        let freq = number(2)?;
        let platform = record[0].to_string();
        if platform.is_empty() {
            return Err(UsageError::MalformedRow {
                line,
                reason: "empty platform name".into(),
            });
        }
        if !seen.insert(platform.clone()) {
            return Err(UsageError::DuplicatePlatform(platform));
        }
        rows.push(UsageRow::new(platform, time, freq));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_in_order() {
        let rows = parse_usage_csv("platform,time_min_per_day,freq_visits_per_week\nA,1.5,2\n B , 3 ,4\n").unwrap();
        assert_eq!(rows, vec![UsageRow::new("A", 1.5, 2.0), UsageRow::new("B", 3.0, 4.0)]);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_usage_csv("platform,time_min_per_day,freq_visits_per_week\n").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let h = "platform,time_min_per_day,freq_visits_per_week\n";
        assert_eq!(parse_usage_csv(""), Err(UsageError::BadHeader));
        assert_eq!(parse_usage_csv("a,b,c\n"), Err(UsageError::BadHeader));
        assert_eq!(
            parse_usage_csv(&format!("{h}A,0,1\n")),
            Err(UsageError::NonPositiveValue { line: 2, field: "time_min_per_day" })
        );
        assert_eq!(
            parse_usage_csv(&format!("{h}A,1,2\nA,3,4\n")),
            Err(UsageError::DuplicatePlatform("A".into()))
        );
        assert!(matches!(
            parse_usage_csv(&format!("{h}A,1,2\nB,x,4\n")),
            Err(UsageError::MalformedRow { line: 3, .. })
        ));
        assert!(matches!(
            parse_usage_csv(&format!("{h}A,1\n")),
            Err(UsageError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            ingest_usage_csv(Path::new("/definitely/not/here.csv")),
            Err(UsageError::FileNotFound(_))
        ));
    }
}
