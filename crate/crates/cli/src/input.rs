//! CSV ingestion.
//!
//! Accepted layouts: a single `value` column, or `t,value` with consecutive
//! integer time labels. The header row is optional in both cases.

use std::path::Path;

use arima_ao::TimeSeries;
use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{CliError, CliResult};

pub fn read_series(path: &Path) -> CliResult<TimeSeries> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
    parse_series(&bytes)
}

fn is_header(record: &StringRecord) -> bool {
    record.iter().any(|f| f.parse::<f64>().is_err())
}

pub fn parse_series(data: &[u8]) -> CliResult<TimeSeries> {
    let mut reader = ReaderBuilder::new().has_headers(false).flexible(true).trim(Trim::All).from_reader(data);

    let mut width = None;
    let mut start = None;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && is_header(&record) {
            let names: Vec<String> = record.iter().map(str::to_ascii_lowercase).collect();
            width = match names.as_slice() {
                [v] if v == "value" => Some(1),
                [t, v] if t == "t" && v == "value" => Some(2),
                _ => {
                    return Err(CliError::Parse {
                        line,
                        message: format!("expected header \"value\" or \"t,value\", found {:?}", names.join(",")),
                    })
                }
            };
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w || !(1..=2).contains(&w) {
            return Err(CliError::Parse { line, message: format!("expected {w} field(s), found {}", record.len()) });
        }
        let value_field = &record[w - 1];
        let value: f64 = value_field
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| CliError::Parse { line, message: format!("not a finite number: {value_field:?}") })?;
        if w == 2 {
            let t: i64 = record[0].parse().map_err(|_| CliError::Parse {
                line,
                message: format!("time label {:?} is not an integer", &record[0]),
            })?;
            let first = *start.get_or_insert(t);
            if t != first + values.len() as i64 {
                return Err(CliError::Parse {
                    line,
                    message: format!(
                        "time labels must be consecutive; expected {}, found {t}",
                        first + values.len() as i64
                    ),
                });
            }
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::Parse { line: 1, message: "no data rows".into() });
    }
    Ok(TimeSeries::with_start(values, start.unwrap_or(1))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let a = parse_series(b"value\n1.5\n2\n-3e1\n").unwrap();
        assert_eq!((a.values(), a.start()), (&[1.5, 2.0, -30.0][..], 1));
        let b = parse_series(b"1\n2\n").unwrap();
        assert_eq!(b.values(), &[1.0, 2.0]);
        let c = parse_series(b"t,value\n5,1\n6,2\n7,3\n").unwrap();
        assert_eq!((c.start(), c.end()), (5, 7));
        let d = parse_series(b"0, 1.0\n1, 2.0\n").unwrap();
        assert_eq!(d.start(), 0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |data: &[u8]| match parse_series(data) {
            Err(CliError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line(b""), 1);
        assert_eq!(line(b"value\n"), 1);
        assert_eq!(line(b"value\n1\n2\nabc\n"), 4);
        assert_eq!(line(b"value\n1\nNaN\n"), 3);
        assert_eq!(line(b"t,value\n1,2\n3,4\n"), 3);
        assert_eq!(line(b"1\n2,3\n"), 2);
        assert_eq!(line(b"x,y\n1,2\n"), 1);
        assert_eq!(line(b"1,5\n2.5,6\n"), 2);
    }
}
