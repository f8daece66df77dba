//! Records CSV: `name,family,quality,<indicator columns...>`.
//!
//! Lines starting with `#` are comments. An empty indicator cell means the
//! indicator was not reported for that model.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use costlens_core::analysis::{Indicator, ModelRecord};

use crate::error::CliError;
use crate::format::sig6;

const FIXED_COLUMNS: [&str; 3] = ["name", "family", "quality"];

/// Indicator id, or one of the unit-bearing aliases used in reported tables.
pub fn indicator_from_column(name: &str) -> Option<Indicator> {
    let lower = name.trim().to_ascii_lowercase();
    if let Ok(i) = lower.parse() {
        return Some(i);
    }
    match lower.as_str() {
        "gflops" | "flop" => Some(Indicator::Flops),
        "msec/img" | "msec/example" | "msec" => Some(Indicator::Latency),
        "examples/sec" => Some(Indicator::Throughput),
        "mac_bytes" => Some(Indicator::Mac),
        "carbon_kg" | "co2e" => Some(Indicator::Carbon),
        "dollars" | "monetary" => Some(Indicator::Cost),
        _ => None,
    }
}

pub fn read_records(source: &str, reader: impl Read) -> Result<Vec<ModelRecord>, CliError> {
    let schema = |message: String| CliError::Schema {
        path: source.to_string(),
        message,
    };
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| schema(format!("unreadable header: {e}")))?
        .clone();
    for (i, want) in FIXED_COLUMNS.iter().enumerate() {
        if header.get(i) != Some(want) {
            return Err(schema(format!(
                "column {} must be '{want}' (header is '{}')",
                i + 1,
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut columns = Vec::new();
    let mut seen = BTreeSet::new();
    for name in header.iter().skip(FIXED_COLUMNS.len()) {
        let indicator = indicator_from_column(name)
            .ok_or_else(|| schema(format!("unknown indicator column '{name}'")))?;
        if !seen.insert(indicator) {
            return Err(schema(format!("indicator '{indicator}' appears twice")));
        }
        columns.push(indicator);
    }
    if columns.is_empty() {
        return Err(schema("no indicator columns".into()));
    }

    let mut records = Vec::new();
    let mut names = BTreeSet::new();
    for row in csv.records() {
        let row = row.map_err(|e| schema(e.to_string()))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let number = |cell: &str, what: &str| -> Result<f64, CliError> {
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| schema(format!("line {line}: {what} '{cell}' is not a finite number")))
        };
        let name = row.get(0).unwrap_or_default();
        if name.is_empty() {
            return Err(schema(format!("line {line}: empty model name")));
        }
        if !names.insert(name.to_string()) {
            return Err(schema(format!("line {line}: duplicate model '{name}'")));
        }
        let family = row.get(1).filter(|f| !f.is_empty()).map(str::to_string);
        let quality = number(row.get(2).unwrap_or_default(), "quality")?;
        let mut indicators = BTreeMap::new();
        for (cell, &indicator) in row.iter().skip(FIXED_COLUMNS.len()).zip(&columns) {
            if !cell.is_empty() {
                indicators.insert(indicator, number(cell, indicator.id())?);
            }
        }
        let record = ModelRecord::new(name, family, quality, indicators)
            .map_err(|e| schema(format!("line {line}: {e}")))?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_records(records: &[ModelRecord]) -> String {
    let present: BTreeSet<Indicator> = records
        .iter()
        .flat_map(|r| r.indicators.keys().copied())
        .collect();
    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = FIXED_COLUMNS.to_vec();
    header.extend(present.iter().map(|i| i.id()));
    out.write_record(&header).expect("in-memory write");
    for r in records {
        let mut row = vec![
            r.name.clone(),
            r.family.clone().unwrap_or_default(),
            sig6(r.quality),
        ];
        row.extend(present.iter().map(|i| r.value(*i).map(sig6).unwrap_or_default()));
        out.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(out.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<Vec<ModelRecord>, CliError> {
        read_records("test.csv", text.as_bytes())
    }

    #[test]
    fn parses_comments_aliases_and_gaps() {
        let rs = read("# units: M params, msec\nname,family,quality,params,msec/img\na,x,1.5,10,\nb,,2,20,0.3\n")
            .unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].value(Indicator::Latency), None);
        assert_eq!(rs[1].family, None);
        assert_eq!(rs[1].value(Indicator::Latency), Some(0.3));
    }

    #[test]
    fn schema_errors() {
        let err = read("name,family,params\na,x,1\n").unwrap_err();
        assert!(err.to_string().contains("'quality'"), "{err}");
        let err = read("name,family,quality,bogus\na,x,1,2\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = read("name,family,quality,params\na,x,1,abc\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = read("name,family,quality,params\na,x,1,1\na,x,1,2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn write_then_read() {
        let rs = read("name,family,quality,latency,params\na,x,1.25,0.5,10\nb,y,2,,20\n").unwrap();
        let text = write_records(&rs);
        assert_eq!(text, "name,family,quality,params,latency\na,x,1.25,10,0.5\nb,y,2,20,\n");
        assert_eq!(read(&text).unwrap(), rs);
    }
}
