//! Reading samples from text and CSV files.

use std::path::Path;

use tailtest_core::statistic::Sample;

use crate::error::{CliError, CliResult};

/// A loaded sample together with the raw bytes it came from.
#[derive(Debug, Clone)]
pub struct LoadedSample {
    pub sample: Sample,
    pub bytes: Vec<u8>,
}

/// Reads one number per line (blank lines and `#` comments skipped), or the
/// named column of a CSV file with a header row.
pub fn ingest_sample(path: &Path, column: Option<&str>) -> CliResult<LoadedSample> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
    let values = match column {
        Some(name) => parse_column(&bytes, name, path)?,
        None => parse_lines(&bytes, path)?,
    };
    if values.is_empty() {
        return Err(CliError::Input(format!("{}: no sample values", path.display())));
    }
    let sample = Sample::new(values).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(LoadedSample { sample, bytes })
}

fn parse_number(text: &str, line: u64, path: &Path) -> CliResult<f64> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Input(format!(
            "{} line {line}: cannot parse {:?} as a finite number",
            path.display(),
            text.trim()
        ))),
    }
}

pub fn parse_lines(bytes: &[u8], path: &Path) -> CliResult<Vec<f64>> {
    let text =
        std::str::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        values.push(parse_number(trimmed, i as u64 + 1, path)?);
    }
    Ok(values)
}

fn parse_column(bytes: &[u8], name: &str, path: &Path) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(bytes);
    let headers = reader.headers().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?.clone();
    let index = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Input(format!("{}: no column named {name:?}", path.display())))?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record
            .get(index)
            .ok_or_else(|| CliError::Input(format!("{} line {line}: missing column {name:?}", path.display())))?;
        values.push(parse_number(field, line, path)?);
    }
    Ok(values)
}

/// `(x, F)` knots from a CSV file with header `x,F`.
pub fn read_table(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
    let xs = parse_column(&bytes, "x", path)?;
    let fs = parse_column(&bytes, "F", path)?;
    Ok((xs, fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn plain_lines_with_comments() {
        let f = file("1.0\n2.5\n# note\n\n3.0");
        assert_eq!(ingest_sample(f.path(), None).unwrap().sample.values(), &[1.0, 2.5, 3.0]);
    }

    #[test]
    fn csv_column() {
        let f = file("x,y\n1,10\n2,20\n");
        assert_eq!(ingest_sample(f.path(), Some("x")).unwrap().sample.values(), &[1.0, 2.0]);
        assert_eq!(ingest_sample(f.path(), Some("y")).unwrap().sample.values(), &[10.0, 20.0]);
        assert!(ingest_sample(f.path(), Some("z")).is_err());
    }

    #[test]
    fn errors_cite_lines() {
        let f = file("1.0\nabc\n");
        let msg = ingest_sample(f.path(), None).unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let f = file("x\n1\nnope\n");
        let msg = ingest_sample(f.path(), Some("x")).unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
        let f = file("# only a comment\n\n");
        assert!(ingest_sample(f.path(), None).is_err());
    }
}
