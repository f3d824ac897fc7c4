//! P-value files: one score per row, optionally preceded by an id column and
//! a header row.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Scores {
    pub ids: Vec<String>,
    pub values: Vec<f64>,
}

impl Scores {
    /// Maps an id as written by the user to a 0-based index.
    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }
}

pub fn read_scores(path: &Path) -> CliResult<Scores> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_scores(file, path)
}

pub fn parse_scores(reader: impl std::io::Read, path: &Path) -> CliResult<Scores> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut width = None;
    let parse_err = |line: u64, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let n = record.len();
        if n > 2 {
            return Err(parse_err(line, format!("expected 1 or 2 columns, found {n}")));
        }
        if *width.get_or_insert(n) != n {
            return Err(parse_err(line, format!("expected {} columns, found {n}", width.unwrap_or(n))));
        }
        let field = &record[n - 1];
        let value = match field.parse::<f64>() {
            Ok(v) => v,
            // a header is only allowed before the first score
            Err(_) if values.is_empty() && ids.is_empty() && row == 0 => continue,
            Err(_) => return Err(parse_err(line, format!("'{field}' is not a number"))),
        };
        if !(0.0..=1.0).contains(&value) {
            return Err(parse_err(line, format!("{value} is not a p-value in [0, 1]")));
        }
        let id = if n == 2 { record[0].to_string() } else { (values.len() + 1).to_string() };
        ids.push(id);
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::Parse { path: path.to_path_buf(), line: 0, message: "no p-values found".into() });
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(CliError::Usage(format!("{}: duplicate id '{dup}'", path.display())));
    }
    Ok(Scores { ids, values })
}
