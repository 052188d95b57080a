use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use lizkit::solver::Model;

use crate::error::CliError;

/// Numeric CSV with a header row.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    if !path.exists() {
        return Err(CliError::not_found(path));
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| CliError::io(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| parse_error(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(path, e))?;
        let row = record
            .iter()
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| CliError::new("ParseError", format!("{}: row {} is not numeric", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn parse_error(path: &Path, e: csv::Error) -> CliError {
    CliError::new("ParseError", format!("{}: {e}", path.display()))
}

/// Data rows `(location..., y)` of dimension `dim`.
pub fn read_data(path: &Path, dim: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>), CliError> {
    let table = read_table(path)?;
    if table.header.len() != dim + 1 {
        return Err(CliError::new(
            "SchemaMismatch",
            format!("{}: expected {} location columns and y, found {} columns", path.display(), dim, table.header.len()),
        ));
    }
    if table.rows.is_empty() {
        return Err(CliError::new("InvalidInput", format!("{}: no data rows", path.display())));
    }
    let ys = table.rows.iter().map(|r| r[dim]).collect();
    let xs = table.rows.into_iter().map(|mut r| {
        r.truncate(dim);
        r
    });
    Ok((xs.collect(), ys))
}

pub fn write_csv(path: Option<&Path>, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let fail = |e: csv::Error| CliError::new("IoError", e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::new("IoError", e.to_string()))
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_model(path: &Path) -> Result<Model, CliError> {
    if !path.exists() {
        return Err(CliError::not_found(path));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let model: Model = serde_json::from_str(&text).map_err(|e| CliError::new("SchemaMismatch", format!("{}: {e}", path.display())))?;
    model.validate().map_err(|e| CliError::new("SchemaMismatch", format!("{}: {e}", path.display())))?;
    Ok(model)
}

pub fn write_model(path: &Path, model: &Model) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(model).map_err(|e| CliError::new("IoError", e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `dir/stem<suffix>` for the stem of `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn location_header(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["t".into()]
    } else {
        (0..dim).map(|i| format!("x{i}")).collect()
    }
}
