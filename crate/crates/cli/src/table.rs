//! Numeric CSV tables with trailing `#` comment lines.
//!
//! Values are written with 17 significant digits (`{:.16e}`), which is
//! enough to recover every `f64` exactly, so parse → emit is byte-stable.

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Lines emitted after the data as `# <text>`.
    pub comments: Vec<String>,
}

/// Full-precision rendering used for every data cell.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
            comments: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), CliError> {
        if row.len() != self.header.len() {
            return Err(CliError::Numeric(format!(
                "row has {} fields, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|&x| format_value(x)))
                .map_err(csv_error)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))?;
        let mut out = String::from_utf8(bytes).expect("ascii output");
        for comment in &self.comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (data, comments) = split_trailer(text)?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(data.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(csv_error)?
            .iter()
            .map(String::from)
            .collect();
        let mut table = CsvTable::new(header);
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let row = record
                .iter()
                .map(|field| {
                    field
                        .parse::<f64>()
                        .map_err(|e| CliError::Parse(format!("'{field}': {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table
                .push_row(row)
                .map_err(|e| CliError::Parse(e.to_string()))?;
        }
        table.comments = comments;
        Ok(table)
    }
}

/// Splits off the block of `# ` lines that ends the file.
fn split_trailer(text: &str) -> Result<(String, Vec<String>), CliError> {
    let mut data = String::new();
    let mut comments = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
        } else if !comments.is_empty() {
            return Err(CliError::Parse("data line after comment block".into()));
        } else {
            data.push_str(line);
            data.push('\n');
        }
    }
    Ok((data, comments))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Parse(e.to_string())
}
