use crate::error::{CliError, CliResult};

/// A numeric CSV table whose first column is strictly increasing time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// Rows restricted to `names`, in that order.
    pub fn select(&self, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.index(n).ok_or_else(|| CliError::Trajectory(format!("missing column `{n}`"))))
            .collect::<CliResult<_>>()?;
        Ok(self.rows.iter().map(|r| idx.iter().map(|&k| r[k]).collect()).collect())
    }
}

/// Parses a trajectory CSV: a header row naming unique columns, the first
/// being `t`, then at least two rows of finite numbers with increasing `t`.
pub fn parse_trajectory(text: &str) -> CliResult<TrajectoryTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Trajectory(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if columns.first().map(String::as_str) != Some("t") {
        return Err(CliError::Trajectory("first column must be `t`".into()));
    }
    for (i, c) in columns.iter().enumerate() {
        if c.is_empty() {
            return Err(CliError::Trajectory(format!("column {} has an empty name", i + 1)));
        }
        if columns[..i].contains(c) {
            return Err(CliError::Trajectory(format!("duplicate column `{c}`")));
        }
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Trajectory(e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(k, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Trajectory(format!(
                    "row {}: column `{}` is not a finite number: {field:?}",
                    line + 1,
                    columns[k]
                ))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(CliError::Trajectory("need at least two rows".into()));
    }
    if let Some(k) = rows.windows(2).position(|w| !(w[1][0] > w[0][0])) {
        return Err(CliError::Trajectory(format!("`t` is not strictly increasing at row {}", k + 2)));
    }
    Ok(TrajectoryTable { columns, rows })
}
