//! CSV tables with a commented provenance header.
//!
//! Every file starts with `#` lines carrying the tool version, the command
//! line that produced it and the full configuration as TOML. Stripping the
//! `# ` prefix from the config block yields a file that reproduces the data.

use std::fmt::Write as _;

use crate::config::ScenarioConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const CONFIG_MARKER: &str = "# config:";
const CONFIG_END: &str = "# end config";

/// Floats at twelve significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn float_list(xs: &[f64]) -> String {
    xs.iter().map(|x| float(*x)).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Renders the header and the table as one CSV document.
pub fn render(command: &str, seed: u64, config: &ScenarioConfig, table: &Table) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "# ramix {VERSION}").unwrap();
    writeln!(out, "# command: {command}").unwrap();
    writeln!(out, "# seed: {seed}").unwrap();
    writeln!(out, "{CONFIG_MARKER}").unwrap();
    for line in config.to_toml().lines() {
        writeln!(out, "# {line}").unwrap();
    }
    writeln!(out, "{CONFIG_END}").unwrap();

    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        writer.write_record(row).map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

/// Recovers the echoed configuration from a rendered document.
pub fn config_from_header(doc: &str) -> Result<ScenarioConfig, CliError> {
    let mut lines = doc.lines().skip_while(|l| *l != CONFIG_MARKER);
    if lines.next().is_none() {
        return Err(CliError::Config("no config block in header".into()));
    }
    let text: Vec<&str> = lines
        .take_while(|l| *l != CONFIG_END)
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect();
    ScenarioConfig::from_toml(&text.join("\n"))
}

/// Parses the data part of a rendered document.
pub fn parse_table(doc: &str) -> Result<Table, CliError> {
    let data: String = doc
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(data.as_bytes());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let columns = reader.headers().map_err(io)?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(float(1.0), "1.00000000000e0");
        assert_eq!(float(-0.000123456789012345), "-1.23456789012e-4");
    }

    #[test]
    fn header_round_trip() {
        let mut cfg = ScenarioConfig {
            seed: 17,
            ..ScenarioConfig::default()
        };
        cfg.users.n_near = 4;
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![float(1.5), "x".into()]);
        let doc = render("optimize", 17, &cfg, &t).unwrap();
        assert!(doc.starts_with("# ramix "));
        assert_eq!(config_from_header(&doc).unwrap(), cfg);
        assert_eq!(parse_table(&doc).unwrap(), t);
    }
}
