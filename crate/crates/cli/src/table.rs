//! Tabular output as CSV (with `#` provenance lines) or a JSON object.

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => Value::String(format_float(*x)),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Shortest decimal that parses back to the same double; scientific
/// notation outside a readable range.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level JSON fields and `# key=value` CSV lines.
    pub extras: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, config: &ExperimentConfig, format: Format) -> String {
        match format {
            Format::Csv => self.csv(config),
            Format::Json => self.json(config),
        }
    }

    fn csv(&self, config: &ExperimentConfig) -> String {
        let mut out = String::new();
        out.push_str(&format!("# config_hash={}\n", config.hash()));
        out.push_str(&format!("# seed={}\n", config.sim.seed));
        out.push_str(&format!("# shards={}\n", config.sim.shards));
        for (k, v) in &self.extras {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}={text}\n"));
        }
        out.push_str(&format!("# config={}\n", config.to_value()));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, config: &ExperimentConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect::<Map<_, _>>()))
            .collect();
        let mut top = Map::new();
        top.insert("config".into(), config.to_value());
        top.insert("config_hash".into(), Value::String(config.hash()));
        for (k, v) in &self.extras {
            top.insert(k.to_string(), v.clone());
        }
        top.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("table serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0 / 3.0, 1.168e-45, 123456.789, 5e-5, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "ser"]);
        t.push(vec![10usize.into(), 0.25.into()]);
        t.push(vec![20usize.into(), Cell::Text("NOT_REACHED".into())]);
        let text = t.render(&ExperimentConfig::default(), Format::Csv);
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, ["n,ser", "10,0.25", "20,NOT_REACHED"]);
        let json: Value = serde_json::from_str(&t.render(&ExperimentConfig::default(), Format::Json)).unwrap();
        assert_eq!(json["rows"][0]["ser"], 0.25);
        assert!(json["config"].is_object());
    }
}
