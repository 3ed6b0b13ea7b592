use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use super::RunConfig;

/// 17 significant digits, fixed layout.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON object with `config` first, then `fields` in key order.
pub fn json_report(cfg: &RunConfig, fields: Vec<(&str, Value)>) -> String {
    let mut map = Map::new();
    map.insert(
        "config".into(),
        serde_json::to_value(cfg).expect("config serializes"),
    );
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

/// CSV table with `# key=value` metadata records.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(cfg: &RunConfig) -> Self {
        let mut csv = Self { buf: String::new() };
        csv.meta(
            "config",
            &serde_json::to_string(cfg).expect("config serializes"),
        );
        csv
    }

    pub fn meta(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.buf, "# {key}={value}");
    }

    pub fn header(&mut self, cols: &[&str]) {
        let _ = writeln!(self.buf, "{}", cols.join(","));
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
