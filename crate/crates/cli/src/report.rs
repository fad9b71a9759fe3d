//! Reports are built once as JSON and rendered to text from the same value,
//! so both formats always carry identical numbers.

use serde_json::{json, Map, Value};
use trustlp::format::render_rational;
use trustlp::game::Table;
use trustlp::{Rational, Scalar};

pub struct Report {
    fields: Map<String, Value>,
    decimal: bool,
}

impl Report {
    pub fn new(command: &str, q: usize, decimal: bool) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(1));
        fields.insert("command".into(), json!(command));
        fields.insert("q".into(), json!(q));
        Report { fields, decimal }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    /// Exact value, followed by `<key>_decimal` when decimals are on.
    pub fn number(&mut self, key: &str, value: &Rational) {
        self.fields.insert(key.into(), rational(value));
        if self.decimal {
            self.fields.insert(format!("{key}_decimal"), decimal(value));
        }
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }
}

pub fn rational(value: &Rational) -> Value {
    Value::String(render_rational(value))
}

pub fn decimal(value: &Rational) -> Value {
    let x = (value.to_f64() * 1e6).round() / 1e6;
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Rows of a square table.
pub fn table(t: &Table<Rational>) -> Value {
    Value::Array(
        (0..t.size())
            .map(|r| Value::Array(t.row(r).iter().map(rational).collect()))
            .collect(),
    )
}

pub fn vector(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(rational).collect())
}

/// 1-based labels.
pub fn labels(indices: &[usize]) -> Value {
    Value::Array(indices.iter().map(|i| json!(i + 1)).collect())
}

pub fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = value {
        write_object(&mut out, map, 0);
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Lists of 1-based labels, as opposed to matrix rows of exact numbers.
fn is_label_list(v: &Value) -> bool {
    v.as_array()
        .is_some_and(|items| items.iter().all(Value::is_u64))
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    let pad = " ".repeat(indent);
    for (key, value) in map {
        if key.ends_with("_decimal") && map.contains_key(key.trim_end_matches("_decimal")) {
            continue;
        }
        match value {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{key}:\n"));
                write_object(out, inner, indent + 2);
            }
            Value::Array(items) if items.is_empty() => {
                out.push_str(&format!("{pad}{key}: (none)\n"));
            }
            Value::Array(items) if items.iter().all(is_label_list) => {
                let groups: Vec<String> =
                    items.iter().map(|g| format!("{{{}}}", scalar(g))).collect();
                out.push_str(&format!("{pad}{key}: {}\n", groups.join(" ")));
            }
            Value::Array(items) if items.iter().all(|v| matches!(v, Value::Array(_))) => {
                out.push_str(&format!("{pad}{key}:\n"));
                let rows: Vec<Vec<String>> = items
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .map_or_else(Vec::new, |r| r.iter().map(scalar).collect())
                    })
                    .collect();
                write_grid(out, None, &rows, indent + 2);
            }
            Value::Array(items) if !items.is_empty() && items.iter().all(|v| v.is_object()) => {
                out.push_str(&format!("{pad}{key}:\n"));
                let header: Vec<String> = items[0].as_object().unwrap().keys().cloned().collect();
                let rows: Vec<Vec<String>> = items
                    .iter()
                    .map(|item| header.iter().map(|h| scalar(&item[h])).collect())
                    .collect();
                write_grid(out, Some(&header), &rows, indent + 2);
            }
            Value::Array(items) if items.iter().all(is_scalar) => {
                out.push_str(&format!("{pad}{key}: {}\n", scalar(value)));
            }
            _ => {
                let mut line = format!("{pad}{key}: {}", scalar(value));
                if let Some(d) = map.get(&format!("{key}_decimal")) {
                    line.push_str(&format!("  (~ {})", scalar(d)));
                }
                out.push_str(&line);
                out.push('\n');
            }
        }
    }
}

fn write_grid(out: &mut String, header: Option<&[String]>, rows: &[Vec<String>], indent: usize) {
    let cols = rows
        .iter()
        .map(Vec::len)
        .chain(header.map(<[String]>::len))
        .max()
        .unwrap_or(0);
    let mut width = vec![0; cols];
    for row in rows.iter().map(Vec::as_slice).chain(header) {
        for (c, cell) in row.iter().enumerate() {
            width[c] = width[c].max(cell.chars().count());
        }
    }
    let pad = " ".repeat(indent);
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:>w$}", w = width[c]))
            .collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    if let Some(h) = header {
        out.push_str(&line(h));
    }
    for row in rows {
        out.push_str(&line(row));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_follows_json() {
        let mut r = Report::new("sgv", 2, true);
        r.number("sgv", &Rational::ratio(3, 2));
        r.set("kernel", table(&Table::identity(2)));
        r.set("cover", json!([[1, 3], [2]]));
        r.set("none", json!([]));
        r.set(
            "steps",
            json!([{"k": 1, "epsilon": "1/10"}, {"k": 10, "epsilon": "1/100"}]),
        );
        let v = r.into_value();
        assert_eq!(v["sgv"], json!("3/2"));
        assert_eq!(v["sgv_decimal"], json!(1.5));
        let text = to_text(&v);
        assert!(text.contains("sgv: 3/2  (~ 1.5)"));
        assert!(text.contains("  1  0\n  0  1\n"));
        assert!(text.contains("cover: {1 3} {2}\n"));
        assert!(text.contains("none: (none)\n"));
        assert!(text.contains("   k  epsilon\n   1     1/10\n  10    1/100\n"));
    }
}
