//! Fixed 17-significant-digit number formatting for CSV and JSON output.

use serde_json::Value;

/// `d.dddddddddddddddde±x`, or `NaN`/`inf`/`-inf`.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Compact JSON with every float written by [`number`]. Integers are kept
/// as integers; non-finite floats become `null`.
pub fn json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&number(f)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(v, out);
            }
            out.push('}');
        }
    }
}

/// Header row plus one line per row, LF terminated.
pub fn csv(columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| number(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits() {
        assert_eq!(number(1.0), "1.0000000000000000e0");
        assert_eq!(number(-0.1), "-1.0000000000000001e-1");
        assert_eq!(number(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(number(f64::NAN), "NaN");
    }

    #[test]
    fn json_keeps_order_and_integers() {
        let v = json!({"b": 1, "a": [0.5, null, true], "s": "x\"y"});
        assert_eq!(json(&v), r#"{"b":1,"a":[5.0000000000000000e-1,null,true],"s":"x\"y"}"#);
        let parsed: Value = serde_json::from_str(&json(&v)).unwrap();
        assert_eq!(parsed["a"][0], 0.5);
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["t", "x"], &[vec![0.0, 1.0]]);
        assert_eq!(s, "t,x\n0.0000000000000000e0,1.0000000000000000e0\n");
    }
}
