//! One JSON document per run.
//!
//! Determinism is part of the interface: the same command on the same files
//! must print byte-identical output. So floats render in a fixed scientific
//! form with 17 significant digits, object keys come out sorted (serde_json's
//! map is a BTreeMap), and nothing time- or host-dependent is ever emitted.

use discrepancy_kit::ComplexMatrix;
use serde_json::{json, Value};
use std::fmt::Write as _;

/// Wraps a float for the report, downgrading non-finite values to strings
/// (JSON has no inf/nan and a failed campaign may report an infinite margin).
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Matrices are echoed in the same shape the input parser accepts, so any
/// matrix in a report can be fed straight back in as a file.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| {
                        let z = m[(i, j)];
                        json!([num(z.re), num(z.im)])
                    })
                    .collect(),
            )
        })
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "data": rows})
}

pub struct Report {
    status: &'static str,
    exit: i32,
    inputs: Vec<(String, String)>,
    seed: Option<u64>,
    payload: Value,
}

impl Report {
    pub fn new(
        status: &'static str,
        exit: i32,
        inputs: Vec<(String, String)>,
        seed: Option<u64>,
        payload: Value,
    ) -> Self {
        Self {
            status,
            exit,
            inputs,
            seed,
            payload,
        }
    }

    /// Prints the document on stdout and hands back the process exit code.
    pub fn print(self, atol: f64, rtol: f64) -> i32 {
        let command: Vec<Value> = std::env::args().skip(1).map(Value::String).collect();
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|(path, digest)| json!({"path": path, "sha256": digest}))
            .collect();
        let generator = match self.seed {
            Some(seed) => json!({"name": "chacha8", "seed": seed}),
            None => Value::Null,
        };
        let doc = json!({
            "schema": "discrepancy-kit/1",
            "command": command,
            "inputs": inputs,
            "generator": generator,
            "tolerance": {"atol": num(atol), "rtol": num(rtol)},
            "status": self.status,
            "payload": self.payload,
        });
        let mut text = String::new();
        write_value(&mut text, &doc);
        text.push('\n');
        print!("{text}");
        self.exit
    }
}

// Fixed-format writer. serde_json's own serializer would do fine except the
// float representation has to be pinned down to the last digit.
fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(true) => out.push_str("true"),
        Value::Bool(false) => out.push_str("false"),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let x = n.as_f64().expect("serde_json numbers are u64, i64, or f64");
                write!(out, "{x:.16e}").unwrap();
            }
        }
        Value::String(s) => push_escaped(out, s),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_escaped(out, key);
                out.push(':');
                write_value(out, val);
            }
            out.push('}');
        }
    }
}

fn push_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_render_with_seventeen_significant_digits() {
        let mut s = String::new();
        write_value(&mut s, &json!(2.0));
        assert_eq!(s, "2.0000000000000000e0");

        let mut s = String::new();
        write_value(&mut s, &json!(-1.5e-13));
        assert_eq!(s, "-1.4999999999999999e-13");
        assert_eq!(s.parse::<f64>().unwrap(), -1.5e-13);
    }

    #[test]
    fn rendered_reports_parse_back_as_json() {
        let doc = json!({
            "a": [1.0, 2.5e-300, -0.0],
            "b": {"nested": "quote \" and \\ backslash"},
            "c": null,
            "d": true,
            "e": 12345u64,
        });
        let mut s = String::new();
        write_value(&mut s, &doc);
        let parsed: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["a"][0], json!(1.0));
        assert_eq!(parsed["b"]["nested"], json!("quote \" and \\ backslash"));
        assert_eq!(parsed["e"], json!(12345u64));
    }

    #[test]
    fn non_finite_values_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(3.0), json!(3.0));
    }
}
