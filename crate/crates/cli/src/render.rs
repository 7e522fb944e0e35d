//! Series formatting and the plain-text rendering of JSON payloads.

use lmsb::arith::poly::format_poly;
use lmsb::arith::{LogSeries, MultiSeries};
use serde_json::Value;

fn wrap(body: String) -> String {
    let inner = body.trim_start_matches('-');
    if inner.contains('+') || inner.contains('-') {
        format!("({body})")
    } else {
        body
    }
}

pub fn series(s: &MultiSeries, names: &[String]) -> String {
    format!("{} + O({})", format_poly(&s.to_poly(), names), s.order() + 1)
}

/// `Σ_k log-monomial_k · series_k`, highest log power first.
pub fn log_series(s: &LogSeries, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (key, comp) in s.components().iter().rev() {
        if comp.is_zero() {
            continue;
        }
        let logs: Vec<String> = key
            .iter()
            .zip(names)
            .filter(|(k, _)| **k > 0)
            .map(|(k, n)| if *k == 1 { format!("log({n})") } else { format!("log({n})^{k}") })
            .collect();
        let body = format_poly(&comp.to_poly(), names);
        parts.push(match (logs.is_empty(), body.as_str()) {
            (true, _) => body,
            (false, "1") => logs.join("*"),
            (false, "-1") => format!("-{}", logs.join("*")),
            (false, b) if !b.chars().any(char::is_alphabetic) => format!("{b}*{}", logs.join("*")),
            (false, _) => format!("{}*{}", logs.join("*"), wrap(body)),
        });
    }
    let mut out = parts.first().cloned().unwrap_or_else(|| "0".into());
    for p in parts.iter().skip(1) {
        match p.strip_prefix('-') {
            Some(rest) => out += &format!(" - {rest}"),
            None => out += &format!(" + {p}"),
        }
    }
    format!("{out} + O({})", s.order() + 1)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_string()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Two aligned columns of dotted keys and values.
pub fn text_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, x)| if k.is_empty() { x.clone() } else { format!("{k:<width$}  {x}") })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use lmsb::arith::q;
    use serde_json::json;

    #[test]
    fn log_terms() {
        let names = vec!["z".to_string()];
        let mut s = LogSeries::log_var(1, 3, 0);
        let mut h = MultiSeries::zero(1, 3);
        h.add_term(vec![1], q(-6));
        h.add_term(vec![2], q(45));
        s.set_component(vec![0], h);
        assert_eq!(log_series(&s, &names), "log(z) - 6*z+45*z^2 + O(4)");
    }

    #[test]
    fn table_alignment() {
        let t = text_table(&json!({"a": "1", "long": {"x": 2}}));
        assert_eq!(t, "a       1\nlong.x  2");
    }
}
