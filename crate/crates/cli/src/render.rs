use serde_json::Value;

/// One `path = value` line per leaf, keys in sorted order.
pub fn text(doc: &Value) -> String {
    let mut out = String::new();
    walk(doc, String::new(), &mut out);
    out
}

fn walk(v: &Value, path: String, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(x, p, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        other => out.push_str(&format!("{path} = {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens() {
        let doc = json!({"b": {"x": [1, 2]}, "a": "1/2", "c": [{"y": null}]});
        assert_eq!(text(&doc), "a = 1/2\nb.x = [1,2]\nc[0].y = null\n");
    }
}
