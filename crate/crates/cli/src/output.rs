use serde_json::Value;

use density_lab::experiment::OutputFormat;
use density_lab::rational;
use density_lab::regions::ScanReport;

pub fn emit(value: &Value, format: OutputFormat) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(value).expect("value serializes")),
        OutputFormat::Csv => print!("{}", field_csv(value)),
    }
}

/// `field,value` rows with dotted paths; array elements are indexed.
fn field_csv(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", value, &mut rows);
    let mut out = String::from("field,value\n");
    for (k, v) in rows {
        out += &format!("{k},{}\n", quote(&v));
    }
    out
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("a,b,c,d,case,inverts,sigma_valid,solver_feasible,on_grid\n");
    for row in &report.disagreements {
        let [a, b, c, d] = row.profile.as_array().map(|r| rational::format(&r));
        let case = serde_json::to_value(row.formula_case).expect("case serializes");
        out += &format!(
            "{a},{b},{c},{d},{},{},{},{},{}\n",
            case.as_str().unwrap_or_default(),
            row.inverts,
            row.sigma_valid,
            row.solver_feasible,
            row.on_grid
        );
    }
    out
}
