//! Measure name parsing and small output helpers.

use std::path::Path;

use fairopt::measures::{validate_weight, MeasureKind};

use crate::error::CliError;

fn squash(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase()
}

/// Accepts the JSON tag (`gini_deviation`), the tag without its
/// `_deviation` suffix (`max_pairwise`), the short name (`GD`),
/// `order_based:[w…]`, `envy:c`, or a full JSON object.
pub fn parse_measure(s: &str) -> Result<MeasureKind, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("bad measure JSON: {e}"));
    }
    if let Some((name, arg)) = s.split_once(':') {
        return match squash(name).as_str() {
            "orderbased" => {
                let w: Vec<f64> = serde_json::from_str(arg).map_err(|e| format!("bad weight list: {e}"))?;
                validate_weight(&w).map(MeasureKind::OrderBased).map_err(|e| e.to_string())
            }
            "envy" => {
                let c: f64 = arg.parse().map_err(|_| format!("bad envy coefficient `{arg}`"))?;
                MeasureKind::envy(c).map_err(|e| e.to_string())
            }
            _ => Err(format!("unknown parameterized measure `{name}`")),
        };
    }
    let key = squash(s);
    let mut known: Vec<MeasureKind> = MeasureKind::table().to_vec();
    known.push(MeasureKind::RawlsianGap);
    if key == "envy" {
        return MeasureKind::envy(1.0).map_err(|e| e.to_string());
    }
    known
        .into_iter()
        .find(|k| {
            let tag = k.tag();
            [tag, tag.trim_end_matches("_deviation"), k.short_name()].iter().any(|c| squash(c) == key)
        })
        .ok_or_else(|| format!("unknown measure `{s}`"))
}

/// Compact number formatting for tables.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if (v - v.round()).abs() < 1e-9 * v.abs().max(1.0) {
        return format!("{}", v.round());
    }
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn fmt_vec(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", "))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
