//! Artifact writing with stable formatting.
//!
//! Every float a report carries goes through 6-significant-digit rounding
//! first, so a given config and input always produce byte-identical files.
//! The manifest written last names each artifact together with a hash of
//! the effective config.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Formats with 6 significant digits: positional notation while the
/// exponent is moderate, scientific beyond that. Non-finite values print
/// as `inf`, `-inf`, `nan`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Let the formatter round to 6 significant digits, then reshape.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("{:e} always carries an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-4..6).contains(&exp) {
        let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{trimmed}e{exp}");
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 6);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        let frac = digits[int_len..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

/// JSON number rounded to the value `sig6` prints, so JSON and CSV agree.
/// Non-finite values become `null` (JSON has no infinities).
pub fn round6(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::from(sig6(x).parse::<f64>().expect("sig6 emits parseable floats"))
}

pub fn opt_round6(x: Option<f64>) -> Value {
    x.map_or(Value::Null, round6)
}

/// An output directory collecting artifacts for one command run.
pub struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Writes `manifest.json` listing every artifact emitted so far plus
    /// the effective config and its hash. Call once, last.
    pub fn finish(mut self, command: &str, config: &Value) -> Result<()> {
        self.files.sort();
        let manifest = serde_json::json!({
            "command": command,
            "config_hash": config_hash(config),
            "files": self.files,
            "config": config,
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

/// Hex SHA-256 of the compact JSON form of the effective config. Object
/// keys serialize sorted, so semantically equal configs hash equal.
pub fn config_hash(config: &Value) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_positional_forms() {
        assert_eq!(sig6(305.4413), "305.441");
        assert_eq!(sig6(-0.48523456), "-0.485235");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(123456.0), "123456");
        assert_eq!(sig6(0.000123456789), "0.000123457");
    }

    #[test]
    fn sig6_carries_into_next_decade() {
        assert_eq!(sig6(999.9999), "1000");
        assert_eq!(sig6(9.999999e5), "1e6");
    }

    #[test]
    fn sig6_scientific_beyond_window() {
        assert_eq!(sig6(1.234567e7), "1.23457e7");
        assert_eq!(sig6(-3.0e-5), "-3e-5");
    }

    #[test]
    fn sig6_non_finite_names() {
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
        assert_eq!(sig6(f64::INFINITY), "inf");
        assert_eq!(sig6(f64::NAN), "nan");
    }

    #[test]
    fn round6_matches_sig6_text() {
        let v = round6(1.0 / 3.0);
        assert_eq!(serde_json::to_string(&v).unwrap(), "0.333333");
        assert_eq!(round6(f64::INFINITY), Value::Null);
    }

    #[test]
    fn config_hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"a":1,"b":2}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"b":2,"a":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
    }
}
