use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parse a `key = value` file into `--key value` arguments.
///
/// Blank lines and `#` comments are skipped. A value of `true` becomes a bare
/// `--key` switch and `false` drops the key.
pub fn config_args(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key = value", lineno + 1);
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key.starts_with('-') {
            bail!("line {}: bad key {key:?}", lineno + 1);
        }
        if key == "config" {
            bail!("line {}: config files cannot include other config files", lineno + 1);
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// Where config arguments go: right after the deepest subcommand name, so
/// that flags given on the command line come later and win.
pub fn insertion_point(argv: &[String], subcommands: &[&str]) -> usize {
    let mut pos = 0;
    for name in subcommands {
        if let Some(k) = argv.iter().skip(pos + 1).position(|a| a == name) {
            pos += 1 + k;
        }
    }
    pos + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_switches() {
        let args = parse("# scan\nbasis = 20\nfix=a=0\n\nnu_max = 3 # trailing\nverbose = true\nquiet = false\n").unwrap();
        assert_eq!(args, ["--basis", "20", "--fix", "a=0", "--nu-max", "3", "--verbose"]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("basis 20").is_err());
        assert!(parse("= 3").is_err());
        assert!(parse("config = other.cfg").is_err());
    }

    #[test]
    fn inserts_after_nested_subcommand() {
        let argv: Vec<String> = ["radial-qes", "--format", "json", "physical", "continuity", "--k", "1"]
            .map(String::from)
            .into();
        assert_eq!(insertion_point(&argv, &["physical", "continuity"]), 5);
        assert_eq!(insertion_point(&argv, &["physical"]), 4);
    }
}
