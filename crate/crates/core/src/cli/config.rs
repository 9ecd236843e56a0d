//! Line-oriented `key = value` config files.
//!
//! Keys are the long flag names of the subcommand (`min-seg` and `min_seg`
//! are the same key); blank lines and lines starting with `#` are ignored.
//! A `key = value` entry is turned into `--key value` ahead of the
//! command-line flags, so flags given explicitly win.

use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;

pub type ConfigFile = BTreeMap<String, String>;

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let mut out = ConfigFile::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "config line {}: expected 'key = value'",
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", lineno + 1)));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(CliError::usage(format!(
                "config line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

/// Turns config entries into argv fragments. `flags` are the subcommand's
/// valued options, `switches` its boolean ones; `positional` names the
/// positional argument, which is only taken from the file when absent from
/// the command line.
pub fn to_args(
    config: &ConfigFile,
    flags: &[String],
    switches: &[String],
    positional: Option<(&str, bool)>,
) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (key, value) in config {
        if let Some((name, given)) = positional {
            if key == name {
                if !given {
                    out.push(value.clone());
                }
                continue;
            }
        }
        if switches.contains(key) {
            match value.as_str() {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                other => {
                    return Err(CliError::usage(format!(
                        "config key '{key}': expected true or false, got '{other}'"
                    )))
                }
            }
        } else if flags.contains(key) {
            out.push(format!("--{key}"));
            out.push(value.clone());
        } else {
            return Err(CliError::usage(format!("unknown config key '{key}'")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let c = parse("# comment\n\ngamma = 2\nmin_seg=12\n").unwrap();
        assert_eq!(c["gamma"], "2");
        assert_eq!(c["min-seg"], "12");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse("gamma 2\n").is_err());
        assert!(parse("gamma = 1\ngamma = 2\n").is_err());
    }

    #[test]
    fn unknown_key_is_usage_error() {
        let c = parse("bogus = 1\n").unwrap();
        let err = to_args(&c, &["gamma".into()], &[], None).unwrap_err();
        assert_eq!(err.code, super::super::EXIT_USAGE);
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn positional_only_when_absent() {
        let c = parse("input = a.csv\ngamma = 2\n").unwrap();
        let flags = vec!["gamma".to_string()];
        assert_eq!(
            to_args(&c, &flags, &[], Some(("input", false))).unwrap(),
            vec!["--gamma", "2", "a.csv"]
        );
        assert_eq!(
            to_args(&c, &flags, &[], Some(("input", true))).unwrap(),
            vec!["--gamma", "2"]
        );
    }
}
