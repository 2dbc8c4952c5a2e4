//! Optional `key=value` config file. Keys are long flag names (`P`, `p`,
//! `auto-q`, `format`, ...). A key is used only if the chosen subcommand has
//! that flag and the command line does not already set it.

use anyhow::{bail, Context, Result};
use clap::{ArgAction, CommandFactory};

use crate::Cli;

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {line:?}", no + 1);
        };
        out.push((k.trim().trim_start_matches("--").to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn already_set(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Appends flags from the config file, if one is given.
pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let entries = parse(&text)?;
    let root = Cli::command();
    let sub_name = argv
        .iter()
        .skip(1)
        .find(|a| root.find_subcommand(a.as_str()).is_some())
        .cloned();
    let sub = sub_name.as_deref().and_then(|s| root.find_subcommand(s));
    let known_anywhere = |key: &str| {
        root.get_arguments().any(|a| a.get_long() == Some(key))
            || root.get_subcommands().any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)))
    };
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        if !known_anywhere(&key) {
            bail!("unknown config key {key:?} in {path}");
        }
        let arg = root
            .get_arguments()
            .chain(sub.into_iter().flat_map(|s| s.get_arguments()))
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else { continue };
        if already_set(&argv, &key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => argv.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => bail!("config key {key:?} expects true or false, got {value:?}"),
            },
            _ => argv.push(format!("--{key}={value}")),
        }
    }
    Ok(argv)
}
