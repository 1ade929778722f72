use std::io::IsTerminal;

use serde_json::{json, Value};

/// Result of one command: the JSON document, its human rendering, and whether
/// the checked property was violated.
pub struct Output {
    pub json: Value,
    pub human: Vec<(Tone, String)>,
    pub violated: bool,
}

impl Output {
    pub fn new(command: &str, mut json: Value) -> Self {
        json.as_object_mut()
            .expect("command output is an object")
            .insert("command".into(), command.into());
        Output {
            json,
            human: Vec::new(),
            violated: false,
        }
    }

    pub fn violated(mut self, yes: bool) -> Self {
        self.violated = yes;
        self
    }

    pub fn line(mut self, tone: Tone, text: impl Into<String>) -> Self {
        self.human.push((tone, text.into()));
        self
    }

    pub fn print(&self, json: bool, style: &Style) {
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(&self.json).expect("values serialize")
            );
        } else {
            for (tone, text) in &self.human {
                println!("{}", style.paint(text, *tone));
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Tone {
    Plain,
    Good,
    Bad,
}

pub struct Style {
    color: bool,
}

impl Style {
    /// Color only for human output on a terminal, unless `TUHYPER_NO_COLOR` is set.
    pub fn detect(json: bool) -> Self {
        Style {
            color: !json && std::io::stdout().is_terminal() && std::env::var_os("TUHYPER_NO_COLOR").is_none(),
        }
    }

    pub fn paint(&self, text: &str, tone: Tone) -> String {
        let code = match tone {
            Tone::Plain => return text.to_string(),
            Tone::Good => "32",
            Tone::Bad => "31",
        };
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

pub fn print_error(err: &anyhow::Error, code: u8) {
    let kind = match code {
        3 => "limit",
        4 => "internal",
        _ => "input",
    };
    let doc = json!({
        "command": "error",
        "error": { "kind": kind, "exit_code": code, "message": format!("{err:#}") },
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("values serialize"));
}
