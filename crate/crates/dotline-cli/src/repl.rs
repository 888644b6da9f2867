//! The interactive session: reads command lines, splits them
//! shell-style, and feeds them through the same parser and executor as
//! one-shot invocations — which is what keeps the two modes identical.

use std::io::{BufRead, IsTerminal, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::session::{CmdError, Session};
use crate::Cli;

/// Splits a line like a minimal shell: whitespace separates tokens;
/// single or double quotes group text (and may open mid-token); there are
/// no escape sequences. Double quotes are the way to pass expressions
/// containing single-quoted literals.
pub fn split_line(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_token = false;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '\'' | '"' => {
                in_token = true;
                loop {
                    match chars.next() {
                        None => return Err(format!("unterminated {c} quote")),
                        Some(d) if d == c => break,
                        Some(d) => current.push(d),
                    }
                }
            }
            c if c.is_whitespace() => {
                if in_token {
                    tokens.push(std::mem::take(&mut current));
                    in_token = false;
                }
            }
            c => {
                in_token = true;
                current.push(c);
            }
        }
    }
    if in_token {
        tokens.push(current);
    }
    Ok(tokens)
}

fn dispatch(session: &mut Session, line: &str) -> Result<String, CmdError> {
    let tokens = split_line(line).map_err(CmdError::Usage)?;
    let parsed = Cli::try_parse_from(std::iter::once("dotline".to_owned()).chain(tokens));
    match parsed {
        Ok(cli) => session.execute(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            Ok(e.to_string())
        }
        Err(e) => Err(CmdError::Usage(e.to_string())),
    }
}

/// Reads commands from stdin until EOF or `exit`/`quit`. Blank lines and
/// `#` comments are skipped. Errors are reported and the session
/// continues; the prompt appears only on a terminal, so piped scripts
/// produce clean output.
pub fn run(session: &mut Session) -> ExitCode {
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("dotline> ");
            let _ = std::io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "exit" || line == "quit" {
            break;
        }
        match dispatch(session, line) {
            Ok(output) => print!("{output}"),
            Err(e) => eprintln!("{}", session.paint_error(&e)),
        }
    }
    ExitCode::SUCCESS
}
