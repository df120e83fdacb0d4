// SPDX-License-Identifier: Apache-2.0

//! ISCAS'85 `.bench` netlists.

use std::collections::HashMap;
use std::fmt::Write as _;

use septimate_core::netlist::{Circuit, CircuitBuilder, GateKind, NetlistError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported gate kind `{kind}`")]
    UnsupportedGate { line: usize, kind: String },
    #[error("line {line}: sequential element `{kind}` in a combinational netlist")]
    Sequential { line: usize, kind: String },
    #[error("line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: NetlistError,
    },
    #[error("{0}")]
    Circuit(#[from] NetlistError),
}

impl BenchError {
    /// 1-based source line of the error, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            BenchError::Syntax { line, .. }
            | BenchError::UnsupportedGate { line, .. }
            | BenchError::Sequential { line, .. }
            | BenchError::Structure { line, .. } => Some(*line),
            BenchError::Circuit(_) => None,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '=' | '#'))
}

/// Splits `KEYWORD(args)` into the keyword and comma-separated arguments.
fn call(line: usize, text: &str) -> Result<(&str, Vec<&str>), BenchError> {
    let open = text
        .find('(')
        .ok_or_else(|| syntax(line, format!("expected `(` in `{text}`")))?;
    let rest = text[open + 1..].trim_end();
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| syntax(line, format!("expected `)` at end of `{text}`")))?;
    let keyword = text[..open].trim();
    if !is_name(keyword) {
        return Err(syntax(line, format!("malformed keyword `{keyword}`")));
    }
    let args: Vec<&str> = inner.split(',').map(str::trim).collect();
    if let Some(bad) = args.iter().find(|a| !is_name(a)) {
        return Err(syntax(line, format!("malformed signal name `{bad}`")));
    }
    Ok((keyword, args))
}

const SEQUENTIAL: [&str; 3] = ["DFF", "LATCH", "DFFR"];

pub fn parse_bench(text: &str) -> Result<Circuit, BenchError> {
    let mut b = CircuitBuilder::new();
    let mut first_use: HashMap<String, usize> = HashMap::new();
    let mut defined_at: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let structure = |source| BenchError::Structure { line, source };
        if let Some((lhs, rhs)) = content.split_once('=') {
            let out = lhs.trim();
            if !is_name(out) {
                return Err(syntax(line, format!("malformed signal name `{out}`")));
            }
            let (keyword, args) = call(line, rhs.trim())?;
            let upper = keyword.to_ascii_uppercase();
            if SEQUENTIAL.contains(&upper.as_str()) {
                return Err(BenchError::Sequential {
                    line,
                    kind: keyword.to_string(),
                });
            }
            let kind = GateKind::from_name(keyword).ok_or_else(|| BenchError::UnsupportedGate {
                line,
                kind: keyword.to_string(),
            })?;
            for a in &args {
                first_use.entry(a.to_string()).or_insert(line);
            }
            b.add_gate(kind, out, &args).map_err(structure)?;
            defined_at.entry(out.to_string()).or_insert(line);
        } else {
            let (keyword, args) = call(line, content)?;
            if args.len() != 1 {
                return Err(syntax(line, format!("`{keyword}` takes exactly one signal")));
            }
            match keyword.to_ascii_uppercase().as_str() {
                "INPUT" => {
                    b.add_input(args[0]).map_err(structure)?;
                }
                "OUTPUT" => {
                    first_use.entry(args[0].to_string()).or_insert(line);
                    b.add_output(args[0]).map_err(structure)?;
                }
                _ => return Err(syntax(line, format!("unknown declaration `{keyword}`"))),
            }
        }
    }
    b.build().map_err(|e| {
        let at = match &e {
            NetlistError::UndefinedSignal(n) => first_use.get(n),
            NetlistError::Cycle(n) => defined_at.get(n),
            _ => None,
        };
        match at {
            Some(&line) => BenchError::Structure { line, source: e },
            None => BenchError::Circuit(e),
        }
    })
}

/// Serializes a circuit; [`parse_bench`] reads the result back to an
/// isomorphic circuit.
pub fn write_bench(circuit: &Circuit) -> String {
    let mut s = String::new();
    for &n in circuit.inputs() {
        let _ = writeln!(s, "INPUT({})", circuit.net_name(n));
    }
    for &n in circuit.outputs() {
        let _ = writeln!(s, "OUTPUT({})", circuit.net_name(n));
    }
    for g in circuit.gates() {
        let args: Vec<&str> = g.fanin.iter().map(|&n| circuit.net_name(n)).collect();
        let kind = match g.kind {
            GateKind::Buf => "BUFF",
            k => k.name(),
        };
        let _ = writeln!(s, "{} = {}({})", circuit.net_name(g.output), kind, args.join(", "));
    }
    s
}
