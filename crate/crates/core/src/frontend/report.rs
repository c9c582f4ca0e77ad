use std::fmt;
use std::time::Duration;

use thiserror::Error;

pub use crate::modular::{Obligation, Status};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Yes,
    No,
    Maybe,
}

impl Verdict {
    /// Process exit code: 0 YES, 1 NO, 2 MAYBE.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Maybe => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
            Verdict::Maybe => "MAYBE",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    Gs,
    Modular,
    Loop,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gs => "GS",
            Method::Modular => "MODULAR",
            Method::Loop => "LOOP",
            Method::Oracle => "ORACLE",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Human,
    Machine,
}

/// Verdict with the obligations that justify it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofReport {
    pub verdict: Verdict,
    pub method: Method,
    pub obligations: Vec<Obligation>,
    pub notes: Vec<String>,
    /// Wall-clock time per phase; never printed, so output stays stable.
    pub timings: Vec<(String, Duration)>,
}

impl ProofReport {
    pub fn new(verdict: Verdict, method: Method) -> Self {
        ProofReport { verdict, method, obligations: Vec::new(), notes: Vec::new(), timings: Vec::new() }
    }

    pub fn obligation(&self, name: &str) -> Option<&Obligation> {
        self.obligations.iter().find(|o| o.name == name)
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Human => self.emit_human(),
            Format::Machine => self.emit_machine(),
        }
    }

    /// Indented obligation tree.
    pub fn emit_human(&self) -> String {
        let mut s = format!("{} ({})\n", self.verdict, self.method);
        for o in &self.obligations {
            s.push_str(&format!("  [{}] {}\n", o.status, o.name));
            for e in &o.evidence {
                s.push_str(&format!("      {e}\n"));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }

    /// Tab-separated records:
    ///
    /// ```text
    /// verdict     YES|NO|MAYBE
    /// method      GS|MODULAR|LOOP|ORACLE
    /// obligation  <name>  discharged|failed|skipped
    /// evidence    <name>  <text>
    /// note        <text>
    /// ```
    ///
    /// Evidence follows its obligation. Tabs, newlines and backslashes in
    /// fields are escaped as `\t`, `\n` and `\\`.
    pub fn emit_machine(&self) -> String {
        let mut s = format!("verdict\t{}\nmethod\t{}\n", self.verdict, self.method);
        for o in &self.obligations {
            s.push_str(&format!("obligation\t{}\t{}\n", escape(&o.name), o.status));
            for e in &o.evidence {
                s.push_str(&format!("evidence\t{}\t{}\n", escape(&o.name), escape(e)));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("note\t{}\n", escape(n)));
        }
        s
    }
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit_human())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c == '\\' {
            match it.next() {
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some(o) => out.push(o),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("report line {line}: {msg}")]
pub struct ReportParseError {
    pub line: usize,
    pub msg: String,
}

/// Reads the machine format back.
pub fn parse_machine_report(text: &str) -> Result<ProofReport, ReportParseError> {
    let mut verdict = None;
    let mut method = None;
    let mut obligations: Vec<Obligation> = Vec::new();
    let mut notes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |msg: &str| ReportParseError { line: i + 1, msg: msg.to_string() };
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            ["verdict", v] => {
                verdict = Some(match *v {
                    "YES" => Verdict::Yes,
                    "NO" => Verdict::No,
                    "MAYBE" => Verdict::Maybe,
                    _ => return Err(err("unknown verdict")),
                })
            }
            ["method", m] => {
                method = Some(match *m {
                    "GS" => Method::Gs,
                    "MODULAR" => Method::Modular,
                    "LOOP" => Method::Loop,
                    "ORACLE" => Method::Oracle,
                    _ => return Err(err("unknown method")),
                })
            }
            ["obligation", n, st] => {
                let status = match *st {
                    "discharged" => Status::Discharged,
                    "failed" => Status::Failed,
                    "skipped" => Status::Skipped,
                    _ => return Err(err("unknown status")),
                };
                obligations.push(Obligation { name: unescape(n), status, evidence: Vec::new() });
            }
            ["evidence", n, e] => match obligations.last_mut() {
                Some(o) if o.name == unescape(n) => o.evidence.push(unescape(e)),
                _ => return Err(err("evidence without its obligation")),
            },
            ["note", n] => notes.push(unescape(n)),
            [""] => {}
            _ => return Err(err("unrecognised record")),
        }
    }
    Ok(ProofReport {
        verdict: verdict.ok_or(ReportParseError { line: 0, msg: "missing verdict".into() })?,
        method: method.ok_or(ReportParseError { line: 0, msg: "missing method".into() })?,
        obligations,
        notes,
        timings: Vec::new(),
    })
}
