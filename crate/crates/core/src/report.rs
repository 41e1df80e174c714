use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn from_bool(holds: bool) -> Self {
        if holds { Verdict::Holds } else { Verdict::Fails }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Scalar(f64),
    Vector(Vec<f64>),
    Text(String),
}

/// Outcome of a checker: verdict, numeric margins, witnesses and notes.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub check: String,
    pub verdict: Verdict,
    pub margins: BTreeMap<String, f64>,
    pub witnesses: BTreeMap<String, Witness>,
    pub notes: Vec<String>,
}

impl DiagnosticReport {
    pub fn new(check: &str) -> Self {
        DiagnosticReport {
            check: check.to_string(),
            verdict: Verdict::Inconclusive,
            margins: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn margin(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.margins.insert(key.into(), value);
        self
    }

    pub fn scalar(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.witnesses.insert(key.into(), Witness::Scalar(value));
        self
    }

    pub fn vector(&mut self, key: impl Into<String>, value: Vec<f64>) -> &mut Self {
        self.witnesses.insert(key.into(), Witness::Vector(value));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.witnesses.insert(key.into(), Witness::Text(value.into()));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn set_verdict(&mut self, verdict: Verdict) -> &mut Self {
        self.verdict = verdict;
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn margin_of(&self, key: &str) -> Option<f64> {
        self.margins.get(key).copied()
    }

    /// True when the text witness `key` equals `value`.
    pub fn text_is(&self, key: &str, value: &str) -> bool {
        matches!(self.witnesses.get(key), Some(Witness::Text(t)) if t == value)
    }

    pub fn vector_of(&self, key: &str) -> Option<&[f64]> {
        match self.witnesses.get(key) {
            Some(Witness::Vector(v)) => Some(v),
            _ => None,
        }
    }

    /// Every decided verdict must carry a number a reader can re-check.
    pub fn has_numeric_evidence(&self) -> bool {
        !self.margins.is_empty() || self.witnesses.values().any(|w| !matches!(w, Witness::Text(_)))
    }
}
