//! Run reports: a versioned JSON document per invocation and a text rendering
//! that shows beliefs as `((D,t2),(C,t2))`.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::format::{FormatError, InputFile};

pub const SCHEMA: &str = "lexepi.run-report/1";

/// How much per-type detail a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Verbosity {
    /// Verdicts only.
    Quiet,
    /// Verdicts, beliefs, fold tables, witnesses and violations.
    Normal,
    /// Everything above plus preference classes and expected-utility vectors.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Outcome>,
}

impl RunReport {
    pub fn new(command: String, inputs: Vec<InputFile>, status: Status, result: Outcome) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            status,
            exit_code: status.exit_code(),
            error: None,
            result: Some(result),
        }
    }

    /// A report for input that could not be loaded.
    pub fn input_error(command: String, inputs: Vec<InputFile>, err: &FormatError) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            status: Status::Error,
            exit_code: Status::Error.exit_code(),
            error: Some(ErrorInfo {
                location: err.location(),
                message: err.to_string(),
            }),
            result: None,
        }
    }

    /// A check that could not be completed counts as a failure.
    pub fn check_error(command: String, inputs: Vec<InputFile>, message: String, result: Option<Outcome>) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            status: Status::Fail,
            exit_code: Status::Fail.exit_code(),
            error: Some(ErrorInfo {
                location: None,
                message,
            }),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lexepi {} | {}", self.tool_version, self.command);
        for input in &self.inputs {
            let _ = writeln!(out, "input {} sha256:{}", input.path, input.sha256);
        }
        match &self.result {
            Some(Outcome::Ia(r)) => render_ia(&mut out, r),
            Some(Outcome::CheckComplete(r)) => render_complete(&mut out, r),
            Some(Outcome::CheckIncomplete(r)) => render_incomplete(&mut out, r),
            Some(Outcome::Transform(r)) => render_transform(&mut out, r),
            Some(Outcome::Theorem(r)) => render_theorem(&mut out, r),
            None => {}
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {}", e.message);
        }
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = writeln!(out, "status: {status} (exit {})", self.exit_code);
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Ia(IaResult),
    CheckComplete(CompleteResult),
    CheckIncomplete(IncompleteResult),
    Transform(TransformResult),
    Theorem(TheoremResult),
}

/// Per-player choice labels.
pub type ChoiceSets = [Vec<String>; 2];

#[derive(Clone, Debug, Serialize)]
pub struct IaResult {
    pub players: [String; 2],
    pub rounds: Vec<ChoiceSets>,
    pub stable_round: usize,
    pub survivors: ChoiceSets,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompleteResult {
    pub decision_procedure: &'static str,
    /// `"common"` or `"folds"`.
    pub mode: &'static str,
    pub folds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_from: Option<usize>,
    pub types: Vec<CompleteTypeView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompleteTypeView {
    pub player: u8,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief: Option<String>,
    pub cautious: bool,
    pub optimal: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preference: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lex_values: Option<Vec<LexValue>>,
    /// First fold the type fails, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_caution: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_assumption: Option<bool>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<FoldView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LexValue {
    pub choice: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldView {
    pub fold: usize,
    /// `"pass"`, `"not-cautious"` or `"violated"`.
    pub verdict: &'static str,
    pub holds: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessView>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<ViolationView>,
}

/// Levels are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessView {
    pub choice: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ViolationView {
    /// A good choice with no deemed-possible witness type.
    MissingSupport { condition: &'static str, choice: String },
    /// `bad` is deemed possible no later than `good`.
    Order {
        condition: &'static str,
        good: String,
        bad: String,
    },
    /// A choice-type pair the type should deem possible but does not.
    MissingPair { pair: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct IncompleteResult {
    pub decision_procedure: &'static str,
    pub common: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_from: Option<usize>,
    pub types: Vec<IncompleteTypeView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IncompleteTypeView {
    pub player: u8,
    pub name: String,
    pub carries_reference: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief: Option<String>,
    pub optimal: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lex_values: Option<Vec<LexValue>>,
    pub cautious: bool,
    pub believes_rationality: bool,
    pub supported_and_prior: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_caution: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_rationality: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_supported_and_prior: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_b: Option<bool>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<FoldView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformResult {
    /// `"co2in"` or `"in2co"`.
    pub direction: &'static str,
    pub input_types: [usize; 2],
    pub output_types: [usize; 2],
    /// Input type name and the output types it maps to or from.
    pub groups: Vec<Group>,
    pub checks: Vec<CheckView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Group {
    pub player: u8,
    #[serde(rename = "type")]
    pub ty: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckView {
    pub name: &'static str,
    /// `None` when the check does not apply to this input.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremResult {
    pub players: [String; 2],
    pub stable_round: usize,
    pub witness_types: [usize; 2],
    pub transformed_types: [usize; 2],
    pub survivors: ChoiceSets,
    pub car_optimal: ChoiceSets,
    pub incomplete_optimal: ChoiceSets,
    pub converse_optimal: ChoiceSets,
    pub agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<MismatchView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MismatchView {
    pub player: u8,
    pub choice: String,
    pub source: &'static str,
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn braces(xs: &[String]) -> String {
    format!("{{{}}}", xs.join(","))
}

fn render_ia(out: &mut String, r: &IaResult) {
    let width = |i: usize| {
        r.rounds
            .iter()
            .map(|round| braces(&round[i]).len())
            .chain([r.players[i].len() + 7])
            .max()
            .unwrap_or(0)
    };
    let w1 = width(0);
    let header = format!(
        "round  {:<w1$}  player {}",
        format!("player {}", r.players[0]),
        r.players[1]
    );
    let _ = writeln!(out, "{}", header.trim_end());
    for (k, round) in r.rounds.iter().enumerate() {
        let line = format!("{k:<5}  {:<w1$}  {}", braces(&round[0]), braces(&round[1]));
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(
        out,
        "stable at round {}: survivors {} / {}",
        r.stable_round,
        braces(&r.survivors[0]),
        braces(&r.survivors[1])
    );
}

fn render_folds(out: &mut String, folds: &[FoldView]) {
    for f in folds {
        let _ = write!(out, "    fold {}: {} (holds: {})", f.fold, f.verdict, f.holds);
        if !f.witnesses.is_empty() {
            let ws: Vec<String> = f
                .witnesses
                .iter()
                .map(|w| format!("{} by {} at level {}", w.choice, w.ty, w.level))
                .collect();
            let _ = write!(out, "; witnesses {}", ws.join(", "));
        }
        let _ = writeln!(out);
        for v in &f.violations {
            match v {
                ViolationView::MissingSupport { condition, choice } => {
                    let _ = writeln!(
                        out,
                        "      {condition} violated: no deemed-possible type supports {choice}"
                    );
                }
                ViolationView::Order { condition, good, bad } => {
                    let _ = writeln!(
                        out,
                        "      {condition} violated: {good} is not infinitely more likely than {bad}"
                    );
                }
                ViolationView::MissingPair { pair } => {
                    let _ = writeln!(out, "      caution violated: {pair} is not deemed possible");
                }
            }
        }
    }
}

fn render_lex(out: &mut String, values: &Option<Vec<LexValue>>, preference: &Option<Vec<Vec<String>>>) {
    if let Some(values) = values {
        for v in values {
            let _ = writeln!(out, "    value of {}: ({})", v.choice, v.values.join(", "));
        }
    }
    if let Some(classes) = preference {
        let cs: Vec<String> = classes.iter().map(|c| braces(c)).collect();
        let _ = writeln!(out, "    preference: ({})", cs.join(","));
    }
}

fn render_complete(out: &mut String, r: &CompleteResult) {
    let _ = writeln!(out, "decision procedure: {}", r.decision_procedure);
    match r.mode {
        "common" => {
            let _ = writeln!(
                out,
                "common assumption of rationality, table to fold {}{}",
                r.folds,
                r.stable_from
                    .map(|s| format!(", stable from fold {s}"))
                    .unwrap_or_default()
            );
        }
        _ => {
            let _ = writeln!(out, "assumption of rationality up to fold {}", r.folds);
        }
    }
    for t in &r.types {
        let _ = writeln!(out, "type {} (player {}): {}", t.name, t.player, verdict(t.pass));
        if let Some(b) = &t.belief {
            let _ = writeln!(out, "    b{}({}) = {}", t.player, t.name, b);
        }
        let _ = writeln!(
            out,
            "    cautious: {}; optimal: {}",
            verdict(t.cautious),
            braces(&t.optimal)
        );
        render_lex(out, &t.lex_values, &t.preference);
        if let (Some(cc), Some(ca)) = (t.common_caution, t.common_assumption) {
            let _ = writeln!(
                out,
                "    common caution: {}; common assumption of rationality: {}",
                verdict(cc),
                verdict(ca)
            );
        }
        render_folds(out, &t.folds);
    }
}

fn render_incomplete(out: &mut String, r: &IncompleteResult) {
    let _ = writeln!(out, "decision procedure: {}", r.decision_procedure);
    for t in &r.types {
        let utility = if t.carries_reference { "u" } else { "own utility" };
        let _ = writeln!(
            out,
            "type {} (player {}, {utility}): {}",
            t.name,
            t.player,
            verdict(t.pass)
        );
        if let Some(b) = &t.belief {
            let _ = writeln!(out, "    beta{}({}) = {}", t.player, t.name, b);
        }
        let _ = writeln!(
            out,
            "    optimal: {}; cautious: {}; believes rationality: {}; supported and prior: {}",
            braces(&t.optimal),
            verdict(t.cautious),
            verdict(t.believes_rationality),
            verdict(t.supported_and_prior)
        );
        render_lex(out, &t.lex_values, &None);
        if let (Some(c), Some(ra), Some(sp), Some(b)) = (
            t.common_caution,
            t.common_rationality,
            t.common_supported_and_prior,
            t.condition_b,
        ) {
            let _ = writeln!(
                out,
                "    common caution: {}; common rationality: {}; common supported and prior: {}; condition (b): {}",
                verdict(c),
                verdict(ra),
                verdict(sp),
                verdict(b)
            );
        }
        render_folds(out, &t.folds);
    }
}

fn render_transform(out: &mut String, r: &TransformResult) {
    let _ = writeln!(
        out,
        "{}: {}+{} types -> {}+{} types",
        r.direction, r.input_types[0], r.input_types[1], r.output_types[0], r.output_types[1]
    );
    for g in &r.groups {
        let _ = writeln!(out, "    player {} {} <-> {}", g.player, g.ty, braces(&g.members));
    }
    for c in &r.checks {
        let v = match c.pass {
            Some(b) => verdict(b),
            None => "N/A",
        };
        let _ = write!(out, "check {}: {v}", c.name);
        if let Some(d) = &c.detail {
            let _ = write!(out, " ({d})");
        }
        let _ = writeln!(out);
    }
    if let Some(p) = &r.output_path {
        let _ = writeln!(out, "written to {p}");
    }
}

fn render_theorem(out: &mut String, r: &TheoremResult) {
    let _ = writeln!(out, "iterated admissibility stable at round {}", r.stable_round);
    let _ = writeln!(
        out,
        "witness model {}+{} types, transformed {}+{} types",
        r.witness_types[0], r.witness_types[1], r.transformed_types[0], r.transformed_types[1]
    );
    let rows: [(&str, &ChoiceSets); 4] = [
        ("IA survivors", &r.survivors),
        ("CAR-optimal", &r.car_optimal),
        ("condition (b)-optimal", &r.incomplete_optimal),
        ("converse", &r.converse_optimal),
    ];
    for (label, sets) in rows {
        let _ = writeln!(
            out,
            "{label:<22} player {}: {:<12} player {}: {}",
            r.players[0],
            braces(&sets[0]),
            r.players[1],
            braces(&sets[1])
        );
    }
    match &r.mismatch {
        None => {
            let _ = writeln!(out, "agreement: PASS");
        }
        Some(m) => {
            let _ = writeln!(
                out,
                "agreement: FAIL at choice {} of player {} ({})",
                m.choice, m.player, m.source
            );
        }
    }
}
