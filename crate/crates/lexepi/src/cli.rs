//! Subcommands. Each one loads its inputs, runs the checks and returns a
//! [`RunReport`]; printing and the process exit code are left to the caller.

use std::{
    collections::BTreeSet,
    fs,
    path::{Path, PathBuf},
};

use clap::{Parser, Subcommand, ValueEnum};
use lexepi_core::{
    fold::Witness,
    solver::iterated_admissibility,
    theorem::{verify_theorem, Source},
    transform::{
        check_observation_rationality, check_observation_redundancy, complete_to_incomplete, incomplete_to_complete,
        isomorphic_complete,
    },
    CompleteModel, FoldReport, GameForm, IncompleteModel, LexBelief, Pair, Player, TypeId, UtilityFn, Verdict,
    Violation,
};

use crate::{
    format::{self, FormatError, InputFile},
    report::{
        CheckView, ChoiceSets, CompleteResult, CompleteTypeView, FoldView, Group, IaResult, IncompleteResult,
        IncompleteTypeView, LexValue, MismatchView, Outcome, RunReport, Status, TheoremResult, TransformResult,
        Verbosity, ViolationView, WitnessView,
    },
};

#[derive(Debug, Parser)]
#[command(
    name = "lexepi",
    version,
    about = "Check and transform lexicographic epistemic models of two-player games"
)]
pub struct Cli {
    /// Report rendering.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,

    /// Amount of per-type detail in reports.
    #[arg(long, value_enum, env = "LEXEPI_VERBOSITY", default_value_t = Verbosity::Normal, global = true)]
    pub verbosity: Verbosity,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Complete-information model to incomplete-information model.
    Co2in,
    /// Incomplete-information model to complete-information model.
    In2co,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterated elimination of weakly dominated choices.
    Ia { game: PathBuf },
    /// Caution, optimality and assumption of rationality for a complete model.
    CheckComplete {
        model: PathBuf,
        /// Check up to this fold (0 checks caution only).
        #[arg(long, conflicts_with = "common")]
        folds: Option<usize>,
        /// Check common assumption of rationality (the default).
        #[arg(long)]
        common: bool,
    },
    /// Caution, rationality, support of good choices and prior belief in u.
    CheckIncomplete {
        model: PathBuf,
        /// Also check the common-full-belief closures and condition (b).
        #[arg(long)]
        common: bool,
    },
    /// Convert between complete and incomplete models.
    Transform {
        model: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Where to write the converted model; embedded in the report if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare iterated admissibility with both epistemic characterizations.
    VerifyTheorem { game: PathBuf },
}

pub fn run(cli: &Cli) -> RunReport {
    let v = cli.verbosity;
    match &cli.command {
        Command::Ia { game } => cmd_ia(game),
        Command::CheckComplete { model, folds, .. } => cmd_check_complete(model, *folds, v),
        Command::CheckIncomplete { model, common } => cmd_check_incomplete(model, *common, v),
        Command::Transform { model, direction, out } => cmd_transform(model, *direction, out.as_deref()),
        Command::VerifyTheorem { game } => cmd_verify_theorem(game),
    }
}

const IA_PROCEDURE: &str = "good choices at fold n are the round-n survivors of iterated admissibility";
const IA_PROCEDURE_U: &str =
    "good choices at fold n are the round-n survivors of iterated admissibility under reference_u";

fn labels(form: &GameForm, p: Player, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter().map(|&c| form.label(p, c).to_string()).collect()
}

fn label_sets(form: &GameForm, sets: &[BTreeSet<usize>; 2]) -> ChoiceSets {
    Player::BOTH.map(|p| labels(form, p, &sets[p.index()]))
}

/// `((D,t2),{1/2:(C,t2),1/2:(D,t2)})`: point levels print as the bare pair.
pub fn notation(form: &GameForm, owner: Player, belief: &LexBelief, name_of: impl Fn(usize) -> String) -> String {
    let q = owner.opponent();
    let pair = |p: &Pair| format!("({},{})", form.label(q, p.choice), name_of(p.ty));
    let levels: Vec<String> = belief
        .levels()
        .iter()
        .map(|level| {
            if level.len() == 1 {
                let (p, _) = level.iter().next().expect("nonempty level");
                pair(p)
            } else {
                let parts: Vec<String> = level.iter().map(|(p, w)| format!("{w}:{}", pair(p))).collect();
                format!("{{{}}}", parts.join(","))
            }
        })
        .collect();
    format!("({})", levels.join(","))
}

fn lex_values(form: &GameForm, p: Player, belief: &LexBelief, v: &UtilityFn) -> Vec<LexValue> {
    (0..form.num_choices(p))
        .map(|c| LexValue {
            choice: form.label(p, c).to_string(),
            values: belief
                .expected_utility_vector(c, v)
                .levels()
                .iter()
                .map(|r| r.to_string())
                .collect(),
        })
        .collect()
}

/// Names and labels needed to render pairs of the opponent of `owner`.
struct Namer<'a> {
    form: &'a GameForm,
    owner: Player,
    names: Vec<String>,
}

impl Namer<'_> {
    fn pair(&self, p: Pair) -> String {
        format!(
            "({},{})",
            self.form.label(self.owner.opponent(), p.choice),
            self.names[p.ty]
        )
    }

    fn witness(&self, w: &Witness) -> WitnessView {
        WitnessView {
            choice: self.form.label(self.owner.opponent(), w.choice).to_string(),
            ty: self.names[w.ty].clone(),
            level: w.level + 1,
        }
    }

    fn violation(&self, v: &Violation, incomplete: bool) -> ViolationView {
        match v {
            Violation::MissingSupport { choice } => ViolationView::MissingSupport {
                condition: if incomplete { "supported" } else { "A1" },
                choice: self.form.label(self.owner.opponent(), *choice).to_string(),
            },
            Violation::OrderViolation { good, bad } => ViolationView::Order {
                condition: if incomplete { "prior" } else { "A2" },
                good: self.pair(*good),
                bad: self.pair(*bad),
            },
        }
    }

    fn folds(&self, report: &FoldReport, t: TypeId, incomplete: bool) -> Vec<FoldView> {
        report
            .rows()
            .iter()
            .map(|row| {
                let e = report.entry(t, row.fold);
                let (verdict, violations) = match &e.verdict {
                    Verdict::Pass => ("pass", Vec::new()),
                    Verdict::NotCautious => ("not-cautious", Vec::new()),
                    Verdict::Violated(vs) => ("violated", vs.iter().map(|v| self.violation(v, incomplete)).collect()),
                };
                FoldView {
                    fold: row.fold,
                    verdict,
                    holds: e.holds,
                    witnesses: e.witnesses.iter().map(|w| self.witness(w)).collect(),
                    violations,
                }
            })
            .collect()
    }
}

fn complete_namer(m: &CompleteModel, owner: Player) -> Namer<'_> {
    let q = owner.opponent();
    Namer {
        form: m.game().form(),
        owner,
        names: (0..m.num_types(q))
            .map(|k| m.type_name(TypeId::new(q, k)).to_string())
            .collect(),
    }
}

fn incomplete_namer(m: &IncompleteModel, owner: Player) -> Namer<'_> {
    let q = owner.opponent();
    Namer {
        form: m.form(),
        owner,
        names: (0..m.num_types(q))
            .map(|k| m.type_name(TypeId::new(q, k)).to_string())
            .collect(),
    }
}

fn command_line(name: &str, path: &Path, extra: &str) -> String {
    let mut s = format!("{name} {}", path.display());
    if !extra.is_empty() {
        s.push(' ');
        s.push_str(extra);
    }
    s
}

fn load_failure(command: String, path: &Path, err: &FormatError) -> RunReport {
    // the input is hashed even when it does not parse
    let inputs = fs::read(path)
        .map(|b| vec![InputFile::new(path, &b)])
        .unwrap_or_default();
    RunReport::input_error(command, inputs, err)
}

pub fn cmd_ia(path: &Path) -> RunReport {
    let command = command_line("ia", path, "");
    let loaded = match format::load_game(path) {
        Ok(l) => l,
        Err(e) => return load_failure(command, path, &e),
    };
    let game = &loaded.value;
    let form = game.form();
    let rounds = match iterated_admissibility(game) {
        Ok(r) => r,
        Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
    };
    let result = IaResult {
        players: Player::BOTH.map(|p| form.player_name(p).to_string()),
        rounds: rounds.rounds().iter().map(|r| label_sets(form, r)).collect(),
        stable_round: rounds.stable_round(),
        survivors: label_sets(form, rounds.survivors()),
    };
    RunReport::new(command, loaded.inputs, Status::Pass, Outcome::Ia(result))
}

/// Pairs a non-cautious complete type fails to deem possible.
fn missing_pairs(m: &CompleteModel, t: TypeId, namer: &Namer<'_>) -> Vec<ViolationView> {
    let belief = m.belief(t);
    let opp = m.game().form().num_choices(t.player.opponent());
    belief
        .possible_types()
        .into_iter()
        .flat_map(|ty| (0..opp).map(move |c| Pair::new(c, ty)))
        .filter(|&p| !belief.deems_possible(p))
        .map(|p| ViolationView::MissingPair { pair: namer.pair(p) })
        .collect()
}

/// `folds = None` checks common assumption of rationality.
pub fn cmd_check_complete(path: &Path, folds: Option<usize>, verbosity: Verbosity) -> RunReport {
    let extra = match folds {
        Some(n) => format!("--folds {n}"),
        None => "--common".to_string(),
    };
    let command = command_line("check-complete", path, &extra);
    let loaded = match format::load_complete_model(path) {
        Ok(l) => l,
        Err(e) => return load_failure(command, path, &e),
    };
    let m = &loaded.value;
    let form = m.game().form();

    let report = match folds {
        Some(0) => None,
        Some(n) => Some(m.n_fold_assumption(n)),
        None => Some(m.common_assumption()),
    };
    let report = match report.transpose() {
        Ok(r) => r,
        Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
    };
    let common_caution = folds.is_none().then(|| m.common_caution());
    let depth = report.as_ref().map_or(0, FoldReport::depth);

    let mut types = Vec::new();
    for t in m.type_ids() {
        let namer = complete_namer(m, t.player);
        let cautious = m.is_cautious(t);
        let holds = report.as_ref().map_or(cautious, |r| r.holds(t, depth));
        let cc = common_caution.as_ref().map(|c| c[t.player.index()][t.index]);
        let pass = holds && cc.unwrap_or(true);
        let mut fold_views = match &report {
            Some(r) => namer.folds(r, t, false),
            None => vec![FoldView {
                fold: 0,
                verdict: if cautious { "pass" } else { "not-cautious" },
                holds: cautious,
                witnesses: Vec::new(),
                violations: Vec::new(),
            }],
        };
        if let Some(f0) = fold_views.first_mut() {
            if !cautious {
                f0.violations = missing_pairs(m, t, &namer);
            }
        }
        let detailed = verbosity >= Verbosity::Normal;
        let full = verbosity >= Verbosity::Full;
        let q = t.player.opponent();
        types.push(CompleteTypeView {
            player: t.player.number(),
            name: m.type_name(t).to_string(),
            belief: detailed.then(|| {
                notation(form, t.player, m.belief(t), |k| {
                    m.type_name(TypeId::new(q, k)).to_string()
                })
            }),
            cautious,
            optimal: labels(form, t.player, &m.optimal_choices(t)),
            preference: full.then(|| {
                m.preference_partition(t)
                    .iter()
                    .map(|c| labels(form, t.player, c))
                    .collect()
            }),
            lex_values: full.then(|| lex_values(form, t.player, m.belief(t), m.game().utility_fn(t.player))),
            first_failure: report.as_ref().and_then(|r| r.first_failure(t)),
            common_caution: cc,
            common_assumption: folds.is_none().then_some(holds),
            pass,
            folds: if detailed { fold_views } else { Vec::new() },
        });
    }
    let status = if types.iter().all(|t| t.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    let result = CompleteResult {
        decision_procedure: IA_PROCEDURE,
        mode: if folds.is_none() { "common" } else { "folds" },
        folds: depth,
        stable_from: report.as_ref().and_then(FoldReport::stable_from),
        types,
    };
    RunReport::new(command, loaded.inputs, status, Outcome::CheckComplete(result))
}

pub fn cmd_check_incomplete(path: &Path, common: bool, verbosity: Verbosity) -> RunReport {
    let command = command_line("check-incomplete", path, if common { "--common" } else { "" });
    let loaded = match format::load_incomplete_model(path) {
        Ok(l) => l,
        Err(e) => return load_failure(command, path, &e),
    };
    let m = &loaded.value;
    let form = m.form();

    let checked = (|| -> Result<_, lexepi_core::Error> {
        let report = if common {
            m.common_supported_and_prior()?
        } else {
            m.n_fold_supported_and_prior(1)?
        };
        let closures = if common {
            Some((
                m.common_full_belief(lexepi_core::incomplete::Property::Caution)?,
                m.common_full_belief(lexepi_core::incomplete::Property::Rationality)?,
                m.condition_b()?,
            ))
        } else {
            None
        };
        Ok((report, closures))
    })();
    let (report, closures) = match checked {
        Ok(x) => x,
        Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
    };

    let detailed = verbosity >= Verbosity::Normal;
    let mut types = Vec::new();
    for t in m.type_ids() {
        let (i, k) = (t.player.index(), t.index);
        let namer = incomplete_namer(m, t.player);
        let cautious = m.is_cautious(t);
        let rational = m.believes_rationality(t);
        let supported = report.holds(t, 1);
        let common_sp = report.final_holds(t);
        let q = t.player.opponent();
        let (cc, cr, cb) = match &closures {
            Some((c, r, b)) => (Some(c[i][k]), Some(r[i][k]), Some(b[i][k])),
            None => (None, None, None),
        };
        let pass = match cb {
            Some(b) => b,
            None => cautious && rational && supported,
        };
        types.push(IncompleteTypeView {
            player: t.player.number(),
            name: m.type_name(t).to_string(),
            carries_reference: m.carries_reference(t),
            belief: detailed.then(|| {
                notation(form, t.player, m.belief(t), |j| {
                    m.type_name(TypeId::new(q, j)).to_string()
                })
            }),
            optimal: labels(form, t.player, &m.optimal_choices(t)),
            lex_values: (verbosity >= Verbosity::Full).then(|| lex_values(form, t.player, m.belief(t), m.utility(t))),
            cautious,
            believes_rationality: rational,
            supported_and_prior: supported,
            common_caution: cc,
            common_rationality: cr,
            common_supported_and_prior: common.then_some(common_sp),
            condition_b: cb,
            pass,
            folds: if detailed {
                namer.folds(&report, t, true)
            } else {
                Vec::new()
            },
        });
    }
    let status = if types.iter().all(|t| t.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    let result = IncompleteResult {
        decision_procedure: IA_PROCEDURE_U,
        common,
        stable_from: report.stable_from(),
        types,
    };
    RunReport::new(command, loaded.inputs, status, Outcome::CheckIncomplete(result))
}

fn check(name: &'static str, pass: bool) -> CheckView {
    CheckView {
        name,
        pass: Some(pass),
        detail: None,
    }
}

fn distinct_beliefs(m: &CompleteModel) -> bool {
    Player::BOTH.iter().all(|&p| {
        let beliefs: Vec<&LexBelief> = (0..m.num_types(p)).map(|k| m.belief(TypeId::new(p, k))).collect();
        beliefs
            .iter()
            .enumerate()
            .all(|(a, x)| beliefs[..a].iter().all(|y| y != x))
    })
}

pub fn cmd_transform(path: &Path, direction: Direction, out: Option<&Path>) -> RunReport {
    let (name, loader_is_complete) = match direction {
        Direction::Co2in => ("co2in", true),
        Direction::In2co => ("in2co", false),
    };
    let mut extra = format!("--direction {name}");
    if let Some(o) = out {
        extra.push_str(&format!(" --out {}", o.display()));
    }
    let command = command_line("transform", path, &extra);
    let comment = format!(
        "generated by lexepi {} transform --direction {name} from {}",
        env!("CARGO_PKG_VERSION"),
        path.display()
    );

    let (inputs, result, output) = if loader_is_complete {
        let loaded = match format::load_complete_model(path) {
            Ok(l) => l,
            Err(e) => return load_failure(command, path, &e),
        };
        let m = &loaded.value;
        let converted = match complete_to_incomplete(m) {
            Ok(c) => c,
            Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
        };
        let model = &converted.model;
        let opp = |p: Player| m.game().form().num_choices(p.opponent());
        let mut groups = Vec::new();
        let mut marginals = true;
        for t in m.type_ids() {
            let members = &converted.groups[t.player.index()][t.index];
            marginals &= members.iter().all(|&th| {
                model.belief(TypeId::new(t.player, th)).choice_marginals(opp(t.player))
                    == m.belief(t).choice_marginals(opp(t.player))
            });
            groups.push(Group {
                player: t.player.number(),
                ty: m.type_name(t).to_string(),
                members: members
                    .iter()
                    .map(|&th| model.type_name(TypeId::new(t.player, th)).to_string())
                    .collect(),
            });
        }
        let round_trip = if distinct_beliefs(m) {
            let back = incomplete_to_complete(model);
            CheckView {
                name: "round trip is isomorphic",
                pass: Some(back.is_ok_and(|b| isomorphic_complete(&b.model, m))),
                detail: None,
            }
        } else {
            CheckView {
                name: "round trip is isomorphic",
                pass: None,
                detail: Some("input types do not have pairwise distinct beliefs".into()),
            }
        };
        let checks = vec![
            check("redundancy", check_observation_redundancy(model, &converted.groups)),
            check("belief in rationality", check_observation_rationality(model)),
            check("choice marginals preserved", marginals),
            round_trip,
        ];
        let result = TransformResult {
            direction: name,
            input_types: Player::BOTH.map(|p| m.num_types(p)),
            output_types: Player::BOTH.map(|p| model.num_types(p)),
            groups,
            checks,
            output_path: None,
            output: None,
        };
        (
            loaded.inputs,
            result,
            format::incomplete_model_to_value(model, Some(&comment)),
        )
    } else {
        let loaded = match format::load_incomplete_model(path) {
            Ok(l) => l,
            Err(e) => return load_failure(command, path, &e),
        };
        let m = &loaded.value;
        let converted = match incomplete_to_complete(m) {
            Ok(c) => c,
            Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
        };
        let model = &converted.model;
        let opp = |p: Player| m.form().num_choices(p.opponent());
        let mut groups = Vec::new();
        for t in model.type_ids() {
            let members = (0..m.num_types(t.player))
                .filter(|&th| converted.class_of[t.player.index()][th] == t.index)
                .map(|th| m.type_name(TypeId::new(t.player, th)).to_string())
                .collect();
            groups.push(Group {
                player: t.player.number(),
                ty: model.type_name(t).to_string(),
                members,
            });
        }
        let marginals = m.type_ids().all(|th| {
            let merged = TypeId::new(th.player, converted.class_of[th.player.index()][th.index]);
            model.belief(merged).choice_marginals(opp(th.player)) == m.belief(th).choice_marginals(opp(th.player))
        });
        let result = TransformResult {
            direction: name,
            input_types: Player::BOTH.map(|p| m.num_types(p)),
            output_types: Player::BOTH.map(|p| model.num_types(p)),
            groups,
            checks: vec![check("choice marginals preserved", marginals)],
            output_path: None,
            output: None,
        };
        (
            loaded.inputs,
            result,
            format::complete_model_to_value(model, Some(&comment)),
        )
    };

    let mut result = result;
    match out {
        Some(o) => {
            if let Err(source) = fs::write(o, format::to_pretty(&output)) {
                let err = FormatError::Io {
                    path: o.display().to_string(),
                    source,
                };
                return RunReport::input_error(command, inputs, &err);
            }
            result.output_path = Some(o.display().to_string());
        }
        None => result.output = Some(output),
    }
    let ok = result.checks.iter().all(|c| c.pass != Some(false));
    let status = if ok { Status::Pass } else { Status::Fail };
    RunReport::new(command, inputs, status, Outcome::Transform(result))
}

pub fn cmd_verify_theorem(path: &Path) -> RunReport {
    let command = command_line("verify-theorem", path, "");
    let loaded = match format::load_game(path) {
        Ok(l) => l,
        Err(e) => return load_failure(command, path, &e),
    };
    let game = &loaded.value;
    let form = game.form();
    let r = match verify_theorem(game) {
        Ok(r) => r,
        Err(e) => return RunReport::check_error(command, loaded.inputs, e.to_string(), None),
    };
    let mismatch = r.mismatch.map(|mm| MismatchView {
        player: mm.player.number(),
        choice: form.label(mm.player, mm.choice).to_string(),
        source: match mm.source {
            Source::CompleteModel => "CAR-optimal choices of the synthesized complete model",
            Source::IncompleteModel => "condition (b)-optimal choices of the transformed incomplete model",
            Source::Converse => "converse through the reverse transformation",
        },
    });
    let result = TheoremResult {
        players: Player::BOTH.map(|p| form.player_name(p).to_string()),
        stable_round: r.rounds.stable_round(),
        witness_types: Player::BOTH.map(|p| r.witness.num_types(p)),
        transformed_types: Player::BOTH.map(|p| r.transformed.num_types(p)),
        survivors: label_sets(form, &r.survivors),
        car_optimal: label_sets(form, &r.car_optimal),
        incomplete_optimal: label_sets(form, &r.incomplete_optimal),
        converse_optimal: label_sets(form, &r.converse_optimal),
        agrees: r.agrees(),
        mismatch,
    };
    let status = if r.agrees() { Status::Pass } else { Status::Fail };
    RunReport::new(command, loaded.inputs, status, Outcome::Theorem(result))
}
