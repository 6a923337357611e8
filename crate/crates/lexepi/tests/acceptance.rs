//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. The random corpus is drawn from `LEXEPI_SEED` (default below).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lexepi::format::{load_complete_model, load_game, load_incomplete_model};
use lexepi_core::incomplete::{construct_supporting_utility, Property};
use lexepi_core::solver::{iterated_admissibility, synthesize_car_model, weakly_dominated};
use lexepi_core::theorem::verify_theorem;
use lexepi_core::transform::{
    check_observation_rationality, check_observation_redundancy, complete_to_incomplete, incomplete_to_complete,
    isomorphic_complete,
};
use lexepi_core::{
    BeliefLevel, CompleteModel, CompleteType, Game, GameForm, IncompleteModel, IncompleteType, LexBelief, Pair, Player,
    Rational, TypeId, UtilityFn,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEFAULT_SEED: u64 = 0x1e7e_5eed;
const CORPUS_SIZE: usize = 207;
const MIN_LEMMA_INSTANCES: usize = 100;
const MIN_SUPPORT_TRIPLES: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rational(rng.gen_range(-5..=5), rng.gen_range(1..=6))
}

fn random_utility(rng: &mut ChaCha8Rng, own: usize, opp: usize) -> UtilityFn {
    UtilityFn::from_fn(own, opp, |_, _| random_rational(rng))
}

fn form(n1: usize, n2: usize) -> GameForm {
    let c1: Vec<String> = (0..n1).map(|k| format!("a{k}")).collect();
    let c2: Vec<String> = (0..n2).map(|k| format!("b{k}")).collect();
    GameForm::from_labels(&c1, &c2).expect("distinct labels")
}

/// Positive weights summing to one.
fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| rational(w, total)).collect()
}

/// Splits `pairs` (already shuffled) into 1..=3 consecutive levels.
fn random_belief(rng: &mut ChaCha8Rng, pairs: &[Pair]) -> LexBelief {
    let max_levels = pairs.len().min(3);
    let levels = rng.gen_range(1..=max_levels);
    let mut cuts: Vec<usize> = (1..pairs.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(levels - 1).collect();
    cuts.sort_unstable();
    cuts.push(pairs.len());
    let mut start = 0;
    let mut out = Vec::new();
    for end in cuts {
        let chunk = &pairs[start..end];
        let weights = random_distribution(rng, chunk.len());
        out.push(BeliefLevel::new(chunk.iter().copied().zip(weights)).expect("valid level"));
        start = end;
    }
    LexBelief::new(out).expect("valid belief")
}

/// Pairs over a random nonempty set of opponent types; occasionally one pair
/// is dropped so that caution can fail.
fn random_pairs(rng: &mut ChaCha8Rng, opp_choices: usize, opp_types: usize) -> Vec<Pair> {
    let mut tys: Vec<usize> = (0..opp_types).filter(|_| rng.gen_bool(0.6)).collect();
    if tys.is_empty() {
        tys.push(rng.gen_range(0..opp_types));
    }
    let mut pairs: Vec<Pair> = tys
        .iter()
        .flat_map(|&t| (0..opp_choices).map(move |c| Pair::new(c, t)))
        .collect();
    pairs.shuffle(rng);
    if pairs.len() > 1 && rng.gen_bool(0.2) {
        pairs.pop();
    }
    pairs
}

fn random_complete_model(rng: &mut ChaCha8Rng, game: &Game) -> CompleteModel {
    let counts = [rng.gen_range(1..=3), rng.gen_range(1..=3)];
    let types = Player::BOTH.map(|p| {
        let (opp_choices, opp_types) = (game.form().num_choices(p.opponent()), counts[p.opponent().index()]);
        (0..counts[p.index()])
            .map(|k| {
                let pairs = random_pairs(rng, opp_choices, opp_types);
                CompleteType::new(format!("r{}_{k}", p.number()), random_belief(rng, &pairs))
            })
            .collect()
    });
    CompleteModel::new(game.clone(), types).expect("valid random model")
}

fn random_incomplete_model(rng: &mut ChaCha8Rng, game: &Game) -> IncompleteModel {
    let counts = [rng.gen_range(1..=4), rng.gen_range(1..=4)];
    let types = Player::BOTH.map(|p| {
        let (own, opp) = (game.form().num_choices(p), game.form().num_choices(p.opponent()));
        let opp_types = counts[p.opponent().index()];
        let mut out: Vec<IncompleteType> = Vec::new();
        for k in 0..counts[p.index()] {
            let utility = if rng.gen_bool(0.5) {
                game.utility_fn(p).clone()
            } else {
                random_utility(rng, own, opp)
            };
            let belief = match out.last() {
                Some(prev) if rng.gen_bool(0.4) => prev.belief.clone(),
                _ => {
                    let pairs = random_pairs(rng, opp, opp_types);
                    random_belief(rng, &pairs)
                }
            };
            out.push(IncompleteType::new(format!("q{}_{k}", p.number()), utility, belief));
        }
        out
    });
    IncompleteModel::new(game.form().clone(), game.utilities().clone(), types).expect("valid random model")
}

/// Re-draws the utility of some types that do not carry the reference
/// utility, and redirects some believed pairs to another type with the same
/// belief.
fn perturb(rng: &mut ChaCha8Rng, m: &IncompleteModel) -> IncompleteModel {
    let mut types = [m.types(Player::One).to_vec(), m.types(Player::Two).to_vec()];
    for p in Player::BOTH {
        let (own, opp) = (m.form().num_choices(p), m.form().num_choices(p.opponent()));
        for (k, ty) in types[p.index()].iter_mut().enumerate() {
            if !m.carries_reference(TypeId::new(p, k)) && rng.gen_bool(0.5) {
                ty.utility = random_utility(rng, own, opp);
            }
        }
    }
    for p in Player::BOTH {
        let opp = m.types(p.opponent());
        for ty in types[p.index()].iter_mut() {
            let mut redirect = |pair: Pair| {
                let twins: Vec<usize> = (0..opp.len())
                    .filter(|&t| opp[t].belief == opp[pair.ty].belief)
                    .collect();
                if twins.len() > 1 && rng.gen_bool(0.3) {
                    Pair::new(pair.choice, *twins.choose(rng).expect("nonempty"))
                } else {
                    pair
                }
            };
            let levels = ty
                .belief
                .levels()
                .iter()
                .map(|level| {
                    let mut entries: Vec<(Pair, Rational)> = Vec::new();
                    for (pair, w) in level.iter() {
                        let target = redirect(*pair);
                        match entries.iter_mut().find(|(q, _)| *q == target) {
                            Some((_, acc)) => *acc += w,
                            None => entries.push((target, w.clone())),
                        }
                    }
                    BeliefLevel::new(entries).expect("valid level")
                })
                .collect::<Vec<_>>();
            // a redirected pair may now occur on two levels; keep its first
            let mut seen = BTreeSet::new();
            let levels: Vec<BeliefLevel> = levels
                .into_iter()
                .filter_map(|level| {
                    let kept: Vec<(Pair, Rational)> = level
                        .iter()
                        .filter(|(q, _)| !seen.contains(*q))
                        .map(|(q, w)| (*q, w.clone()))
                        .collect();
                    seen.extend(kept.iter().map(|(q, _)| *q));
                    if kept.is_empty() {
                        return None;
                    }
                    let total: Rational = kept.iter().map(|(_, w)| w).sum();
                    Some(BeliefLevel::new(kept.into_iter().map(|(q, w)| (q, w / &total))).expect("valid level"))
                })
                .collect();
            ty.belief = LexBelief::new(levels).expect("valid belief");
        }
    }
    IncompleteModel::new(m.form().clone(), m.reference_u().clone(), types).expect("valid perturbed model")
}

struct Corpus {
    games: Vec<(String, Game)>,
}

impl Corpus {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut games = Vec::new();
        for k in 0..CORPUS_SIZE {
            let (n1, n2) = (2 + k % 3, 2 + (k / 3) % 3);
            let utilities = [random_utility(rng, n1, n2), random_utility(rng, n2, n1)];
            games.push((
                format!("random#{k}"),
                Game::new(form(n1, n2), utilities).expect("valid game"),
            ));
        }
        for name in ["ex32.game.json", "pennies.game.json", "one.game.json"] {
            games.push((name.into(), load_game(&fixture(name)).expect("fixture loads").value));
        }
        Self { games }
    }
}

fn labels(form: &GameForm, p: Player, set: &BTreeSet<usize>) -> BTreeSet<String> {
    set.iter().map(|&c| form.label(p, c).to_string()).collect()
}

fn criterion_example_model() -> Outcome {
    let m = match load_complete_model(&fixture("ex32.complete.json")) {
        Ok(m) => m.value,
        Err(e) => return Outcome::new(false, format!("load failed: {e}")),
    };
    let report = match m.common_assumption() {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("checker failed: {e}")),
    };
    let caution = m.common_caution();
    let form = m.game().form();
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, p, expected) in [("t1", Player::One, "A"), ("t2", Player::Two, "D")] {
        let Some(t) = m.type_id(p, name) else {
            return Outcome::new(false, format!("type {name} missing"));
        };
        let optimal = labels(form, p, &m.optimal_choices(t));
        let ok = m.is_cautious(t)
            && caution[p.index()][t.index]
            && report.final_holds(t)
            && optimal == BTreeSet::from([expected.to_string()]);
        pass &= ok;
        notes.push(format!(
            "{name}: optimal {optimal:?} {}",
            if ok { "ok" } else { "WRONG" }
        ));
    }
    Outcome::new(pass, notes.join("; "))
}

fn criterion_example_transforms() -> Outcome {
    let m = load_complete_model(&fixture("ex32.complete.json"))
        .expect("fixture loads")
        .value;
    let mut failures = Vec::new();

    let split = match complete_to_incomplete(&m) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, format!("co2in failed: {e}")),
    };
    let inc = &split.model;
    if [inc.num_types(Player::One), inc.num_types(Player::Two)] != [2, 2] {
        failures.push("co2in does not give two types per player".to_string());
    }
    if split.groups != [vec![vec![0, 1]], vec![vec![0, 1]]] {
        failures.push(format!("unexpected grouping {:?}", split.groups));
    }
    for p in Player::BOTH {
        if !inc.carries_reference(TypeId::new(p, 0)) || inc.carries_reference(TypeId::new(p, 1)) {
            failures.push(format!("player {}: only the first split should carry u", p.number()));
        }
    }
    let expected = [
        LexBelief::sequence(&[Pair::new(1, 0), Pair::new(0, 1)]).unwrap(),
        LexBelief::sequence(&[Pair::new(0, 0), Pair::new(1, 1)]).unwrap(),
    ];
    for p in Player::BOTH {
        for ty in inc.types(p) {
            if ty.belief != expected[p.index()] {
                failures.push(format!("{} has an unexpected belief", ty.name));
            }
        }
    }
    if !check_observation_redundancy(inc, &split.groups) || !check_observation_rationality(inc) {
        failures.push("observations fail on the split model".into());
    }

    match incomplete_to_complete(inc) {
        Ok(back) if isomorphic_complete(&back.model, &m) => {}
        Ok(_) => failures.push("round trip is not isomorphic".into()),
        Err(e) => failures.push(format!("round trip failed: {e}")),
    }

    let ex33 = load_incomplete_model(&fixture("ex33.incomplete.json"))
        .expect("fixture loads")
        .value;
    match incomplete_to_complete(&ex33) {
        Ok(merged) => {
            let co = &merged.model;
            let want = [
                (
                    "th11",
                    LexBelief::sequence(&[Pair::new(1, 0), Pair::new(0, 0)]).unwrap(),
                ),
                (
                    "th21",
                    LexBelief::sequence(&[Pair::new(0, 0), Pair::new(1, 0)]).unwrap(),
                ),
            ];
            for p in Player::BOTH {
                let (name, belief) = &want[p.index()];
                let ok = co.num_types(p) == 1 && co.types(p)[0].name == *name && co.types(p)[0].belief == *belief;
                if !ok {
                    failures.push(format!(
                        "in2co: player {} type is not {name} with the listed belief",
                        p.number()
                    ));
                }
            }
        }
        Err(e) => failures.push(format!("in2co failed: {e}")),
    }

    if failures.is_empty() {
        Outcome::new(
            true,
            "co2in: 4 types, grouping and observations ok; in2co: 2 types; round trip isomorphic",
        )
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn criterion_theorem(corpus: &Corpus) -> Outcome {
    let mut disagreements = Vec::new();
    for (name, game) in &corpus.games {
        match verify_theorem(game) {
            Ok(r) => {
                let same = r.survivors == r.car_optimal
                    && r.survivors == r.incomplete_optimal
                    && r.survivors == r.converse_optimal;
                if !same || !r.agrees() {
                    disagreements.push(name.clone());
                }
            }
            Err(e) => disagreements.push(format!("{name} ({e})")),
        }
    }
    Outcome::new(
        disagreements.is_empty(),
        format!(
            "{} games, {} disagreements{}",
            corpus.games.len(),
            disagreements.len(),
            first_few(&disagreements)
        ),
    )
}

fn first_few(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        let shown: Vec<&str> = items.iter().take(5).map(String::as_str).collect();
        format!(": {}", shown.join(", "))
    }
}

#[derive(Default)]
struct Tally {
    accepted: usize,
    violations: Vec<String>,
}

impl Tally {
    fn record(&mut self, holds: bool, what: impl FnOnce() -> String) {
        self.accepted += 1;
        if !holds {
            self.violations.push(what());
        }
    }

    fn ok(&self) -> bool {
        self.accepted >= MIN_LEMMA_INSTANCES && self.violations.is_empty()
    }

    fn summary(&self, name: &str) -> String {
        format!(
            "{name} {} accepted/{} violations{}",
            self.accepted,
            self.violations.len(),
            first_few(&self.violations)
        )
    }
}

/// Common caution of every type survives co2in, and a type expressing
/// common assumption of rationality splits into types passing common
/// supported-and-prior belief.
fn complete_side(
    m: &CompleteModel,
    label: &str,
    caution_split: &mut Tally,
    car_split: &mut Tally,
) -> Result<(), String> {
    let split = complete_to_incomplete(m).map_err(|e| format!("{label}: co2in failed: {e}"))?;
    let caution = m.common_caution();
    if m.type_ids().all(|t| caution[t.player.index()][t.index]) {
        let out = split
            .model
            .common_full_belief(Property::Caution)
            .map_err(|e| e.to_string())?;
        caution_split.record(out.iter().flatten().all(|&b| b), || label.to_string());
    }
    let car = m.common_assumption().map_err(|e| e.to_string())?;
    let sp = split.model.common_supported_and_prior().map_err(|e| e.to_string())?;
    for t in m.type_ids().filter(|&t| car.final_holds(t)) {
        let group = &split.groups[t.player.index()][t.index];
        let holds = group.iter().all(|&th| sp.final_holds(TypeId::new(t.player, th)));
        car_split.record(holds, || format!("{label}/{}", m.type_name(t)));
    }
    Ok(())
}

/// Common caution of a type carries over to its merged type, and so does
/// condition (b) to common assumption of rationality.
fn incomplete_side(
    m: &IncompleteModel,
    label: &str,
    caution_merge: &mut Tally,
    car_merge: &mut Tally,
) -> Result<(), String> {
    let back = incomplete_to_complete(m).map_err(|e| format!("{label}: in2co failed: {e}"))?;
    let caution_in = m.common_full_belief(Property::Caution).map_err(|e| e.to_string())?;
    let caution_co = back.model.common_caution();
    let cond_b = m.condition_b().map_err(|e| e.to_string())?;
    let car = back.model.common_assumption().map_err(|e| e.to_string())?;
    for th in m.type_ids() {
        let merged = TypeId::new(th.player, back.class_of[th.player.index()][th.index]);
        if caution_in[th.player.index()][th.index] {
            caution_merge.record(caution_co[th.player.index()][merged.index], || {
                format!("{label}/{}", m.type_name(th))
            });
        }
        if cond_b[th.player.index()][th.index] {
            car_merge.record(car.final_holds(merged), || format!("{label}/{}", m.type_name(th)));
        }
    }
    Ok(())
}

fn criterion_lemmas(corpus: &Corpus, rng: &mut ChaCha8Rng) -> Outcome {
    let (mut caution_split, mut caution_merge, mut car_split, mut car_merge) = Default::default();
    let (mut caution_merge_arb, mut car_merge_arb) = (Tally::default(), Tally::default());
    let mut errors = Vec::new();
    for (name, game) in &corpus.games {
        let mut completes = Vec::new();
        match synthesize_car_model(game) {
            Ok(m) => completes.push((format!("{name}/synth"), m)),
            Err(e) => errors.push(format!("{name}: synthesis failed: {e}")),
        }
        completes.push((format!("{name}/random"), random_complete_model(rng, game)));

        for (label, m) in &completes {
            if let Err(e) = complete_side(m, label, &mut caution_split, &mut car_split) {
                errors.push(e);
                continue;
            }
            let image = complete_to_incomplete(m).expect("checked above").model;
            if let Err(e) = incomplete_side(&image, &format!("{label}/co2in"), &mut caution_merge, &mut car_merge) {
                errors.push(e);
            }
            let perturbed = perturb(rng, &image);
            if let Err(e) = incomplete_side(
                &perturbed,
                &format!("{label}/perturbed"),
                &mut caution_merge_arb,
                &mut car_merge_arb,
            ) {
                errors.push(e);
            }
        }
        let arbitrary = random_incomplete_model(rng, game);
        if let Err(e) = incomplete_side(
            &arbitrary,
            &format!("{name}/arbitrary"),
            &mut caution_merge_arb,
            &mut car_merge_arb,
        ) {
            errors.push(e);
        }
    }
    // the lemmas are stated for arbitrary incomplete models, so both pools count
    let merge = |a: Tally, b: Tally| Tally {
        accepted: a.accepted + b.accepted,
        violations: a.violations.into_iter().chain(b.violations).collect(),
    };
    let images_only = format!(
        "(CAR merge on co2in images alone: {} accepted/{} violations)",
        car_merge.accepted,
        car_merge.violations.len()
    );
    let caution_merge_all = merge(caution_merge, caution_merge_arb);
    let car_merge_all = merge(car_merge, car_merge_arb);
    let tallies = [
        ("caution split", &caution_split),
        ("caution merge", &caution_merge_all),
        ("CAR split", &car_split),
        ("CAR merge", &car_merge_all),
    ];
    let pass = errors.is_empty() && tallies.iter().all(|(_, t)| t.ok());
    let mut detail: Vec<String> = tallies.iter().map(|(n, t)| t.summary(n)).collect();
    detail.push(images_only);
    if !errors.is_empty() {
        detail.push(format!("{} errors{}", errors.len(), first_few(&errors)));
    }
    Outcome::new(pass, detail.join("; "))
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> BTreeSet<usize> {
    let mut s: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if s.is_empty() {
        s.insert(rng.gen_range(0..n));
    }
    s
}

/// Lexicographic expected utility of every own choice, computed directly.
fn lex_eu(v: &UtilityFn, marginals: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..v.own_choices())
        .map(|a| {
            marginals
                .iter()
                .map(|dist| {
                    let mut total = Rational::zero();
                    for (b, w) in dist.iter().enumerate() {
                        total += &(w * v.get(a, b));
                    }
                    total
                })
                .collect()
        })
        .collect()
}

fn criterion_supporting_utility(rng: &mut ChaCha8Rng) -> Outcome {
    let mut violations = Vec::new();
    for k in 0..MIN_SUPPORT_TRIPLES {
        let (n1, n2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let f = form(n1, n2);
        let p = if rng.gen_bool(0.5) { Player::One } else { Player::Two };
        let (own, opp) = (f.num_choices(p), f.num_choices(p.opponent()));
        let good = random_subset(rng, own);
        let marginals: Vec<Vec<Rational>> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let support = random_subset(rng, opp);
                let weights = random_distribution(rng, support.len());
                let mut dist = vec![Rational::zero(); opp];
                for (&b, w) in support.iter().zip(weights) {
                    dist[b] = w;
                }
                dist
            })
            .collect();
        let v = match construct_supporting_utility(&f, p, &good, &marginals) {
            Ok(v) => v,
            Err(e) => {
                violations.push(format!("#{k}: {e}"));
                continue;
            }
        };
        if v.own_choices() != own || v.opponent_choices() != opp {
            violations.push(format!("#{k}: wrong shape"));
            continue;
        }
        let eu = lex_eu(&v, &marginals);
        let best = eu.iter().max_by(|a, b| a.cmp(b)).expect("nonempty");
        if good.iter().any(|&c| eu[c].cmp(best) != Ordering::Equal) {
            violations.push(format!("#{k}: a requested choice is not optimal"));
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "{MIN_SUPPORT_TRIPLES} triples, {} violations{}",
            violations.len(),
            first_few(&violations)
        ),
    )
}

/// Every distribution over `n` outcomes whose weights have denominators at
/// most eight.
fn grid(n: usize) -> Vec<Vec<Rational>> {
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    for d in 1..=8 {
        for k in 0..=d {
            points.insert(rational(k, d));
        }
    }
    let points: Vec<Rational> = points.into_iter().collect();
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                points.iter().map(move |w| {
                    let mut next = prefix.clone();
                    next.push(w.clone());
                    next
                })
            })
            .filter(|x| x.iter().sum::<Rational>() <= Rational::one())
            .collect();
    }
    out.into_iter()
        .filter_map(|mut x| {
            let last = Rational::one() - x.iter().sum::<Rational>();
            if last.denom() <= &8.into() {
                x.push(last);
                Some(x)
            } else {
                None
            }
        })
        .collect()
}

/// `mix` is a distribution on `own` that is never worse than `c` on `opp`
/// and strictly better somewhere.
fn dominates(v: &UtilityFn, own: &[usize], mix: &[Rational], c: usize, opp: &BTreeSet<usize>) -> bool {
    let mut strict = false;
    for &b in opp {
        let mut value = Rational::zero();
        for (&a, w) in own.iter().zip(mix) {
            value += &(w * v.get(a, b));
        }
        match value.cmp(v.get(c, b)) {
            Ordering::Less => return false,
            Ordering::Greater => strict = true,
            Ordering::Equal => {}
        }
    }
    strict
}

fn replay(v: &UtilityFn, own: &BTreeSet<usize>, opp: &BTreeSet<usize>, c: usize, mixture: &[Rational]) -> bool {
    let outside_zero = mixture.iter().enumerate().all(|(a, w)| own.contains(&a) || w.is_zero());
    let sums_to_one = mixture.iter().sum::<Rational>() == Rational::one();
    let nonneg = mixture.iter().all(|w| !w.is_negative());
    let own_list: Vec<usize> = own.iter().copied().collect();
    let weights: Vec<Rational> = own_list.iter().map(|&a| mixture[a].clone()).collect();
    outside_zero && sums_to_one && nonneg && dominates(v, &own_list, &weights, c, opp)
}

fn criterion_dominance(corpus: &Corpus) -> Outcome {
    let grids: Vec<Vec<Vec<Rational>>> = (0..=3).map(|n| if n == 0 { Vec::new() } else { grid(n) }).collect();
    let (mut games, mut checks, mut disagreements) = (0, 0, Vec::new());
    for (name, game) in &corpus.games {
        let f = game.form();
        let sizes = (f.num_choices(Player::One), f.num_choices(Player::Two));
        if sizes != (2, 2) && sizes != (3, 3) {
            continue;
        }
        games += 1;
        let rounds = match iterated_admissibility(game) {
            Ok(r) => r,
            Err(e) => {
                disagreements.push(format!("{name}: {e}"));
                continue;
            }
        };
        let mut contexts: Vec<[BTreeSet<usize>; 2]> = rounds.rounds().to_vec();
        contexts.dedup();
        for sets in &contexts {
            for p in Player::BOTH {
                let (own, opp) = (&sets[p.index()], &sets[p.opponent().index()]);
                let v = game.utility_fn(p);
                let own_list: Vec<usize> = own.iter().copied().collect();
                for &c in own {
                    checks += 1;
                    let lp = match weakly_dominated(v, own, opp, c) {
                        Ok(r) => r,
                        Err(e) => {
                            disagreements.push(format!("{name}: {e}"));
                            continue;
                        }
                    };
                    let grid_hit = grids[own.len()].iter().any(|mix| dominates(v, &own_list, mix, c, opp));
                    let bad = match &lp {
                        Some(mix) => !replay(v, own, opp, c, mix),
                        None => grid_hit,
                    };
                    if bad {
                        disagreements.push(format!("{name}/p{}/{}", p.number(), f.label(p, c)));
                    }
                }
            }
        }
    }
    Outcome::new(
        disagreements.is_empty() && games > 0,
        format!(
            "{games} games, {checks} checks, {} disagreements{}",
            disagreements.len(),
            first_few(&disagreements)
        ),
    )
}

/// A hand-built incomplete model where a type passes condition (b) yet its
/// merged type fails common assumption of rationality.
fn gap_note() -> String {
    let m = load_incomplete_model(&fixture("if_gap.incomplete.json"))
        .expect("fixture loads")
        .value;
    let th = m.type_id(Player::One, "th11").expect("type exists");
    let cond_b = m.condition_b().expect("checker runs")[0][th.index];
    let back = incomplete_to_complete(&m).expect("merge runs");
    let merged = TypeId::new(Player::One, back.class_of[0][th.index]);
    let car = back
        .model
        .common_assumption()
        .expect("checker runs")
        .final_holds(merged);
    let optimal = labels(m.form(), Player::One, &m.optimal_choices(th));
    let survivors = labels(
        m.form(),
        Player::One,
        &m.reference_rounds().expect("solver runs").survivors()[0],
    );
    format!(
        "if_gap.incomplete.json th11: condition (b) {cond_b}, merged type CAR {car}, optimal {optimal:?}, IA survivors {survivors:?}"
    )
}

fn main() -> ExitCode {
    let seed = std::env::var("LEXEPI_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = Corpus::new(&mut rng);
    println!("acceptance: seed {seed}, {} corpus games", corpus.games.len());

    type Run<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + 'a>;
    let criteria: Vec<(u8, &str, Option<Duration>, Run)> = vec![
        (
            1,
            "example model reproduction",
            Some(Duration::from_secs(1)),
            Box::new(|_| criterion_example_model()),
        ),
        (
            2,
            "example transforms",
            Some(Duration::from_secs(1)),
            Box::new(|_| criterion_example_transforms()),
        ),
        (
            3,
            "theorem on corpus",
            Some(Duration::from_secs(60)),
            Box::new(|_| criterion_theorem(&corpus)),
        ),
        (4, "lemma suite", None, Box::new(|rng| criterion_lemmas(&corpus, rng))),
        (5, "supporting utility", None, Box::new(criterion_supporting_utility)),
        (6, "dominance oracle", None, Box::new(|_| criterion_dominance(&corpus))),
    ];

    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run(&mut rng);
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = outcome.pass && in_time;
        failed += usize::from(!pass);
        let budget = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
        println!(
            "[{}] {id} {name}: {} ({elapsed:.2?}{budget})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("[INFO] {}", gap_note());

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
