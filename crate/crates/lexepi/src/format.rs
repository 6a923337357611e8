//! JSON file formats for games, complete models and incomplete models.
//!
//! Rationals are strings (`"3/4"`, `"-2"`). Utility matrices are objects
//! keyed `"(own,opp)"`, oriented by their owner: player 2's keys name a
//! player-2 choice first. A model's `"game"` is either an inline game object
//! or a path resolved against the model file's directory.
//!
//! Every semantic error names the JSON location it was found at, in the form
//! `$.types[2].belief[0][1].p`.

use std::{
    collections::BTreeMap,
    fs,
    path::{Path, PathBuf},
};

use lexepi_core::{
    BeliefLevel, CompleteModel, CompleteType, Game, GameForm, IncompleteModel, IncompleteType, LexBelief, Pair, Player,
    Rational, TypeId, UtilityFn,
};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}line {line}, column {column}: {message}")]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}{location}: {message}")]
    Invalid {
        file: String,
        location: String,
        message: String,
    },
}

impl FormatError {
    fn invalid(location: &str, message: impl Into<String>) -> Self {
        FormatError::Invalid {
            file: String::new(),
            location: location.to_string(),
            message: message.into(),
        }
    }

    /// Prefixes the location with the file it came from.
    fn in_file(self, path: &Path) -> Self {
        let prefix = format!("{}: ", path.display());
        match self {
            FormatError::Syntax {
                file,
                line,
                column,
                message,
            } if file.is_empty() => FormatError::Syntax {
                file: prefix,
                line,
                column,
                message,
            },
            FormatError::Invalid {
                file,
                location,
                message,
            } if file.is_empty() => FormatError::Invalid {
                file: prefix,
                location,
                message,
            },
            other => other,
        }
    }

    /// The JSON location or `line:column` of the error, when known.
    pub fn location(&self) -> Option<String> {
        match self {
            FormatError::Io { .. } => None,
            FormatError::Syntax { line, column, .. } => Some(format!("{line}:{column}")),
            FormatError::Invalid { location, .. } => Some(location.clone()),
        }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// A file that went into a run, with the SHA-256 of its bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

impl InputFile {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// A parsed file together with every file read to build it.
#[derive(Clone, Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub inputs: Vec<InputFile>,
}

fn read(path: &Path, inputs: &mut Vec<InputFile>) -> Result<String> {
    let bytes = fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    inputs.push(InputFile::new(path, &bytes));
    String::from_utf8(bytes).map_err(|e| FormatError::invalid("$", format!("not UTF-8: {e}")).in_file(path))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        file: String::new(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_game(path: &Path) -> Result<Loaded<Game>> {
    let mut inputs = Vec::new();
    let text = read(path, &mut inputs)?;
    let value = parse_game(&text).map_err(|e| e.in_file(path))?;
    Ok(Loaded { value, inputs })
}

pub fn load_complete_model(path: &Path) -> Result<Loaded<CompleteModel>> {
    let mut inputs = Vec::new();
    let text = read(path, &mut inputs)?;
    let value = parse_json(&text)
        .and_then(|v| complete_model_from_value(&v, base_dir(path), &mut inputs))
        .map_err(|e| e.in_file(path))?;
    Ok(Loaded { value, inputs })
}

pub fn load_incomplete_model(path: &Path) -> Result<Loaded<IncompleteModel>> {
    let mut inputs = Vec::new();
    let text = read(path, &mut inputs)?;
    let value = parse_json(&text)
        .and_then(|v| incomplete_model_from_value(&v, base_dir(path), &mut inputs))
        .map_err(|e| e.in_file(path))?;
    Ok(Loaded { value, inputs })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn parse_game(text: &str) -> Result<Game> {
    game_from_value(&parse_json(text)?, "$")
}

/// Parses a complete model; a referenced game path is resolved against `base`.
pub fn parse_complete_model(text: &str, base: &Path) -> Result<CompleteModel> {
    complete_model_from_value(&parse_json(text)?, base.to_path_buf(), &mut Vec::new())
}

pub fn parse_incomplete_model(text: &str, base: &Path) -> Result<IncompleteModel> {
    incomplete_model_from_value(&parse_json(text)?, base.to_path_buf(), &mut Vec::new())
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| FormatError::invalid(at, "expected an object"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| FormatError::invalid(at, "expected an array"))
}

fn string<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| FormatError::invalid(at, "expected a string"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| FormatError::invalid(at, format!("missing field `{key}`")))
}

fn rational(v: &Value, at: &str) -> Result<Rational> {
    let s = v
        .as_str()
        .ok_or_else(|| FormatError::invalid(at, "expected a rational string such as \"3/4\""))?;
    s.parse()
        .map_err(|_| FormatError::invalid(at, format!("malformed rational `{s}`")))
}

fn form_from_value(v: &Value, at: &str) -> Result<GameForm> {
    let players_at = format!("{at}.players");
    let players = array(field(object(v, at)?, "players", at)?, &players_at)?;
    if players.len() != 2 {
        return Err(FormatError::invalid(&players_at, "expected exactly two players"));
    }
    let mut names: [String; 2] = Default::default();
    let mut choices: [Vec<String>; 2] = Default::default();
    for (i, p) in players.iter().enumerate() {
        let pat = format!("{players_at}[{i}]");
        let obj = object(p, &pat)?;
        names[i] = match obj.get("name") {
            Some(n) => string(n, &format!("{pat}.name"))?.to_string(),
            None => (i + 1).to_string(),
        };
        let cat = format!("{pat}.choices");
        let list = array(field(obj, "choices", &pat)?, &cat)?;
        if list.is_empty() {
            return Err(FormatError::invalid(&cat, "a player needs at least one choice"));
        }
        for (k, c) in list.iter().enumerate() {
            let lat = format!("{cat}[{k}]");
            let label = string(c, &lat)?;
            if label.is_empty() || label.trim() != label || label.contains(['(', ')', ',']) {
                return Err(FormatError::invalid(
                    &lat,
                    format!("choice label `{label}` must be nonempty, without surrounding spaces, `(`, `)` or `,`"),
                ));
            }
            if choices[i].iter().any(|x| x == label) {
                return Err(FormatError::invalid(&lat, format!("duplicate choice label `{label}`")));
            }
            choices[i].push(label.to_string());
        }
    }
    GameForm::new(names, choices).map_err(|e| FormatError::invalid(&players_at, e.to_string()))
}

/// Parses a matrix keyed `"(own,opp)"` for player `p`; every cell is required.
fn utility_from_value(v: &Value, form: &GameForm, p: Player, at: &str) -> Result<UtilityFn> {
    let obj = object(v, at)?;
    let (own, opp) = (form.num_choices(p), form.num_choices(p.opponent()));
    let mut cells: Vec<Option<Rational>> = vec![None; own * opp];
    for (key, cell) in obj {
        let kat = format!("{at}.\"{key}\"");
        let inner = key
            .trim()
            .strip_prefix('(')
            .and_then(|k| k.strip_suffix(')'))
            .ok_or_else(|| FormatError::invalid(&kat, "cell keys look like \"(own,opp)\""))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| FormatError::invalid(&kat, "cell keys look like \"(own,opp)\""))?;
        let a = form
            .choice_index(p, a.trim())
            .map_err(|_| FormatError::invalid(&kat, format!("`{}` is not a choice of player {p}", a.trim())))?;
        let b = form.choice_index(p.opponent(), b.trim()).map_err(|_| {
            FormatError::invalid(
                &kat,
                format!("`{}` is not a choice of player {}", b.trim(), p.opponent()),
            )
        })?;
        let slot = &mut cells[a * opp + b];
        if slot.is_some() {
            return Err(FormatError::invalid(&kat, "cell given twice"));
        }
        *slot = Some(rational(cell, &kat)?);
    }
    let mut out = Vec::with_capacity(cells.len());
    for (k, cell) in cells.into_iter().enumerate() {
        match cell {
            Some(r) => out.push(r),
            None => {
                let (a, b) = (k / opp, k % opp);
                return Err(FormatError::invalid(
                    at,
                    format!("missing cell ({},{})", form.label(p, a), form.label(p.opponent(), b)),
                ));
            }
        }
    }
    UtilityFn::new(own, opp, out).map_err(|e| FormatError::invalid(at, e.to_string()))
}

fn utility_pair(v: &Value, form: &GameForm, at: &str) -> Result<[UtilityFn; 2]> {
    let list = array(v, at)?;
    if list.len() != 2 {
        return Err(FormatError::invalid(at, "expected one utility matrix per player"));
    }
    Ok([
        utility_from_value(&list[0], form, Player::One, &format!("{at}[0]"))?,
        utility_from_value(&list[1], form, Player::Two, &format!("{at}[1]"))?,
    ])
}

fn game_from_value(v: &Value, at: &str) -> Result<Game> {
    let form = form_from_value(v, at)?;
    let uat = format!("{at}.utilities");
    let utilities = utility_pair(field(object(v, at)?, "utilities", at)?, &form, &uat)?;
    Game::new(form, utilities).map_err(|e| FormatError::invalid(at, e.to_string()))
}

/// The model's `"game"` member, inline or read from a path, with the
/// location prefix for errors and the file it came from.
fn embedded_game(
    m: &Map<String, Value>,
    base: &Path,
    inputs: &mut Vec<InputFile>,
) -> Result<(Value, String, Option<PathBuf>)> {
    match field(m, "game", "$")? {
        Value::String(rel) => {
            let path = base.join(rel);
            let text = read(&path, inputs)?;
            let parsed = parse_json(&text).map_err(|e| e.in_file(&path))?;
            Ok((parsed, "$".to_string(), Some(path)))
        }
        other => Ok((other.clone(), "$.game".to_string(), None)),
    }
}

fn attribute<T>(r: Result<T>, source: &Option<PathBuf>) -> Result<T> {
    match source {
        Some(path) => r.map_err(|e| e.in_file(path)),
        None => r,
    }
}

struct RawType<'a> {
    player: Player,
    name: String,
    value: &'a Map<String, Value>,
    at: String,
}

fn raw_types(m: &Map<String, Value>) -> Result<Vec<RawType<'_>>> {
    let list = array(field(m, "types", "$")?, "$.types")?;
    let mut out = Vec::with_capacity(list.len());
    for (k, t) in list.iter().enumerate() {
        let at = format!("$.types[{k}]");
        let obj = object(t, &at)?;
        let pat = format!("{at}.player");
        let player = match field(obj, "player", &at)?.as_u64() {
            Some(1) => Player::One,
            Some(2) => Player::Two,
            _ => return Err(FormatError::invalid(&pat, "player must be 1 or 2")),
        };
        let name = string(field(obj, "name", &at)?, &format!("{at}.name"))?.to_string();
        if out.iter().any(|r: &RawType| r.player == player && r.name == name) {
            return Err(FormatError::invalid(
                &format!("{at}.name"),
                format!("duplicate type name `{name}` for player {player}"),
            ));
        }
        out.push(RawType {
            player,
            name,
            value: obj,
            at,
        });
    }
    Ok(out)
}

fn belief_from_value(
    v: &Value,
    form: &GameForm,
    owner: Player,
    opp_types: &BTreeMap<&str, usize>,
    at: &str,
) -> Result<LexBelief> {
    let q = owner.opponent();
    let levels = array(v, at)?;
    if levels.is_empty() {
        return Err(FormatError::invalid(at, "a belief needs at least one level"));
    }
    let mut out = Vec::with_capacity(levels.len());
    for (l, level) in levels.iter().enumerate() {
        let lat = format!("{at}[{l}]");
        let entries = array(level, &lat)?;
        if entries.is_empty() {
            return Err(FormatError::invalid(&lat, "a level needs at least one entry"));
        }
        let mut pairs = Vec::with_capacity(entries.len());
        for (k, e) in entries.iter().enumerate() {
            let eat = format!("{lat}[{k}]");
            let obj = object(e, &eat)?;
            let cat = format!("{eat}.choice");
            let label = string(field(obj, "choice", &eat)?, &cat)?;
            let choice = form
                .choice_index(q, label)
                .map_err(|_| FormatError::invalid(&cat, format!("`{label}` is not a choice of player {q}")))?;
            let tat = format!("{eat}.type");
            let tname = string(field(obj, "type", &eat)?, &tat)?;
            let ty = *opp_types
                .get(tname)
                .ok_or_else(|| FormatError::invalid(&tat, format!("`{tname}` is not a type of player {q}")))?;
            let p = match obj.get("p") {
                Some(p) => rational(p, &format!("{eat}.p"))?,
                None => Rational::one(),
            };
            pairs.push((Pair::new(choice, ty), p));
        }
        out.push(BeliefLevel::new(pairs).map_err(|e| FormatError::invalid(&lat, e.to_string()))?);
    }
    LexBelief::new(out).map_err(|e| FormatError::invalid(at, e.to_string()))
}

fn type_index<'a>(raw: &'a [RawType<'_>]) -> [BTreeMap<&'a str, usize>; 2] {
    let mut index: [BTreeMap<&str, usize>; 2] = Default::default();
    for r in raw {
        let map = &mut index[r.player.index()];
        let next = map.len();
        map.insert(r.name.as_str(), next);
    }
    index
}

fn complete_model_from_value(v: &Value, base: PathBuf, inputs: &mut Vec<InputFile>) -> Result<CompleteModel> {
    let m = object(v, "$")?;
    let (gv, gat, source) = embedded_game(m, &base, inputs)?;
    let game = attribute(game_from_value(&gv, &gat), &source)?;
    let raw = raw_types(m)?;
    let index = type_index(&raw);
    let mut types: [Vec<CompleteType>; 2] = Default::default();
    for r in &raw {
        let bat = format!("{}.belief", r.at);
        let belief = belief_from_value(
            field(r.value, "belief", &r.at)?,
            game.form(),
            r.player,
            &index[r.player.opponent().index()],
            &bat,
        )?;
        types[r.player.index()].push(CompleteType::new(r.name.clone(), belief));
    }
    CompleteModel::new(game, types).map_err(|e| FormatError::invalid("$.types", e.to_string()))
}

fn incomplete_model_from_value(v: &Value, base: PathBuf, inputs: &mut Vec<InputFile>) -> Result<IncompleteModel> {
    let m = object(v, "$")?;
    let (gv, gat, source) = embedded_game(m, &base, inputs)?;
    let form = attribute(form_from_value(&gv, &gat), &source)?;
    let reference_u = utility_pair(field(m, "reference_u", "$")?, &form, "$.reference_u")?;
    if let Some(u) = object(&gv, &gat)?.get("utilities") {
        let uat = format!("{gat}.utilities");
        if attribute(utility_pair(u, &form, &uat), &source)? != reference_u {
            return Err(FormatError::invalid(
                "$.reference_u",
                "differs from the game's utilities",
            ));
        }
    }
    let raw = raw_types(m)?;
    let index = type_index(&raw);
    let mut types: [Vec<IncompleteType>; 2] = Default::default();
    for r in &raw {
        let uat = format!("{}.utility", r.at);
        let utility = utility_from_value(field(r.value, "utility", &r.at)?, &form, r.player, &uat)?;
        let bat = format!("{}.belief", r.at);
        let belief = belief_from_value(
            field(r.value, "belief", &r.at)?,
            &form,
            r.player,
            &index[r.player.opponent().index()],
            &bat,
        )?;
        types[r.player.index()].push(IncompleteType::new(r.name.clone(), utility, belief));
    }
    IncompleteModel::new(form, reference_u, types).map_err(|e| FormatError::invalid("$.types", e.to_string()))
}

fn form_to_value(form: &GameForm) -> Value {
    let players: Vec<Value> = Player::BOTH
        .iter()
        .map(|&p| json!({ "name": form.player_name(p), "choices": form.choices(p) }))
        .collect();
    json!({ "players": players })
}

pub fn utility_to_value(form: &GameForm, p: Player, v: &UtilityFn) -> Value {
    let mut map = Map::new();
    for (a, own) in form.choices(p).iter().enumerate() {
        for (b, opp) in form.choices(p.opponent()).iter().enumerate() {
            map.insert(format!("({own},{opp})"), Value::String(v.get(a, b).to_string()));
        }
    }
    Value::Object(map)
}

fn utility_pair_to_value(form: &GameForm, u: &[UtilityFn; 2]) -> Value {
    Value::Array(
        Player::BOTH
            .iter()
            .map(|&p| utility_to_value(form, p, &u[p.index()]))
            .collect(),
    )
}

pub fn game_to_value(game: &Game) -> Value {
    let mut v = form_to_value(game.form());
    v["utilities"] = utility_pair_to_value(game.form(), game.utilities());
    v
}

fn belief_to_value(form: &GameForm, owner: Player, belief: &LexBelief, name_of: impl Fn(usize) -> String) -> Value {
    let q = owner.opponent();
    Value::Array(
        belief
            .levels()
            .iter()
            .map(|level| {
                Value::Array(
                    level
                        .iter()
                        .map(|(pair, w)| {
                            json!({
                                "choice": form.label(q, pair.choice),
                                "type": name_of(pair.ty),
                                "p": w.to_string(),
                            })
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn with_comment(comment: Option<&str>, mut body: Map<String, Value>) -> Value {
    if let Some(c) = comment {
        let mut out = Map::new();
        out.insert("comment".into(), Value::String(c.to_string()));
        out.append(&mut body);
        return Value::Object(out);
    }
    Value::Object(body)
}

/// The model in file form, with the game inlined.
pub fn complete_model_to_value(m: &CompleteModel, comment: Option<&str>) -> Value {
    let form = m.game().form();
    let types: Vec<Value> = m
        .type_ids()
        .map(|t| {
            let q = t.player.opponent();
            json!({
                "player": t.player.number(),
                "name": m.type_name(t),
                "belief": belief_to_value(form, t.player, m.belief(t), |k| m.type_name(TypeId::new(q, k)).to_string()),
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("game".into(), game_to_value(m.game()));
    body.insert("types".into(), Value::Array(types));
    with_comment(comment, body)
}

pub fn incomplete_model_to_value(m: &IncompleteModel, comment: Option<&str>) -> Value {
    let form = m.form();
    let types: Vec<Value> = m
        .type_ids()
        .map(|t| {
            let q = t.player.opponent();
            json!({
                "player": t.player.number(),
                "name": m.type_name(t),
                "utility": utility_to_value(form, t.player, m.utility(t)),
                "belief": belief_to_value(form, t.player, m.belief(t), |k| m.type_name(TypeId::new(q, k)).to_string()),
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("game".into(), form_to_value(form));
    body.insert("reference_u".into(), utility_pair_to_value(form, m.reference_u()));
    body.insert("types".into(), Value::Array(types));
    with_comment(comment, body)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}
