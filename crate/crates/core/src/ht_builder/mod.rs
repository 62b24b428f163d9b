//! Round-based construction of finite approximations of highly transitive,
//! highly faithful actions.
//!
//! Each round takes one demand. A transitivity demand `x_1..x_k -> y_1..y_k`
//! is discharged by [`Engine::key_extend`]: choose a path-type `gamma` whose
//! paths from the demand points end in pairwise disjoint half-trees outside
//! the core, re-route `tau` at the far end of those paths, and certify with an
//! explicit group element. A faithfulness witness is recorded every round.
//! Everything a certificate's evaluation relies on is then promoted into the
//! core (the frozen set), so later rounds, which only add `tau` entries at
//! frontier edges, never disturb it.

pub mod amalgam;
pub mod hnn;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::base_groups::{AmalgamBaseData, HnnBaseData, HnnFamily, Presentation};

pub use amalgam::AmalgamEngine;
pub use hnn::HnnEngine;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("preconditions failed: {0}")]
    Precondition(PreconditionReport),
    #[error("{what} cap of {cap} exceeded: {detail}")]
    CapExceeded { what: &'static str, cap: usize, detail: String },
    #[error("bad demand: {0}")]
    BadDemand(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Outcome of [`check_builder_preconditions`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PreconditionReport {
    pub rejections: Vec<String>,
    pub warnings: Vec<String>,
}

impl PreconditionReport {
    pub fn accepted(&self) -> bool {
        self.rejections.is_empty()
    }
}

impl fmt::Display for PreconditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted() {
            write!(f, "accepted")?;
        } else {
            write!(f, "rejected: {}", self.rejections.join("; "))?;
        }
        for w in &self.warnings {
            write!(f, " (warning: {w})")?;
        }
        Ok(())
    }
}

pub fn check_hnn_preconditions(data: &HnnBaseData) -> PreconditionReport {
    let mut r = PreconditionReport::default();
    if data.is_ascending() {
        r.rejections.push(format!("{} is ascending (Sigma or theta(Sigma) is all of H)", data.config()));
    }
    match data.family() {
        HnnFamily::BaumslagSolitar { m, n } => {
            if m.abs() == n.abs() {
                r.rejections.push(format!("|m| = |n| = {}: Sigma is normal, so the boundary action is not topologically free", m.abs()));
            }
        }
    }
    r
}

pub fn check_amalgam_preconditions(data: &AmalgamBaseData) -> PreconditionReport {
    let mut r = PreconditionReport::default();
    if !data.is_nondegenerate() {
        r.rejections.push(format!("{} is degenerate (needs indices >= 2 with one >= 3)", data.config()));
    }
    // both shipped factors are abelian, so a nontrivial Sigma is central
    if !data.sigma(crate::base_groups::Side::One).is_trivial() {
        r.rejections.push(format!("{}: Sigma is central, so the boundary action is not topologically free", data.config()));
    }
    r
}

pub fn check_builder_preconditions(p: &Presentation) -> PreconditionReport {
    match p {
        Presentation::Hnn(d) => check_hnn_preconditions(d),
        Presentation::Amalgam(d) => check_amalgam_preconditions(d),
    }
}

/// Search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Syllables explored by the separation search.
    pub separation: usize,
    /// Syllables appended while extending `gamma`.
    pub extension: usize,
    /// Candidate words tried per core orbit by the faithfulness search.
    pub witness: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { separation: 12, extension: 64, witness: 4096 }
    }
}

/// The demand-side interface the round loop needs from a family.
pub trait Engine: Clone + fmt::Debug {
    type Data: Clone + fmt::Debug;
    type Core: Clone + PartialEq + fmt::Debug;
    type Point: Copy + Ord + fmt::Display + fmt::Debug;
    type Word: Clone + PartialEq + fmt::Display + fmt::Debug;

    fn preconditions(data: &Self::Data) -> PreconditionReport;
    fn config(data: &Self::Data) -> String;
    /// A transitive core containing demand orbits `0..orbits`.
    fn initial_core(data: &Self::Data, orbits: u64) -> Self::Core;
    fn data(core: &Self::Core) -> &Self::Data;
    fn has_orbit(core: &Self::Core, orbit: u64) -> bool;
    fn point_orbit(p: &Self::Point) -> u64;
    fn parse_point(data: &Self::Data, text: &str) -> Option<Self::Point>;
    fn parse_word(data: &Self::Data, text: &str) -> Option<Self::Word>;
    fn is_trivial(w: &Self::Word) -> bool;
    fn enumerate(data: &Self::Data, count: usize) -> Vec<Self::Word>;
    fn key_extend(core: &Self::Core, xs: &[Self::Point], ys: &[Self::Point], caps: &Caps) -> Result<KeyExtension<Self>, BuildError>;
    /// A point moved by every element, with its orbit promoted into the core.
    fn witness(core: &Self::Core, elements: &[Self::Word], search: usize) -> Option<(Self::Core, Self::Point)>;
    /// `x g` in the globalization, when it lies in the core.
    fn eval(core: &Self::Core, x: Self::Point, g: &Self::Word) -> Option<Self::Point>;
    /// Promote every orbit the evaluation of `x g` passes through.
    fn freeze(core: &Self::Core, x: Self::Point, g: &Self::Word) -> Self::Core;
    /// The points whose `tau` values the evaluation of `x g` uses; `None`
    /// if one of them is outside the core.
    fn tau_points(core: &Self::Core, x: Self::Point, g: &Self::Word) -> Option<Vec<Self::Point>>;
    /// `tau` at a core point, rendered for comparison.
    fn tau_image(core: &Self::Core, x: Self::Point) -> Option<String>;
    fn serialize(core: &Self::Core) -> String;
    fn parse_core(text: &str) -> Result<Self::Core, String>;
    fn core_size(core: &Self::Core) -> (usize, usize);
    /// DOT of the ball of radius `radius` around the core.
    fn dot(core: &Self::Core, radius: usize) -> String;
}

/// Result of one key extension step.
#[derive(Debug, Clone)]
pub struct KeyExtension<E: Engine> {
    pub core: E::Core,
    /// The path-type element with disjoint half-trees.
    pub gamma: E::Word,
    /// The certifying element.
    pub certificate: E::Word,
    /// `ERASE` lines: `tau` values of the globalization that were redefined.
    pub erased: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Demand<P, W> {
    Transitivity { xs: Vec<P>, ys: Vec<P> },
    Faithfulness(W),
}

impl<P: fmt::Display, W: fmt::Display> fmt::Display for Demand<P, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Demand::Transitivity { xs, ys } => write!(f, "map {} -> {}", join(xs), join(ys)),
            Demand::Faithfulness(w) => write!(f, "moves \"{w}\""),
        }
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

impl<P: Copy + Ord, W> Demand<P, W> {
    /// Pairwise distinct, equal lengths, at least one pair.
    pub fn validate(&self) -> Result<(), BuildError> {
        if let Demand::Transitivity { xs, ys } = self {
            if xs.is_empty() || xs.len() != ys.len() {
                return Err(BuildError::BadDemand("tuples must be nonempty and of equal length".into()));
            }
            let all: BTreeSet<P> = xs.iter().chain(ys).copied().collect();
            if all.len() != 2 * xs.len() {
                return Err(BuildError::BadDemand("points must be pairwise distinct".into()));
            }
        }
        Ok(())
    }
}

/// Parse one demand line: `map (o,e) .. -> (o,e) ..` or `moves "word"`.
pub fn parse_demand<E: Engine>(data: &E::Data, line: &str) -> Result<Demand<E::Point, E::Word>, String> {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix("map ") {
        let (a, b) = rest.split_once("->").ok_or("expected `->`")?;
        let parse = |s: &str| -> Result<Vec<E::Point>, String> {
            split_points(s).iter().map(|t| E::parse_point(data, t).ok_or(format!("bad point {t}"))).collect()
        };
        let d = Demand::Transitivity { xs: parse(a)?, ys: parse(b)? };
        d.validate().map_err(|e| e.to_string())?;
        Ok(d)
    } else if let Some(rest) = line.strip_prefix("moves ") {
        let words = quoted(rest);
        let [w] = words.as_slice() else { return Err("expected one quoted word".into()) };
        let w = E::parse_word(data, w).ok_or(format!("bad word {w}"))?;
        if E::is_trivial(&w) {
            return Err("the identity moves nothing".into());
        }
        Ok(Demand::Faithfulness(w))
    } else {
        Err(format!("unknown demand `{line}`"))
    }
}

pub fn parse_demands<E: Engine>(data: &E::Data, text: &str) -> Result<Vec<Demand<E::Point, E::Word>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(n, l)| parse_demand::<E>(data, l).map_err(|e| format!("line {}: {e}", n + 1)))
        .collect()
}

/// `(a,b) (c,d)` into its parenthesised tokens.
fn split_points(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => cur = "(".into(),
            ')' => {
                cur.push(')');
                out.push(std::mem::take(&mut cur));
            }
            _ if !cur.is_empty() => cur.push(ch),
            _ => {}
        }
    }
    out
}

/// The contents of all `"..."` groups.
fn quoted(s: &str) -> Vec<String> {
    s.split('"').skip(1).step_by(2).map(str::to_string).collect()
}

/// A discharged demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<P, W> {
    /// `x_i gamma = y_i` for all `i`.
    Transitivity { xs: Vec<P>, ys: Vec<P>, gamma: W },
    /// `v g != v` for every listed `g`.
    Faithfulness { point: P, moves: Vec<W> },
}

impl<P: fmt::Display, W: fmt::Display> Certificate<P, W> {
    /// One `CERT` line, without the verification verdict.
    pub fn line(&self) -> String {
        match self {
            Certificate::Transitivity { xs, ys, gamma } => {
                format!("CERT transitivity k={} map {} -> {} gamma=\"{gamma}\"", xs.len(), join(xs), join(ys))
            }
            Certificate::Faithfulness { point, moves } => {
                let ws: Vec<String> = moves.iter().map(|w| format!("\"{w}\"")).collect();
                format!("CERT faithfulness n={} point={point} moves {}", moves.len(), ws.join(" "))
            }
        }
    }
}

pub fn parse_certificate<E: Engine>(data: &E::Data, line: &str) -> Result<Certificate<E::Point, E::Word>, String> {
    let line = line.trim();
    let line = line.strip_suffix(" verify=ok").or_else(|| line.strip_suffix(" verify=FAIL")).unwrap_or(line);
    if let Some(rest) = line.strip_prefix("CERT transitivity ") {
        let (_, rest) = rest.split_once(" map ").ok_or("expected `map`")?;
        let (pts, gamma) = rest.split_once(" gamma=").ok_or("expected `gamma=`")?;
        let (a, b) = pts.split_once("->").ok_or("expected `->`")?;
        let parse = |s: &str| -> Result<Vec<E::Point>, String> {
            split_points(s).iter().map(|t| E::parse_point(data, t).ok_or(format!("bad point {t}"))).collect()
        };
        let (xs, ys) = (parse(a)?, parse(b)?);
        if xs.len() != ys.len() || xs.is_empty() {
            return Err("tuples must be nonempty and of equal length".into());
        }
        let g = quoted(gamma);
        let [g] = g.as_slice() else { return Err("expected a quoted gamma".into()) };
        let gamma = E::parse_word(data, g).ok_or(format!("bad word {g}"))?;
        Ok(Certificate::Transitivity { xs, ys, gamma })
    } else if let Some(rest) = line.strip_prefix("CERT faithfulness ") {
        let (_, rest) = rest.split_once(" point=").ok_or("expected `point=`")?;
        let (p, words) = rest.split_once(" moves ").ok_or("expected `moves`")?;
        let point = E::parse_point(data, p).ok_or(format!("bad point {p}"))?;
        let moves = quoted(words)
            .iter()
            .map(|w| E::parse_word(data, w).ok_or(format!("bad word {w}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Certificate::Faithfulness { point, moves })
    } else {
        Err(format!("not a certificate line: `{line}`"))
    }
}

/// Pure re-evaluation of a certificate against a core.
pub fn verify_certificate<E: Engine>(core: &E::Core, cert: &Certificate<E::Point, E::Word>) -> bool {
    match cert {
        Certificate::Transitivity { xs, ys, gamma } => {
            xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(&x, &y)| E::has_orbit(core, E::point_orbit(&x)) && E::eval(core, x, gamma) == Some(y))
        }
        Certificate::Faithfulness { point, moves } => {
            E::has_orbit(core, E::point_orbit(point)) && moves.iter().all(|g| !E::is_trivial(g) && E::eval(core, *point, g) != Some(*point))
        }
    }
}

/// Check every `CERT` line of a certificates file against `core`. The
/// header must name the core's presentation.
pub fn verify_certificates_text<E: Engine>(core: &E::Core, text: &str) -> Result<Vec<(String, bool)>, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or("empty certificates file")?;
    let cfg = header.strip_prefix("certificates ").ok_or("expected a `certificates <presentation>` header")?;
    let expected = E::config(E::data(core));
    if cfg != expected {
        return Err(format!("presentation mismatch: certificates are for `{cfg}`, the pre-action is `{expected}`"));
    }
    lines
        .map(|l| {
            let cert = parse_certificate::<E>(E::data(core), l)?;
            Ok((cert.line(), verify_certificate::<E>(core, &cert)))
        })
        .collect()
}

/// Configuration of [`run_rounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundsConfig {
    pub rounds: usize,
    /// Round `n` records a point moved by the first `max(n + 1, faithful)`
    /// enumerated nontrivial elements.
    pub faithful: usize,
    pub caps: Caps,
}

impl Default for RoundsConfig {
    fn default() -> Self {
        RoundsConfig { rounds: 0, faithful: 10, caps: Caps::default() }
    }
}

/// Among the extensions of a word ending in `last` by `delta.len()`
/// syllables, ordered lexicographically by option index, the first one that
/// differs from `delta`. `options(prev)` lists the legal successors of `prev`.
pub(crate) fn other_extension<S: Copy + PartialEq>(last: S, delta: &[S], options: impl Fn(S) -> Vec<S>) -> Option<Vec<S>> {
    let greedy = |mut out: Vec<S>| {
        while out.len() < delta.len() {
            let prev = out.last().copied().unwrap_or(last);
            out.push(options(prev)[0]);
        }
        out
    };
    let first = greedy(Vec::new());
    if first != delta {
        return Some(first);
    }
    // lexicographic successor: bump the rightmost position that has a second option
    (0..delta.len()).rev().find_map(|k| {
        let prev = if k == 0 { last } else { first[k - 1] };
        let alt = *options(prev).get(1)?;
        let mut out = first[..k].to_vec();
        out.push(alt);
        Some(greedy(out))
    })
}

/// The state after a completed round.
#[derive(Debug, Clone)]
pub struct RoundRecord<E: Engine> {
    pub core: E::Core,
    /// Points whose `tau` values every later round must keep.
    pub frozen: BTreeSet<E::Point>,
}

#[derive(Debug, Clone)]
pub struct BuilderState<E: Engine> {
    pub core: E::Core,
    pub frozen: BTreeSet<E::Point>,
    pub certificates: Vec<Certificate<E::Point, E::Word>>,
    /// Index of the first demand not yet discharged.
    pub discharged: usize,
    /// Round 0 is the initial state.
    pub history: Vec<RoundRecord<E>>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome<E: Engine> {
    pub state: BuilderState<E>,
    pub transcript: Vec<String>,
    /// Set when a round failed; `state` is the last completed round.
    pub error: Option<BuildError>,
}

impl<E: Engine> RunOutcome<E> {
    pub fn transcript_text(&self) -> String {
        let mut s = self.transcript.join("\n");
        s.push('\n');
        s
    }

    /// Certificates file: one `CERT` line each, verified against the final core.
    pub fn certificates_text(&self) -> String {
        let mut s = format!("certificates {}\n", E::config(E::data(&self.state.core)));
        for c in &self.state.certificates {
            let ok = verify_certificate::<E>(&self.state.core, c);
            s.push_str(&format!("{} verify={}\n", c.line(), if ok { "ok" } else { "FAIL" }));
        }
        s
    }

    pub fn all_verify(&self) -> bool {
        self.state.certificates.iter().all(|c| verify_certificate::<E>(&self.state.core, c))
    }
}

/// Run `config.rounds` rounds, taking demand `n` in round `n` when there is
/// one. A failing round leaves the previous state and records the error.
pub fn run_rounds<E: Engine>(data: &E::Data, demands: &[Demand<E::Point, E::Word>], config: &RoundsConfig) -> Result<RunOutcome<E>, BuildError> {
    let report = E::preconditions(data);
    if !report.accepted() {
        return Err(BuildError::Precondition(report));
    }
    for d in demands {
        d.validate()?;
    }
    let orbits = demands
        .iter()
        .flat_map(|d| match d {
            Demand::Transitivity { xs, ys } => xs.iter().chain(ys).map(E::point_orbit).collect(),
            Demand::Faithfulness(_) => Vec::new(),
        })
        .max()
        .map_or(1, |o| o + 1);
    let core = E::initial_core(data, orbits);
    let mut transcript = vec![format!("PRESENTATION {}", E::config(data))];
    for w in &report.warnings {
        transcript.push(format!("WARNING {w}"));
    }
    let (n1, n2) = E::core_size(&core);
    transcript.push(format!("INIT orbits={n1} entries={n2}"));
    let mut state = BuilderState {
        core: core.clone(),
        frozen: BTreeSet::new(),
        certificates: Vec::new(),
        discharged: 0,
        history: vec![RoundRecord { core, frozen: BTreeSet::new() }],
    };
    for round in 1..=config.rounds {
        let demand = demands.get(round - 1);
        match run_round::<E>(&state, round, demand, config) {
            Ok((next, lines)) => {
                transcript.extend(lines);
                state = next;
            }
            Err(e) => {
                transcript.push(format!("ROUND {round} FAILED {e}"));
                return Ok(RunOutcome { state, transcript, error: Some(e) });
            }
        }
    }
    Ok(RunOutcome { state, transcript, error: None })
}

fn run_round<E: Engine>(
    state: &BuilderState<E>,
    round: usize,
    demand: Option<&Demand<E::Point, E::Word>>,
    config: &RoundsConfig,
) -> Result<(BuilderState<E>, Vec<String>), BuildError> {
    let mut lines = Vec::new();
    let mut core = state.core.clone();
    let mut new_certs = Vec::new();
    match demand {
        Some(d) => lines.push(format!("ROUND {round} demand {d}")),
        None => lines.push(format!("ROUND {round}")),
    }
    match demand {
        Some(Demand::Transitivity { xs, ys }) => {
            let step = E::key_extend(&core, xs, ys, &config.caps)?;
            lines.push(format!("GAMMA \"{}\"", step.gamma));
            lines.extend(step.erased.iter().cloned());
            core = step.core;
            new_certs.push(Certificate::Transitivity { xs: xs.clone(), ys: ys.clone(), gamma: step.certificate });
        }
        Some(Demand::Faithfulness(g)) => {
            let (c, v) = E::witness(&core, std::slice::from_ref(g), config.caps.witness)
                .ok_or_else(|| BuildError::CapExceeded { what: "witness", cap: config.caps.witness, detail: format!("no point moved by {g}") })?;
            core = c;
            new_certs.push(Certificate::Faithfulness { point: v, moves: vec![g.clone()] });
        }
        None => {}
    }
    let count = (round + 1).max(config.faithful);
    let elements = E::enumerate(E::data(&core), count);
    let (c, v) = E::witness(&core, &elements, config.caps.witness)
        .ok_or_else(|| BuildError::CapExceeded { what: "witness", cap: config.caps.witness, detail: format!("no point moved by the first {count} elements") })?;
    core = c;
    new_certs.push(Certificate::Faithfulness { point: v, moves: elements });

    // freeze everything the new certificates evaluate through
    let evaluations = |c: &Certificate<E::Point, E::Word>| -> Vec<(E::Point, E::Word)> {
        match c {
            Certificate::Transitivity { xs, gamma, .. } => xs.iter().map(|&x| (x, gamma.clone())).collect(),
            Certificate::Faithfulness { point, moves } => moves.iter().map(|g| (*point, g.clone())).collect(),
        }
    };
    for cert in &new_certs {
        for (x, g) in evaluations(cert) {
            core = E::freeze(&core, x, &g);
        }
    }
    let mut frozen = state.frozen.clone();
    for cert in &new_certs {
        if let Certificate::Transitivity { xs, ys, .. } = cert {
            frozen.extend(xs.iter().chain(ys).copied());
        }
        for (x, g) in evaluations(cert) {
            let pts = E::tau_points(&core, x, &g).ok_or_else(|| BuildError::Internal(format!("trace of {x} {g} leaves the core")))?;
            frozen.extend(pts);
        }
    }
    // the earlier frozen set keeps its tau values
    for &p in &state.frozen {
        if E::tau_image(&core, p) != E::tau_image(&state.core, p) {
            return Err(BuildError::Internal(format!("tau changed at frozen point {p}")));
        }
    }
    let mut certificates = state.certificates.clone();
    for c in new_certs {
        let ok = verify_certificate::<E>(&core, &c);
        lines.push(format!("{} verify={}", c.line(), if ok { "ok" } else { "FAIL" }));
        if !ok {
            return Err(BuildError::Internal(format!("fresh certificate fails: {}", c.line())));
        }
        certificates.push(c);
    }
    for c in &certificates {
        if !verify_certificate::<E>(&core, c) {
            return Err(BuildError::Internal(format!("earlier certificate fails: {}", c.line())));
        }
    }
    let (n1, n2) = E::core_size(&core);
    lines.push(format!("FROZEN points={} orbits={n1} entries={n2}", frozen.len()));
    let mut history = state.history.clone();
    history.push(RoundRecord { core: core.clone(), frozen: frozen.clone() });
    let discharged = state.discharged + usize::from(demand.is_some());
    Ok((BuilderState { core, frozen, certificates, discharged, history }, lines))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_groups::{make_bs_presentation, zmod_amalgam, zmod_free_product};

    #[test]
    fn precondition_examples() {
        assert!(check_hnn_preconditions(&make_bs_presentation(2, 3).unwrap()).accepted());
        assert!(check_hnn_preconditions(&make_bs_presentation(-2, 5).unwrap()).accepted());
        let r = check_hnn_preconditions(&make_bs_presentation(2, 2).unwrap());
        assert!(!r.accepted() && r.to_string().contains("|m| = |n|"));
        let r = check_hnn_preconditions(&make_bs_presentation(1, 2).unwrap());
        assert!(!r.accepted() && r.to_string().contains("ascending"));
        assert!(!check_hnn_preconditions(&make_bs_presentation(3, -1).unwrap()).accepted());
        assert!(check_amalgam_preconditions(&zmod_free_product(2, 3).unwrap()).accepted());
        assert!(!check_amalgam_preconditions(&zmod_free_product(2, 2).unwrap()).accepted());
        assert!(!check_amalgam_preconditions(&zmod_amalgam(4, 6, 2).unwrap()).accepted());
    }

    #[test]
    fn token_helpers() {
        assert_eq!(split_points(" (0,1) (2,-3)"), vec!["(0,1)", "(2,-3)"]);
        assert_eq!(quoted(r#""h1 t" "T""#), vec!["h1 t", "T"]);
    }
}
