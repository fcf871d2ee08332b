//! Scenario and trace files.
//!
//! ```text
//! # comment
//! universe people=2 spaces=1 records=1 providers=0 operators=1
//! register_consumer p1 m1
//! restrict_record p1 p1 r1 expect deny
//! ```
//!
//! One `universe` header, then one event per line with an optional trailing
//! `expect ok|deny`. `#` starts a comment anywhere on a line. Identifiers are
//! checked against the declared universe while parsing.

use std::fmt;

use thiserror::Error;

use crate::ids::{Universe, UniverseSize};
use crate::kernel::{Arg, Event, Outcome, Trace};

/// The outcome a scenario line asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Expectation {
    Ok,
    Deny,
}

impl Expectation {
    pub fn matches(self, outcome: &Outcome) -> bool {
        match self {
            Expectation::Ok => outcome.is_applied(),
            Expectation::Deny => !outcome.is_applied(),
        }
    }

    pub fn of(outcome: &Outcome) -> Self {
        if outcome.is_applied() {
            Expectation::Ok
        } else {
            Expectation::Deny
        }
    }
}

impl serde::Serialize for Expectation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Ok => "ok",
            Expectation::Deny => "deny",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioStep {
    /// 1-based source line.
    pub line: usize,
    pub event: Event,
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub universe: UniverseSize,
    pub steps: Vec<ScenarioStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("`{event}` takes {expected} argument(s), found {found}")]
    Arity {
        event: String,
        expected: usize,
        found: usize,
    },
    #[error("`{token}` is not a valid {expected}")]
    BadArgument {
        token: String,
        expected: &'static str,
    },
    #[error("identifier `{0}` is outside the declared universe")]
    OutsideUniverse(String),
}

/// A parse failure with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// A whitespace-separated token with its 1-based column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    out
}

fn error(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn parse_header(line: usize, tokens: &[Token<'_>]) -> Result<UniverseSize, ParseError> {
    let mut values: [Option<u16>; 5] = [None; 5];
    const KEYS: [&str; 5] = ["people", "spaces", "records", "providers", "operators"];
    for token in &tokens[1..] {
        let syntax = |msg: String| error(line, token.column, ParseErrorKind::Syntax(msg));
        let (key, value) = token
            .text
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected key=value, found `{}`", token.text)))?;
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| syntax(format!("unknown universe key `{key}`")))?;
        if values[slot].is_some() {
            return Err(syntax(format!("duplicate universe key `{key}`")));
        }
        let n = value
            .parse::<u16>()
            .map_err(|_| syntax(format!("`{value}` is not a valid count for `{key}`")))?;
        values[slot] = Some(n);
    }
    if let Some(missing) = KEYS.iter().zip(values).find(|(_, v)| v.is_none()) {
        return Err(error(
            line,
            tokens[0].column,
            ParseErrorKind::Syntax(format!("universe header is missing `{}`", missing.0)),
        ));
    }
    let [people, spaces, records, providers, operators] = values.map(Option::unwrap);
    Ok(UniverseSize {
        people,
        spaces,
        records,
        providers,
        operators,
    })
}

fn parse_event_tokens(
    line: usize,
    tokens: &[Token<'_>],
    universe: &Universe,
) -> Result<(Event, Option<Expectation>), ParseError> {
    let (mut body, mut expect) = (tokens, None);
    if let Some(pos) = tokens.iter().position(|t| t.text == "expect") {
        let at = &tokens[pos];
        match &tokens[pos + 1..] {
            [value] => {
                expect = Some(match value.text {
                    "ok" => Expectation::Ok,
                    "deny" => Expectation::Deny,
                    other => {
                        return Err(error(
                            line,
                            value.column,
                            ParseErrorKind::Syntax(format!(
                                "expectation must be `ok` or `deny`, found `{other}`"
                            )),
                        ))
                    }
                });
                body = &tokens[..pos];
            }
            _ => {
                return Err(error(
                    line,
                    at.column,
                    ParseErrorKind::Syntax(
                        "`expect` must be followed by exactly `ok` or `deny`".into(),
                    ),
                ))
            }
        }
    }
    let name = body.first().ok_or_else(|| {
        error(
            line,
            tokens[0].column,
            ParseErrorKind::Syntax("missing event name before `expect`".into()),
        )
    })?;
    let kinds = Event::signature(name.text).ok_or_else(|| {
        error(
            line,
            name.column,
            ParseErrorKind::UnknownEvent(name.text.to_string()),
        )
    })?;
    let args = &body[1..];
    if args.len() != kinds.len() {
        let column = args.get(kinds.len()).map_or(name.column, |t| t.column);
        return Err(error(
            line,
            column,
            ParseErrorKind::Arity {
                event: name.text.to_string(),
                expected: kinds.len(),
                found: args.len(),
            },
        ));
    }
    let mut parsed = Vec::with_capacity(args.len());
    for (token, kind) in args.iter().zip(kinds.iter()) {
        let arg = Arg::parse(*kind, token.text).map_err(|_| {
            error(
                line,
                token.column,
                ParseErrorKind::BadArgument {
                    token: token.text.to_string(),
                    expected: kind.describe(),
                },
            )
        })?;
        if !arg.in_universe(universe) {
            return Err(error(
                line,
                token.column,
                ParseErrorKind::OutsideUniverse(token.text.to_string()),
            ));
        }
        parsed.push(arg);
    }
    let event = Event::from_args(name.text, &parsed).expect("arguments match the signature");
    Ok((event, expect))
}

/// Parses a single event line against `universe`. Blank or comment-only
/// lines yield `None`.
pub fn parse_event_line(
    text: &str,
    universe: &Universe,
) -> Result<Option<(Event, Option<Expectation>)>, ParseError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Ok(None);
    }
    parse_event_tokens(1, &tokens, universe).map(Some)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut universe: Option<(UniverseSize, Universe)> = None;
    let mut steps = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let tokens = tokenize(raw);
        let Some(first) = tokens.first() else {
            continue;
        };
        if first.text == "universe" {
            if universe.is_some() {
                return Err(error(
                    line,
                    first.column,
                    ParseErrorKind::Syntax("duplicate universe header".into()),
                ));
            }
            if !steps.is_empty() {
                return Err(error(
                    line,
                    first.column,
                    ParseErrorKind::Syntax("universe header must precede all events".into()),
                ));
            }
            let size = parse_header(line, &tokens)?;
            universe = Some((size, Universe::new(size)));
            continue;
        }
        if Event::signature(first.text).is_none() {
            return Err(error(
                line,
                first.column,
                ParseErrorKind::UnknownEvent(first.text.to_string()),
            ));
        }
        let Some((_, u)) = &universe else {
            return Err(error(
                line,
                first.column,
                ParseErrorKind::Syntax("expected `universe` header before events".into()),
            ));
        };
        let (event, expect) = parse_event_tokens(line, &tokens, u)?;
        steps.push(ScenarioStep {
            line,
            event,
            expect,
        });
    }
    let (universe, _) = universe.ok_or_else(|| {
        error(
            text.lines().count().max(1),
            1,
            ParseErrorKind::Syntax("missing `universe` header".into()),
        )
    })?;
    Ok(Scenario { universe, steps })
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.universe)?;
        for step in &self.steps {
            write!(f, "{}", step.event)?;
            if let Some(expect) = step.expect {
                write!(f, " expect {expect}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Renders a recorded trace as a scenario file that asserts every outcome.
pub fn render_trace(universe: UniverseSize, trace: &Trace, comments: &[String]) -> String {
    let scenario = Scenario {
        universe,
        steps: trace
            .steps
            .iter()
            .enumerate()
            .map(|(i, step)| ScenarioStep {
                line: i + 2,
                event: step.event,
                expect: Some(Expectation::of(&step.outcome)),
            })
            .collect(),
    };
    let mut out = String::new();
    for comment in comments {
        for line in comment.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(&scenario.to_string());
    out
}
