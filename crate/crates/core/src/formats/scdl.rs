//! SCDL, the line-oriented statechart source format.
//!
//! ```text
//! statechart "<Name>" subject "<noun phrase>"
//! state <StateName...>
//! final [<StateName...>]
//! initial -> <Target> : on "<event>" [ if "<guard>" ] { then "<effect>" }*
//! <Source> -> <Target> : on "<event>" [ if "<guard>" ] { then "<effect>" }*
//! ```
//!
//! `#` starts a comment outside strings. State references are matched
//! case-insensitively; `initial` names the implicit initial pseudostate.

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{Code, Error, Result};
use crate::guard::parse_guard;
use crate::model::{validate, StateId, StateKind, Statechart};

const INITIAL: &str = "initial";

/// Parses SCDL and rejects charts that do not validate. Validation errors
/// carry the line that declared the offending state or transition.
pub fn parse_scdl(text: &str) -> Result<Statechart> {
    let (chart, lines) = read(text)?;
    let report = validate(&chart);
    if let Some(first) = report.errors.first() {
        let line = first
            .subject
            .as_ref()
            .and_then(|s| lines.get(s).copied())
            .unwrap_or(lines.header);
        let mut message = first.message.clone();
        if report.errors.len() > 1 {
            write!(message, " (and {} more)", report.errors.len() - 1).unwrap();
        }
        return Err(Error::at_line(first.code, line, message));
    }
    Ok(chart)
}

/// Parses SCDL syntax only; the result may fail validation.
pub fn parse_scdl_unchecked(text: &str) -> Result<Statechart> {
    read(text).map(|(chart, _)| chart)
}

#[derive(Default)]
struct LineMap {
    header: usize,
    by_id: HashMap<String, usize>,
}

impl LineMap {
    fn get(&self, id: &str) -> Option<&usize> {
        self.by_id.get(id)
    }
}

struct PendingTransition {
    line: usize,
    source: String,
    target: String,
    event: String,
    guard: Option<String>,
    effects: Vec<String>,
}

fn read(text: &str) -> Result<(Statechart, LineMap)> {
    let mut chart: Option<Statechart> = None;
    let mut lines = LineMap::default();
    let mut pending = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: &str| Error::at_line(Code::ScdlSyntax, line_no, msg.to_string());

        if let Some(rest) = keyword_rest(line, "statechart").filter(|r| r.starts_with('"')) {
            if chart.is_some() {
                return Err(syntax("duplicate statechart header"));
            }
            let mut cursor = Cursor::new(rest, line_no);
            let name = cursor.string()?;
            cursor.keyword("subject")?;
            let subject = cursor.string()?;
            cursor.end()?;
            let mut c = Statechart::new(name, subject);
            c.add_state(StateKind::Initial, INITIAL);
            chart = Some(c);
            lines.header = line_no;
            continue;
        }

        let Some(c) = chart.as_mut() else {
            return Err(syntax("expected the statechart header first"));
        };

        if let Some(arrow) = line.find("->") {
            pending.push(read_transition(line, arrow, line_no)?);
        } else if let Some(name) = keyword_rest(line, "state") {
            if name.is_empty() {
                return Err(syntax("state declaration needs a name"));
            }
            let id = c.add_state(StateKind::Simple, name);
            lines.by_id.insert(id.0, line_no);
        } else if let Some(name) = keyword_rest(line, "final") {
            let name = if name.is_empty() {
                StateKind::Final.default_name()
            } else {
                name
            };
            let id = c.add_state(StateKind::Final, name);
            lines.by_id.insert(id.0, line_no);
        } else {
            return Err(syntax("unrecognised line"));
        }
    }

    let Some(mut chart) = chart else {
        return Err(Error::at_line(
            Code::ScdlSyntax,
            text.lines().count().max(1),
            "missing statechart header",
        ));
    };

    let initial = chart
        .initial()
        .map(|s| s.id.clone())
        .expect("header adds it");
    for p in pending {
        let resolve = |name: &str| -> Result<StateId> {
            if name.eq_ignore_ascii_case(INITIAL) {
                return Ok(initial.clone());
            }
            chart
                .state_by_name(name)
                .map(|s| s.id.clone())
                .ok_or_else(|| {
                    Error::at_line(
                        Code::ScdlUnknownState,
                        p.line,
                        format!("state {name:?} is not declared"),
                    )
                })
        };
        let source = resolve(&p.source)?;
        let target = resolve(&p.target)?;
        let guard = p
            .guard
            .as_deref()
            .map(parse_guard)
            .transpose()
            .map_err(|e| e.with_line(p.line))?;
        let id = chart.add_transition(source, target, p.event, guard, p.effects);
        lines.by_id.insert(id.0, p.line);
    }
    Ok((chart, lines))
}

fn read_transition(line: &str, arrow: usize, line_no: usize) -> Result<PendingTransition> {
    let syntax = |msg: &str| Error::at_line(Code::ScdlSyntax, line_no, msg.to_string());
    let source = line[..arrow].trim();
    let after = &line[arrow + 2..];
    let colon = after
        .find(':')
        .ok_or_else(|| syntax("expected ':' after the target state"))?;
    let target = after[..colon].trim();
    if source.is_empty() || target.is_empty() {
        return Err(syntax("transition needs a source and a target"));
    }
    let mut cursor = Cursor::new(after[colon + 1..].trim_start(), line_no);
    cursor.keyword("on")?;
    let event = cursor.string()?;
    let mut guard = None;
    if cursor.try_keyword("if") {
        guard = Some(cursor.string()?);
    }
    let mut effects = Vec::new();
    while cursor.try_keyword("then") {
        effects.push(cursor.string()?);
    }
    cursor.end()?;
    Ok(PendingTransition {
        line: line_no,
        source: source.to_string(),
        target: target.to_string(),
        event,
        guard,
        effects,
    })
}

/// Text after `word` when the line starts with that whole word.
fn keyword_rest<'a>(line: &'a str, word: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(word)?;
    if rest.is_empty() {
        Some(rest)
    } else if rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(rest: &'a str, line: usize) -> Self {
        Cursor { rest, line }
    }

    fn error(&self, msg: String) -> Error {
        Error::at_line(Code::ScdlSyntax, self.line, msg)
    }

    fn try_keyword(&mut self, word: &str) -> bool {
        let trimmed = self.rest.trim_start();
        match trimmed.strip_prefix(word) {
            Some(after) if after.is_empty() || after.starts_with(char::is_whitespace) => {
                self.rest = after.trim_start();
                true
            }
            _ => false,
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        if self.try_keyword(word) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{word}'")))
        }
    }

    fn string(&mut self) -> Result<String> {
        let trimmed = self.rest.trim_start();
        let Some(body) = trimmed.strip_prefix('"') else {
            return Err(self.error("expected a double-quoted string".into()));
        };
        let mut out = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = body[i + 1..].trim_start();
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, '"')) => out.push('"'),
                    Some((_, '\\')) => out.push('\\'),
                    Some((_, other)) => {
                        out.push('\\');
                        out.push(other);
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.error("unterminated string".into()))
    }

    fn end(&self) -> Result<()> {
        if self.rest.trim().is_empty() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing text {:?}", self.rest.trim())))
        }
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn check_representable(chart: &Statechart) -> Result<()> {
    for s in &chart.states {
        if s.kind == StateKind::Initial {
            continue;
        }
        let problem = if s.name.eq_ignore_ascii_case(INITIAL) {
            Some("clashes with the initial keyword")
        } else if s.name.contains("->") || s.name.contains(':') || s.name.contains('#') {
            Some("contains '->', ':' or '#'")
        } else if s.kind == StateKind::Simple && s.name.starts_with("statechart \"") {
            Some("reads as a header")
        } else {
            None
        };
        if let Some(problem) = problem {
            return Err(Error::new(
                Code::InvalidModel,
                format!(
                    "state name {:?} cannot be written as SCDL: it {problem}",
                    s.name
                ),
            ));
        }
    }
    Ok(())
}

/// Canonical SCDL: header, state declarations in order of first use by a
/// transition (unused states last), then transitions in declaration order.
pub fn render_scdl(chart: &Statechart) -> Result<String> {
    chart.ensure_valid()?;
    check_representable(chart)?;

    let mut order: Vec<&StateId> = Vec::new();
    let used = chart
        .transitions
        .iter()
        .flat_map(|t| [&t.source, &t.target]);
    for id in used.chain(chart.states.iter().map(|s| &s.id)) {
        if !order.contains(&id) {
            order.push(id);
        }
    }

    let mut out = String::new();
    writeln!(
        out,
        "statechart {} subject {}",
        quote(&chart.name),
        quote(&chart.subject)
    )
    .unwrap();
    for id in order {
        let state = chart.state(id).expect("validated");
        match state.kind {
            StateKind::Initial => {}
            StateKind::Simple => writeln!(out, "state {}", state.name).unwrap(),
            StateKind::Final if state.is_anonymous_final() => writeln!(out, "final").unwrap(),
            StateKind::Final => writeln!(out, "final {}", state.name).unwrap(),
        }
    }
    for t in &chart.transitions {
        let name = |id: &StateId| {
            if chart.is_initial(id) {
                INITIAL.to_string()
            } else {
                chart.state_name(id).to_string()
            }
        };
        write!(
            out,
            "{} -> {} : on {}",
            name(&t.source),
            name(&t.target),
            quote(&t.event)
        )
        .unwrap();
        if let Some(guard) = &t.guard {
            write!(out, " if {}", quote(&guard.to_string())).unwrap();
        }
        for effect in &t.effects {
            write!(out, " then {}", quote(effect)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
