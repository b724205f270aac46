//! Condition language used in guards and clause texts.
//!
//! Guards are boolean skeletons over free-text atoms:
//!
//! ```text
//! expr  := or
//! or    := and ( OR and )*
//! and   := unary ( AND unary )*
//! unary := NOT unary | "(" expr ")" | atom
//! ```
//!
//! `AND`, `OR` and `NOT` are case-insensitive and only recognised as whole
//! words. An atom is a maximal run of non-keyword words. Placeholders such as
//! `<logsize>` are opaque tokens inside atoms and other texts, matched
//! case-sensitively.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Code, Error, Result};

/// Values substituted for placeholders, keyed by placeholder token.
pub type Bindings = BTreeMap<String, String>;

/// An angle-bracketed parameter token, stored without the brackets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placeholder(String);

impl Placeholder {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() || token.contains(['<', '>', '\n', '\r']) {
            return Err(Error::new(
                Code::PlaceholderSyntax,
                format!("invalid placeholder token {token:?}"),
            ));
        }
        Ok(Placeholder(token))
    }

    pub fn token(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Leaf of a guard: free text with no keywords or parentheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    text: String,
    placeholders: Vec<Placeholder>,
}

impl Atom {
    /// Builds an atom, normalising runs of whitespace between words to a
    /// single space.
    pub fn new(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut words = Vec::with_capacity(tokens.len());
        for token in tokens {
            match token {
                Token::Word(word) if keyword(&word).is_none() => words.push(word),
                Token::Word(word) => {
                    return Err(Error::new(
                        Code::GuardSyntax,
                        format!("atom {text:?} contains the keyword {word:?}"),
                    ))
                }
                Token::Open | Token::Close => {
                    return Err(Error::new(
                        Code::GuardSyntax,
                        format!("atom {text:?} contains a parenthesis"),
                    ))
                }
            }
        }
        if words.is_empty() {
            return Err(Error::new(Code::EmptyGuard, "empty atom"));
        }
        Ok(Self::from_words(words))
    }

    fn from_words(words: Vec<String>) -> Self {
        let text = words.join(" ");
        let placeholders =
            extract_placeholders(&text).expect("lexer only yields balanced placeholders");
        Atom { text, placeholders }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn placeholders(&self) -> &[Placeholder] {
        &self.placeholders
    }
}

/// Parsed guard expression. `And`/`Or` nodes are kept flat and always have
/// at least two children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GuardExpr {
    Atom(Atom),
    Not(Box<GuardExpr>),
    And(Vec<GuardExpr>),
    Or(Vec<GuardExpr>),
}

impl GuardExpr {
    pub fn atom(text: &str) -> Result<Self> {
        Atom::new(text).map(GuardExpr::Atom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: GuardExpr) -> Self {
        GuardExpr::Not(Box::new(child))
    }

    /// Conjunction of `children`, splicing nested conjunctions. A single
    /// child is returned as is.
    pub fn and(children: impl IntoIterator<Item = GuardExpr>) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                GuardExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            GuardExpr::And(flat)
        }
    }

    /// Disjunction of `children`, splicing nested disjunctions.
    pub fn or(children: impl IntoIterator<Item = GuardExpr>) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                GuardExpr::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            GuardExpr::Or(flat)
        }
    }

    /// Top-level conjuncts: the children of an `And`, otherwise the whole
    /// expression.
    pub fn conjuncts(&self) -> Vec<&GuardExpr> {
        match self {
            GuardExpr::And(children) => children.iter().collect(),
            other => vec![other],
        }
    }

    /// Placeholders in left-to-right order of first occurrence.
    pub fn placeholders(&self) -> Vec<Placeholder> {
        let mut out = Vec::new();
        self.collect_placeholders(&mut out);
        out
    }

    fn collect_placeholders(&self, out: &mut Vec<Placeholder>) {
        match self {
            GuardExpr::Atom(atom) => {
                for p in atom.placeholders() {
                    if !out.contains(p) {
                        out.push(p.clone());
                    }
                }
            }
            GuardExpr::Not(child) => child.collect_placeholders(out),
            GuardExpr::And(children) | GuardExpr::Or(children) => {
                for child in children {
                    child.collect_placeholders(out);
                }
            }
        }
    }

    /// Checks the flattening and arity invariants.
    pub fn is_well_formed(&self) -> bool {
        match self {
            GuardExpr::Atom(_) => true,
            GuardExpr::Not(child) => child.is_well_formed(),
            GuardExpr::And(children) => {
                children.len() >= 2
                    && children
                        .iter()
                        .all(|c| !matches!(c, GuardExpr::And(_)) && c.is_well_formed())
            }
            GuardExpr::Or(children) => {
                children.len() >= 2
                    && children
                        .iter()
                        .all(|c| !matches!(c, GuardExpr::Or(_)) && c.is_well_formed())
            }
        }
    }
}

impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_guard(self))
    }
}

impl FromStr for GuardExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_guard(s)
    }
}

impl TryFrom<String> for GuardExpr {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        parse_guard(&value)
    }
}

impl From<GuardExpr> for String {
    fn from(value: GuardExpr) -> Self {
        render_guard(&value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Keyword {
    And,
    Or,
    Not,
}

fn keyword(word: &str) -> Option<Keyword> {
    if word.eq_ignore_ascii_case("and") {
        Some(Keyword::And)
    } else if word.eq_ignore_ascii_case("or") {
        Some(Keyword::Or)
    } else if word.eq_ignore_ascii_case("not") {
        Some(Keyword::Not)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars();
    let flush = |word: &mut String, tokens: &mut Vec<Token>| {
        if !word.is_empty() {
            tokens.push(Token::Word(std::mem::take(word)));
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => {
                flush(&mut word, &mut tokens);
                tokens.push(if c == '(' { Token::Open } else { Token::Close });
            }
            '<' => {
                word.push('<');
                let mut inner = String::new();
                loop {
                    match chars.next() {
                        Some('>') => break,
                        Some('<') | Some('\n') | Some('\r') | None => {
                            return Err(Error::new(
                                Code::GuardSyntax,
                                format!("unbalanced placeholder brackets in {text:?}"),
                            ))
                        }
                        Some(other) => inner.push(other),
                    }
                }
                if inner.is_empty() {
                    return Err(Error::new(
                        Code::GuardSyntax,
                        format!("empty placeholder in {text:?}"),
                    ));
                }
                word.push_str(&inner);
                word.push('>');
            }
            '>' => {
                return Err(Error::new(
                    Code::GuardSyntax,
                    format!("unbalanced placeholder brackets in {text:?}"),
                ))
            }
            c if c.is_whitespace() => flush(&mut word, &mut tokens),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut tokens);
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_keyword(&self) -> Option<Keyword> {
        match self.peek() {
            Some(Token::Word(w)) => keyword(w),
            _ => None,
        }
    }

    fn syntax(&self, what: &str) -> Error {
        Error::new(
            Code::GuardSyntax,
            format!("{what} at token {} in {:?}", self.pos + 1, self.source),
        )
    }

    fn or(&mut self) -> Result<GuardExpr> {
        let mut parts = vec![self.and()?];
        while self.peek_keyword() == Some(Keyword::Or) {
            self.pos += 1;
            parts.push(self.and()?);
        }
        Ok(GuardExpr::or(parts))
    }

    fn and(&mut self) -> Result<GuardExpr> {
        let mut parts = vec![self.unary()?];
        while self.peek_keyword() == Some(Keyword::And) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(GuardExpr::and(parts))
    }

    fn unary(&mut self) -> Result<GuardExpr> {
        match self.peek() {
            None => Err(self.syntax("missing operand")),
            Some(Token::Close) => Err(self.syntax("unexpected ')'")),
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.syntax("unbalanced parentheses"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Word(w)) => match keyword(w) {
                Some(Keyword::Not) => {
                    self.pos += 1;
                    Ok(GuardExpr::not(self.unary()?))
                }
                Some(_) => Err(self.syntax("missing operand")),
                None => {
                    let mut words = Vec::new();
                    while let Some(Token::Word(w)) = self.peek() {
                        if keyword(w).is_some() {
                            break;
                        }
                        words.push(w.clone());
                        self.pos += 1;
                    }
                    Ok(GuardExpr::Atom(Atom::from_words(words)))
                }
            },
        }
    }
}

/// Parses guard text into a flattened expression tree.
pub fn parse_guard(text: &str) -> Result<GuardExpr> {
    if text.trim().is_empty() {
        return Err(Error::new(Code::EmptyGuard, "guard text is empty"));
    }
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        source: text,
    };
    let expr = parser.or()?;
    match parser.peek() {
        None => Ok(expr),
        Some(Token::Close) => Err(parser.syntax("unbalanced parentheses")),
        Some(_) => Err(parser.syntax("unexpected input")),
    }
}

/// Canonical text for a guard; `parse_guard` inverts it exactly.
pub fn render_guard(expr: &GuardExpr) -> String {
    let mut out = String::new();
    render_into(expr, &mut out);
    out
}

fn render_into(expr: &GuardExpr, out: &mut String) {
    match expr {
        GuardExpr::Atom(atom) => out.push_str(atom.text()),
        GuardExpr::Not(child) => {
            out.push_str("not ");
            render_child(
                child,
                matches!(**child, GuardExpr::And(_) | GuardExpr::Or(_)),
                out,
            );
        }
        GuardExpr::And(children) => {
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" AND ");
                }
                render_child(
                    child,
                    matches!(child, GuardExpr::And(_) | GuardExpr::Or(_)),
                    out,
                );
            }
        }
        GuardExpr::Or(children) => {
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                render_child(child, matches!(child, GuardExpr::Or(_)), out);
            }
        }
    }
}

fn render_child(child: &GuardExpr, parenthesize: bool, out: &mut String) {
    if parenthesize {
        out.push('(');
        render_into(child, out);
        out.push(')');
    } else {
        render_into(child, out);
    }
}

/// Placeholders of `text` in first-occurrence order, without duplicates.
pub fn extract_placeholders(text: &str) -> Result<Vec<Placeholder>> {
    let mut out: Vec<Placeholder> = Vec::new();
    for token in placeholder_spans(text)? {
        let p = Placeholder(token.to_string());
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Replaces every `<token>` in `text` with its binding.
pub fn bind_placeholders(text: &str, bindings: &Bindings) -> Result<String> {
    let spans = placeholder_spans(text)?;
    if spans.is_empty() {
        return Ok(text.to_string());
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    for token in spans {
        let needle = format!("<{token}>");
        let at = rest.find(&needle).expect("span was found in text");
        let value = bindings.get(token).ok_or_else(|| {
            Error::new(
                Code::UnboundPlaceholder,
                format!("no value bound for placeholder <{token}>"),
            )
        })?;
        out.push_str(&rest[..at]);
        out.push_str(value);
        rest = &rest[at + needle.len()..];
    }
    out.push_str(rest);
    Ok(out)
}

fn placeholder_spans(text: &str) -> Result<Vec<&str>> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    let err = || {
        Error::new(
            Code::PlaceholderSyntax,
            format!("unbalanced or nested placeholder brackets in {text:?}"),
        )
    };
    for (i, c) in text.char_indices() {
        match (c, open) {
            ('<', None) => open = Some(i),
            ('<', Some(_)) => return Err(err()),
            ('>', None) => return Err(err()),
            ('>', Some(start)) => {
                let token = &text[start + 1..i];
                if token.is_empty() {
                    return Err(Error::new(
                        Code::PlaceholderSyntax,
                        format!("empty placeholder in {text:?}"),
                    ));
                }
                spans.push(token);
                open = None;
            }
            ('\n' | '\r', Some(_)) => return Err(err()),
            _ => {}
        }
    }
    if open.is_some() {
        return Err(err());
    }
    Ok(spans)
}

/// `text` with every placeholder removed and whitespace collapsed.
pub fn strip_placeholders(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = false;
    for c in text.chars() {
        match c {
            '<' => depth = true,
            '>' => depth = false,
            c if !depth => out.push(c),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(text: &str) -> GuardExpr {
        GuardExpr::atom(text).unwrap()
    }

    #[test]
    fn not_seat_available() {
        assert_eq!(
            parse_guard("not seat available").unwrap(),
            GuardExpr::not(atom("seat available"))
        );
    }

    #[test]
    fn single_atom() {
        assert_eq!(
            parse_guard("seat available").unwrap(),
            atom("seat available")
        );
    }

    #[test]
    fn nested_precedence() {
        // a AND b AND (c OR not d): the AND chain is one flat node, the
        // parenthesised OR is its third child, NOT binds to d only.
        let expected = GuardExpr::And(vec![
            atom("a"),
            atom("b"),
            GuardExpr::Or(vec![atom("c"), GuardExpr::not(atom("d"))]),
        ]);
        assert_eq!(parse_guard("a AND b AND (c OR not d)").unwrap(), expected);
    }

    #[test]
    fn keywords_are_case_insensitive_whole_words() {
        assert_eq!(
            parse_guard("x and y Or NOT z").unwrap(),
            GuardExpr::Or(vec![
                GuardExpr::And(vec![atom("x"), atom("y")]),
                GuardExpr::not(atom("z")),
            ])
        );
        assert_eq!(
            parse_guard("android ordered notes").unwrap(),
            atom("android ordered notes")
        );
    }

    #[test]
    fn redundant_parentheses_flatten() {
        assert_eq!(
            parse_guard("(a AND (b AND c))").unwrap(),
            GuardExpr::And(vec![atom("a"), atom("b"), atom("c")])
        );
        assert_eq!(parse_guard("((a))").unwrap(), atom("a"));
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(parse_guard("   ").unwrap_err().code, Code::EmptyGuard);
        for bad in [
            "a AND",
            "OR a",
            "(a",
            "a)",
            "not",
            "a (b)",
            "()",
            "x <y",
            "x y>",
            "a AND AND b",
        ] {
            assert_eq!(
                parse_guard(bad).unwrap_err().code,
                Code::GuardSyntax,
                "{bad}"
            );
        }
    }

    #[test]
    fn placeholders_inside_atoms() {
        let g = parse_guard("size below <max size> AND <limit> reached").unwrap();
        let tokens: Vec<_> = g
            .placeholders()
            .iter()
            .map(|p| p.token().to_string())
            .collect();
        assert_eq!(tokens, ["max size", "limit"]);
        assert_eq!(
            render_guard(&g),
            "size below <max size> AND <limit> reached"
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(
            render_guard(&GuardExpr::not(atom("seat available"))),
            "not seat available"
        );
        assert_eq!(render_guard(&atom("x")), "x");
        let e = GuardExpr::And(vec![atom("a"), GuardExpr::Or(vec![atom("b"), atom("c")])]);
        assert_eq!(render_guard(&e), "a AND (b OR c)");
        assert_eq!(parse_guard(&render_guard(&e)).unwrap(), e);
        let e = GuardExpr::not(GuardExpr::And(vec![atom("a"), atom("b")]));
        assert_eq!(render_guard(&e), "not (a AND b)");
        let e = GuardExpr::Or(vec![GuardExpr::And(vec![atom("a"), atom("b")]), atom("c")]);
        assert_eq!(render_guard(&e), "a AND b OR c");
        assert_eq!(
            render_guard(&GuardExpr::not(GuardExpr::not(atom("a")))),
            "not not a"
        );
    }

    #[test]
    fn atom_rejects_keywords_and_normalises_spaces() {
        assert!(GuardExpr::atom("a and b").is_err());
        assert!(GuardExpr::atom("a (b)").is_err());
        assert_eq!(atom("  a   b ").to_string(), "a b");
    }

    #[test]
    fn extract_examples() {
        let got = extract_placeholders(
            "its starting date as <mm1/dd1/yyyy1> and its finish date as <mm2/dd2/yyyy2>",
        )
        .unwrap();
        let tokens: Vec<_> = got.iter().map(Placeholder::token).collect();
        assert_eq!(tokens, ["mm1/dd1/yyyy1", "mm2/dd2/yyyy2"]);
        assert!(extract_placeholders("no params here").unwrap().is_empty());
        let tokens: Vec<_> = extract_placeholders("<a> then <b> then <a>")
            .unwrap()
            .iter()
            .map(|p| p.token().to_string())
            .collect();
        assert_eq!(tokens, ["a", "b"]);
        for bad in ["<a", "a>", "<<a>>", "<>", "<a\nb>"] {
            assert_eq!(
                extract_placeholders(bad).unwrap_err().code,
                Code::PlaceholderSyntax,
                "{bad}"
            );
        }
    }

    #[test]
    fn bind_examples() {
        let b: Bindings = [("logsize".to_string(), "30".to_string())].into();
        assert_eq!(bind_placeholders("with <logsize>", &b).unwrap(), "with 30");
        assert_eq!(
            bind_placeholders("no params", &Bindings::new()).unwrap(),
            "no params"
        );
        let err = bind_placeholders("with <logsize>", &Bindings::new()).unwrap_err();
        assert_eq!(err.code, Code::UnboundPlaceholder);
        assert!(err.message.contains("logsize"));
    }

    #[test]
    fn bind_is_case_sensitive_and_repeats() {
        let b: Bindings = [
            ("a".to_string(), "1".to_string()),
            ("A".to_string(), "2".to_string()),
        ]
        .into();
        assert_eq!(bind_placeholders("<a><A> <a>", &b).unwrap(), "12 1");
    }

    #[test]
    fn strip() {
        assert_eq!(
            strip_placeholders("I open it to enrolment with <logsize>"),
            "I open it to enrolment with"
        );
        assert_eq!(strip_placeholders("from <a> to <b> now"), "from to now");
    }

    const WORDS: &[&str] = &[
        "seat",
        "available",
        "rights",
        "open",
        "x",
        "y",
        "full",
        "<n>",
        "<max size>",
    ];

    fn arb_atom() -> impl Strategy<Value = GuardExpr> {
        prop::collection::vec(prop::sample::select(WORDS), 1..4)
            .prop_map(|words| GuardExpr::atom(&words.join(" ")).unwrap())
    }

    fn arb_guard() -> impl Strategy<Value = GuardExpr> {
        arb_atom().prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                inner.clone().prop_map(GuardExpr::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(GuardExpr::and),
                prop::collection::vec(inner, 2..4).prop_map(GuardExpr::or),
            ]
        })
    }

    fn words(text: &str) -> Vec<String> {
        let mut w: Vec<String> = lex(text)
            .unwrap()
            .into_iter()
            .filter_map(|t| match t {
                Token::Word(w) if keyword(&w).is_none() => Some(w),
                _ => None,
            })
            .collect();
        w.sort();
        w
    }

    proptest! {
        #[test]
        fn round_trip(e in arb_guard()) {
            prop_assert!(e.is_well_formed());
            let text = render_guard(&e);
            prop_assert_eq!(parse_guard(&text).unwrap(), e);
        }

        #[test]
        fn parse_is_idempotent(e in arb_guard()) {
            let once = parse_guard(&render_guard(&e)).unwrap();
            let twice = parse_guard(&render_guard(&once)).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn rerender_keeps_words(e in arb_guard()) {
            let text = render_guard(&e);
            let again = render_guard(&parse_guard(&text).unwrap());
            prop_assert_eq!(words(&text), words(&again));
        }

        #[test]
        fn full_binding_leaves_no_placeholders(
            text in "[a-z ]{0,8}(<[a-z]{1,4}>[a-z ]{0,8}){0,3}",
            value in "[a-z0-9 /]{0,6}",
        ) {
            let bindings: Bindings = extract_placeholders(&text)
                .unwrap()
                .into_iter()
                .map(|p| (p.token().to_string(), value.clone()))
                .collect();
            let bound = bind_placeholders(&text, &bindings).unwrap();
            prop_assert!(extract_placeholders(&bound).unwrap().is_empty());
        }
    }
}
