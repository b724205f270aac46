//! A strict XMI subset for flat UML state machines.
//!
//! Accepted shape: a root carrying an XMI `version` attribute, optionally a
//! `uml:Model` wrapper, one `uml:StateMachine` with one `region`, whose
//! `subvertex` children are `uml:Pseudostate` (kind `initial`), `uml:State`
//! or `uml:FinalState`, and whose `transition` children carry `source` and
//! `target` idrefs, one `trigger`, an optional `guard` constraint with an
//! opaque-expression `body` and an optional `effect` opaque behavior whose
//! `body` lines are effect phrases. Element names and `xmi:type` values are
//! matched on their local part, so namespace prefixes may vary.
//!
//! The scenario subject is stored in an `xmi:Extension` under the machine.

use std::collections::HashMap;
use std::fmt::Write;

use roxmltree::{Document, Node};

use crate::error::{Code, Error, Result};
use crate::guard::parse_guard;
use crate::model::{
    sanitize_id, validate, State, StateId, StateKind, Statechart, Transition, TransitionId,
};

const XMI_NS: &str = "http://www.omg.org/spec/XMI/20131001";
const UML_NS: &str = "http://www.omg.org/spec/UML/20131001";
const EXTENDER: &str = "statebdd";
const DEFAULT_SUBJECT: &str = "process";

/// Parses an XMI document and rejects charts that do not validate.
pub fn parse_xmi(text: &str) -> Result<Statechart> {
    let (chart, lines) = read(text)?;
    let report = validate(&chart);
    if let Some(first) = report.errors.first() {
        let mut err = Error::new(first.code, first.message.clone());
        if let Some(line) = first.subject.as_ref().and_then(|s| lines.get(s)) {
            err.line = Some(*line);
        }
        if report.errors.len() > 1 {
            write!(err.message, " (and {} more)", report.errors.len() - 1).unwrap();
        }
        return Err(err);
    }
    Ok(chart)
}

/// Parses the XMI subset without validating the resulting chart.
pub fn parse_xmi_unchecked(text: &str) -> Result<Statechart> {
    read(text).map(|(chart, _)| chart)
}

struct Reader<'a, 'input> {
    doc: &'a Document<'input>,
    by_id: HashMap<&'a str, Node<'a, 'input>>,
}

impl<'a, 'input> Reader<'a, 'input> {
    fn line(&self, node: Node<'_, '_>) -> usize {
        self.doc.text_pos_at(node.range().start).row as usize
    }

    fn err(&self, code: Code, node: Node<'_, '_>, msg: impl Into<String>) -> Error {
        Error::at_line(code, self.line(node), msg)
    }

    fn unsupported(&self, node: Node<'_, '_>, what: &str) -> Error {
        let id = xmi_id(node).unwrap_or("?");
        self.err(
            Code::UnsupportedNesting,
            node,
            format!("unsupported construct in element {id}: {what}"),
        )
    }

    fn resolve(&self, node: Node<'_, '_>, idref: &str) -> Result<Node<'a, 'input>> {
        self.by_id.get(idref).copied().ok_or_else(|| {
            self.err(
                Code::XmiDanglingRef,
                node,
                format!("reference {idref:?} does not resolve"),
            )
        })
    }
}

fn local_type<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == "type" && a.namespace().is_some())
        .map(|a| a.value())
        .map(|v| v.rsplit(':').next().unwrap_or(v))
}

fn xmi_id<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == "id" && a.namespace().is_some())
        .map(|a| a.value())
}

fn attr<'a>(node: Node<'a, '_>, name: &str) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == name && a.namespace().is_none())
        .map(|a| a.value())
}

fn is(node: Node<'_, '_>, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name
}

/// Children that carry no model content and are skipped everywhere.
fn is_annotation(node: Node<'_, '_>) -> bool {
    matches!(
        node.tag_name().name(),
        "Extension" | "ownedComment" | "eAnnotations" | "Documentation"
    )
}

fn body_text(node: Node<'_, '_>) -> Vec<String> {
    let mut out = Vec::new();
    for body in node.descendants().filter(|n| is(*n, "body")) {
        out.push(body.text().unwrap_or_default().to_string());
    }
    if out.is_empty() {
        if let Some(b) = attr(node, "body") {
            out.push(b.to_string());
        }
    }
    out
}

#[derive(Default)]
struct LineMap(HashMap<String, usize>);

impl LineMap {
    fn get(&self, id: &str) -> Option<&usize> {
        self.0.get(id)
    }
}

fn read(text: &str) -> Result<(Statechart, LineMap)> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::at_line(Code::Xml, pos.row as usize, e.to_string())
    })?;
    let root = doc.root_element();
    if !root.attributes().any(|a| a.name() == "version") {
        return Err(Error::at_line(
            Code::Xml,
            1,
            "root element carries no XMI version attribute",
        ));
    }
    let mut by_id = HashMap::new();
    for node in doc.descendants().filter(Node::is_element) {
        if let Some(id) = xmi_id(node) {
            by_id.insert(id, node);
        }
    }
    let reader = Reader { doc: &doc, by_id };

    let machines: Vec<Node> = doc
        .descendants()
        .filter(|n| {
            n.is_element() && (local_type(*n) == Some("StateMachine") || is(*n, "StateMachine"))
        })
        .collect();
    let machine = match machines.as_slice() {
        [] => {
            return Err(Error::at_line(
                Code::Xml,
                1,
                "document contains no StateMachine",
            ))
        }
        [one] => *one,
        [_, second, ..] => return Err(reader.unsupported(*second, "more than one StateMachine")),
    };

    let mut regions = Vec::new();
    let mut subject = None;
    for child in machine.children().filter(Node::is_element) {
        if is(child, "region") {
            regions.push(child);
        } else if is(child, "Extension") {
            subject = child
                .descendants()
                .find(|n| is(*n, "subject"))
                .and_then(|n| attr(n, "value"));
        } else if is(child, "connectionPoint") {
            return Err(reader.unsupported(child, "entry/exit points"));
        } else if is(child, "submachineState") {
            return Err(reader.unsupported(child, "submachine states"));
        }
    }
    let region = match regions.as_slice() {
        [] => return Err(reader.err(Code::Xml, machine, "StateMachine has no region")),
        [one] => *one,
        [_, second, ..] => return Err(reader.unsupported(*second, "orthogonal regions")),
    };

    let mut chart = Statechart::new(
        attr(machine, "name").unwrap_or("statechart"),
        subject.unwrap_or(DEFAULT_SUBJECT),
    );
    let mut lines = LineMap::default();
    let mut transition_nodes = Vec::new();

    for child in region.children().filter(Node::is_element) {
        if is(child, "subvertex") {
            let state = read_vertex(&reader, child)?;
            lines.0.insert(state.id.0.clone(), reader.line(child));
            chart.states.push(state);
        } else if is(child, "transition") {
            transition_nodes.push(child);
        } else if !is_annotation(child) {
            return Err(reader.unsupported(
                child,
                &format!("region child <{}>", child.tag_name().name()),
            ));
        }
    }

    for node in transition_nodes {
        let transition = read_transition(&reader, &chart, node)?;
        lines.0.insert(transition.id.0.clone(), reader.line(node));
        chart.transitions.push(transition);
    }
    Ok((chart, lines))
}

fn read_vertex(reader: &Reader<'_, '_>, node: Node<'_, '_>) -> Result<State> {
    let id = xmi_id(node).ok_or_else(|| reader.err(Code::Xml, node, "subvertex without xmi:id"))?;
    let kind = match local_type(node) {
        Some("Pseudostate") => match attr(node, "kind").unwrap_or("initial") {
            "initial" => StateKind::Initial,
            other => return Err(reader.unsupported(node, &format!("pseudostate kind {other:?}"))),
        },
        Some("State") => {
            if attr(node, "submachine").is_some() {
                return Err(reader.unsupported(node, "submachine state"));
            }
            for child in node.children().filter(Node::is_element) {
                if is(child, "region") {
                    return Err(reader.unsupported(node, "composite state"));
                }
                if !is_annotation(child) {
                    return Err(reader
                        .unsupported(node, &format!("state child <{}>", child.tag_name().name())));
                }
            }
            StateKind::Simple
        }
        Some("FinalState") => StateKind::Final,
        other => {
            return Err(
                reader.unsupported(node, &format!("vertex type {:?}", other.unwrap_or("none")))
            )
        }
    };
    let name = match attr(node, "name") {
        Some(n) if !n.is_empty() => n.to_string(),
        _ => kind.default_name().to_string(),
    };
    Ok(State {
        id: StateId(id.to_string()),
        name,
        kind,
    })
}

fn read_transition(
    reader: &Reader<'_, '_>,
    chart: &Statechart,
    node: Node<'_, '_>,
) -> Result<Transition> {
    let id =
        xmi_id(node).ok_or_else(|| reader.err(Code::Xml, node, "transition without xmi:id"))?;
    if let Some(kind) = attr(node, "kind").filter(|k| *k != "external") {
        return Err(reader.unsupported(node, &format!("{kind} transition")));
    }
    let endpoint = |name: &str| -> Result<StateId> {
        let idref = attr(node, name).ok_or_else(|| {
            reader.err(
                Code::XmiDanglingRef,
                node,
                format!("transition {id} has no {name}"),
            )
        })?;
        let sid = StateId(idref.to_string());
        if chart.state(&sid).is_none() {
            return Err(reader.err(
                Code::XmiDanglingRef,
                node,
                format!("{name} {idref:?} of transition {id} is not a vertex of the region"),
            ));
        }
        Ok(sid)
    };
    let source = endpoint("source")?;
    let target = endpoint("target")?;

    let mut triggers = Vec::new();
    let mut guard_nodes = Vec::new();
    let mut effect_nodes = Vec::new();
    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "trigger" => triggers.push(child),
            "guard" => guard_nodes.push(child),
            "effect" => effect_nodes.push(child),
            _ if is_annotation(child) => {}
            other => return Err(reader.unsupported(child, &format!("transition child <{other}>"))),
        }
    }
    if let Some(g) = attr(node, "guard") {
        guard_nodes.push(reader.resolve(node, g)?);
    }
    if let Some(e) = attr(node, "effect") {
        effect_nodes.push(reader.resolve(node, e)?);
    }

    let event = match triggers.as_slice() {
        [] => String::new(),
        [trigger] => {
            let from_event = match attr(*trigger, "event") {
                Some(idref) => attr(reader.resolve(*trigger, idref)?, "name"),
                None => None,
            };
            from_event
                .or_else(|| attr(*trigger, "name"))
                .unwrap_or_default()
                .to_string()
        }
        [_, second, ..] => return Err(reader.unsupported(*second, "more than one trigger")),
    };

    let guard = match guard_nodes.as_slice() {
        [] => None,
        [g] => {
            let text = body_text(*g).join(" ");
            Some(parse_guard(&text).map_err(|e| e.with_line(reader.line(*g)))?)
        }
        [_, second, ..] => return Err(reader.unsupported(*second, "more than one guard")),
    };

    let mut effects = Vec::new();
    for e in effect_nodes {
        for body in body_text(e) {
            effects.extend(
                body.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(str::to_string),
            );
        }
    }

    Ok(Transition {
        id: TransitionId(id.to_string()),
        source,
        target,
        event,
        guard,
        effects,
    })
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Emits the XMI subset with ids derived from state names and `t<n>` for
/// transitions.
pub fn render_xmi(chart: &Statechart) -> Result<String> {
    chart.ensure_valid()?;

    let transition_ids: Vec<String> = (1..=chart.transitions.len())
        .map(|n| format!("t{n}"))
        .collect();
    let mut ids: HashMap<&StateId, String> = HashMap::new();
    let mut taken: Vec<String> = transition_ids.clone();
    for s in &chart.states {
        let base = sanitize_id(&s.name);
        let id = if taken.contains(&base) {
            (2..)
                .map(|n| format!("{base}_{n}"))
                .find(|c| !taken.contains(c))
                .unwrap()
        } else {
            base
        };
        taken.push(id.clone());
        ids.insert(&s.id, id);
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<xmi:XMI xmi:version=\"20131001\" xmlns:xmi=\"{XMI_NS}\" xmlns:uml=\"{UML_NS}\">"
    )
    .unwrap();
    let name = escape(&chart.name);
    writeln!(out, "  <uml:Model xmi:id=\"_model\" name=\"{name}\">").unwrap();
    writeln!(
        out,
        "    <packagedElement xmi:type=\"uml:StateMachine\" xmi:id=\"_machine\" name=\"{name}\">"
    )
    .unwrap();
    writeln!(out, "      <xmi:Extension extender=\"{EXTENDER}\">").unwrap();
    writeln!(
        out,
        "        <subject value=\"{}\"/>",
        escape(&chart.subject)
    )
    .unwrap();
    writeln!(out, "      </xmi:Extension>").unwrap();
    writeln!(
        out,
        "      <region xmi:type=\"uml:Region\" xmi:id=\"_region\">"
    )
    .unwrap();
    for s in &chart.states {
        let id = &ids[&s.id];
        let name = escape(&s.name);
        match s.kind {
            StateKind::Initial => writeln!(
                out,
                "        <subvertex xmi:type=\"uml:Pseudostate\" xmi:id=\"{id}\" name=\"{name}\" kind=\"initial\"/>"
            ),
            StateKind::Simple => writeln!(
                out,
                "        <subvertex xmi:type=\"uml:State\" xmi:id=\"{id}\" name=\"{name}\"/>"
            ),
            StateKind::Final => writeln!(
                out,
                "        <subvertex xmi:type=\"uml:FinalState\" xmi:id=\"{id}\" name=\"{name}\"/>"
            ),
        }
        .unwrap();
    }
    for (t, tid) in chart.transitions.iter().zip(&transition_ids) {
        writeln!(
            out,
            "        <transition xmi:type=\"uml:Transition\" xmi:id=\"{tid}\" source=\"{}\" target=\"{}\">",
            ids[&t.source], ids[&t.target]
        )
        .unwrap();
        writeln!(
            out,
            "          <trigger xmi:type=\"uml:Trigger\" xmi:id=\"{tid}.trigger\" name=\"{}\"/>",
            escape(&t.event)
        )
        .unwrap();
        if let Some(guard) = &t.guard {
            writeln!(
                out,
                "          <guard xmi:type=\"uml:Constraint\" xmi:id=\"{tid}.guard\">"
            )
            .unwrap();
            writeln!(
                out,
                "            <specification xmi:type=\"uml:OpaqueExpression\" xmi:id=\"{tid}.guard.spec\">"
            )
            .unwrap();
            writeln!(
                out,
                "              <body>{}</body>",
                escape(&guard.to_string())
            )
            .unwrap();
            writeln!(out, "            </specification>").unwrap();
            writeln!(out, "          </guard>").unwrap();
        }
        if !t.effects.is_empty() {
            writeln!(
                out,
                "          <effect xmi:type=\"uml:OpaqueBehavior\" xmi:id=\"{tid}.effect\">"
            )
            .unwrap();
            writeln!(
                out,
                "            <body>{}</body>",
                escape(&t.effects.join("\n"))
            )
            .unwrap();
            writeln!(out, "          </effect>").unwrap();
        }
        writeln!(out, "        </transition>").unwrap();
    }
    writeln!(out, "      </region>").unwrap();
    writeln!(out, "    </packagedElement>").unwrap();
    writeln!(out, "  </uml:Model>").unwrap();
    writeln!(out, "</xmi:XMI>").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn wrap(region_body: &str) -> String {
        format!(
            r#"<?xml version="1.0"?>
<xmi:XMI xmi:version="2.1" xmlns:xmi="http://schema.omg.org/spec/XMI/2.1" xmlns:uml="http://www.eclipse.org/uml2/3.0.0/UML">
  <packagedElement xmi:type="uml:StateMachine" xmi:id="sm" name="M">
    <region xmi:id="r">{region_body}</region>
  </packagedElement>
</xmi:XMI>"#
        )
    }

    const MINIMAL: &str = r#"
      <subvertex xmi:type="uml:Pseudostate" xmi:id="i" kind="initial"/>
      <subvertex xmi:type="uml:State" xmi:id="a" name="A"/>
      <transition xmi:id="x" source="i" target="a"><trigger xmi:id="tr" name="go"/></transition>"#;

    #[test]
    fn seminar_matches_scdl() {
        assert_eq!(
            parse_xmi(fixtures::SEMINAR_XMI).unwrap(),
            fixtures::seminar()
        );
    }

    #[test]
    fn seminar_renders_to_fixture_bytes() {
        assert_eq!(
            render_xmi(&fixtures::seminar()).unwrap(),
            fixtures::SEMINAR_XMI
        );
    }

    #[test]
    fn minimal_machine_with_foreign_prefixes() {
        let c = parse_xmi(&wrap(MINIMAL)).unwrap();
        assert_eq!(c.states.len(), 2);
        assert_eq!(c.states[0].name, "initial");
        assert_eq!(c.subject, "process");
        assert_eq!(c.transitions[0].event, "go");
        let doc = render_xmi(&c).unwrap();
        assert_eq!(doc.matches("uml:Pseudostate").count(), 1);
        assert_eq!(doc.matches("\"uml:State\"").count(), 1);
        assert_eq!(doc.matches("\"uml:Transition\"").count(), 1);
    }

    #[test]
    fn trigger_event_reference() {
        let xml = r#"<?xml version="1.0"?>
<XMI xmi:version="2.1" xmlns:xmi="urn:xmi" xmlns:UML="urn:uml">
  <UML:Model>
  <packagedElement xmi:type="UML:CallEvent" xmi:id="ev" name="press the button"/>
  <packagedElement xmi:type="UML:StateMachine" xmi:id="sm" name="M">
    <region xmi:id="r">
      <subvertex xmi:type="UML:Pseudostate" xmi:id="i"/>
      <subvertex xmi:type="UML:FinalState" xmi:id="f"/>
      <transition xmi:id="x" source="i" target="f"><trigger xmi:id="tr" event="ev"/>
        <guard xmi:id="g"><specification xmi:id="gs"><body>lit AND not broken</body></specification></guard>
        <effect xmi:id="e"><body>
          first
          second
        </body></effect>
      </transition>
    </region>
  </packagedElement>
  </UML:Model>
</XMI>"#;
        let c = parse_xmi(xml).unwrap();
        let t = &c.transitions[0];
        assert_eq!(t.event, "press the button");
        assert_eq!(t.rendered_guard().unwrap(), "lit AND not broken");
        assert_eq!(t.effects, ["first", "second"]);
        assert_eq!(c.states[1].name, "final");
    }

    #[test]
    fn composite_state_is_rejected() {
        let body = r#"
      <subvertex xmi:type="uml:Pseudostate" xmi:id="i" kind="initial"/>
      <subvertex xmi:type="uml:State" xmi:id="outer" name="Outer">
        <region xmi:id="inner"/>
      </subvertex>"#;
        let err = parse_xmi(&wrap(body)).unwrap_err();
        assert_eq!(err.code, Code::UnsupportedNesting);
        assert!(err.message.contains("outer"));
        assert_eq!(err.line, Some(6));
    }

    #[test]
    fn other_unsupported_constructs() {
        let bodies = [
            r#"<subvertex xmi:type="uml:Pseudostate" xmi:id="c" kind="choice"/>"#,
            r#"<subvertex xmi:type="uml:State" xmi:id="s"><entry xmi:id="en"/></subvertex>"#,
            r#"<subvertex xmi:type="uml:ConnectionPointReference" xmi:id="c"/>"#,
            r#"<transition xmi:id="x" source="i" target="a" kind="internal"/>"#,
        ];
        for body in bodies {
            let xml = wrap(&format!("{MINIMAL}{body}"));
            assert_eq!(
                parse_xmi(&xml).unwrap_err().code,
                Code::UnsupportedNesting,
                "{body}"
            );
        }
        let two_regions = wrap(MINIMAL).replace("</region>", "</region><region xmi:id=\"r2\"/>");
        assert_eq!(
            parse_xmi(&two_regions).unwrap_err().code,
            Code::UnsupportedNesting
        );
    }

    #[test]
    fn dangling_reference() {
        let body = MINIMAL.replace("target=\"a\"", "target=\"zzz\"");
        assert_eq!(
            parse_xmi(&wrap(&body)).unwrap_err().code,
            Code::XmiDanglingRef
        );
        let body = MINIMAL.replace("name=\"go\"", "event=\"nope\"");
        assert_eq!(
            parse_xmi(&wrap(&body)).unwrap_err().code,
            Code::XmiDanglingRef
        );
    }

    #[test]
    fn missing_trigger_is_empty_event() {
        let body = MINIMAL.replace(r#"<trigger xmi:id="tr" name="go"/>"#, "");
        assert_eq!(parse_xmi(&wrap(&body)).unwrap_err().code, Code::EmptyEvent);
    }

    #[test]
    fn malformed_xml() {
        let err = parse_xmi("<xmi:XMI").unwrap_err();
        assert_eq!(err.code, Code::Xml);
        assert!(err.line.is_some());
    }

    #[test]
    fn escaping_survives() {
        let mut c = fixtures::seminar();
        c.name = "R&D \"<course>\"".into();
        c.name = c.name.replace(['<', '>'], "");
        c.transitions[0].effects.push("a & b \"quoted\"".into());
        let again = parse_xmi(&render_xmi(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }
}
