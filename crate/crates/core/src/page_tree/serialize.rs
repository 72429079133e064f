//! Line-oriented text encodings of the raw page and of the hybrid view.
//!
//! Each node is one line indented two spaces per depth. Strings are JSON-quoted so labels
//! survive a round trip. The parsers exist so the encodings can be checked for fidelity.

use std::fmt::Write;

use serde::de::DeserializeOwned;

use super::{HybridNode, HybridTree, PageNode, PageTree, StructuralNode};
use crate::component_model::{ComponentKind, RenderedNode, Role, Widget};
use crate::component_model::{InteractionMetadata, SemanticStateView, ToolSignature};
use crate::registry::{SemanticTriplet, REGISTRY_NAME};

pub const HYBRID_HEADER: &str = "# hybrid view: component subtrees replaced by registry triplets from";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always encode")
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn structural_line(out: &mut String, depth: usize, id: &str, tag: &str, label: &str, interactive: bool) {
    indent(out, depth);
    let _ = write!(out, "<{tag}> {id} {}", quote(label));
    if interactive {
        out.push_str(" interactive");
    }
    out.push('\n');
}

fn rendered_lines(out: &mut String, depth: usize, n: &RenderedNode, cid: Option<&str>) {
    indent(out, depth);
    let _ = write!(out, "[{}] {} {}", n.role.as_str(), n.id, quote(&n.label));
    if let Some(c) = cid {
        let _ = write!(out, " data-cid={c}");
    }
    if let Some(v) = &n.name {
        let _ = write!(out, " name={}", quote(v));
    }
    if let Some(v) = &n.value {
        let _ = write!(out, " value={}", quote(v));
    }
    if let Some(b) = n.expanded {
        let _ = write!(out, " expanded={b}");
    }
    if let Some(b) = n.selected {
        let _ = write!(out, " selected={b}");
    }
    for (flag, name) in [(n.disabled, "disabled"), (n.readonly, "readonly"), (n.scrollable, "scrollable")] {
        if flag {
            let _ = write!(out, " {name}");
        }
    }
    out.push('\n');
    for c in &n.children {
        rendered_lines(out, depth + 1, c, None);
    }
}

pub fn serialize_raw(tree: &PageTree) -> String {
    fn go(out: &mut String, depth: usize, n: &PageNode) {
        match n {
            PageNode::Structural(s) => {
                structural_line(out, depth, &s.id, &s.tag, &s.label, s.interactive);
                s.children.iter().for_each(|c| go(out, depth + 1, c));
            }
            PageNode::Component { cid, rendered } => rendered_lines(out, depth, rendered, Some(cid)),
        }
    }
    let mut out = String::new();
    go(&mut out, 0, &tree.root);
    out
}

pub fn serialize_hybrid(tree: &HybridTree) -> String {
    fn go(out: &mut String, depth: usize, n: &HybridNode) {
        match n {
            HybridNode::Structural {
                id,
                tag,
                label,
                interactive,
                children,
            } => {
                structural_line(out, depth, id, tag, label, *interactive);
                children.iter().for_each(|c| go(out, depth + 1, c));
            }
            HybridNode::Semantic { key, triplet } => {
                let kind = triplet.state.kind;
                indent(out, depth);
                let _ = writeln!(out, "{{component}} {key} kind={}/{}", kind.category.as_str(), kind.widget);
                for (tag, body) in [
                    ("S", encode(&triplet.state.status)),
                    ("T", encode(&triplet.signatures)),
                    ("M", encode(&triplet.metadata)),
                ] {
                    indent(out, depth + 1);
                    let _ = writeln!(out, "{tag} = {body}");
                }
            }
        }
    }
    let mut out = format!("{HYBRID_HEADER} {REGISTRY_NAME}\n");
    go(&mut out, 0, &tree.root);
    out
}

fn encode<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("triplets always encode")
}

enum Line {
    Structural {
        id: String,
        tag: String,
        label: String,
        interactive: bool,
    },
    Rendered {
        cid: Option<String>,
        node: RenderedNode,
    },
    Component {
        key: String,
        kind: ComponentKind,
    },
    Field {
        tag: String,
        body: String,
    },
}

struct Parsed {
    line: usize,
    depth: usize,
    body: Line,
}

/// A bare word, or `key=value` where the value may be JSON-quoted.
#[derive(Debug)]
struct Token {
    key: Option<String>,
    value: String,
}

fn tokens(s: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let err = |message: String| ParseError { line, message };
    let quoted = |rest: &str| -> Result<(String, usize), ParseError> {
        let mut it = serde_json::Deserializer::from_str(rest).into_iter::<String>();
        match it.next() {
            Some(Ok(v)) => Ok((v, it.byte_offset())),
            _ => Err(err(format!("bad quoted string near `{rest}`"))),
        }
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with(' ') {
            i += 1;
            continue;
        }
        if rest.starts_with('"') {
            let (value, used) = quoted(rest)?;
            out.push(Token { key: None, value });
            i += used;
            continue;
        }
        let end = rest.find([' ', '=']).unwrap_or(rest.len());
        let word = rest[..end].to_string();
        if rest[end..].starts_with('=') {
            let after = &rest[end + 1..];
            if after.starts_with('"') {
                let (value, used) = quoted(after)?;
                out.push(Token { key: Some(word), value });
                i += end + 1 + used;
            } else {
                let vend = after.find(' ').unwrap_or(after.len());
                out.push(Token {
                    key: Some(word),
                    value: after[..vend].to_string(),
                });
                i += end + 1 + vend;
            }
        } else {
            out.push(Token { key: None, value: word });
            i += end;
        }
    }
    Ok(out)
}

fn parse_line(raw: &str, line: usize) -> Result<Parsed, ParseError> {
    let err = |message: String| ParseError { line, message };
    let trimmed = raw.trim_start_matches(' ');
    let spaces = raw.len() - trimmed.len();
    if spaces % 2 != 0 {
        return Err(err("odd indentation".into()));
    }
    let depth = spaces / 2;
    let body = if let Some(rest) = trimmed.strip_prefix('<') {
        let (tag, rest) = rest.split_once('>').ok_or_else(|| err("unclosed tag".into()))?;
        let toks = tokens(rest, line)?;
        let [id, label, flags @ ..] = toks.as_slice() else {
            return Err(err("structural line needs an id and a label".into()));
        };
        let interactive = match flags {
            [] => false,
            [Token { key: None, value }] if value == "interactive" => true,
            _ => return Err(err("unexpected attributes".into())),
        };
        Line::Structural {
            id: id.value.clone(),
            tag: tag.to_string(),
            label: label.value.clone(),
            interactive,
        }
    } else if let Some(rest) = trimmed.strip_prefix('[') {
        let (role, rest) = rest.split_once(']').ok_or_else(|| err("unclosed role".into()))?;
        let role = Role::parse(role).ok_or_else(|| err(format!("unknown role `{role}`")))?;
        let toks = tokens(rest, line)?;
        let [id, label, attrs @ ..] = toks.as_slice() else {
            return Err(err("rendered line needs an id and a label".into()));
        };
        let mut node = RenderedNode::new(id.value.clone(), role, label.value.clone());
        let mut cid = None;
        let flag = |v: &str| match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(err(format!("bad boolean `{v}`"))),
        };
        for t in attrs {
            match (t.key.as_deref(), t.value.as_str()) {
                (Some("data-cid"), v) => cid = Some(v.to_string()),
                (Some("name"), v) => node.name = Some(v.to_string()),
                (Some("value"), v) => node.value = Some(v.to_string()),
                (Some("expanded"), v) => node.expanded = Some(flag(v)?),
                (Some("selected"), v) => node.selected = Some(flag(v)?),
                (None, "disabled") => node.disabled = true,
                (None, "readonly") => node.readonly = true,
                (None, "scrollable") => node.scrollable = true,
                (k, v) => return Err(err(format!("unknown attribute {k:?}={v}"))),
            }
        }
        Line::Rendered { cid, node }
    } else if let Some(rest) = trimmed.strip_prefix("{component}") {
        let toks = tokens(rest, line)?;
        let [Token { key: None, value: key }, Token {
            key: Some(k),
            value: kind,
        }] = toks.as_slice()
        else {
            return Err(err("component line needs a key and a kind".into()));
        };
        if k != "kind" {
            return Err(err("component line needs a kind".into()));
        }
        let widget: Widget = kind
            .split_once('/')
            .and_then(|(_, w)| w.parse().ok())
            .ok_or_else(|| err(format!("unknown kind `{kind}`")))?;
        Line::Component {
            key: key.clone(),
            kind: widget.into(),
        }
    } else if let Some((tag, body)) = trimmed.split_once(" = ") {
        Line::Field {
            tag: tag.to_string(),
            body: body.to_string(),
        }
    } else {
        return Err(err(format!("unrecognised line `{trimmed}`")));
    };
    Ok(Parsed { line, depth, body })
}

fn lines(text: &str, skip: usize) -> Result<Vec<Parsed>, ParseError> {
    text.lines()
        .enumerate()
        .skip(skip)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

/// Cursor over parsed lines that builds subtrees by indentation.
struct Cursor {
    lines: Vec<Parsed>,
    pos: usize,
}

impl Cursor {
    fn peek_depth(&self) -> Option<usize> {
        self.lines.get(self.pos).map(|p| p.depth)
    }

    fn next(&mut self) -> Option<&Parsed> {
        let p = self.lines.get(self.pos);
        self.pos += 1;
        p
    }

    fn children_of(&self, depth: usize) -> bool {
        self.peek_depth() == Some(depth + 1)
    }

    fn end_check(&self) -> Result<(), ParseError> {
        match self.lines.get(self.pos) {
            None => Ok(()),
            Some(p) => Err(ParseError {
                line: p.line,
                message: "content after the root subtree".into(),
            }),
        }
    }

    fn empty_error() -> ParseError {
        ParseError {
            line: 0,
            message: "empty document".into(),
        }
    }

    fn rendered(&mut self, depth: usize, mut node: RenderedNode) -> Result<RenderedNode, ParseError> {
        while self.children_of(depth) {
            let p = self.next().expect("peeked");
            let line = p.line;
            match &p.body {
                Line::Rendered { cid: None, node: child } => {
                    let child = child.clone();
                    node.children.push(self.rendered(depth + 1, child)?);
                }
                _ => {
                    return Err(ParseError {
                        line,
                        message: "expected a rendered child".into(),
                    })
                }
            }
        }
        Ok(node)
    }

    fn page(&mut self) -> Result<PageNode, ParseError> {
        let p = self.next().ok_or_else(Self::empty_error)?;
        let (line, depth) = (p.line, p.depth);
        match &p.body {
            Line::Structural {
                id,
                tag,
                label,
                interactive,
            } => {
                let mut s = StructuralNode {
                    id: id.clone(),
                    tag: tag.clone(),
                    label: label.clone(),
                    interactive: *interactive,
                    children: Vec::new(),
                };
                while self.children_of(depth) {
                    s.children.push(self.page()?);
                }
                Ok(PageNode::Structural(s))
            }
            Line::Rendered { cid: Some(cid), node } => {
                let (cid, node) = (cid.clone(), node.clone());
                Ok(PageNode::Component {
                    cid,
                    rendered: self.rendered(depth, node)?,
                })
            }
            _ => Err(ParseError {
                line,
                message: "expected a structural node or a component root".into(),
            }),
        }
    }

    fn hybrid(&mut self) -> Result<HybridNode, ParseError> {
        let p = self.next().ok_or_else(Self::empty_error)?;
        let (line, depth) = (p.line, p.depth);
        match &p.body {
            Line::Structural {
                id,
                tag,
                label,
                interactive,
            } => {
                let (id, tag, label, interactive) = (id.clone(), tag.clone(), label.clone(), *interactive);
                let mut children = Vec::new();
                while self.children_of(depth) {
                    children.push(self.hybrid()?);
                }
                Ok(HybridNode::Structural {
                    id,
                    tag,
                    label,
                    interactive,
                    children,
                })
            }
            Line::Component { key, kind } => {
                let (key, kind) = (key.clone(), *kind);
                let status: serde_json::Value = self.field(depth, "S")?;
                let signatures: Vec<ToolSignature> = self.field(depth, "T")?;
                let metadata: InteractionMetadata = self.field(depth, "M")?;
                Ok(HybridNode::Semantic {
                    triplet: SemanticTriplet {
                        state: SemanticStateView {
                            name: key.clone(),
                            kind,
                            status,
                        },
                        signatures,
                        metadata,
                    },
                    key,
                })
            }
            _ => Err(ParseError {
                line,
                message: "expected a structural node or a component".into(),
            }),
        }
    }

    fn field<T: DeserializeOwned>(&mut self, depth: usize, want: &str) -> Result<T, ParseError> {
        let missing = |line| ParseError {
            line,
            message: format!("expected `{want} = ...`"),
        };
        let at = self.lines.get(self.pos.saturating_sub(1)).map_or(0, |p| p.line);
        if !self.children_of(depth) {
            return Err(missing(at));
        }
        let p = self.next().expect("peeked");
        match &p.body {
            Line::Field { tag, body } if tag == want => serde_json::from_str(body).map_err(|e| ParseError {
                line: p.line,
                message: e.to_string(),
            }),
            _ => Err(missing(p.line)),
        }
    }
}

pub fn parse_raw(text: &str) -> Result<PageTree, ParseError> {
    let mut c = Cursor {
        lines: lines(text, 0)?,
        pos: 0,
    };
    if c.peek_depth() != Some(0) {
        return Err(ParseError {
            line: c.lines.first().map_or(0, |p| p.line),
            message: "root must not be indented".into(),
        });
    }
    let root = c.page()?;
    c.end_check()?;
    Ok(PageTree { root })
}

pub fn parse_hybrid(text: &str) -> Result<HybridTree, ParseError> {
    let header = text.lines().next().unwrap_or_default();
    if !header.starts_with(HYBRID_HEADER) {
        return Err(ParseError {
            line: 1,
            message: "missing hybrid header".into(),
        });
    }
    let mut c = Cursor {
        lines: lines(text, 1)?,
        pos: 0,
    };
    if c.peek_depth() != Some(0) {
        return Err(ParseError {
            line: 2,
            message: "root must not be indented".into(),
        });
    }
    let root = c.hybrid()?;
    c.end_check()?;
    Ok(HybridTree { root })
}
