//! Update streams over a fixed horizon and their text file format.
//!
//! File grammar (UTF-8, one record per line):
//!
//! ```text
//! file    := header NL (record NL)*
//! header  := "T=" UINT " h=" UINT " kind=" ("elements" | "graph")
//! record  := "+ " UINT            insert element        (kind=elements)
//!          | "- " UINT            delete element        (kind=elements)
//!          | "+ " UINT " " UINT   insert edge {u, v}    (kind=graph)
//!          | "- " UINT " " UINT   delete edge {u, v}    (kind=graph)
//!          | "bot"                no-op
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. For `kind=graph`
//! the header's `h` is the vertex count. Exactly `T` records must follow.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{input, param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Update {
    InsertElement(usize),
    DeleteElement(usize),
    InsertEdge(usize, usize),
    DeleteEdge(usize, usize),
    Noop,
}

impl Update {
    /// Edge insertion with endpoints stored in ascending order.
    pub fn insert_edge(u: usize, v: usize) -> Self {
        Update::InsertEdge(u.min(v), u.max(v))
    }

    pub fn delete_edge(u: usize, v: usize) -> Self {
        Update::DeleteEdge(u.min(v), u.max(v))
    }

    pub fn is_delete(&self) -> bool {
        matches!(self, Update::DeleteElement(_) | Update::DeleteEdge(..))
    }

    pub fn is_noop(&self) -> bool {
        matches!(self, Update::Noop)
    }

    /// The edge touched by this update, in ascending endpoint order.
    pub fn edge(&self) -> Option<(usize, usize)> {
        match *self {
            Update::InsertEdge(u, v) | Update::DeleteEdge(u, v) => Some((u.min(v), u.max(v))),
            _ => None,
        }
    }

    pub fn element(&self) -> Option<usize> {
        match *self {
            Update::InsertElement(i) | Update::DeleteElement(i) => Some(i),
            _ => None,
        }
    }

    /// +1 for inserts, -1 for deletes, 0 for the no-op.
    pub fn sign(&self) -> i64 {
        match self {
            Update::InsertElement(_) | Update::InsertEdge(..) => 1,
            Update::DeleteElement(_) | Update::DeleteEdge(..) => -1,
            Update::Noop => 0,
        }
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::InsertElement(i) => write!(f, "+ {i}"),
            Update::DeleteElement(i) => write!(f, "- {i}"),
            Update::InsertEdge(u, v) => write!(f, "+ {u} {v}"),
            Update::DeleteEdge(u, v) => write!(f, "- {u} {v}"),
            Update::Noop => write!(f, "bot"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamKind {
    Elements,
    Graph,
}

impl StreamKind {
    fn as_str(self) -> &'static str {
        match self {
            StreamKind::Elements => "elements",
            StreamKind::Graph => "graph",
        }
    }
}

/// A stream of exactly `horizon` updates over `universe` ids.
///
/// For element streams `universe` is the number of elements `h`; for graph
/// streams it is the vertex count `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateStream {
    horizon: usize,
    universe: usize,
    kind: StreamKind,
    updates: Vec<Update>,
}

impl UpdateStream {
    pub fn new(kind: StreamKind, universe: usize, updates: Vec<Update>) -> Result<Self> {
        let stream = Self { horizon: updates.len(), universe, kind, updates };
        stream.validate()?;
        Ok(stream)
    }

    pub fn elements(universe: usize, updates: Vec<Update>) -> Result<Self> {
        Self::new(StreamKind::Elements, universe, updates)
    }

    pub fn graph(vertices: usize, updates: Vec<Update>) -> Result<Self> {
        Self::new(StreamKind::Graph, vertices, updates)
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(param("stream horizon T must be positive"));
        }
        if self.universe == 0 {
            return Err(param("universe size must be positive"));
        }
        for (idx, u) in self.updates.iter().enumerate() {
            check_update(self.kind, self.universe, u).map_err(|e| match e {
                Error::Input(m) => input(format!("update {}: {m}", idx + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn kind(&self) -> StreamKind {
        self.kind
    }

    pub fn updates(&self) -> &[Update] {
        &self.updates
    }

    pub fn is_incremental(&self) -> bool {
        self.updates.iter().all(|u| !u.is_delete())
    }

    /// Frequency vector `f^t` after the first `t` updates (element streams).
    pub fn prefix_frequencies(&self, t: usize) -> Result<Vec<i64>> {
        prefix_frequencies(self, t)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "T={} h={} kind={}", self.horizon, self.universe, self.kind.as_str())?;
        for u in &self.updates {
            writeln!(out, "{u}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("stream text is ASCII")
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize, StreamKind)> = None;
        let mut updates = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            match header {
                None => header = Some(parse_header(text, lineno)?),
                Some((_, universe, kind)) => {
                    let update = parse_record(text, kind, lineno)?;
                    check_update(kind, universe, &update)
                        .map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
                    updates.push(update);
                }
            }
        }
        let (horizon, universe, kind) =
            header.ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        if updates.len() != horizon {
            return Err(Error::Parse {
                line: 1,
                message: format!("header declares T={horizon} but {} records follow", updates.len()),
            });
        }
        Self::new(kind, universe, updates)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse(text.as_bytes())
    }
}

fn check_update(kind: StreamKind, universe: usize, u: &Update) -> Result<()> {
    match (kind, *u) {
        (_, Update::Noop) => Ok(()),
        (StreamKind::Elements, Update::InsertElement(i) | Update::DeleteElement(i)) => {
            if i < universe {
                Ok(())
            } else {
                Err(input(format!("element {i} outside universe of size {universe}")))
            }
        }
        (StreamKind::Graph, Update::InsertEdge(a, b) | Update::DeleteEdge(a, b)) => {
            if a == b {
                Err(input(format!("self-loop on vertex {a}")))
            } else if a >= universe || b >= universe {
                Err(input(format!("edge ({a}, {b}) outside vertex range {universe}")))
            } else {
                Ok(())
            }
        }
        (StreamKind::Elements, _) => Err(input("edge update in an element stream")),
        (StreamKind::Graph, _) => Err(input("element update in a graph stream")),
    }
}

fn parse_header(text: &str, line: usize) -> Result<(usize, usize, StreamKind)> {
    let bad = |m: &str| Error::Parse { line, message: format!("malformed header: {m}") };
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(bad("expected `T=<int> h=<int> kind=<elements|graph>`"));
    }
    let value = |field: &str, key: &str| -> Result<String> {
        field
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| bad(&format!("expected `{key}=...`, found `{field}`")))
    };
    let horizon: usize = value(fields[0], "T")?.parse().map_err(|_| bad("T is not an integer"))?;
    let universe: usize = value(fields[1], "h")?.parse().map_err(|_| bad("h is not an integer"))?;
    let kind = match value(fields[2], "kind")?.as_str() {
        "elements" => StreamKind::Elements,
        "graph" => StreamKind::Graph,
        other => return Err(bad(&format!("unknown kind `{other}`"))),
    };
    if horizon == 0 || universe == 0 {
        return Err(bad("T and h must be positive"));
    }
    Ok((horizon, universe, kind))
}

fn parse_record(text: &str, kind: StreamKind, line: usize) -> Result<Update> {
    let bad = |m: String| Error::Parse { line, message: m };
    if text == "bot" {
        return Ok(Update::Noop);
    }
    let mut parts = text.split_whitespace();
    let sign = parts.next().unwrap_or_default();
    let ids: Vec<usize> = parts
        .map(|p| p.parse::<usize>().map_err(|_| bad(format!("`{p}` is not a nonnegative integer"))))
        .collect::<Result<_>>()?;
    let insert = match sign {
        "+" => true,
        "-" => false,
        other => return Err(bad(format!("expected `+`, `-` or `bot`, found `{other}`"))),
    };
    match (kind, ids.as_slice()) {
        (StreamKind::Elements, [i]) => {
            Ok(if insert { Update::InsertElement(*i) } else { Update::DeleteElement(*i) })
        }
        (StreamKind::Graph, [u, v]) => {
            Ok(if insert { Update::insert_edge(*u, *v) } else { Update::delete_edge(*u, *v) })
        }
        (StreamKind::Elements, _) => Err(bad(format!("element record needs one id: `{text}`"))),
        (StreamKind::Graph, _) => Err(bad(format!("edge record needs two endpoints: `{text}`"))),
    }
}

/// `f^t_i` = inserts of `i` minus deletes of `i` among updates `1..=t`.
pub fn prefix_frequencies(stream: &UpdateStream, t: usize) -> Result<Vec<i64>> {
    if stream.kind != StreamKind::Elements {
        return Err(param("prefix frequencies are defined for element streams"));
    }
    if t == 0 || t > stream.horizon {
        return Err(param(format!("step {t} outside 1..={}", stream.horizon)));
    }
    let mut freq = vec![0i64; stream.universe];
    for u in &stream.updates[..t] {
        if let Some(i) = u.element() {
            freq[i] += u.sign();
        }
    }
    Ok(freq)
}
