//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! nodes 4
//! undirected            (optional)
//! name 0 gateway        (optional; labels usable in place of indices)
//! 0 1 0.5 0.3           (src dst p importance)
//! seeds 0
//! lambda 1
//! ```
//!
//! Undirected files list each connection once; it is expanded into two arcs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qcontain_core::{Error as CoreError, Graph, NodeId, ProblemInstance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error(transparent)]
    Invalid(#[from] CoreError),
}

/// An instance together with the optional node labels it was read with.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: ProblemInstance,
    pub names: BTreeMap<usize, String>,
}

struct Parser {
    nodes: Option<usize>,
    undirected: bool,
    names: BTreeMap<usize, String>,
    by_name: BTreeMap<String, usize>,
    edges: Vec<(usize, usize, f64, f64)>,
    pairs: BTreeMap<(usize, usize), usize>,
    seeds: Option<Vec<usize>>,
    lambda: Option<f64>,
}

fn at<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Line { line, message: message.into() })
}

fn number<T: std::str::FromStr>(line: usize, what: &str, tok: &str) -> Result<T, FormatError> {
    tok.parse().or_else(|_| at(line, format!("invalid {what} `{tok}`")))
}

impl Parser {
    fn node_count(&self, line: usize) -> Result<usize, FormatError> {
        self.nodes.ok_or(()).or_else(|_| at(line, "`nodes` must come first"))
    }

    fn node(&self, line: usize, tok: &str) -> Result<usize, FormatError> {
        let n = self.node_count(line)?;
        let id = match tok.parse::<usize>() {
            Ok(id) => id,
            Err(_) => match self.by_name.get(tok) {
                Some(&id) => id,
                None => return at(line, format!("unknown node `{tok}`")),
            },
        };
        if id >= n {
            return at(line, format!("unknown node {id} (graph has {n} nodes)"));
        }
        Ok(id)
    }

    fn line(&mut self, no: usize, toks: &[&str]) -> Result<(), FormatError> {
        match toks[0] {
            "nodes" => {
                if self.nodes.is_some() {
                    return at(no, "repeated `nodes` line");
                }
                let [_, n] = toks else { return at(no, "expected `nodes <N>`") };
                let n: usize = number(no, "node count", n)?;
                if n == 0 {
                    return at(no, "graph must have at least one node");
                }
                self.nodes = Some(n);
            }
            "undirected" => {
                if toks.len() != 1 {
                    return at(no, "`undirected` takes no arguments");
                }
                if !self.edges.is_empty() {
                    return at(no, "`undirected` must precede the edges");
                }
                self.undirected = true;
            }
            "name" => {
                let [_, id, label] = toks else { return at(no, "expected `name <id> <label>`") };
                let id: usize = number(no, "node id", id)?;
                if id >= self.node_count(no)? {
                    return at(no, format!("unknown node {id}"));
                }
                if label.parse::<usize>().is_ok() {
                    return at(no, format!("label `{label}` must not be numeric"));
                }
                if self.names.contains_key(&id) || self.by_name.contains_key(*label) {
                    return at(no, format!("duplicate name for node {id}"));
                }
                self.names.insert(id, label.to_string());
                self.by_name.insert(label.to_string(), id);
            }
            "seeds" => {
                if self.seeds.is_some() {
                    return at(no, "repeated `seeds` line");
                }
                if toks.len() == 1 {
                    return at(no, "empty seed set");
                }
                let ids = toks[1..].iter().map(|t| self.node(no, t)).collect::<Result<_, _>>()?;
                self.seeds = Some(ids);
            }
            "lambda" => {
                if self.lambda.is_some() {
                    return at(no, "repeated `lambda` line");
                }
                let [_, x] = toks else { return at(no, "expected `lambda <x>`") };
                let x: f64 = number(no, "lambda", x)?;
                if !(0.0..=1.0).contains(&x) {
                    return at(no, format!("lambda out of range: {x}"));
                }
                self.lambda = Some(x);
            }
            _ => {
                let [s, d, p, i] = toks else { return at(no, "expected `<src> <dst> <p> <i>`") };
                let (s, d) = (self.node(no, s)?, self.node(no, d)?);
                let p: f64 = number(no, "probability", p)?;
                let i: f64 = number(no, "importance", i)?;
                if !(0.0..=1.0).contains(&p) {
                    return at(no, format!("probability out of range: {p}"));
                }
                if !(0.0..=1.0).contains(&i) {
                    return at(no, format!("importance out of range: {i}"));
                }
                if s == d {
                    return at(no, format!("self-loop on node {s}"));
                }
                let mut keys = vec![(s, d)];
                if self.undirected {
                    keys.push((d, s));
                }
                for k in &keys {
                    if let Some(prev) = self.pairs.get(k) {
                        return at(no, format!("duplicate edge {s} -> {d} (first on line {prev})"));
                    }
                }
                for k in keys {
                    self.pairs.insert(k, no);
                }
                self.edges.push((s, d, p, i));
            }
        }
        Ok(())
    }
}

/// Parses an instance file, keeping node labels.
pub fn parse_instance_file(text: &str) -> Result<InstanceFile, FormatError> {
    let mut p = Parser {
        nodes: None,
        undirected: false,
        names: BTreeMap::new(),
        by_name: BTreeMap::new(),
        edges: Vec::new(),
        pairs: BTreeMap::new(),
        seeds: None,
        lambda: None,
    };
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if !toks.is_empty() {
            p.line(idx + 1, &toks)?;
        }
    }
    let n = p.nodes.ok_or(FormatError::Missing("nodes"))?;
    let seeds = p.seeds.ok_or(FormatError::Missing("seeds"))?;
    let lambda = p.lambda.ok_or(FormatError::Missing("lambda"))?;
    let graph = if p.undirected { Graph::undirected(n, p.edges)? } else { Graph::directed(n, p.edges)? };
    let instance = ProblemInstance::new(graph, seeds.into_iter().map(NodeId), lambda)?;
    Ok(InstanceFile { instance, names: p.names })
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance, FormatError> {
    parse_instance_file(text).map(|f| f.instance)
}

/// Writes `file` in the canonical layout. Numbers use the shortest decimal
/// form that reads back to the same `f64`.
pub fn serialize_instance_file(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let g = inst.graph();
    let mut out = String::new();
    writeln!(out, "nodes {}", g.node_count()).unwrap();
    if g.is_undirected() {
        out.push_str("undirected\n");
    }
    for (id, label) in &file.names {
        writeln!(out, "name {id} {label}").unwrap();
    }
    for rep in g.link_representatives() {
        let e = &g.edges()[rep];
        writeln!(out, "{} {} {} {}", e.src.0, e.dst.0, e.p, e.importance).unwrap();
    }
    out.push_str("seeds");
    for s in inst.seeds() {
        write!(out, " {}", s.0).unwrap();
    }
    writeln!(out, "\nlambda {}", inst.lambda()).unwrap();
    out
}

pub fn serialize_instance(instance: &ProblemInstance) -> String {
    serialize_instance_file(&InstanceFile { instance: instance.clone(), names: BTreeMap::new() })
}
