//! Command execution against a session graph. Both the one-shot binary
//! and the REPL funnel through [`Session::execute`], which is what makes
//! their outputs identical by construction. Output is returned as a
//! string so the caller decides where it goes.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::Path;
use std::process::ExitCode;

use dotline::derive::{degree_ranking, derive, materialize, shortest_path, RootSpec};
use dotline::graph::{ElementId, PropertyGraph, VertexId};
use dotline::index::{build_index, find_index, indexed_count, lookup, tree_depth};
use dotline::io;
use dotline::pathlang::{evaluate, parse, Env, PathExpr, Predicate, Step, StepKind};
use dotline::value::{render_float, PropertyValue};
use dotline::views::{check_rdf_shaped, to_semantic, to_simple, to_weighted};

use crate::{
    Cli, Command, DeriveArgs, Format, IndexCommand, PathArgs, QueryArgs, RankArgs, ViewCommand,
};

/// A command failure, split by exit code: usage errors (1) mean the
/// command itself was malformed; evaluation errors (2) mean the graph or
/// the filesystem refused it.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Eval(String),
}

impl CmdError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CmdError::Usage(_) => ExitCode::from(1),
            CmdError::Eval(_) => ExitCode::from(2),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Usage(m) | CmdError::Eval(m) => m,
        }
    }
}

fn eval_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Eval(e.to_string())
}

/// The mutable state a run operates on: one graph, plus output settings.
pub struct Session {
    graph: PropertyGraph,
    color: bool,
}

impl Session {
    pub fn new() -> Session {
        Session {
            graph: PropertyGraph::new(),
            color: std::env::var("DOTLINE_COLOR").as_deref() == Ok("1"),
        }
    }

    /// `error: message`, with the prefix in red when color is on.
    pub fn paint_error(&self, e: &CmdError) -> String {
        if self.color {
            format!("\x1b[31merror:\x1b[0m {}", e.message())
        } else {
            format!("error: {}", e.message())
        }
    }

    pub fn load_graph(&mut self, path: &Path) -> Result<(), CmdError> {
        self.graph = io::load(path).map_err(eval_err)?;
        Ok(())
    }

    pub fn execute(&mut self, cli: Cli) -> Result<String, CmdError> {
        if let Some(path) = &cli.graph {
            self.load_graph(path)?;
        }
        let mut out = String::new();
        match cli.command {
            Command::Load { path } => {
                self.load_graph(&path)?;
                writeln!(
                    out,
                    "loaded {}: vertices: {}, edges: {}",
                    path.display(),
                    self.graph.vertex_count(),
                    self.graph.edge_count()
                )
                .unwrap();
            }
            Command::Save { path } => {
                io::save(&self.graph, &path).map_err(eval_err)?;
                writeln!(
                    out,
                    "saved {}: vertices: {}, edges: {}",
                    path.display(),
                    self.graph.vertex_count(),
                    self.graph.edge_count()
                )
                .unwrap();
            }
            Command::Query(args) => self.query(args, &mut out)?,
            Command::Index(cmd) => self.index(cmd, &mut out)?,
            Command::View(cmd) => self.view(cmd, &mut out)?,
            Command::Derive(args) => self.derive(args, &mut out)?,
            Command::Path(args) => self.path(args, &mut out)?,
            Command::Rank(args) => self.rank(args, &mut out)?,
            Command::Stats => {
                writeln!(
                    out,
                    "vertices: {}, edges: {}",
                    self.graph.vertex_count(),
                    self.graph.edge_count()
                )
                .unwrap();
            }
            Command::Repl => {
                return Err(CmdError::Usage(
                    "already in a session; repl cannot be nested".to_owned(),
                ));
            }
        }
        Ok(out)
    }

    fn query(&self, args: QueryArgs, out: &mut String) -> Result<(), CmdError> {
        let expr = parse(&args.expr).map_err(|e| CmdError::Usage(e.to_string()))?;
        let roots: Vec<VertexId> = args.roots.iter().map(VertexId::new).collect();
        let mut env = Env::new();
        let mut bag = evaluate(&self.graph, &roots, &expr, &mut env).map_err(eval_err)?;
        if args.exclude_roots {
            let root_set: BTreeSet<ElementId> = roots.into_iter().map(ElementId::Vertex).collect();
            let kept: Vec<ElementId> = bag
                .into_vec()
                .into_iter()
                .filter(|el| !root_set.contains(el))
                .collect();
            bag = kept.into();
        }
        if args.unique {
            bag = bag.unique();
        }
        let kind_of = |el: &ElementId| match el {
            ElementId::Vertex(_) => "vertex",
            ElementId::Edge(_) => "edge",
        };
        match args.format {
            Format::Ids => {
                for el in bag.iter() {
                    writeln!(out, "{}", el.id_str()).unwrap();
                }
            }
            Format::Json => {
                let items: Vec<serde_json::Value> = bag
                    .iter()
                    .map(|el| serde_json::json!({ "kind": kind_of(el), "id": el.id_str() }))
                    .collect();
                writeln!(out, "{}", serde_json::Value::Array(items)).unwrap();
            }
            Format::Table => {
                writeln!(out, "kind    id").unwrap();
                for el in bag.iter() {
                    writeln!(out, "{:<8}{}", kind_of(el), el.id_str()).unwrap();
                }
            }
        }
        Ok(())
    }

    fn index(&mut self, cmd: IndexCommand, out: &mut String) -> Result<(), CmdError> {
        match cmd {
            IndexCommand::Build { key } => {
                let tree = build_index(&mut self.graph, &key).map_err(eval_err)?;
                writeln!(
                    out,
                    "index built: key={}, entries={}, depth={}",
                    key,
                    indexed_count(&self.graph, &tree),
                    tree_depth(&self.graph, &tree)
                )
                .unwrap();
            }
            IndexCommand::Lookup { key, value } => {
                let tree = find_index(&self.graph, &key)
                    .ok_or_else(|| CmdError::Eval(format!("no index for key \"{key}\"")))?;
                let value = parse_value(&value);
                let hits = lookup(&self.graph, &tree, &value).map_err(eval_err)?;
                for v in &hits {
                    writeln!(out, "{v}").unwrap();
                }
            }
        }
        Ok(())
    }

    fn view(&self, cmd: ViewCommand, out: &mut String) -> Result<(), CmdError> {
        match cmd {
            ViewCommand::Simple => {
                let view = to_simple(&self.graph);
                writeln!(
                    out,
                    "vertices: {}, pairs: {}",
                    view.vertex_count(),
                    view.edge_count()
                )
                .unwrap();
                for (a, b) in view.edges() {
                    writeln!(out, "{a} -- {b}").unwrap();
                }
            }
            ViewCommand::Semantic => {
                let view = to_semantic(&self.graph);
                writeln!(
                    out,
                    "vertices: {}, edges: {}",
                    view.vertex_count(),
                    view.edge_count()
                )
                .unwrap();
                for e in view.edges() {
                    writeln!(out, "{} -[{}]-> {}", e.tail, e.label, e.head).unwrap();
                }
            }
            ViewCommand::Weighted { key, default } => {
                let view = to_weighted(&self.graph, &key, default).map_err(eval_err)?;
                writeln!(
                    out,
                    "entries: {}, total: {}",
                    view.len(),
                    render_float(view.total_weight())
                )
                .unwrap();
                for e in view.entries() {
                    writeln!(out, "{} -> {}: {}", e.tail, e.head, render_float(e.weight)).unwrap();
                }
            }
            ViewCommand::Rdf => {
                let report = check_rdf_shaped(&self.graph);
                if report.is_clean() {
                    writeln!(out, "rdf-shaped: ok").unwrap();
                } else {
                    writeln!(out, "rdf-shaped: {} violations", report.violations.len()).unwrap();
                    for v in &report.violations {
                        let kind = match &v.element {
                            ElementId::Vertex(_) => "vertex",
                            ElementId::Edge(_) => "edge",
                        };
                        match &v.label {
                            Some(text) => writeln!(
                                out,
                                "{} {} ({:?}): {}",
                                kind,
                                v.element.id_str(),
                                text,
                                v.reason
                            )
                            .unwrap(),
                            None => writeln!(out, "{} {}: {}", kind, v.element.id_str(), v.reason)
                                .unwrap(),
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn derive(&mut self, args: DeriveArgs, out: &mut String) -> Result<(), CmdError> {
        let expr = parse(&args.expr).map_err(|e| CmdError::Usage(e.to_string()))?;
        let roots = parse_roots(&args.roots)?;
        let mut derived = derive(&self.graph, &expr, roots).map_err(eval_err)?;
        writeln!(
            out,
            "derived: {} vertices, {} pairs, {} edges",
            derived.vertices().len(),
            derived.pairs().len(),
            derived.edge_count()
        )
        .unwrap();
        for ((u, v), multiplicity) in derived.pairs() {
            writeln!(out, "{u} -> {v} x{multiplicity}").unwrap();
        }
        if args.materialize {
            let created =
                materialize(&mut self.graph, &mut derived, &args.label).map_err(eval_err)?;
            writeln!(
                out,
                "materialized {} edges labeled \"{}\"",
                created, args.label
            )
            .unwrap();
        }
        Ok(())
    }

    /// Rebuilds the derived graph "edges labeled L" by running the
    /// one-hop expression `./outE[@label=L]/inV` from every vertex. Built
    /// as an AST directly, so label text needs no quoting.
    fn derived_over(&self, label: &str) -> Result<dotline::derive::DerivedGraph, CmdError> {
        let steps = vec![
            Step::bare(StepKind::Root),
            Step::new(
                StepKind::OutE,
                vec![Predicate::PropEq {
                    key: "label".to_owned(),
                    value: PropertyValue::text(label),
                    negated: false,
                }],
            ),
            Step::bare(StepKind::InV),
        ];
        let expr = PathExpr::new(steps)
            .map_err(|e| CmdError::Usage(format!("label {label:?} cannot be matched: {e}")))?;
        derive(&self.graph, &expr, RootSpec::All).map_err(eval_err)
    }

    fn path(&self, args: PathArgs, out: &mut String) -> Result<(), CmdError> {
        let derived = self.derived_over(&args.via_derived)?;
        let (from, to) = (VertexId::new(&args.from), VertexId::new(&args.to));
        match shortest_path(&derived, &from, &to).map_err(eval_err)? {
            Some(path) => {
                let rendered: Vec<&str> = path.iter().map(VertexId::as_str).collect();
                writeln!(out, "{}", rendered.join(" -> ")).unwrap();
            }
            None => writeln!(out, "no path from {from} to {to}").unwrap(),
        }
        Ok(())
    }

    fn rank(&self, args: RankArgs, out: &mut String) -> Result<(), CmdError> {
        let derived = self.derived_over(&args.via_derived)?;
        for (v, degree) in degree_ranking(&derived) {
            writeln!(out, "{v}: {degree}").unwrap();
        }
        Ok(())
    }
}

fn parse_roots(spec: &str) -> Result<RootSpec, CmdError> {
    if spec == "ALL" {
        return Ok(RootSpec::All);
    }
    let mut ids = Vec::new();
    for part in spec.split(',') {
        if part.is_empty() {
            return Err(CmdError::Usage(format!(
                "--roots must be ALL or a comma-separated id list, got {spec:?}"
            )));
        }
        ids.push(VertexId::new(part));
    }
    Ok(RootSpec::Ids(ids))
}

/// `true`/`false`, else integer, else finite float, else text — so every
/// string is some value and the common cases need no sigils.
fn parse_value(text: &str) -> PropertyValue {
    match text {
        "true" => return PropertyValue::Bool(true),
        "false" => return PropertyValue::Bool(false),
        _ => {}
    }
    if let Ok(i) = text.parse::<i64>() {
        return PropertyValue::Int(i);
    }
    if let Ok(f) = text.parse::<f64>() {
        if f.is_finite() {
            return PropertyValue::Float(f);
        }
    }
    PropertyValue::text(text)
}
