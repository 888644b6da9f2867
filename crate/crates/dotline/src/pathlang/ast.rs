//! Path expression AST: an alternating sequence of steps, each carrying an
//! ordered predicate list. [`PathExpr::new`] is the only way to build one,
//! so every value in circulation satisfies the structural rules (root
//! first, vertex/edge alternation, representable literals).

use std::fmt;

use crate::value::{render_float, PropertyValue};

/// One traversal move. `Root` is the expression head (written `.`); the
/// rest alternate between edge steps (`outE`/`inE`/`bothE`, leaving a
/// vertex) and vertex steps (`inV`/`outV`/`bothV`, leaving an edge).
/// `inE`, `outV`, `bothE`, and `bothV` are symmetric extensions of the
/// published surface, which shows only `outE`/`inV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Root,
    OutE,
    InE,
    BothE,
    OutV,
    InV,
    BothV,
}

impl StepKind {
    pub const EDGE_STEPS: [StepKind; 3] = [StepKind::OutE, StepKind::InE, StepKind::BothE];
    pub const VERTEX_STEPS: [StepKind; 3] = [StepKind::InV, StepKind::OutV, StepKind::BothV];

    pub fn name(&self) -> &'static str {
        match self {
            StepKind::Root => ".",
            StepKind::OutE => "outE",
            StepKind::InE => "inE",
            StepKind::BothE => "bothE",
            StepKind::OutV => "outV",
            StepKind::InV => "inV",
            StepKind::BothV => "bothV",
        }
    }

    pub fn from_name(name: &str) -> Option<StepKind> {
        match name {
            "outE" => Some(StepKind::OutE),
            "inE" => Some(StepKind::InE),
            "bothE" => Some(StepKind::BothE),
            "outV" => Some(StepKind::OutV),
            "inV" => Some(StepKind::InV),
            "bothV" => Some(StepKind::BothV),
            _ => None,
        }
    }

    /// Whether the step leaves the traversal *at* a vertex (root and the
    /// vertex steps) as opposed to at an edge.
    pub fn lands_on_vertex(&self) -> bool {
        matches!(
            self,
            StepKind::Root | StepKind::InV | StepKind::OutV | StepKind::BothV
        )
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A step filter, applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `[@key='v']` / `[@key!='v']`: keep elements whose property equals
    /// (or, negated, differs from) the literal. Elements lacking the key
    /// fail both forms.
    PropEq {
        key: String,
        value: PropertyValue,
        negated: bool,
    },
    /// `[g:assign('$x')]`: union the elements reaching this predicate into
    /// the variable's set, passing them through unchanged.
    Assign { var: String },
    /// `[g:except($x)]`: drop elements that are members of the variable's
    /// set.
    Except { var: String },
}

/// `$name` with an ASCII-letter head, as the surface syntax requires.
pub fn is_valid_var(var: &str) -> bool {
    let Some(rest) = var.strip_prefix('$') else {
        return false;
    };
    let mut chars = rest.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Property keys keep to identifier shape so printed expressions re-parse.
pub fn is_valid_key(key: &str) -> bool {
    let mut chars = key.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub kind: StepKind,
    pub predicates: Vec<Predicate>,
}

impl Step {
    pub fn new(kind: StepKind, predicates: Vec<Predicate>) -> Self {
        Step { kind, predicates }
    }

    pub fn bare(kind: StepKind) -> Self {
        Step::new(kind, Vec::new())
    }
}

/// Why a step list does not form a valid expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("an expression must start with the root step")]
    MissingRoot,
    #[error("the root step may appear only first (found another at step {0})")]
    RootNotFirst(usize),
    #[error("the root step takes no predicates")]
    RootHasPredicates,
    #[error("step {kind} at position {index} cannot follow a {position} position")]
    BrokenAlternation {
        index: usize,
        kind: &'static str,
        position: &'static str,
    },
    #[error("\"{0}\" is not a valid variable name")]
    InvalidVar(String),
    #[error("\"{0}\" is not a valid property key")]
    InvalidKey(String),
    #[error("literal {0} cannot be written back as expression text")]
    UnprintableLiteral(String),
}

/// A validated path expression: root first, strict vertex/edge alternation,
/// and every literal printable such that `parse(pretty_print(e))` is
/// structurally identical to `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathExpr {
    steps: Vec<Step>,
}

impl PathExpr {
    pub fn new(steps: Vec<Step>) -> Result<PathExpr, ExprError> {
        let Some(first) = steps.first() else {
            return Err(ExprError::MissingRoot);
        };
        if first.kind != StepKind::Root {
            return Err(ExprError::MissingRoot);
        }
        if !first.predicates.is_empty() {
            return Err(ExprError::RootHasPredicates);
        }
        let mut on_vertex = true;
        for (index, step) in steps.iter().enumerate().skip(1) {
            match step.kind {
                StepKind::Root => return Err(ExprError::RootNotFirst(index)),
                kind if kind.lands_on_vertex() == on_vertex => {
                    return Err(ExprError::BrokenAlternation {
                        index,
                        kind: kind.name(),
                        position: if on_vertex { "vertex" } else { "edge" },
                    });
                }
                kind => on_vertex = kind.lands_on_vertex(),
            }
            for p in &step.predicates {
                match p {
                    Predicate::PropEq { key, value, .. } => {
                        if !is_valid_key(key) {
                            return Err(ExprError::InvalidKey(key.clone()));
                        }
                        match value {
                            PropertyValue::Text(s) if s.contains('\'') => {
                                return Err(ExprError::UnprintableLiteral(format!("{value}")));
                            }
                            PropertyValue::Float(x) if !x.is_finite() => {
                                return Err(ExprError::UnprintableLiteral(format!("{value}")));
                            }
                            _ => {}
                        }
                    }
                    Predicate::Assign { var } | Predicate::Except { var } => {
                        if !is_valid_var(var) {
                            return Err(ExprError::InvalidVar(var.clone()));
                        }
                    }
                }
            }
        }
        Ok(PathExpr { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Whether evaluation of this expression ends at a vertex position
    /// (true for the bare root).
    pub fn ends_on_vertex(&self) -> bool {
        self.steps
            .last()
            .expect("expressions are never empty")
            .kind
            .lands_on_vertex()
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, value: &PropertyValue) -> fmt::Result {
    match value {
        PropertyValue::Text(s) => write!(f, "'{s}'"),
        PropertyValue::Int(i) => write!(f, "{i}"),
        PropertyValue::Float(x) => f.write_str(&render_float(*x)),
        PropertyValue::Bool(b) => write!(f, "{b}"),
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            f.write_str(step.kind.name())?;
            for p in &step.predicates {
                match p {
                    Predicate::PropEq {
                        key,
                        value,
                        negated,
                    } => {
                        write!(f, "[@{key}{}", if *negated { "!=" } else { "=" })?;
                        write_literal(f, value)?;
                        f.write_str("]")?;
                    }
                    Predicate::Assign { var } => write!(f, "[g:assign('{var}')]")?,
                    Predicate::Except { var } => write!(f, "[g:except({var})]")?,
                }
            }
        }
        Ok(())
    }
}

/// Canonical text for an expression; parsing it back yields a structurally
/// identical AST (strings print straight-quoted, never backtick-quoted).
pub fn pretty_print(expr: &PathExpr) -> String {
    expr.to_string()
}
