//! The XPath-flavored traversal language: abstract syntax ([`ast`]), text
//! parsing ([`parse`]), and bag-semantics evaluation ([`eval`]).
//!
//! A quick tour:
//!
//! ```
//! use dotline::graph::PropertyGraph;
//! use dotline::pathlang::{evaluate, parse, Env};
//! use dotline::props;
//!
//! let mut g = PropertyGraph::new();
//! let a = g.add_vertex(props! {"name" => "a"});
//! let b = g.add_vertex(props! {"name" => "b"});
//! g.add_edge(&a, &b, "friend", props!()).unwrap();
//!
//! let expr = parse("./outE[@label='friend']/inV").unwrap();
//! let mut env = Env::new();
//! let bag = evaluate(&g, &[a], &expr, &mut env).unwrap();
//! assert_eq!(bag.len(), 1);
//! ```

pub mod ast;
pub mod eval;
pub mod parse;

pub use ast::{pretty_print, ExprError, PathExpr, Predicate, Step, StepKind};
pub use eval::{evaluate, unique, Env, EvalError, ResultBag};
pub use parse::{parse, ParseError};
