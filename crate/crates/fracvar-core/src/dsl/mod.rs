//! Lagrangian expression language.
//!
//! Grammar: variables `t`, `x1..xn`, `y1..yn` (with `x`, `y` as aliases when
//! `n = 1`), decimal constants, operators `+ - * / ^` and unary minus, and
//! the functions `abs`, `sin`, `cos`, `exp`, `ln`, `sqrt`, `gamma`. `^` is
//! right-associative and binds tighter than unary minus. There is no
//! simplification pass; what parses is what evaluates.

mod ast;
mod eval;
mod parser;

pub use ast::{Func, LagrangianExpr};
pub use eval::{eval_jet, EvalError, EvalErrorKind, JetValue};
pub use parser::{parse_lagrangian, ParseError};
