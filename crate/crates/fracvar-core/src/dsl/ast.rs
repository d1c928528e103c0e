//! Expression tree for Lagrangians `L(t, x, y)`.

use std::fmt;

pub(crate) type Span = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Gamma,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ExprKind {
    Const(f64),
    Time,
    X(usize),
    Y(usize),
    Neg(Box<ExprNode>),
    Bin(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Box<ExprNode>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExprNode {
    pub kind: ExprKind,
    pub span: Span,
}

/// A parsed Lagrangian: deterministic AST plus the dimension it was parsed
/// against. Evaluation is exact composition of the node semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianExpr {
    pub(crate) root: ExprNode,
    dim: usize,
    source: String,
}

impl LagrangianExpr {
    pub(crate) fn new(root: ExprNode, dim: usize, source: String) -> Self {
        LagrangianExpr { root, dim, source }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when no `x` variable occurs, i.e. `L_x` is identically zero.
    pub fn is_x_free(&self) -> bool {
        fn walk(node: &ExprNode) -> bool {
            match &node.kind {
                ExprKind::X(_) => false,
                ExprKind::Const(_) | ExprKind::Time | ExprKind::Y(_) => true,
                ExprKind::Neg(a) | ExprKind::Call(_, a) => walk(a),
                ExprKind::Bin(_, a, b) => walk(a) && walk(b),
            }
        }
        walk(&self.root)
    }

    /// True when the expression depends on `t` alone.
    pub fn is_time_only(&self) -> bool {
        fn walk(node: &ExprNode) -> bool {
            match &node.kind {
                ExprKind::X(_) | ExprKind::Y(_) => false,
                ExprKind::Const(_) | ExprKind::Time => true,
                ExprKind::Neg(a) | ExprKind::Call(_, a) => walk(a),
                ExprKind::Bin(_, a, b) => walk(a) && walk(b),
            }
        }
        walk(&self.root)
    }
}

fn precedence(kind: &ExprKind) -> u8 {
    match kind {
        ExprKind::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprKind::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        ExprKind::Neg(_) => 3,
        ExprKind::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn fmt_node(node: &ExprNode, f: &mut fmt::Formatter<'_>, parent_prec: u8) -> fmt::Result {
    let prec = precedence(&node.kind);
    let parens = prec < parent_prec;
    if parens {
        write!(f, "(")?;
    }
    match &node.kind {
        ExprKind::Const(v) => write!(f, "{v}")?,
        ExprKind::Time => write!(f, "t")?,
        ExprKind::X(i) => write!(f, "x{}", i + 1)?,
        ExprKind::Y(i) => write!(f, "y{}", i + 1)?,
        ExprKind::Neg(a) => {
            write!(f, "-")?;
            fmt_node(a, f, prec + 1)?;
        }
        ExprKind::Bin(op, a, b) => {
            let (sym, lp, rp) = match op {
                BinOp::Add => (" + ", prec, prec),
                BinOp::Sub => (" - ", prec, prec + 1),
                BinOp::Mul => ("*", prec, prec),
                BinOp::Div => ("/", prec, prec + 1),
                BinOp::Pow => ("^", prec + 1, prec),
            };
            fmt_node(a, f, lp)?;
            write!(f, "{sym}")?;
            fmt_node(b, f, rp)?;
        }
        ExprKind::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            fmt_node(a, f, 0)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for LagrangianExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.root, f, 0)
    }
}
