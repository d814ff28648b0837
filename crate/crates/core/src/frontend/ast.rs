//! Statement and expression trees for the supported C subset.
//!
//! The trees keep just enough structure to inventory loops, profile loop
//! bodies, re-emit loop bodies as kernel code and evaluate them functionally.
//! Anything the parser cannot classify is preserved as an opaque statement so
//! analysis degrades instead of failing.

use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loc {
    pub file: String,
    pub line: u32,
}

/// Base scalar types we size; everything else falls back to 4 bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseType {
    Char,
    Short,
    Int,
    Long,
    LongLong,
    Float,
    Double,
    Void,
    Other(String),
}

impl BaseType {
    /// Size of one element in bytes, clamped to {1, 2, 4, 8}.
    pub fn element_bytes(&self) -> u32 {
        match self {
            BaseType::Char => 1,
            BaseType::Short => 2,
            BaseType::Int | BaseType::Float => 4,
            BaseType::Long | BaseType::LongLong | BaseType::Double => 8,
            BaseType::Void | BaseType::Other(_) => 4,
        }
    }

    /// C spelling used when re-emitting declarations.
    pub fn c_name(&self) -> &str {
        match self {
            BaseType::Char => "char",
            BaseType::Short => "short",
            BaseType::Int => "int",
            BaseType::Long => "long",
            BaseType::LongLong => "long long",
            BaseType::Float => "float",
            BaseType::Double => "double",
            BaseType::Void => "void",
            BaseType::Other(name) => name,
        }
    }
}

/// A declared variable: scalar, pointer or sized array.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub base: BaseType,
    pub pointer: bool,
    /// Element count for `T name[N]` when N is a compile-time constant.
    pub extent: Option<u64>,
    pub init: Option<Expr>,
}

impl VarDecl {
    pub fn is_array(&self) -> bool {
        self.pointer || self.extent.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    LogicalAnd,
    LogicalOr,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::LogicalAnd => "&&",
            BinOp::LogicalOr => "||",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
    Deref,
    AddrOf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    AddAssign,
    SubAssign,
    MulAssign,
    DivAssign,
    ModAssign,
}

impl AssignOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::AddAssign => "+=",
            AssignOp::SubAssign => "-=",
            AssignOp::MulAssign => "*=",
            AssignOp::DivAssign => "/=",
            AssignOp::ModAssign => "%=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    IntLit {
        value: i64,
        raw: String,
    },
    FloatLit {
        value: f64,
        raw: String,
    },
    StrLit(String),
    CharLit(String),
    Ident(String),
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    Member {
        base: Box<Expr>,
        field: String,
        arrow: bool,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then_val: Box<Expr>,
        else_val: Box<Expr>,
    },
    Cast {
        ty: String,
        operand: Box<Expr>,
    },
}

impl Expr {
    pub fn int(value: i64) -> Expr {
        Expr::IntLit {
            value,
            raw: value.to_string(),
        }
    }

    /// Constant integer value, if the expression is a literal.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Expr::IntLit { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Innermost base name of an lvalue chain: `a[i][j]` and `s.f` give `a` / `s`.
    pub fn base_name(&self) -> Option<&str> {
        match self {
            Expr::Ident(name) => Some(name),
            Expr::Index { base, .. } => base.base_name(),
            Expr::Member { base, .. } => base.base_name(),
            Expr::Unary {
                op: UnaryOp::Deref,
                operand,
            } => operand.base_name(),
            _ => None,
        }
    }
}

/// Loop trip-count annotation attached by a `// offload: trip=N` comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripAnnotation {
    pub loc: Loc,
    /// Raw value text after `trip=`; validated by `apply_annotations`.
    pub raw_value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForStmt {
    pub loc: Loc,
    pub init: Option<Box<Stmt>>,
    pub cond: Option<Expr>,
    pub step: Option<Expr>,
    pub body: Vec<Stmt>,
    pub annotation: Option<TripAnnotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhileStmt {
    pub loc: Loc,
    pub cond: Expr,
    pub body: Vec<Stmt>,
    pub annotation: Option<TripAnnotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoWhileStmt {
    pub loc: Loc,
    pub cond: Expr,
    pub body: Vec<Stmt>,
    pub annotation: Option<TripAnnotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Decl(Vec<VarDecl>),
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
    },
    For(ForStmt),
    While(WhileStmt),
    DoWhile(DoWhileStmt),
    Return(Option<Expr>),
    Break,
    Continue,
    Block(Vec<Stmt>),
    /// Statement the parser could not classify; kept for graceful degradation.
    Opaque {
        loc: Loc,
        text: String,
    },
    Empty,
}

/// One function definition with its parameter list and body.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub return_type: BaseType,
    pub params: Vec<VarDecl>,
    pub body: Vec<Stmt>,
    pub loc: Loc,
}

/// Parse warning that did not prevent statement-tree recovery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    pub message: String,
}

/// A parsed translation set: every input file plus the recovered trees.
#[derive(Debug, Clone, Default)]
pub struct SourceUnit {
    pub files: Vec<(String, String)>,
    pub functions: Vec<FunctionDecl>,
    pub globals: Vec<VarDecl>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SourceUnit {
    /// Look up a variable visible to loops of `function`: locals and
    /// parameters shadow globals.
    pub fn resolve_var(&self, function: &FunctionDecl, name: &str) -> Option<VarDecl> {
        fn scan(stmts: &[Stmt], name: &str, out: &mut Option<VarDecl>) {
            for stmt in stmts {
                match stmt {
                    Stmt::Decl(decls) => {
                        if let Some(d) = decls.iter().find(|d| d.name == name) {
                            *out = Some(d.clone());
                        }
                    }
                    Stmt::Block(inner) => scan(inner, name, out),
                    Stmt::If {
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        scan(then_branch, name, out);
                        if let Some(e) = else_branch {
                            scan(e, name, out);
                        }
                    }
                    Stmt::For(f) => {
                        if let Some(init) = &f.init {
                            scan(std::slice::from_ref(init), name, out);
                        }
                        scan(&f.body, name, out);
                    }
                    Stmt::While(w) => scan(&w.body, name, out),
                    Stmt::DoWhile(d) => scan(&d.body, name, out),
                    _ => {}
                }
            }
        }

        if let Some(p) = function.params.iter().find(|p| p.name == name) {
            return Some(p.clone());
        }
        let mut found = None;
        scan(&function.body, name, &mut found);
        if found.is_some() {
            return found;
        }
        self.globals.iter().find(|g| g.name == name).cloned()
    }
}
