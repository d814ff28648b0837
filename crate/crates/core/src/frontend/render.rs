//! Re-emission of statement/expression trees as C text.
//!
//! Used for three things: canonical keys when counting distinct array
//! accesses, kernel body generation, and the opaque-statement echo in
//! diagnostics. Output is plain C, parenthesized from structure rather than
//! from the original token stream.

use super::ast::*;

pub fn expr_to_c(e: &Expr) -> String {
    match e {
        Expr::IntLit { raw, .. } => raw.clone(),
        Expr::FloatLit { raw, .. } => raw.clone(),
        Expr::StrLit(s) => format!("\"{s}\""),
        Expr::CharLit(s) => format!("'{s}'"),
        Expr::Ident(name) => name.clone(),
        Expr::Index { base, index } => format!("{}[{}]", expr_to_c(base), expr_to_c(index)),
        Expr::Call { callee, args } => {
            let args: Vec<String> = args.iter().map(expr_to_c).collect();
            format!("{callee}({})", args.join(", "))
        }
        Expr::Member { base, field, arrow } => {
            let sep = if *arrow { "->" } else { "." };
            format!("{}{sep}{field}", expr_to_c(base))
        }
        Expr::Unary { op, operand } => {
            let inner = expr_atom(operand);
            match op {
                UnaryOp::Neg => format!("-{inner}"),
                UnaryOp::Plus => format!("+{inner}"),
                UnaryOp::Not => format!("!{inner}"),
                UnaryOp::BitNot => format!("~{inner}"),
                UnaryOp::PreInc => format!("++{inner}"),
                UnaryOp::PreDec => format!("--{inner}"),
                UnaryOp::PostInc => format!("{inner}++"),
                UnaryOp::PostDec => format!("{inner}--"),
                UnaryOp::Deref => format!("*{inner}"),
                UnaryOp::AddrOf => format!("&{inner}"),
            }
        }
        Expr::Binary { op, lhs, rhs } => {
            format!("{} {} {}", expr_atom(lhs), op.symbol(), expr_atom(rhs))
        }
        Expr::Assign { op, target, value } => {
            format!("{} {} {}", expr_to_c(target), op.symbol(), expr_to_c(value))
        }
        Expr::Ternary {
            cond,
            then_val,
            else_val,
        } => format!(
            "{} ? {} : {}",
            expr_atom(cond),
            expr_atom(then_val),
            expr_atom(else_val)
        ),
        Expr::Cast { ty, operand } => format!("({ty}){}", expr_atom(operand)),
    }
}

/// Wrap compound sub-expressions in parentheses; leave atoms bare.
fn expr_atom(e: &Expr) -> String {
    match e {
        Expr::IntLit { .. }
        | Expr::FloatLit { .. }
        | Expr::Ident(_)
        | Expr::Index { .. }
        | Expr::Call { .. }
        | Expr::Member { .. }
        | Expr::StrLit(_)
        | Expr::CharLit(_) => expr_to_c(e),
        _ => format!("({})", expr_to_c(e)),
    }
}

pub fn stmt_to_c(stmt: &Stmt, indent: usize) -> String {
    let pad = "    ".repeat(indent);
    match stmt {
        Stmt::Decl(decls) => {
            let mut out = String::new();
            for d in decls {
                out.push_str(&pad);
                out.push_str(&decl_to_c(d));
                out.push_str(";\n");
            }
            out
        }
        Stmt::Expr(e) => format!("{pad}{};\n", expr_to_c(e)),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let mut out = format!("{pad}if ({}) {{\n", expr_to_c(cond));
            for s in then_branch {
                out.push_str(&stmt_to_c(s, indent + 1));
            }
            out.push_str(&format!("{pad}}}"));
            if let Some(else_branch) = else_branch {
                out.push_str(" else {\n");
                for s in else_branch {
                    out.push_str(&stmt_to_c(s, indent + 1));
                }
                out.push_str(&format!("{pad}}}"));
            }
            out.push('\n');
            out
        }
        Stmt::For(f) => {
            let init = match &f.init {
                Some(s) => stmt_to_c(s, 0).trim_end().trim_end_matches(';').to_string(),
                None => String::new(),
            };
            let cond = f.cond.as_ref().map(expr_to_c).unwrap_or_default();
            let step = f.step.as_ref().map(expr_to_c).unwrap_or_default();
            let mut out = format!("{pad}for ({init}; {cond}; {step}) {{\n");
            for s in &f.body {
                out.push_str(&stmt_to_c(s, indent + 1));
            }
            out.push_str(&format!("{pad}}}\n"));
            out
        }
        Stmt::While(w) => {
            let mut out = format!("{pad}while ({}) {{\n", expr_to_c(&w.cond));
            for s in &w.body {
                out.push_str(&stmt_to_c(s, indent + 1));
            }
            out.push_str(&format!("{pad}}}\n"));
            out
        }
        Stmt::DoWhile(d) => {
            let mut out = format!("{pad}do {{\n");
            for s in &d.body {
                out.push_str(&stmt_to_c(s, indent + 1));
            }
            out.push_str(&format!("{pad}}} while ({});\n", expr_to_c(&d.cond)));
            out
        }
        Stmt::Return(Some(e)) => format!("{pad}return {};\n", expr_to_c(e)),
        Stmt::Return(None) => format!("{pad}return;\n"),
        Stmt::Break => format!("{pad}break;\n"),
        Stmt::Continue => format!("{pad}continue;\n"),
        Stmt::Block(stmts) => {
            let mut out = format!("{pad}{{\n");
            for s in stmts {
                out.push_str(&stmt_to_c(s, indent + 1));
            }
            out.push_str(&format!("{pad}}}\n"));
            out
        }
        Stmt::Opaque { text, .. } => format!("{pad}/* opaque */ {text};\n"),
        Stmt::Empty => format!("{pad};\n"),
    }
}

pub fn decl_to_c(d: &VarDecl) -> String {
    let mut out = String::new();
    out.push_str(d.base.c_name());
    out.push(' ');
    if d.pointer && d.extent.is_none() {
        out.push('*');
    }
    out.push_str(&d.name);
    if let Some(n) = d.extent {
        out.push_str(&format!("[{n}]"));
    }
    if let Some(init) = &d.init {
        out.push_str(" = ");
        out.push_str(&expr_to_c(init));
    }
    out
}

pub fn stmts_to_c(stmts: &[Stmt], indent: usize) -> String {
    stmts.iter().map(|s| stmt_to_c(s, indent)).collect()
}
