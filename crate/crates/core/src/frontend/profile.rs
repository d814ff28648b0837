//! Loop inventory walking and per-body operation/access profiling.
//!
//! A loop's profile covers one iteration of its body. Ops contributed by
//! nested loops are folded in, multiplied by the nested trip estimate (or 1
//! when the nested trip is unknown). Loop headers are control, not body, and
//! are never counted as ops; they do participate in the variable census.

use super::ast::*;
use super::render::expr_to_c;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy)]
pub(crate) enum LoopStmtRef<'u> {
    For(&'u ForStmt),
    While(&'u WhileStmt),
    DoWhile(&'u DoWhileStmt),
}

impl<'u> LoopStmtRef<'u> {
    pub fn body(&self) -> &'u [Stmt] {
        match self {
            LoopStmtRef::For(f) => &f.body,
            LoopStmtRef::While(w) => &w.body,
            LoopStmtRef::DoWhile(d) => &d.body,
        }
    }

    pub fn annotation(&self) -> Option<&'u TripAnnotation> {
        match self {
            LoopStmtRef::For(f) => f.annotation.as_ref(),
            LoopStmtRef::While(w) => w.annotation.as_ref(),
            LoopStmtRef::DoWhile(d) => d.annotation.as_ref(),
        }
    }

    pub fn loc(&self) -> &'u Loc {
        match self {
            LoopStmtRef::For(f) => &f.loc,
            LoopStmtRef::While(w) => &w.loc,
            LoopStmtRef::DoWhile(d) => &d.loc,
        }
    }
}

/// One discovered loop statement with its tree context.
pub(crate) struct LoopNode<'u> {
    pub id: u64,
    pub parent: Option<u64>,
    pub depth: u32,
    pub func: usize,
    pub stmt: LoopStmtRef<'u>,
}

/// Collect every loop statement in document order: files in input order,
/// functions in definition order, statements depth-first.
pub(crate) fn collect_loops(unit: &SourceUnit) -> Vec<LoopNode<'_>> {
    let mut out = Vec::new();
    let mut next_id = 1u64;
    for (func_idx, func) in unit.functions.iter().enumerate() {
        walk_stmts(&func.body, None, 0, func_idx, &mut next_id, &mut out);
    }
    out
}

fn walk_stmts<'u>(
    stmts: &'u [Stmt],
    parent: Option<u64>,
    depth: u32,
    func: usize,
    next_id: &mut u64,
    out: &mut Vec<LoopNode<'u>>,
) {
    for stmt in stmts {
        match stmt {
            Stmt::For(f) => {
                let id = *next_id;
                *next_id += 1;
                out.push(LoopNode {
                    id,
                    parent,
                    depth,
                    func,
                    stmt: LoopStmtRef::For(f),
                });
                walk_stmts(&f.body, Some(id), depth + 1, func, next_id, out);
            }
            Stmt::While(w) => {
                let id = *next_id;
                *next_id += 1;
                out.push(LoopNode {
                    id,
                    parent,
                    depth,
                    func,
                    stmt: LoopStmtRef::While(w),
                });
                walk_stmts(&w.body, Some(id), depth + 1, func, next_id, out);
            }
            Stmt::DoWhile(d) => {
                let id = *next_id;
                *next_id += 1;
                out.push(LoopNode {
                    id,
                    parent,
                    depth,
                    func,
                    stmt: LoopStmtRef::DoWhile(d),
                });
                walk_stmts(&d.body, Some(id), depth + 1, func, next_id, out);
            }
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                walk_stmts(then_branch, parent, depth, func, next_id, out);
                if let Some(e) = else_branch {
                    walk_stmts(e, parent, depth, func, next_id, out);
                }
            }
            Stmt::Block(inner) => walk_stmts(inner, parent, depth, func, next_id, out),
            _ => {}
        }
    }
}

/// Canonical for-loop header: `var` runs from `start`, compared against
/// `bound` with `cond_op`, advancing by `step` per iteration.
#[derive(Debug, Clone)]
pub(crate) struct ForHeader {
    pub var: String,
    pub var_decl_in_init: bool,
    pub start: Expr,
    pub cond_op: BinOp,
    pub bound: Expr,
    pub step: i64,
}

pub(crate) fn parse_for_header(f: &ForStmt) -> Option<ForHeader> {
    let (var, var_decl_in_init, start) = match f.init.as_deref() {
        Some(Stmt::Decl(decls)) if decls.len() == 1 => {
            let d = &decls[0];
            (d.name.clone(), true, d.init.clone()?)
        }
        Some(Stmt::Expr(Expr::Assign {
            op: AssignOp::Assign,
            target,
            value,
        })) => match target.as_ref() {
            Expr::Ident(name) => (name.clone(), false, value.as_ref().clone()),
            _ => return None,
        },
        _ => return None,
    };
    let (cond_op, bound) = match f.cond.as_ref()? {
        Expr::Binary { op, lhs, rhs } => match lhs.as_ref() {
            Expr::Ident(name)
                if *name == var
                    && matches!(op, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Ne) =>
            {
                (*op, rhs.as_ref().clone())
            }
            _ => return None,
        },
        _ => return None,
    };
    let step = step_of(f.step.as_ref()?, &var)?;
    Some(ForHeader {
        var,
        var_decl_in_init,
        start,
        cond_op,
        bound,
        step,
    })
}

fn step_of(step: &Expr, var: &str) -> Option<i64> {
    match step {
        Expr::Unary { op, operand } => match operand.as_ref() {
            Expr::Ident(name) if name == var => match op {
                UnaryOp::PreInc | UnaryOp::PostInc => Some(1),
                UnaryOp::PreDec | UnaryOp::PostDec => Some(-1),
                _ => None,
            },
            _ => None,
        },
        Expr::Assign { op, target, value } => {
            let Expr::Ident(name) = target.as_ref() else {
                return None;
            };
            if name != var {
                return None;
            }
            match op {
                AssignOp::AddAssign => value.as_int().filter(|k| *k > 0),
                AssignOp::SubAssign => value.as_int().filter(|k| *k > 0).map(|k| -k),
                AssignOp::Assign => match value.as_ref() {
                    Expr::Binary { op, lhs, rhs } => match (op, lhs.as_ref()) {
                        (BinOp::Add, Expr::Ident(n)) if n == var => {
                            rhs.as_int().filter(|k| *k > 0)
                        }
                        (BinOp::Sub, Expr::Ident(n)) if n == var => {
                            rhs.as_int().filter(|k| *k > 0).map(|k| -k)
                        }
                        _ => None,
                    },
                    _ => None,
                },
                _ => None,
            }
        }
        _ => None,
    }
}

/// Trip count of a counted for-loop when start, bound and step are all
/// compile-time constants and the loop runs at least once.
pub(crate) fn static_trip(f: &ForStmt) -> Option<u64> {
    let h = parse_for_header(f)?;
    let start = h.start.as_int()?;
    let bound = h.bound.as_int()?;
    let span = match h.cond_op {
        BinOp::Lt => bound - start,
        BinOp::Le => bound - start + 1,
        BinOp::Gt => start - bound,
        BinOp::Ge => start - bound + 1,
        BinOp::Ne => bound - start,
        _ => return None,
    };
    let step = match h.cond_op {
        BinOp::Lt | BinOp::Le => h.step,
        BinOp::Gt | BinOp::Ge => -h.step,
        BinOp::Ne => h.step,
        _ => return None,
    };
    if step <= 0 || span <= 0 {
        return None;
    }
    if h.cond_op == BinOp::Ne && span % step != 0 {
        return None;
    }
    let trips = (span + step - 1) / step;
    (trips >= 1).then_some(trips as u64)
}

/// Variable census plus op counts for one loop body, before nested folding.
#[derive(Debug, Default, Clone)]
pub(crate) struct RawProfile {
    pub ops_add: u64,
    pub ops_mul: u64,
    pub ops_div: u64,
    pub ops_other: u64,
    /// Canonical text of each distinct array-reference expression.
    pub accesses: BTreeSet<String>,
    /// Base names appearing in indexed or dereferenced positions.
    pub array_names: BTreeSet<String>,
    /// Plain variable names referenced anywhere in the subtree.
    pub var_names: BTreeSet<String>,
}

/// Profile the direct ops of `body` (nested loop bodies excluded) and census
/// variables/accesses over the full subtree (nested loops included).
pub(crate) fn profile_body(body: &[Stmt]) -> RawProfile {
    let mut p = RawProfile::default();
    for stmt in body {
        direct_ops_stmt(stmt, &mut p);
    }
    for stmt in body {
        census_stmt(stmt, &mut p);
    }
    p
}

fn direct_ops_stmt(stmt: &Stmt, p: &mut RawProfile) {
    match stmt {
        Stmt::Decl(decls) => {
            for d in decls {
                if let Some(init) = &d.init {
                    count_ops(init, p);
                }
            }
        }
        Stmt::Expr(e) => count_ops(e, p),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            count_ops(cond, p);
            for s in then_branch {
                direct_ops_stmt(s, p);
            }
            if let Some(else_branch) = else_branch {
                for s in else_branch {
                    direct_ops_stmt(s, p);
                }
            }
        }
        // nested loops are separate inventory entries; folded in later
        Stmt::For(_) | Stmt::While(_) | Stmt::DoWhile(_) => {}
        Stmt::Return(Some(e)) => count_ops(e, p),
        Stmt::Block(stmts) => {
            for s in stmts {
                direct_ops_stmt(s, p);
            }
        }
        Stmt::Opaque { .. } => p.ops_other += 1,
        _ => {}
    }
}

fn count_ops(e: &Expr, p: &mut RawProfile) {
    match e {
        Expr::Binary { op, lhs, rhs } => {
            match op {
                BinOp::Add | BinOp::Sub => p.ops_add += 1,
                BinOp::Mul => p.ops_mul += 1,
                BinOp::Div | BinOp::Mod => p.ops_div += 1,
                _ => p.ops_other += 1,
            }
            count_ops(lhs, p);
            count_ops(rhs, p);
        }
        Expr::Assign { op, target, value } => {
            match op {
                AssignOp::Assign => {}
                AssignOp::AddAssign | AssignOp::SubAssign => p.ops_add += 1,
                AssignOp::MulAssign => p.ops_mul += 1,
                AssignOp::DivAssign | AssignOp::ModAssign => p.ops_div += 1,
            }
            count_ops(target, p);
            count_ops(value, p);
        }
        Expr::Unary { op, operand } => {
            match op {
                UnaryOp::PreInc | UnaryOp::PostInc | UnaryOp::PreDec | UnaryOp::PostDec => {
                    p.ops_add += 1
                }
                UnaryOp::Neg | UnaryOp::Not | UnaryOp::BitNot => p.ops_other += 1,
                _ => {}
            }
            count_ops(operand, p);
        }
        Expr::Call { args, .. } => {
            p.ops_other += 1;
            for a in args {
                count_ops(a, p);
            }
        }
        Expr::Ternary {
            cond,
            then_val,
            else_val,
        } => {
            p.ops_other += 1;
            count_ops(cond, p);
            count_ops(then_val, p);
            count_ops(else_val, p);
        }
        Expr::Index { base, index } => {
            count_ops(base, p);
            count_ops(index, p);
        }
        Expr::Member { base, .. } => count_ops(base, p),
        Expr::Cast { operand, .. } => count_ops(operand, p),
        _ => {}
    }
}

fn census_stmt(stmt: &Stmt, p: &mut RawProfile) {
    match stmt {
        Stmt::Decl(decls) => {
            for d in decls {
                if let Some(init) = &d.init {
                    census_expr(init, false, p);
                }
            }
        }
        Stmt::Expr(e) => census_expr(e, false, p),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            census_expr(cond, false, p);
            for s in then_branch {
                census_stmt(s, p);
            }
            if let Some(else_branch) = else_branch {
                for s in else_branch {
                    census_stmt(s, p);
                }
            }
        }
        Stmt::For(f) => {
            if let Some(init) = &f.init {
                census_stmt(init, p);
            }
            if let Some(cond) = &f.cond {
                census_expr(cond, false, p);
            }
            if let Some(step) = &f.step {
                census_expr(step, false, p);
            }
            for s in &f.body {
                census_stmt(s, p);
            }
        }
        Stmt::While(w) => {
            census_expr(&w.cond, false, p);
            for s in &w.body {
                census_stmt(s, p);
            }
        }
        Stmt::DoWhile(d) => {
            census_expr(&d.cond, false, p);
            for s in &d.body {
                census_stmt(s, p);
            }
        }
        Stmt::Return(Some(e)) => census_expr(e, false, p),
        Stmt::Block(stmts) => {
            for s in stmts {
                census_stmt(s, p);
            }
        }
        _ => {}
    }
}

/// `in_index_base` suppresses recording intermediate chains of a
/// multi-dimensional access: `a[i][j]` is one access of `a`, not two.
fn census_expr(e: &Expr, in_index_base: bool, p: &mut RawProfile) {
    match e {
        Expr::Ident(name) => {
            p.var_names.insert(name.clone());
        }
        Expr::Index { base, index } => {
            if !in_index_base {
                p.accesses.insert(expr_to_c(e));
            }
            if let Some(name) = e.base_name() {
                p.array_names.insert(name.to_string());
            }
            census_expr(base, true, p);
            census_expr(index, false, p);
        }
        Expr::Unary {
            op: UnaryOp::Deref,
            operand,
        } => {
            if !in_index_base {
                p.accesses.insert(expr_to_c(e));
            }
            if let Some(name) = operand.base_name() {
                p.array_names.insert(name.to_string());
            }
            census_expr(operand, true, p);
        }
        Expr::Unary { operand, .. } => census_expr(operand, in_index_base, p),
        Expr::Binary { lhs, rhs, .. } => {
            census_expr(lhs, false, p);
            census_expr(rhs, false, p);
        }
        Expr::Assign { target, value, .. } => {
            census_expr(target, false, p);
            census_expr(value, false, p);
        }
        Expr::Call { args, .. } => {
            for a in args {
                census_expr(a, false, p);
            }
        }
        Expr::Ternary {
            cond,
            then_val,
            else_val,
        } => {
            census_expr(cond, false, p);
            census_expr(then_val, false, p);
            census_expr(else_val, false, p);
        }
        Expr::Member { base, .. } => census_expr(base, in_index_base, p),
        Expr::Cast { operand, .. } => census_expr(operand, in_index_base, p),
        _ => {}
    }
}

/// Fold nested-loop op counts into their parents, bottom-up. `trips` maps
/// loop id to the trip value used for folding (1 when unknown).
pub(crate) fn fold_ops(
    nodes: &[LoopNode<'_>],
    raw: &[RawProfile],
    trips: &BTreeMap<u64, u64>,
) -> Vec<(u64, u64, u64, u64)> {
    let index_of: BTreeMap<u64, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let mut folded: Vec<(u64, u64, u64, u64)> = raw
        .iter()
        .map(|r| (r.ops_add, r.ops_mul, r.ops_div, r.ops_other))
        .collect();
    // children always carry larger ids than their parents
    for i in (0..nodes.len()).rev() {
        if let Some(parent) = nodes[i].parent {
            let trip = trips.get(&nodes[i].id).copied().unwrap_or(1);
            let child = folded[i];
            let pi = index_of[&parent];
            folded[pi].0 = folded[pi].0.saturating_add(child.0.saturating_mul(trip));
            folded[pi].1 = folded[pi].1.saturating_add(child.1.saturating_mul(trip));
            folded[pi].2 = folded[pi].2.saturating_add(child.2.saturating_mul(trip));
            folded[pi].3 = folded[pi].3.saturating_add(child.3.saturating_mul(trip));
        }
    }
    folded
}
