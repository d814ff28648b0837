//! Recursive-descent parser for the C subset.
//!
//! The grammar covers what loop analysis needs: declarations, assignments,
//! arithmetic/relational/logical expressions, array indexing, calls, and
//! `for`/`while`/`do-while`/`if` blocks. Constructs outside the subset
//! (switch, goto, labels, inline asm, ...) are swallowed as opaque statements
//! with a diagnostic so a single exotic statement never sinks a file.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind, TokenStream};
use crate::error::FrontendError;
use std::collections::HashMap;

const TYPE_KEYWORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "unsigned", "signed", "const",
    "static", "extern", "register", "volatile", "inline", "restrict", "struct", "union", "enum",
    "size_t",
];

const STMT_KEYWORDS: &[&str] = &[
    "if", "else", "for", "while", "do", "return", "break", "continue",
];

/// Parse files that are already in memory as `(name, text)` pairs.
pub fn parse_source_strings(files: &[(String, String)]) -> Result<SourceUnit, FrontendError> {
    let mut unit = SourceUnit {
        files: files.to_vec(),
        ..Default::default()
    };
    let mut defines = HashMap::new();
    for (name, text) in files {
        let stream = tokenize(name, text, std::mem::take(&mut defines))?;
        defines = stream.defines.clone();
        let mut p = Parser::new(name, stream, &mut unit);
        p.parse_translation_unit()?;
    }
    Ok(unit)
}

struct Parser<'a> {
    file: String,
    tokens: Vec<Token>,
    annotations: HashMap<usize, TripAnnotation>,
    pos: usize,
    unit: &'a mut SourceUnit,
}

type PResult<T> = Result<T, FrontendError>;

impl<'a> Parser<'a> {
    fn new(file: &str, stream: TokenStream, unit: &'a mut SourceUnit) -> Self {
        Parser {
            file: file.to_string(),
            tokens: stream.tokens,
            annotations: stream.annotations,
            pos: 0,
            unit,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&Token> {
        self.tokens.get(self.pos + off)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn loc(&self) -> Loc {
        self.peek().map(|t| t.loc.clone()).unwrap_or(Loc {
            file: self.file.clone(),
            line: self.tokens.last().map(|t| t.loc.line).unwrap_or(1),
        })
    }

    fn err(&self, message: impl Into<String>) -> FrontendError {
        let loc = self.loc();
        FrontendError::Syntax {
            file: loc.file,
            line: loc.line,
            message: message.into(),
        }
    }

    fn diag(&mut self, loc: &Loc, message: impl Into<String>) {
        self.unit.diagnostics.push(Diagnostic {
            file: loc.file.clone(),
            line: loc.line,
            message: message.into(),
        });
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{p}`")))
        }
    }

    fn at_ident(&self, name: &str) -> bool {
        self.peek().is_some_and(|t| t.is_ident(name))
    }

    fn eat_ident(&mut self, name: &str) -> bool {
        if self.at_ident(name) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // ---- top level ------------------------------------------------------

    fn parse_translation_unit(&mut self) -> PResult<()> {
        while self.peek().is_some() {
            if self.at_ident("typedef") {
                self.skip_to_semicolon();
                continue;
            }
            if (self.at_ident("struct") || self.at_ident("union") || self.at_ident("enum"))
                && self.looks_like_aggregate_definition()
            {
                self.skip_aggregate_definition();
                continue;
            }
            if self.at_type_start() {
                self.parse_top_decl_or_function()?;
            } else {
                let loc = self.loc();
                self.diag(&loc, "skipping unrecognized top-level construct");
                self.skip_to_semicolon();
            }
        }
        Ok(())
    }

    /// `struct S { ... };` (definition) vs `struct S ident` (use as a type).
    fn looks_like_aggregate_definition(&self) -> bool {
        match self.peek_at(1).map(|t| &t.kind) {
            Some(TokenKind::Ident(_)) => self.peek_at(2).is_some_and(|t| t.is_punct("{")),
            Some(TokenKind::Punct("{")) => true,
            _ => false,
        }
    }

    fn skip_aggregate_definition(&mut self) {
        while let Some(t) = self.peek() {
            if t.is_punct("{") {
                self.skip_balanced("{", "}");
                self.eat_punct(";");
                return;
            }
            if t.is_punct(";") {
                self.pos += 1;
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) {
        debug_assert!(self.peek().is_some_and(|t| t.is_punct(open)));
        let mut depth = 0usize;
        while let Some(t) = self.bump() {
            if t.is_punct(open) {
                depth += 1;
            } else if t.is_punct(close) {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
    }

    fn skip_to_semicolon(&mut self) {
        while let Some(t) = self.peek() {
            if t.is_punct(";") {
                self.pos += 1;
                return;
            }
            if t.is_punct("{") {
                self.skip_balanced("{", "}");
                // `struct {...};` style: trailing semicolon optional
                self.eat_punct(";");
                return;
            }
            self.pos += 1;
        }
    }

    fn at_type_start(&self) -> bool {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(name)) => {
                if TYPE_KEYWORDS.contains(&name.as_str()) {
                    return true;
                }
                // `MyType ident ...` — treat unknown-ident-then-ident as a type
                matches!(self.peek_at(1).map(|t| &t.kind), Some(TokenKind::Ident(n))
                    if !STMT_KEYWORDS.contains(&n.as_str()))
                    || (self.peek_at(1).is_some_and(|t| t.is_punct("*"))
                        && matches!(self.peek_at(2).map(|t| &t.kind), Some(TokenKind::Ident(_))))
            }
            _ => false,
        }
    }

    fn parse_base_type(&mut self) -> PResult<BaseType> {
        let mut have_unsigned = false;
        let mut base: Option<BaseType> = None;
        let mut longs = 0;
        loop {
            let Some(TokenKind::Ident(word)) = self.peek().map(|t| t.kind.clone()) else {
                break;
            };
            match word.as_str() {
                "const" | "static" | "extern" | "register" | "volatile" | "inline"
                | "restrict" | "signed" => {
                    self.pos += 1;
                }
                "unsigned" => {
                    have_unsigned = true;
                    self.pos += 1;
                }
                "long" => {
                    longs += 1;
                    self.pos += 1;
                }
                "void" => {
                    base = Some(BaseType::Void);
                    self.pos += 1;
                }
                "char" => {
                    base = Some(BaseType::Char);
                    self.pos += 1;
                }
                "short" => {
                    base = Some(BaseType::Short);
                    self.pos += 1;
                }
                "int" => {
                    if base.is_none() {
                        base = Some(BaseType::Int);
                    }
                    self.pos += 1;
                }
                "float" => {
                    base = Some(BaseType::Float);
                    self.pos += 1;
                }
                "double" => {
                    base = Some(BaseType::Double);
                    self.pos += 1;
                }
                "size_t" => {
                    base = Some(BaseType::Long);
                    self.pos += 1;
                }
                "struct" | "union" | "enum" => {
                    self.pos += 1;
                    let tag = match self.peek().map(|t| t.kind.clone()) {
                        Some(TokenKind::Ident(tag)) => {
                            self.pos += 1;
                            tag
                        }
                        _ => String::new(),
                    };
                    base = Some(BaseType::Other(format!("{word} {tag}")));
                }
                other => {
                    if base.is_none() && !STMT_KEYWORDS.contains(&other) {
                        // typedef'd name used as a type
                        base = Some(BaseType::Other(other.to_string()));
                        self.pos += 1;
                    }
                    break;
                }
            }
            if matches!(base, Some(BaseType::Other(_))) {
                break;
            }
        }
        let base = match (base, longs, have_unsigned) {
            (Some(BaseType::Int) | None, 1, _) => BaseType::Long,
            (Some(BaseType::Int) | None, n, _) if n >= 2 => BaseType::LongLong,
            (Some(b), _, _) => b,
            (None, _, true) => BaseType::Int,
            (None, _, false) => return Err(self.err("expected type")),
        };
        Ok(base)
    }

    fn parse_top_decl_or_function(&mut self) -> PResult<()> {
        let base = self.parse_base_type()?;
        let mut pointer = false;
        while self.eat_punct("*") {
            pointer = true;
        }
        let loc = self.loc();
        let name = match self.bump().map(|t| t.kind) {
            Some(TokenKind::Ident(n)) => n,
            _ => {
                // e.g. `int;` — legal but useless
                self.diag(&loc, "declaration without a name");
                self.skip_to_semicolon();
                return Ok(());
            }
        };

        if self.peek().is_some_and(|t| t.is_punct("(")) {
            let params = self.parse_param_list()?;
            if self.peek().is_some_and(|t| t.is_punct("{")) {
                let body = self.parse_block()?;
                self.unit.functions.push(FunctionDecl {
                    name,
                    return_type: base,
                    params,
                    body,
                    loc,
                });
            } else {
                // prototype
                self.skip_to_semicolon();
            }
            return Ok(());
        }

        // global variable(s)
        let decls = self.finish_declarators(base, pointer, name)?;
        self.unit.globals.extend(decls);
        Ok(())
    }

    fn parse_param_list(&mut self) -> PResult<Vec<VarDecl>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            if self.at_ident("void") && self.peek_at(1).is_some_and(|t| t.is_punct(")")) {
                self.pos += 1;
                break;
            }
            if self.eat_punct("...") {
                break;
            }
            let base = self.parse_base_type()?;
            let mut pointer = false;
            while self.eat_punct("*") {
                pointer = true;
            }
            let name = match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Ident(n)) => {
                    self.pos += 1;
                    n
                }
                _ => String::new(), // unnamed parameter in a definition-like header
            };
            let mut extent = None;
            while self.eat_punct("[") {
                pointer = true;
                let mut dim = None;
                if let Some(TokenKind::Int { value, .. }) = self.peek().map(|t| t.kind.clone()) {
                    if self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                        dim = Some(value.max(0) as u64);
                        self.pos += 1;
                    }
                }
                while !self.peek().is_none_or(|t| t.is_punct("]")) {
                    self.pos += 1;
                }
                self.expect_punct("]")?;
                if let Some(d) = dim {
                    extent = Some(extent.unwrap_or(1) * d);
                }
            }
            params.push(VarDecl {
                name,
                base,
                pointer,
                extent,
                init: None,
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    /// Declarators after the first name has been read:
    /// `[N]...`, `= init`, `, next_name ...`, terminated by `;`.
    fn finish_declarators(
        &mut self,
        base: BaseType,
        first_pointer: bool,
        first_name: String,
    ) -> PResult<Vec<VarDecl>> {
        let mut decls = Vec::new();
        let mut pointer = first_pointer;
        let mut name = first_name;
        loop {
            let mut extent: Option<u64> = None;
            let mut saw_bracket = false;
            while self.eat_punct("[") {
                saw_bracket = true;
                let dim = match self.peek().map(|t| t.kind.clone()) {
                    Some(TokenKind::Int { value, .. })
                        if self.peek_at(1).is_some_and(|t| t.is_punct("]")) =>
                    {
                        self.pos += 1;
                        Some(value.max(0) as u64)
                    }
                    _ => {
                        while !self.peek().is_none_or(|t| t.is_punct("]")) {
                            self.pos += 1;
                        }
                        None
                    }
                };
                self.expect_punct("]")?;
                match (extent, dim) {
                    (prev, Some(d)) => extent = Some(prev.unwrap_or(1) * d),
                    (_, None) => extent = None,
                }
            }
            let init = if self.eat_punct("=") {
                if self.peek().is_some_and(|t| t.is_punct("{")) {
                    self.skip_balanced("{", "}");
                    None
                } else {
                    Some(self.parse_assignment()?)
                }
            } else {
                None
            };
            decls.push(VarDecl {
                name,
                base: base.clone(),
                pointer: pointer && !saw_bracket,
                extent,
                init,
            });
            if self.eat_punct(",") {
                pointer = false;
                while self.eat_punct("*") {
                    pointer = true;
                }
                name = match self.bump().map(|t| t.kind) {
                    Some(TokenKind::Ident(n)) => n,
                    _ => return Err(self.err("expected declarator name")),
                };
                continue;
            }
            self.expect_punct(";")?;
            return Ok(decls);
        }
    }

    // ---- statements -----------------------------------------------------

    fn parse_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unexpected end of file in block")),
                Some(t) if t.is_punct("}") => {
                    self.pos += 1;
                    return Ok(stmts);
                }
                Some(_) => stmts.push(self.parse_stmt()),
            }
        }
    }

    /// Parse one statement; on failure inside the subset, recover to an
    /// opaque statement and keep going.
    fn parse_stmt(&mut self) -> Stmt {
        let start = self.pos;
        match self.try_parse_stmt() {
            Ok(s) => s,
            Err(e) => {
                let loc = self
                    .tokens
                    .get(start)
                    .map(|t| t.loc.clone())
                    .unwrap_or_else(|| self.loc());
                self.pos = start;
                let text = self.recover_opaque();
                self.diag(&loc, format!("opaque statement ({e})"));
                Stmt::Opaque { loc, text }
            }
        }
    }

    fn try_parse_stmt(&mut self) -> PResult<Stmt> {
        let token = self.peek().ok_or_else(|| self.err("expected statement"))?;
        let kw_index = self.pos;
        match &token.kind {
            TokenKind::Punct("{") => Ok(Stmt::Block(self.parse_block()?)),
            TokenKind::Punct(";") => {
                self.pos += 1;
                Ok(Stmt::Empty)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "if" => self.parse_if(),
                "for" => {
                    let annotation = self.annotations.get(&kw_index).cloned();
                    self.parse_for(annotation)
                }
                "while" => {
                    let annotation = self.annotations.get(&kw_index).cloned();
                    self.parse_while(annotation)
                }
                "do" => {
                    let annotation = self.annotations.get(&kw_index).cloned();
                    self.parse_do_while(annotation)
                }
                "return" => {
                    self.pos += 1;
                    if self.eat_punct(";") {
                        Ok(Stmt::Return(None))
                    } else {
                        let e = self.parse_expr()?;
                        self.expect_punct(";")?;
                        Ok(Stmt::Return(Some(e)))
                    }
                }
                "break" => {
                    self.pos += 1;
                    self.expect_punct(";")?;
                    Ok(Stmt::Break)
                }
                "continue" => {
                    self.pos += 1;
                    self.expect_punct(";")?;
                    Ok(Stmt::Continue)
                }
                _ if self.at_type_start() => {
                    let base = self.parse_base_type()?;
                    let mut pointer = false;
                    while self.eat_punct("*") {
                        pointer = true;
                    }
                    let name = match self.bump().map(|t| t.kind) {
                        Some(TokenKind::Ident(n)) => n,
                        _ => return Err(self.err("expected declarator name")),
                    };
                    Ok(Stmt::Decl(self.finish_declarators(base, pointer, name)?))
                }
                _ => {
                    let e = self.parse_expr()?;
                    self.expect_punct(";")?;
                    Ok(Stmt::Expr(e))
                }
            },
            _ => {
                let e = self.parse_expr()?;
                self.expect_punct(";")?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn parse_if(&mut self) -> PResult<Stmt> {
        self.pos += 1;
        self.expect_punct("(")?;
        let cond = self.parse_expr()?;
        self.expect_punct(")")?;
        let then_branch = self.parse_stmt_as_block();
        let else_branch = if self.eat_ident("else") {
            Some(self.parse_stmt_as_block())
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_branch,
            else_branch,
        })
    }

    fn parse_stmt_as_block(&mut self) -> Vec<Stmt> {
        match self.parse_stmt() {
            Stmt::Block(stmts) => stmts,
            s => vec![s],
        }
    }

    fn parse_for(&mut self, annotation: Option<TripAnnotation>) -> PResult<Stmt> {
        let loc = self.loc();
        self.pos += 1;
        self.expect_punct("(")?;
        let init = if self.eat_punct(";") {
            None
        } else if self.at_type_start() {
            let base = self.parse_base_type()?;
            let mut pointer = false;
            while self.eat_punct("*") {
                pointer = true;
            }
            let name = match self.bump().map(|t| t.kind) {
                Some(TokenKind::Ident(n)) => n,
                _ => return Err(self.err("expected declarator name")),
            };
            let decls = self.finish_declarators(base, pointer, name)?;
            Some(Box::new(Stmt::Decl(decls)))
        } else {
            let e = self.parse_expr()?;
            self.expect_punct(";")?;
            Some(Box::new(Stmt::Expr(e)))
        };
        let cond = if self.peek().is_some_and(|t| t.is_punct(";")) {
            None
        } else {
            Some(self.parse_expr()?)
        };
        self.expect_punct(";")?;
        let step = if self.peek().is_some_and(|t| t.is_punct(")")) {
            None
        } else {
            Some(self.parse_expr()?)
        };
        self.expect_punct(")")?;
        let body = self.parse_stmt_as_block();
        Ok(Stmt::For(ForStmt {
            loc,
            init,
            cond,
            step,
            body,
            annotation,
        }))
    }

    fn parse_while(&mut self, annotation: Option<TripAnnotation>) -> PResult<Stmt> {
        let loc = self.loc();
        self.pos += 1;
        self.expect_punct("(")?;
        let cond = self.parse_expr()?;
        self.expect_punct(")")?;
        let body = self.parse_stmt_as_block();
        Ok(Stmt::While(WhileStmt {
            loc,
            cond,
            body,
            annotation,
        }))
    }

    fn parse_do_while(&mut self, annotation: Option<TripAnnotation>) -> PResult<Stmt> {
        let loc = self.loc();
        self.pos += 1;
        let body = self.parse_stmt_as_block();
        if !self.eat_ident("while") {
            return Err(self.err("expected `while` after do-body"));
        }
        self.expect_punct("(")?;
        let cond = self.parse_expr()?;
        self.expect_punct(")")?;
        self.expect_punct(";")?;
        Ok(Stmt::DoWhile(DoWhileStmt {
            loc,
            cond,
            body,
            annotation,
        }))
    }

    /// Skip a malformed statement: everything up to a `;` at depth 0 or a
    /// self-contained `{...}` block; never past the enclosing `}`.
    fn recover_opaque(&mut self) -> String {
        let mut text = String::new();
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 && t.is_punct("}") {
                break;
            }
            let t = self.bump().unwrap();
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(&token_text(&t.kind));
            match &t.kind {
                TokenKind::Punct("(") | TokenKind::Punct("[") | TokenKind::Punct("{") => {
                    depth += 1
                }
                TokenKind::Punct(")") | TokenKind::Punct("]") => depth = depth.saturating_sub(1),
                TokenKind::Punct("}") => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        self.eat_punct(";");
                        break;
                    }
                }
                TokenKind::Punct(";") if depth == 0 => break,
                _ => {}
            }
            if text.len() > 160 {
                text.truncate(160);
                // keep skipping without accumulating
                while let Some(t2) = self.peek() {
                    if depth == 0 && (t2.is_punct(";") || t2.is_punct("}")) {
                        if t2.is_punct(";") {
                            self.pos += 1;
                        }
                        return text;
                    }
                    let t2 = self.bump().unwrap();
                    match &t2.kind {
                        TokenKind::Punct("(") | TokenKind::Punct("[") | TokenKind::Punct("{") => {
                            depth += 1
                        }
                        TokenKind::Punct(")")
                        | TokenKind::Punct("]")
                        | TokenKind::Punct("}") => depth = depth.saturating_sub(1),
                        _ => {}
                    }
                }
                return text;
            }
        }
        text
    }

    // ---- expressions ------------------------------------------------------

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_comma()
    }

    fn parse_comma(&mut self) -> PResult<Expr> {
        let mut e = self.parse_assignment()?;
        // comma operator appears in for-steps like `i++, j++`; keep the last
        // value but count both sides by folding into a synthetic binary op
        while self.peek().is_some_and(|t| t.is_punct(","))
            && !self.comma_ends_context()
        {
            self.pos += 1;
            let rhs = self.parse_assignment()?;
            e = Expr::Binary {
                op: BinOp::BitOr, // placeholder shape; never classified as arithmetic
                lhs: Box::new(e),
                rhs: Box::new(rhs),
            };
        }
        Ok(e)
    }

    /// Inside call arguments the caller handles commas itself.
    fn comma_ends_context(&self) -> bool {
        false
    }

    fn parse_assignment(&mut self) -> PResult<Expr> {
        let lhs = self.parse_ternary()?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Punct("=")) => Some(AssignOp::Assign),
            Some(TokenKind::Punct("+=")) => Some(AssignOp::AddAssign),
            Some(TokenKind::Punct("-=")) => Some(AssignOp::SubAssign),
            Some(TokenKind::Punct("*=")) => Some(AssignOp::MulAssign),
            Some(TokenKind::Punct("/=")) => Some(AssignOp::DivAssign),
            Some(TokenKind::Punct("%=")) => Some(AssignOp::ModAssign),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let value = self.parse_assignment()?;
            return Ok(Expr::Assign {
                op,
                target: Box::new(lhs),
                value: Box::new(value),
            });
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let cond = self.parse_binary(0)?;
        if self.eat_punct("?") {
            let then_val = self.parse_assignment()?;
            self.expect_punct(":")?;
            let else_val = self.parse_assignment()?;
            return Ok(Expr::Ternary {
                cond: Box::new(cond),
                then_val: Box::new(then_val),
                else_val: Box::new(else_val),
            });
        }
        Ok(cond)
    }

    fn binop_at(&self, min_prec: u8) -> Option<(BinOp, u8)> {
        let t = self.peek()?;
        let (op, prec) = match &t.kind {
            TokenKind::Punct("||") => (BinOp::LogicalOr, 1),
            TokenKind::Punct("&&") => (BinOp::LogicalAnd, 2),
            TokenKind::Punct("|") => (BinOp::BitOr, 3),
            TokenKind::Punct("^") => (BinOp::BitXor, 4),
            TokenKind::Punct("&") => (BinOp::BitAnd, 5),
            TokenKind::Punct("==") => (BinOp::Eq, 6),
            TokenKind::Punct("!=") => (BinOp::Ne, 6),
            TokenKind::Punct("<") => (BinOp::Lt, 7),
            TokenKind::Punct("<=") => (BinOp::Le, 7),
            TokenKind::Punct(">") => (BinOp::Gt, 7),
            TokenKind::Punct(">=") => (BinOp::Ge, 7),
            TokenKind::Punct("<<") => (BinOp::Shl, 8),
            TokenKind::Punct(">>") => (BinOp::Shr, 8),
            TokenKind::Punct("+") => (BinOp::Add, 9),
            TokenKind::Punct("-") => (BinOp::Sub, 9),
            TokenKind::Punct("*") => (BinOp::Mul, 10),
            TokenKind::Punct("/") => (BinOp::Div, 10),
            TokenKind::Punct("%") => (BinOp::Mod, 10),
            _ => return None,
        };
        (prec >= min_prec).then_some((op, prec))
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        while let Some((op, prec)) = self.binop_at(min_prec) {
            self.pos += 1;
            let rhs = self.parse_binary(prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return Err(self.err("expected expression"));
        };
        let op = match &t.kind {
            TokenKind::Punct("-") => Some(UnaryOp::Neg),
            TokenKind::Punct("+") => Some(UnaryOp::Plus),
            TokenKind::Punct("!") => Some(UnaryOp::Not),
            TokenKind::Punct("~") => Some(UnaryOp::BitNot),
            TokenKind::Punct("++") => Some(UnaryOp::PreInc),
            TokenKind::Punct("--") => Some(UnaryOp::PreDec),
            TokenKind::Punct("*") => Some(UnaryOp::Deref),
            TokenKind::Punct("&") => Some(UnaryOp::AddrOf),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let operand = self.parse_unary()?;
            return Ok(Expr::Unary {
                op,
                operand: Box::new(operand),
            });
        }
        if t.is_punct("(") && self.at_cast() {
            self.pos += 1;
            let mut ty = String::new();
            while let Some(t) = self.peek() {
                if t.is_punct(")") {
                    break;
                }
                let t = self.bump().unwrap();
                if !ty.is_empty() {
                    ty.push(' ');
                }
                ty.push_str(&token_text(&t.kind));
            }
            self.expect_punct(")")?;
            let operand = self.parse_unary()?;
            return Ok(Expr::Cast {
                ty,
                operand: Box::new(operand),
            });
        }
        self.parse_postfix()
    }

    /// `(` followed by type keywords and only `*`/type words up to `)` is a cast.
    fn at_cast(&self) -> bool {
        let mut off = 1;
        let mut saw_type_word = false;
        loop {
            match self.peek_at(off).map(|t| &t.kind) {
                Some(TokenKind::Ident(w)) if TYPE_KEYWORDS.contains(&w.as_str()) => {
                    saw_type_word = true;
                    off += 1;
                }
                Some(TokenKind::Ident(_)) if saw_type_word => return false,
                Some(TokenKind::Punct("*")) if saw_type_word => {
                    off += 1;
                }
                Some(TokenKind::Punct(")")) => return saw_type_word,
                _ => return false,
            }
        }
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut e = self.parse_primary()?;
        loop {
            if self.eat_punct("[") {
                let index = self.parse_expr()?;
                self.expect_punct("]")?;
                e = Expr::Index {
                    base: Box::new(e),
                    index: Box::new(index),
                };
            } else if self.peek().is_some_and(|t| t.is_punct("(")) {
                let callee = match &e {
                    Expr::Ident(name) => name.clone(),
                    _ => return Err(self.err("call target must be a plain function name")),
                };
                self.pos += 1;
                let mut args = Vec::new();
                if !self.eat_punct(")") {
                    loop {
                        args.push(self.parse_assignment()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                    self.expect_punct(")")?;
                }
                e = Expr::Call { callee, args };
            } else if self.eat_punct(".") {
                let field = self.expect_ident()?;
                e = Expr::Member {
                    base: Box::new(e),
                    field,
                    arrow: false,
                };
            } else if self.eat_punct("->") {
                let field = self.expect_ident()?;
                e = Expr::Member {
                    base: Box::new(e),
                    field,
                    arrow: true,
                };
            } else if self.eat_punct("++") {
                e = Expr::Unary {
                    op: UnaryOp::PostInc,
                    operand: Box::new(e),
                };
            } else if self.eat_punct("--") {
                e = Expr::Unary {
                    op: UnaryOp::PostDec,
                    operand: Box::new(e),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.bump().map(|t| t.kind) {
            Some(TokenKind::Ident(n)) => Ok(n),
            _ => Err(self.err("expected identifier")),
        }
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.bump() else {
            return Err(self.err("expected expression"));
        };
        match t.kind {
            TokenKind::Int { value, raw } => Ok(Expr::IntLit { value, raw }),
            TokenKind::Float { value, raw } => Ok(Expr::FloatLit { value, raw }),
            TokenKind::Str(s) => Ok(Expr::StrLit(s)),
            TokenKind::Char(s) => Ok(Expr::CharLit(s)),
            TokenKind::Ident(name) => {
                if name == "sizeof" {
                    if self.peek().is_some_and(|t| t.is_punct("(")) {
                        self.skip_balanced("(", ")");
                    }
                    return Ok(Expr::int(4));
                }
                Ok(Expr::Ident(name))
            }
            TokenKind::Punct("(") => {
                let e = self.parse_expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.err("unexpected token in expression"))
            }
        }
    }
}

fn token_text(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Ident(s) => s.clone(),
        TokenKind::Int { raw, .. } | TokenKind::Float { raw, .. } => raw.clone(),
        TokenKind::Str(s) => format!("\"{s}\""),
        TokenKind::Char(s) => format!("'{s}'"),
        TokenKind::Punct(p) => p.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> SourceUnit {
        parse_source_strings(&[("t.c".to_string(), src.to_string())]).unwrap()
    }

    #[test]
    fn empty_file_parses_clean() {
        let unit = parse("");
        assert_eq!(unit.functions.len(), 0);
        assert_eq!(unit.diagnostics.len(), 0);
    }

    #[test]
    fn single_for_loop_function() {
        let unit = parse("int f(){for(int i=0;i<8;i++){a[i]=i;}return 0;}");
        assert_eq!(unit.functions.len(), 1);
        let body = &unit.functions[0].body;
        assert!(matches!(body[0], Stmt::For(_)));
        assert!(matches!(body[1], Stmt::Return(_)));
    }

    #[test]
    fn do_while_and_while() {
        let unit = parse("void g(int x){do{x--;}while(x>0); while(x<10){x++;}}");
        let body = &unit.functions[0].body;
        assert!(matches!(body[0], Stmt::DoWhile(_)));
        assert!(matches!(body[1], Stmt::While(_)));
    }

    #[test]
    fn unknown_construct_becomes_opaque_with_diagnostic() {
        let unit = parse("void g(int x){switch(x){case 1: break;} x = 1;}");
        assert_eq!(unit.functions.len(), 1);
        assert!(!unit.diagnostics.is_empty());
        assert!(unit.functions[0]
            .body
            .iter()
            .any(|s| matches!(s, Stmt::Opaque { .. })));
        // recovery kept the trailing assignment
        assert!(unit.functions[0]
            .body
            .iter()
            .any(|s| matches!(s, Stmt::Expr(Expr::Assign { .. }))));
    }

    #[test]
    fn global_arrays_and_defines() {
        let unit = parse("#define N 16\nfloat a[N];\ndouble m[4][4];\nint f(){return 0;}");
        assert_eq!(unit.globals.len(), 2);
        assert_eq!(unit.globals[0].extent, Some(16));
        assert_eq!(unit.globals[1].extent, Some(16));
        assert_eq!(unit.globals[1].base, BaseType::Double);
    }

    #[test]
    fn annotation_binds_to_loop_keyword() {
        let unit = parse("void f(int n){// offload: trip=1000\nwhile(n>0){n--;}}");
        match &unit.functions[0].body[0] {
            Stmt::While(w) => {
                assert_eq!(w.annotation.as_ref().unwrap().raw_value, "1000");
            }
            other => panic!("expected while, got {other:?}"),
        }
    }

    #[test]
    fn prototypes_and_struct_defs_are_skipped() {
        let unit = parse("struct pt { int x; int y; };\nint f(int);\nint f(int x){return x;}");
        assert_eq!(unit.functions.len(), 1);
        assert_eq!(unit.diagnostics.len(), 0);
    }

    #[test]
    fn casts_and_calls() {
        let unit = parse("float h(float x){return (float)sqrt(x) + fabs(-x);}");
        assert_eq!(unit.functions.len(), 1);
        assert_eq!(unit.diagnostics.len(), 0);
    }
}
