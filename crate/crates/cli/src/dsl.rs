//! The fixture language: lexer, recursive-descent parser, syntax tree and
//! pretty-printer.
//!
//! ```text
//! field F(5);
//! ring R = F[x];
//! ring S = F[x,y] / (y^2 - x^3);
//! ideal A = (x^2) in R;
//! map f : R -> S sends x -> x;
//! check lech f;
//! check interchange f with sop (x), emax 2;
//! ```

use std::fmt;

use num_bigint::BigInt;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOption {
    Sop(Vec<Expr>),
    Emax(u32),
    Ideal(String),
    Module(String),
    Adjoin(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Field { name: String, p: u32, k: Option<u32> },
    Ring { name: String, field: String, vars: Vec<String>, relations: Vec<Expr> },
    Ideal { name: String, gens: Vec<Expr>, ring: String },
    Map { name: String, source: String, target: String, sends: Vec<(String, Expr)> },
    Check { kind: String, target: String, options: Vec<CheckOption> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: [&str; 14] = ["->", ";", ",", "(", ")", "[", "]", "/", "=", ":", "+", "-", "*", "^"];

fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        let (tl, tc) = (line, column);
        let advance = |ch: char, line: &mut usize, column: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut line, &mut column);
            continue;
        }
        if c == '#' {
            while let Some(&(_, ch)) = chars.peek() {
                if ch == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, ch)) = chars.peek() {
                if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                    end = i + ch.len_utf8();
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(text[start..end].to_string()), line: tl, column: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = start;
            while let Some(&(i, ch)) = chars.peek() {
                if ch.is_ascii_digit() {
                    end = i + 1;
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let n: BigInt = text[start..end].parse().expect("digits");
            out.push(Token { tok: Tok::Int(n), line: tl, column: tc });
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| text[start..].starts_with(**s)) {
            for _ in 0..sym.len() {
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Sym(sym), line: tl, column: tc });
            continue;
        }
        return Err(Diagnostic {
            line: tl,
            column: tc,
            message: format!("unexpected character {c:?}"),
            expected: Vec::new(),
        });
    }
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(Diagnostic {
            line: t.line,
            column: t.column,
            message: format!("unexpected {}", t.tok),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == k)
    }

    fn sym(&mut self, s: &'static str) -> PResult<()> {
        if self.at_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("`{s}`")])
        }
    }

    fn keyword(&mut self, k: &str) -> PResult<()> {
        if self.at_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("`{k}`")])
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn small_int(&mut self) -> PResult<u32> {
        match &self.peek().tok {
            Tok::Int(n) => match u32::try_from(n) {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => {
                    let t = self.peek();
                    Err(Diagnostic {
                        line: t.line,
                        column: t.column,
                        message: format!("integer {n} is too large"),
                        expected: vec!["integer below 2^32".into()],
                    })
                }
            },
            _ => self.error(&["integer"]),
        }
    }

    /// `open item (, item)* close`, allowing the empty list.
    fn list<T>(
        &mut self,
        open: &'static str,
        close: &'static str,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        self.sym(open)?;
        let mut out = Vec::new();
        if self.at_sym(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at_sym(",") {
                self.bump();
            } else if self.at_sym(close) {
                self.bump();
                return Ok(out);
            } else {
                return self.error(&["`,`", &format!("`{close}`")]);
            }
        }
    }

    fn document(&mut self) -> PResult<Document> {
        let mut items = Vec::new();
        while self.peek().tok != Tok::Eof {
            items.push(self.item()?);
        }
        Ok(Document { items })
    }

    fn item(&mut self) -> PResult<Item> {
        let item = match &self.peek().tok {
            Tok::Ident(k) if k == "field" => {
                self.bump();
                let name = self.ident()?;
                self.sym("(")?;
                let p = self.small_int()?;
                let k = if self.at_sym(",") {
                    self.bump();
                    Some(self.small_int()?)
                } else {
                    None
                };
                self.sym(")")?;
                Item::Field { name, p, k }
            }
            Tok::Ident(k) if k == "ring" => {
                self.bump();
                let name = self.ident()?;
                self.sym("=")?;
                let field = self.ident()?;
                let vars = self.list("[", "]", |p| p.ident())?;
                let relations = if self.at_sym("/") {
                    self.bump();
                    self.list("(", ")", |p| p.expr())?
                } else {
                    Vec::new()
                };
                Item::Ring { name, field, vars, relations }
            }
            Tok::Ident(k) if k == "ideal" => {
                self.bump();
                let name = self.ident()?;
                self.sym("=")?;
                let gens = self.list("(", ")", |p| p.expr())?;
                self.keyword("in")?;
                let ring = self.ident()?;
                Item::Ideal { name, gens, ring }
            }
            Tok::Ident(k) if k == "map" => {
                self.bump();
                let name = self.ident()?;
                self.sym(":")?;
                let source = self.ident()?;
                self.sym("->")?;
                let target = self.ident()?;
                let mut sends = Vec::new();
                if self.at_keyword("sends") {
                    self.bump();
                    loop {
                        let v = self.ident()?;
                        self.sym("->")?;
                        sends.push((v, self.expr()?));
                        if self.at_sym(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                } else if !self.at_sym(";") {
                    return self.error(&["`sends`", "`;`"]);
                }
                Item::Map { name, source, target, sends }
            }
            Tok::Ident(k) if k == "check" => {
                self.bump();
                let kind = self.ident()?;
                let target = self.ident()?;
                let mut options = Vec::new();
                if self.at_keyword("with") {
                    self.bump();
                    loop {
                        options.push(self.check_option()?);
                        if self.at_sym(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                } else if !self.at_sym(";") {
                    return self.error(&["`with`", "`;`"]);
                }
                Item::Check { kind, target, options }
            }
            _ => return self.error(&["`field`", "`ring`", "`ideal`", "`map`", "`check`"]),
        };
        self.sym(";")?;
        Ok(item)
    }

    fn check_option(&mut self) -> PResult<CheckOption> {
        const EXPECTED: [&str; 5] = ["`sop`", "`emax`", "`ideal`", "`module`", "`adjoin`"];
        let Tok::Ident(k) = &self.peek().tok else {
            return self.error(&EXPECTED);
        };
        Ok(match k.as_str() {
            "sop" => {
                self.bump();
                CheckOption::Sop(self.list("(", ")", |p| p.expr())?)
            }
            "emax" => {
                self.bump();
                CheckOption::Emax(self.small_int()?)
            }
            "ideal" => {
                self.bump();
                CheckOption::Ideal(self.ident()?)
            }
            "module" => {
                self.bump();
                CheckOption::Module(self.ident()?)
            }
            "adjoin" => {
                self.bump();
                CheckOption::Adjoin(self.small_int()?)
            }
            _ => return self.error(&EXPECTED),
        })
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            return Err(Diagnostic {
                line: t.line,
                column: t.column,
                message: format!("expression nested deeper than {MAX_DEPTH} levels"),
                expected: Vec::new(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.at_sym("+") {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.at_sym("-") {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        while self.at_sym("*") {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        if self.at_sym("-") {
            self.bump();
            self.enter()?;
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if self.at_sym("^") {
            self.bump();
            let n = self.small_int()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match &self.peek().tok {
            Tok::Int(n) => {
                let n = n.clone();
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(Expr::Var(s))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            _ => self.error(&["integer", "identifier", "`(`", "`-`"]),
        }
    }
}

pub fn parse_fixture(text: &str) -> Result<Document, Diagnostic> {
    let toks = lex(text)?;
    Parser { toks, pos: 0, depth: 0 }.document()
}

/// Parses raw bytes, reporting invalid UTF-8 as a diagnostic.
pub fn parse_bytes(bytes: &[u8]) -> Result<Document, Diagnostic> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_fixture(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = 1 + valid.iter().filter(|&&b| b == b'\n').count();
            let last_line = valid.rsplit(|&b| b == b'\n').next().unwrap_or(&[]);
            let column = 1 + String::from_utf8_lossy(last_line).chars().count();
            Err(Diagnostic {
                line,
                column,
                message: "invalid UTF-8".into(),
                expected: Vec::new(),
            })
        }
    }
}

/// Parses a single polynomial expression.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Int(_) | Expr::Var(_) => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Add(a, b) => {
            write_at(f, a, 1)?;
            write!(f, " + ")?;
            write_at(f, b, 2)
        }
        Expr::Sub(a, b) => {
            write_at(f, a, 1)?;
            write!(f, " - ")?;
            write_at(f, b, 2)
        }
        Expr::Mul(a, b) => {
            write_at(f, a, 2)?;
            write!(f, "*")?;
            write_at(f, b, 3)
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, 3)
        }
        Expr::Pow(a, n) => {
            write_at(f, a, 5)?;
            write!(f, "^{n}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for CheckOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckOption::Sop(xs) => write!(f, "sop ({})", join(xs)),
            CheckOption::Emax(n) => write!(f, "emax {n}"),
            CheckOption::Ideal(n) => write!(f, "ideal {n}"),
            CheckOption::Module(n) => write!(f, "module {n}"),
            CheckOption::Adjoin(n) => write!(f, "adjoin {n}"),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Field { name, p, k: None } => write!(f, "field {name}({p});"),
            Item::Field { name, p, k: Some(k) } => write!(f, "field {name}({p}, {k});"),
            Item::Ring { name, field, vars, relations } => {
                write!(f, "ring {name} = {field}[{}]", vars.join(", "))?;
                if !relations.is_empty() {
                    write!(f, " / ({})", join(relations))?;
                }
                write!(f, ";")
            }
            Item::Ideal { name, gens, ring } => write!(f, "ideal {name} = ({}) in {ring};", join(gens)),
            Item::Map { name, source, target, sends } => {
                write!(f, "map {name} : {source} -> {target}")?;
                if !sends.is_empty() {
                    let s: Vec<String> = sends.iter().map(|(v, e)| format!("{v} -> {e}")).collect();
                    write!(f, " sends {}", s.join(", "))?;
                }
                write!(f, ";")
            }
            Item::Check { kind, target, options } => {
                write!(f, "check {kind} {target}")?;
                if !options.is_empty() {
                    write!(f, " with {}", join(options))?;
                }
                write!(f, ";")
            }
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}
