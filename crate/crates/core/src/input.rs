//! The textual input format.
//!
//! ```text
//! # comment
//! const pi: transcendental ~ 3.14159265358979323846264338327950288419716939937510;
//! const r2: algebraic t^2-2 ~ 1.4142135623730950488;
//! system { dx = x; dy = -y; }        # or: form { a = ...; b = ...; }
//! options { cf_depth = 12; }
//! ```
//!
//! Constants are adjoined in declaration order. Division is only allowed by
//! nonzero constants.

use std::collections::BTreeMap;

use crate::algebra::field::parse_decimal;
use crate::algebra::{Fe, Poly, SymbolKind, Tower};
use crate::error::{Error, Result};
use crate::projective::AffineSystem;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (sl, sc) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: sl, col: sc });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Number(chars[start..i].iter().collect()), line: sl, col: sc });
            continue;
        }
        if "+-*/^(){}=;:~,".contains(c) {
            out.push(Token { tok: Tok::Punct(c), line: sl, col: sc });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse { line, col, msg: format!("unexpected character `{c}`") });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// What the document asks to analyze.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    System { p: Poly, q: Poly },
    Form { a: Poly, b: Poly },
}

#[derive(Clone, Debug)]
pub struct InputDocument {
    pub tower: Tower,
    /// Approximation text of each constant, as written.
    pub approximations: Vec<String>,
    pub body: Body,
    pub options: BTreeMap<String, i64>,
}

impl InputDocument {
    pub fn system(&self) -> Result<AffineSystem> {
        match &self.body {
            Body::System { p, q } => AffineSystem::new(p.clone(), q.clone()),
            Body::Form { a, b } => AffineSystem::from_form(a, b),
        }
    }

    /// Canonical text; parsing it gives back an equal document.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (sym, approx) in self.tower.symbols().iter().zip(&self.approximations) {
            match sym.kind() {
                SymbolKind::Transcendental => {
                    s.push_str(&format!("const {}: transcendental ~ {};\n", sym.name(), approx));
                }
                SymbolKind::Algebraic { minpoly } => {
                    let mp = Poly::from_univariate(1, 0, &minpoly.iter().map(|c| Fe::rat(c.clone())).collect::<Vec<_>>());
                    s.push_str(&format!("const {}: algebraic {} ~ {};\n", sym.name(), mp.render(&["t"]), approx));
                }
            }
        }
        let names = ["x", "y"];
        match &self.body {
            Body::System { p, q } => {
                s.push_str(&format!("system {{\n  dx = {};\n  dy = {};\n}}\n", p.render(&names), q.render(&names)));
            }
            Body::Form { a, b } => {
                s.push_str(&format!("form {{\n  a = {};\n  b = {};\n}}\n", a.render(&names), b.render(&names)));
            }
        }
        if !self.options.is_empty() {
            s.push_str("options {\n");
            for (k, v) in &self.options {
                s.push_str(&format!("  {k} = {v};\n"));
            }
            s.push_str("}\n");
        }
        s
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    tower: Tower,
}

/// Variables an expression may use, in slot order.
struct Scope<'a> {
    vars: &'a [&'a str],
    allow_constants: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.is_punct(c) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn number_literal(&mut self) -> Result<String> {
        let neg = if self.is_punct('-') {
            self.next();
            true
        } else {
            false
        };
        match self.peek().tok.clone() {
            Tok::Number(s) => {
                self.next();
                Ok(if neg { format!("-{s}") } else { s })
            }
            _ => self.err("expected a number"),
        }
    }

    fn expr(&mut self, scope: &Scope) -> Result<Poly> {
        let mut acc = self.term(scope)?;
        loop {
            if self.is_punct('+') {
                self.next();
                acc = &acc + &self.term(scope)?;
            } else if self.is_punct('-') {
                self.next();
                acc = &acc - &self.term(scope)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, scope: &Scope) -> Result<Poly> {
        let mut acc = self.unary(scope)?;
        loop {
            if self.is_punct('*') {
                self.next();
                acc = &acc * &self.unary(scope)?;
            } else if self.is_punct('/') {
                let at = self.peek().clone();
                self.next();
                let d = self.unary(scope)?;
                if !d.is_constant() {
                    return Err(Error::NonPolynomial { line: at.line, col: at.col, msg: "division by a non-constant".into() });
                }
                let c = d.constant_term();
                if c.is_zero() {
                    return Err(Error::NonPolynomial { line: at.line, col: at.col, msg: "division by zero".into() });
                }
                let inv = c.try_inv()?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, scope: &Scope) -> Result<Poly> {
        if self.is_punct('-') {
            self.next();
            return Ok(-&self.unary(scope)?);
        }
        if self.is_punct('+') {
            self.next();
            return self.unary(scope);
        }
        self.power(scope)
    }

    fn power(&mut self, scope: &Scope) -> Result<Poly> {
        let base = self.atom(scope)?;
        if self.is_punct('^') {
            self.next();
            let at = self.peek().clone();
            let e = match self.next().tok {
                Tok::Number(s) if s.chars().all(|c| c.is_ascii_digit()) => s,
                _ => return Err(Error::Parse { line: at.line, col: at.col, msg: "exponent must be a nonnegative integer".into() }),
            };
            let e: u32 = e
                .parse()
                .map_err(|_| Error::Parse { line: at.line, col: at.col, msg: "exponent too large".into() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self, scope: &Scope) -> Result<Poly> {
        let n = scope.vars.len();
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(s) => {
                self.next();
                let (v, _) = parse_decimal(&s).map_err(|_| Error::Parse { line: t.line, col: t.col, msg: format!("bad number `{s}`") })?;
                Ok(Poly::constant(n, Fe::rat(v)))
            }
            Tok::Ident(name) => {
                self.next();
                if let Some(i) = scope.vars.iter().position(|v| *v == name) {
                    return Ok(Poly::var(n, i));
                }
                if scope.allow_constants {
                    if let Some(c) = self.tower.get(&name) {
                        return Ok(Poly::constant(n, c));
                    }
                }
                Err(Error::UndeclaredSymbol { name, line: t.line, col: t.col })
            }
            Tok::Punct('(') => {
                self.next();
                let e = self.expr(scope)?;
                self.expect_punct(')')?;
                Ok(e)
            }
            _ => self.err("expected an expression"),
        }
    }

    fn const_decl(&mut self, approximations: &mut Vec<String>) -> Result<()> {
        self.expect_keyword("const")?;
        let at = self.peek().clone();
        let name = self.expect_ident()?;
        self.expect_punct(':')?;
        let kind = self.expect_ident()?;
        let minpoly = match kind.as_str() {
            "transcendental" => None,
            "algebraic" => {
                let scope = Scope { vars: &["t"], allow_constants: false };
                let p = self.expr(&scope)?;
                let coeffs = p.to_univariate(0);
                let mut q = Vec::new();
                for c in coeffs {
                    match c.as_rational() {
                        Some(r) => q.push(r.clone()),
                        None => return self.err("minimal polynomial must have rational coefficients"),
                    }
                }
                Some(q)
            }
            _ => return Err(Error::Parse { line: at.line, col: at.col, msg: format!("unknown constant kind `{kind}`") }),
        };
        self.expect_punct('~')?;
        let approx = self.number_literal()?;
        self.expect_punct(';')?;
        match minpoly {
            None => self.tower.declare_transcendental(&name, &approx)?,
            Some(mp) => self.tower.declare_algebraic(&name, &mp, &approx)?,
        };
        approximations.push(approx);
        Ok(())
    }

    fn body(&mut self) -> Result<Body> {
        let kw = self.expect_ident()?;
        let (first, second) = match kw.as_str() {
            "system" => ("dx", "dy"),
            "form" => ("a", "b"),
            _ => return self.err(format!("expected `system` or `form`, found `{kw}`")),
        };
        self.expect_punct('{')?;
        let scope = Scope { vars: &["x", "y"], allow_constants: true };
        let mut got: BTreeMap<String, Poly> = BTreeMap::new();
        while !self.is_punct('}') {
            let key = self.expect_ident()?;
            if key != first && key != second {
                return self.err(format!("expected `{first}` or `{second}`"));
            }
            self.expect_punct('=')?;
            let e = self.expr(&scope)?;
            got.insert(key, e);
            if self.is_punct(';') {
                self.next();
            } else if !self.is_punct('}') {
                return self.err("expected `;`");
            }
        }
        self.expect_punct('}')?;
        let (Some(u), Some(v)) = (got.remove(first), got.remove(second)) else {
            return self.err(format!("both `{first}` and `{second}` are required"));
        };
        Ok(if kw == "system" { Body::System { p: u, q: v } } else { Body::Form { a: u, b: v } })
    }

    fn options(&mut self) -> Result<BTreeMap<String, i64>> {
        let mut out = BTreeMap::new();
        self.expect_keyword("options")?;
        self.expect_punct('{')?;
        while !self.is_punct('}') {
            let key = self.expect_ident()?;
            self.expect_punct('=')?;
            let v = self.number_literal()?;
            let n: i64 = v.parse().map_err(|_| Error::Parse {
                line: self.peek().line,
                col: self.peek().col,
                msg: format!("option `{key}` needs an integer"),
            })?;
            out.insert(key, n);
            if self.is_punct(';') {
                self.next();
            }
        }
        self.expect_punct('}')?;
        Ok(out)
    }
}

pub fn parse(text: &str) -> Result<InputDocument> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, tower: Tower::new() };
    let mut approximations = Vec::new();
    while matches!(&p.peek().tok, Tok::Ident(s) if s == "const") {
        p.const_decl(&mut approximations)?;
    }
    let body = p.body()?;
    let options = if matches!(&p.peek().tok, Tok::Ident(s) if s == "options") { p.options()? } else { BTreeMap::new() };
    if p.peek().tok != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(InputDocument { tower: p.tower, approximations, body, options })
}

/// Parses a polynomial in `x, y` against an existing tower.
pub fn parse_poly(text: &str, tower: &Tower) -> Result<Poly> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, tower: tower.clone() };
    let e = p.expr(&Scope { vars: &["x", "y"], allow_constants: true })?;
    if p.peek().tok != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a tower element.
pub fn parse_constant(text: &str, tower: &Tower) -> Result<Fe> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, tower: tower.clone() };
    let e = p.expr(&Scope { vars: &[], allow_constants: true })?;
    if p.peek().tok != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(e.constant_term())
}

/// Parses `(f_1)^e_1 * (f_2) * ...` as written to `integral.txt`; a factor
/// without exponent has exponent 1.
pub fn parse_integral(text: &str, tower: &Tower) -> Result<Vec<(Poly, Fe)>> {
    let bad = |msg: &str| Error::Parse { line: 1, col: 1, msg: msg.to_string() };
    let mut factors = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let text = text.trim();
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                factors.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    factors.push(&text[start..]);
    let mut out = Vec::new();
    for f in factors {
        let f = f.trim();
        if !f.starts_with('(') {
            return Err(bad("each factor must be a parenthesized polynomial"));
        }
        let mut depth = 0i32;
        let close = f
            .char_indices()
            .find(|&(_, ch)| {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                depth == 0
            })
            .map(|(i, _)| i)
            .ok_or_else(|| bad("unbalanced parentheses"))?;
        let poly = parse_poly(&f[1..close], tower)?;
        let rest = f[close + 1..].trim();
        let exponent = match rest.strip_prefix('^') {
            Some(e) => parse_constant(e.trim(), tower)?,
            None if rest.is_empty() => Fe::one(),
            None => return Err(bad("expected '^' or '*' after a factor")),
        };
        out.push((poly, exponent));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_text_round_trip() {
        let doc = parse("const pi: transcendental ~ 3.14159;\nsystem { dx = x; dy = -y; }").unwrap();
        let fs = parse_integral("(x^4-y)^pi * (x^3+y) * (y^2+x)^(1/2*pi)", &doc.tower).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[1].1, Fe::one());
        assert_eq!(fs[2].0.render(&["x", "y"]), "y^2+x");
        assert!(parse_integral("x^4-y", &doc.tower).is_err());
    }

    #[test]
    fn saddle_document() {
        let doc = parse("system { dx = x; dy = -y; }").unwrap();
        let s = doc.system().unwrap();
        assert_eq!(s.p, Poly::var(2, 0));
        assert_eq!(s.q, -&Poly::var(2, 1));
    }

    #[test]
    fn undeclared_symbol_is_located() {
        match parse("system { dx = x + pi; dy = y; }") {
            Err(Error::UndeclaredSymbol { name, line, col }) => {
                assert_eq!(name, "pi");
                assert_eq!((line, col), (1, 19));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn division_by_variable_rejected() {
        assert!(matches!(parse("system { dx = 1/x; dy = y; }"), Err(Error::NonPolynomial { .. })));
    }

    #[test]
    fn constants_and_round_trip() {
        let text = "const pi: transcendental ~ 3.14159265358979323846;\nconst r2: algebraic t^2-2 ~ 1.41421356;\nform { a = (3+4*pi)*x^6*y^2 - r2*y^2; b = x^5/pi; }\noptions { cf_depth = 8; }\n";
        let doc = parse(text).unwrap();
        let again = parse(&doc.render()).unwrap();
        assert_eq!(doc.body, again.body);
        assert_eq!(doc.render(), again.render());
        assert_eq!(doc.options.get("cf_depth"), Some(&8));
    }
}
