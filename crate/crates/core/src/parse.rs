//! Group-ring expression grammar and the presentation/complex file format.
//!
//! Expressions: `expr := term (('+'|'-') term)*`,
//! `term := [int ['*']] factor (['*'] factor)*`,
//! `factor := atom | '(' expr ')' ['^' int]`, `atom := letter ['^' int]`.
//! Lowercase letters are generators, uppercase letters their inverses, and
//! names introduced by `define` expand to their (parenthesized) value.
//!
//! File lines (one directive per line, `#` comments and blank lines kept):
//!
//! ```text
//! name <text>
//! source <text>
//! generators a b c
//! relator <expr>
//! define X = <expr>
//! complex fox
//! dims n0 n1 ... nk
//! d <k> <i> <j> = <expr>
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fox::{presentation_complex, ChainComplex};
use crate::presentation::Presentation;
use crate::ring::{GroupRingElement, RingMatrix};
use crate::word::Word;

/// Names visible to the expression parser.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub generators: Vec<char>,
    pub defines: HashMap<String, GroupRingElement>,
}

impl Scope {
    pub fn new(generators: Vec<char>) -> Self {
        Scope {
            generators,
            defines: HashMap::new(),
        }
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
    scope: &'a Scope,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            col: self.col0 + self.pos + 1,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(t.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return self.err("malformed exponent");
        }
        let v = self.uint()?;
        let v: i64 = v.try_into().map_err(|_| Error::Parse {
            line: self.line,
            col: self.col0 + self.pos + 1,
            msg: "exponent too large".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<GroupRingElement> {
        let mut acc = GroupRingElement::zero();
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            if sign < 0 {
                acc.sub_assign_ref(&t);
            } else {
                acc.add_assign_ref(&t);
            }
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(c: u8) -> bool {
        c == b'(' || c.is_ascii_alphabetic()
    }

    fn term(&mut self) -> Result<GroupRingElement> {
        let mut acc = GroupRingElement::one();
        let mut have_int = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let k = self.uint()?;
            acc = GroupRingElement::monomial(k, Word::identity());
            have_int = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if Self::starts_factor(c)) {
                    return self.err("expected factor after '*'");
                }
            }
        }
        let mut any = have_int;
        loop {
            match self.peek() {
                Some(c) if Self::starts_factor(c) => {
                    let f = self.factor()?;
                    acc = acc.mul_ref(&f);
                    any = true;
                }
                Some(b'*') if any => {
                    self.pos += 1;
                    if !matches!(self.peek(), Some(c) if Self::starts_factor(c)) {
                        return self.err("expected factor after '*'");
                    }
                }
                _ => break,
            }
        }
        if !any {
            return self.err("expected term");
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GroupRingElement> {
        let c = self.peek().unwrap();
        let base = if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
            e
        } else {
            self.atom()?
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.exponent()?;
            return match base.pow(k) {
                Some(x) => Ok(x),
                None => self.err("negative power of an expression that is not ± a single word"),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<GroupRingElement> {
        let start = self.pos;
        // macro names: longest uppercase/digit/underscore run that is defined
        let mut end = start;
        while end < self.s.len() && (self.s[end].is_ascii_alphanumeric() || self.s[end] == b'_') {
            end += 1;
        }
        for stop in (start + 1..=end).rev() {
            let name = std::str::from_utf8(&self.s[start..stop]).unwrap();
            if let Some(v) = self.scope.defines.get(name) {
                self.pos = stop;
                return Ok(v.clone());
            }
        }
        let c = self.s[start] as char;
        self.pos += 1;
        let (g, inv) = if let Some(g) = self.scope.generators.iter().position(|&x| x == c) {
            (g, false)
        } else if let Some(g) = self
            .scope
            .generators
            .iter()
            .position(|&x| x.to_ascii_uppercase() == c && c.is_ascii_uppercase())
        {
            (g, true)
        } else {
            self.pos = start;
            return self.err(format!("unknown symbol '{c}'"));
        };
        Ok(GroupRingElement::from_word(Word::gen_pow(
            g,
            if inv { -1 } else { 1 },
        )))
    }
}

/// Parses an expression; `line`/`col0` locate it for error messages.
pub fn parse_expr_at(s: &str, scope: &Scope, line: usize, col0: usize) -> Result<GroupRingElement> {
    let mut lx = Lexer {
        s: s.as_bytes(),
        pos: 0,
        line,
        col0,
        scope,
    };
    let e = lx.expr()?;
    if lx.peek().is_some() {
        return lx.err("unexpected trailing input");
    }
    Ok(e)
}

pub fn parse_expr(s: &str, scope: &Scope) -> Result<GroupRingElement> {
    parse_expr_at(s, scope, 1, 0)
}

/// Parses an expression that must be a single word with coefficient 1.
pub fn parse_word(s: &str, scope: &Scope) -> Result<Word> {
    let e = parse_expr(s, scope)?;
    match e.as_signed_word() {
        Some((1, w)) => Ok(w.clone()),
        _ => Err(Error::Input(format!("{s:?} is not a single word"))),
    }
}

/// One line of an input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Line {
    Blank,
    Comment(String),
    Name(String),
    Source(String),
    Generators(Vec<char>),
    Relator(String),
    Define(String, String),
    ComplexFox,
    Dims(Vec<usize>),
    Entry {
        k: usize,
        i: usize,
        j: usize,
        expr: String,
    },
}

/// A parsed input file, kept at the syntactic level so it serializes back
/// to the same text.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InputFile {
    pub lines: Vec<Line>,
}

impl InputFile {
    pub fn parse(text: &str) -> Result<InputFile> {
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            lines.push(parse_line(raw, n + 1)?);
        }
        Ok(InputFile { lines })
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            match l {
                Line::Blank => {}
                Line::Comment(c) => s.push_str(c),
                Line::Name(t) => s.push_str(&format!("name {t}")),
                Line::Source(t) => s.push_str(&format!("source {t}")),
                Line::Generators(g) => {
                    let v: Vec<String> = g.iter().map(|c| c.to_string()).collect();
                    s.push_str(&format!("generators {}", v.join(" ")));
                }
                Line::Relator(e) => s.push_str(&format!("relator {e}")),
                Line::Define(n, e) => s.push_str(&format!("define {n} = {e}")),
                Line::ComplexFox => s.push_str("complex fox"),
                Line::Dims(d) => {
                    let v: Vec<String> = d.iter().map(|x| x.to_string()).collect();
                    s.push_str(&format!("dims {}", v.join(" ")));
                }
                Line::Entry { k, i, j, expr } => s.push_str(&format!("d {k} {i} {j} = {expr}")),
            }
            s.push('\n');
        }
        s
    }

    pub fn name(&self) -> Option<&str> {
        self.lines.iter().find_map(|l| match l {
            Line::Name(t) => Some(t.as_str()),
            _ => None,
        })
    }

    /// Builds and validates the presentation and chain complex.
    pub fn build(&self) -> Result<(Presentation, ChainComplex)> {
        let mut scope: Option<Scope> = None;
        let mut relators = Vec::new();
        let mut fox = false;
        let mut dims: Option<Vec<usize>> = None;
        let mut entries: Vec<(usize, usize, usize, GroupRingElement)> = Vec::new();
        for (n, l) in self.lines.iter().enumerate() {
            let line = n + 1;
            let need = |s: &Option<Scope>| -> Result<()> {
                if s.is_none() {
                    return Err(Error::Parse {
                        line,
                        col: 1,
                        msg: "generators must be declared first".into(),
                    });
                }
                Ok(())
            };
            match l {
                Line::Generators(g) => {
                    if scope.is_some() {
                        return Err(Error::Parse {
                            line,
                            col: 1,
                            msg: "generators declared twice".into(),
                        });
                    }
                    scope = Some(Scope::new(g.clone()));
                }
                Line::Relator(e) => {
                    need(&scope)?;
                    let x = parse_expr_at(e, scope.as_ref().unwrap(), line, 8)?;
                    match x.as_signed_word() {
                        Some((1, w)) => relators.push(w.clone()),
                        _ => {
                            return Err(Error::Parse {
                                line,
                                col: 9,
                                msg: "relator is not a single word".into(),
                            })
                        }
                    }
                }
                Line::Define(name, e) => {
                    need(&scope)?;
                    let sc = scope.as_mut().unwrap();
                    let v = parse_expr_at(e, sc, line, 10 + name.len())?;
                    sc.defines.insert(name.clone(), v);
                }
                Line::ComplexFox => fox = true,
                Line::Dims(d) => dims = Some(d.clone()),
                Line::Entry { k, i, j, expr } => {
                    need(&scope)?;
                    let x = parse_expr_at(expr, scope.as_ref().unwrap(), line, 0)?;
                    entries.push((*k, *i, *j, x));
                }
                _ => {}
            }
        }
        let scope = scope.ok_or_else(|| Error::Input("no generators declared".into()))?;
        let p = Presentation::with_names(scope.generators.clone(), relators);
        let c = match (fox, dims) {
            (true, None) => {
                if !entries.is_empty() {
                    return Err(Error::Input(
                        "entries given together with `complex fox`".into(),
                    ));
                }
                presentation_complex(&p)
            }
            (false, Some(d)) => {
                if d.is_empty() {
                    return Err(Error::Shape("empty dims".into()));
                }
                let mut bs: Vec<RingMatrix> = (1..d.len())
                    .map(|k| RingMatrix::zeros(d[k], d[k - 1]))
                    .collect();
                for (k, i, j, x) in entries {
                    if k == 0 || k >= d.len() || i == 0 || i > d[k] || j == 0 || j > d[k - 1] {
                        return Err(Error::Shape(format!("entry d {k} {i} {j} out of range")));
                    }
                    bs[k - 1].set(i - 1, j - 1, x);
                }
                ChainComplex::new(d, bs)?
            }
            (true, Some(_)) => {
                return Err(Error::Input("both `complex fox` and `dims` given".into()))
            }
            (false, None) => return Err(Error::Input("no complex specified".into())),
        };
        Ok((p, c))
    }

    /// Text for a presentation with its presentation complex.
    pub fn from_presentation(name: &str, p: &Presentation) -> InputFile {
        let mut lines = vec![
            Line::Name(name.to_string()),
            Line::Generators(p.names.clone()),
        ];
        for r in &p.relators {
            lines.push(Line::Relator(r.display_with(&p.names)));
        }
        lines.push(Line::ComplexFox);
        InputFile { lines }
    }

    /// Text for an explicit complex.
    pub fn from_complex(name: &str, p: &Presentation, c: &ChainComplex) -> InputFile {
        let mut lines = vec![
            Line::Name(name.to_string()),
            Line::Generators(p.names.clone()),
        ];
        for r in &p.relators {
            lines.push(Line::Relator(r.display_with(&p.names)));
        }
        lines.push(Line::Dims(c.dims.clone()));
        for (k, d) in c.boundaries.iter().enumerate() {
            for i in 0..d.rows {
                for j in 0..d.cols {
                    let e = d.get(i, j);
                    if !e.is_zero() {
                        lines.push(Line::Entry {
                            k: k + 1,
                            i: i + 1,
                            j: j + 1,
                            expr: e.display_with(&p.names),
                        });
                    }
                }
            }
        }
        InputFile { lines }
    }
}

fn parse_line(raw: &str, line: usize) -> Result<Line> {
    let t = raw.trim();
    let perr = |col: usize, msg: &str| Error::Parse {
        line,
        col,
        msg: msg.to_string(),
    };
    if t.is_empty() {
        return Ok(Line::Blank);
    }
    if t.starts_with('#') {
        return Ok(Line::Comment(t.to_string()));
    }
    let (kw, rest) = match t.find(char::is_whitespace) {
        Some(i) => (&t[..i], t[i..].trim()),
        None => (t, ""),
    };
    match kw {
        "name" => Ok(Line::Name(rest.to_string())),
        "source" => Ok(Line::Source(rest.to_string())),
        "generators" => {
            let mut g = Vec::new();
            for tok in rest.split_whitespace() {
                let mut cs = tok.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() && !g.contains(&c) => g.push(c),
                    _ => return Err(perr(1, &format!("bad generator name {tok:?}"))),
                }
            }
            Ok(Line::Generators(g))
        }
        "relator" => Ok(Line::Relator(rest.to_string())),
        "define" => {
            let (n, e) = rest
                .split_once('=')
                .ok_or_else(|| perr(8, "expected `define NAME = expr`"))?;
            let n = n.trim();
            if n.is_empty()
                || !n.starts_with(|c: char| c.is_ascii_uppercase())
                || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(perr(8, "define names start with an uppercase letter"));
            }
            Ok(Line::Define(n.to_string(), e.trim().to_string()))
        }
        "complex" if rest == "fox" => Ok(Line::ComplexFox),
        "dims" => {
            let d = rest
                .split_whitespace()
                .map(|x| x.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| perr(6, "bad dims"))?;
            Ok(Line::Dims(d))
        }
        "d" => {
            let (idx, e) = rest
                .split_once('=')
                .ok_or_else(|| perr(3, "expected `d k i j = expr`"))?;
            let v = idx
                .split_whitespace()
                .map(|x| x.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| perr(3, "bad entry indices"))?;
            if v.len() != 3 {
                return Err(perr(3, "expected three indices"));
            }
            Ok(Line::Entry {
                k: v[0],
                i: v[1],
                j: v[2],
                expr: e.trim().to_string(),
            })
        }
        _ => Err(perr(1, &format!("unknown directive {kw:?}"))),
    }
}

pub fn parse_input_str(text: &str) -> Result<(Presentation, ChainComplex)> {
    InputFile::parse(text)?.build()
}

pub fn parse_input(path: &std::path::Path) -> Result<(Presentation, ChainComplex)> {
    parse_input_str(&read_text(path)?)
}

/// Reads a whole file, keeping the path in the error.
pub fn read_text(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc() -> Scope {
        Scope::new(vec!['a', 'b', 'c'])
    }

    #[test]
    fn juxtaposition_and_inverses() {
        let x = parse_expr("c^-1b^-1ca", &sc()).unwrap();
        let y = parse_expr("C*B*c*a", &sc()).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.to_string(), "c^-1b^-1ca");
    }

    #[test]
    fn coefficients_and_powers() {
        let x = parse_expr("2*a - (1+a)^2 + 3", &sc()).unwrap();
        assert_eq!(x, parse_expr("2 - a^2", &sc()).unwrap());
        let y = parse_expr("-(ab)^-2", &sc()).unwrap();
        assert_eq!(y, parse_expr("-B A B A", &sc()).unwrap());
    }

    #[test]
    fn bad_negative_power() {
        assert!(parse_expr("(1+a)^-1", &sc()).is_err());
    }

    #[test]
    fn malformed_exponent_location() {
        match parse_expr("ab^x", &sc()) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defines_expand() {
        let mut s = sc();
        s.defines
            .insert("X".into(), parse_expr("a^2c^-5b^-3", &s).unwrap());
        let x = parse_expr("1+X", &s).unwrap();
        assert_eq!(x, parse_expr("1 + a^2 c^-5 b^-3", &s).unwrap());
    }
}
