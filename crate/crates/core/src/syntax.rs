//! Text formats: terms, types, judgements, derivation scripts and grammar
//! files. Printers live with the types (`Display`); this module parses.
//!
//! Indices are single characters or `{name}`; inside braces a
//! space-separated list gives several indices (`S^{i k}_j`). In types `*` is
//! ⊗ and `|` is ℘, `*` binding tighter, both left-associative; `~` negates a
//! literal or dualizes a parenthesized type. Literal names cannot contain
//! `_`, so `~O_j` is the literal `O` with lower index `j`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::engine::Grammar;
use crate::term::{normalize, Factor, Index, TensorTerm, TermExpr, Word};
use crate::ttc::{Judgement, Literal, Mode, Rule, Symbol, TensorType, Valency};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    At {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

impl ParseError {
    fn on_line(self, line: usize) -> ParseError {
        match self {
            ParseError::At { col, msg, .. } => ParseError::At { line, col, msg },
            ParseError::Line { msg, .. } => ParseError::Line { line, msg },
        }
    }
}

/// Declared atom valencies. Unknown atoms take the valency of their first
/// occurrence.
pub type LiteralTable = BTreeMap<String, Valency>;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let col = self.src[..self.pos].chars().count() + 1;
        Err(ParseError::At {
            line: 1,
            col,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn name(&mut self) -> Result<String, ParseError> {
        self.name_while(is_name_char)
    }

    /// Literal names stop at `_`, which starts the lower decorations.
    fn literal_name(&mut self) -> Result<String, ParseError> {
        self.name_while(|c| c != '_' && is_name_char(c))
    }

    fn name_while(&mut self, ok: fn(char) -> bool) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if ok(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.err("expected a name");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// One index token: a single character or `{name ...}`.
    fn indices(&mut self) -> Result<Vec<Index>, ParseError> {
        match self.peek_raw() {
            Some('{') => {
                self.pos += 1;
                let mut out = Vec::new();
                while !self.eat('}') {
                    if self.at_end() {
                        return self.err("unclosed '{'");
                    }
                    out.push(Index::new(&self.name()?));
                }
                Ok(out)
            }
            Some(c) if is_name_char(c) => {
                self.pos += c.len_utf8();
                Ok(vec![Index::new(&c.to_string())])
            }
            _ => self.err("expected an index"),
        }
    }

    /// `^I` and `_J` decorations in either order.
    fn decorations(&mut self) -> Result<(Vec<Index>, Vec<Index>), ParseError> {
        let mut up = None;
        let mut down = None;
        loop {
            match self.peek_raw() {
                Some('^') if up.is_none() => {
                    self.pos += 1;
                    up = Some(self.indices()?);
                }
                Some('_') if down.is_none() => {
                    self.pos += 1;
                    down = Some(self.indices()?);
                }
                _ => break,
            }
        }
        Ok((up.unwrap_or_default(), down.unwrap_or_default()))
    }
}

// ---- terms ----

fn term_factors(c: &mut Cursor) -> Result<Vec<Factor>, ParseError> {
    let mut out = Vec::new();
    loop {
        match c.peek() {
            None => break,
            Some('1') => {
                c.pos += 1;
            }
            Some('[') => {
                c.pos += 1;
                let start = c.pos;
                while let Some(ch) = c.peek_raw() {
                    if ch == ']' {
                        break;
                    }
                    c.pos += ch.len_utf8();
                }
                let body = c.src[start..c.pos].to_string();
                c.expect(']')?;
                let word = Word::parse(&body);
                if matches!(c.peek_raw(), Some('^') | Some('_')) {
                    let (up, down) = c.decorations()?;
                    if up.len() != 1 || down.len() != 1 {
                        return c.err("an edge needs one lower and one upper index");
                    }
                    out.push(Factor::Edge {
                        word,
                        lower: down[0].clone(),
                        upper: up[0].clone(),
                    });
                } else {
                    out.push(Factor::Loop(word));
                }
            }
            Some('d') => {
                c.pos += 1;
                let (up, down) = c.decorations()?;
                if up.len() != 1 || down.len() != 1 {
                    return c.err("δ needs one lower and one upper index");
                }
                out.push(Factor::delta(down[0].clone(), up[0].clone()));
            }
            Some(_) => break,
        }
        if !c.eat('*') && !matches!(c.peek(), Some('[') | Some('d') | Some('1')) {
            break;
        }
    }
    Ok(out)
}

fn term_at(c: &mut Cursor) -> Result<TensorTerm, ParseError> {
    let factors = term_factors(c)?;
    match TermExpr::new(factors) {
        Ok(e) => Ok(normalize(&e)),
        Err(e) => c.err(e.to_string()),
    }
}

/// Parses a term expression and normalizes it.
pub fn parse_term(src: &str) -> Result<TensorTerm, ParseError> {
    let mut c = Cursor::new(src);
    let t = term_at(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected input after term");
    }
    Ok(t)
}

/// Parses a term expression without normalizing.
pub fn parse_term_expr(src: &str) -> Result<TermExpr, ParseError> {
    let mut c = Cursor::new(src);
    let f = term_factors(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected input after term");
    }
    TermExpr::new(f).or_else(|e| c.err(e.to_string()))
}

// ---- types ----

struct TypeParser<'t> {
    table: &'t mut LiteralTable,
    strict: bool,
}

impl TypeParser<'_> {
    fn par(&mut self, c: &mut Cursor) -> Result<TensorType, ParseError> {
        let mut a = self.tensor(c)?;
        while c.eat('|') {
            let b = self.tensor(c)?;
            a = TensorType::par(&a, &b).or_else(|e| c.err(e.to_string()))?;
        }
        Ok(a)
    }

    fn tensor(&mut self, c: &mut Cursor) -> Result<TensorType, ParseError> {
        let mut a = self.unary(c)?;
        while c.eat('*') {
            let b = self.unary(c)?;
            a = TensorType::tensor(&a, &b).or_else(|e| c.err(e.to_string()))?;
        }
        Ok(a)
    }

    fn unary(&mut self, c: &mut Cursor) -> Result<TensorType, ParseError> {
        if c.eat('~') {
            if matches!(c.peek(), Some('('))
                || c.src[c.pos..].starts_with("nab^")
                || c.src[c.pos..].starts_with("tri^")
            {
                return Ok(self.unary(c)?.dual());
            }
            return self.literal(c, true);
        }
        if c.eat('(') {
            let t = self.par(c)?;
            c.expect(')')?;
            return Ok(t);
        }
        for (kw, nabla) in [("nab", true), ("tri", false)] {
            if c.src[c.pos..].starts_with(kw) && c.src[c.pos + kw.len()..].starts_with(['^', '_']) {
                c.pos += kw.len();
                let (up, down) = c.decorations()?;
                if up.len() != 1 || down.len() != 1 {
                    return c.err("a binder binds one lower and one upper index");
                }
                c.expect('(')?;
                let body = self.par(c)?;
                c.expect(')')?;
                let r = if nabla {
                    TensorType::nabla(&body, &up[0], &down[0])
                } else {
                    TensorType::tri(&body, &up[0], &down[0])
                };
                return r.or_else(|e| c.err(e.to_string()));
            }
        }
        self.literal(c, false)
    }

    fn literal(&mut self, c: &mut Cursor, negated: bool) -> Result<TensorType, ParseError> {
        let name = c.literal_name()?;
        let (up, down) = c.decorations()?;
        let occ = Valency::new(up.len(), down.len());
        let atom = if negated { occ.swapped() } else { occ };
        match self.table.get(&name) {
            Some(v) if *v != atom => {
                return c.err(format!("literal {name} has valency {v}, used with {atom}"));
            }
            None if self.strict => return c.err(format!("undeclared literal {name}")),
            None => {
                self.table.insert(name.clone(), atom);
            }
            _ => {}
        }
        let lit = Literal {
            name: name.as_str().into(),
            negated,
            valency: occ,
        };
        TensorType::new(Symbol::Lit(lit), up, down).or_else(|e| c.err(e.to_string()))
    }
}

/// Parses one decorated type. Literal valencies are checked against and
/// recorded in `table`.
pub fn parse_type(src: &str, table: &mut LiteralTable) -> Result<TensorType, ParseError> {
    let mut c = Cursor::new(src);
    let t = TypeParser {
        table,
        strict: false,
    }
    .par(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected input after type");
    }
    Ok(t)
}

fn judgement_at(
    c: &mut Cursor,
    table: &mut LiteralTable,
    strict: bool,
) -> Result<Judgement, ParseError> {
    let term = term_at(c)?;
    if !c.eat_str("|-") {
        return c.err("expected '|-'");
    }
    let mut types = Vec::new();
    let mut p = TypeParser { table, strict };
    if !c.at_end() {
        loop {
            types.push(p.par(c)?);
            if !c.eat(',') {
                break;
            }
        }
    }
    if !c.at_end() {
        return c.err("unexpected input after judgement");
    }
    Judgement::new(term, types).or_else(|e| c.err(e.to_string()))
}

/// Parses `term |- T1, T2, ...` and checks the judgement conditions.
pub fn parse_judgement(src: &str, table: &mut LiteralTable) -> Result<Judgement, ParseError> {
    judgement_at(&mut Cursor::new(src), table, false)
}

/// Parses a judgement with no declared literals.
pub fn judgement(src: &str) -> Result<Judgement, ParseError> {
    parse_judgement(src, &mut LiteralTable::new())
}

// ---- scripts ----

fn index_list(c: &mut Cursor) -> Result<Vec<Index>, ParseError> {
    c.expect('(')?;
    let mut out = Vec::new();
    while !c.eat(')') {
        if c.at_end() {
            return c.err("unclosed '('");
        }
        out.push(Index::new(&c.name()?));
    }
    Ok(out)
}

fn number(c: &mut Cursor) -> Result<usize, ParseError> {
    let n = c.name()?;
    n.parse()
        .or_else(|_| c.err(format!("expected a number, got {n}")))
}

fn script_line(line: &str) -> Result<Rule, ParseError> {
    let mut c = Cursor::new(line);
    let op = c.name()?;
    let rule = match op.as_str() {
        "id" => {
            let name = c.name()?;
            c.expect('(')?;
            let up = number(&mut c)?;
            c.expect(',')?;
            let down = number(&mut c)?;
            c.expect(')')?;
            let (i, j, i2, j2) = (
                index_list(&mut c)?,
                index_list(&mut c)?,
                index_list(&mut c)?,
                index_list(&mut c)?,
            );
            Rule::Id {
                lit: Literal::positive(&name, Valency::new(up, down)),
                i,
                j,
                i2,
                j2,
            }
        }
        "axiom" => {
            c.skip_ws();
            let rest = c.src[c.pos..].trim().to_string();
            c.pos = c.src.len();
            if rest.is_empty() {
                return c.err("axiom needs a name");
            }
            Rule::Axiom(rest)
        }
        "cut" => Rule::Cut {
            left: number(&mut c)?,
            right: number(&mut c)?,
        },
        "tensor" => {
            let left = number(&mut c)?;
            let right = if c.at_end() { 0 } else { number(&mut c)? };
            Rule::Tensor { left, right }
        }
        "par" => {
            let first = number(&mut c)?;
            let second = if c.at_end() {
                first + 1
            } else {
                number(&mut c)?
            };
            Rule::Par { first, second }
        }
        "perm" => {
            let mut p = Vec::new();
            while !c.at_end() {
                p.push(number(&mut c)?);
            }
            Rule::Perm(p)
        }
        "nab" | "tri" => {
            let (pos, lower, upper) = (number(&mut c)?, number(&mut c)?, number(&mut c)?);
            if op == "nab" {
                Rule::Nabla { pos, lower, upper }
            } else {
                Rule::Tri { pos, lower, upper }
            }
        }
        other => return c.err(format!("unknown rule {other}")),
    };
    if !c.at_end() {
        return c.err("unexpected input after rule");
    }
    Ok(rule)
}

fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(n, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((n + 1, l))
    })
}

/// Parses a postfix derivation script, one rule per line; `#` starts a
/// comment.
pub fn parse_script(src: &str) -> Result<Vec<Rule>, ParseError> {
    content_lines(src)
        .map(|(n, l)| script_line(l).map_err(|e| e.on_line(n)))
        .collect()
}

// ---- grammars ----

/// Splits `label: rest` when the prefix is a plain name and not a term.
fn split_label(line: &str) -> (Option<&str>, &str) {
    if let Some((head, rest)) = line.split_once(':') {
        let h = head.trim();
        if !h.is_empty() && h.chars().all(is_name_char) && !rest.trim_start().starts_with('-') {
            return (Some(h), rest.trim());
        }
    }
    (None, line)
}

fn parse_valency(s: &str) -> Option<Valency> {
    let s = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = s.split_once(',')?;
    Some(Valency::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Parses a grammar file with sections `literals:`, `terminals:`,
/// `axioms:`, `start:` and optional `restriction: on|off`.
pub fn parse_grammar(src: &str) -> Result<Grammar, ParseError> {
    let mut section = String::new();
    let mut literals = LiteralTable::new();
    let mut terminals = Vec::new();
    let mut axiom_lines: Vec<(usize, String)> = Vec::new();
    let mut start = None;
    let mut restriction = false;
    for (n, line) in content_lines(src) {
        let err = |msg: String| ParseError::Line { line: n, msg };
        let mut body = line;
        if let Some((head, rest)) = line.split_once(':') {
            let h = head.trim();
            if ["literals", "terminals", "axioms", "start", "restriction"].contains(&h) {
                section = h.to_string();
                body = rest.trim();
                if body.is_empty() {
                    continue;
                }
            }
        }
        match section.as_str() {
            "literals" => {
                for decl in body.split(';').map(str::trim).filter(|d| !d.is_empty()) {
                    let (name, v) = decl
                        .split_once(':')
                        .ok_or_else(|| err(format!("expected 'NAME : (u,d)', got {decl}")))?;
                    let v =
                        parse_valency(v).ok_or_else(|| err(format!("bad valency in {decl}")))?;
                    literals.insert(name.trim().to_string(), v);
                }
            }
            "terminals" => terminals.extend(body.split_whitespace().map(str::to_string)),
            "axioms" => axiom_lines.push((n, body.to_string())),
            "start" => start = Some(body.to_string()),
            "restriction" => {
                restriction = match body {
                    "on" => true,
                    "off" => false,
                    other => {
                        return Err(err(format!("restriction must be on or off, got {other}")))
                    }
                }
            }
            _ => return Err(err("content outside a section".into())),
        }
    }
    let strict = !literals.is_empty();
    let mut axioms = Vec::new();
    for (k, (n, line)) in axiom_lines.iter().enumerate() {
        let (label, body) = split_label(line);
        let j = judgement_at(&mut Cursor::new(body), &mut literals, strict)
            .map_err(|e| e.on_line(*n))?;
        let name = label
            .map(str::to_string)
            .unwrap_or_else(|| format!("a{}", k + 1));
        if axioms.iter().any(|(m, _): &(String, Judgement)| *m == name) {
            return Err(ParseError::Line {
                line: *n,
                msg: format!("duplicate axiom label {name}"),
            });
        }
        axioms.push((name, j));
    }
    let start = start.ok_or(ParseError::Line {
        line: 0,
        msg: "missing start symbol".into(),
    })?;
    match literals.get(&start) {
        Some(v) if *v == Valency::new(1, 1) => {}
        Some(v) => {
            return Err(ParseError::Line {
                line: 0,
                msg: format!("start symbol must have valency (1,1), has {v}"),
            })
        }
        None => {
            return Err(ParseError::Line {
                line: 0,
                msg: format!("start symbol {start} does not occur"),
            })
        }
    }
    let binders = axioms
        .iter()
        .any(|(_, j)| j.types.iter().any(|t| !t.symbol.is_binder_free()));
    let mode = if restriction {
        Mode::LambekRestricted
    } else if binders {
        Mode::Full
    } else {
        Mode::Ttc
    };
    Ok(Grammar::new(literals, terminals, axioms, start, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_round_trip() {
        let t = parse_term("[loves]_l^r * d_j^k * []_s^i").unwrap();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        assert_eq!(parse_term("1").unwrap(), TensorTerm::unit());
        assert_eq!(parse_term("[a b]").unwrap().loops().len(), 1);
    }

    #[test]
    fn multichar_indices() {
        let t = parse_term("[w]_{x1}^{y2}").unwrap();
        assert_eq!(t.edge_from(&Index::new("x1")).unwrap().1, &Index::new("y2"));
    }

    #[test]
    fn type_precedence() {
        let mut tab = LiteralTable::new();
        let t = parse_type("a^i_j * b^k_l | c^m_n", &mut tab).unwrap();
        assert!(matches!(t.symbol, Symbol::Par(..)));
        assert_eq!(parse_type(&t.to_string(), &mut tab).unwrap(), t);
    }

    #[test]
    fn binder_round_trip() {
        let mut tab = LiteralTable::new();
        let t = parse_type("nab^a_b(B^i_a | ~A^b_j)", &mut tab).unwrap();
        assert_eq!(t.upper, vec![Index::new("i")]);
        assert_eq!(t.lower, vec![Index::new("j")]);
        let back = parse_type(&t.to_string(), &mut tab).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn valency_conflict() {
        let mut tab = LiteralTable::new();
        assert!(parse_judgement("d_i^j |- p^i_j, ~p^{k l}_m", &mut tab).is_err());
    }

    #[test]
    fn script_lines() {
        let s = parse_script("id NP (1,1) (i) (j) (i2) (j2)\npar 0 # comment\ntensor 1\n").unwrap();
        assert_eq!(
            s[1],
            Rule::Par {
                first: 0,
                second: 1
            }
        );
        assert_eq!(s[2], Rule::Tensor { left: 1, right: 0 });
        for r in &s {
            assert_eq!(parse_script(&r.to_string()).unwrap()[0], *r);
        }
    }
}
