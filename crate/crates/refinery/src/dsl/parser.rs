//! Syntax pass: tokens to an unresolved declaration list.

use super::lexer::{Tok, Token};
use super::{Diagnostic, Pos};

#[derive(Debug, Clone)]
pub(crate) struct Sp {
    pub text: String,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub(crate) struct VarDecl {
    pub name: Sp,
    pub ty: Sp,
}

#[derive(Debug, Clone)]
pub(crate) struct Assign {
    pub name: Sp,
    pub primed: bool,
    pub value: Sp,
}

#[derive(Debug, Clone)]
pub(crate) struct RelRow {
    pub pos: Pos,
    pub pre: Vec<Assign>,
    pub post: Vec<Assign>,
}

#[derive(Debug, Clone)]
pub(crate) struct DistDecl {
    pub pos: Pos,
    pub outcomes: Vec<(Sp, Vec<Assign>)>,
}

#[derive(Debug, Clone)]
pub(crate) struct ProbRow {
    pub pos: Pos,
    pub pre: Vec<Assign>,
    pub dists: Vec<DistDecl>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Slots {
    pub state: Vec<VarDecl>,
    pub inputs: Vec<VarDecl>,
    pub outputs: Vec<VarDecl>,
}

#[derive(Debug, Clone)]
pub(crate) enum Decl {
    Type { name: Sp, values: Vec<Sp> },
    Subtype { name: Sp, parent: Sp, values: Vec<Sp> },
    Fun { name: Sp, domain: Sp, codomain: Sp, entries: Vec<(Sp, Sp)> },
    Op { name: Sp, slots: Slots, rows: Vec<RelRow> },
    Transformer { name: Sp, slots: Slots, rows: Vec<RelRow> },
    Prob { name: Sp, slots: Slots, rows: Vec<ProbRow> },
    Noise { name: Sp, signal: Option<Sp>, noise: Option<Sp>, rows: Vec<(Sp, Sp, Sp)> },
    Datatype { name: Sp, state: Option<Sp>, init: Option<Vec<Sp>>, op: Option<Sp> },
    Retrieve { name: Sp, abs: Sp, conc: Sp, pairs: Vec<(Sp, Sp)> },
}

type PResult<T> = Result<T, Diagnostic>;

pub(crate) struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Parser {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, at: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.at + 1).min(self.tokens.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        let t = self.peek();
        Err(Diagnostic::error(t.pos, format!("expected {wanted}, found {}", t.tok.describe())))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == kw)
    }

    fn word(&mut self, wanted: &str) -> PResult<Sp> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let sp = Sp { text: w.clone(), pos: self.peek().pos };
                self.next();
                Ok(sp)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<Sp> {
        let sp = self.word(wanted)?;
        if !is_identifier(&sp.text) {
            return Err(Diagnostic::error(sp.pos, format!("invalid {wanted} `{}`", sp.text)));
        }
        Ok(sp)
    }

    pub(crate) fn parse(mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        loop {
            let t = self.peek().clone();
            let kw = match &t.tok {
                Tok::Eof => return Ok(decls),
                Tok::Word(w) => w.clone(),
                _ => return self.unexpected("a declaration"),
            };
            self.next();
            let decl = match kw.as_str() {
                "type" => self.type_decl()?,
                "subtype" => self.subtype_decl()?,
                "fun" => self.fun_decl()?,
                "op" => self.op_decl()?,
                "transformer" => self.transformer_decl()?,
                "prob" => self.prob_decl()?,
                "noise" => self.noise_decl()?,
                "datatype" => self.datatype_decl()?,
                "retrieve" => self.retrieve_decl()?,
                other => {
                    return Err(Diagnostic::error(t.pos, format!("expected a declaration, found `{other}`")));
                }
            };
            decls.push(decl);
        }
    }

    fn value_list(&mut self) -> PResult<Vec<Sp>> {
        self.expect(Tok::LBrace)?;
        let mut values = Vec::new();
        while !self.eat(&Tok::RBrace) {
            values.push(self.ident("value")?);
        }
        Ok(values)
    }

    fn type_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("type name")?;
        let values = self.value_list()?;
        Ok(Decl::Type { name, values })
    }

    fn subtype_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("type name")?;
        if !self.at_keyword("of") {
            return self.unexpected("`of`");
        }
        self.next();
        let parent = self.ident("type name")?;
        let values = self.value_list()?;
        Ok(Decl::Subtype { name, parent, values })
    }

    fn fun_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("function name")?;
        self.expect(Tok::Colon)?;
        let domain = self.ident("type name")?;
        self.expect(Tok::Arrow)?;
        let codomain = self.ident("type name")?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        loop {
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
            let arg = self.ident("value")?;
            self.expect(Tok::Arrow)?;
            let image = self.ident("value")?;
            entries.push((arg, image));
            self.row_end()?;
        }
        Ok(Decl::Fun { name, domain, codomain, entries })
    }

    /// Rows may be separated by `;` or just by line breaks: a row always
    /// ends where its last assignment or value does.
    fn row_end(&mut self) -> PResult<()> {
        self.eat(&Tok::Semi);
        Ok(())
    }

    fn var_decls(&mut self, into: &mut Vec<VarDecl>) -> PResult<()> {
        while matches!(self.peek().tok, Tok::Word(_)) && *self.peek2() == Tok::Colon {
            let name = self.ident("slot name")?;
            self.expect(Tok::Colon)?;
            let ty = self.ident("type name")?;
            into.push(VarDecl { name, ty });
        }
        Ok(())
    }

    /// Parses `state`/`in`/`out` sections and the one named block, in any
    /// order, up to the closing brace.
    fn body<T>(
        &mut self,
        allow_state: bool,
        block: &str,
        mut parse_block: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<(Slots, T)> {
        self.expect(Tok::LBrace)?;
        let mut slots = Slots::default();
        let mut rows = None;
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Word(w) if w == "state" && allow_state => {
                    self.next();
                    self.var_decls(&mut slots.state)?;
                }
                Tok::Word(w) if w == "in" => {
                    self.next();
                    self.var_decls(&mut slots.inputs)?;
                }
                Tok::Word(w) if w == "out" => {
                    self.next();
                    self.var_decls(&mut slots.outputs)?;
                }
                Tok::Word(w) if w == block => {
                    self.next();
                    if rows.is_some() {
                        return Err(Diagnostic::error(t.pos, format!("second `{block}` block")));
                    }
                    rows = Some(parse_block(self)?);
                }
                _ => {
                    let sections = if allow_state { "`state`, `in`, `out`" } else { "`in`, `out`" };
                    return self.unexpected(&format!("{sections}, `{block}` or `}}`"));
                }
            }
        }
        match rows {
            Some(rows) => Ok((slots, rows)),
            None => {
                Err(Diagnostic::error(self.tokens[self.at.saturating_sub(1)].pos, format!("missing `{block}` block")))
            }
        }
    }

    fn assigns(&mut self) -> PResult<Vec<Assign>> {
        let mut out = Vec::new();
        if !matches!(self.peek().tok, Tok::Word(_)) {
            return Ok(out);
        }
        loop {
            let name = self.ident("slot name")?;
            let primed = self.eat(&Tok::Prime);
            self.expect(Tok::Eq)?;
            let value = self.ident("value")?;
            out.push(Assign { name, primed, value });
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn rel_rows(&mut self) -> PResult<Vec<RelRow>> {
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        loop {
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.eat(&Tok::RBrace) {
                return Ok(rows);
            }
            let pos = self.peek().pos;
            let pre = self.assigns()?;
            self.expect(Tok::Arrow)?;
            let post = self.assigns()?;
            rows.push(RelRow { pos, pre, post });
            self.row_end()?;
        }
    }

    fn op_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("operation name")?;
        let (slots, rows) = self.body(true, "trans", Self::rel_rows)?;
        Ok(Decl::Op { name, slots, rows })
    }

    fn transformer_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("transformer name")?;
        let (slots, rows) = self.body(false, "rel", Self::rel_rows)?;
        Ok(Decl::Transformer { name, slots, rows })
    }

    fn dist_rows(&mut self) -> PResult<Vec<ProbRow>> {
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        loop {
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.eat(&Tok::RBrace) {
                return Ok(rows);
            }
            let pos = self.peek().pos;
            let pre = self.assigns()?;
            self.expect(Tok::Arrow)?;
            let mut dists = Vec::new();
            while self.peek().tok == Tok::LBracket {
                let dpos = self.next().pos;
                let mut outcomes = Vec::new();
                loop {
                    let weight = self.word("probability")?;
                    self.expect(Tok::Colon)?;
                    outcomes.push((weight, self.assigns()?));
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                dists.push(DistDecl { pos: dpos, outcomes });
            }
            if dists.is_empty() {
                return self.unexpected("`[`");
            }
            rows.push(ProbRow { pos, pre, dists });
            self.row_end()?;
        }
    }

    fn prob_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("operation name")?;
        let (slots, rows) = self.body(true, "dist", Self::dist_rows)?;
        Ok(Decl::Prob { name, slots, rows })
    }

    fn noise_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("noise model name")?;
        self.expect(Tok::LBrace)?;
        let (mut signal, mut noise, mut rows) = (None, None, None);
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Word(w) if w == "signal" && signal.is_none() => {
                    self.next();
                    signal = Some(self.ident("type name")?);
                }
                Tok::Word(w) if w == "noisetype" && noise.is_none() => {
                    self.next();
                    noise = Some(self.ident("type name")?);
                }
                Tok::Word(w) if w == "out" && rows.is_none() => {
                    self.next();
                    self.expect(Tok::LBrace)?;
                    let mut table = Vec::new();
                    loop {
                        if self.eat(&Tok::Semi) {
                            continue;
                        }
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        let s = self.ident("value")?;
                        self.expect(Tok::Comma)?;
                        let n = self.ident("value")?;
                        self.expect(Tok::Arrow)?;
                        let o = self.ident("value")?;
                        table.push((s, n, o));
                        self.row_end()?;
                    }
                    rows = Some(table);
                }
                _ => return self.unexpected("`signal`, `noisetype`, `out` or `}`"),
            }
        }
        Ok(Decl::Noise { name, signal, noise, rows: rows.unwrap_or_default() })
    }

    fn datatype_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("data type name")?;
        self.expect(Tok::LBrace)?;
        let (mut state, mut init, mut op) = (None, None, None);
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Word(w) if w == "state" && state.is_none() => {
                    self.next();
                    state = Some(self.ident("type name")?);
                }
                Tok::Word(w) if w == "init" && init.is_none() => {
                    self.next();
                    init = Some(self.value_list()?);
                }
                Tok::Word(w) if w == "op" && op.is_none() => {
                    self.next();
                    op = Some(self.ident("operation name")?);
                }
                _ => return self.unexpected("`state`, `init`, `op` or `}`"),
            }
        }
        Ok(Decl::Datatype { name, state, init, op })
    }

    fn retrieve_decl(&mut self) -> PResult<Decl> {
        let name = self.ident("retrieve relation name")?;
        self.expect(Tok::LBrace)?;
        let abs = self.ident("type name")?;
        self.expect(Tok::BiArrow)?;
        let conc = self.ident("type name")?;
        if !self.at_keyword("pairs") {
            return self.unexpected("`pairs`");
        }
        self.next();
        self.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        loop {
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
            let a = self.ident("value")?;
            self.expect(Tok::Comma)?;
            let c = self.ident("value")?;
            pairs.push((a, c));
            self.row_end()?;
        }
        self.expect(Tok::RBrace)?;
        Ok(Decl::Retrieve { name, abs, conc, pairs })
    }
}
