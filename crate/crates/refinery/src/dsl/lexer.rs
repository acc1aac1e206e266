use super::{Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Bar,
    Prime,
    Arrow,
    BiArrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Prime => "`'`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::BiArrow => "`<->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '/'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
    last: Pos,
}

impl Cursor<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.col }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.last = self.pos();
        match c {
            '\n' => {
                self.line += 1;
                self.col = 1;
            }
            '\r' => {
                if self.peek() == Some('\n') {
                    self.chars.next();
                }
                self.line += 1;
                self.col = 1;
            }
            _ => self.col += 1,
        }
        Some(c)
    }
}

/// Splits source text into tokens. `#` starts a comment running to the end
/// of the line; any line ending is accepted.
pub(crate) fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor { chars: src.chars().peekable(), line: 1, col: 1, last: Pos { line: 1, column: 1 } };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' || c == '\r' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if is_word_char(c) {
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(|&c| is_word_char(c)) {
                word.push(c);
                cur.bump();
            }
            tokens.push(Token { tok: Tok::Word(word), pos });
            continue;
        }
        cur.bump();
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '=' => Tok::Eq,
            '|' => Tok::Bar,
            '\'' => Tok::Prime,
            '-' if cur.peek() == Some('>') => {
                cur.bump();
                Tok::Arrow
            }
            '<' if cur.peek() == Some('-') => {
                cur.bump();
                if cur.peek() != Some('>') {
                    return Err(Diagnostic::error(pos, "expected `<->`"));
                }
                cur.bump();
                Tok::BiArrow
            }
            other => return Err(Diagnostic::error(pos, format!("unexpected character {other:?}"))),
        };
        tokens.push(Token { tok, pos });
    }
    tokens.push(Token { tok: Tok::Eof, pos: cur.last });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn words_and_symbols() {
        assert_eq!(
            toks("b'=d0 -> [0.93: a=yes]"),
            vec![
                Tok::Word("b".into()),
                Tok::Prime,
                Tok::Eq,
                Tok::Word("d0".into()),
                Tok::Arrow,
                Tok::LBracket,
                Tok::Word("0.93".into()),
                Tok::Colon,
                Tok::Word("a".into()),
                Tok::Eq,
                Tok::Word("yes".into()),
                Tok::RBracket,
                Tok::Eof,
            ]
        );
        assert_eq!(
            toks("A <-> C # comment ✓\n"),
            vec![Tok::Word("A".into()), Tok::BiArrow, Tok::Word("C".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions_follow_any_line_ending() {
        let t = lex("a\r\nb\rc\nd").unwrap();
        let pos: Vec<(u32, u32)> = t.iter().map(|t| (t.pos.line, t.pos.column)).collect();
        assert_eq!(pos, vec![(1, 1), (2, 1), (3, 1), (4, 1), (4, 1)]);
    }

    #[test]
    fn stray_characters_are_reported() {
        let d = lex("type A { x }\n  $").unwrap_err();
        assert_eq!((d.line, d.column), (2, 3));
        assert!(lex("a <- b").is_err());
        assert!(lex("a - b").is_err());
    }
}
