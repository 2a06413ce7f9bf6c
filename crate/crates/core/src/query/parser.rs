use std::collections::BTreeMap;
use std::iter::Peekable;
use std::str::Chars;

use super::{PatternTerm, Query, TriplePattern};
use crate::error::{Error, Result};
use crate::store::{is_local_char, is_prefix_char, Term};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Keyword(String),
    Var(String),
    Iri(String),
    /// `prefix:local`; the local part may be empty
    Name(String, String),
    Literal(String, Option<String>),
    LBrace,
    RBrace,
    Dot,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Keyword(k) => format!("keyword `{k}`"),
            Token::Var(v) => format!("variable `?{v}`"),
            Token::Iri(i) => format!("IRI `<{i}>`"),
            Token::Name(p, l) => format!("name `{p}:{l}`"),
            Token::Literal(v, _) => format!("literal \"{v}\""),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::Dot => "`.`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn error(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    pos: Pos,
    /// a `.` split off the end of a prefixed name
    pending_dot: Option<Pos>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
            pending_dot: None,
        }
    }

    fn next(&mut self) -> Result<(Token, Pos)> {
        match self.pending_dot.take() {
            Some(pos) => Ok((Token::Dot, pos)),
            None => self.next_token(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if !keep(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    self.take_while(|c| c != '\n');
                }
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<(Token, Pos)> {
        self.skip_trivia();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else {
            return Ok((Token::Eof, start));
        };
        let token = match c {
            '{' | '}' | '.' => {
                self.bump();
                match c {
                    '{' => Token::LBrace,
                    '}' => Token::RBrace,
                    _ => Token::Dot,
                }
            }
            '?' | '$' => {
                self.bump();
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(error(start, "variable without a name"));
                }
                Token::Var(name)
            }
            '<' => {
                self.bump();
                let iri = self.take_while(|c| c != '>' && !c.is_whitespace());
                if self.bump() != Some('>') {
                    return Err(error(start, "unterminated IRI"));
                }
                if iri.is_empty() {
                    return Err(error(start, "empty IRI"));
                }
                Token::Iri(iri)
            }
            '"' => {
                self.bump();
                let mut value = String::new();
                loop {
                    match self.bump() {
                        None => return Err(error(start, "unterminated literal")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => value.push('\n'),
                            Some('t') => value.push('\t'),
                            Some('r') => value.push('\r'),
                            Some(c @ ('"' | '\\')) => value.push(c),
                            _ => return Err(error(self.pos, "invalid escape in literal")),
                        },
                        Some(c) => value.push(c),
                    }
                }
                let lang = if self.chars.peek() == Some(&'@') {
                    self.bump();
                    let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                    if tag.is_empty() {
                        return Err(error(self.pos, "empty language tag"));
                    }
                    Some(tag)
                } else {
                    None
                };
                Token::Literal(value, lang)
            }
            c if is_prefix_char(c) || c == ':' => {
                let head = self.take_while(is_prefix_char);
                if self.chars.peek() == Some(&':') {
                    self.bump();
                    let mut local = self.take_while(is_local_char);
                    // a trailing dot ends the pattern, not the name
                    let mut dots = 0;
                    while local.ends_with('.') {
                        local.pop();
                        dots += 1;
                    }
                    let name = Token::Name(head, local);
                    if dots > 1 {
                        return Err(error(self.pos, "unexpected `.`"));
                    }
                    if dots == 1 {
                        self.pending_dot = Some(Pos {
                            line: self.pos.line,
                            column: self.pos.column - 1,
                        });
                    }
                    name
                } else if head.chars().all(|c| c.is_ascii_alphabetic()) {
                    Token::Keyword(head.to_ascii_uppercase())
                } else {
                    return Err(error(start, format!("unexpected `{head}`")));
                }
            }
            other => return Err(error(start, format!("unexpected character `{other}`"))),
        };
        Ok((token, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: (Token, Pos),
    prefixes: BTreeMap<String, String>,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(Token, Pos)> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<()> {
        match &self.current {
            (Token::Keyword(k), _) if k == keyword => {
                self.advance()?;
                Ok(())
            }
            (other, pos) => Err(error(*pos, format!("expected `{keyword}`, found {}", other.describe()))),
        }
    }

    fn term(&mut self) -> Result<PatternTerm> {
        let (token, pos) = self.advance()?;
        Ok(match token {
            Token::Var(name) => PatternTerm::Var(name),
            Token::Iri(iri) => PatternTerm::Term(Term::Iri(iri)),
            Token::Name(prefix, local) => {
                let base = self
                    .prefixes
                    .get(&prefix)
                    .ok_or_else(|| Error::UnknownPrefix(prefix.clone()))?;
                PatternTerm::Term(Term::Iri(format!("{base}{local}")))
            }
            Token::Literal(value, lang) => PatternTerm::Term(Term::Literal { value, lang }),
            other => return Err(error(pos, format!("expected a term, found {}", other.describe()))),
        })
    }

    fn query(&mut self) -> Result<Query> {
        while matches!(&self.current.0, Token::Keyword(k) if k == "PREFIX") {
            self.advance()?;
            let prefix = match self.advance()? {
                (Token::Name(prefix, local), _) if local.is_empty() => prefix,
                (other, pos) => return Err(error(pos, format!("expected `prefix:`, found {}", other.describe()))),
            };
            let base = match self.advance()? {
                (Token::Iri(base), _) => base,
                (other, pos) => return Err(error(pos, format!("expected `<iri>`, found {}", other.describe()))),
            };
            self.prefixes.insert(prefix, base);
        }

        self.expect_keyword("SELECT")?;
        let mut select: Vec<(String, Pos)> = Vec::new();
        while let (Token::Var(name), pos) = &self.current {
            if select.iter().any(|(v, _)| v == name) {
                return Err(error(*pos, format!("variable `?{name}` selected twice")));
            }
            select.push((name.clone(), *pos));
            self.advance()?;
        }
        if select.is_empty() {
            let (token, pos) = &self.current;
            return Err(error(*pos, format!("expected a variable, found {}", token.describe())));
        }

        self.expect_keyword("WHERE")?;
        match self.advance()? {
            (Token::LBrace, _) => {}
            (other, pos) => return Err(error(pos, format!("expected `{{`, found {}", other.describe()))),
        }
        let mut patterns = Vec::new();
        loop {
            let subject = self.term()?;
            let predicate = self.term()?;
            let object = self.term()?;
            patterns.push(TriplePattern::new(subject, predicate, object));
            match self.advance()? {
                (Token::Dot, _) if self.current.0 == Token::RBrace => {
                    self.advance()?;
                    break;
                }
                (Token::Dot, _) => {}
                (Token::RBrace, _) => break,
                (other, pos) => return Err(error(pos, format!("expected `.` or `}}`, found {}", other.describe()))),
            }
        }
        let (token, pos) = &self.current;
        if *token != Token::Eof {
            return Err(error(*pos, format!("unexpected {} after query", token.describe())));
        }

        let query = Query {
            prefixes: std::mem::take(&mut self.prefixes),
            select_vars: Vec::new(),
            patterns,
        };
        let used = query.pattern_vars();
        if let Some((name, pos)) = select.iter().find(|(v, _)| !used.contains(&v.as_str())) {
            return Err(error(*pos, format!("selected variable `?{name}` does not occur in WHERE")));
        }
        Ok(Query {
            select_vars: select.into_iter().map(|(v, _)| v).collect(),
            ..query
        })
    }
}

/// Parses query text. Keywords are case-insensitive; every prefix must be
/// declared with `PREFIX`; `#` starts a comment.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut lexer = Lexer::new(text);
    let current = lexer.next()?;
    let mut parser = Parser {
        lexer,
        current,
        prefixes: BTreeMap::new(),
    };
    parser.query()
}
