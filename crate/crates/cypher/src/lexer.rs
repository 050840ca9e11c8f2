//! Tokenizer for the query language.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    // keywords, matched case-insensitively
    Match,
    Where,
    Return,
    With,
    As,
    Unwind,
    Order,
    By,
    Desc,
    Asc,
    Limit,
    And,

    Ident(String),
    Str(String),
    Int(i64),

    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Dash,
    /// `->`
    ArrowRight,
    /// `<-`
    ArrowLeft,
    Eq,
    /// `=~`
    RegexMatch,
    Lt,
    Gt,
    Le,
    Ge,
    Star,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        let kw = match word.to_ascii_uppercase().as_str() {
            "MATCH" => TokenKind::Match,
            "WHERE" => TokenKind::Where,
            "RETURN" => TokenKind::Return,
            "WITH" => TokenKind::With,
            "AS" => TokenKind::As,
            "UNWIND" => TokenKind::Unwind,
            "ORDER" => TokenKind::Order,
            "BY" => TokenKind::By,
            "DESC" => TokenKind::Desc,
            "ASC" => TokenKind::Asc,
            "LIMIT" => TokenKind::Limit,
            "AND" => TokenKind::And,
            _ => return None,
        };
        Some(kw)
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Match => "MATCH",
            TokenKind::Where => "WHERE",
            TokenKind::Return => "RETURN",
            TokenKind::With => "WITH",
            TokenKind::As => "AS",
            TokenKind::Unwind => "UNWIND",
            TokenKind::Order => "ORDER",
            TokenKind::By => "BY",
            TokenKind::Desc => "DESC",
            TokenKind::Asc => "ASC",
            TokenKind::Limit => "LIMIT",
            TokenKind::And => "AND",
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Str(_) => "string literal",
            TokenKind::Int(i) => return write!(f, "integer {i}"),
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::Colon => "`:`",
            TokenKind::Comma => "`,`",
            TokenKind::Dot => "`.`",
            TokenKind::DotDot => "`..`",
            TokenKind::Dash => "`-`",
            TokenKind::ArrowRight => "`->`",
            TokenKind::ArrowLeft => "`<-`",
            TokenKind::Eq => "`=`",
            TokenKind::RegexMatch => "`=~`",
            TokenKind::Lt => "`<`",
            TokenKind::Gt => "`>`",
            TokenKind::Le => "`<=`",
            TokenKind::Ge => "`>=`",
            TokenKind::Star => "`*`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let two = |a: u8, b: u8| c == a && bytes.get(i + 1) == Some(&b);
        let (kind, len) = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            _ if two(b'/', b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'"' => {
                let (s, end) = lex_string(text, start)?;
                tokens.push(Token { kind: TokenKind::Str(s), offset: start });
                i = end;
                continue;
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let value = text[i..j]
                    .parse::<i64>()
                    .map_err(|_| LexError { offset: start, message: "integer literal out of range".into() })?;
                (TokenKind::Int(value), j - i)
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                let kind = TokenKind::keyword(word).unwrap_or_else(|| TokenKind::Ident(word.to_owned()));
                (kind, j - i)
            }
            _ if two(b'.', b'.') => (TokenKind::DotDot, 2),
            _ if two(b'-', b'>') => (TokenKind::ArrowRight, 2),
            _ if two(b'<', b'-') => (TokenKind::ArrowLeft, 2),
            _ if two(b'<', b'=') => (TokenKind::Le, 2),
            _ if two(b'>', b'=') => (TokenKind::Ge, 2),
            _ if two(b'=', b'~') => (TokenKind::RegexMatch, 2),
            b'(' => (TokenKind::LParen, 1),
            b')' => (TokenKind::RParen, 1),
            b'[' => (TokenKind::LBracket, 1),
            b']' => (TokenKind::RBracket, 1),
            b'{' => (TokenKind::LBrace, 1),
            b'}' => (TokenKind::RBrace, 1),
            b':' => (TokenKind::Colon, 1),
            b',' => (TokenKind::Comma, 1),
            b'.' => (TokenKind::Dot, 1),
            b'-' => (TokenKind::Dash, 1),
            b'=' => (TokenKind::Eq, 1),
            b'<' => (TokenKind::Lt, 1),
            b'>' => (TokenKind::Gt, 1),
            b'*' => (TokenKind::Star, 1),
            _ => {
                let ch = text[i..].chars().next().expect("in bounds");
                return Err(LexError { offset: start, message: format!("illegal character {ch:?}") });
            }
        };
        tokens.push(Token { kind, offset: start });
        i += len;
    }
    Ok(tokens)
}

/// Lexes a double-quoted literal starting at `start`; returns the unescaped
/// contents and the offset just past the closing quote.
fn lex_string(text: &str, start: usize) -> Result<(String, usize), LexError> {
    let mut out = String::new();
    let mut chars = text[start + 1..].char_indices();
    while let Some((k, c)) = chars.next() {
        match c {
            '"' => return Ok((out, start + 1 + k + 1)),
            '\\' => {
                let Some((_, esc)) = chars.next() else { break };
                out.push(match esc {
                    '"' => '"',
                    '\\' => '\\',
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    other => {
                        return Err(LexError {
                            offset: start + 1 + k,
                            message: format!("unknown escape sequence \\{other}"),
                        })
                    }
                });
            }
            c => out.push(c),
        }
    }
    Err(LexError { offset: start, message: "unterminated string literal".into() })
}
