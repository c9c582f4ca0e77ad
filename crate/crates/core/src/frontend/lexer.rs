use super::manifest::ManifestError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Slash,
    Eq,
    Gt,
    Plus,
    Star,
    Arrow,
}

impl Tok {
    pub fn show(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBrack => "[".into(),
            Tok::RBrack => "]".into(),
            Tok::Comma => ",".into(),
            Tok::Dot => ".".into(),
            Tok::Colon => ":".into(),
            Tok::Slash => "/".into(),
            Tok::Eq => "=".into(),
            Tok::Gt => ">".into(),
            Tok::Plus => "+".into(),
            Tok::Star => "*".into(),
            Tok::Arrow => "->".into(),
        }
    }
}

/// Token with 1-based line and column.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes one line; `#` starts a comment.
pub fn lex_line(text: &str, line: usize) -> Result<Vec<Spanned>, ManifestError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            // `-` joins identifiers such as `type-order` but never starts `->`
            while i < chars.len()
                && (is_ident_char(chars[i]) || (chars[i] == '-' && chars.get(i + 1).is_some_and(|c| is_ident_char(*c))))
            {
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line, col });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '/' => Tok::Slash,
            '=' => Tok::Eq,
            '>' => Tok::Gt,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '→' => Tok::Arrow,
            _ => return Err(ManifestError::ParseError { line, col, msg: format!("unexpected character '{c}'") }),
        };
        i += 1;
        out.push(Spanned { tok, line, col });
    }
    Ok(out)
}
