use super::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers and keywords. Inner `-` is allowed when followed by a
    /// letter, so `add-input` is one word while `p->q` is three tokens.
    Word(String),
    Num(usize),
    Str(String),
    /// `<a,b>`: symbol names of an interval.
    Interval(Vec<String>),
    Sym(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: [&str; 13] = ["->", ":=", "(", ")", "[", "]", "{", "}", ",", ";", "=", "|", "@"];

/// Splits one source line (without its comment) into tokens.
pub fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, Diagnostic> {
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
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() {
                let d = chars[i];
                let dash = d == '-' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic());
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' || dash {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line, col });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| Diagnostic::new(line, col, format!("number `{s}` is too large")))?;
            out.push(Token { tok: Tok::Num(n), line, col });
            continue;
        }
        if c == '"' {
            let end = chars[i + 1..]
                .iter()
                .position(|&d| d == '"')
                .ok_or_else(|| Diagnostic::new(line, col, "unterminated string"))?;
            out.push(Token { tok: Tok::Str(chars[i + 1..i + 1 + end].iter().collect()), line, col });
            i += end + 2;
            continue;
        }
        if c == '<' {
            let end = chars[i + 1..]
                .iter()
                .position(|&d| d == '>')
                .ok_or_else(|| Diagnostic::new(line, col, "unterminated interval"))?;
            let body: String = chars[i + 1..i + 1 + end].iter().collect();
            let items: Vec<String> = if body.trim().is_empty() {
                Vec::new()
            } else {
                body.split(',').map(|s| s.trim().to_string()).collect()
            };
            if items.iter().any(|s| s.is_empty()) {
                return Err(Diagnostic::new(line, col, "empty message in interval"));
            }
            out.push(Token { tok: Tok::Interval(items), line, col });
            i += end + 2;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), line, col });
                i += s.len();
            }
            None => return Err(Diagnostic::new(line, col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Cursor over the tokens of one logical line.
pub struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(tokens: &'a [Token], line: usize, end_col: usize) -> Self {
        Cursor { tokens, pos: 0, line, end_col }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn here(&self) -> (usize, usize) {
        match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.line, self.end_col),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Diagnostic {
        let (line, col) = self.here();
        Diagnostic::new(line, col, message)
    }

    pub fn next(&mut self) -> Option<&'a Tok> {
        let t = self.tokens.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), Diagnostic> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    pub fn expect_keyword(&mut self, w: &str) -> Result<(), Diagnostic> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{w}`")))
        }
    }

    pub fn word(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                self.pos += 1;
                Ok(w.clone())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn num(&mut self, what: &str) -> Result<usize, Diagnostic> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn string(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    pub fn end(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn words_arrows_and_primes() {
        assert_eq!(
            toks("with add-input Sales ordpay' # note"),
            vec![
                Tok::Word("with".into()),
                Tok::Word("add-input".into()),
                Tok::Word("Sales".into()),
                Tok::Word("ordpay'".into()),
            ]
        );
        assert_eq!(
            toks("p->q"),
            vec![Tok::Word("p".into()), Tok::Sym("->"), Tok::Word("q".into())]
        );
    }

    #[test]
    fn intervals_and_strings() {
        assert_eq!(
            toks("q=<a, b> <> \"x.arch\""),
            vec![
                Tok::Word("q".into()),
                Tok::Sym("="),
                Tok::Interval(vec!["a".into(), "b".into()]),
                Tok::Interval(vec![]),
                Tok::Str("x.arch".into()),
            ]
        );
    }

    #[test]
    fn errors_carry_columns() {
        let e = tokenize("a $ b", 7).unwrap_err();
        assert_eq!((e.line, e.column), (7, 3));
        assert!(tokenize("<a", 1).is_err());
    }
}
