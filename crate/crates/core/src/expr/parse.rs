//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := '-' factor | power ;
//! power  := atom ('^' integer)? ;
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')' ;
//! ```
//!
//! An identifier followed by `(` is a function name, otherwise a variable.
//! Whitespace is insignificant. Unary minus binds looser than `^`, so
//! `-x^2` parses as `-(x^2)`.

use super::{Elementary, Expr, ExprError};

/// Parse `text` against the grammar above. Every variable must occur in
/// `variables`; errors carry the byte offset of the offending token.
pub fn parse_expression(text: &str, variables: &[String]) -> Result<Expr, ExprError> {
    let mut parser = Parser {
        input: text.as_bytes(),
        pos: 0,
        variables,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.input.len() {
        return Err(parser.syntax_error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    fn syntax_error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut node = self.term()?;
        loop {
            if self.eat(b'+') {
                node = Expr::Add(Box::new(node), Box::new(self.term()?));
            } else if self.eat(b'-') {
                node = Expr::Sub(Box::new(node), Box::new(self.term()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut node = self.factor()?;
        loop {
            if self.eat(b'*') {
                node = Expr::Mul(Box::new(node), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                node = Expr::Div(Box::new(node), Box::new(self.factor()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            Ok(Expr::Negate(Box::new(self.factor()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.integer()?;
            Ok(Expr::IntPow(Box::new(base), exponent))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        if self.input.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self
            .input
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.syntax_error("expected an integer exponent"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.syntax_error("integer exponent out of range"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax_error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.ident(),
            Some(_) => Err(self.syntax_error("expected a number, variable, or `(`")),
            None => Err(self.syntax_error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .input
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.input.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self
                .input
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
        }
        // Exponent part: only when followed by digits (so `2e` is a syntax
        // error rather than `2 * e`).
        if matches!(self.input.get(self.pos), Some(&b'e') | Some(&b'E')) {
            let mut probe = self.pos + 1;
            if matches!(self.input.get(probe), Some(&b'+') | Some(&b'-')) {
                probe += 1;
            }
            if self.input.get(probe).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = probe;
                while self
                    .input
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_digit())
                {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
            offset: start,
            message: format!("invalid number literal `{text}`"),
        })?;
        Ok(Expr::Constant(value))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .input
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .to_string();
        if self.peek() == Some(b'(') {
            let func = Elementary::from_name(&name).ok_or(ExprError::UnknownFunction {
                name: name.clone(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax_error("expected `)` after function argument"));
            }
            Ok(Expr::Func(func, Box::new(arg)))
        } else if self.variables.iter().any(|v| v == &name) {
            Ok(Expr::Variable(name))
        } else {
            Err(ExprError::UndeclaredVariable {
                name,
                offset: start,
            })
        }
    }
}
