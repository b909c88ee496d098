//! Infix expression parser for scenario files: `+ - * ^`, integer
//! exponents, rational literals `p/q`, and the calls `sin( ) cos( ) exp( )`.

use lbcalc::expr::Expr;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.integer()?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let mut negative = false;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let v = self.integer()?;
            self.expect(b')')?;
            return Ok(v);
        }
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negative = true;
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i64 = digits
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(if negative { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident_or_call(),
            _ => Err(self.error("expected a number, variable, call or `(`")),
        }
    }

    fn digits(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let num = self.digits()?;
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let den = self.digits()?;
            if den == 0 {
                return Err(self.error("zero denominator"));
            }
            return Ok(Expr::rat(num, den));
        }
        Ok(Expr::int(num))
    }

    fn ident_or_call(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if self.peek() == Some(b'(') {
            let kind = match name {
                "sin" => |e: &Expr| e.sin(),
                "cos" => |e: &Expr| e.cos(),
                "exp" => |e: &Expr| e.exp(),
                _ => {
                    self.pos = start;
                    return Err(self.error(&format!("unknown function `{name}`")));
                }
            };
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(kind(&arg));
        }
        Ok(Expr::var(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_polynomials() {
        let e = parse_expr("x^2*y - 3/2*z + 1").unwrap();
        let direct = &(&(&Expr::var("x").pow(2) * &Expr::var("y"))
            - &(&Expr::rat(3, 2) * &Expr::var("z")))
            + &Expr::one();
        assert_eq!(e.normalize().unwrap(), direct.normalize().unwrap());
    }

    #[test]
    fn parses_laurent_and_calls() {
        let e = parse_expr("r^-1 * sin(x*y) + exp(0)").unwrap();
        let direct = &(&Expr::var("r").pow(-1) * &(&Expr::var("x") * &Expr::var("y")).sin())
            + &Expr::one();
        assert_eq!(e.normalize().unwrap(), direct.normalize().unwrap());
        let e = parse_expr("x^(-2)").unwrap();
        assert_eq!(
            e.normalize().unwrap(),
            Expr::var("x").pow(-2).normalize().unwrap()
        );
    }

    #[test]
    fn reports_position() {
        let err = parse_expr("x +").unwrap_err();
        assert_eq!(err.position, 3);
        assert!(parse_expr("foo(x)").is_err());
        assert!(parse_expr("x + * y").is_err());
    }
}
