//! Infix rendering and the matching parser.
//!
//! Grammar of the rendered form:
//!
//! ```text
//! expr := "(" expr op expr ")"      op ∈ { + - * / ^ }
//!       | "(" expr ")^2"
//!       | ("sqrt" | "exp" | "log") "(" expr ")"
//!       | "x" digits | number
//! ```

use super::program::{ConstRef, Node};
use super::{ExprTree, Token};
use crate::Error;

pub(crate) fn render(tree: &ExprTree) -> String {
    fn go(tokens: &[Token], consts: &[f64], cur: &mut usize, ci: &mut usize, out: &mut String) {
        let t = tokens[*cur];
        *cur += 1;
        match t {
            Token::Const => {
                out.push_str(&consts[*ci].to_string());
                *ci += 1;
            }
            Token::Var(i) => {
                out.push('x');
                out.push_str(&i.to_string());
            }
            Token::Square => {
                out.push('(');
                go(tokens, consts, cur, ci, out);
                out.push_str(")^2");
            }
            Token::Sqrt | Token::Exp | Token::Log => {
                out.push_str(&t.name());
                out.push('(');
                go(tokens, consts, cur, ci, out);
                out.push(')');
            }
            _ => {
                let sym = match t {
                    Token::Add => " + ",
                    Token::Sub => " - ",
                    Token::Mul => " * ",
                    Token::Div => " / ",
                    Token::Pow => " ^ ",
                    _ => unreachable!(),
                };
                out.push('(');
                go(tokens, consts, cur, ci, out);
                out.push_str(sym);
                go(tokens, consts, cur, ci, out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(tree.tokens(), tree.constants(), &mut 0, &mut 0, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Lex {
    Open,
    Close,
    Op(char),
    Ident(String),
    Num(f64),
    SquareSuffix,
}

fn lex(s: &str) -> Result<Vec<Lex>, Error> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '(' => {
                out.push(Lex::Open);
                i += 1;
            }
            ')' => {
                if chars.get(i + 1) == Some(&'^') && chars.get(i + 2) == Some(&'2') {
                    out.push(Lex::Close);
                    out.push(Lex::SquareSuffix);
                    i += 3;
                } else {
                    out.push(Lex::Close);
                    i += 1;
                }
            }
            '+' | '*' | '/' | '^' | '-' => {
                out.push(Lex::Op(c));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Lex::Ident(chars[start..i].iter().collect()));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '-' || chars[i] == '+')
                            && matches!(chars[i - 1], 'e' | 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
                out.push(Lex::Num(v));
            }
            _ => return Err(Error::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lex>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Lex> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Lex, Error> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Lex) -> Result<(), Error> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {want:?}, found {got:?}")))
        }
    }

    fn expr(&mut self, consts: &mut Vec<f64>) -> Result<Node, Error> {
        match self.next()? {
            Lex::Num(v) => Ok(self.constant(v, consts)),
            Lex::Op('-') => match self.next()? {
                Lex::Num(v) => Ok(self.constant(-v, consts)),
                other => Err(Error::Parse(format!("expected number after `-`, found {other:?}"))),
            },
            Lex::Ident(name) => {
                if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<u8>().ok()) {
                    return Ok(Node::Var(idx));
                }
                let t = match name.as_str() {
                    "sqrt" => Token::Sqrt,
                    "exp" => Token::Exp,
                    "log" => Token::Log,
                    _ => return Err(Error::Parse(format!("unknown function `{name}`"))),
                };
                self.expect(Lex::Open)?;
                let a = self.expr(consts)?;
                self.expect(Lex::Close)?;
                Ok(Node::Unary(t, Box::new(a)))
            }
            Lex::Open => {
                let a = self.expr(consts)?;
                match self.next()? {
                    Lex::Close => {
                        if self.peek() == Some(&Lex::SquareSuffix) {
                            self.pos += 1;
                            Ok(Node::Unary(Token::Square, Box::new(a)))
                        } else {
                            Ok(a)
                        }
                    }
                    Lex::Op(op) => {
                        let t = match op {
                            '+' => Token::Add,
                            '-' => Token::Sub,
                            '*' => Token::Mul,
                            '/' => Token::Div,
                            '^' => Token::Pow,
                            _ => unreachable!(),
                        };
                        let b = self.expr(consts)?;
                        self.expect(Lex::Close)?;
                        Ok(Node::Binary(t, Box::new(a), Box::new(b)))
                    }
                    other => Err(Error::Parse(format!("unexpected {other:?}"))),
                }
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }

    fn constant(&mut self, v: f64, consts: &mut Vec<f64>) -> Node {
        consts.push(v);
        Node::Const(ConstRef::Param(consts.len() - 1))
    }
}

/// Parse the output of [`ExprTree::to_infix`] back into a tree.
pub fn parse_infix(s: &str) -> Result<ExprTree, Error> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
    };
    let mut consts = Vec::new();
    let node = p.expr(&mut consts)?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse("trailing input".into()));
    }
    Ok(node.to_tree(&consts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_tokens;

    fn tree(s: &str, c: &[f64]) -> ExprTree {
        ExprTree::new(parse_tokens(s).unwrap(), c.to_vec()).unwrap()
    }

    #[test]
    fn render_examples() {
        assert_eq!(
            tree("add x0 mul const log x1", &[0.5]).to_infix(),
            "(x0 + (0.5 * log(x1)))"
        );
        assert_eq!(tree("n2 x0", &[]).to_infix(), "(x0)^2");
        assert_eq!(tree("div const x0", &[1.0]).to_infix(), "(1 / x0)");
        assert_eq!(tree("pow x0 const", &[-0.25]).to_infix(), "(x0 ^ -0.25)");
    }

    #[test]
    fn parse_round_trip_is_structural() {
        for (s, c) in [
            ("add x0 mul const log x1", vec![0.5]),
            ("sub const n2 sqrt x1", vec![-2.4011865971618606e-3]),
            ("div exp x0 pow x1 const", vec![1e-30]),
            ("n2 n2 log x1", vec![]),
        ] {
            let t = tree(s, &c);
            assert_eq!(parse_infix(&t.to_infix()).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_infix("(x0 + )").is_err());
        assert!(parse_infix("sin(x0)").is_err());
        assert!(parse_infix("(x0 + x1) x1").is_err());
    }
}
