//! Symbolic expressions over a small token library.
//!
//! An expression is stored as a prefix traversal of [`Token`]s together with
//! one numeric value per `const` token (in traversal order). Evaluation is
//! strict: a domain violation anywhere yields an [`InvalidCause`] instead of a
//! silently patched value.

mod diff;
mod infix;
pub(crate) mod ops;
mod program;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

pub use diff::differentiate;
pub(crate) use diff::derivative_program as diff_program;
pub use infix::parse_infix;
pub use ops::{DIV_FLOOR, EXP_ARG_MAX};
pub use program::{ConstRef, Program};

/// A node label of an expression traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Add,
    Sub,
    Mul,
    Div,
    /// Square, `n2` in the token vocabulary.
    Square,
    Sqrt,
    Exp,
    Log,
    Pow,
    Const,
    /// Input variable, addressed by its 0-based slot.
    Var(u8),
}

impl Token {
    pub fn arity(self) -> usize {
        match self {
            Token::Add | Token::Sub | Token::Mul | Token::Div | Token::Pow => 2,
            Token::Square | Token::Sqrt | Token::Exp | Token::Log => 1,
            Token::Const | Token::Var(_) => 0,
        }
    }

    pub fn is_terminal(self) -> bool {
        self.arity() == 0
    }

    pub fn name(self) -> String {
        match self {
            Token::Add => "add".into(),
            Token::Sub => "sub".into(),
            Token::Mul => "mul".into(),
            Token::Div => "div".into(),
            Token::Square => "n2".into(),
            Token::Sqrt => "sqrt".into(),
            Token::Exp => "exp".into(),
            Token::Log => "log".into(),
            Token::Pow => "pow".into(),
            Token::Const => "const".into(),
            Token::Var(i) => format!("x{i}"),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "add" => Token::Add,
            "sub" => Token::Sub,
            "mul" => Token::Mul,
            "div" => Token::Div,
            "n2" => Token::Square,
            "sqrt" => Token::Sqrt,
            "exp" => Token::Exp,
            "log" => Token::Log,
            "pow" => Token::Pow,
            "const" => Token::Const,
            _ => {
                let idx = s
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<u8>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown token `{s}`")))?;
                Token::Var(idx)
            }
        })
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Why an evaluation produced no value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "snake_case")]
pub enum InvalidCause {
    #[error("logarithm of a non-positive value")]
    LogNonpositive,
    #[error("square root of a negative value")]
    SqrtNegative,
    #[error("division by (near) zero")]
    DivByZero,
    #[error("overflow")]
    Overflow,
    #[error("not a number")]
    Nan,
}

/// Result of evaluating an expression at one point. Valid values are finite.
pub type EvalOutcome = Result<f64, InvalidCause>;

/// The ordered token set a search run samples from, plus its size bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Library {
    tokens: Vec<Token>,
    pub max_constants: usize,
    pub min_length: usize,
    pub max_length: usize,
}

impl Library {
    pub const DEFAULT_MAX_LENGTH: usize = 32;
    pub const DEFAULT_MIN_LENGTH: usize = 4;
    pub const DEFAULT_MAX_CONSTANTS: usize = 5;

    pub fn new(
        tokens: Vec<Token>,
        max_constants: usize,
        min_length: usize,
        max_length: usize,
    ) -> Result<Self, Error> {
        if !tokens.iter().any(|t| matches!(t, Token::Var(_))) {
            return Err(Error::InvalidLibrary("no input variable".into()));
        }
        if !tokens.iter().any(|t| t.arity() == 2) {
            return Err(Error::InvalidLibrary("no binary operator".into()));
        }
        for (i, t) in tokens.iter().enumerate() {
            if tokens[..i].contains(t) {
                return Err(Error::InvalidLibrary(format!("duplicate token {t}")));
            }
        }
        if min_length == 0 || max_length < min_length {
            return Err(Error::InvalidLibrary(format!(
                "bad length bounds [{min_length}, {max_length}]"
            )));
        }
        // With only binary operators a prefix one token short of min_length
        // could not be extended without overshooting max_length.
        let has_unary = tokens.iter().any(|t| t.arity() == 1);
        if min_length > 1 && max_length == min_length && !has_unary {
            return Err(Error::InvalidLibrary(
                "max_length must exceed min_length without unary tokens".into(),
            ));
        }
        Ok(Self {
            tokens,
            max_constants,
            min_length,
            max_length,
        })
    }

    /// Operators of the invariant search: inputs `x0 = I_C`, `x1 = II_C`.
    pub fn invariant() -> Self {
        use Token::*;
        Self::new(
            vec![Add, Sub, Mul, Div, Square, Sqrt, Exp, Log, Const, Var(0), Var(1)],
            Self::DEFAULT_MAX_CONSTANTS,
            Self::DEFAULT_MIN_LENGTH,
            Self::DEFAULT_MAX_LENGTH,
        )
        .expect("default library is valid")
    }

    /// Operators of the stretch search (adds `pow`): input `x0 = λ`.
    pub fn stretch() -> Self {
        use Token::*;
        Self::new(
            vec![Add, Sub, Mul, Div, Square, Sqrt, Exp, Log, Pow, Const, Var(0)],
            Self::DEFAULT_MAX_CONSTANTS,
            Self::DEFAULT_MIN_LENGTH,
            Self::DEFAULT_MAX_LENGTH,
        )
        .expect("default library is valid")
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: Token) -> Option<usize> {
        self.tokens.iter().position(|&t| t == token)
    }

    /// Number of input slots, one more than the largest variable index.
    pub fn n_inputs(&self) -> usize {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Token::Var(i) => Some(*i as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Arity-counter walk: true iff `tokens` is exactly one complete
/// prefix expression.
fn complete_prefix(tokens: &[Token]) -> bool {
    let mut open = 1usize;
    for (i, t) in tokens.iter().enumerate() {
        open = open - 1 + t.arity();
        if open == 0 {
            return i + 1 == tokens.len();
        }
    }
    false
}

/// True iff `traversal` uses only library tokens, forms one complete prefix
/// expression, and respects the library's length bounds.
pub fn validate_traversal(traversal: &[Token], library: &Library) -> bool {
    traversal.iter().all(|t| library.tokens.contains(t))
        && complete_prefix(traversal)
        && (library.min_length..=library.max_length).contains(&traversal.len())
}

/// A complete expression: prefix traversal plus constant values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprTree {
    tokens: Vec<Token>,
    constants: Vec<f64>,
}

impl ExprTree {
    pub fn new(tokens: Vec<Token>, constants: Vec<f64>) -> Result<Self, Error> {
        if !complete_prefix(&tokens) {
            return Err(Error::InvalidTree("incomplete prefix traversal".into()));
        }
        let n_const = tokens.iter().filter(|t| **t == Token::Const).count();
        if n_const != constants.len() {
            return Err(Error::InvalidTree(format!(
                "{n_const} const tokens but {} constant values",
                constants.len()
            )));
        }
        if let Some(c) = constants.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidTree(format!("non-finite constant {c}")));
        }
        Ok(Self { tokens, constants })
    }

    /// Build a tree whose constants are all set to `init`.
    pub fn with_default_constants(tokens: Vec<Token>, init: f64) -> Result<Self, Error> {
        let n = tokens.iter().filter(|t| **t == Token::Const).count();
        Self::new(tokens, vec![init; n])
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn n_constants(&self) -> usize {
        self.constants.len()
    }

    /// Same structure, new constant values.
    pub fn with_constants(&self, constants: &[f64]) -> Result<Self, Error> {
        Self::new(self.tokens.clone(), constants.to_vec())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Largest variable slot referenced, plus one.
    pub fn n_inputs(&self) -> usize {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Token::Var(i) => Some(*i as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Token count.
    pub fn complexity(&self) -> usize {
        self.tokens.len()
    }

    /// Recursive strict evaluation.
    pub fn evaluate(&self, inputs: &[f64]) -> EvalOutcome {
        let mut cursor = 0usize;
        let mut next_const = 0usize;
        let v = self.eval_at(&mut cursor, &mut next_const, inputs)?;
        debug_assert_eq!(cursor, self.tokens.len());
        Ok(v)
    }

    fn eval_at(&self, cursor: &mut usize, next_const: &mut usize, inputs: &[f64]) -> EvalOutcome {
        let tok = self.tokens[*cursor];
        *cursor += 1;
        match tok {
            Token::Const => {
                let v = self.constants[*next_const];
                *next_const += 1;
                Ok(v)
            }
            Token::Var(i) => {
                let v = inputs[i as usize];
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(InvalidCause::Nan)
                }
            }
            t if t.arity() == 1 => {
                let a = self.eval_at(cursor, next_const, inputs)?;
                ops::unary(t, a)
            }
            t => {
                let a = self.eval_at(cursor, next_const, inputs)?;
                let b = self.eval_at(cursor, next_const, inputs)?;
                ops::binary(t, a, b)
            }
        }
    }

    /// Fully parenthesised infix rendering, constants in shortest
    /// round-trip decimal form.
    pub fn to_infix(&self) -> String {
        infix::render(self)
    }

    /// Top-level additive terms. Subtracted terms are returned negated
    /// (`-1 * t`). A tree that is not a sum yields itself.
    pub fn additive_terms(&self) -> Vec<ExprTree> {
        let node = program::Node::from_tree(self);
        let mut terms = Vec::new();
        node.collect_terms(false, &mut terms);
        terms
            .into_iter()
            .map(|n| n.to_tree(&self.constants))
            .collect()
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_infix())
    }
}

/// Parse a whitespace-separated token list, e.g. `"add x0 mul const log x1"`.
pub fn parse_tokens(s: &str) -> Result<Vec<Token>, Error> {
    s.split_whitespace().map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Token::*;

    fn lib_min1() -> Library {
        Library::new(
            vec![Add, Sub, Mul, Div, Square, Sqrt, Exp, Log, Const, Var(0), Var(1)],
            5,
            1,
            32,
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let lib = lib_min1();
        assert!(validate_traversal(&[Add, Var(0), Var(1)], &lib));
        assert!(!validate_traversal(&[Add, Var(0)], &lib));
        assert!(validate_traversal(
            &[Add, Var(0), Mul, Const, Log, Var(1)],
            &lib
        ));
        // trailing token after completion
        assert!(!validate_traversal(&[Var(0), Var(1)], &lib));
        // length bounds of the default library
        assert!(!validate_traversal(&[Add, Var(0), Var(1)], &Library::invariant()));
        // token outside the library
        assert!(!validate_traversal(&[Pow, Var(0), Var(1), ], &lib));
    }

    #[test]
    fn evaluate_examples() {
        let t = ExprTree::new(parse_tokens("add x0 mul const log x1").unwrap(), vec![0.5]).unwrap();
        let v = t.evaluate(&[3.0, 3.0]).unwrap();
        assert!((v - (3.0 + 0.5 * 3f64.ln())).abs() < 1e-15);
        assert!((v - 3.549306).abs() < 1e-6);

        let t = ExprTree::new(vec![Log, Var(0)], vec![]).unwrap();
        assert_eq!(t.evaluate(&[0.0]), Err(InvalidCause::LogNonpositive));

        let t = ExprTree::new(vec![Square, Var(0)], vec![]).unwrap();
        assert_eq!(t.evaluate(&[5.0]), Ok(25.0));
    }

    #[test]
    fn complexity_counts_tokens() {
        assert_eq!(ExprTree::new(vec![Var(0)], vec![]).unwrap().complexity(), 1);
        assert_eq!(
            ExprTree::new(vec![Add, Var(0), Var(1)], vec![]).unwrap().complexity(),
            3
        );
    }

    #[test]
    fn tree_construction_errors() {
        assert!(ExprTree::new(vec![Add, Var(0)], vec![]).is_err());
        assert!(ExprTree::new(vec![Mul, Const, Var(0)], vec![]).is_err());
        assert!(ExprTree::new(vec![Mul, Const, Var(0)], vec![f64::NAN]).is_err());
    }

    #[test]
    fn token_names_round_trip() {
        for t in [Add, Sub, Mul, Div, Square, Sqrt, Exp, Log, Pow, Const, Var(0), Var(7)] {
            assert_eq!(t.name().parse::<Token>().unwrap(), t);
        }
        assert!("x".parse::<Token>().is_err());
        assert!("sin".parse::<Token>().is_err());
    }

    #[test]
    fn library_validation() {
        assert!(Library::new(vec![Add, Const], 1, 1, 5).is_err());
        assert!(Library::new(vec![Log, Var(0)], 1, 1, 5).is_err());
        assert!(Library::new(vec![Add, Var(0), Var(0)], 1, 1, 5).is_err());
        assert!(Library::new(vec![Add, Var(0)], 1, 4, 4).is_err());
        assert_eq!(Library::invariant().n_inputs(), 2);
        assert_eq!(Library::stretch().n_inputs(), 1);
    }

    #[test]
    fn additive_terms_split() {
        let t = ExprTree::new(
            parse_tokens("sub add x0 mul const x1 log x1").unwrap(),
            vec![2.0],
        )
        .unwrap();
        let terms = t.additive_terms();
        assert_eq!(terms.len(), 3);
        let total: f64 = terms.iter().map(|t| t.evaluate(&[3.0, 5.0]).unwrap()).sum();
        assert!((total - t.evaluate(&[3.0, 5.0]).unwrap()).abs() < 1e-12);
        let single = ExprTree::new(vec![Log, Var(0)], vec![]).unwrap();
        assert_eq!(single.additive_terms(), vec![single.clone()]);
    }
}
