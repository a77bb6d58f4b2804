//! Exact symbolic partial derivatives with light algebraic simplification.

use super::program::{ConstRef, Node};
use super::{ExprTree, Program, Token};

fn lit(v: f64) -> Node {
    Node::Const(ConstRef::Literal(v))
}

fn literal_value(n: &Node) -> Option<f64> {
    match n {
        Node::Const(ConstRef::Literal(v)) => Some(*v),
        _ => None,
    }
}

fn is_lit(n: &Node, v: f64) -> bool {
    literal_value(n) == Some(v)
}

fn un(t: Token, a: Node) -> Node {
    Node::Unary(t, Box::new(a))
}

fn bin(t: Token, a: Node, b: Node) -> Node {
    Node::Binary(t, Box::new(a), Box::new(b))
}

fn add(a: Node, b: Node) -> Node {
    match (literal_value(&a), literal_value(&b)) {
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        (Some(x), Some(y)) => lit(x + y),
        _ => bin(Token::Add, a, b),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (literal_value(&a), literal_value(&b)) {
        (_, Some(0.0)) => a,
        (Some(x), Some(y)) => lit(x - y),
        (Some(0.0), _) => mul(lit(-1.0), b),
        _ => bin(Token::Sub, a, b),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (literal_value(&a), literal_value(&b)) {
        (Some(0.0), _) | (_, Some(0.0)) => lit(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(x), Some(y)) => lit(x * y),
        _ => bin(Token::Mul, a, b),
    }
}

fn div(a: Node, b: Node) -> Node {
    match (literal_value(&a), literal_value(&b)) {
        (Some(0.0), _) => lit(0.0),
        (_, Some(1.0)) => a,
        (Some(x), Some(y)) if y != 0.0 => lit(x / y),
        _ => bin(Token::Div, a, b),
    }
}

fn d(node: &Node, var: u8) -> Node {
    match node {
        Node::Const(_) => lit(0.0),
        Node::Var(i) => lit(if *i == var { 1.0 } else { 0.0 }),
        Node::Unary(t, a) => {
            let da = d(a, var);
            if is_lit(&da, 0.0) {
                return lit(0.0);
            }
            let a = (**a).clone();
            match t {
                Token::Square => mul(mul(lit(2.0), a), da),
                Token::Sqrt => div(da, mul(lit(2.0), un(Token::Sqrt, a))),
                Token::Exp => mul(un(Token::Exp, a), da),
                Token::Log => div(da, a),
                _ => unreachable!(),
            }
        }
        Node::Binary(t, a, b) => {
            let (da, db) = (d(a, var), d(b, var));
            let (a, b) = ((**a).clone(), (**b).clone());
            match t {
                Token::Add => add(da, db),
                Token::Sub => sub(da, db),
                Token::Mul => add(mul(da, b.clone()), mul(a, db)),
                Token::Div => {
                    if is_lit(&db, 0.0) {
                        div(da, b)
                    } else {
                        div(
                            sub(mul(da, b.clone()), mul(a, db)),
                            un(Token::Square, b),
                        )
                    }
                }
                Token::Pow => {
                    let da_zero = is_lit(&da, 0.0);
                    let db_zero = is_lit(&db, 0.0);
                    match (da_zero, db_zero) {
                        (true, true) => lit(0.0),
                        // b * a^(b-1) * a'
                        (false, true) => mul(
                            mul(b.clone(), bin(Token::Pow, a, sub(b, lit(1.0)))),
                            da,
                        ),
                        // a^b * ln(a) * b'
                        (true, false) => mul(
                            mul(bin(Token::Pow, a.clone(), b), un(Token::Log, a)),
                            db,
                        ),
                        // a^b * (b' ln a + b a' / a)
                        (false, false) => mul(
                            bin(Token::Pow, a.clone(), b.clone()),
                            add(
                                mul(db, un(Token::Log, a.clone())),
                                div(mul(b, da), a),
                            ),
                        ),
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Symbolic partial derivative of `tree` with respect to input `var`.
///
/// The returned tree carries its own copies of the constant values; use
/// [`derivative_program`] when the derivative has to follow later changes
/// of the original constants.
pub fn differentiate(tree: &ExprTree, var: u8) -> ExprTree {
    d(&Node::from_tree(tree), var).to_tree(tree.constants())
}

/// Derivative compiled against the *original* tree's constants: its
/// parameter slots refer to `tree.constants()` indices.
pub(crate) fn derivative_program(tree: &ExprTree, var: u8) -> Program {
    Program::from_node(&d(&Node::from_tree(tree), var))
}
