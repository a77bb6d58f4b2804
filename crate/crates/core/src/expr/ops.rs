//! Domain-checked primitive operations shared by every evaluator.

use super::{InvalidCause, Token};

/// Largest argument accepted by `exp`.
pub const EXP_ARG_MAX: f64 = 50.0;
/// Denominators (and zero bases under negative powers) at or below this
/// magnitude are treated as a division by zero.
pub const DIV_FLOOR: f64 = 1e-12;

#[inline]
fn finite(v: f64) -> Result<f64, InvalidCause> {
    if v.is_nan() {
        Err(InvalidCause::Nan)
    } else if v.is_infinite() {
        Err(InvalidCause::Overflow)
    } else {
        Ok(v)
    }
}

#[inline]
pub(crate) fn unary(op: Token, a: f64) -> Result<f64, InvalidCause> {
    match op {
        Token::Square => finite(a * a),
        Token::Sqrt => {
            if a < 0.0 {
                Err(InvalidCause::SqrtNegative)
            } else {
                finite(a.sqrt())
            }
        }
        Token::Exp => {
            if a > EXP_ARG_MAX {
                Err(InvalidCause::Overflow)
            } else {
                finite(a.exp())
            }
        }
        Token::Log => {
            if a > 0.0 {
                finite(a.ln())
            } else {
                Err(InvalidCause::LogNonpositive)
            }
        }
        _ => unreachable!("{op:?} is not unary"),
    }
}

#[inline]
pub(crate) fn binary(op: Token, a: f64, b: f64) -> Result<f64, InvalidCause> {
    match op {
        Token::Add => finite(a + b),
        Token::Sub => finite(a - b),
        Token::Mul => finite(a * b),
        Token::Div => {
            if b.abs() > DIV_FLOOR {
                finite(a / b)
            } else {
                Err(InvalidCause::DivByZero)
            }
        }
        Token::Pow => {
            if a.abs() <= DIV_FLOOR && b < 0.0 {
                Err(InvalidCause::DivByZero)
            } else if a < 0.0 && b.fract() != 0.0 {
                Err(InvalidCause::Nan)
            } else {
                finite(a.powf(b))
            }
        }
        _ => unreachable!("{op:?} is not binary"),
    }
}
