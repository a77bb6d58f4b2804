//! Hard constraints on the next token of a partial traversal.

use crate::expr::{Library, Token};
use crate::{Error, Result};

/// Parent and sibling of the slot about to be filled, as library indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observation {
    pub parent: Option<usize>,
    pub sibling: Option<usize>,
}

impl Observation {
    /// Positions of the two active entries in the `2(L+1)` one-hot input:
    /// parent block first, each block ending with a "none" flag.
    pub fn encode(&self, library_len: usize) -> [usize; 2] {
        let l = library_len;
        [
            self.parent.unwrap_or(l),
            l + 1 + self.sibling.unwrap_or(l),
        ]
    }
}

#[derive(Clone, Debug)]
struct Frame {
    token: Token,
    filled: usize,
    first: Option<Token>,
}

/// Bookkeeping while a traversal is built token by token.
#[derive(Clone, Debug)]
pub struct PriorState<'a> {
    library: &'a Library,
    placed: usize,
    open: usize,
    n_const: usize,
    frames: Vec<Frame>,
}

impl<'a> PriorState<'a> {
    pub fn new(library: &'a Library) -> Self {
        PriorState {
            library,
            placed: 0,
            open: 1,
            n_const: 0,
            frames: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.open == 0
    }

    pub fn len(&self) -> usize {
        self.placed
    }

    pub fn is_empty(&self) -> bool {
        self.placed == 0
    }

    fn pending(&self) -> (Option<Token>, Option<Token>) {
        match self.frames.last() {
            None => (None, None),
            Some(f) => (Some(f.token), if f.filled == 1 { f.first } else { None }),
        }
    }

    pub fn observation(&self) -> Observation {
        let (p, s) = self.pending();
        let idx = |t: Option<Token>| t.and_then(|t| self.library.index_of(t));
        Observation {
            parent: idx(p),
            sibling: idx(s),
        }
    }

    /// Allowed tokens for the next slot, in library order.
    pub fn mask(&self) -> Vec<bool> {
        let lib = self.library;
        let (parent, sibling) = self.pending();
        let const_ok = self.n_const < lib.max_constants
            && !parent.is_some_and(|p| p.arity() == 1)
            && sibling != Some(Token::Const);
        lib.tokens()
            .iter()
            .map(|&t| {
                let after = self.placed + 1;
                let open_after = self.open - 1 + t.arity();
                if after + open_after > lib.max_length {
                    return false;
                }
                if t.is_terminal() && self.open == 1 && after < lib.min_length {
                    return false;
                }
                t != Token::Const || const_ok
            })
            .collect()
    }

    /// Place `t` in the next slot. The caller is responsible for having
    /// checked it against [`PriorState::mask`].
    pub fn push(&mut self, t: Token) {
        debug_assert!(!self.is_complete());
        if let Some(f) = self.frames.last_mut() {
            f.filled += 1;
            if f.filled == 1 {
                f.first = Some(t);
            }
        }
        self.placed += 1;
        self.open = self.open - 1 + t.arity();
        if t == Token::Const {
            self.n_const += 1;
        }
        if t.arity() > 0 {
            self.frames.push(Frame {
                token: t,
                filled: 0,
                first: None,
            });
        } else {
            while self
                .frames
                .last()
                .is_some_and(|f| f.filled == f.token.arity())
            {
                self.frames.pop();
            }
        }
    }
}

/// Mask for the slot following `prefix`.
pub fn prior_mask(prefix: &[Token], library: &Library) -> Result<Vec<bool>> {
    let mut st = PriorState::new(library);
    for (i, &t) in prefix.iter().enumerate() {
        if st.is_complete() {
            return Err(Error::Unreachable(format!("prefix is complete before token {i}")));
        }
        let k = library
            .index_of(t)
            .ok_or_else(|| Error::Unreachable(format!("token `{t}` not in library")))?;
        if !st.mask()[k] {
            return Err(Error::Unreachable(format!("token `{t}` forbidden at position {i}")));
        }
        st.push(t);
    }
    if st.is_complete() {
        return Err(Error::Unreachable("prefix is already a complete traversal".into()));
    }
    Ok(st.mask())
}
