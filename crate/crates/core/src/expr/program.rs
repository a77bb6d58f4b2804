//! Owned expression nodes and a compiled postfix form for fast evaluation.

use super::{ops, EvalOutcome, ExprTree, InvalidCause, Token};

/// Where a constant slot of a compiled program takes its value from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstRef {
    /// Index into the constants of the tree the program was derived from.
    Param(usize),
    /// A fixed number introduced by differentiation (e.g. the 2 of `2x`).
    Literal(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Const(ConstRef),
    Var(u8),
    Unary(Token, Box<Node>),
    Binary(Token, Box<Node>, Box<Node>),
}

impl Node {
    pub(crate) fn from_tree(tree: &ExprTree) -> Node {
        fn build(tokens: &[Token], cursor: &mut usize, next_const: &mut usize) -> Node {
            let t = tokens[*cursor];
            *cursor += 1;
            match t {
                Token::Const => {
                    let n = Node::Const(ConstRef::Param(*next_const));
                    *next_const += 1;
                    n
                }
                Token::Var(i) => Node::Var(i),
                t if t.arity() == 1 => Node::Unary(t, Box::new(build(tokens, cursor, next_const))),
                t => {
                    let a = build(tokens, cursor, next_const);
                    let b = build(tokens, cursor, next_const);
                    Node::Binary(t, Box::new(a), Box::new(b))
                }
            }
        }
        let (mut cursor, mut next_const) = (0, 0);
        build(tree.tokens(), &mut cursor, &mut next_const)
    }

    pub(crate) fn flatten(&self, tokens: &mut Vec<Token>, sources: &mut Vec<ConstRef>) {
        match self {
            Node::Const(c) => {
                tokens.push(Token::Const);
                sources.push(*c);
            }
            Node::Var(i) => tokens.push(Token::Var(*i)),
            Node::Unary(t, a) => {
                tokens.push(*t);
                a.flatten(tokens, sources);
            }
            Node::Binary(t, a, b) => {
                tokens.push(*t);
                a.flatten(tokens, sources);
                b.flatten(tokens, sources);
            }
        }
    }

    /// Materialise as a standalone tree, resolving parameter references
    /// against `params`.
    pub(crate) fn to_tree(&self, params: &[f64]) -> ExprTree {
        let (mut tokens, mut sources) = (Vec::new(), Vec::new());
        self.flatten(&mut tokens, &mut sources);
        let constants = sources.iter().map(|c| resolve(*c, params)).collect();
        ExprTree::new(tokens, constants).expect("flattened node is a complete tree")
    }

    pub(crate) fn collect_terms(&self, negate: bool, out: &mut Vec<Node>) {
        match self {
            Node::Binary(Token::Add, a, b) => {
                a.collect_terms(negate, out);
                b.collect_terms(negate, out);
            }
            Node::Binary(Token::Sub, a, b) => {
                a.collect_terms(negate, out);
                b.collect_terms(!negate, out);
            }
            n if negate => out.push(Node::Binary(
                Token::Mul,
                Box::new(Node::Const(ConstRef::Literal(-1.0))),
                Box::new(n.clone()),
            )),
            n => out.push(n.clone()),
        }
    }
}

#[inline]
fn resolve(c: ConstRef, params: &[f64]) -> f64 {
    match c {
        ConstRef::Param(i) => params[i],
        ConstRef::Literal(v) => v,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Instr {
    Var(u8),
    Const(usize),
    Unary(Token),
    Binary(Token),
}

/// Postfix program evaluating an expression, with constant slots bound to
/// an external parameter vector so constants can change without
/// recompiling.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    sources: Vec<ConstRef>,
    depth: usize,
}

impl Program {
    /// Compile a tree; its constants become parameters `0..n_constants`.
    pub fn compile(tree: &ExprTree) -> Program {
        Self::from_node(&Node::from_tree(tree))
    }

    pub(crate) fn from_node(node: &Node) -> Program {
        let (mut tokens, mut sources) = (Vec::new(), Vec::new());
        node.flatten(&mut tokens, &mut sources);
        let mut code = Vec::with_capacity(tokens.len());
        let mut next_const = 0;
        emit_postfix(node, &mut code, &mut next_const);
        let (mut sp, mut depth) = (0usize, 0usize);
        for ins in &code {
            match ins {
                Instr::Var(_) | Instr::Const(_) => sp += 1,
                Instr::Unary(_) => {}
                Instr::Binary(_) => sp -= 1,
            }
            depth = depth.max(sp);
        }
        Program {
            code,
            sources,
            depth,
        }
    }

    pub fn sources(&self) -> &[ConstRef] {
        &self.sources
    }

    /// True if the program is a single constant literal (no dependence on
    /// inputs or parameters).
    pub fn as_literal(&self) -> Option<f64> {
        match (self.code.as_slice(), self.sources.as_slice()) {
            ([Instr::Const(0)], [ConstRef::Literal(v)]) => Some(*v),
            _ => None,
        }
    }

    pub fn eval(&self, params: &[f64], inputs: &[f64]) -> EvalOutcome {
        let mut stack: Vec<f64> = Vec::with_capacity(self.depth);
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => {
                    let v = inputs[i as usize];
                    if !v.is_finite() {
                        return Err(InvalidCause::Nan);
                    }
                    stack.push(v)
                }
                Instr::Const(k) => stack.push(resolve(self.sources[k], params)),
                Instr::Unary(t) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(ops::unary(t, a)?);
                }
                Instr::Binary(t) => {
                    let b = stack.pop().expect("stack underflow");
                    let a = stack.pop().expect("stack underflow");
                    stack.push(ops::binary(t, a, b)?);
                }
            }
        }
        Ok(stack[0])
    }

    /// Evaluate over `n` points at once. `columns[i]` holds input slot `i`
    /// for every point; the result is written to `out[..n]`. Fails on the
    /// first invalid point.
    pub fn eval_columns(
        &self,
        params: &[f64],
        columns: &[&[f64]],
        out: &mut [f64],
    ) -> Result<(), InvalidCause> {
        let n = out.len();
        let mut buf = vec![0.0; self.depth.max(1) * n];
        let mut sp = 0usize;
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => {
                    let col = &columns[i as usize][..n];
                    if col.iter().any(|v| !v.is_finite()) {
                        return Err(InvalidCause::Nan);
                    }
                    buf[sp * n..(sp + 1) * n].copy_from_slice(col);
                    sp += 1;
                }
                Instr::Const(k) => {
                    let v = resolve(self.sources[k], params);
                    buf[sp * n..(sp + 1) * n].fill(v);
                    sp += 1;
                }
                Instr::Unary(t) => {
                    for v in &mut buf[(sp - 1) * n..sp * n] {
                        *v = ops::unary(t, *v)?;
                    }
                }
                Instr::Binary(t) => {
                    let (lo, hi) = buf.split_at_mut((sp - 1) * n);
                    let a = &mut lo[(sp - 2) * n..];
                    for (x, y) in a.iter_mut().zip(&hi[..n]) {
                        *x = ops::binary(t, *x, *y)?;
                    }
                    sp -= 1;
                }
            }
        }
        out.copy_from_slice(&buf[..n]);
        Ok(())
    }
}

fn emit_postfix(node: &Node, code: &mut Vec<Instr>, next_const: &mut usize) {
    match node {
        Node::Const(_) => {
            code.push(Instr::Const(*next_const));
            *next_const += 1;
        }
        Node::Var(i) => code.push(Instr::Var(*i)),
        Node::Unary(t, a) => {
            emit_postfix(a, code, next_const);
            code.push(Instr::Unary(*t));
        }
        Node::Binary(t, a, b) => {
            emit_postfix(a, code, next_const);
            emit_postfix(b, code, next_const);
            code.push(Instr::Binary(*t));
        }
    }
}
