//! A quantifier-free formula over `N, p, p', T` evaluated at every
//! `p' ∈ [0, width)` at once, one bit per position.

use multiauto::construction::{var_n, var_p, var_p2, var_t};
use multiauto::presburger::{Formula, Term};

enum Kind {
    Le,
    Eq,
    Div(i128),
}

struct Atom {
    kind: Kind,
    /// Coefficients of `N`, `p`, `T`, `p'`, then the constant.
    coeffs: [i128; 5],
}

enum Node {
    Const(bool),
    Atom(usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
}

pub struct MaskFormula {
    atoms: Vec<Atom>,
    root: Node,
}

fn low(bits: i128) -> u64 {
    match bits {
        b if b <= 0 => 0,
        b if b >= 64 => !0,
        b => (1u64 << b) - 1,
    }
}

impl MaskFormula {
    pub fn new(f: &Formula) -> MaskFormula {
        let mut atoms = Vec::new();
        let root = compile(f, &mut atoms);
        MaskFormula { atoms, root }
    }

    /// Bit `q` is set iff the formula holds at `p' = q`.
    pub fn eval(&self, n: i64, p: i64, t: i64, width: u32) -> u64 {
        let full = low(width as i128);
        let masks: Vec<u64> = self
            .atoms
            .iter()
            .map(|atom| {
                let [cn, cp, ct, a, c] = atom.coeffs;
                let base = c + cn * n as i128 + cp * p as i128 + ct * t as i128;
                let m = match atom.kind {
                    Kind::Le if a == 0 => {
                        if base <= 0 {
                            !0
                        } else {
                            0
                        }
                    }
                    Kind::Le if a > 0 => low((-base).div_euclid(a) + 1),
                    Kind::Le => !low(-(-base).div_euclid(-a)),
                    Kind::Eq if a == 0 => {
                        if base == 0 {
                            !0
                        } else {
                            0
                        }
                    }
                    Kind::Eq => {
                        let q = -base / a;
                        if base % a == 0 && (0..64).contains(&q) {
                            1u64 << q
                        } else {
                            0
                        }
                    }
                    Kind::Div(d) => (0..width as i128)
                        .filter(|q| (base + a * q).rem_euclid(d) == 0)
                        .fold(0, |m, q| m | 1 << q),
                };
                m & full
            })
            .collect();
        eval(&self.root, &masks, full)
    }
}

fn compile(f: &Formula, atoms: &mut Vec<Atom>) -> Node {
    let mut atom = |kind: Kind, t: &Term| {
        let known = [var_n(), var_p(), var_t(), var_p2()];
        assert!(t.vars().all(|v| known.contains(&v)), "unexpected variable in {t:?}");
        let c = |i: usize| t.coeff(known[i]);
        atoms.push(Atom {
            kind,
            coeffs: [c(0), c(1), c(2), c(3), t.constant],
        });
        Node::Atom(atoms.len() - 1)
    };
    match f {
        Formula::True => Node::Const(true),
        Formula::False => Node::Const(false),
        Formula::Le(t) => atom(Kind::Le, t),
        Formula::Eq(t) => atom(Kind::Eq, t),
        Formula::Div(d, t) => atom(Kind::Div(*d), t),
        Formula::Not(g) => Node::Not(Box::new(compile(g, atoms))),
        Formula::And(gs) => Node::And(gs.iter().map(|g| compile(g, atoms)).collect()),
        Formula::Or(gs) => Node::Or(gs.iter().map(|g| compile(g, atoms)).collect()),
        Formula::Exists(..) | Formula::Forall(..) => panic!("quantified formula"),
    }
}

fn eval(node: &Node, masks: &[u64], full: u64) -> u64 {
    match node {
        Node::Const(b) => {
            if *b {
                full
            } else {
                0
            }
        }
        Node::Atom(i) => masks[*i],
        Node::Not(g) => full & !eval(g, masks, full),
        Node::And(gs) => gs
            .iter()
            .fold(full, |m, g| if m == 0 { 0 } else { m & eval(g, masks, full) }),
        Node::Or(gs) => gs
            .iter()
            .fold(0, |m, g| if m == full { full } else { m | eval(g, masks, full) }),
    }
}
