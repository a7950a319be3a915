use std::fmt;

use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::ultrametric::Lfe;

use super::fnrepr::FnRepr;
use super::points::UpsilonPoint;

/// Level-raising operators on functions of `U^{[k]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// `Υ`: `g ↦ [g(z + t w) − g(z)]/t`.
    Upsilon,
    /// `P̂`: `g ↦ g(z + t w)`.
    Shift,
    /// `π̂`: `g ↦ g(z)`.
    Back,
}

impl Op {
    fn symbol(self) -> &'static str {
        match self {
            Op::Upsilon => "Υ",
            Op::Shift => "P̂",
            Op::Back => "π̂",
        }
    }
}

/// Operator expression over a list of scalar base functions.
#[derive(Clone, Debug)]
pub enum Expr {
    /// An operator word applied to a base function; `ops[0]` acts first.
    Leaf {
        func: usize,
        ops: Vec<Op>,
    },
    Const(Lfe),
    Prod(Vec<Expr>),
    /// Integer combination of expressions.
    Sum(Vec<(i64, Expr)>),
    /// A polynomial evaluated at the values of the argument expressions.
    Compose {
        poly: MPoly<Lfe>,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn leaf(func: usize) -> Self {
        Expr::Leaf { func, ops: Vec::new() }
    }

    pub fn zero() -> Self {
        Expr::Sum(Vec::new())
    }

    /// Applies `P̂` or `π̂`; both are compositions with a point map and so pass through
    /// sums, products and polynomial compositions.
    pub fn apply_point_op(&self, op: Op) -> Expr {
        debug_assert!(op != Op::Upsilon);
        match self {
            Expr::Leaf { func, ops } => {
                let mut ops = ops.clone();
                ops.push(op);
                Expr::Leaf { func: *func, ops }
            }
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Prod(fs) => Expr::Prod(fs.iter().map(|f| f.apply_point_op(op)).collect()),
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|(c, e)| (*c, e.apply_point_op(op))).collect()),
            Expr::Compose { poly, args } => Expr::Compose { poly: poly.clone(), args: args.iter().map(|a| a.apply_point_op(op)).collect() },
        }
    }

    /// `Υ` of the expression, expanded by the product rule
    /// `Υ(f_1…f_k) = Σ_α π̂(f_1…f_α)·Υf_{α+1}·P̂(f_{α+2}…f_k)`, linearity, and the
    /// divided-difference rule for polynomial compositions.
    pub fn upsilon(&self) -> Expr {
        match self {
            Expr::Leaf { func, ops } => {
                let mut ops = ops.clone();
                ops.push(Op::Upsilon);
                Expr::Leaf { func: *func, ops }
            }
            Expr::Const(_) => Expr::zero(),
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|(c, e)| (*c, e.upsilon())).collect()),
            Expr::Prod(fs) => {
                let k = fs.len();
                let terms = (0..k)
                    .map(|a| {
                        let mut factors: Vec<Expr> = fs[..a].iter().map(|f| f.apply_point_op(Op::Back)).collect();
                        factors.push(fs[a].upsilon());
                        factors.extend(fs[a + 1..].iter().map(|f| f.apply_point_op(Op::Shift)));
                        (1, Expr::Prod(factors))
                    })
                    .collect();
                Expr::Sum(terms)
            }
            Expr::Compose { poly, args } => {
                let m = args.len();
                let terms = (0..m)
                    .map(|j| {
                        let mut new_args: Vec<Expr> = Vec::with_capacity(m + 1);
                        for (i, a) in args.iter().enumerate() {
                            new_args.push(a.apply_point_op(if i <= j { Op::Back } else { Op::Shift }));
                        }
                        new_args.push(Expr::Sum(vec![(1, args[j].apply_point_op(Op::Shift)), (-1, args[j].apply_point_op(Op::Back))]));
                        let fj = divided_difference(poly, j);
                        (1, Expr::Prod(vec![Expr::Compose { poly: fj, args: new_args }, args[j].upsilon()]))
                    })
                    .collect();
                Expr::Sum(terms)
            }
        }
    }

    /// `Υⁿ` applied `n` times.
    pub fn upsilon_n(&self, n: usize) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.upsilon())
    }

    /// Number of level-raising operators in every leaf; `None` if the leaves disagree.
    pub fn level(&self) -> Option<usize> {
        fn go(e: &Expr, acc: &mut Option<Option<usize>>) {
            match e {
                Expr::Leaf { ops, .. } => match acc {
                    None => *acc = Some(Some(ops.len())),
                    Some(Some(l)) if *l != ops.len() => *acc = Some(None),
                    _ => {}
                },
                Expr::Const(_) => {}
                Expr::Prod(fs) => fs.iter().for_each(|f| go(f, acc)),
                Expr::Sum(ts) => ts.iter().for_each(|(_, t)| go(t, acc)),
                Expr::Compose { args, .. } => args.iter().for_each(|a| go(a, acc)),
            }
        }
        let mut acc = None;
        go(self, &mut acc);
        acc.unwrap_or(Some(0))
    }

    /// Top-level summands with their signs, nested sums flattened.
    pub fn summands(&self) -> Vec<(i64, Expr)> {
        match self {
            Expr::Sum(ts) => ts.iter().flat_map(|(c, e)| e.summands().into_iter().map(move |(d, f)| (c * d, f))).collect(),
            other => vec![(1, other.clone())],
        }
    }

    /// Evaluates at a point of `U^{[k]}`, where `k` is the level of the expression.
    pub fn eval(&self, env: &[FnRepr], pt: &UpsilonPoint) -> Result<Lfe> {
        match self {
            Expr::Leaf { func, ops } => eval_word(&env[*func], ops, pt),
            Expr::Const(c) => Ok(c.clone()),
            Expr::Prod(fs) => {
                let mut acc: Option<Lfe> = None;
                for f in fs {
                    let v = f.eval(env, pt)?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => &a * &v,
                    });
                }
                Ok(acc.unwrap_or_else(|| Lfe::one(env[0].field, pt_precision(pt))))
            }
            Expr::Sum(ts) => {
                let mut acc = Lfe::zero(env[0].field);
                for (c, e) in ts {
                    let v = e.eval(env, pt)?;
                    acc = match c {
                        1 => &acc + &v,
                        -1 => &acc - &v,
                        _ => &acc + &(&Lfe::from_int(env[0].field, *c, pt_precision(pt)) * &v),
                    };
                }
                Ok(acc)
            }
            Expr::Compose { poly, args } => {
                let vals = args.iter().map(|a| a.eval(env, pt)).collect::<Result<Vec<_>>>()?;
                Ok(poly.eval(&vals, &vals[0]))
            }
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

fn pt_precision(pt: &UpsilonPoint) -> i64 {
    pt.x_slots()[0].first().map(|c| c.working_precision()).unwrap_or(crate::ultrametric::DEFAULT_PRECISION)
}

/// `F_j(z, c) = [F(z + c e_j) − F(z)]/c` as a polynomial in `m + 1` variables (`c` last).
pub fn divided_difference(poly: &MPoly<Lfe>, j: usize) -> MPoly<Lfe> {
    let m = poly.nvars();
    let n = m + 1;
    let one = match poly.sample_coeff() {
        Some(c) => Lfe::one(c.field(), c.working_precision() + 64),
        None => return MPoly::zero(n),
    };
    let subs: Vec<MPoly<Lfe>> = (0..m)
        .map(|i| {
            let v = MPoly::var(i, n, one.clone());
            if i == j {
                v.plus(&MPoly::var(m, n, one.clone()))
            } else {
                v
            }
        })
        .collect();
    let map: Vec<usize> = (0..m).collect();
    poly.compose(&subs, &one).minus(&poly.reindex(n, &map)).divide_out_vars(&[m])
}

/// Evaluates an operator word on a base function by direct recursion over the point.
pub fn eval_word(f: &FnRepr, ops: &[Op], pt: &UpsilonPoint) -> Result<Lfe> {
    match (ops.split_last(), pt) {
        (None, UpsilonPoint::Base(x)) => f.eval_scalar(x),
        (Some((op, rest)), UpsilonPoint::Step { base, dir, t }) => match op {
            Op::Back => eval_word(f, rest, base),
            Op::Shift => eval_word(f, rest, &base.axpy(t, dir)?),
            Op::Upsilon => {
                let a = eval_word(f, rest, &base.axpy(t, dir)?)?;
                let b = eval_word(f, rest, base)?;
                (&a - &b).checked_div(t)
            }
        },
        _ => Err(Error::ShapeMismatch("operator word and point level differ".into())),
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Leaf { func, ops } => {
                for op in ops.iter().rev() {
                    write!(f, "{}", op.symbol())?;
                }
                write!(f, "{}", self.names.get(*func).cloned().unwrap_or_else(|| format!("f{func}")))
            }
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Prod(fs) => {
                for g in fs {
                    write!(f, "({})", g.display(self.names))?;
                }
                Ok(())
            }
            Expr::Sum(ts) => {
                if ts.is_empty() {
                    return write!(f, "0");
                }
                for (i, (c, e)) in ts.iter().enumerate() {
                    let sign = if *c < 0 {
                        "-"
                    } else if i > 0 {
                        "+"
                    } else {
                        ""
                    };
                    let mag = if c.abs() != 1 { format!("{}·", c.abs()) } else { String::new() };
                    write!(f, "{sign}{mag}{}", e.display(self.names))?;
                }
                Ok(())
            }
            Expr::Compose { args, .. } => {
                write!(f, "F[")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a.display(self.names))?;
                }
                write!(f, "]")
            }
        }
    }
}
