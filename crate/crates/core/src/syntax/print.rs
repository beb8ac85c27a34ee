use std::fmt;

use super::{Formula, Term};

// Binding strength, loosest first. `<->` is never printed: it is sugar and
// has no node.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "'{c}"),
        }
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if prec(f) < min {
        out.write_str("(")?;
        write_formula(out, f)?;
        out.write_str(")")
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::Top => out.write_str("true"),
        Formula::Bottom => out.write_str("false"),
        Formula::Prop(p) => write!(out, "#{p}"),
        Formula::Atom { pred, args } => {
            out.write_str(pred)?;
            if !args.is_empty() {
                out.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    write!(out, "{a}")?;
                }
                out.write_str(")")?;
            }
            Ok(())
        }
        Formula::Not(a) => {
            out.write_str("~")?;
            write_at(out, a, UNARY)
        }
        Formula::Box(a) => {
            out.write_str("box ")?;
            write_at(out, a, UNARY)
        }
        Formula::Forall(v, a) => {
            write!(out, "forall {v}. ")?;
            write_at(out, a, UNARY)
        }
        Formula::Exists(v, a) => {
            write!(out, "exists {v}. ")?;
            write_at(out, a, UNARY)
        }
        Formula::Implies(a, b) => {
            write_at(out, a, IMPLIES + 1)?;
            out.write_str(" -> ")?;
            write_at(out, b, IMPLIES)
        }
        Formula::Or(a, b) => {
            write_at(out, a, OR)?;
            out.write_str(" | ")?;
            write_at(out, b, OR + 1)
        }
        Formula::And(a, b) => {
            write_at(out, a, AND)?;
            out.write_str(" & ")?;
            write_at(out, b, AND + 1)
        }
    }
}

/// Concrete syntax accepted by [`super::parse`]; `parse(print(f)) == f`
/// for every formula without domain constants.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}
