use super::{Formula, PredicateSignature, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Prop(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Prop(s) => format!("`#{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: [&str; 6] = ["true", "false", "forall", "exists", "box", "dia"];

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let err = |pos: usize, message: String| SyntaxError::Parse { pos, message };
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let ident = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                s.push(c);
                chars.next();
            }
            s
        };
        let tok = match c {
            '(' => {
                chars.next();
                Tok::LParen
            }
            ')' => {
                chars.next();
                Tok::RParen
            }
            ',' => {
                chars.next();
                Tok::Comma
            }
            '.' => {
                chars.next();
                Tok::Dot
            }
            '~' => {
                chars.next();
                Tok::Tilde
            }
            '&' => {
                chars.next();
                Tok::Amp
            }
            '|' => {
                chars.next();
                Tok::Bar
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, '>')) => Tok::Arrow,
                    _ => return Err(err(pos, "expected `->`".into())),
                }
            }
            '<' => {
                chars.next();
                match (chars.next(), chars.next()) {
                    (Some((_, '-')), Some((_, '>'))) => Tok::DArrow,
                    _ => return Err(err(pos, "expected `<->`".into())),
                }
            }
            '#' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, c)) if c.is_ascii_lowercase() => Tok::Prop(ident(&mut chars)),
                    _ => return Err(err(pos, "expected a lowercase name after `#`".into())),
                }
            }
            '\'' => return Err(err(pos, "domain constants cannot appear in input formulas".into())),
            c if c.is_ascii_lowercase() => Tok::Lower(ident(&mut chars)),
            c if c.is_ascii_uppercase() => Tok::Upper(ident(&mut chars)),
            c => return Err(err(pos, format!("unexpected character `{c}`"))),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: SigMode<'s>,
}

enum SigMode<'s> {
    Fixed(&'s PredicateSignature),
    Infer(PredicateSignature),
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        SyntaxError::Parse { pos: self.pos(), message: format!("expected {wanted}, found {}", self.peek().describe()) }
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lower(kw) if kw == "box" => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Lower(kw) if kw == "dia" => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Tok::Lower(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let var = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.unary()?;
                Ok(if kw == "forall" { Formula::forall(var, body) } else { Formula::exists(var, body) })
            }
            _ => self.primary(),
        }
    }

    fn variable(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Lower(v) if !KEYWORDS.contains(&v.as_str()) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let pos = self.pos();
        let tok = self.peek().clone();
        match tok {
            Tok::Lower(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Lower(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Prop(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Upper(pred) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        args.push(Term::Var(self.variable()?));
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(Term::Var(self.variable()?));
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                self.check_arity(&pred, args.len(), pos)?;
                Ok(Formula::Atom { pred, args })
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn check_arity(&mut self, pred: &str, found: usize, pos: usize) -> Result<(), SyntaxError> {
        match &mut self.sig {
            SigMode::Fixed(sig) => match sig.arity(pred) {
                None => Err(SyntaxError::UnknownPredicate { pred: pred.into(), pos }),
                Some(expected) if expected != found => {
                    Err(SyntaxError::ArityMismatch { pred: pred.into(), expected, found, pos })
                }
                Some(_) => Ok(()),
            },
            SigMode::Infer(sig) => sig.declare(pred, found).map_err(|expected| SyntaxError::ArityMismatch {
                pred: pred.into(),
                expected,
                found,
                pos,
            }),
        }
    }
}

fn run<'s>(text: &str, sig: SigMode<'s>) -> Result<(Formula, SigMode<'s>), SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, sig };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok((f, p.sig))
}

/// Parses `text` against a fixed signature.
pub fn parse(text: &str, sig: &PredicateSignature) -> Result<Formula, SyntaxError> {
    run(text, SigMode::Fixed(sig)).map(|(f, _)| f)
}

/// Parses `text`, taking each predicate's arity from its first use.
pub fn parse_inferring(text: &str) -> Result<(Formula, PredicateSignature), SyntaxError> {
    let (f, sig) = run(text, SigMode::Infer(PredicateSignature::new()))?;
    match sig {
        SigMode::Infer(sig) => Ok((f, sig)),
        SigMode::Fixed(_) => unreachable!(),
    }
}
