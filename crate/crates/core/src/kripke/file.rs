//! Line-oriented model files.
//!
//! ```text
//! worlds: 2
//! edge: 0 1
//! domain: 0 a
//! domain: 1 a b
//! pred: Q 2
//! fact: 1 P b
//! ```
//!
//! `pred:` lines are optional and only record the arity of predicates with
//! no true tuples. `#` starts a comment.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use super::{validate_model, KripkeModel, ModelBuilder, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl ModelFileError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelFileError::Syntax { .. } => "model-syntax",
            ModelFileError::Invalid(_) => "invalid-model",
        }
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_model_file(text: &str) -> Result<KripkeModel, ModelFileError> {
    let mut builder: Option<ModelBuilder> = None;
    let mut worlds = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ModelFileError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) =
            content.split_once(':').ok_or_else(|| err(format!("expected `key: values`, found `{content}`")))?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let world = |s: &str| -> Result<usize, ModelFileError> {
            let w: usize = s.parse().map_err(|_| err(format!("`{s}` is not a world index")))?;
            if w >= worlds {
                return Err(err(format!("world {w} out of range (worlds: {worlds})")));
            }
            Ok(w)
        };
        let names = |xs: &[&str]| -> Result<(), ModelFileError> {
            match xs.iter().find(|x| !is_name(x)) {
                Some(bad) => Err(err(format!("`{bad}` is not a valid name"))),
                None => Ok(()),
            }
        };
        match (key.trim(), builder.as_mut()) {
            ("worlds", None) => {
                let [n] = fields[..] else {
                    return Err(err("`worlds:` takes one number".into()));
                };
                worlds = n.parse().map_err(|_| err(format!("`{n}` is not a number")))?;
                builder = Some(ModelBuilder::new(worlds));
            }
            ("worlds", Some(_)) => return Err(err("duplicate `worlds:` header".into())),
            (_, None) => return Err(err("the file must start with `worlds: n`".into())),
            ("edge", Some(b)) => {
                let [w, v] = fields[..] else {
                    return Err(err("`edge:` takes two worlds".into()));
                };
                b.edge(world(w)?, world(v)?);
            }
            ("domain", Some(b)) => {
                let Some((w, cs)) = fields.split_first() else {
                    return Err(err("`domain:` needs a world".into()));
                };
                names(cs)?;
                b.domain(world(w)?, cs.iter().copied());
            }
            ("pred", Some(b)) => {
                let [p, a] = fields[..] else {
                    return Err(err("`pred:` takes a name and an arity".into()));
                };
                names(&[p])?;
                let a = a.parse().map_err(|_| err(format!("`{a}` is not an arity")))?;
                b.declare(p, a);
            }
            ("fact", Some(b)) => {
                let [w, p, cs @ ..] = &fields[..] else {
                    return Err(err("`fact:` needs a world and a predicate".into()));
                };
                names(&[p])?;
                names(cs)?;
                b.fact(world(w)?, p, cs.iter().copied());
            }
            (other, Some(_)) => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    let model =
        builder.ok_or(ModelFileError::Syntax { line: 0, message: "missing `worlds: n` header".into() })?.build();
    let violations = validate_model(&model);
    if violations.is_empty() {
        Ok(model)
    } else {
        Err(ModelFileError::Invalid(violations))
    }
}

/// Orders `c2` before `c10`.
fn natural(a: &str, b: &str) -> Ordering {
    let split = |s: &str| {
        let digits = s.len() - s.bytes().rev().take_while(u8::is_ascii_digit).count();
        let (head, tail) = s.split_at(digits);
        (head.to_string(), tail.len(), tail.to_string())
    };
    split(a).cmp(&split(b))
}

/// Canonical text for `m`: the same model always prints the same way,
/// whatever order it was built in.
pub fn write_model_file(m: &KripkeModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "worlds: {}", m.world_count());
    for (w, v) in m.edges() {
        let _ = writeln!(out, "edge: {w} {v}");
    }
    for w in m.worlds() {
        let mut d: Vec<&str> = m.domain(w).collect();
        d.sort_by(|a, b| natural(a, b));
        let _ = writeln!(out, "domain: {w} {}", d.join(" "));
    }
    let mut with_facts = std::collections::BTreeSet::new();
    let mut facts: Vec<(usize, &str, Vec<&str>)> = m.facts().collect();
    for (_, p, _) in &facts {
        with_facts.insert(p.to_string());
    }
    for (p, a) in m.signature() {
        if !with_facts.contains(p) {
            let _ = writeln!(out, "pred: {p} {a}");
        }
    }
    facts.sort_by(|x, y| {
        x.0.cmp(&y.0).then_with(|| x.1.cmp(y.1)).then_with(|| {
            x.2.iter().zip(&y.2).map(|(a, b)| natural(a, b)).find(|o| o.is_ne()).unwrap_or(x.2.len().cmp(&y.2.len()))
        })
    });
    for (w, p, t) in facts {
        if t.is_empty() {
            let _ = writeln!(out, "fact: {w} {p}");
        } else {
            let _ = writeln!(out, "fact: {w} {p} {}", t.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two worlds
worlds: 2
edge: 0 1
domain: 0 a
domain: 1 a b   # b appears later
pred: Q 2
fact: 1 P b
";

    #[test]
    fn parses_sample() {
        let m = parse_model_file(SAMPLE).unwrap();
        assert_eq!(m.world_count(), 2);
        assert!(m.has_edge(0, 1));
        assert!(m.holds(1, "P", &["b"]));
        assert!(!m.holds(1, "P", &["a"]));
        assert_eq!(m.signature().get("Q"), Some(&2));
    }

    #[test]
    fn round_trip_is_stable() {
        let text = write_model_file(&parse_model_file(SAMPLE).unwrap());
        assert_eq!(text, "worlds: 2\nedge: 0 1\ndomain: 0 a\ndomain: 1 a b\npred: Q 2\nfact: 1 P b\n");
        assert_eq!(write_model_file(&parse_model_file(&text).unwrap()), text);
    }

    #[test]
    fn build_order_does_not_matter() {
        let mut x = ModelBuilder::new(1);
        x.domain(0, ["c10", "c2"]).fact(0, "P", ["c10"]).fact(0, "P", ["c2"]);
        let mut y = ModelBuilder::new(1);
        y.domain(0, ["c2", "c10"]).fact(0, "P", ["c2"]).fact(0, "P", ["c10"]);
        let (x, y) = (write_model_file(&x.build()), write_model_file(&y.build()));
        assert_eq!(x, y);
        assert!(x.contains("domain: 0 c2 c10"));
    }

    #[test]
    fn rejects_invalid_models() {
        let shrinking = "worlds: 2\nedge: 0 1\ndomain: 0 a b\ndomain: 1 a\n";
        match parse_model_file(shrinking) {
            Err(ModelFileError::Invalid(v)) => {
                assert!(matches!(&v[0], Violation::Monotonicity { constant, .. } if constant == "b"))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_model_file("worlds: 1\ndomain: 0 a\nfact: 0 P b\n"), Err(ModelFileError::Invalid(_))));
        assert!(matches!(parse_model_file("worlds: 1\n"), Err(ModelFileError::Invalid(_))));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let cases = [
            ("edge: 0 1\n", 1),
            ("worlds: 1\nedge: 0 1\n", 2),
            ("worlds: 1\ndomain: 0 a\nbogus: 1\n", 3),
            ("worlds: x\n", 1),
            ("worlds: 1\ndomain: 0 a-b\n", 2),
        ];
        for (text, want) in cases {
            match parse_model_file(text) {
                Err(ModelFileError::Syntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert_eq!(parse_model_file("").unwrap_err().code(), "model-syntax");
    }
}
