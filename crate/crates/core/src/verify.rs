//! Semantic checks over many models: exhaustive enumeration within bounds
//! and seeded random generation, run in parallel with deterministic
//! results.
//!
//! A passing sweep only means no model in the sweep refutes the formula.

use rayon::prelude::*;
use thiserror::Error;

use crate::fixpoint::{fixpoint_qk, FixpointError, FixpointTrace};
use crate::kripke::{
    enumerate_models, random_model, write_model_file, CompiledFormula, EnumBounds, EnumError, EvalError, GenError,
    KripkeModel, ModelGenSpec, Requirements, World,
};
use crate::report::Report;
use crate::syntax::{subst_prop, FixpointTarget, Formula, PredicateSignature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fixpoint(#[from] FixpointError),
}

impl VerifyError {
    pub fn code(&self) -> &'static str {
        match self {
            VerifyError::Enum(e) => e.code(),
            VerifyError::Gen(e) => e.code(),
            VerifyError::Eval(e) => e.code(),
            VerifyError::Fixpoint(e) => e.code(),
        }
    }
}

/// Where the models of a sweep come from.
#[derive(Clone, Debug)]
pub enum ModelSource {
    Exhaustive {
        bounds: EnumBounds,
        signature: PredicateSignature,
        require: Requirements,
    },
    /// `count` models drawn with seeds `spec.seed, spec.seed + 1, ...`.
    Random {
        spec: ModelGenSpec,
        count: usize,
    },
}

impl ModelSource {
    pub fn describe(&self) -> String {
        match self {
            ModelSource::Exhaustive { bounds, require, .. } => format!(
                "exhaustive worlds={}..={} max_domain={} {}",
                bounds.min_worlds,
                bounds.max_worlds,
                bounds.max_domain,
                describe_requirements(require)
            ),
            ModelSource::Random { spec, count } => format!(
                "random count={count} seed={} worlds={}..={} {}",
                spec.seed,
                spec.world_count.start(),
                spec.world_count.end(),
                describe_requirements(&spec.require)
            ),
        }
    }
}

fn describe_requirements(r: &Requirements) -> String {
    let mut parts = Vec::new();
    if r.transitive {
        parts.push("transitive".to_string());
    }
    if r.irreflexive {
        parts.push("irreflexive".to_string());
    }
    if let Some(h) = r.max_height {
        parts.push(format!("height<={h}"));
    }
    if parts.is_empty() {
        "any-frame".into()
    } else {
        parts.join(",")
    }
}

/// A refuting model: the `index`-th model of the sweep (for random sweeps,
/// the model drawn with seed `spec.seed + index`).
#[derive(Clone, Debug)]
pub struct Failure {
    pub index: usize,
    pub model: KripkeModel,
    pub world: World,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub source: String,
    pub checked: usize,
    pub failures: usize,
    /// The failure with the least index.
    pub first_failure: Option<Failure>,
}

impl Sweep {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn report(&self, prefix: &str) -> Report {
        let mut r = Report::new();
        r.push(format!("{prefix}.source"), &self.source)
            .push(format!("{prefix}.checked"), self.checked)
            .push(format!("{prefix}.failures"), self.failures);
        if let Some(f) = &self.first_failure {
            r.push(format!("{prefix}.counterexample.index"), f.index)
                .push(format!("{prefix}.counterexample.world"), f.world);
            for (i, line) in write_model_file(&f.model).lines().enumerate() {
                r.push(format!("{prefix}.counterexample.line.{i}"), line);
            }
        }
        r
    }
}

/// Runs `check` on every model of `source`; `check` returns a refuting
/// world, if any.
pub fn sweep<F>(source: &ModelSource, check: F) -> Result<Sweep, VerifyError>
where
    F: Fn(&KripkeModel) -> Result<Option<World>, EvalError> + Sync,
{
    let run = |index: usize, m: KripkeModel| -> Result<Option<Failure>, EvalError> {
        Ok(check(&m)?.map(|world| Failure { index, model: m, world }))
    };
    let results: Vec<Result<Option<Failure>, EvalError>> = match source {
        ModelSource::Exhaustive { bounds, signature, require } => {
            enumerate_models(*bounds, signature, *require)?.enumerate().par_bridge().map(|(i, m)| run(i, m)).collect()
        }
        ModelSource::Random { spec, count } => {
            // surface an unsatisfiable spec once, before fanning out
            random_model(spec)?;
            (0..*count)
                .into_par_iter()
                .map(|i| {
                    let m = random_model(&spec.clone().with_seed(spec.seed.wrapping_add(i as u64)))
                        .expect("spec checked above");
                    run(i, m)
                })
                .collect()
        }
    };
    let mut out = Sweep { source: source.describe(), checked: results.len(), failures: 0, first_failure: None };
    let mut error = None;
    for r in results {
        match r {
            Ok(Some(f)) => {
                out.failures += 1;
                if out.first_failure.as_ref().is_none_or(|g| f.index < g.index) {
                    out.first_failure = Some(f);
                }
            }
            Ok(None) => {}
            Err(e) => error = error.or(Some(e)),
        }
    }
    match error {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// Sweeps `source` for worlds where the universal closure of `f` fails.
pub fn sweep_validity(source: &ModelSource, f: &Formula) -> Result<Sweep, VerifyError> {
    let closed = CompiledFormula::new(&crate::syntax::universal_closure(f))?;
    sweep(source, |m| Ok(closed.truth_by_world(m)?.iter().position(|t| !t)))
}

/// Settings for [`verify_fixpoint`].
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// `None` skips the exhaustive part.
    pub exhaustive: Option<EnumBounds>,
    pub random: usize,
    pub seed: u64,
    /// Generator settings for the random part; the height bound and the
    /// signature are filled in from the target.
    pub generator: ModelGenSpec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            exhaustive: Some(EnumBounds::up_to(2, 1)),
            random: 100,
            seed: 0,
            generator: ModelGenSpec { world_count: 1..=5, ..ModelGenSpec::default() },
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixpointVerification {
    pub trace: FixpointTrace,
    /// `A_n ↔ A(A_n)`
    pub equation: Formula,
    pub seed: u64,
    pub exhaustive: Option<Sweep>,
    pub random: Option<Sweep>,
}

impl FixpointVerification {
    pub fn passed(&self) -> bool {
        self.exhaustive.iter().chain(&self.random).all(Sweep::passed)
    }

    pub fn report(&self) -> Report {
        let mut r = self.trace.report();
        r.push("equation", &self.equation).push("seed", self.seed);
        if let Some(s) = &self.exhaustive {
            r.extend(s.report("exhaustive"));
        }
        if let Some(s) = &self.random {
            r.extend(s.report("random"));
        }
        r.push("verdict", if self.passed() { "pass" } else { "fail" });
        r
    }
}

/// `A_n ↔ A(A_n)` for the target.
pub fn fixpoint_equation(t: &FixpointTarget, a_n: &Formula) -> Result<Formula, FixpointError> {
    Ok(Formula::iff(a_n.clone(), subst_prop(&t.formula, &t.hole, a_n)?))
}

/// Computes `A_n` and checks `A_n ↔ A(A_n)` on models of height at most
/// `n`, where `□^{n+1}⊥` holds everywhere.
pub fn verify_fixpoint(t: &FixpointTarget, n: usize, cfg: &VerifyConfig) -> Result<FixpointVerification, VerifyError> {
    let trace = fixpoint_qk(t, n)?;
    let equation = fixpoint_equation(t, &trace.result)?;
    let signature =
        PredicateSignature::of_formula(&t.formula).map_err(|e| VerifyError::Fixpoint(FixpointError::Syntax(e)))?;
    let require = Requirements::none().max_height(n);
    let exhaustive = match cfg.exhaustive {
        Some(bounds) => {
            Some(sweep_validity(&ModelSource::Exhaustive { bounds, signature: signature.clone(), require }, &equation)?)
        }
        None => None,
    };
    let random = if cfg.random > 0 {
        let spec = ModelGenSpec { signature, require, seed: cfg.seed, ..cfg.generator.clone() };
        Some(sweep_validity(&ModelSource::Random { spec, count: cfg.random }, &equation)?)
    } else {
        None
    };
    Ok(FixpointVerification { trace, equation, seed: cfg.seed, exhaustive, random })
}
