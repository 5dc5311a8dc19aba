//! Models, interpretations and exact term evaluation over lassos.

use crate::lasso::{Lasso, LassoError};
use crate::lattice::{parse_table, FiniteLattice, LatticeError, MonotoneMap};
use crate::term::{Identity, Name, Quasiequation, Term};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("uninterpreted function symbol `{0}`")]
    UnknownFunctionSymbol(String),
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("interpretation file: {0}")]
    Syntax(String),
}

/// A lattice together with a monotone map per function symbol.
#[derive(Clone, Debug)]
pub struct Model {
    pub lattice: Arc<FiniteLattice>,
    pub funcs: BTreeMap<Name, MonotoneMap>,
}

impl Model {
    pub fn new(lattice: Arc<FiniteLattice>) -> Self {
        Model { lattice, funcs: BTreeMap::new() }
    }

    pub fn with_func(mut self, f: &str, map: MonotoneMap) -> Self {
        self.funcs.insert(f.into(), map);
        self
    }
}

/// A model plus a lasso for each variable.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub model: Model,
    pub vars: BTreeMap<Name, Lasso>,
}

impl Interpretation {
    pub fn new(model: Model) -> Self {
        Interpretation { model, vars: BTreeMap::new() }
    }

    pub fn with_var(mut self, v: &str, s: Lasso) -> Self {
        self.vars.insert(v.into(), s);
        self
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.model.lattice
    }

    /// `let a = <..>;` / `let F = table{..};` lines, relative to this model's lattice.
    pub fn from_text(lattice: Arc<FiniteLattice>, text: &str) -> Result<Interpretation, EvalError> {
        let mut interp = Interpretation::new(Model::new(lattice));
        interp.extend_from_text(text)?;
        Ok(interp)
    }

    pub fn extend_from_text(&mut self, text: &str) -> Result<(), EvalError> {
        for line in text.lines() {
            let code = line.split('#').next().unwrap_or("");
            for stmt in code.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                self.bind(stmt)?;
            }
        }
        Ok(())
    }

    /// One binding `a = <..>` or `F = table{..}`, with optional leading `let`.
    pub fn bind(&mut self, stmt: &str) -> Result<(), EvalError> {
        let stmt = stmt.trim();
        let stmt = stmt.strip_prefix("let ").unwrap_or(stmt);
        let (name, value) = stmt.split_once('=').ok_or_else(|| EvalError::Syntax(stmt.to_string()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            return Err(EvalError::Syntax(stmt.to_string()));
        }
        let lattice = self.model.lattice.clone();
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            self.model.funcs.insert(name.into(), parse_table(&lattice, value)?);
        } else {
            self.vars.insert(name.into(), Lasso::parse(&lattice, value)?);
        }
        Ok(())
    }
}

/// Evaluates `t` under `interp`, memoizing shared subterm nodes within the call.
pub fn eval(t: &Term, interp: &Interpretation) -> Result<Lasso, EvalError> {
    let mut memo = HashMap::new();
    eval_memo(t, interp, &mut memo)
}

fn eval_memo(t: &Term, interp: &Interpretation, memo: &mut HashMap<*const Term, Lasso>) -> Result<Lasso, EvalError> {
    let key = t as *const Term;
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let func = |f: &Name| {
        interp.model.funcs.get(f).ok_or_else(|| EvalError::UnknownFunctionSymbol(f.to_string()))
    };
    let v = match t {
        Term::Bot => Lasso::op_bot(interp.lattice()),
        Term::Top => Lasso::op_top(interp.lattice()),
        Term::Var(x) => interp
            .vars
            .get(x)
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))?
            .normalize(),
        Term::Join(a, b) => eval_memo(a, interp, memo)?.op_join(&eval_memo(b, interp, memo)?)?,
        Term::Meet(a, b) => eval_memo(a, interp, memo)?.op_meet(&eval_memo(b, interp, memo)?)?,
        Term::Head(a) => eval_memo(a, interp, memo)?.op_head(),
        Term::Shift(a) => eval_memo(a, interp, memo)?.op_shift(),
        Term::Majorum(a) => eval_memo(a, interp, memo)?.op_majorum(),
        Term::Minorum(a) => eval_memo(a, interp, memo)?.op_minorum(),
        Term::Apply(f, a) => {
            let map = func(f)?;
            eval_memo(a, interp, memo)?.op_apply(map)?
        }
        Term::Orbit(f, a) => {
            let map = func(f)?;
            eval_memo(a, interp, memo)?.op_orbit(map)?
        }
    };
    memo.insert(key, v.clone());
    Ok(v)
}

/// Evaluates both sides of the desugared identity and compares them.
pub fn satisfies_identity(id: &Identity, interp: &Interpretation) -> Result<bool, EvalError> {
    let d = id.desugar();
    let lhs = eval(&d.lhs, interp)?;
    let rhs = eval(&d.rhs, interp)?;
    Ok(lhs.eq_seq(&rhs)?)
}

/// Index of the first premise that fails, or `None` if all hold.
pub fn failing_premise(q: &Quasiequation, interp: &Interpretation) -> Result<Option<usize>, EvalError> {
    for (i, p) in q.premises.iter().enumerate() {
        if !satisfies_identity(p, interp)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// True iff some premise fails or the conclusion holds, under this one interpretation.
pub fn satisfies_quasieq(q: &Quasiequation, interp: &Interpretation) -> Result<bool, EvalError> {
    if failing_premise(q, interp)?.is_some() {
        return Ok(true);
    }
    satisfies_identity(&q.conclusion, interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, validate_monotone};
    use crate::term::{parse_identity, parse_quasiequation, parse_term};

    fn c3_inc() -> Interpretation {
        let c3 = build_lattice("C3").unwrap();
        let inc = validate_monotone(&c3, vec![1, 2, 2]).unwrap();
        Interpretation::new(Model::new(c3).with_func("F", inc))
    }

    #[test]
    fn eval_examples() {
        let i = c3_inc();
        let v = eval(&parse_term("dia F* bot").unwrap(), &i).unwrap();
        assert_eq!(v.render(), "<|2>");
        assert_eq!(eval(&Term::Bot, &i).unwrap().render(), "<|0>");
        let i = Interpretation::from_text(i.lattice().clone(), "let a = <2 | 0,1>;").unwrap();
        assert_eq!(eval(&parse_term("hd sh a").unwrap(), &i).unwrap().render(), "<|0>");
    }

    #[test]
    fn eval_errors() {
        let i = c3_inc();
        assert_eq!(eval(&parse_term("a").unwrap(), &i).unwrap_err(), EvalError::UnboundVariable("a".into()));
        assert_eq!(
            eval(&parse_term("G bot").unwrap(), &i).unwrap_err(),
            EvalError::UnknownFunctionSymbol("G".into())
        );
    }

    #[test]
    fn identity_examples() {
        let i = c3_inc();
        assert!(satisfies_identity(&parse_identity("F dia F* bot = dia F* bot").unwrap(), &i).unwrap());
        let i = i.with_var("a", Lasso::flat(&build_lattice("C3").unwrap(), 1));
        assert!(satisfies_identity(&parse_identity("a = a").unwrap(), &i).unwrap());

        let b2 = build_lattice("B2").unwrap();
        let mut j = Interpretation::new(Model::new(b2.clone()));
        j.extend_from_text("let F = table{bot->bot,a->bot,b->bot,top->top}; let a = <| a,b >;").unwrap();
        assert!(!satisfies_identity(&parse_identity("F dia a <= dia F a").unwrap(), &j).unwrap());
    }

    #[test]
    fn quasiequation_examples() {
        let c3 = build_lattice("C3").unwrap();
        let park = parse_quasiequation("assume F a <= a; show dia F* bot <= a;").unwrap();
        let i = c3_inc().with_var("a", Lasso::flat(&c3, 2));
        assert!(satisfies_quasieq(&park, &i).unwrap());
        let i = c3_inc().with_var("a", Lasso::flat(&c3, 0));
        assert_eq!(failing_premise(&park, &i).unwrap(), Some(0));
        assert!(satisfies_quasieq(&park, &i).unwrap());

        let dec = validate_monotone(&c3, vec![0, 0, 1]).unwrap();
        let i = Interpretation::new(Model::new(c3.clone()).with_func("F", dec)).with_var("a", Lasso::flat(&c3, 2));
        let q = parse_quasiequation("show a <= F a;").unwrap();
        assert!(!satisfies_quasieq(&q, &i).unwrap());
    }
}
