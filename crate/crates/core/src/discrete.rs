//! The discrete fragment: terms built from variables with `hd` and `sh` only.
//!
//! Provability in plain equational logic from homogeneous premises is decided
//! by reachability in a proof graph over `variables × [0..=bound]`. An
//! independent bounded proof search (forward saturation by proof height over
//! a finite term universe) serves as the oracle the graph procedure is
//! compared against, and also handles extra axioms such as the four
//! head/shift quasiequations returned by [`theta_axioms`].

use crate::term::{parse_quasiequation, Identity, Name, Quasiequation, Rel, Term};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscreteError {
    #[error("`{0}` is not a term over hd and sh")]
    NotDiscrete(String),
    #[error("`{0}` is not a homogeneous identity")]
    NotHomogeneous(String),
    #[error("query degree {degree} exceeds bound {bound}")]
    BoundTooSmall { degree: usize, bound: usize },
    #[error("oracle depth must be at least 1")]
    ZeroDepth,
    #[error("axiom `{0}` has more than three variables")]
    TooManyVariables(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Provable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Provable => "provable",
            Verdict::Unknown => "unknown",
        })
    }
}

/// `(x, n, y, k)`: an identity between `sh^n x` and `sh^k y`, or between their heads.
pub type Link = (Name, usize, Name, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Shift,
    Head,
}

/// Splits `sh^n x` / `hd sh^n x`.
fn homogeneous_side(t: &Term) -> Option<(LinkKind, Name, usize)> {
    let (kind, mut t) = match t {
        Term::Head(inner) => (LinkKind::Head, &**inner),
        other => (LinkKind::Shift, other),
    };
    let mut n = 0;
    loop {
        match t {
            Term::Shift(inner) => {
                n += 1;
                t = inner;
            }
            Term::Var(x) => return Some((kind, x.clone(), n)),
            _ => return None,
        }
    }
}

/// Reads a homogeneous identity.
pub fn homogeneous_link(id: &Identity) -> Result<(LinkKind, Link), DiscreteError> {
    let err = || DiscreteError::NotHomogeneous(id.to_string());
    if id.rel != Rel::Eq {
        return Err(err());
    }
    let (k1, x, n) = homogeneous_side(&id.lhs).ok_or_else(err)?;
    let (k2, y, k) = homogeneous_side(&id.rhs).ok_or_else(err)?;
    if k1 != k2 {
        return Err(err());
    }
    Ok((k1, (x, n, y, k)))
}

fn link_identity(kind: LinkKind, (x, n, y, k): &Link) -> Identity {
    let side = |v: &Name, d: usize| {
        let t = Term::shift_n(Term::Var(v.clone()), d);
        match kind {
            LinkKind::Shift => t,
            LinkKind::Head => Term::head(t),
        }
    };
    Identity::eq(side(x, *n), side(y, *k))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomogeneousPremises {
    pub shift_ids: Vec<Link>,
    pub head_ids: Vec<Link>,
}

impl HomogeneousPremises {
    pub fn from_identities(ids: &[Identity]) -> Result<Self, DiscreteError> {
        let mut p = HomogeneousPremises::default();
        for id in ids {
            match homogeneous_link(id)? {
                (LinkKind::Shift, l) => p.shift_ids.push(l),
                (LinkKind::Head, l) => p.head_ids.push(l),
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.shift_ids.len() + self.head_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn identities(&self) -> Vec<Identity> {
        let shifts = self.shift_ids.iter().map(|l| link_identity(LinkKind::Shift, l));
        shifts.chain(self.head_ids.iter().map(|l| link_identity(LinkKind::Head, l))).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.shift_ids.iter().chain(&self.head_ids).map(|l| l.1.max(l.3)).max().unwrap_or(0)
    }

    fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (x, _, y, _) in self.shift_ids.iter().chain(&self.head_ids) {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        out
    }
}

/// `maxdeg(P) + maxdeg(query) + |P|·(maxdeg(P) + 1)`.
pub fn default_bound(p: &HomogeneousPremises, n: usize, k: usize) -> usize {
    let m = p.max_degree();
    m + n.max(k) + p.len() * (m + 1)
}

/// Nodes `(variable, index)` for indices `0..=bound`; strong edges from shift
/// premises (closed under index shift within the bound), weak edges from head
/// premises at their own indices.
#[derive(Debug, Clone)]
pub struct ProofGraph {
    pub vars: Vec<Name>,
    pub bound: usize,
    pub strong: Vec<((Name, usize), (Name, usize))>,
    pub weak: Vec<((Name, usize), (Name, usize))>,
}

impl ProofGraph {
    pub fn new(p: &HomogeneousPremises, extra_vars: &[Name], bound: usize) -> ProofGraph {
        let mut vars = p.vars();
        vars.extend(extra_vars.iter().cloned());
        let mut strong = Vec::new();
        for (x, n, y, k) in &p.shift_ids {
            for j in 0..=bound {
                if n + j <= bound && k + j <= bound {
                    strong.push(((x.clone(), n + j), (y.clone(), k + j)));
                }
            }
        }
        let weak = p
            .head_ids
            .iter()
            .filter(|(_, n, _, k)| *n <= bound && *k <= bound)
            .map(|(x, n, y, k)| ((x.clone(), *n), (y.clone(), *k)))
            .collect();
        ProofGraph { vars: vars.into_iter().collect(), bound, strong, weak }
    }

    fn node(&self, (v, d): &(Name, usize)) -> usize {
        let i = self.vars.iter().position(|w| w == v).expect("graph contains the variable");
        i * (self.bound + 1) + d
    }

    /// Whether `to` is reachable from `from`, optionally also along weak edges.
    pub fn connected(&self, from: &(Name, usize), to: &(Name, usize), use_weak: bool) -> bool {
        let size = self.vars.len() * (self.bound + 1);
        let mut adj = vec![Vec::new(); size];
        let edges = self.strong.iter().chain(if use_weak { &self.weak[..] } else { &[] });
        for (a, b) in edges {
            let (a, b) = (self.node(a), self.node(b));
            adj[a].push(b);
            adj[b].push(a);
        }
        let (s, t) = (self.node(from), self.node(to));
        let mut seen = vec![false; size];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            if u == t {
                return true;
            }
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }
}

fn decide(p: &HomogeneousPremises, x: &Name, n: usize, y: &Name, k: usize, bound: usize, use_weak: bool) -> Result<Verdict, DiscreteError> {
    let degree = n.max(k);
    if degree > bound {
        return Err(DiscreteError::BoundTooSmall { degree, bound });
    }
    let g = ProofGraph::new(p, &[x.clone(), y.clone()], bound);
    Ok(if g.connected(&(x.clone(), n), &(y.clone(), k), use_weak) { Verdict::Provable } else { Verdict::Unknown })
}

/// `sh^n x = sh^k y` from `p`: a strong path within the bound.
pub fn decide_shift(p: &HomogeneousPremises, x: &Name, n: usize, y: &Name, k: usize, bound: usize) -> Result<Verdict, DiscreteError> {
    decide(p, x, n, y, k, bound, false)
}

/// `hd sh^n x = hd sh^k y` from `p`: any path within the bound.
pub fn decide_head(p: &HomogeneousPremises, x: &Name, n: usize, y: &Name, k: usize, bound: usize) -> Result<Verdict, DiscreteError> {
    decide(p, x, n, y, k, bound, true)
}

/// Decides a homogeneous goal with the default bound (or `bound`).
pub fn decide_identity(p: &HomogeneousPremises, goal: &Identity, bound: Option<usize>) -> Result<Verdict, DiscreteError> {
    let (kind, (x, n, y, k)) = homogeneous_link(goal)?;
    let bound = bound.unwrap_or_else(|| default_bound(p, n, k));
    match kind {
        LinkKind::Shift => decide_shift(p, &x, n, &y, k, bound),
        LinkKind::Head => decide_head(p, &x, n, &y, k, bound),
    }
}

// ---------------------------------------------------------------------------
// Oracle: bounded forward proof search

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Hd,
    Sh,
}

/// A discrete term: operations (outermost first) applied to a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DTerm {
    var: Name,
    word: Vec<Op>,
}

fn dterm(t: &Term) -> Result<DTerm, DiscreteError> {
    let mut word = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Head(inner) => {
                word.push(Op::Hd);
                cur = inner;
            }
            Term::Shift(inner) => {
                word.push(Op::Sh);
                cur = inner;
            }
            Term::Var(v) => return Ok(DTerm { var: v.clone(), word }),
            _ => return Err(DiscreteError::NotDiscrete(t.to_string())),
        }
    }
}

/// Which terms the oracle may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Universe {
    /// `sh^k x` and `hd sh^k x` for `k ≤ K`. Complete for plain equational
    /// logic on homogeneous goals: no rule removes an outer operation, so
    /// terms with operations above `hd` never connect back to the goal.
    Homogeneous(usize),
    /// Every word over `hd`/`sh` of length at most `L`.
    Words(usize),
}

/// One quasiequation compiled against the universe: premises and conclusion
/// as `(lhs, rhs)` pattern terms over at most three schematic variables.
struct Axiom {
    vars: Vec<Name>,
    premises: Vec<(DTerm, DTerm)>,
    conclusion: (DTerm, DTerm),
}

/// Forward saturation: level `d` holds every identity with a derivation of
/// height at most `d` whose terms all lie in the universe. Leaves (height 1)
/// are reflexivity, premises and premise-free axiom instances; each further
/// level closes under symmetry, transitivity, congruence and axioms whose
/// premises are already present.
pub struct Saturation {
    terms: Vec<DTerm>,
    index: HashMap<DTerm, usize>,
    wrap: [Vec<Option<usize>>; 2],
    rows: Vec<Vec<u64>>,
    axioms: Vec<Axiom>,
    depth: usize,
    /// Height at which each pair first appeared (0 = not yet).
    first: Vec<u16>,
}

impl Saturation {
    pub fn new(vars: &BTreeSet<Name>, universe: Universe, premises: &[Identity], axioms: &[Quasiequation]) -> Result<Saturation, DiscreteError> {
        let mut words: Vec<Vec<Op>> = vec![Vec::new()];
        match universe {
            Universe::Homogeneous(k) => {
                for d in 1..=k {
                    words.push(vec![Op::Sh; d]);
                }
                for d in 0..=k {
                    let mut w = vec![Op::Hd];
                    w.extend(vec![Op::Sh; d]);
                    words.push(w);
                }
            }
            Universe::Words(l) => {
                let mut layer = vec![Vec::new()];
                for _ in 0..l {
                    layer = layer
                        .iter()
                        .flat_map(|w: &Vec<Op>| {
                            [Op::Hd, Op::Sh].into_iter().map(move |op| {
                                let mut v = vec![op];
                                v.extend(w.iter().copied());
                                v
                            })
                        })
                        .collect();
                    words.extend(layer.iter().cloned());
                }
            }
        }
        let mut terms = Vec::new();
        for v in vars {
            for w in &words {
                terms.push(DTerm { var: v.clone(), word: w.clone() });
            }
        }
        let index: HashMap<DTerm, usize> = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let wrap_with = |op: Op| -> Vec<Option<usize>> {
            terms
                .iter()
                .map(|t| {
                    let mut w = vec![op];
                    w.extend(t.word.iter().copied());
                    index.get(&DTerm { var: t.var.clone(), word: w }).copied()
                })
                .collect()
        };
        let wrap = [wrap_with(Op::Hd), wrap_with(Op::Sh)];
        let n = terms.len();
        let mut compiled = Vec::new();
        for q in axioms {
            let vars: Vec<Name> = q.free_vars().into_iter().collect();
            if vars.len() > 3 {
                return Err(DiscreteError::TooManyVariables(q.to_string()));
            }
            let side = |id: &Identity| -> Result<(DTerm, DTerm), DiscreteError> { Ok((dterm(&id.lhs)?, dterm(&id.rhs)?)) };
            compiled.push(Axiom {
                vars,
                premises: q.premises.iter().map(side).collect::<Result<_, _>>()?,
                conclusion: side(&q.conclusion)?,
            });
        }
        let mut sat = Saturation {
            terms,
            index,
            wrap,
            rows: vec![vec![0; n.div_ceil(64)]; n],
            axioms: compiled,
            depth: 0,
            first: vec![0; n * n],
        };
        // Height 1: reflexivity, premises, premise-free axiom instances.
        let mut leaves: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        for p in premises {
            if p.rel != Rel::Eq {
                return Err(DiscreteError::NotHomogeneous(p.to_string()));
            }
            if let (Some(a), Some(b)) = (sat.lookup(&dterm(&p.lhs)?), sat.lookup(&dterm(&p.rhs)?)) {
                leaves.push((a, b));
            }
        }
        leaves.extend(sat.axiom_instances(true));
        sat.depth = 1;
        for (a, b) in leaves {
            sat.add(a, b);
        }
        Ok(sat)
    }

    fn lookup(&self, t: &DTerm) -> Option<usize> {
        self.index.get(t).copied()
    }

    fn has(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] >> (b % 64) & 1 == 1
    }

    fn add(&mut self, a: usize, b: usize) -> bool {
        if self.has(a, b) {
            return false;
        }
        self.rows[a][b / 64] |= 1 << (b % 64);
        let n = self.terms.len();
        self.first[a * n + b] = self.depth as u16;
        true
    }

    /// Instances of axioms without premises (`leaves`) or with all premises
    /// present (`!leaves`), over every assignment of universe terms.
    fn axiom_instances(&self, leaves: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let n = self.terms.len();
        for ax in &self.axioms {
            if ax.premises.is_empty() != leaves {
                continue;
            }
            let k = ax.vars.len();
            let total = n.pow(k as u32);
            for code in 0..total {
                let mut assign = Vec::with_capacity(k);
                let mut c = code;
                for _ in 0..k {
                    assign.push(c % n);
                    c /= n;
                }
                let inst = |t: &DTerm| -> Option<usize> {
                    let pos = ax.vars.iter().position(|v| *v == t.var)?;
                    t.word.iter().rev().try_fold(assign[pos], |i, op| self.wrap[*op as usize][i])
                };
                let ok = ax.premises.iter().all(|(l, r)| matches!((inst(l), inst(r)), (Some(a), Some(b)) if self.has(a, b)));
                if !ok {
                    continue;
                }
                if let (Some(a), Some(b)) = (inst(&ax.conclusion.0), inst(&ax.conclusion.1)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Extends the saturation by one proof-height level; false if nothing changed.
    pub fn step(&mut self) -> bool {
        let n = self.terms.len();
        let mut new = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.has(a, b) {
                    continue;
                }
                new.push((b, a));
                for w in &self.wrap {
                    if let (Some(x), Some(y)) = (w[a], w[b]) {
                        new.push((x, y));
                    }
                }
            }
        }
        // Transitivity: row(a) ∪= row(b) for every b in row(a), against the old relation.
        let old = self.rows.clone();
        self.depth += 1;
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if old[a][b / 64] >> (b % 64) & 1 == 1 {
                    for (i, word) in old[b].iter().enumerate() {
                        let fresh = word & !self.rows[a][i];
                        if fresh != 0 {
                            changed = true;
                            self.rows[a][i] |= fresh;
                            let mut bits = fresh;
                            while bits != 0 {
                                let c = i * 64 + bits.trailing_zeros() as usize;
                                self.first[a * n + c] = self.depth as u16;
                                bits &= bits - 1;
                            }
                        }
                    }
                }
            }
        }
        let mut axioms = Vec::new();
        if self.axioms.iter().any(|a| !a.premises.is_empty()) {
            // Premises are matched against the previous level.
            let saved = std::mem::replace(&mut self.rows, old);
            axioms = self.axiom_instances(false);
            self.rows = saved;
        }
        for (a, b) in new.into_iter().chain(axioms) {
            changed |= self.add(a, b);
        }
        changed
    }

    /// Saturates up to `depth` levels (stops early at a fixpoint).
    pub fn run(&mut self, depth: usize) {
        while self.depth < depth && self.step() {}
        self.depth = self.depth.max(depth);
    }

    /// The smallest height at which `goal` was derived, if it was.
    pub fn provable_at(&self, goal: &Identity) -> Option<usize> {
        let a = self.lookup(&dterm(&goal.lhs).ok()?)?;
        let b = self.lookup(&dterm(&goal.rhs).ok()?)?;
        let n = self.terms.len();
        self.has(a, b).then(|| self.first[a * n + b] as usize)
    }

    pub fn universe_size(&self) -> usize {
        self.terms.len()
    }
}

/// Oracle verdict with the height of the shortest derivation found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Provable { depth: usize },
    Unknown,
}

impl OracleVerdict {
    pub fn verdict(self) -> Verdict {
        match self {
            OracleVerdict::Provable { .. } => Verdict::Provable,
            OracleVerdict::Unknown => Verdict::Unknown,
        }
    }
}

fn max_word(ids: &[&Identity]) -> usize {
    ids.iter()
        .flat_map(|id| [&id.lhs, &id.rhs])
        .map(|t| dterm(t).map(|d| d.word.len()).unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Bounded proof search for `premises ⟹ goal` from equational logic plus
/// `axioms`. Without axioms the homogeneous universe up to `max index + 1 +
/// depth` is used; with axioms, all words one longer than the longest in the
/// problem.
pub fn proof_search_oracle(premises: &[Identity], goal: &Identity, depth: usize, axioms: &[Quasiequation]) -> Result<OracleVerdict, DiscreteError> {
    if depth == 0 {
        return Err(DiscreteError::ZeroDepth);
    }
    let mut vars = goal.free_vars();
    let mut all: Vec<&Identity> = vec![goal];
    for p in premises {
        vars.extend(p.free_vars());
        all.push(p);
    }
    for t in all.iter().flat_map(|id| [&id.lhs, &id.rhs]) {
        dterm(t)?;
    }
    let longest = max_word(&all);
    let universe = if axioms.is_empty() { Universe::Homogeneous(longest + depth) } else { Universe::Words(longest + 1) };
    let mut sat = Saturation::new(&vars, universe, premises, axioms)?;
    sat.run(depth);
    Ok(match sat.provable_at(goal) {
        Some(d) => OracleVerdict::Provable { depth: d },
        None => OracleVerdict::Unknown,
    })
}

/// The four valid head/shift quasiequations:
/// `hd x = hd hd x`, `sh hd x = hd x`, `x = hd y ⟹ hd x = hd y`, `x = hd y ⟹ sh x = x`.
pub fn theta_axioms() -> Vec<Quasiequation> {
    ["show hd x = hd hd x", "show sh hd x = hd x", "assume x = hd y; show hd x = hd y", "assume x = hd y; show sh x = x"]
        .iter()
        .map(|s| parse_quasiequation(s).expect("fixed axiom parses"))
        .collect()
}

/// `sh^n a = a` and `hd sh^i a = hd sh^(i+1) a` for `i < n` imply `sh a = a`:
/// a sequence with period `n` whose first `n + 1` entries agree is flat.
pub fn flatness_quasieq(n: usize) -> Quasiequation {
    let a = Term::var("a");
    let mut premises = vec![Identity::eq(Term::shift_n(a.clone(), n), a.clone())];
    for i in 0..n {
        premises.push(Identity::eq(Term::head(Term::shift_n(a.clone(), i)), Term::head(Term::shift_n(a.clone(), i + 1))));
    }
    Quasiequation::new(premises, Identity::eq(Term::shift(a.clone()), a))
}
