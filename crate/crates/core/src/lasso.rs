//! Eventually periodic sequences over a finite lattice.
//!
//! A [`Lasso`] stores a finite prefix followed by a nonempty period that
//! repeats forever. All ten operations of the sequence algebra are closed on
//! this representation, and every operation returns a normalized lasso.
//!
//! Comparison window: for lassos `s`, `t` with prefix lengths `p`, `q` and
//! period lengths `m`, `k`, both sequences are periodic with period
//! `lcm(m, k)` from index `max(p, q)` on. Any pointwise predicate therefore
//! holds everywhere iff it holds on the first `max(p, q) + lcm(m, k)` indices.

use crate::lattice::{split_top_level, Elem, FiniteLattice, LatticeError, MonotoneMap};
use num_integer::Integer;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Default bound on the period length produced by any operation.
pub const DEFAULT_PERIOD_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("operands live in different lattices ({0} vs {1})")]
    LatticeMismatch(String, String),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("period length {len} exceeds cap {cap}")]
    PeriodCap { len: usize, cap: usize },
    #[error("bad lasso literal `{0}`")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone)]
pub struct Lasso {
    lattice: Arc<FiniteLattice>,
    prefix: Vec<Elem>,
    period: Vec<Elem>,
}

impl fmt::Debug for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Pointwise equality over the comparison window. Panics on lattice mismatch;
/// use [`Lasso::eq_seq`] for the fallible version.
impl PartialEq for Lasso {
    fn eq(&self, other: &Self) -> bool {
        self.eq_seq(other).expect("compared lassos over different lattices")
    }
}

impl Eq for Lasso {}

fn same_lattice(a: &Arc<FiniteLattice>, b: &Arc<FiniteLattice>) -> Result<(), LassoError> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(LassoError::LatticeMismatch(a.name().to_string(), b.name().to_string()))
    }
}

impl Lasso {
    /// Builds a lasso as given (not normalized).
    pub fn new(lattice: &Arc<FiniteLattice>, prefix: Vec<Elem>, period: Vec<Elem>) -> Result<Self, LassoError> {
        if period.is_empty() {
            return Err(LassoError::EmptyPeriod);
        }
        if let Some(&bad) = prefix.iter().chain(&period).find(|&&x| x >= lattice.size()) {
            return Err(LatticeError::UnknownElement(bad.to_string()).into());
        }
        Ok(Lasso { lattice: lattice.clone(), prefix, period })
    }

    /// The constant sequence `x, x, x, ...`.
    pub fn flat(lattice: &Arc<FiniteLattice>, x: Elem) -> Self {
        Lasso { lattice: lattice.clone(), prefix: Vec::new(), period: vec![x] }
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn prefix(&self) -> &[Elem] {
        &self.prefix
    }

    pub fn period(&self) -> &[Elem] {
        &self.period
    }

    /// The element at index `n`.
    #[inline]
    pub fn at(&self, n: usize) -> Elem {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.period[(n - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `n` elements.
    pub fn unroll(&self, n: usize) -> Vec<Elem> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// `Some(x)` if the sequence is constantly `x`.
    pub fn flat_value(&self) -> Option<Elem> {
        let first = self.at(0);
        self.prefix.iter().chain(&self.period).all(|&x| x == first).then_some(first)
    }

    /// Canonical form: primitive period and shortest prefix.
    pub fn normalize(&self) -> Lasso {
        let mut period = self.period.clone();
        let len = period.len();
        if let Some(d) = (1..=len).find(|d| len.is_multiple_of(*d) && (0..len).all(|i| period[i] == period[i % d])) {
            period.truncate(d);
        }
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Lasso { lattice: self.lattice.clone(), prefix, period }
    }

    pub fn is_canonical(&self) -> bool {
        let n = self.normalize();
        n.prefix.len() == self.prefix.len() && n.period.len() == self.period.len()
    }

    /// Number of aligned indices that decide any pointwise predicate on `self`
    /// and `other`. Past both prefixes the pair `(self(i), other(i))` repeats
    /// with the lcm of the two periods, so these indices already show every
    /// pair that ever occurs.
    pub fn window(&self, other: &Lasso) -> usize {
        self.prefix.len().max(other.prefix.len()) + self.period.len().lcm(&other.period.len())
    }

    fn all_pointwise(&self, other: &Lasso, pred: impl Fn(Elem, Elem) -> bool) -> Result<bool, LassoError> {
        same_lattice(&self.lattice, &other.lattice)?;
        Ok((0..self.window(other)).all(|i| pred(self.at(i), other.at(i))))
    }

    pub fn eq_seq(&self, other: &Lasso) -> Result<bool, LassoError> {
        self.all_pointwise(other, |x, y| x == y)
    }

    pub fn leq_seq(&self, other: &Lasso) -> Result<bool, LassoError> {
        let l = self.lattice.clone();
        self.all_pointwise(other, |x, y| l.leq(x, y))
    }

    pub fn op_bot(lattice: &Arc<FiniteLattice>) -> Lasso {
        Lasso::flat(lattice, lattice.bot())
    }

    pub fn op_top(lattice: &Arc<FiniteLattice>) -> Lasso {
        Lasso::flat(lattice, lattice.top())
    }

    fn zip_with(&self, other: &Lasso, op: impl Fn(Elem, Elem) -> Elem) -> Result<Lasso, LassoError> {
        same_lattice(&self.lattice, &other.lattice)?;
        let p = self.prefix.len().max(other.prefix.len());
        let l = self.period.len().lcm(&other.period.len());
        let prefix = (0..p).map(|i| op(self.at(i), other.at(i))).collect();
        let period = (p..p + l).map(|i| op(self.at(i), other.at(i))).collect();
        Ok(Lasso { lattice: self.lattice.clone(), prefix, period }.normalize())
    }

    pub fn op_join(&self, other: &Lasso) -> Result<Lasso, LassoError> {
        let l = self.lattice.clone();
        self.zip_with(other, |x, y| l.join(x, y))
    }

    pub fn op_meet(&self, other: &Lasso) -> Result<Lasso, LassoError> {
        let l = self.lattice.clone();
        self.zip_with(other, |x, y| l.meet(x, y))
    }

    /// Flat repetition of index 0.
    pub fn op_head(&self) -> Lasso {
        Lasso::flat(&self.lattice, self.at(0))
    }

    /// Drops index 0.
    pub fn op_shift(&self) -> Lasso {
        let mut s = self.clone();
        if s.prefix.is_empty() {
            s.period.rotate_left(1);
        } else {
            s.prefix.remove(0);
        }
        s.normalize()
    }

    fn tail_fold(&self, op: impl Fn(Elem, Elem) -> Elem, unit: Elem) -> Lasso {
        let tail = self.period.iter().fold(unit, |acc, &x| op(acc, x));
        let mut prefix = vec![tail; self.prefix.len()];
        let mut acc = tail;
        for i in (0..self.prefix.len()).rev() {
            acc = op(self.prefix[i], acc);
            prefix[i] = acc;
        }
        Lasso { lattice: self.lattice.clone(), prefix, period: vec![tail] }.normalize()
    }

    /// Tail supremum: index `n` carries `sup_{k ≥ n} s(k)`.
    pub fn op_majorum(&self) -> Lasso {
        let l = self.lattice.clone();
        self.tail_fold(|x, y| l.join(x, y), l.bot())
    }

    /// Tail infimum: index `n` carries `inf_{k ≥ n} s(k)`.
    pub fn op_minorum(&self) -> Lasso {
        let l = self.lattice.clone();
        self.tail_fold(|x, y| l.meet(x, y), l.top())
    }

    /// Pointwise application of `f`.
    pub fn op_apply(&self, f: &MonotoneMap) -> Result<Lasso, LassoError> {
        same_lattice(&self.lattice, f.lattice())?;
        let s = Lasso {
            lattice: self.lattice.clone(),
            prefix: self.prefix.iter().map(|&x| f.apply(x)).collect(),
            period: self.period.iter().map(|&x| f.apply(x)).collect(),
        };
        Ok(s.normalize())
    }

    /// Orbit with the default period cap.
    pub fn op_orbit(&self, f: &MonotoneMap) -> Result<Lasso, LassoError> {
        self.op_orbit_capped(f, DEFAULT_PERIOD_CAP)
    }

    /// Index `n` carries `fⁿ(s(n))`.
    pub fn op_orbit_capped(&self, f: &MonotoneMap, cap: usize) -> Result<Lasso, LassoError> {
        same_lattice(&self.lattice, f.lattice())?;
        let (pre, per) = power_cycle(f);
        let p = pre.max(self.prefix.len());
        let l = per.lcm(&self.period.len());
        if l > cap {
            return Err(LassoError::PeriodCap { len: l, cap });
        }
        let mut power: Vec<Elem> = self.lattice.elements().collect();
        let mut values = Vec::with_capacity(p + l);
        for n in 0..p + l {
            values.push(power[self.at(n)]);
            for x in power.iter_mut() {
                *x = f.apply(*x);
            }
        }
        let period = values.split_off(p);
        Ok(Lasso { lattice: self.lattice.clone(), prefix: values, period }.normalize())
    }

    /// The set of values the sequence takes.
    pub fn head_set(&self) -> BTreeSet<Elem> {
        self.prefix.iter().chain(&self.period).copied().collect()
    }

    /// `<p0,p1|q0,q1>` with element names.
    pub fn render(&self) -> String {
        let names = |xs: &[Elem]| xs.iter().map(|&x| self.lattice.element_name(x)).collect::<Vec<_>>().join(",");
        format!("<{}|{}>", names(&self.prefix), names(&self.period))
    }

    /// Parses `<2 | 0,1>` or `<| a,b >` against `lattice`.
    pub fn parse(lattice: &Arc<FiniteLattice>, text: &str) -> Result<Lasso, LassoError> {
        let t = text.trim();
        let body = t
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| LassoError::Parse(text.to_string()))?;
        let (pre, per) = body.split_once('|').ok_or_else(|| LassoError::Parse(text.to_string()))?;
        let elems = |part: &str| -> Result<Vec<Elem>, LassoError> {
            split_top_level(part, ',')
                .into_iter()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| lattice.element_id(s).map_err(LassoError::from))
                .collect()
        };
        Lasso::new(lattice, elems(pre)?, elems(per)?)
    }
}

/// Preperiod and period of `n ↦ fⁿ` as a sequence of tables (Brent's algorithm).
pub fn power_cycle(f: &MonotoneMap) -> (usize, usize) {
    let step = |t: &Vec<Elem>| -> Vec<Elem> { t.iter().map(|&x| f.apply(x)).collect() };
    let id: Vec<Elem> = f.lattice().elements().collect();
    let mut power = 1;
    let mut lam = 1;
    let mut tortoise = id.clone();
    let mut hare = step(&id);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        lam += 1;
    }
    let mut tortoise = id.clone();
    let mut hare = id;
    for _ in 0..lam {
        hare = step(&hare);
    }
    let mut mu = 0;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        mu += 1;
    }
    (mu, lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, validate_monotone};

    fn c3() -> Arc<FiniteLattice> {
        build_lattice("C3").unwrap()
    }

    fn ls(lat: &Arc<FiniteLattice>, pre: &[Elem], per: &[Elem]) -> Lasso {
        Lasso::new(lat, pre.to_vec(), per.to_vec()).unwrap()
    }

    fn parts(s: &Lasso) -> (Vec<Elem>, Vec<Elem>) {
        (s.prefix().to_vec(), s.period().to_vec())
    }

    #[test]
    fn normalization_examples() {
        let l = c3();
        assert_eq!(parts(&ls(&l, &[], &[0, 0]).normalize()), (vec![], vec![0]));
        assert_eq!(parts(&ls(&l, &[2], &[0, 1]).normalize()), (vec![2], vec![0, 1]));
        assert_eq!(parts(&ls(&l, &[2], &[1, 2]).normalize()), (vec![], vec![2, 1]));
        // 1,1,2,1,2,...: the prefix entry does not align with the period.
        assert_eq!(parts(&ls(&l, &[1], &[1, 2]).normalize()), (vec![1], vec![1, 2]));
        assert_eq!(parts(&ls(&l, &[0, 1, 2], &[1, 2]).normalize()), (vec![0], vec![1, 2]));
    }

    #[test]
    fn comparison_examples() {
        let l = c3();
        assert!(!ls(&l, &[], &[0, 2]).eq_seq(&ls(&l, &[2], &[0, 2, 0])).unwrap());
        assert!(ls(&l, &[], &[0]).leq_seq(&ls(&l, &[], &[0, 2])).unwrap());
        let s = ls(&l, &[1], &[0, 2]);
        assert!(s.eq_seq(&s).unwrap());
        let b2 = build_lattice("B2").unwrap();
        assert!(matches!(s.eq_seq(&Lasso::op_bot(&b2)), Err(LassoError::LatticeMismatch(..))));
    }

    #[test]
    fn operation_examples() {
        let l = c3();
        assert_eq!(parts(&Lasso::op_bot(&l)), (vec![], vec![0]));
        assert_eq!(parts(&Lasso::op_top(&l)), (vec![], vec![2]));
        let s = ls(&l, &[], &[0, 2]);
        assert_eq!(parts(&s.op_join(&ls(&l, &[], &[1])).unwrap()), (vec![], vec![1, 2]));
        assert_eq!(s.op_join(&Lasso::op_bot(&l)).unwrap(), s);
        assert_eq!(s.op_meet(&s).unwrap(), s);
        assert_eq!(parts(&ls(&l, &[2], &[0, 1]).op_head()), (vec![], vec![2]));
        assert_eq!(parts(&ls(&l, &[], &[2, 0]).op_shift()), (vec![], vec![0, 2]));
        assert_eq!(parts(&ls(&l, &[2], &[0, 1]).op_shift()), (vec![], vec![0, 1]));
        assert_eq!(parts(&s.op_majorum()), (vec![], vec![2]));
        assert_eq!(parts(&s.op_minorum()), (vec![], vec![0]));
        assert_eq!(parts(&Lasso::flat(&l, 1).op_majorum()), (vec![], vec![1]));
        assert_eq!(parts(&ls(&l, &[2, 0, 1], &[0]).op_majorum()), (vec![2, 1, 1], vec![0]));
    }

    #[test]
    fn orbit_examples() {
        let l = c3();
        let inc = validate_monotone(&l, vec![1, 2, 2]).unwrap();
        assert_eq!(parts(&Lasso::flat(&l, 0).op_orbit(&inc).unwrap()), (vec![0, 1], vec![2]));
        let s = ls(&l, &[1], &[0, 2, 2]);
        assert_eq!(s.op_orbit(&MonotoneMap::identity(&l)).unwrap(), s);
        assert_eq!(parts(&ls(&l, &[], &[0, 2]).op_apply(&inc).unwrap()), (vec![], vec![1, 2]));
    }

    #[test]
    fn power_cycle_of_permutation() {
        let b2 = build_lattice("B2").unwrap();
        // Swapping the atoms is monotone and has order two.
        let swap = validate_monotone(&b2, vec![0, 2, 1, 3]).unwrap();
        assert_eq!(power_cycle(&swap), (0, 2));
        let l = c3();
        assert_eq!(power_cycle(&validate_monotone(&l, vec![1, 2, 2]).unwrap()), (2, 1));
        let s = ls(&b2, &[], &[1]);
        // fⁿ(a) alternates a, b.
        assert_eq!(parts(&s.op_orbit(&swap).unwrap()), (vec![], vec![1, 2]));
    }

    #[test]
    fn period_cap_enforced() {
        let b2 = build_lattice("B2").unwrap();
        let swap = validate_monotone(&b2, vec![0, 2, 1, 3]).unwrap();
        let s = ls(&b2, &[], &[1, 1, 2]);
        assert!(matches!(s.op_orbit_capped(&swap, 5), Err(LassoError::PeriodCap { len: 6, cap: 5 })));
    }

    #[test]
    fn head_set_examples() {
        let l = c3();
        assert_eq!(ls(&l, &[2], &[0, 1]).head_set(), [0, 1, 2].into());
        assert_eq!(Lasso::flat(&l, 1).head_set(), [1].into());
        assert_eq!(ls(&l, &[], &[0, 0, 2]).head_set(), [0, 2].into());
    }

    #[test]
    fn literal_round_trip() {
        let l = c3();
        let s = Lasso::parse(&l, "<2 | 0,1>").unwrap();
        assert_eq!(parts(&s), (vec![2], vec![0, 1]));
        assert_eq!(s.render(), "<2|0,1>");
        let b2 = build_lattice("B2").unwrap();
        let t = Lasso::parse(&b2, "<| a,b >").unwrap();
        assert_eq!(t.render(), "<|a,b>");
        let p = build_lattice("product(C2,B1)").unwrap();
        let u = Lasso::parse(&p, "<(0,bot)|(1,top),(0,top)>").unwrap();
        assert_eq!(Lasso::parse(&p, &u.render()).unwrap().render(), u.render());
        assert!(Lasso::parse(&l, "<1|>").is_err());
        assert!(Lasso::parse(&l, "<1|7>").is_err());
    }
}
