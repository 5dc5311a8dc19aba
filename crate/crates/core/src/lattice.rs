//! Finite bounded lattices, monotone endomaps and direct fixed-point iteration.
//!
//! Elements are dense ids `0..size`. Every lattice is validated on
//! construction, so a `FiniteLattice` value always satisfies the bounded
//! lattice laws.

use rand::Rng;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Dense element id.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("not a lattice: elements {0} and {1} have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("map is not monotone: {0} <= {1} but images are not ordered")]
    NotMonotone(String, String),
    #[error("seed {0} is not postfixed (a <= f(a) fails)")]
    NotPostfixed(String),
    #[error("seed {0} is not prefixed (f(a) <= a fails)")]
    NotPrefixed(String),
    #[error("table has {got} entries, lattice has {want} elements")]
    TableNotTotal { got: usize, want: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
}

/// An explicit finite bounded lattice with precomputed order and operation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    name: String,
    names: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    bot: Elem,
    top: Elem,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteLattice({})", self.name)
    }
}

impl FiniteLattice {
    /// Builds a lattice from a partial order given as a predicate.
    ///
    /// Meets and joins are computed as greatest lower / least upper bounds by
    /// brute force; a pair without one yields `NotALattice`.
    pub fn from_order(
        name: impl Into<String>,
        names: Vec<String>,
        leq: impl Fn(Elem, Elem) -> bool,
    ) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::InvalidSpec("empty carrier".into()));
        }
        let mut table = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                table[x * n + y] = leq(x, y);
            }
        }
        let le = |x: Elem, y: Elem| table[x * n + y];
        for x in 0..n {
            if !le(x, x) {
                return Err(LatticeError::InvalidSpec(format!("order not reflexive at {}", names[x])));
            }
            for y in 0..n {
                if x != y && le(x, y) && le(y, x) {
                    return Err(LatticeError::InvalidSpec(format!(
                        "order not antisymmetric at {}, {}",
                        names[x], names[y]
                    )));
                }
                for z in 0..n {
                    if le(x, y) && le(y, z) && !le(x, z) {
                        return Err(LatticeError::InvalidSpec(format!(
                            "order not transitive at {}, {}, {}",
                            names[x], names[y], names[z]
                        )));
                    }
                }
            }
        }
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let lower: Vec<Elem> = (0..n).filter(|&z| le(z, x) && le(z, y)).collect();
                let glb = lower.iter().copied().find(|&g| lower.iter().all(|&z| le(z, g)));
                let upper: Vec<Elem> = (0..n).filter(|&z| le(x, z) && le(y, z)).collect();
                let lub = upper.iter().copied().find(|&l| upper.iter().all(|&z| le(l, z)));
                match (glb, lub) {
                    (Some(g), Some(l)) => {
                        meet[x * n + y] = g;
                        join[x * n + y] = l;
                    }
                    (None, _) => {
                        return Err(LatticeError::NotALattice(names[x].clone(), names[y].clone(), "meet"))
                    }
                    (_, None) => {
                        return Err(LatticeError::NotALattice(names[x].clone(), names[y].clone(), "join"))
                    }
                }
            }
        }
        let bot = (0..n).find(|&b| (0..n).all(|x| le(b, x)));
        let top = (0..n).find(|&t| (0..n).all(|x| le(x, t)));
        let (bot, top) = match (bot, top) {
            (Some(b), Some(t)) => (b, t),
            _ => return Err(LatticeError::InvalidSpec("order is not bounded".into())),
        };
        Ok(FiniteLattice { name: name.into(), names, leq: table, meet, join, bot, top })
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::InvalidSpec("chain of length 0".into()));
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        Self::from_order(format!("C{n}"), names, |x, y| x <= y)
    }

    /// The boolean lattice of subsets of a `k`-element set, ids are bitmasks.
    pub fn boolean(k: usize) -> Result<Self, LatticeError> {
        if k > 6 {
            return Err(LatticeError::InvalidSpec(format!("B{k} is too large")));
        }
        let full = (1usize << k) - 1;
        let names = (0..=full)
            .map(|m| {
                if m == 0 {
                    "bot".to_string()
                } else if m == full {
                    "top".to_string()
                } else {
                    (0..k).filter(|i| m >> i & 1 == 1).map(|i| (b'a' + i as u8) as char).collect()
                }
            })
            .collect();
        Self::from_order(format!("B{k}"), names, |x, y| x & y == x)
    }

    /// The diamond `M3`: three pairwise incomparable atoms.
    pub fn diamond() -> Self {
        let names = ["bot", "a", "b", "c", "top"].map(String::from).to_vec();
        Self::from_order("M3", names, |x, y| x == y || x == 0 || y == 4).expect("M3 is a lattice")
    }

    /// The pentagon `N5`: `bot < a < b < top` and `bot < c < top`.
    pub fn pentagon() -> Self {
        let names = ["bot", "a", "b", "c", "top"].map(String::from).to_vec();
        Self::from_order("N5", names, |x, y| x == y || x == 0 || y == 4 || (x == 1 && y == 2))
            .expect("N5 is a lattice")
    }

    /// Cartesian product ordered componentwise; id of `(x, y)` is `x * |b| + y`.
    pub fn product(a: &FiniteLattice, b: &FiniteLattice) -> Self {
        let m = b.size();
        let mut names = Vec::with_capacity(a.size() * m);
        for x in 0..a.size() {
            for y in 0..m {
                names.push(format!("({},{})", a.names[x], b.names[y]));
            }
        }
        Self::from_order(format!("product({},{})", a.name, b.name), names, |p, q| {
            a.leq(p / m, q / m) && b.leq(p % m, q % m)
        })
        .expect("product of lattices is a lattice")
    }

    /// Closes `seed` (subsets of `{1..k}`, as bitmasks) under intersection
    /// together with the full set; ordered by inclusion.
    pub fn closure(k: usize, seed: &[u64]) -> Result<Self, LatticeError> {
        if k == 0 || k > 6 {
            return Err(LatticeError::InvalidSpec(format!("closure over B{k} unsupported")));
        }
        let full: u64 = (1 << k) - 1;
        let mut sets: Vec<u64> = vec![full];
        for &s in seed {
            if s & !full != 0 {
                return Err(LatticeError::InvalidSpec(format!("seed set exceeds B{k}")));
            }
            sets.push(s);
        }
        loop {
            let mut added = false;
            let snapshot = sets.clone();
            for &x in &snapshot {
                for &y in &snapshot {
                    if !sets.contains(&(x & y)) {
                        sets.push(x & y);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        sets.sort_by_key(|&s| (s.count_ones(), s));
        sets.dedup();
        let names = sets
            .iter()
            .map(|&s| {
                let items: Vec<String> = (0..k).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        let seed_text: Vec<String> = seed.iter().map(|s| format!("{s:#b}")).collect();
        Self::from_order(format!("closure(B{k};{})", seed_text.join(",")), names, |x, y| {
            sets[x] & sets[y] == sets[x]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x * self.size() + y]
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.size() + y]
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.size() + y]
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.bot, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn element_name(&self, x: Elem) -> &str {
        &self.names[x]
    }

    pub fn element_id(&self, name: &str) -> Result<Elem, LatticeError> {
        let name = name.trim();
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(i);
        }
        match name {
            "⊥" | "bot" => Ok(self.bot),
            "⊤" | "top" => Ok(self.top),
            _ => Err(LatticeError::UnknownElement(name.to_string())),
        }
    }

    /// Exhaustively checks the lattice laws; used by tests as an independent audit
    /// of the tables computed in [`FiniteLattice::from_order`].
    pub fn check_laws(&self) -> Result<(), String> {
        let els: Vec<Elem> = self.elements().collect();
        for &x in &els {
            if !self.leq(self.bot, x) || !self.leq(x, self.top) {
                return Err(format!("bounds fail at {x}"));
            }
            if self.join(x, x) != x || self.meet(x, x) != x {
                return Err(format!("idempotence fails at {x}"));
            }
            for &y in &els {
                if self.join(x, y) != self.join(y, x) || self.meet(x, y) != self.meet(y, x) {
                    return Err(format!("commutativity fails at {x},{y}"));
                }
                if self.join(x, self.meet(x, y)) != x || self.meet(x, self.join(x, y)) != x {
                    return Err(format!("absorption fails at {x},{y}"));
                }
                if self.leq(x, y) != (self.join(x, y) == y) {
                    return Err(format!("order/join mismatch at {x},{y}"));
                }
                for &z in &els {
                    if self.join(x, self.join(y, z)) != self.join(self.join(x, y), z)
                        || self.meet(x, self.meet(y, z)) != self.meet(self.meet(x, y), z)
                    {
                        return Err(format!("associativity fails at {x},{y},{z}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses the lattice text format: `C3`, `B2`, `M3`, `N5`,
/// `product(C3,B2)`, `closure(B3; {1},{1,2})`, optionally prefixed by `lattice`.
pub fn build_lattice(spec: &str) -> Result<Arc<FiniteLattice>, LatticeError> {
    let s = spec.trim();
    let s = s.strip_prefix("lattice").map(str::trim_start).unwrap_or(s);
    parse_lattice(s).map(Arc::new)
}

fn parse_lattice(s: &str) -> Result<FiniteLattice, LatticeError> {
    let s = s.trim();
    let bad = || LatticeError::InvalidSpec(s.to_string());
    if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
        let parts = split_top_level(inner, ',');
        if parts.len() != 2 {
            return Err(bad());
        }
        let a = parse_lattice(parts[0])?;
        let b = parse_lattice(parts[1])?;
        return Ok(FiniteLattice::product(&a, &b));
    }
    if let Some(inner) = s.strip_prefix("closure(").and_then(|r| r.strip_suffix(')')) {
        let (base, seeds) = inner.split_once(';').ok_or_else(bad)?;
        let k: usize = base.trim().strip_prefix('B').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
        let mut masks = Vec::new();
        for set in split_top_level(seeds, ',') {
            let set = set.trim();
            if set.is_empty() {
                continue;
            }
            if set == "∅" {
                masks.push(0);
                continue;
            }
            let body = set.strip_prefix('{').and_then(|r| r.strip_suffix('}')).ok_or_else(bad)?;
            let mut mask = 0u64;
            for item in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let i: usize = item.parse().map_err(|_| bad())?;
                if i == 0 || i > k {
                    return Err(bad());
                }
                mask |= 1 << (i - 1);
            }
            masks.push(mask);
        }
        return FiniteLattice::closure(k, &masks);
    }
    match s {
        "M3" => return Ok(FiniteLattice::diamond()),
        "N5" => return Ok(FiniteLattice::pentagon()),
        _ => {}
    }
    if let Some(n) = s.strip_prefix('C').and_then(|d| d.parse::<usize>().ok()) {
        if (2..=6).contains(&n) {
            return FiniteLattice::chain(n);
        }
    }
    if let Some(k) = s.strip_prefix('B').and_then(|d| d.parse::<usize>().ok()) {
        if (1..=3).contains(&k) {
            return FiniteLattice::boolean(k);
        }
    }
    Err(bad())
}

/// Splits on `sep` at bracket depth zero (`()`, `{}`, `<>`).
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// The lattice pool used for sampling: every named catalogue entry plus a few
/// products and a closure lattice.
pub fn catalogue() -> Vec<Arc<FiniteLattice>> {
    [
        "C2",
        "C3",
        "C4",
        "C5",
        "C6",
        "B1",
        "B2",
        "B3",
        "M3",
        "N5",
        "product(C2,C3)",
        "product(C3,B2)",
        "product(N5,C2)",
        "closure(B3; {1},{1,2},{2,3})",
    ]
    .iter()
    .map(|s| build_lattice(s).expect("catalogue entries are valid"))
    .collect()
}

/// A validated monotone endomap of a lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    lattice: Arc<FiniteLattice>,
    table: Vec<Elem>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Checks monotonicity exhaustively, reporting the first violating pair in id order.
pub fn validate_monotone(lattice: &Arc<FiniteLattice>, table: Vec<Elem>) -> Result<MonotoneMap, LatticeError> {
    let n = lattice.size();
    if table.len() != n {
        return Err(LatticeError::TableNotTotal { got: table.len(), want: n });
    }
    if let Some(&bad) = table.iter().find(|&&v| v >= n) {
        return Err(LatticeError::UnknownElement(bad.to_string()));
    }
    for x in 0..n {
        for y in 0..n {
            if lattice.leq(x, y) && !lattice.leq(table[x], table[y]) {
                return Err(LatticeError::NotMonotone(
                    lattice.element_name(x).to_string(),
                    lattice.element_name(y).to_string(),
                ));
            }
        }
    }
    Ok(MonotoneMap { lattice: lattice.clone(), table })
}

impl MonotoneMap {
    pub fn identity(lattice: &Arc<FiniteLattice>) -> Self {
        MonotoneMap { lattice: lattice.clone(), table: lattice.elements().collect() }
    }

    pub fn constant(lattice: &Arc<FiniteLattice>, c: Elem) -> Self {
        MonotoneMap { lattice: lattice.clone(), table: vec![c; lattice.size()] }
    }

    /// Turns an arbitrary table into a monotone one via `x ↦ ⊔{raw(y) | y ≤ x}`.
    pub fn repair(lattice: &Arc<FiniteLattice>, raw: &[Elem]) -> Self {
        let table = lattice
            .elements()
            .map(|x| lattice.join_all(lattice.elements().filter(|&y| lattice.leq(y, x)).map(|y| raw[y])))
            .collect();
        MonotoneMap { lattice: lattice.clone(), table }
    }

    /// A random monotone map: uniform raw table, then [`MonotoneMap::repair`].
    pub fn random(lattice: &Arc<FiniteLattice>, rng: &mut impl Rng) -> Self {
        let raw: Vec<Elem> = (0..lattice.size()).map(|_| rng.gen_range(0..lattice.size())).collect();
        Self::repair(lattice, &raw)
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x]
    }

    /// `table{0->1,1->2,2->2}` using element names.
    pub fn render(&self) -> String {
        let entries: Vec<String> = self
            .lattice
            .elements()
            .map(|x| format!("{}->{}", self.lattice.element_name(x), self.lattice.element_name(self.table[x])))
            .collect();
        format!("table{{{}}}", entries.join(","))
    }

    /// First pair `(x, y)` with `f(x ⊔ y) ≠ f(x) ⊔ f(y)`; `None` means `f`
    /// preserves all nonempty (hence all countable nonempty) joins.
    pub fn join_preservation_witness(&self) -> Option<(Elem, Elem)> {
        let l = &self.lattice;
        for x in l.elements() {
            for y in l.elements() {
                if self.apply(l.join(x, y)) != l.join(self.apply(x), self.apply(y)) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Dual of [`MonotoneMap::join_preservation_witness`].
    pub fn meet_preservation_witness(&self) -> Option<(Elem, Elem)> {
        let l = &self.lattice;
        for x in l.elements() {
            for y in l.elements() {
                if self.apply(l.meet(x, y)) != l.meet(self.apply(x), self.apply(y)) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Countable continuity: preservation of joins of nonempty countable sets.
    pub fn is_countably_continuous(&self) -> bool {
        self.join_preservation_witness().is_none()
    }

    pub fn is_countably_cocontinuous(&self) -> bool {
        self.meet_preservation_witness().is_none()
    }

    /// ω-continuity: `f(sup C) = sup f(C)` for every ascending chain `C`.
    ///
    /// On a finite lattice a chain's supremum is its largest member, so it
    /// suffices to check comparable pairs.
    pub fn is_omega_continuous(&self) -> bool {
        let l = &self.lattice;
        l.elements().all(|x| {
            l.elements()
                .filter(|&y| l.leq(x, y))
                .all(|y| self.apply(y) == l.join(self.apply(x), self.apply(y)))
        })
    }

    pub fn is_omega_cocontinuous(&self) -> bool {
        let l = &self.lattice;
        l.elements().all(|x| {
            l.elements()
                .filter(|&y| l.leq(x, y))
                .all(|y| self.apply(x) == l.meet(self.apply(x), self.apply(y)))
        })
    }

    /// All fixed points, by scan.
    pub fn fixed_points(&self) -> Vec<Elem> {
        self.lattice.elements().filter(|&x| self.apply(x) == x).collect()
    }

    /// Least fixed point above a postfixed point, by iteration from `a`.
    pub fn lfp_above(&self, a: Elem) -> Result<Elem, LatticeError> {
        if !self.lattice.leq(a, self.apply(a)) {
            return Err(LatticeError::NotPostfixed(self.lattice.element_name(a).to_string()));
        }
        let mut x = a;
        loop {
            let next = self.apply(x);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
    }

    /// Greatest fixed point below a prefixed point, by iteration from `a`.
    pub fn gfp_below(&self, a: Elem) -> Result<Elem, LatticeError> {
        if !self.lattice.leq(self.apply(a), a) {
            return Err(LatticeError::NotPrefixed(self.lattice.element_name(a).to_string()));
        }
        let mut x = a;
        loop {
            let next = self.apply(x);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
    }
}

/// Parses `table{0->1,1->2,2->2}` (or a bare `{...}`) against `lattice`.
pub fn parse_table(lattice: &Arc<FiniteLattice>, text: &str) -> Result<MonotoneMap, LatticeError> {
    let t = text.trim();
    let t = t.strip_prefix("table").unwrap_or(t).trim();
    let body = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| LatticeError::InvalidSpec(text.to_string()))?;
    let mut table: Vec<Option<Elem>> = vec![None; lattice.size()];
    for entry in split_top_level(body, ',') {
        if entry.trim().is_empty() {
            continue;
        }
        let (from, to) = entry
            .split_once("->")
            .or_else(|| entry.split_once('↦'))
            .ok_or_else(|| LatticeError::InvalidSpec(entry.to_string()))?;
        table[lattice.element_id(from)?] = Some(lattice.element_id(to)?);
    }
    let got = table.iter().filter(|e| e.is_some()).count();
    if got != lattice.size() {
        return Err(LatticeError::TableNotTotal { got, want: lattice.size() });
    }
    validate_monotone(lattice, table.into_iter().map(Option::unwrap).collect())
}
