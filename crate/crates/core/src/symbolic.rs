//! Sparse multivariate polynomials over `Scalar` and a small constraint
//! solver: linear elimination plus branching on explicitly factored
//! equations. Anything outside that fragment is flagged, never guessed.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::Serialize;

use crate::scalar::Scalar;

/// Product of unknowns with exponents, sorted by name.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0.iter().find(|(v, _)| &**v == name).map_or(0, |(_, e)| *e)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(v, _)| &**v)
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut out: Vec<(Arc<str>, u32)> = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            let ord = match (self.0.get(i), o.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + o.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Removes `name` entirely, returning its exponent.
    fn split(&self, name: &str) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, x)| {
                if &**v == name {
                    e = *x;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }

    /// Divides by `name` once; `None` if it does not occur.
    fn divide_var(&self, name: &str) -> Option<Monomial> {
        let pos = self.0.iter().position(|(v, _)| &**v == name)?;
        let mut m = self.0.clone();
        if m[pos].1 == 1 {
            m.remove(pos);
        } else {
            m[pos].1 -= 1;
        }
        Some(Monomial(m))
    }
}

impl Ord for Monomial {
    /// Higher degree first, then by unknown names.
    fn cmp(&self, o: &Self) -> Ordering {
        o.degree().cmp(&self.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial with `Scalar` coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyExpr {
    terms: BTreeMap<Monomial, Scalar>,
}

impl PolyExpr {
    pub fn zero() -> Self {
        PolyExpr::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = PolyExpr::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = PolyExpr::zero();
        p.add_term(Monomial::var(name), Scalar::one());
        p
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut p = PolyExpr::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has no unknowns.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.vars().map(str::to_string)).collect()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.exponent(name) > 0)
    }

    pub fn scale(&self, c: &Scalar) -> PolyExpr {
        if c.is_zero() {
            return PolyExpr::zero();
        }
        PolyExpr { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Replaces `name` by `value` everywhere.
    pub fn substitute(&self, name: &str, value: &PolyExpr) -> PolyExpr {
        if !self.contains_var(name) {
            return self.clone();
        }
        let mut out = PolyExpr::zero();
        let mut powers: Vec<PolyExpr> = vec![PolyExpr::constant(Scalar::one())];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(name);
            if e == 0 {
                out.add_term(rest, c.clone());
                continue;
            }
            while powers.len() <= e as usize {
                let next = &powers[powers.len() - 1] * value;
                powers.push(next);
            }
            for (pm, pc) in &powers[e as usize].terms {
                out.add_term(rest.mul(pm), c * pc);
            }
        }
        out
    }

    /// Value at a full assignment; `None` if an unknown is missing.
    pub fn evaluate(&self, at: &HashMap<String, Scalar>) -> Option<Scalar> {
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (name, e) in &m.0 {
                let x = at.get(&**name)?;
                for _ in 0..*e {
                    v = &v * x;
                }
            }
            total += &v;
        }
        Some(total)
    }

    /// Writes the polynomial as `c*name + rest` when `name` occurs only in
    /// that degree-one term.
    pub fn linear_in(&self, name: &str) -> Option<(Scalar, PolyExpr)> {
        let mut coeff = None;
        let mut rest = PolyExpr::zero();
        for (m, c) in &self.terms {
            match m.exponent(name) {
                0 => rest.add_term(m.clone(), c.clone()),
                1 if m.0.len() == 1 => coeff = Some(c.clone()),
                _ => return None,
            }
        }
        coeff.map(|c| (c, rest))
    }

    /// True when `name` occurs only as the degree-one monomial `name`.
    fn only_linear(&self, name: &str) -> bool {
        self.terms.keys().all(|m| m.exponent(name) == 0 || (m.0.len() == 1 && m.0[0].1 == 1))
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> PolyExpr {
        match self.terms.values().next() {
            Some(c) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }

    /// Unknowns dividing every term.
    pub fn common_vars(&self) -> Vec<String> {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else { return Vec::new() };
        let mut cand: Vec<&str> = first.vars().collect();
        for m in iter {
            cand.retain(|v| m.exponent(v) > 0);
        }
        cand.into_iter().map(str::to_string).collect()
    }

    /// Exact division by a single unknown; `None` unless it divides every term.
    pub fn divide_var(&self, name: &str) -> Option<PolyExpr> {
        let mut out = PolyExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.divide_var(name)?, c.clone());
        }
        Some(out)
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_real() && c.re() < &num_rational::BigRational::from_integer(0.into()) {
                (true, -c.clone())
            } else {
                (false, c.clone())
            };
            let sign = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let cs = if mag.is_real() { mag.to_string() } else { format!("({mag})") };
            let body = if m.is_one() {
                cs
            } else if mag.is_one() {
                m.to_string()
            } else {
                format!("{cs}*{m}")
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PolyExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<Scalar> for PolyExpr {
    fn from(c: Scalar) -> Self {
        PolyExpr::constant(c)
    }
}

impl<'a> Add<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn add(self, o: &PolyExpr) -> PolyExpr {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn sub(self, o: &PolyExpr) -> PolyExpr {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn mul(self, o: &PolyExpr) -> PolyExpr {
        let mut out = PolyExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        self.scale(&Scalar::from_int(-1))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for PolyExpr {
            type Output = PolyExpr;
            fn $f(self, o: PolyExpr) -> PolyExpr {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Open,
    Solved,
    Infeasible,
    Branched,
}

/// One step of a proof log.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofStep {
    Eliminate { unknown: String, value: PolyExpr, source: String },
    Branch { equation: PolyExpr, source: String, case: String },
    Infeasible { equation: PolyExpr, source: String },
    /// A remaining equation that involves only frozen symbols.
    Deduce { fact: PolyExpr, source: String },
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::Eliminate { unknown, value, source } => write!(f, "eliminate {unknown} = {value}  [{source}]"),
            ProofStep::Branch { equation, source, case } => write!(f, "branch {equation} = 0 -> {case}  [{source}]"),
            ProofStep::Infeasible { equation, source } => write!(f, "infeasible {equation} = 0  [{source}]"),
            ProofStep::Deduce { fact, source } => write!(f, "deduce {fact} = 0  [{source}]"),
        }
    }
}

/// Polynomial equations `p = 0` over named unknowns, with the substitutions
/// made so far already applied to every stored equation.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    unknowns: Vec<String>,
    rank: HashMap<String, usize>,
    frozen: BTreeSet<String>,
    equations: Vec<PolyExpr>,
    sources: Vec<String>,
    substitutions: Vec<(String, PolyExpr)>,
    status: Status,
    /// Set when branching found no recognizable factored equation.
    pub flag: Option<String>,
    pub log: Vec<ProofStep>,
}

impl ConstraintSystem {
    /// `unknowns` fixes the elimination priority: earlier names are eliminated first.
    pub fn new(unknowns: Vec<String>) -> Self {
        let rank = unknowns.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
        ConstraintSystem {
            unknowns,
            rank,
            frozen: BTreeSet::new(),
            equations: Vec::new(),
            sources: Vec::new(),
            substitutions: Vec::new(),
            status: Status::Open,
            flag: None,
            log: Vec::new(),
        }
    }

    /// Unknowns sorted by name.
    pub fn with_sorted(mut unknowns: Vec<String>) -> Self {
        unknowns.sort();
        ConstraintSystem::new(unknowns)
    }

    /// Frozen symbols are never eliminated; equations left in them are deductions.
    pub fn freeze(&mut self, name: &str) {
        self.frozen.insert(name.to_string());
        if !self.rank.contains_key(name) {
            self.rank.insert(name.to_string(), self.unknowns.len());
            self.unknowns.push(name.to_string());
        }
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn equations(&self) -> &[PolyExpr] {
        &self.equations
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn substitutions(&self) -> &[(String, PolyExpr)] {
        &self.substitutions
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Adds `p = 0`, applying the substitutions made so far.
    pub fn add_equation(&mut self, p: PolyExpr, source: impl Into<String>) {
        let mut p = p;
        for (u, v) in &self.substitutions {
            p = p.substitute(u, v);
        }
        if !p.is_zero() {
            self.equations.push(p);
            self.sources.push(source.into());
            if self.status == Status::Solved {
                self.status = Status::Open;
            }
        }
    }

    /// Current value of an unknown in terms of the remaining free ones.
    pub fn value_of(&self, name: &str) -> PolyExpr {
        self.substitutions
            .iter()
            .find(|(u, _)| u == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| PolyExpr::var(name))
    }

    /// Unknowns not yet eliminated (frozen ones included).
    pub fn free_unknowns(&self) -> Vec<String> {
        let done: HashSet<&str> = self.substitutions.iter().map(|(u, _)| u.as_str()).collect();
        self.unknowns.iter().filter(|u| !done.contains(u.as_str())).cloned().collect()
    }

    /// Equations in frozen symbols only.
    pub fn deductions(&self) -> Vec<PolyExpr> {
        self.equations.iter().filter(|e| e.vars().iter().all(|v| self.frozen.contains(v))).cloned().collect()
    }

    fn rank_of(&self, v: &str) -> usize {
        self.rank.get(v).copied().unwrap_or(usize::MAX)
    }

    fn normalize(&mut self) {
        let mut seen = HashSet::new();
        let mut eqs = Vec::new();
        let mut srcs = Vec::new();
        for (e, s) in self.equations.drain(..).zip(self.sources.drain(..)) {
            if e.is_zero() {
                continue;
            }
            let m = e.monic();
            if seen.insert(m.clone()) {
                eqs.push(m);
                srcs.push(s);
            }
        }
        self.equations = eqs;
        self.sources = srcs;
    }

    fn refresh_status(&mut self) {
        if self.status == Status::Infeasible {
            return;
        }
        for (e, s) in self.equations.iter().zip(&self.sources) {
            if e.as_constant().is_some() {
                self.log.push(ProofStep::Infeasible { equation: e.clone(), source: s.clone() });
                self.status = Status::Infeasible;
                return;
            }
        }
        self.status = if self.equations.is_empty() { Status::Solved } else { Status::Open };
    }

    /// Eliminates unknowns occurring linearly with a constant coefficient
    /// until none is left, choosing the highest-priority unknown first and
    /// then the lowest equation index.
    pub fn linear_eliminate(&self) -> ConstraintSystem {
        let mut s = self.clone();
        if s.status == Status::Infeasible {
            return s;
        }
        s.normalize();
        let mut seen: HashSet<PolyExpr> = s.equations.iter().cloned().collect();
        loop {
            s.refresh_status();
            if s.status != Status::Open {
                return s;
            }
            let mut best: Option<(usize, usize, Arc<str>)> = None;
            for (k, e) in s.equations.iter().enumerate() {
                for m in e.terms.keys() {
                    let [(v, 1)] = m.0.as_slice() else { continue };
                    if s.frozen.contains(&**v) {
                        continue;
                    }
                    let r = s.rank_of(v);
                    if best.as_ref().is_some_and(|(br, bk, _)| (r, k) >= (*br, *bk)) {
                        continue;
                    }
                    if e.only_linear(v) {
                        best = Some((r, k, v.clone()));
                    }
                }
            }
            let Some((_, k, u)) = best else {
                return s;
            };
            let u = u.to_string();
            let (c, rest) = s.equations[k].linear_in(&u).expect("checked");
            let value = rest.scale(&-c.inv().expect("nonzero"));
            let source = s.sources.remove(k);
            seen.remove(&s.equations.remove(k));
            let mut i = 0;
            while i < s.equations.len() {
                if s.equations[i].contains_var(&u) {
                    let old = std::mem::take(&mut s.equations[i]);
                    seen.remove(&old);
                    let new = old.substitute(&u, &value).monic();
                    if new.is_zero() || !seen.insert(new.clone()) {
                        s.equations.remove(i);
                        s.sources.remove(i);
                        continue;
                    }
                    s.equations[i] = new;
                }
                i += 1;
            }
            for (_, v) in &mut s.substitutions {
                if v.contains_var(&u) {
                    *v = v.substitute(&u, &value);
                }
            }
            s.substitutions.push((u.clone(), value.clone()));
            s.log.push(ProofStep::Eliminate { unknown: u, value, source });
        }
    }

    fn recognize(&self) -> Option<(usize, Vec<PolyExpr>)> {
        let pick = |k: usize, e: &PolyExpr| -> Option<(usize, Vec<PolyExpr>)> {
            let vars: Vec<String> = e.vars().into_iter().filter(|v| !self.frozen.contains(v)).collect();
            if vars.is_empty() {
                return None;
            }
            if let Some(v) = e.common_vars().into_iter().find(|v| !self.frozen.contains(v)) {
                let q = e.divide_var(&v).expect("common factor");
                return Some((k, vec![PolyExpr::var(&v), q]));
            }
            if vars.len() == 1 && e.vars().len() == 1 && e.degree() == 2 {
                return quadratic_roots(e, &vars[0]).map(|(r1, r2)| {
                    let x = PolyExpr::var(&vars[0]);
                    let mut cases = vec![&x - &PolyExpr::constant(r1.clone())];
                    if r1 != r2 {
                        cases.push(&x - &PolyExpr::constant(r2));
                    }
                    (k, cases)
                });
            }
            if vars.len() == 2 && e.vars().len() == 2 && e.degree() == 2 {
                return bilinear_factors(e, &vars[0], &vars[1]).map(|(f, g)| (k, vec![f, g]));
            }
            None
        };
        // small equations first, then any factored one
        let mut order: Vec<usize> = (0..self.equations.len()).collect();
        order.sort_by_key(|&k| (self.equations[k].vars().len() > 2, k));
        order.into_iter().find_map(|k| pick(k, &self.equations[k]))
    }

    /// Splits on the first recognizable factored equation; each child sets
    /// one factor to zero and is re-eliminated. Without such an equation the
    /// system is returned unchanged and flagged.
    pub fn branch_on_factored(&self) -> Vec<ConstraintSystem> {
        let Some((k, factors)) = self.recognize() else {
            let mut s = self.clone();
            s.flag = Some("fragment-limit".into());
            return vec![s];
        };
        let eq = self.equations[k].clone();
        let source = self.sources[k].clone();
        let mut out = Vec::new();
        for f in factors {
            let mut child = self.clone();
            child.status = Status::Open;
            child.equations.remove(k);
            child.sources.remove(k);
            child.log.push(ProofStep::Branch { equation: eq.clone(), source: source.clone(), case: format!("{f} = 0") });
            child.add_equation(f, format!("case of {source}"));
            out.push(child.linear_eliminate());
        }
        out
    }

    /// Eliminates and branches to exhaustion; returns the leaves.
    pub fn solve(&self) -> Vec<ConstraintSystem> {
        let mut leaves = Vec::new();
        let mut stack = vec![self.linear_eliminate()];
        while let Some(s) = stack.pop() {
            if s.status != Status::Open || s.flag.is_some() {
                leaves.push(s);
                continue;
            }
            let only_frozen = s.equations.iter().all(|e| e.vars().iter().all(|v| s.frozen.contains(v)));
            if only_frozen {
                let mut s = s;
                for (e, src) in s.equations.clone().iter().zip(s.sources.clone()) {
                    s.log.push(ProofStep::Deduce { fact: e.clone(), source: src });
                }
                leaves.push(s);
                continue;
            }
            let children = s.branch_on_factored();
            if children.len() == 1 && children[0].flag.is_some() {
                leaves.push(children.into_iter().next().unwrap());
                continue;
            }
            // keep left-to-right order in the output
            for c in children.into_iter().rev() {
                stack.push(c);
            }
        }
        leaves
    }

    /// Checks a full assignment against the original equations by
    /// completing it through the substitution log.
    pub fn extend_assignment(&self, free: &HashMap<String, Scalar>) -> Option<HashMap<String, Scalar>> {
        let mut all = free.clone();
        for (u, v) in &self.substitutions {
            all.insert(u.clone(), v.evaluate(free)?);
        }
        Some(all)
    }

    pub fn log_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.log).expect("serializable log")
    }
}

/// Rational (Q(i)) roots of a univariate quadratic, if they exist.
fn quadratic_roots(e: &PolyExpr, v: &str) -> Option<(Scalar, Scalar)> {
    let mut c = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for (m, k) in e.terms() {
        c[m.exponent(v) as usize] = k.clone();
    }
    let [c0, c1, c2] = c;
    let two = Scalar::from_int(2);
    let disc = &(&c1 * &c1) - &(&Scalar::from_int(4) * &(&c2 * &c0));
    let r = disc.rational_sqrt()?;
    let den = &two * &c2;
    let r1 = &(&-c1.clone() + &r) / &den;
    let r2 = &(&-c1 - r) / &den;
    Some((r1, r2))
}

/// `k uv + p u + q v + r` with `k r = p q` factors as `(k u + q)(k v + p) / k`.
fn bilinear_factors(e: &PolyExpr, u: &str, v: &str) -> Option<(PolyExpr, PolyExpr)> {
    let (mut k, mut p, mut q, mut r) = (Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero());
    for (m, c) in e.terms() {
        match (m.exponent(u), m.exponent(v)) {
            (1, 1) => k = c.clone(),
            (1, 0) => p = c.clone(),
            (0, 1) => q = c.clone(),
            (0, 0) => r = c.clone(),
            _ => return None,
        }
    }
    if k.is_zero() || &k * &r != &p * &q {
        return None;
    }
    let f = &PolyExpr::var(u).scale(&k) + &PolyExpr::constant(q);
    let g = &PolyExpr::var(v).scale(&k) + &PolyExpr::constant(p);
    Some((f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::s;

    fn x() -> PolyExpr {
        PolyExpr::var("x")
    }

    fn c(v: i64) -> PolyExpr {
        PolyExpr::constant(s(v))
    }

    #[test]
    fn ring_basics() {
        let p = (x() + c(1)) * (x() - c(1));
        assert_eq!(p, &(&x() * &x()) - &c(1));
        assert_eq!(p.to_string(), "x^2 - 1");
        assert_eq!(p.substitute("x", &c(2)).as_constant(), Some(s(3)));
    }

    #[test]
    fn elimination() {
        let mut sys = ConstraintSystem::with_sorted(vec!["x".into(), "y".into()]);
        sys.add_equation(x() + PolyExpr::var("y") - c(1), "a");
        sys.add_equation(x() - PolyExpr::var("y") - c(1), "b");
        let out = sys.linear_eliminate();
        assert_eq!(out.status(), Status::Solved);
        assert_eq!(out.value_of("x").as_constant(), Some(s(1)));
        assert_eq!(out.value_of("y").as_constant(), Some(s(0)));

        let mut sys = ConstraintSystem::with_sorted(vec!["x".into()]);
        sys.add_equation(x() + c(1), "a");
        sys.add_equation(x() - c(1), "b");
        assert_eq!(sys.linear_eliminate().status(), Status::Infeasible);
    }

    #[test]
    fn factored_branching() {
        let mut sys = ConstraintSystem::with_sorted(vec!["u".into()]);
        let u = PolyExpr::var("u");
        sys.add_equation(&u * &(&c(1) + &u), "q");
        let kids = sys.branch_on_factored();
        let vals: Vec<Scalar> = kids.iter().map(|k| k.value_of("u").as_constant().unwrap()).collect();
        assert_eq!(vals, vec![s(0), s(-1)]);

        // (u - 2)(v + 3) expanded
        let mut sys = ConstraintSystem::with_sorted(vec!["u".into(), "v".into()]);
        let v = PolyExpr::var("v");
        sys.add_equation((&u - &c(2)) * (&v + &c(3)), "b");
        let leaves = sys.solve();
        assert_eq!(leaves.len(), 2);
        assert!(leaves.iter().all(|l| l.status() == Status::Solved));

        // no rational roots: flagged, not guessed
        let mut sys = ConstraintSystem::with_sorted(vec!["u".into()]);
        sys.add_equation(&(&u * &u) - &c(2), "irr");
        let out = sys.branch_on_factored();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].flag.as_deref(), Some("fragment-limit"));
    }

    #[test]
    fn frozen_symbols_become_deductions() {
        let mut sys = ConstraintSystem::with_sorted(vec!["c".into()]);
        sys.freeze("par_alpha");
        let a = PolyExpr::var("par_alpha");
        sys.add_equation(&PolyExpr::var("c") + &a, "first");
        sys.add_equation(&PolyExpr::var("c") - &a, "second");
        let leaves = sys.solve();
        assert_eq!(leaves[0].deductions(), vec![a.clone()]);
        assert!(leaves[0].log.iter().any(|st| matches!(st, ProofStep::Deduce { .. })));
    }
}
