//! Named families of quasi-filiform Leibniz algebras and their solvable
//! extensions, with parameter/parity validation and the correspondence between
//! the classical names and the unified `L(a,b,g)` / `G(a,b,g)` families.
//!
//! Conventions: the nilradical occupies `e_1..e_n`; extension generators are
//! appended as `x = e_{n+1}` and `y = e_{n+2}`. `Lnr(n,r)` uses labels
//! `e0..e{n-1}` stored at indices `1..n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{is_lie, leibniz_check, StructureTensor};
use crate::error::{input, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{q, s, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    TypeI,
    TypeII,
    Unified,
    LieNilradical,
    SolvableLCodim2,
    SolvableGCodim1,
    SolvableGCodim2,
}

impl Group {
    pub fn solvable(self) -> bool {
        matches!(self, Group::SolvableLCodim2 | Group::SolvableGCodim1 | Group::SolvableGCodim2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Any,
    NOdd,
    /// `n` must be odd when `a = 1`.
    NOddIfAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NilShape {
    L,
    G,
    Lnr,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySpec {
    /// ASCII canonical name, e.g. `L1(beta)` or `Hc2_6`.
    pub name: &'static str,
    /// Lookup key: the name without its parameter list.
    pub key: &'static str,
    /// Typeset name as printed in the literature.
    pub printed: &'static str,
    pub group: Group,
    /// `dim = n + codim`.
    pub codim: usize,
    /// Canonical parameter letters among `a`, `b`, `g`, `r`.
    pub params: &'static [&'static str],
    pub domain: &'static str,
    pub parity: Parity,
    pub shape: NilShape,
}

/// Parameter assignment keyed by canonical letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params(pub BTreeMap<String, Scalar>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn with(mut self, k: &str, v: Scalar) -> Self {
        self.0.insert(canonical_param(k).unwrap_or(k).to_string(), v);
        self
    }

    pub fn abg(a: Scalar, b: Scalar, g: Scalar) -> Self {
        Params::new().with("a", a).with("b", b).with("g", g)
    }

    pub fn get(&self, k: &str) -> Option<&Scalar> {
        self.0.get(k)
    }

    /// Parses `name=value` with aliases `alpha/beta/gamma`.
    pub fn parse_assignment(&mut self, text: &str) -> Result<()> {
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("parameter `{text}` is not of the form name=value")))?;
        let key = canonical_param(k.trim()).ok_or_else(|| Error::Input(format!("unknown parameter name `{}`", k.trim())))?;
        let val: Scalar = v.trim().parse().map_err(|e| Error::Input(format!("parameter {key}: {e}")))?;
        self.0.insert(key.to_string(), val);
        Ok(())
    }

    fn int(&self, k: &str) -> Option<i64> {
        match self.0.get(k)?.as_i64_ratio()? {
            (v, 1) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn canonical_param(k: &str) -> Option<&'static str> {
    match k {
        "a" | "alpha" => Some("a"),
        "b" | "beta" => Some("b"),
        "g" | "gamma" => Some("g"),
        "r" => Some("r"),
        _ => None,
    }
}

macro_rules! spec {
    ($name:expr, $key:expr, $printed:expr, $group:ident, $codim:expr, [$($p:expr),*], $dom:expr, $par:ident, $shape:ident) => {
        FamilySpec {
            name: $name,
            key: $key,
            printed: $printed,
            group: Group::$group,
            codim: $codim,
            params: &[$($p),*],
            domain: $dom,
            parity: Parity::$par,
            shape: NilShape::$shape,
        }
    };
}

/// Every family in the registry, in a fixed order.
pub fn all_families() -> Vec<FamilySpec> {
    vec![
        spec!("L1(beta)", "L1", "L_n^{1,beta}", TypeI, 0, ["b"], "beta any", Any, L),
        spec!("L2(beta)", "L2", "L_n^{2,beta}", TypeI, 0, ["b"], "beta in {0,1}", Any, L),
        spec!("L3(beta)", "L3", "L_n^{3,beta}", TypeI, 0, ["b"], "beta in {-1,0,1}", Any, L),
        spec!("L4(gamma)", "L4", "L_n^{4,gamma}", TypeI, 0, ["g"], "gamma != 0", Any, L),
        spec!("L5(beta,gamma)", "L5", "L_n^{5,beta,gamma}", TypeI, 0, ["b", "g"], "(beta,gamma) in {(1,1),(2,4)}", Any, L),
        spec!("Ltype2_1", "Ltype2_1", "L_n^1", TypeII, 0, [], "no parameters", Any, G),
        spec!("Ltype2_2", "Ltype2_2", "L_n^2", TypeII, 0, [], "no parameters", Any, G),
        spec!("Ltype2_3", "Ltype2_3", "L_n^3", TypeII, 0, [], "no parameters", Any, G),
        spec!("Ltype2_4", "Ltype2_4", "L_n^4", TypeII, 0, [], "no parameters", Any, G),
        spec!("Ltype2_5", "Ltype2_5", "L_n^5", TypeII, 0, [], "n odd", NOdd, G),
        spec!("Ltype2_6(beta)", "Ltype2_6", "L_n^{6,beta}", TypeII, 0, ["b"], "beta in {1,2}, n odd", NOdd, G),
        spec!("Ltype2_7(gamma)", "Ltype2_7", "L_n^{7,gamma}", TypeII, 0, ["g"], "gamma != 0, n odd", NOdd, G),
        spec!("Ltype2_8(beta,gamma)", "Ltype2_8", "L_n^{8,beta,gamma}", TypeII, 0, ["b", "g"], "(beta,gamma) in {(-2,1),(2,1),(4,2)}, n odd", NOdd, G),
        spec!("L(a,b,g)", "L", "L(alpha,beta,gamma)", Unified, 0, ["a", "b", "g"], "alpha, beta, gamma any", Any, L),
        spec!("G(a,b,g)", "G", "G(alpha,beta,gamma)", Unified, 0, ["a", "b", "g"], "alpha in {0,1}; alpha = 0 when n is even", NOddIfAlpha, G),
        spec!("Lnr(n,r)", "Lnr", "Lie(n,r)", LieNilradical, 0, ["r"], "r odd, 3 <= r <= 2*floor((n-1)/2) - 1", Any, Lnr),
        spec!("R1(beta)", "R1", "R^1_{n+2}(0,beta,0)", SolvableLCodim2, 2, ["b"], "beta in {-1,0}", Any, L),
        spec!("R2", "R2", "R^2_{n+2}(0,1,1)", SolvableLCodim2, 2, [], "no parameters", Any, L),
        spec!("R3", "R3", "R^3_{n+2}(1,-1,0)", SolvableLCodim2, 2, [], "no parameters", Any, L),
        spec!("R4", "R4", "R^4_{n+2}(1,0,0)", SolvableLCodim2, 2, [], "no parameters", Any, L),
        spec!("Hc1_1", "Hc1_1", "H^1_{n+1}(0,0,1)", SolvableGCodim1, 1, [], "no parameters", Any, G),
        spec!("Hc1_2", "Hc1_2", "H^2_{n+1}(1,2,0)", SolvableGCodim1, 1, [], "n odd", NOdd, G),
        spec!("Hc1_3(gamma)", "Hc1_3", "H^3_{n+1}(1,0,gamma)", SolvableGCodim1, 1, ["g"], "gamma != 0, n odd", NOdd, G),
        spec!("Hc1_4", "Hc1_4", "H^4_{n+1}(1,-2,1)", SolvableGCodim1, 1, [], "n odd", NOdd, G),
        spec!("Hc1_5", "Hc1_5", "H^5_{n+1}(1,4,2)", SolvableGCodim1, 1, [], "n odd", NOdd, G),
        spec!("Hc2_1", "Hc2_1", "H^1_{n+2}(0,0,0)", SolvableGCodim2, 2, [], "no parameters", Any, G),
        spec!("Hc2_2", "Hc2_2", "H^2_{n+2}(0,1,0)", SolvableGCodim2, 2, [], "no parameters", Any, G),
        spec!("Hc2_3", "Hc2_3", "H^3_{n+2}(0,2,1)", SolvableGCodim2, 2, [], "no parameters", Any, G),
        spec!("Hc2_4", "Hc2_4", "H^4_{n+2}(1,0,0)", SolvableGCodim2, 2, [], "n odd", NOdd, G),
        spec!("Hc2_5", "Hc2_5", "H^5_{n+2}(1,1,0)", SolvableGCodim2, 2, [], "n odd", NOdd, G),
        spec!("Hc2_6", "Hc2_6", "H^6_{n+2}(1,2,1)", SolvableGCodim2, 2, [], "n odd", NOdd, G),
    ]
}

pub const MIN_N: usize = 5;

#[derive(Clone, Debug, Default)]
pub struct FamilyFilter {
    pub group: Option<Group>,
    pub solvable: Option<bool>,
    pub codim: Option<usize>,
    pub shape: Option<NilShape>,
}

pub fn list_families(filter: &FamilyFilter) -> Vec<FamilySpec> {
    all_families()
        .into_iter()
        .filter(|f| filter.group.map_or(true, |g| f.group == g))
        .filter(|f| filter.solvable.map_or(true, |s| f.group.solvable() == s))
        .filter(|f| filter.codim.map_or(true, |c| f.codim == c))
        .filter(|f| filter.shape.map_or(true, |s| f.shape == s))
        .collect()
}

/// A family reference parsed from text: `L(a,b,g)`, `L(1,0,2)`, `R1(-1)`, `Lnr(7,3)`, `Hc2_4`.
#[derive(Clone, Debug)]
pub struct FamilyRef {
    pub spec: FamilySpec,
    pub params: Params,
    pub n: Option<usize>,
}

fn key_of(text: &str) -> &str {
    text.split('(').next().unwrap_or(text).trim()
}

pub fn find_spec(text: &str) -> Result<FamilySpec> {
    let key = key_of(text);
    all_families().into_iter().find(|f| f.key == key).ok_or_else(|| {
        let names: Vec<&str> = all_families().iter().map(|f| f.name).collect();
        Error::Input(format!("unknown family `{text}`; valid names: {}", names.join(", ")))
    })
}

/// Parses a family name with optional positional values. Symbolic arguments
/// (`beta`, `a`, ...) are placeholders; numeric ones become parameters.
pub fn parse_family(text: &str) -> Result<FamilyRef> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let spec = find_spec(&text)?;
    let mut params = Params::new();
    let mut n = None;
    if let Some(open) = text.find('(') {
        let inner = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Input(format!("unbalanced parentheses in `{text}`")))?;
        let args: Vec<&str> = inner.split(',').collect();
        let slots: Vec<&str> = if spec.key == "Lnr" { vec!["n", "r"] } else { spec.params.to_vec() };
        if args.len() != slots.len() {
            return input(format!("`{text}` takes {} arguments", slots.len()));
        }
        for (slot, arg) in slots.iter().zip(args) {
            if canonical_param(arg).is_some() || arg == "n" {
                continue;
            }
            let v: Scalar = arg.parse().map_err(|e| Error::Input(format!("argument `{arg}` of `{text}`: {e}")))?;
            if *slot == "n" {
                n = Some(as_count(&v).ok_or_else(|| Error::Input(format!("n must be a positive integer, got {v}")))?);
            } else {
                params.0.insert(slot.to_string(), v);
            }
        }
    }
    Ok(FamilyRef { spec, params, n })
}

fn as_count(v: &Scalar) -> Option<usize> {
    match v.as_i64_ratio()? {
        (k, 1) if k > 0 => Some(k as usize),
        _ => None,
    }
}

fn is_one_of(v: &Scalar, set: &[Scalar]) -> bool {
    set.iter().any(|x| x == v)
}

fn need<'a>(spec: &FamilySpec, p: &'a Params, k: &str) -> Result<&'a Scalar> {
    p.get(k).ok_or_else(|| Error::Input(format!("{} needs parameter {k} ({})", spec.name, spec.domain)))
}

impl FamilySpec {
    pub fn dim(&self, n: usize) -> usize {
        n + self.codim
    }

    /// Rejects exactly the combinations outside the family's stated domain.
    pub fn validate(&self, n: usize, p: &Params) -> Result<()> {
        if n < MIN_N {
            return input(format!("{} needs n >= {MIN_N}", self.name));
        }
        for k in p.0.keys() {
            if !self.params.contains(&k.as_str()) {
                return input(format!("{} takes no parameter {k}", self.name));
            }
        }
        let bad = |why: &str| input::<()>(format!("{}: {why} (domain: {})", self.name, self.domain));
        if self.parity == Parity::NOdd && n % 2 == 0 {
            return bad("n must be odd");
        }
        match self.key {
            "L1" => {
                need(self, p, "b")?;
            }
            "L2" => {
                if !is_one_of(need(self, p, "b")?, &[s(0), s(1)]) {
                    return bad("beta outside {0,1}");
                }
            }
            "L3" => {
                if !is_one_of(need(self, p, "b")?, &[s(-1), s(0), s(1)]) {
                    return bad("beta outside {-1,0,1}");
                }
            }
            "L4" | "Ltype2_7" | "Hc1_3" => {
                if need(self, p, "g")?.is_zero() {
                    return bad("gamma must be nonzero");
                }
            }
            "L5" => {
                let bg = (need(self, p, "b")?.clone(), need(self, p, "g")?.clone());
                if ![(s(1), s(1)), (s(2), s(4))].contains(&bg) {
                    return bad("(beta,gamma) outside {(1,1),(2,4)}");
                }
            }
            "Ltype2_6" => {
                if !is_one_of(need(self, p, "b")?, &[s(1), s(2)]) {
                    return bad("beta outside {1,2}");
                }
            }
            "Ltype2_8" => {
                let bg = (need(self, p, "b")?.clone(), need(self, p, "g")?.clone());
                if ![(s(-2), s(1)), (s(2), s(1)), (s(4), s(2))].contains(&bg) {
                    return bad("(beta,gamma) outside {(-2,1),(2,1),(4,2)}");
                }
            }
            "L" => {
                for k in ["a", "b", "g"] {
                    need(self, p, k)?;
                }
            }
            "G" => {
                for k in ["a", "b", "g"] {
                    need(self, p, k)?;
                }
                let a = need(self, p, "a")?;
                if !is_one_of(a, &[s(0), s(1)]) {
                    return bad("alpha outside {0,1}");
                }
                if a.is_one() && n % 2 == 0 {
                    return bad("alpha = 1 needs n odd");
                }
            }
            "Lnr" => {
                let r = p.int("r").ok_or_else(|| Error::Input("Lnr needs an integer parameter r".into()))?;
                let top = 2 * ((n as i64 - 1) / 2) - 1;
                if r % 2 == 0 || r < 3 || r > top {
                    return bad(&format!("r = {r} not admissible for n = {n}"));
                }
            }
            "R1" => {
                if !is_one_of(need(self, p, "b")?, &[s(-1), s(0)]) {
                    return bad("beta outside {-1,0}");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `(shape, [a, b, g])` of the nilradical for L/G based families.
    pub fn nilradical_params(&self, p: &Params) -> Option<(NilShape, [Scalar; 3])> {
        let get = |k: &str| p.get(k).cloned().unwrap_or_default();
        let t = |a: i64, b: Scalar, g: Scalar| [s(a), b, g];
        let r = match self.key {
            "L1" => (NilShape::L, t(0, get("b"), s(0))),
            "L2" => (NilShape::L, t(0, get("b"), s(1))),
            "L3" => (NilShape::L, t(1, get("b"), s(0))),
            "L4" => (NilShape::L, t(1, s(0), get("g"))),
            "L5" => (NilShape::L, t(1, get("b"), get("g"))),
            "Ltype2_1" => (NilShape::G, t(0, s(0), s(0))),
            "Ltype2_2" => (NilShape::G, t(0, s(1), s(0))),
            "Ltype2_3" => (NilShape::G, t(0, s(0), s(1))),
            "Ltype2_4" => (NilShape::G, t(0, s(2), s(1))),
            "Ltype2_5" => (NilShape::G, t(1, s(0), s(0))),
            "Ltype2_6" => (NilShape::G, t(1, get("b"), s(0))),
            "Ltype2_7" => (NilShape::G, t(1, s(0), get("g"))),
            "Ltype2_8" => (NilShape::G, t(1, get("b"), get("g"))),
            "L" => (NilShape::L, [get("a"), get("b"), get("g")]),
            "G" => (NilShape::G, [get("a"), get("b"), get("g")]),
            "R1" => (NilShape::L, t(0, get("b"), s(0))),
            "R2" => (NilShape::L, t(0, s(1), s(1))),
            "R3" => (NilShape::L, t(1, s(-1), s(0))),
            "R4" => (NilShape::L, t(1, s(0), s(0))),
            "Hc1_1" => (NilShape::G, t(0, s(0), s(1))),
            "Hc1_2" => (NilShape::G, t(1, s(2), s(0))),
            "Hc1_3" => (NilShape::G, t(1, s(0), get("g"))),
            "Hc1_4" => (NilShape::G, t(1, s(-2), s(1))),
            "Hc1_5" => (NilShape::G, t(1, s(4), s(2))),
            "Hc2_1" => (NilShape::G, t(0, s(0), s(0))),
            "Hc2_2" => (NilShape::G, t(0, s(1), s(0))),
            "Hc2_3" => (NilShape::G, t(0, s(2), s(1))),
            "Hc2_4" => (NilShape::G, t(1, s(0), s(0))),
            "Hc2_5" => (NilShape::G, t(1, s(1), s(0))),
            "Hc2_6" => (NilShape::G, t(1, s(2), s(1))),
            _ => return None,
        };
        Some(r)
    }

    /// Table as printed, without the identity check.
    pub fn table(&self, n: usize, p: &Params) -> Result<StructureTensor> {
        self.validate(n, p)?;
        let mut t = StructureTensor::new(self.dim(n));
        if self.key == "Lnr" {
            lnr_table(&mut t, n, p.int("r").expect("validated") as usize);
            return Ok(t.with_labels((0..n).map(|i| format!("e{i}")).collect()));
        }
        let (shape, [a, b, g]) = self.nilradical_params(p).expect("L/G family");
        match shape {
            NilShape::L => l_table(&mut t, n, &a, &b, &g),
            NilShape::G => g_table(&mut t, n, &a, &b, &g),
            NilShape::Lnr => unreachable!(),
        }
        let (x, y) = (n + 1, n + 2);
        match self.key {
            "R1" => r1_products(&mut t, n, &b),
            "R2" => r2_products(&mut t, n),
            "R3" => r3_products(&mut t, n),
            "R4" => r4_products(&mut t, n),
            k if k.starts_with("Hc1_") => g_codim1_products(&mut t, n, &b),
            "Hc2_1" => g_codim2_products(&mut t, n, &a, &b, &g, &s(0)),
            k if k.starts_with("Hc2_") => g_codim2_products(&mut t, n, &a, &b, &g, &s(-1)),
            _ => {}
        }
        Ok(t.with_labels(default_labels(n, self.codim, x, y)))
    }

    /// Validated table that must also satisfy the Leibniz identity (and be
    /// Lie for `Lnr`).
    pub fn build(&self, n: usize, p: &Params) -> Result<StructureTensor> {
        let t = self.table(n, p)?;
        let rep = leibniz_check(&t);
        if !rep.pass {
            let v = &rep.violations[0];
            return Err(Error::Check(format!(
                "{} at n={n} ({p}) violates the Leibniz identity at ({},{},{}); {} violating triples",
                self.name,
                t.label(v.triple.0),
                t.label(v.triple.1),
                t.label(v.triple.2),
                rep.violations.len()
            )));
        }
        if self.key == "Lnr" && !is_lie(&t) {
            return Err(Error::Invariant(format!("Lnr({n},{p}) antisymmetric completion is not Lie")));
        }
        Ok(t)
    }

    /// Parameter points used by sweeps at this `n` (parity-filtered).
    pub fn sample_grid(&self, n: usize) -> Vec<Params> {
        let b = |v: Scalar| Params::new().with("b", v);
        let g = |v: Scalar| Params::new().with("g", v);
        let bg = |x: Scalar, y: Scalar| Params::new().with("b", x).with("g", y);
        let abg = |a: Scalar, b: Scalar, g: Scalar| Params::abg(a, b, g);
        let free = || vec![s(0), s(-1), s(2), q(1, 2)];
        let nonzero = || vec![s(1), s(-1), s(2), q(1, 2)];
        let grid: Vec<Params> = match self.key {
            "L1" => free().into_iter().map(b).collect(),
            "L2" => vec![b(s(0)), b(s(1))],
            "L3" => vec![b(s(-1)), b(s(0)), b(s(1))],
            "L4" | "Ltype2_7" | "Hc1_3" => nonzero().into_iter().map(g).collect(),
            "L5" => vec![bg(s(1), s(1)), bg(s(2), s(4))],
            "Ltype2_6" => vec![b(s(1)), b(s(2))],
            "Ltype2_8" => vec![bg(s(-2), s(1)), bg(s(2), s(1)), bg(s(4), s(2))],
            "L" => {
                let mut v: Vec<Params> = [(0, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 1, 1), (1, -1, 0), (1, 0, 0), (1, 1, 0), (1, 0, 2), (1, 1, 1), (1, 2, 4)]
                    .iter()
                    .map(|&(x, y, z)| abg(s(x), s(y), s(z)))
                    .collect();
                v.push(abg(s(2), q(1, 2), s(-3)));
                v
            }
            "G" => {
                let mut v: Vec<Params> = [(0, 0, 0), (0, 1, 0), (0, 0, 1), (0, 2, 1), (1, 0, 0), (1, 1, 0), (1, 2, 0), (1, 0, 1), (1, 0, 3), (1, 2, 1), (1, -2, 1), (1, 4, 2)]
                    .iter()
                    .map(|&(x, y, z)| abg(s(x), s(y), s(z)))
                    .collect();
                v.push(abg(s(0), q(-1, 3), s(5)));
                v.push(abg(s(1), q(1, 2), s(-2)));
                v
            }
            "Lnr" => {
                let top = 2 * ((n as i64 - 1) / 2) - 1;
                (3..=top).step_by(2).map(|r| Params::new().with("r", s(r))).collect()
            }
            "R1" => vec![b(s(-1)), b(s(0))],
            _ => vec![Params::new()],
        };
        grid.into_iter().filter(|p| self.validate(n, p).is_ok()).collect()
    }
}

fn default_labels(n: usize, codim: usize, x: usize, y: usize) -> Vec<String> {
    let mut l: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    if codim >= 1 {
        debug_assert_eq!(x, n + 1);
        l.push("x".into());
    }
    if codim >= 2 {
        debug_assert_eq!(y, n + 2);
        l.push("y".into());
    }
    l
}

/// `L(a,b,g)` products on `e_1..e_n`.
pub fn l_table(t: &mut StructureTensor, n: usize, a: &Scalar, b: &Scalar, g: &Scalar) {
    for i in 1..=n - 3 {
        t.add(i, 1, i + 1, s(1));
    }
    t.add(n - 1, 1, n, s(1));
    t.add(n - 1, 1, 2, a.clone());
    t.add(1, n - 1, n, b.clone());
    t.add(n - 1, n - 1, n, g.clone());
}

/// `G(a,b,g)` products on `e_1..e_n`; the alternating `a`-terms accumulate.
pub fn g_table(t: &mut StructureTensor, n: usize, a: &Scalar, b: &Scalar, g: &Scalar) {
    t.add(1, 1, 2, s(1));
    for i in 3..=n - 1 {
        t.add(i, 1, i + 1, s(1));
    }
    t.add(1, 3, 4, s(-1));
    t.add(1, 3, 2, b.clone());
    for i in 4..=n - 1 {
        t.add(1, i, i + 1, s(-1));
    }
    t.add(3, 3, 2, g.clone());
    for i in 3..=n - 1 {
        let sign = if i % 2 == 0 { s(1) } else { s(-1) };
        t.add(i, n + 2 - i, n, &sign * a);
    }
}

/// `Lnr(n,r)` with its antisymmetric completion; label `e_k` sits at index `k+1`.
fn lnr_table(t: &mut StructureTensor, n: usize, r: usize) {
    let ix = |k: usize| k + 1;
    for i in 1..=n - 3 {
        t.add(ix(0), ix(i), ix(i + 1), s(1));
        t.add(ix(i), ix(0), ix(i + 1), s(-1));
    }
    for i in 1..=(r - 1) / 2 {
        let c = if i % 2 == 1 { s(1) } else { s(-1) };
        t.add(ix(i), ix(r - i), ix(n - 1), c.clone());
        t.add(ix(r - i), ix(i), ix(n - 1), -c);
    }
}

fn r1_products(t: &mut StructureTensor, n: usize, b: &Scalar) {
    let (x, y) = (n + 1, n + 2);
    for i in 1..=n - 2 {
        t.add(i, x, i, s(i as i64));
    }
    t.add(n, x, n, s(1));
    t.add(x, 1, 1, s(-1));
    t.add(x, n, n, b.clone());
    t.add(n - 1, y, n - 1, s(1));
    t.add(n, y, n, s(1));
    t.add(y, n - 1, n - 1, b.clone());
    t.add(y, n, n, b.clone());
}

fn r2_products(t: &mut StructureTensor, n: usize) {
    let (x, y) = (n + 1, n + 2);
    t.add(1, x, 1, s(1));
    t.add(1, x, n - 1, s(-1));
    t.add(2, x, 2, s(2));
    t.add(2, x, n, s(-2));
    for i in 3..=n - 2 {
        t.add(i, x, i, s(i as i64));
    }
    t.add(x, 1, 1, s(-1));
    t.add(x, 1, n - 1, s(1));
    t.add(1, y, n - 1, s(1));
    t.add(2, y, n, s(2));
    t.add(n - 1, y, n - 1, s(1));
    t.add(n, y, n, s(2));
    t.add(y, 1, n - 1, s(-1));
    t.add(y, n - 1, n - 1, s(-1));
}

fn r3_products(t: &mut StructureTensor, n: usize) {
    let (x, y) = (n + 1, n + 2);
    t.add(1, x, 1, s(1));
    t.add(1, x, n - 1, s(-1));
    for i in 2..=n - 2 {
        t.add(i, x, i, s(i as i64 - 1));
    }
    t.add(n, x, n, s(1));
    t.add(x, 1, 1, s(-1));
    t.add(x, 1, n - 1, s(1));
    t.add(x, n, n, s(-1));
    t.add(1, y, n - 1, s(1));
    for i in 2..=n - 2 {
        t.add(i, y, i, s(1));
    }
    t.add(n - 1, y, n - 1, s(1));
    t.add(n, y, n, s(1));
    t.add(y, 1, n - 1, s(-1));
    t.add(y, n - 1, n - 1, s(-1));
    t.add(y, n, 2, s(-1));
    t.add(y, n, n, s(-1));
}

fn r4_products(t: &mut StructureTensor, n: usize) {
    let (x, y) = (n + 1, n + 2);
    t.add(1, x, 1, s(1));
    t.add(1, x, n - 1, s(-1));
    t.add(2, x, 2, s(1));
    t.add(2, x, n, s(-1));
    for i in 3..=n - 2 {
        t.add(i, x, i, s(i as i64 - 1));
    }
    t.add(n, x, n, s(2));
    t.add(x, 1, 1, s(-1));
    t.add(x, 1, n - 1, s(1));
    t.add(1, y, n - 1, s(1));
    t.add(2, y, 2, s(1));
    t.add(2, y, n, s(1));
    for i in 3..=n - 2 {
        t.add(i, y, i, s(1));
    }
    t.add(n - 1, y, n - 1, s(1));
}

/// Codim-1 products over `G(a,b,g)`: the diagonal action of `x` plus the
/// `b e_2` term in `[x, e_4]`.
pub fn g_codim1_products(t: &mut StructureTensor, n: usize, b: &Scalar) {
    let x = n + 1;
    t.add(1, x, 1, s(1));
    t.add(2, x, 2, s(2));
    for i in 3..=n {
        t.add(i, x, i, s(i as i64 - 2));
        t.add(x, i, i, s(-(i as i64 - 2)));
    }
    t.add(x, 1, 1, s(-1));
    t.add(x, 4, 2, b.clone());
}

/// Codim-2 products over `G(a,b,g)` in terms of the remaining constant `A1`.
pub fn g_codim2_products(t: &mut StructureTensor, n: usize, a: &Scalar, b: &Scalar, g: &Scalar, a1: &Scalar) {
    let (x, y) = (n + 1, n + 2);
    let sg = if n % 2 == 0 { s(1) } else { s(-1) };
    let sa = &(&sg * a1) * a;
    let top = &s(n as i64 - 3) - &sa;
    let low = &s(1) + &sa;
    t.add(1, x, 1, s(1));
    t.add(1, x, 3, a1.clone());
    t.add(1, y, 3, -a1);
    t.add(2, x, 2, &s(2) + &(a1 * b));
    t.add(2, y, 2, -(a1 * b));
    t.add(3, y, 3, s(1));
    t.add(4, x, 4, s(1));
    t.add(4, x, 2, a1 * g);
    t.add(4, y, 4, s(1));
    t.add(4, y, 2, -(a1 * g));
    for i in 5..=n - 1 {
        t.add(i, x, i, s(i as i64 - 3));
        t.add(i, y, i, s(1));
        t.add(x, i, i, s(-(i as i64 - 3)));
        t.add(y, i, i, s(-1));
    }
    t.add(n, x, n, top.clone());
    t.add(n, y, n, low.clone());
    t.add(x, 1, 1, s(-1));
    t.add(x, 1, 3, -a1);
    t.add(y, 1, 3, a1.clone());
    t.add(y, 3, 3, s(-1));
    t.add(x, 4, 4, s(-1));
    t.add(x, 4, 2, b + &(a1 * g));
    t.add(y, 4, 4, s(-1));
    t.add(y, 4, 2, -(a1 * g));
    t.add(x, n, n, -top);
    t.add(y, n, n, -low);
}

/// Codim-2 products over `L(a,b,g)` in terms of `A1` and `mu4`, the
/// coefficient of `e_{n-1}` in `[y, e_{n-1}]`.
pub fn l_codim2_products(t: &mut StructureTensor, n: usize, a: &Scalar, b: &Scalar, g: &Scalar, a1: &Scalar, mu4: &Scalar) {
    let (x, y) = (n + 1, n + 2);
    let one = s(1);
    let a1a = a1 * a;
    let a1b1 = a1 * &(&one + b);
    let shift = &(a1 * g) - &(&a1a * &(&one + b));
    t.add(1, x, 1, s(1));
    t.add(1, x, n - 1, a1.clone());
    t.add(1, y, n - 1, -a1);
    t.add(2, x, 2, &s(2) + &a1a);
    t.add(2, x, n, a1b1.clone());
    t.add(2, y, 2, -&a1a);
    t.add(2, y, n, -&a1b1);
    for i in 3..=n - 2 {
        t.add(i, x, i, &s(i as i64) + &a1a);
        t.add(i, y, i, -&a1a);
    }
    t.add(n - 1, y, n - 1, s(1));
    t.add(n, x, n, &one + &shift);
    t.add(n, y, n, &one - &shift);
    t.add(x, 1, 1, s(-1));
    t.add(x, 1, n - 1, -a1);
    t.add(y, 1, n - 1, -(a1 * mu4));
    t.add(y, n - 1, n - 1, mu4.clone());
    t.add(x, n, n, b + &(a1 * g));
    t.add(y, n, 2, mu4 * a);
    t.add(y, n, n, mu4 * &(&one + &(a1 * g)));
}

/// The general codim-2 table over `L(a,b,g)` as a full tensor.
pub fn l_codim2_general(n: usize, a: &Scalar, b: &Scalar, g: &Scalar, a1: &Scalar, mu4: &Scalar) -> StructureTensor {
    let mut t = StructureTensor::new(n + 2);
    l_table(&mut t, n, a, b, g);
    l_codim2_products(&mut t, n, a, b, g, a1, mu4);
    t.with_labels(default_labels(n, 2, n + 1, n + 2))
}

/// The general codim-2 table over `G(a,b,g)` as a full tensor.
pub fn g_codim2_general(n: usize, a: &Scalar, b: &Scalar, g: &Scalar, a1: &Scalar) -> StructureTensor {
    let mut t = StructureTensor::new(n + 2);
    g_table(&mut t, n, a, b, g);
    g_codim2_products(&mut t, n, a, b, g, a1);
    t.with_labels(default_labels(n, 2, n + 1, n + 2))
}

/// The codim-1 table over `G(a,b,g)` as a full tensor.
pub fn g_codim1_general(n: usize, a: &Scalar, b: &Scalar, g: &Scalar) -> StructureTensor {
    let mut t = StructureTensor::new(n + 1);
    g_table(&mut t, n, a, b, g);
    g_codim1_products(&mut t, n, b);
    t.with_labels(default_labels(n, 1, n + 1, n + 2))
}

/// Codim-2 G tables exactly as printed in the classification list. Entries
/// `Hc2_2`, `Hc2_4`, `Hc2_5` and `Hc2_6` differ from the general form at
/// `A1 = -1` and fail the Leibniz identity; `build` uses the general form.
pub fn printed_codim2_g(key: &str, n: usize) -> Result<StructureTensor> {
    let spec = find_spec(key)?;
    if spec.group != Group::SolvableGCodim2 {
        return input(format!("{key} is not a codim-2 G extension"));
    }
    spec.validate(n, &Params::new())?;
    let (_, [a, b, g]) = spec.nilradical_params(&Params::new()).unwrap();
    let mut t = StructureTensor::new(n + 2);
    g_table(&mut t, n, &a, &b, &g);
    let (x, y) = (n + 1, n + 2);
    let mut st = |i: usize, j: usize, k: usize, c: i64| t.add(i, j, k, s(c));
    match key {
        "Hc2_1" => {
            st(1, x, 1, 1);
            st(2, x, 2, 2);
            for i in 3..=n {
                st(i, x, i, i as i64 - 3);
                st(x, i, i, -(i as i64 - 3));
                st(i, y, i, 1);
                st(y, i, i, -1);
            }
            st(x, 1, 1, -1);
        }
        "Hc2_2" => {
            st(1, x, 1, 1);
            st(1, x, 3, -1);
            st(2, x, 2, 2);
            for i in 4..=n {
                st(i, x, i, i as i64 - 3);
            }
            st(x, 1, 1, -1);
            st(x, 1, 3, 1);
            st(x, 4, 4, -1);
            st(x, 4, 2, 1);
            for i in 5..=n {
                st(x, i, i, -(i as i64 - 3));
            }
            st(1, y, 3, 1);
            for i in 2..=n {
                st(i, y, i, 1);
            }
            st(y, 1, 3, 1);
            for i in 3..=n {
                st(y, i, i, -1);
            }
        }
        "Hc2_3" | "Hc2_6" => {
            st(1, x, 1, 1);
            st(1, x, 3, -1);
            st(4, x, 4, 1);
            st(4, x, 2, -1);
            for i in 5..=n {
                st(i, x, i, i as i64 - 3);
                st(x, i, i, -(i as i64 - 3));
            }
            st(x, 1, 1, -1);
            st(x, 1, 3, 1);
            st(x, 4, 4, -1);
            st(x, 4, 2, 1);
            st(1, y, 3, 1);
            st(2, y, 2, 2);
            st(3, y, 3, 1);
            st(4, y, 4, 1);
            st(4, y, 2, 1);
            st(y, 1, 3, -1);
            st(y, 3, 3, -1);
            st(y, 4, 4, -1);
            st(y, 4, 2, 1);
            let last = if key == "Hc2_3" { n } else { n - 1 };
            for i in 5..=last {
                st(i, y, i, 1);
                st(y, i, i, -1);
            }
            if key == "Hc2_6" {
                st(n, y, n, 2);
                st(y, n, n, -2);
            }
        }
        "Hc2_4" => {
            st(1, x, 1, 1);
            st(1, x, 3, -1);
            st(2, x, 2, 2);
            for i in 4..=n {
                st(i, x, i, i as i64 - 3);
                st(x, i, i, -(i as i64 - 3));
            }
            st(x, 1, 1, -1);
            st(x, 1, 3, 1);
            st(1, y, 3, -1);
            for i in 3..=n - 1 {
                st(i, y, i, 1);
                st(y, i, i, -1);
            }
            st(n, y, n, 2);
            st(y, 1, 3, 1);
            st(y, n, n, -2);
        }
        "Hc2_5" => {
            st(1, x, 1, 1);
            st(1, x, 3, -1);
            st(2, x, 2, 1);
            for i in 4..=n {
                st(i, x, i, i as i64 - 3);
            }
            st(x, 1, 1, -1);
            st(x, 1, 3, 1);
            st(x, 4, 4, -1);
            st(x, 4, 2, 1);
            for i in 5..=n {
                st(x, i, i, -(i as i64 - 3));
            }
            st(1, y, 3, 1);
            for i in 2..=n - 1 {
                st(i, y, i, 1);
            }
            st(n, y, n, 2);
            st(y, 1, 3, -1);
            for i in 3..=n - 1 {
                st(y, i, i, -1);
            }
            st(y, n, n, -2);
        }
        _ => unreachable!(),
    }
    Ok(t.with_labels(default_labels(n, 2, x, y)))
}

/// Classical name patterns paired with the unified families.
pub const CORRESPONDENCE: &[(&str, &str)] = &[
    ("L(0,beta,0)", "L1(beta)"),
    ("L(0,beta,1)", "L2(beta)"),
    ("L(1,beta,0)", "L3(beta)"),
    ("L(1,0,gamma)", "L4(gamma)"),
    ("L(1,beta,gamma)", "L5(beta,gamma)"),
    ("G(0,0,0)", "Ltype2_1"),
    ("G(0,1,0)", "Ltype2_2"),
    ("G(0,0,1)", "Ltype2_3"),
    ("G(0,2,1)", "Ltype2_4"),
    ("G(1,0,0)", "Ltype2_5"),
    ("G(1,beta,0)", "Ltype2_6(beta)"),
    ("G(1,0,gamma)", "Ltype2_7(gamma)"),
    ("G(1,beta,gamma)", "Ltype2_8(beta,gamma)"),
];

fn normalize_pattern(text: &str) -> String {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(open) = t.find('(') else { return t };
    let head = &t[..open];
    let inner = t[open + 1..].trim_end_matches(')');
    let args: Vec<String> = inner
        .split(',')
        .map(|a| match a {
            "b" | "beta" => "beta".to_string(),
            "g" | "gamma" => "gamma".to_string(),
            "a" | "alpha" => "alpha".to_string(),
            other => other.parse::<Scalar>().map(|v| v.to_string()).unwrap_or_else(|_| other.to_string()),
        })
        .collect();
    format!("{head}({})", args.join(","))
}

/// Maps a unified pattern to its classical name and back. Classical names may
/// be given with or without their parameter list.
pub fn resolve_name(text: &str) -> Result<String> {
    let norm = normalize_pattern(text);
    for (u, c) in CORRESPONDENCE {
        if normalize_pattern(u) == norm {
            return Ok(c.to_string());
        }
        if normalize_pattern(c) == norm || key_of(c) == norm {
            return Ok(u.to_string());
        }
    }
    let valid: Vec<String> = CORRESPONDENCE.iter().flat_map(|(u, c)| [u.to_string(), c.to_string()]).collect();
    input(format!("`{text}` has no counterpart; valid names: {}", valid.join(", ")))
}

/// Instance-level correspondence: the unified family and parameters of a
/// classical instance.
pub fn unified_instance(key: &str, p: &Params) -> Result<(FamilySpec, Params)> {
    let spec = find_spec(key)?;
    if !matches!(spec.group, Group::TypeI | Group::TypeII) {
        return input(format!("{key} is not a classical nilradical family"));
    }
    let (shape, [a, b, g]) = spec.nilradical_params(p).unwrap();
    let target = if shape == NilShape::L { "L" } else { "G" };
    Ok((find_spec(target)?, Params::abg(a, b, g)))
}

/// Inverse of `unified_instance`: the classical family whose domain contains
/// the given unified parameters at this `n`.
pub fn classical_instance(shape: NilShape, abg: &[Scalar; 3], n: usize) -> Option<(FamilySpec, Params)> {
    let [a, b, g] = abg;
    for spec in all_families().into_iter().filter(|f| matches!(f.group, Group::TypeI | Group::TypeII) && f.shape == shape) {
        let mut p = Params::new();
        if spec.params.contains(&"b") {
            p = p.with("b", b.clone());
        }
        if spec.params.contains(&"g") {
            p = p.with("g", g.clone());
        }
        if spec.validate(n, &p).is_err() {
            continue;
        }
        if spec.nilradical_params(&p).map(|(_, v)| v) == Some([a.clone(), b.clone(), g.clone()]) {
            return Some((spec, p));
        }
    }
    None
}

/// Named derivations of `Lnr(n,r)` from its published table, as matrices
/// with `D[r][c]` = coefficient of index `r` in the image of index `c`.
pub fn lnr_derivation_table(n: usize, r: usize) -> Result<Vec<(String, Matrix)>> {
    let spec = find_spec("Lnr")?;
    spec.validate(n, &Params::new().with("r", s(r as i64)))?;
    if n == 5 {
        return input("Lnr(5,3) has a different derivation algebra; the table needs n > 5");
    }
    let ix = |k: usize| k; // label e_k -> 0-based matrix index k
    let mut out = Vec::new();
    let z = || Matrix::zeros(n, n);
    let mut t0 = z();
    t0[(ix(0), ix(0))] = s(1);
    for i in 2..=n - 2 {
        t0[(ix(i), ix(i))] = s(i as i64 - 1);
    }
    t0[(ix(n - 1), ix(n - 1))] = s(r as i64 - 2);
    out.push(("t0".to_string(), t0));
    let mut t1 = z();
    t1[(ix(1), ix(0))] = s(1);
    t1[(ix(n - 1), ix(r))] = s(1);
    out.push(("t1".to_string(), t1));
    let mut t2 = z();
    for i in 1..=n - 2 {
        t2[(ix(i), ix(i))] = s(1);
    }
    t2[(ix(n - 1), ix(n - 1))] = s(2);
    out.push(("t2".to_string(), t2));
    for k in 3..=n - 3 {
        if k + 3 <= r && k % 2 == 0 {
            continue;
        }
        let mut h = z();
        for i in 1..=n - 2 - k {
            h[(ix(k + i), ix(i))] = s(1);
        }
        out.push((format!("h{k}"), h));
    }
    let mut g1 = z();
    g1[(ix(r), ix(0))] = s(1);
    out.push(("g1".to_string(), g1));
    let mut g2 = z();
    g2[(ix(n - 1), ix(0))] = s(1);
    out.push(("g2".to_string(), g2));
    Ok(out)
}
