//! JSON interchange: presented rings with involution, Mackey functors and
//! complexes. Groups are invariant-factor lists (0 = Z) and matrices are
//! row-major integer arrays in the generators of those groups.

use std::collections::BTreeMap;
use std::fmt;

use c2alg::abelian::FgAbGroup;
use c2alg::complexes::{sign_sphere, MackeyComplex};
use c2alg::mackey::{MackeyFunctor, MackeyMap};
use c2alg::matrix::IntMatrix;
use c2alg::scalar::Integer;
use c2alg::tambara::{BaseRing, InvolutiveRing};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::expr::parse_poly;

/// Schema violation, located by a JSON field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

/// Serde errors carry line and column.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::new(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, field: &str) -> Result<T, InputError> {
    serde_json::from_value(v.clone()).map_err(|e| InputError::new(field, e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub name: String,
    pub sigma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub base: String,
    pub gens: Vec<GenSpec>,
    #[serde(default)]
    pub rels: Vec<String>,
}

pub fn parse_base(s: &str) -> Result<BaseRing, String> {
    match s {
        "Z" => Ok(BaseRing::Z),
        "Z[1/2]" => Ok(BaseRing::ZHalf),
        "Q" => Ok(BaseRing::Q),
        _ => match s.strip_prefix("Z/").and_then(|m| m.parse::<u64>().ok()) {
            Some(m) if m >= 2 => Ok(BaseRing::ZMod(m)),
            _ => Err(format!("unsupported base ring '{}'; expected Z, Z[1/2], Q or Z/m", s)),
        },
    }
}

impl AlgebraSpec {
    pub fn to_ring(&self) -> Result<InvolutiveRing, InputError> {
        let base = parse_base(&self.base).map_err(|m| InputError::new("base", m))?;
        let names: Vec<String> = self.gens.iter().map(|g| g.name.clone()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(InputError::new(format!("gens[{}].name", i), format!("duplicate generator '{}'", n)));
            }
        }
        let mut sigma = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            sigma.push(parse_poly(&g.sigma, &names).map_err(|m| InputError::new(format!("gens[{}].sigma", i), m))?);
        }
        let mut rels = Vec::new();
        for (k, r) in self.rels.iter().enumerate() {
            rels.push(parse_poly(r, &names).map_err(|m| InputError::new(format!("rels[{}]", k), m))?);
        }
        let mut ring = InvolutiveRing::new(base, names.clone(), sigma, rels.clone()).map_err(|e| InputError::new("", e.to_string()))?;
        if self.gens.iter().any(|g| g.weight.is_some()) {
            ring = ring.with_weights(self.gens.iter().map(|g| g.weight.unwrap_or(1)).collect());
        }
        for (k, r) in rels.iter().enumerate() {
            if !ring.apply_sigma(r).is_zero() {
                return Err(InputError::new(format!("rels[{}]", k), format!("relation {} is not σ-stable", self.rels[k])));
            }
        }
        ring.check_involution().map_err(|e| InputError::new("gens", e.to_string()))?;
        Ok(ring)
    }

    pub fn from_ring(ring: &InvolutiveRing) -> Self {
        let graded = ring.weights().iter().any(|&w| w != 1);
        let gens = (0..ring.nvars())
            .map(|i| GenSpec {
                name: ring.names()[i].clone(),
                sigma: ring.fmt(&ring.sigma_images()[i]),
                weight: if graded { Some(ring.weights()[i]) } else { None },
            })
            .collect();
        AlgebraSpec { base: ring.base().to_string(), gens, rels: ring.relations().iter().map(|r| ring.fmt(r)).collect() }
    }
}

fn matrix_from(v: &Value, field: &str, rows: usize, cols: usize) -> Result<IntMatrix, InputError> {
    let data: Vec<Vec<i64>> = from_value(v, field)?;
    if data.is_empty() && rows == 0 {
        return Ok(IntMatrix::zeros(0, cols));
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(InputError::new(field, format!("expected a {}x{} matrix", rows, cols)));
    }
    Ok(IntMatrix::from_rows_sized(rows, cols, data.into_iter().map(|r| r.into_iter().map(Integer::from).collect()).collect()))
}

fn group_from(v: &Value, field: &str) -> Result<FgAbGroup, InputError> {
    let ds: Vec<i64> = from_value(v, field)?;
    if ds.iter().any(|&d| d < 0 || d == 1) {
        return Err(InputError::new(field, "invariant factors must be 0 or at least 2"));
    }
    Ok(FgAbGroup::from_invariants(&ds.into_iter().map(Integer::from).collect::<Vec<_>>()))
}

fn object<'a>(v: &'a Value, field: &str, allowed: &[&str]) -> Result<&'a serde_json::Map<String, Value>, InputError> {
    let obj = v.as_object().ok_or_else(|| InputError::new(field, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(InputError::new(field, format!("unknown field '{}'", k)));
    }
    Ok(obj)
}

fn required<'a>(obj: &'a serde_json::Map<String, Value>, field: &str, key: &str) -> Result<&'a Value, InputError> {
    obj.get(key).ok_or_else(|| InputError::new(field, format!("missing field '{}'", key)))
}

fn join(field: &str, key: &str) -> String {
    if field.is_empty() {
        key.to_string()
    } else {
        format!("{}.{}", field, key)
    }
}

pub fn builtin_functor(name: &str) -> Option<MackeyFunctor> {
    match name {
        "Z" => Some(MackeyFunctor::constant_z()),
        "Z_-" => Some(MackeyFunctor::z_minus()),
        "Z[C2]" => Some(MackeyFunctor::free_orbit()),
        "A" => Some(MackeyFunctor::burnside()),
        "0" => Some(MackeyFunctor::zero()),
        _ => None,
    }
}

/// `{"builtin": "Z"}` or `{"fixed", "underlying", "res", "tr", "sigma"}`.
pub fn parse_mackey_value(v: &Value, field: &str) -> Result<MackeyFunctor, InputError> {
    if let Some(obj) = v.as_object().filter(|o| o.contains_key("builtin")) {
        object(v, field, &["builtin"])?;
        let name = obj["builtin"].as_str().unwrap_or("");
        return builtin_functor(name)
            .ok_or_else(|| InputError::new(join(field, "builtin"), format!("unknown functor '{}'; expected Z, Z_-, Z[C2], A or 0", name)));
    }
    let obj = object(v, field, &["fixed", "underlying", "res", "tr", "sigma"])?;
    let fixed = group_from(required(obj, field, "fixed")?, &join(field, "fixed"))?;
    let under = group_from(required(obj, field, "underlying")?, &join(field, "underlying"))?;
    let (f, u) = (fixed.ngens(), under.ngens());
    let res = matrix_from(required(obj, field, "res")?, &join(field, "res"), u, f)?;
    let tr = matrix_from(required(obj, field, "tr")?, &join(field, "tr"), f, u)?;
    let sigma = matrix_from(required(obj, field, "sigma")?, &join(field, "sigma"), u, u)?;
    MackeyFunctor::new(fixed, under, res, tr, sigma).map_err(|e| InputError::new(field, e.to_string()))
}

/// `{"sign_sphere": n}` or `{"terms": {deg: functor}, "diffs": {deg: {"fixed", "underlying"}}}`
/// with `diffs[n]` going from degree n to n - 1.
pub fn parse_complex_value(v: &Value, field: &str) -> Result<MackeyComplex, InputError> {
    if let Some(obj) = v.as_object().filter(|o| o.contains_key("sign_sphere")) {
        object(v, field, &["sign_sphere"])?;
        let n = obj["sign_sphere"].as_i64().ok_or_else(|| InputError::new(join(field, "sign_sphere"), "expected an integer"))?;
        if n.abs() > 16 {
            return Err(InputError::new(join(field, "sign_sphere"), "|n| must be at most 16"));
        }
        return Ok(sign_sphere(n));
    }
    let obj = object(v, field, &["terms", "diffs"])?;
    let degree = |k: &str, f: &str| k.parse::<i64>().map_err(|_| InputError::new(f, format!("degree '{}' is not an integer", k)));
    let terms_field = join(field, "terms");
    let terms_obj = required(obj, field, "terms")?.as_object().ok_or_else(|| InputError::new(&terms_field, "expected an object"))?;
    let mut terms = BTreeMap::new();
    for (k, t) in terms_obj {
        let f = join(&terms_field, k);
        terms.insert(degree(k, &f)?, parse_mackey_value(t, &f)?);
    }
    let mut diffs = BTreeMap::new();
    if let Some(d) = obj.get("diffs") {
        let diffs_field = join(field, "diffs");
        let d = d.as_object().ok_or_else(|| InputError::new(&diffs_field, "expected an object"))?;
        for (k, m) in d {
            let f = join(&diffs_field, k);
            let n = degree(k, &f)?;
            let src = terms.get(&n).cloned().unwrap_or_else(MackeyFunctor::zero);
            let tgt = terms.get(&(n - 1)).cloned().unwrap_or_else(MackeyFunctor::zero);
            let mo = object(m, &f, &["fixed", "underlying"])?;
            let fixed = matrix_from(required(mo, &f, "fixed")?, &join(&f, "fixed"), tgt.fixed().ngens(), src.fixed().ngens())?;
            let under = matrix_from(
                required(mo, &f, "underlying")?,
                &join(&f, "underlying"),
                tgt.underlying().ngens(),
                src.underlying().ngens(),
            )?;
            let map = MackeyMap::new(src, tgt, fixed, under).map_err(|e| InputError::new(&f, e.to_string()))?;
            diffs.insert(n, map);
        }
    }
    MackeyComplex::new(terms, diffs).map_err(|e| InputError::new(field, e.to_string()))
}

/// Any of the three input kinds.
#[derive(Clone, Debug)]
pub enum Parsed {
    Algebra(InvolutiveRing),
    Mackey(MackeyFunctor),
    Complex(MackeyComplex),
}

/// Dispatches on the keys present.
pub fn parse_input(text: &str) -> Result<Parsed, InputError> {
    let v: Value = from_json(text)?;
    let obj = v.as_object().ok_or_else(|| InputError::new("", "expected a JSON object"))?;
    if obj.contains_key("gens") || obj.contains_key("base") {
        let spec: AlgebraSpec = from_value(&v, "")?;
        return Ok(Parsed::Algebra(spec.to_ring()?));
    }
    if obj.contains_key("terms") || obj.contains_key("sign_sphere") {
        return Ok(Parsed::Complex(parse_complex_value(&v, "")?));
    }
    Ok(Parsed::Mackey(parse_mackey_value(&v, "")?))
}

fn ints(ds: &[Integer]) -> Vec<Value> {
    ds.iter().map(int_value).collect()
}

pub fn int_value(d: &Integer) -> Value {
    match d.to_i64() {
        Some(x) => json!(x),
        None => json!(d.to_string()),
    }
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(int_value).collect())).collect())
}

/// Simplified presentation: each generator carries one invariant factor.
pub fn canonical(m: &MackeyFunctor) -> MackeyFunctor {
    let minimal = |g: &FgAbGroup| {
        let ds = g.invariants();
        ds.len() == g.ngens() && *g == FgAbGroup::from_invariants(&ds)
    };
    if minimal(m.fixed()) && minimal(m.underlying()) {
        m.clone()
    } else {
        m.simplify()
    }
}

pub fn mackey_value(m: &MackeyFunctor) -> Value {
    let m = canonical(m);
    json!({
        "fixed": ints(&m.fixed().invariants()),
        "underlying": ints(&m.underlying().invariants()),
        "res": matrix_value(m.res()),
        "tr": matrix_value(m.tr()),
        "sigma": matrix_value(m.sigma()),
    })
}

pub fn complex_value(c: &MackeyComplex) -> Value {
    let mut terms = serde_json::Map::new();
    let mut diffs = serde_json::Map::new();
    for n in c.degrees() {
        terms.insert(n.to_string(), mackey_value(&c.term(n)));
    }
    for n in c.degrees() {
        let d = c.diff(n);
        if !d.is_zero() {
            diffs.insert(n.to_string(), json!({"fixed": matrix_value(d.fixed()), "underlying": matrix_value(d.underlying())}));
        }
    }
    json!({"terms": terms, "diffs": diffs})
}

pub fn algebra_value(ring: &InvolutiveRing) -> Value {
    serde_json::to_value(AlgebraSpec::from_ring(ring)).expect("serializable")
}
