//! Job specifications and command dispatch.

use std::collections::BTreeMap;
use std::fmt;

use c2alg::complexes::{is_regular_slice_coconnective, is_regular_slice_connective, CoconnectiveVerdict, MackeyComplex};
use c2alg::differentials::{cotangent_module, de_rham_complex, inv_cochain_cohomology};
use c2alg::mackey::MackeyFunctor;
use c2alg::tambara::{InvolutiveRing, TambaraPresentation, DEFAULT_TRUNC};
use c2alg::trace::{
    cyclic_homology, dihedral_homology, hr_graded_piece, hr_underlying, split_homology, DimTable, InvolutiveAlgebra,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::render::{render_dim_tables, render_group, render_lewis, render_lewis_inline, weight_label};
use crate::schema::{
    algebra_value, canonical, complex_value, from_json, int_value, mackey_value, parse_base, parse_input,
    parse_mackey_value, InputError, Parsed,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    MackeyShow,
    Box,
    Phi,
    SliceCheck,
    TambaraFree,
    Cotangent,
    Derham,
    HrGr,
    Hh,
    Dihedral,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::MackeyShow => "mackey-show",
            Command::Box => "box",
            Command::Phi => "phi",
            Command::SliceCheck => "slice-check",
            Command::TambaraFree => "tambara-free",
            Command::Cotangent => "cotangent",
            Command::Derham => "derham",
            Command::HrGr => "hr-gr",
            Command::Hh => "hh",
            Command::Dihedral => "dihedral",
        }
    }

    fn takes_input(self) -> bool {
        self != Command::TambaraFree
    }

    /// Options accepted besides `format`.
    fn allowed(self) -> &'static [&'static str] {
        match self {
            Command::MackeyShow | Command::Phi => &[],
            Command::Box => &["right"],
            Command::SliceCheck => &["n"],
            Command::TambaraFree => &["kind", "base", "trunc"],
            Command::Cotangent => &["trunc", "weight_max"],
            Command::Derham => &["trunc", "imax", "weight_max"],
            Command::HrGr => &["trunc", "i", "weight_max"],
            Command::Hh | Command::Dihedral => &["trunc", "nmax"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Pretty,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Trivial,
    Free,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Second operand of `box`: path or inline JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Value>,
}

impl Options {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("trunc", self.trunc.is_some()),
            ("n", self.n.is_some()),
            ("i", self.i.is_some()),
            ("imax", self.imax.is_some()),
            ("nmax", self.nmax.is_some()),
            ("weight_max", self.weight_max.is_some()),
            ("kind", self.kind.is_some()),
            ("base", self.base.is_some()),
            ("right", self.right.is_some()),
        ];
        for (name, set) in flags {
            if set {
                out.push(name);
            }
        }
        out
    }
}

/// One batch job. `input` is a file path (string) or an inline JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Value>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JobError {
    Parse(String),
    Domain(String),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Domain(_) => 1,
            JobError::Parse(_) => 2,
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobError::Parse(m) => write!(f, "parse error: {}", m),
            JobError::Domain(m) => write!(f, "error: {}", m),
        }
    }
}

impl From<InputError> for JobError {
    fn from(e: InputError) -> Self {
        JobError::Parse(e.to_string())
    }
}

fn domain(e: impl fmt::Display) -> JobError {
    JobError::Domain(e.to_string())
}

fn parse_err(m: impl Into<String>) -> JobError {
    JobError::Parse(m.into())
}

pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    Ok(from_json(text)?)
}

/// Inline JSON starts with `{`; anything else is a path.
pub fn load_text(source: &str) -> Result<String, JobError> {
    if source.trim_start().starts_with('{') {
        return Ok(source.to_string());
    }
    std::fs::read_to_string(source).map_err(|e| parse_err(format!("cannot read '{}': {}", source, e)))
}

fn load_value(v: &Value, field: &str) -> Result<Value, JobError> {
    match v {
        Value::String(s) => {
            let text = load_text(s)?;
            from_json::<Value>(&text).map_err(|e| parse_err(format!("{}: {}", s, e)))
        }
        Value::Object(_) => Ok(v.clone()),
        _ => Err(parse_err(format!("{}: expected a path or an object", field))),
    }
}

fn check_range<T: PartialOrd + fmt::Display + Copy>(name: &str, v: Option<T>, lo: T, hi: T) -> Result<(), JobError> {
    match v {
        Some(x) if x < lo || x > hi => Err(parse_err(format!("options.{} = {} is outside [{}, {}]", name, x, lo, hi))),
        _ => Ok(()),
    }
}

/// Truncation: explicit option, then `MACKEY_TRUNC`, then 8.
pub fn resolve_trunc(option: Option<u32>, env: Option<&str>) -> Result<u32, JobError> {
    if let Some(t) = option {
        return Ok(t);
    }
    match env {
        Some(s) => {
            let t: u32 = s.trim().parse().map_err(|_| parse_err(format!("MACKEY_TRUNC = '{}' is not a natural number", s)))?;
            check_range("trunc", Some(t), 1, 32)?;
            Ok(t)
        }
        None => Ok(DEFAULT_TRUNC),
    }
}

/// Checks presence and ranges of options before any computation.
pub fn validate(job: &JobSpec) -> Result<(), JobError> {
    let cmd = job.command;
    if cmd.takes_input() && job.input.is_none() {
        return Err(parse_err(format!("{} needs an input", cmd.name())));
    }
    if !cmd.takes_input() && job.input.is_some() {
        return Err(parse_err(format!("{} takes no input", cmd.name())));
    }
    let o = &job.options;
    if let Some(extra) = o.present().into_iter().find(|k| !cmd.allowed().contains(k)) {
        return Err(parse_err(format!("options.{} does not apply to {}", extra, cmd.name())));
    }
    let missing = |name: &str| parse_err(format!("{} needs options.{}", cmd.name(), name));
    match cmd {
        Command::Box if o.right.is_none() => return Err(missing("right")),
        Command::SliceCheck if o.n.is_none() => return Err(missing("n")),
        Command::HrGr if o.i.is_none() => return Err(missing("i")),
        Command::TambaraFree if o.kind.is_none() => return Err(missing("kind")),
        _ => {}
    }
    check_range("trunc", o.trunc, 1, 32)?;
    check_range("n", o.n, -16, 16)?;
    check_range("i", o.i, 0, 8)?;
    check_range("imax", o.imax, 0, 6)?;
    check_range("nmax", o.nmax, 1, 8)?;
    check_range("weight_max", o.weight_max, 0, 12)?;
    if let Some(b) = &o.base {
        parse_base(b).map_err(|m| parse_err(format!("options.base: {}", m)))?;
    }
    Ok(())
}

/// Validates, then computes. `env_trunc` is the value of `MACKEY_TRUNC`.
pub fn run(job: &JobSpec, env_trunc: Option<&str>) -> Result<String, JobError> {
    validate(job)?;
    let trunc = resolve_trunc(job.options.trunc, env_trunc)?;
    let input = match &job.input {
        Some(v) => Some(load_value(v, "input")?),
        None => None,
    };
    let report = dispatch(job, input, trunc)?;
    Ok(match job.options.format.unwrap_or_default() {
        Format::Pretty => report.pretty,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("serializable");
            s.push('\n');
            s
        }
    })
}

struct Report {
    pretty: String,
    json: Value,
}

fn as_functor(v: &Value) -> Result<MackeyFunctor, JobError> {
    Ok(parse_mackey_value(v, "")?)
}

fn as_complex(v: &Value) -> Result<MackeyComplex, JobError> {
    match parse_input(&v.to_string())? {
        Parsed::Complex(c) => Ok(c),
        Parsed::Mackey(m) => Ok(MackeyComplex::concentrated(m, 0)),
        Parsed::Algebra(_) => Err(parse_err("expected a complex or a Mackey functor, got an algebra")),
    }
}

fn as_ring(v: &Value) -> Result<InvolutiveRing, JobError> {
    match parse_input(&v.to_string())? {
        Parsed::Algebra(r) => Ok(r),
        _ => Err(parse_err("expected an algebra with fields base, gens, rels")),
    }
}

fn dispatch(job: &JobSpec, input: Option<Value>, trunc: u32) -> Result<Report, JobError> {
    let o = &job.options;
    let input = input.unwrap_or(Value::Null);
    match job.command {
        Command::MackeyShow => {
            let m = as_functor(&input)?;
            Ok(Report { pretty: render_lewis(&m), json: mackey_value(&m) })
        }
        Command::Box => {
            let right = load_value(o.right.as_ref().expect("validated"), "options.right")?;
            let (a, b) = (as_functor(&input)?, as_functor(&right)?);
            let m = a.box_product(&b);
            Ok(Report { pretty: render_lewis(&m), json: mackey_value(&m) })
        }
        Command::Phi => phi(&input),
        Command::SliceCheck => slice_check(&as_complex(&input)?, o.n.expect("validated")),
        Command::TambaraFree => tambara_free(o, trunc),
        Command::Cotangent => cotangent(&as_ring(&input)?, trunc, o.weight_max.unwrap_or(3)),
        Command::Derham => derham(&as_ring(&input)?, trunc, o.imax.unwrap_or(2), o.weight_max.unwrap_or(4)),
        Command::HrGr => hr_gr(&as_ring(&input)?, trunc, o.i.expect("validated"), o.weight_max.unwrap_or(4)),
        Command::Hh => hh(&as_ring(&input)?, trunc, o.nmax.unwrap_or(4)),
        Command::Dihedral => dihedral(&as_ring(&input)?, trunc, o.nmax.unwrap_or(4)),
    }
}

fn homology_table(c: &MackeyComplex) -> (String, Value) {
    let mut pretty = String::new();
    let mut json = serde_json::Map::new();
    for n in c.homology_support() {
        let h = c.homology(n);
        pretty.push_str(&format!("H_{} = {}\n", n, render_lewis_inline(&h)));
        json.insert(n.to_string(), mackey_value(&h));
    }
    if json.is_empty() {
        pretty.push_str("H_* = 0\n");
    }
    (pretty, Value::Object(json))
}

fn phi(input: &Value) -> Result<Report, JobError> {
    if let Ok(m) = as_functor(input) {
        let g = m.geometric_fixed_points();
        let ds = g.invariants();
        return Ok(Report {
            pretty: format!("Phi = {}\n", render_group(&ds)),
            json: json!({"phi": ds.iter().map(int_value).collect::<Vec<_>>()}),
        });
    }
    let c = as_complex(input)?;
    let p = c.phi_complex().map_err(domain)?;
    let mut pretty = String::new();
    let mut table = serde_json::Map::new();
    for n in p.degrees() {
        let ds = p.homology(n).invariants();
        pretty.push_str(&format!("H_{}(Phi) = {}\n", n, render_group(&ds)));
        table.insert(n.to_string(), Value::Array(ds.iter().map(int_value).collect()));
    }
    Ok(Report { pretty, json: json!({"phi": table}) })
}

fn slice_check(c: &MackeyComplex, n: i64) -> Result<Report, JobError> {
    let connective = is_regular_slice_connective(c, n).map_err(domain)?;
    let coconnective = if n <= 0 {
        match is_regular_slice_coconnective(c, n) {
            Ok(CoconnectiveVerdict::PassesNecessaryConditions) => Some("passes necessary conditions"),
            Ok(CoconnectiveVerdict::Fails) => Some("fails"),
            Err(_) => None,
        }
    } else {
        None
    };
    let (table, homology) = homology_table(c);
    let mut pretty = format!("regular-slice ({})-connective: {}\n", n, connective);
    if let Some(v) = coconnective {
        pretty.push_str(&format!("regular-slice ({})-coconnective: {}\n", n, v));
    }
    pretty.push_str(&table);
    Ok(Report {
        pretty,
        json: json!({"n": n, "connective": connective, "coconnective": coconnective, "homology": homology}),
    })
}

fn tambara_free(o: &Options, trunc: u32) -> Result<Report, JobError> {
    let base = parse_base(o.base.as_deref().unwrap_or("Z")).map_err(parse_err)?;
    let kind = o.kind.expect("validated");
    let t = match kind {
        Kind::Trivial => TambaraPresentation::free_involutive_trivial(base, &["x"], trunc),
        Kind::Free => TambaraPresentation::free_involutive_free(base, trunc),
    }
    .map_err(domain)?;
    t.validate().map_err(domain)?;
    let under = t.under();
    let mut pretty = format!("underlying: {}[{}]\n", under.base(), under.names().join(","));
    let mut gens = Vec::new();
    for (name, x) in t.named_generators() {
        let r = under.fmt(&t.res(x));
        pretty.push_str(&format!("res({}) = {}\n", name, r));
        gens.push(json!({"name": name, "res": r}));
    }
    let mut products = Vec::new();
    if kind == Kind::Free {
        let half = trunc / 2;
        for i in 1..=half {
            for j in 1..=i {
                let ti = t.named(&format!("t_{}", i)).expect("named");
                let tj = t.named(&format!("t_{}", j)).expect("named");
                let v = t.describe_fixed(&t.fixed_mul(&ti, &tj));
                pretty.push_str(&format!("t_{}*t_{} = {}\n", i, j, v));
                products.push(json!({"i": i, "j": j, "value": v}));
            }
        }
    }
    let mut pieces = Vec::new();
    if let Ok(ps) = t.mackey_pieces() {
        for (w, m) in ps {
            pretty.push_str(&format!("weight {}: {}\n", weight_label(w), render_lewis_inline(&m)));
            pieces.push(json!({"weight": w, "functor": mackey_value(&m)}));
        }
    }
    Ok(Report {
        pretty,
        json: json!({
            "base": base.to_string(),
            "kind": kind,
            "trunc": trunc,
            "generators": gens,
            "products": products,
            "pieces": pieces,
        }),
    })
}

fn cotangent(ring: &InvolutiveRing, trunc: u32, weight_max: u32) -> Result<Report, JobError> {
    let b = TambaraPresentation::fixed_point_green(ring.clone(), trunc).map_err(domain)?;
    let l = cotangent_module(&b).map_err(domain)?;
    let mut pretty = format!("generators: {}\n", l.generator_names().join(", "));
    let relations: Vec<String> = (0..l.relation_names().len()).map(|k| l.fmt_relation(k)).collect();
    for r in &relations {
        pretty.push_str(&format!("{}\n", r));
    }
    let reduced = l.fmt_reduced();
    pretty.push_str(&format!("underlying: {}\n", reduced));
    pretty.push_str(&format!("sigma: {}\n", l.fmt_sigma()));
    let fixed: Option<Vec<String>> = if ring.base().two_invertible() {
        Some(l.fixed_generators().iter().map(|v| l.fmt_form(v)).collect())
    } else {
        None
    };
    if let Some(f) = &fixed {
        pretty.push_str(&format!("fixed generators: {}\n", f.join(", ")));
    }
    let mut ranks = BTreeMap::new();
    let mut pieces = BTreeMap::new();
    for w in 0..=weight_max {
        let (f, u) = l.level_ranks(w);
        ranks.insert(w.to_string(), json!({"fixed": f, "underlying": u}));
        match l.mackey_piece(w) {
            Ok(m) if l.is_free() && ring.base() == c2alg::BaseRing::Z => {
                pretty.push_str(&format!("weight {}: {}\n", w, render_lewis_inline(&m)));
                pieces.insert(w.to_string(), mackey_value(&m));
            }
            _ => pretty.push_str(&format!("weight {}: rank {} / {}\n", w, f, u)),
        }
    }
    Ok(Report {
        pretty,
        json: json!({
            "algebra": algebra_value(ring),
            "generators": l.generator_names(),
            "relations": relations,
            "underlying": reduced,
            "sigma": l.fmt_sigma(),
            "free": l.is_free(),
            "fixed_generators": fixed,
            "ranks": ranks,
            "pieces": pieces,
        }),
    })
}

fn derham(ring: &InvolutiveRing, trunc: u32, imax: usize, weight_max: u32) -> Result<Report, JobError> {
    let b = TambaraPresentation::fixed_point_green(ring.clone(), trunc).map_err(domain)?;
    let dr = de_rham_complex(&b, imax).map_err(domain)?;
    let mut pretty = String::new();
    let mut table = serde_json::Map::new();
    for w in 0..=weight_max {
        let piece = dr.piece(w).map_err(domain)?;
        let mut row = Vec::new();
        for i in 0..=imax {
            let h = inv_cochain_cohomology(&piece, i as i64);
            let ds = h.group.invariants();
            if !ds.is_empty() {
                pretty.push_str(&format!("weight {} H^{} = {}  (rank+ {}, rank- {})\n", w, i, render_group(&ds), h.plus, h.minus));
            }
            row.push(json!({
                "group": ds.iter().map(int_value).collect::<Vec<_>>(),
                "plus": h.plus,
                "minus": h.minus,
            }));
        }
        table.insert(w.to_string(), Value::Array(row));
    }
    if pretty.is_empty() {
        pretty.push_str("H^* = 0\n");
    }
    Ok(Report { pretty, json: json!({"imax": imax, "cohomology": table}) })
}

fn hr_gr(ring: &InvolutiveRing, trunc: u32, i: usize, weight_max: u32) -> Result<Report, JobError> {
    let b = TambaraPresentation::fixed_point_green(ring.clone(), trunc).map_err(domain)?;
    let mut pretty = String::new();
    let mut table = serde_json::Map::new();
    for w in 0..=weight_max {
        let c = hr_graded_piece(&b, i, w).map_err(domain)?;
        let (t, v) = homology_table(&c);
        pretty.push_str(&format!("gr^{} weight {}\n", i, w));
        for line in t.lines() {
            pretty.push_str(&format!("  {}\n", line));
        }
        table.insert(w.to_string(), v);
    }
    Ok(Report { pretty, json: json!({"i": i, "weights": table}) })
}

fn dim_json(t: &DimTable) -> Value {
    Value::Array(t.iter().map(|(w, d)| json!({"weight": w, "dims": d})).collect())
}

fn algebra(ring: &InvolutiveRing, trunc: u32) -> Result<InvolutiveAlgebra, JobError> {
    InvolutiveAlgebra::new(ring.clone(), trunc).map_err(domain)
}

fn hh(ring: &InvolutiveRing, trunc: u32, nmax: usize) -> Result<Report, JobError> {
    let a = algebra(ring, trunc)?;
    let total = hr_underlying(&a, nmax).map_err(domain)?;
    let mut json = json!({"nmax": nmax, "hh": dim_json(&total)});
    let pretty = if a.two_invertible() {
        let (plus, minus) = split_homology(&a, nmax).map_err(domain)?;
        json["plus"] = dim_json(&plus);
        json["minus"] = dim_json(&minus);
        render_dim_tables(&[("HH", &total), ("HH+", &plus), ("HH-", &minus)], nmax)
    } else {
        render_dim_tables(&[("HH", &total)], nmax)
    };
    Ok(Report { pretty, json })
}

fn dihedral(ring: &InvolutiveRing, trunc: u32, nmax: usize) -> Result<Report, JobError> {
    let a = algebra(ring, trunc)?;
    let hc = cyclic_homology(&a, nmax).map_err(domain)?;
    let (hd, hd1) = dihedral_homology(&a, nmax).map_err(domain)?;
    Ok(Report {
        pretty: render_dim_tables(&[("HC", &hc), ("HD", &hd), ("HD'", &hd1)], nmax),
        json: json!({"nmax": nmax, "hc": dim_json(&hc), "hd": dim_json(&hd), "hd_prime": dim_json(&hd1)}),
    })
}

/// JSON form of a parsed object; parsing it back gives the same object.
pub fn emit(parsed: &Parsed) -> Value {
    match parsed {
        Parsed::Algebra(r) => algebra_value(r),
        Parsed::Mackey(m) => mackey_value(&canonical(m)),
        Parsed::Complex(c) => complex_value(c),
    }
}
