//! One-shot computations behind `nadiff <group> <op> [key=value …] [positional …]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::fnspec::parse_poly;
use super::RunConfig;
use crate::calculus::{chain_check, leibniz_check, leibniz_multi_check, note2_table, phi_eval, CheckPoint, CheckReport, Domain, FnRepr};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::loops::{
    all_classes, class_of, grothendieck, group_rank, loop_thread_check, project_family, reduction_map, wedge, wedge_slots, ChiSpec,
    LoopClass,
};
use crate::mahler::{compose, evaluate, expand, invert, omega, stirling_tables, MahlerSeries};
use crate::oneparam::{
    additive_obstruction, ball_group, condition_i_check, eta_construct, eta_tower, lift_check, monomial_perturbation, DEGREE_BOUND,
};
use crate::poly::MPoly;
use crate::tower::{
    commutator_decompose, commutator_product, functoriality_check, level_project, thread_of, witness_flat_polynomial, DiffRepr,
    LevelPermutation, Perm, Sampling, WitnessSpec,
};
use crate::ultrametric::{parse_element, FieldDescriptor, Lfe};

/// `key=value` settings and positional arguments. Element literals such as `p=3:102` are
/// positional.
pub struct Args {
    kv: BTreeMap<String, String>,
    pos: Vec<String>,
    defaults: RunConfig,
}

fn is_literal(tok: &str) -> bool {
    tok.split_once(':')
        .is_some_and(|(head, _)| head.split(',').all(|kv| kv.split_once('=').is_some_and(|(_, v)| v.chars().all(|c| c.is_ascii_digit()))))
        && tok.starts_with("p=")
}

impl Args {
    pub fn new(tokens: &[String], defaults: &RunConfig) -> Self {
        let mut kv = BTreeMap::new();
        let mut pos = Vec::new();
        for t in tokens {
            match t.split_once('=') {
                Some((k, v)) if !is_literal(t) && !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
                    kv.insert(k.to_string(), v.to_string());
                }
                _ => pos.push(t.clone()),
            }
        }
        Args { kv, pos, defaults: defaults.clone() }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.kv.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::InvalidArgument(format!("missing {key}=")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::InvalidArgument(format!("{key}={v} is not a number"))),
        }
    }

    fn positional(&self, i: usize, what: &str) -> Result<&str> {
        self.pos.get(i).map(String::as_str).ok_or_else(|| Error::InvalidArgument(format!("missing {what}")))
    }

    fn p(&self) -> Result<u32> {
        self.num("p", self.defaults.p)
    }

    fn prec(&self) -> Result<i64> {
        self.num("N", self.defaults.precision)
    }

    fn padic(&self) -> Result<FieldDescriptor> {
        FieldDescriptor::padic(self.p()?)
    }

    fn laurent(&self) -> Result<FieldDescriptor> {
        FieldDescriptor::laurent(self.p()?, self.num("u", self.defaults.u)?)
    }

    /// The field named by the arguments: `𝔽_{p^u}((t))` when `u=` is given, `ℚ_p` otherwise.
    fn field(&self) -> Result<FieldDescriptor> {
        if self.kv.contains_key("u") {
            self.laurent()
        } else {
            self.padic()
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn in_arg(name: &str, e: Error) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("in {name}: {msg}") },
        other => other,
    }
}

fn spec(args: &Args, src: &str, name: &str, field: FieldDescriptor, dim: Option<usize>) -> Result<MPoly<Lfe>> {
    parse_poly(src, field, dim, args.prec()?).map_err(|e| in_arg(name, e))
}

/// Smallest valuation among the coefficients of `g − id`, the isometry exponent of `g`.
fn displacement(polys: &[MPoly<Lfe>], prec: i64) -> i64 {
    let n = polys.len();
    polys
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let one = Lfe::one(q.sample_coeff().map_or_else(|| FieldDescriptor::padic(2).unwrap(), |c| c.field()), prec);
            q.minus(&MPoly::var(i, n, one))
                .terms()
                .filter(|(_, c)| !c.is_zero())
                .map(|(_, c)| c.valuation().unwrap_or(prec))
                .min()
                .unwrap_or(prec)
        })
        .min()
        .unwrap_or(prec)
}

/// A self-map of `O_K^n` from coordinate specs separated by `;`.
fn diffeo(args: &Args, src: &str, name: &str, field: FieldDescriptor) -> Result<DiffRepr> {
    let prec = args.prec()?;
    let parts: Vec<&str> = src.split(';').collect();
    let dim = parts.len();
    let polys = parts.iter().map(|s| spec(args, s, name, field, Some(dim))).collect::<Result<Vec<_>>>()?;
    let s = displacement(&polys, prec);
    DiffRepr::on_integers(FnRepr::polynomial(field, Domain::whole(dim), polys), s, prec)
}

fn series_arg(args: &Args, key: &str, field: FieldDescriptor) -> Result<MahlerSeries> {
    let text = args.require(key)?;
    MahlerSeries::parse(&format!("p={} N={} coeffs={text}", field.p, args.prec()?)).map_err(|e| in_arg(key, e))
}

fn element(args: &Args, src: &str, field: FieldDescriptor) -> Result<Lfe> {
    let prec = args.prec()?;
    if let Ok(n) = src.parse::<i64>() {
        return Ok(Lfe::from_int(field, n, prec));
    }
    let x = parse_element(src, prec)?;
    if x.field() != field {
        return Err(Error::DescriptorMismatch(x.field().to_string(), field.to_string()));
    }
    Ok(x)
}

/// Parses `(0 1 2)(3 4)` on `{0..n-1}`.
pub fn parse_cycles(src: &str, n: usize) -> Result<Perm> {
    let mut cycles = Vec::new();
    let mut rest = src.trim();
    let mut offset = src.len() - src.trim_start().len();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or(Error::Parse { pos: offset, msg: "expected '('".into() })?;
        let close = body.find(')').ok_or(Error::Parse { pos: offset, msg: "unclosed cycle".into() })?;
        let cycle = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parse { pos: offset + 1, msg: format!("bad point '{t}'") }))
            .collect::<Result<Vec<_>>>()?;
        cycles.push(cycle);
        let consumed = close + 2;
        offset += consumed;
        let next = &rest[consumed..];
        offset += next.len() - next.trim_start().len();
        rest = next.trim_start();
    }
    Perm::from_cycles(n, &cycles)
}

fn list<T: std::str::FromStr>(src: &str, name: &str) -> Result<Vec<T>> {
    src.trim_matches(|c| c == '[' || c == ']' || c == '{' || c == '}')
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| t.parse().map_err(|_| Error::Parse { pos: i, msg: format!("bad entry '{t}' in {name}") }))
        .collect()
}

pub fn compute(group: &str, op: &str, tokens: &[String], defaults: &RunConfig) -> Result<String> {
    let args = Args::new(tokens, defaults);
    match group {
        "mahler" => mahler(op, &args),
        "tower" => tower(op, &args),
        "calculus" => calculus(op, &args),
        "tables" => tables(op, &args),
        "oneparam" => oneparam(op, &args),
        "loop" => loops(op, &args),
        _ => Err(Error::InvalidArgument(format!("unknown command group '{group}'"))),
    }
}

fn mahler(op: &str, args: &Args) -> Result<String> {
    let field = args.padic()?;
    let prec = args.prec()?;
    match op {
        "expand" => {
            let poly = spec(args, args.positional(0, "function spec")?, "f", field, Some(1))?;
            let j = args.num("J", prec as usize)?;
            Ok(expand(&FnRepr::scalar_poly(field, poly), j, prec)?.to_string())
        }
        "evaluate" => {
            let s = series_arg(args, "coeffs", field)?;
            let x = element(args, args.require("x")?, field)?;
            Ok(evaluate(&s, &x)?.to_string())
        }
        "invert" => {
            let s = series_arg(args, "coeffs", field)?;
            Ok(invert(&s, args.num("K", args.defaults.truncation)?)?.to_string())
        }
        "compose" => {
            let g = series_arg(args, "g", field)?;
            let f = series_arg(args, "f", field)?;
            Ok(compose(&g, &f, args.num("K", args.defaults.truncation)?)?.to_string())
        }
        _ => Err(Error::InvalidArgument(format!("unknown mahler operation '{op}'"))),
    }
}

fn sampling(args: &Args) -> Result<Sampling> {
    Ok(if args.num("exhaustive", 0u8)? != 0 { Sampling::Exhaustive } else { Sampling::default() })
}

fn tower(op: &str, args: &Args) -> Result<String> {
    let field = args.field()?;
    match op {
        "project" => {
            let g = diffeo(args, args.positional(0, "function spec")?, "g", field)?;
            let level = level_project(&g, args.num("k", 1)?, sampling(args)?)?;
            Ok(if args.num("oneline", 0u8)? != 0 { level.one_line() } else { level.to_string() })
        }
        "check" => {
            let f = diffeo(args, args.require("f")?, "f", field)?;
            let g = diffeo(args, args.require("g")?, "g", field)?;
            Ok(json(&functoriality_check(&f, &g, args.num("k", 1)?)?))
        }
        "witness" => {
            let p = args.p()?;
            let k = args.num("k", 1)?;
            let prec = args.prec()?;
            let f = FieldDescriptor::padic(p)?;
            let spec = match args.get("e") {
                Some(_) => WitnessSpec::flat(Lfe::from_int(f, args.num("a", p as i64)?, prec), args.num("e", 1)?),
                None => WitnessSpec::default_for(f, k, prec),
            };
            Ok(json(&witness_flat_polynomial(p, k, &spec, prec)?.1))
        }
        "commutators" => {
            let n = args.num("n", 5usize)?;
            let sigma = parse_cycles(args.positional(0, "permutation in cycle notation")?, n).map_err(|e| in_arg("σ", e))?;
            let pairs = commutator_decompose(&sigma)?;
            let mut out: Vec<String> = pairs.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
            let ok = commutator_product(n, &pairs) == sigma;
            out.push(format!("product {} {}", if ok { "matches" } else { "differs from" }, sigma));
            Ok(out.join("\n"))
        }
        "thread" => {
            let g = diffeo(args, args.positional(0, "function spec")?, "g", field)?;
            let thread = thread_of(&g, args.num("k0", 1)?, args.num("top", 3)?, sampling(args)?)?;
            Ok(thread.levels.iter().map(|l| format!("k={}: {l}", l.level)).collect::<Vec<_>>().join("\n"))
        }
        _ => Err(Error::InvalidArgument(format!("unknown tower operation '{op}'"))),
    }
}

#[derive(Serialize)]
struct CheckLine<'a> {
    status: &'static str,
    margin: i64,
    identity: &'a str,
    n: usize,
    lhs: &'a [String],
    rhs: &'a [String],
}

fn check_line(r: &CheckReport) -> String {
    json(&CheckLine {
        status: if r.pass { "PASS" } else { "FAIL" },
        margin: r.margin,
        identity: &r.identity,
        n: r.n,
        lhs: &r.lhs,
        rhs: &r.rhs,
    })
}

fn calculus(op: &str, args: &Args) -> Result<String> {
    let field = args.field()?;
    let prec = args.prec()?;
    let n = args.num("n", 1usize)?;
    let mut rng = fixtures::rng(args.num("seed", args.defaults.seed)?);
    let scalar = |key: &str, dim: usize| -> Result<FnRepr> {
        Ok(FnRepr::scalar_poly(field, spec(args, args.require(key)?, key, field, Some(dim))?))
    };
    match op {
        "leibniz" => {
            let pt = fixtures::phi_point(&mut rng, field, 1, n, prec);
            Ok(check_line(&leibniz_check(&scalar("f", 1)?, &scalar("g", 1)?, &CheckPoint::Phi(pt))?))
        }
        "multi" => {
            let fs = args
                .require("fs")?
                .split(';')
                .map(|s| Ok(FnRepr::scalar_poly(field, spec(args, s, "fs", field, Some(1))?)))
                .collect::<Result<Vec<_>>>()?;
            let pt = fixtures::phi_point(&mut rng, field, 1, n, prec);
            Ok(check_line(&leibniz_multi_check(&fs, &CheckPoint::Phi(pt))?))
        }
        "chain" => {
            let coords: Vec<&str> = args.require("u")?.split(';').collect();
            let inner = FnRepr::polynomial(
                field,
                Domain::whole(1),
                coords.iter().map(|s| spec(args, s, "u", field, Some(1))).collect::<Result<_>>()?,
            );
            let pt = fixtures::phi_point(&mut rng, field, 1, n, prec);
            Ok(check_line(&chain_check(&scalar("f", coords.len())?, &inner, &CheckPoint::Phi(pt))?))
        }
        "phi" => {
            let f = scalar("f", 1)?;
            let pt = fixtures::phi_point(&mut rng, field, 1, n, prec);
            let v = phi_eval(&f, &pt)?;
            Ok(json(&serde_json::json!({
                "x": pt.x.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "t": pt.t.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "value": v.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            })))
        }
        "note2" => {
            let t = note2_table(n);
            Ok(json(&serde_json::json!({
                "level": t.level, "x_slots": t.x_slots, "scalar_slots": t.scalar_slots,
                "x_slot": t.x_slot, "v_slots": t.v_slots, "t_slots": t.t_slots,
            })))
        }
        _ => Err(Error::InvalidArgument(format!("unknown calculus operation '{op}'"))),
    }
}

/// `S`, `T` or `Omega` as CSV with a header row.
pub fn tables(kind: &str, args: &Args) -> Result<String> {
    match kind {
        "S" | "T" => {
            let n = args.num("N", 8usize)?;
            Ok(stirling_tables(n)?.to_csv(kind.chars().next().unwrap()))
        }
        "Omega" => {
            let k_max = args.num("k", 3usize)?;
            let n = args.num("n", 2usize)?;
            let head: Vec<String> = (1..=n).map(|i| format!("m_{i}")).collect();
            let mut out = format!("k,{},Omega\n", head.join(","));
            for k in 0..=k_max {
                let mut m = vec![0usize; n];
                loop {
                    let row: Vec<String> = m.iter().map(|v| v.to_string()).collect();
                    out.push_str(&format!("{k},{},{}\n", row.join(","), omega(k, &m)?));
                    let mut i = n;
                    while i > 0 && m[i - 1] == k {
                        m[i - 1] = 0;
                        i -= 1;
                    }
                    if i == 0 {
                        break;
                    }
                    m[i - 1] += 1;
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidArgument(format!("unknown table '{kind}' (S, T or Omega)"))),
    }
}

fn oneparam(op: &str, args: &Args) -> Result<String> {
    let p = args.p()?;
    let u = args.num("u", args.defaults.u)?;
    let field = FieldDescriptor::laurent(p, u)?;
    let prec = args.prec()?;
    let s = args.num("s", 1u32)?;
    match op {
        "ball-group" => Ok(json(&ball_group(s, args.num("sv", s + 1)?, p, u)?.summary())),
        "eta" => {
            let group = Arc::new(ball_group(s, args.num("sv", s + 1)?, p, u)?);
            let x0 = group.index_of_element(&element(args, args.require("x0")?, field)?)?;
            let n = args.num("n", p as usize)?;
            let perm = parse_cycles(args.require("sigma")?, n).map_err(|e| in_arg("sigma", e))?;
            let points = (0..n as u64).map(|i| vec![i]).collect();
            let sigma = LevelPermutation { perm, ..LevelPermutation::identity(field, 1, points) };
            let level = eta_construct(&sigma, x0, group)?;
            let table: Vec<String> = level.describe().into_iter().map(|(x, e)| format!("{x} -> {e}")).collect();
            Ok(format!("{}\n{}", json(&level.check_conditions()), table.join("\n")))
        }
        "lift" => {
            let g = diffeo(args, args.require("g")?, "g", field)?;
            let plan = args
                .require("plan")?
                .split(',')
                .map(|item| {
                    let (q, sv) = item.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("plan item '{item}' is not q:s_v")))?;
                    Ok((
                        q.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad level '{q}'")))?,
                        sv.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad s_v '{sv}'")))?,
                    ))
                })
                .collect::<Result<Vec<(u32, u32)>>>()?;
            let x0 = element(args, args.require("x0")?, field)?;
            let levels = eta_tower(&g, s, &plan, &x0)?;
            Ok(json(&lift_check(&levels)?))
        }
        "obstruction" => {
            let g = match args.get("g") {
                Some(src) => diffeo(args, src, "g", field)?,
                None => monomial_perturbation(field, &Lfe::uniformizer(field, prec), args.num("l", 2)?, prec)?,
            };
            let mut rng = fixtures::rng(args.num("seed", args.defaults.seed)?);
            let xs: Vec<Lfe> = (0..args.num("samples", 100usize)?).map(|_| fixtures::integer(&mut rng, field, prec)).collect();
            Ok(json(&additive_obstruction(&g, &xs, DEGREE_BOUND, prec)?))
        }
        "condition-i" => {
            let g = diffeo(args, args.require("g")?, "g", field)?;
            let mut rng = fixtures::rng(args.num("seed", args.defaults.seed)?);
            let pts: Vec<Vec<Lfe>> =
                (0..args.num("samples", 2 * p as usize)?).map(|_| vec![fixtures::integer(&mut rng, field, prec)]).collect();
            Ok(json(&condition_i_check(&g, &pts)?))
        }
        _ => Err(Error::InvalidArgument(format!("unknown oneparam operation '{op}'"))),
    }
}

fn loop_class(args: &Args, key: &str, n: usize, cap: Option<usize>) -> Result<LoopClass> {
    LoopClass::new(n, 0, list(args.get(key).unwrap_or(""), key)?, cap)
}

fn loops(op: &str, args: &Args) -> Result<String> {
    let m = args.num("m", 3usize)?;
    let n = args.num("n", 2usize)?;
    let cap = if args.num("unbounded", 0u8)? != 0 { None } else { Some(m.saturating_sub(1)) };
    match op {
        "classes" => {
            if let Some(table) = args.get("map") {
                let f = crate::loops::PinnedMap::new(list(table, "map")?, 0, n, 0)?;
                return Ok(class_of(&f)?.to_string());
            }
            let classes = all_classes(m, n);
            let mut out: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
            out.push(format!("{} classes", classes.len()));
            Ok(out.join("\n"))
        }
        "wedge" => {
            let a = loop_class(args, "a", n, cap)?;
            let b = loop_class(args, "b", n, cap)?;
            let slots = wedge_slots(&a, &b);
            let chi = match args.get("chi") {
                None | Some("identity") => ChiSpec::identity(slots),
                Some("reversed") => ChiSpec::reversed(slots),
                Some("interleaved") => ChiSpec::interleaved(slots),
                Some(order) => ChiSpec(list(order, "chi")?),
            };
            Ok(wedge(&a, &b, &chi)?.to_string())
        }
        "group" => {
            let rank = group_rank(n);
            match args.get("a") {
                Some(_) => Ok(format!("{}\n{}", grothendieck(&loop_class(args, "a", n, None)?), json(&rank))),
                None => Ok(json(&rank)),
            }
        }
        "thread" => {
            let p = args.p()?;
            let values: Vec<i64> = list(args.require("values")?, "values")?;
            let top = args.num("k", 3u32)?;
            let levels = (1..=top).map(|k| Ok(grothendieck(&class_of(&project_family(&values, 0, p, k)?)?))).collect::<Result<Vec<_>>>()?;
            let maps: Vec<Vec<usize>> = (1..top).map(|k| reduction_map(p, k)).collect();
            Ok(json(&loop_thread_check(&levels, &maps, p, args.num("digits", 8usize)?)?))
        }
        _ => Err(Error::InvalidArgument(format!("unknown loop operation '{op}'"))),
    }
}
