//! JSON and LaTeX emission of expression sets.
//!
//! JSON layout: `{"shared": [node...], "roots": [node...]}`. A node is one of
//! `{"const": "p/q"}`, `{"param": name}`, `{"sin": angle}`, `{"cos": angle}`,
//! `{"sum": [node...]}`, `{"product": [node...]}`, `{"quotient": [n, d]}`,
//! `{"neg": node}` or `{"ref": k}`. An angle is
//! `{"terms": [[var, coef]...], "quarter_turns": q}`. Compound nodes used more
//! than once are stored once in `shared`, in dependency order.

use std::collections::HashMap;

use serde_json::{json, Map, Value};

use super::angle::{AngleSum, AngleVar};
use super::expr::{post_order, ExprKind, Rational, ScalarExpr};
use super::SymbolicError;

/// Structural reference counts over the DAG reachable from `roots`, listing
/// distinct nodes in dependency order.
fn shared_nodes(roots: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let mut order: Vec<ScalarExpr> = Vec::new();
    let mut uses: HashMap<ScalarExpr, usize> = HashMap::new();
    for node in post_order(roots) {
        if uses.contains_key(&node) {
            continue;
        }
        for c in node.children() {
            *uses.get_mut(c).expect("child precedes parent") += 1;
        }
        uses.insert(node.clone(), 0);
        order.push(node);
    }
    for r in roots {
        *uses.get_mut(r).unwrap() += 1;
    }
    order
        .into_iter()
        .filter(|n| !n.is_atom() && uses[n] >= 2)
        .collect()
}

fn angle_json(a: &AngleSum) -> Value {
    let terms: Vec<Value> = a.terms().map(|(v, c)| json!([v.name(), c])).collect();
    json!({"terms": terms, "quarter_turns": a.quarter()})
}

fn node_json(e: &ScalarExpr, refs: &HashMap<ScalarExpr, usize>, top: bool) -> Value {
    if !top {
        if let Some(k) = refs.get(e) {
            return json!({ "ref": k });
        }
    }
    let sub = |c: &ScalarExpr| node_json(c, refs, false);
    match e.kind() {
        ExprKind::Const(c) => json!({ "const": c.to_string() }),
        ExprKind::Param(p) => json!({ "param": p }),
        ExprKind::Sin(a) => json!({ "sin": angle_json(a) }),
        ExprKind::Cos(a) => json!({ "cos": angle_json(a) }),
        ExprKind::Sum(xs) => json!({ "sum": xs.iter().map(sub).collect::<Vec<_>>() }),
        ExprKind::Product(xs) => json!({ "product": xs.iter().map(sub).collect::<Vec<_>>() }),
        ExprKind::Quotient(n, d) => json!({ "quotient": [sub(n), sub(d)] }),
        ExprKind::Neg(x) => json!({ "neg": sub(x) }),
    }
}

/// Serializes a list of expressions with common sub-expressions hoisted.
pub fn exprs_to_json(roots: &[ScalarExpr]) -> Value {
    let shared = shared_nodes(roots);
    let mut refs = HashMap::new();
    let mut table = Vec::with_capacity(shared.len());
    for (k, n) in shared.iter().enumerate() {
        table.push(node_json(n, &refs, true));
        refs.insert(n.clone(), k);
    }
    let roots: Vec<Value> = roots.iter().map(|r| node_json(r, &refs, false)).collect();
    json!({ "shared": table, "roots": roots })
}

fn bad(msg: impl Into<String>) -> SymbolicError {
    SymbolicError::Json(msg.into())
}

fn parse_angle(v: &Value) -> Result<AngleSum, SymbolicError> {
    let obj = v.as_object().ok_or_else(|| bad("angle must be an object"))?;
    let mut terms = Vec::new();
    for t in obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("angle.terms must be an array"))?
    {
        let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("angle term must be [name, coef]"))?;
        let name = pair[0].as_str().ok_or_else(|| bad("angle variable must be a string"))?;
        let var = AngleVar::parse(name).ok_or_else(|| bad(format!("unknown angle variable {name}")))?;
        let coef = pair[1].as_i64().ok_or_else(|| bad("angle coefficient must be an integer"))?;
        terms.push((var, coef));
    }
    let q = obj
        .get("quarter_turns")
        .and_then(Value::as_i64)
        .ok_or_else(|| bad("angle.quarter_turns must be an integer"))?;
    Ok(AngleSum::from_terms(terms, q))
}

fn parse_node(v: &Value, shared: &[ScalarExpr]) -> Result<ScalarExpr, SymbolicError> {
    let obj: &Map<String, Value> = v.as_object().ok_or_else(|| bad("node must be an object"))?;
    if obj.len() != 1 {
        return Err(bad("node must have exactly one key"));
    }
    let (key, body) = obj.iter().next().unwrap();
    let list = |b: &Value| -> Result<Vec<ScalarExpr>, SymbolicError> {
        b.as_array()
            .ok_or_else(|| bad(format!("{key} expects an array")))?
            .iter()
            .map(|x| parse_node(x, shared))
            .collect()
    };
    Ok(match key.as_str() {
        "const" => {
            let s = body.as_str().ok_or_else(|| bad("const must be a string"))?;
            ScalarExpr::constant(s.parse::<Rational>().map_err(|_| bad(format!("bad rational {s}")))?)
        }
        "param" => ScalarExpr::param(body.as_str().ok_or_else(|| bad("param must be a string"))?),
        "sin" => ScalarExpr::sin(parse_angle(body)?),
        "cos" => ScalarExpr::cos(parse_angle(body)?),
        "sum" => ScalarExpr::from_kind(ExprKind::Sum(list(body)?)),
        "product" => ScalarExpr::from_kind(ExprKind::Product(list(body)?)),
        "quotient" => {
            let mut xs = list(body)?;
            if xs.len() != 2 {
                return Err(bad("quotient expects [numerator, denominator]"));
            }
            let d = xs.pop().unwrap();
            ScalarExpr::quotient(xs.pop().unwrap(), d)?
        }
        "neg" => ScalarExpr::negate(parse_node(body, shared)?),
        "ref" => {
            let k = body.as_u64().ok_or_else(|| bad("ref must be an index"))? as usize;
            shared.get(k).cloned().ok_or_else(|| bad(format!("dangling ref {k}")))?
        }
        other => return Err(bad(format!("unknown node kind {other}"))),
    })
}

/// Parses the output of [`exprs_to_json`]; shared nodes stay shared.
pub fn exprs_from_json(v: &Value) -> Result<Vec<ScalarExpr>, SymbolicError> {
    let mut shared = Vec::new();
    if let Some(table) = v.get("shared") {
        for n in table.as_array().ok_or_else(|| bad("shared must be an array"))? {
            let e = parse_node(n, &shared)?;
            shared.push(e);
        }
    }
    v.get("roots")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing roots"))?
        .iter()
        .map(|r| parse_node(r, &shared))
        .collect()
}

/// Parses a single standalone node (no shared table).
pub fn expr_from_json(v: &Value) -> Result<ScalarExpr, SymbolicError> {
    parse_node(v, &[])
}

/// LaTeX rendering of named expressions, with auxiliary symbols for shared
/// sub-expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct LatexDocument {
    pub aux: Vec<(String, String)>,
    pub entries: Vec<(String, String)>,
}

impl LatexDocument {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, body) in self.aux.iter().chain(&self.entries) {
            out.push_str(&format!("{name} &= {body} \\\\\n"));
        }
        format!("\\begin{{align*}}\n{out}\\end{{align*}}\n")
    }
}

fn latex_param(p: &str) -> String {
    match p.split_once('_') {
        Some((base, idx)) => format!("{base}_{{{}}}", idx.replace('_', ",")),
        None => p.to_string(),
    }
}

fn latex_const(c: &Rational) -> String {
    let sign = if *c.numer() < 0 { "-" } else { "" };
    let n = c.numer().unsigned_abs();
    if *c.denom() == 1 {
        format!("{sign}{n}")
    } else {
        format!("{sign}\\frac{{{n}}}{{{}}}", c.denom())
    }
}

struct Latex<'a> {
    aux: &'a HashMap<ScalarExpr, String>,
}

impl Latex<'_> {
    fn render(&self, e: &ScalarExpr, top: bool) -> String {
        if !top {
            if let Some(name) = self.aux.get(e) {
                return name.clone();
            }
        }
        match e.kind() {
            ExprKind::Const(c) => latex_const(c),
            ExprKind::Param(p) => latex_param(p),
            ExprKind::Sin(a) => format!("\\sin\\left({}\\right)", a.latex()),
            ExprKind::Cos(a) => format!("\\cos\\left({}\\right)", a.latex()),
            ExprKind::Sum(xs) => {
                let mut out = String::new();
                for (i, x) in xs.iter().enumerate() {
                    match x.kind() {
                        ExprKind::Neg(inner) if i > 0 && !self.aux.contains_key(x) => {
                            out.push_str(" - ");
                            out.push_str(&self.factor(inner));
                        }
                        _ => {
                            if i > 0 {
                                out.push_str(" + ");
                            }
                            out.push_str(&self.render(x, false));
                        }
                    }
                }
                out
            }
            ExprKind::Product(xs) => xs.iter().map(|x| self.factor(x)).collect::<Vec<_>>().join(" "),
            ExprKind::Quotient(n, d) => {
                format!("\\frac{{{}}}{{{}}}", self.render(n, false), self.render(d, false))
            }
            ExprKind::Neg(x) => format!("-{}", self.factor(x)),
        }
    }

    fn factor(&self, e: &ScalarExpr) -> String {
        let s = self.render(e, false);
        let wrap = !self.aux.contains_key(e)
            && matches!(e.kind(), ExprKind::Sum(_) | ExprKind::Neg(_));
        if wrap {
            format!("\\left({s}\\right)")
        } else {
            s
        }
    }
}

/// Renders named expressions; shared compound sub-expressions become `\xi_{k}`.
pub fn to_latex(named: &[(String, ScalarExpr)]) -> LatexDocument {
    let roots: Vec<ScalarExpr> = named.iter().map(|(_, e)| e.clone()).collect();
    let shared = shared_nodes(&roots);
    let mut aux_names = HashMap::new();
    let mut aux = Vec::new();
    for (k, n) in shared.iter().enumerate() {
        let body = Latex { aux: &aux_names }.render(n, true);
        let name = format!("\\xi_{{{}}}", k + 1);
        aux.push((name.clone(), body));
        aux_names.insert(n.clone(), name);
    }
    let r = Latex { aux: &aux_names };
    let entries = named
        .iter()
        .map(|(name, e)| (name.clone(), r.render(e, false)))
        .collect();
    LatexDocument { aux, entries }
}
