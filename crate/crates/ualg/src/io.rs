//! JSON file formats.
//!
//! - algebra: `{"signature":[["name",arity],..], "size":n,
//!   "tables":{"name":[flat row-major],..}}`; the flat index of a tuple
//!   `(a_1..a_k)` is `Σ a_i·n^(k-i)`;
//! - ordered algebra: the same plus `"leq":[[a,b],..]` (reflexive pairs may
//!   be omitted; transitive closure is applied on load, antisymmetry
//!   checked);
//! - metric: `{"size":n, "d":[["p/q"|"inf",..],..]}`, each row full or the
//!   upper triangle from (or just past) the diagonal, symmetry completed on
//!   load; quantitative algebra: `{"algebra":{..}, "metric":{..}}`;
//! - equation: `{"vars":["x","y"], "lhs":"..", "rhs":".."}` in term syntax;
//!   sequences and axiom sets are JSON arrays of equations; quantitative
//!   equations add `"epsilon":"p/q"`;
//! - clustered equation: `{"vars":[..], "clusters":[[..]],
//!   "conditions":[["x","y","1/5"],..], "conclusion":["s","t","2/5"],
//!   "c":3}` (`"c":"omega"` for the unbounded form);
//! - proofs: nested `{"rule":"Trans", "conclusion":{..}, "children":[..]}`,
//!   with `"symbol"` on Cong, `"index"` on Axiom, and `"subst":{"x":"f(x)"}`
//!   keyed by the premise's variables on Subst;
//! - quantitative surjections: `{"dom":<quant algebra>, "cod":<quant
//!   algebra>, "map":[..]}`.
//!
//! Equation files carry no signature of their own; where no algebra file
//! pins one down, the signature is inferred from the terms (an applied
//! identifier is an operation of that arity, a bare identifier outside the
//! variable list a constant) and may be extended with an explicit
//! `[["name",arity],..]` signature file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::eqlogic::{Proof, Rule};
use crate::error::Error;
use crate::finalg::{Congruence, FiniteAlgebra};
use crate::ordalg::{OrderedAlgebra, Relation, StablePreorder, TermInequation};
use crate::quantalg::{
    CParam, ClusteredEquation, ExtMetric, QRule, QuantAlgebra, QuantCongruence, QuantEquation,
    QuantHomomorphism, QuantProof,
};
use crate::ratext::Ext;
use crate::sigterm::{parse_term, Signature, Substitution, VarSet};
use crate::variety::{EquationSequence, FreeAlgebraWitness, TermEquation};
use crate::Result;

fn bad_json(e: serde_json::Error) -> Error {
    Error::MalformedInput(format!("invalid JSON: {e}"))
}

// ---------------------------------------------------------------------------
// algebras

#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub signature: Vec<(String, usize)>,
    pub size: usize,
    pub tables: BTreeMap<String, Vec<usize>>,
}

pub fn algebra_from_value(v: &Value) -> Result<FiniteAlgebra> {
    let file: AlgebraFile = serde_json::from_value(v.clone()).map_err(bad_json)?;
    let sig = Signature::new(file.signature)?;
    let mut tables = Vec::with_capacity(sig.len());
    for (_, name, _) in sig.iter() {
        let table = file
            .tables
            .get(name)
            .ok_or_else(|| Error::malformed(format!("missing table for `{name}`")))?;
        tables.push(table.clone());
    }
    for name in file.tables.keys() {
        if sig.lookup(name).is_none() {
            return Err(Error::malformed(format!(
                "table for `{name}` has no symbol in the signature"
            )));
        }
    }
    FiniteAlgebra::new(sig, file.size, tables)
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    algebra_from_value(&serde_json::from_str(text).map_err(bad_json)?)
}

pub fn algebra_to_value(a: &FiniteAlgebra) -> Value {
    let tables: BTreeMap<String, Vec<usize>> = a
        .signature()
        .iter()
        .map(|(sym, name, _)| (name.to_string(), a.table(sym).to_vec()))
        .collect();
    serde_json::json!({
        "signature": a.signature().symbols(),
        "size": a.size(),
        "tables": tables,
    })
}

// ---------------------------------------------------------------------------
// ordered algebras

pub fn parse_ordered_algebra(text: &str) -> Result<OrderedAlgebra> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let base = algebra_from_value(&v)?;
    let pairs: Vec<(usize, usize)> = match v.get("leq") {
        Some(leq) => serde_json::from_value(leq.clone()).map_err(bad_json)?,
        None => Vec::new(),
    };
    let mut rel = Relation::from_pairs(base.size(), &pairs)?;
    rel.close_transitively();
    OrderedAlgebra::new(base, rel)
}

pub fn ordered_algebra_to_value(a: &OrderedAlgebra) -> Value {
    let mut v = algebra_to_value(a.base());
    let pairs: Vec<(usize, usize)> = a
        .leq()
        .pairs()
        .into_iter()
        .filter(|(x, y)| x != y)
        .collect();
    v["leq"] = serde_json::json!(pairs);
    v
}

// ---------------------------------------------------------------------------
// metrics and quantitative algebras

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricFile {
    pub size: usize,
    pub d: Vec<Vec<Ext>>,
}

/// Accepts full rows, rows from the diagonal (`n-i` entries), or rows from
/// just past the diagonal (`n-i-1` entries); completes symmetry.
pub fn metric_from_file(file: MetricFile) -> Result<ExtMetric> {
    let n = file.size;
    if file.d.len() != n {
        return Err(Error::malformed(format!(
            "expected {n} metric rows, got {}",
            file.d.len()
        )));
    }
    let mut full = vec![vec![Ext::zero(); n]; n];
    let mut starts = vec![0usize; n];
    for (i, row) in file.d.iter().enumerate() {
        let start = if row.len() == n {
            0
        } else if row.len() == n - i {
            i
        } else if row.len() == n - i - 1 {
            i + 1
        } else {
            return Err(Error::malformed(format!(
                "metric row {i} has {} entries; expected {n}, {} or {}",
                row.len(),
                n - i,
                n.saturating_sub(i + 1)
            )));
        };
        starts[i] = start;
        for (k, value) in row.iter().enumerate() {
            full[i][start + k] = value.clone();
        }
    }
    // complete entries the row never provided from the upper triangle
    for i in 0..n {
        for j in 0..starts[i] {
            if j != i {
                full[i][j] = full[j][i].clone();
            }
        }
    }
    ExtMetric::new(full)
}

pub fn parse_quant_algebra(text: &str) -> Result<QuantAlgebra> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    quant_algebra_from_value(&v)
}

pub fn quant_algebra_from_value(v: &Value) -> Result<QuantAlgebra> {
    let alg_value = v
        .get("algebra")
        .ok_or_else(|| Error::malformed("missing \"algebra\" field"))?;
    let base = algebra_from_value(alg_value)?;
    let metric_value = v
        .get("metric")
        .ok_or_else(|| Error::malformed("missing \"metric\" field"))?;
    let mut metric_value = metric_value.clone();
    if metric_value.get("size").is_none() {
        metric_value["size"] = serde_json::json!(base.size());
    }
    let file: MetricFile = serde_json::from_value(metric_value).map_err(bad_json)?;
    let metric = metric_from_file(file)?;
    QuantAlgebra::new(base, metric)
}

pub fn quant_algebra_to_value(a: &QuantAlgebra) -> Value {
    serde_json::json!({
        "algebra": algebra_to_value(a.base()),
        "metric": {
            "size": a.size(),
            "d": a.metric().rows(),
        },
    })
}

pub fn parse_quant_homomorphism(text: &str) -> Result<QuantHomomorphism> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let dom = quant_algebra_from_value(
        v.get("dom")
            .ok_or_else(|| Error::malformed("missing \"dom\" field"))?,
    )?;
    let cod = quant_algebra_from_value(
        v.get("cod")
            .ok_or_else(|| Error::malformed("missing \"cod\" field"))?,
    )?;
    let map: Vec<usize> = serde_json::from_value(
        v.get("map")
            .ok_or_else(|| Error::malformed("missing \"map\" field"))?
            .clone(),
    )
    .map_err(bad_json)?;
    QuantHomomorphism::new(dom, cod, map)
}

// ---------------------------------------------------------------------------
// equations

#[derive(Debug, Serialize, Deserialize)]
pub struct EquationFile {
    pub vars: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

pub fn equation_from_file(file: &EquationFile, sig: &Signature) -> Result<TermEquation> {
    let vars = VarSet::new(file.vars.clone())?;
    let lhs = parse_term(&file.lhs, sig, &vars)?;
    let rhs = parse_term(&file.rhs, sig, &vars)?;
    Ok(TermEquation::new(vars, lhs, rhs))
}

pub fn parse_equation(text: &str, sig: &Signature) -> Result<TermEquation> {
    let file: EquationFile = serde_json::from_str(text).map_err(bad_json)?;
    equation_from_file(&file, sig)
}

pub fn parse_equation_sequence(text: &str, sig: &Signature) -> Result<EquationSequence> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let files: Vec<EquationFile> = if v.is_array() {
        serde_json::from_value(v).map_err(bad_json)?
    } else {
        vec![serde_json::from_value(v).map_err(bad_json)?]
    };
    let items = files
        .iter()
        .map(|f| equation_from_file(f, sig))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquationSequence { items })
}

pub fn equation_to_value(eq: &TermEquation, sig: &Signature) -> Value {
    serde_json::json!({
        "vars": eq.vars.names(),
        "lhs": eq.lhs.display(sig, &eq.vars).to_string(),
        "rhs": eq.rhs.display(sig, &eq.vars).to_string(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QuantEquationFile {
    pub vars: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub epsilon: Ext,
}

pub fn quant_equation_from_file(file: &QuantEquationFile, sig: &Signature) -> Result<QuantEquation> {
    let vars = VarSet::new(file.vars.clone())?;
    let lhs = parse_term(&file.lhs, sig, &vars)?;
    let rhs = parse_term(&file.rhs, sig, &vars)?;
    Ok(QuantEquation::new(vars, lhs, rhs, file.epsilon.clone()))
}

pub fn quant_equation_to_value(eq: &QuantEquation, sig: &Signature) -> Value {
    serde_json::json!({
        "vars": eq.vars.names(),
        "lhs": eq.lhs.display(sig, &eq.vars).to_string(),
        "rhs": eq.rhs.display(sig, &eq.vars).to_string(),
        "epsilon": eq.epsilon,
    })
}

// ---------------------------------------------------------------------------
// signature inference

/// Scans term texts, classifying identifiers: applied names are operations
/// of the applied arity, bare names outside the variable list are constants.
/// Conflicting arities are an error.
struct SigInference {
    arities: BTreeMap<String, usize>,
}

impl SigInference {
    fn new() -> Self {
        SigInference {
            arities: BTreeMap::new(),
        }
    }

    fn record(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.arities.get(name) {
            Some(&known) if known != arity => Err(Error::malformed(format!(
                "`{name}` used with arity {arity} but declared or used with {known}"
            ))),
            _ => {
                self.arities.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    fn scan(&mut self, text: &str, vars: &[String]) -> Result<()> {
        // tokenize exactly like the term parser
        let mut tokens: Vec<String> = Vec::new();
        let mut ident = String::new();
        for ch in text.chars() {
            match ch {
                '(' | ')' | ',' => {
                    if !ident.is_empty() {
                        tokens.push(std::mem::take(&mut ident));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !ident.is_empty() {
                        tokens.push(std::mem::take(&mut ident));
                    }
                }
                c => ident.push(c),
            }
        }
        if !ident.is_empty() {
            tokens.push(ident);
        }
        // count direct arguments of each application by paren depth;
        // `prev_ident` holds a pending identifier, `Some("")` marks a just
        // completed subterm (so `f()` and `f(x)` stay distinguishable)
        let mut stack: Vec<(String, usize)> = Vec::new(); // (symbol, commas so far)
        let mut prev_ident: Option<String> = None;
        for tok in tokens {
            match tok.as_str() {
                "(" => {
                    let name = prev_ident.take().filter(|n| !n.is_empty()).ok_or_else(
                        || Error::malformed(format!("stray `(` in `{text}`")),
                    )?;
                    stack.push((name, 0));
                }
                ")" => {
                    let arg_present = match prev_ident.take() {
                        Some(prev) => {
                            if !prev.is_empty() && !vars.iter().any(|v| v == &prev) {
                                self.record(&prev, 0)?;
                            }
                            true
                        }
                        None => false,
                    };
                    let (name, commas) = stack
                        .pop()
                        .ok_or_else(|| Error::malformed(format!("stray `)` in `{text}`")))?;
                    if commas > 0 && !arg_present {
                        return Err(Error::malformed(format!("empty argument in `{text}`")));
                    }
                    let arity = if arg_present { commas + 1 } else { 0 };
                    self.record(&name, arity)?;
                    prev_ident = Some(String::new());
                }
                "," => {
                    match prev_ident.take() {
                        Some(prev) => {
                            if !prev.is_empty() && !vars.iter().any(|v| v == &prev) {
                                self.record(&prev, 0)?;
                            }
                        }
                        None => {
                            return Err(Error::malformed(format!(
                                "empty argument in `{text}`"
                            )))
                        }
                    }
                    let top = stack
                        .last_mut()
                        .ok_or_else(|| Error::malformed(format!("stray `,` in `{text}`")))?;
                    top.1 += 1;
                }
                name => {
                    if let Some(prev) = prev_ident.take() {
                        if !prev.is_empty() && !vars.iter().any(|v| v == &prev) {
                            self.record(&prev, 0)?;
                        }
                    }
                    prev_ident = Some(name.to_string());
                }
            }
        }
        if let Some(prev) = prev_ident.take() {
            if !prev.is_empty() && !vars.iter().any(|v| v == &prev) {
                self.record(&prev, 0)?;
            }
        }
        if !stack.is_empty() {
            return Err(Error::malformed(format!("unbalanced parens in `{text}`")));
        }
        Ok(())
    }

    fn finish(self) -> Result<Signature> {
        Signature::new(self.arities.into_iter().collect())
    }
}

/// Explicit signature file: `[["name",arity],..]` or
/// `{"signature":[["name",arity],..]}`.
pub fn parse_signature(text: &str) -> Result<Vec<(String, usize)>> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let inner = v.get("signature").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(bad_json)
}

/// Parses an axiom list (array or single equation), inferring the signature
/// from the texts plus optional extra declarations.
pub fn parse_equations_inferring(
    text: &str,
    extra: &[(String, usize)],
) -> Result<(Signature, Vec<TermEquation>)> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let files: Vec<EquationFile> = if v.is_array() {
        serde_json::from_value(v).map_err(bad_json)?
    } else {
        vec![serde_json::from_value(v).map_err(bad_json)?]
    };
    let mut inference = SigInference::new();
    for (name, arity) in extra {
        inference.record(name, *arity)?;
    }
    for f in &files {
        inference.scan(&f.lhs, &f.vars)?;
        inference.scan(&f.rhs, &f.vars)?;
    }
    let sig = inference.finish()?;
    let eqs = files
        .iter()
        .map(|f| equation_from_file(f, &sig))
        .collect::<Result<Vec<_>>>()?;
    Ok((sig, eqs))
}

/// Same for quantitative axiom lists.
pub fn parse_quant_equations_inferring(
    text: &str,
    extra: &[(String, usize)],
) -> Result<(Signature, Vec<QuantEquation>)> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    let files: Vec<QuantEquationFile> = if v.is_array() {
        serde_json::from_value(v).map_err(bad_json)?
    } else {
        vec![serde_json::from_value(v).map_err(bad_json)?]
    };
    let mut inference = SigInference::new();
    for (name, arity) in extra {
        inference.record(name, *arity)?;
    }
    for f in &files {
        inference.scan(&f.lhs, &f.vars)?;
        inference.scan(&f.rhs, &f.vars)?;
    }
    let sig = inference.finish()?;
    let eqs = files
        .iter()
        .map(|f| quant_equation_from_file(f, &sig))
        .collect::<Result<Vec<_>>>()?;
    Ok((sig, eqs))
}

/// Parses an axiom list together with a goal equation under one inferred
/// signature (plus optional extra declarations).
pub fn parse_entailment_input(
    axioms_text: &str,
    goal_text: &str,
    extra: &[(String, usize)],
) -> Result<(Signature, Vec<TermEquation>, TermEquation)> {
    let axioms: Value = serde_json::from_str(axioms_text).map_err(bad_json)?;
    let goal: Value = serde_json::from_str(goal_text).map_err(bad_json)?;
    let mut combined = match axioms {
        Value::Array(items) => items,
        single => vec![single],
    };
    combined.push(goal);
    let text = serde_json::to_string(&Value::Array(combined)).map_err(bad_json)?;
    let (sig, mut eqs) = parse_equations_inferring(&text, extra)?;
    let goal = eqs.pop().expect("goal appended");
    Ok((sig, eqs, goal))
}

/// Quantitative version of [`parse_entailment_input`].
pub fn parse_quant_entailment_input(
    axioms_text: &str,
    goal_text: &str,
    extra: &[(String, usize)],
) -> Result<(Signature, Vec<QuantEquation>, QuantEquation)> {
    let axioms: Value = serde_json::from_str(axioms_text).map_err(bad_json)?;
    let goal: Value = serde_json::from_str(goal_text).map_err(bad_json)?;
    let mut combined = match axioms {
        Value::Array(items) => items,
        single => vec![single],
    };
    combined.push(goal);
    let text = serde_json::to_string(&Value::Array(combined)).map_err(bad_json)?;
    let (sig, mut eqs) = parse_quant_equations_inferring(&text, extra)?;
    let goal = eqs.pop().expect("goal appended");
    Ok((sig, eqs, goal))
}

// ---------------------------------------------------------------------------
// clustered equations

#[derive(Debug, Serialize, Deserialize)]
pub struct ClusteredEquationFile {
    pub vars: Vec<String>,
    #[serde(default)]
    pub clusters: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub conditions: Vec<(String, String, Ext)>,
    pub conclusion: (String, String, Ext),
    pub c: Value,
}

pub fn parse_clustered_equation(text: &str, sig: &Signature) -> Result<ClusteredEquation> {
    let file: ClusteredEquationFile = serde_json::from_str(text).map_err(bad_json)?;
    let vars = VarSet::new(file.vars.clone())?;
    let c = match &file.c {
        Value::Number(n) => CParam::finite(n.as_u64().ok_or_else(|| {
            Error::malformed("c must be a nonnegative integer or \"omega\"")
        })? as usize)?,
        Value::String(s) if s == "omega" || s == "w" || s == "ω" => CParam::Omega,
        other => {
            return Err(Error::malformed(format!(
                "c must be an integer ≥ 2 or \"omega\", got {other}"
            )))
        }
    };
    let lookup = |name: &str| {
        vars.lookup(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };
    let clusters = match &file.clusters {
        Some(cs) => cs
            .iter()
            .map(|cluster| cluster.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
        // default: each variable is its own cluster
        None => (0..vars.len()).map(|i| vec![i]).collect(),
    };
    let conditions = file
        .conditions
        .iter()
        .map(|(x, y, eps)| Ok((lookup(x)?, lookup(y)?, eps.clone())))
        .collect::<Result<Vec<_>>>()?;
    let lhs = parse_term(&file.conclusion.0, sig, &vars)?;
    let rhs = parse_term(&file.conclusion.1, sig, &vars)?;
    let eq = ClusteredEquation {
        vars,
        clusters,
        conditions,
        lhs,
        rhs,
        epsilon: file.conclusion.2.clone(),
        c,
    };
    eq.validate(sig)?;
    Ok(eq)
}

// ---------------------------------------------------------------------------
// proofs

/// Collects symbol usage from every conclusion and substitution image in a
/// raw proof tree, so proofs can contribute to signature inference.
fn scan_proof_value(v: &Value, inference: &mut SigInference) -> Result<()> {
    let vars: Vec<String> = match v.get("conclusion").and_then(|c| c.get("vars")) {
        Some(names) => serde_json::from_value(names.clone()).map_err(bad_json)?,
        None => Vec::new(),
    };
    if let Some(c) = v.get("conclusion") {
        for side in ["lhs", "rhs"] {
            if let Some(text) = c.get(side).and_then(Value::as_str) {
                inference.scan(text, &vars)?;
            }
        }
    }
    if let Some(Value::Object(map)) = v.get("subst") {
        for image in map.values() {
            if let Some(text) = image.as_str() {
                inference.scan(text, &vars)?;
            }
        }
    }
    if let Some(Value::Array(children)) = v.get("children") {
        for child in children {
            scan_proof_value(child, inference)?;
        }
    }
    Ok(())
}

/// Extends `extra` declarations with every symbol a proof file uses.
pub fn infer_signature_with_proof(
    proof_text: &str,
    extra: &[(String, usize)],
) -> Result<Vec<(String, usize)>> {
    let v: Value = serde_json::from_str(proof_text).map_err(bad_json)?;
    let mut inference = SigInference::new();
    for (name, arity) in extra {
        inference.record(name, *arity)?;
    }
    scan_proof_value(&v, &mut inference)?;
    Ok(inference.finish()?.symbols().to_vec())
}

pub fn parse_proof(text: &str, sig: &Signature) -> Result<Proof> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    proof_from_value(&v, sig, "root")
}

fn proof_from_value(v: &Value, sig: &Signature, path: &str) -> Result<Proof> {
    let err = |reason: String| Error::MalformedProof {
        path: path.to_string(),
        reason,
    };
    let rule_name = v
        .get("rule")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing \"rule\"".into()))?;
    let conclusion_file: EquationFile = serde_json::from_value(
        v.get("conclusion")
            .cloned()
            .ok_or_else(|| err("missing \"conclusion\"".into()))?,
    )
    .map_err(|e| err(format!("bad conclusion: {e}")))?;
    let conclusion = equation_from_file(&conclusion_file, sig)
        .map_err(|e| err(format!("bad conclusion: {e}")))?;
    let children_values: Vec<Value> = match v.get("children") {
        Some(Value::Array(cs)) => cs.clone(),
        None => Vec::new(),
        Some(_) => return Err(err("\"children\" must be an array".into())),
    };
    let children = children_values
        .iter()
        .enumerate()
        .map(|(i, c)| proof_from_value(c, sig, &format!("{path}.children[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let rule = match rule_name {
        "Refl" => Rule::Refl,
        "Sym" => Rule::Sym,
        "Trans" => Rule::Trans,
        "Cong" => {
            let name = v
                .get("symbol")
                .and_then(Value::as_str)
                .ok_or_else(|| err("Cong needs a \"symbol\"".into()))?;
            Rule::Cong(
                sig.lookup(name)
                    .ok_or_else(|| err(format!("unknown symbol `{name}`")))?,
            )
        }
        "Subst" => Rule::Subst(substitution_from_value(
            v.get("subst")
                .ok_or_else(|| err("Subst needs a \"subst\" map".into()))?,
            children
                .first()
                .map(|c| &c.conclusion.vars)
                .ok_or_else(|| err("Subst needs a premise".into()))?,
            &conclusion.vars,
            sig,
            path,
        )?),
        "Axiom" => Rule::Axiom(
            v.get("index")
                .and_then(Value::as_u64)
                .ok_or_else(|| err("Axiom needs an \"index\"".into()))? as usize,
        ),
        other => return Err(err(format!("unknown rule `{other}`"))),
    };
    Ok(Proof {
        rule,
        conclusion,
        children,
    })
}

fn substitution_from_value(
    v: &Value,
    premise_vars: &VarSet,
    node_vars: &VarSet,
    sig: &Signature,
    path: &str,
) -> Result<Substitution> {
    let map: BTreeMap<String, String> =
        serde_json::from_value(v.clone()).map_err(|e| Error::MalformedProof {
            path: path.to_string(),
            reason: format!("bad substitution: {e}"),
        })?;
    let mut images = Vec::with_capacity(premise_vars.len());
    for name in premise_vars.names() {
        let text = map.get(name).ok_or_else(|| Error::MalformedProof {
            path: path.to_string(),
            reason: format!("substitution misses premise variable `{name}`"),
        })?;
        images.push(parse_term(text, sig, node_vars)?);
    }
    for key in map.keys() {
        if premise_vars.lookup(key).is_none() {
            return Err(Error::MalformedProof {
                path: path.to_string(),
                reason: format!("substitution maps `{key}`, not a premise variable"),
            });
        }
    }
    Ok(Substitution::new(images))
}

pub fn proof_to_value(proof: &Proof, sig: &Signature) -> Value {
    let mut v = serde_json::json!({
        "rule": match &proof.rule {
            Rule::Refl => "Refl",
            Rule::Sym => "Sym",
            Rule::Trans => "Trans",
            Rule::Cong(_) => "Cong",
            Rule::Subst(_) => "Subst",
            Rule::Axiom(_) => "Axiom",
        },
        "conclusion": equation_to_value(&proof.conclusion, sig),
        "children": proof.children.iter().map(|c| proof_to_value(c, sig)).collect::<Vec<_>>(),
    });
    match &proof.rule {
        Rule::Cong(sym) => {
            v["symbol"] = serde_json::json!(sig.name(*sym));
        }
        Rule::Axiom(index) => {
            v["index"] = serde_json::json!(index);
        }
        Rule::Subst(sub) => {
            let premise = &proof.children[0].conclusion;
            let map: BTreeMap<String, String> = premise
                .vars
                .names()
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    (
                        name.clone(),
                        sub.image(i)
                            .expect("covers premise vars")
                            .display(sig, &proof.conclusion.vars)
                            .to_string(),
                    )
                })
                .collect();
            v["subst"] = serde_json::json!(map);
        }
        _ => {}
    }
    v
}

pub fn parse_quant_proof(text: &str, sig: &Signature) -> Result<QuantProof> {
    let v: Value = serde_json::from_str(text).map_err(bad_json)?;
    quant_proof_from_value(&v, sig, "root")
}

fn quant_proof_from_value(v: &Value, sig: &Signature, path: &str) -> Result<QuantProof> {
    let err = |reason: String| Error::MalformedProof {
        path: path.to_string(),
        reason,
    };
    let rule_name = v
        .get("rule")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing \"rule\"".into()))?;
    let conclusion_file: QuantEquationFile = serde_json::from_value(
        v.get("conclusion")
            .cloned()
            .ok_or_else(|| err("missing \"conclusion\"".into()))?,
    )
    .map_err(|e| err(format!("bad conclusion: {e}")))?;
    let conclusion = quant_equation_from_file(&conclusion_file, sig)
        .map_err(|e| err(format!("bad conclusion: {e}")))?;
    let children_values: Vec<Value> = match v.get("children") {
        Some(Value::Array(cs)) => cs.clone(),
        None => Vec::new(),
        Some(_) => return Err(err("\"children\" must be an array".into())),
    };
    let children = children_values
        .iter()
        .enumerate()
        .map(|(i, c)| quant_proof_from_value(c, sig, &format!("{path}.children[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let rule = match rule_name {
        "Refl" => QRule::Refl,
        "Sym" => QRule::Sym,
        "Triang" => QRule::Triang,
        "Max" => QRule::Max,
        "Arch" => QRule::Arch,
        "Cong" => {
            let name = v
                .get("symbol")
                .and_then(Value::as_str)
                .ok_or_else(|| err("Cong needs a \"symbol\"".into()))?;
            QRule::Cong(
                sig.lookup(name)
                    .ok_or_else(|| err(format!("unknown symbol `{name}`")))?,
            )
        }
        "Subst" => QRule::Subst(substitution_from_value(
            v.get("subst")
                .ok_or_else(|| err("Subst needs a \"subst\" map".into()))?,
            children
                .first()
                .map(|c| &c.conclusion.vars)
                .ok_or_else(|| err("Subst needs a premise".into()))?,
            &conclusion.vars,
            sig,
            path,
        )?),
        "Axiom" => QRule::Axiom(
            v.get("index")
                .and_then(Value::as_u64)
                .ok_or_else(|| err("Axiom needs an \"index\"".into()))? as usize,
        ),
        other => return Err(err(format!("unknown rule `{other}`"))),
    };
    Ok(QuantProof {
        rule,
        conclusion,
        children,
    })
}

pub fn quant_proof_to_value(proof: &QuantProof, sig: &Signature) -> Value {
    let mut v = serde_json::json!({
        "rule": match &proof.rule {
            QRule::Refl => "Refl",
            QRule::Sym => "Sym",
            QRule::Triang => "Triang",
            QRule::Max => "Max",
            QRule::Arch => "Arch",
            QRule::Cong(_) => "Cong",
            QRule::Subst(_) => "Subst",
            QRule::Axiom(_) => "Axiom",
        },
        "conclusion": quant_equation_to_value(&proof.conclusion, sig),
        "children": proof.children.iter().map(|c| quant_proof_to_value(c, sig)).collect::<Vec<_>>(),
    });
    match &proof.rule {
        QRule::Cong(sym) => {
            v["symbol"] = serde_json::json!(sig.name(*sym));
        }
        QRule::Axiom(index) => {
            v["index"] = serde_json::json!(index);
        }
        QRule::Subst(sub) => {
            let premise = &proof.children[0].conclusion;
            let map: BTreeMap<String, String> = premise
                .vars
                .names()
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    (
                        name.clone(),
                        sub.image(i)
                            .expect("covers premise vars")
                            .display(sig, &proof.conclusion.vars)
                            .to_string(),
                    )
                })
                .collect();
            v["subst"] = serde_json::json!(map);
        }
        _ => {}
    }
    v
}

// ---------------------------------------------------------------------------
// plain data files and certificate rendering

pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    serde_json::from_str(text).map_err(bad_json)
}

pub fn parse_constraints(text: &str) -> Result<Vec<(usize, usize, Ext)>> {
    serde_json::from_str(text).map_err(bad_json)
}

pub fn congruence_to_value(c: &Congruence) -> Value {
    serde_json::json!({ "blocks": c.blocks() })
}

pub fn relation_to_value(r: &StablePreorder) -> Value {
    serde_json::json!({ "rel": r.rel().pairs() })
}

pub fn quant_congruence_to_value(p: &QuantCongruence) -> Value {
    serde_json::json!({ "p": p.rows() })
}

pub fn assignment_to_value(vars: &VarSet, h: &[usize]) -> Value {
    let map: BTreeMap<String, usize> = vars
        .names()
        .iter()
        .zip(h.iter())
        .map(|(n, &v)| (n.clone(), v))
        .collect();
    serde_json::json!(map)
}

pub fn free_algebra_to_value(f: &FreeAlgebraWitness) -> Value {
    let sig = f.algebra.signature();
    let vars = VarSet::canonical(f.generators.len());
    let witness: Vec<String> = f
        .witness_terms
        .iter()
        .map(|t| t.display(sig, &vars).to_string())
        .collect();
    serde_json::json!({
        "algebra": algebra_to_value(&f.algebra),
        "generators": f.generators,
        "witness_terms": witness,
    })
}

pub fn term_equation_with_witness_to_value(
    eq: &TermEquation,
    witness: &[usize],
    sig: &Signature,
) -> Value {
    serde_json::json!({
        "equation": equation_to_value(eq, sig),
        "witness_assignment": assignment_to_value(&eq.vars, witness),
    })
}

pub fn parse_inequation(text: &str, sig: &Signature) -> Result<TermInequation> {
    Ok(TermInequation::new(parse_equation(text, sig)?))
}
