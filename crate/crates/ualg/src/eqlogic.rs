//! Birkhoff's equational deduction system: proof trees, proof checking,
//! bounded proof search, and semantic entailment via finite countermodel
//! search.
//!
//! The rules are (Refl) `⊢ t=t`, (Sym) `s=t ⊢ t=s`, (Trans) `s=t, t=u ⊢
//! s=u`, (Cong) `s_i=t_i ⊢ σ(s⃗)=σ(t⃗)`, (Subst) `s=t ⊢ h(s)=h(t)`, plus
//! axiom references into the ambient set Γ (matched up to renaming of
//! variables by first occurrence).
//!
//! Derivability from Γ is only semi-decidable, so [`semantic_entails`]
//! returns an honest tri-state verdict: a checkable [`Proof`], a finite
//! countermodel with a falsifying assignment, or `Unknown` with the bounds
//! that were exhausted.
//!
//! [`derive()`] searches a bounded term universe: all terms over the goal's
//! variables up to a depth, closed under the rules restricted to that
//! universe. Every merge is recorded in a proof forest, so a successful
//! search reconstructs a proof that [`check_proof`] accepts. Absence of a
//! proof at a given depth does not mean non-entailment.

use std::collections::HashMap;

use crate::error::Error;
use crate::finalg::FiniteAlgebra;
use crate::limits::Limits;
use crate::sigterm::{substitute, Signature, SymbolId, Term, VarSet};
use crate::tuples::{checked_pow, for_each_tuple};
use crate::variety::{satisfies_equation, SatOutcome, TermEquation};
use crate::Result;

/// Proof-tree rule tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Refl,
    Sym,
    Trans,
    Cong(SymbolId),
    Subst(crate::sigterm::Substitution),
    Axiom(usize),
}

/// A derivation tree; every node carries its conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: TermEquation,
    pub children: Vec<Proof>,
}

impl Proof {
    fn node(rule: Rule, conclusion: TermEquation, children: Vec<Proof>) -> Self {
        Proof {
            rule,
            conclusion,
            children,
        }
    }
}

/// Checks every node of a proof tree against the rules. Structural breakage
/// (wrong child count, dangling indices, arity mismatches) raises
/// [`Error::MalformedProof`] with the node path; a well-formed node that is
/// not a correct rule instance yields `false`.
pub fn check_proof(sig: &Signature, proof: &Proof, gamma: &[TermEquation]) -> Result<bool> {
    check_node(sig, proof, gamma, "root")
}

fn malformed(path: &str, reason: impl Into<String>) -> Error {
    Error::MalformedProof {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn check_node(
    sig: &Signature,
    node: &Proof,
    gamma: &[TermEquation],
    path: &str,
) -> Result<bool> {
    let eq = &node.conclusion;
    eq.validate(sig)
        .map_err(|e| malformed(path, format!("bad conclusion: {e}")))?;
    let expected_children = match &node.rule {
        Rule::Refl | Rule::Axiom(_) => 0,
        Rule::Sym | Rule::Subst(_) => 1,
        Rule::Trans => 2,
        Rule::Cong(sym) => {
            if *sym >= sig.len() {
                return Err(malformed(path, format!("unknown symbol id {sym}")));
            }
            sig.arity(*sym)
        }
    };
    if node.children.len() != expected_children {
        return Err(malformed(
            path,
            format!(
                "rule expects {expected_children} premises, found {}",
                node.children.len()
            ),
        ));
    }
    for (i, child) in node.children.iter().enumerate() {
        if !check_node(sig, child, gamma, &format!("{path}.children[{i}]"))? {
            return Ok(false);
        }
    }
    let ok = match &node.rule {
        Rule::Refl => eq.lhs == eq.rhs,
        Rule::Sym => {
            let p = &node.children[0].conclusion;
            p.vars == eq.vars && p.lhs == eq.rhs && p.rhs == eq.lhs
        }
        Rule::Trans => {
            let p = &node.children[0].conclusion;
            let q = &node.children[1].conclusion;
            p.vars == eq.vars
                && q.vars == eq.vars
                && p.lhs == eq.lhs
                && p.rhs == q.lhs
                && q.rhs == eq.rhs
        }
        Rule::Cong(sym) => {
            let lhs_children: Vec<Term> = node
                .children
                .iter()
                .map(|c| c.conclusion.lhs.clone())
                .collect();
            let rhs_children: Vec<Term> = node
                .children
                .iter()
                .map(|c| c.conclusion.rhs.clone())
                .collect();
            node.children.iter().all(|c| c.conclusion.vars == eq.vars)
                && eq.lhs == Term::App(*sym, lhs_children)
                && eq.rhs == Term::App(*sym, rhs_children)
        }
        Rule::Subst(sub) => {
            let p = &node.children[0].conclusion;
            if sub.len() != p.vars.len() {
                return Err(malformed(
                    path,
                    format!(
                        "substitution covers {} variables, premise has {}",
                        sub.len(),
                        p.vars.len()
                    ),
                ));
            }
            for img in sub.images() {
                img.validate(sig, &eq.vars)
                    .map_err(|e| malformed(path, format!("bad substitution image: {e}")))?;
            }
            let l = substitute(&p.lhs, sub).map_err(|e| malformed(path, e.to_string()))?;
            let r = substitute(&p.rhs, sub).map_err(|e| malformed(path, e.to_string()))?;
            l == eq.lhs && r == eq.rhs
        }
        Rule::Axiom(index) => {
            let ax = gamma
                .get(*index)
                .ok_or_else(|| malformed(path, format!("axiom index {index} out of range")))?;
            eq.alpha_eq(ax)
        }
    };
    Ok(ok)
}

/// One merge in the proof forest, between concrete universe terms.
struct EqEdge {
    a: usize,
    b: usize,
    time: usize,
    just: EdgeJust,
}

enum EdgeJust {
    /// `U[a] = U[b]` is the instance of `Γ[index]` under `sub`.
    Axiom {
        index: usize,
        sub: crate::sigterm::Substitution,
    },
    /// `U[a]` and `U[b]` are applications of the same symbol whose children
    /// were pairwise merged before `time`.
    Cong { sym: SymbolId },
}

struct ProofForest {
    parent: Vec<usize>,
    edges: Vec<EqEdge>,
    adj: Vec<Vec<usize>>,
}

impl ProofForest {
    fn new(n: usize) -> Self {
        ProofForest {
            parent: (0..n).collect(),
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn find(&mut self, a: usize) -> usize {
        if self.parent[a] != a {
            let root = self.find(self.parent[a]);
            self.parent[a] = root;
        }
        self.parent[a]
    }

    /// Unions the classes of `a` and `b`, recording the justification.
    /// Returns false if already merged (no edge added).
    fn union(&mut self, a: usize, b: usize, just: EdgeJust) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        let time = self.edges.len();
        self.adj[a].push(time);
        self.adj[b].push(time);
        self.edges.push(EqEdge { a, b, time, just });
        true
    }

    /// Undirected path between `a` and `b` using edges with time < `bound`,
    /// as a list of `(edge index, traversed forward?)`.
    fn path(&self, a: usize, b: usize, bound: usize) -> Option<Vec<(usize, bool)>> {
        if a == b {
            return Some(Vec::new());
        }
        let mut prev: HashMap<usize, (usize, bool)> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(a);
        prev.insert(a, (usize::MAX, true));
        while let Some(v) = queue.pop_front() {
            for &ei in &self.adj[v] {
                let e = &self.edges[ei];
                if e.time >= bound {
                    continue;
                }
                let (next, forward) = if e.a == v { (e.b, true) } else { (e.a, false) };
                if prev.contains_key(&next) {
                    continue;
                }
                prev.insert(next, (ei, forward));
                if next == b {
                    let mut out = Vec::new();
                    let mut cur = b;
                    while cur != a {
                        let (ei, forward) = prev[&cur];
                        out.push((ei, forward));
                        let e = &self.edges[ei];
                        cur = if forward { e.a } else { e.b };
                    }
                    out.reverse();
                    return Some(out);
                }
                queue.push_back(next);
            }
        }
        None
    }
}

/// Universe-indexed prover state.
struct Closure<'a> {
    sig: &'a Signature,
    gamma: &'a [TermEquation],
    vars: VarSet,
    universe: Vec<Term>,
    index: HashMap<Term, usize>,
    /// children indices for application terms
    app_children: Vec<Option<(SymbolId, Vec<usize>)>>,
    forest: ProofForest,
}

impl<'a> Closure<'a> {
    fn new(
        sig: &'a Signature,
        gamma: &'a [TermEquation],
        vars: VarSet,
        depth: usize,
        limits: &Limits,
    ) -> Result<Self> {
        let universe =
            crate::sigterm::enumerate_terms_capped(sig, &vars, depth, limits.max_universe)?;
        let index: HashMap<Term, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let app_children = universe
            .iter()
            .map(|t| match t {
                Term::Var(_) => None,
                Term::App(sym, cs) => Some((
                    *sym,
                    cs.iter().map(|c| index[c]).collect::<Vec<usize>>(),
                )),
            })
            .collect();
        let n = universe.len();
        Ok(Closure {
            sig,
            gamma,
            vars,
            universe,
            index,
            app_children,
            forest: ProofForest::new(n),
        })
    }

    /// Seeds every in-universe instance of every axiom, then saturates under
    /// congruence until a fixpoint.
    fn saturate(&mut self, limits: &Limits) -> Result<()> {
        let n = self.universe.len();
        for (k, ax) in self.gamma.iter().enumerate() {
            ax.validate(self.sig)?;
            let arity = ax.vars.len();
            let work = checked_pow(n, arity)
                .filter(|&w| w <= limits.max_steps)
                .ok_or_else(|| {
                    Error::SizeLimitExceeded(format!(
                        "axiom instantiation needs more than {} substitutions",
                        limits.max_steps
                    ))
                })?;
            let _ = work;
            for_each_tuple(n, arity, |images| {
                let sub = crate::sigterm::Substitution::new(
                    images.iter().map(|&i| self.universe[i].clone()).collect(),
                );
                let l = substitute(&ax.lhs, &sub).expect("total substitution");
                let r = substitute(&ax.rhs, &sub).expect("total substitution");
                if let (Some(&li), Some(&ri)) = (self.index.get(&l), self.index.get(&r)) {
                    self.forest
                        .union(li, ri, EdgeJust::Axiom { index: k, sub });
                }
                Ok::<(), Error>(())
            })?;
        }
        // congruence saturation: group applications by (symbol, child
        // classes); all members of a group merge with the group's first
        loop {
            let mut changed = false;
            let mut groups: HashMap<(SymbolId, Vec<usize>), usize> = HashMap::new();
            for t in 0..n {
                if let Some((sym, children)) = &self.app_children[t] {
                    let key: Vec<usize> =
                        children.iter().map(|&c| self.forest.find(c)).collect();
                    match groups.entry((*sym, key)) {
                        std::collections::hash_map::Entry::Occupied(e) => {
                            let first = *e.get();
                            if self.forest.find(first) != self.forest.find(t) {
                                self.forest.union(first, t, EdgeJust::Cong { sym: *sym });
                                changed = true;
                            }
                        }
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(t);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(())
    }

    fn merged(&mut self, a: usize, b: usize) -> bool {
        self.forest.find(a) == self.forest.find(b)
    }

    fn equation(&self, a: usize, b: usize) -> TermEquation {
        TermEquation::new(
            self.vars.clone(),
            self.universe[a].clone(),
            self.universe[b].clone(),
        )
    }

    /// Proof of `U[a] = U[b]` from edges with time < `bound`.
    fn explain(&self, a: usize, b: usize, bound: usize) -> Proof {
        if a == b {
            return Proof::node(Rule::Refl, self.equation(a, a), Vec::new());
        }
        let path = self
            .forest
            .path(a, b, bound)
            .expect("explain called on merged classes");
        let mut current: Option<Proof> = None;
        let mut pos = a;
        for (ei, forward) in path {
            let edge = &self.forest.edges[ei];
            let step = self.edge_proof(edge);
            let (step, next) = if forward {
                (step, edge.b)
            } else {
                (
                    Proof::node(Rule::Sym, self.equation(edge.b, edge.a), vec![step]),
                    edge.a,
                )
            };
            current = Some(match current {
                None => step,
                Some(acc) => {
                    let conclusion = self.equation(a, next);
                    Proof::node(Rule::Trans, conclusion, vec![acc, step])
                }
            });
            pos = next;
        }
        debug_assert_eq!(pos, b);
        current.expect("nonempty path")
    }

    fn edge_proof(&self, edge: &EqEdge) -> Proof {
        match &edge.just {
            EdgeJust::Axiom { index, sub } => {
                let ax = &self.gamma[*index];
                let axiom_node = Proof::node(Rule::Axiom(*index), ax.clone(), Vec::new());
                Proof::node(
                    Rule::Subst(sub.clone()),
                    self.equation(edge.a, edge.b),
                    vec![axiom_node],
                )
            }
            EdgeJust::Cong { sym } => {
                let (_, ls) = self.app_children[edge.a].as_ref().expect("application");
                let (_, rs) = self.app_children[edge.b].as_ref().expect("application");
                let children = ls
                    .iter()
                    .zip(rs.iter())
                    .map(|(&l, &r)| self.explain(l, r, edge.time))
                    .collect();
                Proof::node(Rule::Cong(*sym), self.equation(edge.a, edge.b), children)
            }
        }
    }
}

/// Bounded proof search. Builds the term universe over the goal's variables
/// up to `depth`, seeds all in-universe axiom instances, closes under the
/// rules, and reconstructs a checkable proof if the goal's sides merge.
/// `None` means "no proof within these bounds", never "not entailed".
pub fn derive(
    sig: &Signature,
    gamma: &[TermEquation],
    goal: &TermEquation,
    depth: usize,
    limits: &Limits,
) -> Result<Option<Proof>> {
    goal.validate(sig)?;
    if goal.lhs.depth().max(goal.rhs.depth()) > depth {
        return Err(Error::malformed(
            "depth bound smaller than the goal's own terms",
        ));
    }
    let mut closure = Closure::new(sig, gamma, goal.vars.clone(), depth, limits)?;
    closure.saturate(limits)?;
    let li = closure.index[&goal.lhs];
    let ri = closure.index[&goal.rhs];
    if !closure.merged(li, ri) {
        return Ok(None);
    }
    let proof = closure.explain(li, ri, usize::MAX);
    debug_assert!(check_proof(sig, &proof, gamma)?);
    Ok(Some(proof))
}

/// Verdict of [`semantic_entails`].
#[derive(Debug, Clone)]
pub enum EntailmentVerdict {
    Proved(Proof),
    Refuted {
        model: FiniteAlgebra,
        assignment: Vec<usize>,
    },
    Unknown {
        max_model_size: usize,
        depth: usize,
    },
}

/// Enumerates all algebras over `sig` with the given carrier size, up to
/// isomorphism (only table encodings that are lexicographically least in
/// their permutation orbit are yielded), in lexicographic order.
pub fn enumerate_models(
    sig: &Signature,
    size: usize,
    limits: &Limits,
    mut visit: impl FnMut(&FiniteAlgebra) -> Result<bool>,
) -> Result<()> {
    let entries: usize = {
        let mut total = 0usize;
        for (_, _, arity) in sig.iter() {
            total += checked_pow(size, arity).ok_or_else(|| {
                Error::SizeLimitExceeded("operation table too large".to_string())
            })?;
        }
        total
    };
    let candidates = checked_pow(size.max(1), entries)
        .filter(|&c| c <= limits.max_steps)
        .ok_or_else(|| {
            Error::SizeLimitExceeded(format!(
                "model enumeration needs more than {} candidates",
                limits.max_steps
            ))
        })?;
    let _ = candidates;
    if size == 0 {
        return Ok(());
    }
    let permutations = permutations(size);
    let mut flat = vec![0usize; entries];
    loop {
        if is_canonical(sig, size, &flat, &permutations) {
            let algebra = algebra_from_flat(sig, size, &flat)?;
            if !visit(&algebra)? {
                return Ok(());
            }
        }
        // next candidate
        let mut pos = entries;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            flat[pos] += 1;
            if flat[pos] < size {
                break;
            }
            flat[pos] = 0;
        }
    }
}

fn algebra_from_flat(sig: &Signature, size: usize, flat: &[usize]) -> Result<FiniteAlgebra> {
    let mut tables = Vec::with_capacity(sig.len());
    let mut offset = 0;
    for (_, _, arity) in sig.iter() {
        let len = checked_pow(size, arity).expect("checked by caller");
        tables.push(flat[offset..offset + len].to_vec());
        offset += len;
    }
    FiniteAlgebra::new(sig.clone(), size, tables)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(&mut current, n, &mut out);
    out.sort();
    out
}

fn heap_permute(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permute(current, k - 1, out);
        if k % 2 == 0 {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

/// Is the flat table encoding lexicographically least within its
/// isomorphism orbit?
fn is_canonical(sig: &Signature, size: usize, flat: &[usize], perms: &[Vec<usize>]) -> bool {
    let mut relabeled = vec![0usize; flat.len()];
    for perm in perms {
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            continue;
        }
        // relabel: table'[π(tuple)] = π(table[tuple])
        let mut offset = 0;
        for (_, _, arity) in sig.iter() {
            let len = checked_pow(size, arity).expect("fits");
            let table = &flat[offset..offset + len];
            let out = &mut relabeled[offset..offset + len];
            let mut tuple = vec![0usize; arity];
            for (f, &v) in table.iter().enumerate() {
                crate::tuples::unflatten(f, size, &mut tuple);
                let image: Vec<usize> = tuple.iter().map(|&a| perm[a]).collect();
                out[crate::tuples::flat_index(&image, size)] = perm[v];
            }
            offset += len;
        }
        if relabeled.as_slice() < flat {
            return false;
        }
    }
    true
}

/// Entailment with certificates: first searches for a countermodel of size
/// ≤ `max_model_size` among all models of Γ (isomorph-pruned,
/// lexicographically least countermodel returned); failing that, attempts a
/// bounded derivation at `depth`. Never returns both.
pub fn semantic_entails(
    sig: &Signature,
    gamma: &[TermEquation],
    goal: &TermEquation,
    max_model_size: usize,
    depth: usize,
    limits: &Limits,
) -> Result<EntailmentVerdict> {
    if max_model_size < 1 {
        return Err(Error::malformed("max_model_size must be at least 1"));
    }
    goal.validate(sig)?;
    for ax in gamma {
        ax.validate(sig)?;
    }
    let mut refutation: Option<(FiniteAlgebra, Vec<usize>)> = None;
    for size in 1..=max_model_size {
        enumerate_models(sig, size, limits, |model| {
            for ax in gamma {
                if !satisfies_equation(model, ax)?.holds() {
                    return Ok(true); // not a model of Γ, keep looking
                }
            }
            if let SatOutcome::Falsified(h) = satisfies_equation(model, goal)? {
                refutation = Some((model.clone(), h));
                return Ok(false); // stop at the first (lex-least) one
            }
            Ok(true)
        })?;
        if refutation.is_some() {
            break;
        }
    }
    if let Some((model, assignment)) = refutation {
        return Ok(EntailmentVerdict::Refuted { model, assignment });
    }
    match derive(sig, gamma, goal, depth, limits)? {
        Some(proof) => Ok(EntailmentVerdict::Proved(proof)),
        None => Ok(EntailmentVerdict::Unknown {
            max_model_size,
            depth,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigterm::{parse_term, Substitution};

    fn eq(sig: &Signature, vars: &[&str], lhs: &str, rhs: &str) -> TermEquation {
        let vs = VarSet::of(vars);
        TermEquation::new(
            vs.clone(),
            parse_term(lhs, sig, &vs).unwrap(),
            parse_term(rhs, sig, &vs).unwrap(),
        )
    }

    #[test]
    fn refl_node_checks() {
        let sig = Signature::of(&[("*", 2)]);
        let e = eq(&sig, &["x", "y"], "*(x,y)", "*(x,y)");
        let p = Proof::node(Rule::Refl, e, vec![]);
        assert!(check_proof(&sig, &p, &[]).unwrap());
    }

    #[test]
    fn subst_over_axiom_checks() {
        let sig = Signature::of(&[("*", 2)]);
        let comm = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        let goal = eq(&sig, &["u", "v"], "*(u,v)", "*(v,u)");
        let axiom = Proof::node(Rule::Axiom(0), comm.clone(), vec![]);
        let sub = Substitution::new(vec![Term::Var(0), Term::Var(1)]);
        let p = Proof::node(Rule::Subst(sub), goal, vec![axiom]);
        assert!(check_proof(&sig, &p, &[comm]).unwrap());
    }

    #[test]
    fn trans_chain_checks() {
        // Γ = {f(x)=x}: conclude f(f(x)) = x via f(f(x)) = f(x) = x
        let sig = Signature::of(&[("f", 1)]);
        let ax = eq(&sig, &["x"], "f(x)", "x");
        let fx = parse_term("f(x)", &sig, &VarSet::of(&["x"])).unwrap();
        let axiom = |concl: TermEquation| Proof::node(Rule::Axiom(0), concl, vec![]);
        let step1 = Proof::node(
            Rule::Subst(Substitution::new(vec![fx])),
            eq(&sig, &["x"], "f(f(x))", "f(x)"),
            vec![axiom(ax.clone())],
        );
        let step2 = Proof::node(
            Rule::Subst(Substitution::new(vec![Term::Var(0)])),
            eq(&sig, &["x"], "f(x)", "x"),
            vec![axiom(ax.clone())],
        );
        let p = Proof::node(
            Rule::Trans,
            eq(&sig, &["x"], "f(f(x))", "x"),
            vec![step1, step2],
        );
        assert!(check_proof(&sig, &p, &[ax]).unwrap());
    }

    #[test]
    fn malformed_child_count_is_an_error() {
        let sig = Signature::of(&[("f", 1)]);
        let e = eq(&sig, &["x"], "x", "x");
        let p = Proof::node(Rule::Sym, e, vec![]);
        assert!(matches!(
            check_proof(&sig, &p, &[]),
            Err(Error::MalformedProof { .. })
        ));
    }

    #[test]
    fn wrong_instance_is_false_not_error() {
        let sig = Signature::of(&[("f", 1)]);
        let e = eq(&sig, &["x"], "f(x)", "x");
        let p = Proof::node(Rule::Refl, e, vec![]);
        assert!(!check_proof(&sig, &p, &[]).unwrap());
    }

    #[test]
    fn derive_refl() {
        let sig = Signature::of(&[("*", 2)]);
        let goal = eq(&sig, &["x"], "*(x,x)", "*(x,x)");
        let p = derive(&sig, &[], &goal, 1, &Limits::default())
            .unwrap()
            .expect("reflexive goal");
        assert_eq!(p.conclusion, goal);
        assert!(check_proof(&sig, &p, &[]).unwrap());
    }

    #[test]
    fn derive_commutativity_instance() {
        let sig = Signature::of(&[("*", 2)]);
        let comm = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        let goal = eq(&sig, &["u", "v"], "*(u,v)", "*(v,u)");
        let gamma = [comm];
        let p = derive(&sig, &gamma, &goal, 1, &Limits::default())
            .unwrap()
            .expect("single substitution step");
        assert_eq!(p.conclusion, goal);
        assert!(check_proof(&sig, &p, &gamma).unwrap());
    }

    #[test]
    fn derive_idempotent_unary() {
        let sig = Signature::of(&[("f", 1)]);
        let ax = eq(&sig, &["x"], "f(x)", "x");
        let goal = eq(&sig, &["x"], "f(f(x))", "x");
        let gamma = [ax];
        let p = derive(&sig, &gamma, &goal, 2, &Limits::default())
            .unwrap()
            .expect("two-step closure");
        assert_eq!(p.conclusion, goal);
        assert!(check_proof(&sig, &p, &gamma).unwrap());
    }

    #[test]
    fn derive_depth_too_small_is_an_error() {
        let sig = Signature::of(&[("f", 1)]);
        let goal = eq(&sig, &["x"], "f(f(x))", "x");
        assert!(derive(&sig, &[], &goal, 1, &Limits::default()).is_err());
    }

    #[test]
    fn derive_absence_is_not_refutation() {
        let sig = Signature::of(&[("*", 2)]);
        let goal = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        assert!(derive(&sig, &[], &goal, 1, &Limits::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn entails_collapse_axiom_proves_everything() {
        let sig = Signature::of(&[("*", 2)]);
        let collapse = eq(&sig, &["x", "y"], "x", "y");
        let goal = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        let gamma = [collapse];
        match semantic_entails(&sig, &gamma, &goal, 3, 1, &Limits::default()).unwrap() {
            EntailmentVerdict::Proved(p) => {
                assert!(check_proof(&sig, &p, &gamma).unwrap())
            }
            other => panic!("expected Proved, got {other:?}"),
        }
    }

    #[test]
    fn entails_refutes_commutativity_with_left_zero() {
        let sig = Signature::of(&[("*", 2)]);
        let goal = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        match semantic_entails(&sig, &[], &goal, 2, 1, &Limits::default()).unwrap() {
            EntailmentVerdict::Refuted { model, assignment } => {
                // lexicographically least canonical countermodel; the
                // left-zero band [0,0,1,1] also refutes but comes later
                assert_eq!(model.table(0), &[0, 0, 1, 0]);
                assert_eq!(assignment, vec![0, 1]);
                let l = crate::sigterm::evaluate(&goal.lhs, &model, &assignment).unwrap();
                let r = crate::sigterm::evaluate(&goal.rhs, &model, &assignment).unwrap();
                assert_ne!(l, r);
            }
            other => panic!("expected Refuted, got {other:?}"),
        }
        // the left-zero band itself is among the countermodels: it satisfies
        // Γ = ∅ and falsifies the goal
        let lz = FiniteAlgebra::new(sig.clone(), 2, vec![vec![0, 0, 1, 1]]).unwrap();
        assert!(!satisfies_equation(&lz, &goal).unwrap().holds());
    }

    #[test]
    fn entails_goal_as_axiom() {
        let sig = Signature::of(&[("*", 2)]);
        let goal = eq(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
        let gamma = [goal.clone()];
        match semantic_entails(&sig, &gamma, &goal, 2, 1, &Limits::default()).unwrap() {
            EntailmentVerdict::Proved(p) => assert!(check_proof(&sig, &p, &gamma).unwrap()),
            other => panic!("expected Proved, got {other:?}"),
        }
    }

    #[test]
    fn model_enumeration_prunes_isomorphs() {
        // one unary symbol, size 2: 4 raw tables, 3 canonical classes
        let sig = Signature::of(&[("f", 1)]);
        let mut count = 0;
        enumerate_models(&sig, 2, &Limits::default(), |_| {
            count += 1;
            Ok(true)
        })
        .unwrap();
        assert_eq!(count, 3);

        // a constant plus a unary map on two points: 8 raw combinations,
        // 4 up to swapping the carrier
        let sig = Signature::of(&[("e", 0), ("f", 1)]);
        let mut count = 0;
        enumerate_models(&sig, 2, &Limits::default(), |_| {
            count += 1;
            Ok(true)
        })
        .unwrap();
        assert_eq!(count, 4);
    }

    #[test]
    fn derive_round_trips_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let limits = Limits::default();
        let sig = Signature::of(&[("c", 0), ("f", 1), ("g", 2)]);
        let vars = VarSet::of(&["x", "y"]);
        let pool: Vec<Term> = crate::sigterm::enumerate_terms(&sig, &vars, 2)
            .into_iter()
            .filter(|t| t.depth() <= 2)
            .collect();
        let mut proved = 0;
        for _ in 0..60 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                pool[rng.gen_range(0..pool.len())].clone()
            };
            let gamma = vec![TermEquation::new(
                vars.clone(),
                pick(&mut rng),
                pick(&mut rng),
            )];
            let goal = TermEquation::new(vars.clone(), pick(&mut rng), pick(&mut rng));
            if let Some(proof) = derive(&sig, &gamma, &goal, 2, &limits).unwrap() {
                proved += 1;
                assert!(check_proof(&sig, &proof, &gamma).unwrap());
                assert_eq!(proof.conclusion, goal);
            }
        }
        assert!(proved > 0, "expected at least one derivable random goal");
    }
}
