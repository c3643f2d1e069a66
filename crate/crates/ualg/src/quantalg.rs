//! Quantitative Σ-algebras over exact extended rationals: pseudometric
//! congruences, metric quotients, c-reflexive quotients, c-clustered
//! equations, and the quantitative deduction system.
//!
//! A quantitative algebra is a finite algebra whose carrier carries an
//! extended metric (distances in `ℚ≥0 ∪ {∞}`) making every operation
//! nonexpansive for the sup-metric on tuples. A congruence here is a
//! pseudometric `p ≤ d` with the same nonexpansiveness property; quotients
//! and congruences determine each other exactly via
//! `d([a],[b]) = p(a,b)`.
//!
//! The deduction system works on bounds `s =_ε t` with rules (Refl) `⊢
//! t =_0 t`, (Sym), (Triang) adding bounds, (Max) strict weakening, (Arch)
//! casting a proved bound down to an attained infimum, (Cong) at a common
//! bound, (Subst), and axiom references. On a finite term universe with
//! finitely many rational constraints every infimum is attained, so the
//! checker accepts (Arch) from one premise with `ε' ≤ ε`, and from no
//! premises when `ε = ∞` (the vacuous infimum).
//!
//! Everything is computed with exact rational arithmetic: the tightening
//! fixpoint in [`quant_congruence_generated`] and [`quant_entails`]
//! terminates because entries decrease on a fixed common-denominator grid,
//! and every improvement records the rule instance that produced it, so a
//! successful entailment check reconstructs a [`QuantProof`] that
//! [`check_quant_proof`] accepts.

use std::collections::HashMap;

use crate::error::Error;
use crate::finalg::{self, FiniteAlgebra};
use crate::limits::Limits;
use crate::ratext::Ext;
use crate::sigterm::{substitute, Signature, Substitution, SymbolId, Term, VarSet};
use crate::tuples::{checked_pow, for_each_tuple};
use crate::variety::TermEquation;
use crate::Result;

/// An extended metric on `{0..n-1}`: symmetric, zero exactly on the
/// diagonal, triangle inequality with ∞-absorbing addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtMetric {
    d: Vec<Vec<Ext>>,
}

impl ExtMetric {
    pub fn new(d: Vec<Vec<Ext>>) -> Result<Self> {
        let n = d.len();
        if d.iter().any(|row| row.len() != n) {
            return Err(Error::malformed("distance matrix is not square"));
        }
        for a in 0..n {
            for b in 0..n {
                if d[a][b] != d[b][a] {
                    return Err(Error::malformed(format!(
                        "distance matrix not symmetric at ({a},{b})"
                    )));
                }
                if (a == b) != d[a][b].is_zero() {
                    return Err(Error::malformed(format!(
                        "distance must be zero exactly on the diagonal, bad at ({a},{b})"
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if d[a][c] > &d[a][b] + &d[b][c] {
                        return Err(Error::malformed(format!(
                            "triangle inequality fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(ExtMetric { d })
    }

    /// The discrete metric: every off-diagonal distance is `value`.
    pub fn uniform(n: usize, value: Ext) -> Result<Self> {
        if value.is_zero() && n > 1 {
            return Err(Error::malformed("uniform distance must be positive"));
        }
        let mut d = vec![vec![Ext::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    d[a][b] = value.clone();
                }
            }
        }
        Ok(ExtMetric { d })
    }

    pub fn size(&self) -> usize {
        self.d.len()
    }

    pub fn dist(&self, a: usize, b: usize) -> &Ext {
        &self.d[a][b]
    }

    pub fn rows(&self) -> &[Vec<Ext>] {
        &self.d
    }
}

/// A finite algebra whose operations are nonexpansive for the sup-metric on
/// tuples. Checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantAlgebra {
    base: FiniteAlgebra,
    metric: ExtMetric,
}

impl QuantAlgebra {
    pub fn new(base: FiniteAlgebra, metric: ExtMetric) -> Result<Self> {
        if metric.size() != base.size() {
            return Err(Error::malformed(format!(
                "metric over {} points, carrier has {}",
                metric.size(),
                base.size()
            )));
        }
        let n = base.size();
        for (sym, name, arity) in base.signature().iter() {
            let mut bad = None;
            for_each_tuple(n, arity, |u| {
                let mut inner = None;
                for_each_tuple(n, arity, |v| {
                    let bound = u
                        .iter()
                        .zip(v.iter())
                        .map(|(&a, &b)| metric.dist(a, b).clone())
                        .fold(Ext::zero(), |acc, x| acc.max(x));
                    let iu = base.apply(sym, u).expect("in-range");
                    let iv = base.apply(sym, v).expect("in-range");
                    if metric.dist(iu, iv) > &bound {
                        inner = Some((u.to_vec(), v.to_vec()));
                        return Err(());
                    }
                    Ok(())
                })
                .ok();
                if inner.is_some() {
                    bad = inner;
                    return Err(());
                }
                Ok(())
            })
            .ok();
            if let Some((u, v)) = bad {
                return Err(Error::malformed(format!(
                    "`{name}` is not nonexpansive at {u:?} vs {v:?}"
                )));
            }
        }
        Ok(QuantAlgebra { base, metric })
    }

    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn metric(&self) -> &ExtMetric {
        &self.metric
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn dist(&self, a: usize, b: usize) -> &Ext {
        self.metric.dist(a, b)
    }
}

/// A pseudometric congruence: symmetric, zero diagonal (off-diagonal zeros
/// allowed), triangle inequality, pointwise below the algebra's metric, and
/// nonexpansive for every operation. Checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantCongruence {
    p: Vec<Vec<Ext>>,
}

impl QuantCongruence {
    pub fn new(algebra: &QuantAlgebra, p: Vec<Vec<Ext>>) -> Result<Self> {
        let n = algebra.size();
        if p.len() != n || p.iter().any(|row| row.len() != n) {
            return Err(Error::NotACongruence(format!(
                "matrix shape does not match carrier size {n}"
            )));
        }
        for a in 0..n {
            if !p[a][a].is_zero() {
                return Err(Error::NotACongruence(format!("nonzero diagonal at {a}")));
            }
            for b in 0..n {
                if p[a][b] != p[b][a] {
                    return Err(Error::NotACongruence(format!(
                        "not symmetric at ({a},{b})"
                    )));
                }
                if &p[a][b] > algebra.dist(a, b) {
                    return Err(Error::NotACongruence(format!(
                        "exceeds the metric at ({a},{b})"
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if p[a][c] > &p[a][b] + &p[b][c] {
                        return Err(Error::NotACongruence(format!(
                            "triangle inequality fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        for (sym, name, arity) in algebra.base().signature().iter() {
            let mut bad = false;
            for_each_tuple(n, arity, |u| {
                for_each_tuple(n, arity, |v| {
                    let bound = u
                        .iter()
                        .zip(v.iter())
                        .map(|(&a, &b)| p[a][b].clone())
                        .fold(Ext::zero(), |acc, x| acc.max(x));
                    let iu = algebra.base().apply(sym, u).expect("in-range");
                    let iv = algebra.base().apply(sym, v).expect("in-range");
                    if p[iu][iv] > bound {
                        bad = true;
                        return Err(());
                    }
                    Ok(())
                })
                .ok();
                if bad {
                    return Err(());
                }
                Ok(())
            })
            .ok();
            if bad {
                return Err(Error::NotACongruence(format!(
                    "`{name}` is not nonexpansive for the congruence"
                )));
            }
        }
        Ok(QuantCongruence { p })
    }

    pub fn value(&self, a: usize, b: usize) -> &Ext {
        &self.p[a][b]
    }

    pub fn rows(&self) -> &[Vec<Ext>] {
        &self.p
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    /// Pointwise order on congruences.
    pub fn le(&self, other: &QuantCongruence) -> bool {
        self.size() == other.size()
            && (0..self.size()).all(|a| (0..self.size()).all(|b| self.p[a][b] <= other.p[a][b]))
    }
}

/// Largest congruence `p` with `p(a_j, b_j) ≤ ε_j` for every constraint:
/// start from the pointwise minimum of the metric and the constraints, then
/// alternate all-pairs shortest-path passes with operation tightening
/// (`p(σu⃗, σv⃗) ≤ max_i p(u_i, v_i)`) until nothing changes. Exact
/// arithmetic keeps every entry on a common-denominator grid, so the
/// decreasing fixpoint terminates.
pub fn quant_congruence_generated(
    algebra: &QuantAlgebra,
    constraints: &[(usize, usize, Ext)],
) -> Result<QuantCongruence> {
    let n = algebra.size();
    let mut p: Vec<Vec<Ext>> = (0..n)
        .map(|a| (0..n).map(|b| algebra.dist(a, b).clone()).collect())
        .collect();
    for (a, b, eps) in constraints {
        if *a >= n || *b >= n {
            return Err(Error::malformed(format!(
                "constraint ({a},{b}) outside carrier of size {n}"
            )));
        }
        if *a != *b {
            let smaller = p[*a][*b].clone().min(eps.clone());
            p[*a][*b] = smaller.clone();
            p[*b][*a] = smaller;
        }
    }
    loop {
        let mut changed = false;
        // all-pairs shortest path
        for k in 0..n {
            for i in 0..n {
                if p[i][k].is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = &p[i][k] + &p[k][j];
                    if via < p[i][j] {
                        p[i][j] = via.clone();
                        p[j][i] = via;
                        changed = true;
                    }
                }
            }
        }
        // operation tightening
        for (sym, _, arity) in algebra.base().signature().iter() {
            for_each_tuple::<()>(n, arity, |u| {
                for_each_tuple::<()>(n, arity, |v| {
                    let bound = u
                        .iter()
                        .zip(v.iter())
                        .map(|(&a, &b)| p[a][b].clone())
                        .fold(Ext::zero(), |acc, x| acc.max(x));
                    let iu = algebra.base().apply(sym, u).expect("in-range");
                    let iv = algebra.base().apply(sym, v).expect("in-range");
                    if bound < p[iu][iv] {
                        p[iu][iv] = bound.clone();
                        p[iv][iu] = bound;
                        changed = true;
                    }
                    Ok(())
                })
                .ok();
                Ok(())
            })
            .ok();
        }
        if !changed {
            break;
        }
    }
    QuantCongruence::new(algebra, p)
}

/// A nonexpansive homomorphism between quantitative algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantHomomorphism {
    dom: QuantAlgebra,
    cod: QuantAlgebra,
    map: Vec<usize>,
}

impl QuantHomomorphism {
    pub fn new(dom: QuantAlgebra, cod: QuantAlgebra, map: Vec<usize>) -> Result<Self> {
        if !finalg::is_homomorphism(&map, dom.base(), cod.base())? {
            return Err(Error::malformed("map does not preserve the operations"));
        }
        for a in 0..dom.size() {
            for b in 0..dom.size() {
                if cod.dist(map[a], map[b]) > dom.dist(a, b) {
                    return Err(Error::malformed(format!(
                        "map is not nonexpansive at ({a},{b})"
                    )));
                }
            }
        }
        Ok(QuantHomomorphism { dom, cod, map })
    }

    pub fn dom(&self) -> &QuantAlgebra {
        &self.dom
    }

    pub fn cod(&self) -> &QuantAlgebra {
        &self.cod
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.size()];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// The congruence induced on the domain: `p(a,b) = d(e(a), e(b))`.
    pub fn induced_congruence(&self) -> Result<QuantCongruence> {
        let n = self.dom.size();
        let p = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| self.cod.dist(self.map[a], self.map[b]).clone())
                    .collect()
            })
            .collect();
        QuantCongruence::new(&self.dom, p)
    }
}

/// Quotient by a congruence: blocks are classes of `p = 0`, the block metric
/// is `p` itself, operations act on representatives. The surjection `e`
/// satisfies `d(e(a), e(b)) = p(a,b)` exactly. The congruence is re-checked.
pub fn quotient_quant(
    algebra: &QuantAlgebra,
    p: &QuantCongruence,
) -> Result<(QuantAlgebra, QuantHomomorphism)> {
    let p = QuantCongruence::new(algebra, p.p.clone())?; // defensive re-check
    let n = algebra.size();
    let mut rep: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in 0..a {
            if p.value(a, b).is_zero() {
                rep[a] = rep[b];
                break;
            }
        }
    }
    let cong = finalg::congruence_from_rep(algebra.base(), rep.clone())?;
    let (quot_base, surj) = finalg::quotient(algebra.base(), &cong)?;
    let blocks = cong.blocks();
    let m = blocks.len();
    let d: Vec<Vec<Ext>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| p.value(blocks[i][0], blocks[j][0]).clone())
                .collect()
        })
        .collect();
    let metric = ExtMetric::new(d)?;
    let quot = QuantAlgebra::new(quot_base, metric)?;
    let e = QuantHomomorphism::new(algebra.clone(), quot.clone(), surj.map().to_vec())?;
    Ok((quot, e))
}

/// Does `f` factor through the surjection `e`? Happens exactly when the
/// induced congruence of `f` is pointwise below that of `e`; returns the
/// factor when it does.
pub fn factor_through_quant(
    e: &QuantHomomorphism,
    f: &QuantHomomorphism,
) -> Result<Option<QuantHomomorphism>> {
    if e.dom() != f.dom() {
        return Err(Error::malformed("factorization needs a common domain"));
    }
    if !e.is_surjective() {
        return Err(Error::malformed("can only factor through a surjection"));
    }
    if !f.induced_congruence()?.le(&e.induced_congruence()?) {
        return Ok(None);
    }
    let mut map = vec![0usize; e.cod().size()];
    for a in 0..e.dom().size() {
        map[e.apply(a)] = f.apply(a);
    }
    Ok(Some(QuantHomomorphism::new(
        e.cod().clone(),
        f.cod().clone(),
        map,
    )?))
}

/// The cardinal-like parameter of c-reflexivity and c-clustered equations:
/// a finite value (at least 2) or ω (no finite bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CParam {
    Finite(usize),
    Omega,
}

impl CParam {
    pub fn finite(c: usize) -> Result<Self> {
        if c < 2 {
            return Err(Error::malformed("c must be at least 2"));
        }
        Ok(CParam::Finite(c))
    }

    /// Does a set of this size satisfy "size < c"?
    pub fn admits(&self, size: usize) -> bool {
        match self {
            CParam::Finite(c) => size < *c,
            CParam::Omega => true,
        }
    }
}

/// Is the surjection c-reflexive: does every codomain subset of size < c
/// admit a subset of the domain mapped bijectively and isometrically onto
/// it? Returns the first failing subset as a witness otherwise. Searches
/// choice functions over the fibers with pairwise pruning.
pub fn is_c_reflexive(
    e: &QuantHomomorphism,
    c: CParam,
    limits: &Limits,
) -> Result<(bool, Option<Vec<usize>>)> {
    if !e.is_surjective() {
        return Err(Error::malformed("c-reflexivity is about surjections"));
    }
    let m = e.cod().size();
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); m];
    for a in 0..e.dom().size() {
        fibers[e.apply(a)].push(a);
    }
    let max_size = match c {
        CParam::Finite(c) => (c - 1).min(m),
        CParam::Omega => m,
    };
    let mut budget = limits.max_steps;
    // subsets of size 0 and 1 always have isometric sections
    for size in 2..=max_size {
        let mut subset = Vec::with_capacity(size);
        if let Some(bad) = first_failing_subset(e, &fibers, size, 0, &mut subset, &mut budget)? {
            return Ok((false, Some(bad)));
        }
    }
    Ok((true, None))
}

fn first_failing_subset(
    e: &QuantHomomorphism,
    fibers: &[Vec<usize>],
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    budget: &mut usize,
) -> Result<Option<Vec<usize>>> {
    if subset.len() == size {
        let mut picks = Vec::with_capacity(size);
        return if section_exists(e, fibers, subset, &mut picks, budget)? {
            Ok(None)
        } else {
            Ok(Some(subset.clone()))
        };
    }
    for b in from..e.cod().size() {
        subset.push(b);
        if let Some(bad) = first_failing_subset(e, fibers, size, b + 1, subset, budget)? {
            return Ok(Some(bad));
        }
        subset.pop();
    }
    Ok(None)
}

fn section_exists(
    e: &QuantHomomorphism,
    fibers: &[Vec<usize>],
    subset: &[usize],
    picks: &mut Vec<usize>,
    budget: &mut usize,
) -> Result<bool> {
    if picks.len() == subset.len() {
        return Ok(true);
    }
    let b = subset[picks.len()];
    for &a in &fibers[b] {
        if *budget == 0 {
            return Err(Error::SizeLimitExceeded(
                "c-reflexivity section search budget exhausted".into(),
            ));
        }
        *budget -= 1;
        let ok = picks.iter().enumerate().all(|(k, &prev)| {
            e.dom().dist(prev, a) == e.cod().dist(subset[k], b)
        });
        if ok {
            picks.push(a);
            if section_exists(e, fibers, subset, picks, budget)? {
                return Ok(true);
            }
            picks.pop();
        }
    }
    Ok(false)
}

/// A c-clustered equation: conditions `x =_ε y` between co-clustered
/// variables entail a bound on two terms. Clusters partition the variable
/// set and each has size < c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteredEquation {
    pub vars: VarSet,
    pub clusters: Vec<Vec<usize>>,
    pub conditions: Vec<(usize, usize, Ext)>,
    pub lhs: Term,
    pub rhs: Term,
    pub epsilon: Ext,
    pub c: CParam,
}

impl ClusteredEquation {
    /// An unconditional bound `s =_ε t` (every variable its own cluster,
    /// `c = 2`).
    pub fn unconditional(vars: VarSet, lhs: Term, rhs: Term, epsilon: Ext) -> Self {
        let clusters = (0..vars.len()).map(|i| vec![i]).collect();
        ClusteredEquation {
            vars,
            clusters,
            conditions: Vec::new(),
            lhs,
            rhs,
            epsilon,
            c: CParam::Finite(2),
        }
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.lhs.validate(sig, &self.vars)?;
        self.rhs.validate(sig, &self.vars)?;
        let n = self.vars.len();
        let mut cluster_of = vec![usize::MAX; n];
        for (ci, cluster) in self.clusters.iter().enumerate() {
            if !self.c.admits(cluster.len()) {
                return Err(Error::malformed(format!(
                    "cluster {ci} has size {}, not below c",
                    cluster.len()
                )));
            }
            for &v in cluster {
                if v >= n || cluster_of[v] != usize::MAX {
                    return Err(Error::malformed(
                        "clusters do not partition the variable set",
                    ));
                }
                cluster_of[v] = ci;
            }
        }
        if cluster_of.contains(&usize::MAX) {
            return Err(Error::malformed(
                "clusters do not cover the variable set",
            ));
        }
        for &(x, y, _) in &self.conditions {
            if x >= n || y >= n {
                return Err(Error::malformed("condition variable out of range"));
            }
            if cluster_of[x] != cluster_of[y] {
                return Err(Error::malformed(format!(
                    "condition relates variables {x} and {y} from different clusters"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a clustered-equation check.
pub use crate::variety::SatOutcome;

/// Does every assignment meeting the conditions bound the conclusion?
/// Returns the first violating assignment otherwise.
pub fn satisfies_clustered_equation(
    algebra: &QuantAlgebra,
    eq: &ClusteredEquation,
) -> Result<SatOutcome> {
    eq.validate(algebra.base().signature()).map_err(|e| match e {
        Error::ArityMismatch(m) => Error::SignatureMismatch(m),
        other => other,
    })?;
    let mut outcome = SatOutcome::Satisfied;
    for_each_tuple(algebra.size(), eq.vars.len(), |h| {
        let met = eq
            .conditions
            .iter()
            .all(|(x, y, eps)| algebra.dist(h[*x], h[*y]) <= eps);
        if met {
            let l = crate::sigterm::evaluate(&eq.lhs, algebra.base(), h).expect("validated");
            let r = crate::sigterm::evaluate(&eq.rhs, algebra.base(), h).expect("validated");
            if algebra.dist(l, r) > &eq.epsilon {
                outcome = SatOutcome::Falsified(h.to_vec());
                return Err(());
            }
        }
        Ok(())
    })
    .ok();
    Ok(outcome)
}

/// An unconditional quantitative equation `lhs =_ε rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantEquation {
    pub vars: VarSet,
    pub lhs: Term,
    pub rhs: Term,
    pub epsilon: Ext,
}

impl QuantEquation {
    pub fn new(vars: VarSet, lhs: Term, rhs: Term, epsilon: Ext) -> Self {
        QuantEquation {
            vars,
            lhs,
            rhs,
            epsilon,
        }
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.lhs.validate(sig, &self.vars)?;
        self.rhs.validate(sig, &self.vars)
    }

    fn term_equation(&self) -> TermEquation {
        TermEquation::new(self.vars.clone(), self.lhs.clone(), self.rhs.clone())
    }

    pub fn alpha_eq(&self, other: &QuantEquation) -> bool {
        self.epsilon == other.epsilon && self.term_equation().alpha_eq(&other.term_equation())
    }

    /// As a clustered equation with no conditions.
    pub fn clustered(&self) -> ClusteredEquation {
        ClusteredEquation::unconditional(
            self.vars.clone(),
            self.lhs.clone(),
            self.rhs.clone(),
            self.epsilon.clone(),
        )
    }
}

/// Quantitative proof-tree rule tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QRule {
    Refl,
    Sym,
    Triang,
    Max,
    Arch,
    Cong(SymbolId),
    Subst(Substitution),
    Axiom(usize),
}

/// A derivation tree for bounds `s =_ε t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantProof {
    pub rule: QRule,
    pub conclusion: QuantEquation,
    pub children: Vec<QuantProof>,
}

impl QuantProof {
    fn node(rule: QRule, conclusion: QuantEquation, children: Vec<QuantProof>) -> Self {
        QuantProof {
            rule,
            conclusion,
            children,
        }
    }
}

/// Checks a quantitative proof tree. Structural breakage raises
/// [`Error::MalformedProof`]; a well-formed node that is not a correct rule
/// instance yields `false`.
pub fn check_quant_proof(
    sig: &Signature,
    proof: &QuantProof,
    gamma: &[QuantEquation],
) -> Result<bool> {
    check_qnode(sig, proof, gamma, "root")
}

fn qmalformed(path: &str, reason: impl Into<String>) -> Error {
    Error::MalformedProof {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn check_qnode(
    sig: &Signature,
    node: &QuantProof,
    gamma: &[QuantEquation],
    path: &str,
) -> Result<bool> {
    let eq = &node.conclusion;
    eq.validate(sig)
        .map_err(|e| qmalformed(path, format!("bad conclusion: {e}")))?;
    let expected = match &node.rule {
        QRule::Refl | QRule::Axiom(_) => 0,
        QRule::Sym | QRule::Max | QRule::Subst(_) => 1,
        QRule::Triang => 2,
        QRule::Arch => {
            // the vacuous infimum: no premises needed at ε = ∞
            if node.children.is_empty() && eq.epsilon.is_infinite() {
                0
            } else {
                1
            }
        }
        QRule::Cong(sym) => {
            if *sym >= sig.len() {
                return Err(qmalformed(path, format!("unknown symbol id {sym}")));
            }
            sig.arity(*sym)
        }
    };
    if node.children.len() != expected {
        return Err(qmalformed(
            path,
            format!(
                "rule expects {expected} premises, found {}",
                node.children.len()
            ),
        ));
    }
    for (i, child) in node.children.iter().enumerate() {
        if !check_qnode(sig, child, gamma, &format!("{path}.children[{i}]"))? {
            return Ok(false);
        }
    }
    let ok = match &node.rule {
        QRule::Refl => eq.lhs == eq.rhs && eq.epsilon.is_zero(),
        QRule::Sym => {
            let p = &node.children[0].conclusion;
            p.vars == eq.vars
                && p.lhs == eq.rhs
                && p.rhs == eq.lhs
                && p.epsilon == eq.epsilon
        }
        QRule::Triang => {
            let p = &node.children[0].conclusion;
            let q = &node.children[1].conclusion;
            p.vars == eq.vars
                && q.vars == eq.vars
                && p.lhs == eq.lhs
                && p.rhs == q.lhs
                && q.rhs == eq.rhs
                && &p.epsilon + &q.epsilon == eq.epsilon
        }
        QRule::Max => {
            let p = &node.children[0].conclusion;
            p.vars == eq.vars
                && p.lhs == eq.lhs
                && p.rhs == eq.rhs
                && p.epsilon < eq.epsilon // strict weakening only
        }
        QRule::Arch => {
            if node.children.is_empty() {
                eq.epsilon.is_infinite()
            } else {
                let p = &node.children[0].conclusion;
                p.vars == eq.vars
                    && p.lhs == eq.lhs
                    && p.rhs == eq.rhs
                    && p.epsilon <= eq.epsilon // attained infimum at finite scale
            }
        }
        QRule::Cong(sym) => {
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
            node.children
                .iter()
                .all(|c| c.conclusion.vars == eq.vars && c.conclusion.epsilon == eq.epsilon)
                && eq.lhs == Term::App(*sym, lhs_children)
                && eq.rhs == Term::App(*sym, rhs_children)
        }
        QRule::Subst(sub) => {
            let p = &node.children[0].conclusion;
            if sub.len() != p.vars.len() {
                return Err(qmalformed(
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
                    .map_err(|e| qmalformed(path, format!("bad substitution image: {e}")))?;
            }
            let l = substitute(&p.lhs, sub).map_err(|e| qmalformed(path, e.to_string()))?;
            let r = substitute(&p.rhs, sub).map_err(|e| qmalformed(path, e.to_string()))?;
            l == eq.lhs && r == eq.rhs && p.epsilon == eq.epsilon
        }
        QRule::Axiom(index) => {
            let ax = gamma
                .get(*index)
                .ok_or_else(|| qmalformed(path, format!("axiom index {index} out of range")))?;
            eq.alpha_eq(ax)
        }
    };
    Ok(ok)
}

/// How an entry improvement was justified, for proof reconstruction.
enum QJust {
    /// Instance of `Γ[index]` under `sub`; proves `U[a] =_ε U[b]`.
    Constraint { index: usize, sub: Substitution },
    /// Shortest-path step through `mid`.
    Triang {
        mid: usize,
        left: PremiseRef,
        left_val: Ext,
        right: PremiseRef,
        right_val: Ext,
    },
    /// Operation tightening at a common bound.
    Cong {
        sym: SymbolId,
        legs: Vec<(usize, usize, PremiseRef, Ext)>,
    },
}

/// Where a premise bound comes from: the zero diagonal or an earlier event.
#[derive(Clone, Copy)]
enum PremiseRef {
    Refl(usize),
    Event(usize),
}

struct QEvent {
    a: usize,
    b: usize,
    value: Ext,
    just: QJust,
}

/// Verdict of [`quant_entails`].
#[derive(Debug, Clone)]
pub enum QuantVerdict {
    Proved(QuantProof),
    /// Not proved at this depth; the best derived bound for the goal pair.
    BoundWitness(Ext),
    /// No finite bound derived at this depth.
    Unknown,
}

/// Bounded quantitative entailment: build the term universe over the goal's
/// variables at `depth`, treat it as a discrete space, seed every
/// in-universe instance of Γ, tighten to a fixpoint, and compare the
/// resulting bound for the goal pair against the goal's ε. Proof
/// reconstruction replays the recorded improvements: constraints become
/// (Subst)+(Axiom), shortest-path steps (Triang), operation steps (Cong),
/// and the final slack a (Max) cast.
pub fn quant_entails(
    sig: &Signature,
    gamma: &[QuantEquation],
    goal: &QuantEquation,
    depth: usize,
    limits: &Limits,
) -> Result<QuantVerdict> {
    goal.validate(sig)?;
    for ax in gamma {
        ax.validate(sig)?;
    }
    if goal.lhs.depth().max(goal.rhs.depth()) > depth {
        return Err(Error::malformed(
            "depth bound smaller than the goal's own terms",
        ));
    }
    let universe =
        crate::sigterm::enumerate_terms_capped(sig, &goal.vars, depth, limits.max_universe)?;
    let index: HashMap<Term, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let n = universe.len();
    let mut p: Vec<Vec<Ext>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| if a == b { Ext::zero() } else { Ext::Infinite })
                .collect()
        })
        .collect();
    let mut last_event: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    let mut events: Vec<QEvent> = Vec::new();

    let record =
        |p: &mut Vec<Vec<Ext>>,
         last_event: &mut Vec<Vec<Option<usize>>>,
         events: &mut Vec<QEvent>,
         a: usize,
         b: usize,
         value: Ext,
         just: QJust| {
            p[a][b] = value.clone();
            p[b][a] = value.clone();
            let id = events.len();
            last_event[a][b] = Some(id);
            last_event[b][a] = Some(id);
            events.push(QEvent { a, b, value, just });
        };

    // seed constraints: all in-universe instances of the axioms
    for (k, ax) in gamma.iter().enumerate() {
        let arity = ax.vars.len();
        checked_pow(n, arity)
            .filter(|&w| w <= limits.max_steps)
            .ok_or_else(|| {
                Error::SizeLimitExceeded(format!(
                    "axiom instantiation needs more than {} substitutions",
                    limits.max_steps
                ))
            })?;
        for_each_tuple(n, arity, |images| {
            let sub = Substitution::new(
                images.iter().map(|&i| universe[i].clone()).collect(),
            );
            let l = substitute(&ax.lhs, &sub).expect("total");
            let r = substitute(&ax.rhs, &sub).expect("total");
            if let (Some(&li), Some(&ri)) = (index.get(&l), index.get(&r)) {
                if li != ri && ax.epsilon < p[li][ri] {
                    record(
                        &mut p,
                        &mut last_event,
                        &mut events,
                        li,
                        ri,
                        ax.epsilon.clone(),
                        QJust::Constraint { index: k, sub },
                    );
                }
            }
            Ok::<(), Error>(())
        })?;
    }

    // application terms grouped by head symbol
    let mut apps_by_sym: HashMap<SymbolId, Vec<usize>> = HashMap::new();
    for (i, t) in universe.iter().enumerate() {
        if let Term::App(sym, _) = t {
            apps_by_sym.entry(*sym).or_default().push(i);
        }
    }
    let child_indices: Vec<Option<Vec<usize>>> = universe
        .iter()
        .map(|t| match t {
            Term::Var(_) => None,
            Term::App(_, cs) => Some(cs.iter().map(|c| index[c]).collect()),
        })
        .collect();

    loop {
        let mut changed = false;
        // shortest-path pass
        for k in 0..n {
            for i in 0..n {
                if p[i][k].is_infinite() {
                    continue;
                }
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let via = &p[i][k] + &p[k][j];
                    if via < p[i][j] {
                        let left = premise_ref(&last_event, i, k);
                        let right = premise_ref(&last_event, k, j);
                        let just = QJust::Triang {
                            mid: k,
                            left,
                            left_val: p[i][k].clone(),
                            right,
                            right_val: p[k][j].clone(),
                        };
                        record(&mut p, &mut last_event, &mut events, i, j, via, just);
                        changed = true;
                    }
                }
            }
        }
        // operation pass
        for (sym, terms) in {
            let mut keys: Vec<_> = apps_by_sym.iter().collect();
            keys.sort_by_key(|(s, _)| **s);
            keys.into_iter()
                .map(|(s, v)| (*s, v.clone()))
                .collect::<Vec<_>>()
        } {
            for (ai, &t1) in terms.iter().enumerate() {
                for &t2 in terms.iter().skip(ai + 1) {
                    let us = child_indices[t1].as_ref().expect("application");
                    let vs = child_indices[t2].as_ref().expect("application");
                    let mut bound = Ext::zero();
                    for (&u, &v) in us.iter().zip(vs.iter()) {
                        bound = bound.max(p[u][v].clone());
                        if bound.is_infinite() {
                            break;
                        }
                    }
                    if bound < p[t1][t2] {
                        let legs = us
                            .iter()
                            .zip(vs.iter())
                            .map(|(&u, &v)| {
                                (u, v, premise_ref(&last_event, u, v), p[u][v].clone())
                            })
                            .collect();
                        let just = QJust::Cong { sym, legs };
                        record(&mut p, &mut last_event, &mut events, t1, t2, bound, just);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let li = index[&goal.lhs];
    let ri = index[&goal.rhs];
    let best = p[li][ri].clone();
    if best > goal.epsilon {
        return Ok(if best.is_infinite() {
            QuantVerdict::Unknown
        } else {
            QuantVerdict::BoundWitness(best)
        });
    }
    let builder = ProofBuilder {
        gamma,
        vars: &goal.vars,
        universe: &universe,
        events: &events,
        last_event: &last_event,
    };
    let proof = builder.pair_proof(li, ri, &goal.epsilon);
    debug_assert!(check_quant_proof(sig, &proof, gamma)?);
    Ok(QuantVerdict::Proved(proof))
}

fn premise_ref(last_event: &[Vec<Option<usize>>], a: usize, b: usize) -> PremiseRef {
    if a == b {
        PremiseRef::Refl(a)
    } else {
        PremiseRef::Event(last_event[a][b].expect("finite entries come from events"))
    }
}

struct ProofBuilder<'a> {
    gamma: &'a [QuantEquation],
    vars: &'a VarSet,
    universe: &'a [Term],
    events: &'a [QEvent],
    last_event: &'a [Vec<Option<usize>>],
}

impl ProofBuilder<'_> {
    fn bound(&self, a: usize, b: usize, eps: Ext) -> QuantEquation {
        QuantEquation::new(
            self.vars.clone(),
            self.universe[a].clone(),
            self.universe[b].clone(),
            eps,
        )
    }

    /// Proof of `U[a] =_target U[b]`, where `target` dominates the final
    /// derived bound for the pair.
    fn pair_proof(&self, a: usize, b: usize, target: &Ext) -> QuantProof {
        if a == b {
            let refl = QuantProof::node(QRule::Refl, self.bound(a, a, Ext::zero()), vec![]);
            return self.cast_up(refl, target);
        }
        match self.last_event[a][b] {
            None => {
                // nothing derived for this pair: only ε = ∞ is provable,
                // via the vacuous infimum
                debug_assert!(target.is_infinite());
                QuantProof::node(QRule::Arch, self.bound(a, b, Ext::Infinite), vec![])
            }
            Some(ev) => {
                let proof = self.oriented_event_proof(ev, a, b);
                self.cast_up(proof, target)
            }
        }
    }

    /// (Max)-cast a proof up to `target` when strictly larger.
    fn cast_up(&self, proof: QuantProof, target: &Ext) -> QuantProof {
        let current = proof.conclusion.epsilon.clone();
        if &current == target {
            return proof;
        }
        debug_assert!(current < *target);
        let mut concl = proof.conclusion.clone();
        concl.epsilon = target.clone();
        QuantProof::node(QRule::Max, concl, vec![proof])
    }

    /// Event proof oriented to conclude `U[a] =_v U[b]`.
    fn oriented_event_proof(&self, ev: usize, a: usize, b: usize) -> QuantProof {
        let event = &self.events[ev];
        let proof = self.event_proof(ev);
        if event.a == a && event.b == b {
            proof
        } else {
            debug_assert!(event.a == b && event.b == a);
            let concl = self.bound(a, b, event.value.clone());
            QuantProof::node(QRule::Sym, concl, vec![proof])
        }
    }

    /// Proof of the event's own conclusion `U[event.a] =_value U[event.b]`.
    fn event_proof(&self, ev: usize) -> QuantProof {
        let event = &self.events[ev];
        match &event.just {
            QJust::Constraint { index, sub } => {
                let ax = &self.gamma[*index];
                let axiom = QuantProof::node(QRule::Axiom(*index), ax.clone(), vec![]);
                QuantProof::node(
                    QRule::Subst(sub.clone()),
                    self.bound(event.a, event.b, event.value.clone()),
                    vec![axiom],
                )
            }
            QJust::Triang {
                mid,
                left,
                left_val,
                right,
                right_val,
            } => {
                let lp = self.ref_proof(*left, event.a, *mid, left_val);
                let rp = self.ref_proof(*right, *mid, event.b, right_val);
                QuantProof::node(
                    QRule::Triang,
                    self.bound(event.a, event.b, event.value.clone()),
                    vec![lp, rp],
                )
            }
            QJust::Cong { sym, legs } => {
                let children = legs
                    .iter()
                    .map(|(u, v, r, w)| {
                        let leg = self.ref_proof(*r, *u, *v, w);
                        self.cast_up(leg, &event.value)
                    })
                    .collect();
                QuantProof::node(
                    QRule::Cong(*sym),
                    self.bound(event.a, event.b, event.value.clone()),
                    children,
                )
            }
        }
    }

    /// Proof of `U[a] =_val U[b]` from a recorded premise reference.
    fn ref_proof(&self, r: PremiseRef, a: usize, b: usize, val: &Ext) -> QuantProof {
        match r {
            PremiseRef::Refl(t) => {
                debug_assert!(a == b && a == t && val.is_zero());
                QuantProof::node(QRule::Refl, self.bound(t, t, Ext::zero()), vec![])
            }
            PremiseRef::Event(ev) => {
                debug_assert_eq!(&self.events[ev].value, val);
                self.oriented_event_proof(ev, a, b)
            }
        }
    }
}

/// Binary product of quantitative algebras: pointwise operations, sup
/// metric.
pub fn product_quant(
    left: &QuantAlgebra,
    right: &QuantAlgebra,
    limits: &Limits,
) -> Result<(QuantAlgebra, QuantHomomorphism, QuantHomomorphism)> {
    let (base, projections) =
        finalg::product(&[left.base().clone(), right.base().clone()], limits)?;
    let n = base.size();
    let d: Vec<Vec<Ext>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let dl = left.dist(projections[0].apply(x), projections[0].apply(y));
                    let dr = right.dist(projections[1].apply(x), projections[1].apply(y));
                    dl.max(dr).clone()
                })
                .collect()
        })
        .collect();
    let prod = QuantAlgebra::new(base, ExtMetric::new(d)?)?;
    let pl = QuantHomomorphism::new(prod.clone(), left.clone(), projections[0].map().to_vec())?;
    let pr = QuantHomomorphism::new(prod.clone(), right.clone(), projections[1].map().to_vec())?;
    Ok((prod, pl, pr))
}

/// Subalgebra generated by a seed, metric restricted.
pub fn subalgebra_quant(
    algebra: &QuantAlgebra,
    seed: &[usize],
) -> Result<(QuantAlgebra, QuantHomomorphism)> {
    let (sub_base, inclusion) = finalg::subalgebra_generated(algebra.base(), seed)?;
    let m = sub_base.size();
    let d: Vec<Vec<Ext>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| algebra.dist(inclusion.apply(i), inclusion.apply(j)).clone())
                .collect()
        })
        .collect();
    let sub = QuantAlgebra::new(sub_base, ExtMetric::new(d)?)?;
    let incl = QuantHomomorphism::new(sub.clone(), algebra.clone(), inclusion.map().to_vec())?;
    Ok((sub, incl))
}
