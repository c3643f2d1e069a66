//! Ordered Σ-algebras: monotone operations over a partial order, stable
//! preorders, ordered quotients, and term inequations.
//!
//! A stable preorder refines the algebra's order (`a ≤ a'` implies
//! `a ⪯ a'`) and keeps every operation monotone. Stable preorders are to
//! ordered quotients what congruences are to plain quotients: the quotient
//! by `r` identifies mutually related elements, orders blocks by `r`, and
//! the preorder induced by the surjection (`a ⪯ a'` iff `e(a) ≤ e(a')`)
//! recovers `r` exactly.
//!
//! Relations are dense boolean matrices; carriers are tiny and the closure
//! algorithms (Warshall passes interleaved with monotone propagation)
//! stay uniform that way.

use crate::error::Error;
use crate::finalg::{self, FiniteAlgebra, Homomorphism};
use crate::limits::Limits;
use crate::sigterm::evaluate;
use crate::tuples::for_each_tuple;
use crate::variety::{SatOutcome, TermEquation};
use crate::Result;

/// A dense reflexive binary relation on `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn identity(n: usize) -> Self {
        let mut r = Relation {
            n,
            bits: vec![false; n * n],
        };
        for a in 0..n {
            r.set(a, a);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut r = Relation::identity(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::malformed(format!(
                    "pair ({a},{b}) outside carrier of size {n}"
                )));
            }
            r.set(a, b);
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn holds(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    fn set(&mut self, a: usize, b: usize) -> bool {
        let idx = a * self.n + b;
        let was = self.bits[idx];
        self.bits[idx] = true;
        !was
    }

    /// All related ordered pairs, row-major.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.holds(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| !(self.holds(a, b) && self.holds(b, a))))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.n).all(|a| {
            (0..self.n).all(|b| {
                !self.holds(a, b)
                    || (0..self.n).all(|c| !self.holds(b, c) || self.holds(a, c))
            })
        })
    }

    /// Contains every pair of `other`?
    pub fn contains(&self, other: &Relation) -> bool {
        self.n == other.n
            && self
                .bits
                .iter()
                .zip(other.bits.iter())
                .all(|(mine, theirs)| *mine || !*theirs)
    }

    fn transitive_close(&mut self) -> bool {
        let mut changed = false;
        for k in 0..self.n {
            for a in 0..self.n {
                if !self.holds(a, k) {
                    continue;
                }
                for b in 0..self.n {
                    if self.holds(k, b) && self.set(a, b) {
                        changed = true;
                    }
                }
            }
        }
        changed
    }

    /// Transitive closure in place.
    pub fn close_transitively(&mut self) {
        self.transitive_close();
    }
}

/// An ordered algebra: a finite algebra with a partial order making every
/// operation monotone in each argument. Checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedAlgebra {
    base: FiniteAlgebra,
    leq: Relation,
}

impl OrderedAlgebra {
    pub fn new(base: FiniteAlgebra, leq: Relation) -> Result<Self> {
        if leq.size() != base.size() {
            return Err(Error::malformed(format!(
                "order over {} elements, carrier has {}",
                leq.size(),
                base.size()
            )));
        }
        if !leq.is_transitive() {
            return Err(Error::malformed("order is not transitive"));
        }
        if !leq.is_antisymmetric() {
            return Err(Error::malformed("order is not antisymmetric"));
        }
        let algebra = OrderedAlgebra { base, leq };
        algebra.check_monotone().map_err(|e| match e {
            Error::NotStable(m) => Error::malformed(format!("operation not monotone: {m}")),
            other => other,
        })?;
        Ok(algebra)
    }

    /// The discrete order (only `a ≤ a`); monotonicity is automatic.
    pub fn discrete(base: FiniteAlgebra) -> Self {
        let leq = Relation::identity(base.size());
        OrderedAlgebra { base, leq }
    }

    /// The chain `0 < 1 < ... < n-1` over an operation-free signature, or
    /// any base whose operations are monotone for it.
    pub fn chain(base: FiniteAlgebra) -> Result<Self> {
        let n = base.size();
        let mut leq = Relation::identity(n);
        for a in 0..n {
            for b in a..n {
                leq.set(a, b);
            }
        }
        OrderedAlgebra::new(base, leq)
    }

    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn leq(&self) -> &Relation {
        &self.leq
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    fn check_monotone(&self) -> Result<()> {
        monotone_ok(&self.base, &self.leq)
    }
}

/// Is every operation monotone with respect to `rel` (componentwise related
/// tuples have related images)?
fn monotone_ok(base: &FiniteAlgebra, rel: &Relation) -> Result<()> {
    let n = base.size();
    for (sym, name, arity) in base.signature().iter() {
        let mut bad = None;
        for_each_tuple(n, arity, |u| {
            let mut inner_bad = None;
            for_each_tuple(n, arity, |v| {
                if u.iter().zip(v.iter()).all(|(&a, &b)| rel.holds(a, b)) {
                    let iu = base.apply(sym, u).expect("in-range");
                    let iv = base.apply(sym, v).expect("in-range");
                    if !rel.holds(iu, iv) {
                        inner_bad = Some((u.to_vec(), v.to_vec()));
                        return Err(());
                    }
                }
                Ok(())
            })
            .ok();
            if inner_bad.is_some() {
                bad = inner_bad;
                return Err(());
            }
            Ok(())
        })
        .ok();
        if let Some((u, v)) = bad {
            return Err(Error::NotStable(format!(
                "`{name}` violates monotonicity at {u:?} ⪯ {v:?}"
            )));
        }
    }
    Ok(())
}

/// A stable preorder on an ordered algebra: reflexive, transitive, contains
/// the order, and keeps every operation monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StablePreorder {
    rel: Relation,
}

impl StablePreorder {
    /// Validates all three conditions against the given algebra.
    pub fn new(algebra: &OrderedAlgebra, rel: Relation) -> Result<Self> {
        if rel.size() != algebra.size() {
            return Err(Error::NotStable(format!(
                "relation over {} elements, carrier has {}",
                rel.size(),
                algebra.size()
            )));
        }
        if !rel.is_transitive() {
            return Err(Error::NotStable("relation is not transitive".into()));
        }
        if !rel.contains(algebra.leq()) {
            return Err(Error::NotStable(
                "relation does not contain the algebra's order".into(),
            ));
        }
        monotone_ok(algebra.base(), &rel)?;
        Ok(StablePreorder { rel })
    }

    pub fn rel(&self) -> &Relation {
        &self.rel
    }

    pub fn holds(&self, a: usize, b: usize) -> bool {
        self.rel.holds(a, b)
    }
}

/// Least stable preorder containing the algebra's order and the given
/// pairs: seed, then interleave transitive closure with per-operation
/// monotone propagation until nothing changes.
pub fn stable_preorder_generated(
    algebra: &OrderedAlgebra,
    pairs: &[(usize, usize)],
) -> Result<StablePreorder> {
    let n = algebra.size();
    let mut rel = Relation::from_pairs(n, pairs)?;
    for (a, b) in algebra.leq().pairs() {
        rel.set(a, b);
    }
    loop {
        let mut changed = rel.transitive_close();
        for (sym, _, arity) in algebra.base().signature().iter() {
            for_each_tuple::<()>(n, arity, |u| {
                for_each_tuple::<()>(n, arity, |v| {
                    if u.iter().zip(v.iter()).all(|(&a, &b)| rel.holds(a, b)) {
                        let iu = algebra.base().apply(sym, u).expect("in-range");
                        let iv = algebra.base().apply(sym, v).expect("in-range");
                        if rel.set(iu, iv) {
                            changed = true;
                        }
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
    StablePreorder::new(algebra, rel)
}

/// Quotient by a stable preorder: blocks are classes of `r ∩ r⁻¹`, ordered
/// by `[a] ≤ [b]` iff `a r b`; operations act on representatives. Returns
/// the quotient and the (monotone, order-reflecting onto its image) carrier
/// surjection. The preorder is re-checked defensively.
pub fn quotient_ordered(
    algebra: &OrderedAlgebra,
    r: &StablePreorder,
) -> Result<(OrderedAlgebra, Homomorphism)> {
    let r = StablePreorder::new(algebra, r.rel.clone())?; // defensive re-check
    let n = algebra.size();
    // mutual-relation congruence
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.holds(a, b) && r.holds(b, a) {
                pairs.push((a, b));
            }
        }
    }
    let mut dsu_rep = vec![usize::MAX; n];
    {
        // blocks by least representative, in representative order
        let mut rep: Vec<usize> = (0..n).collect();
        for &(a, b) in &pairs {
            let (ra, rb) = (rep[a], rep[b]);
            let lo = ra.min(rb);
            for x in 0..n {
                if rep[x] == ra || rep[x] == rb {
                    rep[x] = lo;
                }
            }
        }
        dsu_rep.copy_from_slice(&rep);
    }
    let cong = finalg::congruence_from_rep(algebra.base(), dsu_rep)?;
    let (quot_base, surjection) = finalg::quotient(algebra.base(), &cong)?;
    let m = quot_base.size();
    let blocks = cong.blocks();
    let mut leq = Relation::identity(m);
    for (i, bi) in blocks.iter().enumerate() {
        for (j, bj) in blocks.iter().enumerate() {
            if r.holds(bi[0], bj[0]) {
                leq.set(i, j);
            }
        }
    }
    let quot = OrderedAlgebra::new(quot_base, leq)?;
    Ok((quot, surjection))
}

/// The stable preorder induced by a monotone surjection: `a ⪯ a'` iff
/// `e(a) ≤ e(a')` in the codomain.
pub fn induced_preorder(
    dom: &OrderedAlgebra,
    cod: &OrderedAlgebra,
    map: &[usize],
) -> Result<StablePreorder> {
    if map.len() != dom.size() {
        return Err(Error::malformed("map does not cover the domain"));
    }
    let mut rel = Relation::identity(dom.size());
    for a in 0..dom.size() {
        for b in 0..dom.size() {
            if cod.leq().holds(map[a], map[b]) {
                rel.set(a, b);
            }
        }
    }
    StablePreorder::new(dom, rel)
}

/// A term inequation `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermInequation {
    pub eq: TermEquation,
}

impl TermInequation {
    pub fn new(eq: TermEquation) -> Self {
        TermInequation { eq }
    }
}

/// Does every assignment send `lhs` to a value below `rhs`? Returns the
/// first failing assignment otherwise.
pub fn satisfies_inequation(
    algebra: &OrderedAlgebra,
    ineq: &TermInequation,
) -> Result<SatOutcome> {
    ineq.eq.validate(algebra.base().signature()).map_err(|e| match e {
        Error::ArityMismatch(m) | Error::MalformedInput(m) => Error::SignatureMismatch(m),
        other => other,
    })?;
    let mut outcome = SatOutcome::Satisfied;
    for_each_tuple(algebra.size(), ineq.eq.vars.len(), |h| {
        let l = evaluate(&ineq.eq.lhs, algebra.base(), h).expect("validated");
        let r = evaluate(&ineq.eq.rhs, algebra.base(), h).expect("validated");
        if !algebra.leq().holds(l, r) {
            outcome = SatOutcome::Falsified(h.to_vec());
            return Err(());
        }
        Ok(())
    })
    .ok();
    Ok(outcome)
}

/// Product of ordered algebras: pointwise operations, componentwise order.
pub fn product_ordered(
    factors: &[OrderedAlgebra],
    limits: &Limits,
) -> Result<(OrderedAlgebra, Vec<Homomorphism>)> {
    let bases: Vec<FiniteAlgebra> = factors.iter().map(|f| f.base().clone()).collect();
    let (prod_base, projections) = finalg::product(&bases, limits)?;
    let n = prod_base.size();
    let mut leq = Relation::identity(n);
    for a in 0..n {
        for b in 0..n {
            let below = projections
                .iter()
                .enumerate()
                .all(|(i, p)| factors[i].leq().holds(p.apply(a), p.apply(b)));
            if below {
                leq.set(a, b);
            }
        }
    }
    Ok((OrderedAlgebra::new(prod_base, leq)?, projections))
}

/// Subalgebra generated by a seed, with the restricted order.
pub fn subalgebra_ordered(
    algebra: &OrderedAlgebra,
    seed: &[usize],
) -> Result<(OrderedAlgebra, Homomorphism)> {
    let (sub_base, inclusion) = finalg::subalgebra_generated(algebra.base(), seed)?;
    let m = sub_base.size();
    let mut leq = Relation::identity(m);
    for i in 0..m {
        for j in 0..m {
            if algebra
                .leq()
                .holds(inclusion.apply(i), inclusion.apply(j))
            {
                leq.set(i, j);
            }
        }
    }
    Ok((OrderedAlgebra::new(sub_base, leq)?, inclusion))
}
