//! Term equations, free algebras in a finitely generated variety, HSP
//! membership, and eventual satisfaction of equation sequences.
//!
//! The membership decision uses the standard finite free-algebra method: the
//! free algebra on `n` generators in the variety generated by `A` is the
//! subalgebra of `A^(|A|^n)` generated by the n evaluation tuples. Deciding
//! `B ∈ HSP(A)` builds that free algebra for `n = |B|` while evaluating every
//! discovered witness term in `B`; a collision in the free algebra that
//! separates in `B` yields a certificate identity of `A` that `B` violates,
//! and a collision-free run yields the witnessing surjection onto `B`.

use std::collections::HashMap;

use crate::error::Error;
use crate::finalg::{is_homomorphism, FiniteAlgebra};
use crate::limits::Limits;
use crate::sigterm::{evaluate, Signature, Term, VarSet};
use crate::tuples::{checked_pow, for_each_tuple};
use crate::Result;

/// An equation `lhs = rhs` between terms over a shared variable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermEquation {
    pub vars: VarSet,
    pub lhs: Term,
    pub rhs: Term,
}

impl TermEquation {
    pub fn new(vars: VarSet, lhs: Term, rhs: Term) -> Self {
        TermEquation { vars, lhs, rhs }
    }

    /// Validates both sides against a signature.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.lhs.validate(sig, &self.vars)?;
        self.rhs.validate(sig, &self.vars)
    }

    /// Renames variable indices by order of first occurrence (left side
    /// first), dropping unused variables. Two equations are α-equal iff
    /// their normal forms agree.
    pub fn alpha_normal(&self) -> (usize, Term, Term) {
        let mut order: Vec<usize> = Vec::new();
        fn walk(t: &Term, order: &mut Vec<usize>) {
            match t {
                Term::Var(i) => {
                    if !order.contains(i) {
                        order.push(*i);
                    }
                }
                Term::App(_, cs) => cs.iter().for_each(|c| walk(c, order)),
            }
        }
        walk(&self.lhs, &mut order);
        walk(&self.rhs, &mut order);
        let rename: HashMap<usize, usize> =
            order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        fn apply(t: &Term, rename: &HashMap<usize, usize>) -> Term {
            match t {
                Term::Var(i) => Term::Var(rename[i]),
                Term::App(s, cs) => {
                    Term::App(*s, cs.iter().map(|c| apply(c, rename)).collect())
                }
            }
        }
        (
            order.len(),
            apply(&self.lhs, &rename),
            apply(&self.rhs, &rename),
        )
    }

    pub fn alpha_eq(&self, other: &TermEquation) -> bool {
        self.alpha_normal() == other.alpha_normal()
    }
}

/// A finite prefix standing in for an infinite sequence of equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSequence {
    pub items: Vec<TermEquation>,
}

/// Outcome of a satisfaction check: either it holds, or it fails at a
/// specific assignment of carrier elements to variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Satisfied,
    Falsified(Vec<usize>),
}

impl SatOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SatOutcome::Satisfied)
    }

    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            SatOutcome::Satisfied => None,
            SatOutcome::Falsified(w) => Some(w),
        }
    }
}

/// Does the algebra satisfy `lhs = rhs` under every assignment? An empty
/// algebra satisfies everything vacuously. On failure the witness assignment
/// (first in lexicographic order) is returned.
pub fn satisfies_equation(algebra: &FiniteAlgebra, eq: &TermEquation) -> Result<SatOutcome> {
    eq.validate(algebra.signature()).map_err(signature_context)?;
    let mut outcome = SatOutcome::Satisfied;
    for_each_tuple(algebra.size(), eq.vars.len(), |h| {
        let l = evaluate(&eq.lhs, algebra, h).expect("validated");
        let r = evaluate(&eq.rhs, algebra, h).expect("validated");
        if l != r {
            outcome = SatOutcome::Falsified(h.to_vec());
            return Err(());
        }
        Ok(())
    })
    .ok();
    Ok(outcome)
}

fn signature_context(e: Error) -> Error {
    match e {
        Error::ArityMismatch(m) | Error::MalformedInput(m) => Error::SignatureMismatch(m),
        other => other,
    }
}

/// The free algebra of the variety generated by `A`, on `n` generators,
/// together with the generator elements and a least-depth witness term for
/// every element.
#[derive(Debug, Clone)]
pub struct FreeAlgebraWitness {
    pub algebra: FiniteAlgebra,
    pub generators: Vec<usize>,
    pub witness_terms: Vec<Term>,
}

/// BFS state over evaluation tuples: each discovered element is the tuple of
/// its values under every assignment of the generators into `base`.
struct TupleBfs {
    assignments: usize,
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    witness: Vec<Term>,
    /// element id of each generator; generators collapse when the base has
    /// at most one element (every assignment then agrees on them)
    gen_ids: Vec<usize>,
}

impl TupleBfs {
    fn new(base: &FiniteAlgebra, n: usize, limits: &Limits) -> Result<Self> {
        let assignments = checked_pow(base.size(), n)
            .filter(|&c| c <= limits.max_universe)
            .ok_or_else(|| {
                Error::SizeLimitExceeded(format!(
                    "free-algebra construction needs more than {} assignments",
                    limits.max_universe
                ))
            })?;
        let mut bfs = TupleBfs {
            assignments,
            elements: Vec::new(),
            index: HashMap::new(),
            witness: Vec::new(),
            gen_ids: Vec::new(),
        };
        // generator i evaluates, under assignment h, to h's i-th component;
        // assignments enumerate lexicographically with x0 most significant
        for i in 0..n {
            let mut tuple = Vec::with_capacity(assignments);
            for h in 0..assignments {
                let mut digits = vec![0usize; n];
                crate::tuples::unflatten(h, base.size(), &mut digits);
                tuple.push(digits[i]);
            }
            let id = match bfs.insert(tuple.clone(), Term::Var(i), limits)? {
                Some(id) => id,
                None => bfs.index[&tuple],
            };
            bfs.gen_ids.push(id);
        }
        Ok(bfs)
    }

    /// Inserts a new tuple unless present; `Ok(Some(id))` on insertion.
    fn insert(&mut self, tuple: Vec<usize>, term: Term, limits: &Limits) -> Result<Option<usize>> {
        if self.index.contains_key(&tuple) {
            return Ok(None);
        }
        if self.elements.len() >= limits.max_universe {
            return Err(Error::SizeLimitExceeded(format!(
                "free algebra exceeds {} elements",
                limits.max_universe
            )));
        }
        let id = self.elements.len();
        self.index.insert(tuple.clone(), id);
        self.elements.push(tuple);
        self.witness.push(term);
        Ok(Some(id))
    }

    /// Pointwise application of `sym` to element tuples.
    fn apply(&self, base: &FiniteAlgebra, sym: usize, args: &[usize]) -> Vec<usize> {
        (0..self.assignments)
            .map(|h| {
                let point: Vec<usize> = args.iter().map(|&e| self.elements[e][h]).collect();
                base.apply(sym, &point).expect("carrier elements")
            })
            .collect()
    }

    /// One closure round: applies every symbol to argument tuples touching
    /// the frontier, returning every application (value tuple, symbol,
    /// arguments) in deterministic order, including ones whose value
    /// already exists, so callers can cross-check them.
    fn closure_round(
        &self,
        base: &FiniteAlgebra,
        frontier_start: usize,
    ) -> Result<Vec<(Vec<usize>, usize, Vec<usize>)>> {
        let total = self.elements.len();
        let mut applications: Vec<(Vec<usize>, usize, Vec<usize>)> = Vec::new();
        for (sym, _, arity) in base.signature().iter() {
            for_each_tuple(total, arity, |args| {
                if frontier_start > 0 && !args.iter().any(|&a| a >= frontier_start) {
                    return Ok(()); // processed in an earlier round
                }
                let tuple = self.apply(base, sym, args);
                applications.push((tuple, sym, args.to_vec()));
                Ok::<(), Error>(())
            })?;
        }
        Ok(applications)
    }

    fn term_for(&self, sym: usize, args: &[usize]) -> Term {
        Term::App(
            sym,
            args.iter().map(|&a| self.witness[a].clone()).collect(),
        )
    }

    /// Assembles the finite algebra over the discovered carrier.
    fn into_witness(self, base: &FiniteAlgebra) -> Result<FreeAlgebraWitness> {
        let sig = base.signature().clone();
        let m = self.elements.len();
        let mut tables = Vec::with_capacity(sig.len());
        for (sym, _, arity) in sig.iter() {
            let mut table = Vec::with_capacity(checked_pow(m, arity).unwrap_or(0));
            for_each_tuple(m, arity, |args| {
                let tuple = self.apply(base, sym, args);
                table.push(*self.index.get(&tuple).expect("carrier is closed"));
                Ok::<(), Error>(())
            })?;
            tables.push(table);
        }
        let algebra = FiniteAlgebra::new(sig, m, tables)?;
        Ok(FreeAlgebraWitness {
            algebra,
            generators: self.gen_ids,
            witness_terms: self.witness,
        })
    }
}

/// Builds the free algebra on `n` generators in the variety generated by
/// `base`. Elements are ordered by BFS discovery (generators first, then
/// applications in symbol order over existing elements in index order), so
/// every witness term has least possible depth.
pub fn free_algebra_in_variety(
    base: &FiniteAlgebra,
    n: usize,
    limits: &Limits,
) -> Result<FreeAlgebraWitness> {
    let mut bfs = TupleBfs::new(base, n, limits)?;
    let mut frontier_start = 0usize;
    loop {
        let total = bfs.elements.len();
        let mut grew = false;
        for (tuple, sym, args) in bfs.closure_round(base, frontier_start)? {
            if !bfs.index.contains_key(&tuple) {
                let term = bfs.term_for(sym, &args);
                bfs.insert(tuple, term, limits)?;
                grew = true;
            }
        }
        if !grew {
            break;
        }
        frontier_start = total;
    }
    bfs.into_witness(base)
}

/// Result of an HSP membership decision, always with a certificate.
#[derive(Debug, Clone)]
pub enum HspOutcome {
    /// `B ∈ HSP(A)`: a surjection from the free algebra of `HSP(A)` on
    /// `|B|` generators onto `B`.
    Member {
        free: FreeAlgebraWitness,
        surjection: Vec<usize>,
    },
    /// `B ∉ HSP(A)`: an identity that holds in `A` and fails in `B` at the
    /// given assignment.
    NonMember {
        equation: TermEquation,
        witness: Vec<usize>,
    },
}

impl HspOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, HspOutcome::Member { .. })
    }
}

/// Decides `candidate ∈ HSP(class_generator)` by the free-algebra method,
/// evaluating every discovered witness term in the candidate (under
/// `x_i ↦ i`) as the free algebra grows.
pub fn hsp_member(
    candidate: &FiniteAlgebra,
    class_generator: &FiniteAlgebra,
    limits: &Limits,
) -> Result<HspOutcome> {
    if candidate.signature() != class_generator.signature() {
        return Err(Error::SignatureMismatch(
            "candidate and class generator are over different signatures".into(),
        ));
    }
    let base = class_generator;
    let n = candidate.size();
    let generator_assignment: Vec<usize> = (0..n).collect();

    let mut bfs = TupleBfs::new(base, n, limits)?;
    // collapsed generators (the base has at most one element) separate in
    // the candidate by construction: x_i = x_j holds in the base and fails
    // at the generator assignment
    for i in 0..n {
        for j in i + 1..n {
            if bfs.gen_ids[i] == bfs.gen_ids[j] {
                let equation =
                    TermEquation::new(VarSet::canonical(n), Term::Var(i), Term::Var(j));
                debug_assert!(satisfies_equation(base, &equation)?.holds());
                return Ok(HspOutcome::NonMember {
                    equation,
                    witness: generator_assignment,
                });
            }
        }
    }
    let mut value_in_b: Vec<usize> = bfs
        .witness
        .iter()
        .map(|t| evaluate(t, candidate, &generator_assignment))
        .collect::<Result<_>>()?;

    let mut frontier_start = 0usize;
    loop {
        let total = bfs.elements.len();
        let mut grew = false;
        for (tuple, sym, args) in bfs.closure_round(base, frontier_start)? {
            // candidate value computed compositionally from the arguments
            let b_args: Vec<usize> = args.iter().map(|&a| value_in_b[a]).collect();
            let b_val = candidate.apply(sym, &b_args)?;
            match bfs.index.get(&tuple) {
                Some(&existing) => {
                    // the two witness terms agree in A everywhere; if they
                    // separate in B, that identity certifies non-membership
                    if value_in_b[existing] != b_val {
                        let equation = TermEquation::new(
                            VarSet::canonical(n),
                            bfs.witness[existing].clone(),
                            bfs.term_for(sym, &args),
                        );
                        debug_assert!(satisfies_equation(base, &equation)?.holds());
                        return Ok(HspOutcome::NonMember {
                            equation,
                            witness: generator_assignment,
                        });
                    }
                }
                None => {
                    let term = bfs.term_for(sym, &args);
                    bfs.insert(tuple, term, limits)?;
                    value_in_b.push(b_val);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
        frontier_start = total;
    }

    let free = bfs.into_witness(base)?;
    debug_assert!(is_homomorphism(&value_in_b, &free.algebra, candidate)?);
    Ok(HspOutcome::Member {
        free,
        surjection: value_in_b,
    })
}

/// Least index `i0` such that the algebra satisfies every equation from
/// `i0` on; `None` if the final equation fails (the finite list stands in
/// for an infinite sequence, so a failing last item means divergence).
pub fn eventual_satisfaction(
    algebra: &FiniteAlgebra,
    seq: &EquationSequence,
) -> Result<Option<usize>> {
    let mut i0 = 0usize;
    for (i, eq) in seq.items.iter().enumerate() {
        if !satisfies_equation(algebra, eq)?.holds() {
            i0 = i + 1;
        }
    }
    if i0 == seq.items.len() && !seq.items.is_empty() {
        return Ok(None); // the final item fails
    }
    Ok(Some(i0))
}

/// The free algebra's universal property made concrete: any map of the
/// generators into an algebra of the variety extends along the witness
/// terms. Returns the extension map (callers check it with
/// [`is_homomorphism`]).
pub fn extend_from_generators(
    free: &FreeAlgebraWitness,
    b: &FiniteAlgebra,
    generator_images: &[usize],
) -> Result<Vec<usize>> {
    if generator_images.len() != free.generators.len() {
        return Err(Error::malformed(format!(
            "expected {} generator images, got {}",
            free.generators.len(),
            generator_images.len()
        )));
    }
    free.witness_terms
        .iter()
        .map(|t| evaluate(t, b, generator_images))
        .collect()
}
