//! Finite Σ-algebras, homomorphisms, congruences, quotients, and kernels.
//!
//! The carrier of an algebra of size `n` is `{0, .., n-1}`. An operation of
//! arity `k` is stored as a flat row-major table of length `n^k`; the entry
//! for a tuple `(a_1, .., a_k)` sits at flat index `Σ a_i · n^(k-i)`.
//!
//! Congruences and quotient algebras determine each other exactly: the
//! kernel of the quotient surjection recovers the congruence, and every
//! surjective homomorphism factors as a quotient followed by an isomorphism.
//! Empty carriers are legal (they arise as generated subalgebras of
//! constant-free signatures); satisfaction over an empty algebra is
//! vacuously true.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::limits::Limits;
use crate::sigterm::Signature;
use crate::tuples::{checked_pow, flat_index, for_each_tuple};
use crate::Result;

/// A finite algebra: signature, carrier size, and one table per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    sig: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    /// Builds an algebra, checking that each table has exactly `size^arity`
    /// entries, all below `size`.
    pub fn new(sig: Signature, size: usize, tables: Vec<Vec<usize>>) -> Result<Self> {
        if tables.len() != sig.len() {
            return Err(Error::malformed(format!(
                "expected {} tables, got {}",
                sig.len(),
                tables.len()
            )));
        }
        for (sym, name, arity) in sig.iter() {
            let want = checked_pow(size, arity)
                .ok_or_else(|| Error::SizeLimitExceeded(format!("table for `{name}`")))?;
            if tables[sym].len() != want {
                return Err(Error::malformed(format!(
                    "table for `{name}` has {} entries, expected {want}",
                    tables[sym].len()
                )));
            }
            if let Some(&bad) = tables[sym].iter().find(|&&v| v >= size) {
                return Err(Error::malformed(format!(
                    "table for `{name}` contains {bad}, carrier size is {size}"
                )));
            }
        }
        Ok(FiniteAlgebra { sig, size, tables })
    }

    /// The cyclic algebra `({0..n-1}, + mod n)` over the signature `{+/2}`.
    pub fn cyclic(n: usize) -> Self {
        let sig = Signature::of(&[("+", 2)]);
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push((a + b) % n);
            }
        }
        FiniteAlgebra::new(sig, n, vec![table]).expect("valid cyclic table")
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn table(&self, sym: usize) -> &[usize] {
        &self.tables[sym]
    }

    /// Applies the symbol's table to a tuple of carrier elements.
    pub fn apply(&self, sym: usize, args: &[usize]) -> Result<usize> {
        if sym >= self.sig.len() {
            return Err(Error::ArityMismatch(format!("unknown symbol id {sym}")));
        }
        if args.len() != self.sig.arity(sym) {
            return Err(Error::ArityMismatch(format!(
                "`{}` expects {} arguments, got {}",
                self.sig.name(sym),
                self.sig.arity(sym),
                args.len()
            )));
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::malformed(format!(
                "element {bad} outside carrier of size {}",
                self.size
            )));
        }
        Ok(self.tables[sym][flat_index(args, self.size)])
    }

    fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.sig == other.sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(
                "algebras are over different signatures".into(),
            ))
        }
    }
}

/// A homomorphism between two algebras over the same signature, stored as a
/// total map on the domain carrier. Construction checks preservation of
/// every operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    dom: FiniteAlgebra,
    cod: FiniteAlgebra,
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(dom: FiniteAlgebra, cod: FiniteAlgebra, map: Vec<usize>) -> Result<Self> {
        if !is_homomorphism(&map, &dom, &cod)? {
            return Err(Error::malformed("map does not preserve the operations"));
        }
        Ok(Homomorphism { dom, cod, map })
    }

    pub fn identity(algebra: &FiniteAlgebra) -> Self {
        Homomorphism {
            dom: algebra.clone(),
            cod: algebra.clone(),
            map: (0..algebra.size()).collect(),
        }
    }

    pub fn dom(&self) -> &FiniteAlgebra {
        &self.dom
    }

    pub fn cod(&self) -> &FiniteAlgebra {
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

    /// Composition `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if self.cod != other.dom {
            return Err(Error::malformed(
                "codomain of first map differs from domain of second",
            ));
        }
        let map = self.map.iter().map(|&a| other.map[a]).collect();
        Homomorphism::new(self.dom.clone(), other.cod.clone(), map)
    }
}

/// Does `map` preserve every operation? `map` must be total on the carrier
/// of `dom` with values inside `cod`.
pub fn is_homomorphism(map: &[usize], dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Result<bool> {
    dom.same_signature(cod)?;
    if map.len() != dom.size() {
        return Err(Error::malformed(format!(
            "map covers {} elements, domain has {}",
            map.len(),
            dom.size()
        )));
    }
    if let Some(&bad) = map.iter().find(|&&v| v >= cod.size()) {
        return Err(Error::malformed(format!(
            "map value {bad} outside codomain of size {}",
            cod.size()
        )));
    }
    for (sym, _, arity) in dom.signature().iter() {
        let mut ok = true;
        for_each_tuple(dom.size(), arity, |tuple| {
            let lhs = map[dom.apply(sym, tuple).expect("in-range tuple")];
            let image: Vec<usize> = tuple.iter().map(|&a| map[a]).collect();
            let rhs = cod.apply(sym, &image).expect("in-range tuple");
            if lhs != rhs {
                ok = false;
                return Err(());
            }
            Ok(())
        })
        .ok();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A congruence: an operation-compatible equivalence relation, stored as the
/// canonical-representative vector (least element of each block).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    rep: Vec<usize>,
}

impl Congruence {
    /// The diagonal (every block a singleton).
    pub fn diagonal(n: usize) -> Self {
        Congruence {
            rep: (0..n).collect(),
        }
    }

    /// Everything in one block (empty carrier allowed).
    pub fn total(n: usize) -> Self {
        Congruence { rep: vec![0; n] }
    }

    /// Builds a congruence on `algebra` from explicit blocks; the blocks
    /// must partition the carrier and be closed under the operations.
    pub fn from_blocks(algebra: &FiniteAlgebra, blocks: &[Vec<usize>]) -> Result<Self> {
        let n = algebra.size();
        let mut rep = vec![usize::MAX; n];
        for block in blocks {
            let least = *block
                .iter()
                .min()
                .ok_or_else(|| Error::malformed("empty block"))?;
            for &e in block {
                if e >= n || rep[e] != usize::MAX {
                    return Err(Error::malformed("blocks do not partition the carrier"));
                }
                rep[e] = least;
            }
        }
        if rep.contains(&usize::MAX) {
            return Err(Error::malformed("blocks do not cover the carrier"));
        }
        let cong = Congruence { rep };
        cong.check_compatible(algebra)?;
        Ok(cong)
    }

    pub fn carrier_size(&self) -> usize {
        self.rep.len()
    }

    /// Canonical representative (least element) of `a`'s block.
    pub fn rep(&self, a: usize) -> usize {
        self.rep[a]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    /// Blocks ordered by least representative.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index_of = vec![usize::MAX; self.rep.len()];
        for a in 0..self.rep.len() {
            let r = self.rep[a];
            if index_of[r] == usize::MAX {
                index_of[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[index_of[r]].push(a);
        }
        blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks().len()
    }

    /// All related pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.rep.len() {
            for b in a + 1..self.rep.len() {
                if self.related(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Is this relation refined by `other` (every block of `self` contained
    /// in a block of `other`)?
    pub fn refines(&self, other: &Congruence) -> bool {
        (0..self.rep.len()).all(|a| {
            let r = self.rep[a];
            other.rep[a] == other.rep[r]
        })
    }

    /// Verifies operation compatibility on the given algebra.
    pub fn check_compatible(&self, algebra: &FiniteAlgebra) -> Result<()> {
        if self.rep.len() != algebra.size() {
            return Err(Error::NotACongruence(format!(
                "relation over {} elements, carrier has {}",
                self.rep.len(),
                algebra.size()
            )));
        }
        let n = algebra.size();
        for (sym, name, arity) in algebra.signature().iter() {
            // one representative tuple per block tuple: related tuples must
            // land in related images
            let mut seen: std::collections::HashMap<Vec<usize>, usize> =
                std::collections::HashMap::new();
            let mut bad = false;
            for_each_tuple(n, arity, |tuple| {
                let key: Vec<usize> = tuple.iter().map(|&a| self.rep[a]).collect();
                let image = self.rep[algebra.apply(sym, tuple).expect("in-range")];
                match seen.entry(key) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        if *e.get() != image {
                            bad = true;
                            return Err(());
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(image);
                    }
                }
                Ok(())
            })
            .ok();
            if bad {
                return Err(Error::NotACongruence(format!(
                    "blocks are not closed under `{name}`"
                )));
            }
        }
        Ok(())
    }
}

/// Builds a congruence on `algebra` from a representative vector
/// (`rep[a]` = least element of `a`'s block), checking shape and
/// operation compatibility.
pub fn congruence_from_rep(algebra: &FiniteAlgebra, rep: Vec<usize>) -> Result<Congruence> {
    for (a, &r) in rep.iter().enumerate() {
        if r > a || rep.get(r) != Some(&r) {
            return Err(Error::malformed(
                "not a least-representative vector".to_string(),
            ));
        }
    }
    let cong = Congruence { rep };
    cong.check_compatible(algebra)?;
    Ok(cong)
}

/// Small union-find used while saturating congruences. Finalized into the
/// least-representative form before a [`Congruence`] is handed out.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, a: usize) -> usize {
        if self.parent[a] != a {
            let root = self.find(self.parent[a]);
            self.parent[a] = root;
        }
        self.parent[a]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as root so finalization is cheap
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn finalize(mut self) -> Congruence {
        let n = self.parent.len();
        let rep = (0..n).map(|a| self.find(a)).collect();
        Congruence { rep }
    }
}

/// Least congruence containing the given pairs: union the pairs, then
/// saturate under the operations to a fixpoint.
pub fn congruence_generated(
    algebra: &FiniteAlgebra,
    pairs: &[(usize, usize)],
) -> Result<Congruence> {
    let n = algebra.size();
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::malformed(format!(
                "pair ({a},{b}) outside carrier of size {n}"
            )));
        }
    }
    let mut dsu = Dsu::new(n);
    for &(a, b) in pairs {
        dsu.union(a, b);
    }
    loop {
        let mut changed = false;
        for (sym, _, arity) in algebra.signature().iter() {
            // first tuple seen per class-tuple; later tuples merge images
            let mut seen: std::collections::HashMap<Vec<usize>, usize> =
                std::collections::HashMap::new();
            for_each_tuple::<()>(n, arity, |tuple| {
                let key: Vec<usize> = tuple.iter().map(|&a| dsu.find(a)).collect();
                let image = algebra.apply(sym, tuple).expect("in-range");
                if let Some(&prev) = seen.get(&key) {
                    if dsu.union(prev, image) {
                        changed = true;
                    }
                } else {
                    seen.insert(key, image);
                }
                Ok(())
            })
            .ok();
        }
        if !changed {
            break;
        }
    }
    Ok(dsu.finalize())
}

/// Product of a finite family of algebras over a common signature. The
/// carrier is the set of tuples (first factor most significant); operations
/// act pointwise. Returns the product together with its projections. The
/// empty family yields the one-element algebra.
pub fn product(
    factors: &[FiniteAlgebra],
    limits: &Limits,
) -> Result<(FiniteAlgebra, Vec<Homomorphism>)> {
    let sig = match factors.first() {
        Some(first) => {
            for f in &factors[1..] {
                first.same_signature(f)?;
            }
            first.signature().clone()
        }
        None => Signature::of(&[]),
    };
    let mut size: usize = 1;
    for f in factors {
        size = size
            .checked_mul(f.size())
            .filter(|&s| s <= limits.max_carrier)
            .ok_or_else(|| {
                Error::SizeLimitExceeded(format!(
                    "product carrier exceeds {}",
                    limits.max_carrier
                ))
            })?;
    }
    // component decode: element -> per-factor coordinates
    let coords = |e: usize| -> Vec<usize> {
        let mut rest = e;
        let mut out = vec![0; factors.len()];
        for (i, f) in factors.iter().enumerate().rev() {
            out[i] = rest % f.size();
            rest /= f.size();
        }
        out
    };
    let encode = |cs: &[usize]| -> usize {
        cs.iter()
            .zip(factors.iter())
            .fold(0, |acc, (&c, f)| acc * f.size() + c)
    };
    let mut tables = Vec::with_capacity(sig.len());
    for (sym, _, arity) in sig.iter() {
        let entries = checked_pow(size, arity).ok_or_else(|| {
            Error::SizeLimitExceeded("product table too large".to_string())
        })?;
        let mut table = Vec::with_capacity(entries);
        for_each_tuple(size, arity, |tuple| {
            let arg_coords: Vec<Vec<usize>> = tuple.iter().map(|&e| coords(e)).collect();
            let mut result = Vec::with_capacity(factors.len());
            for (i, f) in factors.iter().enumerate() {
                let args: Vec<usize> = arg_coords.iter().map(|cs| cs[i]).collect();
                result.push(f.apply(sym, &args)?);
            }
            table.push(encode(&result));
            Ok::<(), Error>(())
        })?;
        tables.push(table);
    }
    let prod = FiniteAlgebra::new(sig, size, tables)?;
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let map = (0..size).map(|e| coords(e)[i]).collect();
            Homomorphism::new(prod.clone(), f.clone(), map)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((prod, projections))
}

/// Least subalgebra containing `seed`: closes under all operations
/// (constants included), then restricts the tables. Returns the subalgebra
/// and the inclusion homomorphism. May be empty when `seed` is empty and the
/// signature has no constants.
pub fn subalgebra_generated(
    algebra: &FiniteAlgebra,
    seed: &[usize],
) -> Result<(FiniteAlgebra, Homomorphism)> {
    let n = algebra.size();
    if let Some(&bad) = seed.iter().find(|&&a| a >= n) {
        return Err(Error::malformed(format!(
            "seed element {bad} outside carrier of size {n}"
        )));
    }
    let mut included = vec![false; n];
    for &a in seed {
        included[a] = true;
    }
    loop {
        let members: Vec<usize> = (0..n).filter(|&a| included[a]).collect();
        let mut changed = false;
        for (sym, _, arity) in algebra.signature().iter() {
            for_each_tuple::<()>(members.len(), arity, |idx| {
                let tuple: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
                let image = algebra.apply(sym, &tuple).expect("in-range");
                if !included[image] {
                    included[image] = true;
                    changed = true;
                }
                Ok(())
            })
            .ok();
        }
        if !changed {
            break;
        }
    }
    restrict_to(algebra, &(0..n).filter(|&a| included[a]).collect::<Vec<_>>())
}

/// Restricts `algebra` to a closed subset of its carrier (elements listed in
/// increasing order). Fails if the subset is not closed.
pub fn restrict_to(
    algebra: &FiniteAlgebra,
    members: &[usize],
) -> Result<(FiniteAlgebra, Homomorphism)> {
    let mut local = vec![usize::MAX; algebra.size()];
    for (i, &a) in members.iter().enumerate() {
        local[a] = i;
    }
    let m = members.len();
    let mut tables = Vec::with_capacity(algebra.signature().len());
    for (sym, name, arity) in algebra.signature().iter() {
        let mut table = Vec::with_capacity(checked_pow(m, arity).unwrap_or(0));
        for_each_tuple(m, arity, |idx| {
            let tuple: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
            let image = algebra.apply(sym, &tuple).expect("in-range");
            if local[image] == usize::MAX {
                return Err(Error::malformed(format!(
                    "subset not closed under `{name}`"
                )));
            }
            table.push(local[image]);
            Ok(())
        })?;
        tables.push(table);
    }
    let sub = FiniteAlgebra::new(algebra.signature().clone(), m, tables)?;
    let inclusion = Homomorphism::new(sub.clone(), algebra.clone(), members.to_vec())?;
    Ok((sub, inclusion))
}

/// Quotient by a congruence: the carrier is the set of blocks ordered by
/// least representative; operations act on representatives. Returns the
/// quotient and the canonical surjection, whose kernel is exactly the input.
/// The congruence is re-checked defensively.
pub fn quotient(
    algebra: &FiniteAlgebra,
    cong: &Congruence,
) -> Result<(FiniteAlgebra, Homomorphism)> {
    cong.check_compatible(algebra)?;
    let blocks = cong.blocks();
    let m = blocks.len();
    let mut block_of = vec![usize::MAX; algebra.size()];
    for (i, block) in blocks.iter().enumerate() {
        for &e in block {
            block_of[e] = i;
        }
    }
    let mut tables = Vec::with_capacity(algebra.signature().len());
    for (sym, _, arity) in algebra.signature().iter() {
        let mut table = Vec::with_capacity(checked_pow(m, arity).unwrap_or(0));
        for_each_tuple(m, arity, |idx| {
            let tuple: Vec<usize> = idx.iter().map(|&i| blocks[i][0]).collect();
            let image = algebra.apply(sym, &tuple).expect("in-range");
            table.push(block_of[image]);
            Ok::<(), Error>(())
        })?;
        tables.push(table);
    }
    let quot = FiniteAlgebra::new(algebra.signature().clone(), m, tables)?;
    let surjection = Homomorphism::new(algebra.clone(), quot.clone(), block_of)?;
    Ok((quot, surjection))
}

/// Kernel of a homomorphism: `a ≡ a'` iff they map to the same element.
pub fn kernel(h: &Homomorphism) -> Congruence {
    let mut dsu = Dsu::new(h.dom().size());
    let mut first: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for a in 0..h.dom().size() {
        match first.entry(h.apply(a)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                dsu.union(*e.get(), a);
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(a);
            }
        }
    }
    dsu.finalize()
}

/// Join in the congruence lattice: least congruence containing both.
pub fn join(
    algebra: &FiniteAlgebra,
    a: &Congruence,
    b: &Congruence,
) -> Result<Congruence> {
    let mut pairs = a.pairs();
    pairs.extend(b.pairs());
    congruence_generated(algebra, &pairs)
}

/// All congruences of the algebra: the join-closure of the principal
/// congruences together with the diagonal, sorted finest-first (block count
/// descending, then representative vector), so refinement-comparable entries
/// appear in refinement order.
pub fn all_congruences(algebra: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Congruence>> {
    let n = algebra.size();
    if n > limits.max_lattice_carrier {
        return Err(Error::SizeLimitExceeded(format!(
            "congruence lattice enumeration capped at carrier size {}",
            limits.max_lattice_carrier
        )));
    }
    let mut found: BTreeSet<Congruence> = BTreeSet::new();
    found.insert(Congruence::diagonal(n));
    let mut principals = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            principals.push(congruence_generated(algebra, &[(a, b)])?);
        }
    }
    for p in &principals {
        found.insert(p.clone());
    }
    // join-closure
    loop {
        let snapshot: Vec<Congruence> = found.iter().cloned().collect();
        let mut grew = false;
        for c in &snapshot {
            for p in &principals {
                let j = join(algebra, c, p)?;
                if found.insert(j) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<Congruence> = found.into_iter().collect();
    out.sort_by(|a, b| {
        b.block_count()
            .cmp(&a.block_count())
            .then_with(|| a.rep.cmp(&b.rep))
    });
    Ok(out)
}

/// Does `h` factor through the surjection `e` (same domain)? If so, returns
/// the unique factor `g` with `g ∘ e = h`. This happens exactly when
/// `kernel(e)` refines `kernel(h)`.
pub fn factor_through(e: &Homomorphism, h: &Homomorphism) -> Result<Option<Homomorphism>> {
    if e.dom() != h.dom() {
        return Err(Error::malformed("factorization needs a common domain"));
    }
    if !e.is_surjective() {
        return Err(Error::malformed("can only factor through a surjection"));
    }
    if !kernel(e).refines(&kernel(h)) {
        return Ok(None);
    }
    let mut map = vec![0usize; e.cod().size()];
    for a in 0..e.dom().size() {
        map[e.apply(a)] = h.apply(a);
    }
    Ok(Some(Homomorphism::new(
        e.cod().clone(),
        h.cod().clone(),
        map,
    )?))
}

/// Isomorphism test by backtracking over bijections, pruning with a cheap
/// per-element invariant (how often an element occurs as an operation value,
/// per symbol, plus constant designations).
pub fn is_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    Ok(find_isomorphism(a, b)?.is_some())
}

/// Finds one isomorphism if any exists.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Option<Vec<usize>>> {
    a.same_signature(b)?;
    if a.size() != b.size() {
        return Ok(None);
    }
    let inv_a = element_invariants(a);
    let inv_b = element_invariants(b);
    {
        let mut sa = inv_a.clone();
        let mut sb = inv_b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return Ok(None);
        }
    }
    let n = a.size();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn backtrack(
        a: &FiniteAlgebra,
        b: &FiniteAlgebra,
        inv_a: &[Vec<usize>],
        inv_b: &[Vec<usize>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        next: usize,
    ) -> bool {
        let n = a.size();
        if next == n {
            let candidate = map.clone();
            return matches!(is_homomorphism(&candidate, a, b), Ok(true));
        }
        for img in 0..n {
            if used[img] || inv_a[next] != inv_b[img] {
                continue;
            }
            map[next] = img;
            used[img] = true;
            if partial_consistent(a, b, map, next)
                && backtrack(a, b, inv_a, inv_b, map, used, next + 1)
            {
                return true;
            }
            map[next] = usize::MAX;
            used[img] = false;
        }
        false
    }
    if backtrack(a, b, &inv_a, &inv_b, &mut map, &mut used, 0) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn element_invariants(a: &FiniteAlgebra) -> Vec<Vec<usize>> {
    let n = a.size();
    let mut inv = vec![Vec::new(); n];
    for (sym, _, arity) in a.signature().iter() {
        let mut occurrences = vec![0usize; n];
        for &v in a.table(sym) {
            occurrences[v] += 1;
        }
        for e in 0..n {
            inv[e].push(occurrences[e]);
            if arity == 0 {
                inv[e].push((a.table(sym)[0] == e) as usize);
            }
        }
    }
    inv
}

/// Checks tuples made entirely of already-assigned elements that involve the
/// element assigned last.
fn partial_consistent(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    map: &[usize],
    last: usize,
) -> bool {
    let assigned: Vec<usize> = (0..=last).collect();
    for (sym, _, arity) in a.signature().iter() {
        let mut ok = true;
        for_each_tuple(assigned.len(), arity, |idx| {
            let tuple: Vec<usize> = idx.iter().map(|&i| assigned[i]).collect();
            if arity > 0 && !tuple.contains(&last) {
                return Ok(());
            }
            let va = a.apply(sym, &tuple).expect("in-range");
            if map[va] == usize::MAX {
                return Ok(()); // image not pinned yet
            }
            let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
            let vb = b.apply(sym, &image).expect("in-range");
            if map[va] != vb {
                ok = false;
                return Err(());
            }
            Ok(())
        })
        .ok();
        if !ok {
            return false;
        }
    }
    true
}
