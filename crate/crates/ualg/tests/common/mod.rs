//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here deliberately avoids the library's own algorithms where
//! it serves as an oracle: congruence generation is checked against brute
//! force over all partitions, HSP membership against explicit
//! quotient-of-subalgebra search, and the quantitative congruence solver
//! against round-based derivation enumeration.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ualg::finalg::{self, FiniteAlgebra};
use ualg::quantalg::{ExtMetric, QuantAlgebra};
use ualg::ratext::Ext;
use ualg::sigterm::Signature;
use ualg::Limits;

/// Local tuple iteration so the oracles share nothing with the library's
/// indexing helpers.
pub fn for_each_tuple<E>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<(), E>,
) -> Result<(), E> {
    let mut idx = vec![0usize; k];
    if k == 0 {
        return f(&idx);
    }
    if n == 0 {
        return Ok(());
    }
    loop {
        f(&idx)?;
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// corpus

pub fn z(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::cyclic(n)
}

/// Binary-signature corpus over `{*/2}`, all carriers ≤ 3.
pub fn binary_corpus() -> Vec<FiniteAlgebra> {
    let sig = Signature::of(&[("*", 2)]);
    let make = |n: usize, f: &dyn Fn(usize, usize) -> usize| {
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(f(a, b));
            }
        }
        FiniteAlgebra::new(sig.clone(), n, vec![table]).unwrap()
    };
    vec![
        make(1, &|_, _| 0),                  // one element
        make(2, &|a, b| (a + b) % 2),        // Z2
        make(3, &|a, b| (a + b) % 3),        // Z3
        make(2, &|a, _| a),                  // left zero
        make(2, &|_, b| b),                  // right zero
        make(2, &|a, b| a.min(b)),           // meet on the 2-chain
        make(3, &|a, b| a.min(b)),           // meet on the 3-chain
        make(2, &|_, _| 0),                  // constant
        make(3, &|a, _| a),                  // left zero on three elements
        make(2, &|a, b| (a + b + 1) % 2),    // XNOR (isomorphic to Z2)
    ]
}

/// Mixed-signature corpus (each over its own signature), carriers ≤ 5.
pub fn plain_corpus() -> Vec<FiniteAlgebra> {
    let mut out = vec![
        z(2),
        z(3),
        z(4),
        z(5),
        FiniteAlgebra::new(Signature::of(&[]), 3, vec![]).unwrap(),
        FiniteAlgebra::new(Signature::of(&[("f", 1)]), 4, vec![vec![1, 2, 3, 0]]).unwrap(),
        FiniteAlgebra::new(Signature::of(&[("f", 1)]), 3, vec![vec![0, 0, 1]]).unwrap(),
        FiniteAlgebra::new(
            Signature::of(&[("e", 0), ("*", 2)]),
            2,
            vec![vec![0], vec![0, 1, 1, 0]],
        )
        .unwrap(),
    ];
    out.extend(binary_corpus().into_iter().filter(|a| a.size() <= 5));
    out
}

// ---------------------------------------------------------------------------
// partitions and the brute-force congruence oracle

/// All partitions of `{0..n-1}` as representative vectors (restricted
/// growth strings mapped to least-element representatives).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(rgs: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        let n = rgs.len();
        if pos == n {
            // convert block ids to least-element representatives
            let mut first = vec![usize::MAX; n];
            let mut rep = vec![0usize; n];
            for i in 0..n {
                let b = rgs[i];
                if first[b] == usize::MAX {
                    first[b] = i;
                }
                rep[i] = first[b];
            }
            out.push(rep);
            return;
        }
        for b in 0..=max_used + 1 {
            rgs[pos] = b;
            rec(rgs, pos + 1, max_used.max(b), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rgs[0] = 0;
    rec(&mut rgs, 1, 0, &mut out);
    out
}

/// Is the partition (given as a representative vector) compatible with all
/// operations of the algebra? Written naively: check every pair of
/// componentwise-related tuples.
pub fn partition_is_congruence(algebra: &FiniteAlgebra, rep: &[usize]) -> bool {
    let n = algebra.size();
    for (sym, _, arity) in algebra.signature().iter() {
        let mut ok = true;
        for_each_tuple(n, arity, |u| {
            for_each_tuple(n, arity, |v| {
                let related = u.iter().zip(v.iter()).all(|(&a, &b)| rep[a] == rep[b]);
                if related {
                    let iu = algebra.apply(sym, u).unwrap();
                    let iv = algebra.apply(sym, v).unwrap();
                    if rep[iu] != rep[iv] {
                        ok = false;
                        return Err(());
                    }
                }
                Ok(())
            })
            .ok();
            if ok {
                Ok(())
            } else {
                Err(())
            }
        })
        .ok();
        if !ok {
            return false;
        }
    }
    true
}

/// Brute-force least congruence containing the pairs: intersect all
/// operation-compatible partitions that contain them.
pub fn least_congruence_bruteforce(
    algebra: &FiniteAlgebra,
    pairs: &[(usize, usize)],
) -> Vec<usize> {
    let n = algebra.size();
    let mut qualifying: Vec<Vec<usize>> = all_partitions(n)
        .into_iter()
        .filter(|rep| pairs.iter().all(|&(a, b)| rep[a] == rep[b]))
        .filter(|rep| partition_is_congruence(algebra, rep))
        .collect();
    // the intersection of equivalences: a ~ b iff related in all
    let base = qualifying.pop().expect("total relation always qualifies");
    let mut rep: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in 0..a {
            let everywhere = base[a] == base[b]
                && qualifying.iter().all(|r| r[a] == r[b]);
            if everywhere {
                rep[a] = rep[b];
                break;
            }
        }
    }
    rep
}

/// All congruences by brute force, as representative vectors, sorted.
pub fn all_congruences_bruteforce(algebra: &FiniteAlgebra) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = all_partitions(algebra.size())
        .into_iter()
        .filter(|rep| partition_is_congruence(algebra, rep))
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// explicit HSP oracle

/// Is there a surjective homomorphism from `dom` onto `cod`? Backtracking
/// over element images with table-consistency pruning.
pub fn exists_surjective_hom(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> bool {
    if dom.size() < cod.size() {
        return false;
    }
    if cod.size() == 0 {
        return dom.size() == 0;
    }
    let mut map = vec![usize::MAX; dom.size()];
    fn consistent(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &[usize], upto: usize) -> bool {
        let assigned: Vec<usize> = (0..=upto).collect();
        for (sym, _, arity) in dom.signature().iter() {
            let mut ok = true;
            for_each_tuple(assigned.len(), arity, |idx| {
                let tuple: Vec<usize> = idx.iter().map(|&i| assigned[i]).collect();
                if arity > 0 && !tuple.contains(&upto) {
                    return Ok(());
                }
                let image_of_value = map[dom.apply(sym, &tuple).unwrap()];
                if image_of_value == usize::MAX {
                    return Ok(());
                }
                let images: Vec<usize> = tuple.iter().map(|&a| map[a]).collect();
                if cod.apply(sym, &images).unwrap() != image_of_value {
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
    /// Full homomorphism re-verification of a completed map; the partial
    /// consistency check can miss tuples whose image element was still
    /// unassigned when the tuple's arguments were placed.
    fn total_check(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &[usize]) -> bool {
        for (sym, _, arity) in dom.signature().iter() {
            let mut ok = true;
            for_each_tuple(dom.size(), arity, |tuple| {
                let lhs = map[dom.apply(sym, tuple).unwrap()];
                let images: Vec<usize> = tuple.iter().map(|&a| map[a]).collect();
                if cod.apply(sym, &images).unwrap() != lhs {
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
    fn rec(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &mut Vec<usize>, next: usize) -> bool {
        if next == dom.size() {
            let mut hit = vec![false; cod.size()];
            for &v in map.iter() {
                hit[v] = true;
            }
            return hit.into_iter().all(|h| h) && total_check(dom, cod, map);
        }
        // surjectivity pruning: remaining elements must cover missing images
        let missing = {
            let mut hit = vec![false; cod.size()];
            for &v in map[..next].iter() {
                if v != usize::MAX {
                    hit[v] = true;
                }
            }
            hit.iter().filter(|&&h| !h).count()
        };
        if missing > dom.size() - next {
            return false;
        }
        for img in 0..cod.size() {
            map[next] = img;
            if consistent(dom, cod, map, next) && rec(dom, cod, map, next + 1) {
                return true;
            }
        }
        map[next] = usize::MAX;
        false
    }
    rec(dom, cod, &mut map, 0)
}

/// Explicit HSP membership: is `b` (isomorphic to) a quotient of a
/// subalgebra of `a` or of `a²`? Every quotient of a subalgebra restricts
/// to one generated by preimages of `b`'s elements, so only subalgebras
/// generated by at most `|b|` seeds need checking.
pub fn hsp_member_explicit(b: &FiniteAlgebra, a: &FiniteAlgebra) -> bool {
    let limits = Limits {
        max_carrier: 1024,
        ..Limits::default()
    };
    for k in 1..=2usize {
        let (power, _) = finalg::product(&vec![a.clone(); k], &limits).unwrap();
        let mut seeds: Vec<Vec<usize>> = vec![vec![]];
        for size in 1..=b.size().min(power.size()) {
            seeds.extend(subsets_of_size(power.size(), size));
        }
        for seed in seeds {
            let (sub, _) = finalg::subalgebra_generated(&power, &seed).unwrap();
            if exists_surjective_hom(&sub, b) {
                return true;
            }
        }
    }
    false
}

pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in from..n {
            current.push(i);
            rec(n, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// random generation

/// Random algebra with ≤ `max_ops` operations of arity ≤ 2 and carrier in
/// `1..=max_size`.
pub fn random_algebra(rng: &mut ChaCha8Rng, max_size: usize, max_ops: usize) -> FiniteAlgebra {
    let n = rng.gen_range(1..=max_size);
    let op_count = rng.gen_range(0..=max_ops);
    let symbols: Vec<(String, usize)> = (0..op_count)
        .map(|i| (format!("o{i}"), rng.gen_range(0..=2)))
        .collect();
    let sig = Signature::new(symbols).unwrap();
    let tables = sig
        .iter()
        .map(|(_, _, arity)| {
            (0..n.pow(arity as u32)).map(|_| rng.gen_range(0..n)).collect()
        })
        .collect();
    FiniteAlgebra::new(sig, n, tables).unwrap()
}

/// Random extended-rational value with denominator ≤ 12 (occasionally ∞).
pub fn random_ext(rng: &mut ChaCha8Rng, allow_inf: bool) -> Ext {
    if allow_inf && rng.gen_bool(0.15) {
        return Ext::Infinite;
    }
    let q = rng.gen_range(1..=12i64);
    let p = rng.gen_range(0..=3 * q);
    Ext::ratio(p, q).unwrap()
}

/// Random quantitative algebra, denominators ≤ 12, carrier ≤ `max_size`.
///
/// Three shapes, all nonexpansive by construction:
/// - uniform metric with an arbitrary random table;
/// - points on the rational line with projections, min, max, constants, and
///   exhaustively filtered nonexpansive unary maps;
/// - two clusters at distance ∞, line metric inside each, with projections
///   and filtered unary maps.
pub fn random_quant_algebra(rng: &mut ChaCha8Rng, max_size: usize) -> QuantAlgebra {
    let n = rng.gen_range(1..=max_size);
    match rng.gen_range(0..3) {
        0 => {
            // uniform metric: every operation is nonexpansive
            let value = loop {
                let v = random_ext(rng, true);
                if !v.is_zero() {
                    break v;
                }
            };
            let metric = ExtMetric::uniform(n, value).unwrap();
            let op_count = rng.gen_range(0..=2);
            let symbols: Vec<(String, usize)> = (0..op_count)
                .map(|i| (format!("o{i}"), rng.gen_range(0..=2)))
                .collect();
            let sig = Signature::new(symbols).unwrap();
            let tables = sig
                .iter()
                .map(|(_, _, arity)| {
                    (0..n.pow(arity as u32)).map(|_| rng.gen_range(0..n)).collect()
                })
                .collect();
            let base = FiniteAlgebra::new(sig, n, tables).unwrap();
            QuantAlgebra::new(base, metric).unwrap()
        }
        1 => line_quant_algebra(rng, n, false),
        _ => line_quant_algebra(rng, n, true),
    }
}

/// Points on the rational line (optionally split into two ∞-separated
/// clusters), with operations that are nonexpansive for that geometry.
fn line_quant_algebra(rng: &mut ChaCha8Rng, n: usize, split: bool) -> QuantAlgebra {
    // distinct grid points with denominator ≤ 12
    let mut offsets: Vec<(i64, i64)> = Vec::new();
    let denom = rng.gen_range(1..=12i64);
    let mut used = std::collections::BTreeSet::new();
    while offsets.len() < n {
        let p = rng.gen_range(0..=24i64);
        if used.insert(p) {
            offsets.push((p, denom));
        }
    }
    let cluster_of: Vec<usize> = (0..n)
        .map(|i| if split && i >= n / 2 { 1 } else { 0 })
        .collect();
    let point = |i: usize| Ext::ratio(offsets[i].0, offsets[i].1).unwrap();
    let dist = |i: usize, j: usize| -> Ext {
        if cluster_of[i] != cluster_of[j] {
            return Ext::Infinite;
        }
        match (point(i), point(j)) {
            (Ext::Finite(x), Ext::Finite(y)) => {
                let diff = if x >= y { x - y } else { y - x };
                Ext::Finite(diff)
            }
            _ => unreachable!(),
        }
    };
    let d: Vec<Vec<Ext>> = (0..n)
        .map(|i| (0..n).map(|j| dist(i, j)).collect())
        .collect();
    let metric = ExtMetric::new(d).unwrap();

    // candidate unary maps filtered for nonexpansiveness
    let mut unary_tables: Vec<Vec<usize>> = Vec::new();
    let identity: Vec<usize> = (0..n).collect();
    unary_tables.push(identity);
    for _ in 0..20 {
        let t: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let ok = (0..n).all(|i| (0..n).all(|j| dist(t[i], t[j]) <= dist(i, j)));
        if ok {
            unary_tables.push(t);
        }
    }

    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    let mut idx = 0;
    if rng.gen_bool(0.5) {
        // a binary operation: projection, or (within the line case) min/max
        let choice = if split { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
        let table: Vec<usize> = match choice {
            0 => (0..n * n).map(|f| f / n).collect(), // first projection
            1 => (0..n * n).map(|f| f % n).collect(), // second projection
            2 => {
                // min by position on the line
                let mut t = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        t.push(if point(a) <= point(b) { a } else { b });
                    }
                }
                t
            }
            _ => {
                let mut t = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        t.push(if point(a) >= point(b) { a } else { b });
                    }
                }
                t
            }
        };
        symbols.push((format!("o{idx}"), 2));
        tables.push(table);
        idx += 1;
    }
    if rng.gen_bool(0.7) {
        let t = unary_tables[rng.gen_range(0..unary_tables.len())].clone();
        symbols.push((format!("o{idx}"), 1));
        tables.push(t);
        idx += 1;
    }
    if rng.gen_bool(0.3) {
        symbols.push((format!("o{idx}"), 0));
        tables.push(vec![rng.gen_range(0..n)]);
    }
    let sig = Signature::new(symbols).unwrap();
    let base = FiniteAlgebra::new(sig, n, tables).unwrap();
    QuantAlgebra::new(base, metric).unwrap()
}

// ---------------------------------------------------------------------------
// quantitative bounded-derivation oracle

/// Round-based derivation enumeration: starting from the metric capped by
/// the constraints, each round applies every single rule instance (Triang
/// through any midpoint, Cong over any tuple pair) to the previous round's
/// matrix. Returns the per-round matrices up to the fixpoint (the last
/// entry is stable).
pub fn quant_derivation_rounds(
    algebra: &QuantAlgebra,
    constraints: &[(usize, usize, Ext)],
) -> Vec<Vec<Vec<Ext>>> {
    let n = algebra.size();
    let mut m: Vec<Vec<Ext>> = (0..n)
        .map(|a| (0..n).map(|b| algebra.dist(a, b).clone()).collect())
        .collect();
    for (a, b, eps) in constraints {
        if a != b {
            let lower = m[*a][*b].clone().min(eps.clone());
            m[*a][*b] = lower.clone();
            m[*b][*a] = lower;
        }
    }
    let mut rounds = vec![m.clone()];
    loop {
        let prev = rounds.last().unwrap().clone();
        let mut next = prev.clone();
        // single Triang applications
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = &prev[i][k] + &prev[k][j];
                    if via < next[i][j] {
                        next[i][j] = via;
                    }
                }
            }
        }
        // single Cong applications
        for (sym, _, arity) in algebra.base().signature().iter() {
            for_each_tuple::<()>(n, arity, |u| {
                for_each_tuple::<()>(n, arity, |v| {
                    let bound = u
                        .iter()
                        .zip(v.iter())
                        .map(|(&a, &b)| prev[a][b].clone())
                        .fold(Ext::zero(), |acc, x| acc.max(x));
                    let iu = algebra.base().apply(sym, u).unwrap();
                    let iv = algebra.base().apply(sym, v).unwrap();
                    if bound < next[iu][iv] {
                        next[iu][iv] = bound;
                    }
                    Ok(())
                })
                .ok();
                Ok(())
            })
            .ok();
        }
        // re-symmetrize (Sym applications)
        for i in 0..n {
            for j in 0..i {
                let lower = next[i][j].clone().min(next[j][i].clone());
                next[i][j] = lower.clone();
                next[j][i] = lower;
            }
        }
        let stable = next == prev;
        rounds.push(next);
        if stable {
            break;
        }
    }
    rounds
}
