//! Signatures, variables, terms, substitution, and evaluation: the shared
//! syntactic core.
//!
//! Variables are indices into an ordered [`VarSet`]; names are kept only for
//! I/O. Depth convention: a variable has depth 0, an application has depth
//! `1 + max(child depths)`, so constants have depth 1.
//!
//! Text syntax (used by the CLI and all file formats): prefix application
//! `f(t1,...,tn)`; a bare identifier is a variable unless the signature
//! declares it 0-ary, in which case it is that constant. Whitespace is
//! ignored. An identifier is any maximal run of characters other than
//! whitespace, parentheses, and commas, so symbol names like `*` or `⊕`
//! parse fine: `*(x,y)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::finalg::FiniteAlgebra;
use crate::Result;

/// Index of an operation symbol within its [`Signature`].
pub type SymbolId = usize;

/// A finite set of operation symbols with finite arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    /// Builds a signature from `(name, arity)` pairs. Names must be pairwise
    /// distinct; the list may be empty.
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (name, _) in &symbols {
            if name.is_empty() {
                return Err(Error::malformed("empty symbol name"));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::malformed(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Signature { symbols })
    }

    /// Convenience constructor from string literals.
    pub fn of(symbols: &[(&str, usize)]) -> Self {
        Signature::new(
            symbols
                .iter()
                .map(|(n, a)| (n.to_string(), *a))
                .collect(),
        )
        .expect("distinct symbol names")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id].0
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.symbols[id].1
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    /// Iterates over `(id, name, arity)`.
    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &str, usize)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, (n, a))| (i, n.as_str(), *a))
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }
}

/// An ordered set of distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::malformed("empty variable name"));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::malformed(format!("duplicate variable `{name}`")));
            }
        }
        Ok(VarSet { names })
    }

    pub fn of(names: &[&str]) -> Self {
        VarSet::new(names.iter().map(|s| s.to_string()).collect()).expect("distinct names")
    }

    /// `x0, x1, .., x{n-1}`.
    pub fn canonical(n: usize) -> Self {
        VarSet {
            names: (0..n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A term over a signature and a variable set: either a variable (by index)
/// or a symbol applied to exactly arity-many children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(SymbolId, Vec<Term>),
}

impl Term {
    /// Applies a symbol; no validation here, see [`Term::validate`].
    pub fn app(sym: SymbolId, children: Vec<Term>) -> Self {
        Term::App(sym, children)
    }

    /// Checks every application node against the signature and every
    /// variable index against the variable set.
    pub fn validate(&self, sig: &Signature, vars: &VarSet) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i >= vars.len() {
                    Err(Error::UnknownVariable(format!("#{i}")))
                } else {
                    Ok(())
                }
            }
            Term::App(sym, children) => {
                if *sym >= sig.len() {
                    return Err(Error::ArityMismatch(format!("unknown symbol id {sym}")));
                }
                if children.len() != sig.arity(*sym) {
                    return Err(Error::ArityMismatch(format!(
                        "`{}` expects {} arguments, got {}",
                        sig.name(*sym),
                        sig.arity(*sym),
                        children.len()
                    )));
                }
                children.iter().try_for_each(|c| c.validate(sig, vars))
            }
        }
    }

    /// Depth: variables 0, applications `1 + max(children)`, constants 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, children) => {
                1 + children.iter().map(Term::depth).max().unwrap_or(0)
            }
        }
    }

    /// The set of variable indices occurring in the term.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, children) => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Renders the term in the text syntax.
    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a VarSet) -> TermDisplay<'a> {
        TermDisplay { term: self, sig, vars }
    }
}

/// Display adapter carrying the name context.
pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a VarSet,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(i) => write!(f, "{}", self.vars.name(*i)),
            Term::App(sym, children) => {
                write!(f, "{}", self.sig.name(*sym))?;
                if !children.is_empty() {
                    write!(f, "(")?;
                    for (k, c) in children.iter().enumerate() {
                        if k > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", c.display(self.sig, self.vars))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A substitution: one image term per variable of a source [`VarSet`].
/// Images are terms over some target variable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: Vec<Term>,
}

impl Substitution {
    pub fn new(images: Vec<Term>) -> Self {
        Substitution { images }
    }

    /// The identity substitution on an `n`-variable set.
    pub fn identity(n: usize) -> Self {
        Substitution {
            images: (0..n).map(Term::Var).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, t)| matches!(t, Term::Var(j) if *j == i))
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, var: usize) -> Option<&Term> {
        self.images.get(var)
    }

    pub fn images(&self) -> &[Term] {
        &self.images
    }

    /// Composition `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Substitution) -> Result<Substitution> {
        let images = self
            .images
            .iter()
            .map(|t| substitute(t, other))
            .collect::<Result<Vec<_>>>()?;
        Ok(Substitution { images })
    }
}

/// Homomorphic replacement of variables by terms. Fails with
/// [`Error::UnknownVariable`] if the substitution does not cover some
/// variable of `t`.
pub fn substitute(t: &Term, sub: &Substitution) -> Result<Term> {
    match t {
        Term::Var(i) => sub
            .image(*i)
            .cloned()
            .ok_or_else(|| Error::UnknownVariable(format!("#{i}"))),
        Term::App(sym, children) => {
            let children = children
                .iter()
                .map(|c| substitute(c, sub))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::App(*sym, children))
        }
    }
}

/// Evaluates `t` in `A` under the assignment `h` (one carrier element per
/// variable of the ambient variable set). This is the unique homomorphic
/// extension of `h` applied to `t`.
pub fn evaluate(t: &Term, algebra: &FiniteAlgebra, h: &[usize]) -> Result<usize> {
    match t {
        Term::Var(i) => h
            .get(*i)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(format!("#{i}"))),
        Term::App(sym, children) => {
            let args = children
                .iter()
                .map(|c| evaluate(c, algebra, h))
                .collect::<Result<Vec<_>>>()?;
            algebra.apply(*sym, &args)
        }
    }
}

/// All terms of depth ≤ `max_depth` over `sig` and `vars`, without
/// duplicates, in a fixed order: variables first (in `VarSet` order), then
/// applications ordered by symbol and then lexicographically by children
/// (in the same term order, recursively).
pub fn enumerate_terms(sig: &Signature, vars: &VarSet, max_depth: usize) -> Vec<Term> {
    enumerate_terms_capped(sig, vars, max_depth, usize::MAX).expect("uncapped")
}

/// Like [`enumerate_terms`] but fails with [`Error::SizeLimitExceeded`] as
/// soon as more than `cap` terms exist.
pub fn enumerate_terms_capped(
    sig: &Signature,
    vars: &VarSet,
    max_depth: usize,
    cap: usize,
) -> Result<Vec<Term>> {
    let over = || Error::SizeLimitExceeded(format!("term universe exceeds {cap} terms"));
    // Stratify by depth: layer 0 is the variables; the depth-(d+1) layer is
    // the variables plus every application whose children live in layer d.
    // Applying symbols to layer d regenerates all of layer d's applications,
    // so each pass is deduplicated.
    let mut all: Vec<Term> = (0..vars.len()).map(Term::Var).collect();
    if all.len() > cap {
        return Err(over());
    }
    for _ in 0..max_depth {
        let prev = all.clone();
        // Distinct child tuples yield distinct terms, so the spawn count
        // alone can prove the cap is exceeded before any work happens.
        let mut spawn: usize = 0;
        for (_, _, arity) in sig.iter() {
            spawn = spawn
                .checked_add(crate::tuples::checked_pow(prev.len(), arity).ok_or_else(over)?)
                .ok_or_else(over)?;
        }
        if spawn > cap {
            return Err(over());
        }
        let mut next = all;
        for (sym, _, arity) in sig.iter() {
            crate::tuples::for_each_tuple(prev.len(), arity, |idx| {
                let children: Vec<Term> = idx.iter().map(|&i| prev[i].clone()).collect();
                next.push(Term::App(sym, children));
                Ok::<(), Error>(())
            })?;
        }
        next.sort_by(term_order);
        next.dedup();
        if next.len() > cap {
            return Err(over());
        }
        let grown = next.len() > prev.len();
        all = next;
        if !grown {
            break;
        }
    }
    Ok(all)
}

/// The documented total order on terms: variables before applications,
/// variables by index, applications by symbol then children lexicographic.
pub fn term_order(a: &Term, b: &Term) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (Term::Var(i), Term::Var(j)) => i.cmp(j),
        (Term::Var(_), Term::App(..)) => Ordering::Less,
        (Term::App(..), Term::Var(_)) => Ordering::Greater,
        (Term::App(f, cs), Term::App(g, ds)) => f.cmp(g).then_with(|| {
            for (c, d) in cs.iter().zip(ds.iter()) {
                let o = term_order(c, d);
                if o != Ordering::Equal {
                    return o;
                }
            }
            cs.len().cmp(&ds.len())
        }),
    }
}

/// Parses the text syntax against a signature and variable set.
///
/// Bare identifiers resolve to declared 0-ary symbols first, then to
/// variables. `f(..)` must match `f`'s declared arity.
pub fn parse_term(input: &str, sig: &Signature, vars: &VarSet) -> Result<Term> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let t = parse_expr(&tokens, &mut pos, sig, vars)?;
    if pos != tokens.len() {
        return Err(Error::malformed(format!(
            "trailing input after term: `{input}`"
        )));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Ident(String),
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut ident = String::new();
    for ch in input.chars() {
        match ch {
            '(' | ')' | ',' => {
                if !ident.is_empty() {
                    out.push(Tok::Ident(std::mem::take(&mut ident)));
                }
                out.push(match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                });
            }
            c if c.is_whitespace() => {
                if !ident.is_empty() {
                    out.push(Tok::Ident(std::mem::take(&mut ident)));
                }
            }
            c => ident.push(c),
        }
    }
    if !ident.is_empty() {
        out.push(Tok::Ident(ident));
    }
    if out.is_empty() {
        return Err(Error::malformed("empty term"));
    }
    Ok(out)
}

fn parse_expr(tokens: &[Tok], pos: &mut usize, sig: &Signature, vars: &VarSet) -> Result<Term> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::malformed("unexpected end of term"))?;
    let name = match tok {
        Tok::Ident(name) => name.clone(),
        other => return Err(Error::malformed(format!("expected identifier, got {other:?}"))),
    };
    *pos += 1;
    if tokens.get(*pos) == Some(&Tok::LParen) {
        *pos += 1;
        let sym = sig
            .lookup(&name)
            .ok_or_else(|| Error::malformed(format!("unknown operation `{name}`")))?;
        let mut children = Vec::new();
        if tokens.get(*pos) == Some(&Tok::RParen) {
            *pos += 1;
        } else {
            loop {
                children.push(parse_expr(tokens, pos, sig, vars)?);
                match tokens.get(*pos) {
                    Some(Tok::Comma) => *pos += 1,
                    Some(Tok::RParen) => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(Error::malformed("expected `,` or `)`")),
                }
            }
        }
        if children.len() != sig.arity(sym) {
            return Err(Error::ArityMismatch(format!(
                "`{name}` expects {} arguments, got {}",
                sig.arity(sym),
                children.len()
            )));
        }
        Ok(Term::App(sym, children))
    } else {
        // bare identifier: constant if declared 0-ary, else a variable
        if let Some(sym) = sig.lookup(&name) {
            if sig.arity(sym) == 0 {
                return Ok(Term::App(sym, Vec::new()));
            }
        }
        match vars.lookup(&name) {
            Some(i) => Ok(Term::Var(i)),
            None => Err(Error::UnknownVariable(name)),
        }
    }
}
