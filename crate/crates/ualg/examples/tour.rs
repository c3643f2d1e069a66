//! A quick tour of the library API: congruence lattices, HSP membership,
//! and both provers. Run with `cargo run -p ualg --example tour`.

use ualg::eqlogic::{self, EntailmentVerdict};
use ualg::finalg::{self, FiniteAlgebra};
use ualg::quantalg::{self, QuantEquation, QuantVerdict};
use ualg::ratext::Ext;
use ualg::sigterm::{parse_term, Signature, VarSet};
use ualg::variety::{self, HspOutcome, TermEquation};
use ualg::Limits;

fn main() -> ualg::Result<()> {
    let limits = Limits::default();

    // the congruence lattice of Z6 mirrors its subgroup lattice
    let z6 = FiniteAlgebra::cyclic(6);
    let congs = finalg::all_congruences(&z6, &limits)?;
    println!("Z6 has {} congruences:", congs.len());
    for c in &congs {
        println!("  blocks {:?}", c.blocks());
    }

    // Z2 is a quotient of Z4, but not conversely; the refusal comes with
    // an identity of Z2 that Z4 violates
    let z2 = FiniteAlgebra::cyclic(2);
    let z4 = FiniteAlgebra::cyclic(4);
    match variety::hsp_member(&z4, &z2, &limits)? {
        HspOutcome::NonMember { equation, .. } => {
            println!(
                "Z4 is not in HSP(Z2); separating identity: {} = {}",
                equation.lhs.display(z2.signature(), &equation.vars),
                equation.rhs.display(z2.signature(), &equation.vars),
            );
        }
        HspOutcome::Member { .. } => unreachable!("x+x = y+y holds in Z2 only"),
    }

    // equational proving: f idempotent entails f(f(x)) = x is false,
    // but f(x) = x entails it
    let sig = Signature::of(&[("f", 1)]);
    let vars = VarSet::of(&["x"]);
    let ax = TermEquation::new(
        vars.clone(),
        parse_term("f(x)", &sig, &vars)?,
        parse_term("x", &sig, &vars)?,
    );
    let goal = TermEquation::new(
        vars.clone(),
        parse_term("f(f(x))", &sig, &vars)?,
        parse_term("x", &sig, &vars)?,
    );
    match eqlogic::semantic_entails(&sig, &[ax.clone()], &goal, 3, 2, &limits)? {
        EntailmentVerdict::Proved(proof) => {
            assert!(eqlogic::check_proof(&sig, &proof, &[ax])?);
            println!("f(x)=x entails f(f(x))=x; proof has {} premises at the root",
                proof.children.len());
        }
        other => println!("unexpected verdict: {other:?}"),
    }

    // quantitative proving: bounds compose along the triangle rule
    let vars3 = VarSet::of(&["x", "y", "z"]);
    let qax = |l: &str, r: &str, e: Ext| -> ualg::Result<QuantEquation> {
        Ok(QuantEquation::new(
            vars3.clone(),
            parse_term(l, &sig, &vars3)?,
            parse_term(r, &sig, &vars3)?,
            e,
        ))
    };
    let gamma = vec![
        qax("x", "y", Ext::ratio(1, 5)?)?,
        qax("y", "z", Ext::ratio(1, 5)?)?,
    ];
    let qgoal = qax("f(x)", "f(z)", Ext::ratio(2, 5)?)?;
    match quantalg::quant_entails(&sig, &gamma, &qgoal, 1, &limits)? {
        QuantVerdict::Proved(proof) => {
            assert!(quantalg::check_quant_proof(&sig, &proof, &gamma)?);
            println!("derived f(x) within 2/5 of f(z); checker accepts the proof");
        }
        other => println!("unexpected verdict: {other:?}"),
    }
    Ok(())
}
