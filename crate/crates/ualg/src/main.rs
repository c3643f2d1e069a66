//! Batch command-line front end: load fixtures, run one operation, print a
//! machine-readable report with certificates.
//!
//! Exit codes: 0 affirmative/value, 1 negative/refuted, 2 unknown,
//! 64 usage error, 65 malformed input, 70 size limit exceeded.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ualg::eqlogic::{self, EntailmentVerdict};
use ualg::error::Error;
use ualg::finalg;
use ualg::io;
use ualg::ordalg;
use ualg::quantalg::{self, CParam, QuantVerdict};
use ualg::report::{Report, Verdict};
use ualg::variety::{self, HspOutcome, SatOutcome};
use ualg::Limits;

#[derive(Parser)]
#[command(
    name = "ualg",
    about = "Finite universal algebra toolkit: satisfaction, congruences, quotients, \
             free algebras, HSP membership, and equational provers",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for the report.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "text"])]
    format: String,

    /// Seed for randomized harness sampling (recorded in the report; the
    /// operations themselves are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Largest carrier constructed algebras may have.
    #[arg(long, global = true, default_value_t = 64)]
    max_carrier: usize,

    /// Cap on term-universe and free-algebra sizes.
    #[arg(long, global = true, default_value_t = 20000)]
    max_universe: usize,

    /// Default countermodel size bound.
    #[arg(long, global = true, default_value_t = 3)]
    max_model: usize,
}

#[derive(Args)]
struct EntailArgs {
    /// JSON file with the axioms (array of equations).
    #[arg(long)]
    axioms: PathBuf,
    /// JSON file with the goal equation.
    #[arg(long)]
    goal: PathBuf,
    /// Term-universe depth bound.
    #[arg(long)]
    depth: usize,
    /// Optional explicit signature file `[["name",arity],..]` extending the
    /// one inferred from the terms.
    #[arg(long)]
    signature: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Does an algebra satisfy a term equation?
    Sat {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        equation: PathBuf,
    },
    /// Does an ordered algebra satisfy a term inequation (lhs ≤ rhs)?
    IneqSat {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        inequation: PathBuf,
    },
    /// Does a quantitative algebra satisfy a c-clustered equation?
    Qsat {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        equation: PathBuf,
    },
    /// Least congruence containing the given pairs.
    Congr {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Least stable preorder containing the order and the given pairs.
    OrdCongr {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Largest pseudometric congruence below the given constraints.
    Qcongr {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
    },
    /// Quotient by the least congruence containing the given pairs.
    Quotient {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Is the candidate in the variety generated by the class algebra?
    Hsp {
        /// Generator of the variety.
        #[arg(long)]
        class: PathBuf,
        /// Algebra whose membership is decided.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Free algebra on n generators in the variety generated by an algebra.
    Free {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        generators: usize,
    },
    /// Least index from which an algebra satisfies an equation sequence.
    Eventual {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
    },
    /// Bounded proof search in Birkhoff's deduction system.
    Prove(EntailArgs),
    /// Bounded proof search in the quantitative deduction system.
    Qprove(EntailArgs),
    /// Countermodel search, then bounded proof search.
    Entails {
        #[command(flatten)]
        common: EntailArgs,
        /// Countermodel size bound (defaults to --max-model).
        #[arg(long)]
        model_size: Option<usize>,
    },
    /// Quantitative entailment at a depth, reporting the best bound found.
    Qentails(EntailArgs),
    /// Is a quantitative surjection c-reflexive?
    Creflexive {
        /// JSON file with dom, cod, and the map.
        #[arg(long)]
        map: PathBuf,
        /// Finite value ≥ 2, or "omega".
        #[arg(long)]
        c: String,
    },
    /// Check a proof tree against axioms.
    CheckProof {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        axioms: PathBuf,
        #[arg(long)]
        signature: Option<PathBuf>,
    },
    /// Check a quantitative proof tree against axioms.
    QcheckProof {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        axioms: PathBuf,
        #[arg(long)]
        signature: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sat { .. } => "sat",
            Command::IneqSat { .. } => "ineq-sat",
            Command::Qsat { .. } => "qsat",
            Command::Congr { .. } => "congr",
            Command::OrdCongr { .. } => "ord-congr",
            Command::Qcongr { .. } => "qcongr",
            Command::Quotient { .. } => "quotient",
            Command::Hsp { .. } => "hsp",
            Command::Free { .. } => "free",
            Command::Eventual { .. } => "eventual",
            Command::Prove(_) => "prove",
            Command::Qprove(_) => "qprove",
            Command::Entails { .. } => "entails",
            Command::Qentails(_) => "qentails",
            Command::Creflexive { .. } => "creflexive",
            Command::CheckProof { .. } => "check-proof",
            Command::QcheckProof { .. } => "qcheck-proof",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let mut report = Report::new("usage", Verdict::Unknown);
            report.error = Some(e.to_string());
            println!("{}", serde_json::to_string(&report).unwrap());
            return ExitCode::from(64);
        }
    };
    let limits = Limits {
        max_carrier: cli.max_carrier,
        max_universe: cli.max_universe,
        max_model_size: cli.max_model,
        ..Limits::default()
    };
    let start = Instant::now();
    let name = cli.command.name();
    let (mut report, code) = match run(&cli.command, &limits, cli.max_model) {
        Ok(report) => {
            let code = report.verdict.exit_code();
            (report, code)
        }
        Err(e) => {
            let code = match e {
                Error::SizeLimitExceeded(_) => 70,
                _ => 65,
            };
            let mut report = Report::new(name, Verdict::Unknown);
            report.error = Some(e.to_string());
            (report, code)
        }
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    if let Some(seed) = cli.seed {
        let mut bounds = report.bounds_used.take().unwrap_or_else(|| json!({}));
        bounds["seed"] = json!(seed);
        report.bounds_used = Some(bounds);
    }
    match cli.format.as_str() {
        "text" => println!("{}", report.to_text()),
        _ => println!("{}", serde_json::to_string(&report).unwrap()),
    }
    ExitCode::from(code as u8)
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))
}

fn extra_signature(path: &Option<PathBuf>) -> Result<Vec<(String, usize)>, Error> {
    match path {
        Some(p) => io::parse_signature(&read(p)?),
        None => Ok(Vec::new()),
    }
}

fn run(command: &Command, limits: &Limits, default_model: usize) -> Result<Report, Error> {
    let name = command.name();
    match command {
        Command::Sat { algebra, equation } => {
            let a = io::parse_algebra(&read(algebra)?)?;
            let eq = io::parse_equation(&read(equation)?, a.signature())?;
            Ok(match variety::satisfies_equation(&a, &eq)? {
                SatOutcome::Satisfied => Report::new(name, Verdict::True),
                SatOutcome::Falsified(h) => Report::new(name, Verdict::False)
                    .with_certificate(json!({
                        "assignment": io::assignment_to_value(&eq.vars, &h),
                    })),
            })
        }
        Command::IneqSat { algebra, inequation } => {
            let a = io::parse_ordered_algebra(&read(algebra)?)?;
            let ineq = io::parse_inequation(&read(inequation)?, a.base().signature())?;
            Ok(match ordalg::satisfies_inequation(&a, &ineq)? {
                SatOutcome::Satisfied => Report::new(name, Verdict::True),
                SatOutcome::Falsified(h) => Report::new(name, Verdict::False)
                    .with_certificate(json!({
                        "assignment": io::assignment_to_value(&ineq.eq.vars, &h),
                    })),
            })
        }
        Command::Qsat { algebra, equation } => {
            let a = io::parse_quant_algebra(&read(algebra)?)?;
            let eq = io::parse_clustered_equation(&read(equation)?, a.base().signature())?;
            Ok(match quantalg::satisfies_clustered_equation(&a, &eq)? {
                SatOutcome::Satisfied => Report::new(name, Verdict::True),
                SatOutcome::Falsified(h) => Report::new(name, Verdict::False)
                    .with_certificate(json!({
                        "assignment": io::assignment_to_value(&eq.vars, &h),
                    })),
            })
        }
        Command::Congr { algebra, pairs } => {
            let a = io::parse_algebra(&read(algebra)?)?;
            let pairs = io::parse_pairs(&read(pairs)?)?;
            let cong = finalg::congruence_generated(&a, &pairs)?;
            Ok(Report::new(name, Verdict::Value)
                .with_certificate(io::congruence_to_value(&cong)))
        }
        Command::OrdCongr { algebra, pairs } => {
            let a = io::parse_ordered_algebra(&read(algebra)?)?;
            let pairs = io::parse_pairs(&read(pairs)?)?;
            let r = ordalg::stable_preorder_generated(&a, &pairs)?;
            Ok(Report::new(name, Verdict::Value).with_certificate(io::relation_to_value(&r)))
        }
        Command::Qcongr { algebra, constraints } => {
            let a = io::parse_quant_algebra(&read(algebra)?)?;
            let constraints = io::parse_constraints(&read(constraints)?)?;
            let p = quantalg::quant_congruence_generated(&a, &constraints)?;
            Ok(Report::new(name, Verdict::Value)
                .with_certificate(io::quant_congruence_to_value(&p)))
        }
        Command::Quotient { algebra, pairs } => {
            let a = io::parse_algebra(&read(algebra)?)?;
            let pairs = io::parse_pairs(&read(pairs)?)?;
            let cong = finalg::congruence_generated(&a, &pairs)?;
            let (q, e) = finalg::quotient(&a, &cong)?;
            Ok(Report::new(name, Verdict::Value).with_certificate(json!({
                "algebra": io::algebra_to_value(&q),
                "surjection": e.map(),
                "blocks": cong.blocks(),
            })))
        }
        Command::Hsp { class, candidate } => {
            let class_algebra = io::parse_algebra(&read(class)?)?;
            let candidate_algebra = io::parse_algebra(&read(candidate)?)?;
            match variety::hsp_member(&candidate_algebra, &class_algebra, limits)? {
                HspOutcome::Member { free, surjection } => {
                    Ok(Report::new(name, Verdict::True).with_certificate(json!({
                        "free_algebra": io::free_algebra_to_value(&free),
                        "surjection": surjection,
                    })))
                }
                HspOutcome::NonMember { equation, witness } => {
                    Ok(Report::new(name, Verdict::False).with_certificate(
                        io::term_equation_with_witness_to_value(
                            &equation,
                            &witness,
                            class_algebra.signature(),
                        ),
                    ))
                }
            }
        }
        Command::Free { algebra, generators } => {
            let a = io::parse_algebra(&read(algebra)?)?;
            let free = variety::free_algebra_in_variety(&a, *generators, limits)?;
            Ok(Report::new(name, Verdict::Value)
                .with_certificate(io::free_algebra_to_value(&free)))
        }
        Command::Eventual { algebra, sequence } => {
            let a = io::parse_algebra(&read(algebra)?)?;
            let seq = io::parse_equation_sequence(&read(sequence)?, a.signature())?;
            Ok(match variety::eventual_satisfaction(&a, &seq)? {
                Some(i0) => {
                    Report::new(name, Verdict::Value).with_certificate(json!({ "i0": i0 }))
                }
                None => {
                    let last = seq.items.last().expect("failure needs a final item");
                    let witness = variety::satisfies_equation(&a, last)?;
                    let mut report = Report::new(name, Verdict::False);
                    if let SatOutcome::Falsified(h) = witness {
                        report = report.with_certificate(json!({
                            "failed_index": seq.items.len() - 1,
                            "assignment": io::assignment_to_value(&last.vars, &h),
                        }));
                    }
                    report
                }
            })
        }
        Command::Prove(args) => {
            let extra = extra_signature(&args.signature)?;
            let (sig, gamma, goal) =
                io::parse_entailment_input(&read(&args.axioms)?, &read(&args.goal)?, &extra)?;
            Ok(match eqlogic::derive(&sig, &gamma, &goal, args.depth, limits)? {
                Some(proof) => Report::new(name, Verdict::Proved)
                    .with_certificate(io::proof_to_value(&proof, &sig)),
                None => Report::new(name, Verdict::Unknown)
                    .with_bounds(json!({ "depth": args.depth })),
            })
        }
        Command::Qprove(args) | Command::Qentails(args) => {
            let extra = extra_signature(&args.signature)?;
            let (sig, gamma, goal) = io::parse_quant_entailment_input(
                &read(&args.axioms)?,
                &read(&args.goal)?,
                &extra,
            )?;
            Ok(
                match quantalg::quant_entails(&sig, &gamma, &goal, args.depth, limits)? {
                    QuantVerdict::Proved(proof) => Report::new(name, Verdict::Proved)
                        .with_certificate(io::quant_proof_to_value(&proof, &sig)),
                    QuantVerdict::BoundWitness(best) => Report::new(name, Verdict::Unknown)
                        .with_certificate(json!({ "best_epsilon": best }))
                        .with_bounds(json!({ "depth": args.depth })),
                    QuantVerdict::Unknown => Report::new(name, Verdict::Unknown)
                        .with_bounds(json!({ "depth": args.depth })),
                },
            )
        }
        Command::Entails { common, model_size } => {
            let extra = extra_signature(&common.signature)?;
            let (sig, gamma, goal) = io::parse_entailment_input(
                &read(&common.axioms)?,
                &read(&common.goal)?,
                &extra,
            )?;
            let max_model = model_size.unwrap_or(default_model);
            let verdict =
                eqlogic::semantic_entails(&sig, &gamma, &goal, max_model, common.depth, limits)?;
            Ok(match verdict {
                EntailmentVerdict::Proved(proof) => Report::new(name, Verdict::Proved)
                    .with_certificate(io::proof_to_value(&proof, &sig)),
                EntailmentVerdict::Refuted { model, assignment } => {
                    Report::new(name, Verdict::Refuted).with_certificate(json!({
                        "model": io::algebra_to_value(&model),
                        "assignment": io::assignment_to_value(&goal.vars, &assignment),
                    }))
                }
                EntailmentVerdict::Unknown {
                    max_model_size,
                    depth,
                } => Report::new(name, Verdict::Unknown).with_bounds(json!({
                    "max_model_size": max_model_size,
                    "depth": depth,
                })),
            })
        }
        Command::Creflexive { map, c } => {
            let e = io::parse_quant_homomorphism(&read(map)?)?;
            let c = parse_c(c)?;
            let (ok, witness) = quantalg::is_c_reflexive(&e, c, limits)?;
            Ok(if ok {
                Report::new(name, Verdict::True)
            } else {
                Report::new(name, Verdict::False)
                    .with_certificate(json!({ "subset": witness }))
            })
        }
        Command::CheckProof {
            proof,
            axioms,
            signature,
        } => {
            let proof_text = read(proof)?;
            // the proof may mention symbols the axioms do not, so it joins
            // the signature inference
            let extra = io::infer_signature_with_proof(&proof_text, &extra_signature(signature)?)?;
            let (sig, gamma) = io::parse_equations_inferring(&read(axioms)?, &extra)?;
            let p = io::parse_proof(&proof_text, &sig)?;
            Ok(report_bool(name, eqlogic::check_proof(&sig, &p, &gamma)?))
        }
        Command::QcheckProof {
            proof,
            axioms,
            signature,
        } => {
            let proof_text = read(proof)?;
            let extra = io::infer_signature_with_proof(&proof_text, &extra_signature(signature)?)?;
            let (sig, gamma) = io::parse_quant_equations_inferring(&read(axioms)?, &extra)?;
            let p = io::parse_quant_proof(&proof_text, &sig)?;
            Ok(report_bool(
                name,
                quantalg::check_quant_proof(&sig, &p, &gamma)?,
            ))
        }
    }
}

fn report_bool(name: &str, ok: bool) -> Report {
    Report::new(name, if ok { Verdict::True } else { Verdict::False })
}

fn parse_c(text: &str) -> Result<CParam, Error> {
    if text == "omega" || text == "w" || text == "ω" {
        return Ok(CParam::Omega);
    }
    let c = usize::from_str(text)
        .map_err(|_| Error::MalformedInput(format!("bad c value `{text}`")))?;
    CParam::finite(c)
}
