//! Subcommand implementations. Each returns the text to print and the exit
//! status; nothing here writes to the terminal.

use std::fmt::Write as _;

use lambcoin_core::{
    check_computational_confluence, check_probabilistic_confluence, comp_equiv, infer_simple,
    normal_form_distributions, reduce_with_strategy, stuck_oplus, typecheck, CalculusVariant,
    ComputationalReport, Discipline, Distribution, EquivError, EquivOptions, EquivVerdict,
    ExplorationResult, FuelExhausted, PlugEval, Stats, Strategy, Term, Trace, Type, TypeError,
    TypingContext,
};
use serde_json::{json, Value};

use crate::args::{Cli, Command, DemoName, EquivArgs, Format, TermInput};
use crate::input::{self, InputError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_NON_CONFLUENT_PLUG: i32 = 4;
pub const EXIT_NOT_SUBAFFINE: i32 = 5;

/// What an invocation prints and how it exits.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// A finished result, rendered either way.
struct Report {
    human: String,
    record: Value,
    code: i32,
}

enum Failure {
    Input(InputError),
    Fuel(FuelExhausted),
    Equiv(EquivError),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<FuelExhausted> for Failure {
    fn from(e: FuelExhausted) -> Self {
        Failure::Fuel(e)
    }
}

pub fn run(cli: Cli) -> Outcome {
    let name = command_name(&cli.command);
    let result = dispatch(cli.command);
    match (result, cli.format) {
        (Ok(r), Format::Human) => Outcome {
            stdout: with_newline(r.human),
            code: r.code,
            ..Outcome::default()
        },
        (Ok(r), Format::Structured) => {
            let mut record = json!({ "command": name });
            merge(&mut record, r.record);
            Outcome {
                stdout: with_newline(record.to_string()),
                code: r.code,
                ..Outcome::default()
            }
        }
        (Err(f), format) => failure(name, f, format),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Typecheck { .. } => "typecheck",
        Command::Infer { .. } => "infer",
        Command::Reduce { .. } => "reduce",
        Command::Explore { .. } => "explore",
        Command::Confluence { .. } => "confluence",
        Command::Equiv { .. } => "equiv",
        Command::ComputationalConfluence { .. } => "computational-confluence",
        Command::Demo { .. } => "demo",
    }
}

fn failure(name: &str, f: Failure, format: Format) -> Outcome {
    let (code, kind, message, extra) = match f {
        Failure::Input(e) => (EXIT_USAGE, "input", e.to_string(), Value::Null),
        Failure::Fuel(e) => (EXIT_FUEL, "fuel_exhausted", e.to_string(), fuel_json(&e)),
        Failure::Equiv(EquivError::Fuel(e)) => {
            (EXIT_FUEL, "fuel_exhausted", e.to_string(), fuel_json(&e))
        }
        Failure::Equiv(e @ EquivError::NonConfluentPlug { .. }) => {
            let EquivError::NonConfluentPlug {
                context,
                term,
                distributions,
            } = &e
            else {
                unreachable!()
            };
            let extra = json!({
                "context": context.to_string(),
                "term": term.to_string(),
                "distributions": distributions.iter().map(dist_json).collect::<Vec<_>>(),
            });
            (
                EXIT_NON_CONFLUENT_PLUG,
                "non_confluent_plug",
                e.to_string(),
                extra,
            )
        }
        Failure::Equiv(EquivError::Type(e)) => (
            EXIT_USAGE,
            "ill_typed_input",
            format!("ill-typed support term: {e}"),
            type_error_json(&e),
        ),
        Failure::Equiv(EquivError::NotSubAffineTyped(e)) => (
            EXIT_NOT_SUBAFFINE,
            "not_subaffine_typed",
            format!("term is not sub-affine typed: {e}"),
            type_error_json(&e),
        ),
    };
    match format {
        Format::Human => Outcome {
            stderr: format!("error: {message}\n"),
            code,
            ..Outcome::default()
        },
        Format::Structured => {
            let mut error = json!({ "kind": kind, "message": message });
            if !extra.is_null() {
                merge(&mut error, extra);
            }
            let record = json!({ "command": name, "error": error });
            Outcome {
                stdout: format!("{record}\n"),
                code,
                ..Outcome::default()
            }
        }
    }
}

fn read_term(input: &TermInput, variant: CalculusVariant) -> Result<Term, Failure> {
    let text = input::term_text(input.term.as_deref(), input.file.as_deref())?;
    Ok(input::closed_term(&text, variant)?)
}

fn dispatch(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Typecheck {
            system,
            input,
            calculus,
        } => {
            let t = read_term(&input, calculus.calculus.into())?;
            Ok(cmd_typecheck(&t, system.into()))
        }
        Command::Infer { input, calculus } => {
            let t = read_term(&input, calculus.calculus.into())?;
            Ok(cmd_infer(&t))
        }
        Command::Reduce {
            strategy,
            input,
            calculus,
            fuel,
        } => {
            let variant = calculus.calculus.into();
            let t = read_term(&input, variant)?;
            let trace = reduce_with_strategy(&t, strategy.into(), variant, fuel.fuel)?;
            Ok(reduce_report(&trace, strategy.into()))
        }
        Command::Explore {
            input,
            calculus,
            fuel,
        } => {
            let variant = calculus.calculus.into();
            let t = read_term(&input, variant)?;
            let r = check_probabilistic_confluence(&t, variant, fuel.fuel)?;
            Ok(explore_report(&t, &r))
        }
        Command::Confluence {
            input,
            calculus,
            fuel,
        } => {
            let variant = calculus.calculus.into();
            let t = read_term(&input, variant)?;
            let r = check_probabilistic_confluence(&t, variant, fuel.fuel)?;
            Ok(confluence_report(&t, &r))
        }
        Command::Equiv {
            left,
            right,
            ty,
            equiv,
            calculus,
        } => {
            let variant: CalculusVariant = calculus.calculus.into();
            let ty = input::parse_type(&ty)?;
            let d1 = input::distribution_arg(&left, variant)?;
            let d2 = input::distribution_arg(&right, variant)?;
            let options = equiv_options(&equiv, variant);
            let v = comp_equiv(&d1, &d2, &ty, &options).map_err(Failure::Equiv)?;
            Ok(equiv_report(&ty, &options, &v))
        }
        Command::ComputationalConfluence { input, equiv } => {
            let t = read_term(&input, CalculusVariant::Plain)?;
            let options = equiv_options(&equiv, CalculusVariant::Plain);
            let r = check_computational_confluence(&t, &options).map_err(Failure::Equiv)?;
            Ok(computational_report(&t, &r))
        }
        Command::Demo { name } => demo(name),
    }
}

fn equiv_options(a: &EquivArgs, variant: CalculusVariant) -> EquivOptions {
    EquivOptions {
        size_bound: a.size_bound,
        fuel: a.fuel.fuel,
        eval: if a.single_path {
            PlugEval::SinglePath
        } else {
            PlugEval::Exhaustive
        },
        variant,
    }
}

fn dist_json(d: &Distribution) -> Value {
    let support: Vec<Value> = d
        .canonical_entries()
        .into_iter()
        .map(|(t, p)| json!({ "probability": p.to_string(), "term": t }))
        .collect();
    json!({ "canonical": d.canonical(), "support": support })
}

fn stats_json(s: &Stats) -> Value {
    json!({ "nodes_visited": s.nodes_visited, "max_depth": s.max_depth, "fuel_spent": s.fuel_spent })
}

fn fuel_json(e: &FuelExhausted) -> Value {
    json!({ "fuel": e.fuel, "visited": e.visited, "memo_entries": e.memo_entries, "cycle": e.cycle })
}

fn type_json(ty: &Type) -> Value {
    json!({ "type": ty.to_string(), "ascii": ty.ascii() })
}

fn type_error_json(e: &TypeError) -> Value {
    json!({
        "error_kind": e.kind.name(),
        "rule": e.rule.label(),
        "path": e.path.to_string(),
        "subterm": e.subterm.to_string(),
        "detail": e.to_string(),
    })
}

fn discipline_name(d: Discipline) -> &'static str {
    match d {
        Discipline::Simple => "simple",
        Discipline::Affine => "affine",
        Discipline::SubAffine => "subaffine",
    }
}

fn cmd_typecheck(t: &Term, d: Discipline) -> Report {
    let base = json!({ "system": discipline_name(d), "term": t.to_string() });
    match typecheck(&TypingContext::empty(), t, d) {
        Ok(ty) => {
            let mut record = base;
            merge(&mut record, json!({ "ok": true }));
            merge(&mut record, type_json(&ty));
            Report {
                human: ty.to_string(),
                record,
                code: EXIT_OK,
            }
        }
        Err(e) => {
            let mut record = base;
            merge(
                &mut record,
                json!({ "ok": false, "error": type_error_json(&e) }),
            );
            Report {
                human: format!("type error: {e}"),
                record,
                code: EXIT_NEGATIVE,
            }
        }
    }
}

fn cmd_infer(t: &Term) -> Report {
    let base = json!({ "term": t.to_string() });
    match infer_simple(&TypingContext::empty(), t) {
        Ok(s) => {
            let mut record = base;
            merge(&mut record, json!({ "ok": true, "scheme": s.to_string() }));
            Report {
                human: s.to_string(),
                record,
                code: EXIT_OK,
            }
        }
        Err(e) => {
            let mut record = base;
            merge(
                &mut record,
                json!({ "ok": false, "error": type_error_json(&e) }),
            );
            Report {
                human: format!("type error: {e}"),
                record,
                code: EXIT_NEGATIVE,
            }
        }
    }
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::CallByName => "cbn",
        Strategy::CallByValue => "cbv",
    }
}

fn reduce_report(trace: &Trace, s: Strategy) -> Report {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|step| {
            let fired: Vec<Value> = step
                .fired
                .iter()
                .map(|(t, p)| json!({ "position": p.to_string(), "term": t.to_string() }))
                .collect();
            json!({ "fired": fired, "result": dist_json(&step.result) })
        })
        .collect();
    Report {
        human: trace.to_string(),
        record: json!({
            "strategy": strategy_name(s),
            "start": trace.start.to_string(),
            "steps": steps,
            "terminal": dist_json(trace.terminal()),
        }),
        code: EXIT_OK,
    }
}

/// Lines flagging `⊕` terms that sit in destructor positions.
fn stuck_lines(ds: &[Distribution]) -> (Vec<String>, Vec<Value>) {
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for d in ds {
        for (t, _) in d.iter() {
            for pos in stuck_oplus(t) {
                lines.push(format!("stuck on a sum at {pos} in {t}"));
                records.push(json!({ "position": pos.to_string(), "term": t.to_string() }));
            }
        }
    }
    lines.sort();
    lines.dedup();
    (lines, records)
}

fn explore_report(t: &Term, r: &ExplorationResult) -> Report {
    let mut human = String::new();
    for d in &r.final_distributions {
        let _ = writeln!(human, "{d}");
    }
    let (stuck, stuck_json) = stuck_lines(&r.final_distributions);
    for line in &stuck {
        let _ = writeln!(human, "{line}");
    }
    let _ = write!(human, "{}", r.stats);
    Report {
        human,
        record: json!({
            "term": t.to_string(),
            "distributions": r.final_distributions.iter().map(dist_json).collect::<Vec<_>>(),
            "stuck": stuck_json,
            "stats": stats_json(&r.stats),
        }),
        code: EXIT_OK,
    }
}

fn confluence_report(t: &Term, r: &ExplorationResult) -> Report {
    let mut human = format!(
        "{}\n",
        if r.confluent {
            "CONFLUENT"
        } else {
            "NOT CONFLUENT"
        }
    );
    for d in &r.final_distributions {
        let _ = writeln!(human, "{d}");
    }
    if let Some((a, b)) = &r.witness {
        let _ = writeln!(human, "witness: {a}");
        let _ = writeln!(human, "witness: {b}");
    }
    let (stuck, stuck_json) = stuck_lines(&r.final_distributions);
    for line in &stuck {
        let _ = writeln!(human, "{line}");
    }
    let _ = write!(human, "{}", r.stats);
    let witness = r
        .witness
        .as_ref()
        .map(|(a, b)| vec![dist_json(a), dist_json(b)]);
    Report {
        human,
        record: json!({
            "term": t.to_string(),
            "confluent": r.confluent,
            "distributions": r.final_distributions.iter().map(dist_json).collect::<Vec<_>>(),
            "witness": witness,
            "stuck": stuck_json,
            "stats": stats_json(&r.stats),
        }),
        code: if r.confluent { EXIT_OK } else { EXIT_NEGATIVE },
    }
}

fn verdict_json(v: &EquivVerdict) -> Value {
    let rows: Vec<Value> = v
        .per_context_results
        .iter()
        .map(|(c, a, b)| {
            json!({
                "context": c.to_string(),
                "left": dist_json(a),
                "right": dist_json(b),
                "ok": a == b,
            })
        })
        .collect();
    json!({
        "equivalent": v.equivalent,
        "contexts": rows,
        "failing_context": v.failing_context.as_ref().map(ToString::to_string),
    })
}

fn equiv_report(ty: &Type, options: &EquivOptions, v: &EquivVerdict) -> Report {
    let human = format!(
        "type: {ty}\nsize bound: {}\ncontexts: {}\n{v}",
        options.size_bound,
        v.per_context_results.len()
    );
    let mut record = json!({ "size_bound": options.size_bound });
    merge(&mut record, type_json(ty));
    merge(&mut record, verdict_json(v));
    Report {
        human,
        record,
        code: if v.equivalent { EXIT_OK } else { EXIT_NEGATIVE },
    }
}

fn computational_report(t: &Term, r: &ComputationalReport) -> Report {
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|(i, j, v)| {
            let mut p = json!({ "left": i, "right": j });
            merge(&mut p, verdict_json(v));
            p
        })
        .collect();
    let mut record = json!({
        "term": t.to_string(),
        "confluent": r.confluent,
        "size_bound": r.size_bound,
        "distributions": r.distributions.iter().map(dist_json).collect::<Vec<_>>(),
        "matrix": r.matrix,
        "pairs": pairs,
        "stats": stats_json(&r.stats),
    });
    merge(&mut record, type_json(&r.term_type));
    Report {
        human: r.to_string(),
        record,
        code: if r.confluent { EXIT_OK } else { EXIT_NEGATIVE },
    }
}

pub const DUP_COIN: &str = "(\\x.\\y. y x x) coin";
pub const BRANCH_COIN: &str = "(\\x.\\y. if y then x else ((\\z. if z then 0 else 1) x)) coin";

fn demo(name: DemoName) -> Result<Report, Failure> {
    let fuel = lambcoin_core::DEFAULT_FUEL;
    let parse = |s: &str| input::closed_term(s, CalculusVariant::Plain);
    match name {
        DemoName::Figure1 | DemoName::Internalized => {
            let variant = if name == DemoName::Figure1 {
                CalculusVariant::Plain
            } else {
                CalculusVariant::Internalized
            };
            let t = parse(DUP_COIN)?;
            let all = normal_form_distributions(&t, variant, fuel)?;
            let cbv = reduce_with_strategy(&t, Strategy::CallByValue, variant, fuel)?;
            let cbn = reduce_with_strategy(&t, Strategy::CallByName, variant, fuel)?;
            let mut human = format!("term: {t}\nnormal-form distributions: {}\n", all.len());
            for d in &all {
                let _ = writeln!(human, "{d}");
            }
            let _ = writeln!(human, "cbv ({} steps): {}", cbv.steps.len(), cbv.terminal());
            let _ = write!(human, "cbn ({} steps): {}", cbn.steps.len(), cbn.terminal());
            Ok(Report {
                human,
                record: json!({
                    "demo": if name == DemoName::Figure1 { "figure1" } else { "internalized" },
                    "term": t.to_string(),
                    "distributions": all.iter().map(dist_json).collect::<Vec<_>>(),
                    "cbv": { "steps": cbv.steps.len(), "terminal": dist_json(cbv.terminal()) },
                    "cbn": { "steps": cbn.steps.len(), "terminal": dist_json(cbn.terminal()) },
                }),
                code: EXIT_OK,
            })
        }
        DemoName::Section4 => {
            let t = parse(BRANCH_COIN)?;
            let r = check_computational_confluence(&t, &EquivOptions::default())
                .map_err(Failure::Equiv)?;
            let mut human = format!(
                "term: {t}\ntype: {}\nnormal-form distributions: {}\n",
                r.term_type,
                r.distributions.len()
            );
            for d in &r.distributions {
                let _ = writeln!(human, "{d}");
            }
            for (_, _, v) in &r.pairs {
                let _ = writeln!(human, "{v}");
            }
            let mut record = json!({
                "demo": "section4",
                "term": t.to_string(),
                "distributions": r.distributions.iter().map(dist_json).collect::<Vec<_>>(),
                "equivalent": r.confluent,
                "pairs": r.pairs.iter().map(|(_, _, v)| verdict_json(v)).collect::<Vec<_>>(),
            });
            merge(&mut record, type_json(&r.term_type));
            Ok(Report {
                human,
                record,
                code: EXIT_OK,
            })
        }
    }
}
