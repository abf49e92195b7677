use std::fmt::Write as _;
use std::io::Read;
use std::sync::Arc;

use elfact_core::classify::{class_key, enumerate_classes_bounded};
use elfact_core::divgroups::{analyze_poset, DivisibilityGroup, FilterCheck, FinitePoset, PosetJson};
use elfact_core::divisors::DEFAULT_FACTOR_BOUND;
use elfact_core::factorizations::{big_to_json, matrix_to_json, MatrixFactorizationJson};
use elfact_core::homology::end_ring_presentation;
use elfact_core::{
    count_classes, count_classes_literal, hom_module, invariant, iso_even, iso_graded, iso_odd, normal_form,
    ElementaryFactorization, Error, Grading, KrullSchmidtForm, MatrixFactorization, Parity, Potential, Summand,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::{Cli, Command, PosetCommand};

pub struct Report {
    pub json: Value,
    pub text: String,
    pub warnings: Vec<String>,
    pub status: u8,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Report { json, text, warnings: Vec::new(), status: 0 }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub status: u8,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = if matches!(e, Error::Parse(_)) { 2 } else { 1 };
        CliError { message: e.to_string(), status }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { message: message.into(), status: 2 }
}

type Outcome = Result<Report, CliError>;

struct Ctx {
    bound: u64,
}

impl Ctx {
    fn potential(&self, text: &str) -> Result<Arc<Potential>, CliError> {
        Ok(Arc::new(Potential::parse_bounded(text, self.bound)?))
    }

    fn elementary(&self, w: &Arc<Potential>, text: &str) -> Result<ElementaryFactorization, CliError> {
        let (v, sign) = w.parse_divisor(text)?;
        Ok(ElementaryFactorization::elementary(&v.to_element(w).with_sign(sign), w.clone())?)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { bound: cli.factor_bound.unwrap_or(DEFAULT_FACTOR_BOUND) };
    let mut report = match &cli.command {
        Command::Count { w, grading, literal } => count(&ctx, &w.w, (*grading).into(), *literal),
        Command::Classes { w, grading, bound } => classes(&ctx, &w.w, (*grading).into(), *bound),
        Command::Iso { first, second, w, grading } => iso(&ctx, first, second, w.as_deref(), grading.map(Into::into)),
        Command::Hom { first, second, w, parity } => hom(&ctx, first, second, &w.w, parity.map(Into::into)),
        Command::Endring { v, w } => endring(&ctx, v, &w.w),
        Command::Invariant { v, w } => invariant_cmd(&ctx, v, &w.w),
        Command::Decompose { w, v, rest } => decompose(&ctx, &w.w, v.iter().chain(rest)),
        Command::Snf { input } => snf(input),
        Command::Poset { action } => poset(action),
        Command::Verify { w, max_r, max_n } => verify(&ctx, w, *max_r, *max_n),
    }?;
    if let Value::Object(map) = &mut report.json {
        let name = match &cli.command {
            Command::Count { .. } => "count",
            Command::Classes { .. } => "classes",
            Command::Iso { .. } => "iso",
            Command::Hom { .. } => "hom",
            Command::Endring { .. } => "endring",
            Command::Invariant { .. } => "invariant",
            Command::Decompose { .. } => "decompose",
            Command::Snf { .. } => "snf",
            Command::Poset { .. } => "poset",
            Command::Verify { .. } => "verify",
        };
        map.insert("command".into(), json!(name));
    }
    Ok(report)
}

fn number(n: &BigUint) -> Value {
    n.to_u64().map_or_else(|| json!(n.to_string()), |x| json!(x))
}

fn count(ctx: &Ctx, w: &str, grading: Grading, literal: bool) -> Outcome {
    let w = ctx.potential(w)?;
    let pipeline = count_classes(&w, grading);
    if !literal {
        let json = json!({"W": w.render(), "grading": grading.to_string(), "count": number(&pipeline), "literal": false});
        return Ok(Report::new(json, format!("{pipeline}\n")));
    }
    let diag = count_classes_literal(&w, grading);
    let json = json!({
        "W": w.render(),
        "grading": grading.to_string(),
        "count": diag.printed.to_string().parse::<i64>().map_or_else(|_| json!(diag.printed.to_string()), |x| json!(x)),
        "literal": true,
        "diagnostic": diag.to_json(),
    });
    let mut report = Report::new(json, format!("{}\n", diag.printed));
    if !diag.agrees() {
        report.warnings.push(format!(
            "literal closed form gives {} for {} ({grading}) but the census count is {} (exact sum {}, inclusive sum {})",
            diag.printed,
            w.render(),
            diag.pipeline,
            diag.exact,
            diag.inclusive
        ));
    }
    if diag.dropped_fraction {
        report.warnings.push("a non-integral term 1/2 was dropped from the literal sum".into());
    }
    Ok(report)
}

fn classes(ctx: &Ctx, w: &str, grading: Grading, bound: u64) -> Outcome {
    let w = ctx.potential(w)?;
    let census = enumerate_classes_bounded(&w, grading, bound)?;
    let mut text = String::new();
    for (i, c) in census.classes.iter().enumerate() {
        let reps: Vec<String> = c.representatives.iter().map(|v| v.render(&w)).collect();
        writeln!(text, "{i:>4}  {}  essence {}  [{}]", c.key.to_json(&w), c.essence.render(&w), reps.join(", ")).unwrap();
    }
    writeln!(text, "{} classes", census.count()).unwrap();
    Ok(Report::new(census.to_json(), text))
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError { message: e.to_string(), status: 1 })?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError { message: format!("{path}: {e}"), status: 1 })
}

fn read_matrix_factorization(path: &str) -> Result<MatrixFactorization, CliError> {
    let json: MatrixFactorizationJson =
        serde_json::from_str(&read_input(path)?).map_err(|e| usage(format!("{path}: {e}")))?;
    Ok(MatrixFactorization::from_json(&json)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn iso(ctx: &Ctx, first: &str, second: &str, w: Option<&str>, grading: Option<Grading>) -> Outcome {
    let Some(w) = w else {
        return iso_matrices(first, second, grading);
    };
    let w = ctx.potential(w)?;
    let (a, b) = (ctx.elementary(&w, first)?, ctx.elementary(&w, second)?);
    let (even, odd, graded) = (iso_even(&a, &b)?, iso_odd(&a, &b)?, iso_graded(&a, &b)?);
    let keys = |e: &ElementaryFactorization| {
        json!({
            "HEF": class_key(&w, e.v(), Grading::Graded).to_json(&w),
            "hef": class_key(&w, e.v(), Grading::Even).to_json(&w),
        })
    };
    let mut json = json!({
        "W": w.render(),
        "first": a.render(),
        "second": b.render(),
        "even": even,
        "odd": odd,
        "graded": graded,
        "invariants": [keys(&a), keys(&b)],
    });
    let mut text = String::new();
    match grading {
        Some(g) => {
            let answer = if g == Grading::Graded { graded } else { even };
            json["grading"] = json!(g.to_string());
            json["isomorphic"] = json!(answer);
            writeln!(text, "{}", yes_no(answer)).unwrap();
        }
        None => writeln!(text, "even {}  odd {}  graded {}", yes_no(even), yes_no(odd), yes_no(graded)).unwrap(),
    }
    for e in [&a, &b] {
        let g = grading.unwrap_or(Grading::Graded);
        writeln!(text, "{}: {}", e.render(), class_key(&w, e.v(), g).to_json(&w)).unwrap();
    }
    Ok(Report::new(json, text))
}

fn iso_matrices(first: &str, second: &str, grading: Option<Grading>) -> Outcome {
    let (m1, m2) = (read_matrix_factorization(first)?, read_matrix_factorization(second)?);
    if m1.w() != m2.w() {
        return Err(Error::PotentialMismatch.into());
    }
    let w = Arc::new(Potential::from_integer(m1.w())?);
    let f1 = normal_form(&w, &[Summand::Matrix(m1)])?;
    let f2 = normal_form(&w, &[Summand::Matrix(m2)])?;
    let (even, graded) = (f1 == f2, f1.graded() == f2.graded());
    let mut json = json!({
        "W": w.render(),
        "first": f1.render(&w),
        "second": f2.render(&w),
        "even": even,
        "graded": graded,
    });
    let mut text = String::new();
    match grading {
        Some(g) => {
            let answer = if g == Grading::Graded { graded } else { even };
            json["grading"] = json!(g.to_string());
            json["isomorphic"] = json!(answer);
            writeln!(text, "{}", yes_no(answer)).unwrap();
        }
        None => writeln!(text, "even {}  graded {}", yes_no(even), yes_no(graded)).unwrap(),
    }
    writeln!(text, "{first}: {}\n{second}: {}", f1.render(&w), f2.render(&w)).unwrap();
    Ok(Report::new(json, text))
}

fn hom(ctx: &Ctx, first: &str, second: &str, w: &str, parity: Option<Parity>) -> Outcome {
    let w = ctx.potential(w)?;
    let (a, b) = (ctx.elementary(&w, first)?, ctx.elementary(&w, second)?);
    let parities = parity.map_or_else(|| vec![Parity::Even, Parity::Odd], |p| vec![p]);
    let mut modules = Vec::new();
    let mut text = String::new();
    for p in parities {
        let h = hom_module(&a, &b, p)?;
        let m = h.to_json();
        writeln!(text, "{p:?}: {}  annihilator {}  generator {}", m["module"].as_str().unwrap(), m["annihilator"].as_str().unwrap(), m["generator"])
            .unwrap();
        modules.push(m);
    }
    let json = json!({"W": w.render(), "first": a.render(), "second": b.render(), "modules": modules});
    Ok(Report::new(json, text))
}

fn endring(ctx: &Ctx, v: &str, w: &str) -> Outcome {
    let w = ctx.potential(w)?;
    let e = ctx.elementary(&w, v)?;
    let r = end_ring_presentation(&e);
    let json = json!({"W": w.render(), "object": e.render(), "d": r.d.to_string(), "t": r.t.to_string(), "presentation": r.render()});
    Ok(Report::new(json, format!("{}\nd = {}  t = {}\n", r.render(), r.d, r.t)))
}

fn invariant_cmd(ctx: &Ctx, v: &str, w: &str) -> Outcome {
    let w = ctx.potential(w)?;
    let e = ctx.elementary(&w, v)?;
    let data = invariant(&e).to_json(&w);
    let mut text = String::new();
    if let Value::Object(map) = &data {
        for (k, val) in map {
            writeln!(text, "{k:>8}  {val}").unwrap();
        }
    }
    Ok(Report::new(json!({"W": w.render(), "object": e.render(), "invariant": data}), text))
}

fn form_json(w: &Potential, f: &KrullSchmidtForm) -> Value {
    json!({"summands": f.to_json(w), "rendered": f.render(w)})
}

fn decompose<'a>(ctx: &Ctx, w: &str, items: impl Iterator<Item = &'a String>) -> Outcome {
    let w = ctx.potential(w)?;
    let summands = items.map(|v| ctx.elementary(&w, v).map(Summand::Elementary)).collect::<Result<Vec<_>, _>>()?;
    if summands.is_empty() {
        return Err(usage("decompose needs at least one summand"));
    }
    let nf = normal_form(&w, &summands)?;
    let json = json!({"W": w.render(), "normal_form": form_json(&w, &nf)});
    Ok(Report::new(json, format!("{}\n", nf.render(&w))))
}

fn snf(input: &str) -> Outcome {
    let mf = read_matrix_factorization(input)?;
    let dec = mf.smith_decompose()?;
    let w = Arc::new(Potential::from_integer(mf.w())?);
    let nf = normal_form(&w, &[Summand::Matrix(mf.clone())])?;
    let verified = dec.verify(&mf);
    let json = json!({
        "W": w.render(),
        "diagonal": dec.diagonal.iter().map(big_to_json).collect::<Vec<_>>(),
        "A": matrix_to_json(&dec.a),
        "B": matrix_to_json(&dec.b),
        "B_inv": matrix_to_json(&dec.b_inv),
        "summands": dec.summands.iter().map(ElementaryFactorization::render).collect::<Vec<_>>(),
        "normal_form": form_json(&w, &nf),
        "verified": verified,
    });
    let diag: Vec<String> = dec.diagonal.iter().map(ToString::to_string).collect();
    let text = format!(
        "diagonal {}\nA = {}\nB = {}\nnormal form {}\ncertificate {}\n",
        diag.join(", "),
        dec.a,
        dec.b,
        nf.render(&w),
        if verified { "verified" } else { "FAILED" }
    );
    let mut report = Report::new(json, text);
    if !verified {
        report.status = 1;
    }
    Ok(report)
}

/// `corolla:N`, `chain:N`, or a path to poset JSON.
fn load_poset(spec: &str) -> Result<FinitePoset, CliError> {
    let builtin = |s: &str| s.parse::<usize>().map_err(|_| usage(format!("bad size in `{spec}`")));
    if let Some(n) = spec.strip_prefix("corolla:") {
        return Ok(FinitePoset::corolla(builtin(n)?));
    }
    if let Some(n) = spec.strip_prefix("chain:") {
        return Ok(FinitePoset::chain(builtin(n)?));
    }
    let json: PosetJson = serde_json::from_str(&read_input(spec)?).map_err(|e| usage(format!("{spec}: {e}")))?;
    Ok(FinitePoset::from_json(&json)?)
}

fn filter_json(g: &DivisibilityGroup, check: &FilterCheck) -> Value {
    let named = |f: &[i64]| -> Value {
        let map: serde_json::Map<String, Value> =
            g.x_star().iter().zip(f).map(|(&x, v)| (g.poset().name(x).to_string(), json!(v))).collect();
        Value::Object(map)
    };
    match check {
        FilterCheck::Confirmed { bound, checked } => json!({"prime": true, "bound": bound, "checked": checked}),
        FilterCheck::Refuted { f, g: h } => json!({"prime": false, "witness": [named(&f.0), named(&h.0)]}),
    }
}

fn poset(action: &PosetCommand) -> Outcome {
    match action {
        PosetCommand::Analyze { poset } => {
            let p = load_poset(poset)?;
            let report = analyze_poset(&p);
            let json = json!({"action": "analyze", "report": serde_json::to_value(&report).expect("serializable")});
            let text = format!(
                "tree {}  unique minimum {}  kaplansky I {}  kaplansky II {}\nX* = {{{}}}\n",
                yes_no(report.is_tree),
                report.unique_min.as_deref().unwrap_or("none"),
                yes_no(report.kaplansky_i),
                yes_no(report.kaplansky_ii),
                report.x_star.join(", ")
            );
            Ok(Report::new(json, text))
        }
        PosetCommand::Primes { poset, bound } => {
            let g = DivisibilityGroup::new(load_poset(poset)?);
            let mut rows = Vec::new();
            let mut text = String::new();
            for x in g.principal_prime_candidates() {
                let prime = g.is_prime_principal_filter(x, *bound)?;
                writeln!(text, "up 1_{}  {}", g.poset().name(x), if prime { "prime" } else { "not prime" }).unwrap();
                rows.push(json!({"x": g.poset().name(x), "prime": prime}));
            }
            Ok(Report::new(json!({"action": "primes", "bound": bound, "filters": rows}), text))
        }
        PosetCommand::FilterCheck { poset, g: values, bound } => {
            let g = DivisibilityGroup::new(load_poset(poset)?);
            let mut pairs = Vec::new();
            for item in values.split(',').filter(|s| !s.is_empty()) {
                let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("expected name=value, got `{item}`")))?;
                let v: i64 = v.trim().parse().map_err(|_| usage(format!("bad value in `{item}`")))?;
                pairs.push((k.trim().to_string(), v));
            }
            let refs: Vec<(&str, i64)> = pairs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let gen = g.element(&refs)?;
            let check = g.check_principal_filter(&gen, *bound)?;
            let text = match &check {
                FilterCheck::Confirmed { bound, checked } => format!("prime (no violation among {checked} pairs in [0,{bound}])\n"),
                FilterCheck::Refuted { f, g: h } => format!("not prime: {:?} + {:?} lies in the filter\n", f.0, h.0),
            };
            Ok(Report::new(json!({"action": "filter-check", "check": filter_json(&g, &check)}), text))
        }
    }
}

fn family(max_r: usize, max_n: u64) -> Vec<String> {
    let names = ["p", "q", "r", "s", "t"];
    let mut out = Vec::new();
    fn rec(prefix: &mut Vec<u64>, r: usize, max_n: u64, names: &[&str], out: &mut Vec<String>) {
        if prefix.len() == r {
            out.push(prefix.iter().zip(names).map(|(n, p)| format!("{p}^{n}")).collect::<Vec<_>>().join("*"));
            return;
        }
        let lo = prefix.last().copied().unwrap_or(2);
        for n in lo..=max_n {
            prefix.push(n);
            rec(prefix, r, max_n, names, out);
            prefix.pop();
        }
    }
    for r in 1..=max_r.min(names.len()) {
        rec(&mut Vec::new(), r, max_n, &names, &mut out);
    }
    out
}

fn verify(ctx: &Ctx, ws: &[String], max_r: usize, max_n: u64) -> Outcome {
    let specs = if ws.is_empty() { family(max_r, max_n) } else { ws.to_vec() };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut warnings = Vec::new();
    let (mut mismatches, mut literal_mismatches) = (0, 0);
    writeln!(text, "{:<24} {:<4} {:>8} {:>8} {:>8}  status", "W", "", "census", "formula", "literal").unwrap();
    for spec in &specs {
        let w = ctx.potential(spec)?;
        for grading in [Grading::Graded, Grading::Even] {
            let census = enumerate_classes_bounded(&w, grading, 1_000_000)?.count();
            let formula = count_classes(&w, grading);
            let lit = count_classes_literal(&w, grading);
            let ok = formula == BigUint::from(census);
            if !ok {
                mismatches += 1;
            }
            if !lit.agrees() {
                literal_mismatches += 1;
                warnings.push(format!("literal formula for {} ({grading}) gives {}, census gives {census}", w.render(), lit.printed));
            }
            let status = match (ok, lit.agrees()) {
                (false, _) => "MISMATCH",
                (true, false) => "ok (literal flagged)",
                (true, true) => "ok",
            };
            writeln!(text, "{:<24} {:<4} {census:>8} {formula:>8} {:>8}  {status}", w.render(), grading.to_string(), lit.printed)
                .unwrap();
            rows.push(json!({
                "W": w.render(),
                "grading": grading.to_string(),
                "census": census,
                "formula": number(&formula),
                "agrees": ok,
                "literal": lit.to_json(),
            }));
        }
    }
    writeln!(text, "{mismatches} mismatches, {literal_mismatches} literal-formula discrepancies").unwrap();
    let json = json!({"results": rows, "mismatches": mismatches, "literal_mismatches": literal_mismatches});
    Ok(Report { json, text, warnings, status: if mismatches == 0 { 0 } else { 1 } })
}
