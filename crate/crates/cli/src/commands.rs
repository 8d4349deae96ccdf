use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use bgw::algebra::{canonical_basis, character_table, CanonicalBasis, CharacterOptions};
use bgw::constraints::{
    factorization_report, kdv_check, virasoro_check, ConstraintReport, KdvOptions, VirasoroOptions,
};
use bgw::correlators::{tensor_omega_check, CohftOptions, CorrelatorKey, Mutation, PotentialBasis, Theory};
use bgw::group::{GroupSpec, GroupTable};
use bgw::scalar::{float_json, format_rational};
use bgw::series::Caps;

use crate::{render, Basis, Check, Cli, Command, Format, Global};

pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<bgw::Error>() {
        Some(e) if e.is_resource_cap() => 3,
        _ => 2,
    }
}

fn read_spec(arg: &str) -> Result<GroupSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading group spec {arg}"))?
    };
    Ok(GroupSpec::parse(&text)?)
}

fn theory(global: &Global, spec: &GroupSpec) -> Result<Theory> {
    let mut t = Theory::new(spec.build()?).with_jobs(global.jobs);
    if let Some(cap) = global.work_cap {
        t = t.with_work_cap(cap);
    }
    Ok(t)
}

/// A class index, or the name of an element of the class.
fn class_label(g: &GroupTable, t: &Theory, label: &str) -> Result<usize> {
    let label = label.trim();
    if let Ok(k) = label.parse::<usize>() {
        if k >= t.num_classes() {
            bail!(bgw::Error::InvalidInput(format!(
                "class {k} out of range, the group has {} classes",
                t.num_classes()
            )));
        }
        return Ok(k);
    }
    match g.element_by_name(label) {
        Some(x) => Ok(t.algebra().conjugacy().class_of[x]),
        None => bail!(bgw::Error::InvalidInput(format!("unknown class or element `{label}`"))),
    }
}

fn class_labels(t: &Theory, labels: &[String]) -> Result<Vec<usize>> {
    labels
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| class_label(t.group(), t, s))
        .collect()
}

fn canonical(t: &Theory, seed: u64) -> Result<CanonicalBasis> {
    let opts = CharacterOptions {
        seed,
        ..CharacterOptions::default()
    };
    let ct = character_table(t.algebra(), &opts)?;
    Ok(canonical_basis(&ct, t.algebra())?)
}

fn caps_json(c: &Caps) -> Value {
    json!({
        "degree": c.degree,
        "genus": c.genus,
        "level": c.level,
        "lambda_floor": c.lambda_floor,
    })
}

fn reports_json(check: &str, reports: &[ConstraintReport]) -> (Value, bool) {
    let passed = reports.iter().all(ConstraintReport::passed);
    let body = json!({
        "check": check,
        "passed": passed,
        "reports": reports.iter().map(ConstraintReport::to_json).collect::<Vec<_>>(),
    });
    (body, passed)
}

/// Runs the command and writes its report; returns the exit code.
pub fn run(cli: &Cli) -> Result<u8> {
    let global = &cli.global;
    let spec = match &global.group {
        Some(g) => read_spec(g)?,
        None => bail!(bgw::Error::InvalidInput("--group is required".into())),
    };
    let t = theory(global, &spec)?;
    let (result, passed) = match &cli.command {
        Command::Group => (group(&t), true),
        Command::Chartable => (chartable(&t, global.seed)?, true),
        Command::Omega { genus, classes } => omega(&t, global, *genus, classes)?,
        Command::Correlator { genus, levels, classes } => (correlator(&t, *genus, levels, classes)?, true),
        Command::Potential { genus, degree, basis } => (potential(&t, *genus, *degree, *basis)?, true),
        Command::Check { which } => check(&t, global, which)?,
    };
    let doc = json!({
        "group": spec.label(),
        "result": result,
    });
    let text = match global.format {
        Format::Json => serde_json::to_string_pretty(&doc)? + "\n",
        Format::Text => render::text(&doc),
    };
    match &global.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(if passed { 0 } else { 1 })
}

fn group(t: &Theory) -> Value {
    let g = t.group();
    let cd = t.algebra().conjugacy();
    let classes: Vec<Value> = (0..cd.num_classes())
        .map(|k| {
            json!({
                "index": k,
                "representative": g.element_name(cd.representative[k]),
                "size": cd.class_size[k],
                "centralizer_order": cd.class_centralizer(k),
                "inverse_class": cd.inverse_class[k],
            })
        })
        .collect();
    json!({
        "command": "group",
        "order": g.order(),
        "abelian": g.is_abelian(),
        "num_classes": cd.num_classes(),
        "classes": classes,
    })
}

fn chartable(t: &Theory, seed: u64) -> Result<Value> {
    let opts = CharacterOptions {
        seed,
        ..CharacterOptions::default()
    };
    let ct = character_table(t.algebra(), &opts)?;
    let cb = canonical_basis(&ct, t.algebra())?;
    let values: Vec<Vec<Value>> = ct
        .values
        .iter()
        .map(|row| row.iter().map(bgw::Scalar::to_json).collect())
        .collect();
    let residuals: serde_json::Map<String, Value> = cb
        .residuals(t.algebra())?
        .iter()
        .map(|(name, r)| (name.to_string(), float_json(*r)))
        .collect();
    Ok(json!({
        "command": "chartable",
        "degrees": ct.degrees,
        "values": values,
        "orthogonality_residual": float_json(ct.orthogonality_residual()),
        "inverse_residual": float_json(ct.inverse_residual()),
        "nu": cb.nus.iter().map(format_rational).collect::<Vec<_>>(),
        "canonical_residuals": residuals,
    }))
}

fn omega(t: &Theory, global: &Global, genus: u32, labels: &[String]) -> Result<(Value, bool)> {
    let classes = class_labels(t, labels)?;
    let recursive = t.omega(genus, &classes)?;
    let (brute, stats) = t.omega_bruteforce_with_stats(genus, &classes)?;
    let agree = recursive == brute;
    let mut out = json!({
        "command": "omega",
        "genus": genus,
        "classes": classes,
        "recursive": format_rational(&recursive),
        "bruteforce": format_rational(&brute),
        "agree": agree,
    });
    if global.profile {
        out["profile"] = json!({
            "tuples": stats.tuples.to_string(),
            "solutions": stats.solutions.to_string(),
            "seconds": float_json(stats.seconds),
            "tuples_per_second": float_json(stats.tuples_per_second()),
        });
    }
    Ok((out, agree))
}

fn correlator(t: &Theory, genus: u32, levels: &[u32], labels: &[String]) -> Result<Value> {
    let classes = class_labels(t, labels)?;
    if classes.len() != levels.len() {
        bail!(bgw::Error::InvalidInput(format!(
            "{} levels but {} classes",
            levels.len(),
            classes.len()
        )));
    }
    let key = CorrelatorKey::new(genus, levels.iter().copied().zip(classes).collect());
    let v = t.correlator_detail(&key)?;
    Ok(json!({
        "command": "correlator",
        "genus": genus,
        "insertions": key.insertions,
        "value": format_rational(&v.value),
        "psi": format_rational(&v.psi),
        "omega": format_rational(&v.omega),
        "vanishing": v.vanishing.map(|r| r.as_str()),
    }))
}

fn potential(t: &Theory, genus: u32, degree: u32, basis: Basis) -> Result<Value> {
    let caps = Caps::new(degree, genus);
    let basis = match basis {
        Basis::Class => PotentialBasis::Class,
        Basis::Canonical => PotentialBasis::CanonicalRescaled,
    };
    let phi = t.potential(caps, basis)?;
    let z = phi.exponential()?;
    Ok(json!({
        "command": "potential",
        "basis": match basis { PotentialBasis::Class => "class", PotentialBasis::CanonicalRescaled => "canonical" },
        "caps": caps_json(&caps),
        "phi": phi.to_json(),
        "phi_terms": phi.len(),
        "z": z.to_json(),
        "z_terms": z.len(),
        "z_caps": caps_json(z.caps()),
        "z_clipped": z.clipped(),
    }))
}

fn mutation(t: &Theory, caps: Caps) -> Result<Mutation> {
    let phi = t.potential(caps, PotentialBasis::Class)?;
    Mutation::first_genus_zero_quartic(&phi)
        .ok_or_else(|| bgw::Error::InvalidInput("potential has no genus-0 quartic term to mutate".into()).into())
}

fn mutation_json(mu: &Mutation) -> Value {
    json!({
        "monomial": mu.monomial.to_json(),
        "lambda": mu.lambda,
        "factor": format_rational(&mu.factor),
    })
}

fn check(t: &Theory, global: &Global, which: &Check) -> Result<(Value, bool)> {
    match which {
        Check::Cohft { genus, points, random_keys } => {
            let opts = CohftOptions {
                max_genus: *genus,
                max_points: *points,
                random_keys: *random_keys,
                seed: global.seed,
            };
            let report = t.cohft_check(&opts)?;
            let passed = report.passed();
            Ok((json!({ "check": "cohft", "passed": passed, "report": report.to_json() }), passed))
        }
        Check::Virasoro { genus, degree, n_max, mutate } => {
            let opts = VirasoroOptions {
                degree: *degree,
                genus: *genus,
                ns: (-1..=*n_max).collect(),
                ..VirasoroOptions::default()
            };
            let mu = if *mutate {
                Some(mutation(t, Caps::new(degree + opts.buffer, *genus))?)
            } else {
                None
            };
            let reports = virasoro_check(t, &opts, mu.as_ref())?;
            let (mut body, passed) = reports_json("virasoro", &reports);
            if let Some(mu) = &mu {
                body["mutation"] = mutation_json(mu);
            }
            Ok((body, passed))
        }
        Check::Kdv { genus, degree, a_max, mutate } => {
            let opts = KdvOptions {
                a_max: *a_max,
                degree: *degree,
                genus: *genus,
            };
            let mu = if *mutate {
                Some(mutation(t, Caps::new(degree + 5, *genus))?)
            } else {
                None
            };
            let reports = kdv_check(t, &opts, mu.as_ref())?;
            let (mut body, passed) = reports_json("kdv", &reports);
            if let Some(mu) = &mu {
                body["mutation"] = mutation_json(mu);
            }
            Ok((body, passed))
        }
        Check::Factorization { genus, degree, tol } => {
            if tol.is_nan() || *tol <= 0.0 {
                bail!(bgw::Error::InvalidInput("--tol must be positive".into()));
            }
            let cb = canonical(t, global.seed)?;
            let report = factorization_report(t, &cb, Caps::new(*degree, *genus), *tol)?;
            let mut body = reports_json("factorization", std::slice::from_ref(&report));
            body.0["tolerance"] = float_json(*tol);
            body.0["max_deviation"] = float_json(report.max_residual_magnitude);
            Ok(body)
        }
        Check::Tensor { with, genus, points } => {
            let h = theory(global, &read_spec(with)?)?;
            let check = tensor_omega_check(t, &h, *genus, *points)?;
            let passed = check.passed();
            Ok((json!({ "check": "tensor", "passed": passed, "report": check.to_json() }), passed))
        }
    }
}
