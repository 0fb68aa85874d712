//! Batch front door: `run` executes the tasks of a JSON state-spec file,
//! `list-builtins` enumerates named constructors, `cohomology` computes a
//! single group. Exit codes: 0 all tasks passed, 1 at least one task failed,
//! 2 the spec (or command line) was invalid.

mod spec;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spt_core::cohomology::CohomologyGroup;
use spt_core::indices::{
    h2_index_with_report, translation_index_with_report, two_d_index_report,
    verify_invariance_suite, Transform,
};
use spt_core::random::{random_symmetric_gate, random_unitary};
use spt_core::FiniteGroup;

use spec::{ResolvedSpec, SpecError, TaskBlock};

#[derive(Parser)]
#[command(name = "spt", about = "index pipelines for symmetric uniform MPS", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the tasks of a JSON state-spec file.
    Run {
        /// Path to the spec file.
        spec: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<String>,
        /// Override the spec's seed for randomized verification transforms.
        #[arg(long)]
        seed: Option<u64>,
        /// Emit flat key-value lines instead of aligned tables.
        #[arg(long)]
        machine: bool,
    },
    /// List named groups, states, and actions.
    ListBuiltins {
        /// Keep only entries of this kind (group | state | action).
        filter: Option<String>,
    },
    /// Compute H^n for a named group (e.g. z2, z4, z2xz3, s3).
    Cohomology {
        group: String,
        n: usize,
        /// Denominator lattice 1/m for reported generators (defaults to |G|).
        #[arg(long)]
        m: Option<u64>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { spec, out, seed, machine } => run(&spec, out.as_deref(), seed, machine),
        Command::ListBuiltins { filter } => list_builtins(filter.as_deref()),
        Command::Cohomology { group, n, m } => cohomology(&group, n, m),
    }
}

/// One task's result: a titled list of key-value rows plus a pass flag.
struct Section {
    title: String,
    rows: Vec<(String, String)>,
    passed: bool,
}

fn run(path: &str, out: Option<&str>, seed: Option<u64>, machine: bool) -> ExitCode {
    let resolved = match read_spec(path, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let sections = run_tasks(&resolved);
    let all_passed = sections.iter().all(|s| s.passed);
    let report = if machine { render_kv(&sections) } else { render_text(&sections) };
    if let Some(out) = out {
        if let Err(e) = std::fs::write(out, &report) {
            eprintln!("cannot write `{out}`: {e}");
            return ExitCode::from(2);
        }
    } else {
        print!("{report}");
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_spec(path: &str, seed_override: Option<u64>) -> Result<ResolvedSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        field: "(file)".into(),
        message: format!("cannot read `{path}`: {e}"),
    })?;
    let mut file = spec::parse(&text)?;
    if let Some(s) = seed_override {
        file.seed = s;
    }
    spec::resolve(file)
}

fn run_tasks(spec: &ResolvedSpec) -> Vec<Section> {
    let snap_m = spec.tolerances.snap_m.unwrap_or(spec.group.order() as u64);
    spec.tasks
        .iter()
        .enumerate()
        .map(|(i, task)| {
            let (title, result) = run_task(spec, task, snap_m);
            match result {
                Ok((rows, passed)) => Section { title: format!("{i}:{title}"), rows, passed },
                Err(e) => Section {
                    title: format!("{i}:{title}"),
                    rows: vec![("error".into(), e)],
                    passed: false,
                },
            }
        })
        .collect()
}

type TaskRows = Result<(Vec<(String, String)>, bool), String>;

fn run_task(spec: &ResolvedSpec, task: &TaskBlock, _snap_m: u64) -> (String, TaskRows) {
    match task {
        TaskBlock::Cohomology { n, m } => ("cohomology".into(), task_cohomology(spec, *n, *m)),
        TaskBlock::H2Index => ("h2_index".into(), task_h2(spec)),
        TaskBlock::TranslationIndex => ("translation_index".into(), task_h1(spec)),
        TaskBlock::TwoDReport => ("two_d_report".into(), task_two_d(spec)),
        TaskBlock::Verify { transforms } => ("verify".into(), task_verify(spec, transforms)),
        TaskBlock::FNorm { interaction, phi, metric } => {
            ("f_norm".into(), task_f_norm(interaction, *phi, metric.as_deref()))
        }
    }
}

fn task_cohomology(spec: &ResolvedSpec, n: usize, m: u64) -> TaskRows {
    let h = CohomologyGroup::compute(&spec.group, n, m).map_err(|e| e.to_string())?;
    Ok((cohomology_rows(&h), true))
}

fn cohomology_rows(h: &CohomologyGroup) -> Vec<(String, String)> {
    let divisors = if h.divisors().is_empty() {
        "trivial".into()
    } else {
        h.divisors().iter().map(|d| format!("Z_{d}")).collect::<Vec<_>>().join(" x ")
    };
    vec![
        ("group".into(), h.group().label().to_string()),
        ("degree".into(), h.degree().to_string()),
        ("structure".into(), divisors),
        ("class_count".into(), h.class_count().to_string()),
        ("generator_lattice".into(), format!("(1/{})Z/Z", h.modulus())),
    ]
}

fn task_h2(spec: &ResolvedSpec) -> TaskRows {
    let (class, residuals) =
        h2_index_with_report(&spec.state, &spec.action).map_err(|e| e.to_string())?;
    let mut rows = vec![
        ("group".into(), spec.group.label().to_string()),
        ("coordinates".into(), class.describe_coordinates()),
        (
            "divisors".into(),
            class.divisors.iter().map(|d| format!("Z_{d}")).collect::<Vec<_>>().join(" x "),
        ),
        ("trivial".into(), class.is_trivial().to_string()),
        ("snap_lattice".into(), format!("(1/{})Z/Z", class.modulus)),
    ];
    rows.extend(residual_rows(&residuals));
    Ok((rows, true))
}

fn task_h1(spec: &ResolvedSpec) -> TaskRows {
    let (h1, residuals) =
        translation_index_with_report(&spec.state, &spec.action).map_err(|e| e.to_string())?;
    let vals: Vec<String> = h1.values().iter().map(|v| v.to_string()).collect();
    let mut rows = vec![
        ("group".into(), spec.group.label().to_string()),
        ("alpha".into(), format!("[{}]", vals.join(", "))),
        ("snap_lattice".into(), format!("(1/{})Z/Z", spec.group.order())),
    ];
    rows.extend(residual_rows(&residuals));
    Ok((rows, true))
}

fn task_two_d(spec: &ResolvedSpec) -> TaskRows {
    let column = spec.column.as_ref().map(|(s, a)| (s, a));
    let report =
        two_d_index_report(&spec.state, &spec.action, column).map_err(|e| e.to_string())?;
    let mut rows = vec![("group".into(), report.group_label.clone())];
    if let Some(h1) = &report.h1 {
        let vals: Vec<String> = h1.values().iter().map(|v| v.to_string()).collect();
        rows.push(("h1".into(), format!("[{}]", vals.join(", "))));
    }
    if let Some(h2) = &report.h2 {
        rows.push(("h2".into(), h2.describe_coordinates()));
    }
    match &report.h2_rotated {
        Some(h2) => rows.push(("h2_rotated".into(), h2.describe_coordinates())),
        None => rows.push(("h2_rotated".into(), "not computable (no column state)".into())),
    }
    rows.extend(residual_rows(&report.residuals));
    for (i, p) in report.provenance.iter().enumerate() {
        rows.push((format!("provenance[{i}]"), p.clone()));
    }
    Ok((rows, true))
}

fn task_verify(spec: &ResolvedSpec, names: &[String]) -> TaskRows {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut transforms = Vec::new();
    for name in names {
        let t = match name.as_str() {
            "stack_self" => Transform::Stack(spec.state.clone(), spec.action.clone()),
            "basis_change" => {
                let v = random_unitary(spec.state.physical_dim(), &mut rng)
                    .map_err(|e| e.to_string())?;
                Transform::BasisChange(v)
            }
            "symmetric_circuit" => {
                let gate =
                    random_symmetric_gate(&spec.action, &mut rng).map_err(|e| e.to_string())?;
                Transform::SymmetricCircuit(gate)
            }
            other => match other.strip_prefix("block:").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) => Transform::Block(k),
                None => return Err(format!("unknown transform `{other}`")),
            },
        };
        transforms.push(t);
    }
    let rows = verify_invariance_suite(&spec.state, &spec.action, transforms)
        .map_err(|e| e.to_string())?;
    let all_passed = rows.iter().all(|r| r.passed);
    let mut out = vec![("seed".into(), spec.seed.to_string())];
    for r in &rows {
        out.push((
            r.transform.clone(),
            format!("{} [{}] {}", if r.passed { "pass" } else { "FAIL" }, r.relation, r.details),
        ));
    }
    Ok((out, all_passed))
}

fn task_f_norm(path: &str, phi: f64, metric: Option<&str>) -> TaskRows {
    let interaction = spec::load_interaction(path).map_err(|e| e.to_string())?;
    let metric = spec::parse_metric(metric).map_err(|e| e.to_string())?;
    let value = interaction.f_norm(phi, metric).map_err(|e| e.to_string())?;
    Ok((
        vec![
            ("phi".into(), format!("{phi}")),
            ("metric".into(), format!("{metric:?}").to_lowercase()),
            ("f_norm".into(), format!("{value:.15e}")),
            ("terms".into(), interaction.terms().len().to_string()),
        ],
        true,
    ))
}

fn residual_rows(residuals: &[(String, f64)]) -> Vec<(String, String)> {
    residuals
        .iter()
        .map(|(k, v)| (format!("residual.{k}"), format!("{v:.14e} (tol 1e-6)")))
        .collect()
}

fn render_text(sections: &[Section]) -> String {
    let mut s = String::new();
    for sec in sections {
        writeln!(s, "== {}: {}", sec.title, if sec.passed { "ok" } else { "FAILED" }).unwrap();
        let width = sec.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &sec.rows {
            writeln!(s, "  {k:<width$}  {v}").unwrap();
        }
    }
    let failed = sections.iter().filter(|s| !s.passed).count();
    writeln!(s, "== summary: {}/{} tasks passed", sections.len() - failed, sections.len())
        .unwrap();
    s
}

fn render_kv(sections: &[Section]) -> String {
    let mut s = String::new();
    for sec in sections {
        writeln!(s, "task.{}={}", sec.title, if sec.passed { "ok" } else { "failed" }).unwrap();
        for (k, v) in &sec.rows {
            writeln!(s, "{}.{}={}", sec.title, k, v).unwrap();
        }
    }
    let failed = sections.iter().filter(|s| !s.passed).count();
    writeln!(s, "summary.passed={}", sections.len() - failed).unwrap();
    writeln!(s, "summary.total={}", sections.len()).unwrap();
    s
}

fn list_builtins(filter: Option<&str>) -> ExitCode {
    for (kind, name, desc) in spt_core::builtins::catalog() {
        if filter.map_or(true, |f| f == kind) {
            println!("{kind:<7} {name:<28} {desc}");
        }
    }
    ExitCode::SUCCESS
}

fn cohomology(group: &str, n: usize, m: Option<u64>) -> ExitCode {
    let group = match parse_group_name(group) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let m = m.unwrap_or(group.order() as u64);
    match CohomologyGroup::compute(&group, n, m) {
        Ok(h) => {
            let rows = cohomology_rows(&h);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                println!("{k:<width$}  {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}

/// Group names: `z4`/`c4`, `s3`, and `x`-separated products like `z2xz2`.
fn parse_group_name(name: &str) -> Result<Arc<FiniteGroup>, String> {
    let mut parts = name.split('x');
    let mut g = parse_atom(parts.next().unwrap())?;
    for p in parts {
        let h = parse_atom(p)?;
        g = FiniteGroup::direct_product(&g, &h).map_err(|e| e.to_string())?;
    }
    Ok(g)
}

fn parse_atom(atom: &str) -> Result<Arc<FiniteGroup>, String> {
    let atom = atom.trim();
    let (head, tail) = atom.split_at(atom.len().min(1));
    let n: usize = tail.parse().map_err(|_| format!("cannot parse group atom `{atom}`"))?;
    match head {
        "z" | "c" => FiniteGroup::cyclic(n).map_err(|e| e.to_string()),
        "s" => FiniteGroup::symmetric(n).map_err(|e| e.to_string()),
        _ => Err(format!("cannot parse group atom `{atom}`")),
    }
}
