//! Command-line entry point: load and validate spaces, run the chain-model
//! pipelines, emit machine-readable reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cobar_core::awez::coassociativity_check;
use cobar_core::chain::{homology, verify_complex, HomologyResult};
use cobar_core::cobar::{
    cobar_complex_with, h0_ring_presentation, CobarError, Generators, TruncationPolicy,
};
use cobar_core::fsq::{fsq_complex, verify_phi};
use cobar_core::rigid::{verify_psi, RigidModel};
use cobar_core::space::{builtin_space, from_json, validate, ReducedSimplicialSet};

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cobar-kit",
    version,
    about = "Chain-level loop space models over exact integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Cobar,
    Fsq,
    Rigid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Common {
    /// Builtin name (`builtin:torus`) or path to a JSON space file.
    input: String,
    /// Top degree for bases and reported homology.
    #[arg(long, default_value_t = 4)]
    max_degree: u32,
    /// Word-length truncation; required whenever the space has edges.
    #[arg(long)]
    max_length: Option<u32>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized identity checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Promote truncation warnings to a failing exit status.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the space and verify d∘d = 0 and coassociativity.
    Check(Common),
    /// Per-degree free rank and torsion of one chain model.
    Homology {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Model::Cobar)]
        model: Model,
    },
    /// Verify the cobar/necklace isomorphism and the rigid comparison map.
    Compare(Common),
    /// Generators and relations of the degree-zero cobar ring.
    Pi0Ring(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check(c) => run(c, "check", cmd_check),
        Command::Homology { common, model } => {
            let model = *model;
            run(common, "homology", move |ctx, out| {
                cmd_homology(ctx, model, out)
            })
        }
        Command::Compare(c) => run(c, "compare", cmd_compare),
        Command::Pi0Ring(c) => run(c, "pi0-ring", cmd_pi0_ring),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

struct Ctx {
    space: ReducedSimplicialSet,
    gens: Generators,
    policy: TruncationPolicy,
    seed: u64,
    strict: bool,
}

/// Accumulates the report envelope while commands run.
struct Output {
    results: Vec<Value>,
    warnings: Vec<String>,
    failed: bool,
    table: String,
}

impl Output {
    fn new() -> Self {
        Output {
            results: Vec::new(),
            warnings: Vec::new(),
            failed: false,
            table: String::new(),
        }
    }

    fn push(&mut self, v: Value) {
        self.results.push(v);
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    fn fail(&mut self) {
        self.failed = true;
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.table.push_str(text.as_ref());
        self.table.push('\n');
    }
}

fn run(
    common: &Common,
    command: &str,
    body: impl FnOnce(&Ctx, &mut Output) -> Result<(), String>,
) -> Result<ExitCode, String> {
    let space = load_space(&common.input)?;
    if command != "check" {
        let report = validate(&space);
        if !report.is_valid() {
            return Err(format!("input space fails validation:\n{report}"));
        }
    }
    let gens = Generators::build(&space).map_err(|e| e.to_string())?;
    if common.max_length == Some(0) {
        return Err("--max-length must be at least 1".into());
    }
    let ctx = Ctx {
        space,
        gens,
        policy: TruncationPolicy::new(common.max_degree, common.max_length),
        seed: common.seed,
        strict: common.strict,
    };
    let mut out = Output::new();
    body(&ctx, &mut out)?;
    if ctx.strict && !out.warnings.is_empty() {
        out.fail();
    }
    let envelope = json!({
        "tool": "cobar-kit",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "command": command,
            "input": common.input,
            "max_degree": common.max_degree,
            "max_length": common.max_length,
            "seed": common.seed,
            "strict": common.strict,
        },
        "results": out.results,
        "warnings": out.warnings,
    });
    match common.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&envelope).expect("report serializes")
        ),
        Format::Table => {
            print!("{}", out.table);
            for w in &out.warnings {
                println!("warning: {w}");
            }
        }
    }
    Ok(if out.failed {
        ExitCode::from(EXIT_CHECK_FAILURE)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_space(input: &str) -> Result<ReducedSimplicialSet, String> {
    if let Some(name) = input.strip_prefix("builtin:") {
        return builtin_space(name).map_err(|e| e.to_string());
    }
    let path = PathBuf::from(input);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    from_json(&text).map_err(|e| e.to_string())
}

fn map_cobar_err(e: CobarError) -> String {
    e.to_string()
}

fn truncation_warning(ctx: &Ctx, out: &mut Output) {
    if ctx.gens.has_edges() {
        if let Some(l) = ctx.policy.max_length {
            out.warn(format!(
                "results are computed in the quotient by words of length > {l} and are not the untruncated groups"
            ));
        }
    }
}

fn cmd_check(ctx: &Ctx, out: &mut Output) -> Result<(), String> {
    let report = validate(&ctx.space);
    let passed = report.is_valid();
    out.push(json!({
        "check": "validate",
        "passed": passed,
        "violations": report.violations,
    }));
    out.line(format!("validate: {}", if passed { "pass" } else { "FAIL" }));
    if !passed {
        out.fail();
    }

    let max_dim = ctx.space.top_dim().max(1);
    let coassoc = coassociativity_check(&ctx.space, max_dim).map_err(|e| e.to_string())?;
    out.push(json!({
        "check": "coassociativity",
        "passed": coassoc.passed(),
        "simplices_checked": coassoc.checked,
        "failures": coassoc.failures,
    }));
    out.line(format!(
        "coassociativity: {} ({} simplices)",
        if coassoc.passed() { "pass" } else { "FAIL" },
        coassoc.checked
    ));
    if !coassoc.passed() {
        out.fail();
    }

    let complexes = [
        (
            "cobar",
            cobar_complex_with(&ctx.gens, &ctx.policy).map_err(map_cobar_err)?,
        ),
        (
            "fsq",
            fsq_complex(&ctx.gens, &ctx.policy).map_err(map_cobar_err)?,
        ),
    ];
    for (name, complex) in &complexes {
        let report = verify_complex(complex);
        out.push(json!({
            "check": format!("d_squared_zero_{name}"),
            "passed": report.passed(),
            "failures": report.failures,
        }));
        out.line(format!(
            "d∘d = 0 ({name}): {}",
            if report.passed() { "pass" } else { "FAIL" }
        ));
        if !report.passed() {
            out.fail();
        }
    }
    truncation_warning(ctx, out);
    Ok(())
}

fn homology_json(h: &HomologyResult) -> Vec<Value> {
    h.degrees
        .iter()
        .map(|s| {
            json!({
                "degree": s.degree,
                "free_rank": s.free_rank,
                "torsion": s.torsion,
                "provisional": s.provisional,
            })
        })
        .collect()
}

fn cmd_homology(ctx: &Ctx, model: Model, out: &mut Output) -> Result<(), String> {
    let n = ctx.policy.max_degree;
    // Build one degree higher so every reported degree has its incoming
    // boundary; only the truncation itself stays flagged.
    let build = TruncationPolicy::new(n + 1, ctx.policy.max_length);
    let (name, h) = match model {
        Model::Cobar => {
            let c = cobar_complex_with(&ctx.gens, &build).map_err(map_cobar_err)?;
            ("cobar", homology(&c, 0..=n).map_err(|e| e.to_string())?)
        }
        Model::Fsq => {
            let c = fsq_complex(&ctx.gens, &build).map_err(map_cobar_err)?;
            ("fsq", homology(&c, 0..=n).map_err(|e| e.to_string())?)
        }
        Model::Rigid => {
            let rigid = RigidModel::build(&ctx.space, &ctx.gens, n + 1, n + 2, &ctx.policy)
                .map_err(map_cobar_err)?;
            if rigid.dropped_identifications > 0 {
                out.warn(format!(
                    "{} identifications left the truncation; flagged degrees are provisional",
                    rigid.dropped_identifications
                ));
            }
            let mut h = homology(&rigid.complex, 0..=n).map_err(|e| e.to_string())?;
            for s in h.degrees.iter_mut() {
                if rigid.degree_flags[s.degree as usize] {
                    s.provisional = true;
                }
            }
            ("rigid", h)
        }
    };
    out.push(json!({
        "model": name,
        "homology": homology_json(&h),
    }));
    out.line(format!("homology ({name})"));
    out.line(h.render_table());
    truncation_warning(ctx, out);
    Ok(())
}

fn cmd_compare(ctx: &Ctx, out: &mut Output) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let phi = verify_phi(&ctx.gens, &ctx.policy, &mut rng, 100).map_err(map_cobar_err)?;
    out.push(json!({
        "check": "phi_isomorphism",
        "passed": phi.passed(),
        "bijection_ok": phi.bijection_ok,
        "triangular_ok": phi.triangular_ok,
        "chain_map_ok": phi.chain_map_ok,
        "algebra_pairs_checked": phi.algebra_pairs_checked,
        "algebra_ok": phi.algebra_ok,
        "basis_sizes": phi.basis_sizes,
        "failures": phi.failures,
    }));
    out.line(format!(
        "phi isomorphism: {}",
        if phi.passed() { "pass" } else { "FAIL" }
    ));
    if !phi.passed() {
        out.fail();
    }

    // The rigid side is kept at small bounds: its generator count grows much
    // faster than the algebraic models'.
    let psi_degree = ctx.policy.max_degree.min(2);
    let psi_length = ctx.policy.max_length.map(|l| l.min(4));
    let psi_policy = TruncationPolicy::new(psi_degree, psi_length);
    let psi = verify_psi(&ctx.space, &ctx.gens, psi_degree, &psi_policy, &mut rng, 40)
        .map_err(map_cobar_err)?;
    let product_order = match (psi.product_direct_ok, psi.product_reversed_ok) {
        (true, true) => "both",
        (true, false) => "direct",
        (false, true) => "reversed",
        (false, false) => "neither",
    };
    out.push(json!({
        "check": "psi_comparison",
        "passed": psi.passed(),
        "psi_max_degree": psi_degree,
        "psi_max_length": psi_length,
        "chain_map_ok": psi.chain_map_ok,
        "words_checked": psi.words_checked,
        "chain_map_skipped": psi.chain_map_skipped,
        "product_order": product_order,
        "product_pairs_checked": psi.product_pairs_checked,
        "homology": psi.homology,
        "dropped_identifications": psi.dropped_identifications,
        "failures": psi.failures,
    }));
    out.line(format!(
        "psi comparison (degrees <= {psi_degree}): {} (product order: {product_order})",
        if psi.passed() { "pass" } else { "FAIL" }
    ));
    if !psi.passed() {
        out.fail();
    }
    if psi.chain_map_skipped > 0 {
        out.warn(format!(
            "{} psi chain-map checks skipped at the truncation frontier",
            psi.chain_map_skipped
        ));
    }

    // Cross-model homology of the two algebraic models. With a finite
    // length cap the two quotients can differ near the frontier, so
    // disagreements there are reported but only counted as failures for
    // untruncated inputs.
    let n = ctx.policy.max_degree;
    let build = TruncationPolicy::new(n + 1, ctx.policy.max_length);
    let hc = homology(
        &cobar_complex_with(&ctx.gens, &build).map_err(map_cobar_err)?,
        0..=n,
    )
    .map_err(|e| e.to_string())?;
    let hf = homology(
        &fsq_complex(&ctx.gens, &build).map_err(map_cobar_err)?,
        0..=n,
    )
    .map_err(|e| e.to_string())?;
    let frontier_sensitive = ctx.gens.has_edges() && ctx.policy.max_length.is_some();
    let mut rows = Vec::new();
    let mut agreement = true;
    for d in 0..=n {
        let c = hc.summand(d).expect("degree computed");
        let f = hf.summand(d).expect("degree computed");
        let agrees = c.free_rank == f.free_rank && c.torsion == f.torsion;
        if !agrees && !frontier_sensitive {
            agreement = false;
        }
        rows.push(json!({
            "degree": d,
            "cobar": {"free_rank": c.free_rank, "torsion": c.torsion},
            "fsq": {"free_rank": f.free_rank, "torsion": f.torsion},
            "agrees": agrees,
            "provisional": frontier_sensitive,
        }));
    }
    out.push(json!({
        "check": "cobar_vs_fsq_homology",
        "passed": agreement,
        "degrees": rows,
    }));
    out.line(format!(
        "cobar vs fsq homology: {}",
        if agreement { "agree" } else { "DISAGREE" }
    ));
    if !agreement {
        out.fail();
    }
    if frontier_sensitive {
        out.warn("length truncation: cross-model homology rows are provisional near the frontier");
    }
    truncation_warning(ctx, out);
    Ok(())
}

fn cmd_pi0_ring(ctx: &Ctx, out: &mut Output) -> Result<(), String> {
    let p = h0_ring_presentation(&ctx.space).map_err(|e| e.to_string())?;
    out.push(json!({
        "generators": p.generators,
        "relations_raw": p.relations_raw,
        "relations_monoid": p.relations_monoid,
    }));
    let mut text = String::new();
    writeln!(text, "generators: {}", p.generators.join(", ")).unwrap();
    if p.relations_monoid.is_empty() {
        writeln!(text, "relations: none (free)").unwrap();
    } else {
        writeln!(text, "relations (monoid form):").unwrap();
        for r in &p.relations_monoid {
            writeln!(text, "  {r}").unwrap();
        }
        writeln!(text, "relations (raw form):").unwrap();
        for r in &p.relations_raw {
            writeln!(text, "  {r}").unwrap();
        }
    }
    out.line(text.trim_end());
    Ok(())
}
