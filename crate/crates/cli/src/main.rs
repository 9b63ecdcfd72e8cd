//! `aramat`: batch front end over a workspace directory holding
//! `schema.toml` and optionally `instance.toml`.
//!
//! Exit status is 0 on success, 1 when a command runs but fails (bad input
//! files or expressions, refused normalization, failed certification, fuzz
//! failures) and 2 on command-line usage errors. Expression arguments are
//! given inline or as `@path` to read them from a file.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use aramat_core::ara::evaluate;
use aramat_core::bridge::{compile_ara3_to_ml, translate_ara_to_ml, translate_ml_to_ara, AttrOrder, TranslateOptions};
use aramat_core::files::{instance_to_toml, load_workspace, schema_to_toml, Workspace};
use aramat_core::harness::{
    certify_ara_to_ml, certify_equivalent, certify_ml_to_ara, dispatch, fuzz_oracle, Certification, GenConfig, GenValue,
    Generator, SemiringVisitor, ValueBounds,
};
use aramat_core::matlang::{ml_evaluate, MatrixSchema};
use aramat_core::normalform::normalize;
use aramat_core::semiring::SemiringKind;

#[derive(Parser, Debug)]
#[command(name = "aramat", version, about = "Annotated relational algebra and MATLANG over semirings")]
struct Cli {
    /// Workspace directory with schema.toml and instance.toml.
    #[arg(long, global = true, default_value = ".")]
    dir: PathBuf,
    /// Annotation semiring: nat, int, bool, tropical, provenance or mat2.
    /// Defaults to the instance file's choice, then int.
    #[arg(long, global = true)]
    semiring: Option<SemiringKind>,
    /// Provenance tokens used when sampling random annotations.
    #[arg(long, global = true, value_delimiter = ',')]
    tokens: Option<Vec<String>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Certify {
    /// Number of random instances to check the translation on.
    #[arg(long, default_value_t = 0)]
    certify: usize,
    /// Seed for the random instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Evaluate an ARA expression on the relational instance.
    EvalAra { expr: String },
    /// Evaluate a MATLANG expression on the matrix instance.
    EvalMl { expr: String },
    /// Print the normal form of an ARA(k+1) expression over a schema of arity at most k.
    Normalize {
        #[arg(long)]
        k: usize,
        expr: String,
    },
    /// Translate MATLANG to ARA.
    ToAra {
        expr: String,
        #[command(flatten)]
        certify: Certify,
        /// Duplicate subexpressions instead of using constant-size substitutes.
        #[arg(long)]
        naive: bool,
    },
    /// Translate an (ARA+ζ2)(2) expression to MATLANG.
    ToMl {
        expr: String,
        #[command(flatten)]
        certify: Certify,
        #[arg(long)]
        naive: bool,
    },
    /// Compile an ARA(3) expression with at most two output attributes to MATLANG.
    Compile {
        expr: String,
        #[command(flatten)]
        certify: Certify,
    },
    /// Compare two ARA expressions on random instances of the schema.
    CheckEquiv {
        left: String,
        right: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Differential fuzzing of the evaluator against the dense oracle.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Directory receiving one replayable workspace per failure.
        #[arg(long, default_value = "fuzz-artifacts")]
        out: PathBuf,
    },
}

fn read_expr(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(arg.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ws = if matches!(cli.command, Command::Fuzz { .. }) {
        None
    } else {
        Some(load_workspace(&cli.dir)?)
    };
    let kind = cli
        .semiring
        .or_else(|| ws.as_ref().and_then(|w| w.semiring))
        .unwrap_or(SemiringKind::Int);
    let mut bounds = ValueBounds::default();
    if let Some(t) = cli.tokens {
        if t.is_empty() || t.iter().any(|s| s.is_empty()) {
            bail!("--tokens needs a nonempty comma-separated list");
        }
        bounds.tokens = t;
    }
    dispatch(
        kind,
        Run {
            ws: ws.as_ref(),
            command: cli.command,
            bounds,
            kind,
        },
    )
}

struct Run<'a> {
    ws: Option<&'a Workspace>,
    command: Command,
    bounds: ValueBounds,
    kind: SemiringKind,
}

impl Run<'_> {
    fn generator(&self, seed: u64) -> Generator {
        Generator::new(GenConfig {
            semiring: self.kind,
            bounds: self.bounds.clone(),
            ..GenConfig::with_seed(seed)
        })
    }

    fn ws(&self) -> &Workspace {
        self.ws.expect("loaded for every command but fuzz")
    }
}

fn report(c: Certification) -> Result<()> {
    println!("{c}");
    if c.passed() {
        Ok(())
    } else {
        Err(anyhow!("certification failed"))
    }
}

impl SemiringVisitor for Run<'_> {
    type Output = Result<()>;

    fn visit<K: GenValue>(self) -> Result<()> {
        match self.command.clone() {
            Command::EvalAra { expr } => {
                let ws = self.ws();
                let e = ws.parse_ara(&read_expr(&expr)?)?;
                if !ws.has_relational_instance() {
                    bail!("the workspace has no relational instance");
                }
                let inst = ws.instance::<K>()?;
                print!("{}", render::relation_table(&evaluate(&e, &inst)?, inst.domain()));
            }
            Command::EvalMl { expr } => {
                let ws = self.ws();
                let e = ws.parse_ml(&read_expr(&expr)?)?;
                if !ws.has_matrix_instance() {
                    bail!("the workspace has no matrix instance");
                }
                let inst = ws.mat_instance::<K>()?;
                print!("{}", render::matrix_grid(&ml_evaluate(&e, &inst)?));
            }
            Command::Normalize { k, expr } => {
                let ws = self.ws();
                let e = ws.parse_ara(&read_expr(&expr)?)?;
                println!("{}", normalize(&e, &ws.db, k, &K::spec())?);
            }
            Command::ToAra { expr, certify, naive } => {
                let ws = self.ws();
                let e = ws.parse_ml(&read_expr(&expr)?)?;
                let ara = translate_ml_to_ara(&e, &ws.matrices, TranslateOptions { linear_size: !naive })?;
                println!("{ara}");
                if certify.certify > 0 {
                    let mut gen = self.generator(certify.seed);
                    report(certify_ml_to_ara::<K>(&mut gen, &e, &ara, &ws.matrices, certify.certify)?)?;
                }
            }
            Command::ToMl { expr, certify, naive } => {
                let ws = self.ws();
                let e = ws.parse_ara(&read_expr(&expr)?)?;
                let ml = translate_ara_to_ml(&e, &ws.db, &ws.order, TranslateOptions { linear_size: !naive })?;
                println!("{ml}");
                if certify.certify > 0 {
                    let mut gen = self.generator(certify.seed);
                    report(certify_ara_to_ml::<K>(&mut gen, &e, &ml, &ws.db, &ws.order, certify.certify)?)?;
                }
            }
            Command::Compile { expr, certify } => {
                let ws = self.ws();
                let e = ws.parse_ara(&read_expr(&expr)?)?;
                let ml = compile_ara3_to_ml(&e, &ws.db, &ws.order, &K::spec(), TranslateOptions::default())?;
                println!("{ml}");
                if certify.certify > 0 {
                    let mut gen = self.generator(certify.seed);
                    report(certify_ara_to_ml::<K>(&mut gen, &e, &ml, &ws.db, &ws.order, certify.certify)?)?;
                }
            }
            Command::CheckEquiv {
                left,
                right,
                samples,
                seed,
            } => {
                let ws = self.ws();
                let l = ws.parse_ara(&read_expr(&left)?)?;
                let r = ws.parse_ara(&read_expr(&right)?)?;
                if l.schema() != r.schema() {
                    bail!("schemas differ: {} vs {}", l.schema(), r.schema());
                }
                let mut gen = self.generator(seed);
                report(certify_equivalent::<K>(&mut gen, &l, &r, &ws.db, samples)?)?;
            }
            Command::Fuzz {
                seed,
                count,
                k,
                depth,
                out,
            } => {
                if k == 0 {
                    bail!("--k must be at least 1");
                }
                let cfg = GenConfig {
                    max_depth: depth,
                    max_schema_arity: k,
                    semiring: self.kind,
                    bounds: self.bounds.clone(),
                    ..GenConfig::with_seed(seed)
                };
                let rep = fuzz_oracle::<K>(&cfg, count, k)?;
                for f in &rep.failures {
                    let dir = write_artifact(&out, f.case, &f.db, &f.expr, &f.instance)?;
                    println!("case {}: {}: {} (replay with --dir {})", f.case, f.message, f.expr, dir.display());
                }
                println!("{} cases, {} failures", rep.cases, rep.failures.len());
                if !rep.failures.is_empty() {
                    bail!("the evaluator disagrees with the oracle");
                }
            }
        }
        Ok(())
    }
}

/// Writes a workspace replayable with `eval-ara @<dir>/expr.ara`.
fn write_artifact<K: aramat_core::Semiring>(
    out: &Path,
    case: usize,
    db: &aramat_core::DatabaseSchema,
    e: &aramat_core::AraExpr,
    inst: &aramat_core::Instance<K>,
) -> Result<PathBuf> {
    let dir = out.join(format!("case-{case}"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("schema.toml"), schema_to_toml(db, &MatrixSchema::new(), &AttrOrder::Lexicographic))?;
    fs::write(dir.join("instance.toml"), instance_to_toml(inst))?;
    fs::write(dir.join("expr.ara"), format!("{e}\n"))?;
    Ok(dir)
}
