use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use galereg::Field;
use galereg_cli::{
    analyze, classify, curve, exit_code, parse_exponents, parse_field, parse_partition, reduce,
    search, to_json, LatticeSource, Mode, Pretty, SearchKind,
};
use serde::Serialize;

/// Degree, regularity and maximal-regularity classification of codimension-2
/// lattice ideals.
#[derive(Parser)]
#[command(name = "galereg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LatticeArgs {
    /// Lattice JSON document: {"n", "basis"}, {"A"} or {"gale"}.
    json: Option<String>,
    /// Lattice as the integer kernel of this matrix, e.g. [[1,1,1,1],[0,1,2,3]].
    #[arg(long = "A", value_name = "MATRIX")]
    a: Option<String>,
    /// Two basis columns, e.g. [[1,-2,1,0],[0,1,-2,1]].
    #[arg(long)]
    basis: Option<String>,
    /// Gale vectors (rows of a basis matrix), e.g. [[1,1],[-1,1],[0,-2]].
    #[arg(long)]
    gale: Option<String>,
    /// File holding a lattice JSON document.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl LatticeArgs {
    fn source(&self) -> LatticeSource {
        LatticeSource {
            inline: self.json.clone(),
            a: self.a.clone(),
            basis: self.basis.clone(),
            gale: self.gale.clone(),
            file: self.file.clone(),
        }
    }
}

#[derive(Args)]
struct Output {
    /// Human-readable text instead of JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: predicates, degree, regularity, Betti table, quadrangles, verdict.
    Analyze {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Skip the homology oracle where quadrangle shortcuts suffice.
        #[arg(long, conflicts_with = "certify")]
        fast: bool,
        /// Cross-check every shortcut against the oracle.
        #[arg(long)]
        certify: bool,
        /// Coefficient field for homology: rational or prime:<p>.
        #[arg(long, default_value = "rational")]
        field: String,
        #[command(flatten)]
        out: Output,
    },
    /// Maximal-regularity verdict for a saturated nondegenerate lattice.
    Classify {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Maximal-regularity verdict for the monomial curve with these exponents.
    Curve {
        /// Comma-separated exponents starting at 0, e.g. 0,1,4,5.
        exponents: String,
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value = "rational")]
        field: String,
        #[command(flatten)]
        out: Output,
    },
    /// Reduction data of a non-Cohen-Macaulay lattice and their degree/regularity chains.
    Reduce {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// One partition of the normalized diagram's indices, e.g. [[0],[1,2],[3],[4]].
        #[arg(long)]
        partition: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Finite searches and the classifier sweep.
    Search {
        kind: Kind,
        /// Compare with the committed golden file; exit 3 on any difference.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        max_coord: Option<i64>,
        #[arg(long)]
        max_n: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Table1,
    CmNonci,
    Sweep,
}

fn emit<T: Serialize + Pretty>(v: &T, out: &Output) -> Result<()> {
    let text = if out.pretty {
        v.pretty()
    } else {
        to_json(v)? + "\n"
    };
    print!("{text}");
    Ok(())
}

fn field(s: &str) -> Result<Field> {
    parse_field(s).context("invalid --field")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            lattice,
            fast,
            certify,
            field: f,
            out,
        } => {
            let mode = if fast {
                Mode::Fast
            } else if certify {
                Mode::Certify
            } else {
                Mode::Full
            };
            let f = field(&f)?;
            emit(&analyze(&lattice.source().load()?, mode, f)?, &out)
        }
        Command::Classify {
            lattice,
            certify,
            out,
        } => emit(&classify(&lattice.source().load()?, certify)?, &out),
        Command::Curve {
            exponents,
            certify,
            field: f,
            out,
        } => {
            let f = field(&f)?;
            emit(&curve(parse_exponents(&exponents)?, certify, f)?, &out)
        }
        Command::Reduce {
            lattice,
            partition,
            out,
        } => {
            let p = partition.as_deref().map(parse_partition).transpose()?;
            emit(&reduce(&lattice.source().load()?, p)?, &out)
        }
        Command::Search {
            kind,
            check,
            max_coord,
            max_n,
            out,
        } => {
            let kind = match kind {
                Kind::Table1 => SearchKind::Table1,
                Kind::CmNonci => SearchKind::CmNonci,
                Kind::Sweep => SearchKind::Sweep,
            };
            let (output, err) = search(kind, max_coord, max_n, check);
            emit(&output, &out)?;
            err.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("GALEREG_THREADS")
        .ok()
        .and_then(|t| t.parse::<usize>().ok())
    {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
