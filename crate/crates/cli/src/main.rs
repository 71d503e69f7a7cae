//! Command-line frontend: classification runs, stored-code verification,
//! canonical forms, equivalence and linearity queries, bound values.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage / parse / I/O error.

use clap::{Args, Parser, Subcommand};
use mdsclass::appendix8;
use mdsclass::classify::{classify_step, ClassifyOptions, Registry};
use mdsclass::codes::{hamming_bound, singleton_bound};
use mdsclass::equiv::{are_equivalent, canonicalize};
use mdsclass::latin::{is_linear_hypercube, is_linear_tuple, pair_from_code, Hypercube};
use mdsclass::{Code, Field};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mdsclass", version, about = "MDS code classification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify codes length by length, printing class counts, group
    /// orders, and the double-count consistency rows.
    Classify(ClassifyArgs),
    /// Rebuild the stored perfect codes over GF(8) and run every check.
    VerifyAppendix,
    /// Canonical form and automorphism group order of a code file.
    Canon {
        file: PathBuf,
        /// Write the canonical code here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automorphism group order and generators of a code file.
    Aut {
        file: PathBuf,
        /// Write the generator maps here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide equivalence of two code files.
    Equiv {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Write a map carrying the first code to the second here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linearity of a hypercube file, or of the hypercube pair derived
    /// from a code file.
    Linearity {
        file: PathBuf,
        /// Write the witness permutations here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singleton and Hamming bound values for (n, d, q).
    Bounds { n: usize, d: usize, q: usize },
}

#[derive(Args)]
struct ClassifyArgs {
    /// Alphabet size, 2..=8.
    #[arg(long)]
    q: usize,
    /// Stop after classifying this length.
    #[arg(long)]
    to: Option<usize>,
    /// Expected top length of the loaded registry, when resuming.
    #[arg(long)]
    from: Option<usize>,
    /// Resume from a saved registry directory.
    #[arg(long)]
    registry_dir: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.  Never affects the output bytes.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Allow the heavy alphabets q = 7, 8.
    #[arg(long)]
    stretch: bool,
    /// Save the finished registry to this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Cmd::Classify(args) => cmd_classify(args),
        Cmd::VerifyAppendix => cmd_verify_appendix(),
        Cmd::Canon { file, out } => cmd_canon(&file, out.as_deref()),
        Cmd::Aut { file, out } => cmd_aut(&file, out.as_deref()),
        Cmd::Equiv { file_a, file_b, out } => cmd_equiv(&file_a, &file_b, out.as_deref()),
        Cmd::Linearity { file, out } => cmd_linearity(&file, out.as_deref()),
        Cmd::Bounds { n, d, q } => cmd_bounds(n, d, q),
    }
}

fn print_level(reg: &Registry, n: usize) {
    let entries = reg.classes(n).unwrap_or(&[]);
    println!("n={} classes={}", n, entries.len());
    for (idx, e) in entries.iter().enumerate() {
        println!("class {} aut={}", idx + 1, e.aut_order);
    }
    if let Some(rows) = reg.consistency_rows(n) {
        for r in rows {
            println!(
                "consistency {} {} {} {}",
                r.k + 1,
                r.n_first,
                r.n_second,
                if r.ok() { "ok" } else { "FAIL" }
            );
        }
    }
}

fn cmd_classify(args: ClassifyArgs) -> anyhow::Result<bool> {
    if args.q >= 7 && !args.stretch {
        anyhow::bail!("q = {} requires --stretch", args.q);
    }
    let mut reg = match &args.registry_dir {
        Some(dir) => {
            let reg = Registry::load_dir(dir)?;
            if reg.q() != args.q {
                anyhow::bail!("registry at {} has q = {}", dir.display(), reg.q());
            }
            reg
        }
        None => Registry::bootstrap(args.q)?,
    };
    let start = reg.max_length().expect("nonempty registry");
    if let Some(from) = args.from {
        if start != from {
            anyhow::bail!("registry tops out at length {start}, not {from}");
        }
    }
    println!("q={}", args.q);
    for n in reg.lengths() {
        print_level(&reg, n);
    }

    let opts = ClassifyOptions {
        q: args.q,
        to: args.to,
        workers: args.workers,
        stretch: args.stretch,
    };
    let mut all_ok = true;
    let step = |reg: &mut Registry, all_ok: &mut bool| -> anyhow::Result<()> {
        loop {
            let n = reg.max_length().expect("nonempty registry");
            if let Some(t) = opts.to {
                if n >= t {
                    break;
                }
            }
            if reg.classes(n).map(|e| e.is_empty()).unwrap_or(true) {
                break;
            }
            let report = classify_step(reg)?;
            print_level(reg, report.produced);
            if report.consistency.iter().any(|r| !r.ok()) {
                *all_ok = false;
                break;
            }
        }
        Ok(())
    };
    if args.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(args.workers).build()?;
        pool.install(|| step(&mut reg, &mut all_ok))?;
    } else {
        step(&mut reg, &mut all_ok)?;
    }
    if let Some(out) = &args.out {
        reg.save_dir(out)?;
    }
    Ok(all_ok)
}

fn cmd_verify_appendix() -> anyhow::Result<bool> {
    let report = appendix8::verify_suite()?;
    let line = |r: &appendix8::CodeReport, expect_linear: bool| {
        let fp = &r.fingerprint;
        let slices: Vec<String> = fp.slice_subspaces.iter().map(|c| c.to_string()).collect();
        println!(
            "code={} size={} perfect={} mds={} linear={} translated_linear={} tuple_linear={} slices_match={} rank={} kernel={} slice_subspaces={} ok={}",
            r.name,
            r.size,
            yn(r.perfect),
            yn(r.mds),
            yn(r.linear),
            yn(r.translated_linear),
            yn(r.tuple_linear),
            yn(r.slices_match_spec),
            fp.rank,
            fp.kernel,
            slices.join(","),
            yn(r.ok(expect_linear)),
        );
    };
    line(&report.hamming, true);
    for r in &report.codes {
        line(r, false);
    }
    println!("fingerprints_distinct={}", yn(report.distinct_fingerprints()));
    let ok = report.all_ok();
    println!("appendix={}", if ok { "ok" } else { "FAIL" });
    Ok(ok)
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_canon(file: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let code = Code::read_file(file)?;
    let canon = canonicalize(&code);
    println!("aut_order={}", canon.aut_order);
    match out {
        Some(path) => canon.canon.write_file(path)?,
        None => print!("{}", canon.canon.to_text()),
    }
    Ok(true)
}

fn cmd_aut(file: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let code = Code::read_file(file)?;
    let canon = canonicalize(&code);
    println!("aut_order={}", canon.aut_order);
    println!("generators={}", canon.aut_gens.len());
    if let Some(path) = out {
        let mut text = String::new();
        for g in &canon.aut_gens {
            let _ = writeln!(text, "{}", g.to_text().trim_end());
        }
        std::fs::write(path, text)?;
    }
    Ok(true)
}

fn cmd_equiv(file_a: &Path, file_b: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let a = Code::read_file(file_a)?;
    let b = Code::read_file(file_b)?;
    // are_equivalent returns a map onto its first argument.
    match are_equivalent(&b, &a) {
        Some(g) => {
            debug_assert_eq!(g.apply(&a), b);
            println!("equivalent=yes");
            if let Some(path) = out {
                std::fs::write(path, g.to_text())?;
                println!("transporter={}", path.display());
            }
        }
        None => println!("equivalent=no"),
    }
    Ok(true)
}

fn cmd_linearity(file: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(file)?;
    let header_fields = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().count())
        .unwrap_or(0);
    let mut witness = String::new();
    let linear = match header_fields {
        2 => {
            // hypercube file: header `q k`
            let h = Hypercube::from_text(&text)?;
            let field = Field::new(h.q())?;
            match is_linear_hypercube(&field, &h)? {
                Some(w) => {
                    let _ = writeln!(witness, "single {} {}", h.q(), h.dim());
                    for a in &w.alphas {
                        let _ = writeln!(witness, "{}", join(a));
                    }
                    true
                }
                None => false,
            }
        }
        3 => {
            // code file: header `q n M`; test the derived hypercube pair
            let code = Code::from_text(&text)?;
            let field = Field::new(code.q())?;
            let (f, g) = pair_from_code(&code)?;
            let k = f.dim();
            match is_linear_tuple(&field, &[f, g])? {
                Some(w) => {
                    let _ = writeln!(witness, "tuple {} {} 2", code.q(), k);
                    for b in &w.betas {
                        let _ = writeln!(witness, "{}", join(b));
                    }
                    for a in &w.alphas {
                        let _ = writeln!(witness, "{}", join(a));
                    }
                    for c in &w.coeffs {
                        let _ = writeln!(witness, "{}", join(c));
                    }
                    true
                }
                None => false,
            }
        }
        _ => anyhow::bail!("unrecognized header in {}", file.display()),
    };
    println!("linear={}", yn(linear));
    if linear {
        if let Some(path) = out {
            std::fs::write(path, witness)?;
            println!("witness={}", path.display());
        }
    }
    Ok(true)
}

fn join(v: &[u8]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_bounds(n: usize, d: usize, q: usize) -> anyhow::Result<bool> {
    println!("singleton={}", singleton_bound(n, d, q)?);
    println!("hamming={}", hamming_bound(n, d, q)?);
    Ok(true)
}
