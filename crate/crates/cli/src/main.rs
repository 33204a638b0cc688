use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use pellrank::quadform::{self, NegPell, SolveOutcome};
use pellrank::scan::{self, ScanOptions};
use pellrank::{model, redei, Error};
use serde_json::{json, Value};

mod selftest;

const DEFAULT_SEED: u64 = 20_240_601;
/// Relative `--out` paths are resolved against this directory when set.
const OUT_DIR_ENV: &str = "PELLRANK_OUT_DIR";

#[derive(Parser)]
#[command(name = "pellrank", version, about = "Generalized Pell equations and 2-class groups")]
struct Cli {
    /// Print one JSON object instead of the human layout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide N_d(x, y) = l over Z and print a small witness.
    Solve {
        #[arg(long)]
        d: u64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
        /// Skip witnesses whose size estimate exceeds this many digits.
        #[arg(long, default_value_t = quadform::DEFAULT_MAX_DIGITS)]
        max_digits: usize,
    },
    /// Decide x² − d y² = −1.
    Negpell {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = quadform::DEFAULT_MAX_DIGITS)]
        max_digits: usize,
    },
    /// 2-power structure of the narrow and ordinary class groups.
    Classgroup {
        #[arg(long, allow_negative_numbers = true)]
        delta: i64,
    },
    /// Rédei matrix and 4-rank of Q(√d).
    RedeiMatrix {
        #[arg(long)]
        d: u64,
    },
    /// The Rédei symbol [a, b, c].
    RedeiSymbol {
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, allow_negative_numbers = true)]
        b: i64,
        #[arg(long, allow_negative_numbers = true)]
        c: i64,
    },
    /// Model constants with tail bounds.
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Scan the family of l up to N.
    Scan {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
        /// Cross-check against form class groups (d ≤ 20000).
        #[arg(long)]
        classgroup: bool,
        /// JSON-lines output; a checkpoint and summary are written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from the checkpoint next to `--out`.
        #[arg(long, requires = "out")]
        resume: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Recorded in the output; scans are deterministic.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = scan::DEFAULT_WITNESS_DIGITS)]
        max_digits: usize,
    },
    /// Run the exact-identity suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Quick,
    Full,
}

/// Exit statuses.
const OK: u8 = 0;
const NO: u8 = 1;
const USAGE: u8 = 2;
const INTERNAL: u8 = 3;

fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) if x.unsigned_abs() <= 1 << 53 => json!(x),
        _ => json!(v.to_string()),
    }
}

fn pair_json(w: &(BigInt, BigInt)) -> Value {
    json!([int_json(&w.0), int_json(&w.1)])
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) | Error::CorruptCheckpoint(_) => INTERNAL,
        _ => USAGE,
    }
}

fn run(cli: Cli) -> Result<(Value, u8), Error> {
    match cli.cmd {
        Cmd::Solve { d, l, max_digits } => {
            let out = quadform::solve_generalized_capped(d, l, Some(max_digits))?;
            let mut v = json!({ "status": out.status() });
            match &out {
                SolveOutcome::NotInFamily(r) | SolveOutcome::QInsoluble(r) => {
                    v["reason"] = json!(r.as_str());
                }
                SolveOutcome::Soluble(w) => {
                    v["witness"] = w.as_ref().map_or(Value::Null, pair_json);
                }
                SolveOutcome::Insoluble => {}
            }
            Ok((v, if out.is_soluble() { OK } else { NO }))
        }
        Cmd::Negpell { d, max_digits } => {
            let out = quadform::negative_pell_capped(d, Some(max_digits))?;
            Ok(match out {
                NegPell::Yes(w) => (
                    json!({
                        "d": d,
                        "soluble": true,
                        "witness": w.as_ref().map_or(Value::Null, pair_json),
                    }),
                    OK,
                ),
                NegPell::No => (json!({ "d": d, "soluble": false }), NO),
            })
        }
        Cmd::Classgroup { delta } => {
            let cg = quadform::narrow_class_group(delta)?;
            Ok((serde_json::to_value(cg).expect("class group data serializes"), OK))
        }
        Cmd::RedeiMatrix { d } => {
            let p = redei::redei_matrix(d)?;
            let rows: Vec<Vec<u8>> = (0..p.matrix.rows())
                .map(|i| {
                    (0..p.matrix.cols())
                        .map(|j| p.matrix.get(i, j).map(u8::from))
                        .collect::<Result<_, _>>()
                })
                .collect::<Result<_, _>>()?;
            let chars: Vec<String> = p.field.components.iter().map(|c| c.name()).collect();
            Ok((
                json!({
                    "d": d,
                    "delta": p.field.delta,
                    "primes": p.field.ramified_primes(),
                    "characters": chars,
                    "matrix": rows,
                    "rk4": p.rk4,
                }),
                OK,
            ))
        }
        Cmd::RedeiSymbol { a, b, c } => {
            let v = redei::redei_symbol(a, b, c)?;
            Ok((json!({ "a": a, "b": b, "c": c, "value": v }), OK))
        }
        Cmd::Constants { tol } => {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::InvalidArgument(format!("tolerance {tol} must lie in (0, 1)")));
            }
            let rows = model::constants_table(tol)?;
            let mut v = serde_json::Map::new();
            for r in &rows {
                v.insert(r.name.clone(), json!(r.value));
            }
            v.insert("table".into(), serde_json::to_value(&rows).expect("rows serialize"));
            Ok((Value::Object(v), OK))
        }
        Cmd::Scan {
            n,
            l,
            classgroup,
            out,
            resume,
            workers,
            seed,
            max_digits,
        } => {
            let out = out.map(|p| match std::env::var_os(OUT_DIR_ENV) {
                Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
                _ => p,
            });
            let opts = ScanOptions {
                with_classgroup: classgroup,
                out: out.clone(),
                resume,
                workers,
                max_witness_digits: max_digits,
                keep_records: false,
                ..Default::default()
            };
            let res = scan::scan(n, l, &opts)?;
            let s = &res.summary;
            let clean = s.q_check_failures.is_empty() && s.rk4_zero_insoluble.is_empty();
            Ok((
                json!({
                    "n": n,
                    "l": l,
                    "seed": seed,
                    "out": out.map(|p| p.display().to_string()),
                    "chain": res.chain,
                    "summary": s.to_json(),
                    "summary_sha256": res.summary_sha256,
                }),
                if clean { OK } else { INTERNAL },
            ))
        }
        Cmd::Selftest { level, seed } => {
            let checks = selftest::run(matches!(level, Level::Full), seed);
            let pass = checks.iter().all(|c| c.pass);
            Ok((
                json!({ "pass": pass, "checks": checks }),
                if pass { OK } else { INTERNAL },
            ))
        }
    }
}

fn human(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        human(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for e in a {
                            out.push_str(&format!("{pad}  -\n"));
                            human(e, indent + 2, out);
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {x}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let json_mode = cli.json;
    match run(cli) {
        Ok((v, code)) => {
            if json_mode {
                println!("{v}");
            } else {
                let mut s = String::new();
                human(&v, 0, &mut s);
                print!("{s}");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            let code = error_code(&e);
            if json_mode {
                println!("{}", json!({ "error": e.to_string(), "exit": code }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
