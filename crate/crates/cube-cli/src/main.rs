//! Batch runner and interactive REPL over the engine.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, ValueEnum};

use cube_core::engine::{eval, EvalConfig, FreeVarPolicy, Program};
use cube_core::outcome::{Final, Outcome, Step};
use cube_core::setting::Setting;
use cube_core::stdlib::load_stdlib;
use cube_core::syntax::{
    parse_program, parse_prolog, parse_query, print_rational, print_term_named, VarTable,
};
use cube_core::term::Term;

#[derive(Parser)]
#[command(name = "cube", about = "A structured, cut-free Prolog", version)]
struct Args {
    /// Program files to load (`.pl` loads into the clause database)
    files: Vec<PathBuf>,

    /// Goal to run in batch mode; without it an interactive session starts
    #[arg(short, long)]
    query: Option<String>,

    /// Evaluation step budget
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,

    /// What an unbound variable does when called as a goal
    #[arg(long, value_enum, default_value_t = FreeVarArg::Fail)]
    freevar: FreeVarArg,

    /// Skip loading the standard prelude and the Prolog interpreter
    #[arg(long)]
    no_prelude: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FreeVarArg {
    Fail,
    Error,
}

struct Session {
    program: Program,
    config: EvalConfig,
    loaded: Vec<PathBuf>,
}

impl Session {
    fn new(args: &Args) -> Result<Session, String> {
        let mut program = Program::new();
        if !args.no_prelude {
            load_stdlib(&mut program).map_err(|e| e.to_string())?;
        }
        Ok(Session {
            program,
            config: EvalConfig {
                fuel: args.fuel,
                free_var_policy: match args.freevar {
                    FreeVarArg::Fail => FreeVarPolicy::FailMode,
                    FreeVarArg::Error => FreeVarPolicy::ErrorMode,
                },
            },
            loaded: Vec::new(),
        })
    }

    /// Loads a file into a copy of the program first, so a failing file
    /// leaves the session untouched.
    fn load_file(&mut self, path: &Path, as_prolog: bool) -> Result<(), String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
        let mut next = self.program.clone();
        let prolog = as_prolog || path.extension().and_then(|e| e.to_str()) == Some("pl");
        if prolog {
            let clauses =
                parse_prolog(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
            next.load_prolog(&clauses)
                .map_err(|e| format!("{}: {}", path.display(), e))?;
        } else {
            let procs =
                parse_program(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
            next.load(&procs)
                .map_err(|e| format!("{}: {}", path.display(), e))?;
        }
        self.program = next;
        self.loaded.push(path.to_path_buf());
        Ok(())
    }

    fn run(&self, goal: &Term) -> Outcome {
        eval(goal, &Setting::new(0), &Arc::new(self.program.clone()), &self.config)
    }
}

fn names_of(vt: &VarTable) -> HashMap<cube_core::term::VarId, String> {
    vt.names.iter().cloned().collect()
}

fn solution_lines(s: &Setting, vt: &VarTable) -> Vec<String> {
    let names = names_of(vt);
    let lines: Vec<String> = vt
        .names
        .iter()
        .map(|(v, n)| format!("{} = {}", n, print_term_named(&Term::Var(*v), s, &names)))
        .collect();
    if lines.is_empty() {
        vec!["true".to_string()]
    } else {
        lines
    }
}

fn run_batch(session: &Session, query: &str) -> u8 {
    let (goal, vt) = match parse_query(query) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {}", e);
            return 4;
        }
    };
    let mut out = session.run(&goal);
    let mut found = false;
    loop {
        match out.force() {
            Step::Sol(s, rest) => {
                for line in solution_lines(&s, &vt) {
                    println!("{}", line);
                }
                found = true;
                out = rest;
            }
            Step::End(Final::Fail) => return if found { 0 } else { 1 },
            Step::End(Final::Exception(payload)) => {
                eprintln!("uncaught exception: {}", print_rational(&payload, None));
                return 2;
            }
            Step::End(Final::BudgetExhausted) => {
                eprintln!("budget exhausted");
                return 3;
            }
        }
    }
}

fn repl(session: &mut Session) {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        print!("?- ");
        io::stdout().flush().ok();
        let line = match lines.next() {
            Some(Ok(l)) => l,
            _ => return,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(cmd) = line.strip_prefix(':') {
            if !run_command(session, cmd) {
                return;
            }
            continue;
        }
        let text = line
            .strip_prefix("?-")
            .unwrap_or(line)
            .trim()
            .trim_end_matches('.')
            .trim();
        let (goal, vt) = match parse_query(text) {
            Ok(x) => x,
            Err(e) => {
                println!("error: {}", e);
                continue;
            }
        };
        let mut out = session.run(&goal);
        loop {
            match out.force() {
                Step::Sol(s, rest) => {
                    print!("{}", solution_lines(&s, &vt).join(",\n"));
                    io::stdout().flush().ok();
                    let more = match lines.next() {
                        Some(Ok(l)) => l.trim() == ";",
                        _ => false,
                    };
                    if !more {
                        println!();
                        break;
                    }
                    println!(" ;");
                    out = rest;
                }
                Step::End(Final::Fail) => {
                    println!("no");
                    break;
                }
                Step::End(Final::Exception(payload)) => {
                    println!("uncaught exception: {}", print_rational(&payload, None));
                    break;
                }
                Step::End(Final::BudgetExhausted) => {
                    println!("budget exhausted");
                    break;
                }
            }
        }
    }
}

/// Returns false when the session should end.
fn run_command(session: &mut Session, cmd: &str) -> bool {
    let parts: Vec<&str> = cmd.split_whitespace().collect();
    match parts.as_slice() {
        ["quit"] => return false,
        ["load", f] => {
            if let Err(e) = session.load_file(Path::new(f), false) {
                println!("error: {}", e);
            }
        }
        ["loadpl", f] => {
            if let Err(e) = session.load_file(Path::new(f), true) {
                println!("error: {}", e);
            }
        }
        ["set", "fuel", n] => match n.parse() {
            Ok(n) => session.config.fuel = n,
            Err(_) => println!("error: fuel must be a number"),
        },
        ["set", "freevar", "fail"] => session.config.free_var_policy = FreeVarPolicy::FailMode,
        ["set", "freevar", "error"] => session.config.free_var_policy = FreeVarPolicy::ErrorMode,
        _ => println!("commands: :load <file>  :loadpl <file>  :set fuel <n>  :set freevar fail|error  :quit"),
    }
    true
}

fn main() -> ExitCode {
    // deep derivations recurse deeply; run everything on a roomy stack
    let code = std::thread::Builder::new()
        .stack_size(512 * 1024 * 1024)
        .spawn(real_main)
        .unwrap()
        .join()
        .unwrap();
    ExitCode::from(code)
}

fn real_main() -> u8 {
    let args = Args::parse();
    let mut session = match Session::new(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e);
            return 4;
        }
    };
    for f in &args.files {
        if let Err(e) = session.load_file(f, false) {
            eprintln!("error: {}", e);
            return 4;
        }
    }
    match &args.query {
        Some(q) => run_batch(&session, q),
        None => {
            repl(&mut session);
            0
        }
    }
}
