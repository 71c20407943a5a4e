use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use battlesheep::gadgets::{verify_gadget, verify_makeup, VERIFIED_KINDS};
use battlesheep::reducer::compile_layout;
use battlesheep::service::{self, HINT_NODES, HINT_SECONDS};
use battlesheep::{
    fixtures, parse_board, serialize_board, solve_with, Direction, HexCoord, Move, Outcome, Player, Position,
    SolveConfig, SolveError,
};

const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_COMPILE: u8 = 4;
const EXIT_VERIFY: u8 = 5;
const EXIT_IO: u8 = 6;

#[derive(Parser)]
#[command(name = "battlesheep", version, about = "Battle Sheep engine, solver and reduction compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List legal moves, one per line.
    Moves { board: PathBuf },
    /// Decide the position for the player to move.
    Solve {
        board: PathBuf,
        #[arg(long, default_value_t = SolveConfig::DEFAULT_NODES)]
        nodes: u64,
        #[arg(long, default_value_t = SolveConfig::DEFAULT_SECONDS)]
        seconds: u64,
    },
    /// Compile a circuit file to a board file.
    Compile {
        circuit: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run every gadget truth table and the makeup checks.
    VerifyGadgets,
    /// Play in the terminal.
    Play {
        board: PathBuf,
        /// The solver answers for the player not to move at the start.
        #[arg(long)]
        vs_solver: bool,
    },
    /// Serve the HTTP-JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        board: Option<PathBuf>,
        /// Route requests to sessions by `?session=<id>`.
        #[arg(long)]
        multi: bool,
    },
}

fn read_board(path: &Path) -> Result<Position, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_INPUT)
    })?;
    parse_board(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_INPUT)
    })
}

fn move_line(p: &Position, m: &Move) -> String {
    let to = p.destination(m).expect("legal move");
    format!("{m} -> {} {}", to.q, to.r)
}

fn cmd_moves(path: &Path) -> Result<(), ExitCode> {
    let p = read_board(path)?;
    for m in p.legal_moves() {
        println!("{}", move_line(&p, &m));
    }
    Ok(())
}

fn cmd_solve(path: &Path, nodes: u64, seconds: u64) -> Result<(), ExitCode> {
    let p = read_board(path)?;
    match solve_with(&p, &SolveConfig::with_limits(nodes, Duration::from_secs(seconds))) {
        Ok(r) => {
            match (r.outcome, r.best_move) {
                (Outcome::Win, Some(m)) => println!("WIN {m}"),
                _ => println!("LOSS"),
            }
            println!("nodes {} table {} depth {}", r.nodes_visited, r.table_entries, r.max_depth);
            println!("elapsed {:.3}s", r.elapsed.as_secs_f64());
            Ok(())
        }
        Err(SolveError::ResourceLimit { nodes, elapsed }) => {
            println!("UNKNOWN budget exceeded");
            println!("nodes {nodes}");
            println!("elapsed {:.3}s", elapsed.as_secs_f64());
            Err(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(EXIT_BUDGET))
        }
    }
}

fn cmd_compile(circuit: &Path, output: &Path) -> Result<(), ExitCode> {
    let text = std::fs::read_to_string(circuit).map_err(|e| {
        eprintln!("error: {}: {e}", circuit.display());
        ExitCode::from(EXIT_INPUT)
    })?;
    let layout = compile_layout(&text).map_err(|e| {
        eprintln!("error: {}: {e}", circuit.display());
        ExitCode::from(EXIT_COMPILE)
    })?;
    std::fs::write(output, serialize_board(&layout.board)).map_err(|e| {
        eprintln!("error: {}: {e}", output.display());
        ExitCode::from(EXIT_IO)
    })?;
    let s = layout.stats;
    println!("a={} b={} c={} d={} e={} k={}", s.a, s.b, s.c, s.d, s.e, s.k);
    println!("placements {} cells {}", layout.placements.len(), layout.board.cells().len());
    Ok(())
}

fn cmd_verify() -> Result<(), ExitCode> {
    let mut ok = true;
    println!(
        "{:<16} {:<10} {:<14} {:<14} {:>6} {:>6}  result",
        "gadget", "inputs", "outputs", "expected", "budget", "used"
    );
    let bits = |v: &[bool]| -> String {
        if v.is_empty() {
            "-".into()
        } else {
            v.iter().map(|&b| if b { '1' } else { '0' }).collect()
        }
    };
    for kind in VERIFIED_KINDS {
        match verify_gadget(kind) {
            Ok(rows) => {
                for b in rows {
                    ok &= b.verified;
                    println!(
                        "{:<16} {:<10} {:<14} {:<14} {:>6} {:>6}  {}",
                        kind.name(),
                        b.pattern_label(),
                        bits(&b.output_activatable),
                        bits(&b.expected),
                        kind.blue_budget(),
                        b.blue_moves_used,
                        if b.verified { "PASS" } else { "FAIL" }
                    );
                }
            }
            Err(e) => {
                ok = false;
                println!("{:<16} error: {e}", kind.name());
            }
        }
    }
    for k in 1..=5 {
        let pass = verify_makeup(k);
        ok &= pass;
        println!(
            "{:<16} {:<10} {:<14} {:<14} {:>6} {:>6}  {}",
            format!("Makeup({k})"),
            "-",
            "-",
            "-",
            k,
            k,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if ok {
        Ok(())
    } else {
        Err(ExitCode::from(EXIT_VERIFY))
    }
}

fn parse_move(line: &str, moves: &[Move]) -> Option<Move> {
    let nums: Vec<i64> = line.split_whitespace().map(str::parse).collect::<Result<_, _>>().ok()?;
    match nums[..] {
        [i] => moves.get(usize::try_from(i).ok()?).copied(),
        [q, r, d, n] => {
            let dir = Direction::from_index(u8::try_from(d).ok()?)?;
            Some(Move::new(HexCoord::new(q as i32, r as i32), dir, u32::try_from(n).ok()?))
        }
        _ => None,
    }
}

fn solver_reply(p: &Position) -> Option<Move> {
    let config = SolveConfig::with_limits(HINT_NODES, Duration::from_secs(HINT_SECONDS));
    match solve_with(p, &config) {
        Ok(r) => {
            let verdict = if r.outcome == Outcome::Win { "winning" } else { "losing" };
            println!("solver: position is {verdict}");
            r.best_move.or_else(|| p.legal_moves().first().copied())
        }
        Err(_) => {
            println!("solver: budget exceeded, playing the first legal move");
            p.legal_moves().first().copied()
        }
    }
}

fn cmd_play(path: &Path, vs_solver: bool) -> Result<(), ExitCode> {
    let mut history = vec![read_board(path)?];
    let solver_side: Option<Player> = vs_solver.then(|| history[0].to_move().other());
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        let p = history.last().expect("non-empty history").clone();
        let moves = p.legal_moves();
        print!("{}", serialize_board(&p));
        if moves.is_empty() {
            println!("{} cannot move and loses.", if p.to_move() == Player::Blue { "Blue" } else { "Red" });
            return Ok(());
        }
        if solver_side == Some(p.to_move()) {
            let m = solver_reply(&p).expect("a legal move exists");
            println!("solver plays {}", move_line(&p, &m));
            history.push(p.apply_move(&m).expect("legal"));
            continue;
        }
        for (i, m) in moves.iter().enumerate() {
            println!("  [{i}] {}", move_line(&p, m));
        }
        print!("move (index, `q r dir count`, u = undo, q = quit)> ");
        io::stdout().flush().ok();
        let Some(Ok(line)) = lines.next() else { return Ok(()) };
        match line.trim() {
            "q" => return Ok(()),
            "u" => {
                let back = if solver_side.is_some() { 2 } else { 1 };
                if history.len() > back {
                    history.truncate(history.len() - back);
                }
            }
            input => match parse_move(input, &moves).map(|m| p.apply_move(&m)) {
                Some(Ok(next)) => history.push(next),
                Some(Err(e)) => println!("illegal: {e}"),
                None => println!("could not read a move"),
            },
        }
    }
}

fn cmd_serve(port: u16, board: Option<&Path>, multi: bool) -> Result<(), ExitCode> {
    let initial = match board {
        Some(path) => read_board(path)?,
        None => fixtures::fixture("fig2"),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_IO)
    })?;
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    runtime.block_on(service::serve(addr, initial, multi)).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_IO)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Moves { board } => cmd_moves(board),
        Command::Solve { board, nodes, seconds } => cmd_solve(board, *nodes, *seconds),
        Command::Compile { circuit, output } => cmd_compile(circuit, output),
        Command::VerifyGadgets => cmd_verify(),
        Command::Play { board, vs_solver } => cmd_play(board, *vs_solver),
        Command::Serve { port, board, multi } => cmd_serve(*port, board.as_deref(), *multi),
    };
    result.err().unwrap_or(ExitCode::SUCCESS)
}
