use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use battlesheep_ffi::*;

const FIG2: &str = include_str!("../../core/fixtures/fig2.board");

fn parse(text: &str) -> *mut BsPosition {
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { bs_position_parse(c.as_ptr(), &mut p) }, BsStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bs_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn fig2_moves_through_the_abi() {
    let p = parse(FIG2);
    let mut n = 0usize;
    unsafe {
        assert_eq!(bs_position_move_count(p, &mut n), BsStatus::Ok);
        assert_eq!(n, 12);
        assert_eq!(bs_position_to_move(p), 0);
        let mut m = BsMove::default();
        assert_eq!(bs_position_move(p, 0, &mut m), BsStatus::Ok);
        assert_eq!((m.q, m.r), (-1, 1));
        let mut next = ptr::null_mut();
        assert_eq!(bs_position_apply(p, &m, &mut next), BsStatus::Ok);
        assert_eq!(bs_position_to_move(next), 1);
        assert_eq!(bs_position_move(p, 12, &mut m), BsStatus::OutOfRange);
        assert!(last_error().contains("12"));
        bs_position_free(next);
        bs_position_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("cell 0 0 X 1\n").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(bs_position_parse(bad.as_ptr(), &mut p), BsStatus::Parse);
        assert!(p.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(bs_position_parse(ptr::null(), &mut p), BsStatus::NullPointer);
        let board = parse(FIG2);
        let illegal = BsMove { q: 9, r: 9, dir: 0, count: 1 };
        assert_eq!(bs_position_apply(board, &illegal, &mut p), BsStatus::IllegalMove);
        let bad_dir = BsMove { q: -1, r: 1, dir: 6, count: 1 };
        assert_eq!(bs_position_apply(board, &bad_dir, &mut p), BsStatus::IllegalMove);
        // A successful call clears the message.
        let mut n = 0;
        assert_eq!(bs_position_move_count(board, &mut n), BsStatus::Ok);
        assert!(last_error().is_empty());
        bs_position_free(board);
        bs_position_free(ptr::null_mut());
        assert_eq!(bs_position_to_move(ptr::null()), -1);
    }
}

#[test]
fn serialize_round_trips() {
    let p = parse(FIG2);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bs_position_serialize(p, &mut s), BsStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        bs_string_free(s);
        let q = parse(&text);
        let mut s2 = ptr::null_mut();
        bs_position_serialize(q, &mut s2);
        assert_eq!(CStr::from_ptr(s2).to_str().unwrap(), text);
        bs_string_free(s2);
        bs_position_free(p);
        bs_position_free(q);
    }
}

#[test]
fn compile_and_solve() {
    let win = CString::new("var x\ngoal g x").unwrap();
    let lose = CString::new("var x\nvar y\nand a x y\ngoal g a").unwrap();
    let broken = CString::new("var x\nand a x x").unwrap();
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(bs_compile(win.as_ptr(), &mut b), BsStatus::Ok);
        let mut r = BsSolveResult::default();
        assert_eq!(bs_solve(b, 0, 0, &mut r), BsStatus::Ok);
        assert_eq!(r.win, 1);
        bs_position_free(b);

        assert_eq!(bs_compile(lose.as_ptr(), &mut b), BsStatus::Ok);
        assert_eq!(bs_solve(b, 10, 0, &mut r), BsStatus::Budget);
        assert_eq!(bs_solve(b, 0, 0, &mut r), BsStatus::Ok);
        assert_eq!(r.win, 0);
        bs_position_free(b);

        assert_eq!(bs_compile(broken.as_ptr(), &mut b), BsStatus::Compile);
        assert!(last_error().contains("x.out"));
    }
}

fn target_dir() -> PathBuf {
    // tests/abi-<hash> lives in <target>/<profile>/deps.
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let lib = target_dir().join("libbattlesheep_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join(format!("bs_smoke_{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).arg(dir.join("../core/fixtures/fig2.board")).output().unwrap();
    std::fs::remove_file(&out).ok();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "moves 12 blue");
}
