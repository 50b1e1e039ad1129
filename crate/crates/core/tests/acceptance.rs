//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. The process-sampling check takes about a minute.

mod common;

use std::cell::Cell;
use std::collections::VecDeque;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode, Stdio};
use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use mintej::fms::compare_files;
use mintej::minilang::parse_program;
use mintej::seqbuffer::{BufferError, SequentialBuffer};
use mintej::shell::{bench_sample, Mode};

use common::{allowed, corpus, find_block, julia_shape, plain_run, replay_in, stepped_run, text_lines};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const AFTER_READ: &str = "1:\n2:global x = 0\n3:while x <= 5";

const AFTER_DELETE: &str = "\
1: global x = 0
2: while x <= 5
3:     global x = x + 1
4:     println(\"The number is:\",x)
5: end";

const AFTER_COPY: &str = "\
1: global x = 0
2: while x <= 5
3:     global x = x + 1
4:     println(\"The number is:\",x)
5: end
6: while x <= 5
7:     global x = x + 1
8:     println(\"The number is:\",x)
9: end";

const AFTER_BLANK: &str = "\
1: global x = 0
2: while x <= 5
3:     global x = x + 1
4:
5:     println(\"The number is:\",x)
6: end
7: while x <= 5
8:     global x = x + 1
9:     println(\"The number is:\",x)
10: end";

const AFTER_COMMENT: &str = "\
1: global x = 0
2: while x <= 5
3:     global x = x + 1
4:
5:     println(\"The number is:\",x)
6: end
7: #while x <= 5
8: #     global x = x + 1
9: #     println(\"The number is:\",x)
10: #end";

const AFTER_UNCOMMENT: &str = AFTER_BLANK;

const EDITOR_SCRIPT: &str = "edm\n\nonfile\nmyfirstcode.jl\nw\n\nglobal x = 0\nwhile x <= 5\n    global x = x + 1\n    println(\"The number is:\",x)\nend\ns\n\
rd_lines\n1,0,3\nd\n1\ncp\n2:5\n6\nbs\n4\ncm\n7:10\nuncm\n7:10\nback\nexit\n";

fn editor_replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = replay_in(dir.path(), EDITOR_SCRIPT);
    let elapsed = start.elapsed();
    let steps = [
        ("rd_lines", AFTER_READ),
        ("d", AFTER_DELETE),
        ("cp", AFTER_COPY),
        ("bs", AFTER_BLANK),
        ("cm", AFTER_COMMENT),
        ("uncm (re-read)", AFTER_COMMENT),
        ("uncm", AFTER_UNCOMMENT),
    ];
    let mut at = 0;
    for (what, listing) in steps {
        let want = text_lines(listing);
        let i = find_block(&r.transcript, &want, at).ok_or_else(|| format!("{what}: listing not found after line {at}"))?;
        at = i + want.len();
    }
    let saved = fs::read_to_string(dir.path().join("myfirstcode.jl")).map_err(|e| e.to_string())?;
    let want: Vec<&str> = text_lines(AFTER_UNCOMMENT)
        .into_iter()
        .map(|l| l.split_once(':').unwrap().1.strip_prefix(' ').unwrap_or(""))
        .collect();
    let got: Vec<&str> = saved.lines().collect();
    ensure(got == want, || format!("saved file differs: {got:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("7 listings and saved file match, {} ms", elapsed.as_millis()))
}

#[derive(Debug, Clone)]
enum BufOp {
    Write(String),
    Read,
}

fn buffer_properties() -> Outcome {
    const CASES: u32 = 2000;
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let ops = prop::collection::vec(prop_oneof!["[a-z]{0,3}".prop_map(BufOp::Write), Just(BufOp::Read)], 0..=50);
    let full_hits = Cell::new(0u32);
    let empty_hits = Cell::new(0u32);
    let result = runner.run(&(1usize..10, ops), |(capacity, ops)| {
        let mut buf = SequentialBuffer::new(capacity).unwrap();
        let mut model = VecDeque::new();
        let mut written = 0;
        for op in ops {
            match op {
                BufOp::Write(d) => match buf.write(d.clone()) {
                    Ok(()) if written < capacity => {
                        written += 1;
                        model.push_back(d);
                    }
                    Err(BufferError::Full { .. }) if written == capacity => full_hits.set(full_hits.get() + 1),
                    other => return Err(TestCaseError::fail(format!("write gave {other:?} with {written}/{capacity}"))),
                },
                BufOp::Read => match (buf.read(), model.pop_front()) {
                    (Ok(a), Some(b)) if a == b => {}
                    (Err(BufferError::Empty), None) => empty_hits.set(empty_hits.get() + 1),
                    other => return Err(TestCaseError::fail(format!("read mismatch {other:?}"))),
                },
            }
            if !(buf.head() <= buf.tail() && buf.tail() <= buf.capacity()) {
                return Err(TestCaseError::fail("pointer order violated"));
            }
            if buf.len() != buf.tail() - buf.head() || buf.len() != model.len() {
                return Err(TestCaseError::fail("occupancy mismatch"));
            }
        }
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok(format!(
        "{CASES} cases, {} full-write and {} empty-read rejections, 0 violations",
        full_hits.get(),
        empty_hits.get()
    ))
}

fn parser_oracle() -> Outcome {
    let fixtures = corpus();
    ensure(fixtures.len() >= 30, || format!("only {} snippets", fixtures.len()))?;
    for f in &fixtures {
        let ast = parse_program(&f.source, "fixture.jl").map_err(|e| format!("{}: {e}", f.name))?;
        let got = julia_shape(&ast);
        ensure(got == f.expected, || format!("{}: got {got}", f.name))?;
    }
    Ok(format!("{} snippets match", fixtures.len()))
}

const MYFIRSTCODE: &str = "global x = 0\nwhile x <= 5\n    global x = x + 1\n    println(\"The number is:\",x)\nend\n\n";

fn execution() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fs::write(dir.path().join("myfirstcode.jl"), MYFIRSTCODE).map_err(|e| e.to_string())?;
    fs::write(dir.path().join("test_cmp_2.jl"), "\nprintln(\"hello Julia Programming)\n").map_err(|e| e.to_string())?;
    let r = replay_in(dir.path(), "exe\ne\nmyfirstcode.jl\ne\ntest_cmp_2.jl\nback\nexit\n");
    let t = &r.transcript;
    let i = find_block(t, &["myfirstcode.jl", ""], 0).ok_or("no run of myfirstcode.jl")? + 2;
    let end = (i..t.len()).find(|&j| t[j].starts_with("exe>>")).ok_or("no prompt after run")?;
    let want: Vec<String> = (1..=6).map(|n| format!("The number is:{n}")).collect();
    ensure(t[i..end] == want[..], || format!("output {:?}", &t[i..end]))?;
    let w = find_block(t, &["whoops - No file or Program runs an issue to execute"], end).ok_or("no whoops line")?;
    let diag = t.get(w + 1).cloned().unwrap_or_default();
    ensure(
        diag.starts_with("caught exception:") && diag.contains("unterminated string literal"),
        || format!("diagnostic {diag:?}"),
    )?;
    Ok("six output lines and the unterminated-string diagnostic".into())
}

fn repl() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let r = replay_in(
        dir.path(),
        "exe\nrepl\n\nfor k = 1:3\nprintln(k, \":hello Julia Programming\")\nend\nEND\n\nback\nexit\n",
    );
    let want = [
        "exe>>END",
        "1:hello Julia Programming",
        "2:hello Julia Programming",
        "3:hello Julia Programming",
        "Result: nothing",
    ];
    find_block(&r.transcript, &want, 0).ok_or_else(|| format!("transcript {:?}", r.transcript))?;
    Ok("three lines and Result: nothing".into())
}

/// Variable lines of every scope dump, one vector per hit.
fn scope_dumps(t: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for (i, l) in t.iter().enumerate() {
        if l == "Variables in scope:" {
            out.push(t[i + 1..].iter().take_while(|l| l.starts_with("  ")).cloned().collect());
        }
    }
    out
}

fn breakpoints() -> Outcome {
    let want: Vec<Vec<String>> = (1..=3).map(|n| vec![format!("  k = {n}"), format!("  x = {n}")]).collect();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let r = replay_in(
        dir.path(),
        "db\nbp\nibp\nfunction mi()\nx = 0\nfor k = 1:3\nx = x+1\nend\nend\nmi()\nEND\n5\n\n\n\nback\nexit\n",
    );
    let got = scope_dumps(&r.transcript);
    ensure(got == want, || format!("interactive dumps {got:?}"))?;
    fs::write(dir.path().join("test_my.jl"), "\nfunction mi()\nx = 0\nfor k = 1:3\nx = x+1\nend\nend\nmi()\n").map_err(|e| e.to_string())?;
    let r = replay_in(dir.path(), "db\nbp\n\ntest_my.jl\n6\n\n\n\nback\nexit\n");
    let got = scope_dumps(&r.transcript);
    ensure(got == want, || format!("file-mode dumps {got:?}"))?;
    Ok("three dumps in interactive and file mode".into())
}

fn stepper() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let r = replay_in(
        dir.path(),
        "db\nistepin\nglobal x = 0\nfor k = 1:2\nglobal x\nx = x + 1\nend\nEND\nlist_variables = [:x]\n\n\nback\nexit\n",
    );
    let values: Vec<i64> = r
        .transcript
        .iter()
        .filter_map(|l| l.strip_prefix("  x = ").and_then(|v| v.parse().ok()))
        .collect();
    let mut distinct = values.clone();
    distinct.dedup();
    ensure(distinct == [0, 1, 2], || format!("watched x values {values:?}"))?;
    let fixtures = corpus();
    for f in &fixtures {
        let (a, b) = (plain_run(&f.source), stepped_run(&f.source));
        ensure(a == b, || format!("{}: stepped {b:?} vs plain {a:?}", f.name))?;
    }
    Ok(format!("x = {values:?}, semantics preserved on {} fixtures", fixtures.len()))
}

fn file_comparison() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = dir.path().join("test_cmp_1.jl");
    let b = dir.path().join("test_cmp_2.jl");
    fs::write(&a, "\nprintln(\"Hello world\")\n").map_err(|e| e.to_string())?;
    fs::write(&b, "\nprintln(\"hello Julia Programming\")\n").map_err(|e| e.to_string())?;
    let same = compare_files(&a, &a).map_err(|e| e.to_string())?;
    ensure(same.lines().iter().any(|l| l == "Files are identical"), || format!("{:?}", same.lines()))?;
    let diff = compare_files(&a, &b).map_err(|e| e.to_string())?;
    let lines = diff.lines();
    ensure(lines.iter().any(|l| l == "Files do not match"), || format!("{lines:?}"))?;
    let [sa, sb] = &diff.stats;
    ensure((sa.size_kb().as_str(), sb.size_kb().as_str()) == ("0.02", "0.04"), || {
        format!("sizes {} / {}", sa.size_kb(), sb.size_kb())
    })?;
    ensure((sa.lines, sb.lines) == (2, 2), || format!("lines {} / {}", sa.lines, sb.lines))?;
    Ok("identical self-compare; 0.02/0.04 KB, 2/2 lines".into())
}

const FUZZ_WORDS: &[&str] = &[
    "edm", "fms", "exe", "db", "syntax", "syntx", "back", "info", "clear", "^C", "", "END", "s", "w", "rd_lines", "d",
    "cp", "bs", "cm", "uncm", "onfile", "find", "copy_file", "undo", "redo", "lc", "dir", "ls", "cdir", "cpy", "delfl",
    "deldir", "mkdr", "rn", "tree", "cmp", "cmdwin", "e", "repl", "jl", "bp", "ibp", "stepin", "istepin", "1", "1:2",
    "1,0,3", "x = 1", "println(x)", "list_variables = [:x]", "add", "print", "for", "nope", "a.jl", "sub",
];

fn mode_graph() -> Outcome {
    const WORDS: usize = 500;
    const SEEDS: u64 = 8;
    let mut total = 0;
    for seed in 0..SEEDS {
        let mut rng = StdRng::seed_from_u64(seed);
        let script: Vec<&str> = (0..WORDS).map(|_| *FUZZ_WORDS.choose(&mut rng).unwrap()).collect();
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        fs::create_dir(dir.path().join("sub")).map_err(|e| e.to_string())?;
        fs::write(dir.path().join("a.jl"), "x = 1\nprintln(x)\n").map_err(|e| e.to_string())?;
        let text = script.join("\n");
        let r = panic::catch_unwind(AssertUnwindSafe(|| replay_in(dir.path(), &text)))
            .map_err(|_| format!("seed {seed}: panicked"))?;
        let mut at = Mode::Main;
        for &(from, to) in &r.transitions {
            ensure(from == at && allowed(from, to), || format!("seed {seed}: transition {from:?} -> {to:?}"))?;
            at = to;
        }
        ensure(at == Mode::Main, || format!("seed {seed}: ended in {at:?}"))?;
        total += r.transitions.len();
    }
    Ok(format!("{SEEDS} scripts of {WORDS} keywords, {total} transitions, all main<->mode"))
}

fn bench_stability() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_mintej");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut child = Command::new(exe)
        .arg("--workdir")
        .arg(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let (interval, window, duration) = (Duration::from_secs(5), 4, Duration::from_secs(60));
    let stop = AtomicBool::new(false);
    let mut csv_out = Vec::new();
    let rows = bench_sample(child.id(), interval, window, Some(duration), &stop, &mut csv_out);
    let _ = child.kill();
    let _ = child.wait();
    let rows = rows.map_err(|e| e.to_string())?;
    check_csv(&csv_out, window)?;
    let expected = (duration.as_millis() / interval.as_millis()) as usize;
    ensure(rows.len() == expected, || format!("{} rows, expected {expected}", rows.len()))?;
    for (i, row) in rows.iter().enumerate() {
        let defined = row.rss_ma.is_some() && row.cpu_pct_ma.is_some();
        ensure(defined == (i + 1 >= window), || format!("row {} moving average defined={defined}", i + 1))?;
    }
    let ma: Vec<f64> = rows.iter().filter_map(|r| r.rss_ma).collect();
    let (lo, hi) = ma.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mean = ma.iter().sum::<f64>() / ma.len() as f64;
    let spread = (hi - lo) / mean;
    ensure(spread < 0.10, || format!("rss_ma varies by {:.2}%", spread * 100.0))?;
    Ok(format!(
        "{} rows, rss_ma {:.1} MB varying {:.2}%",
        rows.len(),
        mean / 1_048_576.0,
        spread * 100.0
    ))
}

fn check_csv(bytes: &[u8], window: usize) -> Result<(), String> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    ensure(
        header.iter().eq(["timestamp", "rss_bytes", "cpu_pct", "rss_ma", "cpu_pct_ma"]),
        || format!("header {header:?}"),
    )?;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        ensure(rec.len() == 5, || format!("row {} has {} fields", i + 1, rec.len()))?;
        rec[0].parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1))?;
        rec[1].parse::<u64>().map_err(|e| format!("row {}: {e}", i + 1))?;
        rec[2].parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1))?;
        ensure(rec[3].is_empty() == (i + 1 < window), || format!("row {} rss_ma {:?}", i + 1, &rec[3]))?;
    }
    Ok(())
}

fn run(id: u32, name: &str, check: impl FnOnce() -> Outcome) -> bool {
    let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS {id:>2} {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {id:>2} {name}: {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let results = [
        run(1, "editor session replay", editor_replay),
        run(2, "buffer formalism", buffer_properties),
        run(3, "parser oracle equivalence", parser_oracle),
        run(4, "execution", execution),
        run(5, "repl", repl),
        run(6, "breakpoints", breakpoints),
        run(7, "stepper", stepper),
        run(8, "file comparison", file_comparison),
        run(9, "mode graph fuzz", mode_graph),
        run(10, "benchmark stability", bench_stability),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
