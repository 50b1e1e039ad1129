//! File management mode.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;

use walkdir::WalkDir;

use crate::seqbuffer::LineBuffer;
use crate::shell::{Leave, Mode, Session};

const INFO: &[&str] = &[
    "lc    :: Current directory",
    "dir   :: List directory",
    "ls    :: List directory with path",
    "cdir  :: Change directory",
    "cpy   :: Copy files/directory",
    "delfl :: delete file",
    "deldir:: delete directory",
    "mkdr  :: Create directory",
    "rn    :: Rename file/ directory",
    "clear :: clear console",
    "tree  :: View tree structure",
    "rd_lines :: Reads file",
    "cmp   :: Compares two text files",
    "cmdwin :: Opens the windows instance",
    "      :: Unknown command",
];

/// Size, line and word counts of one compared file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileStats {
    pub name: String,
    pub bytes: u64,
    pub lines: usize,
    pub words: usize,
}

impl FileStats {
    /// Size in KiB with two decimals.
    pub fn size_kb(&self) -> String {
        format!("{:.2}", self.bytes as f64 / 1024.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub identical: bool,
    /// `(line, left, right)`; a side is `None` past the end of its file.
    pub mismatches: Vec<(usize, Option<String>, Option<String>)>,
    pub stats: [FileStats; 2],
}

impl CompareReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let side = |s: &Option<String>| s.clone().unwrap_or_else(|| "<none>".into());
        for (n, a, b) in &self.mismatches {
            out.push(format!("File A: {n} {}", side(a)));
            out.push(format!("File B: {n} {}", side(b)));
        }
        out.push(if self.identical { "Files are identical" } else { "Files do not match" }.into());
        let [a, b] = &self.stats;
        let width = a.name.len().max(18) + 1;
        let row = |label: &str, l: String, r: String| format!("{label:<16}{l:<width$}| {r}");
        out.push(row("File name:", a.name.clone(), b.name.clone()));
        out.push(row("File size (KB):", a.size_kb(), b.size_kb()));
        out.push(row("Total lines:", a.lines.to_string(), b.lines.to_string()));
        out.push(row("Total words:", a.words.to_string(), b.words.to_string()));
        out
    }
}

fn words(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

/// Compares two texts line by line on their whitespace-separated words.
pub fn compare_texts(name_a: &str, a: &str, name_b: &str, b: &str) -> CompareReport {
    let (la, lb): (Vec<&str>, Vec<&str>) = (a.lines().collect(), b.lines().collect());
    let mut mismatches = Vec::new();
    for i in 0..la.len().max(lb.len()) {
        let (x, y) = (la.get(i), lb.get(i));
        let same = match (x, y) {
            (Some(x), Some(y)) => words(x) == words(y),
            _ => false,
        };
        if !same {
            mismatches.push((i + 1, x.map(|s| s.to_string()), y.map(|s| s.to_string())));
        }
    }
    let stats = |name: &str, text: &str, lines: usize| FileStats {
        name: name.to_string(),
        bytes: text.len() as u64,
        lines,
        words: text.split_whitespace().count(),
    };
    let identical = mismatches.is_empty() && words(a) == words(b);
    CompareReport {
        identical,
        mismatches,
        stats: [stats(name_a, a, la.len()), stats(name_b, b, lb.len())],
    }
}

pub fn compare_files(a: &Path, b: &Path) -> io::Result<CompareReport> {
    let name = |p: &Path| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
    let (ta, tb) = (fs::read_to_string(a)?, fs::read_to_string(b)?);
    Ok(compare_texts(&name(a), &ta, &name(b), &tb))
}

fn sorted_children(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut out = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<io::Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// Names of the immediate children of `dir`, sorted.
pub fn list_names(dir: &Path) -> io::Result<Vec<String>> {
    Ok(sorted_children(dir)?
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect())
}

/// Absolute paths of the immediate children of `dir`, sorted.
pub fn list_paths(dir: &Path) -> io::Result<Vec<String>> {
    Ok(sorted_children(dir)?.iter().map(|p| p.display().to_string()).collect())
}

/// Each directory under `root` in walk order, followed by its files.
pub fn tree_lines(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let walk = WalkDir::new(root).sort_by(|a, b| a.file_name().cmp(b.file_name()));
    for entry in walk {
        match entry {
            Ok(e) if e.file_type().is_dir() => {
                out.push(e.path().display().to_string());
                match sorted_children(e.path()) {
                    Ok(children) => {
                        for c in children.iter().filter(|c| !c.is_dir()) {
                            let name = c.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                            out.push(format!("├── {name}"));
                        }
                    }
                    Err(err) => out.push(format!("<unreadable: {err}>")),
                }
            }
            Ok(_) => {}
            Err(err) => out.push(format!("<unreadable: {err}>")),
        }
    }
    out
}

/// Copies a file or directory tree. A directory copied onto an existing
/// directory merges into it; a file copied onto a directory lands inside it.
/// An existing destination file is an error.
pub fn copy_path(src: &Path, dst: &Path) -> io::Result<()> {
    let meta = fs::metadata(src)?;
    if meta.is_file() {
        let target = if dst.is_dir() {
            dst.join(src.file_name().unwrap_or_default())
        } else {
            dst.to_path_buf()
        };
        if target.exists() {
            return Err(io::Error::new(io::ErrorKind::AlreadyExists, format!("'{}' already exists", target.display())));
        }
        fs::copy(src, &target)?;
        return Ok(());
    }
    if dst.starts_with(src) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "cannot copy a folder into itself"));
    }
    if dst.exists() && !dst.is_dir() {
        return Err(io::Error::new(io::ErrorKind::AlreadyExists, format!("'{}' is a file", dst.display())));
    }
    for entry in WalkDir::new(src) {
        let entry = entry.map_err(io::Error::other)?;
        let rel = entry.path().strip_prefix(src).map_err(io::Error::other)?;
        let target = dst.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&target)?;
        } else if target.exists() {
            return Err(io::Error::new(io::ErrorKind::AlreadyExists, format!("'{}' already exists", target.display())));
        } else {
            fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}

/// The platform's command for a new terminal window.
pub fn default_terminal_command() -> Option<&'static str> {
    if cfg!(windows) {
        Some("cmd /C start cmd")
    } else if cfg!(target_os = "macos") {
        Some("open -a Terminal .")
    } else if cfg!(unix) {
        Some("x-terminal-emulator")
    } else {
        None
    }
}

/// Starts `command` detached in `dir`. A background thread reaps the child.
pub fn spawn_terminal(command: &str, dir: &Path) -> io::Result<u32> {
    let mut parts = command.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty terminal command"))?;
    let mut child = Command::new(program)
        .args(parts)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()?;
    let id = child.id();
    thread::spawn(move || {
        let _ = child.wait();
    });
    Ok(id)
}

/// Runs the `fms>>` prompt until `back`, an interrupt or end of input.
pub fn fms_loop(s: &mut Session<'_>) -> Result<(), Leave> {
    loop {
        let line = s.ask(Mode::Fms.prompt())?;
        match line.trim() {
            "" => {}
            "back" => return Ok(()),
            "info" => {
                for row in INFO {
                    s.say(row);
                }
            }
            "lc" => {
                s.say("Printing the current directory");
                let wd = s.workdir().display().to_string();
                s.say(wd);
            }
            "dir" => {
                s.say("Printing the list content of directory");
                let listing = list_names(s.workdir());
                print_listing(s, listing);
            }
            "ls" => {
                s.say("List all files and directory with path");
                let listing = list_paths(s.workdir());
                print_listing(s, listing);
            }
            "cdir" => cmd_cdir(s)?,
            "cpy" => cmd_copy(s)?,
            "delfl" => cmd_delete(s, false)?,
            "deldir" => cmd_delete(s, true)?,
            "mkdr" => cmd_mkdir(s)?,
            "rn" => cmd_rename(s)?,
            "clear" => s.io.clear_screen(),
            "tree" => {
                s.say("List tree");
                for l in tree_lines(s.workdir()) {
                    s.say(l);
                }
            }
            "rd_lines" => cmd_read(s)?,
            "cmp" => cmd_compare(s)?,
            "cmdwin" => cmd_terminal(s),
            _ => s.say("Unknown command"),
        }
    }
}

fn print_listing(s: &mut Session<'_>, listing: io::Result<Vec<String>>) {
    match listing {
        Ok(lines) => {
            for l in lines {
                s.say(l);
            }
        }
        Err(e) => s.say(format!("Error: {e}")),
    }
}

fn cmd_cdir(s: &mut Session<'_>) -> Result<(), Leave> {
    s.say("Changing directory");
    let raw = s.question("Enter the path")?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(());
    }
    match s.resolve(raw).canonicalize() {
        Ok(p) if p.is_dir() => {
            s.say(p.display().to_string());
            s.set_workdir(p);
        }
        Ok(_) => s.say(format!("Error: '{raw}' is not a directory")),
        Err(e) => s.say(format!("Error: cannot change to '{raw}': {e}")),
    }
    Ok(())
}

fn cmd_copy(s: &mut Session<'_>) -> Result<(), Leave> {
    let src = s.question("Enter the source file/folder name")?.trim().to_string();
    let dst = s.question("Enter the destination file/folder name")?.trim().to_string();
    if src.is_empty() || dst.is_empty() {
        return Ok(());
    }
    match copy_path(&s.resolve(&src), &s.resolve(&dst)) {
        Ok(()) => s.say(format!("Copied '{src}' to '{dst}'")),
        Err(e) => s.say(format!("Error: cannot copy '{src}': {e}")),
    }
    Ok(())
}

fn cmd_delete(s: &mut Session<'_>, folder: bool) -> Result<(), Leave> {
    let warning = if folder { "Warning: Provide the folder path" } else { "Warning: Provide the file path" };
    let raw = s.question(warning)?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(());
    }
    let path = s.resolve(raw);
    let result = match (folder, path.is_dir(), path.exists()) {
        (_, _, false) => Err(format!("'{raw}' does not exist")),
        (true, true, _) => fs::remove_dir_all(&path).map_err(|e| e.to_string()),
        (false, false, _) => fs::remove_file(&path).map_err(|e| e.to_string()),
        (true, false, _) => Err(format!("'{raw}' is not a folder")),
        (false, true, _) => Err(format!("'{raw}' is a folder, use deldir")),
    };
    match result {
        Ok(()) => s.say(if folder { "Folder is deleted!" } else { "File is deleted!" }),
        Err(e) => s.say(format!("Error: {e}")),
    }
    Ok(())
}

fn cmd_mkdir(s: &mut Session<'_>) -> Result<(), Leave> {
    let raw = s.question("Add the folder name to create directory")?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(());
    }
    if let Err(e) = fs::create_dir(s.resolve(raw)) {
        s.say(format!("Error: cannot create '{raw}': {e}"));
    }
    Ok(())
}

fn cmd_rename(s: &mut Session<'_>) -> Result<(), Leave> {
    let old = s.question("Enter the oldname file/folder name")?.trim().to_string();
    s.say("");
    let new = s.question("Enter the newname file/folder name")?.trim().to_string();
    if old.is_empty() || new.is_empty() {
        return Ok(());
    }
    let (from, to) = (s.resolve(&old), s.resolve(&new));
    if !from.exists() {
        s.say(format!("Error: '{old}' does not exist"));
    } else if to.exists() {
        s.say(format!("Error: '{new}' already exists"));
    } else {
        match fs::rename(&from, &to) {
            Ok(()) => s.say(format!("Renamed '{old}' to '{new}'")),
            Err(e) => s.say(format!("Error: cannot rename '{old}': {e}")),
        }
    }
    Ok(())
}

fn cmd_read(s: &mut Session<'_>) -> Result<(), Leave> {
    s.say("");
    let name = s.question("Enter the file name")?.trim().to_string();
    s.say("");
    if name.is_empty() {
        return Ok(());
    }
    let mut path = s.resolve(&name);
    if !path.exists() && path.extension().is_none() {
        path.set_extension("jl");
    }
    match fs::read_to_string(&path) {
        Ok(text) => {
            s.say(format!("Reading: {name}"));
            let buffer = LineBuffer::load(&text);
            for l in buffer.numbered_compact(1, buffer.len()) {
                s.say(l);
            }
        }
        Err(e) => s.say(format!("Error: cannot read '{name}': {e}")),
    }
    Ok(())
}

fn cmd_compare(s: &mut Session<'_>) -> Result<(), Leave> {
    let a = s.question("Enter the text file 1")?.trim().to_string();
    s.say("");
    let b = s.question("Enter the text file 2")?.trim().to_string();
    match compare_files(&s.resolve(&a), &s.resolve(&b)) {
        Ok(report) => {
            for l in report.lines() {
                s.say(l);
            }
        }
        Err(e) => s.say(format!("Error: cannot compare '{a}' and '{b}': {e}")),
    }
    Ok(())
}

fn cmd_terminal(s: &mut Session<'_>) {
    let command = s.terminal_command.clone().or_else(|| default_terminal_command().map(str::to_string));
    let Some(command) = command else {
        s.say("Info: opening a terminal is not supported on this platform");
        return;
    };
    match spawn_terminal(&command, s.workdir()) {
        Ok(_) => s.say("Opened a new terminal window"),
        Err(e) => s.say(format!("Error: could not open a terminal: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CMP_A: &str = "\nprintln(\"Hello world\")\n";
    const CMP_B: &str = "\nprintln(\"hello Julia Programming\")\n";

    #[test]
    fn cmp_fixture_pair() {
        let r = compare_texts("test_cmp_1.jl", CMP_A, "test_cmp_2.jl", CMP_B);
        assert!(!r.identical);
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].0, 2);
        let [a, b] = &r.stats;
        assert_eq!((a.size_kb().as_str(), b.size_kb().as_str()), ("0.02", "0.04"));
        assert_eq!((a.lines, b.lines), (2, 2));
        assert_eq!((a.words, b.words), (2, 3));
        let lines = r.lines();
        assert_eq!(lines[0], "File A: 2 println(\"Hello world\")");
        assert_eq!(lines[1], "File B: 2 println(\"hello Julia Programming\")");
        assert_eq!(lines[2], "Files do not match");
        assert_eq!(lines[3], "File name:      test_cmp_1.jl      | test_cmp_2.jl");
    }

    #[test]
    fn cmp_self_and_symmetry() {
        let r = compare_texts("a", CMP_A, "a", CMP_A);
        assert!(r.identical && r.mismatches.is_empty());
        assert_eq!(r.lines()[0], "Files are identical");
        let ab = compare_texts("a", "x\ny", "b", "x");
        let ba = compare_texts("b", "x", "a", "x\ny");
        assert_eq!(ab.identical, ba.identical);
        assert_eq!(ab.mismatches, [(2, Some("y".into()), None)]);
        assert!(ab.lines()[1].ends_with("<none>"));
    }

    #[test]
    fn tree_and_listing() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().canonicalize().unwrap();
        fs::create_dir_all(root.join("b/deep")).unwrap();
        fs::create_dir(root.join("a")).unwrap();
        fs::write(root.join("z.jl"), "").unwrap();
        fs::write(root.join("a/one.jl"), "").unwrap();
        fs::write(root.join("b/deep/two.jl"), "").unwrap();
        let r = root.display().to_string();
        let sep = std::path::MAIN_SEPARATOR;
        assert_eq!(
            tree_lines(&root),
            [
                r.clone(),
                "├── z.jl".into(),
                format!("{r}{sep}a"),
                "├── one.jl".into(),
                format!("{r}{sep}b"),
                format!("{r}{sep}b{sep}deep"),
                "├── two.jl".into(),
            ]
        );
        assert_eq!(list_names(&root).unwrap(), ["a", "b", "z.jl"]);
        let empty = tempfile::tempdir().unwrap();
        assert!(list_names(empty.path()).unwrap().is_empty());
    }

    #[test]
    fn copy_rules() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::create_dir_all(root.join("src/inner")).unwrap();
        fs::write(root.join("src/inner/f.jl"), "x").unwrap();
        fs::create_dir(root.join("dst")).unwrap();
        copy_path(&root.join("src"), &root.join("dst")).unwrap();
        assert_eq!(fs::read_to_string(root.join("dst/inner/f.jl")).unwrap(), "x");
        assert!(copy_path(&root.join("src"), &root.join("dst")).is_err());
        copy_path(&root.join("src/inner/f.jl"), &root.join("g.jl")).unwrap();
        assert!(copy_path(&root.join("src/inner/f.jl"), &root.join("g.jl")).is_err());
        assert!(copy_path(&root.join("missing"), &root.join("h")).is_err());
    }
}
