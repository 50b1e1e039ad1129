//! Editor mode: line editing of one `.jl` file with undo/redo.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::seqbuffer::{LineBuffer, LineRange, RangeError};
use crate::shell::{Leave, Mode, Session};

/// Undo snapshots kept per file.
pub const UNDO_LIMIT: usize = 100;

const INFO: &[&str] = &[
    "w          :: Writes the file",
    "rd_lines  :: Reads the file",
    "d         :: deletes the lines in file",
    "cp        :: Copies the lines in file",
    "bs        :: Adds blank lines in file",
    "cm        :: Adds comments to lines in file",
    "uncm      :: Uncomments the lines in file",
    "onfile    :: User enter the filename",
    "clear     :: Clears the console",
    "find      :: Finds lines containing a keyword",
    "copy_file :: Copies the content of one file into another",
    "undo      :: Undoes the last change",
    "redo      :: Redoes the last undone change",
    "back      :: Returns to MinTEJ",
];

#[derive(Debug, Clone)]
struct OpenFile {
    name: String,
    path: PathBuf,
}

/// The file being edited and its history.
#[derive(Debug, Default)]
pub struct EditorSession {
    file: Option<OpenFile>,
    buffer: LineBuffer,
    undo: Vec<LineBuffer>,
    redo: Vec<LineBuffer>,
    history: Vec<(String, String)>,
}

impl EditorSession {
    pub fn buffer(&self) -> &LineBuffer {
        &self.buffer
    }

    pub fn file_name(&self) -> Option<&str> {
        self.file.as_ref().map(|f| f.name.as_str())
    }

    pub fn file_path(&self) -> Option<&Path> {
        self.file.as_ref().map(|f| f.path.as_path())
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    pub fn redo_depth(&self) -> usize {
        self.redo.len()
    }

    /// Commands run so far with their arguments.
    pub fn history(&self) -> &[(String, String)] {
        &self.history
    }

    /// Loads `path`, creating it empty when missing. History is reset.
    pub fn open(&mut self, name: &str, path: &Path) -> io::Result<()> {
        let buffer = if path.exists() {
            LineBuffer::load(&fs::read_to_string(path)?)
        } else {
            fs::write(path, "")?;
            LineBuffer::new()
        };
        self.file = Some(OpenFile {
            name: name.to_string(),
            path: path.to_path_buf(),
        });
        self.buffer = buffer;
        self.buffer.set_origin(Some(path.to_path_buf()));
        self.undo.clear();
        self.redo.clear();
        Ok(())
    }

    pub fn save(&mut self) -> io::Result<()> {
        let Some(file) = &self.file else {
            return Err(io::Error::new(io::ErrorKind::NotFound, "no file is open"));
        };
        fs::write(&file.path, self.buffer.render())?;
        self.buffer.mark_clean();
        Ok(())
    }

    /// Replaces the buffer, recording the previous state for undo.
    pub fn commit(&mut self, next: LineBuffer) {
        let prev = std::mem::replace(&mut self.buffer, next);
        self.undo.push(prev);
        if self.undo.len() > UNDO_LIMIT {
            self.undo.remove(0);
        }
        self.redo.clear();
    }

    pub fn undo(&mut self) -> bool {
        match self.undo.pop() {
            Some(prev) => {
                let cur = std::mem::replace(&mut self.buffer, prev);
                self.redo.push(cur);
                true
            }
            None => false,
        }
    }

    pub fn redo(&mut self) -> bool {
        match self.redo.pop() {
            Some(next) => {
                let cur = std::mem::replace(&mut self.buffer, next);
                self.undo.push(cur);
                true
            }
            None => false,
        }
    }

    fn record(&mut self, command: &str, arg: impl Into<String>) {
        self.history.push((command.to_string(), arg.into()));
    }
}

/// Appends `.jl` when `name` has no extension.
pub fn with_jl_extension(name: &str) -> String {
    if Path::new(name).extension().is_some() {
        name.to_string()
    } else {
        format!("{name}.jl")
    }
}

/// Runs the `edm>>` prompt until `back`, an interrupt or end of input.
pub fn edm_loop(s: &mut Session<'_>) -> Result<(), Leave> {
    let name = s.question("Enter the file name")?;
    if !name.trim().is_empty() {
        open_named(s, name.trim());
    }
    loop {
        let line = s.ask(Mode::Edm.prompt())?;
        match line.trim() {
            "" => {}
            "back" => return Ok(()),
            "info" => {
                for row in INFO {
                    s.say(row);
                }
            }
            "clear" => s.io.clear_screen(),
            "onfile" => {
                let name = s.question("Enter the file name")?;
                if !name.trim().is_empty() {
                    open_named(s, name.trim());
                }
            }
            "w" => cmd_write(s)?,
            "rd_lines" => cmd_read_lines(s)?,
            "d" => cmd_delete(s)?,
            "cp" => cmd_copy(s)?,
            "bs" => cmd_blank(s)?,
            "cm" => cmd_comment(s, true)?,
            "uncm" => cmd_comment(s, false)?,
            "find" => cmd_find(s)?,
            "copy_file" => cmd_copy_file(s)?,
            "undo" => cmd_undo(s, true),
            "redo" => cmd_undo(s, false),
            _ => s.say("Unknown command"),
        }
    }
}

fn open_named(s: &mut Session<'_>, name: &str) {
    let name = with_jl_extension(name);
    let path = s.resolve(&name);
    match s.editor.open(&name, &path) {
        Ok(()) => {
            s.editor.record("onfile", name);
            s.say("Choose option from info list");
        }
        Err(e) => s.say(format!("Error: cannot open {name}: {e}")),
    }
}

fn require_file(s: &mut Session<'_>) -> Option<String> {
    match s.editor.file_name() {
        Some(name) => Some(name.to_string()),
        None => {
            s.say("Info: no file is open, use onfile first");
            None
        }
    }
}

fn save_and_report(s: &mut Session<'_>, name: &str) {
    match s.editor.save() {
        Ok(()) => s.say(format!("Saved to {name}")),
        Err(e) => s.say(format!("Error: could not save {name}: {e}")),
    }
}

fn print_numbered(s: &mut Session<'_>) {
    for line in s.editor.buffer.numbered() {
        s.io.print(&line);
    }
}

fn commit_and_save(s: &mut Session<'_>, name: &str, next: LineBuffer) {
    s.editor.commit(next);
    print_numbered(s);
    save_and_report(s, name);
}

/// Asks until `apply` accepts the typed range on a copy of the buffer.
/// Empty input cancels.
fn ask_edit<F>(s: &mut Session<'_>, info: &str, apply: F) -> Result<Option<(String, LineBuffer)>, Leave>
where
    F: Fn(&mut LineBuffer, LineRange) -> Result<(), RangeError>,
{
    loop {
        let text = s.question(info)?;
        if text.trim().is_empty() {
            s.say("Info: cancelled");
            return Ok(None);
        }
        let mut next = s.editor.buffer.clone();
        match text.parse::<LineRange>().and_then(|r| apply(&mut next, r)) {
            Ok(()) => return Ok(Some((text.trim().to_string(), next))),
            Err(e) => s.say(format!("Error: {e}")),
        }
    }
}

fn cmd_write(s: &mut Session<'_>) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say(format!("Editing: {name}"));
    s.say(format!("{}:", s.editor.buffer.len() + 1));
    s.say("Type new lines. Type 's' to save and exit.");
    let mut typed = Vec::new();
    loop {
        let line = s.answer()?;
        if line.trim_end() == "s" {
            break;
        }
        typed.push(line);
    }
    if !typed.is_empty() {
        let mut next = s.editor.buffer.clone();
        for line in &typed {
            next.push(line.clone());
        }
        s.editor.commit(next);
    }
    s.editor.record("w", format!("{} lines", typed.len()));
    save_and_report(s, &name);
    Ok(())
}

/// `start,offset,end` as typed for `rd_lines`.
pub fn parse_read_window(text: &str) -> Option<(usize, usize, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return None;
    };
    let (start, offset, end) = (a.parse().ok()?, b.parse().ok()?, c.parse().ok()?);
    (start >= 1 && end >= 1).then_some((start, offset, end))
}

/// Lines shown for a `start,offset,end` request: from `max(1, start - offset)`
/// through `end`, clamped to the buffer.
pub fn read_window(buffer: &LineBuffer, start: usize, offset: usize, end: usize) -> Vec<String> {
    let from = start.saturating_sub(offset).max(1);
    buffer.numbered_compact(from, end)
}

fn cmd_read_lines(s: &mut Session<'_>) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say(format!("Reading: {name}"));
    let all = s.editor.buffer.numbered_compact(1, s.editor.buffer.len());
    for line in all {
        s.say(line);
    }
    s.say("");
    loop {
        let text = s.question("Info: Enter Start_line, off-set before the start line, End_line till to be read")?;
        if text.trim().is_empty() {
            s.say("Info: cancelled");
            return Ok(());
        }
        match parse_read_window(&text) {
            Some((start, offset, end)) => {
                for line in read_window(&s.editor.buffer, start, offset, end) {
                    s.say(line);
                }
                s.editor.record("rd_lines", text.trim());
                return Ok(());
            }
            None => s.say("Error: expected three numbers such as 1,0,3"),
        }
    }
}

fn cmd_delete(s: &mut Session<'_>) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say("Re-reading saved file:");
    print_numbered(s);
    let info = "Info: Enter Start_line & End_line number or line to be deleted";
    if let Some((arg, next)) = ask_edit(s, info, |b, r| b.delete(r))? {
        s.editor.record("d", arg);
        commit_and_save(s, &name, next);
    }
    Ok(())
}

fn cmd_copy(s: &mut Session<'_>) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say("Re-reading saved file:");
    print_numbered(s);
    let len = s.editor.buffer.len();
    let check_src = move |_: &mut LineBuffer, r: LineRange| {
        if r.end() > len {
            Err(RangeError::OutOfRange { line: r.end(), len })
        } else {
            Ok(())
        }
    };
    let Some((src_text, _)) = ask_edit(s, "Info: Enter line number to be copied", check_src)? else {
        return Ok(());
    };
    let src: LineRange = src_text.parse().expect("validated range");
    let Some((dest, next)) = ask_edit(s, "Info: Enter location to be copied", |b, r| {
        if r.start() != r.end() {
            return Err(RangeError::Malformed(r.to_string()));
        }
        b.copy(src, r.start())
    })?
    else {
        return Ok(());
    };
    s.editor.record("cp", format!("{src_text} -> {dest}"));
    commit_and_save(s, &name, next);
    Ok(())
}

fn cmd_blank(s: &mut Session<'_>) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say("Re-reading saved file:");
    print_numbered(s);
    let info = "Info: Enter line number where the blank space is needed";
    let apply = |b: &mut LineBuffer, r: LineRange| {
        for at in r.start()..=r.end() {
            b.insert_blank(at)?;
        }
        Ok(())
    };
    if let Some((arg, next)) = ask_edit(s, info, apply)? {
        s.editor.record("bs", arg);
        commit_and_save(s, &name, next);
    }
    Ok(())
}

fn cmd_comment(s: &mut Session<'_>, comment: bool) -> Result<(), Leave> {
    let Some(name) = require_file(s) else {
        return Ok(());
    };
    s.say("Re-reading saved file:");
    print_numbered(s);
    let (command, info) = if comment {
        ("cm", "Info: Enter line number to comment")
    } else {
        ("uncm", "Info: Enter line number to uncomment")
    };
    let apply = |b: &mut LineBuffer, r: LineRange| if comment { b.comment(r) } else { b.uncomment(r) };
    if let Some((arg, next)) = ask_edit(s, info, apply)? {
        s.editor.record(command, arg);
        commit_and_save(s, &name, next);
    }
    Ok(())
}

/// Lines containing `keyword`, as `(line number, text)`.
pub fn find_lines(buffer: &LineBuffer, keyword: &str) -> Vec<(usize, String)> {
    buffer
        .lines()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.contains(keyword))
        .map(|(i, l)| (i + 1, l.clone()))
        .collect()
}

fn cmd_find(s: &mut Session<'_>) -> Result<(), Leave> {
    if require_file(s).is_none() {
        return Ok(());
    }
    let keyword = loop {
        let k = s.question("Enter the keyword")?;
        if !k.is_empty() {
            break k;
        }
    };
    let hits = find_lines(&s.editor.buffer, &keyword);
    if hits.is_empty() {
        s.say(format!("No match found for '{keyword}'"));
    }
    for (n, line) in hits {
        s.say(format!("{n}: {line}"));
    }
    s.editor.record("find", keyword);
    Ok(())
}

fn cmd_copy_file(s: &mut Session<'_>) -> Result<(), Leave> {
    let src = s.question("Enter the source file name")?.trim().to_string();
    let dst = s.question("Enter the destination file name")?.trim().to_string();
    let (src_path, dst_path) = (s.resolve(&src), s.resolve(&dst));
    let content = match fs::read_to_string(&src_path) {
        Ok(c) => c,
        Err(e) => {
            s.say(format!("Error: cannot read '{src}': {e}"));
            return Ok(());
        }
    };
    if let Err(e) = fs::write(&dst_path, &content) {
        s.say(format!("Error: cannot write '{dst}': {e}"));
        return Ok(());
    }
    s.editor.record("copy_file", format!("{src} -> {dst}"));
    s.say(format!("Copied '{src}' to '{dst}'"));
    let open = s.editor.file_path().map(Path::to_path_buf);
    if open.is_some_and(|p| same_file(&p, &dst_path)) {
        let mut next = LineBuffer::load(&content);
        next.set_origin(Some(dst_path));
        s.editor.commit(next);
    }
    Ok(())
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn cmd_undo(s: &mut Session<'_>, undo: bool) {
    let Some(name) = require_file(s) else {
        return;
    };
    let done = if undo { s.editor.undo() } else { s.editor.redo() };
    if !done {
        s.say(if undo { "nothing to undo" } else { "nothing to redo" });
        return;
    }
    s.editor.record(if undo { "undo" } else { "redo" }, "");
    print_numbered(s);
    save_and_report(s, &name);
}
