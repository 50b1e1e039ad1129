//! MinTEJ: a modal terminal editor for a small Julia-like language.
//!
//! Modes share one [`shell::Session`]: the line editor ([`editor`]), file
//! management ([`fms`]), execution and REPL ([`exe`]), the stepping debugger
//! ([`debugger`]) and the snippet database ([`syntaxdb`]).

pub mod debugger;
pub mod editor;
pub mod exe;
pub mod fms;
pub mod interp;
pub mod minilang;
pub mod seqbuffer;
pub mod shell;
pub mod syntaxdb;
