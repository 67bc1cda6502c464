//! Flat JSON-like key-value records and CSV tables.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use condgamma::grid::fmt_f64;

#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// Ordered flat record.
#[derive(Debug, Clone, Default)]
pub struct Record {
    entries: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), v.into()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::from("{\n");
        for (i, (k, v)) in self.entries.iter().enumerate() {
            let val = match v {
                Value::Num(x) if x.is_finite() => fmt_f64(*x),
                Value::Num(_) => "null".into(),
                Value::Int(x) => x.to_string(),
                Value::Flag(b) => b.to_string(),
                Value::Text(t) => quote(t),
            };
            let comma = if i + 1 < self.entries.len() { "," } else { "" };
            writeln!(s, "  {}: {val}{comma}", quote(k)).unwrap();
        }
        s.push_str("}\n");
        s
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Collects written files so the summary can list them in order.
pub struct Sink {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn text(&mut self, name: &str, body: &str) -> io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    pub fn record(&mut self, name: &str, r: &Record) -> io::Result<()> {
        self.text(name, &r.render())
    }

    pub fn csv(&mut self, name: &str, header: &str, rows: &[String]) -> io::Result<()> {
        let mut body = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
        body.push_str(header);
        body.push('\n');
        for r in rows {
            body.push_str(r);
            body.push('\n');
        }
        self.text(name, &body)
    }

    pub fn field(&mut self, name: &str, f: &condgamma::Field) -> condgamma::Result<()> {
        let path = self.dir.join(name);
        f.write_dump(io::BufWriter::new(fs::File::create(&path)?))?;
        self.written.push(path);
        Ok(())
    }
}

pub fn csv_line(cells: &[Value]) -> String {
    cells
        .iter()
        .map(|v| match v {
            Value::Num(x) => fmt_f64(*x),
            Value::Int(x) => x.to_string(),
            Value::Flag(b) => b.to_string(),
            Value::Text(t) => t.clone(),
        })
        .collect::<Vec<_>>()
        .join(",")
}
