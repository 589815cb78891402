#![allow(dead_code)]

use std::collections::HashMap;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// In-process run of the CLI.
pub fn pairci(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = pairci::main_with(std::iter::once("pairci").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: out, stderr: String::from_utf8(err).unwrap() }
}

/// The real binary, for exit codes as the shell sees them.
pub fn binary(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_pairci")).args(args).output().unwrap();
    Run { code: o.status.code().unwrap(), stdout: o.stdout, stderr: String::from_utf8(o.stderr).unwrap() }
}

/// A parsed CSV table: metadata, header and rows of raw strings.
pub struct Csv {
    pub meta: HashMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn col(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    pub fn text(&self, name: &str) -> Vec<String> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].clone()).collect()
    }

    pub fn meta_f64(&self, key: &str) -> f64 {
        self.meta[key].parse().unwrap()
    }
}

/// Split stdout into tables (blank-line separated) and parse each.
pub fn tables(bytes: &[u8]) -> Vec<Csv> {
    let text = std::str::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    text.split("\n\n")
        .filter(|b| !b.trim().is_empty())
        .map(|block| {
            let mut meta = HashMap::new();
            for line in block.lines().filter(|l| l.starts_with('#')) {
                let (k, v) = line[1..].split_once(" = ").unwrap();
                meta.insert(k.trim().to_string(), v.to_string());
            }
            let body: String = block.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
            let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
            let header = rdr.headers().unwrap().iter().map(String::from).collect();
            let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
            Csv { meta, header, rows }
        })
        .collect()
}

pub fn ok_tables(args: &[&str]) -> Vec<Csv> {
    let r = pairci(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    tables(&r.stdout)
}
