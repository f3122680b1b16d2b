//! Grid scans with a resumable checkpoint sidecar.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use abrikosov::ShapeParameter;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::commands::{PointRecord, POINT_HEADERS};
use crate::output::{self, Report, Table};
use crate::{Failure, Global};

const CHECKPOINT_EVERY: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.step == 0.0 || self.start == self.stop {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{e}"));
    let r = match parts.as_slice() {
        [a] => Range { start: f(a)?, stop: f(a)?, step: 0.0 },
        [a, b, c] => Range { start: f(a)?, stop: f(b)?, step: f(c)? },
        _ => return Err("expected start:stop:step or a single value".into()),
    };
    if r.step < 0.0 || r.stop < r.start || (r.step == 0.0 && r.stop != r.start) {
        return Err("range needs start <= stop and a positive step".into());
    }
    Ok(r)
}

#[derive(Serialize, Deserialize, PartialEq)]
struct Config {
    re: Range,
    im: Range,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct Line {
    row: Vec<String>,
    json: Value,
}

fn load_checkpoint(path: &PathBuf, config: &Config) -> Result<Vec<Line>, Failure> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut lines = BufReader::new(File::open(path)?).lines();
    let head: Option<Config> = match lines.next() {
        Some(l) => serde_json::from_str(&l?).ok(),
        None => None,
    };
    if head.as_ref() != Some(config) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for l in lines {
        match serde_json::from_str::<Line>(&l?) {
            Ok(v) => out.push(v),
            Err(_) => break,
        }
    }
    Ok(out)
}

pub fn run(re: &Range, im: &Range, checkpoint: Option<PathBuf>, g: &Global) -> Result<(), Failure> {
    let mut grid = Vec::new();
    for r in re.points() {
        for i in im.points() {
            if i <= 0.0 {
                return Err(Failure { code: 2, message: format!("grid point {r}+{i}i has Im tau <= 0") });
            }
            grid.push((r, i));
        }
    }
    let config = Config { re: *re, im: *im, tol: g.tol };
    let ckpt = checkpoint.or_else(|| {
        g.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".ckpt");
            PathBuf::from(s)
        })
    });

    let mut done = match &ckpt {
        Some(p) => load_checkpoint(p, &config)?,
        None => Vec::new(),
    };
    done.truncate(grid.len());
    let mut sink = match &ckpt {
        Some(p) => {
            let mut f = OpenOptions::new().create(true).write(true).truncate(true).open(p)?;
            writeln!(f, "{}", serde_json::to_string(&config).map_err(std::io::Error::from)?)?;
            for l in &done {
                writeln!(f, "{}", serde_json::to_string(l).map_err(std::io::Error::from)?)?;
            }
            f.flush()?;
            Some(f)
        }
        None => None,
    };

    for chunk in grid[done.len()..].chunks(CHECKPOINT_EVERY) {
        let recs: Vec<Result<Line, abrikosov::Error>> = chunk
            .par_iter()
            .map(|(r, i)| {
                let rec = PointRecord::compute(&ShapeParameter::new(*r, *i)?, g.tol)?;
                Ok(Line { row: rec.row(), json: rec.json() })
            })
            .collect();
        for r in recs {
            let line = r?;
            if let Some(f) = sink.as_mut() {
                writeln!(f, "{}", serde_json::to_string(&line).map_err(std::io::Error::from)?)?;
            }
            done.push(line);
        }
        if let Some(f) = sink.as_mut() {
            f.flush()?;
        }
    }

    let mut table = Table::new(&POINT_HEADERS);
    let mut records = Vec::with_capacity(done.len());
    for l in done {
        table.push(l.row);
        records.push(l.json);
    }
    let report = Report { json: json!({ "config": config, "records": records }), table };
    output::emit(&output::render(&report, g.format)?, g.out.as_deref())?;
    if let Some(p) = ckpt {
        drop(sink);
        fs::remove_file(p)?;
    }
    Ok(())
}
