//! Reader and writer for the `pairXXXX.txt` + `pairmeta.txt` layout.
//!
//! Each pair file holds one observation per line as whitespace-separated
//! numbers. Each meta row reads
//! `<id> <cause_first> <cause_last> <effect_first> <effect_last> <weight>`
//! with 1-based, inclusive column ranges.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{first_pc, CauseEffectPair, DatasetTag};
use crate::error::{Error, Result};
use crate::Direction;

pub const META_FILE: &str = "pairmeta.txt";

#[derive(Clone, Debug, PartialEq)]
pub struct MetaRow {
    pub id: String,
    pub cause: (usize, usize),
    pub effect: (usize, usize),
    pub weight: f64,
}

impl MetaRow {
    /// File holding this pair's observations.
    pub fn file_name(&self) -> String {
        match self.id.parse::<u32>() {
            Ok(n) => format!("pair{n:04}.txt"),
            Err(_) => format!("pair{}.txt", self.id),
        }
    }

    pub fn pair_id(&self) -> String {
        self.file_name().trim_end_matches(".txt").to_string()
    }
}

/// Parses the meta file contents.
pub fn parse_meta(text: &str) -> Result<Vec<MetaRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = |why: String| Error::InvalidConfig(format!("{META_FILE} line {}: {why}", lineno + 1));
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, got {}", fields.len())));
        }
        let col = |s: &str| -> Result<usize> {
            match s.parse::<f64>() {
                Ok(v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
                _ => Err(bad(format!("invalid column index `{s}`"))),
            }
        };
        let cause = (col(fields[1])?, col(fields[2])?);
        let effect = (col(fields[3])?, col(fields[4])?);
        let weight: f64 = fields[5]
            .parse()
            .map_err(|_| bad(format!("invalid weight `{}`", fields[5])))?;
        rows.push(MetaRow {
            id: fields[0].to_string(),
            cause,
            effect,
            weight,
        });
    }
    Ok(rows)
}

/// Parses a pair file into rows of equal width.
fn parse_rows(text: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("line {}: non-numeric value `{tok}`", lineno + 1))
            })
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format!(
                    "line {}: {} columns, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no observations".into());
    }
    Ok(rows)
}

fn extract(rows: &[Vec<f64>], (first, last): (usize, usize)) -> std::result::Result<Vec<f64>, String> {
    let width = rows[0].len();
    if first > last || last > width {
        return Err(format!("columns {first}-{last} out of range for {width} columns"));
    }
    if first == last {
        return Ok(rows.iter().map(|r| r[first - 1]).collect());
    }
    let block: Vec<Vec<f64>> = rows.iter().map(|r| r[first - 1..last].to_vec()).collect();
    first_pc(&block).map_err(|e| e.to_string())
}

fn load_one(dir: &Path, meta: &MetaRow, tag: DatasetTag) -> Result<CauseEffectPair> {
    let id = meta.pair_id();
    let path = dir.join(meta.file_name());
    let text = fs::read_to_string(&path).map_err(|e| Error::pair(&id, format!("{}: {e}", path.display())))?;
    let rows = parse_rows(&text).map_err(|e| Error::pair(&id, e))?;
    let cause = extract(&rows, meta.cause).map_err(|e| Error::pair(&id, format!("cause {e}")))?;
    let effect = extract(&rows, meta.effect).map_err(|e| Error::pair(&id, format!("effect {e}")))?;
    // Keep the file's column order: x is whichever variable comes first.
    let (x, y, truth) = if meta.cause.0 <= meta.effect.0 {
        (cause, effect, Direction::XtoY)
    } else {
        (effect, cause, Direction::YtoX)
    };
    CauseEffectPair::new(id, x, y, truth, meta.weight, tag)
}

/// Reads the first two columns of a single pair file as `(x, y)`.
pub fn read_pair_file(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let id = path.display().to_string();
    let rows = parse_rows(&text).map_err(|e| Error::pair(&id, e))?;
    if rows[0].len() < 2 {
        return Err(Error::pair(&id, format!("need 2 columns, found {}", rows[0].len())));
    }
    Ok(rows.iter().map(|r| (r[0], r[1])).unzip())
}

/// Pairs read from a directory, plus the ones that could not be read.
#[derive(Debug, Default)]
pub struct Loaded {
    pub pairs: Vec<CauseEffectPair>,
    pub skipped: Vec<Error>,
}

/// Reads every pair listed in `pairmeta.txt`.
///
/// A missing or malformed meta file fails the whole load. Problems with
/// individual pairs are logged and reported in [`Loaded::skipped`].
pub fn load_pairs(dir: &Path, tag: DatasetTag) -> Result<Loaded> {
    let meta_path = dir.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta = parse_meta(&text)?;
    let mut loaded = Loaded::default();
    for row in &meta {
        match load_one(dir, row, tag) {
            Ok(pair) => loaded.pairs.push(pair),
            Err(err) => {
                log::warn!("skipping {}: {err}", row.pair_id());
                loaded.skipped.push(err);
            }
        }
    }
    Ok(loaded)
}

/// Loads the Tübingen cause-effect pairs.
pub fn load_tuebingen(dir: &Path) -> Result<Loaded> {
    load_pairs(dir, DatasetTag::Cep)
}

/// Loads one of the simulated benchmark collections.
pub fn load_simulated(dir: &Path, tag: DatasetTag) -> Result<Loaded> {
    load_pairs(dir, tag)
}

/// Writes pairs as two-column files plus a meta file.
///
/// Values use the shortest representation that parses back to the same `f64`.
pub fn write_pairs(dir: &Path, pairs: &[CauseEffectPair]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut meta = String::new();
    for (i, pair) in pairs.iter().enumerate() {
        let meta_id = pair
            .id
            .strip_prefix("pair")
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .unwrap_or_else(|| format!("{:04}", i + 1));
        let (c, e) = match pair.truth {
            Direction::YtoX => (2, 1),
            _ => (1, 2),
        };
        writeln!(meta, "{meta_id} {c} {c} {e} {e} {}", pair.weight).expect("string write");
        let mut body = String::with_capacity(pair.len() * 40);
        for (x, y) in pair.x.iter().zip(&pair.y) {
            writeln!(body, "{x} {y}").expect("string write");
        }
        let row = MetaRow {
            id: meta_id,
            cause: (c, c),
            effect: (e, e),
            weight: pair.weight,
        };
        let path = dir.join(row.file_name());
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    let path = dir.join(META_FILE);
    fs::write(&path, meta).map_err(|e| Error::io(&path, e))
}
