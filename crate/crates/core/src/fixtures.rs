//! Frozen regression values for quantities whose bounds exist but are not
//! effective: nilprogression and all-scales covering constants, growth,
//! the PSL₂ diameter table and scaling-limit sequences.
//!
//! Each fixture is one pretty-printed JSON file in a versioned directory.
//! Values are always computed with default caps so they do not depend on
//! run configuration.

use crate::cayley::babai_report;
use crate::error::{Error, Result};
use crate::group::zint::ZInt;
use crate::limits::{torus_limit_report, Family};
use crate::progressions::{all_scales_report, growth_profile, nilprogression_check, ProgressionSpec};
use crate::{Caps, Element, ElementSet, Group, GroupSpec};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub const VERSION: &str = "v1";

pub const NAMES: [&str; 5] = ["nilprog", "all-scales", "growth", "babai", "limits"];

pub const NILPROG_LENGTHS: [u32; 3] = [4, 6, 8];
pub const HEISENBERG_SCALES: (usize, usize) = (4, 10);
pub const GRID_SCALES: (usize, usize) = (2, 12);
pub const GROWTH_N_MAX: usize = 16;
pub const GROWTH_WINDOW: (usize, usize) = (8, 16);
pub const BABAI_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
pub const GRID_SIZES: [u64; 4] = [8, 16, 32, 64];
pub const CYCLE_SIZES: [u64; 3] = [16, 64, 256];
pub const QUOTIENT_SIZES: [u64; 3] = [4, 6, 8];

/// Directory shipped with the crate.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(VERSION)
}

fn heis(x: i64, y: i64) -> Element {
    Element::Heis(ZInt::Small(x), ZInt::Small(y), ZInt::Small(0))
}

/// `{1, X^{±1}, Y^{±1}}` in the integer Heisenberg group.
pub fn heisenberg_ball() -> Result<ElementSet> {
    let g = Group::new(GroupSpec::HeisenbergZ)?;
    Ok(ElementSet::new(&g, [heis(1, 0), heis(0, 1)])?.symmetrize())
}

/// `{0, ±e₁, ±e₂}` in `Z²`.
pub fn grid_ball() -> Result<ElementSet> {
    let g = Group::new(GroupSpec::FreeAbelian { d: 2 })?;
    Ok(ElementSet::new(&g, [Element::Ints(vec![1, 0]), Element::Ints(vec![0, 1])])?.symmetrize())
}

fn value(x: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Fresh value of one fixture.
pub fn compute(name: &str) -> Result<Value> {
    let caps = Caps::default();
    match name {
        "nilprog" => {
            let g = Group::new(GroupSpec::HeisenbergZ)?;
            let rows = NILPROG_LENGTHS
                .iter()
                .map(|&l| nilprogression_check(&ProgressionSpec::new(&g, vec![heis(1, 0), heis(0, 1)], vec![l, l])?))
                .collect::<Result<Vec<_>>>()?;
            value(json!({"group": "heisenberg-z", "rows": rows}))
        }
        "all-scales" => value(json!({
            "heisenberg-z": all_scales_report(&heisenberg_ball()?, HEISENBERG_SCALES)?,
            "free-abelian-2": all_scales_report(&grid_ball()?, GRID_SCALES)?,
        })),
        "growth" => value(growth_profile(&heisenberg_ball()?, GROWTH_N_MAX, GROWTH_WINDOW)?),
        "babai" => value(babai_report(&BABAI_PRIMES, &caps)?),
        "limits" => value(json!({
            "square-grid": torus_limit_report(Family::SquareGrid, &GRID_SIZES, &caps)?,
            "cycles": torus_limit_report(Family::Cycles, &CYCLE_SIZES, &caps)?,
            "heisenberg-quotient": torus_limit_report(Family::HeisenbergQuotient, &QUOTIENT_SIZES, &caps)?,
        })),
        _ => Err(Error::InvalidInput(format!("unknown fixture `{name}`"))),
    }
}

/// File contents for a fixture value: pretty JSON plus a trailing newline.
pub fn render(name: &str, data: &Value) -> String {
    let doc = json!({"version": VERSION, "name": name, "data": data});
    let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    s.push('\n');
    s
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.json"))
}

/// Recomputes every fixture and rewrites its file.
pub fn refresh(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    NAMES
        .iter()
        .map(|name| {
            let p = path(dir, name);
            std::fs::write(&p, render(name, &compute(name)?))?;
            Ok(p)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Match,
    Drift,
    Missing,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub status: Status,
}

/// Byte comparison of stored fixtures against fresh values.
pub fn check_one(dir: &Path, name: &str) -> Result<CheckRow> {
    let fresh = render(name, &compute(name)?);
    let status = match std::fs::read_to_string(path(dir, name)) {
        Ok(stored) if stored == fresh => Status::Match,
        Ok(_) => Status::Drift,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Status::Missing,
        Err(e) => return Err(e.into()),
    };
    Ok(CheckRow {
        name: name.to_string(),
        status,
    })
}

pub fn check(dir: &Path) -> Result<Vec<CheckRow>> {
    NAMES.iter().map(|n| check_one(dir, n)).collect()
}

/// Stored data of one fixture.
pub fn load(dir: &Path, name: &str) -> Result<Value> {
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path(dir, name))?)?;
    if doc["version"] != VERSION || doc["name"] != name {
        return Err(Error::InvalidInput(format!(
            "{} is not a {VERSION} `{name}` fixture",
            path(dir, name).display()
        )));
    }
    Ok(doc["data"].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_stable_and_tagged() {
        let v = json!({"b": 1, "a": [1, 2]});
        let s = render("growth", &v);
        assert!(s.ends_with("}\n"));
        assert_eq!(s, render("growth", &v));
        let doc: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(doc["version"], VERSION);
        assert_eq!(doc["data"], v);
    }

    #[test]
    fn unknown_fixture_is_rejected() {
        assert!(compute("nope").is_err());
    }

    #[test]
    fn refresh_then_check_round_trips() {
        let dir = tempdir();
        let p = path(&dir, "growth");
        std::fs::write(&p, render("growth", &compute("growth").unwrap())).unwrap();
        assert_eq!(check_one(&dir, "growth").unwrap().status, Status::Match);
        assert_eq!(check_one(&dir, "babai").unwrap().status, Status::Missing);
        std::fs::write(&p, "{}\n").unwrap();
        assert_eq!(check_one(&dir, "growth").unwrap().status, Status::Drift);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    fn tempdir() -> PathBuf {
        let d = std::env::temp_dir().join(format!("agtk-fixtures-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }
}
