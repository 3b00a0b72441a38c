//! CSV and JSON writers. Every number is checked for finiteness before it is written.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use zeta_core::{EnergyProfile, Grid, GridKind};

pub const PROFILE_HEADER: &str = "r,phi,zeta,dzeta,lambda_r,starts_used,iterations,level_error,stationarity";

fn num(x: f64) -> Result<String> {
    if !x.is_finite() {
        bail!("refusing to write non-finite value {x}");
    }
    Ok(format!("{x:.16e}"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn profile_csv(profile: &EnergyProfile) -> Result<String> {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for s in &profile.samples {
        let d = &s.detail;
        let cells = [
            num(s.r)?,
            num(s.phi)?,
            num(s.zeta)?,
            num(s.dzeta)?,
            num(s.lambda_r)?,
            d.starts_used.to_string(),
            d.iterations.to_string(),
            num(d.level_error)?,
            num(d.stationarity)?,
        ];
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(out)
}

pub fn write_profile(path: &Path, profile: &EnergyProfile) -> Result<()> {
    write(path, &profile_csv(profile)?)
}

/// Nodal values with coordinates: `x,u` on lines and radial grids, `x,y,u` on rectangles.
pub fn field_csv(grid: &Grid, u: &[f64]) -> Result<String> {
    let mut out = String::from(match grid.kind() {
        GridKind::Rectangle => "x,y,u\n",
        GridKind::Interval | GridKind::Radial => "x,u\n",
    });
    for (k, &v) in u.iter().enumerate() {
        let mut cells: Vec<String> = grid.node(k).into_iter().map(num).collect::<Result<_>>()?;
        cells.push(num(v)?);
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(out)
}

pub fn write_field(path: &Path, grid: &Grid, u: &[f64]) -> Result<()> {
    write(path, &field_csv(grid, u)?)
}

fn check_finite(v: &serde_json::Value) -> Result<()> {
    match v {
        serde_json::Value::Number(n) if !n.as_f64().is_some_and(f64::is_finite) => bail!("non-finite number in JSON"),
        serde_json::Value::Array(a) => a.iter().try_for_each(check_finite),
        serde_json::Value::Object(o) => o.values().try_for_each(check_finite),
        _ => Ok(()),
    }
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    // serde_json turns NaN and infinities into null
    if let serde_json::Value::Object(o) = &v {
        if let Some((k, _)) = o.iter().find(|(_, x)| x.is_null()) {
            bail!("field {k} is not a finite number");
        }
    }
    check_finite(&v)?;
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &json_string(value)?)
}

pub fn write_json_lines<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut out = String::new();
    for r in rows {
        let line = serde_json::to_string(r)?;
        check_finite(&serde_json::from_str(&line)?)?;
        out.push_str(&line);
        out.push('\n');
    }
    write(path, &out)
}
