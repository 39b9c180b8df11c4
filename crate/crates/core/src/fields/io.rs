//! Field files: a `#`-prefixed JSON header line followed by CSV rows
//! `x0,x1[,x2],u0,u1[,u2]`, one per node; or the same header followed by
//! little-endian `f64` node values, component-major.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub grid: Grid,
    pub boundary_flag: bool,
}

pub fn write_csv<W: Write>(u: &GridField, mut out: W) -> Result<()> {
    let header = FieldHeader { format: "csv".into(), grid: u.grid.clone(), boundary_flag: u.boundary_flag };
    writeln!(out, "#{}", serde_json::to_string(&header)?)?;
    let n = u.dim();
    for i in 0..u.grid.node_count() {
        let x = u.grid.node_coords(i);
        let mut row: Vec<String> = x[..n].iter().map(|v| format!("{v:e}")).collect();
        row.extend(u.components.iter().map(|c| format!("{:e}", c[i])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<GridField> {
    let mut lines = BufReader::new(input).lines();
    let first = lines.next().ok_or_else(|| Error::Config("empty field file".into()))??;
    let header: FieldHeader = serde_json::from_str(first.trim_start_matches('#'))?;
    let n = header.grid.dim;
    let mut components = vec![Vec::with_capacity(header.grid.node_count()); n];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| Error::Config(format!("bad number in field file: {e}")))?;
        if vals.len() != 2 * n {
            return Err(Error::Config(format!("expected {} columns, found {}", 2 * n, vals.len())));
        }
        for k in 0..n {
            components[k].push(vals[n + k]);
        }
    }
    GridField::new(header.grid, components, header.boundary_flag)
}

pub fn write_binary<W: Write>(u: &GridField, mut out: W) -> Result<()> {
    let header = FieldHeader { format: "f64le".into(), grid: u.grid.clone(), boundary_flag: u.boundary_flag };
    writeln!(out, "#{}", serde_json::to_string(&header)?)?;
    for c in &u.components {
        for v in c {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(input: R) -> Result<GridField> {
    let mut r = BufReader::new(input);
    let mut first = String::new();
    r.read_line(&mut first)?;
    let header: FieldHeader = serde_json::from_str(first.trim().trim_start_matches('#'))?;
    let count = header.grid.node_count();
    let mut components = Vec::with_capacity(header.grid.dim);
    let mut buf = [0u8; 8];
    for _ in 0..header.grid.dim {
        let mut c = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            c.push(f64::from_le_bytes(buf));
        }
        components.push(c);
    }
    GridField::new(header.grid, components, header.boundary_flag)
}
