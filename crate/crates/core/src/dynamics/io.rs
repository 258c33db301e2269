//! Trajectory export and import.
//!
//! CSV layout: header `t,agent,component,value`, one row per node, agent and
//! coordinate. Reals are written with 17 significant digits so grid times
//! survive a text round trip bit for bit.

use std::io::{Read, Write};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::State;

pub const TRAJECTORY_CSV_HEADER: [&str; 4] = ["t", "agent", "component", "value"];

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_CSV_HEADER)?;
    let n = tr.config().n_agents;
    let d = tr.config().dim;
    for (k, &t) in tr.grid().iter().enumerate() {
        let ts = fmt_real(t);
        let row = tr.node_slice(k);
        for i in 0..n {
            for c in 0..d {
                w.write_record([ts.as_str(), &i.to_string(), &c.to_string(), &fmt_real(row[i * d + c])])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Grid and node states recovered from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub n_agents: usize,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub states: Vec<State>,
}

impl TrajectoryTable {
    pub fn from_trajectory(tr: &Trajectory) -> Self {
        TrajectoryTable {
            n_agents: tr.config().n_agents,
            dim: tr.config().dim,
            grid: tr.grid().to_vec(),
            states: (0..tr.len()).map(|k| tr.node_state(k)).collect(),
        }
    }
}

fn parse_real(field: &str, what: &str, line: u64) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: {what} '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: {what} is not finite")));
    }
    Ok(v)
}

fn parse_index(field: &str, what: &str, line: u64) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: {what} '{field}' is not a non-negative integer")))
}

/// Reads a trajectory CSV. Rows of one node must be contiguous and carry every
/// `(agent, component)` pair exactly once; node times must increase.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != TRAJECTORY_CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }

    struct Group {
        t: f64,
        entries: Vec<(usize, usize, f64)>,
    }
    let mut groups: Vec<Group> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(Error::Parse(format!("line {line}: expected 4 fields, got {}", rec.len())));
        }
        let t = parse_real(&rec[0], "time", line)?;
        let agent = parse_index(&rec[1], "agent", line)?;
        let comp = parse_index(&rec[2], "component", line)?;
        let value = parse_real(&rec[3], "value", line)?;
        match groups.last_mut() {
            Some(g) if g.t.to_bits() == t.to_bits() => g.entries.push((agent, comp, value)),
            Some(g) if t <= g.t => {
                return Err(Error::Parse(format!("line {line}: time {t} does not increase")));
            }
            _ => groups.push(Group {
                t,
                entries: vec![(agent, comp, value)],
            }),
        }
    }
    let first = groups.first().ok_or_else(|| Error::Parse("no data rows".into()))?;
    let overflow = || Error::Parse("agent/component indices overflow".into());
    let n = first.entries.iter().map(|e| e.0).max().unwrap_or(0).checked_add(1).ok_or_else(overflow)?;
    let d = first.entries.iter().map(|e| e.1).max().unwrap_or(0).checked_add(1).ok_or_else(overflow)?;
    let width = n.checked_mul(d).ok_or_else(overflow)?;

    let mut grid = Vec::with_capacity(groups.len());
    let mut states = Vec::with_capacity(groups.len());
    for g in groups {
        if g.entries.len() != width {
            return Err(Error::Parse(format!(
                "node t={} has {} rows, expected {n} agents x {d} components",
                g.t,
                g.entries.len()
            )));
        }
        let mut data = vec![f64::NAN; width];
        for (agent, comp, value) in g.entries {
            if agent >= n || comp >= d {
                return Err(Error::Parse(format!("node t={}: index ({agent}, {comp}) out of range", g.t)));
            }
            let slot = &mut data[agent * d + comp];
            if !slot.is_nan() {
                return Err(Error::Parse(format!("node t={}: duplicate entry ({agent}, {comp})", g.t)));
            }
            *slot = value;
        }
        grid.push(g.t);
        states.push(State::from_flat(n, d, data));
    }
    Ok(TrajectoryTable {
        n_agents: n,
        dim: d,
        grid,
        states,
    })
}
