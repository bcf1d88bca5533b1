//! Synchronization matrix: battlefield-function rows by time-period columns.

use serde::{Deserialize, Serialize};

use crate::kb::BattlefieldFunction;
use crate::plan::Plan;
use crate::scenario::{ClockStart, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub node: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub function: BattlefieldFunction,
    /// One entry list per column.
    pub cells: Vec<Vec<MatrixEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynchronizationMatrix {
    pub clock_start: ClockStart,
    pub period_min: u32,
    /// `HH:MM` at the start of each column.
    pub columns: Vec<String>,
    pub rows: Vec<MatrixRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(MatrixFormat::Csv),
            "json" => Some(MatrixFormat::Json),
            _ => None,
        }
    }
}

pub fn node_label(side: Side, actor: &str, verb: &str) -> String {
    let base = format!("{} {verb}", actor.to_uppercase());
    match side {
        Side::Friendly => base,
        Side::Enemy => format!("EN {base}"),
    }
}

/// Places every scheduled node of `p` in each column its window overlaps.
/// Zero-duration nodes land in the column containing their start.
pub fn build_sync_matrix(p: &Plan, period_min: u32) -> SynchronizationMatrix {
    let period = i64::from(period_min.max(1));
    let horizon = p
        .nodes
        .iter()
        .filter_map(|n| n.window)
        .map(|w| w.end_min.max(w.start_min + 1))
        .max()
        .unwrap_or(0);
    let ncols = ((horizon + period - 1) / period).max(0) as usize;
    let mut rows: Vec<MatrixRow> = BattlefieldFunction::ALL
        .iter()
        .map(|&function| MatrixRow {
            function,
            cells: vec![Vec::new(); ncols],
        })
        .collect();
    let mut order: Vec<_> = p.nodes.iter().filter(|n| n.window.is_some()).collect();
    order.sort_by_key(|n| (n.window.unwrap().start_min, n.id));
    for n in order {
        let w = n.window.unwrap();
        let first = w.start_min.div_euclid(period).max(0);
        let last = if w.end_min > w.start_min {
            (w.end_min - 1).div_euclid(period)
        } else {
            first
        };
        let row = BattlefieldFunction::ALL
            .iter()
            .position(|&f| f == n.function)
            .unwrap();
        for c in first..=last.min(ncols as i64 - 1) {
            rows[row].cells[c as usize].push(MatrixEntry {
                node: n.id,
                label: node_label(n.side, &n.actor, &n.verb),
            });
        }
    }
    SynchronizationMatrix {
        clock_start: p.clock_start,
        period_min,
        columns: (0..ncols as i64)
            .map(|c| p.clock_start.label(c * period))
            .collect(),
        rows,
    }
}

fn to_csv(m: &SynchronizationMatrix) -> String {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Always)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["function".to_string()];
    header.extend(m.columns.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for r in &m.rows {
        let mut rec = vec![r.function.as_str().to_uppercase()];
        rec.extend(r.cells.iter().map(|c| {
            c.iter()
                .map(|e| e.label.as_str())
                .collect::<Vec<_>>()
                .join("; ")
        }));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 labels")
}

pub fn export_matrix(m: &SynchronizationMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => to_csv(m),
        MatrixFormat::Json => serde_json::to_string_pretty(m).expect("matrix serializes"),
    }
}

pub fn matrix_from_json(s: &str) -> serde_json::Result<SynchronizationMatrix> {
    serde_json::from_str(s)
}
