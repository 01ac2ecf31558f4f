//! Field snapshots and their CSV representation.
//!
//! One file per snapshot, header `t,x,rho,v,q`, one row per cell in order of
//! increasing `x`. Values are written with 17 significant digits so that
//! reading a file back reproduces every `f64` bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: &str = "t,x,rho,v,q";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Simulated time [s].
    pub t: f64,
    /// Cell centres [m].
    pub x: Vec<f64>,
    /// Density [veh/m].
    pub rho: Vec<f64>,
    /// Velocity [m/s].
    pub v: Vec<f64>,
    /// Flow [veh/s].
    pub q: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed snapshot CSV, record {record}: {reason}")]
    Format { record: usize, reason: String },
}

#[derive(Deserialize)]
struct Row {
    t: f64,
    x: f64,
    rho: f64,
    v: f64,
    q: f64,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Writes the CSV form and returns the number of bytes written.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> std::io::Result<usize> {
        let mut out = String::with_capacity(32 + self.len() * 5 * 24);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            use std::fmt::Write as _;
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.t, self.x[i], self.rho[i], self.v[i], self.q[i]
            );
        }
        sink.write_all(out.as_bytes())?;
        Ok(out.len())
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self, SnapshotError> {
        let mut reader = csv::Reader::from_reader(source);
        let header = reader.headers()?.clone();
        if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
            return Err(SnapshotError::Format {
                record: 0,
                reason: format!("expected header `{CSV_HEADER}`"),
            });
        }
        let mut snapshot = Snapshot {
            t: f64::NAN,
            x: Vec::new(),
            rho: Vec::new(),
            v: Vec::new(),
            q: Vec::new(),
        };
        for (index, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            if index == 0 {
                snapshot.t = row.t;
            } else if row.t.to_bits() != snapshot.t.to_bits() {
                return Err(SnapshotError::Format {
                    record: index + 1,
                    reason: format!("time {} differs from {}", row.t, snapshot.t),
                });
            }
            if let Some(&last) = snapshot.x.last() {
                if !(row.x > last) {
                    return Err(SnapshotError::Format {
                        record: index + 1,
                        reason: "x must be strictly increasing".into(),
                    });
                }
            }
            snapshot.x.push(row.x);
            snapshot.rho.push(row.rho);
            snapshot.v.push(row.v);
            snapshot.q.push(row.q);
        }
        if snapshot.is_empty() {
            return Err(SnapshotError::Format {
                record: 1,
                reason: "no data rows".into(),
            });
        }
        Ok(snapshot)
    }
}
