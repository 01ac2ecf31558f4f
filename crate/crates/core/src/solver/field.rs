use crate::error::{Error, Result};
use crate::macro_model::ConservedState;
use crate::snapshot::Snapshot;

/// Cells of a periodic road. Cell `i` spans `[i dx, (i+1) dx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadField {
    cells: Vec<ConservedState>,
    dx: f64,
}

impl RoadField {
    pub fn new(cells: Vec<ConservedState>, length: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidConfig {
                field: "cells",
                reason: "a road needs at least one cell".into(),
            });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "length",
                reason: format!("{length} must be positive"),
            });
        }
        let dx = length / cells.len() as f64;
        Ok(Self { cells, dx })
    }

    pub fn cells(&self) -> &[ConservedState] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [ConservedState] {
        &mut self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.dx * self.cells.len() as f64
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn left_of(&self, i: usize) -> usize {
        if i == 0 {
            self.cells.len() - 1
        } else {
            i - 1
        }
    }

    #[inline]
    pub fn right_of(&self, i: usize) -> usize {
        if i + 1 == self.cells.len() {
            0
        } else {
            i + 1
        }
    }

    /// Total vehicle count `sum rho_i dx`, summed in cell order.
    pub fn total_vehicles(&self) -> f64 {
        self.cells.iter().map(|c| c.rho).sum::<f64>() * self.dx
    }

    pub fn snapshot(&self, t: f64) -> Snapshot {
        let n = self.len();
        let mut snapshot = Snapshot {
            t,
            x: Vec::with_capacity(n),
            rho: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
        };
        for (i, cell) in self.cells.iter().enumerate() {
            snapshot.x.push(self.cell_center(i));
            snapshot.rho.push(cell.rho);
            snapshot.v.push(cell.velocity());
            snapshot.q.push(cell.q);
        }
        snapshot
    }
}
