//! Independent Rush Hour board simulator used to validate witnesses. It
//! only reads the `move` events and the final store of a trace; nothing
//! here goes through the transition engine.

use std::collections::BTreeSet;

use thiserror::Error;

use super::rush_hour::{Orientation, VehicleSpec, EXIT_COL, EXIT_ROW, GRID};
use crate::ast::PrimKind;
use crate::term::SiTerm;
use crate::trace::Trace;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("illegal move at step {step}: {reason}")]
    IllegalMove { step: usize, reason: String },
    #[error("red car does not leave the grid: {0}")]
    NotSolved(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Car {
    color: String,
    vertical: bool,
    len: u8,
    row: u8,
    col: u8,
}

impl Car {
    fn cells(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        (0..self.len).map(move |k| if self.vertical { (self.row + k, self.col) } else { (self.row, self.col + k) })
    }
}

/// A 6x6 board of vehicles, addressed by colour.
#[derive(Clone, Debug)]
pub struct Board {
    cars: Vec<Car>,
}

impl Board {
    pub fn new(vehicles: &[VehicleSpec]) -> Self {
        let cars = vehicles
            .iter()
            .map(|v| Car {
                color: v.color.to_string(),
                vertical: v.orientation == Orientation::V,
                len: v.kind.len(),
                row: v.row,
                col: v.col,
            })
            .collect();
        Board { cars }
    }

    pub fn occupied(&self) -> BTreeSet<(u8, u8)> {
        self.cars.iter().flat_map(|c| c.cells().collect::<Vec<_>>()).collect()
    }

    pub fn position(&self, color: &str) -> Option<(u8, u8)> {
        self.cars.iter().find(|c| c.color == color).map(|c| (c.row, c.col))
    }

    /// Moves `color` so its upper-left cell is `(row, col)`.
    pub fn apply_move(&mut self, color: &str, row: u8, col: u8) -> Result<(), String> {
        let i = self.cars.iter().position(|c| c.color == color).ok_or_else(|| format!("no vehicle `{color}`"))?;
        let car = &self.cars[i];
        let (dr, dc) = (row as i16 - car.row as i16, col as i16 - car.col as i16);
        let along = if car.vertical { dc == 0 && dr.abs() == 1 } else { dr == 0 && dc.abs() == 1 };
        if !along {
            return Err(format!("{color} cannot go from ({},{}) to ({row},{col})", car.row, car.col));
        }
        let moved = Car { row, col, ..car.clone() };
        let others: BTreeSet<(u8, u8)> =
            self.cars.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, c)| c.cells().collect::<Vec<_>>()).collect();
        for cell in moved.cells() {
            if cell.0 < 1 || cell.1 < 1 || cell.0 > GRID || cell.1 > GRID {
                return Err(format!("{color} leaves the grid at {cell:?}"));
            }
            if others.contains(&cell) {
                return Err(format!("{color} runs into an occupied cell {cell:?}"));
            }
        }
        self.cars[i] = moved;
        Ok(())
    }
}

fn small_int(t: &SiTerm) -> Option<u8> {
    match t {
        SiTerm::Int(i) => u8::try_from(*i).ok(),
        _ => None,
    }
}

/// Number of `move` events in a trace.
pub fn move_count(trace: &Trace) -> usize {
    trace.events().iter().filter(|(_, p)| matches!(&p.kind, PrimKind::Graphical(n) if &**n == "move")).count()
}

/// Replays the `move` events of `trace` on a board set up from `vehicles`.
/// Every move must shift one vehicle by one cell along its axis into free
/// cells. At the end the red car must be at the exit with `out` told, and
/// the `free` cells of the final store must be exactly the empty cells of
/// the board.
pub fn validate_solution(trace: &Trace, vehicles: &[VehicleSpec]) -> Result<(), OracleError> {
    let mut board = Board::new(vehicles);
    for (step, p) in trace.events() {
        let illegal = |reason: String| OracleError::IllegalMove { step, reason };
        if !matches!(&p.kind, PrimKind::Graphical(n) if &**n == "move") {
            continue;
        }
        let [color, r, c] = &p.args[..] else {
            return Err(illegal(format!("malformed event `{p}`")));
        };
        let (SiTerm::Token(color), Some(r), Some(c)) = (color, small_int(r), small_int(c)) else {
            return Err(illegal(format!("malformed event `{p}`")));
        };
        board.apply_move(color, r, c).map_err(illegal)?;
    }
    if board.position("red") != Some((EXIT_ROW, EXIT_COL)) {
        return Err(OracleError::NotSolved(format!("red car at {:?}", board.position("red"))));
    }
    let last = trace.final_store();
    if last.count(&SiTerm::token("out")) != 1 {
        return Err(OracleError::NotSolved("`out` is not in the final store".into()));
    }
    let occupied = board.occupied();
    for r in 1..=GRID {
        for c in 1..=GRID {
            let cell = SiTerm::compound("free", vec![SiTerm::Int(r.into()), SiTerm::Int(c.into())]);
            let want = u32::from(!occupied.contains(&(r, c)));
            if last.count(&cell) != want {
                return Err(OracleError::NotSolved(format!("store and board disagree on cell ({r},{c})")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::rush_hour::case_vehicles;
    use super::*;

    #[test]
    fn board_moves() {
        let mut b = Board::new(&case_vehicles(1).unwrap());
        // purple truck in column 4 rows 2-4 blocks the red car at (3,2)-(3,3)
        assert!(b.apply_move("red", 3, 3).is_err());
        assert!(b.apply_move("red", 4, 2).is_err());
        assert!(b.apply_move("red", 3, 1).is_ok());
        assert!(b.apply_move("purple", 1, 4).is_ok());
        assert!(b.apply_move("purple", 0, 4).is_err());
        assert!(b.apply_move("purple", 3, 5).is_err());
    }
}
