//! Rush Hour benchmark: test-case generation, an independent board oracle
//! and a harness comparing the guarded-list and sequential variants.

mod oracle;
mod rush_hour;

use std::fmt::Write as _;
use std::time::Duration;

pub use oracle::{move_count, validate_solution, Board, OracleError};
pub use rush_hour::{
    case_vehicles, generate_rush_hour, rush_hour_source, rush_hour_source_for, validate_placement, Kind, Orientation,
    PlacementError, Variant, VehicleSpec, CASES, COLORS, EXIT_COL, EXIT_ROW, GRID,
};

use crate::checker::{check, replay, CheckOptions, CheckResult, Limits, Verdict};
use crate::trace::Trace;

/// One case of the benchmark in one variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub case: usize,
    pub variant: Variant,
}

impl Cell {
    pub fn new(case: usize, variant: Variant) -> Self {
        Cell { case, variant }
    }
}

/// Cases 1 to 5 with guarded lists and 1 to 3 without: what fits in a few
/// minutes on a desktop.
pub fn default_cells() -> Vec<Cell> {
    let gl = (1..=5).map(|c| Cell::new(c, Variant::GL));
    let nogl = (1..=3).map(|c| Cell::new(c, Variant::NoGL));
    gl.chain(nogl).collect()
}

/// Both variants of each listed case.
pub fn both_variants(cases: &[usize]) -> Vec<Cell> {
    cases.iter().flat_map(|&c| [Cell::new(c, Variant::GL), Cell::new(c, Variant::NoGL)]).collect()
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub limits: Limits,
    pub repeats: usize,
    pub workers: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { limits: Limits::default(), repeats: 3, workers: 1 }
    }
}

/// Outcome of one cell. Timings are medians over the repeats; state counts
/// are the same on every repeat.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub cell: Cell,
    pub vehicles: usize,
    pub result: CheckResult,
    pub wall: Duration,
    /// `Some(Ok)` when the witness replayed and passed the board oracle.
    pub validation: Option<Result<(), String>>,
}

impl BenchRow {
    pub fn wall_ms(&self) -> f64 {
        self.wall.as_secs_f64() * 1e3
    }

    pub fn witness(&self) -> Option<&Trace> {
        self.result.verdict.witness()
    }

    pub fn completed(&self) -> bool {
        !matches!(self.result.verdict, Verdict::Unknown { .. })
    }

    pub fn validated(&self) -> bool {
        matches!(self.validation, Some(Ok(())))
    }
}

/// GL against NoGL for one case; only built when both completed.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub case: usize,
    /// NoGL wall time over GL wall time.
    pub speedup: f64,
    /// NoGL states expanded over GL states expanded.
    pub state_ratio: f64,
    /// `2^n` for `n` vehicles: each move saves two of four stores per vehicle.
    pub expected_gain: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, case: usize, variant: Variant) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.cell == Cell::new(case, variant))
    }

    pub fn comparisons(&self) -> Vec<Comparison> {
        let mut cases: Vec<usize> = self.rows.iter().map(|r| r.cell.case).collect();
        cases.sort_unstable();
        cases.dedup();
        cases
            .into_iter()
            .filter_map(|case| {
                let gl = self.row(case, Variant::GL).filter(|r| r.completed())?;
                let nogl = self.row(case, Variant::NoGL).filter(|r| r.completed())?;
                Some(Comparison {
                    case,
                    speedup: nogl.wall.as_secs_f64() / gl.wall.as_secs_f64().max(1e-9),
                    state_ratio: nogl.result.stats.states_expanded as f64 / gl.result.stats.states_expanded.max(1) as f64,
                    expected_gain: 2f64.powi(gl.vehicles as i32),
                })
            })
            .collect()
    }

    /// True when every cell completed with a validated witness.
    pub fn all_validated(&self) -> bool {
        self.rows.iter().all(BenchRow::validated)
    }

    /// Aligned table, then the comparisons, then one `key: value` block
    /// per cell using the checker's field names.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>7} {:>9} {:>12} {:>12} {:>10} {:>8}  {}",
            "case", "variant", "verdict", "states", "wall_ms", "frontier", "witness", "oracle"
        );
        for r in &self.rows {
            let s = &r.result.stats;
            let oracle = match &r.validation {
                None => "-".to_string(),
                Some(Ok(())) => "ok".to_string(),
                Some(Err(e)) => format!("FAIL {e}"),
            };
            let _ = writeln!(
                out,
                "{:>4} {:>7} {:>9} {:>12} {:>12.1} {:>10} {:>8}  {}",
                r.cell.case,
                r.cell.variant.as_str(),
                r.result.verdict.name(),
                s.states_expanded,
                r.wall_ms(),
                s.max_frontier,
                r.result.witness_len().map_or("-".to_string(), |n| n.to_string()),
                oracle
            );
        }
        let cmp = self.comparisons();
        if !cmp.is_empty() {
            out.push('\n');
            let _ = writeln!(out, "{:>4} {:>10} {:>12} {:>14}", "case", "speedup", "state_ratio", "expected_gain");
            for c in &cmp {
                let _ = writeln!(out, "{:>4} {:>10.2} {:>12.2} {:>14}", c.case, c.speedup, c.state_ratio, c.expected_gain);
            }
        }
        for r in &self.rows {
            let _ = writeln!(out, "\n[case {} {}]", r.cell.case, r.cell.variant);
            let mut timed = r.result.clone();
            timed.stats.wall = r.wall;
            out.push_str(&timed.report(true));
        }
        out
    }
}

/// Runs `check(Reach(#out = 1))` on every cell. Each witness is replayed on
/// its own program and validated by the board oracle; a GL witness is also
/// expanded and replayed on the NoGL program. Limits turn into `unknown`
/// rows, never errors.
pub fn run_benchmark(cells: &[Cell], opts: &BenchOptions) -> Result<BenchReport, PlacementError> {
    let mut report = BenchReport::default();
    for &cell in cells {
        report.rows.push(run_cell(cell, opts)?);
    }
    Ok(report)
}

fn run_cell(cell: Cell, opts: &BenchOptions) -> Result<BenchRow, PlacementError> {
    let vehicles = case_vehicles(cell.case).ok_or(PlacementError::UnknownCase(cell.case))?;
    let prog = generate_rush_hour(cell.case, cell.variant)?;
    let goal = prog.formula("goal").expect("generated programs declare `goal`").clone();
    let check_opts = CheckOptions { limits: opts.limits, workers: opts.workers };
    let mut walls = Vec::new();
    let mut result = None;
    for _ in 0..opts.repeats.max(1) {
        let r = check(&prog, &goal, check_opts);
        walls.push(r.stats.wall);
        result = Some(r);
    }
    let result = result.expect("at least one repeat");
    walls.sort_unstable();
    let wall = walls[walls.len() / 2];
    let validation = result.verdict.witness().map(|w| validate(cell, w, &vehicles));
    Ok(BenchRow { cell, vehicles: vehicles.len(), result, wall, validation })
}

fn validate(cell: Cell, witness: &Trace, vehicles: &[VehicleSpec]) -> Result<(), String> {
    let prog = generate_rush_hour(cell.case, cell.variant).map_err(|e| e.to_string())?;
    replay(witness, &prog).map_err(|e| e.to_string())?;
    validate_solution(witness, vehicles).map_err(|e| e.to_string())?;
    if cell.variant == Variant::GL {
        let seq = generate_rush_hour(cell.case, Variant::NoGL).map_err(|e| e.to_string())?;
        replay(&witness.expand_guarded(), &seq).map_err(|e| format!("expanded witness on NoGL: {e}"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_case_list() {
        let r = run_benchmark(&[], &BenchOptions::default()).unwrap();
        assert!(r.rows.is_empty() && r.comparisons().is_empty());
    }

    #[test]
    fn case_one_both_variants() {
        let opts = BenchOptions { repeats: 1, ..BenchOptions::default() };
        let r = run_benchmark(&both_variants(&[1]), &opts).unwrap();
        assert!(r.all_validated(), "{}", r.render());
        let gl = r.row(1, Variant::GL).unwrap();
        let nogl = r.row(1, Variant::NoGL).unwrap();
        assert!(gl.result.stats.states_expanded < nogl.result.stats.states_expanded);
        // same puzzle, same number of moves in a shortest solution
        assert_eq!(move_count(gl.witness().unwrap()), move_count(nogl.witness().unwrap()));
        assert_eq!(r.comparisons()[0].expected_gain, 4.0);
    }

    #[test]
    fn limits_give_unknown_rows() {
        let opts = BenchOptions { repeats: 1, limits: Limits::states(10), workers: 1 };
        let r = run_benchmark(&[Cell::new(1, Variant::GL)], &opts).unwrap();
        assert!(!r.rows[0].completed());
        assert!(r.comparisons().is_empty());
    }
}
