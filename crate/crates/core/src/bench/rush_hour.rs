use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::ast::Program;
use crate::parser::parse_program;

/// Board side.
pub const GRID: u8 = 6;

/// Row of the red car and of the exit.
pub const EXIT_ROW: u8 = 3;

/// Left-most column of the red car when it leaves the grid.
pub const EXIT_COL: u8 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Car,
    Truck,
}

impl Kind {
    pub fn len(self) -> u8 {
        match self {
            Kind::Car => 2,
            Kind::Truck => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    H,
    V,
}

/// A vehicle identified by its upper / left-most cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VehicleSpec {
    pub kind: Kind,
    pub orientation: Orientation,
    pub row: u8,
    pub col: u8,
    /// Colour tag; also the vehicle's identity in `move` events.
    pub color: &'static str,
}

impl VehicleSpec {
    pub const fn new(kind: Kind, orientation: Orientation, row: u8, col: u8, color: &'static str) -> Self {
        VehicleSpec { kind, orientation, row, col, color }
    }

    pub fn cells(&self) -> Vec<(u8, u8)> {
        (0..self.kind.len())
            .map(|k| match self.orientation {
                Orientation::H => (self.row, self.col + k),
                Orientation::V => (self.row + k, self.col),
            })
            .collect()
    }

    /// Name of the generic procedure driving this vehicle.
    pub fn procedure(&self) -> &'static str {
        match (self.orientation, self.kind) {
            (Orientation::V, Kind::Truck) => "VTruck",
            (Orientation::V, Kind::Car) => "VCar",
            (Orientation::H, Kind::Truck) => "HTruck",
            (Orientation::H, Kind::Car) => "HCar",
        }
    }
}

/// `VPurpleTruck(2,4)`
impl fmt::Display for VehicleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::H => "H",
            Orientation::V => "V",
        };
        let k = match self.kind {
            Kind::Car => "Car",
            Kind::Truck => "Truck",
        };
        // darkgreen is how the second green vehicle is told apart
        let color = match self.color {
            "darkgreen" => "Green".to_string(),
            c => capitalize(c),
        };
        write!(f, "{o}{color}{k}({},{})", self.row, self.col)
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|h| h.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Colours used by the generated programs.
pub const COLORS: &[&str] = &["purple", "red", "green", "orange", "blue", "darkgreen", "yellow"];

use Kind::{Car, Truck};
use Orientation::{H, V};

const PURPLE_TRUCK_1: VehicleSpec = VehicleSpec::new(Truck, V, 2, 4, "purple");
const PURPLE_TRUCK: VehicleSpec = VehicleSpec::new(Truck, V, 2, 1, "purple");
const RED_CAR: VehicleSpec = VehicleSpec::new(Car, H, 3, 2, "red");
const GREEN_CAR: VehicleSpec = VehicleSpec::new(Car, H, 1, 1, "green");
const ORANGE_CAR: VehicleSpec = VehicleSpec::new(Car, V, 5, 1, "orange");
const BLUE_TRUCK: VehicleSpec = VehicleSpec::new(Truck, V, 2, 4, "blue");
const GREEN_TRUCK: VehicleSpec = VehicleSpec::new(Truck, H, 6, 3, "darkgreen");
const YELLOW_TRUCK: VehicleSpec = VehicleSpec::new(Truck, V, 1, 6, "yellow");

/// Number of test cases.
pub const CASES: usize = 6;

/// The vehicles of test case `case` (1-based), in the order listed by the
/// benchmark table. Case 1 puts the purple truck in column 4, the other
/// cases in column 1, as in the table.
pub fn case_vehicles(case: usize) -> Option<Vec<VehicleSpec>> {
    let all = [PURPLE_TRUCK, RED_CAR, GREEN_CAR, ORANGE_CAR, BLUE_TRUCK, GREEN_TRUCK, YELLOW_TRUCK];
    match case {
        1 => Some(vec![PURPLE_TRUCK_1, RED_CAR]),
        2..=CASES => Some(all[..case + 1].to_vec()),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Moves written as `[get -> move, tell]`.
    GL,
    /// Moves written as `get; move; tell`.
    NoGL,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::GL => "GL",
            Variant::NoGL => "NoGL",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Variant::GL),
            "nogl" => Ok(Variant::NoGL),
            _ => Err(format!("unknown variant `{s}` (expected GL or NoGL)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlacementError {
    #[error("no test case {0} (cases are 1 to 6)")]
    UnknownCase(usize),
    #[error("{0} does not fit on the grid")]
    OffGrid(String),
    #[error("{0} and {1} overlap")]
    InvalidPlacement(String, String),
    #[error("the red car must be horizontal on row 3")]
    RedCar,
}

/// Checks that vehicles are on the grid and pairwise disjoint, and that the
/// red car sits on the exit row.
pub fn validate_placement(vehicles: &[VehicleSpec]) -> Result<(), PlacementError> {
    for (i, v) in vehicles.iter().enumerate() {
        if v.row < 1 || v.col < 1 || v.cells().iter().any(|&(r, c)| r > GRID || c > GRID) {
            return Err(PlacementError::OffGrid(v.to_string()));
        }
        if v.color == "red" && (v.orientation != H || v.row != EXIT_ROW) {
            return Err(PlacementError::RedCar);
        }
        for w in &vehicles[..i] {
            if v.cells().iter().any(|c| w.cells().contains(c)) {
                return Err(PlacementError::InvalidPlacement(w.to_string(), v.to_string()));
            }
        }
    }
    Ok(())
}

fn free_cells(vehicles: &[VehicleSpec]) -> Vec<(u8, u8)> {
    let taken: Vec<(u8, u8)> = vehicles.iter().flat_map(VehicleSpec::cells).collect();
    (1..=GRID).flat_map(|r| (1..=GRID).map(move |c| (r, c))).filter(|rc| !taken.contains(rc)).collect()
}

/// One move of a vehicle procedure: condition, the cell taken, the new
/// position passed to `move`, the cell freed, and the recursive call.
struct Move {
    cond: &'static str,
    take: &'static str,
    to: &'static str,
    free: &'static str,
    call: &'static str,
}

fn procedure(out: &mut String, name: &str, moves: &[Move], exit: bool, variant: Variant) {
    let _ = writeln!(out, "proc {name}(r: RCInt, c: RCInt, p: Colors) =");
    for (i, m) in moves.iter().enumerate() {
        let lead = if i == 0 { "      " } else { "    + " };
        let step = match variant {
            Variant::GL => format!("[get(free({})) -> move(p,{}), tell(free({}))]", m.take, m.to, m.free),
            Variant::NoGL => format!("get(free({})); move(p,{}); tell(free({}))", m.take, m.to, m.free),
        };
        let end = if i + 1 == moves.len() && !exit { "." } else { "" };
        let _ = writeln!(out, "{lead}({}) -> {step}; {name}({}){end}", m.cond, m.call);
    }
    if exit {
        let _ = writeln!(out, "    + (p = red & c = {EXIT_COL}) -> tell(out).");
    }
}

fn int_map(out: &mut String, name: &str, pairs: impl Iterator<Item = (u8, u8)>) {
    let _ = writeln!(out, "map {name} : RCInt -> RCInt.");
    let eqns: Vec<String> = pairs.map(|(a, b)| format!("{name}({a}) = {b}.")).collect();
    let _ = writeln!(out, "eqn {}", eqns.join(" "));
}

/// Source text of a test case.
pub fn rush_hour_source(case: usize, variant: Variant) -> Result<String, PlacementError> {
    let vehicles = case_vehicles(case).ok_or(PlacementError::UnknownCase(case))?;
    rush_hour_source_for(&vehicles, &format!("case {case}"), variant)
}

/// Source text for an arbitrary placement. The program declares the grid
/// coordinates, the four generic vehicle procedures, the `out` goal and a
/// main agent that fills in the free cells and then runs every vehicle in
/// parallel.
pub fn rush_hour_source_for(vehicles: &[VehicleSpec], title: &str, variant: Variant) -> Result<String, PlacementError> {
    validate_placement(vehicles)?;
    let mut out = String::new();
    let _ = writeln!(out, "// Rush Hour, {title}, {variant} variant");
    let _ = writeln!(out, "eset RCInt = {{1, 2, 3, 4, 5, 6}}.");
    let _ = writeln!(out, "eset Colors = {{{}}}.", COLORS.join(", "));
    int_map(&mut out, "pred", (2..=GRID).map(|r| (r, r - 1)));
    int_map(&mut out, "succ", (1..GRID).map(|r| (r, r + 1)));
    int_map(&mut out, "down_truck", (1..=GRID - 3).map(|r| (r, r + 3)));
    int_map(&mut out, "right_truck", (1..=GRID - 3).map(|c| (c, c + 3)));
    let _ = writeln!(out, "gprim move.");
    procedure(
        &mut out,
        "VTruck",
        &[
            Move { cond: "r > 1 & r < 5", take: "pred(r),c", to: "pred(r),c", free: "succ(succ(r)),c", call: "pred(r),c,p" },
            Move { cond: "r < 4", take: "down_truck(r),c", to: "succ(r),c", free: "r,c", call: "succ(r),c,p" },
        ],
        false,
        variant,
    );
    procedure(
        &mut out,
        "VCar",
        &[
            Move { cond: "r > 1", take: "pred(r),c", to: "pred(r),c", free: "succ(r),c", call: "pred(r),c,p" },
            Move { cond: "r < 5", take: "succ(succ(r)),c", to: "succ(r),c", free: "r,c", call: "succ(r),c,p" },
        ],
        false,
        variant,
    );
    procedure(
        &mut out,
        "HTruck",
        &[
            Move { cond: "c > 1 & c < 5", take: "r,pred(c)", to: "r,pred(c)", free: "r,succ(succ(c))", call: "r,pred(c),p" },
            Move { cond: "c < 4", take: "r,right_truck(c)", to: "r,succ(c)", free: "r,c", call: "r,succ(c),p" },
        ],
        false,
        variant,
    );
    procedure(
        &mut out,
        "HCar",
        &[
            Move { cond: "c > 1", take: "r,pred(c)", to: "r,pred(c)", free: "r,succ(c)", call: "r,pred(c),p" },
            Move { cond: "c < 5", take: "r,succ(succ(c))", to: "r,succ(c)", free: "r,c", call: "r,succ(c),p" },
        ],
        true,
        variant,
    );
    let _ = writeln!(out, "formula goal = Reach(#out = 1).");

    let tells: Vec<String> = free_cells(vehicles).iter().map(|(r, c)| format!("tell(free({r},{c}))")).collect();
    let init = match (variant, tells.split_first()) {
        (_, None) => String::new(),
        (Variant::GL, Some((first, rest))) if !rest.is_empty() => format!("[{first} -> {}]; ", rest.join(", ")),
        _ => format!("{}; ", tells.join("; ")),
    };
    let cars: Vec<String> =
        vehicles.iter().map(|v| format!("{}({},{},{})", v.procedure(), v.row, v.col, v.color)).collect();
    let _ = writeln!(out, "run {init}({}).", cars.join(" || "));
    Ok(out)
}

/// Parsed and checked program of a test case.
pub fn generate_rush_hour(case: usize, variant: Variant) -> Result<Program, PlacementError> {
    let src = rush_hour_source(case, variant)?;
    Ok(parse_program(&src).unwrap_or_else(|d| panic!("generated program does not parse: {d:?}\n{src}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_match_the_table() {
        let names = |c| case_vehicles(c).unwrap().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        assert_eq!(names(1), "VPurpleTruck(2,4), HRedCar(3,2)");
        assert_eq!(
            names(6),
            "VPurpleTruck(2,1), HRedCar(3,2), HGreenCar(1,1), VOrangeCar(5,1), VBlueTruck(2,4), HGreenTruck(6,3), VYellowTruck(1,6)"
        );
        for c in 1..=CASES {
            assert_eq!(case_vehicles(c).unwrap().len(), c + 1);
        }
        assert!(case_vehicles(7).is_none());
    }

    #[test]
    fn every_case_generates_a_valid_program() {
        for c in 1..=CASES {
            for v in [Variant::GL, Variant::NoGL] {
                let p = generate_rush_hour(c, v).unwrap();
                assert!(p.formula("goal").is_some());
            }
        }
    }

    #[test]
    fn overlapping_vehicles_are_rejected() {
        let bad = [RED_CAR, VehicleSpec::new(Truck, V, 1, 3, "blue")];
        assert!(matches!(rush_hour_source_for(&bad, "bad", Variant::GL), Err(PlacementError::InvalidPlacement(..))));
        let off = [VehicleSpec::new(Truck, V, 5, 3, "blue")];
        assert!(matches!(validate_placement(&off), Err(PlacementError::OffGrid(_))));
    }

    #[test]
    fn variants_differ_only_in_move_chains() {
        let gl = rush_hour_source(1, Variant::GL).unwrap();
        let nogl = rush_hour_source(1, Variant::NoGL).unwrap();
        let norm = |s: &str| s.replace(['[', ']'], "").replace(" -> move", "; move").replace("), tell", "); tell").replace(" -> tell", "; tell");
        let strip_header = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert_eq!(strip_header(&norm(&gl)), strip_header(&norm(&nogl)));
    }
}
