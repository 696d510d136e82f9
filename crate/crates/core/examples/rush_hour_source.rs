//! Print the generated source of a Rush Hour case.
//!
//! cargo run --example rush_hour_source CASE [GL|NoGL]

use gbach::bench::{case_vehicles, rush_hour_source, Variant};

fn main() {
    let mut args = std::env::args().skip(1);
    let case: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let variant: Variant = args.next().map(|v| v.parse().unwrap()).unwrap_or(Variant::GL);
    let names: Vec<String> = case_vehicles(case).unwrap_or_default().iter().map(ToString::to_string).collect();
    eprintln!("vehicles: {}", names.join(", "));
    print!("{}", rush_hour_source(case, variant).unwrap());
}
