//! Per-field byte counts of every message in a default run.

use mvno_aka::harness::{run_scenario, ScenarioConfig};
use mvno_aka::wire::{decode, measure, Frame};

fn main() {
    let t = run_scenario(&ScenarioConfig::default()).unwrap();
    let mut seen = Vec::new();
    for e in &t.events {
        let msg = decode(&Frame::from_bytes(&e.frame).unwrap().payload).unwrap();
        if seen.contains(&msg.name()) {
            continue;
        }
        seen.push(msg.name());
        println!("{}", measure(&msg).unwrap().to_json());
    }
}
