//! Per-message cost table, the reference comparison, and threaded
//! throughput. Pass a list size as the first argument (default 8).

use mvno_aka::harness::bench::{bench, bench_concurrent};
use mvno_aka::harness::ScenarioConfig;

fn main() {
    let list_size = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(8);
    let config = ScenarioConfig {
        list_size,
        ..Default::default()
    };
    let report = bench(&config, 20).unwrap();
    print!("{}", report.to_csv());
    println!();
    print!("{}", report.comparison_table());
    println!("ordering M1 < M4 < M3 < M2: {}", report.ordering_holds());
    println!(
        "end-to-end AKA: mean {:.2} ms, p95 {:.2} ms",
        report.end_to_end.mean_ms, report.end_to_end.p95_ms
    );

    let threaded = ScenarioConfig {
        n_ues: 4,
        list_size: list_size.max(4),
        ..Default::default()
    };
    let t = bench_concurrent(&threaded, 5).unwrap();
    println!(
        "threaded: {}/{} runs accepted, {:.0} runs/s",
        t.accepted, t.runs, t.runs_per_sec
    );
}
