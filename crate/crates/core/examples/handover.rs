//! Handover between cells on the simulated network. The target cell checks
//! the UE against its local UID list; the core network never hears of it.

use mvno_aka::harness::{NodeId, ScenarioConfig, Step, World};

fn main() {
    let mut w = World::new(ScenarioConfig {
        n_ues: 2,
        n_gnbs: 3,
        ..Default::default()
    })
    .unwrap();
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
        Step::Handover { ue: 0, gnb: 2 },
        Step::Aka { ue: 1, gnb: 2 },
        Step::Handover { ue: 1, gnb: 0 },
    ]);
    let t = w.transcript();
    for r in &t.runs {
        let cn_hops = t.run_events(r.id).filter(|e| e.touches(NodeId::Cn)).count();
        println!(
            "run {} {:?} ue-{} -> gnb-{}: {:?}, CN messages {cn_hops}, checkpoints {:?}",
            r.id, r.kind, r.ue, r.gnb, r.status, r.checkpoints
        );
    }
}
