//! Revoking a user: the MVNO maps the pseudonym back through its escrow and
//! has both lists updated. The revoked UE fails whether it uses the new
//! lists or keeps proving against the old ones.

use mvno_aka::harness::{ScenarioConfig, Step, World};

fn main() {
    let mut w = World::new(ScenarioConfig {
        n_ues: 2,
        ..Default::default()
    })
    .unwrap();
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Aka { ue: 1, gnb: 0 },
        Step::Revoke { ue: 0 },
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
    ]);
    let stale = w.pre_revocation_lists(0);
    w.freeze_lists(0, Some(stale));
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
    ]);
    w.freeze_lists(0, None);
    w.run_steps(&[Step::Handover { ue: 1, gnb: 1 }]);

    for r in &w.transcript().runs {
        println!("ue-{} {:?} at gnb-{}: {:?}", r.ue, r.kind, r.gnb, r.status);
    }
    for n in &w.transcript().notes {
        println!("note: {} {:?}", n.op, n.result);
    }
}
