//! The scripted network adversary: tampering with frames in flight, plus
//! the canned replay and fake base station attacks.

use mvno_aka::harness::{
    attack_fake_gnb, attack_replay, Action, AdversaryScript, ByteEdit, Matcher, Rule,
    ScenarioConfig, Step, World,
};
use mvno_aka::wire::{TAG_M2, TAG_M4};

fn main() {
    let mut w = World::new(ScenarioConfig {
        n_ues: 2,
        ..Default::default()
    })
    .unwrap();
    let edit = |offset| Action::Modify(vec![ByteEdit { offset, xor: 0x01 }]);
    w.set_script(AdversaryScript {
        rules: vec![
            Rule {
                matcher: Matcher::any().tag(TAG_M2).step(0),
                action: edit(-1),
            },
            Rule {
                matcher: Matcher::any().tag(TAG_M4).step(1),
                action: Action::Drop,
            },
        ],
    });
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Aka { ue: 1, gnb: 0 },
        Step::Aka { ue: 1, gnb: 1 },
    ]);
    for r in &w.transcript().runs {
        println!("step {} ue-{}: {:?}", r.step, r.ue, r.status);
    }

    let replay = attack_replay(&ScenarioConfig::default()).unwrap();
    for c in &replay.cases {
        println!("replayed {:<5} {:?}: {:?}", c.message, c.window, c.outcome);
    }
    let fake = attack_fake_gnb(&ScenarioConfig::default(), 100).unwrap();
    println!(
        "fake base station: {} accepted out of {}",
        fake.accepts(),
        fake.self_keyed_attempts + fake.stale_attempts + fake.forgery_attempts
    );
}
