//! One initial authentication driven entity by entity, with the messages
//! passed through the wire encoding.

use mvno_aka::protocol::{exchange_params, Cn, Gnb, Mno, Mvno, ProtocolConfig, Timestamp, Ue};
use mvno_aka::wire::{decode, encode, Message};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn wire(m: Message) -> Message {
    let bytes = encode(&m).unwrap();
    println!("  {:<3} {:>5} bytes", m.name(), bytes.len());
    decode(&bytes).unwrap()
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let config = ProtocolConfig {
        session_keys: true,
        ..Default::default()
    };
    let now = Timestamp(1_750_000_000_000);

    // Registration: the host network, one cell, the virtual operator, users.
    let mut mno = Mno::new();
    let mut cn = Cn::new(mno.setup_cn(&mut rng).unwrap(), config.clone());
    let p = mno
        .register_gnb("gnb-0", b"cell-0", now.plus_ms(86_400_000), now, &mut rng)
        .unwrap();
    let mut gnb = Gnb::new(p, config.clone());
    let mut mvno = Mvno::setup(b"example-mvno");
    exchange_params(&mut mvno, &mno, &mut cn).unwrap();
    let mut ues = Vec::new();
    for name in ["alice", "bob", "carol", "dave"] {
        ues.push(Ue::new(
            mvno.register_user(name.as_bytes(), &mut rng).unwrap(),
            config.clone(),
        ));
    }
    cn.push_aka_list(mvno.aka_list().clone()).unwrap();
    let ue = &mut ues[1];
    ue.update_aka_list(mvno.aka_list().clone());

    println!("AKA for one of {} users:", mvno.user_count());
    let Message::M1(m1) = wire(Message::M1(gnb.make_m1(now, &mut rng).unwrap())) else {
        unreachable!()
    };
    let Message::M2(m2) = wire(Message::M2(
        ue.process_m1(&m1, gnb.id(), now, &mut rng).unwrap(),
    )) else {
        unreachable!()
    };
    let Message::M3(m3) = wire(Message::M3(gnb.process_m2(&m2, now).unwrap())) else {
        unreachable!()
    };
    let issued = cn.process_m3(gnb.id(), &m3, now, &mut rng).unwrap();
    mvno.record_issuance(&issued.report).unwrap();
    let Message::M4(m4) = wire(Message::M4(issued.m4)) else {
        unreachable!()
    };
    let (m4, gnb_key) = gnb.relay_m4(&m4).unwrap();
    let uid = ue.process_m4(&m4, now).unwrap();

    println!(
        "UID issued, CN signature valid: {}",
        uid.verify(&cn.public().spk)
    );
    println!(
        "session keys agree: {}",
        gnb_key.is_some() && gnb_key.as_ref() == ue.session_key()
    );
}
