//! Proving "my committed identity is on the list" without saying which
//! entry, and checking that proofs look alike wherever the prover sits.

use mvno_aka::primitives::{commit, random_scalar, CommitmentKey};
use mvno_aka::zk::{
    crs_gen, make_tag, prove_membership, simulate_proof, verify_membership, AuthorizedList, Witness,
};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (crs, trapdoor) = crs_gen(128, None).unwrap();
    let ck = CommitmentKey::derive(b"example");

    let members: Vec<_> = (0..32).map(|_| random_scalar(&mut rng)).collect();
    let mut list = AuthorizedList::new();
    for m in &members {
        list.push(make_tag(m)).unwrap();
    }

    for pos in [0, 31] {
        let w = Witness {
            identity: members[pos],
            randomness: random_scalar(&mut rng),
        };
        let c = commit(&ck, &w.identity, &w.randomness);
        let p = prove_membership(&crs, &ck, &w, &list, b"session-1", &mut rng).unwrap();
        let ok = verify_membership(&crs, &ck, &c, &list, b"session-1", &p).is_ok();
        let replayed = verify_membership(&crs, &ck, &c, &list, b"session-2", &p).is_ok();
        println!(
            "position {pos:>2}: {} bytes, verifies {ok}, other context {replayed}",
            p.to_bytes().len()
        );
    }

    // The trapdoor holder can prove for any commitment: this is why the
    // proofs reveal nothing about the witness.
    let c = commit(&ck, &random_scalar(&mut rng), &random_scalar(&mut rng));
    let sim = simulate_proof(&crs, &ck, &trapdoor, &c, &list, b"session-1", &mut rng).unwrap();
    println!(
        "simulated proof verifies: {}",
        verify_membership(&crs, &ck, &c, &list, b"session-1", &sim).is_ok()
    );
}
