//! Pedersen commitments and identity tags.

use curve25519_dalek::scalar::Scalar;
use mvno_aka::primitives::{commit, decommit, random_scalar, CommitmentKey};
use mvno_aka::zk::{identity_scalar, make_tag};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let ck = CommitmentKey::derive(b"example");

    let id = identity_scalar("user", b"alice@mvno.example");
    let r = random_scalar(&mut rng);
    let c = commit(&ck, &id, &r);
    println!("commitment   {}", hex::encode(c.to_bytes()));
    println!("opens        {}", decommit(&ck, &c, &id, &r).is_ok());
    println!(
        "wrong opens  {}",
        decommit(&ck, &c, &(id + Scalar::ONE), &r).is_ok()
    );

    // Same identity, fresh randomness: unrelated-looking bytes.
    let c2 = commit(&ck, &id, &random_scalar(&mut rng));
    println!("recommitted  {}", hex::encode(c2.to_bytes()));

    // The tag is what goes on the authorized list.
    let tag = make_tag(&id);
    println!("tag          {}", hex::encode(tag.as_bytes()));
}
