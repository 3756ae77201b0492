//! A gNB certificate signed once by the core network and re-stamped by the
//! gNB for every broadcast without going back to the signer.

use mvno_aka::primitives::{sansig_sanit, sansig_sign, sansig_verify, AdmPolicy, SanSigKeys};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let keys = SanSigKeys::generate(&mut rng);
    let pk_sig = keys.signer.verify_key();
    let pk_san = *keys.sanitizer.public();

    // location | expiry | id | timestamp; only the timestamp may change.
    let blocks = vec![
        b"cell-17/area-3".to_vec(),
        1_781_536_000_000u64.to_be_bytes().to_vec(),
        b"gnb-17".to_vec(),
        1_750_000_000_000u64.to_be_bytes().to_vec(),
    ];
    let adm = AdmPolicy::new([3]);
    let sig = sansig_sign(&blocks, &keys.signer, &pk_san, &adm, &mut rng).unwrap();
    println!(
        "signed, {} bytes, verifies: {}",
        sig.to_bytes().len(),
        sansig_verify(&blocks, &sig, &pk_sig, &pk_san).is_ok()
    );

    let fresh = 1_750_000_060_000u64.to_be_bytes().to_vec();
    let (restamped, sig2) = sansig_sanit(
        &blocks,
        &[(3, fresh)],
        &sig,
        &pk_sig,
        &keys.sanitizer,
        &mut rng,
    )
    .unwrap();
    println!(
        "re-stamped verifies: {}",
        sansig_verify(&restamped, &sig2, &pk_sig, &pk_san).is_ok()
    );

    let mut moved = restamped.clone();
    moved[0] = b"cell-99/area-1".to_vec();
    println!(
        "moved cell verifies: {}",
        sansig_verify(&moved, &sig2, &pk_sig, &pk_san).is_ok()
    );
    let refused = sansig_sanit(
        &blocks,
        &[(2, b"gnb-99".to_vec())],
        &sig,
        &pk_sig,
        &keys.sanitizer,
        &mut rng,
    );
    println!("sanitizer may rename the gNB: {}", refused.is_ok());
}
