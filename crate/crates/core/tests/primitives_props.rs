use curve25519_dalek::scalar::Scalar;
use mvno_aka::primitives::{
    ch_collide, ch_hash, ch_randomness, commit, decommit, pke_decrypt, pke_encrypt, sansig_sanit,
    sansig_sign, sansig_verify, verify, AdmPolicy, ChameleonKeyPair, CommitmentKey, CryptoError,
    EncKeyPair, SanSigKeys, SigKeyPair, Signature, PKE_OVERHEAD,
};
use proptest::collection::vec;
use proptest::prelude::*;
use rand_chacha::ChaCha20Rng;
use rand_core::{CryptoRng, RngCore, SeedableRng};

/// Replays fixed bytes, so key generation can be pinned to a known seed.
struct Fixed([u8; 32]);

impl RngCore for Fixed {
    fn next_u32(&mut self) -> u32 {
        unreachable!()
    }
    fn next_u64(&mut self) -> u64 {
        unreachable!()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        dest.copy_from_slice(&self.0[..dest.len()]);
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

impl CryptoRng for Fixed {}

fn unhex<const N: usize>(s: &str) -> [u8; N] {
    hex::decode(s).unwrap().try_into().unwrap()
}

#[test]
fn ed25519_matches_rfc8032_vectors() {
    let cases = [
        (
            "9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60",
            "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a",
            "",
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b",
        ),
        (
            "4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb",
            "3d4017c3e843895a92b70aa74d1b7ebc9c982ccf2ec4968cc0cd55f12af4660c",
            "72",
            "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da085ac1e43e15996e458f3613d0f11d8c387b2eaeb4302aeeb00d291612bb0c00",
        ),
    ];
    for (sk, pk, msg, sig) in cases {
        let kp = SigKeyPair::generate(&mut Fixed(unhex(sk)));
        assert_eq!(hex::encode(kp.verify_key().0), pk);
        let msg = hex::decode(msg).unwrap();
        let s = kp.sign(&msg);
        assert_eq!(hex::encode(s.as_bytes()), sig);
        verify(
            &kp.verify_key(),
            &msg,
            &Signature::from_bytes(&unhex::<64>(sig)).unwrap(),
        )
        .unwrap();
    }
}

#[test]
fn commitment_key_generators_open_unit_vectors() {
    let ck = CommitmentKey::derive(b"props");
    let [g, h] = ck.generators();
    assert_eq!(*commit(&ck, &Scalar::ONE, &Scalar::ZERO).point(), g);
    assert_eq!(*commit(&ck, &Scalar::ZERO, &Scalar::ONE).point(), h);
    assert_ne!(g, h);
}

fn scalar(x: u64, y: u64) -> Scalar {
    Scalar::from(x) * Scalar::from(u64::MAX) + Scalar::from(y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commitments_add_and_open(a in any::<(u64, u64, u64, u64)>(), b in any::<(u64, u64, u64, u64)>()) {
        let ck = CommitmentKey::derive(b"props");
        let (m1, r1) = (scalar(a.0, a.1), scalar(a.2, a.3));
        let (m2, r2) = (scalar(b.0, b.1), scalar(b.2, b.3));
        let c1 = commit(&ck, &m1, &r1);
        let c2 = commit(&ck, &m2, &r2);
        prop_assert_eq!(c1.point() + c2.point(), *commit(&ck, &(m1 + m2), &(r1 + r2)).point());
        prop_assert_eq!(decommit(&ck, &c1, &m1, &r1), Ok(m1));
        if (m1, r1) != (m2, r2) {
            prop_assert_ne!(c1.to_bytes(), c2.to_bytes());
            prop_assert_eq!(decommit(&ck, &c1, &m2, &r2), Err(CryptoError::OpeningMismatch));
        }
    }

    #[test]
    fn chameleon_collisions_need_the_trapdoor(seed in any::<u64>(), a in vec(any::<u8>(), 0..64), b in vec(any::<u8>(), 0..64)) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = ChameleonKeyPair::generate(&mut rng);
        let r = ch_randomness(&mut rng);
        let d = ch_hash(kp.public(), &a, &r).unwrap();
        let r2 = ch_collide(&kp, &d, &b, &mut rng).unwrap();
        prop_assert_eq!(ch_hash(kp.public(), &b, &r2).unwrap(), d);
        if a != b {
            // Without the trapdoor, the original randomness does not carry over.
            prop_assert_ne!(ch_hash(kp.public(), &b, &r).unwrap(), d);
        }
    }

    #[test]
    fn sanitize_then_verify(seed in any::<u64>(), n in 1usize..=8, adm_mask in any::<u8>(), mod_mask in any::<u8>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keys = SanSigKeys::generate(&mut rng);
        let pk_sig = keys.signer.verify_key();
        let pk_san = *keys.sanitizer.public();
        let blocks: Vec<Vec<u8>> = (0..n).map(|i| vec![i as u8; i + 1]).collect();
        let adm = AdmPolicy::new((0..n).filter(|i| adm_mask >> i & 1 == 1));
        let sig = sansig_sign(&blocks, &keys.signer, &pk_san, &adm, &mut rng).unwrap();
        prop_assert!(sansig_verify(&blocks, &sig, &pk_sig, &pk_san).is_ok());

        let mods: Vec<(usize, Vec<u8>)> = adm
            .indices()
            .filter(|i| mod_mask >> i & 1 == 1)
            .map(|i| (i, format!("new-{i}").into_bytes()))
            .collect();
        let (blocks2, sig2) = sansig_sanit(&blocks, &mods, &sig, &pk_sig, &keys.sanitizer, &mut rng).unwrap();
        prop_assert!(adm.admits(&blocks2, &blocks));
        prop_assert!(sansig_verify(&blocks2, &sig2, &pk_sig, &pk_san).is_ok());

        // Any fixed block edited after signing breaks verification, and the
        // sanitizer refuses to touch it.
        if let Some(fixed) = (0..n).find(|i| !adm.contains(*i)) {
            let mut bad = blocks2.clone();
            bad[fixed].push(0xff);
            prop_assert!(sansig_verify(&bad, &sig2, &pk_sig, &pk_san).is_err());
            let refused = sansig_sanit(&blocks, &[(fixed, vec![1])], &sig, &pk_sig, &keys.sanitizer, &mut rng);
            prop_assert_eq!(refused.unwrap_err(), CryptoError::FixedBlock(fixed));
        }
    }

    #[test]
    fn pke_round_trip_and_tamper(seed in any::<u64>(), msg in vec(any::<u8>(), 0..300), flip in any::<usize>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = EncKeyPair::generate(&mut rng);
        let ct = pke_encrypt(kp.encryption_key(), &msg, &mut rng).unwrap();
        prop_assert_eq!(ct.len(), msg.len() + PKE_OVERHEAD);
        prop_assert_eq!(pke_decrypt(kp.decryption_key(), &ct).unwrap(), msg.clone());

        let mut t = ct.clone();
        let bit = flip % (t.len() * 8);
        t[bit / 8] ^= 1 << (bit % 8);
        prop_assert_eq!(pke_decrypt(kp.decryption_key(), &t), Err(CryptoError::Decrypt));
        prop_assert!(pke_decrypt(kp.decryption_key(), &ct[..ct.len() - 1]).is_err());

        let other = EncKeyPair::generate(&mut rng);
        prop_assert!(pke_decrypt(other.decryption_key(), &ct).is_err());
    }

    #[test]
    fn signatures_bind_message(seed in any::<u64>(), msg in vec(any::<u8>(), 0..100), flip in any::<usize>()) {
        let kp = SigKeyPair::generate(&mut ChaCha20Rng::seed_from_u64(seed));
        let s = kp.sign(&msg);
        prop_assert!(verify(&kp.verify_key(), &msg, &s).is_ok());
        let mut m2 = msg.clone();
        m2.push(0);
        prop_assert!(verify(&kp.verify_key(), &m2, &s).is_err());
        let mut b = *s.as_bytes();
        b[flip % 64] ^= 1 << (flip % 8);
        if let Ok(s2) = Signature::from_bytes(&b) {
            prop_assert!(verify(&kp.verify_key(), &msg, &s2).is_err());
        }
    }
}

#[test]
fn toy_scalar_binding_brute_force() {
    // 10^5 distinct openings with small scalars: every commitment distinct.
    let ck = CommitmentKey::derive(b"toy");
    let mut seen = std::collections::HashSet::new();
    for m in 0u64..500 {
        for r in 0u64..200 {
            assert!(seen.insert(commit(&ck, &Scalar::from(m), &Scalar::from(r)).to_bytes()));
        }
    }
    assert_eq!(seen.len(), 100_000);
}
