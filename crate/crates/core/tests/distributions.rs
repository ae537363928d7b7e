//! Honey outputs under uniformly random seeds.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use seiguard_core::space::email::is_valid_email;
use seiguard_core::space::name::{build_firstname, build_lastname, MIN_SEED_UNIT, SURNAME_SEED_INITIAL};
use seiguard_core::space::{
    BirthWindow, EmailSpace, FirstnameCorpus, HoneyDataset, IdBodySpace, IdNumberSpace, IncrementalParams, NamePart,
    PrefixEntry, PrefixTable, SurnameTable, UniformSpace, WeightModel,
};
use seiguard_core::stats::{chi_square, chi_square_uniform};
use seiguard_core::{derive_key, ChunkedMapStore, MemStorage, Seed, Storage};

const ALPHA: f64 = 0.001;

fn counts<I: IntoIterator<Item = String>>(it: I) -> HashMap<String, u64> {
    let mut h = HashMap::new();
    for m in it {
        *h.entry(m).or_insert(0) += 1;
    }
    h
}

#[test]
fn phone_honey_is_uniform() {
    let s = UniformSpace::new("pin", PrefixTable::new(vec![PrefixEntry::new("", 3)]).unwrap()).unwrap();
    let st = s.build_mapfiles(Arc::new(MemStorage::new()), "pin", 100_000).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    let mut obs = vec![0u64; 1000];
    for _ in 0..1_000_000 {
        let m = s.decode(&st, Seed(rng.next_u64())).unwrap();
        obs[m.parse::<usize>().unwrap()] += 1;
    }
    let c = chi_square_uniform(&obs);
    assert!(c.p_value > ALPHA, "{c:?}");
}

#[test]
fn id_honey_is_uniform_and_valid() {
    let d = chrono::NaiveDate::from_ymd_opt(1990, 6, 1).unwrap();
    let bodies = IdBodySpace::new(vec!["110108".into()], BirthWindow::new(d, d).unwrap()).unwrap();
    let s = IdNumberSpace::new("id", bodies).unwrap();
    let st = s.build_mapfiles(Arc::new(MemStorage::new()), "id", 100_000).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let mut obs = vec![0u64; 1000];
    for _ in 0..200_000 {
        let id = s.decode_full(Some(&st), Seed(rng.next_u64())).unwrap();
        assert!(s.validate(&id));
        obs[id[14..17].parse::<usize>().unwrap()] += 1;
    }
    assert!(chi_square_uniform(&obs).p_value > ALPHA);
}

fn email_space(honey: usize, rng: &mut ChaCha20Rng) -> EmailSpace {
    let store = ChunkedMapStore::create_empty(Arc::new(MemStorage::new()), "email", 100_000).unwrap();
    EmailSpace::new(store, IncrementalParams::default(), HoneyDataset::synthetic(honey, rng)).unwrap()
}

#[test]
fn email_honey_is_uniform_over_mapped_lines() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let s = email_space(5000, &mut rng);
    s.bootstrap(1000, &mut rng).unwrap();
    // Duplicate honey picks are allowed, so count by line position.
    let mut obs = vec![0u64; 1000];
    let snap = s.store().snapshot();
    for _ in 0..100_000 {
        let seed = rng.next_u64() as u128 % snap.total_end;
        obs[s.store().locate_in(&snap, seed).unwrap().position as usize] += 1;
    }
    assert!(chi_square_uniform(&obs).p_value > ALPHA);
}

#[test]
fn real_email_position_is_uniform_within_block() {
    let mut rng = ChaCha20Rng::seed_from_u64(103);
    let s = email_space(500, &mut rng);
    let mut obs = vec![0u64; 10];
    let first = s.register_encode("first@example.org", &mut rng).unwrap();
    for i in 0..10_000 {
        let before = s.seed_num();
        let r = s.register_encode(&format!("user{i}@example.org"), &mut rng).unwrap();
        obs[((r.seed.0 as u128 - before) / 10) as usize] += 1;
        assert_eq!(r.seed_num, before + 100);
        assert_eq!(s.store().total_end(), r.seed_num);
    }
    assert!(chi_square_uniform(&obs).p_value > ALPHA, "{obs:?}");
    // Seeds issued early still decode after growth.
    assert_eq!(s.decode(first.seed).unwrap(), "first@example.org");
}

#[test]
fn wrong_key_email_decodes_are_valid() {
    let mut rng = ChaCha20Rng::seed_from_u64(104);
    let s = email_space(2000, &mut rng);
    s.bootstrap(1000, &mut rng).unwrap();
    let r = s.register_encode("zuoguang@iie.ac.cn", &mut rng).unwrap();
    let c = derive_key("right").unwrap().encrypt(r.seed);
    for i in 0..100_000 {
        let guess = derive_key(&format!("guess{i}")).unwrap();
        let m = s.decode(guess.decrypt(c)).unwrap();
        assert!(is_valid_email(&m), "{m}");
    }
}

fn name_storage() -> Arc<dyn Storage> {
    let storage: Arc<dyn Storage> = Arc::new(MemStorage::new());
    let corpus = FirstnameCorpus::new([vec!['大', '卫'], vec!['作'], vec!['广']], vec!["大卫".into()]).unwrap();
    build_firstname(storage.clone(), "firstname", &corpus, &WeightModel::default(), 100_000).unwrap();
    let t = SurnameTable::new(vec![("李".into(), 0.75), ("王".into(), 0.25)]).unwrap();
    build_lastname(storage.clone(), "lastname", &t, SURNAME_SEED_INITIAL, 100_000).unwrap();
    storage
}

#[test]
fn surname_honey_follows_frequencies() {
    let last = NamePart::open_lastname(name_storage(), "lastname").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(105);
    let h = counts((0..100_000).map(|_| last.decode(Seed(rng.next_u64())).unwrap()));
    let c = chi_square(&[h["李"], h["王"]], &[0.75, 0.25]);
    assert!(c.p_value > ALPHA, "{h:?}");
}

#[test]
fn firstname_honey_follows_weights() {
    let first = NamePart::open_firstname(name_storage(), "firstname").unwrap();
    let lines = first.store().all_lines().unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(106);
    let h = counts((0..200_000).map(|_| first.decode(Seed(rng.next_u64())).unwrap()));
    // Pool lines too light to expect 5 hits into one bucket.
    let total = first.seed_num() as f64;
    let (mut obs, mut exp) = (Vec::new(), Vec::new());
    let (mut rest_o, mut rest_e) = (0u64, 0f64);
    for l in &lines {
        let p = l.block_size.unwrap() as f64 / total;
        let o = h.get(&l.message).copied().unwrap_or(0);
        if p * 200_000.0 >= 5.0 {
            obs.push(o);
            exp.push(p);
        } else {
            rest_o += o;
            rest_e += p;
        }
    }
    obs.push(rest_o);
    exp.push(rest_e);
    let c = chi_square(&obs, &exp);
    assert!(c.p_value > ALPHA, "{c:?}");
}

#[test]
fn weight_blocks_are_exact_powers() {
    let first = NamePart::open_firstname(name_storage(), "firstname").unwrap();
    let allowed = [1_000_000_000u128, 10_000_000, 100_000, 1_000, 10, 10_000_000_000_000];
    for l in first.store().all_lines().unwrap() {
        assert!(allowed.contains(&l.block_size.unwrap()), "{l:?}");
    }
    let mut rng = ChaCha20Rng::seed_from_u64(107);
    let before = first.seed_num();
    let (seed, num) = first.encode("龘", &mut rng).unwrap();
    assert_eq!(num, before + MIN_SEED_UNIT);
    assert_eq!(first.decode(seed).unwrap(), "龘");
}
