mod common;

use std::collections::HashSet;
use std::sync::Arc;

use md5::{Digest, Md5};
use seiguard_core::space::email::is_valid_email;
use seiguard_core::{derive_key, DirStorage, MemStorage};
use seiguard_server::{LoginResponse, SeiGuard, ServiceError, UserDb};

use common::{service, wzg018};

fn mem_service() -> SeiGuard {
    service(Arc::new(MemStorage::new()), UserDb::open_in_memory().unwrap())
}

fn assert_well_formed(svc: &SeiGuard, r: &LoginResponse) {
    let s = svc.spaces();
    assert!(s.phone.rank_of(&r.phone).is_some(), "{r:?}");
    assert!(s.id_number.validate(&r.id_number), "{r:?}");
    assert!(is_valid_email(&r.email), "{r:?}");
    let n = r.name.chars().count();
    assert!((2..=6).contains(&n), "{r:?}");
}

#[test]
fn correct_password_returns_registered_values() {
    let svc = mem_service();
    svc.register(&wzg018("correct horse")).unwrap();
    let (r, t) = svc.login("wzg018", "correct horse").unwrap();
    assert_eq!(
        r,
        LoginResponse {
            username: "wzg018".into(),
            phone: "13651160987".into(),
            id_number: "140122199801070048".into(),
            email: "wangzuoguang16@mails.ucas.ac.cn".into(),
            name: "王作广".into(),
        }
    );
    assert_eq!(t.path(), "fetch>key>phone>id>email>lastname>firstname");
}

#[test]
fn wrong_passwords_return_honey() {
    let svc = mem_service();
    svc.register(&wzg018("correct horse")).unwrap();
    let mut phones = HashSet::new();
    for i in 0..300 {
        let (r, _) = svc.login("wzg018", &format!("guess{i}")).unwrap();
        assert_well_formed(&svc, &r);
        phones.insert(r.phone);
    }
    assert!(phones.len() > 290);
}

#[test]
fn unknown_user_is_deceptive_error() {
    let svc = mem_service();
    let err = svc.login("nobody", "x").unwrap_err();
    assert!(matches!(err, ServiceError::BadCredentials));
    assert_eq!(err.to_string(), "the username or password is wrong");
}

#[test]
fn duplicate_username_changes_nothing() {
    let svc = mem_service();
    svc.register(&wzg018("a")).unwrap();
    let totals = svc.spaces().totals().map(|(n, t)| (n.to_owned(), t));
    let before = svc.db().get("wzg018").unwrap();
    let err = svc.register(&wzg018("b")).unwrap_err();
    assert_eq!(err.to_string(), "the username has existed");
    assert_eq!(svc.db().get("wzg018").unwrap(), before);
    assert_eq!(svc.spaces().totals().map(|(n, t)| (n.to_owned(), t)), totals);
}

#[test]
fn invalid_fields_rejected_before_encoding() {
    let svc = mem_service();
    let lines = svc.spaces().email.store().line_count();
    let mut bad = wzg018("p");
    bad.id_number = "140122199801070049".into();
    assert_eq!(svc.register(&bad).unwrap_err().to_string(), "the ID N.O. is not valid");
    let mut bad = wzg018("p");
    bad.phone = "13800000000".into();
    assert!(matches!(svc.register(&bad), Err(ServiceError::Invalid(_))));
    let mut bad = wzg018("p");
    bad.email = "not-an-email".into();
    assert!(matches!(svc.register(&bad), Err(ServiceError::Invalid(_))));
    let mut bad = wzg018("");
    bad.username = "x".into();
    assert!(matches!(svc.register(&bad), Err(ServiceError::Invalid(_))));
    assert_eq!(svc.spaces().email.store().line_count(), lines);
    assert_eq!(svc.db().user_count().unwrap(), 0);
}

#[test]
fn different_passwords_give_different_ciphertexts() {
    let a = mem_service();
    let b = mem_service();
    a.register(&wzg018("first password")).unwrap();
    b.register(&wzg018("second password")).unwrap();
    let (ra, rb) = (a.db().get("wzg018").unwrap().unwrap(), b.db().get("wzg018").unwrap().unwrap());
    assert_ne!(ra.phone, rb.phone);
    assert_ne!(ra.id_number, rb.id_number);
    assert_ne!(ra.email, rb.email);
    assert_ne!(ra.firstname, rb.firstname);
    assert_ne!(ra.lastname, rb.lastname);
}

#[test]
fn counters_track_stores_and_reconcile() {
    let dir = tempfile::tempdir().unwrap();
    let storage = Arc::new(DirStorage::new(dir.path().join("maps")).unwrap());
    let db_path = dir.path().join("sg.db");
    {
        let svc = service(storage.clone(), UserDb::open(&db_path).unwrap());
        for i in 0..5 {
            let mut r = wzg018("pw");
            r.username = format!("user{i}");
            r.firstname = "龘".into();
            svc.register(&r).unwrap();
        }
        for (name, total) in svc.spaces().totals() {
            assert_eq!(svc.db().counter(name).unwrap(), Some(total));
        }
        assert_eq!(svc.db().counter("email").unwrap(), Some(10 * 1000 + 5 * 100));
    }
    // Simulate a crash between the store append and the counter commit.
    let db = UserDb::open(&db_path).unwrap();
    db.reconcile(&[("email", 7)]).unwrap();
    drop(db);
    let svc = service(storage, UserDb::open(&db_path).unwrap());
    assert_eq!(svc.db().counter("email").unwrap(), Some(10_500));
    let (r, _) = svc.login("user3", "pw").unwrap();
    assert_eq!(r.name, "王龘");
}

#[test]
fn nothing_password_derived_is_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let storage = Arc::new(DirStorage::new(dir.path().join("maps")).unwrap());
    let db = UserDb::open(dir.path().join("sg.db")).unwrap();
    let svc = service(storage, db);
    let password = "Purity!Check-7731";
    svc.register(&wzg018(password)).unwrap();
    svc.db().checkpoint().unwrap();

    let md5_hex: String = Md5::digest(password.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let key = derive_key(password).unwrap().0;
    let needles = [
        password.to_owned(),
        md5_hex.clone(),
        md5_hex.to_uppercase(),
        key.to_string(),
        format!("{key:x}"),
        format!("{key:X}"),
    ];
    let mut scanned = 0;
    for entry in walk(dir.path()) {
        let bytes = std::fs::read(&entry).unwrap();
        let text = String::from_utf8_lossy(&bytes);
        for n in &needles {
            assert!(!text.contains(n.as_str()), "{n} found in {}", entry.display());
        }
        scanned += 1;
    }
    assert!(scanned > 5);
    for (table, cols) in svc.db().schema().unwrap() {
        for c in cols {
            assert!(!c.contains("pass") && !c.contains("hash"), "{table}.{c}");
        }
    }
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn login_path_is_password_independent() {
    let svc = mem_service();
    svc.register(&wzg018("right")).unwrap();
    let reference = svc.login("wzg018", "right").unwrap().1.path();
    for i in 0..1000 {
        let pw = if i % 2 == 0 { "right".to_owned() } else { format!("wrong{i}") };
        assert_eq!(svc.login("wzg018", &pw).unwrap().1.path(), reference);
    }
}

#[test]
fn concurrent_registrations_keep_counters_consistent() {
    let svc = Arc::new(mem_service());
    let handles: Vec<_> = (0..8)
        .map(|t| {
            let svc = svc.clone();
            std::thread::spawn(move || {
                for i in 0..10 {
                    let mut r = wzg018(&format!("pw{t}{i}"));
                    r.username = format!("u{t}_{i}");
                    svc.register(&r).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert_eq!(svc.spaces().email.seed_num(), 10_000 + 80 * 100);
    assert_eq!(svc.db().counter("email").unwrap(), Some(svc.spaces().email.seed_num()));
    for t in 0..8 {
        let (r, _) = svc.login(&format!("u{t}_3"), &format!("pw{t}3")).unwrap();
        assert_eq!(r.email, "wangzuoguang16@mails.ucas.ac.cn");
    }
}
